use std::path::PathBuf;
use std::process::Command;

use orbitreg::cli::input::InputDocument;

const SHEAR_PAIR: &str = "\
[field]
R

[constants]
sqrt2 = sqrt(2)
pi = pi

[generators]
1, 0, 0, 0; 0, 1, 0, 0; 0, 0, 1, 0; 1, 0, 0, 1

1, 0, 0, 0; 0, 1, 0, 0; 0, 0, 1, 0; 0, 1, 0, 1

[vectors]
u1 = 1, 1, 0, 0
u2 = 1, sqrt2, 0, 0
";

const DENSE: &str = "\
[field]
C
[constants]
c1 = cos(1)
s1 = sin(1)
[generators]
2

3*c1 + 3*s1 i
[vectors]
u = 1
";

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("orbitreg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn orbitreg(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_orbitreg"));
    cmd.args(args);
    for var in ["ORBITREG_PRECISION", "ORBITREG_TAU", "ORBITREG_STRICT_EXACT", "ORBITREG_WORD_LENGTH", "ORBITREG_EXPORT"] {
        cmd.env_remove(var);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Value of `key` inside `[section]`.
fn field<'a>(report: &'a str, section: &str, key: &str) -> Option<&'a str> {
    let header = format!("[{section}]");
    let mut inside = false;
    for line in report.lines() {
        if line.starts_with('[') {
            inside = line == header;
            continue;
        }
        if inside {
            if let Some((k, v)) = line.split_once(" = ") {
                if k == key {
                    return Some(v);
                }
            }
        }
    }
    None
}

#[test]
fn analyze_shear_pair() {
    let path = temp_file("s6.txt", SHEAR_PAIR);
    let r = orbitreg(&["analyze", path.to_str().unwrap()], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(field(&r.stdout, "vector.u1", "order"), Some("0"));
    assert_eq!(field(&r.stdout, "vector.u1", "classification"), Some("discrete"));
    assert_eq!(field(&r.stdout, "vector.u2", "order"), Some("1"));
    assert_eq!(field(&r.stdout, "vector.u2", "classification"), Some("regular(1)"));
    assert_eq!(field(&r.stdout, "vector.u2", "tier"), Some("exact"));
    assert_eq!(field(&r.stdout, "vector.u2", "hyperplane.1"), Some("1, 0, 0, 0"));
    assert!(field(&r.stdout, "assumptions", "independence").is_some());
    assert_eq!(field(&r.stdout, "report", "version"), Some(env!("CARGO_PKG_VERSION")));
}

#[test]
fn zero_vector() {
    let path = temp_file("zero.txt", &SHEAR_PAIR.replace("u1 = 1, 1, 0, 0\nu2 = 1, sqrt2, 0, 0", "z = 0, 0, 0, 0"));
    let r = orbitreg(&["analyze", path.to_str().unwrap()], &[]);
    assert_eq!(r.code, 0);
    assert_eq!(field(&r.stdout, "vector.z", "order"), Some("0"));
    assert_eq!(field(&r.stdout, "vector.z", "r_u"), Some("0"));
    assert_eq!(field(&r.stdout, "vector.z", "e_basis.1"), None);
}

#[test]
fn non_commuting_generators_exit_2() {
    let path = temp_file("nc.txt", "[generators]\n1, 1; 0, 1\n\n1, 0; 1, 1\n[vectors]\nu = 1, 0\n");
    let r = orbitreg(&["analyze", path.to_str().unwrap()], &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("A1 and A2 do not commute"), "{}", r.stderr);
}

#[test]
fn validation_errors_exit_2() {
    for (name, text) in [
        ("bad-literal.txt", "[generators]\n2\n[vectors]\nu = 1 +\n"),
        ("singular.txt", "[generators]\n0\n[vectors]\nu = 1\n"),
        ("not-real.txt", "[field]\nR\n[generators]\ni\n[vectors]\nu = 1\n"),
        ("unknown.txt", "[generators]\nfoo\n[vectors]\nu = 1\n"),
    ] {
        let path = temp_file(name, text);
        let r = orbitreg(&["analyze", path.to_str().unwrap()], &[]);
        assert_eq!(r.code, 2, "{name}: {}", r.stderr);
        assert!(r.stderr.starts_with("error: "));
    }
    let r = orbitreg(&["analyze", "/nonexistent/orbitreg-input.txt"], &[]);
    assert_eq!(r.code, 2);
}

#[test]
fn strict_exact_tier_failure_exit_3() {
    let path = temp_file("dense.txt", DENSE);
    let p = path.to_str().unwrap();
    let relaxed = orbitreg(&["analyze", p], &[]);
    assert_eq!(relaxed.code, 0);
    assert_eq!(field(&relaxed.stdout, "vector.u", "tier"), Some("numeric"));
    assert_eq!(field(&relaxed.stdout, "vector.u", "classification"), Some("dense_in_ambient"));

    let strict = orbitreg(&["analyze", p, "--strict-exact"], &[]);
    assert_eq!(strict.code, 3);
    assert_eq!(field(&strict.stdout, "vector.u", "error.kind"), Some("tier"));

    let via_env = orbitreg(&["analyze", p], &[("ORBITREG_STRICT_EXACT", "true")]);
    assert_eq!(via_env.code, 3);
}

#[test]
fn environment_overrides() {
    let path = temp_file("env.txt", SHEAR_PAIR);
    let p = path.to_str().unwrap();
    let r = orbitreg(&["analyze", p], &[("ORBITREG_PRECISION", "45"), ("ORBITREG_TAU", "1e-30")]);
    assert_eq!(r.code, 0);
    assert_eq!(field(&r.stdout, "settings", "precision"), Some("45"));
    assert_eq!(field(&r.stdout, "settings", "tau"), Some("1e-30"));
    // the flag beats the environment
    let r = orbitreg(&["analyze", p, "--precision", "50"], &[("ORBITREG_PRECISION", "45")]);
    assert_eq!(field(&r.stdout, "settings", "precision"), Some("50"));
    let r = orbitreg(&["analyze", p], &[("ORBITREG_PRECISION", "10")]);
    assert_eq!(r.code, 2);
}

#[test]
fn reports_are_deterministic() {
    let path = temp_file("det.txt", SHEAR_PAIR);
    let p = path.to_str().unwrap();
    let a = orbitreg(&["analyze", p], &[]);
    let b = orbitreg(&["analyze", p], &[]);
    assert_eq!(a.stdout, b.stdout);
    let d = temp_file("det-dense.txt", DENSE);
    let a = orbitreg(&["analyze", d.to_str().unwrap()], &[]);
    let b = orbitreg(&["analyze", d.to_str().unwrap()], &[]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        field(&a.stdout, "report", "input_sha256"),
        Some(orbitreg::cli::digest(DENSE.as_bytes()).as_str())
    );
}

#[test]
fn normal_form_command() {
    let diag = temp_file("diag.txt", "[generators]\n2, 0; 0, 3\n");
    let r = orbitreg(&["normal-form", diag.to_str().unwrap()], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(field(&r.stdout, "normal_form", "eta"), Some("1, 1"));
    assert_eq!(field(&r.stdout, "normal_form", "P.1"), Some("1, 0"));
    assert_eq!(field(&r.stdout, "normal_form", "P.2"), Some("0, 1"));

    let s6 = temp_file("nf-s6.txt", SHEAR_PAIR);
    let r = orbitreg(&["normal-form", s6.to_str().unwrap()], &[]);
    assert_eq!(field(&r.stdout, "normal_form", "eta"), Some("4"));
    for (i, row) in ["1, 0, 0, 0", "0, 1, 0, 0", "0, 0, 1, 0", "0, 0, 0, 1"].iter().enumerate() {
        assert_eq!(field(&r.stdout, "normal_form", &format!("P.{}", i + 1)), Some(*row));
    }

    let rot = temp_file("rot.txt", "[field]\nR\n[generators]\n0, -1; 1, 0\n");
    let r = orbitreg(&["normal-form", rot.to_str().unwrap()], &[]);
    assert_eq!(field(&r.stdout, "normal_form", "eta"), Some("1, 1"));
    assert!(field(&r.stdout, "normal_form", "P.1").unwrap().contains('i'));
}

#[test]
fn closure_command() {
    let cases = [
        ("[vectors]\na = 1, 0\nb = 0, 1\n", "0"),
        ("[constants]\nsqrt2 = sqrt(2)\n[vectors]\na = 1\nb = sqrt2\n", "1"),
        ("[constants]\nsqrt2 = sqrt(2)\npi = pi\n[vectors]\na = 1, 0\nb = sqrt2, 0\nc = 0, 2*pi\n", "1"),
    ];
    for (i, (text, dim)) in cases.iter().enumerate() {
        let path = temp_file(&format!("closure{i}.txt"), text);
        let r = orbitreg(&["closure", path.to_str().unwrap()], &[]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert_eq!(field(&r.stdout, "closure", "dim"), Some(*dim), "{text}");
    }
    let path = temp_file("closure-complex.txt", "[vectors]\na = 1 + i\n");
    assert_eq!(orbitreg(&["closure", path.to_str().unwrap()], &[]).code, 2);
}

#[test]
fn sample_command_with_export() {
    let path = temp_file("sample.txt", "[field]\nR\n[generators]\n2\n[vectors]\nu = 1\n[options]\nradius = 1e16\n");
    let export = std::env::temp_dir().join(format!("orbitreg-cli-{}", std::process::id())).join("cloud.txt");
    let r = orbitreg(
        &["sample", path.to_str().unwrap(), "--word-length", "50", "--export", export.to_str().unwrap()],
        &[],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(field(&r.stdout, "sample.u", "order"), Some("0"));
    assert_eq!(field(&r.stdout, "sample.u", "verdict"), Some("consistent"));
    let cloud = std::fs::read_to_string(&export).unwrap();
    assert!(cloud.starts_with("# n=1 L=50 discarded=0"));
    assert_eq!(cloud.lines().count(), 102);
}

#[test]
fn input_roundtrip_through_printer() {
    for text in [SHEAR_PAIR, DENSE] {
        let doc = InputDocument::parse(text).unwrap();
        assert_eq!(InputDocument::parse(&doc.print()).unwrap(), doc);
    }
}
