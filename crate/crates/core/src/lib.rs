//! Regularity order and classification of orbits of finitely generated
//! abelian subgroups of GL(n, C).

pub mod arith;
pub mod cli;
pub mod error;
pub mod group_closure;
pub mod lie_log;
pub mod normal_form;
pub mod orbit_engine;
pub mod sampler;

pub use error::{Error, Result};
