//! Quasi-static finite-element analysis of jointed rigid pavements with a
//! three-course viscoelastic asphalt overlay under a moving tire, plus the
//! 27-case mixture sweep and its statistics.

pub mod config;
pub mod error;
pub mod materials;
pub mod loading;
pub mod mesh;
pub mod results;
pub mod solver;
pub mod study;
pub mod validate;

pub use error::{Error, Result};
