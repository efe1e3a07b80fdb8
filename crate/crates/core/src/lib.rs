//! Sudden quenches of the transverse-field XY chain prepared in coherent
//! Gibbs states: Loschmidt rate functions, Fisher zeros, critical times and
//! temperatures, and initial-state magnetizations.

pub mod error;
pub mod fisher;
pub mod gibbs;
pub mod loschmidt;
pub mod magnetization;
pub mod model;
pub mod oracle;
pub mod pfaffian;
pub mod quadrature;
pub mod selftest;
pub mod sweep;

pub use error::{Error, Result};
pub use gibbs::InitialStateParams;
pub use loschmidt::{QuenchProtocol, SystemSize};
pub use model::ModelParams;
