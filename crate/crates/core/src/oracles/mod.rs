//! Independent checks on the closed-form solution: shooting on the steady ODE,
//! a finite-difference obstacle solver and Monte Carlo policy valuation.

pub mod fd;
pub mod mc;
pub mod shooting;

pub use fd::{fd_richardson, fd_steady_state, FdOptions, FdReport, RichardsonEstimate};
pub use mc::{mc_optimality_probe, mc_value, McOptions, McReport, ProbeReport};
pub use shooting::{shoot_classify, shoot_solve, Classification, ShootingReport};
