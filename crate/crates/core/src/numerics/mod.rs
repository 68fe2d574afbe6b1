//! Shared numerical kernels: adaptive quadrature, bracketed root refinement and
//! an adaptive Runge–Kutta stepper.

pub mod ode;
pub mod quadrature;
pub mod roots;

pub use ode::{ode_integrate, ode_integrate_with, StepControl, Trajectory};
pub use quadrature::{integrate_adaptive, integrate_semi_infinite, truncation_point, Quadrature, QuadratureResult};
pub use roots::{brent, find_root_bracketed, try_brent, RootOptions, RootResult};
