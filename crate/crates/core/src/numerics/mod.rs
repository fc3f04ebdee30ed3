//! Numerical kernels: half-line quadrature, critical-point root finding, Euler–Maclaurin
//! summation and compensated summation.

pub mod euler_maclaurin;
mod quadrature;
mod roots;
mod summation;

pub use euler_maclaurin::{bernoulli_even, euler_maclaurin_sum, FnSummand, Summand};
pub use quadrature::{
    integrate_half_line, integrate_half_line_with, integrate_interval, QuadratureResult, DEFAULT_REL_TOL,
};
pub use roots::{find_critical_point, solve_tail_mass};
pub use summation::{compensated_sum, CompensatedSum};
