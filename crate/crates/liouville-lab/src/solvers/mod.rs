//! Numerical solution of −Δu = |x|^{2α} K e^u: an adaptive radial shooting
//! integrator for the initial-value problem at the origin, a weighted mass
//! integral over radial profiles, and a damped-Newton Dirichlet solver on the
//! 2D grid with a cell-exact singular source.

mod dirichlet;
mod ivp;
mod minres;

pub use dirichlet::{residual, solve_dirichlet, Dirichlet2D};
pub use ivp::{radial_mass, solve_radial, RadialIVP};
pub(crate) use minres::minres;
