//! Numerical toolkit for the singular Liouville equation
//!
//! ```text
//!     −Δu = |x|^{2α} K(x) e^u,      α ∈ (−1, 0],   0 < a ≤ K ≤ b
//! ```
//!
//! on planar domains containing the conical singularity at the origin.
//! The crate provides, at desk scale:
//!
//! - exact weighted measures dμ = |x−c|^{2α}dx and dσ = |x−c|^{α}dl with
//!   singularity-aware quadrature ([`weight`]),
//! - the explicit piecewise solution family and its limit bubble, with the
//!   closed-form sup+inf combination and the optimal total curvature
//!   ([`closed_form`]),
//! - a radial shooting solver and a 2D damped-Newton Dirichlet solver
//!   ([`solvers`]),
//! - weighted symmetric decreasing rearrangement (ξ, v*, F, K̂) plus audits of
//!   the differential and integrated isoperimetric inequalities
//!   ([`rearrangement`]),
//! - blow-up diagnostics: concentration scales δ and τ, case/subcase tags, the
//!   critical mass radius, neck mass, and decay-exponent fits ([`blowup`]),
//! - standalone inequality checkers: the mean-value (Suzuki-type) bound, the
//!   weighted Huber isoperimetric inequality, sup+inf and sup×inf evaluators,
//!   and level-set nullity probes ([`checks`]),
//! - a batch CLI with deterministic CSV output and run manifests ([`cli`]).

pub mod blowup;
pub mod checks;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod geom;
pub mod grid;
pub mod potential;
pub(crate) mod quad;
pub mod radial;
pub mod rearrangement;
pub mod solvers;
pub mod weight;

pub use error::{Error, Result};
pub use geom::Point;
