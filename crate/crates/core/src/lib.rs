//! Two nonnegative weak solutions of
//!
//! ```text
//!   -div(a(|∇u|) ∇u) = λ (u^{p-1} - u^{q-1})   in Ω,     u = 0 on ∂Ω
//! ```
//!
//! in the Orlicz-Sobolev setting, computed at desk scale.
//!
//! The crate is split into four layers:
//!
//! * [`orlicz`]: the generating function φ, the Young pair (Φ, Φ*), the
//!   indices φ₀ ≤ tφ(t)/Φ(t) ≤ φ⁰, Luxemburg norms and the scalar inequalities
//!   (Young, Δ₂, convexity of Φ(√t), the uniform-convexity gap).
//! * [`fem`]: P1 meshes on (0,1) and the unit square, fields, and assembly of
//!   the energy, its gradient and its Hessian.
//! * [`solver`]: the global minimizer u₁ of the energy, the truncated
//!   functional J, the path-deformation mountain-pass solver for u₂, the λ*
//!   threshold search and the verification probes.
//! * [`harness`]: run configuration, reports and the `indices | solve | sweep |
//!   verify` commands used by the CLI.

pub mod error;
pub mod fem;
pub mod harness;
pub mod linalg;
pub mod orlicz;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
pub use fem::{Field, Mesh, ProblemParams};
pub use orlicz::{BigPhiStrategy, PhiSpec, YoungPair};

/// Default slack used by inequality checks.
pub const DEFAULT_TOL: f64 = 1e-8;
