//! Machine-readable reports. Field order is fixed by declaration order.

use serde::Serialize;

use crate::fem::{FieldNorms, GrowthCondition};
use crate::orlicz::{IndexEstimate, PhiSpec};
use crate::solver::{LambdaStar, SweepRow};

/// One inequality with its raw value, its bound and the verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// One of `<`, `<=`, `>`, `>=`.
    pub relation: String,
    pub bound: f64,
    pub pass: bool,
    /// Whether the check is part of the two-solution certificate.
    pub certificate: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, relation: &str, bound: f64, certificate: bool) -> Self {
        let pass = match relation {
            "<" => value < bound,
            "<=" => value <= bound,
            ">" => value > bound,
            ">=" => value >= bound,
            _ => panic!("unknown relation {relation}"),
        };
        Self { name: name.to_string(), value, relation: relation.to_string(), bound, pass, certificate }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshSummary {
    pub dim: usize,
    pub n_nodes: usize,
    pub n_elements: usize,
}

/// Outcome of `solve`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    /// `certificate`, `trivial_only`, `certificate_failed`, `no_convergence`
    /// or `geometry_failure`.
    pub status: String,
    pub message: Option<String>,
    pub seed: u64,
    pub phi: PhiSpec,
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
    pub lambda_star_est: Option<f64>,
    pub mesh: MeshSummary,
    pub indices: IndexEstimate,
    pub growth_condition: GrowthCondition,
    pub tol: f64,
    pub i_u1: Option<f64>,
    /// The mountain-pass level c = J(u₂).
    pub j_u2: Option<f64>,
    pub i_u2: Option<f64>,
    pub path_max: Option<f64>,
    pub residual_u1: Option<f64>,
    /// Residual of u₂ against the truncated right-hand side.
    pub residual_u2: Option<f64>,
    /// Residual of u₂ against the full right-hand side.
    pub residual_u2_full: Option<f64>,
    pub ring_rho: Option<f64>,
    pub ring_level: Option<f64>,
    pub norms_u1: Option<FieldNorms>,
    pub norms_u2: Option<FieldNorms>,
    pub distance_u1_u2: Option<f64>,
    pub start_u1: Option<String>,
    pub iterations_u1: Option<usize>,
    pub iterations_u2: Option<usize>,
    pub checks: Vec<Check>,
    pub certificate: bool,
    /// Seconds; null in deterministic mode.
    pub wall_time: Option<f64>,
}

/// Outcome of `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub command: String,
    pub status: String,
    pub message: Option<String>,
    pub seed: u64,
    pub phi: PhiSpec,
    pub p: f64,
    pub q: f64,
    pub mesh: MeshSummary,
    pub rows: Vec<SweepRow>,
    /// The indicator min I < -1e-6 switches once, from false to true.
    pub indicator_monotone: bool,
    pub min_i_nonincreasing: bool,
    pub lambda_star_est: Option<f64>,
    pub bisection: Option<LambdaStar>,
    pub wall_time: Option<f64>,
}

/// One property of the verification suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Property {
    pub name: String,
    pub samples: usize,
    /// Smallest slack observed; negative values are violations.
    pub min_slack: f64,
    /// The property holds when `min_slack ≥ threshold`.
    pub threshold: f64,
    pub pass: bool,
}

impl Property {
    pub fn new(name: &str, samples: usize, min_slack: f64, threshold: f64) -> Self {
        Self { name: name.to_string(), samples, min_slack, threshold, pass: min_slack >= threshold }
    }
}

/// Outcome of `verify`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub command: String,
    pub seed: u64,
    pub phi: PhiSpec,
    pub indices: IndexEstimate,
    pub properties: Vec<Property>,
    /// ½‖u‖^{φ₀} - I(u) maximized over the coercivity ladder, when λ is set.
    pub fitted_coercivity_constant: Option<f64>,
    pub lambda1_estimate: f64,
    pub all_pass: bool,
    pub wall_time: Option<f64>,
}

/// Outcome of `indices`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicesReport {
    pub command: String,
    pub phi: PhiSpec,
    pub phi0_lower: f64,
    pub phi0_upper: f64,
    pub closed_form: (f64, f64),
    pub delta2_ratio: f64,
    pub delta2_bound: f64,
    pub sqrt_convex: bool,
    pub sqrt_convexity_slack: f64,
    pub a_at_zero: f64,
    pub wall_time: Option<f64>,
}
