use std::sync::Arc;

use serde::Serialize;

use super::assembly::{Functional, PowerReaction};
use super::mesh::Mesh;
use crate::error::{Error, Result};
use crate::orlicz::YoungPair;

/// λ, the reaction exponents and the Young pair of the problem.
#[derive(Debug, Clone)]
pub struct ProblemParams {
    pub lambda: f64,
    pub p: f64,
    pub q: f64,
    pub pair: Arc<YoungPair>,
    /// Nominal dimension N used to report φ⁰ < min{N, Nφ₀/(N-φ₀)}.
    pub nominal_dim: usize,
}

/// φ⁰ < min{N, Nφ₀/(N-φ₀)}, evaluated with the cached indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthCondition {
    pub nominal_dim: usize,
    pub phi0_upper: f64,
    pub bound: f64,
    pub holds: bool,
}

impl ProblemParams {
    /// Checks λ > 0 and 1 < q < p < φ₀ (φ₀ from the cached estimate).
    pub fn new(lambda: f64, p: f64, q: f64, pair: Arc<YoungPair>) -> Result<Self> {
        let prm = Self { lambda, p, q, pair, nominal_dim: 3 };
        prm.validate()?;
        Ok(prm)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        let mut prm = self.clone();
        prm.lambda = lambda;
        prm.validate()?;
        Ok(prm)
    }

    pub fn with_nominal_dim(mut self, n: usize) -> Self {
        self.nominal_dim = n;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {} must be finite and ≥ 0", self.lambda)));
        }
        let phi0 = self.pair.indices().lower;
        if !(1.0 < self.q && self.q < self.p && self.p < phi0) {
            return Err(Error::InvalidParameter(format!(
                "need 1 < q < p < φ₀, got q = {}, p = {}, φ₀ ≈ {phi0}",
                self.q, self.p
            )));
        }
        Ok(())
    }

    pub fn reaction(&self) -> PowerReaction {
        PowerReaction { p: self.p, q: self.q }
    }

    pub fn functional<'a>(&'a self, mesh: &'a Mesh) -> Functional<'a, PowerReaction> {
        Functional::new(mesh, &self.pair, self.lambda, self.reaction())
    }

    /// The growth condition is reported, not enforced: desk-scale meshes are
    /// one- or two-dimensional.
    pub fn growth_condition(&self) -> GrowthCondition {
        let idx = self.pair.indices();
        let n = self.nominal_dim as f64;
        let sobolev = if idx.lower < n { n * idx.lower / (n - idx.lower) } else { f64::INFINITY };
        let bound = n.min(sobolev);
        GrowthCondition { nominal_dim: self.nominal_dim, phi0_upper: idx.upper, bound, holds: idx.upper < bound }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::PhiSpec;

    #[test]
    fn exponent_ordering_is_enforced() {
        let pair = Arc::new(YoungPair::new(PhiSpec::power(3.0).unwrap()).unwrap());
        assert!(ProblemParams::new(1.0, 2.5, 1.5, pair.clone()).is_ok());
        assert!(ProblemParams::new(1.0, 3.0, 1.5, pair.clone()).is_err());
        assert!(ProblemParams::new(1.0, 1.5, 2.5, pair.clone()).is_err());
        assert!(ProblemParams::new(1.0, 2.5, 1.0, pair.clone()).is_err());
        assert!(ProblemParams::new(-1.0, 2.5, 1.5, pair).is_err());
    }

    #[test]
    fn growth_condition_report() {
        // φ₀ = φ⁰ = 2.5 < min{3, 7.5/0.5}
        let pair = Arc::new(YoungPair::new(PhiSpec::power(2.5).unwrap()).unwrap());
        let prm = ProblemParams::new(1.0, 2.0, 1.5, pair).unwrap();
        let g = prm.growth_condition();
        assert!(g.holds);
        assert!((g.bound - 3.0).abs() < 1e-9);
        // φ⁰ = 4 ≥ N = 3 for log-power (3, 1)
        let lp = Arc::new(YoungPair::new(PhiSpec::log_power(3.0, 1.0).unwrap()).unwrap());
        let g = ProblemParams::new(1.0, 2.5, 1.5, lp).unwrap().growth_condition();
        assert!(!g.holds);
    }
}
