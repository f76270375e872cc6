//! The threshold λ* and the first eigenvalue-type quotient λ₁.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::minimize::{minimize_multistart, random_field};
use super::newton::SolverOptions;
use crate::error::{Error, Result};
use crate::fem::{stiffness_matrix, Field, Functional, Mesh, NoReaction, ProblemParams, Reaction};
use crate::orlicz::YoungPair;

/// min I below -EPS_NEG flags a nontrivial global minimizer.
pub const EPS_NEG: f64 = 1e-6;

/// Result of the threshold bisection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaStar {
    /// Midpoint of the final bracket.
    pub lambda: f64,
    pub lo: f64,
    pub hi: f64,
    /// Every (λ, min I) evaluated, in order.
    pub evaluations: Vec<(f64, f64)>,
}

/// Evaluates the indicator "min I < -EPS_NEG" by multi-start minimization.
pub struct ThresholdProbe<'a> {
    template: &'a ProblemParams,
    mesh: &'a Arc<Mesh>,
    opts: SolverOptions,
    seed: u64,
    warm: Vec<(f64, Field)>,
    pub evaluations: Vec<(f64, f64)>,
}

impl<'a> ThresholdProbe<'a> {
    pub fn new(template: &'a ProblemParams, mesh: &'a Arc<Mesh>, opts: SolverOptions, seed: u64) -> Self {
        Self { template, mesh, opts, seed, warm: Vec::new(), evaluations: Vec::new() }
    }

    /// min I at λ. Minimizers with negative energy found at λ' ≤ λ join the
    /// start pool, which keeps the result non-increasing in λ.
    pub fn min_energy(&mut self, lambda: f64) -> Result<(Field, f64)> {
        let prm = self.template.with_lambda(lambda)?;
        let warm: Vec<Field> = self.warm.iter().filter(|(l, _)| *l <= lambda).map(|(_, u)| u.clone()).collect();
        let (u, rep) = minimize_multistart(&prm, self.mesh, &warm, &self.opts, self.seed)?;
        if rep.energy < -EPS_NEG {
            self.warm.retain(|(l, _)| *l > lambda);
            self.warm.push((lambda, u.clone()));
        }
        self.evaluations.push((lambda, rep.energy));
        Ok((u, rep.energy))
    }

    pub fn indicator(&mut self, lambda: f64) -> Result<bool> {
        Ok(self.min_energy(lambda)?.1 < -EPS_NEG)
    }
}

/// Bisects the indicator "min I < -1e-6" on [lo, hi] down to width
/// `bisect_tol`, then spot-checks monotonicity at two interior points.
pub fn find_lambda_star(
    template: &ProblemParams,
    mesh: &Arc<Mesh>,
    lambda_lo: f64,
    lambda_hi: f64,
    bisect_tol: f64,
    opts: &SolverOptions,
    seed: u64,
) -> Result<LambdaStar> {
    if !(lambda_lo < lambda_hi && bisect_tol > 0.0) {
        return Err(Error::BracketInvalid(format!("need lo < hi and tol > 0, got [{lambda_lo}, {lambda_hi}], {bisect_tol}")));
    }
    let mut probe = ThresholdProbe::new(template, mesh, *opts, seed);
    if probe.indicator(lambda_lo)? {
        return Err(Error::BracketInvalid(format!("min I < -{EPS_NEG:e} already at lambda = {lambda_lo}")));
    }
    if !probe.indicator(lambda_hi)? {
        return Err(Error::BracketInvalid(format!("min I ≥ -{EPS_NEG:e} at lambda = {lambda_hi}")));
    }
    let (mut lo, mut hi) = (lambda_lo, lambda_hi);
    while hi - lo > bisect_tol {
        let mid = 0.5 * (lo + hi);
        if probe.indicator(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let below = lambda_lo + 0.5 * (lo - lambda_lo);
    let above = hi + 0.5 * (lambda_hi - hi);
    if below < lo && probe.indicator(below)? {
        return Err(Error::BracketInvalid(format!("indicator true at {below} below the threshold {lo}")));
    }
    if above > hi && !probe.indicator(above)? {
        return Err(Error::BracketInvalid(format!("indicator false at {above} above the threshold {hi}")));
    }
    Ok(LambdaStar { lambda: 0.5 * (lo + hi), lo, hi, evaluations: probe.evaluations })
}

/// |t|^r as a reaction, so the denominator of the quotient reuses assembly.
#[derive(Debug, Clone, Copy)]
struct AbsPower(f64);

impl Reaction for AbsPower {
    fn primitive(&self, _: usize, t: f64) -> f64 {
        t.abs().powf(self.0)
    }
    fn source(&self, _: usize, t: f64) -> f64 {
        self.0 * t.abs().powf(self.0 - 1.0) * t.signum()
    }
    fn source_slope(&self, _: usize, t: f64) -> f64 {
        self.0 * (self.0 - 1.0) * t.abs().max(1e-10).powf(self.0 - 2.0)
    }
}

/// Lowest value of ∫Φ(|∇u|) / ∫|u|^{φ₀} found over fields with ‖u‖ > 1.
///
/// Each restart runs gradient descent preconditioned by the stiffness matrix,
/// with Armijo backtracking and a radial projection back onto ‖u‖ ≥ 1.
pub fn lambda1_estimate(pair: &YoungPair, mesh: &Arc<Mesh>, n_restarts: usize, seed: u64) -> Result<f64> {
    let phi0 = pair.indices().lower;
    let modular = Functional::new(mesh, pair, 0.0, NoReaction);
    let denom = Functional::new(mesh, pair, -1.0, AbsPower(phi0));
    let k = stiffness_matrix(mesh)
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter("stiffness matrix is not positive definite".into()))?;
    let project = |c: Vec<f64>| -> Vec<f64> {
        let u = Field::from_raw(mesh, c);
        let nrm = crate::fem::orlicz_norm(&u, pair);
        if nrm <= 1.0 && nrm > 0.0 {
            u.scaled((1.0 + 1e-9) / nrm).into_coeffs()
        } else {
            u.into_coeffs()
        }
    };
    let quotient = |c: &[f64]| -> f64 {
        let d = denom.reaction_integral(c);
        modular.modular(c) / d
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..n_restarts.max(1) {
        let mut x = project(random_field(mesh, 1.0, &mut rng).into_coeffs());
        let mut qx = quotient(&x);
        let mut step = 0.0;
        for _ in 0..2000 {
            let n = modular.modular(&x);
            let d = denom.reaction_integral(&x);
            let gn = modular.gradient(&x);
            // denom functional is modular + ∫|u|^r, so its gradient minus gn is D'
            let gd: Vec<f64> = denom.gradient(&x).iter().zip(&gn).map(|(a, b)| a - b).collect();
            let g: Vec<f64> = gn.iter().zip(&gd).map(|(a, b)| (a * d - n * b) / (d * d)).collect();
            let dir: Vec<f64> = k.solve(&g).iter().map(|v| -v).collect();
            let slope: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
            if slope >= 0.0 {
                break;
            }
            // the quotient is scale-free in the quadratic case, so the step
            // length is adapted rather than fixed
            let mut alpha = if step > 0.0 {
                4.0 * step
            } else {
                crate::fem::sup_norm(&x) / crate::fem::sup_norm(&dir).max(f64::MIN_POSITIVE)
            };
            let floor = alpha * 1e-14;
            let mut next = None;
            while alpha > floor {
                let y = project(x.iter().zip(&dir).map(|(a, b)| a + alpha * b).collect());
                let qy = quotient(&y);
                if qy <= qx + 1e-4 * alpha * slope {
                    next = Some((y, qy));
                    break;
                }
                alpha *= 0.5;
            }
            let Some((y, qy)) = next else { break };
            step = alpha;
            let dec = qx - qy;
            x = y;
            qx = qy;
            if dec <= 1e-13 * qx.abs() {
                break;
            }
        }
        best = best.min(qx);
    }
    Ok(best)
}

/// One row of a λ sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub min_i: f64,
    /// Mountain-pass level, when a nontrivial minimizer exists and the run
    /// succeeds.
    pub c: Option<f64>,
    pub certificate: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::PhiSpec;

    #[test]
    fn quadratic_quotient_is_near_pi_squared() {
        let mesh = Mesh::interval(100).unwrap();
        let pair = YoungPair::new(PhiSpec::power(2.0).unwrap()).unwrap();
        let l1 = lambda1_estimate(&pair, &mesh, 2, 3).unwrap();
        let h: f64 = 0.01;
        let discrete = 6.0 / (h * h) * (1.0 - (std::f64::consts::PI * h).cos()) / (2.0 + (std::f64::consts::PI * h).cos());
        assert!((l1 - discrete).abs() < 1e-6 * discrete, "{l1} vs {discrete}");
    }

    #[test]
    fn bracket_is_validated() {
        let mesh = Mesh::interval(20).unwrap();
        let pair = Arc::new(YoungPair::new(PhiSpec::power(3.0).unwrap()).unwrap());
        let prm = ProblemParams::new(1.0, 2.5, 1.5, pair).unwrap();
        let opts = SolverOptions::default();
        assert!(matches!(find_lambda_star(&prm, &mesh, 1.0, 2.0, 0.1, &opts, 0), Err(Error::BracketInvalid(_))));
        assert!(matches!(find_lambda_star(&prm, &mesh, 2.0, 1.0, 0.1, &opts, 0), Err(Error::BracketInvalid(_))));
    }
}
