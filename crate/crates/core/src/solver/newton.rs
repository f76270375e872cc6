//! Second-order iterations shared by the minimizer and the mountain-pass
//! solver.

use serde::Serialize;

use crate::fem::{sup_norm, Functional, Reaction};
use crate::linalg::BandMatrix;

/// Stopping rules for the Newton-type iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Bound on max |⟨E'(u), φᵢ⟩|.
    pub tol: f64,
    pub max_iter: usize,
    /// Iteration stops once the residual is below `tol` and the Newton step
    /// is below `step_tol` in max norm.
    pub step_tol: f64,
    /// Extra iterations allowed after the residual test passes.
    pub polish_iter: usize,
    pub record_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 500, step_tol: 1e-12, polish_iter: 60, record_trace: false }
    }
}

/// One line of the iteration log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterRecord {
    pub phase: String,
    pub iter: usize,
    pub energy: f64,
    pub residual: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<IterRecord>,
}

const SHIFTS: [f64; 9] = [0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2, 1e4, 1e6];

/// Solves (H + μ diag)d = -g for the smallest μ in the ladder that makes the
/// shifted matrix positive definite. The result is a descent direction.
pub(crate) fn shifted_newton_direction(h: &BandMatrix, g: &[f64]) -> Option<Vec<f64>> {
    let diag = h.diag();
    let dmax = diag.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(f64::MIN_POSITIVE);
    let floor = 1e-8 * dmax;
    let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
    for mu in SHIFTS {
        let mut m = h.clone();
        if mu > 0.0 {
            for (i, d) in diag.iter().enumerate() {
                m.add(i, i, mu * d.abs().max(floor));
            }
        }
        if let Some(ch) = m.cholesky() {
            let d = ch.solve(&rhs);
            if d.iter().all(|v| v.is_finite()) {
                return Some(d);
            }
        }
    }
    None
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn add_scaled(x: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(x, d)| x + a * d).collect()
}

/// Damped Newton descent with Armijo backtracking on the energy.
///
/// Near convergence the predicted decrease falls below the rounding level of
/// the energy; steps are then accepted on residual decrease instead.
pub(crate) fn descend<R: Reaction>(f: &Functional<'_, R>, x0: Vec<f64>, opts: &SolverOptions, phase: &str) -> Outcome {
    let mut x = x0;
    let mut trace = Vec::new();
    let mut energy = f.energy(&x);
    let mut g = f.gradient(&x);
    let mut residual = sup_norm(&g);
    let mut iterations = 0;
    let mut polish_left = opts.polish_iter;
    while iterations < opts.max_iter {
        let h = f.hessian(&x);
        let Some(d) = shifted_newton_direction(&h, &g) else { break };
        let step = sup_norm(&d);
        if residual <= opts.tol {
            if step <= opts.step_tol || polish_left == 0 {
                break;
            }
            polish_left -= 1;
        }
        let slope = dot(&g, &d);
        let noise = 1e-13 * (energy.abs() + f.modular(&x)).max(1e-300);
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha > 1e-14 {
            let xn = add_scaled(&x, alpha, &d);
            let en = f.energy(&xn);
            if en <= energy + 1e-4 * alpha * slope && en.is_finite() {
                accepted = Some((xn, en, None));
                break;
            }
            if (alpha * slope).abs() <= noise {
                let gn = f.gradient(&xn);
                if sup_norm(&gn) < residual {
                    accepted = Some((xn, en, Some(gn)));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((xn, en, gn)) = accepted else { break };
        x = xn;
        energy = en;
        g = gn.unwrap_or_else(|| f.gradient(&x));
        residual = sup_norm(&g);
        iterations += 1;
        if opts.record_trace {
            trace.push(IterRecord { phase: phase.to_string(), iter: iterations, energy, residual, step: alpha * step });
        }
    }
    Outcome { converged: residual <= opts.tol, x, energy, residual, iterations, trace }
}

/// Newton's method on E'(u) = 0 with the full (possibly indefinite) Hessian,
/// backtracking on the residual norm. Converges to saddle points as readily
/// as to minima.
pub(crate) fn newton_root<R: Reaction>(
    f: &Functional<'_, R>,
    x0: Vec<f64>,
    opts: &SolverOptions,
    phase: &str,
) -> Outcome {
    let mut x = x0;
    let mut trace = Vec::new();
    let mut g = f.gradient(&x);
    let mut residual = sup_norm(&g);
    let mut iterations = 0;
    let mut polish_left = opts.polish_iter;
    while iterations < opts.max_iter {
        let h = f.hessian(&x);
        let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
        let Some(lu) = h.lu() else { break };
        let d = lu.solve(&rhs);
        if !d.iter().all(|v| v.is_finite()) {
            break;
        }
        let step = sup_norm(&d);
        if residual <= opts.tol {
            if step <= opts.step_tol || polish_left == 0 {
                break;
            }
            polish_left -= 1;
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha >= 1.0 / 1024.0 {
            let xn = add_scaled(&x, alpha, &d);
            let gn = f.gradient(&xn);
            let rn = sup_norm(&gn);
            if rn < (1.0 - 1e-4 * alpha) * residual || (residual <= opts.tol && rn <= residual) {
                accepted = Some((xn, gn, rn));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, gn, rn)) = accepted else { break };
        x = xn;
        g = gn;
        residual = rn;
        iterations += 1;
        if opts.record_trace {
            trace.push(IterRecord {
                phase: phase.to_string(),
                iter: iterations,
                energy: f.energy(&x),
                residual,
                step: alpha * step,
            });
        }
    }
    let energy = f.energy(&x);
    Outcome { converged: residual <= opts.tol, x, energy, residual, iterations, trace }
}
