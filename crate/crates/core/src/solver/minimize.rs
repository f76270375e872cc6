//! Global minimization of I by multi-started damped Newton descent.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::newton::{descend, IterRecord, SolverOptions};
use crate::error::{Error, Result};
use crate::fem::{Field, Mesh, ProblemParams};

/// Summary of one minimization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeReport {
    /// Label of the start that produced the returned field.
    pub start: String,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    pub min_value: f64,
    pub trace: Vec<IterRecord>,
}

/// Descends I from `init`. Fails with [`Error::NoConvergence`] (carrying the
/// last iterate) when the residual stays above `opts.tol`.
pub fn minimize_energy(prm: &ProblemParams, init: &Field, opts: &SolverOptions) -> Result<(Field, MinimizeReport)> {
    run_start(prm, init, opts, "init")
}

fn run_start(prm: &ProblemParams, init: &Field, opts: &SolverOptions, label: &str) -> Result<(Field, MinimizeReport)> {
    let mesh = init.mesh();
    let f = prm.functional(mesh);
    let out = descend(&f, init.coeffs().to_vec(), opts, label);
    let u = Field::from_raw(mesh, out.x);
    if !out.converged {
        return Err(Error::NoConvergence { iterations: out.iterations, residual: out.residual, best: Box::new(u) });
    }
    let report = MinimizeReport {
        start: label.to_string(),
        energy: out.energy,
        residual: out.residual,
        iterations: out.iterations,
        min_value: u.min_value(),
        trace: out.trace,
    };
    Ok((u, report))
}

/// Smallest integer t₀ > 1 with t₀^p/p > t₀^q/q.
pub fn plateau_height(p: f64, q: f64) -> f64 {
    let mut t = 2.0f64;
    while t.powf(p) / p <= t.powf(q) / q {
        t += 1.0;
    }
    t
}

/// The witness u₀: height `t0` on the centered sub-domain of 80% measure,
/// ramping linearly to zero at the boundary.
pub fn plateau_witness(mesh: &Arc<Mesh>, t0: f64) -> Field {
    let dim = mesh.dim() as i32;
    let ramp = 0.5 * (1.0 - 0.8f64.powf(1.0 / f64::from(dim)));
    Field::from_fn(mesh, |x| {
        let d = (0..dim as usize).map(|k| x[k].min(1.0 - x[k])).fold(f64::INFINITY, f64::min);
        t0 * (d / ramp).min(1.0)
    })
}

/// Random interior values in [0, amp), seeded.
pub fn random_field(mesh: &Arc<Mesh>, amp: f64, rng: &mut ChaCha8Rng) -> Field {
    let c = (0..mesh.n_nodes())
        .map(|i| if mesh.is_boundary(i) { 0.0 } else { amp * rng.gen::<f64>() })
        .collect();
    Field::from_raw(mesh, c)
}

/// The default start pool: 0, a small bump, the plateau witness at t₀, 2t₀
/// and 4t₀, and a random field, followed by any caller-supplied warm starts.
pub fn start_pool(prm: &ProblemParams, mesh: &Arc<Mesh>, warm: &[Field], seed: u64) -> Vec<(String, Field)> {
    let t0 = plateau_height(prm.p, prm.q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = vec![
        ("zero".to_string(), Field::zeros(mesh)),
        ("perturbation".to_string(), plateau_witness(mesh, 1e-3)),
        ("witness".to_string(), plateau_witness(mesh, t0)),
        ("witness_x2".to_string(), plateau_witness(mesh, 2.0 * t0)),
        ("witness_x4".to_string(), plateau_witness(mesh, 4.0 * t0)),
        ("random".to_string(), random_field(mesh, t0, &mut rng)),
    ];
    pool.extend(warm.iter().enumerate().map(|(i, w)| (format!("warm_{i}"), w.clone())));
    pool
}

/// Minimizes from every start of [`start_pool`] and keeps the lowest energy.
///
/// Starts that fail to converge are skipped unless they reach an energy below
/// every converged start, in which case the failure is reported.
pub fn minimize_multistart(
    prm: &ProblemParams,
    mesh: &Arc<Mesh>,
    warm: &[Field],
    opts: &SolverOptions,
    seed: u64,
) -> Result<(Field, MinimizeReport)> {
    let pool = start_pool(prm, mesh, warm, seed);
    let run = |(label, init): &(String, Field)| run_start(prm, init, opts, label);
    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        pool.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = pool.iter().map(run).collect();

    let mut best: Option<(Field, MinimizeReport)> = None;
    let mut best_failure: Option<Error> = None;
    let mut best_failure_energy = f64::INFINITY;
    for r in results {
        match r {
            Ok((u, rep)) => {
                if best.as_ref().is_none_or(|(_, b)| rep.energy < b.energy) {
                    best = Some((u, rep));
                }
            }
            Err(Error::NoConvergence { iterations, residual, best: field }) => {
                let e = prm.functional(mesh).energy(field.coeffs());
                if e < best_failure_energy {
                    best_failure_energy = e;
                    best_failure = Some(Error::NoConvergence { iterations, residual, best: field });
                }
            }
            Err(other) => return Err(other),
        }
    }
    match (best, best_failure) {
        (Some(b), Some(f)) if best_failure_energy < b.1.energy - opts.tol => Err(f),
        (Some(b), _) => Ok(b),
        (None, Some(f)) => Err(f),
        (None, None) => unreachable!("start pool is never empty"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_energy_i, weak_residual_norm, RhsMode};
    use crate::orlicz::{PhiSpec, YoungPair};

    fn params(lambda: f64) -> ProblemParams {
        let pair = Arc::new(YoungPair::new(PhiSpec::power(3.0).unwrap()).unwrap());
        ProblemParams::new(lambda, 2.5, 1.5, pair).unwrap()
    }

    #[test]
    fn witness_height() {
        assert_eq!(plateau_height(2.5, 1.5), 2.0);
        // t^p/p > t^q/q first holds at t = 3 for (1.2, 1.1)
        let t = plateau_height(1.2, 1.1);
        assert!(t.powf(1.2) / 1.2 > t.powf(1.1) / 1.1);
        assert!((t - 1.0).powf(1.2) / 1.2 <= (t - 1.0).powf(1.1) / 1.1 || t == 2.0);
    }

    #[test]
    fn witness_shape() {
        let mesh = Mesh::interval(20).unwrap();
        let u = plateau_witness(&mesh, 2.0);
        assert_eq!(u.coeffs()[0], 0.0);
        assert!((u.coeffs()[1] - 1.0).abs() < 1e-12);
        assert_eq!(u.coeffs()[10], 2.0);
        assert_eq!(u.coeffs()[18], 2.0);
    }

    #[test]
    fn large_lambda_gives_negative_minimum() {
        let mesh = Mesh::interval(40).unwrap();
        // the witness with t₀ = 2 and ramp width 0.1 only dips below zero
        // for λ above roughly 5300
        let prm = params(6000.0);
        let w = plateau_witness(&mesh, 2.0);
        assert!(assemble_energy_i(&w, &prm) < 0.0);
        // the minimizer peaks near 6e3, where residual roundoff is ~5e-6
        let opts = SolverOptions { tol: 1e-4, ..Default::default() };
        let (u, rep) = minimize_multistart(&prm, &mesh, &[], &opts, 1).unwrap();
        assert!(rep.energy < assemble_energy_i(&w, &prm));
        assert!(weak_residual_norm(&u, &prm, RhsMode::FullProblem) <= 1e-4);
        assert!(u.min_value() >= -1e-8, "{}", u.min_value());
    }

    #[test]
    fn small_lambda_gives_trivial_minimum() {
        let mesh = Mesh::interval(40).unwrap();
        let prm = params(1.0);
        let (_, rep) = minimize_multistart(&prm, &mesh, &[], &SolverOptions::default(), 1).unwrap();
        assert!(rep.energy >= -1e-6, "{}", rep.energy);
    }

    #[test]
    fn rerun_from_minimizer_is_a_fixed_point() {
        let mesh = Mesh::interval(40).unwrap();
        let prm = params(400.0);
        let opts = SolverOptions::default();
        let (u, _) = minimize_multistart(&prm, &mesh, &[], &opts, 1).unwrap();
        let (v, rep) = minimize_energy(&prm, &u, &opts).unwrap();
        assert!(rep.iterations <= 1, "{}", rep.iterations);
        assert!(u.l2_distance(&v) < 1e-10);
    }
}
