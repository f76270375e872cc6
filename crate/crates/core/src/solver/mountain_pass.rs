//! Path-deformation mountain-pass solver for the second solution u₂.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::newton::{newton_root, IterRecord, SolverOptions};
use super::truncation::Truncation;
use crate::error::{Error, Result};
use crate::fem::{orlicz_norm, stiffness_matrix, sup_norm, Field, Mesh, ProblemParams};

/// Controls for [`mountain_pass`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MountainPassOptions {
    pub n_path: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// A Newton polish on J' = 0 is attempted from the path maximum every
    /// `polish_every` deformation steps.
    pub polish_every: usize,
    pub record_trace: bool,
}

impl Default for MountainPassOptions {
    fn default() -> Self {
        Self { n_path: 21, tol: 1e-6, max_iter: 2000, polish_every: 5, record_trace: false }
    }
}

/// A discrete path from 0 to u₁ and its current maximum.
#[derive(Debug, Clone)]
pub struct MountainPassState {
    pub path: Vec<Field>,
    pub level: f64,
    pub argmax_index: usize,
    pub iteration: usize,
}

/// Diagnostics of a mountain-pass run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MountainPassReport {
    /// J(u₂).
    pub c: f64,
    /// Max of J over the initial segment t·u₁.
    pub initial_level: f64,
    /// Max of J over the final path.
    pub path_max: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Normalized arclength of each final path point.
    pub path_t: Vec<f64>,
    pub path_energies: Vec<f64>,
    pub trace: Vec<IterRecord>,
}

/// Output of [`mountain_pass`].
#[derive(Debug, Clone)]
pub struct MountainPassOutcome {
    pub u2: Field,
    pub c: f64,
    pub state: MountainPassState,
    pub report: MountainPassReport,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn arclength(path: &[Vec<f64>]) -> Vec<f64> {
    let mut s = vec![0.0];
    for w in path.windows(2) {
        let last = *s.last().unwrap();
        s.push(last + dist(&w[0], &w[1]));
    }
    s
}

fn interpolate(path: &[Vec<f64>], s: &[f64], target: f64) -> Vec<f64> {
    let j = s.partition_point(|&v| v < target).clamp(1, path.len() - 1);
    let (s0, s1) = (s[j - 1], s[j]);
    let t = if s1 > s0 { ((target - s0) / (s1 - s0)).clamp(0.0, 1.0) } else { 0.0 };
    path[j - 1].iter().zip(&path[j]).map(|(a, b)| a + t * (b - a)).collect()
}

/// Rebuilds the path with the point at `pivot` moved to the middle index and
/// the other points spread evenly by arclength on either side of it.
fn recenter(path: &mut [Vec<f64>], pivot: usize) -> usize {
    let n = path.len();
    let mid = (n - 1) / 2;
    let s = arclength(path);
    let old = path.to_vec();
    let sp = s[pivot];
    for (i, slot) in path.iter_mut().enumerate().take(n - 1).skip(1) {
        *slot = if i < mid {
            interpolate(&old, &s, sp * i as f64 / mid as f64)
        } else if i == mid {
            old[pivot].clone()
        } else {
            interpolate(&old, &s, sp + (s[n - 1] - sp) * (i - mid) as f64 / (n - 1 - mid) as f64)
        };
    }
    mid
}

/// Max of J over the top path point and the midpoints of its two segments.
fn local_level<R: crate::fem::Reaction>(f: &crate::fem::Functional<'_, R>, path: &[Vec<f64>], e: &[f64], k: usize) -> f64 {
    let mid = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect() };
    e[k].max(f.energy(&mid(&path[k - 1], &path[k]))).max(f.energy(&mid(&path[k], &path[k + 1])))
}

/// Location and value of the maximum of j on [0, 1]: 1000 samples, then
/// golden section around the best one.
fn segment_peak(j: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let m = 1000;
    let mut best = (0.0, j(0.0));
    for i in 1..m {
        let t = i as f64 / m as f64;
        let v = j(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    let (lo, hi) = ((best.0 - 1.0 / m as f64).max(0.0), (best.0 + 1.0 / m as f64).min(1.0));
    let (t, v) = crate::orlicz::golden_section_max(j, lo, hi, 60);
    if v > best.1 {
        (t, v)
    } else {
        best
    }
}

fn argmax_interior(e: &[f64]) -> usize {
    let mut k = 1;
    for i in 1..e.len() - 1 {
        if e[i] > e[k] {
            k = i;
        }
    }
    k
}

/// Deforms the segment t·u₁ so as to lower its maximum of J, then polishes the
/// top point into a critical point of J with Newton's method.
///
/// Returns [`Error::GeometryFailure`] when the segment carries no positive
/// level or J(u₁) is not negative, and [`Error::NoConvergence`] when the path
/// maximum does not reach a critical point within `opts.max_iter` steps.
pub fn mountain_pass(tr: &Truncation, prm: &ProblemParams, opts: &MountainPassOptions) -> Result<MountainPassOutcome> {
    if opts.n_path < 3 {
        return Err(Error::InvalidParameter(format!("n_path = {} must be at least 3", opts.n_path)));
    }
    let u1 = tr.u1();
    let mesh = u1.mesh();
    let f = tr.functional(prm);
    let n = opts.n_path;
    let j_u1 = f.energy(u1.coeffs());
    if j_u1 >= 0.0 {
        return Err(Error::GeometryFailure(format!("J(u1) = {j_u1:e} is not negative")));
    }
    let (t_star, initial_level) = segment_peak(&|t| f.energy(u1.scaled(t).coeffs()));
    if initial_level <= 0.0 {
        return Err(Error::GeometryFailure(format!("max of J on the segment [0, u1] is {initial_level:e}")));
    }
    // half of the points on each side of the peak, so the top of the path is
    // resolved even when the peak sits close to 0
    let k0 = (n - 1) / 2;
    let ts: Vec<f64> = (0..n)
        .map(|i| {
            if i <= k0 {
                t_star * i as f64 / k0 as f64
            } else {
                t_star + (1.0 - t_star) * (i - k0) as f64 / (n - 1 - k0) as f64
            }
        })
        .collect();
    let mut path: Vec<Vec<f64>> = ts.iter().map(|&t| u1.scaled(t).into_coeffs()).collect();
    let mut energies: Vec<f64> = path.iter().map(|c| f.energy(c)).collect();
    let mut k = argmax_interior(&energies);

    let stiffness = stiffness_matrix(mesh)
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter("stiffness matrix is not positive definite".into()))?;
    let mut step = 1.0;
    let u1_scale = u1.lp_norm(2.0);
    let newton_opts = SolverOptions { tol: opts.tol, max_iter: 60, record_trace: opts.record_trace, ..Default::default() };
    let mut trace = Vec::new();
    let mut iteration = 0;
    let mut residual;
    loop {
        let x = path[k].clone();
        let g = f.gradient(&x);
        residual = sup_norm(&g);
        if opts.record_trace {
            trace.push(IterRecord { phase: "deform".into(), iter: iteration, energy: energies[k], residual, step: 0.0 });
        }
        if iteration % opts.polish_every.max(1) == 0 || residual <= opts.tol {
            let out = newton_root(&f, x.clone(), &newton_opts, "polish");
            let cand = Field::from_raw(mesh, out.x.clone());
            let accept = out.converged
                && out.energy > 0.0
                && out.energy <= local_level(&f, &path, &energies, k) * (1.0 + 1e-6) + 1e-12
                && cand.lp_norm(2.0) > 1e-4 * u1_scale
                && cand.l2_distance(u1) > 1e-4 * u1_scale;
            trace.extend(out.trace.iter().cloned());
            if accept {
                path[k] = out.x;
                energies[k] = out.energy;
                residual = out.residual;
                break;
            }
        }
        if iteration >= opts.max_iter {
            let best = Field::from_raw(mesh, path[k].clone());
            return Err(Error::NoConvergence { iterations: iteration, residual, best: Box::new(best) });
        }
        // Sobolev gradient: steepest descent in the H¹₀ metric
        let d: Vec<f64> = stiffness.solve(&g).iter().map(|v| -v).collect();
        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        let mut alpha = 2.0 * step;
        let floor = alpha * 1e-12;
        let mut moved = false;
        while alpha > floor {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
            let en = f.energy(&xn);
            if en <= energies[k] + 1e-4 * alpha * slope {
                step = alpha;
                path[k] = xn;
                energies[k] = en;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        iteration += 1;
        if !moved {
            // No descent at this point: the maximum sits at a flat critical
            // point that the polish has already rejected.
            let best = Field::from_raw(mesh, x);
            return Err(Error::NoConvergence { iterations: iteration, residual, best: Box::new(best) });
        }
        let top = energies[k];
        let mid = recenter(&mut path, k);
        for i in 1..n - 1 {
            energies[i] = if i == mid { top } else { f.energy(&path[i]) };
        }
        k = argmax_interior(&energies);
    }

    let s = arclength(&path);
    let total = s[n - 1].max(f64::MIN_POSITIVE);
    let path_fields: Vec<Field> = path.into_iter().map(|c| Field::from_raw(mesh, c)).collect();
    let u2 = path_fields[k].clone();
    let c = energies[k];
    let path_max = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let report = MountainPassReport {
        c,
        initial_level,
        path_max,
        residual,
        iterations: iteration,
        path_t: s.iter().map(|v| v / total).collect(),
        path_energies: energies,
        trace,
    };
    let state = MountainPassState { path: path_fields, level: path_max, argmax_index: k, iteration };
    Ok(MountainPassOutcome { u2, c, state, report })
}

/// Sampled mountain-pass ring: the lowest J found on spheres ‖u‖ = ρ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingReport {
    /// Radius with the largest sampled level.
    pub rho: f64,
    /// Minimum of J over the sampled directions at `rho`.
    pub level: f64,
    pub u1_norm: f64,
    /// (ρ, sampled minimum) for every radius tried.
    pub radii: Vec<(f64, f64)>,
}

fn random_direction(mesh: &Arc<Mesh>, rng: &mut ChaCha8Rng) -> Field {
    let kind = rng.gen_range(0..3);
    let dim = mesh.dim();
    let center: [f64; 2] = [rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8)];
    let width = rng.gen_range(0.05..0.5);
    let modes: Vec<(f64, f64, f64)> =
        (0..4).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(1..5) as f64, rng.gen_range(1..5) as f64)).collect();
    Field::from_fn(mesh, |x| {
        let y = if dim == 2 { x[1] } else { 0.5 };
        match kind {
            // positive bump
            0 => {
                let r2 = (x[0] - center[0]).powi(2) + if dim == 2 { (y - center[1]).powi(2) } else { 0.0 };
                (1.0 - r2 / (width * width)).max(0.0)
            }
            // sine mixture, either sign
            1 => modes
                .iter()
                .map(|&(a, m, l)| {
                    a * (m * std::f64::consts::PI * x[0]).sin() * (l * std::f64::consts::PI * y).sin().abs().max(0.0)
                })
                .sum(),
            // nonnegative sine mixture
            _ => modes
                .iter()
                .map(|&(a, m, _)| a.abs() * (m * std::f64::consts::PI * x[0]).sin().abs())
                .sum::<f64>()
                * if dim == 2 { (std::f64::consts::PI * y).sin() } else { 1.0 },
        }
    })
}

/// Samples J on spheres ‖u‖ = ρ for several ρ < ‖u₁‖, with `n_dirs` random
/// directions plus the direction of u₁, and reports the radius whose sampled
/// minimum is largest.
pub fn ring_probe(tr: &Truncation, prm: &ProblemParams, n_dirs: usize, seed: u64) -> RingReport {
    let u1 = tr.u1();
    let mesh = u1.mesh();
    let f = tr.functional(prm);
    let u1_norm = orlicz_norm(u1, &prm.pair);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs = vec![u1.clone()];
    dirs.extend((0..n_dirs).map(|_| random_direction(mesh, &mut rng)));
    let dirs: Vec<(Field, f64)> = dirs
        .into_iter()
        .filter_map(|d| {
            let nrm = orlicz_norm(&d, &prm.pair);
            (nrm > 0.0).then_some((d, nrm))
        })
        .collect();
    let radii: Vec<(f64, f64)> = [0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7]
        .iter()
        .map(|&frac| {
            let rho = frac * u1_norm;
            let level = dirs
                .iter()
                .map(|(d, nrm)| f.energy(d.scaled(rho / nrm).coeffs()))
                .fold(f64::INFINITY, f64::min);
            (rho, level)
        })
        .collect();
    let &(rho, level) = radii.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    RingReport { rho, level, u1_norm, radii }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recentering_keeps_pivot_and_endpoints() {
        let mut path: Vec<Vec<f64>> = [0.0, 0.6, 0.9, 1.0, 2.0].iter().map(|&t| vec![t, 0.0]).collect();
        let mid = recenter(&mut path, 1);
        assert_eq!(mid, 2);
        assert_eq!(path[0], vec![0.0, 0.0]);
        assert_eq!(path[2], vec![0.6, 0.0]);
        assert_eq!(path[4], vec![2.0, 0.0]);
        assert!((path[1][0] - 0.3).abs() < 1e-12);
        assert!((path[3][0] - 1.3).abs() < 1e-12);
    }
}
