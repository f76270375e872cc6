//! Numerical checks of the sign, ordering, monotonicity and coercivity
//! properties of computed solutions.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::minimize::random_field;
use super::truncation::Truncation;
use crate::fem::{assemble_energy_i, orlicz_norm, Field, Mesh, ProblemParams};
use crate::orlicz::YoungPair;

/// Slack required of the ordering 0 ≤ u₂ ≤ u₁.
pub const ORDERING_TOL: f64 = 1e-8;

/// max(-u₂) and max(u₂ - u₁) over nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingReport {
    pub negativity: f64,
    pub excess_over_u1: f64,
    pub pass: bool,
}

pub fn verify_ordering_and_sign(u2: &Field, u1: &Field) -> OrderingReport {
    // + 0.0 turns a -0.0 maximum into 0.0
    let negativity = u2.coeffs().iter().fold(0.0f64, |m, v| m.max(-v)) + 0.0;
    let excess_over_u1 = u2.coeffs().iter().zip(u1.coeffs()).fold(0.0f64, |m, (a, b)| m.max(a - b)) + 0.0;
    OrderingReport {
        negativity,
        excess_over_u1,
        pass: negativity <= ORDERING_TOL && excess_over_u1 <= ORDERING_TOL,
    }
}

/// (a(|ξ|)ξ - a(|ψ|)ψ)·(ξ - ψ).
pub fn flux_gap(pair: &YoungPair, xi: [f64; 2], psi: [f64; 2]) -> f64 {
    let (a, b) = (pair.spec().flux(xi), pair.spec().flux(psi));
    (a[0] - b[0]) * (xi[0] - psi[0]) + (a[1] - b[1]) * (xi[1] - psi[1])
}

/// Monte Carlo summary of the flux monotonicity gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxReport {
    pub trials: usize,
    pub min_gap: f64,
    /// |ξ - ψ| at the minimizing pair.
    pub separation_at_min: f64,
    /// Pairs with gap < 1e-12 but |ξ - ψ| ≥ 1e-5.
    pub degenerate_pairs: usize,
}

/// Samples ξ, ψ with components uniform in [-10, 10]; every fourth ψ is a
/// perturbation of ξ of size 10^U(-8,-2) instead.
pub fn flux_monotonicity_check(pair: &YoungPair, n_trials: usize, seed: u64) -> FluxReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)];
    let mut rep = FluxReport { trials: n_trials, min_gap: f64::INFINITY, separation_at_min: 0.0, degenerate_pairs: 0 };
    for i in 0..n_trials {
        let xi = sample(&mut rng);
        let psi = if i % 4 == 0 {
            let e = 10f64.powf(rng.gen_range(-8.0..-2.0));
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            [xi[0] + e * th.cos(), xi[1] + e * th.sin()]
        } else {
            sample(&mut rng)
        };
        let gap = flux_gap(pair, xi, psi);
        let sep = (xi[0] - psi[0]).hypot(xi[1] - psi[1]);
        if gap < rep.min_gap {
            rep.min_gap = gap;
            rep.separation_at_min = sep;
        }
        if gap < 1e-12 && sep >= 1e-5 {
            rep.degenerate_pairs += 1;
        }
    }
    rep
}

/// |J - I| and max |J' - I'| at a field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyAgreement {
    pub energy_gap: f64,
    pub gradient_gap: f64,
}

pub fn energy_agreement(u: &Field, tr: &Truncation, prm: &ProblemParams) -> EnergyAgreement {
    let fi = prm.functional(u.mesh());
    let fj = tr.functional(prm);
    let energy_gap = (fi.energy(u.coeffs()) - fj.energy(u.coeffs())).abs();
    let gradient_gap = fi
        .gradient(u.coeffs())
        .iter()
        .zip(fj.gradient(u.coeffs()))
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    EnergyAgreement { energy_gap, gradient_gap }
}

/// Energies along the norm ladder ‖u‖ ∈ {2, 4, 8, 16}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoercivityReport {
    pub norms: Vec<f64>,
    /// Per field, I at each rung.
    pub i_values: Vec<Vec<f64>>,
    pub j_values: Vec<Vec<f64>>,
    /// max over fields and rungs of ½‖u‖^{φ₀} - I(u).
    pub fitted_c: f64,
    /// J increases from rung to rung for every field beyond the first rung.
    pub j_monotone: bool,
}

pub fn coercivity_probe(
    prm: &ProblemParams,
    tr: &Truncation,
    mesh: &Arc<Mesh>,
    n_fields: usize,
    seed: u64,
) -> CoercivityReport {
    let norms = vec![2.0, 4.0, 8.0, 16.0];
    let phi0 = prm.pair.indices().lower;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fj = tr.functional(prm);
    let mut i_values = Vec::new();
    let mut j_values = Vec::new();
    let mut fitted_c = f64::NEG_INFINITY;
    let mut j_monotone = true;
    for _ in 0..n_fields {
        let v = random_field(mesh, 1.0, &mut rng);
        let nrm = orlicz_norm(&v, &prm.pair);
        let mut iv = Vec::new();
        let mut jv = Vec::new();
        for &r in &norms {
            let u = v.scaled(r / nrm);
            let i = assemble_energy_i(&u, prm);
            fitted_c = fitted_c.max(0.5 * r.powf(phi0) - i);
            iv.push(i);
            jv.push(fj.energy(u.coeffs()));
        }
        j_monotone &= jv.windows(2).skip(1).all(|w| w[1] > w[0]);
        i_values.push(iv);
        j_values.push(jv);
    }
    CoercivityReport { norms, i_values, j_values, fitted_c, j_monotone }
}
