//! Scalar inequalities satisfied by a Young pair, and the Luxemburg norm of
//! weighted samples.

use super::young::{golden_section, YoungPair};

/// Φ(s) + Φ*(t) - st, nonnegative by Young's inequality.
pub fn young_gap(pair: &YoungPair, s: f64, t: f64) -> f64 {
    pair.big_phi(s) + pair.big_phi_star(t) - s * t
}

/// Φ*(t) as sup_{s ≥ 0} (st - Φ(s)), by golden section on the concave
/// objective. Independent of φ⁻¹.
pub fn conjugate_by_sup(pair: &YoungPair, t: f64) -> f64 {
    let t = t.abs();
    if t == 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while pair.big_phi(hi) < hi * t {
        hi *= 2.0;
    }
    let (_, v) = golden_section(|s| pair.big_phi(s) - s * t, 0.0, hi, 200);
    -v
}

/// max over the grid of Φ(2t)/Φ(t).
pub fn delta2_ratio(pair: &YoungPair, t_grid: &[f64]) -> f64 {
    t_grid
        .iter()
        .filter(|&&t| t > 0.0)
        .map(|&t| pair.big_phi(2.0 * t) / pair.big_phi(t))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest scaled second divided difference of t ↦ Φ(√t) on a sorted grid.
///
/// Each difference of consecutive slopes is divided by max(1, |slope|) so the
/// result is comparable across the grid.
pub fn sqrt_convexity_slack(pair: &YoungPair, t_grid: &[f64]) -> f64 {
    let h: Vec<f64> = t_grid.iter().map(|&t| pair.big_phi(t.sqrt())).collect();
    let slopes: Vec<f64> = t_grid
        .windows(2)
        .zip(h.windows(2))
        .map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0]))
        .collect();
    slopes
        .windows(2)
        .map(|s| (s[1] - s[0]) / s[0].abs().max(s[1].abs()).max(1.0))
        .fold(f64::INFINITY, f64::min)
}

/// True iff t ↦ Φ(√t) is convex on the grid up to `tol`.
pub fn sqrt_convexity_check(pair: &YoungPair, t_grid: &[f64], tol: f64) -> bool {
    debug_assert!(t_grid.windows(2).all(|w| w[0] < w[1]));
    sqrt_convexity_slack(pair, t_grid) >= -tol
}

/// ½Φ(|x|) + ½Φ(|y|) - Φ(|x+y|/2) - Φ(|x-y|/2).
///
/// Nonnegative when Φ satisfies Δ₂ and Φ(√·) is convex; the integrated form
/// is the uniform-convexity inequality used for strong convergence.
pub fn convexity_gap(pair: &YoungPair, x: f64, y: f64) -> f64 {
    0.5 * pair.big_phi(x) + 0.5 * pair.big_phi(y) - pair.big_phi(0.5 * (x + y)) - pair.big_phi(0.5 * (x - y))
}

/// Σ wᵢ Φ(|vᵢ|/k).
pub fn luxemburg_modular(pair: &YoungPair, samples: &[(f64, f64)], k: f64) -> f64 {
    samples.iter().map(|&(v, w)| w * pair.big_phi(v / k)).sum()
}

/// inf{k > 0 : Σ wᵢ Φ(|vᵢ|/k) ≤ 1}; zero for the zero function.
///
/// The modular is continuous and strictly decreasing in k wherever it is
/// positive, so the infimum is the root of modular = 1, located by bisection
/// on ln k to relative width 1e-15.
pub fn luxemburg_norm(pair: &YoungPair, samples: &[(f64, f64)]) -> f64 {
    let vmax = samples
        .iter()
        .filter(|s| s.1 > 0.0)
        .map(|s| s.0.abs())
        .fold(0.0, f64::max);
    if vmax == 0.0 {
        return 0.0;
    }
    let m = |k: f64| luxemburg_modular(pair, samples, k);
    let mut lo = vmax;
    let mut hi = vmax;
    if m(vmax) > 1.0 {
        while m(hi) > 1.0 {
            lo = hi;
            hi *= 2.0;
        }
    } else {
        while m(lo) <= 1.0 {
            hi = lo;
            lo *= 0.5;
        }
    }
    // m(lo) > 1 ≥ m(hi)
    for _ in 0..200 {
        if hi / lo - 1.0 <= 1e-15 {
            break;
        }
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if m(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
