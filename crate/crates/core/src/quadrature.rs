//! One-dimensional quadrature: fixed Gauss-Legendre rules and adaptive Simpson.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared 16-point rule.
    pub fn g16() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive Simpson quadrature with a global interval budget.
///
/// Accepts a panel once `|S₂ - S₁| ≤ 15·tol_panel`, where the panel tolerance
/// is `tol` scaled by the panel's share of [a, b] (with a floor, so that deep
/// refinement near an endpoint singularity is still bounded).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    budget: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let width = b - a;

    struct Panel {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        depth: u32,
    }

    let mut stack = vec![Panel { a, b, fa, fm, fb, whole, depth: 0 }];
    let mut total = 0.0;
    let mut used = 1usize;
    while let Some(pn) = stack.pop() {
        let m = 0.5 * (pn.a + pn.b);
        let lm = 0.5 * (pn.a + m);
        let rm = 0.5 * (m + pn.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - pn.a) / 6.0 * (pn.fa + 4.0 * flm + pn.fm);
        let right = (pn.b - m) / 6.0 * (pn.fm + 4.0 * frm + pn.fb);
        let delta = left + right - pn.whole;
        let local_tol = (tol * (pn.b - pn.a) / width).max(tol * 1e-6);
        if delta.abs() <= 15.0 * local_tol || pn.depth >= 60 {
            total += left + right + delta / 15.0;
            continue;
        }
        used += 1;
        if used > budget {
            return Err(Error::QuadratureFailure { a, b, tol, budget });
        }
        stack.push(Panel { a: pn.a, b: m, fa: pn.fa, fm: flm, fb: pn.fm, whole: left, depth: pn.depth + 1 });
        stack.push(Panel { a: m, b: pn.b, fa: pn.fm, fm: frm, fb: pn.fb, whole: right, depth: pn.depth + 1 });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_is_exact_for_polynomials() {
        let g = GaussLegendre::new(5);
        // degree 9 is the exactness limit of a 5-point rule
        let v = g.integrate(0.0, 2.0, |x| x.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-10);
        let s: f64 = g.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn g16_integrates_exp() {
        let v = GaussLegendre::g16().integrate(0.0, 1.0, f64::exp);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn simpson_handles_endpoint_singularity() {
        let v = adaptive_simpson(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12, 1_000_000).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn simpson_reports_budget_exhaustion() {
        let err = adaptive_simpson(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, 1e-14, 50).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }
}
