use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::phi::PhiSpec;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, GaussLegendre};

/// How Φ is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BigPhiStrategy {
    /// Closed form; only available for the `Power` family.
    ClosedForm,
    /// Quadrature of φ, memoized on dyadic shells and cross-checked against
    /// adaptive Simpson at `tol` (relative to the magnitude of each shell).
    AdaptiveQuadrature { tol: f64 },
}

/// Default absolute/relative tolerance for the quadrature strategy.
pub const QUADRATURE_TOL: f64 = 1e-12;
/// Interval budget for adaptive Simpson.
pub const QUADRATURE_BUDGET: usize = 1_000_000;

// Shells [2^k, 2^{k+1}] for k in SHELL_LO..SHELL_HI.
const SHELL_LO: i32 = -30;
const SHELL_HI: i32 = 64;

/// Range of ln t over which the indices are estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexWindow {
    pub ln_t_min: f64,
    pub ln_t_max: f64,
}

impl IndexWindow {
    pub fn from_t(t_min: f64, t_max: f64) -> Self {
        Self { ln_t_min: t_min.ln(), ln_t_max: t_max.ln() }
    }
}

impl Default for IndexWindow {
    /// |ln t| ≤ 10⁴. The log families approach their limits like 1/ln t, so a
    /// window of t ∈ [1e-6, 1e6] leaves an error near 0.07.
    fn default() -> Self {
        Self { ln_t_min: -1e4, ln_t_max: 1e4 }
    }
}

/// Cached estimate of φ₀ = inf tφ/Φ and φ⁰ = sup tφ/Φ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub lower: f64,
    pub upper: f64,
    /// ln t at which the infimum was located.
    pub ln_t_lower: f64,
    /// ln t at which the supremum was located.
    pub ln_t_upper: f64,
}

/// Cumulative integrals of an integrand over dyadic shells.
#[derive(Debug, Clone)]
struct ShellTable {
    // values[k] = ∫_0^{2^{SHELL_LO + k}}
    values: Vec<f64>,
}

impl ShellTable {
    fn build<F: Fn(f64) -> f64>(head: f64, f: &F) -> Self {
        let g = GaussLegendre::g16();
        let mut values = Vec::with_capacity((SHELL_HI - SHELL_LO + 1) as usize);
        let mut acc = head;
        values.push(acc);
        for k in SHELL_LO..SHELL_HI {
            let a = 2f64.powi(k);
            acc += g.integrate(a, 2.0 * a, f);
            values.push(acc);
        }
        Self { values }
    }

    fn shell_integral(&self, k: i32) -> f64 {
        let i = (k - SHELL_LO) as usize;
        self.values[i + 1] - self.values[i]
    }

    fn eval<F: Fn(f64) -> f64>(&self, t: f64, f: &F) -> f64 {
        let g = GaussLegendre::g16();
        let k = floor_log2(t);
        if k < SHELL_HI {
            let base = 2f64.powi(k);
            return self.values[(k - SHELL_LO) as usize] + g.integrate(base, t, f);
        }
        // beyond the table: continue shell by shell
        let mut acc = *self.values.last().expect("non-empty table");
        let mut base = 2f64.powi(SHELL_HI);
        while 2.0 * base <= t {
            acc += g.integrate(base, 2.0 * base, f);
            base *= 2.0;
        }
        acc + g.integrate(base, t, f)
    }
}

fn floor_log2(t: f64) -> i32 {
    let mut k = t.log2().floor() as i32;
    if 2f64.powi(k) > t {
        k -= 1;
    }
    if 2f64.powi(k + 1) <= t {
        k += 1;
    }
    k
}

/// The Young pair (Φ, Φ*) generated by φ.
#[derive(Debug)]
pub struct YoungPair {
    phi: PhiSpec,
    strategy: BigPhiStrategy,
    big_phi_table: Option<ShellTable>,
    star_table: Option<ShellTable>,
    indices: OnceLock<IndexEstimate>,
}

impl YoungPair {
    /// Builds the pair with the natural strategy for the family: closed form
    /// for `Power`, quadrature at [`QUADRATURE_TOL`] otherwise.
    pub fn new(phi: PhiSpec) -> Result<Self> {
        let strategy = match phi {
            PhiSpec::Power { .. } => BigPhiStrategy::ClosedForm,
            _ => BigPhiStrategy::AdaptiveQuadrature { tol: QUADRATURE_TOL },
        };
        Self::with_strategy(phi, strategy)
    }

    pub fn with_strategy(phi: PhiSpec, strategy: BigPhiStrategy) -> Result<Self> {
        let phi = phi.validated()?;
        let mut pair = Self { phi, strategy, big_phi_table: None, star_table: None, indices: OnceLock::new() };
        match strategy {
            BigPhiStrategy::ClosedForm => {
                if !matches!(phi, PhiSpec::Power { .. }) {
                    return Err(Error::InvalidParameter(format!(
                        "closed-form Φ is only available for the power family, not {}",
                        phi.name()
                    )));
                }
            }
            BigPhiStrategy::AdaptiveQuadrature { tol } => {
                if !(tol > 0.0) {
                    return Err(Error::InvalidParameter(format!("quadrature tolerance {tol}")));
                }
                let t0 = 2f64.powi(SHELL_LO);
                let f = |s: f64| phi.phi(s);
                let table = ShellTable::build(phi.big_phi_series(t0), &f);
                // every shell is re-integrated independently by adaptive Simpson
                for k in SHELL_LO..SHELL_HI {
                    let a = 2f64.powi(k);
                    let gauss = table.shell_integral(k);
                    let scale = gauss.abs().max(1.0);
                    let simpson = adaptive_simpson(f, a, 2.0 * a, tol * scale, QUADRATURE_BUDGET)?;
                    if (simpson - gauss).abs() > 16.0 * tol * scale {
                        return Err(Error::QuadratureFailure { a, b: 2.0 * a, tol, budget: QUADRATURE_BUDGET });
                    }
                }
                pair.big_phi_table = Some(table);
            }
        }
        if !matches!(strategy, BigPhiStrategy::ClosedForm) {
            let s0 = 2f64.powi(SHELL_LO);
            let sigma0 = phi.inverse(s0);
            let head = s0 * sigma0 - pair.big_phi(sigma0);
            let inv = |s: f64| phi.inverse(s);
            pair.star_table = Some(ShellTable::build(head, &inv));
        }
        Ok(pair)
    }

    pub fn spec(&self) -> &PhiSpec {
        &self.phi
    }

    pub fn strategy(&self) -> BigPhiStrategy {
        self.strategy
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.phi.phi(t)
    }

    pub fn a(&self, t: f64) -> f64 {
        self.phi.a(t)
    }

    /// Φ(|t|).
    pub fn big_phi(&self, t: f64) -> f64 {
        let t = t.abs();
        if t == 0.0 {
            return 0.0;
        }
        match (&self.big_phi_table, self.phi) {
            (None, PhiSpec::Power { p }) => t.powf(p),
            (Some(table), phi) => {
                if t <= 2f64.powi(SHELL_LO) {
                    phi.big_phi_series(t)
                } else {
                    table.eval(t, &|s| phi.phi(s))
                }
            }
            (None, _) => unreachable!("table exists for non-closed-form families"),
        }
    }

    /// Φ(t) by direct adaptive Simpson on [0, t], without the memoized table.
    pub fn big_phi_reference(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        let tol = match self.strategy {
            BigPhiStrategy::AdaptiveQuadrature { tol } => tol,
            BigPhiStrategy::ClosedForm => QUADRATURE_TOL,
        };
        if t == 0.0 {
            return Ok(0.0);
        }
        // tφ(t) bounds Φ(t), so the tolerance is relative to the result
        let scale = (t * self.phi(t)).max(f64::MIN_POSITIVE);
        adaptive_simpson(|s| self.phi.phi(s), 0.0, t, tol * scale, QUADRATURE_BUDGET)
    }

    /// Φ*(|t|) = ∫₀ᵗ φ⁻¹(s) ds.
    pub fn big_phi_star(&self, t: f64) -> f64 {
        let t = t.abs();
        if t == 0.0 {
            return 0.0;
        }
        match (&self.star_table, self.phi) {
            (None, PhiSpec::Power { p }) => {
                let e = 1.0 / (p - 1.0);
                (p - 1.0) / p * p.powf(-e) * t.powf(p * e)
            }
            (Some(table), phi) => {
                let s0 = 2f64.powi(SHELL_LO);
                if t <= s0 {
                    let sigma = phi.inverse(t);
                    t * sigma - self.big_phi(sigma)
                } else {
                    table.eval(t, &|s| phi.inverse(s))
                }
            }
            (None, _) => unreachable!("table exists for non-closed-form families"),
        }
    }

    /// Φ*(t) by direct adaptive Simpson over φ⁻¹ on [0, t].
    pub fn big_phi_star_reference(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        if t == 0.0 {
            return Ok(0.0);
        }
        let scale = (t * self.phi.inverse(t)).max(f64::MIN_POSITIVE);
        adaptive_simpson(|s| self.phi.inverse(s), 0.0, t, QUADRATURE_TOL * scale, QUADRATURE_BUDGET)
    }

    /// tφ(t)/Φ(t) for t > 0.
    pub fn index_ratio(&self, t: f64) -> f64 {
        t * self.phi(t) / self.big_phi(t)
    }

    /// tφ(t)/Φ(t) at t = e^L, computed in log space:
    /// Φ(t)/(tφ(t)) = ∫₀^∞ e^{-y} φ(t e^{-y})/φ(t) dy.
    pub fn index_ratio_log(&self, l: f64) -> f64 {
        let g = GaussLegendre::g16();
        let top = self.phi.ln_phi_of_log(l);
        let mut acc = 0.0;
        // φ is increasing so the integrand is below e^{-y}; e^{-40} is negligible
        for j in 0..40 {
            let y0 = j as f64;
            acc += g.integrate(y0, y0 + 1.0, |y| (-y + self.phi.ln_phi_of_log(l - y) - top).exp());
        }
        1.0 / acc
    }

    /// Cached indices; estimated on the default window if not yet set.
    pub fn indices(&self) -> IndexEstimate {
        *self
            .indices
            .get_or_init(|| estimate_index_range(self, IndexWindow::default(), DEFAULT_INDEX_SAMPLES))
    }

    /// Indices estimated on `window` with `n_samples` grid points. The first
    /// estimate made on a pair is cached; later calls only compute.
    pub fn estimate_indices(&self, window: IndexWindow, n_samples: usize) -> Result<(f64, f64)> {
        if !(window.ln_t_min < window.ln_t_max) || n_samples < 2 {
            return Err(Error::InvalidParameter(format!(
                "index window {window:?} with {n_samples} samples"
            )));
        }
        let est = estimate_index_range(self, window, n_samples);
        let _ = self.indices.set(est);
        Ok((est.lower, est.upper))
    }
}

/// Grid size used for the cached indices.
pub const DEFAULT_INDEX_SAMPLES: usize = 2001;

fn estimate_index_range(pair: &YoungPair, window: IndexWindow, n: usize) -> IndexEstimate {
    // sinh spacing: dense near t = 1, sparse in the tails
    let v0 = window.ln_t_min.asinh();
    let v1 = window.ln_t_max.asinh();
    let grid: Vec<f64> = (0..n)
        .map(|i| (v0 + (v1 - v0) * i as f64 / (n - 1) as f64).sinh())
        .map(|l| l.clamp(window.ln_t_min, window.ln_t_max))
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&l| pair.index_ratio_log(l)).collect();

    let refine = |i: usize, sign: f64| -> (f64, f64) {
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(n - 1)];
        let (l, v) = golden_section(|l| sign * pair.index_ratio_log(l), lo, hi, 80);
        let v = sign * v;
        if sign * v <= sign * vals[i] {
            (l, v)
        } else {
            (grid[i], vals[i])
        }
    };
    let imin = argext(&vals, |a, b| a < b);
    let imax = argext(&vals, |a, b| a > b);
    let (ln_t_lower, lower) = refine(imin, 1.0);
    let (ln_t_upper, upper) = refine(imax, -1.0);
    IndexEstimate { lower, upper, ln_t_lower, ln_t_upper }
}

fn argext(v: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if better(x, v[best]) {
            best = i;
        }
    }
    best
}

/// Minimizes a unimodal function on [a, b]; returns (argmin, min).
/// (argmax, max) of a unimodal function on [a, b].
pub(crate) fn golden_section_max(f: &dyn Fn(f64) -> f64, a: f64, b: f64, iters: usize) -> (f64, f64) {
    let (t, v) = golden_section(|x| -f(x), a, b, iters);
    (t, -v)
}

pub(crate) fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let candidates = [(a, f(a)), (b, f(b)), (c, fc), (d, fd)];
    candidates.into_iter().fold((a, f64::INFINITY), |best, x| if x.1 < best.1 { x } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(phi: PhiSpec) -> YoungPair {
        YoungPair::new(phi).unwrap()
    }

    #[test]
    fn big_phi_examples() {
        let p2 = pair(PhiSpec::power(2.0).unwrap());
        assert_eq!(p2.big_phi(3.0), 9.0);
        assert_eq!(p2.big_phi(0.0), 0.0);
        // ∫₀¹ s log(1+s) ds = [(s²-1)/2 log(1+s) - s²/4 + s/2]₀¹ = 1/4
        let lp = pair(PhiSpec::log_power(2.0, 1.0).unwrap());
        assert!((lp.big_phi(1.0) - 0.25).abs() < 1e-14);
        assert!((lp.big_phi_reference(1.0).unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(lp.big_phi(0.0), 0.0);
    }

    #[test]
    fn closed_form_requires_power() {
        let err = YoungPair::with_strategy(PhiSpec::power_over_log(3.0).unwrap(), BigPhiStrategy::ClosedForm);
        assert!(err.is_err());
        // the quadrature route is available for the power family as well
        let q = YoungPair::with_strategy(
            PhiSpec::power(2.5).unwrap(),
            BigPhiStrategy::AdaptiveQuadrature { tol: 1e-12 },
        )
        .unwrap();
        for &t in &[1e-12, 1e-3, 0.5, 1.0, 7.0, 1e5] {
            let exact = f64::powf(t, 2.5);
            assert!((q.big_phi(t) - exact).abs() <= 1e-13 * exact, "t={t}");
        }
    }

    #[test]
    fn memoized_phi_matches_reference() {
        for phi in [PhiSpec::log_power(2.0, 1.5).unwrap(), PhiSpec::power_over_log(3.0).unwrap()] {
            let pr = pair(phi);
            for &t in &[1e-9, 1e-4, 0.3, 1.0, 2.0, 13.7, 1e3] {
                let a = pr.big_phi(t);
                let b = pr.big_phi_reference(t).unwrap();
                assert!((a - b).abs() <= 1e-10 * b.max(1e-300), "{phi:?} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn big_phi_derivative_is_phi() {
        for phi in [PhiSpec::log_power(3.0, 1.0).unwrap(), PhiSpec::power_over_log(2.5).unwrap()] {
            let pr = pair(phi);
            // includes a dyadic breakpoint at t = 1
            for &t in &[0.01, 0.5, 1.0, 3.0, 100.0] {
                let h = 1e-5 * t;
                let fd = (pr.big_phi(t + h) - pr.big_phi(t - h)) / (2.0 * h);
                assert!((fd - pr.phi(t)).abs() <= 1e-8 * pr.phi(t), "{phi:?} t={t}");
            }
        }
    }

    #[test]
    fn big_phi_star_examples() {
        let p2 = pair(PhiSpec::power(2.0).unwrap());
        assert!((p2.big_phi_star(2.0) - 1.0).abs() < 1e-15);
        assert!((p2.big_phi_star(4.0) - 4.0).abs() < 1e-14);
        assert_eq!(p2.big_phi_star(0.0), 0.0);
        assert!((p2.big_phi_star_reference(4.0).unwrap() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn big_phi_star_table_matches_reference() {
        for phi in [PhiSpec::log_power(2.0, 1.0).unwrap(), PhiSpec::power_over_log(3.0).unwrap()] {
            let pr = pair(phi);
            for &t in &[1e-10, 0.01, 0.7, 1.0, 5.0, 300.0] {
                let a = pr.big_phi_star(t);
                let b = pr.big_phi_star_reference(t).unwrap();
                assert!((a - b).abs() <= 1e-9 * b.max(1e-300), "{phi:?} t={t}: {a} vs {b}");
                // Legendre identity at the maximizer s = φ⁻¹(t)
                let s = pr.spec().inverse(t);
                let legendre = t * s - pr.big_phi(s);
                assert!((a - legendre).abs() <= 1e-10 * a.max(1e-300));
            }
        }
    }

    #[test]
    fn index_ratio_routes_agree() {
        for phi in [
            PhiSpec::power(2.5).unwrap(),
            PhiSpec::log_power(2.0, 1.0).unwrap(),
            PhiSpec::power_over_log(3.0).unwrap(),
        ] {
            let pr = pair(phi);
            for &l in &[-8.0, -2.0, 0.0, 1.5, 6.0] {
                let direct = pr.index_ratio(f64::exp(l));
                let logd = pr.index_ratio_log(l);
                assert!((direct - logd).abs() < 1e-11, "{phi:?} L={l}: {direct} vs {logd}");
            }
        }
    }

    #[test]
    fn index_examples() {
        let pr = pair(PhiSpec::power(2.5).unwrap());
        let (lo, hi) = pr.estimate_indices(IndexWindow::default(), 401).unwrap();
        assert!((lo - 2.5).abs() < 1e-9 && (hi - 2.5).abs() < 1e-9);

        let lp = pair(PhiSpec::log_power(2.0, 1.0).unwrap());
        let (lo, hi) = lp.estimate_indices(IndexWindow::default(), 2001).unwrap();
        assert!((lo - 2.0).abs() < 1e-3 && (hi - 3.0).abs() < 1e-3, "{lo} {hi}");

        let pol = pair(PhiSpec::power_over_log(3.0).unwrap());
        let (lo, hi) = pol.estimate_indices(IndexWindow::default(), 2001).unwrap();
        assert!((lo - 2.0).abs() < 1e-3 && (hi - 3.0).abs() < 1e-3, "{lo} {hi}");
    }

    #[test]
    fn narrow_window_truncation_error() {
        // on t ∈ [1e-6, 1e6] the log-power infimum is only approached like 1/ln t
        let lp = pair(PhiSpec::log_power(2.0, 1.0).unwrap());
        let (lo, hi) = lp.estimate_indices(IndexWindow::from_t(1e-6, 1e6), 2001).unwrap();
        assert!(lo > 2.05 && lo < 2.1, "{lo}");
        assert!((hi - 3.0).abs() < 1e-3);
    }

    #[test]
    fn indices_are_cached_once() {
        let pr = pair(PhiSpec::power_over_log(3.0).unwrap());
        let first = pr.estimate_indices(IndexWindow::from_t(1e-3, 1e3), 101).unwrap();
        let cached = pr.indices();
        assert_eq!((cached.lower, cached.upper), first);
        assert!(pr.estimate_indices(IndexWindow { ln_t_min: 1.0, ln_t_max: 0.0 }, 10).is_err());
    }

    #[test]
    fn golden_section_finds_parabola_min() {
        let (x, v) = golden_section(|x| (x - 0.3) * (x - 0.3) + 1.0, -1.0, 2.0, 100);
        assert!((x - 0.3).abs() < 1e-7 && (v - 1.0).abs() < 1e-14);
    }
}
