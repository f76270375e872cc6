use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The generating function φ of the Young pair.
///
/// Every family is an odd, strictly increasing homeomorphism of ℝ:
///
/// * `Power`:        φ(t) = p|t|^{p-2} t,                 p > 1
/// * `LogPower`:     φ(t) = log(1+|t|^s) |t|^{p-2} t,     p > 1, s ≥ 1
/// * `PowerOverLog`: φ(t) = |t|^{p-2} t / log(1+|t|),     p > 2
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    Power { p: f64 },
    LogPower { p: f64, s: f64 },
    PowerOverLog { p: f64 },
}

impl PhiSpec {
    pub fn power(p: f64) -> Result<Self> {
        Self::Power { p }.validated()
    }

    pub fn log_power(p: f64, s: f64) -> Result<Self> {
        Self::LogPower { p, s }.validated()
    }

    pub fn power_over_log(p: f64) -> Result<Self> {
        Self::PowerOverLog { p }.validated()
    }

    /// Checks the parameter domain of the family.
    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            Self::Power { p } => p.is_finite() && p > 1.0,
            Self::LogPower { p, s } => p.is_finite() && s.is_finite() && p > 1.0 && s >= 1.0,
            Self::PowerOverLog { p } => p.is_finite() && p > 2.0,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidParameter(format!("{self:?} is outside its parameter domain")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Power { .. } => "power",
            Self::LogPower { .. } => "log_power",
            Self::PowerOverLog { .. } => "power_over_log",
        }
    }

    /// φ(t) for any finite t.
    pub fn phi(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let m = t.abs();
        m * self.a(m) * t.signum()
    }

    /// a(t) = φ(t)/t for t ≥ 0, continued at t = 0 by the limit t → 0⁺.
    ///
    /// The limit is `+∞` for `Power` with p < 2 and `PowerOverLog` with
    /// p < 3; callers that need the flux use [`PhiSpec::flux`], which is
    /// continuous at the origin in every case.
    pub fn a(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        if t == 0.0 {
            return self.a_at_zero();
        }
        match *self {
            Self::Power { p } => p * t.powf(p - 2.0),
            Self::LogPower { p, s } => (t.powf(s)).ln_1p() * t.powf(p - 2.0),
            Self::PowerOverLog { p } => t.powf(p - 3.0) * t_over_log1p(t),
        }
    }

    /// lim_{t→0⁺} φ(t)/t.
    pub fn a_at_zero(&self) -> f64 {
        match *self {
            Self::Power { p } => limit_of_power(p - 2.0, p),
            Self::LogPower { .. } => 0.0,
            Self::PowerOverLog { p } => limit_of_power(p - 3.0, 1.0),
        }
    }

    /// φ'(t) for t ≥ 0 (limit at 0, possibly `+∞`).
    pub fn dphi(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match *self {
            Self::Power { p } => {
                if t == 0.0 {
                    limit_of_power(p - 2.0, p * (p - 1.0))
                } else {
                    p * (p - 1.0) * t.powf(p - 2.0)
                }
            }
            Self::LogPower { p, s } => {
                if t == 0.0 {
                    return 0.0;
                }
                let x = t.powf(s);
                let tp2 = t.powf(p - 2.0);
                s * tp2 * (x / (1.0 + x)) + (p - 1.0) * x.ln_1p() * tp2
            }
            Self::PowerOverLog { p } => {
                if t == 0.0 {
                    return limit_of_power(p - 3.0, p - 2.0);
                }
                let r = t_over_log1p(t);
                t.powf(p - 3.0) * ((p - 1.0) * r - r * r / (1.0 + t))
            }
        }
    }

    /// Flux a(|ξ|)ξ of a gradient vector, zero at ξ = 0.
    pub fn flux(&self, xi: [f64; 2]) -> [f64; 2] {
        let m = xi[0].hypot(xi[1]);
        if m == 0.0 {
            return [0.0, 0.0];
        }
        let a = self.a(m);
        [a * xi[0], a * xi[1]]
    }

    /// ln φ(e^L), evaluated without forming e^L.
    pub fn ln_phi_of_log(&self, l: f64) -> f64 {
        match *self {
            Self::Power { p } => p.ln() + (p - 1.0) * l,
            Self::LogPower { p, s } => ln_softplus(s * l) + (p - 1.0) * l,
            Self::PowerOverLog { p } => (p - 1.0) * l - ln_softplus(l),
        }
    }

    /// d/dL ln φ(e^L) = tφ'(t)/φ(t).
    fn dln_phi_of_log(&self, l: f64) -> f64 {
        match *self {
            Self::Power { p } => p - 1.0,
            Self::LogPower { p, s } => s * dln_softplus(s * l) + (p - 1.0),
            Self::PowerOverLog { p } => (p - 1.0) - dln_softplus(l),
        }
    }

    /// φ⁻¹(y), to relative accuracy 1e-12.
    ///
    /// Closed form for `Power`; otherwise safeguarded Newton on
    /// L ↦ ln φ(e^L) - ln|y|, which is increasing with slope in
    /// [φ₀ - 1, φ⁰ - 1].
    pub fn inverse(&self, y: f64) -> f64 {
        if y == 0.0 || y.is_nan() {
            return if y.is_nan() { f64::NAN } else { 0.0 };
        }
        let target = y.abs().ln();
        let t = match *self {
            Self::Power { p } => ((target - p.ln()) / (p - 1.0)).exp(),
            _ => self.solve_log(target).exp(),
        };
        t * y.signum()
    }

    fn solve_log(&self, target: f64) -> f64 {
        let g = |l: f64| self.ln_phi_of_log(l) - target;
        // bracket by unit steps; the slope is bounded below by φ₀ - 1 > 0
        let mut lo = target / 2.0;
        let mut hi = lo;
        let mut step = 1.0;
        if g(lo) > 0.0 {
            while g(lo) > 0.0 {
                hi = lo;
                lo -= step;
                step *= 2.0;
            }
        } else {
            while g(hi) < 0.0 {
                lo = hi;
                hi += step;
                step *= 2.0;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let gx = g(x);
            if gx == 0.0 {
                return x;
            }
            if gx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.dln_phi_of_log(x);
            let mut next = x - gx / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-14 * (1.0 + x.abs()) || hi - lo <= 1e-14 * (1.0 + x.abs()) {
                return next;
            }
            x = next;
        }
        x
    }

    /// Series for Φ(t) valid for 0 ≤ t ≤ 2⁻³⁰ (relative error below 1e-26).
    pub(crate) fn big_phi_series(&self, t: f64) -> f64 {
        match *self {
            Self::Power { p } => t.powf(p),
            Self::LogPower { p, s } => {
                t.powf(p + s) / (p + s) - t.powf(p + 2.0 * s) / (2.0 * (p + 2.0 * s))
                    + t.powf(p + 3.0 * s) / (3.0 * (p + 3.0 * s))
            }
            Self::PowerOverLog { p } => {
                t.powf(p - 1.0) / (p - 1.0) + t.powf(p) / (2.0 * p) - t.powf(p + 1.0) / (12.0 * (p + 1.0))
            }
        }
    }

    /// The closed-form index pair (φ₀, φ⁰) of the family.
    pub fn closed_form_indices(&self) -> (f64, f64) {
        match *self {
            Self::Power { p } => (p, p),
            Self::LogPower { p, s } => (p, p + s),
            Self::PowerOverLog { p } => (p - 1.0, p),
        }
    }
}

fn limit_of_power(exponent: f64, coef: f64) -> f64 {
    if exponent > 0.0 {
        0.0
    } else if exponent == 0.0 {
        coef
    } else {
        f64::INFINITY
    }
}

/// t / log(1+t), stable near 0.
fn t_over_log1p(t: f64) -> f64 {
    if t < 1e-8 {
        1.0 + 0.5 * t
    } else {
        t / t.ln_1p()
    }
}

/// ln(ln(1 + e^x)).
pub(crate) fn ln_softplus(x: f64) -> f64 {
    if x > 35.0 {
        (x + (-x).exp().ln_1p()).ln()
    } else if x < -35.0 {
        x - 0.5 * x.exp()
    } else {
        x.exp().ln_1p().ln()
    }
}

/// d/dx ln(ln(1 + e^x)) = σ(x) / softplus(x).
fn dln_softplus(x: f64) -> f64 {
    if x < -35.0 {
        return 1.0 - 0.5 * x.exp();
    }
    let sp = if x > 35.0 { x + (-x).exp().ln_1p() } else { x.exp().ln_1p() };
    let sig = 1.0 / (1.0 + (-x).exp());
    sig / sp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families() -> Vec<PhiSpec> {
        vec![
            PhiSpec::power(2.0).unwrap(),
            PhiSpec::power(1.5).unwrap(),
            PhiSpec::power(3.0).unwrap(),
            PhiSpec::log_power(2.0, 1.5).unwrap(),
            PhiSpec::log_power(3.0, 1.0).unwrap(),
            PhiSpec::power_over_log(3.0).unwrap(),
            PhiSpec::power_over_log(2.5).unwrap(),
        ]
    }

    #[test]
    fn parameter_domains() {
        assert!(PhiSpec::power(1.0).is_err());
        assert!(PhiSpec::log_power(2.0, 0.9).is_err());
        assert!(PhiSpec::log_power(2.0, 1.0).is_ok());
        assert!(PhiSpec::log_power(1.0, 2.0).is_err());
        assert!(PhiSpec::power_over_log(2.0).is_err());
        assert!(PhiSpec::power(f64::NAN).is_err());
        assert!(PhiSpec::power_over_log(2.0001).is_ok());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(PhiSpec::power(2.0).unwrap().phi(3.0), 6.0);
        assert_eq!(PhiSpec::power(2.7).unwrap().phi(0.0), 0.0);
        let lp = PhiSpec::log_power(2.0, 1.0).unwrap();
        assert!((lp.phi(1.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn a_examples() {
        assert_eq!(PhiSpec::power(2.0).unwrap().a(5.0), 2.0);
        assert!((PhiSpec::power(3.0).unwrap().a(2.0) - 6.0).abs() < 1e-14);
        let lp = PhiSpec::log_power(2.0, 1.0).unwrap();
        assert!((lp.a(1.0) - 0.693_147_180_559_945_3).abs() < 1e-15);
    }

    #[test]
    fn a_limits_at_zero() {
        assert_eq!(PhiSpec::power(2.0).unwrap().a(0.0), 2.0);
        assert_eq!(PhiSpec::power(3.0).unwrap().a(0.0), 0.0);
        assert_eq!(PhiSpec::power(1.5).unwrap().a(0.0), f64::INFINITY);
        assert_eq!(PhiSpec::log_power(2.0, 2.0).unwrap().a(0.0), 0.0);
        assert_eq!(PhiSpec::power_over_log(3.0).unwrap().a(0.0), 1.0);
        assert_eq!(PhiSpec::power_over_log(4.0).unwrap().a(0.0), 0.0);
        // continuity of the limit value
        let pol = PhiSpec::power_over_log(3.0).unwrap();
        assert!((pol.a(1e-12) - 1.0).abs() < 1e-11);
        assert_eq!(PhiSpec::power(1.5).unwrap().flux([0.0, 0.0]), [0.0, 0.0]);
    }

    #[test]
    fn dphi_matches_central_differences() {
        for f in families() {
            for &t in &[1e-3, 0.1, 0.7, 1.0, 3.3, 40.0] {
                let h = 1e-6 * t;
                let fd = (f.phi(t + h) - f.phi(t - h)) / (2.0 * h);
                let an = f.dphi(t);
                assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-12), "{f:?} t={t}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn odd_and_increasing() {
        for f in families() {
            let mut prev = f64::NEG_INFINITY;
            for i in -400..=400 {
                let t = (i as f64 / 40.0).powi(3);
                assert_eq!(f.phi(-t), -f.phi(t));
                let v = f.phi(t);
                assert!(v > prev || (t == 0.0 && v == 0.0), "{f:?} not increasing at {t}");
                prev = v;
            }
        }
    }

    #[test]
    fn inverse_examples() {
        assert!((PhiSpec::power(2.0).unwrap().inverse(6.0) - 3.0).abs() < 1e-14);
        for f in families() {
            assert_eq!(f.inverse(0.0), 0.0);
        }
        let pol = PhiSpec::power_over_log(3.0).unwrap();
        assert!((pol.inverse(pol.phi(2.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ln_phi_of_log_matches_direct_evaluation() {
        for f in families() {
            for &l in &[-5.0, -1.0, 0.0, 0.4, 3.0, 9.0] {
                let direct = f.phi(f64::exp(l)).ln();
                assert!((f.ln_phi_of_log(l) - direct).abs() < 1e-12, "{f:?} L={l}");
            }
        }
    }

    #[test]
    fn serde_keys() {
        let s = serde_json::to_string(&PhiSpec::LogPower { p: 2.0, s: 1.5 }).unwrap();
        assert_eq!(s, r#"{"family":"log_power","p":2.0,"s":1.5}"#);
        let back: PhiSpec = toml::from_str("family = \"power_over_log\"\np = 3.0\n").unwrap();
        assert_eq!(back, PhiSpec::PowerOverLog { p: 3.0 });
        assert!(toml::from_str::<PhiSpec>("family = \"power\"\np = 2.0\ns = 1.0\n").is_err());
    }
}
