//! The functional J with the nonlinearity frozen above u₁.

use crate::fem::{Field, Functional, PowerReaction, ProblemParams, Reaction};

/// Cut-off of the power nonlinearity at the minimizer u₁.
///
/// ```text
///   g(x,t) = 0                          t < 0
///          = t^{p-1} - t^{q-1}          0 ≤ t ≤ u₁(x)
///          = u₁^{p-1} - u₁^{q-1}        t > u₁(x)
/// ```
#[derive(Debug, Clone)]
pub struct Truncation {
    u1: Field,
    u1_quad: Vec<f64>,
    p: f64,
    q: f64,
}

/// Reaction of J sampled at the mesh quadrature points.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedReaction<'a> {
    tr: &'a Truncation,
}

impl Truncation {
    pub fn new(u1: Field, prm: &ProblemParams) -> Self {
        let u1_quad = u1.quad_values();
        Self { u1, u1_quad, p: prm.p, q: prm.q }
    }

    pub fn u1(&self) -> &Field {
        &self.u1
    }

    /// u₁ at each quadrature point of the mesh.
    pub fn u1_at_quad(&self) -> &[f64] {
        &self.u1_quad
    }

    fn power(&self) -> PowerReaction {
        PowerReaction { p: self.p, q: self.q }
    }

    /// g(x, t) where u₁(x) = `cut`.
    pub fn g_at(&self, cut: f64, t: f64) -> f64 {
        let pw = self.power();
        if t <= cut {
            pw.source_of(t)
        } else {
            pw.source_of(cut)
        }
    }

    /// G(x, t) = ∫₀ᵗ g(x, s) ds where u₁(x) = `cut`.
    pub fn big_g_at(&self, cut: f64, t: f64) -> f64 {
        let pw = self.power();
        if t <= cut {
            pw.primitive_of(t)
        } else {
            pw.primitive_of(cut) + (t - cut) * pw.source_of(cut)
        }
    }

    /// ∂g/∂t; zero on the frozen branch.
    pub fn g_slope_at(&self, cut: f64, t: f64) -> f64 {
        if t <= cut {
            self.power().slope_of(t)
        } else {
            0.0
        }
    }

    /// g at quadrature point `qp`.
    pub fn g_eval(&self, qp: usize, t: f64) -> f64 {
        self.g_at(self.u1_quad[qp], t)
    }

    /// G at quadrature point `qp`.
    #[allow(non_snake_case)]
    pub fn G_eval(&self, qp: usize, t: f64) -> f64 {
        self.big_g_at(self.u1_quad[qp], t)
    }

    pub fn reaction(&self) -> TruncatedReaction<'_> {
        TruncatedReaction { tr: self }
    }

    /// J(u) = ∫Φ(|∇u|) - λ∫G(x,u) as an assembled functional.
    pub fn functional<'a>(&'a self, prm: &'a ProblemParams) -> Functional<'a, TruncatedReaction<'a>> {
        Functional::new(self.u1.mesh(), &prm.pair, prm.lambda, self.reaction())
    }
}

impl Reaction for TruncatedReaction<'_> {
    fn primitive(&self, qp: usize, t: f64) -> f64 {
        self.tr.G_eval(qp, t)
    }
    fn source(&self, qp: usize, t: f64) -> f64 {
        self.tr.g_eval(qp, t)
    }
    fn source_slope(&self, qp: usize, t: f64) -> f64 {
        self.tr.g_slope_at(self.tr.u1_quad[qp], t)
    }
}

/// J(u).
pub fn assemble_j(u: &Field, tr: &Truncation, prm: &ProblemParams) -> f64 {
    tr.functional(prm).energy(u.coeffs())
}

/// Nodal residual ⟨J'(u), φᵢ⟩, zero on boundary nodes.
pub fn assemble_gradient_j(u: &Field, tr: &Truncation, prm: &ProblemParams) -> Vec<f64> {
    tr.functional(prm).gradient(u.coeffs())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fem::{assemble_energy_i, assemble_gradient_i, Mesh};
    use crate::orlicz::{PhiSpec, YoungPair};

    fn setup() -> (Arc<Mesh>, ProblemParams, Truncation) {
        let mesh = Mesh::interval(16).unwrap();
        let pair = Arc::new(YoungPair::new(PhiSpec::power(3.0).unwrap()).unwrap());
        let prm = ProblemParams::new(40.0, 2.5, 1.5, pair).unwrap();
        let u1 = Field::from_fn(&mesh, |x| 3.0 * (std::f64::consts::PI * x[0]).sin());
        let tr = Truncation::new(u1, &prm);
        (mesh, prm, tr)
    }

    #[test]
    fn pieces() {
        let (_, _, tr) = setup();
        let cut = 2.0;
        assert_eq!(tr.g_at(cut, -1.0), 0.0);
        assert_eq!(tr.big_g_at(cut, -1.0), 0.0);
        let t: f64 = 1.3;
        assert!((tr.big_g_at(cut, t) - (t.powf(2.5) / 2.5 - t.powf(1.5) / 1.5)).abs() < 1e-14);
        let frozen = cut.powf(1.5) - cut.sqrt();
        let t = 3.5;
        let want = cut.powf(2.5) / 2.5 - cut.powf(1.5) / 1.5 + (t - cut) * frozen;
        assert!((tr.big_g_at(cut, t) - want).abs() < 1e-13);
        assert!((tr.g_at(cut, t) - frozen).abs() < 1e-14);
    }

    #[test]
    fn continuity_and_derivative() {
        let (_, _, tr) = setup();
        let cut = 1.7;
        for t0 in [0.0, cut] {
            let e = 1e-9;
            assert!((tr.g_at(cut, t0 - e) - tr.g_at(cut, t0 + e)).abs() < 1e-4);
            assert!((tr.big_g_at(cut, t0 - e) - tr.big_g_at(cut, t0 + e)).abs() < 1e-8);
        }
        for t in [0.3, 1.0, 1.69, 1.71, 2.5, 8.0] {
            let h = 1e-6;
            let fd = (tr.big_g_at(cut, t + h) - tr.big_g_at(cut, t - h)) / (2.0 * h);
            assert!((fd - tr.g_at(cut, t)).abs() < 1e-7, "t = {t}");
        }
    }

    #[test]
    fn j_matches_i_below_u1() {
        let (mesh, prm, tr) = setup();
        let u = Field::from_fn(&mesh, |x| 1.5 * (std::f64::consts::PI * x[0]).sin().powi(2));
        assert!((assemble_j(&u, &tr, &prm) - assemble_energy_i(&u, &prm)).abs() < 1e-10);
        let (gj, gi) = (assemble_gradient_j(&u, &tr, &prm), assemble_gradient_i(&u, &prm));
        for (a, b) in gj.iter().zip(&gi) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(assemble_j(&Field::zeros(&mesh), &tr, &prm), 0.0);
    }

    #[test]
    fn affine_branch_above_u1() {
        let (mesh, prm, tr) = setup();
        let u = Field::from_fn(&mesh, |x| 3.0 * (std::f64::consts::PI * x[0]).sin() + 1.0);
        // hand assembly of the constant source λ∫(u₁^{p-1}-u₁^{q-1})φᵢ
        let quad = tr.u1_at_quad();
        let mut src = vec![0.0; mesh.n_nodes()];
        for e in 0..mesh.n_elements() {
            let off = mesh.quad_offset(e);
            for (k, q) in mesh.quad_points(e).iter().enumerate() {
                let c = quad[off + k];
                let f = c.max(0.0).powf(1.5) - c.max(0.0).sqrt();
                for (&n, s) in mesh.element(e).iter().zip(q.shape) {
                    src[n] += prm.lambda * q.weight * f * s;
                }
            }
        }
        let modular_grad = Functional::new(&mesh, &prm.pair, 0.0, crate::fem::NoReaction).gradient(u.coeffs());
        let gj = assemble_gradient_j(&u, &tr, &prm);
        for i in mesh.interior_nodes() {
            assert!((gj[i] - (modular_grad[i] - src[i])).abs() < 1e-9 * (1.0 + src[i].abs()));
        }
    }
}
