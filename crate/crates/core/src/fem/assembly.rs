//! Energy, gradient and Hessian of
//!
//! ```text
//!   E(u) = ∫ Φ(|∇u|) dx - λ ∫ F(x, u) dx
//! ```
//!
//! for P1 fields. The modular term is integrated exactly (gradients are
//! element-constant); the reaction term uses the mesh quadrature, with the
//! positive part taken of the interpolant at each quadrature point, so the
//! assembled gradient is the exact derivative of the assembled energy.

use super::field::{gradients, quad_values};
use super::mesh::Mesh;
use crate::linalg::BandMatrix;
use crate::orlicz::YoungPair;

/// Cap on curvature coefficients that blow up at the origin (φ'(0) = ∞ for
/// sub-quadratic Φ, t^{q-2} for q < 2).
const CURVATURE_CAP: f64 = 1e12;
/// Floor on t inside t^{q-2}.
const SLOPE_FLOOR: f64 = 1e-10;

/// A nonlinearity F(x, t) sampled at quadrature points.
pub trait Reaction {
    /// F(x_k, t).
    fn primitive(&self, qp: usize, t: f64) -> f64;
    /// ∂F/∂t (x_k, t).
    fn source(&self, qp: usize, t: f64) -> f64;
    /// ∂²F/∂t² (x_k, t), finite (capped near singular points).
    fn source_slope(&self, qp: usize, t: f64) -> f64;
}

/// F(t) = t₊^p/p - t₊^q/q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerReaction {
    pub p: f64,
    pub q: f64,
}

impl PowerReaction {
    pub fn primitive_of(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            t.powf(self.p) / self.p - t.powf(self.q) / self.q
        }
    }

    pub fn source_of(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            t.powf(self.p - 1.0) - t.powf(self.q - 1.0)
        }
    }

    pub fn slope_of(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            let te = t.max(SLOPE_FLOOR);
            (self.p - 1.0) * te.powf(self.p - 2.0) - (self.q - 1.0) * te.powf(self.q - 2.0)
        }
    }
}

impl Reaction for PowerReaction {
    fn primitive(&self, _qp: usize, t: f64) -> f64 {
        self.primitive_of(t)
    }
    fn source(&self, _qp: usize, t: f64) -> f64 {
        self.source_of(t)
    }
    fn source_slope(&self, _qp: usize, t: f64) -> f64 {
        self.slope_of(t)
    }
}

/// Zero reaction: the energy reduces to the modular.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoReaction;

impl Reaction for NoReaction {
    fn primitive(&self, _: usize, _: f64) -> f64 {
        0.0
    }
    fn source(&self, _: usize, _: f64) -> f64 {
        0.0
    }
    fn source_slope(&self, _: usize, _: f64) -> f64 {
        0.0
    }
}

/// E(u) = ∫Φ(|∇u|) - λ∫F(x,u) on a mesh.
#[derive(Debug, Clone, Copy)]
pub struct Functional<'a, R> {
    pub mesh: &'a Mesh,
    pub pair: &'a YoungPair,
    pub lambda: f64,
    pub reaction: R,
}

impl<'a, R: Reaction> Functional<'a, R> {
    pub fn new(mesh: &'a Mesh, pair: &'a YoungPair, lambda: f64, reaction: R) -> Self {
        Self { mesh, pair, lambda, reaction }
    }

    /// ∫ Φ(|∇u|).
    pub fn modular(&self, c: &[f64]) -> f64 {
        gradients(self.mesh, c)
            .iter()
            .enumerate()
            .map(|(e, g)| self.mesh.element_measure(e) * self.pair.big_phi(g[0].hypot(g[1])))
            .sum()
    }

    /// ∫ F(x, u).
    pub fn reaction_integral(&self, c: &[f64]) -> f64 {
        let vals = quad_values(self.mesh, c);
        let mut acc = 0.0;
        for e in 0..self.mesh.n_elements() {
            let off = self.mesh.quad_offset(e);
            for (k, q) in self.mesh.quad_points(e).iter().enumerate() {
                acc += q.weight * self.reaction.primitive(off + k, vals[off + k]);
            }
        }
        acc
    }

    pub fn energy(&self, c: &[f64]) -> f64 {
        self.modular(c) - self.lambda * self.reaction_integral(c)
    }

    /// rᵢ = ⟨E'(u), φᵢ⟩ for every node; zero on boundary nodes.
    pub fn gradient(&self, c: &[f64]) -> Vec<f64> {
        let mesh = self.mesh;
        let mut r = vec![0.0; mesh.n_nodes()];
        let grads = gradients(mesh, c);
        let vals = quad_values(mesh, c);
        for e in 0..mesh.n_elements() {
            let el = mesh.element(e);
            let flux = self.pair.spec().flux(grads[e]);
            let meas = mesh.element_measure(e);
            for (&n, dg) in el.iter().zip(mesh.shape_gradients(e)) {
                r[n] += meas * (flux[0] * dg[0] + flux[1] * dg[1]);
            }
            let off = mesh.quad_offset(e);
            for (k, q) in mesh.quad_points(e).iter().enumerate() {
                let f = self.lambda * q.weight * self.reaction.source(off + k, vals[off + k]);
                if f != 0.0 {
                    for (&n, s) in el.iter().zip(q.shape) {
                        r[n] -= f * s;
                    }
                }
            }
        }
        for (i, ri) in r.iter_mut().enumerate() {
            if mesh.is_boundary(i) {
                *ri = 0.0;
            }
        }
        r
    }

    /// Hessian of the energy, with boundary rows and columns replaced by the
    /// identity. Singular curvature coefficients are capped.
    pub fn hessian(&self, c: &[f64]) -> BandMatrix {
        let mesh = self.mesh;
        let spec = self.pair.spec();
        let mut h = BandMatrix::zeros(mesh.n_nodes(), mesh.bandwidth());
        let grads = gradients(mesh, c);
        let vals = quad_values(mesh, c);
        for e in 0..mesh.n_elements() {
            let el = mesh.element(e);
            let dg = mesh.shape_gradients(e);
            let meas = mesh.element_measure(e);
            let g = grads[e];
            let m = g[0].hypot(g[1]);
            // T = a I + (φ' - a) n nᵀ
            let (a, dphi) = if m == 0.0 {
                let a0 = spec.a_at_zero().min(CURVATURE_CAP);
                (a0, spec.dphi(0.0).min(CURVATURE_CAP))
            } else {
                (spec.a(m).min(CURVATURE_CAP), spec.dphi(m).min(CURVATURE_CAP))
            };
            let nrm = if m == 0.0 { [0.0, 0.0] } else { [g[0] / m, g[1] / m] };
            let t = if mesh.dim() == 1 {
                [[dphi, 0.0], [0.0, 0.0]]
            } else {
                let d = dphi - a;
                [
                    [a + d * nrm[0] * nrm[0], d * nrm[0] * nrm[1]],
                    [d * nrm[1] * nrm[0], a + d * nrm[1] * nrm[1]],
                ]
            };
            for (i, &ni) in el.iter().enumerate() {
                let ti = [t[0][0] * dg[i][0] + t[0][1] * dg[i][1], t[1][0] * dg[i][0] + t[1][1] * dg[i][1]];
                for (j, &nj) in el.iter().enumerate() {
                    h.add(ni, nj, meas * (ti[0] * dg[j][0] + ti[1] * dg[j][1]));
                }
            }
            let off = mesh.quad_offset(e);
            for (k, q) in mesh.quad_points(e).iter().enumerate() {
                let s = self.reaction.source_slope(off + k, vals[off + k]);
                let w = -self.lambda * q.weight * s.clamp(-CURVATURE_CAP, CURVATURE_CAP);
                if w != 0.0 {
                    for (i, &ni) in el.iter().enumerate() {
                        for (j, &nj) in el.iter().enumerate() {
                            h.add(ni, nj, w * q.shape[i] * q.shape[j]);
                        }
                    }
                }
            }
        }
        for i in mesh.boundary_nodes() {
            h.pin(i);
        }
        h
    }
}

/// P1 stiffness matrix ∫∇φᵢ·∇φⱼ with pinned boundary rows.
pub fn stiffness_matrix(mesh: &Mesh) -> BandMatrix {
    let mut k = BandMatrix::zeros(mesh.n_nodes(), mesh.bandwidth());
    for e in 0..mesh.n_elements() {
        let el = mesh.element(e);
        let dg = mesh.shape_gradients(e);
        let meas = mesh.element_measure(e);
        for (i, &ni) in el.iter().enumerate() {
            for (j, &nj) in el.iter().enumerate() {
                k.add(ni, nj, meas * (dg[i][0] * dg[j][0] + dg[i][1] * dg[j][1]));
            }
        }
    }
    for i in mesh.boundary_nodes() {
        k.pin(i);
    }
    k
}

/// max |rᵢ| over interior nodes.
pub fn sup_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::PhiSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hessian_matches_gradient_differences() {
        let mesh = crate::fem::Mesh::rectangle(4, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for phi in [
            PhiSpec::power(3.0).unwrap(),
            PhiSpec::log_power(2.0, 1.0).unwrap(),
            PhiSpec::power_over_log(3.0).unwrap(),
        ] {
            let pair = YoungPair::new(phi).unwrap();
            let f = Functional::new(&mesh, &pair, 2.0, PowerReaction { p: 1.8, q: 1.3 });
            let c: Vec<f64> = (0..mesh.n_nodes())
                .map(|i| if mesh.is_boundary(i) { 0.0 } else { rng.gen_range(0.5..2.0) })
                .collect();
            let v: Vec<f64> = (0..mesh.n_nodes())
                .map(|i| if mesh.is_boundary(i) { 0.0 } else { rng.gen_range(-1.0..1.0) })
                .collect();
            let h = 1e-6;
            let plus: Vec<f64> = c.iter().zip(&v).map(|(a, b)| a + h * b).collect();
            let minus: Vec<f64> = c.iter().zip(&v).map(|(a, b)| a - h * b).collect();
            let (gp, gm) = (f.gradient(&plus), f.gradient(&minus));
            let hv = f.hessian(&c).matvec(&v);
            for i in mesh.interior_nodes() {
                let fd = (gp[i] - gm[i]) / (2.0 * h);
                assert!((fd - hv[i]).abs() <= 1e-5 * (1.0 + hv[i].abs()), "{phi:?} node {i}: {fd} vs {}", hv[i]);
            }
        }
    }

    #[test]
    fn stiffness_is_spd_laplacian_1d() {
        let mesh = crate::fem::Mesh::interval(4).unwrap();
        let k = stiffness_matrix(&mesh);
        assert_eq!(k.get(1, 1), 8.0);
        assert_eq!(k.get(1, 2), -4.0);
        assert!(k.cholesky().is_some());
    }
}
