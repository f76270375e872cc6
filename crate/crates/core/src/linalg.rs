//! Banded matrices with Cholesky (SPD test included) and pivoted LU.
//!
//! P1 matrices on the meshes of this crate have half-bandwidth 1 in 1D and
//! nx + 2 in 2D, so banded storage is compact and factorizations are linear
//! in the number of nodes.

/// Square matrix with `bw` sub- and super-diagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    // row-major, row i holds columns i-bw ..= i+bw
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self { n, bw, data: vec![0.0; n * (2 * bw + 1)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.bw, "({i},{j}) outside band {}", self.bw);
        i * (2 * self.bw + 1) + (j + self.bw - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > self.bw {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Replaces row and column `i` by the identity row/column.
    pub fn pin(&mut self, i: usize) {
        let lo = i.saturating_sub(self.bw);
        let hi = (i + self.bw).min(self.n - 1);
        for j in lo..=hi {
            self.set(i, j, 0.0);
            self.set(j, i, 0.0);
        }
        self.set(i, i, 1.0);
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bw);
                let hi = (i + self.bw).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Cholesky factorization of the (assumed symmetric) matrix. Returns
    /// `None` when a pivot is not positive, i.e. the matrix is not SPD up to
    /// rounding.
    pub fn cholesky(&self) -> Option<BandCholesky> {
        let n = self.n;
        let bw = self.bw;
        // lower band: l[i][k] for column j = i - bw + k
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        let at = |i: usize, j: usize| i * w + (j + bw - i);
        let scale = self.diag().iter().fold(0.0f64, |m, d| m.max(d.abs())).max(f64::MIN_POSITIVE);
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = self.get(i, j);
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= l[at(i, k)] * l[at(j, k)];
                }
                if i == j {
                    if !(s > 1e-14 * scale) {
                        return None;
                    }
                    l[at(i, i)] = s.sqrt();
                } else {
                    l[at(i, j)] = s / l[at(j, j)];
                }
            }
        }
        Some(BandCholesky { n, bw, l })
    }

    /// LU factorization with partial pivoting. `None` if singular.
    ///
    /// Interchanges are applied column by column as in LAPACK `gbtf2`, so the
    /// multipliers of column k stay attached to step k.
    pub fn lu(&self) -> Option<BandLu> {
        let n = self.n;
        let kl = self.bw;
        let ku = 2 * self.bw; // fill from row swaps
        let width = kl + ku + 1;
        // row i covers columns i-kl ..= i+ku
        let mut a = vec![0.0; n * width];
        let pos = |i: usize, j: usize| i * width + (j + kl - i);
        for i in 0..n {
            let lo = i.saturating_sub(self.bw);
            let hi = (i + self.bw).min(n - 1);
            for j in lo..=hi {
                a[pos(i, j)] = self.get(i, j);
            }
        }
        let mut pivots = vec![0usize; n];
        let mut mult = vec![0.0; n * (kl + 1)];
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a[pos(k, k)].abs();
            for r in k + 1..=last {
                let v = a[pos(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= 1e-15 * scale {
                return None;
            }
            pivots[k] = p;
            let cmax = (k + ku).min(n - 1);
            if p != k {
                for j in k..=cmax {
                    let (x, y) = (pos(k, j), pos(p, j));
                    a.swap(x, y);
                }
            }
            let piv = a[pos(k, k)];
            for r in k + 1..=last {
                let f = a[pos(r, k)] / piv;
                mult[k * (kl + 1) + (r - k)] = f;
                if f == 0.0 {
                    continue;
                }
                a[pos(r, k)] = 0.0;
                for j in k + 1..=cmax {
                    let v = a[pos(k, j)];
                    if v != 0.0 {
                        a[pos(r, j)] -= f * v;
                    }
                }
            }
        }
        Some(BandLu { n, kl, ku, u: a, mult, pivots })
    }
}

#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let at = |i: usize, j: usize| i * w + (j + bw - i);
        let mut y = b.to_vec();
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            let mut s = y[i];
            for j in j0..i {
                s -= self.l[at(i, j)] * y[j];
            }
            y[i] = s / self.l[at(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..=(i + bw).min(n - 1) {
                s -= self.l[at(j, i)] * y[j];
            }
            y[i] = s / self.l[at(i, i)];
        }
        y
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    u: Vec<f64>,
    mult: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let width = kl + ku + 1;
        let pos = |i: usize, j: usize| i * width + (j + kl - i);
        let mut y = b.to_vec();
        for k in 0..n {
            y.swap(k, self.pivots[k]);
            let yk = y[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                y[r] -= self.mult[k * (kl + 1) + (r - k)] * yk;
            }
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..=(i + ku).min(n - 1) {
                s -= self.u[pos(i, j)] * y[j];
            }
            y[i] = s / self.u[pos(i, i)];
        }
        y
    }
}
