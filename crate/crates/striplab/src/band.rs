//! Symmetric banded storage and Cholesky factorization.
//!
//! The z-fastest index layout keeps every operator in this crate inside a
//! half bandwidth of n_z + 2, so a direct factorization costs O(n * bw^2)
//! and each solve O(n * bw) — robust on strongly graded grids where the
//! pencil condition number reaches 1e8 and iterative inner solves stall.

use crate::error::{Error, Result};
use crate::operator::SparseSymOp;

/// Lower-triangle band storage: entry (i, j) with 0 <= i - j <= bw lives at
/// data[j * (bw + 1) + (i - j)].
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    /// Build coeff * A + diag_coeff * diag(d) in band form.
    pub fn combine(a: &SparseSymOp, coeff: f64, diag: &[f64], diag_coeff: f64) -> BandMatrix {
        let n = a.dim();
        assert_eq!(diag.len(), n);
        let bw = a.bandwidth();
        let mut data = vec![0.0; n * (bw + 1)];
        a.for_each(|i, j, v| {
            if i >= j {
                data[j * (bw + 1) + (i - j)] += coeff * v;
            }
        });
        if diag_coeff != 0.0 {
            for (j, dj) in diag.iter().enumerate() {
                data[j * (bw + 1)] += diag_coeff * dj;
            }
        }
        BandMatrix { n, bw, data }
    }

    /// A - shift * diag(b); the standard input to shift-invert iterations.
    pub fn shifted(a: &SparseSymOp, shift: f64, b_diag: &[f64]) -> BandMatrix {
        BandMatrix::combine(a, 1.0, b_diag, -shift)
    }

    /// In-place Cholesky A = L L^T. Fails with the offending pivot when the
    /// matrix is not positive definite.
    pub fn cholesky(mut self) -> Result<BandCholesky> {
        let bw = self.bw;
        let stride = bw + 1;
        for j in 0..self.n {
            let mut d = self.data[j * stride];
            for k in j.saturating_sub(bw)..j {
                let l = self.data[k * stride + (j - k)];
                d -= l * l;
            }
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: d, index: j });
            }
            let dj = d.sqrt();
            self.data[j * stride] = dj;
            let imax = (j + bw).min(self.n - 1);
            for i in j + 1..=imax {
                let mut s = self.data[j * stride + (i - j)];
                let k0 = i.saturating_sub(bw).max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= self.data[k * stride + (i - k)] * self.data[k * stride + (j - k)];
                }
                self.data[j * stride + (i - j)] = s / dj;
            }
        }
        Ok(BandCholesky { n: self.n, bw, data: self.data })
    }
}

/// Factored form; solves by forward/back substitution.
pub struct BandCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        let stride = self.bw + 1;
        // L y = b
        for i in 0..self.n {
            let mut s = x[i];
            for k in i.saturating_sub(self.bw)..i {
                s -= self.data[k * stride + (i - k)] * x[k];
            }
            x[i] = s / self.data[i * stride];
        }
        // L^T x = y
        for i in (0..self.n).rev() {
            let mut s = x[i];
            let kmax = (i + self.bw).min(self.n - 1);
            for k in i + 1..=kmax {
                s -= self.data[i * stride + (k - i)] * x[k];
            }
            x[i] = s / self.data[i * stride];
        }
    }
}
