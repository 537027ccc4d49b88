//! Small dense complex matrices (at most 6x6), stored inline.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

pub const MAX_DIM: usize = 6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat {
    n: usize,
    a: [[Complex64; MAX_DIM]; MAX_DIM],
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_DIM, "dimension {n} exceeds {MAX_DIM}");
        Self { n, a: [[ZERO; MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i][i] = ONE;
        }
        m
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m.a[i][i] = d;
        }
        m
    }

    /// Panics unless the rows are square.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            m.a[i][..n].copy_from_slice(row);
        }
        m
    }

    /// Builds a matrix from a square grid of equally sized square blocks;
    /// `None` stands for a zero block.
    pub fn from_blocks(blocks: &[Vec<Option<CMat>>]) -> Self {
        let k = blocks.len();
        let b = blocks.iter().flatten().flatten().map(|m| m.n).next().expect("at least one nonzero block");
        let mut m = Self::zeros(k * b);
        for (bi, row) in blocks.iter().enumerate() {
            assert_eq!(row.len(), k, "block grid must be square");
            for (bj, block) in row.iter().enumerate() {
                if let Some(block) = block {
                    assert_eq!(block.n, b, "blocks must share a size");
                    for i in 0..b {
                        for j in 0..b {
                            m.a[bi * b + i][bj * b + j] = block.a[i][j];
                        }
                    }
                }
            }
        }
        m
    }

    pub fn block_diag(blocks: &[CMat]) -> Self {
        let k = blocks.len();
        let grid: Vec<Vec<Option<CMat>>> =
            (0..k).map(|i| (0..k).map(|j| (i == j).then_some(blocks[i])).collect()).collect();
        Self::from_blocks(&grid)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[i][j] *= s;
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[i][j] += other.a[i][j];
            }
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[j][i] = self.a[i][j];
            }
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[j][i] = self.a[i][j].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                m.a[i][j] = self.a[i][j].conj();
            }
        }
        m
    }

    /// Multiplies column `j` by `d[j]`, i.e. `self * diag(d)`.
    pub fn mul_diag(&self, d: &[Complex64]) -> Self {
        assert_eq!(d.len(), self.n);
        let mut m = *self;
        for i in 0..self.n {
            for (j, dj) in d.iter().enumerate() {
                m.a[i][j] *= dj;
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.a[i][i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                best = best.max(self.a[i][j].norm());
            }
        }
        best
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (*self * self.adjoint()).max_abs_diff(&Self::identity(self.n)) < tol
    }

    /// `M^T H M = H`.
    pub fn preserves_form(&self, h: &Self, tol: f64) -> bool {
        (self.transpose() * *h * *self).max_abs_diff(h) < tol
    }

    /// `[e1, e2, e3]` where `det(I - M T) = 1 - e1 T + e2 T^2 - e3 T^3 + ...`,
    /// from power sums by the Faddeev-LeVerrier (Newton) recurrence.
    pub fn elementary_123(&self) -> [Complex64; 3] {
        let n = self.n;
        let m2 = *self * *self;
        let p1 = self.trace();
        let p2 = m2.trace();
        let mut p3 = ZERO;
        for i in 0..n {
            for k in 0..n {
                p3 += m2.a[i][k] * self.a[k][i];
            }
        }
        let e1 = p1;
        let e2 = (e1 * p1 - p2) / 2.0;
        let e3 = (e2 * p1 - e1 * p2 + p3) / 3.0;
        [e1, e2, e3]
    }

    /// `exp(self)` by scaling and squaring a Taylor series.
    pub fn exp(&self) -> Self {
        let norm = self.max_abs() * self.n as f64;
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let x = self.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));
        let mut term = Self::identity(self.n);
        let mut sum = term;
        for k in 1..=20 {
            term = (term * x).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.n && j < self.n);
        &self.a[i][j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.n && j < self.n);
        &mut self.a[i][j]
    }
}

impl Mul for CMat {
    type Output = CMat;

    fn mul(self, rhs: CMat) -> CMat {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.a[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.a[i][j] += a * rhs.a[k][j];
                }
            }
        }
        m
    }
}
