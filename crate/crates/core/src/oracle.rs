//! Brute-force ground truth for small primes.
//!
//! Nothing here touches the fast trace path; only [`crate::modp`] is used.

use crate::hasse_witt::HasseWittMatrix;
use crate::modp::{PrimeField, Residue};

/// Largest prime (exclusive) accepted by [`naive_count`].
pub const COUNT_LIMIT: u64 = 1 << 24;
/// Largest prime (exclusive) accepted by [`naive_hasse_witt`].
pub const HASSE_WITT_LIMIT: u64 = 1 << 14;

/// `y^2 = f(x)` over F_p, coefficients stored low degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineModel {
    coeffs: Vec<Residue>,
}

impl AffineModel {
    /// Panics unless the leading coefficient is nonzero and the degree is 7 or 8.
    pub fn new(coeffs: Vec<Residue>) -> Self {
        assert!(
            matches!(coeffs.len(), 8 | 9) && *coeffs.last().unwrap() != 0,
            "model must have degree 7 or 8 with nonzero leading coefficient"
        );
        Self { coeffs }
    }

    /// `x^8 + c`
    pub fn c1(c: Residue, field: &PrimeField) -> Self {
        let mut coeffs = vec![0; 9];
        coeffs[0] = field.reduce(c);
        coeffs[8] = 1;
        Self::new(coeffs)
    }

    /// `x^7 - c*x`
    pub fn c2(c: Residue, field: &PrimeField) -> Self {
        let mut coeffs = vec![0; 8];
        coeffs[1] = field.neg(field.reduce(c));
        coeffs[7] = 1;
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Residue] {
        &self.coeffs
    }

    pub fn leading(&self) -> Residue {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: Residue, field: &PrimeField) -> Residue {
        self.coeffs.iter().rev().fold(0, |acc, &c| field.add(field.mul(acc, x), c))
    }
}

fn quadratic_character(p: u64) -> Vec<i8> {
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for x in 1..=p / 2 {
        chi[(x * x % p) as usize] = 1;
    }
    chi
}

/// `#C(F_p)` on the smooth model: affine points plus the points at infinity
/// (one for odd degree, `1 + (lead/p)` for even degree).
pub fn naive_count(f: &AffineModel, field: &PrimeField) -> u64 {
    let p = field.p();
    assert!(p < COUNT_LIMIT, "naive_count is limited to p < 2^24");
    let chi = quadratic_character(p);
    let affine: i64 = (0..p).map(|x| 1 + chi[f.eval(x, field) as usize] as i64).sum();
    let infinity = if f.degree() % 2 == 1 { 1 } else { 1 + chi[f.leading() as usize] as i64 };
    (affine + infinity) as u64
}

/// `t_p = p + 1 - #C(F_p)` from [`naive_count`].
pub fn naive_trace(f: &AffineModel, field: &PrimeField) -> i64 {
    field.p() as i64 + 1 - naive_count(f, field) as i64
}

/// `binom(n, r) mod p` as a product of `r` fractions.
pub fn naive_binom_mod(n: u64, r: u64, field: &PrimeField) -> Residue {
    assert!(r <= n && n < field.p(), "need 0 <= r <= n < p");
    let (num, den) = (1..=r)
        .fold((1, 1), |(num, den), k| (field.mul(num, field.reduce(n - r + k)), field.mul(den, field.reduce(k))));
    field.mul(num, field.inv(den).expect("k < p is invertible"))
}

/// `[f^n_{ip-j}]` for `1 <= i, j <= 3`, by expanding `f(x)^((p-1)/2)` one
/// factor at a time. Terms above degree `3p` are never needed and are dropped.
pub fn naive_hasse_witt(f: &AffineModel, field: &PrimeField) -> HasseWittMatrix {
    let p = field.p();
    assert!(p < HASSE_WITT_LIMIT, "naive_hasse_witt is limited to p < 2^14");
    let cap = 3 * p as usize;
    let terms: Vec<(usize, Residue)> =
        f.coeffs().iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| (k, c)).collect();

    let mut power = vec![0u64; cap];
    power[0] = 1;
    let mut deg = 0usize;
    for _ in 0..field.n() {
        let new_deg = (deg + f.degree()).min(cap - 1);
        let mut next = vec![0u64; cap];
        for (k, &a) in power[..=deg].iter().enumerate() {
            if a == 0 {
                continue;
            }
            for &(j, c) in &terms {
                if k + j < cap {
                    next[k + j] = field.add(next[k + j], field.mul(a, c));
                }
            }
        }
        power = next;
        deg = new_deg;
    }

    let mut w = [[0; 3]; 3];
    for (i, row) in w.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = power[(i + 1) * p as usize - (j + 1)];
        }
    }
    HasseWittMatrix(w)
}
