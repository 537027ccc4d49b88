//! Hasse-Witt matrices and Frobenius traces of `y^2 = x^8 + c` and
//! `y^2 = x^7 - c*x`.
//!
//! For `f = a*x^d + b*x^e` the only nonzero coefficients of `f^n`,
//! `n = (p-1)/2`, are `binom(n, r) a^r b^(n-r)` at degree `e*n + (d-e)*r`.
//! The three binomials needed, `binom(n, n/2)`, `binom(n, n/4)` and
//! `binom(n, n/6)`, are read off a representation `p = x^2 + d*y^2`:
//!
//! | p          | d | binomial           | value mod p               |
//! |------------|---|--------------------|---------------------------|
//! | `4m + 1`   | 1 | `binom(2m, m)`     | `2 (-1)^(m+1) x`          |
//! | `8m + 1`   | 2 | `binom(4m, m)`     | `2 (-1)^(m+1) x`          |
//! | `12m + 1`  | 1 | `binom(6m, m)`     | `2 (-1)^(m+eps) x`        |
//!
//! where `x = -(2/p) mod 4` and `eps = 0` iff `3 | x`. Traces are lifted from
//! their residue mod p using the Weil bound `|t_p| <= 6 sqrt(p)`, which pins
//! the integer once `p >= 145`; smaller primes are counted directly.

use thiserror::Error;

use crate::curve::{CurveFamily, Family};
use crate::forms::{solve_form_normalized, FormError};
use crate::modp::{pow_mod, PrimeField, Residue, SqrtStrategy};
use crate::oracle::{naive_trace, AffineModel};

/// Primes below this are routed to the point-counting oracle.
pub const LIFT_THRESHOLD: u64 = 149;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HwError {
    #[error("p = {p} is not congruent to 1 mod {modulus}")]
    WrongResidueClass { p: u64, modulus: u64 },
    #[error("no fast Hasse-Witt matrix for {family} at p = {p} (p = {class} mod {modulus})")]
    UnsupportedResidueClass { family: Family, p: u64, class: u64, modulus: u64 },
    #[error("p = {p} is a bad prime for this curve")]
    BadPrime { p: u64 },
    #[error(transparent)]
    Form(#[from] FormError),
}

/// A 3x3 matrix over F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HasseWittMatrix(pub [[Residue; 3]; 3]);

impl HasseWittMatrix {
    pub fn zero() -> Self {
        Self([[0; 3]; 3])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|&w| w == 0)
    }

    pub fn trace(&self, field: &PrimeField) -> Residue {
        (0..3).fold(0, |acc, i| field.add(acc, self.0[i][i]))
    }

    pub fn nonzero_pattern(&self) -> [[bool; 3]; 3] {
        self.0.map(|row| row.map(|w| w != 0))
    }

    /// Coefficients `[c0, c1, c2, c3]` of `det(W - lambda I) = sum c_k lambda^k`.
    pub fn charpoly(&self, field: &PrimeField) -> [Residue; 4] {
        let w = &self.0;
        let m = |a, b| field.mul(a, b);
        let minor = |i: usize, j: usize, k: usize, l: usize| field.sub(m(w[i][k], w[j][l]), m(w[i][l], w[j][k]));
        let det = field.add(
            field.sub(m(w[0][0], minor(1, 2, 1, 2)), m(w[0][1], minor(1, 2, 0, 2))),
            m(w[0][2], minor(1, 2, 0, 1)),
        );
        let principal = field.add(field.add(minor(0, 1, 0, 1), minor(0, 2, 0, 2)), minor(1, 2, 1, 2));
        // -l^3 + tr l^2 - e2 l + det
        [det, field.neg(principal), self.trace(field), field.neg(1)]
    }
}

/// The exact Frobenius trace `t_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceValue {
    pub t: i64,
}

impl TraceValue {
    /// Normalized `a1 = -t / sqrt(p)`.
    pub fn a1(&self, p: u64) -> f64 {
        (-self.t) as f64 / (p as f64).sqrt()
    }
}

/// `floor(6 sqrt(p))`.
pub fn weil_bound(p: u64) -> i64 {
    (36 * p as u128).isqrt() as i64
}

/// The unique `t` with `t = residue mod p` and `|t| <= floor(6 sqrt(p))`.
pub fn lift_trace(residue: Residue, field: &PrimeField) -> i64 {
    let p = field.p();
    let bound = weil_bound(p);
    debug_assert!(p > 2 * bound as u64, "lift is ambiguous for p = {p}");
    ((residue + bound as u64) % p) as i64 - bound
}

fn require_class(field: &PrimeField, modulus: u64) -> Result<u64, HwError> {
    let p = field.p();
    if p % modulus != 1 {
        return Err(HwError::WrongResidueClass { p, modulus });
    }
    Ok((p - 1) / modulus)
}

fn lemma_value(x: i64, odd_sign: bool, field: &PrimeField) -> Residue {
    let v = 2 * x;
    field.reduce_signed(if odd_sign { -v } else { v })
}

/// `binom((p-1)/2, (p-1)/4) mod p` for `p = 1 mod 4`.
pub fn binom_half(field: &PrimeField, sqrt: SqrtStrategy) -> Result<Residue, HwError> {
    let m = require_class(field, 4)?;
    let sol = solve_form_normalized(1, field, sqrt)?;
    Ok(lemma_value(sol.x, m % 2 == 0, field))
}

/// `binom((p-1)/2, (p-1)/8) mod p` for `p = 1 mod 8`.
pub fn binom_quarter(field: &PrimeField, sqrt: SqrtStrategy) -> Result<Residue, HwError> {
    let m = require_class(field, 8)?;
    let sol = solve_form_normalized(2, field, sqrt)?;
    Ok(lemma_value(sol.x, m % 2 == 0, field))
}

/// `binom((p-1)/2, (p-1)/12) mod p` for `p = 1 mod 12`.
pub fn binom_sixth(field: &PrimeField, sqrt: SqrtStrategy) -> Result<Residue, HwError> {
    let m = require_class(field, 12)?;
    let sol = solve_form_normalized(1, field, sqrt)?;
    let eps = u64::from(sol.x % 3 != 0);
    Ok(lemma_value(sol.x, (m + eps) % 2 == 1, field))
}

/// `r_ij = ((2i - e) n + i - j) / (d - e)` when integral.
///
/// `i, j` are 1-based rows and columns; `(d, e)` is `(8, 0)` or `(7, 1)`.
pub fn hw_entry_index(i: u64, j: u64, d: u64, e: u64, field: &PrimeField) -> Option<u64> {
    assert!((1..=3).contains(&i) && (1..=3).contains(&j), "indices are 1..=3");
    assert!(matches!((d, e), (8, 0) | (7, 1)), "(d, e) must be (8, 0) or (7, 1)");
    let numerator = ((2 * i - e) * field.n() + i).checked_sub(j)?;
    (numerator % (d - e) == 0).then(|| numerator / (d - e))
}

/// The full Hasse-Witt matrix from the binomial congruences.
///
/// Unavailable for C1 at `p = 3 mod 8` and C2 at `p = 5 mod 12`, where the
/// off-diagonal binomials have no fast formula.
pub fn hw_matrix(curve: &CurveFamily, field: &PrimeField, sqrt: SqrtStrategy) -> Result<HasseWittMatrix, HwError> {
    let p = field.p();
    if !curve.is_good_prime(p) {
        return Err(HwError::BadPrime { p });
    }
    let c = curve.c.reduce(field).ok_or(HwError::BadPrime { p })?;
    let n = field.n();
    let mut w = HasseWittMatrix::zero();
    let unsupported = |class, modulus| HwError::UnsupportedResidueClass { family: curve.family, p, class, modulus };
    match curve.family {
        Family::C1 => match p % 8 {
            1 => {
                let b2 = binom_half(field, sqrt)?;
                let b4 = binom_quarter(field, sqrt)?;
                w.0[0][0] = field.mul(b4, pow_mod(c, 3 * n / 4, field));
                w.0[1][1] = field.mul(b2, pow_mod(c, n / 2, field));
                w.0[2][2] = field.mul(b4, pow_mod(c, n / 4, field));
            }
            5 => w.0[1][1] = field.mul(binom_half(field, sqrt)?, pow_mod(c, n / 2, field)),
            7 => {}
            class => return Err(unsupported(class, 8)),
        },
        Family::C2 => {
            let b = field.neg(c);
            match p % 12 {
                1 => {
                    let b2 = binom_half(field, sqrt)?;
                    let b6 = binom_sixth(field, sqrt)?;
                    w.0[0][0] = field.mul(b6, pow_mod(b, 5 * n / 6, field));
                    w.0[1][1] = field.mul(b2, pow_mod(b, n / 2, field));
                    w.0[2][2] = field.mul(b6, pow_mod(b, n / 6, field));
                }
                7 | 11 => {}
                class => return Err(unsupported(class, 12)),
            }
        }
    }
    Ok(w)
}

/// `t_p mod p` for `y^2 = x^8 + c`.
fn trace_residue_c1(c: Residue, field: &PrimeField, sqrt: SqrtStrategy) -> Result<Residue, HwError> {
    let n = field.n();
    Ok(match field.p() % 8 {
        1 => {
            let b2 = binom_half(field, sqrt)?;
            let b4 = binom_quarter(field, sqrt)?;
            let quarter = field.add(pow_mod(c, n / 4, field), pow_mod(c, 3 * n / 4, field));
            field.add(field.mul(b2, pow_mod(c, n / 2, field)), field.mul(b4, quarter))
        }
        5 => field.mul(binom_half(field, sqrt)?, pow_mod(c, n / 2, field)),
        _ => 0,
    })
}

/// `t_p mod p` for `y^2 = x^7 - c*x`.
fn trace_residue_c2(c: Residue, field: &PrimeField, sqrt: SqrtStrategy) -> Result<Residue, HwError> {
    let n = field.n();
    let b = field.neg(c);
    Ok(match field.p() % 12 {
        1 => {
            let b2 = binom_half(field, sqrt)?;
            let b6 = binom_sixth(field, sqrt)?;
            let sixth = field.add(pow_mod(b, n / 6, field), pow_mod(b, 5 * n / 6, field));
            field.add(field.mul(b2, pow_mod(b, n / 2, field)), field.mul(b6, sixth))
        }
        5 => field.mul(binom_half(field, sqrt)?, pow_mod(b, n / 2, field)),
        _ => 0,
    })
}

/// Exact `t_p` of `y^2 = x^8 + c` where `c` is the image of the parameter in F_p.
pub fn trace_c1(c: Residue, field: &PrimeField, sqrt: SqrtStrategy) -> Result<TraceValue, HwError> {
    let p = field.p();
    let c = field.reduce(c);
    if c == 0 {
        return Err(HwError::BadPrime { p });
    }
    if p < LIFT_THRESHOLD {
        return Ok(TraceValue { t: naive_trace(&AffineModel::c1(c, field), field) });
    }
    let residue = trace_residue_c1(c, field, sqrt)?;
    Ok(TraceValue { t: lift_trace(residue, field) })
}

/// Exact `t_p` of `y^2 = x^7 - c*x`.
pub fn trace_c2(c: Residue, field: &PrimeField, sqrt: SqrtStrategy) -> Result<TraceValue, HwError> {
    let p = field.p();
    let c = field.reduce(c);
    if c == 0 || p == 3 {
        return Err(HwError::BadPrime { p });
    }
    if p < LIFT_THRESHOLD {
        return Ok(TraceValue { t: naive_trace(&AffineModel::c2(c, field), field) });
    }
    let residue = trace_residue_c2(c, field, sqrt)?;
    Ok(TraceValue { t: lift_trace(residue, field) })
}

/// `t_p mod p` from the binomial formulas alone, valid at every good prime.
pub fn trace_residue(curve: &CurveFamily, field: &PrimeField, sqrt: SqrtStrategy) -> Result<Residue, HwError> {
    let p = field.p();
    if !curve.is_good_prime(p) {
        return Err(HwError::BadPrime { p });
    }
    let c = curve.c.reduce(field).ok_or(HwError::BadPrime { p })?;
    match curve.family {
        Family::C1 => trace_residue_c1(c, field, sqrt),
        Family::C2 => trace_residue_c2(c, field, sqrt),
    }
}

/// Exact `t_p` for any member of either family at a good prime.
pub fn trace(curve: &CurveFamily, field: &PrimeField, sqrt: SqrtStrategy) -> Result<TraceValue, HwError> {
    let p = field.p();
    if !curve.is_good_prime(p) {
        return Err(HwError::BadPrime { p });
    }
    let c = curve.c.reduce(field).ok_or(HwError::BadPrime { p })?;
    match curve.family {
        Family::C1 => trace_c1(c, field, sqrt),
        Family::C2 => trace_c2(c, field, sqrt),
    }
}
