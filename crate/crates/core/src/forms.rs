//! Representations `m = x^2 + d*y^2` via Cornacchia's algorithm.

use thiserror::Error;

use crate::modp::{legendre, PrimeField, SqrtStrategy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("no solution to x^2 + {d}y^2 = {m}")]
    NoSolution { d: u64, m: u64 },
    #[error("invalid Cornacchia input d={d}, m={m}, delta={delta}: {reason}")]
    Precondition { d: u64, m: u64, delta: u64, reason: &'static str },
}

/// A solution of `x^2 + d*y^2 = m`. After normalization `x` may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormSolution {
    pub x: i64,
    pub y: u64,
    pub d: u64,
}

impl FormSolution {
    /// `x^2 + d*y^2`, computed exactly.
    pub fn value(&self) -> u128 {
        let x = self.x.unsigned_abs() as u128;
        x * x + self.d as u128 * (self.y as u128) * (self.y as u128)
    }
}

/// Floor of the square root of `n`.
pub fn isqrt(n: u64) -> u64 {
    n.isqrt()
}

/// Returns `Some(r)` when `n = r^2`.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// Cornacchia's algorithm for `x^2 + d*y^2 = m`, given `delta^2 = -d mod m`.
///
/// `delta` is first folded into `[0, m/2]`. Returns `x > 0`, `y >= 0`.
pub fn cornacchia(d: u64, m: u64, delta: u64) -> Result<FormSolution, FormError> {
    let bad = |reason| FormError::Precondition { d, m, delta, reason };
    if d == 0 || m <= d {
        return Err(bad("need 1 <= d < m"));
    }
    let delta = delta % m;
    let check = ((delta as u128 * delta as u128) + d as u128) % m as u128;
    if check != 0 {
        return Err(bad("delta^2 is not congruent to -d mod m"));
    }
    let delta = if delta > m / 2 { m - delta } else { delta };

    let (mut prev, mut cur) = (m, delta);
    while (cur as u128) * (cur as u128) >= m as u128 {
        (prev, cur) = (cur, prev % cur);
    }
    let rest = m - cur * cur;
    if rest.is_multiple_of(d) {
        if let Some(y) = exact_sqrt(rest / d) {
            return Ok(FormSolution { x: cur as i64, y, d });
        }
    }
    Err(FormError::NoSolution { d, m })
}

/// Solves `p = x^2 + d*y^2` and normalizes `x` for the binomial congruences.
///
/// When `x` is odd its sign is chosen so that `x = -(2/p) mod 4`. For `d = 1`
/// the roles of `x` and `y` are swapped first if needed so that `x` is odd.
pub fn solve_form_normalized(d: u64, field: &PrimeField, sqrt: SqrtStrategy) -> Result<FormSolution, FormError> {
    let p = field.p();
    if d == 0 {
        return Err(FormError::Precondition { d, m: p, delta: 0, reason: "need d >= 1" });
    }
    if d.is_multiple_of(p) {
        // p | d: only p = d = x^2 + d*1^2 with x = 0 can work.
        return if d == p { Ok(FormSolution { x: 0, y: 1, d }) } else { Err(FormError::NoSolution { d, m: p }) };
    }
    if d > p {
        return Err(FormError::NoSolution { d, m: p });
    }
    let minus_d = field.neg(field.reduce(d));
    let delta = sqrt.sqrt(minus_d, field).root().ok_or(FormError::NoSolution { d, m: p })?;
    let mut sol = cornacchia(d, p, delta)?;
    if d == 1 && sol.x % 2 == 0 {
        sol = FormSolution { x: sol.y as i64, y: sol.x.unsigned_abs(), d };
    }
    Ok(normalize_sign(sol, field))
}

/// Picks the sign of an odd `x` with `x = -(2/p) mod 4`; even `x` is left alone.
pub fn normalize_sign(sol: FormSolution, field: &PrimeField) -> FormSolution {
    if sol.x % 2 == 0 {
        return sol;
    }
    let target = (-legendre(2, field) as i64).rem_euclid(4);
    let x = if sol.x.rem_euclid(4) == target { sol.x } else { -sol.x };
    FormSolution { x, ..sol }
}
