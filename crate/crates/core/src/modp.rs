//! Single-word arithmetic modulo an odd prime.
//!
//! Every per-prime computation in the crate goes through [`PrimeField`]. Products
//! are formed in `u128`, so any prime below 2^62 is handled exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest modulus (exclusive) accepted by [`PrimeField::new`].
pub const MAX_PRIME: u64 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModpError {
    #[error("modulus {0} must be an odd prime in [3, 2^62)")]
    BadModulus(u64),
    #[error("{a} is divisible by p = {p}")]
    DivisibleByP { a: u64, p: u64 },
}

/// An element of `[0, p)`.
pub type Residue = u64;

/// Result of a square-root computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sqrt {
    Root(Residue),
    NoRoot,
}

impl Sqrt {
    pub fn root(self) -> Option<Residue> {
        match self {
            Sqrt::Root(r) => Some(r),
            Sqrt::NoRoot => None,
        }
    }
}

/// Which square-root algorithm the fast trace path uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SqrtStrategy {
    /// Tonelli-Shanks with the least non-residue found by incremental search.
    #[default]
    TonelliShanks,
    /// Cipolla-Lehmer; the per-prime RNG is seeded from `seed` and `p`.
    Cipolla { seed: u64 },
}

impl SqrtStrategy {
    pub fn sqrt(self, a: Residue, field: &PrimeField) -> Sqrt {
        match self {
            SqrtStrategy::TonelliShanks => sqrt_tonelli_shanks(a, field),
            SqrtStrategy::Cipolla { seed } => sqrt_cipolla(a, field, seed ^ field.p()),
        }
    }
}

/// The prime field F_p together with the decomposition `p - 1 = 2^v * s`.
///
/// Primality is the caller's responsibility; only oddness and range are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
    n: u64,
    v: u32,
    s: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, ModpError> {
        if p < 3 || p.is_multiple_of(2) || p >= MAX_PRIME {
            return Err(ModpError::BadModulus(p));
        }
        let v = (p - 1).trailing_zeros();
        Ok(Self { p, n: (p - 1) / 2, v, s: (p - 1) >> v })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// `(p - 1) / 2`.
    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    /// 2-adic valuation of `p - 1`.
    #[inline]
    pub fn v(&self) -> u32 {
        self.v
    }

    /// Odd part of `p - 1`.
    #[inline]
    pub fn s(&self) -> u64 {
        self.s
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> Residue {
        a % self.p
    }

    /// Reduces a signed integer into `[0, p)`.
    #[inline]
    pub fn reduce_signed(&self, a: i64) -> Residue {
        (a as i128).rem_euclid(self.p as i128) as u64
    }

    /// Maps a residue to its symmetric representative in `(-p/2, p/2]`.
    #[inline]
    pub fn to_signed(&self, a: Residue) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    #[inline]
    pub fn add(&self, a: Residue, b: Residue) -> Residue {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: Residue, b: Residue) -> Residue {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: Residue) -> Residue {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Residue, b: Residue) -> Residue {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, a: Residue, e: u64) -> Residue {
        pow_mod(a, e, self)
    }

    /// Inverse by Fermat; `a` must be nonzero mod p.
    pub fn inv(&self, a: Residue) -> Result<Residue, ModpError> {
        let a = self.reduce(a);
        if a == 0 {
            return Err(ModpError::DivisibleByP { a, p: self.p });
        }
        Ok(pow_mod(a, self.p - 2, self))
    }

    /// The smaller of the two square roots `r` and `p - r`.
    #[inline]
    fn canonical_root(&self, r: Residue) -> Residue {
        r.min(self.p - r)
    }
}

/// `a^e mod p` by left-to-right binary exponentiation.
pub fn pow_mod(a: Residue, e: u64, field: &PrimeField) -> Residue {
    let a = field.reduce(a);
    if e == 0 {
        return 1 % field.p;
    }
    let mut acc = 1u64;
    for bit in (0..64 - e.leading_zeros()).rev() {
        acc = field.mul(acc, acc);
        if (e >> bit) & 1 == 1 {
            acc = field.mul(acc, a);
        }
    }
    acc
}

/// Legendre symbol `(a/p)` via Euler's criterion.
pub fn legendre(a: Residue, field: &PrimeField) -> i8 {
    let a = field.reduce(a);
    if a == 0 {
        return 0;
    }
    if pow_mod(a, field.n, field) == 1 {
        1
    } else {
        -1
    }
}

/// Least `alpha >= 2` that is a quadratic non-residue mod p.
pub fn find_nonresidue(field: &PrimeField) -> Residue {
    (2..field.p).find(|&a| legendre(a, field) == -1).expect("an odd prime always has a quadratic non-residue")
}

/// Tonelli-Shanks square root, returning the root in `[0, (p-1)/2]`.
pub fn sqrt_tonelli_shanks(a: Residue, field: &PrimeField) -> Sqrt {
    let a = field.reduce(a);
    if a == 0 {
        return Sqrt::Root(0);
    }
    if legendre(a, field) != 1 {
        return Sqrt::NoRoot;
    }
    let p = field.p;
    if p % 4 == 3 {
        return Sqrt::Root(field.canonical_root(pow_mod(a, (p + 1) / 4, field)));
    }
    // Generator of the 2-Sylow subgroup.
    let mut z = pow_mod(find_nonresidue(field), field.s, field);
    let mut m = field.v;
    let mut t = pow_mod(a, field.s, field);
    let mut r = pow_mod(a, field.s.div_ceil(2), field);
    while t != 1 {
        // Order of t is 2^i with 0 < i < m.
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = field.mul(t2, t2);
            i += 1;
        }
        let mut b = z;
        for _ in 0..(m - i - 1) {
            b = field.mul(b, b);
        }
        m = i;
        z = field.mul(b, b);
        t = field.mul(t, z);
        r = field.mul(r, b);
    }
    Sqrt::Root(field.canonical_root(r))
}

/// Cipolla-Lehmer square root. The returned root is canonical and therefore
/// independent of `rng_seed`; the seed only drives the search for `t` with
/// `t^2 - a` a non-residue.
pub fn sqrt_cipolla(a: Residue, field: &PrimeField, rng_seed: u64) -> Sqrt {
    let a = field.reduce(a);
    if a == 0 {
        return Sqrt::Root(0);
    }
    if legendre(a, field) != 1 {
        return Sqrt::NoRoot;
    }
    let p = field.p;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (t, w) = loop {
        let t = rng.random_range(0..p);
        let w = field.sub(field.mul(t, t), a);
        if legendre(w, field) == -1 {
            break (t, w);
        }
    };
    // (t + sqrt(w))^((p+1)/2) in F_p[X]/(X^2 - w).
    let mul = |(x0, x1): (u64, u64), (y0, y1): (u64, u64)| {
        (field.add(field.mul(x0, y0), field.mul(field.mul(x1, y1), w)), field.add(field.mul(x0, y1), field.mul(x1, y0)))
    };
    let mut acc = (1u64, 0u64);
    let mut base = (t, 1u64);
    let mut e = p.div_ceil(2);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    debug_assert_eq!(acc.1, 0);
    Sqrt::Root(field.canonical_root(acc.0))
}

/// Whether `a` lies in `(F_p^*)^k`.
pub fn kth_power_residue(a: Residue, k: u64, field: &PrimeField) -> Result<bool, ModpError> {
    let a = field.reduce(a);
    if a == 0 {
        return Err(ModpError::DivisibleByP { a, p: field.p });
    }
    let g = num_integer::gcd(k, field.p - 1);
    Ok(pow_mod(a, (field.p - 1) / g, field) == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn squares(p: u64) -> Vec<bool> {
        let mut sq = vec![false; p as usize];
        for x in 1..p {
            sq[(x * x % p) as usize] = true;
        }
        sq
    }

    fn small_primes(limit: u64) -> Vec<u64> {
        (3..limit).filter(|&n| n % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
    }

    #[test]
    fn field_decomposition() {
        let fld = f(97);
        assert_eq!((fld.n(), fld.v(), fld.s()), (48, 5, 3));
        assert_eq!(PrimeField::new(2), Err(ModpError::BadModulus(2)));
        assert_eq!(PrimeField::new(15).map(|x| x.p()), Ok(15));
        assert!(PrimeField::new(MAX_PRIME + 1).is_err());
    }

    #[test]
    fn pow_mod_examples() {
        assert_eq!(pow_mod(2, 10, &f(1009)), 15);
        assert_eq!(pow_mod(5, 0, &f(13)), 1);
        assert_eq!(pow_mod(7, 6, &f(13)), 12);
        // Near the 2^62 ceiling: Fermat must hold.
        let big = f(4_611_686_018_427_387_847);
        assert_eq!(pow_mod(3, big.p() - 1, &big), 1);
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(2, &f(17)), 1);
        assert_eq!(legendre(0, &f(13)), 0);
        assert_eq!(legendre(2, &f(13)), -1);
    }

    #[test]
    fn nonresidue_examples() {
        assert_eq!(find_nonresidue(&f(13)), 2);
        assert_eq!(find_nonresidue(&f(17)), 3);
        assert_eq!(find_nonresidue(&f(7)), 3);
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(sqrt_tonelli_shanks(2, &f(17)), Sqrt::Root(6));
        assert_eq!(sqrt_tonelli_shanks(1, &f(101)), Sqrt::Root(1));
        assert_eq!(sqrt_tonelli_shanks(5, &f(13)), Sqrt::NoRoot);
        for seed in [0, 1, 42, u64::MAX] {
            assert_eq!(sqrt_cipolla(2, &f(17), seed), Sqrt::Root(6));
        }
        assert_eq!(sqrt_cipolla(0, &f(13), 7), Sqrt::Root(0));
        assert_eq!(sqrt_cipolla(3, &f(13), 7), Sqrt::Root(4));
    }

    #[test]
    fn kth_power_examples() {
        assert_eq!(kth_power_residue(16, 4, &f(17)), Ok(true));
        assert_eq!(kth_power_residue(2, 2, &f(13)), Ok(false));
        assert_eq!(kth_power_residue(1, 6, &f(101)), Ok(true));
        assert!(kth_power_residue(26, 3, &f(13)).is_err());
    }

    #[test]
    fn kth_power_matches_enumeration() {
        for p in small_primes(200) {
            let fld = f(p);
            for k in 1..=6u64 {
                let powers: std::collections::HashSet<u64> = (1..p).map(|x| pow_mod(x, k, &fld)).collect();
                for a in 1..p {
                    assert_eq!(kth_power_residue(a, k, &fld).unwrap(), powers.contains(&a));
                }
            }
        }
    }

    #[test]
    fn legendre_matches_square_table() {
        for p in small_primes(3000) {
            let fld = f(p);
            let sq = squares(p);
            for a in 0..p {
                let expect = if a == 0 {
                    0
                } else if sq[a as usize] {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre(a, &fld), expect, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn sqrt_algorithms_agree_exhaustively() {
        for p in small_primes(10_000) {
            let fld = f(p);
            for a in 0..p {
                let ts = sqrt_tonelli_shanks(a, &fld);
                let ci = sqrt_cipolla(a, &fld, a);
                assert_eq!(ts, ci, "a={a} p={p}");
                match ts {
                    Sqrt::Root(r) => {
                        assert_eq!(fld.mul(r, r), a);
                        assert!(r <= (p - 1) / 2);
                    }
                    Sqrt::NoRoot => assert_eq!(legendre(a, &fld), -1),
                }
            }
        }
    }

    proptest! {
        #[test]
        fn legendre_is_multiplicative(a in 1u64..1_000_000, b in 1u64..1_000_000) {
            let fld = f(1_000_003);
            prop_assert_eq!(legendre(fld.mul(a, b), &fld), legendre(a, &fld) * legendre(b, &fld));
        }

        #[test]
        fn sqrt_of_square_is_canonical(x in 0u64..(1 << 40)) {
            let fld = f(1_099_511_627_689); // prime just below 2^40
            let a = fld.mul(x, x);
            let r = sqrt_tonelli_shanks(a, &fld).root().unwrap();
            prop_assert_eq!(r, x.min(fld.p() - x) % fld.p());
            prop_assert_eq!(sqrt_cipolla(a, &fld, x), Sqrt::Root(r));
        }
    }
}
