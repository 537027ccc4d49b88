//! Segmented sieve of Eratosthenes.

/// Upper end of the range the sieve is designed for.
pub const SIEVE_CEILING: u64 = (1 << 40) + (1 << 32);

const SEGMENT: u64 = 1 << 18;

/// All primes `<= limit`, by a plain sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// The primes in `[lo, hi)`, ascending.
///
/// Panics if `hi` exceeds [`SIEVE_CEILING`].
pub fn sieve_segment(lo: u64, hi: u64) -> Vec<u64> {
    assert!(hi <= SIEVE_CEILING, "sieve range ends above 2^40 + 2^32");
    let lo = lo.max(2);
    if lo >= hi {
        return Vec::new();
    }
    let base = primes_up_to((hi - 1).isqrt());
    let mut out = Vec::new();
    let mut composite = vec![false; SEGMENT as usize];
    let mut start = lo;
    while start < hi {
        let end = (start + SEGMENT).min(hi);
        let len = (end - start) as usize;
        composite[..len].fill(false);
        for &q in &base {
            if q * q >= end {
                break;
            }
            let first = (q * q).max(start.div_ceil(q) * q);
            let mut m = first;
            while m < end {
                composite[(m - start) as usize] = true;
                m += q;
            }
        }
        out.extend(composite[..len].iter().enumerate().filter(|(_, &c)| !c).map(|(i, _)| start + i as u64));
        start = end;
    }
    out
}
