//! Input generation shared by the benchmarks.

/// The first `count` primes `p >= 2^bits` with `p = residue mod modulus`.
pub fn primes_near(bits: u32, modulus: u64, residue: u64, count: usize) -> Vec<u64> {
    let from = 1u64 << bits;
    let start = from + (residue + modulus - from % modulus) % modulus;
    (start..).step_by(modulus as usize).filter(|&p| primal_check::miller_rabin(p)).take(count).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_and_bounds() {
        let ps = primes_near(20, 24, 1, 5);
        assert_eq!(ps.len(), 5);
        assert!(ps.iter().all(|&p| p >= 1 << 20 && p % 24 == 1));
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(primes_near(3, 1, 0, 3), [11, 13, 17]);
    }
}
