mod common;

use std::time::Instant;

use common::primes_in_class;
use frobst_core::{trace, CurveFamily, PrimeField, SqrtStrategy};

/// Best-of-five mean time per prime, in nanoseconds.
fn per_prime_ns(curve: &CurveFamily, primes: &[u64]) -> f64 {
    let fields: Vec<_> = primes.iter().map(|&p| PrimeField::new(p).unwrap()).collect();
    (0..5)
        .map(|_| {
            let start = Instant::now();
            let mut acc = 0i64;
            for f in &fields {
                acc ^= trace(curve, f, SqrtStrategy::TonelliShanks).unwrap().t;
            }
            std::hint::black_box(acc);
            start.elapsed().as_nanos() as f64 / fields.len() as f64
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn doubling_log_p_costs_less_than_a_quartic_factor() {
    // p = 1 mod 24 takes the slowest branch of both families.
    for curve in [CurveFamily::c1(3).unwrap(), CurveFamily::c2(2).unwrap()] {
        let small = per_prime_ns(&curve, &primes_in_class(1 << 30, 24, 1, 400));
        let large = per_prime_ns(&curve, &primes_in_class(1 << 60, 24, 1, 400));
        let ratio = large / small;
        eprintln!("{curve}: {small:.0} ns at 2^30, {large:.0} ns at 2^60, ratio {ratio:.2}");
        assert!(ratio < 16.0, "{curve}: ratio {ratio}");
    }
}
