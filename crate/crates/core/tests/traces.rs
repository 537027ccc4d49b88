mod common;

use common::{is_prime, primes_in_class};
use frobst_core::hasse_witt::{hw_matrix, trace, trace_c1, trace_c2, trace_residue, weil_bound};
use frobst_core::oracle::{naive_count, naive_hasse_witt, naive_trace};
use frobst_core::sieve::sieve_segment;
use frobst_core::{CurveFamily, Family, HwError, PrimeField, Rational, SqrtStrategy};
use proptest::prelude::*;

const TS: SqrtStrategy = SqrtStrategy::TonelliShanks;

fn next_prime(mut n: u64) -> u64 {
    while !is_prime(n) {
        n += 1;
    }
    n
}

fn curve(family: Family, c: i64) -> CurveFamily {
    CurveFamily::new(family, Rational::integer(c)).unwrap()
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::C1), Just(Family::C2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_matches_point_count(n in 2000u64..300_000, c in 1i64..200, fam in family()) {
        let p = next_prime(n);
        let curve = curve(fam, c);
        prop_assume!(curve.is_good_prime(p));
        let field = PrimeField::new(p).unwrap();
        let model = curve.model(&field).unwrap();
        let t = trace(&curve, &field, TS).unwrap().t;
        prop_assert_eq!(t, p as i64 + 1 - naive_count(&model, &field) as i64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn large_prime_invariants(n in (1u64 << 20)..(1u64 << 61), c in 1u64..1_000_000, seed: u64, fam in family()) {
        let p = next_prime(n);
        let field = PrimeField::new(p).unwrap();
        let curve = curve(fam, c as i64);
        let ts = trace(&curve, &field, TS).unwrap();
        let cip = trace(&curve, &field, SqrtStrategy::Cipolla { seed }).unwrap();
        prop_assert_eq!(ts, cip);
        prop_assert!(ts.t.abs() <= weil_bound(p));
        prop_assert_eq!(field.reduce_signed(ts.t), trace_residue(&curve, &field, TS).unwrap());

        // Only c mod p matters.
        let shifted = c + p;
        let direct = match fam {
            Family::C1 => trace_c1(shifted, &field, TS),
            Family::C2 => trace_c2(shifted, &field, TS),
        };
        prop_assert_eq!(direct.unwrap(), ts);
    }

    #[test]
    fn rational_parameter_reduces_like_its_residue(num in 1i64..1000, den in 1i64..1000, n in 200u64..100_000) {
        let p = next_prime(n);
        let c = CurveFamily::new(Family::C1, Rational::new(num, den).unwrap()).unwrap();
        prop_assume!(c.is_good_prime(p));
        let field = PrimeField::new(p).unwrap();
        let residue = c.c.reduce(&field).unwrap();
        prop_assert_eq!(trace(&c, &field, TS).unwrap(), trace_c1(residue, &field, TS).unwrap());
    }
}

#[test]
fn trace_is_zero_on_inert_classes_at_large_primes() {
    for p in primes_in_class(1 << 50, 8, 7, 20) {
        let field = PrimeField::new(p).unwrap();
        assert_eq!(trace(&curve(Family::C1, 5), &field, TS).unwrap().t, 0);
    }
    for class in [7, 11] {
        for p in primes_in_class(1 << 50, 12, class, 20) {
            let field = PrimeField::new(p).unwrap();
            assert_eq!(trace(&curve(Family::C2, 5), &field, TS).unwrap().t, 0);
        }
    }
}

#[test]
fn charpoly_matches_oracle_matrix() {
    // Every third prime in [1200, 2000); the unit tests cover entrywise agreement below.
    for p in sieve_segment(1200, 2000).into_iter().step_by(3) {
        let field = PrimeField::new(p).unwrap();
        for c in 1..=3 {
            for curve in [curve(Family::C1, c), curve(Family::C2, c)] {
                let fast = match hw_matrix(&curve, &field, TS) {
                    Ok(w) => w,
                    Err(HwError::UnsupportedResidueClass { .. }) => continue,
                    Err(e) => panic!("{curve} p={p}: {e}"),
                };
                let model = curve.model(&field).unwrap();
                let naive = naive_hasse_witt(&model, &field);
                assert_eq!(fast.charpoly(&field), naive.charpoly(&field), "{curve} p={p}");
                assert_eq!(fast.trace(&field), field.reduce_signed(naive_trace(&model, &field)));
            }
        }
    }
}

#[test]
fn naive_hasse_witt_congruence_sample() {
    for p in [401, 1009, 2003, 4001] {
        naive_congruence_at(p);
    }
}

#[test]
#[ignore = "cubic in p; too slow for the default run"]
fn naive_hasse_witt_congruence_below_2_14() {
    for p in sieve_segment(5, 1 << 14) {
        naive_congruence_at(p);
    }
}

fn naive_congruence_at(p: u64) {
    let field = PrimeField::new(p).unwrap();
    for c in 1..=3 {
        for curve in [curve(Family::C1, c), curve(Family::C2, c)] {
            if !curve.is_good_prime(p) {
                continue;
            }
            let model = curve.model(&field).unwrap();
            let t = p as i64 + 1 - naive_count(&model, &field) as i64;
            assert_eq!(naive_hasse_witt(&model, &field).trace(&field), field.reduce_signed(t), "{curve} p={p}");
        }
    }
}
