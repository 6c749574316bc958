mod common;

use nufactor_core::sieve::{
    factorize, map_segments, sieve_interval, sieve_interval_with, PrimeTable, SieveOptions,
};
use nufactor_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn small_tables() {
    assert_eq!(PrimeTable::build(10).unwrap().primes(), &[2, 3, 5, 7]);
    assert_eq!(PrimeTable::build(2).unwrap().primes(), &[2]);
    assert!(matches!(PrimeTable::build(1), Err(Error::Bounds(_))));
    assert!(matches!(PrimeTable::build((1 << 40) + 1), Err(Error::Bounds(_))));
}

#[test]
fn table_matches_trial_division_to_1e6() {
    let table = PrimeTable::build(1_000_000).unwrap();
    let oracle = common::primes_up_to(1_000_000);
    assert_eq!(oracle.len(), 78_498);
    assert_eq!(table.primes(), oracle.as_slice());
}

#[test]
fn records_up_to_30() {
    let table = PrimeTable::build(30).unwrap();
    let fi = sieve_interval(0, 30, &table).unwrap();
    assert_eq!(fi.len(), 30);
    let r = fi.get(12).unwrap();
    assert_eq!((r.omega, r.big_omega, r.squarefree, r.powerful_part), (2, 3, false, 4));
    let ones: Vec<u64> = fi.records().filter(|r| r.omega == 1).map(|r| r.n).collect();
    let oracle: Vec<u64> = (1..=30).filter(|&n| common::omega(n) == 1).collect();
    assert_eq!(ones, oracle);
    assert_eq!(ones.len(), 16);
    assert_eq!(fi.get(1).unwrap().least_prime_factor, 1);
    assert_eq!(fi.get(0), None);
    assert_eq!(fi.get(31), None);
}

fn check_against_oracle(x: u64, y: u64) {
    let table = PrimeTable::for_interval(x, y).unwrap();
    let fi = sieve_interval(x, y, &table).unwrap();
    assert_eq!(fi.len() as u64, y);
    for r in fi.records() {
        let f = common::factor(r.n);
        let omega = f.len() as u8;
        let big: u8 = f.iter().map(|p| p.1 as u8).sum();
        let powerful: u64 = f.iter().filter(|p| p.1 >= 2).map(|p| p.0.pow(p.1)).product();
        assert_eq!(r.omega, omega, "omega({})", r.n);
        assert_eq!(r.big_omega, big, "Omega({})", r.n);
        assert_eq!(r.squarefree, common::squarefree(r.n), "squarefree({})", r.n);
        assert_eq!(r.least_prime_factor, common::lpf(r.n), "lpf({})", r.n);
        assert_eq!(r.powerful_part, powerful, "powerful({})", r.n);
        assert_eq!(r.n % r.powerful_part, 0);
        assert!(common::squarefree(r.n / r.powerful_part));
    }
}

#[test]
fn interval_near_zero_matches_oracle() {
    check_against_oracle(0, 20_000);
}

#[test]
fn interval_at_1e9_matches_oracle() {
    check_against_oracle(1_000_000_000, 10_000);
}

#[test]
fn interval_across_square_of_prime() {
    // 1_000_003^2 sits inside the interval
    let p2 = 1_000_003u64 * 1_000_003;
    check_against_oracle(p2 - 500, 1_000);
}

#[test]
fn histogram_at_1e9_matches_oracle() {
    let (x, y) = (1_000_000_000u64, 10_000u64);
    let table = PrimeTable::for_interval(x, y).unwrap();
    let fi = sieve_interval(x, y, &table).unwrap();
    let mut got = [0u64; 16];
    let mut want = [0u64; 16];
    for r in fi.records() {
        got[r.omega as usize] += 1;
    }
    for n in x + 1..=x + y {
        want[common::omega(n) as usize] += 1;
    }
    assert_eq!(got, want);
}

#[test]
fn factor_lists_match_oracle() {
    let (x, y) = (999_000_000u64, 5_000u64);
    let table = PrimeTable::for_interval(x, y).unwrap();
    let opts = SieveOptions {
        segment_width: 777,
        with_factors: true,
    };
    let bad = map_segments(x, y, &table, opts, |seg| {
        (0..seg.len())
            .filter(|&i| seg.factors(i).collect::<Vec<_>>() != common::factor(seg.n(i)))
            .count()
    })
    .unwrap();
    assert_eq!(bad.iter().sum::<usize>(), 0);
}

#[test]
fn preconditions() {
    let table = PrimeTable::build(100).unwrap();
    assert!(matches!(sieve_interval(0, 0, &table), Err(Error::Precondition(_))));
    assert!(matches!(sieve_interval(10_000, 100, &table), Err(Error::Precondition(_))));
    assert!(matches!(sieve_interval(u64::MAX - 5, 10, &table), Err(Error::Bounds(_))));
}

#[test]
fn multiplicativity_on_random_coprime_pairs() {
    let table = PrimeTable::build(1 << 20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 500 {
        let a: u64 = rng.gen_range(2..1_000_000);
        let b: u64 = rng.gen_range(2..1_000_000);
        if gcd(a, b) != 1 {
            continue;
        }
        let ab = a * b;
        let fi = sieve_interval(ab - 1, 1, &table).unwrap();
        let w = |n| factorize(n, &table).unwrap().len() as u8;
        assert_eq!(fi.get(ab).unwrap().omega, w(a) + w(b), "a = {a}, b = {b}");
        checked += 1;
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[test]
fn squarefree_density_near_1e8() {
    let (x, y) = (100_000_000u64, 1_000_000u64);
    let table = PrimeTable::for_interval(x, y).unwrap();
    let fi = sieve_interval(x, y, &table).unwrap();
    let sf = fi.records().filter(|r| r.squarefree).count() as f64 / y as f64;
    let limit = 6.0 / std::f64::consts::PI.powi(2);
    assert!((sf - limit).abs() < 0.01, "squarefree fraction {sf}");
}

#[test]
fn cache_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let table = PrimeTable::build(100_000).unwrap();
    let path = dir.path().join("primes.bin");
    table.write_cache(&path).unwrap();
    let back = PrimeTable::read_cache(&path).unwrap();
    assert_eq!(back.limit(), table.limit());
    assert_eq!(back.primes(), table.primes());

    let loaded = PrimeTable::load_or_build(50_000, Some(dir.path())).unwrap();
    assert_eq!(loaded.primes(), common::primes_up_to(50_000).as_slice());
    let again = PrimeTable::load_or_build(50_000, Some(dir.path())).unwrap();
    assert_eq!(again.primes(), loaded.primes());

    std::fs::write(&path, b"garbage!").unwrap();
    assert!(PrimeTable::read_cache(&path).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn segmentation_does_not_change_records(
        x in 0u64..2_000_000_000,
        y in 1u64..5_000,
        width in 1usize..3_000,
    ) {
        let table = PrimeTable::for_interval(x, y).unwrap();
        let one = sieve_interval_with(x, y, &table, SieveOptions { segment_width: usize::MAX, with_factors: false }).unwrap();
        let many = sieve_interval_with(x, y, &table, SieveOptions { segment_width: width, with_factors: false }).unwrap();
        prop_assert_eq!(one, many);
    }

    #[test]
    fn concatenated_sub_intervals_match(
        x in 0u64..1_000_000_000,
        cuts in proptest::collection::vec(1u64..700, 1..6),
    ) {
        let y: u64 = cuts.iter().sum();
        let table = PrimeTable::for_interval(x, y).unwrap();
        let whole = sieve_interval(x, y, &table).unwrap();
        let mut lo = x;
        let mut joined = Vec::new();
        for c in cuts {
            joined.extend(sieve_interval(lo, c, &table).unwrap().records());
            lo += c;
        }
        prop_assert_eq!(whole.records().collect::<Vec<_>>(), joined);
    }
}
