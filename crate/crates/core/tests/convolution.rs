mod common;

use nufactor_core::convolution::*;
use nufactor_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn von_mangoldt_values() {
    let t = von_mangoldt_table(1_000).unwrap();
    assert_eq!(t.get(8), 2f64.ln());
    assert_eq!(t.get(6), 0.0);
    assert_eq!(t.get(1), 0.0);
    for n in 1..=1_000 {
        assert!((t.get(n) - common::von_mangoldt(n)).abs() < 1e-15, "n = {n}");
    }
}

#[test]
fn chebyshev_psi_at_1e6() {
    let t = von_mangoldt_table(1_000_000).unwrap();
    let psi: f64 = t.values().iter().sum();
    assert!((psi / 1e6 - 1.0).abs() < 0.002, "psi = {psi}");
}

#[test]
fn theta_bar_on_prime_powers() {
    let t = theta_bar_table(1_000).unwrap();
    for n in 2..=1_000u64 {
        let f = common::factor(n);
        let want = if f.len() == 1 { 1.0 / f[0].1 as f64 } else { 0.0 };
        assert!((t.get(n) - want).abs() < 1e-15);
    }
}

#[test]
fn f2_at_six() {
    let f2 = f_v_table(2, 100).unwrap();
    assert!((f2.get(6) - 2.0 * 2f64.ln() * 3f64.ln()).abs() < 1e-14);
    assert!((f2.get(6) - 1.5230).abs() < 1e-4);
}

#[test]
fn unit_is_identity() {
    let lam = von_mangoldt_table(5_000).unwrap();
    let e = unit_table(5_000).unwrap();
    assert_eq!(convolve(&lam, &e).unwrap().values(), lam.values());
    assert_eq!(convolve(&e, &lam).unwrap().values(), lam.values());
    assert_eq!(f_v_table(0, 100).unwrap().values(), unit_table(100).unwrap().values());
}

#[test]
fn f3_matches_triple_loop() {
    let limit = 10_000u64;
    let f3 = f_v_table(3, limit).unwrap();
    for n in 1..=limit {
        let mut want = 0.0;
        for a in divisors(n) {
            for b in divisors(n / a) {
                let c = n / a / b;
                want += common::von_mangoldt(a) * common::von_mangoldt(b) * common::von_mangoldt(c);
            }
        }
        assert!(close(f3.get(n), want, 1e-12), "F_3({n}) = {} vs {want}", f3.get(n));
    }
}

#[test]
fn p_k_matches_direct_sum() {
    let limit = 3_000u64;
    let p2 = p_k_table(2, limit).unwrap();
    let tb = |n: u64| {
        let f = common::factor(n);
        if f.len() == 1 {
            1.0 / f[0].1 as f64
        } else {
            0.0
        }
    };
    for n in 1..=limit {
        let want: f64 = divisors(n).into_iter().map(|d| tb(d) * tb(n / d)).sum();
        assert!(close(p2.get(n), want, 1e-12));
    }
}

fn random_table(rng: &mut ChaCha8Rng, limit: u64, name: &str) -> ArithmeticTable {
    let vals: Vec<f64> = (0..=limit).map(|_| rng.gen_range(-1.0..1.0)).collect();
    ArithmeticTable::from_fn(name, limit, |n| vals[n as usize]).unwrap()
}

#[test]
fn convolution_is_associative_and_commutative() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let limit = 4_000;
    let f = random_table(&mut rng, limit, "f");
    let g = random_table(&mut rng, limit, "g");
    let h = random_table(&mut rng, limit, "h");
    let fg = convolve(&f, &g).unwrap();
    let gf = convolve(&g, &f).unwrap();
    let left = convolve(&fg, &h).unwrap();
    let right = convolve(&f, &convolve(&g, &h).unwrap()).unwrap();
    // sums of random signs cancel, so compare against the scale of the terms
    for n in 1..=limit {
        let scale = divisors(n).len() as f64;
        assert!((fg.get(n) - gf.get(n)).abs() <= 1e-12 * scale);
        assert!((left.get(n) - right.get(n)).abs() <= 1e-12 * scale * scale);
    }
}

#[test]
fn convolve_rejects_mismatched_limits() {
    let a = unit_table(10).unwrap();
    let b = unit_table(20).unwrap();
    assert!(matches!(convolve(&a, &b), Err(Error::Bounds(_))));
    assert!(unit_table(MAX_TABLE + 1).is_err());
}

#[test]
fn support_law_against_oracle() {
    let limit = 10_000u64;
    for v in 1..=4u32 {
        let fv = f_v_table(v, limit).unwrap();
        for n in 1..=limit {
            let f = common::factor(n);
            let om = f.len() as u32;
            let big: u32 = f.iter().map(|p| p.1).sum();
            let val = fv.get(n);
            assert!(val >= 0.0);
            if val != 0.0 {
                assert!(om <= v && big >= v, "v = {v}, n = {n}");
            }
            if om == big {
                assert_eq!(val != 0.0, om == v, "v = {v}, squarefree n = {n}");
            }
            if v == 1 {
                assert_eq!(val != 0.0, om == 1);
            }
        }
    }
}

#[test]
fn support_law_to_1e6() {
    for v in 1..=4u32 {
        let rep = check_support_fv(v, 1_000_000).unwrap();
        assert_eq!(rep.violations(), 0, "{rep:?}");
    }
    assert!(check_support_fv(7, 100).is_err());
    assert!(check_support_fv(2, 2_000_000).is_err());
}

#[test]
fn squarefree_identity_v3() {
    let limit = 100_000u64;
    let f3 = f_v_table(3, limit).unwrap();
    let mut count = 0;
    for n in 1..=limit {
        let f = common::factor(n);
        if f.len() == 3 && f.iter().all(|p| p.1 == 1) {
            let want = 6.0 * f.iter().map(|p| (p.0 as f64).ln()).product::<f64>();
            assert!(close(f3.get(n), want, 1e-12), "n = {n}");
            count += 1;
        }
    }
    let (worst, lib_count) = squarefree_fv_identity(3, limit).unwrap();
    assert_eq!(lib_count, count);
    assert!(worst < 1e-12);
}

#[test]
fn w_small_values() {
    // theta-bar(p^k) = 1/k
    let mut want = 0.0;
    for p in common::primes_up_to(100) {
        let mut pk = p;
        let mut k = 1;
        while pk <= 100 {
            want += 1.0 / k as f64;
            pk *= p;
            k += 1;
        }
    }
    assert!((unweighted_w(1, 1, 100, None).unwrap() - want).abs() < 1e-12);
    // P_0 is the unit
    assert_eq!(unweighted_w(0, 5, 100, None).unwrap(), 1.0);
    assert_eq!(unweighted_w(0, 5, 0, Some(100)).unwrap(), 1.0);
    assert_eq!(unweighted_w(0, 5, 10, Some(100)).unwrap(), 0.0);
    let long = unweighted_w(2, 3, 2_000, None).unwrap();
    let short = unweighted_w(2, 3, 1_000, Some(1_000)).unwrap() + unweighted_w(2, 3, 1_000, None).unwrap();
    assert!(close(long, short, 1e-12));
}

#[test]
fn w_matches_oracle_with_rough_filter() {
    let (x, z) = (5_000u64, 7u64);
    let p2 = p_k_table(2, x).unwrap();
    let want: f64 = (1..=x).filter(|&n| n == 1 || common::lpf(n) > z).map(|n| p2.get(n)).sum();
    assert!(close(unweighted_w(2, z, x, None).unwrap(), want, 1e-12));
}

#[test]
fn squarefree_w_counts() {
    let x = 100_000u64;
    for v in 1..=3u32 {
        for z in [1u64, 5, 30] {
            let (sum, count) = squarefree_w(v, z, x).unwrap();
            let want = (1..=x)
                .filter(|&n| {
                    let f = common::factor(n);
                    f.len() as u32 == v && f.iter().all(|p| p.1 == 1) && f[0].0 > z
                })
                .count() as u64;
            assert_eq!(count, want, "v = {v}, z = {z}");
            let vfact: f64 = (1..=v).map(|i| i as f64).product();
            assert!(close(sum, vfact * want as f64, 1e-10), "v = {v}, z = {z}: {sum}");
        }
    }
}

#[test]
fn mean_bound_shadow() {
    for v in 3..=8u32 {
        let m = fv_mean_bound(v, 30 * v as u64, 1_000_000, 150.0).unwrap();
        assert!(m.holds(), "{m:?}");
    }
    assert!(fv_mean_bound(0, 10, 100, 150.0).is_err());
}

/// All `(w, a_0, .., a_K)` with `w + sum a <= v`, `a_j <= v / 2^j`.
fn brute_c(v: u32) -> u128 {
    let k = 31 - v.leading_zeros();
    let binom = |n: u32, r: u32| common::binom(n as u64, r as u64) as u128;
    fn rec(j: u32, k: u32, v: u32, left: u32, acc: u128, binom: &dyn Fn(u32, u32) -> u128) -> u128 {
        if j > k {
            return acc;
        }
        let cap = (v >> j).min(left);
        (0..=cap)
            .map(|a| rec(j + 1, k, v, left - a, acc * binom(v, a), binom))
            .max()
            .unwrap()
    }
    (0..=v).map(|w| rec(0, k, v, v - w, binom(v, w), &binom)).max().unwrap()
}

#[test]
fn combinatorial_c_small_cases() {
    assert_eq!(combinatorial_c(1).unwrap().value, 1.0);
    assert_eq!(combinatorial_c(2).unwrap().value, 4.0);
    for v in 1..=12u32 {
        let c = combinatorial_c(v).unwrap();
        assert_eq!(c.exact.to_string(), brute_c(v).to_string(), "v = {v}");
        assert_eq!(c.k, (v as f64).log2().floor() as u32);
    }
    assert!(combinatorial_c(0).is_err());
    assert!(combinatorial_c(41).is_err());
}

#[test]
fn combinatorial_c_within_admissible_bound() {
    let a = 16.0 * (2.0 * std::f64::consts::E).sqrt();
    for v in 1..=40u32 {
        let c = combinatorial_c(v).unwrap();
        assert!(c.bound_ok);
        assert!(c.value.ln() <= v as f64 * a.ln());
    }
}
