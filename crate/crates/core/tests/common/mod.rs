//! Brute-force reference implementations. Nothing here calls into the library:
//! every value comes from plain trial division or direct enumeration.
#![allow(dead_code)]

pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn omega(n: u64) -> u32 {
    factor(n).len() as u32
}

pub fn big_omega(n: u64) -> u32 {
    factor(n).iter().map(|f| f.1).sum()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor(n) == vec![(n, 1)]
}

/// Least prime factor, with 1 for n = 1.
pub fn lpf(n: u64) -> u64 {
    factor(n).first().map_or(1, |f| f.0)
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

pub fn squarefree(n: u64) -> bool {
    factor(n).iter().all(|f| f.1 == 1)
}

/// Number of divisors by enumeration.
pub fn divisor_count(n: u64) -> u64 {
    let mut c = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            c += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    c
}

/// Ordered k-tuples with product n, by recursion over divisors.
pub fn tau_k_enum(n: u64, k: u32) -> u64 {
    if k == 1 {
        return 1;
    }
    (1..=n).filter(|d| n % d == 0).map(|d| tau_k_enum(n / d, k - 1)).sum()
}

pub fn binom(n: u64, r: u64) -> u64 {
    let mut acc = 1u64;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// tau_k from the trial-division factorisation.
pub fn tau_k(n: u64, k: u32) -> u64 {
    factor(n)
        .iter()
        .map(|&(_, e)| binom(e as u64 + k as u64 - 1, k as u64 - 1))
        .product()
}

pub fn von_mangoldt(n: u64) -> f64 {
    let f = factor(n);
    if f.len() == 1 {
        (f[0].0 as f64).ln()
    } else {
        0.0
    }
}
