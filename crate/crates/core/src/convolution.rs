//! Dirichlet convolutions of arithmetic functions tabulated on `1..=limit`:
//! `F_v = Lambda^{*v}`, `P_k = (Lambda/log)^{*k}`, rough-restricted sums of
//! `P_v`, and the combinatorial product `C_v(K)`.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::numeric::{ln_gamma, CompensatedSum};
use crate::sieve::{map_segments, PrimeTable, SieveOptions};

pub const MAX_TABLE: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ArithmeticTable {
    pub name: String,
    limit: u64,
    /// `values[n]` for `n = 0..=limit`; index 0 is unused and holds 0.
    values: Vec<f64>,
}

impl ArithmeticTable {
    pub fn from_fn(name: impl Into<String>, limit: u64, f: impl Fn(u64) -> f64) -> Result<Self> {
        check_limit(limit)?;
        let mut values = vec![0.0; limit as usize + 1];
        for (n, v) in values.iter_mut().enumerate().skip(1) {
            *v = f(n as u64);
        }
        Ok(ArithmeticTable {
            name: name.into(),
            limit,
            values,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn get(&self, n: u64) -> f64 {
        assert!(n >= 1 && n <= self.limit, "n = {n} outside 1..={}", self.limit);
        self.values[n as usize]
    }

    /// Values for `n = 1..=limit`.
    pub fn values(&self) -> &[f64] {
        &self.values[1..]
    }

    fn nonzero(&self) -> Vec<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .collect()
    }
}

fn check_limit(limit: u64) -> Result<()> {
    if limit == 0 || limit > MAX_TABLE {
        return Err(Error::Bounds(format!("table limit {limit} outside 1..=10^8")));
    }
    Ok(())
}

/// The convolution identity: 1 at `n = 1`, 0 elsewhere.
pub fn unit_table(limit: u64) -> Result<ArithmeticTable> {
    ArithmeticTable::from_fn("unit", limit, |n| (n == 1) as u8 as f64)
}

/// `(omega(n), Omega(n), P^-(n))` for `n = 1..=limit` from the segmented sieve.
fn factor_data(limit: u64) -> Result<(Vec<u8>, Vec<u8>, Vec<u64>)> {
    let table = PrimeTable::for_interval(0, limit)?;
    let parts = map_segments(0, limit, &table, SieveOptions::default(), |seg| {
        (seg.omega.clone(), seg.big_omega.clone(), seg.lpf.clone())
    })?;
    let mut om = vec![0u8];
    let mut big = vec![0u8];
    let mut lpf = vec![0u64];
    for (a, b, c) in parts {
        om.extend(a);
        big.extend(b);
        lpf.extend(c);
    }
    Ok((om, big, lpf))
}

/// `Lambda(n) = log p` if `n = p^k`, else 0.
pub fn von_mangoldt_table(limit: u64) -> Result<ArithmeticTable> {
    check_limit(limit)?;
    let (om, _, lpf) = factor_data(limit)?;
    ArithmeticTable::from_fn("Lambda", limit, |n| {
        if om[n as usize] == 1 {
            (lpf[n as usize] as f64).ln()
        } else {
            0.0
        }
    })
}

/// `Lambda(n) / log n`: `1/k` at `p^k`.
pub fn theta_bar_table(limit: u64) -> Result<ArithmeticTable> {
    check_limit(limit)?;
    let (om, big, _) = factor_data(limit)?;
    ArithmeticTable::from_fn("theta_bar", limit, |n| {
        if om[n as usize] == 1 {
            1.0 / big[n as usize] as f64
        } else {
            0.0
        }
    })
}

/// `(f * g)(n) = sum_{d e = n} f(d) g(e)`.
///
/// Only non-zero entries of either table are visited, so sparse tables such as
/// `Lambda` convolve in time proportional to the number of contributing pairs.
/// The summation order is fixed, so the result does not depend on threading.
pub fn convolve(f: &ArithmeticTable, g: &ArithmeticTable) -> Result<ArithmeticTable> {
    if f.limit != g.limit {
        return Err(Error::Bounds(format!("table limits differ: {} vs {}", f.limit, g.limit)));
    }
    let limit = f.limit as usize;
    let fs = f.nonzero();
    let gs = g.nonzero();
    let mut out = vec![0.0; limit + 1];
    for &(d, fd) in &fs {
        let max_e = limit / d;
        for &(e, ge) in gs.iter().take_while(|(e, _)| *e <= max_e) {
            out[d * e] += fd * ge;
        }
    }
    Ok(ArithmeticTable {
        name: format!("({})*({})", f.name, g.name),
        limit: f.limit,
        values: out,
    })
}

fn power(base: &ArithmeticTable, v: u32, name: String) -> Result<ArithmeticTable> {
    let mut acc = unit_table(base.limit)?;
    for _ in 0..v {
        acc = convolve(&acc, base)?;
    }
    acc.name = name;
    Ok(acc)
}

/// `F_v = Lambda^{*v}` (`F_0` is the unit).
pub fn f_v_table(v: u32, limit: u64) -> Result<ArithmeticTable> {
    power(&von_mangoldt_table(limit)?, v, format!("F_{v}"))
}

/// `P_k = (Lambda/log)^{*k}`.
pub fn p_k_table(k: u32, limit: u64) -> Result<ArithmeticTable> {
    power(&theta_bar_table(limit)?, k, format!("P_{k}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportReport {
    pub v: u32,
    pub limit: u64,
    /// `F_v(n) != 0` with `omega(n) > v` or `Omega(n) < v`.
    pub outside_support: u64,
    /// Squarefree `n` where `F_v(n) != 0` disagrees with `omega(n) = v`.
    pub squarefree_mismatch: u64,
    /// Negative values (the function is a sum of non-negative terms).
    pub negative: u64,
}

impl SupportReport {
    pub fn violations(&self) -> u64 {
        self.outside_support + self.squarefree_mismatch + self.negative
    }
}

pub fn check_support_fv(v: u32, limit: u64) -> Result<SupportReport> {
    if v > 6 || limit > 1_000_000 {
        return Err(Error::Bounds(format!("support check needs v <= 6 and limit <= 10^6, got v = {v}, limit = {limit}")));
    }
    let fv = f_v_table(v, limit)?;
    let (om, big, _) = factor_data(limit)?;
    let mut rep = SupportReport {
        v,
        limit,
        outside_support: 0,
        squarefree_mismatch: 0,
        negative: 0,
    };
    for n in 1..=limit as usize {
        let val = fv.values[n];
        let (o, b) = (om[n] as u32, big[n] as u32);
        if val < 0.0 {
            rep.negative += 1;
        }
        if val != 0.0 && (o > v || b < v) {
            rep.outside_support += 1;
        }
        if o == b && (val != 0.0) != (o == v) {
            rep.squarefree_mismatch += 1;
        }
    }
    Ok(rep)
}

/// Largest relative deviation of `F_v(n)` from `v! prod log p` over squarefree
/// `n <= limit` with `omega(n) = v`, and the number of such `n`.
pub fn squarefree_fv_identity(v: u32, limit: u64) -> Result<(f64, u64)> {
    let fv = f_v_table(v, limit)?;
    let table = PrimeTable::for_interval(0, limit)?;
    let vfact = ln_gamma(v as f64 + 1.0).exp();
    let parts = map_segments(0, limit, &table, SieveOptions::with_factors(), |seg| {
        let mut worst = 0f64;
        let mut count = 0u64;
        for i in 0..seg.len() {
            if seg.omega[i] as u32 != v || seg.omega[i] != seg.big_omega[i] {
                continue;
            }
            let want = vfact * seg.factors(i).map(|(p, _)| (p as f64).ln()).product::<f64>();
            let got = fv.values[seg.n(i) as usize];
            worst = worst.max(((got - want) / want).abs());
            count += 1;
        }
        (worst, count)
    })?;
    Ok(parts.into_iter().fold((0.0, 0), |a, b| (a.0.max(b.0), a.1 + b.1)))
}

/// `W^{v,z}(x) = sum_{n <= x, P^-(n) > z} P_v(n)`, or the short difference
/// `W(x + y) - W(x)` when `y` is given. `P^-(1) = +inf`.
pub fn unweighted_w(v: u32, z: u64, x: u64, y: Option<u64>) -> Result<f64> {
    let (lo, hi) = match y {
        None => (0, x),
        Some(y) => (x, x.checked_add(y).ok_or_else(|| Error::Overflow("x + y".into()))?),
    };
    let pv = p_k_table(v, hi.max(1))?;
    let (_, _, lpf) = factor_data(hi.max(1))?;
    let s: CompensatedSum = (lo + 1..=hi)
        .filter(|&n| n == 1 || lpf[n as usize] > z)
        .map(|n| pv.values[n as usize])
        .collect();
    Ok(s.value())
}

/// Over squarefree `n <= x` with `P^-(n) > z`: `(sum P_v(n), |A_v^flat(x; z)|)`
/// where `A_v^flat(x; z)` is the set of such `n` with `omega(n) = v`.
pub fn squarefree_w(v: u32, z: u64, x: u64) -> Result<(f64, u64)> {
    let pv = p_k_table(v, x)?;
    let (om, big, lpf) = factor_data(x)?;
    let mut sum = CompensatedSum::new();
    let mut count = 0;
    for n in 1..=x as usize {
        if om[n] != big[n] || !(n == 1 || lpf[n] > z) {
            continue;
        }
        sum.add(pv.values[n]);
        count += (om[n] as u32 == v) as u64;
    }
    Ok((sum.value(), count))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanBoundCheck {
    pub v: u32,
    pub z: u64,
    pub x: u64,
    /// `sum_{n <= x, P^-(n) > z} F_v(n) / n`.
    pub lhs: f64,
    /// `v (kappa log x / v)^v`.
    pub rhs: f64,
}

impl MeanBoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

pub fn fv_mean_bound(v: u32, z: u64, x: u64, kappa: f64) -> Result<MeanBoundCheck> {
    if v == 0 {
        return Err(Error::Precondition("mean bound needs v >= 1".into()));
    }
    let fv = f_v_table(v, x)?;
    let (_, _, lpf) = factor_data(x)?;
    let lhs: CompensatedSum = (2..=x)
        .filter(|&n| lpf[n as usize] > z)
        .map(|n| fv.values[n as usize] / n as f64)
        .collect();
    let vf = v as f64;
    Ok(MeanBoundCheck {
        v,
        z,
        x,
        lhs: lhs.value(),
        rhs: vf * (kappa * (x as f64).ln() / vf).powf(vf),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinatorialC {
    pub v: u32,
    pub k: u32,
    pub exact: BigUint,
    pub value: f64,
    /// `log(C_v(K)) <= v log(16 sqrt(2e))`.
    pub bound_ok: bool,
}

pub fn admissible_a() -> f64 {
    16.0 * (2.0 * std::f64::consts::E).sqrt()
}

fn binomial_row(v: u32) -> Vec<BigUint> {
    let mut row = vec![BigUint::from(1u32)];
    for r in 1..=v {
        let next = &row[r as usize - 1] * BigUint::from(v - r + 1) / BigUint::from(r);
        row.push(next);
    }
    row
}

/// `C_v(K) = max_w max_{a_0..a_K} C(v, w) prod_k C(v, a_k)` subject to
/// `w + sum a_k <= v` and `a_j <= v 2^{-j}`, `K = floor(log2 v)`.
pub fn combinatorial_c(v: u32) -> Result<CombinatorialC> {
    if v == 0 || v > 40 {
        return Err(Error::Bounds(format!("C_v(K) is tabulated for 1 <= v <= 40, got {v}")));
    }
    let k = 31 - v.leading_zeros();
    let row = binomial_row(v);
    let budget = v as usize;
    // best[b] = max product over the slots seen so far with total exactly b
    let mut best: Vec<Option<BigUint>> = vec![None; budget + 1];
    best[0] = Some(BigUint::from(1u32));
    let caps = std::iter::once(budget).chain((0..=k).map(|j| (v >> j) as usize));
    for cap in caps {
        let mut next: Vec<Option<BigUint>> = vec![None; budget + 1];
        for (b, cur) in best.iter().enumerate() {
            let Some(cur) = cur else { continue };
            for a in 0..=cap.min(budget - b) {
                let cand = cur * &row[a];
                let slot = &mut next[b + a];
                if slot.as_ref().is_none_or(|s| cand > *s) {
                    *slot = Some(cand);
                }
            }
        }
        best = next;
    }
    let exact = best.into_iter().flatten().max().expect("budget 0 is always reachable");
    let value = big_to_f64(&exact);
    Ok(CombinatorialC {
        v,
        k,
        bound_ok: value.ln() <= v as f64 * admissible_a().ln(),
        exact,
        value,
    })
}

fn big_to_f64(n: &BigUint) -> f64 {
    n.to_string().parse().expect("decimal digits parse as f64")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_values() {
        let l = von_mangoldt_table(100).unwrap();
        assert_eq!(l.get(8), 2f64.ln());
        assert_eq!(l.get(6), 0.0);
        assert_eq!(l.get(1), 0.0);
        assert_eq!(l.get(97), 97f64.ln());
    }

    #[test]
    fn f2_at_six() {
        let f2 = f_v_table(2, 100).unwrap();
        assert!((f2.get(6) - 2.0 * 2f64.ln() * 3f64.ln()).abs() < 1e-14);
        assert!((f2.get(6) - 1.5230).abs() < 1e-4);
    }

    #[test]
    fn unit_is_identity() {
        let l = von_mangoldt_table(1000).unwrap();
        let u = unit_table(1000).unwrap();
        assert_eq!(convolve(&l, &u).unwrap().values(), l.values());
        assert!(convolve(&l, &unit_table(999).unwrap()).is_err());
    }

    #[test]
    fn small_combinatorial_values() {
        assert_eq!(combinatorial_c(1).unwrap().exact, BigUint::from(1u32));
        let c2 = combinatorial_c(2).unwrap();
        assert_eq!(c2.exact, BigUint::from(4u32));
        assert!(c2.bound_ok);
    }

    #[test]
    fn w_with_v_zero_counts_one() {
        assert_eq!(unweighted_w(0, 5, 100, None).unwrap(), 1.0);
        assert_eq!(unweighted_w(0, 5, 100, Some(50)).unwrap(), 0.0);
    }
}
