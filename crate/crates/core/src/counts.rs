//! Exact counts over sieved intervals: `pi_nu(x, y)`, `Pi_nu(x, y)`, rough
//! sets `A_v(x; t)`, prime-restricted sets `S_{I,v}(x)`, windowed sets
//! `S*_{v,v1}(x; c; t)` and the prime harmonic sum.
//!
//! Counts are exact integers. Densities are produced by one final division.

use crate::error::{Error, Result};
use crate::numeric::{big_l, ln_gamma, CompensatedSum};
use crate::sieve::{map_segments, FactoredSegment, PrimeTable, SieveOptions};

/// Histogram index cap; `omega(n) <= 15` for every `n < 2^64`.
pub const NU_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountMode {
    /// `omega(n)`: distinct prime factors.
    Distinct,
    /// `Omega(n)`: prime factors with multiplicity.
    WithMultiplicity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaHistogram {
    pub x: u64,
    pub y: u64,
    pub mode: CountMode,
    pub counts_by_nu: Vec<u64>,
}

impl OmegaHistogram {
    pub fn count(&self, nu: usize) -> u64 {
        self.counts_by_nu.get(nu).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts_by_nu.iter().sum()
    }

    /// Largest `nu` with a non-zero count.
    pub fn max_nu(&self) -> usize {
        self.counts_by_nu.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    fn trimmed(x: u64, y: u64, mode: CountMode, mut counts: Vec<u64>) -> Self {
        let keep = counts.iter().rposition(|&c| c > 0).map_or(1, |i| i + 1);
        counts.truncate(keep);
        OmegaHistogram {
            x,
            y,
            mode,
            counts_by_nu: counts,
        }
    }
}

/// One report row comparing an exact count against a prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountRecord {
    pub x: u64,
    pub y: u64,
    pub nu: u32,
    pub exact: u64,
    pub predicted: f64,
    pub ratio: f64,
}

impl CountRecord {
    pub fn new(x: u64, y: u64, nu: u32, exact: u64, predicted: f64) -> Self {
        let ratio = if predicted > 0.0 {
            exact as f64 / predicted
        } else {
            f64::NAN
        };
        CountRecord {
            x,
            y,
            nu,
            exact,
            predicted,
            ratio,
        }
    }
}

/// `|{n in (x, x+y] : omega(n) = nu}|` for every `nu` (or `Omega` in
/// multiplicity mode). The long count `pi_nu(x)` is `pi_nu(0, x, ..)`.
pub fn pi_nu(x: u64, y: u64, mode: CountMode) -> Result<OmegaHistogram> {
    let table = PrimeTable::for_interval(x, y)?;
    pi_nu_with(x, y, mode, &table, SieveOptions::default())
}

pub fn pi_nu_with(
    x: u64,
    y: u64,
    mode: CountMode,
    table: &PrimeTable,
    opts: SieveOptions,
) -> Result<OmegaHistogram> {
    let (distinct, multi) = histograms_with(x, y, table, opts)?;
    Ok(match mode {
        CountMode::Distinct => distinct,
        CountMode::WithMultiplicity => multi,
    })
}

/// Both histograms from a single sieve pass.
pub fn histograms(x: u64, y: u64) -> Result<(OmegaHistogram, OmegaHistogram)> {
    let table = PrimeTable::for_interval(x, y)?;
    histograms_with(x, y, &table, SieveOptions::default())
}

pub fn histograms_with(
    x: u64,
    y: u64,
    table: &PrimeTable,
    opts: SieveOptions,
) -> Result<(OmegaHistogram, OmegaHistogram)> {
    let parts = map_segments(x, y, table, opts, |seg| {
        let mut d = [0u64; NU_CAP + 1];
        let mut m = [0u64; NU_CAP + 1];
        for i in 0..seg.len() {
            d[seg.omega[i] as usize] += 1;
            m[seg.big_omega[i] as usize] += 1;
        }
        (d, m)
    })?;
    let mut d = vec![0u64; NU_CAP + 1];
    let mut m = vec![0u64; NU_CAP + 1];
    for (pd, pm) in parts {
        for k in 0..=NU_CAP {
            d[k] += pd[k];
            m[k] += pm[k];
        }
    }
    Ok((
        OmegaHistogram::trimmed(x, y, CountMode::Distinct, d),
        OmegaHistogram::trimmed(x, y, CountMode::WithMultiplicity, m),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughCount {
    pub count: u64,
    /// `|A_v(x; t)| / x`.
    pub density: f64,
}

/// `|A_v(x; t)| = |{n <= x : omega(n) = v, P^-(n) > t}|`.
pub fn rough_count(x: u64, v: u32, t: u64) -> Result<RoughCount> {
    if t == 0 || t > x {
        return Err(Error::Precondition(format!("rough threshold t = {t} must satisfy 1 <= t <= x = {x}")));
    }
    let table = PrimeTable::for_interval(0, x)?;
    let parts = map_segments(0, x, &table, SieveOptions::default(), |seg| {
        (0..seg.len())
            .filter(|&i| seg.omega[i] as u32 == v && is_rough(seg, i, t))
            .count() as u64
    })?;
    let count = parts.into_iter().sum();
    Ok(RoughCount {
        count,
        density: count as f64 / x as f64,
    })
}

/// `P^-(n) > t`, with `P^-(1) = +inf`.
fn is_rough(seg: &FactoredSegment, i: usize, t: u64) -> bool {
    seg.n(i) == 1 || seg.lpf[i] > t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedCount {
    pub count: u64,
    /// `sum_{n in S_{I,v}(x)} 1/n`.
    pub harmonic_sum: f64,
}

/// `S_{I,v}(x)`: integers `n <= x` with exactly `v` distinct prime factors,
/// all of them in `I = [a, b]`.
pub fn restricted_count(x: u64, a: u64, b: u64, v: u32) -> Result<RestrictedCount> {
    if !(2 <= a && a <= b && b <= x) {
        return Err(Error::Precondition(format!("need 2 <= a <= b <= x, got a = {a}, b = {b}, x = {x}")));
    }
    let table = PrimeTable::build(b)?;
    let primes = table.range(a, b);
    let mut count = 0u64;
    let mut harmonic = CompensatedSum::new();
    enumerate_products(primes, x, v, 0, 1, &mut |n| {
        count += 1;
        harmonic.add(1.0 / n as f64);
    });
    Ok(RestrictedCount {
        count,
        harmonic_sum: harmonic.value(),
    })
}

/// Visit every `n <= limit` built from exactly `k` distinct primes of
/// `primes[from..]` (with arbitrary exponents), times `acc`.
fn enumerate_products(primes: &[u64], limit: u64, k: u32, from: usize, acc: u64, visit: &mut impl FnMut(u64)) {
    if k == 0 {
        visit(acc);
        return;
    }
    for (i, &p) in primes.iter().enumerate().skip(from) {
        // the remaining k primes are all >= p
        let min_rest = (p as u128).pow(k);
        if acc as u128 * min_rest > limit as u128 {
            break;
        }
        let mut pe = p;
        while acc as u128 * pe as u128 <= limit as u128 {
            enumerate_products(primes, limit, k - 1, i + 1, acc * pe, visit);
            match pe.checked_mul(p) {
                Some(v) => pe = v,
                None => break,
            }
        }
    }
}

/// `(sum_{p in [a,b]} sum_{k>=1} p^{-k})^v / v!`, the combinatorial majorant
/// of the restricted harmonic sum.
pub fn prescribed_harmonic_majorant(a: u64, b: u64, v: u32) -> Result<f64> {
    let table = PrimeTable::build(b.max(2))?;
    let s: CompensatedSum = table.range(a, b).iter().map(|&p| 1.0 / (p as f64 - 1.0)).collect();
    Ok((v as f64 * s.value().ln() - ln_gamma(v as f64 + 1.0)).exp())
}

/// Measured `epsilon` in `sum 1/n <= (log_2 b - log_2 a + epsilon)^v / v!`.
pub fn prescribed_remainder(harmonic_sum: f64, a: u64, b: u64, v: u32) -> f64 {
    let root = ((ln_gamma(v as f64 + 1.0) + harmonic_sum.ln()) / v as f64).exp();
    root - ((b as f64).ln().ln() - (a as f64).ln().ln())
}

/// `z*_v(c, x) = exp[(log x / v) / (2 exp(L_v(x)^c))]`.
pub fn star_z(v: u32, c: f64, log_x: f64) -> f64 {
    let l = big_l(v, log_x);
    let vx = log_x / v as f64;
    (vx / (2.0 * l.powf(c).exp())).exp()
}

/// Closed real window `[lo, hi]` of admissible primes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimeWindow {
    pub lo: f64,
    pub hi: f64,
}

impl PrimeWindow {
    pub fn empty() -> Self {
        PrimeWindow { lo: 1.0, hi: 1.0 }
    }

    #[inline]
    pub fn contains(&self, p: u64) -> bool {
        let p = p as f64;
        p >= self.lo && p <= self.hi
    }
}

/// `I*_{v1}(c, x) = [z*_{v1}(c, x), z*_{v1}(c/2, x)]`; empty for `v1 = 0`.
pub fn star_window(v1: u32, c: f64, log_x: f64) -> Result<PrimeWindow> {
    if v1 == 0 {
        return Ok(PrimeWindow::empty());
    }
    if !(c > 0.0 && c < 0.99) {
        return Err(Error::Parameter(format!("window coefficient c = {c} outside (0, 0.99)")));
    }
    let lo = star_z(v1, c, log_x);
    let hi = star_z(v1, c / 2.0, log_x);
    if !(lo <= hi) {
        return Err(Error::Parameter(format!(
            "degenerate window: z*(c) = {lo} > z*(c/2) = {hi} (L_{v1}(x) < 1)"
        )));
    }
    Ok(PrimeWindow { lo, hi })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowedCount {
    pub count: u64,
    /// `delta*_{v,v1}(x; c; t)`.
    pub density: f64,
    pub window: PrimeWindow,
}

/// `|{n <= x : omega(n) = v, omega_{I*}(n) = v1, P^-(n) > t}|`.
pub fn windowed_count(x: u64, v: u32, v1: u32, c: f64, t: u64) -> Result<WindowedCount> {
    if v1 > v {
        return Err(Error::Precondition(format!("v1 = {v1} exceeds v = {v}")));
    }
    let window = star_window(v1, c, (x as f64).ln())?;
    let count = windowed_count_in(x, v, v1, window, t)?;
    Ok(WindowedCount {
        count,
        density: count as f64 / x as f64,
        window,
    })
}

pub fn windowed_count_in(x: u64, v: u32, v1: u32, window: PrimeWindow, t: u64) -> Result<u64> {
    if t == 0 {
        return Err(Error::Precondition("rough threshold t must be >= 1".into()));
    }
    let table = PrimeTable::for_interval(0, x)?;
    let parts = map_segments(0, x, &table, SieveOptions::with_factors(), |seg| {
        (0..seg.len())
            .filter(|&i| {
                seg.omega[i] as u32 == v
                    && is_rough(seg, i, t)
                    && seg.factors(i).filter(|&(p, _)| window.contains(p)).count() as u32 == v1
            })
            .count() as u64
    })?;
    Ok(parts.into_iter().sum())
}

/// Right side of the windowed lower bound
/// `delta* >= (log(log z*_v(c,x) / log 2t))^{v0} L_{v1}(x)^{c v1} / (2^v v! log x)`.
pub fn windowed_lower_bound(x: u64, v: u32, v1: u32, c: f64, t: u64) -> f64 {
    let log_x = (x as f64).ln();
    let v0 = v - v1;
    let zs = star_z(v, c, log_x);
    let inner = (zs.ln() / (2.0 * t as f64).ln()).ln();
    let lead = -(v as f64) * 2f64.ln() - ln_gamma(v as f64 + 1.0) - log_x.ln();
    lead.exp() * inner.powi(v0 as i32) * big_l(v1, log_x).powf(c * v1 as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MertensSum {
    pub x: u64,
    /// `sum_{p <= x} 1/p`.
    pub sum: f64,
    /// `sum - log log x`; tends to the Meissel-Mertens constant.
    pub offset: f64,
}

pub fn mertens_sum(x: u64) -> Result<MertensSum> {
    if x < 2 {
        return Err(Error::Bounds(format!("mertens sum needs x >= 2, got {x}")));
    }
    let table = PrimeTable::build(x)?;
    let s: CompensatedSum = table.primes().iter().map(|&p| 1.0 / p as f64).collect();
    let sum = s.value();
    Ok(MertensSum {
        x,
        sum,
        offset: sum - (x as f64).ln().ln(),
    })
}

/// `C (x / log x) (log_2 x + c)^{nu-1} / (nu-1)!`.
pub fn hardy_ramanujan_bound(nu: u32, x: f64, big_c: f64, c: f64) -> f64 {
    let lx = x.ln();
    let k = nu as f64 - 1.0;
    let log_val = big_c.ln() + x.ln() - lx.ln() + k * (lx.ln() + c).ln() - ln_gamma(k + 1.0);
    log_val.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_to_thirty() {
        let h = pi_nu(0, 30, CountMode::Distinct).unwrap();
        assert_eq!(h.count(0), 1);
        assert_eq!(h.count(1), 16);
        assert_eq!(h.count(2), 12);
        assert_eq!(h.count(3), 1); // 30
        assert_eq!(h.total(), 30);
    }

    #[test]
    fn only_one_has_omega_zero() {
        let h = pi_nu(0, 1, CountMode::Distinct).unwrap();
        assert_eq!(h.counts_by_nu, vec![1]);
        let h = pi_nu(1, 100, CountMode::WithMultiplicity).unwrap();
        assert_eq!(h.count(0), 0);
    }

    #[test]
    fn rough_primes_above_ten() {
        let r = rough_count(100, 1, 10).unwrap();
        assert_eq!(r.count, 21);
        assert_eq!(r.density, 0.21);
        assert!(matches!(rough_count(10, 1, 11), Err(Error::Precondition(_))));
    }

    #[test]
    fn rough_with_unit_threshold_is_full_count() {
        let h = pi_nu(0, 5000, CountMode::Distinct).unwrap();
        for v in 0..5 {
            assert_eq!(rough_count(5000, v, 1).unwrap().count, h.count(v as usize));
        }
    }

    #[test]
    fn restricted_two_three() {
        let r = restricted_count(100, 2, 3, 2).unwrap();
        assert_eq!(r.count, 9);
        let z = restricted_count(100, 2, 3, 0).unwrap();
        assert_eq!((z.count, z.harmonic_sum), (1, 1.0));
        let none = restricted_count(100, 24, 28, 1).unwrap();
        assert_eq!((none.count, none.harmonic_sum), (0, 0.0));
    }

    #[test]
    fn mertens_small() {
        assert_eq!(mertens_sum(2).unwrap().sum, 0.5);
        let m = mertens_sum(10).unwrap();
        assert!((m.sum - (0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0)).abs() < 1e-15);
        assert!((m.sum - 1.176_190_476_190_476).abs() < 1e-12);
    }

    #[test]
    fn empty_window_counts_everything() {
        let h = pi_nu(0, 20_000, CountMode::Distinct).unwrap();
        let below_two = PrimeWindow { lo: 0.5, hi: 1.5 };
        for v in 1..5 {
            assert_eq!(windowed_count_in(20_000, v, 0, below_two, 1).unwrap(), h.count(v as usize));
            assert_eq!(windowed_count(20_000, v, 0, 0.5, 1).unwrap().count, h.count(v as usize));
        }
    }

    #[test]
    fn degenerate_window_rejected() {
        // L_4(10^6) < 1, so z*(c) > z*(c/2)
        assert!(big_l(4, 1e6f64.ln()) < 1.0);
        assert!(matches!(windowed_count(1_000_000, 5, 4, 0.5, 1), Err(Error::Parameter(_))));
    }
}
