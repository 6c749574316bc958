//! Structural parameters and the minorant counts `M'_nu(x, y)` and `M#_nu(x, y)`.
//!
//! Both minorants are sums over factorisations `N = m n` of integers in
//! `(x, x+y]`. Summing over `N` instead of over `m` turns them into a single
//! factor-list sieve pass:
//!
//! * `M'` counts pairs `(m, p)` with `m <= tau`, `omega(m) = nu - 1` and
//!   `m p = N`; for fixed `N` the pair is fixed by the prime `p | N`.
//! * `M#` counts triples `(w, m, n)` with `m` the `t`-smooth part of `N`, so
//!   each `N` contributes at most once.

use crate::counts::NU_CAP;
use crate::error::{Error, Result};
use crate::numeric::{big_l, log2, log3, script_l};
use crate::sieve::{map_segments, FactoredSegment, PrimeTable, SieveOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaperParams {
    pub log_x: f64,
    pub nu: u32,
    pub a: f64,
    pub l: f64,
    /// `log x / sqrt(log_3 x)`.
    pub lambda_plus_intro: f64,
    /// `log x / log_3 x`.
    pub lambda_plus_sec5: f64,
    /// `exp(lambda_plus_intro)`; infinite once that exceeds the `f64` range.
    pub tau: f64,
    /// `nu (log L)^2 / L`.
    pub ell_nu: f64,
    /// `exp(log x / (ell_nu log_3 x))`.
    pub t: f64,
    /// `log x / (log_2 x)^a`.
    pub script_la: f64,
}

impl PaperParams {
    pub fn from_log_x(log_x: f64, nu: u32, a: f64) -> Result<Self> {
        if !(log_x > std::f64::consts::E) {
            return Err(Error::Precondition(format!("log x = {log_x} must exceed e so that log_3 x > 0")));
        }
        if nu == 0 {
            return Err(Error::Precondition("nu must be at least 1".into()));
        }
        let l = big_l(nu, log_x);
        if !(l > 0.0) {
            return Err(Error::Range(format!("nu log(nu+1) >= log x for nu = {nu}, log x = {log_x}")));
        }
        let l3 = log3(log_x);
        let lambda_plus_intro = log_x / l3.sqrt();
        let ell_nu = nu as f64 * l.ln().powi(2) / l;
        Ok(PaperParams {
            log_x,
            nu,
            a,
            l,
            lambda_plus_intro,
            lambda_plus_sec5: log_x / l3,
            tau: lambda_plus_intro.exp(),
            ell_nu,
            t: (log_x / (ell_nu * l3)).exp(),
            script_la: script_l(a, log_x),
        })
    }

    /// `L_nu(x) = 1` makes `ell_nu = 0` and `t` infinite; callers see that in
    /// the fields rather than as an error.
    pub fn new(x: u64, nu: u32, a: f64) -> Result<Self> {
        if x < 16 {
            return Err(Error::Precondition(format!("x = {x} must be at least 16")));
        }
        Self::from_log_x((x as f64).ln(), nu, a)
    }

    /// Largest `w` in the outer sum of `M#`.
    pub fn w_max(&self) -> u32 {
        if self.ell_nu >= 1.0 {
            self.ell_nu.floor().min(NU_CAP as f64) as u32
        } else {
            0
        }
    }

    /// `log Q_nu(x) = theta(t)`, the log of the product of primes up to `t`.
    pub fn log_q(&self) -> Result<f64> {
        if !(self.t < 1e10) {
            return Err(Error::Bounds(format!("t = {} too large to tabulate theta(t)", self.t)));
        }
        let table = PrimeTable::build(self.t.floor() as u64)?;
        Ok(table.primes().iter().map(|&p| (p as f64).ln()).sum())
    }

    pub fn log2_x(&self) -> f64 {
        log2(self.log_x)
    }
}

pub fn paper_params(x: u64, nu: u32, a: f64) -> Result<PaperParams> {
    PaperParams::new(x, nu, a)
}

/// Desk-scale overrides for the asymptotic parameter values.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MinorantOptions {
    pub tau_cap: Option<f64>,
    pub t_cap: Option<f64>,
    /// Compute even when `tau >= x`.
    pub force: bool,
}

/// The integer thresholds actually used: `m <= tau`, `p <= t` is smooth,
/// `1 <= w <= w_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thresholds {
    pub tau: u64,
    pub t: u64,
    pub w_max: u32,
}

fn floor_u64(v: f64) -> u64 {
    if v >= u64::MAX as f64 {
        u64::MAX
    } else if v > 0.0 {
        v.floor() as u64
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinorantReport {
    pub x: u64,
    pub y: u64,
    pub nu: u32,
    pub params: PaperParams,
    pub thresholds: Thresholds,
    pub tau_clamped: bool,
    pub t_clamped: bool,
    /// `ell_nu(x) < 1`: the outer sum of `M#` is empty.
    pub degenerate: bool,
    /// The minorant itself (pairs for `M'`, integers for `M#`).
    pub count: u64,
    /// Distinct elements of `S_nu(x, y)` reached by at least one counted term.
    pub distinct: u64,
    /// `pi_nu(x, y)`.
    pub target: u64,
}

impl MinorantReport {
    pub fn capture_ratio(&self) -> f64 {
        if self.target == 0 {
            f64::NAN
        } else {
            self.count as f64 / self.target as f64
        }
    }

    pub fn distinct_capture_ratio(&self) -> f64 {
        if self.target == 0 {
            f64::NAN
        } else {
            self.distinct as f64 / self.target as f64
        }
    }
}

struct Resolved {
    params: PaperParams,
    thresholds: Thresholds,
    tau_clamped: bool,
    t_clamped: bool,
}

fn resolve(x: u64, nu: u32, a: f64, opts: &MinorantOptions) -> Result<Resolved> {
    let params = PaperParams::new(x.max(16), nu, a)?;
    let tau_clamped = opts.tau_cap.is_some_and(|c| c < params.tau);
    let t_clamped = opts.t_cap.is_some_and(|c| c < params.t);
    let tau = opts.tau_cap.map_or(params.tau, |c| c.min(params.tau));
    let t = opts.t_cap.map_or(params.t, |c| c.min(params.t));
    if tau >= x as f64 && !opts.force {
        return Err(Error::Parameter(format!(
            "tau = {tau:.4e} >= x = {x}: x is too small for the asymptotic parameters (set a cap or force)"
        )));
    }
    Ok(Resolved {
        params,
        thresholds: Thresholds {
            tau: floor_u64(tau),
            t: floor_u64(t),
            w_max: params.w_max(),
        },
        tau_clamped,
        t_clamped,
    })
}

/// Counts over `(x, x+y]` for fixed thresholds: `(minorant, distinct, target)`.
pub type Tally = (u64, u64, u64);

/// Pairs `(m, p)` with `m p = n(i)`, `m <= tau` and `omega(m) = nu - 1`.
fn prime_pairs(seg: &FactoredSegment, i: usize, nu: u32, tau: u64) -> u64 {
    let n = seg.n(i);
    let om = seg.omega[i] as u32;
    seg.factors(i)
        .filter(|&(p, e)| {
            let om_m = if e >= 2 { om } else { om - 1 };
            om_m + 1 == nu && n / p <= tau
        })
        .count() as u64
}

/// Whether `n(i)` (assumed in `S_nu`) splits as a `t`-smooth part `<= tau`
/// times a `t`-rough part with `1 ..= w_max` prime factors.
fn sharp_hit(seg: &FactoredSegment, i: usize, th: &Thresholds) -> bool {
    let mut smooth = 1u64;
    let mut rough = 0u32;
    for (p, e) in seg.factors(i) {
        if p <= th.t {
            // p^e divides n, so this cannot overflow
            smooth *= p.pow(e);
        } else {
            rough += 1;
        }
    }
    rough >= 1 && rough <= th.w_max && smooth <= th.tau
}

/// One factor-list pass over `(x, x+y]` evaluating `M'` and `M#` for every
/// `(nu, thresholds)` pair. Returns `(M' tally, M# tally)` per entry.
pub fn sweep_with(x: u64, y: u64, configs: &[(u32, Thresholds)]) -> Result<Vec<(Tally, Tally)>> {
    if configs.iter().any(|c| c.0 == 0) {
        return Err(Error::Precondition("nu must be at least 1".into()));
    }
    let table = PrimeTable::for_interval(x, y)?;
    let k = configs.len();
    let parts = map_segments(x, y, &table, SieveOptions::with_factors(), |seg| {
        let mut acc = vec![[0u64; 5]; k];
        for i in 0..seg.len() {
            let om = seg.omega[i] as u32;
            for (slot, (nu, th)) in acc.iter_mut().zip(configs) {
                // M' needs omega(n) in {nu - 1, nu}
                if om + 1 < *nu || om > *nu {
                    continue;
                }
                let pairs = prime_pairs(seg, i, *nu, th.tau);
                slot[0] += pairs;
                if om == *nu {
                    slot[1] += (pairs > 0) as u64;
                    slot[2] += 1;
                    slot[3] += sharp_hit(seg, i, th) as u64;
                }
            }
        }
        acc
    })?;
    let mut total = vec![[0u64; 5]; k];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part) {
            for j in 0..5 {
                t[j] += p[j];
            }
        }
    }
    Ok(total
        .into_iter()
        .map(|t| ((t[0], t[1], t[2]), (t[3], t[3], t[2])))
        .collect())
}

/// `M'_nu(x, y)` with an explicit `tau`: the number of pairs `(m, p)` with
/// `p` prime, `m <= tau`, `omega(m) = nu - 1` and `m p in (x, x+y]`.
pub fn minorant_prime_with(x: u64, y: u64, nu: u32, tau: u64) -> Result<Tally> {
    let th = Thresholds { tau, t: 0, w_max: 0 };
    Ok(sweep_with(x, y, &[(nu, th)])?[0].0)
}

/// `M#_nu(x, y)` with explicit thresholds.
pub fn minorant_sharp_with(x: u64, y: u64, nu: u32, th: Thresholds) -> Result<Tally> {
    Ok(sweep_with(x, y, &[(nu, th)])?[0].1)
}

fn report(x: u64, y: u64, nu: u32, r: &Resolved, tally: Tally, sharp: bool) -> MinorantReport {
    MinorantReport {
        x,
        y,
        nu,
        params: r.params,
        thresholds: r.thresholds,
        tau_clamped: r.tau_clamped,
        t_clamped: r.t_clamped,
        degenerate: sharp && r.thresholds.w_max == 0,
        count: tally.0,
        distinct: tally.1,
        target: tally.2,
    }
}

pub fn minorant_prime(x: u64, y: u64, nu: u32, opts: &MinorantOptions) -> Result<MinorantReport> {
    Ok(minorant_sweep(x, y, &[nu], 4.5, opts)?.remove(0).0)
}

pub fn minorant_sharp(x: u64, y: u64, nu: u32, a: f64, opts: &MinorantOptions) -> Result<MinorantReport> {
    Ok(minorant_sweep(x, y, &[nu], a, opts)?.remove(0).1)
}

/// `(M', M#)` reports for several `nu` from a single sieve pass, each with
/// its own parameters computed from `(x, nu, a)`.
pub fn minorant_sweep(
    x: u64,
    y: u64,
    nus: &[u32],
    a: f64,
    opts: &MinorantOptions,
) -> Result<Vec<(MinorantReport, MinorantReport)>> {
    if !(a > 4.0) {
        return Err(Error::Precondition(format!("a = {a} must exceed 4")));
    }
    let resolved = nus.iter().map(|&nu| resolve(x, nu, a, opts)).collect::<Result<Vec<_>>>()?;
    for (nu, r) in nus.iter().zip(&resolved) {
        if r.thresholds.w_max == 0 {
            log::warn!("ell_nu(x) = {} < 1 for nu = {nu}, x = {x}: M# is an empty sum", r.params.ell_nu);
        }
    }
    let configs: Vec<(u32, Thresholds)> = nus.iter().zip(&resolved).map(|(&nu, r)| (nu, r.thresholds)).collect();
    let tallies = sweep_with(x, y, &configs)?;
    Ok(nus
        .iter()
        .zip(&resolved)
        .zip(tallies)
        .map(|((&nu, r), (tp, ts))| (report(x, y, nu, r, tp, false), report(x, y, nu, r, ts, true)))
        .collect())
}
