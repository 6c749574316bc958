//! Hildebrand-Tenenbaum density `delta_nu(x)` and the Euler products behind it.
//!
//! Everything is carried in natural-log space. Euler products are summed over
//! the primes up to `prime_limit` and the remaining primes are replaced by a
//! smooth model built from Riemann's `R(t)`:
//!
//! ```text
//! sum_{p > P} p^{-s}  ~  sum_{n <= 10} mu(n)/n * E1((s - 1/n) log P) + (R(P) - pi(P)) P^{-s}
//! ```
//!
//! The first omitted term of the expansion of each local factor serves as the
//! truncation error estimate. When it exceeds `tail_tolerance` (relative) the
//! prime limit is doubled.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{big_l, exp_integral_e1, ln_gamma, ln_phi, log2, mobius, riemann_r, CompensatedSum};
use crate::sieve::{PrimeTable, CACHE_DIR_ENV};

/// Upper end of the adaptive prime-limit doubling.
pub const MAX_PRIME_LIMIT: u64 = 1 << 31;

const CHUNK: usize = 1 << 13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerProductConfig {
    pub prime_limit: u64,
    pub tail_tolerance: f64,
    pub max_newton_iterations: u32,
    pub newton_tolerance: f64,
}

impl Default for EulerProductConfig {
    fn default() -> Self {
        EulerProductConfig {
            prime_limit: 1 << 22,
            tail_tolerance: 1e-5,
            max_newton_iterations: 100,
            newton_tolerance: 1e-11,
        }
    }
}

impl EulerProductConfig {
    pub fn validate(&self) -> Result<()> {
        if self.prime_limit < 100_000 || self.prime_limit > MAX_PRIME_LIMIT {
            return Err(Error::Parameter(format!(
                "prime_limit = {} outside [10^5, 2^31]",
                self.prime_limit
            )));
        }
        for (name, v) in [("tail_tolerance", self.tail_tolerance), ("newton_tolerance", self.newton_tolerance)] {
            if !(v > 0.0 && v <= 1e-4) {
                return Err(Error::Parameter(format!("{name} = {v} outside (0, 1e-4]")));
            }
        }
        if self.max_newton_iterations == 0 {
            return Err(Error::Parameter("max_newton_iterations must be positive".into()));
        }
        Ok(())
    }

    fn with_limit(&self, prime_limit: u64) -> Self {
        EulerProductConfig { prime_limit, ..*self }
    }
}

/// `log p` for every prime up to a limit, plus the boundary term `R(P) - pi(P)`.
struct PrimeLogs {
    ln_p: Vec<f64>,
    ln_limit: f64,
    boundary: f64,
}

static PRIME_LOGS: Lazy<Mutex<HashMap<u64, Arc<PrimeLogs>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn prime_logs(limit: u64) -> Result<Arc<PrimeLogs>> {
    if let Some(hit) = PRIME_LOGS.lock().unwrap().get(&limit) {
        return Ok(hit.clone());
    }
    let dir = std::env::var_os(CACHE_DIR_ENV).map(std::path::PathBuf::from);
    let table = PrimeTable::load_or_build(limit, dir.as_deref())?;
    let ln_p: Vec<f64> = table.primes().iter().map(|&p| (p as f64).ln()).collect();
    let logs = Arc::new(PrimeLogs {
        boundary: riemann_r(limit as f64) - ln_p.len() as f64,
        ln_p,
        ln_limit: (limit as f64).ln(),
    });
    PRIME_LOGS.lock().unwrap().insert(limit, logs.clone());
    Ok(logs)
}

/// `sum_{p > P} p^{-s}` and its first two derivatives in `s`.
#[derive(Debug, Clone, Copy)]
struct PrimeZetaTail {
    value: f64,
    d1: f64,
    d2: f64,
}

const MOBIUS_TERMS: u64 = 10;

fn prime_zeta_tail(s: f64, logs: &PrimeLogs) -> PrimeZetaTail {
    let l = logs.ln_limit;
    let (mut value, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for n in 1..=MOBIUS_TERMS {
        let mu = mobius(n);
        if mu == 0 {
            continue;
        }
        let c = mu as f64 / n as f64;
        let sigma = s - 1.0 / n as f64;
        let z = sigma * l;
        let ez = (-z).exp();
        value += c * exp_integral_e1(z);
        d1 += c * (-ez / sigma);
        d2 += c * ez * (l / sigma + 1.0 / (sigma * sigma));
    }
    let b = logs.boundary * (-s * l).exp();
    PrimeZetaTail {
        value: value + b,
        d1: d1 - b * l,
        d2: d2 + b * l * l,
    }
}

/// `sum_{p > P} p^{-2s}` via its leading integral only.
fn square_tail(s: f64, logs: &PrimeLogs) -> PrimeZetaTail {
    let l = logs.ln_limit;
    let sigma = 2.0 * s - 1.0;
    let z = sigma * l;
    let ez = (-z).exp();
    PrimeZetaTail {
        value: exp_integral_e1(z),
        d1: -2.0 * ez / sigma,
        d2: 4.0 * l * ez / sigma + 4.0 * ez / (sigma * sigma),
    }
}

/// `log G(e^u, a)` with its gradient and Hessian in `(u, a)`.
#[derive(Debug, Clone, Copy)]
struct LogGJet {
    f: f64,
    fu: f64,
    fa: f64,
    fuu: f64,
    fua: f64,
    faa: f64,
    tail_error: f64,
}

fn log_g_jet(u: f64, a: f64, logs: &PrimeLogs) -> LogGJet {
    let r = u.exp();
    let partials: Vec<[CompensatedSum; 6]> = logs
        .ln_p
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = [CompensatedSum::new(); 6];
            for &lp in chunk {
                let q = (-a * lp).exp();
                let y = r * q / (1.0 - q);
                let h = y / (1.0 + y);
                let h2 = h / (1.0 + y);
                let k = lp / (1.0 - q);
                acc[0].add(y.ln_1p());
                acc[1].add(h);
                acc[2].add(-k * h);
                acc[3].add(h2);
                acc[4].add(-k * h2);
                acc[5].add(lp * lp * q / ((1.0 - q) * (1.0 - q)) * h + k * k * h2);
            }
            acc
        })
        .collect();
    let mut acc = [CompensatedSum::new(); 6];
    for part in &partials {
        for (a, p) in acc.iter_mut().zip(part) {
            a.merge(p);
        }
    }

    let t1 = prime_zeta_tail(a, logs);
    let t2 = square_tail(a, logs);
    let r2 = r * r;
    let c2 = r - r2 / 2.0;
    let c2u = r - r2;
    let c2uu = r - 2.0 * r2;

    let omitted = (r - r2 + r2 * r / 3.0).abs() * exp_integral_e1((3.0 * a - 1.0) * logs.ln_limit);
    let mobius_cut = r * exp_integral_e1((a - 1.0 / (MOBIUS_TERMS + 1) as f64) * logs.ln_limit) / (MOBIUS_TERMS + 1) as f64;

    LogGJet {
        f: acc[0].value() + r * t1.value + c2 * t2.value,
        fu: acc[1].value() + r * t1.value + c2u * t2.value,
        fa: acc[2].value() + r * t1.d1 + c2 * t2.d1,
        fuu: acc[3].value() + r * t1.value + c2uu * t2.value,
        fua: acc[4].value() + r * t1.d1 + c2u * t2.d1,
        faa: acc[5].value() + r * t1.d2 + c2 * t2.d2,
        tail_error: omitted + mobius_cut,
    }
}

fn tail_ok(value: f64, err: f64, tol: f64) -> bool {
    err <= tol * value.abs().max(1.0)
}

/// `log G(z, s)` where `G(z, s) = sum z^{omega(n)} n^{-s} = prod_p (1 + z/(p^s - 1))`.
pub fn big_g(z: f64, s: f64, cfg: &EulerProductConfig) -> Result<f64> {
    cfg.validate()?;
    if !(s > 1.0) {
        return Err(Error::Divergence(format!("G(z, s) diverges for s = {s} <= 1")));
    }
    if !(z >= 0.0) {
        return Err(Error::Precondition(format!("G(z, s) needs z >= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let mut limit = cfg.prime_limit;
    loop {
        let jet = log_g_jet(z.ln(), s, &*prime_logs(limit)?);
        if tail_ok(jet.f, jet.tail_error, cfg.tail_tolerance) {
            return Ok(jet.f);
        }
        limit = next_limit(limit, jet.tail_error, jet.f, "G")?;
    }
}

fn next_limit(limit: u64, err: f64, value: f64, what: &str) -> Result<u64> {
    if limit * 2 > MAX_PRIME_LIMIT {
        return Err(Error::Convergence {
            iterations: 0,
            last_r: f64::NAN,
            last_a: f64::NAN,
            reason: format!("{what}: tail error {err:e} on value {value} still above tolerance at prime limit {limit}"),
        });
    }
    log::debug!("{what}: doubling prime limit {limit} (tail error {err:e})");
    Ok(limit * 2)
}

/// Access to the smooth prime model beyond the current prime limit.
pub(crate) struct TailModel<'a>(&'a PrimeLogs);

impl TailModel<'_> {
    /// `sum_{p > P} p^{-s}`, `s > 1`.
    pub(crate) fn prime_zeta(&self, s: f64) -> f64 {
        prime_zeta_tail(s, self.0).value
    }

    pub(crate) fn ln_limit(&self) -> f64 {
        self.0.ln_limit
    }
}

/// `sum_p local(p)` over the primes up to the prime limit plus `tail`, which
/// returns the model for the remaining primes and its error estimate. The
/// prime limit is doubled until the estimate is within tolerance.
pub(crate) fn log_euler_product(
    cfg: &EulerProductConfig,
    what: &str,
    local: impl Fn(f64) -> f64 + Sync,
    tail: impl Fn(&TailModel) -> (f64, f64),
) -> Result<f64> {
    cfg.validate()?;
    let mut limit = cfg.prime_limit;
    loop {
        let logs = prime_logs(limit)?;
        let partials: Vec<CompensatedSum> = logs
            .ln_p
            .par_chunks(CHUNK)
            .map(|chunk| chunk.iter().map(|&lp| local(lp.exp().round())).collect())
            .collect();
        let mut acc = CompensatedSum::new();
        for part in &partials {
            acc.merge(part);
        }
        let (t, err) = tail(&TailModel(&logs));
        acc.add(t);
        let value = acc.value();
        if !value.is_finite() {
            return Err(Error::Divergence(format!("{what}: non-finite Euler product")));
        }
        if tail_ok(value, err, cfg.tail_tolerance) {
            return Ok(value);
        }
        limit = next_limit(limit, err, value, what)?;
    }
}

/// `log H(s)`, `H(s) = Gamma(s+1)^{-1} prod_p (1 + s/(p-1)) (1 - 1/p)^s`.
pub fn euler_h(s: f64, cfg: &EulerProductConfig) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Precondition(format!("H(s) needs s >= 0, got {s}")));
    }
    let sum = log_euler_product(
        cfg,
        "H",
        |p| (s / (p - 1.0)).ln_1p() + s * (-1.0 / p).ln_1p(),
        // local factor = 1 + (s - s^2)/2 p^{-2} + O(p^{-3})
        |tail| {
            (
                (s - s * s) / 2.0 * tail.prime_zeta(2.0),
                (s.powi(3).abs() + s.abs()) * exp_integral_e1(2.0 * tail.ln_limit()),
            )
        },
    )?;
    Ok(sum - ln_gamma(s + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddlePoint {
    pub nu: u32,
    pub log_x: f64,
    pub rho: f64,
    pub alpha: f64,
    /// `d/d(log r)` of the objective at `(rho, alpha)`.
    pub residual_r: f64,
    /// `d/da` of the objective at `(rho, alpha)`.
    pub residual_a: f64,
    pub iterations: u32,
    /// `log G(rho, alpha)`.
    pub log_g: f64,
    /// Whether `nu <= log x / (log log x)^2`, the range of the asymptotic formula.
    pub in_range: bool,
    /// The configuration actually used (after any prime-limit doubling).
    pub truncation: EulerProductConfig,
}

/// `log G(r, a) + a log x - nu log r`.
pub fn saddle_objective(nu: u32, log_x: f64, r: f64, a: f64, cfg: &EulerProductConfig) -> Result<f64> {
    Ok(big_g(r, a, cfg)? + a * log_x - nu as f64 * r.ln())
}

/// `log x / (log log x)^2`.
pub fn script_l2(log_x: f64) -> f64 {
    crate::numeric::script_l(2.0, log_x)
}

/// Minimise `G(r, a) x^a r^{-nu}` over `(0, inf) x (1, inf)`.
///
/// The minimiser exists for every `nu >= 1`, so points beyond
/// `log x / (log log x)^2` are solved as well and flagged with `in_range = false`.
pub fn solve_saddle(nu: u32, log_x: f64, cfg: &EulerProductConfig) -> Result<SaddlePoint> {
    cfg.validate()?;
    if nu == 0 {
        return Err(Error::Precondition("saddle point needs nu >= 1".into()));
    }
    if !(log_x >= 10.0) {
        return Err(Error::Precondition(format!("saddle point needs log x >= 10, got {log_x}")));
    }
    let primorial = log_primorial(nu);
    if primorial > log_x {
        return Err(Error::Range(format!(
            "the first {nu} primes multiply to e^{primorial:.3} > x, so no saddle point exists"
        )));
    }
    let l = big_l(nu, log_x);
    let rho0 = if l > 1.0 { nu as f64 / l } else { nu as f64 };
    let mut start = (rho0.ln(), (rho0 / log_x).ln());
    let mut limit = cfg.prime_limit;
    let mut total_iters = 0;
    loop {
        let logs = prime_logs(limit)?;
        let (u, w, jet, iters) = newton(nu, log_x, cfg, &logs, start)?;
        total_iters += iters;
        let a = 1.0 + w.exp();
        if tail_ok(jet.f, jet.tail_error, cfg.tail_tolerance) {
            return Ok(SaddlePoint {
                nu,
                log_x,
                rho: u.exp(),
                alpha: a,
                residual_r: jet.fu - nu as f64,
                residual_a: jet.fa + log_x,
                iterations: total_iters,
                log_g: jet.f,
                in_range: nu as f64 <= script_l2(log_x),
                truncation: cfg.with_limit(limit),
            });
        }
        limit = next_limit(limit, jet.tail_error, jet.f, "saddle")?;
        start = (u, w);
    }
}

/// `log` of the product of the first `nu` primes.
pub fn log_primorial(nu: u32) -> f64 {
    let mut sum = CompensatedSum::new();
    let mut found = 0;
    let mut n = 2u64;
    while found < nu {
        if (2..).take_while(|d| d * d <= n).all(|d| n % d != 0) {
            sum.add((n as f64).ln());
            found += 1;
        }
        n += 1;
    }
    sum.value()
}

struct Objective<'a> {
    nu: f64,
    log_x: f64,
    logs: &'a PrimeLogs,
}

impl Objective<'_> {
    fn at(&self, u: f64, w: f64) -> (f64, LogGJet) {
        let a = 1.0 + w.exp();
        let jet = log_g_jet(u, a, self.logs);
        (jet.f + a * self.log_x - self.nu * u, jet)
    }

    fn grad_u(&self, jet: &LogGJet) -> f64 {
        jet.fu - self.nu
    }

    fn grad_a(&self, jet: &LogGJet) -> f64 {
        jet.fa + self.log_x
    }
}

/// Damped Newton in `(u, w) = (log r, log(a - 1))`.
fn newton(
    nu: u32,
    log_x: f64,
    cfg: &EulerProductConfig,
    logs: &PrimeLogs,
    start: (f64, f64),
) -> Result<(f64, f64, LogGJet, u32)> {
    let obj = Objective {
        nu: nu as f64,
        log_x,
        logs,
    };
    // The a-equation balances sums of size log x, so its attainable accuracy
    // degrades linearly once log x is large.
    let tol_u = cfg.newton_tolerance * (nu as f64 / 20.0).max(1.0);
    let tol_a = cfg.newton_tolerance * (log_x / 20.0).max(1.0);
    let (mut u, mut w) = start;
    let (mut f, mut jet) = obj.at(u, w);
    for it in 0..cfg.max_newton_iterations {
        let gu = obj.grad_u(&jet);
        let ga = obj.grad_a(&jet);
        if gu.abs() <= tol_u && ga.abs() <= tol_a.max(resolution(&jet, w)) {
            return Ok((u, w, jet, it));
        }
        let ew = w.exp();
        let gw = ga * ew;
        let huu = jet.fuu;
        let huw = jet.fua * ew;
        let hww = jet.faa * ew * ew + ga * ew;
        let det = huu * hww - huw * huw;
        let (mut du, mut dw) = if huu > 0.0 && det > 0.0 {
            (-(hww * gu - huw * gw) / det, -(huu * gw - huw * gu) / det)
        } else {
            (-gu, -gw)
        };
        let scale = du.abs().max(dw.abs());
        if scale > 2.0 {
            du *= 2.0 / scale;
            dw *= 2.0 / scale;
        }
        let slope = gu * du + gw * dw;
        let slack = 64.0 * f64::EPSILON * f.abs().max(1.0);
        let mut accepted = false;
        let mut t = 1.0;
        for _ in 0..60 {
            let (ft, jt) = obj.at(u + t * du, w + t * dw);
            if ft.is_finite() && ft <= f + 1e-4 * t * slope + slack {
                u += t * du;
                w += t * dw;
                f = ft;
                jet = jt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            log::debug!("saddle: line search failed at iteration {it}, falling back to coordinate bisection");
            u = bisect_coordinate(|uu| obj.grad_u(&obj.at(uu, w).1), u);
            w = bisect_coordinate(|ww| obj.grad_a(&obj.at(u, ww).1), w);
            let (fnew, jnew) = obj.at(u, w);
            f = fnew;
            jet = jnew;
        }
    }
    let gu = obj.grad_u(&jet);
    let ga = obj.grad_a(&jet);
    if gu.abs() <= tol_u && ga.abs() <= tol_a.max(resolution(&jet, w)) {
        return Ok((u, w, jet, cfg.max_newton_iterations));
    }
    Err(Error::Convergence {
        iterations: cfg.max_newton_iterations as usize,
        last_r: u.exp(),
        last_a: 1.0 + w.exp(),
        reason: format!("residuals ({gu:e}, {ga:e}) above ({tol_u:e}, {tol_a:e})"),
    })
}

/// Change in the a-residual caused by one ulp of `a`: when `a - 1` is tiny
/// the a-equation cannot be resolved more finely than this.
fn resolution(jet: &LogGJet, w: f64) -> f64 {
    8.0 * f64::EPSILON * (1.0 + w.exp()) * jet.faa.abs()
}

/// Root of an increasing function by bracketing outward from `x0` then bisecting.
fn bisect_coordinate(g: impl Fn(f64) -> f64, x0: f64) -> f64 {
    let g0 = g(x0);
    if g0 == 0.0 || !g0.is_finite() {
        return x0;
    }
    let dir = if g0 > 0.0 { -1.0 } else { 1.0 };
    let mut step = 0.5;
    let mut far = x0 + dir * step;
    let mut found = false;
    for _ in 0..60 {
        let gf = g(far);
        if gf.is_finite() && gf.signum() != g0.signum() {
            found = true;
            break;
        }
        step *= 2.0;
        far = x0 + dir * step;
    }
    if !found {
        return x0;
    }
    let (mut lo, mut hi) = if dir > 0.0 { (x0, far) } else { (far, x0) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Saddle,
    SmallNuSeries,
    Landau,
    Crude,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Saddle => "saddle",
            Regime::SmallNuSeries => "smallNuSeries",
            Regime::Landau => "landau",
            Regime::Crude => "crude",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate {
    pub nu: u32,
    pub log_x: f64,
    /// Natural log of `delta_nu(x)`.
    pub log_delta: f64,
    pub regime: Regime,
    /// `min(1, 1/L_nu(x))`, or 1 when `L_nu(x) <= 0`.
    pub error_scale: f64,
    /// `e_nu(x)` solved from `delta = (e L)^{nu-1} / ((nu-1)! log x)`. Undefined
    /// for `nu = 1`, for `L_nu(x) <= 0` and in the Landau regime.
    pub e_nu: Option<f64>,
    pub saddle: Option<SaddlePoint>,
}

impl DensityEstimate {
    fn new(nu: u32, log_x: f64, log_delta: f64, regime: Regime, saddle: Option<SaddlePoint>) -> Result<Self> {
        if !log_delta.is_finite() {
            return Err(Error::Domain(format!("log density {log_delta} for nu = {nu}, log x = {log_x}")));
        }
        let l = big_l(nu, log_x);
        let error_scale = if l > 0.0 { (1.0 / l).min(1.0) } else { 1.0 };
        let e_nu = match regime {
            Regime::Landau => None,
            _ => implicit_e_nu(nu, log_x, log_delta),
        };
        Ok(DensityEstimate {
            nu,
            log_x,
            log_delta,
            regime,
            error_scale,
            e_nu,
            saddle,
        })
    }

    pub fn density(&self) -> f64 {
        self.log_delta.exp()
    }
}

fn implicit_e_nu(nu: u32, log_x: f64, log_delta: f64) -> Option<f64> {
    let l = big_l(nu, log_x);
    if nu < 2 || l <= 0.0 {
        return None;
    }
    let k = (nu - 1) as f64;
    Some(((log_delta + ln_gamma(nu as f64) + log_x.ln()) / k).exp() / l)
}

/// The Hildebrand-Tenenbaum formula at the saddle point.
pub fn density_ht(nu: u32, log_x: f64, cfg: &EulerProductConfig) -> Result<DensityEstimate> {
    let sp = solve_saddle(nu, log_x, cfg)?;
    let nuf = nu as f64;
    let log_delta = sp.log_g + (sp.alpha - 1.0) * log_x
        - nuf * sp.rho.ln()
        - nuf.ln()
        - ln_phi(nuf)
        - ln_phi(sp.rho)
        - log_x.ln();
    DensityEstimate::new(nu, log_x, log_delta, Regime::Saddle, Some(sp))
}

/// The series form valid for `nu < (log log x)^2`.
pub fn density_small_nu(nu: u32, log_x: f64, cfg: &EulerProductConfig) -> Result<DensityEstimate> {
    let ll = log2(log_x);
    if nu == 0 || nu as f64 >= ll * ll {
        return Err(Error::Precondition(format!(
            "small-nu series needs 1 <= nu < (log log x)^2 = {}, got {nu}",
            ll * ll
        )));
    }
    let sp = solve_saddle(nu, log_x, cfg)?;
    let nuf = nu as f64;
    let u = nuf / ll;
    let gamma = (sp.rho - u) / u;
    if gamma <= -1.0 {
        return Err(Error::Domain(format!("gamma = {gamma} <= -1 at rho = {}", sp.rho)));
    }
    let log_delta = nuf * ll.ln() - ln_gamma(nuf + 1.0) - log_x.ln()
        + sp.rho.ln()
        + euler_h(sp.rho, &sp.truncation)?
        + nuf * (gamma - gamma.ln_1p());
    DensityEstimate::new(nu, log_x, log_delta, Regime::SmallNuSeries, Some(sp))
}

/// Landau's density `s_nu(x) = (log log x)^{nu-1} / ((nu-1)! log x)`.
pub fn density_landau(nu: u32, log_x: f64) -> Result<DensityEstimate> {
    if nu == 0 {
        return Err(Error::Precondition("Landau density needs nu >= 1".into()));
    }
    let k = (nu - 1) as f64;
    let log_delta = k * log2(log_x).ln() - ln_gamma(nu as f64) - log_x.ln();
    DensityEstimate::new(nu, log_x, log_delta, Regime::Landau, None)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrudeBracket {
    pub e_lower: f64,
    pub e_upper: f64,
}

impl Default for CrudeBracket {
    fn default() -> Self {
        CrudeBracket {
            e_lower: 0.5,
            e_upper: 2.0,
        }
    }
}

/// `log[(e L)^{nu-1} / ((nu-1)! log x)]` for `e` at both ends of the bracket.
///
/// Requires `L_nu(x) > 0`, which is weaker than `nu <= log x / (log log x)^2`.
pub fn density_crude_bounds(nu: u32, log_x: f64, bracket: CrudeBracket) -> Result<(f64, f64)> {
    if nu == 0 {
        return Err(Error::Precondition("crude bounds need nu >= 1".into()));
    }
    let l = big_l(nu, log_x);
    if l <= 0.0 {
        return Err(Error::Range(format!("L_nu(x) = {l} <= 0 for nu = {nu}, log x = {log_x}")));
    }
    let k = (nu - 1) as f64;
    let base = -ln_gamma(nu as f64) - log_x.ln();
    Ok((
        base + k * (bracket.e_lower * l).ln(),
        base + k * (bracket.e_upper * l).ln(),
    ))
}

/// Predicted `log(delta_nu(m x) / delta_nu(x)) = (nu/L - 1) log(log(m x)/log x)`.
pub fn density_homothety(nu: u32, log_x: f64, m: u64) -> Result<f64> {
    if m == 0 || (m as f64).ln() > log_x {
        return Err(Error::Precondition(format!("homothety needs 1 <= m <= x, got m = {m}")));
    }
    let l = big_l(nu, log_x);
    if l <= 0.0 {
        return Err(Error::Range(format!("L_nu(x) = {l} <= 0 for nu = {nu}")));
    }
    let log_mx = log_x + (m as f64).ln();
    Ok((nu as f64 / l - 1.0) * (log_mx / log_x).ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomothetyCheck {
    pub predicted: f64,
    pub direct: f64,
}

/// The homothety prediction next to `log delta_nu(mx) - log delta_nu(x)` from the saddle formula.
pub fn homothety_check(nu: u32, log_x: f64, m: u64, cfg: &EulerProductConfig) -> Result<HomothetyCheck> {
    let predicted = density_homothety(nu, log_x, m)?;
    let a = density_ht(nu, log_x, cfg)?;
    let b = density_ht(nu, log_x + (m as f64).ln(), cfg)?;
    Ok(HomothetyCheck {
        predicted,
        direct: b.log_delta - a.log_delta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HtParameters {
    pub l: f64,
    pub m: f64,
    pub r: f64,
    pub u: f64,
    pub mu: f64,
    pub w: f64,
    pub gamma: f64,
}

/// The auxiliary quantities `L, M, R, u, mu, w, gamma`; `c` is the absolute
/// constant inside `M`.
pub fn ht_parameters_with(nu: u32, log_x: f64, rho: f64, c: f64) -> Result<HtParameters> {
    let l = big_l(nu, log_x);
    if !(l > 0.0) {
        return Err(Error::Range(format!("L_nu(x) = {l} <= 0 for nu = {nu}, log x = {log_x}")));
    }
    let nuf = nu as f64;
    let u = nuf / log2(log_x);
    let mu = nuf / l;
    let w = log_x / (mu * (mu + 2.0).ln());
    Ok(HtParameters {
        l,
        m: (c * w * w.ln() / l).ln(),
        r: 1.0 / (l * (mu + 2.0).ln()) + 1.0 / (l * l),
        u,
        mu,
        w,
        gamma: (rho - u) / u,
    })
}

pub fn ht_parameters(nu: u32, log_x: f64, rho: f64) -> Result<HtParameters> {
    ht_parameters_with(nu, log_x, rho, 1.0)
}

/// Main term of the large-`nu` form, `nu (log M + 1/M) - log nu! - log log x`,
/// with the `O(R)` term dropped. Diagnostic only: it is not an asymptotic formula.
pub fn large_nu_diagnostic(nu: u32, log_x: f64) -> Result<f64> {
    let p = ht_parameters(nu, log_x, f64::NAN)?;
    if !(p.m > 0.0) {
        return Err(Error::Domain(format!(
            "M = {} is not positive for nu = {nu}, log x = {log_x}",
            p.m
        )));
    }
    let nuf = nu as f64;
    Ok(nuf * (p.m.ln() + 1.0 / p.m) - ln_gamma(nuf + 1.0) - log_x.ln())
}
