//! `tau_k`, short-interval divisor sums with prime-factor caps, and the square
//! harmonic sum `sum_m tau_k(m^2) / m^2`.

use num_bigint::BigUint;

use crate::density::{log_euler_product, EulerProductConfig};
use crate::error::{Error, Result};
use crate::numeric::{big_l, exp_integral_e1, script_l, CompensatedSum, EULER_GAMMA};
use crate::sieve::{factorize, map_segments, PrimeTable, SieveOptions};

/// `C(n, r)` in `u128`, `None` on overflow.
fn binomial(n: u64, r: u64) -> Option<u128> {
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `tau_k` of a number given by its factorisation.
pub fn tau_k_from_factors(factors: impl IntoIterator<Item = (u64, u32)>, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::Precondition("tau_k needs k >= 1".into()));
    }
    let mut acc: u64 = 1;
    for (_, e) in factors {
        let c = binomial(e as u64 + k as u64 - 1, k as u64 - 1)
            .and_then(|c| u64::try_from(c).ok())
            .ok_or_else(|| Error::Overflow(format!("C({}, {}) exceeds 64 bits", e + k - 1, k - 1)))?;
        acc = acc
            .checked_mul(c)
            .ok_or_else(|| Error::Overflow(format!("tau_{k} exceeds 64 bits")))?;
    }
    Ok(acc)
}

/// `tau_k(n) = prod_{p^e || n} C(e + k - 1, k - 1)`.
pub fn tau_k(n: u64, k: u32, table: &PrimeTable) -> Result<u64> {
    if n == 0 {
        return Err(Error::Precondition("tau_k needs n >= 1".into()));
    }
    tau_k_from_factors(factorize(n, table)?, k)
}

/// Arbitrary-precision `tau_k(n)` for when the 64-bit value overflows.
pub fn tau_k_big(n: u64, k: u32, table: &PrimeTable) -> Result<BigUint> {
    if n == 0 || k == 0 {
        return Err(Error::Precondition("tau_k needs n, k >= 1".into()));
    }
    let mut acc = BigUint::from(1u32);
    for (_, e) in factorize(n, table)? {
        let top = e as u64 + k as u64 - 1;
        let r = (k as u64 - 1).min(e as u64);
        let mut c = BigUint::from(1u32);
        for i in 0..r {
            c = c * BigUint::from(top - i) / BigUint::from(i + 1);
        }
        acc *= c;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CapMode {
    /// `omega(n) <= cap`, bounded by the sharper form.
    Omega,
    /// `Omega(n) <= cap`.
    BigOmega,
    None,
}

impl CapMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CapMode::Omega => "omega",
            CapMode::BigOmega => "bigOmega",
            CapMode::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorBoundParams {
    /// `B` in `(log(Bk))^{11k}`.
    pub b: f64,
    /// `gamma` and `epsilon` of the sharp form.
    pub gamma: f64,
    pub epsilon: f64,
}

impl Default for DivisorBoundParams {
    fn default() -> Self {
        DivisorBoundParams {
            b: 10.0,
            gamma: 6.0,
            epsilon: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorSumReport {
    pub x: u64,
    pub y: u64,
    pub k: u32,
    /// `script L_a(x)`.
    pub cap: f64,
    pub cap_mode: CapMode,
    pub total: f64,
    /// The same total as an exact integer, when it fits.
    pub exact_total: Option<u128>,
    /// Integers of the interval that passed the cap.
    pub terms: u64,
    /// Natural log of the right-hand side.
    pub log_paper_bound: f64,
    pub within_bound: bool,
}

impl DivisorSumReport {
    /// `total / bound`, the measured constant.
    pub fn bound_ratio(&self) -> f64 {
        (self.total.ln() - self.log_paper_bound).exp()
    }
}

/// `log[y (log(Bk))^{11k} (log x)^{2+k}]`.
pub fn log_short_div_bound(x: u64, y: u64, k: u32, b: f64) -> f64 {
    let kf = k as f64;
    (y as f64).ln() + 11.0 * kf * (b * kf).ln().ln() + (2.0 + kf) * (x as f64).ln().ln()
}

/// `log[y (log k)^{11k} exp((gamma + eps)/(gamma - 1) k L_k(x))]`.
pub fn log_sharp_div_bound(x: u64, y: u64, k: u32, gamma: f64, epsilon: f64) -> f64 {
    let kf = k as f64;
    (y as f64).ln() + 11.0 * kf * kf.ln().ln() + (gamma + epsilon) / (gamma - 1.0) * kf * big_l(k, (x as f64).ln())
}

/// `sum tau_k(n)` over `n in (x, x+y]` with `omega(n)` (or `Omega(n)`) at most
/// `script L_a(x)`.
pub fn short_divisor_sum(
    x: u64,
    y: u64,
    k: u32,
    a: f64,
    cap_mode: CapMode,
    bound: &DivisorBoundParams,
) -> Result<DivisorSumReport> {
    let log_x = (x.max(3) as f64).ln();
    short_divisor_sum_capped(x, y, k, script_l(a, log_x), cap_mode, bound)
}

/// As [`short_divisor_sum`] with an explicit cap instead of `script L_a(x)`.
pub fn short_divisor_sum_capped(
    x: u64,
    y: u64,
    k: u32,
    cap: f64,
    cap_mode: CapMode,
    bound: &DivisorBoundParams,
) -> Result<DivisorSumReport> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let cap = match cap_mode {
        CapMode::None => f64::INFINITY,
        _ => cap,
    };
    if cap < 0.0 || cap.is_nan() {
        return Err(Error::Parameter(format!("cap {cap} is negative")));
    }
    let table = PrimeTable::for_interval(x, y)?;
    let parts = map_segments(x, y, &table, SieveOptions::with_factors(), |seg| {
        let mut sum = CompensatedSum::new();
        let mut exact: Option<u128> = Some(0);
        let mut terms = 0u64;
        for i in 0..seg.len() {
            let count = match cap_mode {
                CapMode::Omega => seg.omega[i] as f64,
                CapMode::BigOmega => seg.big_omega[i] as f64,
                CapMode::None => 0.0,
            };
            if count > cap {
                continue;
            }
            terms += 1;
            match tau_k_from_factors(seg.factors(i), k) {
                Ok(t) => {
                    sum.add(t as f64);
                    exact = exact.and_then(|e| e.checked_add(t as u128));
                }
                Err(_) => {
                    // beyond 64 bits only the floating total is kept
                    let t: f64 = seg
                        .factors(i)
                        .map(|(_, e)| binomial_f64(e as u64 + k as u64 - 1, k as u64 - 1))
                        .product();
                    sum.add(t);
                    exact = None;
                }
            }
        }
        (sum, exact, terms)
    })?;
    let mut total = CompensatedSum::new();
    let mut exact: Option<u128> = Some(0);
    let mut terms = 0;
    for (s, e, t) in &parts {
        total.merge(s);
        exact = match (exact, e) {
            (Some(a), Some(b)) => a.checked_add(*b),
            _ => None,
        };
        terms += t;
    }
    let log_paper_bound = match cap_mode {
        CapMode::Omega => log_sharp_div_bound(x, y, k, bound.gamma, bound.epsilon),
        _ => log_short_div_bound(x, y, k, bound.b),
    };
    let total = total.value();
    Ok(DivisorSumReport {
        x,
        y,
        k,
        cap,
        cap_mode,
        total,
        exact_total: exact,
        terms,
        log_paper_bound,
        within_bound: total == 0.0 || total.ln() <= log_paper_bound,
    })
}

fn binomial_f64(n: u64, r: u64) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `sum_{x < n <= x+y} tau(n)` from `D(t) = t log t + (2 gamma - 1) t`:
/// `(x+y) log(x+y) - x log x + (2 gamma - 1) y`.
pub fn dirichlet_mean(x: u64, y: u64) -> f64 {
    let (xf, hf) = (x as f64, (x + y) as f64);
    hf * hf.ln() - xf * xf.ln() + (2.0 * EULER_GAMMA - 1.0) * y as f64
}

/// Local factor `A_k(p) = sum_{j >= 0} tau_k(p^{2j}) p^{-2j}`, summed until the
/// terms drop below `1e-18` relative.
pub fn square_harmonic_local(k: u32, p: f64) -> Result<f64> {
    let x = 1.0 / (p * p);
    let kf = k as f64;
    let mut sum = CompensatedSum::new();
    sum.add(1.0);
    let mut term = 1.0;
    for j in 0..10_000u32 {
        // C(2j+2+k-1, k-1) / C(2j+k-1, k-1)
        let jf = j as f64;
        term *= (2.0 * jf + kf) * (2.0 * jf + kf + 1.0) / ((2.0 * jf + 1.0) * (2.0 * jf + 2.0)) * x;
        sum.add(term);
        if term < 1e-18 * sum.value() {
            return Ok(sum.value());
        }
    }
    Err(Error::Convergence {
        iterations: 10_000,
        last_r: p,
        last_a: term,
        reason: format!("local factor of tau_{k}(m^2)/m^2 at p = {p} does not converge"),
    })
}

/// `log sum_m tau_k(m^2) / m^2 = sum_p log A_k(p)`.
pub fn square_harmonic(k: u32, cfg: &EulerProductConfig) -> Result<f64> {
    if k < 2 {
        return Err(Error::Precondition(format!("square harmonic sum needs k >= 2, got {k}")));
    }
    // the local factor converges for every p >= 2 (ratio -> 1/p^2), so the
    // guard only triggers on absurd k
    let kf = k as f64;
    log_euler_product(
        cfg,
        "square harmonic",
        |p| square_harmonic_local(k, p).map(f64::ln).unwrap_or(f64::NAN),
        // log A_k(p) = k(k+1)/2 p^{-2} + O(k^4 p^{-4})
        |tail| {
            (
                kf * (kf + 1.0) / 2.0 * tail.prime_zeta(2.0),
                kf.powi(4) * exp_integral_e1(3.0 * tail.ln_limit()),
            )
        },
    )
}
