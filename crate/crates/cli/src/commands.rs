//! One function per subcommand. Each returns a finished [`Report`].

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nufactor_core::counts::{histograms_with, star_z, CountRecord};
use nufactor_core::density::{
    density_crude_bounds, density_ht, density_landau, density_small_nu, script_l2, solve_saddle, CrudeBracket,
    DensityEstimate,
};
use nufactor_core::divisor::{
    dirichlet_mean, log_sharp_div_bound, short_divisor_sum, square_harmonic, CapMode, DivisorBoundParams,
};
use nufactor_core::minorants::{minorant_sweep, MinorantOptions};
use nufactor_core::numeric::{big_l, log2, log3};
use nufactor_core::sieve::{factorize, map_segments, shared_table, SieveOptions};

use crate::config::{DensityChoice, ExperimentConfig};
use crate::report::{opt_real, real, Report};
use crate::RunError;

fn log_x_of(x: u64) -> f64 {
    (x.max(3) as f64).ln()
}

/// Theorem-range check shared by `compare` and `divisor`.
fn check_short_interval(cfg: &ExperimentConfig, rep: &mut Report) {
    if cfg.x == 0 || cfg.y >= cfg.x {
        return;
    }
    let lower = (cfg.x as f64).powf(17.0 / 30.0);
    if (cfg.y as f64) < lower {
        warn!("y = {} is below x^(17/30) = {lower:.0}; the short-interval asymptotic is not claimed there", cfg.y);
        rep.shadow(format!("y below x^(17/30) = {lower:.0}"));
    }
}

fn sieve_table(cfg: &ExperimentConfig) -> Result<std::sync::Arc<nufactor_core::sieve::PrimeTable>, RunError> {
    let hi = cfg.x + cfg.y;
    Ok(shared_table(hi.isqrt() + 1)?)
}

/// The density the configured choice selects for one `nu`.
pub fn choose_density(
    nu: u32,
    log_x: f64,
    choice: DensityChoice,
    cfg: &ExperimentConfig,
) -> nufactor_core::Result<DensityEstimate> {
    let ll = log2(log_x);
    match choice {
        DensityChoice::Auto if (nu as f64) < ll * ll => density_small_nu(nu, log_x, &cfg.euler),
        DensityChoice::Auto | DensityChoice::Saddle => density_ht(nu, log_x, &cfg.euler),
        DensityChoice::SmallNu => density_small_nu(nu, log_x, &cfg.euler),
        DensityChoice::Landau => density_landau(nu, log_x),
    }
}

fn base_report(cfg: &ExperimentConfig, columns: &[&'static str]) -> Report {
    Report::new(cfg.header_entries(), columns)
}

pub fn compare(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = base_report(
        cfg,
        &["nu", "exact", "predicted", "ratio", "log_delta", "regime", "error_scale", "in_range", "error"],
    );
    // the long count pi_nu(y) is compared against y delta_nu(y)
    let at = if cfg.x == 0 { cfg.y } else { cfg.x };
    rep.note("density_at", at.to_string());
    if cfg.nu_min > cfg.nu_max {
        return Ok(rep);
    }
    check_short_interval(cfg, &mut rep);
    let log_x = log_x_of(at);
    let l2 = script_l2(log_x);
    let table = sieve_table(cfg)?;
    info!("sieving ({}, {}]", cfg.x, cfg.x + cfg.y);
    let (hist, _) = histograms_with(cfg.x, cfg.y, &table, SieveOptions::default())?;
    for nu in cfg.nu_range() {
        let est = choose_density(nu, log_x, cfg.density, cfg)?;
        let in_range = nu as f64 <= l2;
        if !in_range {
            rep.shadow(format!("nu above log x/(log log x)^2 = {l2:.4}"));
        }
        let rec = CountRecord::new(cfg.x, cfg.y, nu, hist.count(nu as usize), cfg.y as f64 * est.density());
        rep.push(vec![
            nu.to_string(),
            rec.exact.to_string(),
            real(rec.predicted),
            real(rec.ratio),
            real(est.log_delta),
            est.regime.as_str().to_string(),
            real(est.error_scale),
            in_range.to_string(),
            String::new(),
        ]);
    }
    Ok(rep)
}

pub fn minorant(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = base_report(
        cfg,
        &[
            "nu",
            "target",
            "m_prime",
            "m_prime_distinct",
            "capture_prime",
            "capture_prime_distinct",
            "m_sharp",
            "capture_sharp",
            "tau",
            "t",
            "w_max",
            "ell_nu",
            "z_star",
            "tau_clamped",
            "t_clamped",
            "degenerate",
            "error",
        ],
    );
    if cfg.nu_min > cfg.nu_max {
        return Ok(rep);
    }
    let opts = MinorantOptions {
        tau_cap: cfg.tau_cap,
        t_cap: cfg.t_cap,
        force: cfg.force,
    };
    let nus: Vec<u32> = cfg.nu_range().collect();
    let log_x = log_x_of(cfg.x);
    let edge = log2(log_x) / log3(log_x).powf(0.75);
    let all = minorant_sweep(cfg.x, cfg.y, &nus, cfg.a, &opts)?;
    for (p, s) in all {
        if p.tau_clamped {
            rep.note(format!("clamp nu={}", p.nu), format!("tau {} -> {}", real(p.params.tau), p.thresholds.tau));
        }
        if p.t_clamped {
            rep.note(format!("clamp nu={}", p.nu), format!("t {} -> {}", real(p.params.t), p.thresholds.t));
        }
        if p.tau_clamped || p.t_clamped {
            rep.shadow("tau or t clamped below its asymptotic value");
        }
        if cfg.force && p.params.tau >= cfg.x as f64 {
            rep.shadow("tau >= x, forced");
        }
        if s.degenerate {
            rep.shadow("ell_nu(x) < 1, M# is an empty sum");
        }
        if p.nu as f64 > edge {
            rep.shadow(format!("nu above log_2 x/(log_3 x)^(3/4) = {edge:.4}"));
        }
        rep.push(vec![
            p.nu.to_string(),
            p.target.to_string(),
            p.count.to_string(),
            p.distinct.to_string(),
            real(p.capture_ratio()),
            real(p.distinct_capture_ratio()),
            s.count.to_string(),
            real(s.capture_ratio()),
            p.thresholds.tau.to_string(),
            s.thresholds.t.to_string(),
            s.thresholds.w_max.to_string(),
            real(p.params.ell_nu),
            real(star_z(p.nu, cfg.c, log_x)),
            p.tau_clamped.to_string(),
            s.t_clamped.to_string(),
            s.degenerate.to_string(),
            String::new(),
        ]);
    }
    Ok(rep)
}

pub fn divisor(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = base_report(
        cfg,
        &[
            "k",
            "cap",
            "terms",
            "total",
            "exact_total",
            "log_bound",
            "bound_ratio",
            "within_bound",
            "log_sharp_bound",
            "within_sharp_bound",
            "dirichlet_mean",
            "dirichlet_ratio",
            "log_square_harmonic",
            "square_harmonic_within",
            "error",
        ],
    );
    if cfg.k_min > cfg.k_max {
        return Ok(rep);
    }
    check_short_interval(cfg, &mut rep);
    let bound = DivisorBoundParams {
        b: cfg.b,
        gamma: cfg.gamma,
        epsilon: cfg.epsilon,
    };
    for k in cfg.k_min..=cfg.k_max {
        let r = match short_divisor_sum(cfg.x, cfg.y, k, cfg.a, cfg.cap_mode, &bound) {
            Ok(r) => r,
            Err(e) => {
                rep.push_error(vec![k.to_string()], e);
                continue;
            }
        };
        if r.cap < 1.0 && cfg.cap_mode != CapMode::None {
            rep.shadow(format!("cap script-L_a(x) = {:.4} < 1", r.cap));
        }
        let log_sharp = log_sharp_div_bound(cfg.x, cfg.y, k, cfg.gamma, cfg.epsilon);
        // the sharp form only covers the omega cap
        let within_sharp = match cfg.cap_mode {
            CapMode::Omega => (r.total.ln() <= log_sharp).to_string(),
            _ => String::new(),
        };
        // the classical mean is for the full sum, whatever the cap
        let (mean, mean_ratio) = if k == 2 {
            let m = dirichlet_mean(cfg.x, cfg.y);
            let full = if cfg.cap_mode == CapMode::None {
                Ok(r.total)
            } else {
                short_divisor_sum(cfg.x, cfg.y, 2, cfg.a, CapMode::None, &bound).map(|f| f.total)
            };
            match full {
                Ok(t) => (Some(m), Some(t / m)),
                Err(e) => {
                    warn!("uncapped divisor sum: {e}");
                    (Some(m), None)
                }
            }
        } else {
            (None, None)
        };
        let (sh, sh_ok) = match square_harmonic(k, &cfg.euler) {
            Ok(v) => {
                let kf = k as f64;
                (Some(v), (v <= 11.0 * kf * (cfg.b * kf).ln().ln()).to_string())
            }
            Err(e) => {
                warn!("square harmonic sum for k = {k}: {e}");
                (None, String::new())
            }
        };
        rep.push(vec![
            k.to_string(),
            real(r.cap),
            r.terms.to_string(),
            real(r.total),
            r.exact_total.map(|v| v.to_string()).unwrap_or_default(),
            real(r.log_paper_bound),
            real(r.bound_ratio()),
            r.within_bound.to_string(),
            real(log_sharp),
            within_sharp,
            opt_real(mean),
            opt_real(mean_ratio),
            opt_real(sh),
            sh_ok,
            String::new(),
        ]);
    }
    Ok(rep)
}

pub fn density(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = base_report(
        cfg,
        &[
            "nu",
            "regime",
            "log_delta",
            "density",
            "error_scale",
            "e_nu",
            "rho",
            "alpha",
            "log_landau",
            "log_crude_lower",
            "log_crude_upper",
            "in_crude",
            "in_range",
            "error",
        ],
    );
    let log_x = log_x_of(cfg.x);
    let l2 = script_l2(log_x);
    for nu in cfg.nu_range() {
        let in_range = nu as f64 <= l2;
        let est = match choose_density(nu, log_x, cfg.density, cfg) {
            Ok(e) => e,
            Err(e) => {
                rep.push_error(vec![nu.to_string()], e);
                continue;
            }
        };
        if !in_range {
            rep.shadow(format!("nu above log x/(log log x)^2 = {l2:.4}"));
        }
        let landau = density_landau(nu, log_x).map(|d| d.log_delta).ok();
        let crude = density_crude_bounds(nu, log_x, CrudeBracket::default()).ok();
        let in_crude = crude.map_or(String::new(), |(lo, hi)| (lo <= est.log_delta && est.log_delta <= hi).to_string());
        rep.push(vec![
            nu.to_string(),
            est.regime.as_str().to_string(),
            real(est.log_delta),
            real(est.density()),
            real(est.error_scale),
            opt_real(est.e_nu),
            opt_real(est.saddle.map(|s| s.rho)),
            opt_real(est.saddle.map(|s| s.alpha)),
            opt_real(landau),
            opt_real(crude.map(|c| c.0)),
            opt_real(crude.map(|c| c.1)),
            in_crude,
            in_range.to_string(),
            String::new(),
        ]);
    }
    Ok(rep)
}

pub fn saddle(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = base_report(
        cfg,
        &[
            "nu",
            "rho",
            "alpha",
            "residual_r",
            "residual_a",
            "iterations",
            "prime_limit",
            "log_g",
            "corridor",
            "in_range",
            "error",
        ],
    );
    let log_x = log_x_of(cfg.x);
    for nu in cfg.nu_range() {
        match solve_saddle(nu, log_x, &cfg.euler) {
            Ok(sp) => {
                if !sp.in_range {
                    rep.shadow("nu above log x/(log log x)^2");
                }
                // rho relative to nu / L_nu(x)
                let l = big_l(nu, log_x);
                let corridor = if l > 0.0 { Some(sp.rho * l / nu as f64) } else { None };
                rep.push(vec![
                    nu.to_string(),
                    real(sp.rho),
                    real(sp.alpha),
                    real(sp.residual_r),
                    real(sp.residual_a),
                    sp.iterations.to_string(),
                    sp.truncation.prime_limit.to_string(),
                    real(sp.log_g),
                    opt_real(corridor),
                    sp.in_range.to_string(),
                    String::new(),
                ]);
            }
            Err(e) => rep.push_error(vec![nu.to_string()], e),
        }
    }
    Ok(rep)
}

/// Exact histograms of `omega` and `Omega`, with sampled integers checked
/// against trial division.
pub fn sieve(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let mut rep = base_report(cfg, &["nu", "pi_nu", "big_pi_nu", "error"]);
    if cfg.y == 0 {
        return Ok(rep);
    }
    let table = sieve_table(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples: Vec<u64> = (0..cfg.spot_checks).map(|_| cfg.x + rng.gen_range(1..=cfg.y)).collect();
    samples.sort_unstable();
    samples.dedup();
    let parts = map_segments(cfg.x, cfg.y, &table, SieveOptions::default(), |seg| {
        let lo = seg.start();
        let hi = lo + seg.len() as u64;
        let from = samples.partition_point(|&n| n < lo);
        let to = samples.partition_point(|&n| n < hi);
        let mut bad = Vec::new();
        let mut hist = [[0u64; 2]; 65];
        for i in 0..seg.len() {
            hist[seg.omega[i] as usize][0] += 1;
            hist[seg.big_omega[i] as usize][1] += 1;
        }
        for &n in &samples[from..to] {
            let r = seg.record((n - lo) as usize);
            match factorize(n, &table) {
                Ok(f) => {
                    let om = f.len() as u8;
                    let big: u32 = f.iter().map(|p| p.1).sum();
                    let lpf = f.first().map_or(1, |p| p.0);
                    if r.omega != om || r.big_omega as u32 != big || r.least_prime_factor != lpf {
                        bad.push(n);
                    }
                }
                Err(_) => bad.push(n),
            }
        }
        (hist, bad)
    })?;
    let mut hist = [[0u64; 2]; 65];
    let mut bad = Vec::new();
    for (h, b) in parts {
        for (acc, v) in hist.iter_mut().zip(h) {
            acc[0] += v[0];
            acc[1] += v[1];
        }
        bad.extend(b);
    }
    rep.note("spot_checked", samples.len().to_string());
    rep.note("spot_check_mismatches", bad.len().to_string());
    for nu in cfg.nu_range().take_while(|&nu| nu <= 64) {
        rep.push(vec![
            nu.to_string(),
            hist[nu as usize][0].to_string(),
            hist[nu as usize][1].to_string(),
            String::new(),
        ]);
    }
    for n in &bad {
        rep.push_error(vec![], format!("sieve record of {n} disagrees with trial division"));
    }
    Ok(rep)
}
