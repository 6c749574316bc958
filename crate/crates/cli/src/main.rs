use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use nufactor::{exit_code, run, ExperimentConfig, RunError};

/// Exact short-interval omega statistics against Hildebrand-Tenenbaum densities.
#[derive(Parser, Debug)]
#[command(name = "nufactor", version)]
struct Cli {
    /// compare | minorant | divisor | density | saddle | sieve
    command: Option<String>,

    /// Plain-text `key = value` file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    #[arg(long)]
    nu_min: Option<String>,
    #[arg(long)]
    nu_max: Option<String>,
    #[arg(long)]
    a: Option<String>,
    /// Window coefficient for z*_nu(c, x).
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    /// B in the divisor-sum bound.
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    k_min: Option<String>,
    #[arg(long)]
    k_max: Option<String>,
    /// omega | bigOmega | none
    #[arg(long)]
    cap_mode: Option<String>,
    /// auto | saddle | smallNuSeries | landau
    #[arg(long)]
    density: Option<String>,
    #[arg(long)]
    tau_cap: Option<String>,
    #[arg(long)]
    t_cap: Option<String>,
    /// Run the minorants even when tau >= x.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    prime_limit: Option<String>,
    /// Relative tail tolerance of the Euler products.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    newton_tol: Option<String>,
    #[arg(long)]
    max_newton_iterations: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    threads: Option<String>,
    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    spot_checks: Option<String>,
}

impl Cli {
    fn settings(&self) -> Vec<(&'static str, &str)> {
        let given = [
            ("command", &self.command),
            ("x", &self.x),
            ("y", &self.y),
            ("nu_min", &self.nu_min),
            ("nu_max", &self.nu_max),
            ("a", &self.a),
            ("c", &self.c),
            ("gamma", &self.gamma),
            ("epsilon", &self.epsilon),
            ("b", &self.b),
            ("k_min", &self.k_min),
            ("k_max", &self.k_max),
            ("cap_mode", &self.cap_mode),
            ("density", &self.density),
            ("tau_cap", &self.tau_cap),
            ("t_cap", &self.t_cap),
            ("prime_limit", &self.prime_limit),
            ("tol", &self.tol),
            ("newton_tol", &self.newton_tol),
            ("max_newton_iterations", &self.max_newton_iterations),
            ("threads", &self.threads),
            ("out", &self.out),
            ("seed", &self.seed),
            ("spot_checks", &self.spot_checks),
        ];
        let mut out: Vec<(&'static str, &str)> =
            given.into_iter().filter_map(|(k, v)| v.as_deref().map(|v| (k, v))).collect();
        if self.force {
            out.push(("force", "true"));
        }
        out
    }
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, RunError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    for (k, v) in cli.settings() {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("nufactor: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("nufactor: cannot start worker pool: {e}");
            return ExitCode::from(3);
        }
    };
    let report = match pool.install(|| run(&cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("nufactor: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let csv = report.to_csv();
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, csv.as_bytes()),
        None => std::io::stdout().lock().write_all(csv.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("nufactor: cannot write report: {e}");
        return ExitCode::from(3);
    }
    if report.row_errors > 0 {
        eprintln!("nufactor: {} row(s) failed; see the error column", report.row_errors);
    }
    ExitCode::from(exit_code(&report) as u8)
}
