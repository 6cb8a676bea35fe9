//! Batch front end: one command per invocation, human text or CSV/JSON out.
//!
//! Human-readable numbers carry 6 decimals; CSV carries 17 significant digits and ends
//! with a comment line naming the tool version, the seed and the SHA-256 of the
//! instance file. Identical inputs give byte-identical output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::asymptotics::{d_bounds, gaussian_approx, rate_distortion, RdSolution};
use crate::blocklength::{g_rate, sweep, SweepRow, DEFAULT_BUDGET};
use crate::dball_code::{build_deterministic_code, build_stochastic_code, greedy_cover, CodeTable};
use crate::error::{LossyError, Result};
use crate::evaluator::{
    converse_audit, evaluate_code, majorization_audit, random_code_search, simulate, EmpiricalReport,
};
use crate::io::{code_from_json, code_to_json, parse_instance};
use crate::model::{check_feasible, Instance, LossyProblem};
use crate::prob::{Exact, Prob};
use crate::smooth_entropy::smooth_max_entropy;

/// Environment variable overriding the default product-alphabet budget.
pub const BUDGET_ENV: &str = "LOSSY_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Smooth max entropy of the source.
    Entropy,
    /// G, the thresholds i*, k*, j* and alpha, beta, gamma of the greedy cover.
    Gval,
    /// Code table JSON for the stochastic or deterministic D-ball code.
    BuildCode,
    /// Exact excess, overflow and output law of a code table.
    EvalCode,
    /// Converse, majorization and split-invariance audits.
    Audit,
    /// Blocklength sandwich CSV for n = 1..max-n.
    SweepN,
    /// Rate-distortion curve CSV.
    RdCurve,
    /// Blocklength rate against the Gaussian approximation, CSV.
    GaussianCompare,
    /// Monte Carlo excess/overflow estimates, CSV.
    Simulate,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "lossy-overflow",
    version,
    about = "Limits of variable-length lossy coding with excess-distortion and overflow budgets"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Instance JSON file.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Smoothing parameter for `entropy` (defaults to the instance delta).
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long, conflicts_with = "deterministic")]
    pub stochastic: bool,
    #[arg(long)]
    pub deterministic: bool,
    /// Rate at which a code is evaluated or simulated (defaults to the code's own rate).
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long, default_value_t = 8)]
    pub max_n: usize,
    /// Largest product alphabet to enumerate; overrides LOSSY_BUDGET.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Rational arithmetic instead of f64.
    #[arg(long)]
    pub exact: bool,
    /// Distortion grid `lo:hi:step` for `rd-curve`.
    #[arg(long)]
    pub d_grid: Option<String>,
    /// Code table JSON for `eval-code` and `simulate`.
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// Record wall-clock times in `sweep-n` (output is then not reproducible).
    #[arg(long)]
    pub timing: bool,
}

/// Process exit status for an error.
pub fn exit_code(err: &LossyError) -> i32 {
    match err {
        LossyError::Schema(_) | LossyError::Json(_) => 2,
        LossyError::Infeasible { .. } => 3,
        LossyError::Budget { .. } => 4,
        _ => 1,
    }
}

/// Runs one command, writing its output to `--out` or stdout and errors to stderr.
pub fn run(config: &RunConfig) -> i32 {
    let result = execute(config).and_then(|text| match &config.out {
        Some(path) => std::fs::write(path, text).map_err(LossyError::from),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

/// Runs one command and returns what it would print.
pub fn execute(config: &RunConfig) -> Result<String> {
    let path = config.instance.as_deref().ok_or_else(|| LossyError::Domain("--instance is required".into()))?;
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| LossyError::Schema("instance file is not UTF-8".into()))?;
    let ctx = Context { config, hash: sha256_hex(&bytes) };
    if config.exact {
        ctx.dispatch(parse_instance::<Exact>(&text)?)
    } else {
        ctx.dispatch(parse_instance::<f64>(&text)?)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

struct Context<'a> {
    config: &'a RunConfig,
    hash: String,
}

impl Context<'_> {
    fn budget(&self) -> Result<usize> {
        if let Some(b) = self.config.budget {
            return Ok(b);
        }
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| LossyError::Domain(format!("{BUDGET_ENV}={v:?} is not an integer"))),
            Err(_) => Ok(DEFAULT_BUDGET),
        }
    }

    fn csv(&self, header: &str, rows: impl IntoIterator<Item = String>, seed: Option<u64>) -> String {
        let mut out = format!("{header}\n");
        for row in rows {
            out.push_str(&row);
            out.push('\n');
        }
        let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        let _ = writeln!(out, "# lossy-overflow {}, seed={seed}, instance={}", env!("CARGO_PKG_VERSION"), self.hash);
        out
    }

    fn load_code<P: Prob>(&self, inst: &Instance<P>) -> Result<CodeTable<P>> {
        match &self.config.code {
            Some(path) => code_from_json(inst, &std::fs::read_to_string(path)?),
            None if self.config.deterministic => build_deterministic_code(inst),
            None => build_stochastic_code(inst),
        }
    }

    fn dispatch<P: Prob>(&self, inst: Instance<P>) -> Result<String> {
        let cfg = self.config;
        match cfg.command {
            Command::Entropy => {
                let (label, delta) = match &cfg.delta {
                    Some(text) => (text.clone(), P::parse(text)?),
                    None => (inst.delta().to_string(), inst.delta().clone()),
                };
                let h = smooth_max_entropy(inst.source().probs(), &delta)?;
                Ok(format!("H^{label} = {h:.6} bits\n"))
            }
            Command::Gval => {
                let cover = greedy_cover(&inst)?;
                Ok(format!(
                    "G = {:.6} bits, i*={}, k*={}\nj*={}, alpha={:.6}, beta={:.6}, gamma={:.6}\n",
                    cover.g_bits(),
                    cover.i_star(),
                    cover.k_star(),
                    cover.j_star(),
                    cover.alpha().to_f64(),
                    cover.beta().to_f64(),
                    cover.gamma().to_f64()
                ))
            }
            Command::BuildCode => {
                let code =
                    if cfg.deterministic { build_deterministic_code(&inst)? } else { build_stochastic_code(&inst)? };
                Ok(pretty(&code_to_json(&inst, &code))?)
            }
            Command::EvalCode => {
                if cfg.code.is_none() {
                    return Err(LossyError::Domain("eval-code needs --code".into()));
                }
                let code = self.load_code(&inst)?;
                let rate = cfg.rate.unwrap_or(code.rate());
                let report = evaluate_code(&inst, &code)?;
                Ok(pretty(&report.to_json(&inst, rate))?)
            }
            Command::Audit => self.audit(&inst),
            Command::SweepN => {
                let rows = sweep(&inst, cfg.max_n, self.budget()?)?;
                let rows = rows.into_iter().map(|r| {
                    let wall_time_ms = if cfg.timing { r.wall_time_ms } else { 0.0 };
                    SweepRow { wall_time_ms, ..r }.csv_row()
                });
                Ok(self.csv(SweepRow::CSV_HEADER, rows, None))
            }
            Command::RdCurve => {
                let probs: Vec<f64> = inst.source().probs().iter().map(Prob::to_f64).collect();
                let matrix = inst.distortion().matrix();
                let grid = match &cfg.d_grid {
                    Some(spec) => parse_grid(spec)?,
                    None => {
                        let (lo, hi) = d_bounds(&probs, matrix);
                        let step = (hi - lo) / 20.0;
                        (1..=20).map(|k| lo + step * k as f64).collect()
                    }
                };
                let rows = grid
                    .par_iter()
                    .map(|&d| rate_distortion(&probs, matrix, d))
                    .collect::<Result<Vec<RdSolution>>>()?;
                Ok(self.csv(RdSolution::CSV_HEADER, rows.iter().map(RdSolution::csv_row), None))
            }
            Command::GaussianCompare => {
                let budget = self.budget()?;
                let rows = (1..=cfg.max_n)
                    .into_par_iter()
                    .map(|n| {
                        let g = g_rate(&inst, n, budget)?;
                        let approx = gaussian_approx(&inst, n)?;
                        let gap = g - approx;
                        let scaled = n as f64 * gap / (n as f64).log2();
                        Ok(format!("{n},{g:.16e},{approx:.16e},{gap:.16e},{scaled:.16e}"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(self.csv("n,g_rate,gaussian_approx,gap,n_gap_over_log2_n", rows, None))
            }
            Command::Simulate => {
                let mut code = self.load_code(&inst)?;
                if let Some(rate) = cfg.rate {
                    code = code.with_rate(rate);
                }
                let report = simulate(&inst, &code, cfg.samples, cfg.seed)?;
                Ok(self.csv(EmpiricalReport::CSV_HEADER, [report.csv_row()], Some(cfg.seed)))
            }
        }
    }

    fn audit<P: Prob>(&self, inst: &Instance<P>) -> Result<String> {
        let cfg = self.config;
        let mut out = String::new();
        let mut all = true;
        let mut line = |name: String, ok: bool| {
            all &= ok;
            let _ = writeln!(out, "{name}: {}", if ok { "PASS" } else { "FAIL" });
        };

        let stochastic = build_stochastic_code(inst)?;
        line(
            format!("converse, stochastic code at rate {}", stochastic.rate()),
            converse_audit(inst, &stochastic, stochastic.rate())?,
        );
        let deterministic = build_deterministic_code(inst)?;
        line(
            format!("converse, deterministic code at rate {}", deterministic.rate()),
            converse_audit(inst, &deterministic, deterministic.rate())?,
        );
        let max_index = 2 * inst.y_count() as u64 + 1;
        let search = random_code_search(inst, cfg.trials, max_index, cfg.seed)?;
        line(
            format!(
                "converse, random codes ({} valid of {} drawn, {} violations)",
                search.valid, search.attempted, search.violations
            ),
            search.violations == 0,
        );
        line(format!("majorization ({} trials)", cfg.trials), majorization_audit(inst, cfg.trials, cfg.seed)?);

        let i_star = greedy_cover(inst)?.i_star();
        let total = inst.epsilon().clone() + inst.delta().clone();
        let mut splits = 0;
        let mut same = true;
        for t in 0..=20u64 {
            let epsilon = total.clone() * P::from_ratio(t, 20);
            let delta = total.clone() - epsilon.clone();
            let Ok(split) = inst.with_budgets(epsilon, delta) else { continue };
            if !check_feasible(&split).is_feasible() {
                continue;
            }
            splits += 1;
            same &= greedy_cover(&split)?.i_star() == i_star;
        }
        line(format!("split invariance ({splits} feasible splits, i*={i_star})"), same);

        if all {
            Ok(out)
        } else {
            print!("{out}");
            Err(LossyError::Domain("audit failed".into()))
        }
    }
}

fn pretty(value: &serde_json::Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Parses `lo:hi:step` into the points `lo, lo + step, ...` not beyond `hi`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| LossyError::Domain(format!("--d-grid {spec:?} is not lo:hi:step")))?;
    let [lo, hi, step] = parts[..] else {
        return Err(LossyError::Domain(format!("--d-grid {spec:?} is not lo:hi:step")));
    };
    if !(step > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
        return Err(LossyError::Domain(format!("--d-grid {spec:?} needs lo <= hi and step > 0")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| lo + step * k as f64).collect())
}

/// Convenience for tests and examples: a config for `command` on `instance`.
pub fn config(command: Command, instance: &Path) -> RunConfig {
    RunConfig {
        command,
        instance: Some(instance.to_path_buf()),
        out: None,
        delta: None,
        stochastic: false,
        deterministic: false,
        rate: None,
        max_n: 8,
        budget: None,
        trials: 200,
        seed: 0,
        samples: 1_000_000,
        exact: false,
        d_grid: None,
        code: None,
        timing: false,
    }
}
