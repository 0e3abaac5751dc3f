//! `gmd`: threshold analysis and Monte Carlo simulation of concatenated
//! codes with multi-trial error/erasure outer decoding.
//!
//! Exit codes: 0 success, 1 runtime/numeric failure, 2 usage error.

mod config;
mod output;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use gmd_core::enumeration::{dominant_term_pe, exact_pe};
use gmd_core::exponent::{gallager_e0_with_rho, ClassProbabilities, ExponentModel, DEFAULT_S};
use gmd_core::sim::monte_carlo;
use gmd_core::threshold::{
    check_equalization, closed_form_paper, minimax_optimize, paper_pe_ordering, predict_pe,
    bmd_reference_pe, solve_condition_system, ThresholdSet,
};

use config::{InnerSpec, OuterSpec, SimFileConfig, ThresholdChoice};
use output::{
    emit_json, sweep_csv, EnumerateOutput, ExponentOutput, MethodOutput, PredictOutput, SweepMeta,
    SweepRow, ThresholdsOutput,
};

#[derive(Parser)]
#[command(name = "gmd", version, about = "GMD threshold analysis and simulation")]
struct Cli {
    /// Worker threads for simulation (overrides GMD_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Solver,
    Paper,
    Minimax,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Random-coding exponent of the BSC at the inner-code rate.
    Exponent {
        /// BSC crossover probability.
        #[arg(long)]
        e: f64,
        /// Inner block length.
        #[arg(long)]
        ni: Option<usize>,
        /// Inner dimension.
        #[arg(long)]
        ki: Option<usize>,
        /// Explicit rate in nats per bit (alternative to --ni/--ki).
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_S)]
        s: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal threshold sets with equalization residuals and predictions.
    Thresholds {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        z: usize,
        /// Explicit exponent (alternative to --e/--ni/--ki).
        #[arg(long)]
        e0: Option<f64>,
        #[arg(long)]
        e: Option<f64>,
        #[arg(long)]
        ni: Option<usize>,
        #[arg(long)]
        ki: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_S)]
        s: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Solver)]
        method: MethodArg,
        /// Outer minimum distance; enables residual-error predictions
        /// (requires --ni).
        #[arg(long = "do")]
        d_o: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residual-error predictions: threshold-derived, printed forms, and
    /// the plain-BMD reference.
    Predict {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        z: usize,
        #[arg(long = "do")]
        d_o: usize,
        #[arg(long)]
        ni: usize,
        #[arg(long)]
        e0: Option<f64>,
        #[arg(long)]
        e: Option<f64>,
        #[arg(long)]
        ki: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_S)]
        s: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact and dominant-term residual error from class probabilities.
    Enumerate {
        /// JSON file with {p_r, p_c, p_l, p_over, p_under}.
        #[arg(long)]
        probs: PathBuf,
        #[arg(long = "no")]
        n_o: usize,
        #[arg(long = "do")]
        d_o: usize,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        z: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo run from a JSON configuration.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured trial count.
        #[arg(long)]
        trials: Option<u64>,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the configured crossover probability.
        #[arg(long)]
        e: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residual-error curves over a crossover grid, as CSV plus metadata.
    Sweep {
        #[arg(long)]
        e_from: f64,
        #[arg(long)]
        e_to: f64,
        #[arg(long)]
        points: usize,
        /// Trial counts to sweep, e.g. --z-list 1,2,3.
        #[arg(long, value_delimiter = ',')]
        z_list: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        l: u32,
        #[arg(long, default_value = "hamming74")]
        inner: String,
        #[arg(long, default_value_t = 4)]
        m: u32,
        #[arg(long = "no", default_value_t = 15)]
        n_o: usize,
        #[arg(long = "ko", default_value_t = 7)]
        k_o: usize,
        #[arg(long, default_value_t = DEFAULT_S)]
        s: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Solver)]
        method: MethodArg,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fast verification subset; machine-readable JSON report on stdout.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads.or_else(|| {
        std::env::var("GMD_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    }) {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {err}");
            return ExitCode::from(1);
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

/// Print a usage complaint and exit with code 2, like a parse failure.
fn usage_error(msg: &str) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(2);
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Exponent {
            e,
            ni,
            ki,
            rate,
            s,
            out,
        } => {
            let rate = match (rate, ni, ki) {
                (Some(r), _, _) => r,
                (None, Some(n), Some(k)) => k as f64 * std::f64::consts::LN_2 / n as f64,
                _ => usage_error("--rate or both --ni and --ki are required"),
            };
            let (e0, rho_star) = gallager_e0_with_rho(e, rate)?;
            let model = ExponentModel {
                e: Some(e),
                rate: Some(rate),
                e0,
                s,
            };
            emit_json(
                &ExponentOutput {
                    e,
                    rate,
                    e0: model.e0,
                    s: model.s,
                    rho_star,
                },
                out.as_deref(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Thresholds {
            l,
            z,
            e0,
            e,
            ni,
            ki,
            s,
            method,
            d_o,
            out,
        } => {
            if method == MethodArg::Paper && l < 2 {
                usage_error("--method paper requires --l 2 or larger (the closed form is singular at l = 1)");
            }
            let (e0, exponent) = resolve_exponent(e0, e, ni, ki, s)?;
            if d_o.is_some() && ni.is_none() {
                usage_error("--do needs --ni to scale the prediction exponent");
            }
            let mut methods = Vec::new();
            let mut add = |set: ThresholdSet, name: &str| -> Result<()> {
                let residuals = check_equalization(set.values(), l, e0, s)?;
                let max_abs = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
                let prediction = match d_o {
                    Some(d) => Some(predict_pe(&set, l, d, ni.unwrap(), e0, s)?),
                    None => None,
                };
                methods.push(MethodOutput {
                    method: name.into(),
                    thresholds: set.values().to_vec(),
                    equalization_residuals: residuals,
                    max_abs_residual: max_abs,
                    prediction,
                });
                Ok(())
            };
            match method {
                MethodArg::Solver => add(solve_condition_system(l, z, e0, s)?, "solver")?,
                MethodArg::Paper => add(closed_form_paper(l, z, e0, s)?, "paper")?,
                MethodArg::Minimax => add(
                    minimax_optimize(l, z, e0, s, ni.unwrap_or(1), d_o.unwrap_or(2))?,
                    "minimax",
                )?,
                MethodArg::All => {
                    add(solve_condition_system(l, z, e0, s)?, "solver")?;
                    if l >= 2 {
                        add(closed_form_paper(l, z, e0, s)?, "paper")?;
                    }
                    add(
                        minimax_optimize(l, z, e0, s, ni.unwrap_or(1), d_o.unwrap_or(2))?,
                        "minimax",
                    )?;
                }
            }
            emit_json(
                &ThresholdsOutput {
                    l,
                    z,
                    e0,
                    s,
                    ratio: e0 / s,
                    exponent,
                    methods,
                },
                out.as_deref(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Predict {
            l,
            z,
            d_o,
            ni,
            e0,
            e,
            ki,
            s,
            out,
        } => {
            let (e0, _) = resolve_exponent(e0, e, Some(ni), ki, s)?;
            let solver = solve_condition_system(l, z, e0, s)?;
            let from_thresholds = predict_pe(&solver, l, d_o, ni, e0, s)?;
            let paper_forms = if l >= 2 {
                Some(paper_pe_ordering(l, z, d_o, ni, e0)?)
            } else {
                None
            };
            emit_json(
                &PredictOutput {
                    l,
                    z,
                    d_o,
                    n_i: ni,
                    e0,
                    s,
                    from_solver_thresholds: from_thresholds,
                    paper_forms,
                    bmd_reference: bmd_reference_pe(z, d_o, ni, e0)?,
                },
                out.as_deref(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate {
            probs,
            n_o,
            d_o,
            l,
            z,
            out,
        } => {
            let text = std::fs::read_to_string(&probs)
                .with_context(|| format!("reading {}", probs.display()))?;
            let probs: ClassProbabilities = serde_json::from_str(&text)
                .with_context(|| "parsing class probabilities".to_string())?;
            let exact = exact_pe(&probs, n_o, d_o, l, z)?;
            let dominant = dominant_term_pe(&probs, n_o, d_o, l, z)?;
            emit_json(
                &EnumerateOutput {
                    exact_pe: exact,
                    dominant_pe: dominant.value,
                    argmax_counts: dominant.argmax.map(Into::into),
                },
                out.as_deref(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            config,
            trials,
            seed,
            e,
            out,
        } => {
            let mut file_cfg = SimFileConfig::load(&config)?;
            if let Some(t) = trials {
                file_cfg.trials = t;
            }
            if let Some(sd) = seed {
                file_cfg.seed = sd;
            }
            if let Some(e) = e {
                file_cfg.e = e;
            }
            let cfg = file_cfg.build()?;
            let report = monte_carlo(&cfg, cfg.trials, cfg.seed)?;
            emit_json(&report, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            e_from,
            e_to,
            points,
            z_list,
            l,
            inner,
            m,
            n_o,
            k_o,
            s,
            method,
            trials,
            seed,
            out,
        } => {
            if points == 0 || z_list.is_empty() {
                usage_error("--points must be >= 1 and --z-list non-empty");
            }
            let method = match method {
                MethodArg::Solver => "solver",
                MethodArg::Minimax => "minimax",
                _ => usage_error("--method must be solver or minimax for sweeps"),
            };
            let inner_spec = InnerSpec::parse(&inner).unwrap_or_else(|e| usage_error(&e.to_string()));
            let e_grid: Vec<f64> = (0..points)
                .map(|i| {
                    if points == 1 {
                        e_from
                    } else {
                        e_from + i as f64 * (e_to - e_from) / (points - 1) as f64
                    }
                })
                .collect();
            let mut rows = Vec::new();
            for &z in &z_list {
                for &e in &e_grid {
                    let file_cfg = SimFileConfig {
                        inner: inner_spec.clone(),
                        outer: OuterSpec {
                            m,
                            n: n_o,
                            k: k_o,
                            primitive_poly: None,
                        },
                        l,
                        z,
                        e,
                        s,
                        thresholds: ThresholdChoice::Method(config::MethodChoice {
                            method: method.into(),
                        }),
                        trials,
                        seed,
                        real_decoder: l == 1,
                    };
                    let cfg = file_cfg.build()?;
                    let report = monte_carlo(&cfg, trials, seed)?;
                    let model = ExponentModel::for_bsc(e, cfg.inner.n(), cfg.inner.k(), s)?;
                    let predicted =
                        predict_pe(&cfg.thresholds, l, cfg.outer.d(), cfg.inner.n(), model.e0, s)?;
                    rows.push(SweepRow {
                        e,
                        z,
                        l,
                        method: method.into(),
                        pe_hat: report.pe_hat,
                        ci_lo: report.ci95.0,
                        ci_hi: report.ci95.1,
                        pe_predicted: predicted.log_pe.exp(),
                        trials,
                    });
                }
            }
            output::write_text(&out, &sweep_csv(&rows))?;
            let meta = SweepMeta {
                tool_version: env!("CARGO_PKG_VERSION").into(),
                inner: inner_spec.describe(),
                outer_m: m,
                outer_n: n_o,
                outer_k: k_o,
                l,
                s,
                method: method.into(),
                trials,
                seed,
                z_list,
                e_grid,
                csv_columns: output::SWEEP_COLUMNS.into(),
            };
            emit_json(&meta, Some(&out.with_extension("meta.json")))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { out } => {
            let report = selftest::run();
            for check in &report.checks {
                eprintln!(
                    "{} {}: {}",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            emit_json(&report, out.as_deref())?;
            Ok(if report.all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

/// Resolve the exponent pair from either an explicit E0 or the BSC model.
fn resolve_exponent(
    e0: Option<f64>,
    e: Option<f64>,
    ni: Option<usize>,
    ki: Option<usize>,
    s: f64,
) -> Result<(f64, Option<ExponentOutput>)> {
    match (e0, e) {
        (Some(v), None) => Ok((v, None)),
        (None, Some(e)) => {
            let (Some(n), Some(k)) = (ni, ki) else {
                usage_error("--e needs --ni and --ki to derive the rate");
            };
            let rate = k as f64 * std::f64::consts::LN_2 / n as f64;
            let (e0, rho_star) = gallager_e0_with_rho(e, rate)?;
            Ok((
                e0,
                Some(ExponentOutput {
                    e,
                    rate,
                    e0,
                    s,
                    rho_star,
                }),
            ))
        }
        (Some(_), Some(_)) => usage_error("--e0 and --e are mutually exclusive"),
        (None, None) => usage_error("either --e0 or --e (with --ni/--ki) is required"),
    }
}
