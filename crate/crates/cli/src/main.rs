//! `kopa` — Kronecker product approximation toolkit.
//!
//! Subcommands: `select` (configuration scan + heat map), `fit` (K-term fit
//! at a fixed configuration), `denoise` (corrupt + scan + multi-term fit),
//! `curve` (compression comparison vs. plain SVD), `sim` (Monte Carlo
//! experiments from a JSON spec).
//!
//! Exit codes: 0 success, 2 usage error, 3 input/parse error, 4 convergence
//! failure.

use clap::{Args, Parser, Subcommand};
use kopa_core::image::{
    compression_curve, corrupt, curve_to_csv, demean, denoise, load_pgm, save_pgm, GrayImage,
    PgmFormat,
};
use kopa_core::select::{report_to_csv, report_to_json};
use kopa_core::sim::{experiment_aggregate_csv, experiment_to_csv, run_experiment, ExperimentSpec};
use kopa_core::{
    fit_k_terms, pad_to_dyadic, select_configuration, variance_explained, Configuration, Criterion,
    IterationControl, KopaError,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kopa", version, about = "Kronecker product approximation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for all randomized steps (noise, start vectors)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Criterion preset: mse (κ=0), aic (κ=2), bic (κ=(M+N)·ln2)
    #[arg(long, global = true, value_parser = ["mse", "aic", "bic"])]
    criterion: Option<String>,

    /// Explicit penalty weight κ (overrides --criterion)
    #[arg(long, global = true)]
    kappa: Option<f64>,

    /// Relative convergence tolerance of the power iteration
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    /// Iteration cap of the power iteration
    #[arg(long, global = true, default_value_t = 5000)]
    max_iter: usize,

    /// Worker threads for the scan (default: all cores, or $KOPA_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Primary output file (defaults to stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Scan all candidate configurations and report the IC argmin
    Select {
        /// Input image (PGM, P2 or P5)
        #[arg(long)]
        input: PathBuf,
        /// Also write the heat-map table as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Zero-pad non-dyadic images (after de-meaning)
        #[arg(long)]
        pad: bool,
    },
    /// Fit a K-term Kronecker product at a fixed configuration
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Configuration "m,n" (left factor is 2^m x 2^n)
        #[arg(long)]
        config: String,
        /// Number of Kronecker terms
        #[arg(long, default_value_t = 1)]
        terms: usize,
        /// Write the reconstruction as a PGM
        #[arg(long)]
        recon: Option<PathBuf>,
        #[arg(long)]
        pad: bool,
    },
    /// Corrupt with Gaussian noise, select a configuration, fit K terms
    Denoise {
        #[arg(long)]
        input: PathBuf,
        /// Noise level added per pixel (image scale, unnormalized)
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 2)]
        terms: usize,
        /// Write the denoised image as a PGM
        #[arg(long)]
        recon: Option<PathBuf>,
        /// Write the selection report as JSON
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        pad: bool,
    },
    /// Variance-explained-vs-parameters curves (one-term fits and SVD)
    Curve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        pad: bool,
    },
    /// Run a Monte Carlo experiment from a JSON spec
    Sim {
        /// Experiment spec (JSON)
        #[arg(long)]
        spec: PathBuf,
        /// Aggregated CSV path (default: <out stem>_agg.csv)
        #[arg(long)]
        agg: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads.or_else(|| {
        std::env::var("KOPA_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    }) {
        // ignore failure: the pool may already be initialized in tests
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                KopaError::Convergence { .. } => 4u8,
                _ => 3u8,
            };
            ExitCode::from(code)
        }
    }
}

fn ctl(common: &Common) -> IterationControl {
    IterationControl {
        tol: common.tol,
        max_iter: common.max_iter,
        seed: common.seed,
    }
}

fn criterion(common: &Common, big_m: u32, big_n: u32) -> Criterion {
    if let Some(kappa) = common.kappa {
        return Criterion::new(kappa).unwrap_or_else(|_| Criterion::mse());
    }
    match common.criterion.as_deref() {
        Some("aic") => Criterion::aic(),
        Some("bic") => Criterion::bic(big_m, big_n),
        Some("mse") | None => Criterion::mse(),
        Some(_) => unreachable!("clap validates the preset"),
    }
}

/// Load, optionally de-mean + zero-pad to dyadic dimensions.
fn load_input(path: &Path, pad: bool) -> Result<GrayImage, KopaError> {
    let img = load_pgm(path)?;
    if !pad {
        return Ok(img);
    }
    let centered = demean(&img);
    let m = centered.to_matrix()?;
    let padded = pad_to_dyadic(&m);
    Ok(GrayImage::from_matrix(&padded, centered.mean_removed))
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), KopaError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), KopaError> {
    let common = &cli.common;
    match &cli.command {
        Command::Select { input, csv, pad } => {
            let img = load_input(input, *pad)?;
            let (big_m, big_n) = img.dyadic_exponents()?;
            let crit = criterion(common, big_m, big_n);
            let y = demean(&img).to_matrix()?;
            let report = select_configuration(&y, crit, ctl(common))?;
            eprintln!(
                "chosen configuration: ({},{})  [kappa = {:.6}]",
                report.chosen.0, report.chosen.1, report.kappa
            );
            if let Some(path) = csv {
                std::fs::write(path, report_to_csv(&report))?;
            }
            write_or_print(&common.out, &report_to_json(&report))?;
            Ok(())
        }
        Command::Fit {
            input,
            config,
            terms,
            recon,
            pad,
        } => {
            let img = load_input(input, *pad)?;
            let (big_m, big_n) = img.dyadic_exponents()?;
            let (m, n) = parse_config(config)?;
            let cfg = Configuration::new(m, n, big_m, big_n)?;
            let centered = demean(&img);
            let y = centered.to_matrix()?;
            let model = fit_k_terms(&y, cfg, *terms, ctl(common))?;
            let ve = variance_explained(&model)?;
            println!("variance explained: {ve:.6}");
            if let Some(path) = recon {
                let rm = kopa_core::reconstruct(&model);
                let out_img = GrayImage::from_matrix(&rm, centered.mean_removed);
                save_pgm(&out_img, path, PgmFormat::P5)?;
            }
            write_or_print(&common.out, &model.to_json())?;
            Ok(())
        }
        Command::Denoise {
            input,
            sigma,
            terms,
            recon,
            report,
            pad,
        } => {
            let img = load_input(input, *pad)?;
            let (big_m, big_n) = img.dyadic_exponents()?;
            let crit = criterion(common, big_m, big_n);
            let noisy = corrupt(&demean(&img), *sigma, common.seed)?;
            let outcome = denoise(&noisy, crit, *terms, ctl(common))?;
            eprintln!(
                "chosen configuration: ({},{}), {} term(s)",
                outcome.report.chosen.0,
                outcome.report.chosen.1,
                outcome.model.terms.len()
            );
            if let Some(path) = recon {
                save_pgm(&outcome.recon, path, PgmFormat::P5)?;
            }
            if let Some(path) = report {
                std::fs::write(path, report_to_json(&outcome.report))?;
            }
            write_or_print(&common.out, &outcome.model.to_json())?;
            Ok(())
        }
        Command::Curve { input, pad } => {
            let img = load_input(input, *pad)?;
            let points = compression_curve(&img, ctl(common))?;
            write_or_print(&common.out, &curve_to_csv(&points))?;
            Ok(())
        }
        Command::Sim { spec, agg } => {
            let text = std::fs::read_to_string(spec)?;
            let spec = ExperimentSpec::from_json(&text)?;
            let output = run_experiment(&spec)?;
            write_or_print(&common.out, &experiment_to_csv(&output))?;
            let agg_csv = experiment_aggregate_csv(&output);
            match (agg, &common.out) {
                (Some(path), _) => std::fs::write(path, agg_csv)?,
                (None, Some(out)) => {
                    let mut p = out.clone();
                    let stem = p
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "results".into());
                    p.set_file_name(format!("{stem}_agg.csv"));
                    std::fs::write(p, agg_csv)?;
                }
                (None, None) => print!("{agg_csv}"),
            }
            Ok(())
        }
    }
}

fn parse_config(s: &str) -> Result<(u32, u32), KopaError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(KopaError::Parse {
            offset: 0,
            message: format!("--config expects \"m,n\", got {s:?}"),
        });
    }
    let m = parts[0].trim().parse().map_err(|_| KopaError::Parse {
        offset: 0,
        message: format!("invalid m in --config {s:?}"),
    })?;
    let n = parts[1].trim().parse().map_err(|_| KopaError::Parse {
        offset: 0,
        message: format!("invalid n in --config {s:?}"),
    })?;
    Ok((m, n))
}
