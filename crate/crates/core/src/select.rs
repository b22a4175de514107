//! Extended information criterion and the automated configuration scan.
//!
//! IC_κ(m, n) = 2^{M+N}·ln(‖Y‖² − λ̂²) + κ·η with η = 2^{m+n} + 2^{m†+n†}.
//! κ = 0 ranks configurations by residual sum of squares alone (MSE), κ = 2
//! is AIC, κ = (M+N)·ln 2 is BIC. The two corner configurations reconstruct
//! Y exactly (IC = −∞) and are excluded from the candidate set.

use crate::config::{candidate_configs, log2_exact, ConfigLattice, Configuration};
use crate::error::{KopaError, Result};
use crate::matrix::{kron, DenseMatrix};
use crate::rearrange::rearrange;
use crate::spectral::{spectral_norm, IterationControl};
use rayon::prelude::*;
use serde::Serialize;

/// Penalty weight κ ≥ 0 for the extended information criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Criterion {
    pub kappa: f64,
}

impl Criterion {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) {
            return Err(KopaError::domain("κ must be nonnegative"));
        }
        Ok(Criterion { kappa })
    }

    /// κ = 0: selection by residual sum of squares.
    pub fn mse() -> Self {
        Criterion { kappa: 0.0 }
    }

    /// κ = 2.
    pub fn aic() -> Self {
        Criterion { kappa: 2.0 }
    }

    /// κ = (M+N)·ln 2 = ln(2^{M+N}).
    pub fn bic(big_m: u32, big_n: u32) -> Self {
        Criterion {
            kappa: (big_m + big_n) as f64 * std::f64::consts::LN_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IcFlag {
    Ok,
    /// RSS clamped at zero: the configuration fits Y perfectly; ic is −∞.
    PerfectFit,
    /// The fit at this configuration failed (e.g. no convergence); the row is
    /// excluded from the argmin.
    Failed,
}

/// One row of the IC table.
#[derive(Debug, Clone, Serialize)]
pub struct IcRecord {
    pub m: u32,
    pub n: u32,
    pub eta: u64,
    pub lambda_hat: f64,
    pub rss: f64,
    pub ic: f64,
    pub flag: IcFlag,
}

/// Full scan output: the per-configuration table (lexicographic order), the
/// argmin, and any exact ties (broken toward the lexicographically smallest).
#[derive(Debug, Clone, Serialize)]
pub struct SelectionReport {
    pub kappa: f64,
    pub chosen: (u32, u32),
    pub tied_with: Vec<(u32, u32)>,
    pub table: Vec<IcRecord>,
}

impl SelectionReport {
    pub fn chosen_config(&self, big_m: u32, big_n: u32) -> Configuration {
        Configuration::new(self.chosen.0, self.chosen.1, big_m, big_n)
            .expect("chosen configuration is from the candidate lattice")
    }
}

/// Evaluate IC_κ at a single candidate configuration.
///
/// λ̂ equals the one-term fit's coefficient (the spectral norm of the
/// rearranged matrix); the factors themselves are not materialized here.
pub fn information_criterion(
    y: &DenseMatrix,
    cfg: Configuration,
    crit: Criterion,
    ctl: IterationControl,
) -> Result<IcRecord> {
    if cfg.is_corner() {
        return Err(KopaError::domain(format!(
            "corner configuration {cfg} is excluded from selection (IC = −∞)"
        )));
    }
    if y.is_zero() {
        return Err(KopaError::domain("cannot evaluate IC of a zero matrix"));
    }
    let r = rearrange(y, cfg)?;
    let lambda_hat = spectral_norm(&r, ctl)?;
    let y_frob2 = y.frob_norm_sq();
    let raw = y_frob2 - lambda_hat * lambda_hat;
    let rss = if raw >= 0.0 {
        raw
    } else if raw >= -1e-8 * y_frob2 {
        0.0
    } else {
        return Err(KopaError::domain(format!(
            "λ̂² exceeds ‖Y‖² beyond rounding ({raw:e})"
        )));
    };
    let n_obs = (1u64 << (cfg.big_m + cfg.big_n)) as f64;
    let eta = cfg.eta();
    if rss <= 0.0 {
        return Ok(IcRecord {
            m: cfg.m,
            n: cfg.n,
            eta,
            lambda_hat,
            rss: 0.0,
            ic: f64::NEG_INFINITY,
            flag: IcFlag::PerfectFit,
        });
    }
    Ok(IcRecord {
        m: cfg.m,
        n: cfg.n,
        eta,
        lambda_hat,
        rss,
        ic: n_obs * rss.ln() + crit.kappa * eta as f64,
        flag: IcFlag::Ok,
    })
}

/// Scan all candidate configurations and pick the IC argmin.
///
/// Candidate evaluations run in parallel; the report is assembled in
/// lexicographic order regardless of scheduling. Rows whose fit failed are
/// flagged and excluded from the argmin rather than aborting the scan.
pub fn select_configuration(
    y: &DenseMatrix,
    crit: Criterion,
    ctl: IterationControl,
) -> Result<SelectionReport> {
    let big_m = log2_exact(y.rows())?;
    let big_n = log2_exact(y.cols())?;
    let lattice = candidate_configs(big_m, big_n)?;

    let table: Vec<IcRecord> = lattice
        .entries()
        .par_iter()
        .map(|&cfg| {
            information_criterion(y, cfg, crit, ctl).unwrap_or(IcRecord {
                m: cfg.m,
                n: cfg.n,
                eta: cfg.eta(),
                lambda_hat: f64::NAN,
                rss: f64::NAN,
                ic: f64::NAN,
                flag: IcFlag::Failed,
            })
        })
        .collect();

    let mut chosen: Option<&IcRecord> = None;
    for row in &table {
        if row.flag == IcFlag::Failed {
            continue;
        }
        match chosen {
            None => chosen = Some(row),
            Some(best) if row.ic < best.ic => chosen = Some(row),
            _ => {}
        }
    }
    let best = chosen.ok_or_else(|| {
        KopaError::domain("every candidate configuration failed to fit".to_string())
    })?;
    let tied_with: Vec<(u32, u32)> = table
        .iter()
        .filter(|r| {
            r.flag != IcFlag::Failed && r.ic == best.ic && (r.m, r.n) != (best.m, best.n)
        })
        .map(|r| (r.m, r.n))
        .collect();

    Ok(SelectionReport {
        kappa: crit.kappa,
        chosen: (best.m, best.n),
        tied_with,
        table,
    })
}

/// Heat-map CSV: `m,n,eta,lambda_hat,rss,ic,flag`, one row per candidate in
/// lexicographic order. Non-finite ic values are written literally
/// (`-inf`/`nan`).
pub fn report_to_csv(report: &SelectionReport) -> String {
    let mut out = String::from("m,n,eta,lambda_hat,rss,ic,flag\n");
    for r in &report.table {
        let flag = match r.flag {
            IcFlag::Ok => "",
            IcFlag::PerfectFit => "perfect_fit",
            IcFlag::Failed => "failed",
        };
        let fmt = |x: f64| {
            if x.is_nan() {
                "nan".to_string()
            } else if x == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                format!("{x:.17e}")
            }
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.m,
            r.n,
            r.eta,
            fmt(r.lambda_hat),
            fmt(r.rss),
            fmt(r.ic),
            flag
        ));
    }
    out
}

/// JSON mirror of the report (same field names; non-finite numbers become
/// `null`, the flag column carries the reason).
pub fn report_to_json(report: &SelectionReport) -> String {
    serde_json::to_string_pretty(report).expect("report serialization cannot fail")
}

/// Representation-gap diagnostics for a unit-Frobenius Kronecker pair.
#[derive(Debug, Clone)]
pub struct RepresentationGap {
    /// max over wrong configurations of ‖R[A⊗B]‖_S
    pub phi: f64,
    /// ψ² = 1 − φ²
    pub psi2: f64,
    /// ‖R[A⊗B]‖_S at every candidate configuration (lexicographic order,
    /// including the true one, where the value is 1).
    pub per_config: Vec<(Configuration, f64)>,
}

fn check_unit_factor(name: &str, m: &DenseMatrix) -> Result<()> {
    let n = m.frob_norm();
    if (n - 1.0).abs() > 1e-8 {
        return Err(KopaError::domain(format!(
            "‖{name}‖_F = {n}, expected a unit-Frobenius factor"
        )));
    }
    Ok(())
}

/// How much of the signal A⊗B each wrong configuration can capture.
pub fn representation_gap(
    a: &DenseMatrix,
    b: &DenseMatrix,
    true_cfg: Configuration,
    ctl: IterationControl,
) -> Result<RepresentationGap> {
    check_unit_factor("A", a)?;
    check_unit_factor("B", b)?;
    let (ar, ac) = true_cfg.a_shape();
    let (br, bc) = true_cfg.b_shape();
    if a.rows() != ar || a.cols() != ac || b.rows() != br || b.cols() != bc {
        return Err(KopaError::dim(format!(
            "factor shapes {}x{} ⊗ {}x{} do not match configuration {true_cfg}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let product = kron(a, b)?;
    let lattice = candidate_configs(true_cfg.big_m, true_cfg.big_n)?;
    let per_config: Vec<(Configuration, f64)> = lattice
        .entries()
        .par_iter()
        .map(|&cfg| {
            let r = rearrange(&product, cfg)?;
            Ok((cfg, spectral_norm(&r, ctl)?))
        })
        .collect::<Result<_>>()?;
    let phi = per_config
        .iter()
        .filter(|(cfg, _)| cfg.pair() != true_cfg.pair())
        .map(|&(_, s)| s)
        .fold(0.0_f64, f64::max);
    Ok(RepresentationGap {
        phi,
        psi2: 1.0 - phi * phi,
        per_config,
    })
}

/// Two-term diagnostics: per-term representation gaps and the principal-angle
/// bound ξ between the rearranged terms over wrong configurations (column
/// spaces where the rearranged matrices are tall, row spaces otherwise).
///
/// Configurations where the two spans must intersect by dimension count alone
/// (rank₁ + rank₂ exceeding the ambient dimension, e.g. the identity-like
/// rearrangements of full-rank products) are skipped: the angle there is 1 by
/// pigeonhole and carries no information about the terms.
#[derive(Debug, Clone)]
pub struct TwoTermDiagnostics {
    pub phi1: f64,
    pub phi2: f64,
    pub xi: f64,
}

pub fn two_term_diagnostics(
    a1: &DenseMatrix,
    b1: &DenseMatrix,
    a2: &DenseMatrix,
    b2: &DenseMatrix,
    true_cfg: Configuration,
    ctl: IterationControl,
) -> Result<TwoTermDiagnostics> {
    let gap1 = representation_gap(a1, b1, true_cfg, ctl)?;
    let gap2 = representation_gap(a2, b2, true_cfg, ctl)?;
    let p1 = kron(a1, b1)?;
    let p2 = kron(a2, b2)?;
    let lattice: ConfigLattice = candidate_configs(true_cfg.big_m, true_cfg.big_n)?;

    let xi = lattice
        .entries()
        .par_iter()
        .filter(|cfg| cfg.pair() != true_cfg.pair())
        .map(|&cfg| {
            let mut r1 = rearrange(&p1, cfg)?;
            let mut r2 = rearrange(&p2, cfg)?;
            // tall side: compare column spaces; wide side: row spaces
            let tall = cfg.m + cfg.n >= cfg.m_dagger() + cfg.n_dagger();
            if !tall {
                r1 = r1.transpose();
                r2 = r2.transpose();
            }
            let q1 = crate::angles::orthonormal_columns(&r1);
            let q2 = crate::angles::orthonormal_columns(&r2);
            if q1.len() + q2.len() > r1.rows() {
                // spans forced to intersect; the angle is degenerate
                return Ok(0.0);
            }
            crate::angles::cos_between_bases(&q1, &q2)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0_f64, f64::max);

    Ok(TwoTermDiagnostics {
        phi1: gap1.phi,
        phi2: gap2.phi,
        xi,
    })
}
