//! Seeded data generators and the Monte Carlo harness.
//!
//! All randomness flows through [`SeedStream`] with fixed stream paths, so a
//! given (seed, generator) pair is bit-reproducible:
//!
//! * factors of term k:  paths `[0xA, k]` and `[0xB, k]`
//! * gap-construction direction vectors: `[0xD, i]`
//! * the noise matrix: `[0xE]`
//!
//! The observation model is Y = Σ λₖ·Aₖ⊗Bₖ + (σ / 2^{(M+N)/2})·E with E a
//! standard Gaussian ensemble — per-entry noise variance σ²/2^{M+N}.

use crate::config::Configuration;
use crate::error::{KopaError, Result};
use crate::fit::{fit_one_term, KopaModel, KroneckerTerm};
use crate::matrix::{kron, DenseMatrix};
use crate::rng::SeedStream;
use crate::select::{select_configuration, Criterion};
use crate::spectral::IterationControl;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const STREAM_FACTOR_A: u64 = 0xA;
const STREAM_FACTOR_B: u64 = 0xB;
const STREAM_GAP: u64 = 0xD;
const STREAM_NOISE: u64 = 0xE;

/// A generated observation together with its noiseless truth.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub y: DenseMatrix,
    pub truth: KopaModel,
    pub sigma: f64,
    pub seed: u64,
}

fn unit_check(name: &str, m: &DenseMatrix) -> Result<()> {
    if (m.frob_norm() - 1.0).abs() > 1e-8 {
        return Err(KopaError::domain(format!(
            "{name} must have unit Frobenius norm"
        )));
    }
    Ok(())
}

fn cfg_from_factors(a: &DenseMatrix, b: &DenseMatrix) -> Result<Configuration> {
    let m = crate::config::log2_exact(a.rows())?;
    let n = crate::config::log2_exact(a.cols())?;
    let md = crate::config::log2_exact(b.rows())?;
    let nd = crate::config::log2_exact(b.cols())?;
    Configuration::new(m, n, m + md, n + nd)
}

fn add_scaled_noise(signal: DenseMatrix, sigma: f64, seed: u64) -> DenseMatrix {
    if sigma == 0.0 {
        return signal;
    }
    let exp = crate::config::log2_exact(signal.rows()).unwrap()
        + crate::config::log2_exact(signal.cols()).unwrap();
    let scale = sigma / 2f64.powf(exp as f64 / 2.0);
    let mut noise_stream = SeedStream::new(seed, &[STREAM_NOISE]);
    let mut out = signal;
    for x in out.data_mut() {
        *x += scale * noise_stream.normal();
    }
    out
}

fn truth_model(cfg: Configuration, terms: Vec<KroneckerTerm>) -> KopaModel {
    let y_frob2 = terms.iter().map(|t| t.lambda * t.lambda).sum();
    KopaModel {
        cfg,
        terms,
        sigma2_hat: 0.0,
        y_frob2,
        sigma2_clamped: false,
    }
}

/// Flip the signs of a factor pair so the first materially nonzero entry of
/// vec(A) is positive; A⊗B is unchanged.
fn fix_pair_signs(a: &mut DenseMatrix, b: &mut DenseMatrix) {
    let maxabs = a.data().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(&lead) = a.data().iter().find(|x| x.abs() > 1e-12 * maxabs) {
        if lead < 0.0 {
            for x in a.data_mut() {
                *x = -*x;
            }
            for x in b.data_mut() {
                *x = -*x;
            }
        }
    }
}

/// Deterministic scheme: Y = λ·A⊗B + (σ/2^{(M+N)/2})·E for given unit
/// factors.
pub fn gen_deterministic(
    lambda: f64,
    a: &DenseMatrix,
    b: &DenseMatrix,
    sigma: f64,
    seed: u64,
) -> Result<GeneratedInstance> {
    if !(lambda > 0.0) {
        return Err(KopaError::domain("λ must be positive"));
    }
    if !(sigma >= 0.0) {
        return Err(KopaError::domain("σ must be nonnegative"));
    }
    unit_check("A", a)?;
    unit_check("B", b)?;
    let cfg = cfg_from_factors(a, b)?;
    let signal = kron(a, b)?.scale(lambda);
    let y = add_scaled_noise(signal, sigma, seed);
    let truth = truth_model(
        cfg,
        vec![KroneckerTerm {
            lambda,
            a: a.clone(),
            b: b.clone(),
            near_degenerate: false,
        }],
    );
    Ok(GeneratedInstance {
        y,
        truth,
        sigma,
        seed,
    })
}

fn draw_unit_factor(
    rows: usize,
    cols: usize,
    seed: u64,
    path: &[u64],
) -> (DenseMatrix, f64) {
    let mut stream = SeedStream::new(seed, path);
    let data = stream.normal_vec(rows * cols);
    let raw = DenseMatrix::from_parts(rows, cols, data);
    let norm = raw.frob_norm();
    (raw.scale(1.0 / norm), norm)
}

/// Random scheme: Gaussian factor matrices rescaled to unit norm, with
/// λ = λ₀·‖Ã‖_F·‖B̃‖_F / 2^{(M+N)/2} (so E[λ²] = λ₀²).
pub fn gen_random_scheme(
    lambda0: f64,
    cfg: Configuration,
    sigma: f64,
    seed: u64,
) -> Result<GeneratedInstance> {
    if !(lambda0 > 0.0) {
        return Err(KopaError::domain("λ₀ must be positive"));
    }
    let (ar, ac) = cfg.a_shape();
    let (br, bc) = cfg.b_shape();
    let (mut a, na) = draw_unit_factor(ar, ac, seed, &[STREAM_FACTOR_A, 1]);
    let (mut b, nb) = draw_unit_factor(br, bc, seed, &[STREAM_FACTOR_B, 1]);
    fix_pair_signs(&mut a, &mut b);
    let half_dim = 2f64.powf((cfg.big_m + cfg.big_n) as f64 / 2.0);
    let lambda = lambda0 * na * nb / half_dim;
    let signal = kron(&a, &b)?.scale(lambda);
    let y = add_scaled_noise(signal, sigma, seed);
    let truth = truth_model(
        cfg,
        vec![KroneckerTerm {
            lambda,
            a,
            b,
            near_degenerate: false,
        }],
    );
    Ok(GeneratedInstance {
        y,
        truth,
        sigma,
        seed,
    })
}

/// Gap-controlled construction: the factor splits into two orthogonal halves
/// with weights √φ² and √(1−φ²), which pins the representation gap at φ² for
/// the configurations one row-split away from the truth.
///
/// A = √φ²·[1;0]⊗D₁ + √(1−φ²)·[0;1]⊗D₂ (B analogous with D₃, D₄), where the
/// Dᵢ are independent random unit matrices with vec(D₁)⊥vec(D₂) and
/// vec(D₃)⊥vec(D₄), drawn as normalized Gaussians with one Gram–Schmidt step.
pub fn gen_gap_controlled(
    varphi2: f64,
    cfg: Configuration,
    seed: u64,
) -> Result<(DenseMatrix, DenseMatrix)> {
    if !(varphi2 > 0.0 && varphi2 <= 0.5) {
        return Err(KopaError::domain("varphi2 must lie in (0, 0.5]"));
    }
    if cfg.m == 0 || cfg.m_dagger() == 0 {
        return Err(KopaError::dim(
            "gap construction needs at least one row split on each factor (m ≥ 1 and m† ≥ 1)",
        ));
    }
    let build = |rows: usize, cols: usize, d_first: u64| -> DenseMatrix {
        let half = rows / 2;
        let dim = half * cols;
        let mut s1 = SeedStream::new(seed, &[STREAM_GAP, d_first]);
        let mut s2 = SeedStream::new(seed, &[STREAM_GAP, d_first + 1]);
        let mut d1 = s1.normal_vec(dim);
        let mut d2 = s2.normal_vec(dim);
        let n1 = d1.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut d1 {
            *x /= n1;
        }
        let proj: f64 = d1.iter().zip(&d2).map(|(a, b)| a * b).sum();
        for (x, y) in d2.iter_mut().zip(&d1) {
            *x -= proj * y;
        }
        let n2 = d2.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut d2 {
            *x /= n2;
        }
        let w1 = varphi2.sqrt();
        let w2 = (1.0 - varphi2).sqrt();
        let mut data = Vec::with_capacity(rows * cols);
        data.extend(d1.iter().map(|x| w1 * x));
        data.extend(d2.iter().map(|x| w2 * x));
        DenseMatrix::from_parts(rows, cols, data)
    };
    let (ar, ac) = cfg.a_shape();
    let (br, bc) = cfg.b_shape();
    Ok((build(ar, ac, 1), build(br, bc, 3)))
}

/// Two-term model with independent Gaussian pairs (near-orthogonality across
/// terms is emergent, not enforced). λ₁₀ ≥ λ₂₀ > 0.
pub fn gen_two_term(
    lambda10: f64,
    lambda20: f64,
    cfg: Configuration,
    sigma: f64,
    seed: u64,
) -> Result<GeneratedInstance> {
    if !(lambda20 > 0.0) || lambda10 < lambda20 {
        return Err(KopaError::domain("need λ₁₀ ≥ λ₂₀ > 0"));
    }
    let (ar, ac) = cfg.a_shape();
    let (br, bc) = cfg.b_shape();
    let half_dim = 2f64.powf((cfg.big_m + cfg.big_n) as f64 / 2.0);
    let mut terms = Vec::with_capacity(2);
    let mut signal = DenseMatrix::zeros(1 << cfg.big_m, 1 << cfg.big_n);
    for (k, l0) in [(1u64, lambda10), (2u64, lambda20)] {
        let (mut a, na) = draw_unit_factor(ar, ac, seed, &[STREAM_FACTOR_A, k]);
        let (mut b, nb) = draw_unit_factor(br, bc, seed, &[STREAM_FACTOR_B, k]);
        fix_pair_signs(&mut a, &mut b);
        let lambda = l0 * na * nb / half_dim;
        let prod = kron(&a, &b)?;
        for (s, &x) in signal.data_mut().iter_mut().zip(prod.data()) {
            *s += lambda * x;
        }
        terms.push(KroneckerTerm {
            lambda,
            a,
            b,
            near_degenerate: false,
        });
    }
    terms.sort_by(|x, y| y.lambda.partial_cmp(&x.lambda).unwrap());
    let y = add_scaled_noise(signal, sigma, seed);
    let truth = truth_model(cfg, terms);
    Ok(GeneratedInstance {
        y,
        truth,
        sigma,
        seed,
    })
}

/// Which experiment a spec describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    #[serde(rename = "estimation")]
    Estimation,
    #[serde(rename = "select-one-term")]
    SelectOneTerm,
    #[serde(rename = "select-two-term")]
    SelectTwoTerm,
}

/// JSON experiment description (see the simulation docs in the README for
/// examples). `lambda_grid` is the signal-strength grid; selection kinds also
/// need `varphi2_grid` (one-term) or `lambda_ratio_grid` (two-term, values
/// are λ₂₀²/λ₁₀²).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    #[serde(rename = "M")]
    pub big_m: u32,
    #[serde(rename = "N")]
    pub big_n: u32,
    pub m0: u32,
    pub n0: u32,
    pub lambda_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varphi2_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_ratio_grid: Option<Vec<f64>>,
    pub sigma: f64,
    pub reps: u32,
    pub kappa: f64,
    pub base_seed: u64,
}

impl ExperimentSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(KopaError::domain("reps must be at least 1"));
        }
        if self.lambda_grid.is_empty() {
            return Err(KopaError::domain("lambda_grid must be nonempty"));
        }
        if !(self.sigma >= 0.0) {
            return Err(KopaError::domain("sigma must be nonnegative"));
        }
        if self.kappa < 0.0 {
            return Err(KopaError::domain("kappa must be nonnegative"));
        }
        Configuration::new(self.m0, self.n0, self.big_m, self.big_n)?;
        match self.kind {
            ExperimentKind::SelectOneTerm => {
                if self.varphi2_grid.as_ref().map_or(true, |g| g.is_empty()) {
                    return Err(KopaError::domain(
                        "select-one-term requires a nonempty varphi2_grid",
                    ));
                }
            }
            ExperimentKind::SelectTwoTerm => {
                if self
                    .lambda_ratio_grid
                    .as_ref()
                    .map_or(true, |g| g.is_empty())
                {
                    return Err(KopaError::domain(
                        "select-two-term requires a nonempty lambda_ratio_grid",
                    ));
                }
            }
            ExperimentKind::Estimation => {}
        }
        Ok(())
    }

    fn true_cfg(&self) -> Configuration {
        Configuration::new(self.m0, self.n0, self.big_m, self.big_n).expect("validated")
    }
}

/// Per-rep estimation-error record (natural logs of the squared errors).
#[derive(Debug, Clone, Serialize)]
pub struct EstimationRepRecord {
    pub lambda: f64,
    pub rep: u32,
    pub ln_lambda_err: f64,
    pub ln_factor_err: f64,
}

/// Per-rep selection outcome.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionRepRecord {
    /// varphi² (one-term) or λ₂₀²/λ₁₀² (two-term); the grouping grid.
    pub group: f64,
    pub grid_value: f64,
    pub rep: u32,
    pub correct: bool,
    pub chosen: (u32, u32),
}

/// Aggregated frequency row: correct-selection count per grid point.
#[derive(Debug, Clone, Serialize)]
pub struct FrequencyRow {
    pub group: f64,
    pub grid_value: f64,
    pub correct: u32,
    pub reps: u32,
    pub frequency: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencyTable {
    pub rows: Vec<FrequencyRow>,
}

#[derive(Debug, Clone)]
pub enum ExperimentOutput {
    Estimation(Vec<EstimationRepRecord>),
    Selection {
        kind: ExperimentKind,
        records: Vec<SelectionRepRecord>,
        frequencies: FrequencyTable,
    },
}

fn rep_seed(base: u64, kind: u64, group_i: usize, grid_i: usize, rep: u32) -> u64 {
    // splitmix-style fold; distinct (kind, group, grid, rep) give distinct
    // streams under the SeedStream keying
    let mut acc = base;
    for v in [kind, group_i as u64, grid_i as u64, rep as u64] {
        acc = acc
            .rotate_left(23)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(v.wrapping_mul(0xBF58_476D_1CE4_E5B9).wrapping_add(1));
    }
    acc
}

/// Run the Monte Carlo experiment described by `spec`. Repetitions execute in
/// parallel; outputs are ordered by (group, grid point, rep) regardless of
/// scheduling. Per-rep seeds derive deterministically from `base_seed`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    match spec.kind {
        ExperimentKind::Estimation => run_estimation(spec),
        ExperimentKind::SelectOneTerm | ExperimentKind::SelectTwoTerm => run_selection(spec),
    }
}

fn run_estimation(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    let cfg = spec.true_cfg();
    let (ar, ac) = cfg.a_shape();
    let (br, bc) = cfg.b_shape();
    // the canonical deterministic factors: vec(A) = e₁, vec(B) = e₁
    let mut a = DenseMatrix::zeros(ar, ac);
    a.set(0, 0, 1.0);
    let mut b = DenseMatrix::zeros(br, bc);
    b.set(0, 0, 1.0);
    let ctl = IterationControl {
        tol: 1e-12,
        max_iter: 10_000,
        seed: 0,
    };

    let tasks: Vec<(usize, u32)> = (0..spec.lambda_grid.len())
        .flat_map(|gi| (0..spec.reps).map(move |r| (gi, r)))
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(gi, rep)| -> Result<EstimationRepRecord> {
            let lambda = spec.lambda_grid[gi];
            let seed = rep_seed(spec.base_seed, 1, 0, gi, rep);
            let inst = gen_deterministic(lambda, &a, &b, spec.sigma, seed)
                .map_err(|e| KopaError::domain(format!("grid {gi} rep {rep}: {e}")))?;
            let model = fit_one_term(&inst.y, cfg, ctl)
                .map_err(|e| KopaError::domain(format!("grid {gi} rep {rep}: {e}")))?;
            let lhat = model.terms[0].lambda;
            let da = model.terms[0].a.sub(&a)?.frob_norm_sq();
            let db = model.terms[0].b.sub(&b)?.frob_norm_sq();
            Ok(EstimationRepRecord {
                lambda,
                rep,
                ln_lambda_err: ((lhat / lambda - 1.0).powi(2)).ln(),
                ln_factor_err: da.ln() + db.ln(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentOutput::Estimation(rows))
}

fn run_selection(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    let cfg = spec.true_cfg();
    let crit = Criterion::new(spec.kappa)?;
    let ctl = IterationControl {
        tol: 1e-6,
        max_iter: 5000,
        seed: 0,
    };
    let (groups, kind_tag) = match spec.kind {
        ExperimentKind::SelectOneTerm => (spec.varphi2_grid.clone().unwrap(), 2u64),
        ExperimentKind::SelectTwoTerm => (spec.lambda_ratio_grid.clone().unwrap(), 3u64),
        ExperimentKind::Estimation => unreachable!(),
    };

    let tasks: Vec<(usize, usize, u32)> = (0..groups.len())
        .flat_map(|vi| {
            (0..spec.lambda_grid.len())
                .flat_map(move |gi| (0..spec.reps).map(move |r| (vi, gi, r)))
        })
        .collect();

    let records = tasks
        .par_iter()
        .map(|&(vi, gi, rep)| -> Result<SelectionRepRecord> {
            let group = groups[vi];
            let lambda = spec.lambda_grid[gi];
            let seed = rep_seed(spec.base_seed, kind_tag, vi, gi, rep);
            let attach =
                |e: KopaError| KopaError::domain(format!("group {vi} grid {gi} rep {rep}: {e}"));
            let y = match spec.kind {
                ExperimentKind::SelectOneTerm => {
                    let (a, b) = gen_gap_controlled(group, cfg, seed).map_err(attach)?;
                    gen_deterministic(lambda, &a, &b, spec.sigma, seed)
                        .map_err(attach)?
                        .y
                }
                ExperimentKind::SelectTwoTerm => {
                    let l20 = lambda * group.sqrt();
                    gen_two_term(lambda, l20, cfg, spec.sigma, seed)
                        .map_err(attach)?
                        .y
                }
                ExperimentKind::Estimation => unreachable!(),
            };
            let report = select_configuration(&y, crit, ctl).map_err(attach)?;
            Ok(SelectionRepRecord {
                group,
                grid_value: lambda,
                rep,
                correct: report.chosen == cfg.pair(),
                chosen: report.chosen,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // records are in task order (group-major, then grid, then rep)
    let mut rows = Vec::with_capacity(groups.len() * spec.lambda_grid.len());
    for (vi, &group) in groups.iter().enumerate() {
        for (gi, &gv) in spec.lambda_grid.iter().enumerate() {
            let base = (vi * spec.lambda_grid.len() + gi) * spec.reps as usize;
            let chunk = &records[base..base + spec.reps as usize];
            let correct = chunk.iter().filter(|r| r.correct).count() as u32;
            rows.push(FrequencyRow {
                group,
                grid_value: gv,
                correct,
                reps: spec.reps,
                frequency: correct as f64 / spec.reps as f64,
            });
        }
    }
    Ok(ExperimentOutput::Selection {
        kind: spec.kind,
        records,
        frequencies: FrequencyTable { rows },
    })
}

/// Median of the per-λ `ln((λ̂/λ−1)²)` and factor-error columns.
pub fn estimation_medians(rows: &[EstimationRepRecord]) -> Vec<(f64, f64, f64)> {
    let mut lambdas: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lambdas.dedup();
    lambdas
        .into_iter()
        .map(|l| {
            let mut le: Vec<f64> = rows
                .iter()
                .filter(|r| r.lambda == l)
                .map(|r| r.ln_lambda_err)
                .collect();
            let mut fe: Vec<f64> = rows
                .iter()
                .filter(|r| r.lambda == l)
                .map(|r| r.ln_factor_err)
                .collect();
            (l, median(&mut le), median(&mut fe))
        })
        .collect()
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Ordinary least-squares slope of y against x.
pub fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Detailed per-rep CSV (`grid_value,rep,outcome,...`).
pub fn experiment_to_csv(out: &ExperimentOutput) -> String {
    match out {
        ExperimentOutput::Estimation(rows) => {
            let mut s = String::from("grid_value,rep,outcome,ln_lambda_err,ln_factor_err\n");
            for r in rows {
                s.push_str(&format!(
                    "{:.17e},{},ok,{:.17e},{:.17e}\n",
                    r.lambda, r.rep, r.ln_lambda_err, r.ln_factor_err
                ));
            }
            s
        }
        ExperimentOutput::Selection { kind, records, .. } => {
            let group_col = group_column(*kind);
            let mut s = format!("grid_value,rep,outcome,{group_col},chosen_m,chosen_n\n");
            for r in records {
                s.push_str(&format!(
                    "{:.17e},{},{},{:.17e},{},{}\n",
                    r.grid_value,
                    r.rep,
                    if r.correct { "correct" } else { "wrong" },
                    r.group,
                    r.chosen.0,
                    r.chosen.1
                ));
            }
            s
        }
    }
}

/// Aggregated per-figure CSV (medians or frequencies).
pub fn experiment_aggregate_csv(out: &ExperimentOutput) -> String {
    match out {
        ExperimentOutput::Estimation(rows) => {
            let mut s = String::from("grid_value,median_ln_lambda_err,median_ln_factor_err\n");
            for (l, me, mf) in estimation_medians(rows) {
                s.push_str(&format!("{l:.17e},{me:.17e},{mf:.17e}\n"));
            }
            s
        }
        ExperimentOutput::Selection {
            kind, frequencies, ..
        } => {
            let group_col = group_column(*kind);
            let mut s = format!("{group_col},grid_value,correct,reps,frequency\n");
            for r in &frequencies.rows {
                s.push_str(&format!(
                    "{:.17e},{:.17e},{},{},{}\n",
                    r.group, r.grid_value, r.correct, r.reps, r.frequency
                ));
            }
            s
        }
    }
}

fn group_column(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::SelectOneTerm => "varphi2",
        ExperimentKind::SelectTwoTerm => "lambda_ratio",
        ExperimentKind::Estimation => "group",
    }
}
