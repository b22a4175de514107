//! One-term and K-term Kronecker product estimation at a fixed configuration.
//!
//! Fitting rearranges the observation, takes leading singular triplets, and
//! maps the vectors back to factor matrices: λ̂ = ‖R[Y]‖_S, Â = unvec(u₁),
//! B̂ = unvec(v₁), σ̂² = ‖Y‖²_F − Σλ̂². The rearrangement is an isometry, so
//! ‖Y‖² always splits exactly into explained energy plus residual.

use crate::config::Configuration;
use crate::error::{KopaError, Result};
use crate::matrix::{kron, unvectorize, DenseMatrix};
use crate::spectral::{top_k_triplets, IterationControl, SingularTriplet};
use serde::{Deserialize, Serialize};

/// One Kronecker term λ·A⊗B with unit-Frobenius factors; the first materially
/// nonzero entry of vec(A) is positive.
#[derive(Debug, Clone)]
pub struct KroneckerTerm {
    pub lambda: f64,
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    /// σ for this term is within 1e-6 relative of a neighbouring one; the
    /// factors are then determined only up to rotation of the tied subspace.
    pub near_degenerate: bool,
}

/// A fitted (or generated) Kronecker product model: configuration, ordered
/// terms with λ₁ ≥ λ₂ ≥ …, the residual energy estimate σ̂² = ‖Y‖² − Σλ², and
/// the fitted data's squared Frobenius norm.
#[derive(Debug, Clone)]
pub struct KopaModel {
    pub cfg: Configuration,
    pub terms: Vec<KroneckerTerm>,
    pub sigma2_hat: f64,
    pub y_frob2: f64,
    /// σ̂² came out negative by rounding and was clamped to zero.
    pub sigma2_clamped: bool,
}

/// Tolerance under which a slightly negative σ̂² is attributed to rounding.
const SIGMA2_CLAMP_REL: f64 = 1e-8;
/// Post-hoc factor orthonormality requirement for multi-term fits.
const ORTHO_TOL: f64 = 1e-6;

fn term_from_triplet(t: &SingularTriplet, cfg: Configuration) -> Result<KroneckerTerm> {
    let (ar, ac) = cfg.a_shape();
    let (br, bc) = cfg.b_shape();
    Ok(KroneckerTerm {
        lambda: t.sigma,
        a: unvectorize(&t.u, ar, ac)?,
        b: unvectorize(&t.v, br, bc)?,
        near_degenerate: t.near_degenerate,
    })
}

fn build_model(
    y: &DenseMatrix,
    cfg: Configuration,
    triplets: &[SingularTriplet],
) -> Result<KopaModel> {
    let y_frob2 = y.frob_norm_sq();
    let explained: f64 = triplets.iter().map(|t| t.sigma * t.sigma).sum();
    let raw = y_frob2 - explained;
    let (sigma2_hat, clamped) = if raw >= 0.0 {
        (raw, false)
    } else if raw >= -SIGMA2_CLAMP_REL * y_frob2 {
        (0.0, true)
    } else {
        return Err(KopaError::domain(format!(
            "explained energy exceeds ‖Y‖² beyond rounding ({raw:e})"
        )));
    };
    let terms = triplets
        .iter()
        .map(|t| term_from_triplet(t, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(KopaModel {
        cfg,
        terms,
        sigma2_hat,
        y_frob2,
        sigma2_clamped: clamped,
    })
}

/// Nearest Kronecker product of `y` at configuration `cfg`.
pub fn fit_one_term(
    y: &DenseMatrix,
    cfg: Configuration,
    ctl: IterationControl,
) -> Result<KopaModel> {
    fit_k_terms(y, cfg, 1, ctl)
}

/// Best K-term Kronecker approximation at `cfg` (all terms share the
/// configuration). Factor sequences are orthonormal; a post-hoc check aborts
/// with a convergence error if deflation degraded orthogonality beyond 1e-6.
pub fn fit_k_terms(
    y: &DenseMatrix,
    cfg: Configuration,
    k: usize,
    ctl: IterationControl,
) -> Result<KopaModel> {
    if y.is_zero() {
        return Err(KopaError::domain("cannot fit a zero matrix (λ > 0 required)"));
    }
    let r = crate::rearrange::rearrange(y, cfg)?;
    let d = r.rows().min(r.cols());
    if k == 0 || k > d {
        return Err(KopaError::dim(format!(
            "K = {k} out of range 1..={d} for configuration {cfg}"
        )));
    }
    let triplets = top_k_triplets(&r, k, ctl)?;
    verify_orthonormal(&triplets)?;
    build_model(y, cfg, &triplets)
}

fn verify_orthonormal(ts: &[SingularTriplet]) -> Result<()> {
    for i in 0..ts.len() {
        let ui = &ts[i].u;
        let vi = &ts[i].v;
        let nu: f64 = ui.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nv: f64 = vi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if ts[i].sigma > 0.0 && ((nu - 1.0).abs() > ORTHO_TOL || (nv - 1.0).abs() > ORTHO_TOL) {
            return Err(KopaError::Convergence {
                iterations: 0,
                rel_err: (nu - 1.0).abs().max((nv - 1.0).abs()),
                best: Box::new(ts[i].clone()),
            });
        }
        for j in 0..i {
            if ts[i].sigma == 0.0 || ts[j].sigma == 0.0 {
                continue;
            }
            let du: f64 = ui.iter().zip(&ts[j].u).map(|(a, b)| a * b).sum();
            let dv: f64 = vi.iter().zip(&ts[j].v).map(|(a, b)| a * b).sum();
            if du.abs() > ORTHO_TOL || dv.abs() > ORTHO_TOL {
                return Err(KopaError::Convergence {
                    iterations: 0,
                    rel_err: du.abs().max(dv.abs()),
                    best: Box::new(ts[i].clone()),
                });
            }
        }
    }
    Ok(())
}

/// Σₖ λₖ·Aₖ⊗Bₖ at the model's ambient shape; an empty term list gives zeros.
pub fn reconstruct(model: &KopaModel) -> DenseMatrix {
    let (rows, cols) = model.cfg.ambient_shape();
    let mut out = DenseMatrix::zeros(rows, cols);
    for term in &model.terms {
        let k = kron(&term.a, &term.b).expect("factor shapes fixed by configuration");
        let data = out.data_mut();
        for (o, &x) in data.iter_mut().zip(k.data()) {
            *o += term.lambda * x;
        }
    }
    out
}

/// Σλₖ² / ‖Y‖²: fraction of the data's energy captured by the model.
pub fn variance_explained(model: &KopaModel) -> Result<f64> {
    if model.y_frob2 <= 0.0 {
        return Err(KopaError::domain("variance ratio undefined for zero data"));
    }
    Ok(model
        .terms
        .iter()
        .map(|t| t.lambda * t.lambda)
        .sum::<f64>()
        / model.y_frob2)
}

/// Serialized form of a [`KopaModel`]; see `to_json`/`from_json`.
#[derive(Serialize, Deserialize)]
struct ModelRecord {
    #[serde(rename = "M")]
    big_m: u32,
    #[serde(rename = "N")]
    big_n: u32,
    m: u32,
    n: u32,
    #[serde(rename = "K")]
    k: usize,
    lambda: Vec<f64>,
    #[serde(rename = "vec(A)")]
    vec_a: Vec<Vec<f64>>,
    #[serde(rename = "vec(B)")]
    vec_b: Vec<Vec<f64>>,
    sigma2_hat: f64,
}

impl KopaModel {
    pub fn to_json(&self) -> String {
        let rec = ModelRecord {
            big_m: self.cfg.big_m,
            big_n: self.cfg.big_n,
            m: self.cfg.m,
            n: self.cfg.n,
            k: self.terms.len(),
            lambda: self.terms.iter().map(|t| t.lambda).collect(),
            vec_a: self.terms.iter().map(|t| t.a.data().to_vec()).collect(),
            vec_b: self.terms.iter().map(|t| t.b.data().to_vec()).collect(),
            sigma2_hat: self.sigma2_hat,
        };
        serde_json::to_string_pretty(&rec).expect("model serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<KopaModel> {
        let rec: ModelRecord = serde_json::from_str(s)?;
        let cfg = Configuration::new(rec.m, rec.n, rec.big_m, rec.big_n)?;
        if rec.lambda.len() != rec.k || rec.vec_a.len() != rec.k || rec.vec_b.len() != rec.k {
            return Err(KopaError::dim("term count disagrees with K"));
        }
        let (ar, ac) = cfg.a_shape();
        let (br, bc) = cfg.b_shape();
        let mut terms = Vec::with_capacity(rec.k);
        let mut explained = 0.0;
        for i in 0..rec.k {
            terms.push(KroneckerTerm {
                lambda: rec.lambda[i],
                a: unvectorize(&rec.vec_a[i], ar, ac)?,
                b: unvectorize(&rec.vec_b[i], br, bc)?,
                near_degenerate: false,
            });
            explained += rec.lambda[i] * rec.lambda[i];
        }
        Ok(KopaModel {
            cfg,
            terms,
            sigma2_hat: rec.sigma2_hat,
            y_frob2: rec.sigma2_hat + explained,
            sigma2_clamped: false,
        })
    }
}
