//! Principal angles between column spaces and the sharpened norm-of-sum
//! bound Λ²(μ, ν, θ, η).

use crate::error::{KopaError, Result};
use crate::matrix::DenseMatrix;
use crate::spectral::{leading_triplet, IterationControl};

/// Orthonormal basis of the column space by pivoted modified Gram–Schmidt.
/// Columns whose residual norm falls below 1e-10 of the leading pivot norm
/// (a proxy for σ₁) are treated as dependent and dropped.
pub(crate) fn orthonormal_columns(m: &DenseMatrix) -> Vec<Vec<f64>> {
    let rows = m.rows();
    let cols = m.cols();
    let mut work: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| m.get(i, j)).collect())
        .collect();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut threshold = 0.0;

    loop {
        let (best, best_norm) = work
            .iter()
            .enumerate()
            .map(|(idx, col)| (idx, norm(col)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap_or((0, 0.0));
        if basis.is_empty() {
            threshold = 1e-10 * best_norm;
        }
        if best_norm <= threshold || best_norm == 0.0 {
            break;
        }
        let mut q = work.swap_remove(best);
        for x in &mut q {
            *x /= best_norm;
        }
        for col in &mut work {
            let c = dot(col, &q);
            for (x, y) in col.iter_mut().zip(&q) {
                *x -= c * y;
            }
        }
        basis.push(q);
        if work.is_empty() {
            break;
        }
    }
    basis
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// cos Θ(M₁, M₂): cosine of the smallest principal angle between the column
/// spaces, i.e. the largest singular value of Q₁ᵀQ₂ for orthonormal bases Qᵢ.
/// Result clamped into [0, 1].
pub fn principal_angle_cos(m1: &DenseMatrix, m2: &DenseMatrix) -> Result<f64> {
    if m1.rows() != m2.rows() {
        return Err(KopaError::dim(format!(
            "column spaces live in different ambient dimensions ({} vs {})",
            m1.rows(),
            m2.rows()
        )));
    }
    if m1.is_zero() || m2.is_zero() {
        return Err(KopaError::domain("principal angle of a zero matrix"));
    }
    let q1 = orthonormal_columns(m1);
    let q2 = orthonormal_columns(m2);
    cos_between_bases(&q1, &q2)
}

/// cos of the smallest principal angle given orthonormal bases.
pub(crate) fn cos_between_bases(q1: &[Vec<f64>], q2: &[Vec<f64>]) -> Result<f64> {
    if q1.is_empty() || q2.is_empty() {
        return Err(KopaError::domain("principal angle of a zero matrix"));
    }
    let mut cross = DenseMatrix::zeros(q1.len(), q2.len());
    for (i, a) in q1.iter().enumerate() {
        for (j, b) in q2.iter().enumerate() {
            cross.set(i, j, dot(a, b));
        }
    }
    let ctl = IterationControl {
        tol: 1e-12,
        max_iter: 20_000,
        seed: 0,
    };
    let sigma = leading_triplet(&cross, ctl)?.sigma;
    Ok(sigma.clamp(0.0, 1.0))
}

/// Squared norm-of-sum bound:
///
/// Λ² = ½·[√((μ²+ν²+2μν·cosθ·cosη)² − 4μ²ν²·sin²θ·sin²η) + μ²+ν²+2μν·cosθ·cosη]
///
/// For matrices M₁, M₂ with spectral norms μ, ν and smallest principal angles
/// θ (columns) and η (rows), ‖M₁+M₂‖²_S ≤ Λ²(μ, ν, θ, η). The bound tightens
/// the triangle inequality: aligned spaces give (μ+ν)², fully orthogonal row
/// and column spaces give max(μ², ν²).
pub fn norm_sum_bound(mu: f64, nu: f64, theta: f64, eta_angle: f64) -> Result<f64> {
    if !(mu >= 0.0) || !(nu >= 0.0) {
        return Err(KopaError::domain("norms must be nonnegative"));
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let tol = 1e-12;
    if !(-tol..=half_pi + tol).contains(&theta) || !(-tol..=half_pi + tol).contains(&eta_angle) {
        return Err(KopaError::domain("angles must lie in [0, π/2]"));
    }
    let cross = 2.0 * mu * nu * theta.cos() * eta_angle.cos();
    let base = mu * mu + nu * nu + cross;
    let disc = base * base
        - 4.0 * mu * mu * nu * nu * theta.sin().powi(2) * eta_angle.sin().powi(2);
    Ok(0.5 * (disc.max(0.0).sqrt() + base))
}
