//! Reference oracles for testing the main library.
//!
//! Everything here is written from scratch against textbook definitions and
//! deliberately does not link `kopa-core`, so oracle results stay independent
//! of the implementation paths they are used to check. Matrices are passed as
//! `(rows, cols, row-major slice)`.

/// Full SVD by one-sided Jacobi rotations.
///
/// Returns `(singular_values, u, v)` with values sorted descending, `u` as
/// `rows × min_dim` and `v` as `cols × min_dim`, both row-major. Accuracy is
/// close to machine precision, which is what makes it usable as an oracle.
pub fn jacobi_svd(rows: usize, cols: usize, data: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    assert_eq!(data.len(), rows * cols);
    // One-sided Jacobi orthogonalizes columns; run on the transpose when the
    // matrix is wide so the working matrix is tall.
    if cols > rows {
        let t = transpose(rows, cols, data);
        let (s, u, v) = jacobi_svd(cols, rows, &t);
        return (s, v, u);
    }

    let m = rows;
    let n = cols;
    // Column-major working copy of X and of V (n×n identity).
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..m).map(|i| data[i * n + j]).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut col = vec![0.0; n];
            col[j] = 1.0;
            col
        })
        .collect();

    let eps = 1e-15_f64;
    for _sweep in 0..64 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    app += a[p][i] * a[p][i];
                    aqq += a[q][i] * a[q][i];
                    apq += a[p][i] * a[q][i];
                }
                if apq.abs() <= eps * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let xp = a[p][i];
                    let xq = a[q][i];
                    a[p][i] = c * xp - s * xq;
                    a[q][i] = s * xp + c * xq;
                }
                for i in 0..n {
                    let vp = v[p][i];
                    let vq = v[q][i];
                    v[p][i] = c * vp - s * vq;
                    v[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = a.iter().map(|col| norm(col)).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut sigma = Vec::with_capacity(n);
    let mut u_flat = vec![0.0; m * n];
    let mut v_flat = vec![0.0; n * n];
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        for i in 0..m {
            u_flat[i * n + k] = if s > 0.0 { a[j][i] / s } else { 0.0 };
        }
        for i in 0..n {
            v_flat[i * n + k] = v[j][i];
        }
    }
    (sigma, u_flat, v_flat)
}

/// Singular values only, descending.
pub fn singular_values(rows: usize, cols: usize, data: &[f64]) -> Vec<f64> {
    jacobi_svd(rows, cols, data).0
}

/// Largest singular value (spectral norm).
pub fn sigma1(rows: usize, cols: usize, data: &[f64]) -> f64 {
    singular_values(rows, cols, data)[0]
}

/// Rearrangement oracle done the slow, obvious way: walk the p×q grid of
/// p'×q' blocks and copy each block out row by row. Row r = i*q + j of the
/// result holds the row-stacked entries of block (i, j).
pub fn naive_rearrange(
    c_rows: usize,
    c_cols: usize,
    c: &[f64],
    p: usize,
    q: usize,
) -> (usize, usize, Vec<f64>) {
    assert_eq!(c.len(), c_rows * c_cols);
    assert_eq!(c_rows % p, 0);
    assert_eq!(c_cols % q, 0);
    let bp = c_rows / p;
    let bq = c_cols / q;
    let mut out = vec![0.0; c_rows * c_cols];
    let out_cols = bp * bq;
    for i in 0..p {
        for j in 0..q {
            let r = i * q + j;
            let mut w = 0;
            for k in 0..bp {
                for l in 0..bq {
                    out[r * out_cols + w] = c[(i * bp + k) * c_cols + (j * bq + l)];
                    w += 1;
                }
            }
        }
    }
    (p * q, out_cols, out)
}

/// Plain dense matmul, used by tests that need an independent product.
pub fn matmul(
    ar: usize,
    ac: usize,
    a: &[f64],
    br: usize,
    bc: usize,
    b: &[f64],
) -> (usize, usize, Vec<f64>) {
    assert_eq!(ac, br);
    let mut out = vec![0.0; ar * bc];
    for i in 0..ar {
        for k in 0..ac {
            let aik = a[i * ac + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..bc {
                out[i * bc + j] += aik * b[k * bc + j];
            }
        }
    }
    (ar, bc, out)
}

fn transpose(rows: usize, cols: usize, data: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = data[i * cols + j];
        }
    }
    out
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_of_diagonal() {
        // diag(3, 1) embedded in 2x2
        let (s, _, _) = jacobi_svd(2, 2, &[3.0, 0.0, 0.0, 1.0]);
        assert!((s[0] - 3.0).abs() < 1e-14);
        assert!((s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_reconstructs() {
        // X = U S V' must hold for a fixed 3x2 matrix
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let (s, u, v) = jacobi_svd(3, 2, &x);
        for i in 0..3 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += u[i * 2 + k] * s[k] * v[j * 2 + k];
                }
                assert!((acc - x[i * 2 + j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn svd_wide_matrix() {
        let x = [1.0, 0.0, 2.0, 0.0, 1.0, 0.0];
        let (s, u, v) = jacobi_svd(2, 3, &x);
        assert_eq!(s.len(), 2);
        for i in 0..2 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += u[i * 2 + k] * s[k] * v[j * 2 + k];
                }
                assert!((acc - x[i * 3 + j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rearrange_single_block() {
        // p=q=1: one block, its row-major vec becomes the single row
        let c = [1.0, 2.0, 3.0, 4.0];
        let (r, cc, out) = naive_rearrange(2, 2, &c, 1, 1);
        assert_eq!((r, cc), (1, 4));
        assert_eq!(out, vec![1.0, 2.0, 3.0, 4.0]);
    }
}
