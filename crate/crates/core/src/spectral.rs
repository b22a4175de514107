//! Singular-value machinery: leading triplet by power iteration on the Gram
//! operator, top-k by Hotelling deflation, spectral norms, and a full-spectrum
//! Jacobi routine for the few places that need every singular value.
//!
//! Iteration is deterministic: the start vector comes from a stream seeded by
//! `IterationControl::seed` and the matrix shape, so repeated calls are
//! bit-identical. Sign convention: the first materially nonzero entry of `u`
//! is positive (`v` is flipped together with `u`).

use crate::error::{KopaError, Result};
use crate::matrix::DenseMatrix;
use crate::rng::SeedStream;

/// Convergence controls for the iterative routines.
///
/// `tol` is the relative tolerance on the Rayleigh quotient of the Gram
/// operator (σ² scale): iteration stops once the estimated remaining error of
/// σ² drops below `tol · σ²`.
#[derive(Debug, Clone, Copy)]
pub struct IterationControl {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for IterationControl {
    fn default() -> Self {
        IterationControl {
            tol: 1e-10,
            max_iter: 5000,
            seed: 0,
        }
    }
}

impl IterationControl {
    pub fn with_tol(tol: f64) -> Self {
        IterationControl {
            tol,
            ..Default::default()
        }
    }
}

/// One singular triplet (σ, u, v), ‖u‖ = ‖v‖ = 1.
///
/// `degenerate` marks triplets returned for an exactly zero matrix (σ = 0,
/// arbitrary unit vectors). `near_degenerate` is set by [`top_k_triplets`]
/// when a neighbouring singular value is within 1e-6 relative — the vectors
/// are then only determined up to rotation of the tied subspace.
#[derive(Debug, Clone)]
pub struct SingularTriplet {
    pub sigma: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub degenerate: bool,
    pub near_degenerate: bool,
}

const NEAR_DEGENERATE_GAP: f64 = 1e-6;
/// Entries below this fraction of the max are not trusted for sign picking.
const SIGN_EPS: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scale_in_place(a: &mut [f64], s: f64) {
    for x in a {
        *x *= s;
    }
}

/// Remove components along each (unit) vector in `basis`.
fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(v, b);
        if c != 0.0 {
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
}

/// Enforce the sign convention: first entry of `u` with |entry| above
/// `SIGN_EPS`·max is made positive, flipping `v` alongside.
fn fix_signs(u: &mut [f64], v: &mut [f64]) {
    let maxabs = u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if maxabs == 0.0 {
        return;
    }
    let lead = u.iter().find(|x| x.abs() > SIGN_EPS * maxabs);
    if let Some(&x) = lead {
        if x < 0.0 {
            scale_in_place(u, -1.0);
            scale_in_place(v, -1.0);
        }
    }
}

/// Vector residual must reach this multiple of `tol` (the Rayleigh quotient
/// converges quadratically faster than the vectors, so without this the
/// returned directions would carry √tol-sized errors).
const VEC_TOL_FACTOR: f64 = 10.0;

/// Tracks the monotone Rayleigh sequence (geometric tail estimate on its
/// increments) together with the eigen-residual ‖Gv − qv‖/q of the iterate.
/// Converged means: the Rayleigh tail is below `tol` *and* the vector
/// residual is below 10·tol — or has stopped improving, which happens
/// exactly in near-degenerate subspaces where the direction is not
/// identifiable anyway.
struct ConvergenceWatch {
    q_prev: f64,
    delta_prev: f64,
    floor_hits: u32,
    best_rvec: f64,
    rvec_stall: u32,
}

impl ConvergenceWatch {
    fn new() -> Self {
        ConvergenceWatch {
            q_prev: 0.0,
            delta_prev: f64::INFINITY,
            floor_hits: 0,
            best_rvec: f64::INFINITY,
            rvec_stall: 0,
        }
    }

    /// Feed the next Rayleigh value and relative vector residual; returns
    /// (converged, relative error estimate).
    fn update(&mut self, q: f64, rvec: f64, tol: f64, need_vectors: bool) -> (bool, f64) {
        if q <= 0.0 {
            // zero (or numerically vanished) matrix; nothing to converge to
            return (true, 0.0);
        }
        let delta = (q - self.q_prev).max(0.0);
        // Machine floor: increments are pure rounding noise.
        if delta <= 4.0 * f64::EPSILON * q {
            self.floor_hits += 1;
        } else {
            self.floor_hits = 0;
        }
        let tail = if delta == 0.0 {
            0.0
        } else if self.delta_prev.is_finite() && delta < self.delta_prev {
            let r = delta / self.delta_prev;
            delta * r / (1.0 - r)
        } else {
            f64::INFINITY
        };
        let rel = (delta / q).max(tail / q);
        let ray_ok = rel <= tol || self.floor_hits >= 3 || delta == 0.0;

        let vec_ok = if need_vectors {
            if rvec < self.best_rvec * (1.0 - 1e-3) {
                self.best_rvec = rvec;
                self.rvec_stall = 0;
            } else {
                self.rvec_stall += 1;
            }
            rvec <= VEC_TOL_FACTOR * tol || self.rvec_stall >= 12
        } else {
            true
        };

        self.q_prev = q;
        self.delta_prev = delta;
        let err = if need_vectors { rel.max(rvec) } else { rel };
        (ray_ok && vec_ok, err)
    }
}

/// Power iteration state shared by the two routes. `prev_u`/`prev_v` hold the
/// already-extracted triplets for deflated runs; empty slices otherwise.
/// `need_vectors = false` relaxes convergence to the Rayleigh criterion only
/// (for norm-only queries the singular vectors do not matter and demanding
/// them would slow clustered spectra down considerably).
struct PowerConfig<'a> {
    ctl: IterationControl,
    prev_u: &'a [Vec<f64>],
    prev_v: &'a [Vec<f64>],
    stream_tag: u64,
    need_vectors: bool,
}

/// Choose the Gram-matrix route when the Gram matrix is clearly smaller than
/// the matrix itself: iterations then run on a dense c×c symmetric matrix.
fn use_gram_route(rows: usize, cols: usize) -> bool {
    let c = rows.min(cols);
    c <= 2048 && 2 * c * c <= rows * cols
}

fn start_vector(n: usize, cfg: &PowerConfig) -> Vec<f64> {
    let mut stream = SeedStream::new(cfg.ctl.seed, &[0x5ee0, cfg.stream_tag, n as u64]);
    let mut v = stream.normal_vec(n);
    project_out(&mut v, cfg.prev_v);
    let nv = norm(&v);
    if nv > 0.0 {
        scale_in_place(&mut v, 1.0 / nv);
    } else {
        v[0] = 1.0;
    }
    v
}

/// Leading triplet of `x` (optionally deflated against previous triplets).
fn power_leading(x: &DenseMatrix, cfg: &PowerConfig) -> Result<SingularTriplet> {
    let (rows, cols) = (x.rows(), x.cols());

    if x.is_zero() {
        let mut u = vec![0.0; rows];
        let mut v = vec![0.0; cols];
        u[0] = 1.0;
        v[0] = 1.0;
        return Ok(SingularTriplet {
            sigma: 0.0,
            u,
            v,
            degenerate: true,
            near_degenerate: false,
        });
    }

    // Rank-one shapes have a closed form: σ is the Frobenius norm.
    if cols == 1 && cfg.prev_v.is_empty() {
        let sigma = x.frob_norm();
        let mut u: Vec<f64> = x.data().iter().map(|&e| e / sigma).collect();
        let mut v = vec![1.0];
        fix_signs(&mut u, &mut v);
        return Ok(SingularTriplet {
            sigma,
            u,
            v,
            degenerate: false,
            near_degenerate: false,
        });
    }
    if rows == 1 && cfg.prev_u.is_empty() {
        let sigma = x.frob_norm();
        let mut v: Vec<f64> = x.data().iter().map(|&e| e / sigma).collect();
        let mut u = vec![1.0];
        fix_signs(&mut u, &mut v);
        return Ok(SingularTriplet {
            sigma,
            u,
            v,
            degenerate: false,
            near_degenerate: false,
        });
    }

    if use_gram_route(rows, cols) {
        power_leading_gram(x, cfg)
    } else {
        power_leading_direct(x, cfg)
    }
}

/// Alternating two-pass iteration, streaming the matrix row-major twice per
/// Gram application.
fn power_leading_direct(x: &DenseMatrix, cfg: &PowerConfig) -> Result<SingularTriplet> {
    let (rows, cols) = (x.rows(), x.cols());
    let mut v = start_vector(cols, cfg);
    let mut w = vec![0.0; rows];
    let mut z = vec![0.0; cols];
    let mut watch = ConvergenceWatch::new();
    let mut rel_err = f64::INFINITY;

    for _iter in 1..=cfg.ctl.max_iter {
        x.matvec(&v, &mut w);
        project_out(&mut w, cfg.prev_u);
        let q = dot(&w, &w); // Rayleigh quotient of XᵀX at v (‖v‖ = 1)
        x.matvec_t(&w, &mut z); // z = Gv
        project_out(&mut z, cfg.prev_v);
        let rvec = if cfg.need_vectors && q > 0.0 {
            let mut r2 = 0.0;
            for (zz, vv) in z.iter().zip(&v) {
                let d = zz - q * vv;
                r2 += d * d;
            }
            r2.sqrt() / q
        } else {
            0.0
        };
        let (converged, rel) = watch.update(q, rvec, cfg.ctl.tol, cfg.need_vectors);
        rel_err = rel;
        if converged {
            return Ok(finish_triplet(q, &w, &v, cfg));
        }
        let nz = norm(&z);
        if nz == 0.0 {
            return Ok(finish_triplet(q, &w, &v, cfg));
        }
        for (vv, zz) in v.iter_mut().zip(&z) {
            *vv = zz / nz;
        }
    }

    x.matvec(&v, &mut w);
    project_out(&mut w, cfg.prev_u);
    let q = dot(&w, &w);
    let best = finish_triplet(q, &w, &v, cfg);
    Err(KopaError::Convergence {
        iterations: cfg.ctl.max_iter,
        rel_err,
        best: Box::new(best),
    })
}

/// Builds the (smaller-side) Gram matrix once, iterates on it, and maps back.
fn power_leading_gram(x: &DenseMatrix, cfg: &PowerConfig) -> Result<SingularTriplet> {
    let (rows, cols) = (x.rows(), x.cols());
    let col_side = cols <= rows;
    let c = rows.min(cols);

    // G = XᵀX (col side) or XXᵀ (row side), accumulated row-major streaming.
    let mut g = vec![0.0; c * c];
    if col_side {
        // accumulate the upper triangle only, then mirror
        for i in 0..rows {
            let row = x.row(i);
            for (a, &ra) in row.iter().enumerate() {
                if ra == 0.0 {
                    continue;
                }
                let grow = &mut g[a * c + a..(a + 1) * c];
                for (gv, &rb) in grow.iter_mut().zip(&row[a..]) {
                    *gv += ra * rb;
                }
            }
        }
        for a in 0..c {
            for b in (a + 1)..c {
                g[b * c + a] = g[a * c + b];
            }
        }
    } else {
        for i in 0..rows {
            let ri = x.row(i);
            for j in i..rows {
                let s = dot(ri, x.row(j));
                g[i * c + j] = s;
                g[j * c + i] = s;
            }
        }
    }

    // The iterate lives on the same side as G; deflation projects against the
    // previously found vectors of that side.
    let prev_side = if col_side { cfg.prev_v } else { cfg.prev_u };
    let mut y = start_vector_side(c, cfg, col_side);
    project_out(&mut y, prev_side);
    let ny = norm(&y);
    if ny > 0.0 {
        scale_in_place(&mut y, 1.0 / ny);
    }

    let mut gy = vec![0.0; c];
    let mut watch = ConvergenceWatch::new();
    let mut rel_err = f64::INFINITY;
    let mut q_latest = 0.0;

    for _iter in 1..=cfg.ctl.max_iter {
        for (i, o) in gy.iter_mut().enumerate() {
            *o = dot(&g[i * c..(i + 1) * c], &y);
        }
        project_out(&mut gy, prev_side);
        let q = dot(&y, &gy).max(0.0);
        q_latest = q;
        let rvec = if cfg.need_vectors && q > 0.0 {
            let mut r2 = 0.0;
            for (gg, yy) in gy.iter().zip(&y) {
                let d = gg - q * yy;
                r2 += d * d;
            }
            r2.sqrt() / q
        } else {
            0.0
        };
        let (converged, rel) = watch.update(q, rvec, cfg.ctl.tol, cfg.need_vectors);
        rel_err = rel;
        if converged {
            return Ok(triplet_from_side(x, &y, q, col_side, cfg));
        }
        let n = norm(&gy);
        if n == 0.0 {
            return Ok(triplet_from_side(x, &y, q, col_side, cfg));
        }
        for (yy, gg) in y.iter_mut().zip(&gy) {
            *yy = gg / n;
        }
    }

    let best = triplet_from_side(x, &y, q_latest, col_side, cfg);
    Err(KopaError::Convergence {
        iterations: cfg.ctl.max_iter,
        rel_err,
        best: Box::new(best),
    })
}

fn start_vector_side(n: usize, cfg: &PowerConfig, col_side: bool) -> Vec<f64> {
    let tag = if col_side { 0 } else { 1 };
    let mut stream = SeedStream::new(cfg.ctl.seed, &[0x5ee0, cfg.stream_tag, n as u64, tag]);
    stream.normal_vec(n)
}

/// Assemble (σ, u, v) from a converged direct-route state: `w = X v`,
/// `q = ‖w‖²`.
fn finish_triplet(q: f64, w: &[f64], v: &[f64], cfg: &PowerConfig) -> SingularTriplet {
    let sigma = q.max(0.0).sqrt();
    let mut u: Vec<f64> = if sigma > 0.0 {
        let nw = norm(w);
        if nw > 0.0 {
            w.iter().map(|&x| x / nw).collect()
        } else {
            let mut e = vec![0.0; w.len()];
            e[0] = 1.0;
            e
        }
    } else {
        let mut e = vec![0.0; w.len()];
        e[0] = 1.0;
        e
    };
    let mut v = v.to_vec();
    // Numerical hygiene under deflation: pin exact orthogonality.
    project_out(&mut u, cfg.prev_u);
    project_out(&mut v, cfg.prev_v);
    renormalize(&mut u);
    renormalize(&mut v);
    let mut t = SingularTriplet {
        sigma,
        u,
        v,
        degenerate: sigma == 0.0,
        near_degenerate: false,
    };
    fix_signs(&mut t.u, &mut t.v);
    t
}

/// Assemble (σ, u, v) from a converged Gram-route state where `y` is the unit
/// iterate on the smaller side and `q` its Rayleigh quotient.
fn triplet_from_side(
    x: &DenseMatrix,
    y: &[f64],
    q: f64,
    col_side: bool,
    cfg: &PowerConfig,
) -> SingularTriplet {
    let sigma = q.max(0.0).sqrt();
    let (mut u, mut v);
    if col_side {
        v = y.to_vec();
        renormalize(&mut v);
        u = vec![0.0; x.rows()];
        x.matvec(&v, &mut u);
        project_out(&mut u, cfg.prev_u);
        renormalize(&mut u);
    } else {
        u = y.to_vec();
        renormalize(&mut u);
        v = vec![0.0; x.cols()];
        x.matvec_t(&u, &mut v);
        project_out(&mut v, cfg.prev_v);
        renormalize(&mut v);
    }
    if sigma == 0.0 {
        if u.iter().all(|&e| e == 0.0) {
            u[0] = 1.0;
        }
        if v.iter().all(|&e| e == 0.0) {
            v[0] = 1.0;
        }
    }
    let mut t = SingularTriplet {
        sigma,
        u,
        v,
        degenerate: sigma == 0.0,
        near_degenerate: false,
    };
    fix_signs(&mut t.u, &mut t.v);
    t
}

fn renormalize(v: &mut [f64]) {
    let n = norm(v);
    if n > 0.0 {
        scale_in_place(v, 1.0 / n);
    }
}

/// Leading singular triplet of a nonzero matrix.
///
/// Exactly zero matrices return σ = 0 with arbitrary unit vectors and
/// `degenerate = true`. Hitting `max_iter` yields a convergence error that
/// carries the best iterate.
pub fn leading_triplet(x: &DenseMatrix, ctl: IterationControl) -> Result<SingularTriplet> {
    let cfg = PowerConfig {
        ctl,
        prev_u: &[],
        prev_v: &[],
        stream_tag: 0,
        need_vectors: true,
    };
    power_leading(x, &cfg)
}

/// Top-k triplets by Hotelling deflation (X ← X − σuvᵀ), nonincreasing σ.
///
/// Iterates are re-orthogonalized against all previously extracted vectors,
/// so the returned u's (and v's) are mutually orthogonal to machine levels
/// even when singular values cluster.
pub fn top_k_triplets(
    x: &DenseMatrix,
    k: usize,
    ctl: IterationControl,
) -> Result<Vec<SingularTriplet>> {
    let d = x.rows().min(x.cols());
    if k == 0 || k > d {
        return Err(KopaError::dim(format!(
            "k = {k} out of range 1..={d} for a {}x{} matrix",
            x.rows(),
            x.cols()
        )));
    }
    let mut work = x.clone();
    let mut out: Vec<SingularTriplet> = Vec::with_capacity(k);
    let mut prev_u: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut prev_v: Vec<Vec<f64>> = Vec::with_capacity(k);

    for j in 0..k {
        let cfg = PowerConfig {
            ctl,
            prev_u: &prev_u,
            prev_v: &prev_v,
            stream_tag: j as u64 + 1,
            need_vectors: true,
        };
        let t = power_leading(&work, &cfg)?;
        // deflate
        if t.sigma > 0.0 {
            work.add_scaled_outer(-t.sigma, &t.u, &t.v);
        }
        prev_u.push(t.u.clone());
        prev_v.push(t.v.clone());
        out.push(t);
    }

    // Deflation can produce microscopic inversions near ties; report in
    // nonincreasing order.
    out.sort_by(|a, b| b.sigma.partial_cmp(&a.sigma).unwrap());
    for i in 1..out.len() {
        let hi = out[i - 1].sigma;
        if hi > 0.0 && (hi - out[i].sigma) / hi < NEAR_DEGENERATE_GAP {
            out[i - 1].near_degenerate = true;
            out[i].near_degenerate = true;
        }
    }
    Ok(out)
}

/// Largest singular value. Converges on the Rayleigh criterion only (the
/// singular vectors are not demanded), which is considerably faster when the
/// top of the spectrum is clustered.
pub fn spectral_norm(x: &DenseMatrix, ctl: IterationControl) -> Result<f64> {
    let cfg = PowerConfig {
        ctl,
        prev_u: &[],
        prev_v: &[],
        stream_tag: 0,
        need_vectors: false,
    };
    Ok(power_leading(x, &cfg)?.sigma)
}

/// Every singular value of `x`, descending, by cyclic Jacobi diagonalization
/// of the smaller Gram matrix. Used where the whole spectrum is needed
/// (compression curves); γ-accurate for energies since eigenvalues are
/// computed before the square root.
pub fn singular_values(x: &DenseMatrix) -> Vec<f64> {
    let (rows, cols) = (x.rows(), x.cols());
    let c = rows.min(cols);
    let col_side = cols <= rows;
    let mut g = vec![0.0; c * c];
    if col_side {
        // accumulate the upper triangle only, then mirror
        for i in 0..rows {
            let row = x.row(i);
            for (a, &ra) in row.iter().enumerate() {
                if ra == 0.0 {
                    continue;
                }
                let grow = &mut g[a * c + a..(a + 1) * c];
                for (gv, &rb) in grow.iter_mut().zip(&row[a..]) {
                    *gv += ra * rb;
                }
            }
        }
        for a in 0..c {
            for b in (a + 1)..c {
                g[b * c + a] = g[a * c + b];
            }
        }
    } else {
        for i in 0..rows {
            let ri = x.row(i);
            for j in i..rows {
                let s = dot(ri, x.row(j));
                g[i * c + j] = s;
                g[j * c + i] = s;
            }
        }
    }
    let mut evals = jacobi_eigenvalues(&mut g, c);
    evals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    evals.into_iter().map(|l| l.max(0.0).sqrt()).collect()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi; consumes the buffer.
fn jacobi_eigenvalues(g: &mut [f64], n: usize) -> Vec<f64> {
    let norm_f: f64 = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm_f == 0.0 {
        return vec![0.0; n];
    }
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += g[p * n + q] * g[p * n + q];
            }
        }
        if (2.0 * off).sqrt() <= 1e-15 * norm_f {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let gpq = g[p * n + q];
                if gpq == 0.0 {
                    continue;
                }
                let zeta = (g[q * n + q] - g[p * n + p]) / (2.0 * gpq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = cth * t;
                for i in 0..n {
                    let gip = g[i * n + p];
                    let giq = g[i * n + q];
                    g[i * n + p] = cth * gip - sth * giq;
                    g[i * n + q] = sth * gip + cth * giq;
                }
                for i in 0..n {
                    let gpi = g[p * n + i];
                    let gqi = g[q * n + i];
                    g[p * n + i] = cth * gpi - sth * gqi;
                    g[q * n + i] = sth * gpi + cth * gqi;
                }
            }
        }
    }
    (0..n).map(|i| g[i * n + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;
    use crate::rng::SeedStream;
    use approx::assert_relative_eq;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = SeedStream::new(seed, &[99]);
        DenseMatrix::new(rows, cols, rng.normal_vec(rows * cols)).unwrap()
    }

    fn diag(vals: &[f64]) -> DenseMatrix {
        let n = vals.len();
        let mut m = DenseMatrix::zeros(n, n);
        for (i, &v) in vals.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    #[test]
    fn diagonal_leading_triplet() {
        let t = leading_triplet(&diag(&[3.0, 1.0]), IterationControl::default()).unwrap();
        assert_relative_eq!(t.sigma, 3.0, max_relative = 1e-10);
        assert!((t.u[0].abs() - 1.0).abs() < 1e-8 && t.u[1].abs() < 1e-8);
        assert!(t.u[0] > 0.0, "sign convention");
        assert!((t.v[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rank_one_recovery() {
        let mut rng = SeedStream::new(3, &[1]);
        let u: Vec<f64> = rng.normal_vec(9);
        let v: Vec<f64> = rng.normal_vec(7);
        let mut x = DenseMatrix::zeros(9, 7);
        for i in 0..9 {
            for j in 0..7 {
                x.set(i, j, u[i] * v[j]);
            }
        }
        let nu = norm(&u);
        let nv = norm(&v);
        let t = leading_triplet(&x, IterationControl::default()).unwrap();
        assert_relative_eq!(t.sigma, nu * nv, max_relative = 1e-8);
        // direction recovery up to the fixed sign
        let mut uu: Vec<f64> = u.iter().map(|x| x / nu).collect();
        let mut vv: Vec<f64> = v.iter().map(|x| x / nv).collect();
        fix_signs(&mut uu, &mut vv);
        for i in 0..9 {
            assert!((t.u[i] - uu[i]).abs() < 1e-8);
        }
        for j in 0..7 {
            assert!((t.v[j] - vv[j]).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_matrix_flagged_degenerate() {
        let t = leading_triplet(&DenseMatrix::zeros(3, 4), IterationControl::default()).unwrap();
        assert_eq!(t.sigma, 0.0);
        assert!(t.degenerate);
        assert_relative_eq!(norm(&t.u), 1.0);
        assert_relative_eq!(norm(&t.v), 1.0);
    }

    #[test]
    fn oracle_equivalence_small_matrices() {
        for (rows, cols, seed) in [(16usize, 16usize, 1u64), (12, 20, 2), (32, 8, 3), (5, 31, 4)] {
            let x = random_matrix(rows, cols, seed);
            let t = leading_triplet(&x, IterationControl::default()).unwrap();
            let oracle = kopa_testkit::sigma1(rows, cols, x.data());
            assert!(
                (t.sigma - oracle).abs() <= 1e-8 * oracle,
                "{rows}x{cols}: {} vs oracle {oracle}",
                t.sigma
            );
        }
    }

    #[test]
    fn top_k_diagonal() {
        let ts = top_k_triplets(&diag(&[3.0, 2.0, 1.0]), 2, IterationControl::default()).unwrap();
        assert_relative_eq!(ts[0].sigma, 3.0, max_relative = 1e-9);
        assert_relative_eq!(ts[1].sigma, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn top_k_rank_deficient() {
        // exact rank 2: third singular value must be numerically zero
        let a = random_matrix(6, 2, 5);
        let b = random_matrix(2, 8, 6);
        let x = a.matmul(&b).unwrap();
        let ts = top_k_triplets(&x, 3, IterationControl::default()).unwrap();
        assert!(ts[2].sigma <= 1e-8 * ts[0].sigma, "sigma3 = {}", ts[2].sigma);
    }

    #[test]
    fn top_k_matches_oracle_and_is_orthogonal() {
        let x = random_matrix(12, 20, 7);
        let ts = top_k_triplets(&x, 4, IterationControl::default()).unwrap();
        let oracle = kopa_testkit::singular_values(12, 20, x.data());
        for (i, t) in ts.iter().enumerate() {
            assert!(
                (t.sigma - oracle[i]).abs() <= 1e-7 * oracle[0],
                "sigma_{i}: {} vs {}",
                t.sigma,
                oracle[i]
            );
        }
        for i in 0..4 {
            for j in 0..i {
                assert!(dot(&ts[i].u, &ts[j].u).abs() <= 1e-8);
                assert!(dot(&ts[i].v, &ts[j].v).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn top_k_rejects_bad_k() {
        let x = random_matrix(4, 5, 8);
        assert!(top_k_triplets(&x, 0, IterationControl::default()).is_err());
        assert!(top_k_triplets(&x, 5, IterationControl::default()).is_err());
    }

    #[test]
    fn monotone_residual_and_full_rank_zero() {
        let x = random_matrix(6, 6, 9);
        let ts = top_k_triplets(&x, 6, IterationControl::default()).unwrap();
        let mut resid = x.clone();
        let mut last = f64::INFINITY;
        for t in &ts {
            for i in 0..6 {
                for j in 0..6 {
                    resid.set(i, j, resid.get(i, j) - t.sigma * t.u[i] * t.v[j]);
                }
            }
            let r = resid.frob_norm();
            assert!(r <= last + 1e-12);
            last = r;
        }
        assert!(last <= 1e-8 * x.frob_norm());
    }

    #[test]
    fn spectral_norm_examples() {
        let ctl = IterationControl::default();
        assert_relative_eq!(
            spectral_norm(&DenseMatrix::identity(5), ctl).unwrap(),
            1.0,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            spectral_norm(&diag(&[0.5, -2.0]), ctl).unwrap(),
            2.0,
            max_relative = 1e-10
        );
        let x = random_matrix(10, 10, 10);
        let oracle = kopa_testkit::sigma1(10, 10, x.data());
        assert_relative_eq!(spectral_norm(&x, ctl).unwrap(), oracle, max_relative = 1e-8);
    }

    #[test]
    fn deterministic_and_sign_stable() {
        let x = random_matrix(14, 9, 11);
        let t1 = leading_triplet(&x, IterationControl::default()).unwrap();
        let t2 = leading_triplet(&x, IterationControl::default()).unwrap();
        assert_eq!(t1.u, t2.u);
        assert_eq!(t1.v, t2.v);
        assert_eq!(t1.sigma.to_bits(), t2.sigma.to_bits());
        // negating the matrix keeps sigma and the u convention
        let neg = x.scale(-1.0);
        let tn = leading_triplet(&neg, IterationControl::default()).unwrap();
        assert_relative_eq!(tn.sigma, t1.sigma, max_relative = 1e-9);
        let lead = t1.u.iter().find(|e| e.abs() > 1e-9).unwrap();
        let lead_n = tn.u.iter().find(|e| e.abs() > 1e-9).unwrap();
        assert!(*lead > 0.0 && *lead_n > 0.0);
    }

    #[test]
    fn convergence_error_carries_best_iterate() {
        let x = random_matrix(30, 30, 12);
        let ctl = IterationControl {
            tol: 1e-14,
            max_iter: 1,
            seed: 0,
        };
        match leading_triplet(&x, ctl) {
            Err(KopaError::Convergence { best, .. }) => {
                assert!(best.sigma > 0.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn near_degenerate_flagging() {
        let ts = top_k_triplets(
            &diag(&[3.0, 3.0 * (1.0 - 1e-9), 1.0]),
            3,
            IterationControl::default(),
        )
        .unwrap();
        assert!(ts[0].near_degenerate);
        assert!(ts[1].near_degenerate);
        assert!(!ts[2].near_degenerate);
    }

    #[test]
    fn full_spectrum_matches_oracle() {
        for (rows, cols, seed) in [(9usize, 9usize, 13u64), (16, 5, 14), (6, 24, 15)] {
            let x = random_matrix(rows, cols, seed);
            let mine = singular_values(&x);
            let oracle = kopa_testkit::singular_values(rows, cols, x.data());
            assert_eq!(mine.len(), oracle.len());
            for (a, b) in mine.iter().zip(&oracle) {
                assert!((a - b).abs() <= 1e-9 * oracle[0], "{a} vs {b}");
            }
        }
    }
}
