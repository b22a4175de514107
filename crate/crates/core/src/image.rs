//! Grayscale image ingestion (PGM P2/P5), de-meaning, noise corruption, and
//! the denoising/compression pipelines built on the Kronecker machinery.
//!
//! Pixels are stored as f64 in [0, 1] straight off disk (raw / maxval); after
//! de-meaning the subtracted mean is kept in `mean_removed` and re-added on
//! export. Noise corruption is *unnormalized*: `corrupt` adds N(0, σ²) per
//! pixel, which matches the imaging convention rather than the simulation
//! model's σ/√(PQ) scaling.

use crate::config::{log2_exact, Configuration};
use crate::error::{KopaError, Result};
use crate::fit::{fit_k_terms, reconstruct, KopaModel};
use crate::matrix::DenseMatrix;
use crate::rng::SeedStream;
use crate::select::{select_configuration, Criterion, SelectionReport};
use crate::spectral::{singular_values, top_k_triplets, IterationControl};
use std::io::{Read, Write};
use std::path::Path;

#[derive(Debug, Clone)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    /// row-major pixels; in [0, 1] for freshly loaded images
    pub pixels: Vec<f64>,
    /// mean subtracted by [`demean`], re-added on export
    pub mean_removed: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// ASCII samples
    P2,
    /// binary samples (1 or 2 bytes per pixel, big-endian for 2)
    P5,
}

impl GrayImage {
    pub fn to_matrix(&self) -> Result<DenseMatrix> {
        DenseMatrix::new(self.height, self.width, self.pixels.clone())
    }

    pub fn from_matrix(m: &DenseMatrix, mean_removed: Option<f64>) -> GrayImage {
        GrayImage {
            width: m.cols(),
            height: m.rows(),
            pixels: m.data().to_vec(),
            mean_removed,
        }
    }

    /// Ambient exponents (M, N) for a dyadic image.
    pub fn dyadic_exponents(&self) -> Result<(u32, u32)> {
        let m = log2_exact(self.height).map_err(|_| non_dyadic_error(self.height, self.width))?;
        let n = log2_exact(self.width).map_err(|_| non_dyadic_error(self.height, self.width))?;
        Ok((m, n))
    }
}

fn non_dyadic_error(h: usize, w: usize) -> KopaError {
    KopaError::dim(format!(
        "image is {h}x{w}; dimensions must be powers of two (zero-pad first, e.g. with the CLI --pad option)"
    ))
}

// ---------------------------------------------------------------------------
// PGM parsing

struct Tokenizer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Tokenizer { bytes, pos: 0 }
    }

    /// Skip whitespace and `#` comments (to end of line).
    fn skip_filler(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Result<&'a str> {
        self.skip_filler();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(KopaError::Parse {
                offset: start,
                message: "unexpected end of header".into(),
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| KopaError::Parse {
            offset: start,
            message: "non-ASCII header token".into(),
        })
    }

    fn next_usize(&mut self, what: &str) -> Result<usize> {
        let off = self.pos;
        let tok = self.next_token()?;
        tok.parse::<usize>().map_err(|_| KopaError::Parse {
            offset: off,
            message: format!("invalid {what}: {tok:?}"),
        })
    }
}

/// Load a PGM image (P2 ASCII or P5 binary, maxval ≤ 65535); pixels are
/// scaled to [0, 1] by the file's maxval.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    parse_pgm(&bytes)
}

pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut tk = Tokenizer::new(bytes);
    let magic = tk.next_token()?;
    let format = match magic {
        "P2" => PgmFormat::P2,
        "P5" => PgmFormat::P5,
        other => {
            return Err(KopaError::Parse {
                offset: 0,
                message: format!("not a PGM file (magic {other:?})"),
            })
        }
    };
    let width = tk.next_usize("width")?;
    let height = tk.next_usize("height")?;
    let maxval = tk.next_usize("maxval")?;
    if width == 0 || height == 0 {
        return Err(KopaError::Parse {
            offset: tk.pos,
            message: "zero image dimension".into(),
        });
    }
    if maxval == 0 || maxval > 65535 {
        return Err(KopaError::Parse {
            offset: tk.pos,
            message: format!("maxval {maxval} outside 1..=65535"),
        });
    }
    let n = width * height;
    let maxval_f = maxval as f64;
    let mut pixels = Vec::with_capacity(n);
    match format {
        PgmFormat::P2 => {
            for _ in 0..n {
                let off = tk.pos;
                let v = tk.next_usize("pixel")?;
                if v > maxval {
                    return Err(KopaError::Parse {
                        offset: off,
                        message: format!("pixel {v} exceeds maxval {maxval}"),
                    });
                }
                pixels.push(v as f64 / maxval_f);
            }
        }
        PgmFormat::P5 => {
            // exactly one whitespace byte separates the header from the raster
            if tk.pos >= bytes.len() || !bytes[tk.pos].is_ascii_whitespace() {
                return Err(KopaError::Parse {
                    offset: tk.pos,
                    message: "missing whitespace before binary raster".into(),
                });
            }
            let mut pos = tk.pos + 1;
            let bpp = if maxval < 256 { 1 } else { 2 };
            if bytes.len() < pos + n * bpp {
                return Err(KopaError::Parse {
                    offset: bytes.len(),
                    message: format!(
                        "raster truncated: need {} bytes, have {}",
                        n * bpp,
                        bytes.len() - pos
                    ),
                });
            }
            for _ in 0..n {
                let v = if bpp == 1 {
                    bytes[pos] as usize
                } else {
                    ((bytes[pos] as usize) << 8) | bytes[pos + 1] as usize
                };
                if v > maxval {
                    return Err(KopaError::Parse {
                        offset: pos,
                        message: format!("pixel {v} exceeds maxval {maxval}"),
                    });
                }
                pixels.push(v as f64 / maxval_f);
                pos += bpp;
            }
        }
    }
    Ok(GrayImage {
        width,
        height,
        pixels,
        mean_removed: None,
    })
}

/// Write an 8-bit PGM. The removed mean (if any) is re-added first; values
/// are clamped to [0, 1] and quantized by rounding.
pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>, format: PgmFormat) -> Result<()> {
    let mean = img.mean_removed.unwrap_or(0.0);
    let quantized: Vec<u8> = img
        .pixels
        .iter()
        .map(|&p| ((p + mean).clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    write_pgm_bytes(img.width, img.height, &quantized, path, format)
}

/// Display export: min→0, max→1 rescale (used for images whose values left
/// [0, 1], e.g. after noise corruption). All arithmetic elsewhere uses the
/// unrescaled values.
pub fn save_pgm_rescaled(img: &GrayImage, path: impl AsRef<Path>, format: PgmFormat) -> Result<()> {
    let mean = img.mean_removed.unwrap_or(0.0);
    let vals: Vec<f64> = img.pixels.iter().map(|&p| p + mean).collect();
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let quantized: Vec<u8> = vals
        .iter()
        .map(|&p| (((p - lo) / span) * 255.0).round() as u8)
        .collect();
    write_pgm_bytes(img.width, img.height, &quantized, path, format)
}

fn write_pgm_bytes(
    width: usize,
    height: usize,
    q: &[u8],
    path: impl AsRef<Path>,
    format: PgmFormat,
) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        PgmFormat::P5 => {
            write!(f, "P5\n{width} {height}\n255\n")?;
            f.write_all(q)?;
        }
        PgmFormat::P2 => {
            write!(f, "P2\n{width} {height}\n255\n")?;
            for row in q.chunks(width) {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(f, "{}", line.join(" "))?;
            }
        }
    }
    f.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Pipeline operations

/// Subtract the pixel mean, accumulating it into `mean_removed` (so
/// de-meaning twice is the same as once).
pub fn demean(img: &GrayImage) -> GrayImage {
    let n = img.pixels.len() as f64;
    let mean = img.pixels.iter().sum::<f64>() / n;
    GrayImage {
        width: img.width,
        height: img.height,
        pixels: img.pixels.iter().map(|&p| p - mean).collect(),
        mean_removed: Some(img.mean_removed.unwrap_or(0.0) + mean),
    }
}

/// Additive Gaussian white noise, N(0, σ²) per pixel, from a seeded stream.
/// The output is not clipped to [0, 1]; use [`save_pgm_rescaled`] for display.
pub fn corrupt(img: &GrayImage, sigma: f64, seed: u64) -> Result<GrayImage> {
    if !(sigma >= 0.0) {
        return Err(KopaError::domain("σ must be nonnegative"));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let mut stream = SeedStream::new(seed, &[0x1A6E]);
    Ok(GrayImage {
        width: img.width,
        height: img.height,
        pixels: img.pixels.iter().map(|&p| p + sigma * stream.normal()).collect(),
        mean_removed: img.mean_removed,
    })
}

/// Output of the denoising pipeline.
#[derive(Debug)]
pub struct DenoiseOutcome {
    pub model: KopaModel,
    pub recon: GrayImage,
    pub report: SelectionReport,
}

/// De-mean, scan all configurations with the given criterion, fit K terms at
/// the chosen configuration, reconstruct, and re-add the mean.
pub fn denoise(
    img: &GrayImage,
    crit: Criterion,
    k: usize,
    ctl: IterationControl,
) -> Result<DenoiseOutcome> {
    let (big_m, big_n) = img.dyadic_exponents()?;
    let centered = demean(img);
    let y = centered.to_matrix()?;
    let report = select_configuration(&y, crit, ctl)?;
    let cfg = report.chosen_config(big_m, big_n);
    let model = fit_k_terms(&y, cfg, k, ctl)?;
    let recon_m = reconstruct(&model);
    let recon = GrayImage::from_matrix(&recon_m, centered.mean_removed);
    Ok(DenoiseOutcome {
        model,
        recon,
        report,
    })
}

/// Low-rank (plain SVD, no rearrangement) baseline for comparison.
#[derive(Debug)]
pub struct LowRankOutcome {
    pub recon: GrayImage,
    /// parameter count 1 + Σ_{j=1..k} (2^M + 2^N − 2j + 1)
    pub params: u64,
    /// the same count under the unit-norm-constraint convention (−1)
    pub params_normalized: u64,
    /// variance explained Σσ²/‖Y‖²
    pub ratio: f64,
}

/// Parameter count of a rank-k approximation of a 2^M × 2^N matrix.
pub fn lowrank_params(big_m: u32, big_n: u32, k: usize) -> u64 {
    let p = 1u64 << big_m;
    let q = 1u64 << big_n;
    1 + (1..=k as u64).map(|j| p + q - 2 * j + 1).sum::<u64>()
}

/// Rank-k truncated SVD of the de-meaned image.
pub fn lowrank_baseline(img: &GrayImage, k: usize, ctl: IterationControl) -> Result<LowRankOutcome> {
    let (big_m, big_n) = img.dyadic_exponents()?;
    let max_k = 1usize << big_m.min(big_n);
    if k == 0 || k > max_k {
        return Err(KopaError::dim(format!("rank {k} out of range 1..={max_k}")));
    }
    let centered = demean(img);
    let y = centered.to_matrix()?;
    let triplets = top_k_triplets(&y, k, ctl)?;
    let mut recon_m = DenseMatrix::zeros(y.rows(), y.cols());
    for t in &triplets {
        recon_m.add_scaled_outer(t.sigma, &t.u, &t.v);
    }
    let explained: f64 = triplets.iter().map(|t| t.sigma * t.sigma).sum();
    let params = lowrank_params(big_m, big_n, k);
    Ok(LowRankOutcome {
        recon: GrayImage::from_matrix(&recon_m, centered.mean_removed),
        params,
        params_normalized: params - 1,
        ratio: explained / y.frob_norm_sq(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMethod {
    Kopa,
    LowRank,
}

/// One point of the compression comparison: variance explained vs. parameter
/// count, for a one-term Kronecker fit (best configuration at its parameter
/// count) or a rank-k truncation.
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub method: CurveMethod,
    pub params: u64,
    pub ratio: f64,
    /// the winning configuration (Kopa) or (k, k) (LowRank)
    pub detail: (u32, u32),
}

/// Variance-explained-vs-parameters curves on the de-meaned image.
///
/// For each c = m+n in 1..M+N−1 every configuration on that diagonal shares
/// η = 2^c + 2^{M+N−c}; only the best ratio is kept. Low-rank points cover
/// every rank up to 2^{min(M,N)} (values-only spectrum, so full depth is
/// cheap).
pub fn compression_curve(img: &GrayImage, ctl: IterationControl) -> Result<Vec<CurvePoint>> {
    let (big_m, big_n) = img.dyadic_exponents()?;
    let centered = demean(img);
    let y = centered.to_matrix()?;
    let yf2 = y.frob_norm_sq();

    use rayon::prelude::*;
    let lattice = crate::config::candidate_configs(big_m, big_n)?;
    let per_cfg: Vec<(Configuration, f64)> = lattice
        .entries()
        .par_iter()
        .map(|&cfg| {
            let r = crate::rearrange::rearrange(&y, cfg)?;
            let s = crate::spectral::spectral_norm(&r, ctl)?;
            Ok((cfg, s * s / yf2))
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::new();
    for c in 1..(big_m + big_n) {
        let best = per_cfg
            .iter()
            .filter(|(cfg, _)| cfg.m + cfg.n == c)
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if let Some(&(cfg, ratio)) = best {
            points.push(CurvePoint {
                method: CurveMethod::Kopa,
                params: cfg.eta(),
                ratio,
                detail: cfg.pair(),
            });
        }
    }

    let spectrum = singular_values(&y);
    let mut cum = 0.0;
    for (j, s) in spectrum.iter().enumerate() {
        cum += s * s;
        let k = j + 1;
        points.push(CurvePoint {
            method: CurveMethod::LowRank,
            params: lowrank_params(big_m, big_n, k),
            ratio: (cum / yf2).min(1.0),
            detail: (k as u32, k as u32),
        });
    }
    Ok(points)
}

pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("method,params,ratio,detail_m,detail_n\n");
    for p in points {
        let m = match p.method {
            CurveMethod::Kopa => "kopa",
            CurveMethod::LowRank => "lowrank",
        };
        s.push_str(&format!(
            "{m},{},{:.17e},{},{}\n",
            p.params, p.ratio, p.detail.0, p.detail.1
        ));
    }
    s
}

/// Relative squared reconstruction error ‖orig − recon‖² / ‖orig‖², computed
/// on the pixel arrays as given (pass de-meaned images to compare against the
/// clean de-meaned original).
pub fn reconstruction_error(original: &GrayImage, recon: &GrayImage) -> Result<f64> {
    if original.width != recon.width || original.height != recon.height {
        return Err(KopaError::dim("image shapes differ"));
    }
    let denom: f64 = original.pixels.iter().map(|x| x * x).sum();
    if denom <= 0.0 {
        return Err(KopaError::domain("reconstruction error of a zero image"));
    }
    let num: f64 = original
        .pixels
        .iter()
        .zip(&recon.pixels)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(num / denom)
}
