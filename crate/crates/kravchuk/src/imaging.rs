//! KT-vs-FFT image reconstruction benchmark under k-space noise.
//!
//! The benchmark pipeline is symmetric in the transform choice: each method
//! carries an image to its own k-space, noise is injected there, and the
//! same method's inverse brings it back. Reconstruction quality against the
//! clean original is scored with MSE, PSNR, and uniform-window SSIM. A
//! synthetic phantom (concentric ellipses plus 2×2-pixel point features)
//! ships with the crate so the benchmark runs without any external imagery.
//!
//! Interchange formats: binary PGM (P5, 8- or 16-bit) for real images and a
//! raw complex format for k-space grids — a one-line JSON header
//! `{"width":…,"height":…,"dtype":"c64le"}` followed by little-endian f32
//! re/im pairs in row-major order. Both parsers work on byte slices and
//! report the byte offset of the first defect.

use crate::transforms::{dft_kernel, kt_2d};
use crate::{Complex64, DMatrix, Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Which space a grid's samples live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceDomain {
    RealSpace,
    KSpace,
}

/// Transform family used by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Fft,
    Kt,
}

/// A width×height complex sample grid, row-major, tagged with its domain.
/// Real-space images coming from PGM files are normalized to [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    width: usize,
    height: usize,
    domain: SpaceDomain,
    data: Vec<Complex64>,
}

impl ImageGrid {
    pub fn from_complex(
        width: usize,
        height: usize,
        domain: SpaceDomain,
        data: Vec<Complex64>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::shape("image dimensions must be nonzero"));
        }
        if data.len() != width * height {
            return Err(Error::shape(format!(
                "{width}x{height} grid needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("grid samples must be finite"));
        }
        Ok(Self { width, height, domain, data })
    }

    pub fn from_real(width: usize, height: usize, pixels: &[f64]) -> Result<Self> {
        let data = pixels.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_complex(width, height, SpaceDomain::RealSpace, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn domain(&self) -> SpaceDomain {
        self.domain
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// Sample at column x, row y.
    pub fn at(&self, x: usize, y: usize) -> Complex64 {
        self.data[y * self.width + x]
    }

    /// Real parts, row-major.
    pub fn real_pixels(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.height, self.width, |y, x| self.data[y * self.width + x])
    }

    fn from_matrix(m: DMatrix<Complex64>, domain: SpaceDomain) -> Self {
        let (height, width) = (m.nrows(), m.ncols());
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(m[(y, x)]);
            }
        }
        Self { width, height, domain, data }
    }
}

fn require_domain(grid: &ImageGrid, want: SpaceDomain, what: &str) -> Result<()> {
    if grid.domain != want {
        return Err(Error::domain(format!(
            "{what} expects a {} grid",
            match want {
                SpaceDomain::RealSpace => "real-space",
                SpaceDomain::KSpace => "k-space",
            }
        )));
    }
    Ok(())
}

/// Separable 2-D DFT: the order-(width-1) kernel along rows, the
/// order-(height-1) kernel along columns; `inverse` applies the adjoint.
fn dft_2d(m: &DMatrix<Complex64>, inverse: bool) -> DMatrix<Complex64> {
    let row_kernel = dft_kernel(m.ncols() - 1);
    let col_kernel = if m.nrows() == m.ncols() {
        row_kernel.clone()
    } else {
        dft_kernel(m.nrows() - 1)
    };
    // the DFT matrix is symmetric, so the row action M·Kᵀ is M·K
    if inverse {
        let kc = col_kernel.matrix().conjugate();
        let kr = row_kernel.matrix().conjugate();
        kc * (m * kr)
    } else {
        col_kernel.matrix() * (m * row_kernel.matrix())
    }
}

/// Transform a real-space image into the chosen method's k-space. For the
/// KT the fractional order alpha applies; the FFT path ignores it.
pub fn forward_to_kspace(img: &ImageGrid, method: Method, alpha: f64) -> Result<ImageGrid> {
    require_domain(img, SpaceDomain::RealSpace, "forward_to_kspace")?;
    let m = img.to_matrix();
    let k = match method {
        Method::Fft => dft_2d(&m, false),
        Method::Kt => kt_2d(&m, alpha)?,
    };
    Ok(ImageGrid::from_matrix(k, SpaceDomain::KSpace))
}

/// A reconstructed real-space image plus the largest |imaginary part|
/// discarded when taking the real part — a health indicator that should sit
/// at numerical-noise scale for consistent (method, alpha) round trips.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub image: ImageGrid,
    pub imaginary_residual: f64,
}

/// Bring a k-space grid back to real space with the method's inverse: the
/// adjoint DFT, or the KT at fractional order 4 - alpha (the kernel family
/// is additive with period 4, so the composition closes to the identity).
pub fn reconstruct(k: &ImageGrid, method: Method, alpha: f64) -> Result<Reconstruction> {
    require_domain(k, SpaceDomain::KSpace, "reconstruct")?;
    let m = k.to_matrix();
    let z = match method {
        Method::Fft => dft_2d(&m, true),
        Method::Kt => {
            if !(0.0..=4.0).contains(&alpha) {
                return Err(Error::domain(format!(
                    "KT fractional order must lie in [0,4], got {alpha}"
                )));
            }
            kt_2d(&m, 4.0 - alpha)?
        }
    };
    let imaginary_residual = z.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let real = z.map(|v| Complex64::new(v.re, 0.0));
    Ok(Reconstruction {
        image: ImageGrid::from_matrix(real, SpaceDomain::RealSpace),
        imaginary_residual,
    })
}

/// Add i.i.d. circular complex Gaussian noise scaled to the grid's own
/// power: each of the two quadratures gets standard deviation
/// level·sqrt(mean|z|²/2), so the total noise RMS is `level` times the
/// signal RMS. Deterministic per seed; samples are drawn in row-major pixel
/// order.
pub fn add_kspace_noise(k: &ImageGrid, level: f64, seed: u64) -> Result<ImageGrid> {
    require_domain(k, SpaceDomain::KSpace, "add_kspace_noise")?;
    if !level.is_finite() || level < 0.0 {
        return Err(Error::domain(format!(
            "noise level must be a nonnegative fraction, got {level}"
        )));
    }
    if level == 0.0 {
        return Ok(k.clone());
    }
    let mean_power: f64 =
        k.data.iter().map(|z| z.norm_sqr()).sum::<f64>() / k.data.len() as f64;
    let sigma = level * (mean_power / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let data = k
        .data
        .iter()
        .map(|z| {
            let dre: f64 = normal.sample(&mut rng);
            let dim: f64 = normal.sample(&mut rng);
            Complex64::new(z.re + sigma * dre, z.im + sigma * dim)
        })
        .collect();
    Ok(ImageGrid { width: k.width, height: k.height, domain: SpaceDomain::KSpace, data })
}

/// SSIM windowing/stabilization parameters, recorded alongside every score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsimParams {
    pub window: usize,
    pub k1: f64,
    pub k2: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self { window: 8, k1: 0.01, k2: 0.03 }
    }
}

/// Reconstruction quality scores. `psnr` is +infinity for a perfect match
/// and serializes as the JSON string "+inf" in that case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub mse: f64,
    #[serde(serialize_with = "serialize_psnr", deserialize_with = "deserialize_psnr")]
    pub psnr: f64,
    pub ssim: f64,
    pub ssim_params: SsimParams,
}

fn serialize_psnr<S: serde::Serializer>(v: &f64, ser: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        ser.serialize_f64(*v)
    } else {
        ser.serialize_str("+inf")
    }
}

fn deserialize_psnr<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<f64, D::Error> {
    struct PsnrVisitor;
    impl serde::de::Visitor<'_> for PsnrVisitor {
        type Value = f64;
        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a number or the string \"+inf\"")
        }
        fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<f64, E> {
            Ok(v)
        }
        fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<f64, E> {
            match v {
                "+inf" | "inf" => Ok(f64::INFINITY),
                _ => Err(E::custom(format!("unexpected PSNR string {v:?}"))),
            }
        }
    }
    de.deserialize_any(PsnrVisitor)
}

/// Sliding-window sums over every `win`×`win` block at stride 1, computed
/// through an integral image.
fn window_sums(a: &[f64], width: usize, height: usize, win: usize) -> Vec<f64> {
    let iw = width + 1;
    let mut integral = vec![0.0f64; iw * (height + 1)];
    for y in 0..height {
        let mut row = 0.0;
        for x in 0..width {
            row += a[y * width + x];
            integral[(y + 1) * iw + (x + 1)] = integral[y * iw + (x + 1)] + row;
        }
    }
    let out_w = width - win + 1;
    let out_h = height - win + 1;
    let mut out = vec![0.0f64; out_w * out_h];
    for y in 0..out_h {
        for x in 0..out_w {
            let corner = |yy: usize, xx: usize| integral[yy * iw + xx];
            out[y * out_w + x] = corner(y + win, x + win) - corner(y, x + win)
                - corner(y + win, x)
                + corner(y, x);
        }
    }
    out
}

fn ssim_uniform(
    reference: &[f64],
    candidate: &[f64],
    width: usize,
    height: usize,
    params: &SsimParams,
    dynamic_range: f64,
) -> f64 {
    let win = params.window.min(width).min(height);
    let c1 = (params.k1 * dynamic_range).powi(2);
    let c2 = (params.k2 * dynamic_range).powi(2);
    let n = (win * win) as f64;
    let prod: Vec<f64> = reference.iter().zip(candidate).map(|(a, b)| a * b).collect();
    let ref_sq: Vec<f64> = reference.iter().map(|a| a * a).collect();
    let cand_sq: Vec<f64> = candidate.iter().map(|b| b * b).collect();
    let sx = window_sums(reference, width, height, win);
    let sy = window_sums(candidate, width, height, win);
    let sxx = window_sums(&ref_sq, width, height, win);
    let syy = window_sums(&cand_sq, width, height, win);
    let sxy = window_sums(&prod, width, height, win);
    let mut total = 0.0;
    for i in 0..sx.len() {
        let mx = sx[i] / n;
        let my = sy[i] / n;
        let vx = sxx[i] / n - mx * mx;
        let vy = syy[i] / n - my * my;
        let cov = sxy[i] / n - mx * my;
        total += ((2.0 * mx * my + c1) * (2.0 * cov + c2))
            / ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    total / sx.len() as f64
}

/// Score a candidate against a reference image: mean squared error, peak
/// signal-to-noise ratio over the reference dynamic range (a flat reference
/// falls back to range 1), and mean uniform-window SSIM.
pub fn quality(reference: &ImageGrid, candidate: &ImageGrid) -> Result<QualityReport> {
    quality_with(reference, candidate, SsimParams::default())
}

/// [`quality`] with explicit SSIM parameters.
pub fn quality_with(
    reference: &ImageGrid,
    candidate: &ImageGrid,
    params: SsimParams,
) -> Result<QualityReport> {
    require_domain(reference, SpaceDomain::RealSpace, "quality")?;
    require_domain(candidate, SpaceDomain::RealSpace, "quality")?;
    if reference.width != candidate.width || reference.height != candidate.height {
        return Err(Error::shape(format!(
            "image shapes differ: {}x{} vs {}x{}",
            reference.width, reference.height, candidate.width, candidate.height
        )));
    }
    if params.window == 0 {
        return Err(Error::domain("SSIM window must be nonzero"));
    }
    let a = reference.real_pixels();
    let b = candidate.real_pixels();
    let mse = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.len() as f64;
    let (lo, hi) = a
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = if hi > lo { hi - lo } else { 1.0 };
    let psnr = if mse > 0.0 {
        10.0 * (range * range / mse).log10()
    } else {
        f64::INFINITY
    };
    let ssim = ssim_uniform(&a, &b, reference.width, reference.height, &params, range);
    Ok(QualityReport { mse, psnr, ssim, ssim_params: params })
}

/// The bundled synthetic test object: an n×n field at background 0.05,
/// four concentric ellipses of decreasing size and alternating intensity,
/// and three 2×2-pixel point features (two bright, one dark). Pixel values
/// lie in [0,1].
pub fn phantom(n: usize) -> Result<ImageGrid> {
    if n < 16 {
        return Err(Error::range(format!("phantom needs n >= 16, got {n}")));
    }
    let c = (n as f64 - 1.0) / 2.0;
    let mut pixels = vec![0.05f64; n * n];
    let ellipses = [
        (0.88, 0.70, 0.35),
        (0.62, 0.48, 0.75),
        (0.38, 0.30, 0.55),
        (0.16, 0.13, 0.95),
    ];
    for y in 0..n {
        for x in 0..n {
            let dx = x as f64 - c;
            let dy = y as f64 - c;
            for (a, b, v) in ellipses {
                let half = n as f64 / 2.0;
                if (dx / (a * half)).powi(2) + (dy / (b * half)).powi(2) <= 1.0 {
                    pixels[y * n + x] = v;
                }
            }
        }
    }
    let points = [
        (n / 4, 7 * n / 10, 1.0),
        (18 * n / 25, 7 * n / 25, 0.0),
        (4 * n / 5, 39 * n / 50, 1.0),
    ];
    for (py, px, v) in points {
        for dy in 0..2 {
            for dx in 0..2 {
                pixels[(py + dy) * n + (px + dx)] = v;
            }
        }
    }
    ImageGrid::from_real(n, n, &pixels)
}

// --- PGM (P5) ------------------------------------------------------------

struct PgmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PgmCursor<'a> {
    /// Skip whitespace and '#'-to-end-of-line comments.
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn read_number(&mut self, what: &str) -> Result<u64> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::format(start, format!("expected {what}")));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        text.parse::<u64>()
            .map_err(|_| Error::format(start, format!("{what} out of range")))
    }
}

const MAX_PIXELS: usize = 1 << 26;

/// Decode a binary PGM (P5) image; samples are normalized to [0,1] by the
/// stated maxval. 8-bit (maxval < 256) and 16-bit big-endian samples are
/// supported, as are `#` header comments.
pub fn read_pgm(bytes: &[u8]) -> Result<ImageGrid> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::format(0, "not a binary PGM (missing P5 magic)"));
    }
    let mut cur = PgmCursor { bytes, pos: 2 };
    let width = cur.read_number("width")? as usize;
    let height = cur.read_number("height")? as usize;
    let maxval_at = {
        cur.skip_separators();
        cur.pos
    };
    let maxval = cur.read_number("maxval")?;
    if width == 0 || height == 0 || width.saturating_mul(height) > MAX_PIXELS {
        return Err(Error::format(2, format!("unreasonable dimensions {width}x{height}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(maxval_at, format!("maxval {maxval} outside 1..=65535")));
    }
    // exactly one whitespace byte separates the header from the samples
    if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
        return Err(Error::format(cur.pos, "missing separator before sample data"));
    }
    cur.pos += 1;
    let bytes_per = if maxval < 256 { 1 } else { 2 };
    let need = width * height * bytes_per;
    let have = bytes.len() - cur.pos;
    if have < need {
        return Err(Error::format(
            bytes.len(),
            format!("sample data truncated: need {need} bytes, have {have}"),
        ));
    }
    let scale = 1.0 / maxval as f64;
    let data = bytes[cur.pos..cur.pos + need]
        .chunks_exact(bytes_per)
        .map(|chunk| {
            let q = if bytes_per == 1 {
                chunk[0] as u64
            } else {
                u16::from_be_bytes([chunk[0], chunk[1]]) as u64
            };
            Complex64::new(q as f64 * scale, 0.0)
        })
        .collect();
    ImageGrid::from_complex(width, height, SpaceDomain::RealSpace, data)
}

/// Encode a real-space grid as binary PGM with the given maxval (≤ 255 for
/// 8-bit output, larger for 16-bit big-endian). Pixels are clamped to [0,1]
/// and quantized to maxval steps.
pub fn write_pgm(img: &ImageGrid, maxval: u16) -> Result<Vec<u8>> {
    require_domain(img, SpaceDomain::RealSpace, "write_pgm")?;
    if maxval == 0 {
        return Err(Error::domain("PGM maxval must be at least 1"));
    }
    let mut out = format!("P5\n{} {}\n{}\n", img.width, img.height, maxval).into_bytes();
    for z in &img.data {
        let q = (z.re.clamp(0.0, 1.0) * maxval as f64).round() as u16;
        if maxval < 256 {
            out.push(q as u8);
        } else {
            out.extend_from_slice(&q.to_be_bytes());
        }
    }
    Ok(out)
}

// --- raw k-space ----------------------------------------------------------

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct KspaceHeader {
    width: usize,
    height: usize,
    dtype: String,
}

/// Decode the raw k-space container: one JSON header line, then row-major
/// little-endian f32 re/im pairs.
pub fn read_kspace_raw(bytes: &[u8]) -> Result<ImageGrid> {
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::format(bytes.len(), "missing header line"))?;
    let header: KspaceHeader = serde_json::from_slice(&bytes[..newline])
        .map_err(|e| Error::format(0, format!("bad k-space header: {e}")))?;
    if header.dtype != "c64le" {
        return Err(Error::format(0, format!("unsupported dtype {:?}", header.dtype)));
    }
    let (width, height) = (header.width, header.height);
    if width == 0 || height == 0 || width.saturating_mul(height) > MAX_PIXELS {
        return Err(Error::format(0, format!("unreasonable dimensions {width}x{height}")));
    }
    let payload = &bytes[newline + 1..];
    let need = width * height * 8;
    if payload.len() != need {
        return Err(Error::format(
            bytes.len(),
            format!("payload holds {} bytes, expected {need}", payload.len()),
        ));
    }
    let mut data = Vec::with_capacity(width * height);
    for (i, pair) in payload.chunks_exact(8).enumerate() {
        let re = f32::from_le_bytes([pair[0], pair[1], pair[2], pair[3]]) as f64;
        let im = f32::from_le_bytes([pair[4], pair[5], pair[6], pair[7]]) as f64;
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::format(
                newline + 1 + i * 8,
                "non-finite sample in k-space payload",
            ));
        }
        data.push(Complex64::new(re, im));
    }
    ImageGrid::from_complex(width, height, SpaceDomain::KSpace, data)
}

/// Encode a k-space grid into the raw container format.
pub fn write_kspace_raw(k: &ImageGrid) -> Result<Vec<u8>> {
    require_domain(k, SpaceDomain::KSpace, "write_kspace_raw")?;
    let header = KspaceHeader {
        width: k.width,
        height: k.height,
        dtype: "c64le".to_string(),
    };
    let mut out = serde_json::to_vec(&header).expect("header serialization cannot fail");
    out.push(b'\n');
    for z in &k.data {
        out.extend_from_slice(&(z.re as f32).to_le_bytes());
        out.extend_from_slice(&(z.im as f32).to_le_bytes());
    }
    Ok(out)
}
