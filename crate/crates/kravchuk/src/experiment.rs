//! Monte-Carlo simulation of the two-source interference experiment.
//!
//! The modeled pipeline: two pulsed downconversion sources each emit a
//! number-correlated photon pair; one photon of each pair is sent to a
//! herald detector (modes A and D), the other two meet on the beam splitter
//! (modes B and C). Losses act as binomial thinning on all four modes before
//! interference, the splitter mixes the surviving (b, c) Fock sector through
//! the exact amplitudes of [`crate::homsim`], and transition-edge sensors
//! with sub-unit efficiency count all four outputs. Each shot yields a tuple
//! (n1, n2, n3, n4); post-selection keeps the tuples with n1+n4 = n2+n3,
//! inside which n1 heralds the B-port occupation, so the selected ensemble
//! estimates the interference statistics of |n1, n4⟩.
//!
//! Reproducibility contract: shot i draws from its own counter-derived RNG
//! stream (seed fixed, stream = i), and worker histograms merge by
//! commutative addition, so a (seed, config) pair gives one histogram
//! regardless of how many threads run the shots.

use crate::homsim::{bs_unitary, BeamSplitterSpec, PhotonStatistics};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest per-mode count the simulator tracks; higher multiplicities are
/// saturated into this bin (their probability at desk-scale gains is far
/// below any statistical resolution).
pub const DEFAULT_N_MAX: usize = 20;

/// Hard cap on the configurable n_max (the interference tables scale as
/// (2·n_max)³).
pub const N_MAX_LIMIT: usize = 128;

/// A two-mode squeezed-vacuum source with parametric gain g: emits n photon
/// pairs with probability (1 - tanh²g)·tanh²ⁿg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdcSource {
    g: f64,
}

impl SpdcSource {
    pub fn new(g: f64) -> Result<Self> {
        if !g.is_finite() || g <= 0.0 {
            return Err(Error::domain(format!(
                "parametric gain must be positive and finite, got {g}"
            )));
        }
        Ok(Self { g })
    }

    /// Source characterized by its mean photon number sinh²g.
    pub fn from_mean_photons(mean: f64) -> Result<Self> {
        if !mean.is_finite() || mean <= 0.0 {
            return Err(Error::domain(format!(
                "mean photon number must be positive, got {mean}"
            )));
        }
        Self::new(mean.sqrt().asinh())
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn mean_photons(&self) -> f64 {
        self.g.sinh().powi(2)
    }

    /// tanh²g — the ratio P(n)/P(n-1) of the photon-pair distribution.
    pub fn thermal_ratio(&self) -> f64 {
        self.g.tanh().powi(2)
    }

    /// P(n pairs) = (1 - t)·tⁿ with t = tanh²g.
    pub fn probability(&self, n: u32) -> f64 {
        let t = self.thermal_ratio();
        (1.0 - t) * t.powi(n as i32)
    }
}

/// Draw one photon-pair number; both members of the pair carry it, hence the
/// (signal, idler) tuple with equal entries.
pub fn spdc_sample<R: Rng + ?Sized>(source: &SpdcSource, rng: &mut R) -> (u32, u32) {
    let t = source.thermal_ratio();
    let u: f64 = rng.random();
    // inverse-CDF of the geometric law: CDF(n) = 1 - t^(n+1)
    let n = if t <= 0.0 { 0 } else { ((1.0 - u).ln() / t.ln()) as u32 };
    (n, n)
}

/// Per-mode power transmissions; loss is binomial thinning (each photon
/// independently survives with the mode's transmission).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossModel {
    #[serde(rename = "tA")]
    pub t_a: f64,
    #[serde(rename = "tB")]
    pub t_b: f64,
    #[serde(rename = "tC")]
    pub t_c: f64,
    #[serde(rename = "tD")]
    pub t_d: f64,
}

impl LossModel {
    pub fn lossless() -> Self {
        Self { t_a: 1.0, t_b: 1.0, t_c: 1.0, t_d: 1.0 }
    }
}

/// Per-detector efficiencies; a detector reports Binomial(n_in, eta) counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorModel {
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub eta4: f64,
}

impl DetectorModel {
    pub fn uniform(eta: f64) -> Self {
        Self { eta1: eta, eta2: eta, eta3: eta, eta4: eta }
    }
}

/// Optional symmetric-neighbor count noise: after detection, a count shifts
/// to n-1 with probability p_minus and to n+1 with probability p_plus
/// (sensitivity studies only; off by default).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosstalkModel {
    pub p_minus: f64,
    pub p_plus: f64,
}

/// Probability that a detector of efficiency eta reports n_d counts on an
/// n_in-photon input: the binomial law C(n_in, n_d)·eta^n_d·(1-eta)^(n_in-n_d).
pub fn tes_response(n_in: u32, n_d: u32, eta: f64) -> f64 {
    if n_d > n_in {
        return 0.0;
    }
    // exact small-integer binomial coefficient
    let mut coeff = 1.0f64;
    for i in 0..n_d.min(n_in - n_d) {
        coeff = coeff * (n_in - i) as f64 / (i + 1) as f64;
    }
    coeff * eta.powi(n_d as i32) * (1.0 - eta).powi((n_in - n_d) as i32)
}

/// Sources block of the JSON config: one gain per source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourcesConfig {
    pub g1: f64,
    pub g2: f64,
}

/// Beam-splitter block of the JSON config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BsConfig {
    pub r: f64,
    pub phi: f64,
}

/// Complete experiment description, 1:1 with the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sources: SourcesConfig,
    pub loss: LossModel,
    pub bs: BsConfig,
    pub detectors: DetectorModel,
    pub shots: u64,
    pub seed: u64,
    pub n_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosstalk: Option<CrosstalkModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    /// The realistic defaults: mean photon number 0.2 per source, 50% path
    /// transmission on every mode, balanced splitter in the KT phase
    /// convention, and detector efficiency 0.9 (sensor) × 0.7 (coupling).
    pub fn realistic(shots: u64, seed: u64) -> Self {
        let g = 0.2f64.sqrt().asinh();
        Self {
            sources: SourcesConfig { g1: g, g2: g },
            loss: LossModel { t_a: 0.5, t_b: 0.5, t_c: 0.5, t_d: 0.5 },
            bs: BsConfig { r: 0.5, phi: -std::f64::consts::FRAC_PI_2 },
            detectors: DetectorModel::uniform(0.9 * 0.7),
            shots,
            seed,
            n_max: DEFAULT_N_MAX,
            crosstalk: None,
            workers: None,
        }
    }

    /// An ideal pipeline (no loss, perfect detectors) at reflectivity r.
    pub fn lossless(mean_photons: f64, r: f64, shots: u64, seed: u64) -> Result<Self> {
        let g = SpdcSource::from_mean_photons(mean_photons)?.g();
        Ok(Self {
            sources: SourcesConfig { g1: g, g2: g },
            loss: LossModel::lossless(),
            bs: BsConfig { r, phi: -std::f64::consts::FRAC_PI_2 },
            detectors: DetectorModel::uniform(1.0),
            shots,
            seed,
            n_max: DEFAULT_N_MAX,
            crosstalk: None,
            workers: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| -> Result<()> {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                Err(Error::config(format!("{name} must lie in [0,1], got {v}")))
            } else {
                Ok(())
            }
        };
        for (name, g) in [("sources.g1", self.sources.g1), ("sources.g2", self.sources.g2)] {
            if !g.is_finite() || g <= 0.0 {
                return Err(Error::config(format!("{name} must be positive, got {g}")));
            }
        }
        unit("loss.tA", self.loss.t_a)?;
        unit("loss.tB", self.loss.t_b)?;
        unit("loss.tC", self.loss.t_c)?;
        unit("loss.tD", self.loss.t_d)?;
        unit("bs.r", self.bs.r)?;
        if !self.bs.phi.is_finite() {
            return Err(Error::config(format!("bs.phi must be finite, got {}", self.bs.phi)));
        }
        unit("detectors.eta1", self.detectors.eta1)?;
        unit("detectors.eta2", self.detectors.eta2)?;
        unit("detectors.eta3", self.detectors.eta3)?;
        unit("detectors.eta4", self.detectors.eta4)?;
        if self.shots == 0 {
            return Err(Error::config("shots must be at least 1"));
        }
        if self.n_max == 0 || self.n_max > N_MAX_LIMIT {
            return Err(Error::config(format!(
                "n_max must lie in 1..={N_MAX_LIMIT}, got {}",
                self.n_max
            )));
        }
        if let Some(ct) = &self.crosstalk {
            unit("crosstalk.p_minus", ct.p_minus)?;
            unit("crosstalk.p_plus", ct.p_plus)?;
            if ct.p_minus + ct.p_plus > 1.0 {
                return Err(Error::config(format!(
                    "crosstalk probabilities must sum to at most 1, got {}",
                    ct.p_minus + ct.p_plus
                )));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers must be at least 1 when given"));
        }
        Ok(())
    }
}

/// Worker count requested through the KRAVCHUK_THREADS environment variable,
/// if it holds a positive integer.
pub fn worker_count() -> Option<usize> {
    std::env::var("KRAVCHUK_THREADS")
        .ok()?
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&w| w >= 1)
}

/// Dense histogram over detector 4-tuples (n1, n2, n3, n4), each coordinate
/// saturated at n_max.
#[derive(Debug, Clone)]
pub struct EventHistogram {
    n_max: usize,
    counts: Vec<u64>,
    shots: u64,
    seed: u64,
    config: ExperimentConfig,
}

impl EventHistogram {
    pub(crate) fn from_parts(
        n_max: usize,
        counts: Vec<u64>,
        shots: u64,
        seed: u64,
        config: ExperimentConfig,
    ) -> Result<Self> {
        let dim = n_max + 1;
        if counts.len() != dim.pow(4) {
            return Err(Error::shape(format!(
                "histogram for n_max={n_max} needs {} bins, got {}",
                dim.pow(4),
                counts.len()
            )));
        }
        let total: u64 = counts.iter().sum();
        if total != shots {
            return Err(Error::shape(format!(
                "histogram counts sum to {total} but claim {shots} shots"
            )));
        }
        Ok(Self { n_max, counts, shots, seed, config })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    /// Count for one tuple; coordinates beyond n_max hold no events.
    pub fn count(&self, n1: usize, n2: usize, n3: usize, n4: usize) -> u64 {
        let dim = self.n_max + 1;
        if n1 >= dim || n2 >= dim || n3 >= dim || n4 >= dim {
            return 0;
        }
        self.counts[((n1 * dim + n2) * dim + n3) * dim + n4]
    }

    /// Nonzero bins in lexicographic (n1, n2, n3, n4) order.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = ([usize; 4], u64)> + '_ {
        let dim = self.n_max + 1;
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(move |(idx, &c)| {
            let n4 = idx % dim;
            let n3 = idx / dim % dim;
            let n2 = idx / (dim * dim) % dim;
            let n1 = idx / (dim * dim * dim);
            ([n1, n2, n3, n4], c)
        })
    }
}

/// Cumulative output distributions |A_S(k,l)|² for every photon sector the
/// simulator can reach, precomputed once per run.
struct SectorCdfs {
    /// cdfs[s] is row-major (s+1)×(s+1): row l holds the CDF over k.
    cdfs: Vec<Vec<f64>>,
}

impl SectorCdfs {
    fn build(max_s: usize, bs: &BeamSplitterSpec) -> Self {
        let mut cdfs = Vec::with_capacity(max_s + 1);
        for s in 0..=max_s {
            let u = bs_unitary(s, bs);
            let dim = s + 1;
            let mut table = vec![0.0f64; dim * dim];
            for l in 0..dim {
                let mut acc = 0.0;
                for k in 0..dim {
                    acc += u[(k, l)].norm_sqr();
                    table[l * dim + k] = acc;
                }
                // the column is unitary; pin the final entry so inverse-CDF
                // sampling can never fall off the end
                table[l * dim + dim - 1] = 1.0;
            }
            cdfs.push(table);
        }
        Self { cdfs }
    }

    fn sample<R: Rng + ?Sized>(&self, s: usize, l: usize, rng: &mut R) -> usize {
        if s == 0 {
            return 0;
        }
        let row = &self.cdfs[s][l * (s + 1)..(l + 1) * (s + 1)];
        let u: f64 = rng.random();
        row.iter().position(|&c| u < c).unwrap_or(s)
    }
}

fn thin<R: Rng + ?Sized>(rng: &mut R, n: u32, p: f64) -> u32 {
    if n == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        Binomial::new(n as u64, p).expect("validated probability").sample(rng) as u32
    }
}

fn crosstalk_shift<R: Rng + ?Sized>(rng: &mut R, n: u32, ct: &CrosstalkModel) -> u32 {
    let u: f64 = rng.random();
    if u < ct.p_minus {
        n.saturating_sub(1)
    } else if u < ct.p_minus + ct.p_plus {
        n + 1
    } else {
        n
    }
}

/// Run the full pipeline for `config.shots` shots and histogram the detector
/// tuples. Deterministic in (seed, config); the worker count (config field,
/// else KRAVCHUK_THREADS, else the global thread pool) affects wall time
/// only.
pub fn run_experiment(config: &ExperimentConfig) -> Result<EventHistogram> {
    config.validate()?;
    let src1 = SpdcSource::new(config.sources.g1)?;
    let src2 = SpdcSource::new(config.sources.g2)?;
    let bs = BeamSplitterSpec::new(config.bs.r, config.bs.phi)?;
    let n_max = config.n_max;
    let dim = n_max + 1;
    let size = dim.pow(4);
    let tables = SectorCdfs::build(2 * n_max, &bs);
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let loss = config.loss;
    let det = config.detectors;
    let ct = config.crosstalk;
    let cap = n_max as u32;

    let simulate_shot = |shot: u64| -> usize {
        let mut rng = base.clone();
        rng.set_stream(shot);
        let m1 = spdc_sample(&src1, &mut rng).0.min(cap);
        let m2 = spdc_sample(&src2, &mut rng).0.min(cap);
        let a = thin(&mut rng, m1, loss.t_a);
        let b = thin(&mut rng, m1, loss.t_b);
        let c = thin(&mut rng, m2, loss.t_c);
        let d = thin(&mut rng, m2, loss.t_d);
        let s = (b + c) as usize;
        let k_out = tables.sample(s, b as usize, &mut rng) as u32;
        let mut n = [
            thin(&mut rng, a, det.eta1),
            thin(&mut rng, k_out, det.eta2),
            thin(&mut rng, s as u32 - k_out, det.eta3),
            thin(&mut rng, d, det.eta4),
        ];
        if let Some(ct) = &ct {
            for v in &mut n {
                *v = crosstalk_shift(&mut rng, *v, ct);
            }
        }
        let [n1, n2, n3, n4] = n.map(|v| v.min(cap) as usize);
        ((n1 * dim + n2) * dim + n3) * dim + n4
    };

    let accumulate = || {
        (0..config.shots)
            .into_par_iter()
            .fold(
                || vec![0u64; size],
                |mut hist, shot| {
                    hist[simulate_shot(shot)] += 1;
                    hist
                },
            )
            .reduce(
                || vec![0u64; size],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    };

    let counts = match config.workers.or_else(worker_count) {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::config(format!("cannot build a {w}-thread pool: {e}")))?
            .install(accumulate),
        None => accumulate(),
    };

    EventHistogram::from_parts(n_max, counts, config.shots, config.seed, config.clone())
}

/// Post-selected statistics for the herald sector (n1, n4): keep tuples with
/// exactly those herald counts and n2 + n3 = n1 + n4, and estimate
/// p(k) = N(n1, k, S-k, n4) / N_selected with the uniform per-bin
/// uncertainty 1/sqrt(N_selected).
pub fn estimate_statistics(
    hist: &EventHistogram,
    n1: usize,
    n4: usize,
) -> Result<PhotonStatistics> {
    let s = n1 + n4;
    if s == 0 {
        return Err(Error::domain(
            "post-selected sector needs at least one photon (n1 + n4 >= 1)",
        ));
    }
    let counts: Vec<u64> = (0..=s).map(|k| hist.count(n1, k, s - k, n4)).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::empty_selection(format!(
            "no records with heralds (n1,n4) = ({n1},{n4}) and n2+n3 = {s}"
        )));
    }
    let probabilities: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let dp = 1.0 / (total as f64).sqrt();
    Ok(PhotonStatistics::with_errors(probabilities, vec![dp; s + 1]))
}

/// Interference visibility (max - min)/(max + min) of a count or
/// probability profile.
pub fn visibility(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::shape("visibility needs at least two bins"));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::domain("visibility bins must be finite and nonnegative"));
    }
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    if max + min == 0.0 {
        return Err(Error::degenerate("all bins are zero"));
    }
    Ok((max - min) / (max + min))
}

/// Klyshko heralding efficiencies from singles and coincidence counts:
/// eta_A = C_AB/C_B, eta_B = C_AB/C_A.
pub fn klyshko_efficiency(c_a: u64, c_b: u64, c_ab: u64) -> Result<(f64, f64)> {
    if c_a == 0 || c_b == 0 {
        return Err(Error::division(format!(
            "Klyshko efficiencies need nonzero singles, got C_A={c_a}, C_B={c_b}"
        )));
    }
    Ok((c_ab as f64 / c_b as f64, c_ab as f64 / c_a as f64))
}

/// Effective Schmidt mode number from the marginal second-order correlation:
/// K = 1/(g2 - 1).
pub fn schmidt_from_g2(g2: f64) -> Result<f64> {
    if !g2.is_finite() || g2 <= 1.0 {
        return Err(Error::domain(format!(
            "Schmidt number needs g2 > 1 (thermal-like marginal), got {g2}"
        )));
    }
    Ok(1.0 / (g2 - 1.0))
}

/// Second-order correlation g² = (⟨n²⟩ - ⟨n⟩)/⟨n⟩² of a photon-number
/// sample.
pub fn g2_statistic(samples: &[u32]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::shape("g2 needs at least one sample"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().map(|&v| v as f64).sum::<f64>() / n;
    if mean == 0.0 {
        return Err(Error::degenerate("g2 is undefined for an all-vacuum sample"));
    }
    let mean_sq = samples.iter().map(|&v| (v as f64).powi(2)).sum::<f64>() / n;
    Ok((mean_sq - mean) / (mean * mean))
}
