//! Signals, spectra and the discrete Fourier transform.
//!
//! The forward transform is the unnormalized DFT
//! `X(k) = Σ_n x(n)·e^{-i2πnk/N}`; the inverse carries the `1/N` factor so that
//! `idft(dft(x)) = x`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Relative magnitude below which a bin counts as empty.
pub const OCCUPANCY_TOL: f64 = 1e-9;

/// Allowed imaginary residue of an inverse transform, relative to the real part.
pub const REAL_RESIDUE_TOL: f64 = 1e-8;

/// Real time-domain samples of even length `N ≥ 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
}

impl Signal {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        check_length(samples.len())?;
        Ok(Self { samples })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Largest absolute sample-wise difference.
    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

/// Complex DFT bins `k = 0..N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(bins: Vec<Complex64>) -> Result<Self> {
        check_length(bins.len())?;
        Ok(Self { bins })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn bins_mut(&mut self) -> &mut [Complex64] {
        &mut self.bins
    }

    pub fn into_bins(self) -> Vec<Complex64> {
        self.bins
    }

    pub fn max_norm(&self) -> f64 {
        self.bins.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }

    /// Worst violation of `X(k) = conj(X(N-k))`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|k| (self.bins[k] - self.bins[(n - k) % n].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Whether the spectrum could have come from a real signal, to `1e-10` of its peak.
    pub fn is_conjugate_symmetric(&self) -> bool {
        self.symmetry_defect() <= 1e-10 * self.max_norm()
    }

    /// Indices in `0..=N/2` whose magnitude exceeds `OCCUPANCY_TOL` times the peak.
    pub fn occupied_bins(&self) -> Vec<usize> {
        occupied_half_bins(&self.bins, self.max_norm())
    }
}

pub(crate) fn occupied_half_bins(bins: &[Complex64], reference: f64) -> Vec<usize> {
    if reference == 0.0 {
        return Vec::new();
    }
    let cutoff = OCCUPANCY_TOL * reference;
    (0..=bins.len() / 2).filter(|&k| bins[k].norm() > cutoff).collect()
}

/// Inclusive sparsity range `[m1, m2]`, counted over bins `0..=N/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SparsitySpec {
    pub m1: usize,
    pub m2: usize,
}

impl SparsitySpec {
    pub fn new(m1: usize, m2: usize, n: usize) -> Result<Self> {
        if m2 > n / 2 {
            return Err(Error::InvalidSparsity { m: m2, max: n / 2 });
        }
        if m1 > m2 {
            return Err(Error::InvalidConfig(format!("sparsity range [{m1}, {m2}] is empty")));
        }
        Ok(Self { m1, m2 })
    }
}

fn check_length(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidLength(n));
    }
    Ok(())
}

type Plan = Arc<dyn Fft<f64>>;

fn plans(n: usize) -> (Plan, Plan) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Plan, Plan)>>> = OnceLock::new();
    let mut cache = CACHE
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner());
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Forward DFT of a real signal.
pub fn dft(signal: &Signal) -> Spectrum {
    let mut bins: Vec<Complex64> = signal.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plans(bins.len()).0.process(&mut bins);
    Spectrum { bins }
}

/// Inverse DFT over complex values, `1/N` normalized.
pub(crate) fn idft_complex(bins: &[Complex64]) -> Vec<Complex64> {
    let n = bins.len();
    let mut out = bins.to_vec();
    plans(n).1.process(&mut out);
    let scale = 1.0 / n as f64;
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

/// Inverse DFT, rejecting spectra whose inverse is not real.
pub fn idft(spectrum: &Spectrum) -> Result<Signal> {
    idft_scaled(spectrum, 0.0)
}

/// Like [`idft`], but judges the imaginary residue against at least `scale`.
///
/// Pieces of a larger real signal (one filter's share, say) can be pure
/// roundoff, so their residue is measured against the whole signal's peak.
pub(crate) fn idft_scaled(spectrum: &Spectrum, scale: f64) -> Result<Signal> {
    let values = idft_complex(&spectrum.bins);
    let (re_max, im_max) = values
        .iter()
        .fold((0.0f64, 0.0f64), |(r, i), v| (r.max(v.re.abs()), i.max(v.im.abs())));
    let limit = REAL_RESIDUE_TOL * re_max.max(scale);
    if im_max > limit {
        return Err(Error::NonRealResult { residue: im_max, limit });
    }
    Ok(Signal {
        samples: values.into_iter().map(|v| v.re).collect(),
    })
}

/// Random real signal with exactly `m` occupied bins in `0..=n/2`.
///
/// Positions are a uniform `m`-subset of `0..=n/2`. Each coefficient has
/// magnitude uniform in `[0.5, 1.5]·n` and uniform phase; bins `0` and `n/2`
/// take a random sign instead so the signal stays real.
pub fn generate_sparse(n: usize, m: usize, seed: u64) -> Result<Signal> {
    idft(&generate_sparse_spectrum(n, m, seed)?)
}

/// The spectrum behind [`generate_sparse`].
pub fn generate_sparse_spectrum(n: usize, m: usize, seed: u64) -> Result<Spectrum> {
    check_length(n)?;
    let half = n / 2;
    if m > half {
        return Err(Error::InvalidSparsity { m, max: half });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bins = vec![Complex64::new(0.0, 0.0); n];
    let mut positions = index::sample(&mut rng, half + 1, m).into_vec();
    positions.sort_unstable();
    for k in positions {
        let magnitude = rng.random_range(0.5..=1.5) * n as f64;
        if k == 0 || k == half {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            bins[k] = Complex64::new(sign * magnitude, 0.0);
        } else {
            let phase = rng.random_range(0.0..2.0 * PI);
            bins[k] = Complex64::from_polar(magnitude, phase);
            bins[n - k] = bins[k].conj();
        }
    }
    Spectrum::new(bins)
}
