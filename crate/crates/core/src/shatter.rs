//! The encoder: permute, filter, un-permute, sense, threshold.
//!
//! Each of the `T` paths yields a *shattered* signal carrying the original
//! frequencies whose permuted position falls in that filter's band. When `σ`
//! spreads the support so that no filter sees more than one frequency, every
//! shattered signal is 0- or 1-sparse and two complex numbers describe it
//! completely.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{apply_filter, band_of, build_bank, check_bank_shape, FilterBank};
use crate::permute::{inverse_permute, mod_inverse, mul_mod, permute, PermParam};
use crate::sigcore::{dft, idft_scaled, occupied_half_bins, Signal, SparsitySpec, Spectrum};

/// ℓ2 cutoff applied to each filter's measurement pair unless configured otherwise.
pub const DEFAULT_THRESHOLD: f64 = 0.01;

/// Complete encoder parameterization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShatterConfig {
    pub n: usize,
    pub t: usize,
    pub sigma: u64,
    pub threshold: f64,
}

impl ShatterConfig {
    pub fn new(n: usize, t: usize, sigma: u64, threshold: f64) -> Result<Self> {
        check_bank_shape(n, t)?;
        mod_inverse(sigma, n as u64)?;
        if !(threshold >= 0.0 && threshold.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "threshold {threshold} must be finite and >= 0"
            )));
        }
        Ok(Self { n, t, sigma, threshold })
    }

    /// Also requires at least one filter per frequency of the densest allowed signal.
    pub fn with_sparsity(n: usize, t: usize, sigma: u64, threshold: f64, sparsity: SparsitySpec) -> Result<Self> {
        let config = Self::new(n, t, sigma, threshold)?;
        if t < sparsity.m2 {
            return Err(Error::InvalidConfig(format!(
                "{t} filters cannot isolate up to {} frequencies",
                sparsity.m2
            )));
        }
        Ok(config)
    }

    fn check_signal(&self, signal: &Signal) -> Result<()> {
        if signal.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: signal.len(),
            });
        }
        Ok(())
    }
}

/// `A = Φ·Ψ`, stored as the grid angles `θ_s = π·s/N`, `s = 0..=N/2`.
///
/// Φ has rows `cos θ_s` and `sin θ_s` over the first `N/2 + 1` bins and zeros
/// elsewhere, so a lone bin `α` with coefficient `β` senses to
/// `(β·cos θ_α, β·sin θ_α)` while its conjugate mirror is ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct SensingMatrix {
    n: usize,
    angles: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl SensingMatrix {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidLength(n));
        }
        let angles: Vec<f64> = (0..=n / 2).map(|s| grid_angle(s, n)).collect();
        let cos = (0..=n / 2).map(|s| grid_cos(s, n)).collect();
        let sin = (0..=n / 2).map(|s| grid_cos(n / 2 - s, n)).collect();
        Ok(Self { n, angles, cos, sin })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `θ_s` for `s = 0..=N/2`.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Column `s` of Φ, zero past `N/2`.
    pub fn phi_column(&self, s: usize) -> (f64, f64) {
        if s <= self.n / 2 {
            (self.cos[s], self.sin[s])
        } else {
            (0.0, 0.0)
        }
    }

    /// `Φ·X` for a spectrum `X`.
    pub fn apply_phi(&self, spectrum: &Spectrum) -> Result<(Complex64, Complex64)> {
        if spectrum.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: spectrum.len(),
            });
        }
        let bins = &spectrum.bins()[..=self.n / 2];
        let y0 = bins.iter().zip(&self.cos).map(|(b, c)| b * c).sum();
        let y1 = bins.iter().zip(&self.sin).map(|(b, s)| b * s).sum();
        Ok((y0, y1))
    }

    /// The explicit `2×N` complex matrix `Φ·Ψ`, row-major.
    pub fn dense(&self) -> [Vec<Complex64>; 2] {
        let n = self.n;
        let row = |weights: &[f64]| -> Vec<Complex64> {
            (0..n)
                .map(|t| {
                    weights
                        .iter()
                        .enumerate()
                        .map(|(s, &w)| w * unit_root((s * t) % n, n).conj())
                        .sum()
                })
                .collect()
        };
        [row(&self.cos), row(&self.sin)]
    }
}

/// `θ_s = π·s/N`.
pub fn grid_angle(s: usize, n: usize) -> f64 {
    PI * s as f64 / n as f64
}

// cos(π·s/N) with cos(π/2) pinned to zero so the Nyquist column is exact.
fn grid_cos(s: usize, n: usize) -> f64 {
    if 2 * s == n {
        0.0
    } else {
        grid_angle(s, n).cos()
    }
}

/// `e^{i2πj/N}`.
pub(crate) fn unit_root(j: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)
}

/// One retained filter output `y_{c_j}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "MeasurementRecord", into = "MeasurementRecord")]
pub struct Measurement {
    pub filter: usize,
    pub y0: Complex64,
    pub y1: Complex64,
}

impl Measurement {
    pub fn norm(&self) -> f64 {
        (self.y0.norm_sqr() + self.y1.norm_sqr()).sqrt()
    }
}

#[derive(Serialize, Deserialize)]
struct MeasurementRecord {
    filter: usize,
    y0_re: f64,
    y0_im: f64,
    y1_re: f64,
    y1_im: f64,
}

impl From<MeasurementRecord> for Measurement {
    fn from(r: MeasurementRecord) -> Self {
        Self {
            filter: r.filter,
            y0: Complex64::new(r.y0_re, r.y0_im),
            y1: Complex64::new(r.y1_re, r.y1_im),
        }
    }
}

impl From<Measurement> for MeasurementRecord {
    fn from(m: Measurement) -> Self {
        Self {
            filter: m.filter,
            y0_re: m.y0.re,
            y0_im: m.y0.im,
            y1_re: m.y1.re,
            y1_im: m.y1.im,
        }
    }
}

/// Everything the decoder needs: the configuration and the retained outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    pub n: usize,
    pub t: usize,
    pub sigma: u64,
    pub threshold: f64,
    pub entries: Vec<Measurement>,
}

impl MeasurementSet {
    pub fn empty(config: &ShatterConfig) -> Self {
        Self {
            n: config.n,
            t: config.t,
            sigma: config.sigma,
            threshold: config.threshold,
            entries: Vec::new(),
        }
    }

    pub fn config(&self) -> Result<ShatterConfig> {
        ShatterConfig::new(self.n, self.t, self.sigma, self.threshold)
    }

    /// Real numbers a store of this set must keep (two complex values per entry).
    pub fn stored_reals(&self) -> usize {
        4 * self.entries.len()
    }

    /// Checks ordering, filter range and the threshold invariant.
    pub fn validate(&self) -> Result<()> {
        self.config()?;
        let mut previous = 0;
        for e in &self.entries {
            if e.filter <= previous || e.filter > self.t {
                return Err(Error::Format(format!(
                    "filter index {} out of order or outside 1..={}",
                    e.filter, self.t
                )));
            }
            if e.norm().is_nan() || e.norm() < self.threshold {
                return Err(Error::Format(format!(
                    "entry for filter {} has norm {} below threshold {}",
                    e.filter,
                    e.norm(),
                    self.threshold
                )));
            }
            previous = e.filter;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: Self = serde_json::from_str(text)?;
        set.validate()?;
        Ok(set)
    }
}

fn shattered_spectra(signal: &Signal, config: &ShatterConfig, bank: &FilterBank) -> Result<Vec<Spectrum>> {
    Ok(shatter_with(signal, config, bank)?.iter().map(dft).collect())
}

/// The `T` shattered signals, in filter order.
pub fn shatter(signal: &Signal, config: &ShatterConfig) -> Result<Vec<Signal>> {
    config.check_signal(signal)?;
    shatter_with(signal, config, &build_bank(config.n, config.t)?)
}

fn shatter_with(signal: &Signal, config: &ShatterConfig, bank: &FilterBank) -> Result<Vec<Signal>> {
    let permuted = dft(&permute(signal, config.sigma)?);
    let scale = signal.max_abs();
    (1..=config.t)
        .into_par_iter()
        .map(|b| {
            let path = idft_scaled(&apply_filter(&permuted, bank, b)?, scale)?;
            inverse_permute(&path, config.sigma)
        })
        .collect()
}

fn occupancy(spectra: &[Spectrum]) -> Result<Vec<usize>> {
    let reference = spectra.iter().map(Spectrum::max_norm).fold(0.0, f64::max);
    let counts: Vec<usize> = spectra
        .iter()
        .map(|s| occupied_half_bins(s.bins(), reference).len())
        .collect();
    if let Some((i, &count)) = counts.iter().enumerate().find(|(_, &c)| c > 1) {
        return Err(Error::ShatterCollision { filter: i + 1, count });
    }
    Ok(counts)
}

/// Occupied bins in `0..=N/2` per shattered signal, relative to the largest bin overall.
///
/// Fails with `ShatterCollision` naming the first filter that holds more than
/// one frequency.
pub fn check_shatter_validity(shattered: &[Signal]) -> Result<Vec<usize>> {
    let spectra: Vec<Spectrum> = shattered.iter().map(dft).collect();
    occupancy(&spectra)
}

/// `A·x_g`, computed as `Φ·DFT(x_g)`.
pub fn sense_one(shattered: &Signal, matrix: &SensingMatrix) -> Result<(Complex64, Complex64)> {
    matrix.apply_phi(&dft(shattered))
}

/// Measurements of every filter before thresholding, in filter order.
///
/// Fails with `ShatterCollision` if any path carries more than one frequency.
pub fn measure_all(signal: &Signal, config: &ShatterConfig) -> Result<Vec<(Complex64, Complex64)>> {
    config.check_signal(signal)?;
    let bank = build_bank(config.n, config.t)?;
    let matrix = SensingMatrix::new(config.n)?;
    let spectra = shattered_spectra(signal, config, &bank)?;
    occupancy(&spectra)?;
    spectra.iter().map(|s| matrix.apply_phi(s)).collect()
}

/// Full encoder: keeps the filters whose measurement norm reaches the threshold.
pub fn encode(signal: &Signal, config: &ShatterConfig) -> Result<MeasurementSet> {
    let all = measure_all(signal, config)?;
    let mut set = MeasurementSet::empty(config);
    set.entries = all
        .into_iter()
        .enumerate()
        .map(|(i, (y0, y1))| Measurement { filter: i + 1, y0, y1 })
        .filter(|m| m.norm() >= config.threshold)
        .collect();
    Ok(set)
}

/// Filter that original bin `k` reaches under `σ`: its permuted position is `(σ·k) mod N`.
pub fn filter_for_bin(k: usize, n: usize, t: usize, sigma: u64) -> usize {
    band_of(mul_mod(sigma, k as u64, n as u64) as usize, n, t)
}

/// Whether `σ` sends every bin of `support` to a different filter.
pub fn separates(support: &BTreeSet<usize>, n: usize, t: usize, sigma: u64) -> bool {
    let mut used = vec![false; t + 1];
    support.iter().all(|&k| {
        let b = filter_for_bin(k, n, t, sigma);
        !std::mem::replace(&mut used[b], true)
    })
}

/// Smallest `σ ≥ start` coprime to `n` that isolates every bin of `support`.
///
/// Candidates below `start` are tried afterwards, so the search fails only when
/// no `σ < n` works.
pub fn find_sigma(n: usize, t: usize, support: &BTreeSet<usize>, start: u64) -> Result<u64> {
    check_bank_shape(n, t)?;
    if let Some(&k) = support.iter().find(|&&k| k > n / 2) {
        return Err(Error::InvalidConfig(format!("support bin {k} outside 0..={}", n / 2)));
    }
    if support.len() > t {
        return Err(Error::NoValidSigma { n, t });
    }
    let n64 = n as u64;
    let start = start.clamp(1, n64 - 1);
    (start..n64)
        .chain(1..start)
        .filter(|&s| PermParam::new(s, n64).is_ok())
        .find(|&s| separates(support, n, t, s))
        .ok_or(Error::NoValidSigma { n, t })
}
