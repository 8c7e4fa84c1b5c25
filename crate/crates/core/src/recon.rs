//! Closed-form decoder.
//!
//! A measurement pair `(y0, y1) = β·(cos θ_α, sin θ_α)` fixes the bin from the
//! angle `Θ` with `cos Θ = |y0| / ‖y‖` and the coefficient from either
//! component. Each recovered atom becomes a conjugate-symmetric spectrum; their
//! sum is inverted back to the time domain.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::shatter::{grid_angle, Measurement, MeasurementSet};
use crate::sigcore::{idft, Signal, Spectrum};

/// Allowed distance, in radians, between the measured angle and its grid bin.
pub const ANGLE_TOL: f64 = 1e-6;

/// A single recovered frequency: bin `alpha ∈ 0..=N/2` with coefficient `beta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveredAtom {
    pub alpha: usize,
    pub beta: Complex64,
}

/// Recovers position and coefficient from one measurement pair.
///
/// `Θ` is evaluated as `atan2(|y1|, |y0|)`, which equals
/// `arccos(|y0| / ‖y‖)` but stays accurate near `Θ = 0`. The coefficient is
/// divided out of whichever component has the larger grid weight, so the
/// Nyquist bin (where `cos θ = 0`) is handled by the sine row.
pub fn recover_atom(y0: Complex64, y1: Complex64, n: usize) -> Result<RecoveredAtom> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidLength(n));
    }
    if y0.norm_sqr() + y1.norm_sqr() == 0.0 {
        return Err(Error::InvalidConfig(
            "cannot recover an atom from a zero measurement".into(),
        ));
    }
    let angle = y1.norm().atan2(y0.norm());
    let step = std::f64::consts::PI / n as f64;
    let alpha = (angle / step).round() as usize;
    let offset = (angle - alpha as f64 * step).abs();
    if alpha > n / 2 || offset >= ANGLE_TOL {
        return Err(Error::OffGridAngle { angle, alpha, offset });
    }
    let snapped = grid_angle(alpha, n);
    let (c, s) = if 2 * alpha == n {
        (0.0, 1.0)
    } else {
        (snapped.cos(), snapped.sin())
    };
    let beta = if c >= s { y0 / c } else { y1 / s };
    if (alpha == 0 || 2 * alpha == n) && beta.im.abs() > 1e-8 * beta.norm() {
        return Err(Error::NonRealResult {
            residue: beta.im.abs(),
            limit: 1e-8 * beta.norm(),
        });
    }
    Ok(RecoveredAtom { alpha, beta })
}

/// Writes `beta` at `alpha` and its conjugate at `N - alpha`.
///
/// Bins `0` and `N/2` are their own mirrors and get a single write.
pub fn atom_to_spectrum(atom: &RecoveredAtom, n: usize) -> Result<Spectrum> {
    let mut spectrum = Spectrum::zeros(n)?;
    add_atom(spectrum.bins_mut(), atom)?;
    Ok(spectrum)
}

fn add_atom(bins: &mut [Complex64], atom: &RecoveredAtom) -> Result<()> {
    let n = bins.len();
    if atom.alpha > n / 2 {
        return Err(Error::BadDimensions(format!(
            "atom bin {} outside 0..={}",
            atom.alpha,
            n / 2
        )));
    }
    bins[atom.alpha] += atom.beta;
    if atom.alpha != 0 && 2 * atom.alpha != n {
        bins[n - atom.alpha] += atom.beta.conj();
    }
    Ok(())
}

pub fn recover_entry(entry: &Measurement, n: usize) -> Result<RecoveredAtom> {
    recover_atom(entry.y0, entry.y1, n)
}

/// Sum of all recovered atoms, before the inverse transform.
pub fn decode_spectrum(measurements: &MeasurementSet) -> Result<Spectrum> {
    let n = measurements.n;
    let mut spectrum = Spectrum::zeros(n)?;
    for entry in &measurements.entries {
        add_atom(spectrum.bins_mut(), &recover_entry(entry, n)?)?;
    }
    Ok(spectrum)
}

pub fn decode(measurements: &MeasurementSet) -> Result<Signal> {
    idft(&decode_spectrum(measurements)?)
}
