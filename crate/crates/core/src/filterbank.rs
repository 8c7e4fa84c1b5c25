//! Ideal, non-overlapping band-pass filters that tile the DFT bins.
//!
//! With band width `w = N/(2T)`, filter `b` (1-based) passes the low band
//! `[(b-1)·w, b·w)` and its mirror `(N - b·w, N - (b-1)·w]`. The first filter's
//! mirror stops at `N - 1`, and the last filter also takes the Nyquist bin
//! `N/2`, so every bin belongs to exactly one filter.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sigcore::Spectrum;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterBank {
    n: usize,
    t: usize,
    responses: Vec<Vec<bool>>,
}

impl FilterBank {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Bins per side of each band.
    pub fn band_width(&self) -> usize {
        self.n / (2 * self.t)
    }

    /// 0/1 mask of filter `b`.
    pub fn response(&self, b: usize) -> Result<&[bool]> {
        self.check_index(b)?;
        Ok(&self.responses[b - 1])
    }

    /// Bins passed by filter `b`, ascending.
    pub fn passband(&self, b: usize) -> Result<Vec<usize>> {
        Ok(self
            .response(b)?
            .iter()
            .enumerate()
            .filter_map(|(k, &on)| on.then_some(k))
            .collect())
    }

    /// The filter that passes bin `k`.
    pub fn filter_of(&self, k: usize) -> usize {
        band_of(k % self.n, self.n, self.t)
    }

    fn check_index(&self, b: usize) -> Result<()> {
        if b == 0 || b > self.t {
            return Err(Error::BadDimensions(format!("filter index {b} outside 1..={}", self.t)));
        }
        Ok(())
    }
}

/// Filter owning bin `k`, from the folded frequency `min(k, N-k)`.
#[inline]
pub(crate) fn band_of(k: usize, n: usize, t: usize) -> usize {
    let folded = k.min(n - k);
    (folded / (n / (2 * t))).min(t - 1) + 1
}

pub fn check_bank_shape(n: usize, t: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 || t == 0 || (n / 2) % t != 0 {
        return Err(Error::BadBankShape { n, t });
    }
    Ok(())
}

pub fn build_bank(n: usize, t: usize) -> Result<FilterBank> {
    check_bank_shape(n, t)?;
    let w = n / (2 * t);
    let responses = (1..=t)
        .map(|b| {
            let low = (b - 1) * w..b * w;
            let a1 = n - b * w;
            let a2 = if b == 1 { n - 1 } else { n - (b - 1) * w };
            (0..n)
                .map(|k| low.contains(&k) || (a1 < k && k <= a2) || (b == t && k == n / 2))
                .collect()
        })
        .collect();
    Ok(FilterBank { n, t, responses })
}

/// Bin-wise product of `spectrum` with filter `b`'s mask.
pub fn apply_filter(spectrum: &Spectrum, bank: &FilterBank, b: usize) -> Result<Spectrum> {
    if spectrum.len() != bank.n {
        return Err(Error::LengthMismatch {
            expected: bank.n,
            actual: spectrum.len(),
        });
    }
    let mask = bank.response(b)?;
    let bins = spectrum
        .bins()
        .iter()
        .zip(mask)
        .map(|(&v, &on)| if on { v } else { Complex64::new(0.0, 0.0) })
        .collect();
    Spectrum::new(bins)
}
