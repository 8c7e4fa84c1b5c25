//! Modular index permutation `x_p(n) = x((σ·n) mod N)`.
//!
//! Scrambling time indices with `σ` scrambles frequency indices with `σ⁻¹`:
//! the DFT of the permuted signal is `X_p(k) = X((σ⁻¹·k) mod N)`. Bin `k` of
//! the original spectrum therefore lands at position `(σ·k) mod N`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sigcore::{Signal, Spectrum};

/// A permutation parameter together with its inverse modulo `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PermParam {
    sigma: u64,
    sigma_inv: u64,
    n: u64,
}

impl PermParam {
    pub fn new(sigma: u64, n: u64) -> Result<Self> {
        let sigma_inv = mod_inverse(sigma, n)?;
        Ok(Self { sigma, sigma_inv, n })
    }

    pub fn sigma(&self) -> u64 {
        self.sigma
    }

    pub fn sigma_inv(&self) -> u64 {
        self.sigma_inv
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// The parameter that undoes this one.
    pub fn inverse(&self) -> Self {
        Self {
            sigma: self.sigma_inv,
            sigma_inv: self.sigma,
            n: self.n,
        }
    }

    /// Source index read by output position `i`.
    #[inline]
    pub fn source(&self, i: usize) -> usize {
        mul_mod(self.sigma, i as u64, self.n) as usize
    }

    /// Permutes any slice of length `n`.
    pub fn apply<T: Copy>(&self, values: &[T]) -> Result<Vec<T>> {
        if values.len() as u64 != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n as usize,
                actual: values.len(),
            });
        }
        Ok((0..values.len()).map(|i| values[self.source(i)]).collect())
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// The `t` in `1..n` with `(sigma·t) mod n = 1`.
pub fn mod_inverse(sigma: u64, n: u64) -> Result<u64> {
    if n < 2 || sigma == 0 || sigma >= n {
        return Err(Error::NotCoprime { sigma, n });
    }
    // extended Euclid on (n, sigma)
    let (mut r0, mut r1) = (n as i128, sigma as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(Error::NotCoprime { sigma, n });
    }
    Ok(t0.rem_euclid(n as i128) as u64)
}

/// `output[i] = input[(σ·i) mod N]`.
pub fn permute(signal: &Signal, sigma: u64) -> Result<Signal> {
    let p = PermParam::new(sigma, signal.len() as u64)?;
    Signal::new(p.apply(signal.samples())?)
}

/// Undoes [`permute`] with the same `σ`.
pub fn inverse_permute(signal: &Signal, sigma: u64) -> Result<Signal> {
    let p = PermParam::new(sigma, signal.len() as u64)?.inverse();
    Signal::new(p.apply(signal.samples())?)
}

/// Applies the index map of [`permute`] to complex bins.
pub fn permute_spectrum(spectrum: &Spectrum, sigma: u64) -> Result<Spectrum> {
    let p = PermParam::new(sigma, spectrum.len() as u64)?;
    let bins: Vec<Complex64> = p.apply(spectrum.bins())?;
    Spectrum::new(bins)
}
