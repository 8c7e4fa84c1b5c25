//! The encoder as explicit matrices.
//!
//! Every stage before thresholding is linear, so path `g` collapses to one
//! `2×N` complex matrix `γ_g = A·P⁻¹·H_g·P`, where `P` is the permutation
//! matrix for `σ`, `H_g` the circulant of filter `g`'s impulse response and
//! `A = Φ·Ψ` the sensing matrix. Stacking all paths gives a `2T×N` matrix whose
//! product with `x` is the full list of pre-threshold measurements.
//!
//! This is an oracle for the operational encoder and is dense on purpose, so
//! construction is limited to `N ≤ 4096`.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filterbank::{build_bank, FilterBank};
use crate::permute::PermParam;
use crate::shatter::{SensingMatrix, ShatterConfig};
use crate::sigcore::idft_complex;

pub type CMatrix = DMatrix<Complex64>;

pub const MAX_DENSE_N: usize = 4096;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_DENSE_N {
        return Err(Error::BadDimensions(format!(
            "dense pipeline matrices are limited to N <= {MAX_DENSE_N}, got {n}"
        )));
    }
    Ok(())
}

/// `P` with `(P·x)[i] = x[(σ·i) mod N]`.
pub fn permutation_matrix(param: &PermParam) -> CMatrix {
    let n = param.n() as usize;
    let mut p = CMatrix::from_element(n, n, zero());
    for i in 0..n {
        p[(i, param.source(i))] = one();
    }
    p
}

/// Circulant `H` with `H[i][j] = h[(i - j) mod N]`, `h` the inverse DFT of the mask.
pub fn circulant_from_mask(mask: &[bool]) -> CMatrix {
    let n = mask.len();
    let response: Vec<Complex64> = mask.iter().map(|&on| if on { one() } else { zero() }).collect();
    let h = idft_complex(&response);
    CMatrix::from_fn(n, n, |i, j| h[(i + n - j) % n])
}

/// `A = Φ·Ψ` as a `2×N` matrix.
pub fn sensing_matrix(n: usize) -> Result<CMatrix> {
    let [r0, r1] = SensingMatrix::new(n)?.dense();
    Ok(CMatrix::from_fn(2, n, |r, c| if r == 0 { r0[c] } else { r1[c] }))
}

/// Shared factors of every path.
struct Factors {
    a: CMatrix,
    p: CMatrix,
    p_inv: CMatrix,
}

impl Factors {
    fn new(config: &ShatterConfig) -> Result<Self> {
        check_size(config.n)?;
        let param = PermParam::new(config.sigma, config.n as u64)?;
        Ok(Self {
            a: sensing_matrix(config.n)?,
            p: permutation_matrix(&param),
            p_inv: permutation_matrix(&param.inverse()),
        })
    }

    fn gamma(&self, bank: &FilterBank, g: usize) -> Result<CMatrix> {
        let h = circulant_from_mask(bank.response(g)?);
        Ok(&(&(&self.a * &self.p_inv) * &h) * &self.p)
    }
}

fn check_bank(config: &ShatterConfig, bank: &FilterBank) -> Result<()> {
    if bank.n() != config.n || bank.t() != config.t {
        return Err(Error::BadDimensions(format!(
            "bank ({}, {}) does not match config ({}, {})",
            bank.n(),
            bank.t(),
            config.n,
            config.t
        )));
    }
    Ok(())
}

/// `γ_g = A·P⁻¹·H_g·P`.
pub fn build_gamma(config: &ShatterConfig, bank: &FilterBank, g: usize) -> Result<CMatrix> {
    check_bank(config, bank)?;
    Factors::new(config)?.gamma(bank, g)
}

/// `P⁻¹·H_g·P`, the `N×N` map from the input to the `g`-th shattered signal.
pub fn path_operator(config: &ShatterConfig, bank: &FilterBank, g: usize) -> Result<CMatrix> {
    check_bank(config, bank)?;
    let f = Factors::new(config)?;
    let h = circulant_from_mask(bank.response(g)?);
    Ok(&(&f.p_inv * &h) * &f.p)
}

/// All `γ_g` stacked vertically: rows `2(g-1)` and `2(g-1)+1` belong to filter `g`.
pub fn build_stacked(config: &ShatterConfig) -> Result<CMatrix> {
    let bank = build_bank(config.n, config.t)?;
    let f = Factors::new(config)?;
    let mut stacked = CMatrix::from_element(2 * config.t, config.n, zero());
    for g in 1..=config.t {
        let gamma = f.gamma(&bank, g)?;
        stacked.rows_mut(2 * (g - 1), 2).copy_from(&gamma);
    }
    Ok(stacked)
}

/// `M·x` for a real `x`.
pub fn apply(matrix: &CMatrix, x: &[f64]) -> Result<Vec<Complex64>> {
    if x.len() != matrix.ncols() {
        return Err(Error::LengthMismatch {
            expected: matrix.ncols(),
            actual: x.len(),
        });
    }
    Ok(matrix
        .row_iter()
        .map(|row| row.iter().zip(x).map(|(m, &v)| m * v).sum())
        .collect())
}

/// Writes one line per row with `re,im` pairs for each column, no header.
pub fn write_csv<W: Write>(matrix: &CMatrix, out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let mut record = Vec::with_capacity(2 * matrix.ncols());
    for row in matrix.row_iter() {
        record.clear();
        for v in row.iter() {
            record.push(format!("{:?}", v.re));
            record.push(format!("{:?}", v.im));
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
