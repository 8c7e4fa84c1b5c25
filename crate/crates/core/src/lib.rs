//! Compressed shattering.
//!
//! A frequency-sparse real signal is permuted, split by a bank of ideal
//! band-pass filters into signals that each carry at most one frequency, and
//! each of those is sensed with a fixed `2×N` matrix. Decoding reads every
//! frequency's position and coefficient straight from its two measurements.
//!
//! ```
//! use shattering::{decode, encode, generate_sparse, ShatterConfig};
//!
//! let x = generate_sparse(16, 3, 0)?;
//! // 16 samples, 4 filters, σ = 3, drop measurements with norm below 0.01
//! let config = ShatterConfig::new(16, 4, 3, 0.01)?;
//! match encode(&x, &config) {
//!     Ok(set) => assert!(decode(&set)?.max_abs_diff(&x) < 1e-12),
//!     Err(e) => assert_eq!(e.name(), "ShatterCollision"),
//! }
//! # Ok::<(), shattering::Error>(())
//! ```
//!
//! The guide under `book/` walks through each stage; its code listings are
//! compiled as doc-tests of this crate.

pub mod baseline;
pub mod bench;
pub mod error;
pub mod filterbank;
pub mod io;
pub mod matrixform;
pub mod permute;
pub mod recon;
pub mod shatter;
pub mod sigcore;

pub use error::{Error, Result};
pub use filterbank::{apply_filter, build_bank, FilterBank};
pub use permute::{inverse_permute, mod_inverse, permute, permute_spectrum, PermParam};
pub use recon::{atom_to_spectrum, decode, recover_atom, RecoveredAtom};
pub use shatter::{
    check_shatter_validity, encode, find_sigma, sense_one, shatter, Measurement, MeasurementSet, SensingMatrix,
    ShatterConfig, DEFAULT_THRESHOLD,
};
pub use sigcore::{dft, generate_sparse, idft, Signal, SparsitySpec, Spectrum};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/signals.md")]
    mod signals {}
    #[doc = include_str!("../../../book/src/permutation.md")]
    mod permutation {}
    #[doc = include_str!("../../../book/src/filter-bank.md")]
    mod filter_bank {}
    #[doc = include_str!("../../../book/src/sensing.md")]
    mod sensing {}
    #[doc = include_str!("../../../book/src/reconstruction.md")]
    mod reconstruction {}
    #[doc = include_str!("../../../book/src/matrix-form.md")]
    mod matrix_form {}
    #[doc = include_str!("../../../book/src/baseline.md")]
    mod baseline {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
