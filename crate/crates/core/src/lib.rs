//! Kernel denoising estimators on d-dimensional regular lattices.
//!
//! Every estimator in this crate is a local polynomial regression (LPR) whose
//! 0/1 weights come from one of six schemes: a plain spatial box window (LF),
//! a pixel-intensity gate (YF), a Euclidean patch gate (NLM), a patch-mean
//! gate (NLM-average), and two oracles that see the true foreground mask
//! (membership oracle, bandwidth oracle).
//!
//! The crate is `no_std` and only needs `alloc`. IO, parallel drivers and the
//! experiment harness live in the `kdn` crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

mod error;

pub mod estimators;
pub mod grid;
pub mod kernels;
pub mod lpr;
pub mod metrics;
pub mod noise;
pub mod scenes;

pub use error::{Error, Result};
pub use estimators::{
    default_bandwidths, denoise, DenoiseResult, Denoiser, Family, MethodConfig, Oracle,
};
pub use grid::{lattice_point, ImageGrid, MAX_DIM};
pub use kernels::{PatchSpec, PhotometricSpec, WindowSpec};
pub use lpr::{clip01, lpr_fit, LprConfig, MonomialBasis};
pub use metrics::{bias_variance, mse, ErrorReport};
pub use noise::{add_noise, NoiseSpec};
pub use scenes::{ClassTag, JnrSpec, Scene};
