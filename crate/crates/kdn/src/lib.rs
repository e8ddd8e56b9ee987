//! Benchmark harness, file formats and parallel driver for the `kdn-core`
//! denoising library.

pub mod bench;
mod error;
pub mod io;
pub mod par;

pub use error::{KdnError, Result};
pub use kdn_core;
