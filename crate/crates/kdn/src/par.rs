//! Multi-threaded driver over [`Denoiser::denoise_range`].
//!
//! Pixels are split into fixed-size blocks, so the output does not depend on
//! the number of workers.

use kdn_core::estimators::RangeStats;
use kdn_core::{DenoiseResult, Denoiser, ImageGrid, MethodConfig, Oracle};
use rayon::prelude::*;

use crate::{KdnError, Result};

const BLOCK: usize = 1024;

/// Denoises `y` on the current rayon pool.
pub fn denoise_par(y: &ImageGrid, cfg: &MethodConfig, oracle: Oracle<'_>) -> Result<DenoiseResult> {
    let den = Denoiser::new(y, *cfg, oracle)?;
    Ok(run_par(&den))
}

pub fn run_par(den: &Denoiser<'_>) -> DenoiseResult {
    let mut out = vec![0.0; den.input().len()];
    let stats = out
        .par_chunks_mut(BLOCK)
        .enumerate()
        .map_init(
            || den.workspace(),
            |ws, (b, chunk)| den.denoise_range(b * BLOCK, chunk, ws),
        )
        .reduce(RangeStats::default, RangeStats::merge);
    den.finish(out, stats)
}

/// Runs `f` on a pool with `threads` workers, or on the global pool when
/// `threads` is `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(0) => Err(KdnError::invalid("--threads must be at least 1")),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| KdnError::invalid(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}
