//! Instance builders for the two experiment families and the ISNR metric.

mod heron;
mod inpainting;

pub use heron::{build_heron, HeronInstance, HERON_BALL_RADIUS, ORACLE_MAX_CONDITION};
pub use inpainting::{build_inpainting, inpainting_oracle, InpaintingInstance, OracleSolution};

use crate::error::{contract, Result};
use crate::haar::Image;

/// Improvement in signal-to-noise ratio in dB,
/// `10 log₁₀(‖x - b‖² / ‖x - x_k‖²)`.
///
/// Returns `+∞` when `current` equals `clean`, and 0 when `noisy` equals
/// `clean`.
pub fn isnr(clean: &Image, noisy: &Image, current: &Image) -> Result<f64> {
    if !clean.same_shape(noisy) || !clean.same_shape(current) {
        return Err(contract("ISNR images must have equal dimensions"));
    }
    Ok(isnr_raw(clean.pixels(), noisy.pixels(), current.pixels()))
}

pub(crate) fn isnr_raw(clean: &[f64], noisy: &[f64], current: &[f64]) -> f64 {
    let sq = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum() };
    let num = sq(clean, noisy);
    let den = sq(clean, current);
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (num / den).log10()
    }
}
