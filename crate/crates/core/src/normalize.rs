//! Mapping raw modality intensities into `[0, 1]`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{unit_clamp, ScalarImage};
use crate::num::Real;
use crate::transform::DOMAIN_TOLERANCE;

/// CT window in Hounsfield units.
pub const CT_WINDOW: (f64, f64) = (-1000.0, 3000.0);
/// MR window as percentiles of the volume's own intensities.
pub const MR_PERCENTILES: (f64, f64) = (5.0, 95.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormalizationPolicy {
    /// `lo`/`hi` in intensity units.
    FixedWindow { lo: f64, hi: f64 },
    /// `lo`/`hi` are percentiles in `[0, 100]`.
    PercentileWindow { lo: f64, hi: f64 },
}

impl NormalizationPolicy {
    pub fn ct() -> Self {
        NormalizationPolicy::FixedWindow {
            lo: CT_WINDOW.0,
            hi: CT_WINDOW.1,
        }
    }

    pub fn mr() -> Self {
        NormalizationPolicy::PercentileWindow {
            lo: MR_PERCENTILES.0,
            hi: MR_PERCENTILES.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NormalizationPolicy::FixedWindow { lo, hi } => check_window(lo, hi),
            NormalizationPolicy::PercentileWindow { lo, hi } => check_percentiles(lo, hi),
        }
    }

    pub fn apply(&self, image: &ScalarImage) -> Result<ScalarImage> {
        match *self {
            NormalizationPolicy::FixedWindow { lo, hi } => normalize_fixed_window(image, lo, hi),
            NormalizationPolicy::PercentileWindow { lo, hi } => {
                normalize_percentile(image, lo, hi)
            }
        }
    }
}

fn check_window(lo: f64, hi: f64) -> Result<()> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Config(format!("window [{lo}, {hi}] must satisfy lo < hi")));
    }
    Ok(())
}

fn check_percentiles(lo: f64, hi: f64) -> Result<()> {
    if !(0.0 <= lo && lo < hi && hi <= 100.0) {
        return Err(Error::Config(format!(
            "percentiles ({lo}, {hi}) must satisfy 0 <= lo < hi <= 100"
        )));
    }
    Ok(())
}

/// `clamp((v - lo) / (hi - lo), 0, 1)` per voxel, as float32.
pub fn normalize_fixed_window(image: &ScalarImage, lo: f64, hi: f64) -> Result<ScalarImage> {
    check_window(lo, hi)?;
    let width = hi - lo;
    Ok(image.map_to_f32(|v| ((v - lo) / width).clamp(0.0, 1.0) as f32))
}

/// Linear-interpolation quantile of `values` at percentile `p`.
///
/// With `v` sorted ascending and `h = p/100 · (n-1)`, returns
/// `v[⌊h⌋] + (h - ⌊h⌋) · (v[⌊h⌋+1] - v[⌊h⌋])`. Reorders `values` in place.
pub fn quantile_in_place<T: Real>(values: &mut [T], p: T) -> Result<T> {
    let n = values.len();
    if n == 0 {
        return Err(Error::Domain("quantile of an empty set".into()));
    }
    if !(p >= T::zero() && p <= T::of(100.0)) {
        return Err(Error::Domain(format!("percentile {p} outside [0, 100]")));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("quantile input contains NaN".into()));
    }
    let cmp = |a: &T, b: &T| a.partial_cmp(b).unwrap_or(Ordering::Equal);
    let h = p / T::of(100.0) * T::of((n - 1) as f64);
    let k = h.floor().to_usize().unwrap_or(0).min(n - 1);
    let (_, &mut at_k, upper) = values.select_nth_unstable_by(k, cmp);
    let frac = h - T::of(k as f64);
    if upper.is_empty() || frac == T::zero() {
        return Ok(at_k);
    }
    let next = upper.iter().copied().fold(T::infinity(), T::min);
    Ok(at_k + frac * (next - at_k))
}

/// Quantile over every voxel of the volume.
pub fn quantile(image: &ScalarImage, p: f64) -> Result<f64> {
    quantile_in_place(&mut image.to_f64_vec(), p)
}

pub fn normalize_percentile(image: &ScalarImage, p_lo: f64, p_hi: f64) -> Result<ScalarImage> {
    check_percentiles(p_lo, p_hi)?;
    let mut values = image.to_f64_vec();
    let lo = quantile_in_place(&mut values, p_lo)?;
    let hi = quantile_in_place(&mut values, p_hi)?;
    if !(lo < hi) {
        return Err(Error::DegenerateImage(format!(
            "percentiles {p_lo} and {p_hi} both equal {lo}"
        )));
    }
    normalize_fixed_window(image, lo, hi)
}

/// `v -> 1 - v` on a normalized image.
pub fn invert(image: &ScalarImage) -> Result<ScalarImage> {
    image.try_map_to_f32(|v| {
        unit_clamp(v, DOMAIN_TOLERANCE)?;
        Ok(1.0 - v as f32)
    })
}
