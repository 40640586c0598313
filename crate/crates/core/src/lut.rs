//! Tabulated transforms for fast per-voxel application.
//!
//! A [`Lut`] stores the transform on the uniform grid `x_k = k/(S-1)`,
//! affinely rescaled so the table spans exactly `[0, 1]`. The rescale
//! depends only on the transform, so equal gray values map to equal outputs
//! in every image.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{unit_clamp, ScalarImage, VoxelData};
use crate::num::Real;
use crate::transform::{SampledTransform, DOMAIN_TOLERANCE};

pub const DEFAULT_LUT_SIZE: usize = 4096;

/// Transforms whose raw range on the grid is below this are rejected.
pub const DEGENERATE_RANGE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Lut<T> {
    samples: Vec<T>,
}

/// Raw transform values on the `size`-point grid over `[0, 1]`.
pub(crate) fn tabulate<T: Real>(t: &SampledTransform<T>, size: usize) -> Vec<T> {
    let last = T::of((size - 1) as f64);
    (0..size)
        .map(|k| t.evaluate(T::of(k as f64) / last))
        .collect()
}

/// `(min, max - min)` of the raw table, or a degenerate-transform error.
pub(crate) fn raw_bounds<T: Real>(raw: &[T]) -> Result<(T, T)> {
    let (lo, hi) = raw
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    if !(span.as_f64() >= DEGENERATE_RANGE) {
        return Err(Error::DegenerateTransform {
            range: span.as_f64(),
            threshold: DEGENERATE_RANGE,
        });
    }
    Ok((lo, span))
}

impl<T: Real> Lut<T> {
    pub fn build(t: &SampledTransform<T>, size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::Config(format!("LUT size must be at least 2, got {size}")));
        }
        let raw = tabulate(t, size);
        let (lo, span) = raw_bounds(&raw)?;
        let samples = raw.into_iter().map(|v| (v - lo) / span).collect();
        Ok(Lut { samples })
    }

    /// `samples_k = k/(S-1)`; maps every value to itself (up to rounding).
    pub fn identity(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::Config(format!("LUT size must be at least 2, got {size}")));
        }
        let last = T::of((size - 1) as f64);
        Ok(Lut {
            samples: (0..size).map(|k| T::of(k as f64) / last).collect(),
        })
    }

    /// Wraps precomputed samples. They must span exactly `[0, 1]`.
    pub fn from_samples(samples: Vec<T>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Config("LUT needs at least 2 samples".into()));
        }
        if samples.iter().any(|&v| !(v >= T::zero() && v <= T::one())) {
            return Err(Error::Domain("LUT samples must lie in [0, 1]".into()));
        }
        let lo = samples.iter().fold(T::one(), |a, &b| a.min(b));
        let hi = samples.iter().fold(T::zero(), |a, &b| a.max(b));
        if lo != T::zero() || hi != T::one() {
            return Err(Error::Domain(format!("LUT spans [{lo}, {hi}], not [0, 1]")));
        }
        Ok(Lut { samples })
    }

    pub fn size(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn grid(&self) -> impl Iterator<Item = T> + '_ {
        let last = T::of((self.size() - 1) as f64);
        (0..self.size()).map(move |k| T::of(k as f64) / last)
    }

    /// Linear interpolation at `v ∈ [0, 1]`; the result is clamped to `[0, 1]`.
    #[inline]
    pub fn lookup(&self, v: T) -> T {
        let last = self.samples.len() - 1;
        let pos = v * T::of(last as f64);
        let i = pos.floor().to_usize().unwrap_or(0).min(last - 1);
        let frac = pos - T::of(i as f64);
        let a = self.samples[i];
        let b = self.samples[i + 1];
        (a + frac * (b - a)).max(T::zero()).min(T::one())
    }

    #[inline]
    fn map_voxel(&self, v: f64) -> Result<f32> {
        let x = unit_clamp(v, DOMAIN_TOLERANCE)?;
        Ok(self.lookup(T::of(x)).as_f64() as f32)
    }

    /// Maps every voxel through the table. Output is float32 with the input's
    /// geometry; the input must already be normalized to `[0, 1]`.
    pub fn apply(&self, image: &ScalarImage) -> Result<ScalarImage> {
        match image.data() {
            VoxelData::Float32(v) => {
                let out = v
                    .iter()
                    .map(|&x| self.map_voxel(x as f64))
                    .collect::<Result<Vec<_>>>()?;
                image.with_f32_data(out)
            }
            _ => image.try_map_to_f32(|v| self.map_voxel(v)),
        }
    }

    /// As [`Lut::apply`], partitioned across the current rayon pool. Produces
    /// the same bits as the sequential path.
    pub fn apply_parallel(&self, image: &ScalarImage) -> Result<ScalarImage> {
        const CHUNK: usize = 1 << 14;
        let n = image.len();
        let mut out = vec![0f32; n];
        out.par_chunks_mut(CHUNK)
            .enumerate()
            .try_for_each(|(c, dst)| {
                let base = c * CHUNK;
                for (j, o) in dst.iter_mut().enumerate() {
                    *o = self.map_voxel(image.value(base + j))?;
                }
                Ok::<_, Error>(())
            })?;
        image.with_f32_data(out)
    }

    /// `(x, y)` columns for curve export.
    pub fn curve(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.grid().map(Real::as_f64).collect(),
            self.samples.iter().map(|v| v.as_f64()).collect(),
        )
    }
}
