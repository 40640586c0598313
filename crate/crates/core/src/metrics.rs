//! Overlap and information diagnostics.

use crate::error::{Error, Result};
use crate::image::ScalarImage;
use crate::transform::DOMAIN_TOLERANCE;

pub const DEFAULT_BINS: usize = 256;

/// Foreground flags on an image grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    dims: Vec<usize>,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(dims: &[usize], data: Vec<bool>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if dims.is_empty() || data.len() != n {
            return Err(Error::Domain(format!(
                "mask has {} entries for dims {dims:?}",
                data.len()
            )));
        }
        Ok(BinaryMask {
            dims: dims.to_vec(),
            data,
        })
    }

    /// Voxels with value > 0 are foreground.
    pub fn from_image(image: &ScalarImage) -> Self {
        BinaryMask {
            dims: image.dims().to_vec(),
            data: image.data().iter_f64().map(|v| v > 0.0).collect(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// `2|A∩B| / (|A|+|B|)`; two empty masks score 1.
pub fn dice(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::Domain(format!(
            "mask dims differ: {:?} vs {:?}",
            a.dims, b.dims
        )));
    }
    let (mut inter, mut total) = (0usize, 0usize);
    for (&x, &y) in a.data.iter().zip(&b.data) {
        inter += (x & y) as usize;
        total += x as usize + y as usize;
    }
    if total == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * inter as f64 / total as f64)
}

/// Uniform bins over `[0, 1]`; 1.0 lands in the last bin.
pub fn histogram(image: &ScalarImage, bins: usize) -> Result<Vec<u64>> {
    histogram_values(image.data().iter_f64(), bins)
}

pub fn histogram_values(values: impl IntoIterator<Item = f64>, bins: usize) -> Result<Vec<u64>> {
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let mut counts = vec![0u64; bins];
    for v in values {
        if !(v >= -DOMAIN_TOLERANCE && v <= 1.0 + DOMAIN_TOLERANCE) {
            return Err(Error::Domain(format!("histogram value {v} outside [0, 1]")));
        }
        let b = ((v.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(counts)
}

/// `-Σ p log2 p` over the nonzero bins, in bits.
pub fn shannon_entropy(counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Domain("entropy of an empty histogram".into()));
    }
    let total = total as f64;
    let h = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum::<f64>();
    Ok(h.max(0.0))
}
