//! Random smooth gray value transformations for cross-modality augmentation.
//!
//! Images are first normalized to `[0, 1]` (fixed Hounsfield window for CT,
//! 5th/95th percentile window for MR), then remapped through a random sum of
//! sines rescaled back onto `[0, 1]`. The transform math is generic over
//! [`Real`] (`f32` or `f64`); the aliases below name the common choices.
//!
//! ```
//! use rsgt::{Lut, ScalarImage, SampledTransform, TransformSpec};
//!
//! let spec = TransformSpec::<f64>::with_seed(7);
//! let t = SampledTransform::sample(&spec).unwrap();
//! let lut = Lut::build(&t, 4096).unwrap();
//! let img = ScalarImage::from_f32(&[2, 2], vec![0.0, 0.25, 0.5, 1.0]).unwrap();
//! let out = lut.apply(&img).unwrap();
//! assert!(out.as_f32().unwrap().iter().all(|v| (0.0..=1.0).contains(v)));
//! ```

pub mod document;
pub mod error;
pub mod image;
pub mod io;
pub mod lut;
pub mod metrics;
pub mod normalize;
pub mod num;
pub mod pipeline;
pub mod transform;

pub use document::{deserialize, serialize, Decoded, TransformDocument};
pub use error::{Error, Result};
pub use image::{ElementType, ScalarImage, VoxelData};
pub use lut::{Lut, DEFAULT_LUT_SIZE};
pub use metrics::{dice, histogram, shannon_entropy, BinaryMask};
pub use normalize::{
    invert, normalize_fixed_window, normalize_percentile, quantile, NormalizationPolicy,
};
pub use num::Real;
pub use pipeline::{augment_image, Augmented, InvertMode, Modality, PipelineConfig};
pub use transform::{SampledTransform, TransformSpec};

pub type Transform = SampledTransform<f64>;
pub type TransformF32 = SampledTransform<f32>;
pub type Spec = TransformSpec<f64>;
pub type SpecF32 = TransformSpec<f32>;
pub type Lut64 = Lut<f64>;
pub type Lut32 = Lut<f32>;
