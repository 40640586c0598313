//! Reproducible augmentation pipeline: normalize, maybe invert, transform.
//!
//! Every output is a pure function of the input image, the configuration
//! and `(seed, draw_index)`. Each draw gets its own ChaCha8 stream seeded
//! with [`derive_seed`]; the first value of that stream decides inversion and
//! each following `u64` seeds one transform attempt. Draws never share state,
//! so batches can run in any order or in parallel.

use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::document::TransformDocument;
use crate::error::{Error, Result};
use crate::image::ScalarImage;
use crate::lut::{Lut, DEFAULT_LUT_SIZE};
use crate::normalize::{invert, NormalizationPolicy};
use crate::transform::{SampledTransform, TransformSpec};

/// Degenerate draws are retried this many times before giving up.
pub const MAX_RESAMPLES: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Ct,
    Mr,
}

impl Modality {
    pub fn default_window(self) -> NormalizationPolicy {
        match self {
            Modality::Ct => NormalizationPolicy::ct(),
            Modality::Mr => NormalizationPolicy::mr(),
        }
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ct" => Ok(Modality::Ct),
            "mr" | "mri" => Ok(Modality::Mr),
            _ => Err(Error::Config(format!("unknown modality `{s}` (expected ct or mr)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum InvertMode {
    /// Invert when the draw's first uniform variate is below `probability`.
    Bernoulli { probability: f64 },
    /// Invert odd draw indices.
    EveryOther,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub modality: Modality,
    pub window: NormalizationPolicy,
    /// `seed` here is the master seed of the batch.
    pub transform_spec: TransformSpec<f64>,
    pub invert: InvertMode,
    pub count: usize,
    pub lut_size: usize,
    /// Debug switch: replace the random transform with the identity table.
    pub identity_transform: bool,
}

impl PipelineConfig {
    pub fn new(modality: Modality, seed: u64) -> Self {
        PipelineConfig {
            modality,
            window: modality.default_window(),
            transform_spec: TransformSpec::with_seed(seed),
            invert: InvertMode::Bernoulli { probability: 0.0 },
            count: 1,
            lut_size: DEFAULT_LUT_SIZE,
            identity_transform: false,
        }
    }

    pub fn seed(&self) -> u64 {
        self.transform_spec.seed
    }

    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        self.transform_spec.validate()?;
        if let InvertMode::Bernoulli { probability } = self.invert {
            if !(0.0..=1.0).contains(&probability) {
                return Err(Error::Config(format!(
                    "invert probability {probability} outside [0, 1]"
                )));
            }
        }
        if self.count == 0 {
            return Err(Error::Config("count must be at least 1".into()));
        }
        if self.lut_size < 2 {
            return Err(Error::Config("LUT size must be at least 2".into()));
        }
        Ok(())
    }
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed of one draw: `splitmix64(seed ^ splitmix64(draw_index))`.
pub fn derive_seed(seed: u64, draw_index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(draw_index))
}

/// Everything needed to recreate one augmented output from its raw input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRecord {
    pub modality: Modality,
    pub window: NormalizationPolicy,
    pub inverted: bool,
    pub lut_size: usize,
    pub seed: u64,
    pub draw_index: u64,
    pub resamples: u32,
}

#[derive(Debug, Clone)]
pub struct Augmented {
    pub image: ScalarImage,
    /// `None` when the identity debug table was used.
    pub transform: Option<SampledTransform<f64>>,
    pub transform_spec: Option<TransformSpec<f64>>,
    pub record: PipelineRecord,
}

impl Augmented {
    /// Sidecar document for this output (absent for identity runs).
    pub fn document(&self) -> Option<TransformDocument> {
        let t = self.transform.as_ref()?;
        let mut doc = TransformDocument::from_transform(t).with_pipeline(self.record.clone());
        if let Some(spec) = &self.transform_spec {
            doc = doc.with_spec(spec);
        }
        Some(doc)
    }
}

fn prepare(image: &ScalarImage, window: &NormalizationPolicy, inverted: bool) -> Result<ScalarImage> {
    let normalized = window.apply(image)?;
    if inverted {
        invert(&normalized)
    } else {
        Ok(normalized)
    }
}

/// Normalizes `image`, optionally inverts it, draws a transform for
/// `draw_index`, and applies it through a LUT.
pub fn augment_image(image: &ScalarImage, cfg: &PipelineConfig, draw_index: u64) -> Result<Augmented> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed(), draw_index));
    let u: f64 = rng.gen();
    let inverted = match cfg.invert {
        InvertMode::Bernoulli { probability } => u < probability,
        InvertMode::EveryOther => draw_index % 2 == 1,
    };
    let prepared = prepare(image, &cfg.window, inverted)?;

    let mut record = PipelineRecord {
        modality: cfg.modality,
        window: cfg.window,
        inverted,
        lut_size: cfg.lut_size,
        seed: cfg.seed(),
        draw_index,
        resamples: 0,
    };

    if cfg.identity_transform {
        let lut = Lut::<f64>::identity(cfg.lut_size)?;
        return Ok(Augmented {
            image: lut.apply_parallel(&prepared)?,
            transform: None,
            transform_spec: None,
            record,
        });
    }

    let (t, spec, lut) = draw_transform(
        || cfg.transform_spec.reseeded(rng.next_u64()),
        |spec| SampledTransform::sample(spec),
        cfg.lut_size,
        &mut record.resamples,
    )?;
    Ok(Augmented {
        image: lut.apply_parallel(&prepared)?,
        transform: Some(t),
        transform_spec: Some(spec),
        record,
    })
}

/// Draws until a non-degenerate transform comes up, counting retries.
fn draw_transform(
    mut next_spec: impl FnMut() -> TransformSpec<f64>,
    sample: impl Fn(&TransformSpec<f64>) -> Result<SampledTransform<f64>>,
    lut_size: usize,
    resamples: &mut u32,
) -> Result<(SampledTransform<f64>, TransformSpec<f64>, Lut<f64>)> {
    loop {
        let spec = next_spec();
        let t = sample(&spec)?;
        match Lut::build(&t, lut_size) {
            Ok(lut) => return Ok((t, spec, lut)),
            Err(e @ Error::DegenerateTransform { .. }) => {
                if *resamples >= MAX_RESAMPLES {
                    return Err(e);
                }
                *resamples += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Applies a transform document to `image`.
///
/// With a `pipeline` block the raw input is normalized (and inverted) as
/// recorded first, reproducing the original augmented output bit for bit.
/// Without one the input must already lie in `[0, 1]`, and `lut_size`
/// selects the table size.
pub fn apply_document(image: &ScalarImage, doc: &TransformDocument, lut_size: usize) -> Result<ScalarImage> {
    let t = doc.transform::<f64>()?;
    match &doc.pipeline {
        Some(rec) => {
            let prepared = prepare(image, &rec.window, rec.inverted)?;
            Lut::build(&t, rec.lut_size)?.apply_parallel(&prepared)
        }
        None => Lut::build(&t, lut_size)?.apply_parallel(image),
    }
}
