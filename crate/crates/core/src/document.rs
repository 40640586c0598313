//! JSON transform documents.
//!
//! ```json
//! {
//!   "frequencies": [0.93, ...],
//!   "amplitudes": [-0.41, ...],
//!   "phases": [2.7, ...],
//!   "spec": { "n_sines": 4, "f_min": 0.2, "f_max": 1.6, "seed": 7 }
//! }
//! ```
//!
//! Numbers are written in shortest round-trip form, so a document reproduces
//! its transform bit for bit. `spec` and `pipeline` are optional metadata.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::pipeline::PipelineRecord;
use crate::transform::{SampledTransform, TransformSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformDocument {
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<TransformSpec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineRecord>,
}

/// A parsed document: the transform plus any sampling-rule warnings.
#[derive(Debug, Clone)]
pub struct Decoded<T> {
    pub transform: SampledTransform<T>,
    pub warnings: Vec<String>,
    pub document: TransformDocument,
}

impl<T> Decoded<T> {
    pub fn has_warnings(&self) -> bool {
        !self.warnings.is_empty()
    }
}

impl TransformDocument {
    pub fn from_transform<T: Real>(t: &SampledTransform<T>) -> Self {
        let t = t.to_f64();
        TransformDocument {
            frequencies: t.frequencies().to_vec(),
            amplitudes: t.amplitudes().to_vec(),
            phases: t.phases().to_vec(),
            spec: None,
            pipeline: None,
        }
    }

    pub fn with_spec<T: Real>(mut self, spec: &TransformSpec<T>) -> Self {
        self.spec = Some(TransformSpec {
            n_sines: spec.n_sines,
            f_min: spec.f_min.as_f64(),
            f_max: spec.f_max.as_f64(),
            seed: spec.seed,
        });
        self
    }

    pub fn with_pipeline(mut self, record: PipelineRecord) -> Self {
        self.pipeline = Some(record);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    /// Parses and structurally validates a document.
    pub fn parse(text: &str) -> Result<Self> {
        let root: Value =
            serde_json::from_str(text).map_err(|e| Error::parse("document", e.to_string()))?;
        let obj = root
            .as_object()
            .ok_or_else(|| Error::parse("document", "expected a JSON object"))?;
        for key in obj.keys() {
            if !matches!(
                key.as_str(),
                "frequencies" | "amplitudes" | "phases" | "spec" | "pipeline"
            ) {
                return Err(Error::parse(key.as_str(), "unknown key"));
            }
        }
        let doc = TransformDocument {
            frequencies: number_array(obj, "frequencies")?,
            amplitudes: number_array(obj, "amplitudes")?,
            phases: number_array(obj, "phases")?,
            spec: optional_block(obj, "spec")?,
            pipeline: optional_block(obj, "pipeline")?,
        };
        if let Some(spec) = &doc.spec {
            spec.validate()
                .map_err(|e| Error::parse("spec", e.to_string()))?;
            if spec.n_sines != doc.frequencies.len() {
                return Err(Error::parse(
                    "spec",
                    format!(
                        "n_sines = {} but {} frequencies are given",
                        spec.n_sines,
                        doc.frequencies.len()
                    ),
                ));
            }
        }
        doc.transform::<f64>()?;
        Ok(doc)
    }

    pub fn transform<T: Real>(&self) -> Result<SampledTransform<T>> {
        let conv = |v: &[f64]| v.iter().map(|&x| T::of(x)).collect::<Vec<_>>();
        SampledTransform::new(
            conv(&self.frequencies),
            conv(&self.amplitudes),
            conv(&self.phases),
        )
    }
}

fn number_array(obj: &Map<String, Value>, key: &str) -> Result<Vec<f64>> {
    let arr = obj
        .get(key)
        .ok_or_else(|| Error::parse(key, "missing"))?
        .as_array()
        .ok_or_else(|| Error::parse(key, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .ok_or_else(|| Error::parse(key, format!("entry {i} is not a number")))
        })
        .collect()
}

fn optional_block<B: for<'de> Deserialize<'de>>(
    obj: &Map<String, Value>,
    key: &str,
) -> Result<Option<B>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| Error::parse(key, e.to_string())),
    }
}

pub fn serialize<T: Real>(t: &SampledTransform<T>) -> String {
    TransformDocument::from_transform(t).to_json()
}

pub fn deserialize<T: Real>(text: &str) -> Result<Decoded<T>> {
    let document = TransformDocument::parse(text)?;
    let transform = document.transform::<T>()?;
    let warnings = transform.sampling_rule_violations();
    Ok(Decoded {
        transform,
        warnings,
        document,
    })
}
