//! Random smooth gray value transformations.
//!
//! A transform is a sum of sines
//!
//! ```text
//! y(x) = Σ_i A_i · sin(f_i · (2π·x + φ_i))
//! ```
//!
//! whose frequencies, amplitudes and phase offsets are drawn at random. Low
//! frequencies get proportionally larger amplitudes (`|A_i| ≤ 1/f_i`), which
//! keeps the curve calm while still being non-linear and non-monotone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{unit_clamp, ScalarImage};
use crate::lut::{self, DEFAULT_LUT_SIZE};
use crate::num::Real;

pub const DEFAULT_N_SINES: usize = 4;
pub const DEFAULT_F_MIN: f64 = 0.2;
pub const DEFAULT_F_MAX: f64 = 1.6;

/// Voxels further than this outside `[0, 1]` are rejected rather than clamped.
pub const DOMAIN_TOLERANCE: f64 = 1e-9;

/// Hyperparameters of the transform family plus the seed of one draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec<T> {
    pub n_sines: usize,
    pub f_min: T,
    pub f_max: T,
    pub seed: u64,
}

impl<T: Real> TransformSpec<T> {
    pub fn new(n_sines: usize, f_min: T, f_max: T, seed: u64) -> Result<Self> {
        let spec = TransformSpec {
            n_sines,
            f_min,
            f_max,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Four sines with frequencies in `[0.2, 1.6]`.
    pub fn with_seed(seed: u64) -> Self {
        TransformSpec {
            n_sines: DEFAULT_N_SINES,
            f_min: T::of(DEFAULT_F_MIN),
            f_max: T::of(DEFAULT_F_MAX),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sines == 0 {
            return Err(Error::Config("n_sines must be at least 1".into()));
        }
        if !(self.f_min > T::zero()) || !self.f_min.is_finite() {
            return Err(Error::Config(format!("f_min must be positive, got {}", self.f_min)));
        }
        if !(self.f_min <= self.f_max) || !self.f_max.is_finite() {
            return Err(Error::Config(format!(
                "f_min ({}) must not exceed f_max ({})",
                self.f_min, self.f_max
            )));
        }
        Ok(())
    }

    pub fn reseeded(self, seed: u64) -> Self {
        TransformSpec { seed, ..self }
    }
}

/// One concrete draw of the transform family.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTransform<T> {
    frequencies: Vec<T>,
    amplitudes: Vec<T>,
    phases: Vec<T>,
}

impl<T: Real> SampledTransform<T> {
    /// Builds a transform from explicit parameters.
    ///
    /// Only structural properties are enforced here (equal, non-zero lengths
    /// and finite values). Use [`SampledTransform::sampling_rule_violations`]
    /// to check the bounds that [`SampledTransform::sample`] guarantees.
    pub fn new(frequencies: Vec<T>, amplitudes: Vec<T>, phases: Vec<T>) -> Result<Self> {
        let n = frequencies.len();
        if n == 0 {
            return Err(Error::parse("frequencies", "at least one sine is required"));
        }
        if amplitudes.len() != n {
            return Err(Error::parse(
                "amplitudes",
                format!("length {} differs from frequencies length {n}", amplitudes.len()),
            ));
        }
        if phases.len() != n {
            return Err(Error::parse(
                "phases",
                format!("length {} differs from frequencies length {n}", phases.len()),
            ));
        }
        for (name, values) in [
            ("frequencies", &frequencies),
            ("amplitudes", &amplitudes),
            ("phases", &phases),
        ] {
            if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::parse(name, format!("entry {i} is not finite")));
            }
        }
        Ok(SampledTransform {
            frequencies,
            amplitudes,
            phases,
        })
    }

    /// Draws a transform from `spec`.
    ///
    /// The generator is ChaCha8 seeded with `spec.seed`. For each sine in
    /// turn it draws the frequency from `[f_min, f_max]`, then the amplitude
    /// from `[-1/f_i, 1/f_i]`, then the phase from `[0, 2π]`, all uniform on
    /// closed intervals.
    pub fn sample(spec: &TransformSpec<T>) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let n = spec.n_sines;
        let mut frequencies = Vec::with_capacity(n);
        let mut amplitudes = Vec::with_capacity(n);
        let mut phases = Vec::with_capacity(n);
        for _ in 0..n {
            let f = rng.gen_range(spec.f_min..=spec.f_max);
            let a_max = f.recip();
            let a = rng.gen_range(-a_max..=a_max);
            let phi = rng.gen_range(T::zero()..=T::TAU());
            frequencies.push(f);
            amplitudes.push(a);
            phases.push(phi);
        }
        Ok(SampledTransform {
            frequencies,
            amplitudes,
            phases,
        })
    }

    pub fn n_sines(&self) -> usize {
        self.frequencies.len()
    }

    pub fn frequencies(&self) -> &[T] {
        &self.frequencies
    }

    pub fn amplitudes(&self) -> &[T] {
        &self.amplitudes
    }

    pub fn phases(&self) -> &[T] {
        &self.phases
    }

    /// `(A_i, f_i, φ_i)` per sine.
    pub fn terms(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        self.amplitudes
            .iter()
            .zip(&self.frequencies)
            .zip(&self.phases)
            .map(|((&a, &f), &p)| (a, f, p))
    }

    /// Raw sum of sines at `x`, without any rescaling.
    #[inline]
    pub fn evaluate(&self, x: T) -> T {
        let two_pi_x = T::TAU() * x;
        self.terms()
            .fold(T::zero(), |acc, (a, f, phi)| acc + a * (f * (two_pi_x + phi)).sin())
    }

    /// `2π · Σ |A_i| · |f_i|`, an upper bound on `|dy/dx|`.
    pub fn lipschitz_bound(&self) -> T {
        let s = self
            .terms()
            .fold(T::zero(), |acc, (a, f, _)| acc + a.abs() * f.abs());
        T::TAU() * s
    }

    /// Human-readable notes for every parameter outside the bounds that
    /// sampling guarantees. Empty for anything produced by [`Self::sample`].
    pub fn sampling_rule_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, (a, f, phi)) in self.terms().enumerate() {
            if !(f > T::zero()) {
                out.push(format!("frequencies[{i}] = {f} is not positive"));
            } else if a.abs() > f.recip() {
                out.push(format!("amplitudes[{i}] = {a} exceeds 1/f = {}", f.recip()));
            }
            if phi < T::zero() || phi > T::TAU() {
                out.push(format!("phases[{i}] = {phi} outside [0, 2π]"));
            }
        }
        out
    }

    /// Exact per-voxel evaluation followed by the same range rescale as
    /// [`lut::Lut::build`] at the default table size. Output is float32.
    pub fn apply_direct(&self, image: &ScalarImage) -> Result<ScalarImage> {
        let raw = lut::tabulate(self, DEFAULT_LUT_SIZE);
        let (lo, span) = lut::raw_bounds(&raw)?;
        image.try_map_to_f32(|v| {
            let x = T::of(unit_clamp(v, DOMAIN_TOLERANCE)?);
            let y = ((self.evaluate(x) - lo) / span).max(T::zero()).min(T::one());
            Ok(y.as_f64() as f32)
        })
    }

    /// Lossless widening, used for serialization.
    pub fn to_f64(&self) -> SampledTransform<f64> {
        let widen = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
        SampledTransform {
            frequencies: widen(&self.frequencies),
            amplitudes: widen(&self.amplitudes),
            phases: widen(&self.phases),
        }
    }

    /// Converts to another precision; narrowing rounds to nearest.
    pub fn cast<U: Real>(&self) -> SampledTransform<U> {
        let conv = |v: &[T]| v.iter().map(|x| U::of(x.as_f64())).collect::<Vec<_>>();
        SampledTransform {
            frequencies: conv(&self.frequencies),
            amplitudes: conv(&self.amplitudes),
            phases: conv(&self.phases),
        }
    }
}
