//! 2D/3D scalar grids.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementType {
    Uint8,
    Int16,
    Uint16,
    Float32,
}

impl ElementType {
    pub fn size_bytes(self) -> usize {
        match self {
            ElementType::Uint8 => 1,
            ElementType::Int16 | ElementType::Uint16 => 2,
            ElementType::Float32 => 4,
        }
    }

    pub fn is_float(self) -> bool {
        self == ElementType::Float32
    }
}

/// Voxel storage, x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub enum VoxelData {
    Uint8(Vec<u8>),
    Int16(Vec<i16>),
    Uint16(Vec<u16>),
    Float32(Vec<f32>),
}

impl VoxelData {
    pub fn len(&self) -> usize {
        match self {
            VoxelData::Uint8(v) => v.len(),
            VoxelData::Int16(v) => v.len(),
            VoxelData::Uint16(v) => v.len(),
            VoxelData::Float32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn element_type(&self) -> ElementType {
        match self {
            VoxelData::Uint8(_) => ElementType::Uint8,
            VoxelData::Int16(_) => ElementType::Int16,
            VoxelData::Uint16(_) => ElementType::Uint16,
            VoxelData::Float32(_) => ElementType::Float32,
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        match self {
            VoxelData::Uint8(v) => v[i] as f64,
            VoxelData::Int16(v) => v[i] as f64,
            VoxelData::Uint16(v) => v[i] as f64,
            VoxelData::Float32(v) => v[i] as f64,
        }
    }

    pub fn iter_f64(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        match self {
            VoxelData::Uint8(v) => Box::new(v.iter().map(|&x| x as f64)),
            VoxelData::Int16(v) => Box::new(v.iter().map(|&x| x as f64)),
            VoxelData::Uint16(v) => Box::new(v.iter().map(|&x| x as f64)),
            VoxelData::Float32(v) => Box::new(v.iter().map(|&x| x as f64)),
        }
    }
}

/// A 2D or 3D scalar image with per-axis element spacing (mm).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarImage {
    dims: Vec<usize>,
    spacing: Vec<f64>,
    data: VoxelData,
}

impl ScalarImage {
    /// Unit spacing.
    pub fn new(dims: &[usize], data: VoxelData) -> Result<Self> {
        Self::with_spacing(dims, &vec![1.0; dims.len()], data)
    }

    pub fn with_spacing(dims: &[usize], spacing: &[f64], data: VoxelData) -> Result<Self> {
        if !(dims.len() == 2 || dims.len() == 3) {
            return Err(Error::Domain(format!(
                "images must be 2D or 3D, got {} dimensions",
                dims.len()
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Domain(format!("empty dimension in {dims:?}")));
        }
        if spacing.len() != dims.len() {
            return Err(Error::Domain(format!(
                "spacing has {} entries for {} dimensions",
                spacing.len(),
                dims.len()
            )));
        }
        if spacing.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::Domain(format!("non-positive spacing {spacing:?}")));
        }
        let n: usize = dims.iter().product();
        if data.len() != n {
            return Err(Error::Domain(format!(
                "{} voxels for dims {dims:?} (expected {n})",
                data.len()
            )));
        }
        Ok(ScalarImage {
            dims: dims.to_vec(),
            spacing: spacing.to_vec(),
            data,
        })
    }

    pub fn from_f32(dims: &[usize], data: Vec<f32>) -> Result<Self> {
        Self::new(dims, VoxelData::Float32(data))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn element_type(&self) -> ElementType {
        self.data.element_type()
    }

    pub fn data(&self) -> &VoxelData {
        &self.data
    }

    pub fn into_data(self) -> VoxelData {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        self.data.get(i)
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.data.iter_f64().collect()
    }

    /// Borrow the voxels if the image is already float32.
    pub fn as_f32(&self) -> Option<&[f32]> {
        match &self.data {
            VoxelData::Float32(v) => Some(v),
            _ => None,
        }
    }

    /// Same geometry, new float32 voxels.
    pub fn with_f32_data(&self, data: Vec<f32>) -> Result<Self> {
        Self::with_spacing(&self.dims, &self.spacing, VoxelData::Float32(data))
    }

    /// Per-voxel map into a float32 image of the same geometry.
    pub fn map_to_f32(&self, f: impl Fn(f64) -> f32) -> ScalarImage {
        let data = self.data.iter_f64().map(f).collect();
        ScalarImage {
            dims: self.dims.clone(),
            spacing: self.spacing.clone(),
            data: VoxelData::Float32(data),
        }
    }

    /// Fallible variant of [`ScalarImage::map_to_f32`]; stops at the first error.
    pub fn try_map_to_f32(&self, f: impl Fn(f64) -> Result<f32>) -> Result<ScalarImage> {
        let data = self.data.iter_f64().map(f).collect::<Result<Vec<_>>>()?;
        Ok(ScalarImage {
            dims: self.dims.clone(),
            spacing: self.spacing.clone(),
            data: VoxelData::Float32(data),
        })
    }
}

/// Accepts `v` within `tol` of `[0, 1]` and clamps it; rejects anything else,
/// including NaN.
#[inline]
pub(crate) fn unit_clamp(v: f64, tol: f64) -> Result<f64> {
    if v >= -tol && v <= 1.0 + tol {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(Error::Domain(format!(
            "voxel value {v} outside [0, 1]; normalize the image first"
        )))
    }
}
