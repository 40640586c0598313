//! Image and curve file formats.

mod csv;
mod metaimage;
mod png;

use std::path::Path;

pub use self::csv::{format_curve_csv, write_curve_csv};
pub use self::metaimage::{read_metaimage, write_metaimage};
pub use self::png::{quantize, read_png_gray, write_png_gray, BitDepth};

use crate::error::{Error, Result};
use crate::image::ScalarImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    MetaImage,
    Png,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("mha" | "mhd") => Ok(ImageFormat::MetaImage),
            Some("png") => Ok(ImageFormat::Png),
            _ => Err(Error::unsupported("extension", path.display())),
        }
    }
}

/// Reads by extension: `.mha`/`.mhd` or `.png`.
pub fn read_image(path: impl AsRef<Path>) -> Result<ScalarImage> {
    let path = path.as_ref();
    match ImageFormat::from_path(path)? {
        ImageFormat::MetaImage => read_metaimage(path),
        ImageFormat::Png => read_png_gray(path),
    }
}

/// Writes by extension. PNG output is 16-bit.
pub fn write_image(image: &ScalarImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    match ImageFormat::from_path(path)? {
        ImageFormat::MetaImage => write_metaimage(image, path),
        ImageFormat::Png => write_png_gray(image, path, BitDepth::Sixteen),
    }
}
