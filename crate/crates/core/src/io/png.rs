//! Single-channel 8/16-bit PNG.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{ScalarImage, VoxelData};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn max_value(self) -> u32 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }

    pub fn from_bits(bits: u8) -> Result<Self> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            _ => Err(Error::Config(format!("PNG bit depth must be 8 or 16, got {bits}"))),
        }
    }
}

fn png_err(e: impl std::fmt::Display) -> Error {
    Error::Png(e.to_string())
}

/// Reads an 8-bit (`Uint8`) or 16-bit (`Uint16`) grayscale PNG.
pub fn read_png_gray(path: impl AsRef<Path>) -> Result<ScalarImage> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(png_err)?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale {
        return Err(Error::unsupported("color_type", format!("{:?}", info.color_type)));
    }
    if info.interlaced {
        return Err(Error::unsupported("interlace", "Adam7"));
    }
    let depth = info.bit_depth;
    if !matches!(depth, png::BitDepth::Eight | png::BitDepth::Sixteen) {
        return Err(Error::unsupported("bit_depth", depth as u8));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let mut buf = vec![0u8; reader.output_buffer_size().ok_or_else(|| png_err("image too large"))?];
    let frame = reader.next_frame(&mut buf).map_err(png_err)?;
    let bytes = &buf[..frame.buffer_size()];
    let data = match depth {
        png::BitDepth::Eight => VoxelData::Uint8(bytes.to_vec()),
        _ => VoxelData::Uint16(
            bytes
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]))
                .collect(),
        ),
    };
    ScalarImage::new(&[w, h], data)
}

/// Quantizes a float voxel: `round(clamp(v, 0, 1) · (2^depth - 1))`, ties
/// away from zero.
pub fn quantize(v: f64, depth: BitDepth) -> u32 {
    (v.clamp(0.0, 1.0) * depth.max_value() as f64).round() as u32
}

fn pixel_values(image: &ScalarImage, depth: BitDepth) -> Result<Vec<u32>> {
    let max = depth.max_value();
    match image.data() {
        VoxelData::Float32(v) => v
            .iter()
            .map(|&x| {
                if x.is_nan() {
                    Err(Error::Domain("cannot quantize NaN".into()))
                } else {
                    Ok(quantize(x as f64, depth))
                }
            })
            .collect(),
        data => data
            .iter_f64()
            .map(|x| {
                if x < 0.0 || x > max as f64 {
                    Err(Error::Domain(format!(
                        "value {x} does not fit a {max}-max PNG channel"
                    )))
                } else {
                    Ok(x as u32)
                }
            })
            .collect(),
    }
}

/// Writes a 2D image as grayscale PNG. Integer images are stored verbatim
/// (and must fit the depth); float images are quantized with [`quantize`].
pub fn write_png_gray(image: &ScalarImage, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
    let path = path.as_ref();
    let &[w, h] = image.dims() else {
        return Err(Error::Domain(format!(
            "PNG needs a 2D image, got dims {:?}",
            image.dims()
        )));
    };
    let values = pixel_values(image, depth)?;
    let bytes: Vec<u8> = match depth {
        BitDepth::Eight => values.iter().map(|&v| v as u8).collect(),
        BitDepth::Sixteen => values.iter().flat_map(|&v| (v as u16).to_be_bytes()).collect(),
    };
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut enc = png::Encoder::new(BufWriter::new(file), w as u32, h as u32);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(match depth {
        BitDepth::Eight => png::BitDepth::Eight,
        BitDepth::Sixteen => png::BitDepth::Sixteen,
    });
    let mut writer = enc.write_header().map_err(png_err)?;
    writer.write_image_data(&bytes).map_err(png_err)?;
    writer.finish().map_err(png_err)
}
