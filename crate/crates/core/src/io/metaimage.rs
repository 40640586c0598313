//! MetaImage (`.mha` / `.mhd` + `.raw`) subset.
//!
//! Supported: `ObjectType = Image`, `NDims` 2 or 3, `DimSize`,
//! `ElementSpacing` (default 1), `ElementType` one of `MET_UCHAR`,
//! `MET_SHORT`, `MET_USHORT`, `MET_FLOAT`, uncompressed little-endian data,
//! single channel, and `ElementDataFile` either `LOCAL` or a file name
//! relative to the header. Orientation keys are accepted and dropped. Any
//! other key or value is rejected.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::image::{ElementType, ScalarImage, VoxelData};

/// Geometry keys that do not affect voxel values.
const IGNORED_KEYS: &[&str] = &[
    "Offset",
    "Origin",
    "Position",
    "TransformMatrix",
    "Rotation",
    "Orientation",
    "CenterOfRotation",
    "AnatomicalOrientation",
    "Comment",
];

fn met_name(t: ElementType) -> &'static str {
    match t {
        ElementType::Uint8 => "MET_UCHAR",
        ElementType::Int16 => "MET_SHORT",
        ElementType::Uint16 => "MET_USHORT",
        ElementType::Float32 => "MET_FLOAT",
    }
}

fn parse_met_type(v: &str) -> Result<ElementType> {
    Ok(match v {
        "MET_UCHAR" => ElementType::Uint8,
        "MET_SHORT" => ElementType::Int16,
        "MET_USHORT" => ElementType::Uint16,
        "MET_FLOAT" => ElementType::Float32,
        _ => return Err(Error::unsupported("ElementType", v)),
    })
}

fn expect_bool(key: &str, value: &str, want: bool) -> Result<()> {
    let got = match value.to_ascii_lowercase().as_str() {
        "true" | "1" => true,
        "false" | "0" => false,
        _ => return Err(Error::unsupported(key, value)),
    };
    if got != want {
        return Err(Error::unsupported(key, value));
    }
    Ok(())
}

#[derive(Default)]
struct Header {
    ndims: Option<usize>,
    dims: Option<Vec<usize>>,
    spacing: Option<Vec<f64>>,
    element_type: Option<ElementType>,
    data_file: Option<String>,
}

fn header_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Header {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

fn parse_list<T: std::str::FromStr>(path: &Path, key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split_whitespace()
        .map(|s| {
            s.parse()
                .map_err(|_| header_err(path, format!("{key}: cannot parse `{s}`")))
        })
        .collect()
}

/// Parses header lines up to and including `ElementDataFile`. Returns the
/// header and the byte offset just past that line.
fn parse_header(path: &Path, bytes: &[u8]) -> Result<(Header, usize)> {
    let mut h = Header::default();
    let mut pos = 0;
    while pos < bytes.len() {
        let end = bytes[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .map_or(bytes.len(), |i| pos + i);
        let line = std::str::from_utf8(&bytes[pos..end])
            .map_err(|_| header_err(path, "header is not valid text"))?
            .trim();
        pos = (end + 1).min(bytes.len());
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| header_err(path, format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "ObjectType" if value == "Image" => {}
            "NDims" => {
                let n: usize = value
                    .parse()
                    .map_err(|_| header_err(path, format!("NDims: `{value}`")))?;
                if n != 2 && n != 3 {
                    return Err(Error::unsupported(key, value));
                }
                h.ndims = Some(n);
            }
            "DimSize" => h.dims = Some(parse_list(path, key, value)?),
            "ElementSpacing" | "ElementSize" if key == "ElementSpacing" => {
                h.spacing = Some(parse_list(path, key, value)?)
            }
            "ElementType" => h.element_type = Some(parse_met_type(value)?),
            "CompressedData" => expect_bool(key, value, false)?,
            "BinaryData" => expect_bool(key, value, true)?,
            "BinaryDataByteOrderMSB" | "ElementByteOrderMSB" => expect_bool(key, value, false)?,
            "ElementNumberOfChannels" if value == "1" => {}
            "HeaderSize" if value == "0" => {}
            "ElementDataFile" => {
                if value.is_empty() || value.starts_with("LIST") || value.contains('%') {
                    return Err(Error::unsupported(key, value));
                }
                h.data_file = Some(value.to_string());
                return Ok((h, pos));
            }
            k if IGNORED_KEYS.contains(&k) => {}
            _ => return Err(Error::unsupported(key, value)),
        }
    }
    Err(header_err(path, "missing ElementDataFile"))
}

pub fn read_metaimage(path: impl AsRef<Path>) -> Result<ScalarImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (h, offset) = parse_header(path, &bytes)?;

    let ndims = h.ndims.ok_or_else(|| header_err(path, "missing NDims"))?;
    let dims = h.dims.ok_or_else(|| header_err(path, "missing DimSize"))?;
    if dims.len() != ndims {
        return Err(header_err(path, format!("DimSize has {} entries, NDims is {ndims}", dims.len())));
    }
    let spacing = h.spacing.unwrap_or_else(|| vec![1.0; ndims]);
    if spacing.len() != ndims {
        return Err(header_err(path, "ElementSpacing length differs from NDims"));
    }
    let etype = h
        .element_type
        .ok_or_else(|| header_err(path, "missing ElementType"))?;
    let data_file = h.data_file.expect("parse_header returns only after ElementDataFile");

    let owned;
    let payload: &[u8] = if data_file == "LOCAL" {
        &bytes[offset..]
    } else {
        let raw_path = path.parent().unwrap_or(Path::new("")).join(&data_file);
        owned = fs::read(&raw_path).map_err(|e| Error::io(&raw_path, e))?;
        &owned
    };

    let n: usize = dims.iter().product();
    let expected = n * etype.size_bytes();
    if payload.len() != expected {
        return Err(Error::SizeMismatch {
            expected,
            found: payload.len(),
        });
    }
    let data = decode_le(etype, payload);
    ScalarImage::with_spacing(&dims, &spacing, data)
}

fn decode_le(etype: ElementType, p: &[u8]) -> VoxelData {
    match etype {
        ElementType::Uint8 => VoxelData::Uint8(p.to_vec()),
        ElementType::Int16 => VoxelData::Int16(
            p.chunks_exact(2)
                .map(|c| i16::from_le_bytes([c[0], c[1]]))
                .collect(),
        ),
        ElementType::Uint16 => VoxelData::Uint16(
            p.chunks_exact(2)
                .map(|c| u16::from_le_bytes([c[0], c[1]]))
                .collect(),
        ),
        ElementType::Float32 => VoxelData::Float32(
            p.chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect(),
        ),
    }
}

fn encode_le(data: &VoxelData) -> Vec<u8> {
    match data {
        VoxelData::Uint8(v) => v.clone(),
        VoxelData::Int16(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
        VoxelData::Uint16(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
        VoxelData::Float32(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn header_text(image: &ScalarImage, data_file: &str) -> String {
    format!(
        "ObjectType = Image\n\
         NDims = {}\n\
         BinaryData = True\n\
         BinaryDataByteOrderMSB = False\n\
         CompressedData = False\n\
         ElementSpacing = {}\n\
         DimSize = {}\n\
         ElementType = {}\n\
         ElementDataFile = {}\n",
        image.dims().len(),
        join(image.spacing()),
        join(image.dims()),
        met_name(image.element_type()),
        data_file,
    )
}

/// Writes `.mha` with inline data, or `.mhd` with a sibling `.raw`.
pub fn write_metaimage(image: &ScalarImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let payload = encode_le(image.data());
    match ext.as_deref() {
        Some("mha") => {
            let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
            f.write_all(header_text(image, "LOCAL").as_bytes())
                .and_then(|_| f.write_all(&payload))
                .map_err(|e| Error::io(path, e))
        }
        Some("mhd") => {
            let raw_path: PathBuf = path.with_extension("raw");
            let raw_name = raw_path
                .file_name()
                .and_then(|n| n.to_str())
                .ok_or_else(|| header_err(path, "data file name is not valid UTF-8"))?
                .to_string();
            fs::write(&raw_path, &payload).map_err(|e| Error::io(&raw_path, e))?;
            fs::write(path, header_text(image, &raw_name)).map_err(|e| Error::io(path, e))
        }
        _ => Err(Error::unsupported(
            "extension",
            path.display().to_string(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_bytes(dir: &Path, name: &str, bytes: &[u8]) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, bytes).unwrap();
        p
    }

    #[test]
    fn minimal_uchar_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = b"ObjectType = Image\nNDims = 2\nDimSize = 2 2\nElementType = MET_UCHAR\nElementDataFile = LOCAL\n".to_vec();
        bytes.extend([0u8, 1, 2, 3]);
        let p = write_bytes(dir.path(), "a.mha", &bytes);
        let img = read_metaimage(&p).unwrap();
        assert_eq!(img.dims(), &[2, 2]);
        assert_eq!(img.spacing(), &[1.0, 1.0]);
        assert_eq!(img.data(), &VoxelData::Uint8(vec![0, 1, 2, 3]));
    }

    #[test]
    fn compressed_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let bytes = b"ObjectType = Image\nNDims = 2\nCompressedData = True\nDimSize = 1 1\nElementType = MET_UCHAR\nElementDataFile = LOCAL\n\0";
        let p = write_bytes(dir.path(), "c.mha", bytes);
        let err = read_metaimage(&p).unwrap_err();
        assert!(matches!(err, Error::UnsupportedFormat { ref key, .. } if key == "CompressedData"));
    }

    #[test]
    fn unsupported_values_name_the_key() {
        let dir = tempfile::tempdir().unwrap();
        for (line, key) in [
            ("ElementType = MET_DOUBLE", "ElementType"),
            ("BinaryDataByteOrderMSB = True", "BinaryDataByteOrderMSB"),
            ("ElementNumberOfChannels = 3", "ElementNumberOfChannels"),
            ("NDims = 4", "NDims"),
            ("Modality = MET_MOD_CT", "Modality"),
        ] {
            let text = format!("ObjectType = Image\n{line}\nElementDataFile = LOCAL\n");
            let p = write_bytes(dir.path(), "u.mha", text.as_bytes());
            match read_metaimage(&p) {
                Err(Error::UnsupportedFormat { key: k, .. }) => assert_eq!(k, key),
                other => panic!("{line}: {other:?}"),
            }
        }
    }

    #[test]
    fn truncated_payload() {
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = b"NDims = 2\nDimSize = 2 2\nElementType = MET_SHORT\nElementDataFile = LOCAL\n".to_vec();
        bytes.extend([0u8; 7]);
        let p = write_bytes(dir.path(), "t.mha", &bytes);
        assert!(matches!(
            read_metaimage(&p),
            Err(Error::SizeMismatch { expected: 8, found: 7 })
        ));
    }

    #[test]
    fn anisotropic_spacing_survives_mhd() {
        let dir = tempfile::tempdir().unwrap();
        let img = ScalarImage::with_spacing(
            &[2, 2, 2],
            &[1.0, 1.0, 3.0],
            VoxelData::Int16(vec![-1000, 0, 1, 2, 3, 4, 5, 3000]),
        )
        .unwrap();
        let p = dir.path().join("v.mhd");
        write_metaimage(&img, &p).unwrap();
        assert!(dir.path().join("v.raw").exists());
        let back = read_metaimage(&p).unwrap();
        assert_eq!(back, img);
        assert_eq!(back.spacing(), &[1.0, 1.0, 3.0]);
    }

    #[test]
    fn odd_spacing_roundtrips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let sp = [0.1 + 0.2, 1.0 / 3.0];
        let img = ScalarImage::with_spacing(&[1, 2], &sp, VoxelData::Uint16(vec![1, 65535])).unwrap();
        let p = dir.path().join("s.mha");
        write_metaimage(&img, &p).unwrap();
        assert_eq!(read_metaimage(&p).unwrap().spacing(), &sp);
    }

    #[test]
    fn unknown_extension_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let img = ScalarImage::new(&[1, 1], VoxelData::Uint8(vec![0])).unwrap();
        assert!(write_metaimage(&img, dir.path().join("x.nii")).is_err());
    }

    #[test]
    fn missing_raw_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let text = "NDims = 2\nDimSize = 1 1\nElementType = MET_UCHAR\nElementDataFile = gone.raw\n";
        let p = write_bytes(dir.path(), "m.mhd", text.as_bytes());
        assert!(matches!(read_metaimage(&p), Err(Error::Io { .. })));
    }
}
