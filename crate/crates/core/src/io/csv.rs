use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// `x,y` header followed by one row per point. Numbers use shortest
/// round-trip formatting.
pub fn format_curve_csv(xs: &[f64], ys: &[f64]) -> Result<String> {
    if xs.len() != ys.len() {
        return Err(Error::Domain(format!(
            "curve has {} x values and {} y values",
            xs.len(),
            ys.len()
        )));
    }
    let mut out = String::with_capacity(16 + xs.len() * 40);
    out.push_str("x,y\n");
    for (x, y) in xs.iter().zip(ys) {
        writeln!(out, "{x},{y}").expect("writing to a String cannot fail");
    }
    Ok(out)
}

pub fn write_curve_csv(xs: &[f64], ys: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = format_curve_csv(xs, ys)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
