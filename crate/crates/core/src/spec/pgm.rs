use std::path::Path;

use thiserror::Error;

/// A grayscale raster with samples normalized to `[0, 1]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayscaleGrid {
    pub width: u32,
    pub height: u32,
    pub maxval: u32,
    pub pixels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgmError {
    #[error("cannot read file: {0}")]
    Io(String),
    #[error("{0}")]
    Format(String),
}

/// Reads an ASCII (`P2`) PGM file.
pub fn load_pgm(path: &Path) -> Result<GrayscaleGrid, PgmError> {
    let text = std::fs::read_to_string(path).map_err(|e| PgmError::Io(e.to_string()))?;
    parse_pgm(&text)
}

/// Parses ASCII PGM text. `#` comments run to end of line.
pub fn parse_pgm(text: &str) -> Result<GrayscaleGrid, PgmError> {
    let bad = |msg: String| PgmError::Format(msg);
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);

    match tokens.next() {
        Some("P2") => {}
        Some(m) => return Err(bad(format!("magic number {m:?} is not \"P2\""))),
        None => return Err(bad("empty file".into())),
    }
    let mut header = |what: &str| -> Result<u32, PgmError> {
        let tok = tokens.next().ok_or_else(|| bad(format!("missing {what}")))?;
        tok.parse::<u32>().map_err(|_| bad(format!("{what} {tok:?} is not a number")))
    };
    let width = header("width")?;
    let height = header("height")?;
    let maxval = header("maxval")?;
    if width == 0 || height == 0 {
        return Err(bad(format!("dimensions {width}x{height} must be positive")));
    }
    if !(1..=65535).contains(&maxval) {
        return Err(bad(format!("maxval {maxval} outside 1..=65535")));
    }

    let expected = width as usize * height as usize;
    let mut pixels = Vec::with_capacity(expected);
    for tok in tokens {
        let v: u32 = tok.parse().map_err(|_| bad(format!("pixel {tok:?} is not a number")))?;
        if v > maxval {
            return Err(bad(format!("pixel {v} exceeds maxval {maxval}")));
        }
        pixels.push(f64::from(v) / f64::from(maxval));
    }
    if pixels.len() != expected {
        return Err(bad(format!(
            "expected {expected} pixels for {width}x{height}, found {}",
            pixels.len()
        )));
    }
    Ok(GrayscaleGrid { width, height, maxval, pixels })
}
