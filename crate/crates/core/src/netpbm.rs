//! Binary graymap (P5) reading and writing, 8-bit only.
//!
//! Pixels are mapped to `[0, 1]` on read and quantized back to `0..=255`
//! on write.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::haar::Image;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(parse_err("truncated PGM header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token()?;
    if magic != "P5" {
        return Err(parse_err(format!("expected P5 graymap, found {magic:?}")));
    }
    let mut number = |what: &str| -> Result<usize> {
        token()?
            .parse()
            .map_err(|_| parse_err(format!("bad PGM {what}")))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval = number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(parse_err(format!("unsupported maxval {maxval} (8-bit only)")));
    }
    // exactly one whitespace byte separates the header from the raster
    let data = bytes
        .get(pos + 1..)
        .ok_or_else(|| parse_err("missing raster"))?;
    let n = width * height;
    if data.len() < n {
        return Err(parse_err(format!("raster has {} bytes, expected {n}", data.len())));
    }
    let maxval = maxval as f64;
    Image::new(height, width, data[..n].iter().map(|&b| b as f64 / maxval).collect())
}

pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(
        img.pixels()
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Image> {
    decode_pgm(&fs::read(path)?)
}

pub fn write_pgm(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    fs::write(path, encode_pgm(img))?;
    Ok(())
}
