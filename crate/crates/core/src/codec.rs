//! File formats: plain PBM bitmaps, JSON seed/cipher documents and CSV reports.

use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::BitString;
use crate::cipher::{CipherText, SeedSpec};
use crate::metrics::{BucketHistogram, MetricsReport};

/// The bundled 10×10 glyph used by the image demo.
pub const LETTER_A_PBM: &str = include_str!("../assets/letter_a.pbm");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("unsupported magic {0:?} (only plain PBM \"P1\" is read)")]
    UnsupportedMagic(String),
    #[error("malformed PBM: {0}")]
    Parse(String),
    #[error("expected {expected} pixels, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid JSON document: {0}")]
    Json(String),
}

/// A 1-bit image, row-major, `true` = black.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitImage {
    width: usize,
    height: usize,
    pixels: Vec<bool>,
}

impl BitImage {
    pub fn new(width: usize, height: usize, pixels: Vec<bool>) -> Result<Self, CodecError> {
        if width == 0 || height == 0 {
            return Err(CodecError::Parse(format!("dimensions {width}x{height} must be positive")));
        }
        if pixels.len() != width * height {
            return Err(CodecError::DimensionMismatch { expected: width * height, found: pixels.len() });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    /// Number of pixels that differ; images must share dimensions.
    pub fn mismatches(&self, other: &BitImage) -> usize {
        assert_eq!((self.width, self.height), (other.width, other.height), "dimension mismatch");
        self.pixels.iter().zip(&other.pixels).filter(|(a, b)| a != b).count()
    }
}

pub fn letter_a() -> BitImage {
    read_pbm(LETTER_A_PBM.as_bytes()).expect("bundled asset is valid")
}

pub fn read_pbm(bytes: &[u8]) -> Result<BitImage, CodecError> {
    let text = std::str::from_utf8(bytes).map_err(|_| CodecError::Parse("not ASCII".into()))?;
    let body: String = text.lines().map(|l| l.split('#').next().unwrap_or("")).collect::<Vec<_>>().join("\n");
    let mut rest = body.as_str();
    let mut header = Vec::with_capacity(3);
    while header.len() < 3 {
        rest = rest.trim_start();
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        if end == 0 {
            break;
        }
        header.push(&rest[..end]);
        rest = &rest[end..];
    }
    match header.first() {
        Some(&"P1") => {}
        Some(m) => return Err(CodecError::UnsupportedMagic(m.chars().take(2).collect())),
        None => return Err(CodecError::Parse("empty input".into())),
    }
    let dim = |i: usize, name: &str| -> Result<usize, CodecError> {
        header
            .get(i)
            .ok_or_else(|| CodecError::Parse(format!("missing {name}")))?
            .parse()
            .map_err(|_| CodecError::Parse(format!("bad {name}")))
    };
    let (width, height) = (dim(1, "width")?, dim(2, "height")?);
    let pixels = rest
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(CodecError::Parse(format!("unexpected pixel {other:?}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    BitImage::new(width, height, pixels)
}

/// Plain PBM: magic line, dimensions line, one space-separated row per line.
pub fn write_pbm(img: &BitImage) -> Vec<u8> {
    let mut out = format!("P1\n{} {}\n", img.width, img.height);
    for row in img.pixels.chunks(img.width) {
        let line: Vec<&str> = row.iter().map(|&p| if p { "1" } else { "0" }).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn image_to_bits(img: &BitImage) -> BitString {
    img.pixels.iter().copied().collect()
}

pub fn bits_to_image(bits: &BitString, width: usize, height: usize) -> Result<BitImage, CodecError> {
    BitImage::new(width, height, bits.as_slice().to_vec())
}

/// Renders ciphertext bits as an image of the given size, zero-padding or
/// truncating to fit.
pub fn preview_image(bits: &BitString, width: usize, height: usize) -> Result<BitImage, CodecError> {
    let mut pixels = bits.as_slice().to_vec();
    pixels.resize(width * height, false);
    BitImage::new(width, height, pixels)
}

pub fn seed_to_json(seed: &SeedSpec) -> String {
    serde_json::to_string_pretty(seed).expect("seed serialises")
}

pub fn seed_from_json(text: &str) -> Result<SeedSpec, CodecError> {
    serde_json::from_str(text).map_err(|e| CodecError::Json(e.to_string()))
}

pub fn cipher_to_json(ct: &CipherText) -> String {
    serde_json::to_string_pretty(ct).expect("ciphertext serialises")
}

pub fn cipher_from_json(text: &str) -> Result<CipherText, CodecError> {
    serde_json::from_str(text).map_err(|e| CodecError::Json(e.to_string()))
}

pub const HISTOGRAM_HEADER: &str = "bucket,count";
pub const SUMMARY_HEADER: &str = "total,collision_rate,chi_squared,p_value,avalanche";

pub fn histogram_csv(h: &BucketHistogram) -> String {
    let mut out = format!("{HISTOGRAM_HEADER}\n");
    for (bucket, count) in h.counts.iter().enumerate() {
        let _ = writeln!(out, "{bucket},{count}");
    }
    out
}

/// One summary row per report; the avalanche column is empty when unknown.
pub fn summary_csv<'a>(reports: impl IntoIterator<Item = &'a MetricsReport>) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in reports {
        let avalanche = r.avalanche_mean.map(|a| a.to_string()).unwrap_or_default();
        let _ =
            writeln!(out, "{},{},{},{},{}", r.histogram.total, r.collision_rate, r.chi_squared, r.p_value, avalanche);
    }
    out
}
