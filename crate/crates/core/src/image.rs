//! Minimal grayscale raster with binary portable-graymap (P5) encoding.

use std::path::Path;

use crate::error::{Error, Result};

/// Row-major grayscale image with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::Validation(format!(
                "image {width}x{height} needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(Error::Validation("non-finite pixel".into()));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        GrayImage {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Pixel lookup with coordinates clamped to the border.
    #[inline]
    pub fn get_clamped(&self, row: isize, col: isize) -> f64 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.pixels[r * self.width + c]
    }

    /// Affine contrast normalization to the given mean and standard deviation,
    /// clamped to `[0, 1]`. Constant images only take the new mean.
    pub fn standardized(&self, mean: f64, std: f64) -> GrayImage {
        let n = self.pixels.len() as f64;
        let mu = self.pixels.iter().sum::<f64>() / n;
        let sd = (self.pixels.iter().map(|p| (p - mu).powi(2)).sum::<f64>() / n).sqrt();
        // rounding leaves constant images with a tiny nonzero sd
        let scale = if sd > 1e-12 { std / sd } else { 0.0 };
        let pixels = self
            .pixels
            .iter()
            .map(|p| (mean + (p - mu) * scale).clamp(0.0, 1.0))
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }

    /// 8-bit P5 encoding; intensities are clamped to `[0, 1]` and rounded.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(
            self.pixels
                .iter()
                .map(|p| (p.clamp(0.0, 1.0) * 255.0).round() as u8),
        );
        out
    }

    pub fn from_pgm(bytes: &[u8]) -> Result<Self> {
        let mut fields = Vec::with_capacity(4);
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(Error::Format("truncated PGM header".into()));
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).unwrap_or("").to_string());
        }
        if fields[0] != "P5" {
            return Err(Error::Format(format!("unsupported PGM magic {:?}", fields[0])));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Format(format!("bad PGM header field {s:?}")))
        };
        let (w, h, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
        if maxval == 0 || maxval > 255 {
            return Err(Error::Format(format!("unsupported PGM maxval {maxval}")));
        }
        // single whitespace byte separates header from raster
        let data = bytes.get(pos + 1..).unwrap_or(&[]);
        if data.len() < w * h {
            return Err(Error::Corruption("PGM raster truncated".into()));
        }
        let pixels = data[..w * h]
            .iter()
            .map(|&b| b as f64 / maxval as f64)
            .collect();
        GrayImage::new(w, h, pixels)
    }

    pub fn save_pgm(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_pgm()).map_err(|e| Error::io(path, e))
    }

    pub fn load_pgm(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_pgm(&bytes).map_err(|e| e.in_file(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_roundtrip_on_8bit_levels() {
        let pixels: Vec<f64> = (0..12).map(|i| (i * 20) as f64 / 255.0).collect();
        let img = GrayImage::new(4, 3, pixels).unwrap();
        let back = GrayImage::from_pgm(&img.to_pgm()).unwrap();
        assert_eq!(back.width(), 4);
        assert_eq!(back.height(), 3);
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn standardize_contrast() {
        let img = GrayImage::new(2, 2, vec![0.0, 0.2, 0.4, 0.6]).unwrap();
        let s = img.standardized(0.5, 0.1);
        let mean = s.pixels().iter().sum::<f64>() / 4.0;
        let sd = (s.pixels().iter().map(|p| (p - mean).powi(2)).sum::<f64>() / 4.0).sqrt();
        assert!((mean - 0.5).abs() < 1e-12 && (sd - 0.1).abs() < 1e-12);
        assert_eq!(GrayImage::filled(3, 3, 0.9).standardized(0.5, 0.1).pixels(), &[0.5; 9]);
    }

    #[test]
    fn pgm_header_with_comment() {
        let mut bytes = b"P5\n# made by hand\n2 1\n255\n".to_vec();
        bytes.extend([0u8, 255]);
        let img = GrayImage::from_pgm(&bytes).unwrap();
        assert_eq!(img.pixels(), &[0.0, 1.0]);
    }

    #[test]
    fn rejects_other_formats() {
        assert!(matches!(GrayImage::from_pgm(b"P2\n1 1\n255\n0"), Err(Error::Format(_))));
        assert!(matches!(GrayImage::from_pgm(b"P5\n2 2\n255\n\x00"), Err(Error::Corruption(_))));
    }
}
