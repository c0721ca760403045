//! Decoding, alpha resolution, reference resizing and color conversions.

use std::borrow::Cow;

use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::plane::bilinear_taps;

/// Opaque 8-bit sRGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PixelImage {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl PixelImage {
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension);
        }
        if pixels.len() != width as usize * height as usize {
            return Err(Error::Decode(format!(
                "pixel buffer holds {} entries, expected {}x{}",
                pixels.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, pixels })
    }

    /// Builds an image from a per-pixel generator called with `(x, y)`.
    ///
    /// Panics if either dimension is zero.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self { width, height, pixels }
    }

    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        Self::from_fn(width, height, |_, _| rgb)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// 180 degree rotation.
    pub fn rotated_180(&self) -> Self {
        let mut pixels = self.pixels.clone();
        pixels.reverse();
        Self { pixels, ..*self }
    }
}

/// 8-bit luma raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: u32,
    pub height: u32,
    pub values: Vec<u8>,
}

impl GrayImage {
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let values = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self { width, height, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| f64::from(v)).collect()
    }
}

/// CIELAB planes (D65).
#[derive(Debug, Clone, PartialEq)]
pub struct LabImage {
    pub width: u32,
    pub height: u32,
    pub l: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

fn round_half_up(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Source-over compositing of one channel onto an opaque background, rounded
/// half-up in exact integer arithmetic.
fn blend(channel: u8, alpha: u8, background: u8) -> u8 {
    let a = u32::from(alpha);
    let num = u32::from(channel) * a + u32::from(background) * (255 - a);
    ((2 * num + 255) / 510) as u8
}

/// Decodes PNG or JPEG bytes into an opaque image.
pub fn decode_image(bytes: &[u8], config: &AnalysisConfig) -> Result<PixelImage> {
    let decoded = image::load_from_memory(bytes).map_err(|e| Error::Decode(e.to_string()))?;
    if decoded.width() == 0 || decoded.height() == 0 {
        return Err(Error::ZeroDimension);
    }
    let rgba = decoded.to_rgba8();
    let (width, height) = rgba.dimensions();
    let bg = config.background_fill;
    let pixels = rgba
        .pixels()
        .map(|p| {
            let [r, g, b, a] = p.0;
            [blend(r, a, bg[0]), blend(g, a, bg[1]), blend(b, a, bg[2])]
        })
        .collect();
    PixelImage::new(width, height, pixels)
}

/// Height after scaling `width x height` to `target_width`, rounded half-up
/// and at least 1.
pub fn scaled_height(width: u32, height: u32, target_width: u32) -> u32 {
    let num = u64::from(height) * u64::from(target_width);
    let w = u64::from(width);
    (((2 * num + w) / (2 * w)) as u32).max(1)
}

/// Bilinear resample to `config.reference_width`, preserving aspect ratio.
pub fn resize_to_reference<'a>(img: &'a PixelImage, config: &AnalysisConfig) -> Cow<'a, PixelImage> {
    let target = config.reference_width;
    if img.width == target {
        return Cow::Borrowed(img);
    }
    let new_height = scaled_height(img.width, img.height, target);
    let (w, nw, nh) = (img.width as usize, target as usize, new_height as usize);
    let xs = bilinear_taps(w, nw);
    let ys = bilinear_taps(img.height as usize, nh);
    let mut pixels = Vec::with_capacity(nw * nh);
    for ty in &ys {
        let top = &img.pixels[ty.lo * w..(ty.lo + 1) * w];
        let bottom = &img.pixels[ty.hi * w..(ty.hi + 1) * w];
        for tx in &xs {
            let mut out = [0u8; 3];
            for (c, slot) in out.iter_mut().enumerate() {
                let lerp = |row: &[[u8; 3]]| {
                    let a = f64::from(row[tx.lo][c]);
                    a + (f64::from(row[tx.hi][c]) - a) * tx.frac
                };
                let t = lerp(top);
                *slot = round_half_up(t + (lerp(bottom) - t) * ty.frac);
            }
            pixels.push(out);
        }
    }
    Cow::Owned(PixelImage {
        width: target,
        height: new_height,
        pixels,
    })
}

/// Rec.601 luma, rounded half-up.
pub fn luma([r, g, b]: [u8; 3]) -> u8 {
    let weighted = 299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b);
    ((weighted + 500) / 1000) as u8
}

pub fn to_grayscale(img: &PixelImage) -> GrayImage {
    GrayImage {
        width: img.width,
        height: img.height,
        values: img.pixels.iter().map(|&p| luma(p)).collect(),
    }
}

fn srgb_to_linear(c: u8) -> f64 {
    let v = f64::from(c) / 255.0;
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

// sRGB primaries, D65.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// Converts one sRGB triple to `[L, a, b]`.
pub fn srgb_to_lab(rgb: [u8; 3]) -> [f64; 3] {
    let lin = rgb.map(srgb_to_linear);
    let [x, y, z] = RGB_TO_XYZ.map(|row| row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2]);
    // White point taken as the image of RGB (1,1,1) so white maps to a = b = 0.
    let [xn, yn, zn] = RGB_TO_XYZ.map(|row| row.iter().sum::<f64>());
    let (fx, fy, fz) = (lab_f(x / xn), lab_f(y / yn), lab_f(z / zn));
    let l = (116.0 * fy - 16.0).clamp(0.0, 100.0);
    [l, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

pub fn to_lab(img: &PixelImage) -> LabImage {
    let n = img.len();
    let (mut l, mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for &p in &img.pixels {
        let [pl, pa, pb] = srgb_to_lab(p);
        l.push(pl);
        a.push(pa);
        b.push(pb);
    }
    LabImage {
        width: img.width,
        height: img.height,
        l,
        a,
        b,
    }
}
