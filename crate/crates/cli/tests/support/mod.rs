//! Synthetic image generators shared by the integration and acceptance
//! suites.
#![allow(dead_code)]

use std::path::Path;

use ers_core::PixelImage;
use rand::Rng;

pub const PICTO_SIZE: u32 = 512;

// Pastel fills, all well above the outline ink in luma.
const FILLS: [[u8; 3]; 9] = [
    [255, 220, 150],
    [190, 225, 250],
    [250, 200, 195],
    [200, 235, 190],
    [255, 240, 170],
    [225, 205, 240],
    [255, 210, 175],
    [200, 230, 230],
    [225, 225, 225],
];

const INKS: [[u8; 3]; 3] = [[0, 0, 0], [25, 25, 35], [40, 30, 20]];

#[derive(Debug, Clone, Copy)]
enum Shape {
    Circle { r: f64 },
    Box { hw: f64, hh: f64, round: f64 },
    Diamond { r: f64 },
    Ellipse { rx: f64, ry: f64 },
}

impl Shape {
    /// Approximate signed distance (negative inside) from a point relative to
    /// the shape center.
    fn sdf(&self, x: f64, y: f64) -> f64 {
        match *self {
            Shape::Circle { r } => x.hypot(y) - r,
            Shape::Box { hw, hh, round } => {
                let qx = x.abs() - (hw - round);
                let qy = y.abs() - (hh - round);
                qx.max(0.0).hypot(qy.max(0.0)) + qx.max(qy).min(0.0) - round
            }
            Shape::Diamond { r } => (x.abs() + y.abs() - r) / std::f64::consts::SQRT_2,
            Shape::Ellipse { rx, ry } => {
                let k = (x / rx).hypot(y / ry);
                (k - 1.0) * rx.min(ry)
            }
        }
    }

    fn random(rng: &mut impl Rng, scale: f64) -> Self {
        match rng.gen_range(0..4) {
            0 => Shape::Circle { r: scale },
            1 => {
                let hw = scale * rng.gen_range(0.7..1.0);
                let hh = scale * rng.gen_range(0.7..1.0);
                Shape::Box {
                    hw,
                    hh,
                    round: rng.gen_range(0.0..0.4) * hw.min(hh),
                }
            }
            2 => Shape::Diamond { r: scale * 1.2 },
            _ => Shape::Ellipse {
                rx: scale * rng.gen_range(0.75..1.0),
                ry: scale * rng.gen_range(0.75..1.0),
            },
        }
    }
}

struct Layer {
    shape: Shape,
    cx: f64,
    cy: f64,
    fill: [u8; 3],
}

/// Flat-color pictogram: one centered outlined shape, optionally with up to
/// two outlined inner details, on white. At most six distinct colors.
pub fn pictogram(rng: &mut impl Rng) -> PixelImage {
    let size = f64::from(PICTO_SIZE);
    let outline = f64::from(rng.gen_range(4u32..=8));
    let ink = INKS[rng.gen_range(0..INKS.len())];
    let c = size / 2.0 + rng.gen_range(-6.0..6.0);
    let scale = rng.gen_range(110.0..170.0);
    let mut layers = vec![Layer {
        shape: Shape::random(rng, scale),
        cx: c,
        cy: c,
        fill: FILLS[rng.gen_range(0..FILLS.len())],
    }];
    for _ in 0..rng.gen_range(0..=2) {
        let inner = scale * rng.gen_range(0.18..0.3);
        layers.push(Layer {
            shape: Shape::random(rng, inner),
            cx: c + rng.gen_range(-0.35..0.35) * scale,
            cy: c + rng.gen_range(-0.35..0.35) * scale,
            fill: FILLS[rng.gen_range(0..FILLS.len())],
        });
    }
    PixelImage::from_fn(PICTO_SIZE, PICTO_SIZE, |x, y| {
        let (px, py) = (f64::from(x) + 0.5, f64::from(y) + 0.5);
        let mut color = [255, 255, 255];
        for layer in &layers {
            let d = layer.shape.sdf(px - layer.cx, py - layer.cy);
            if d <= 0.0 {
                color = if d > -outline { ink } else { layer.fill };
            }
        }
        color
    })
}

fn box_blur_plane(values: &mut [f64], w: usize, h: usize, radius: usize) {
    if radius == 0 {
        return;
    }
    let mut tmp = vec![0.0; values.len()];
    for y in 0..h {
        for x in 0..w {
            let lo = x.saturating_sub(radius);
            let hi = (x + radius).min(w - 1);
            tmp[y * w + x] = (lo..=hi).map(|i| values[y * w + i]).sum::<f64>() / (hi - lo + 1) as f64;
        }
    }
    for y in 0..h {
        for x in 0..w {
            let lo = y.saturating_sub(radius);
            let hi = (y + radius).min(h - 1);
            values[y * w + x] = (lo..=hi).map(|j| tmp[j * w + x]).sum::<f64>() / (hi - lo + 1) as f64;
        }
    }
}

fn filtered_noise(rng: &mut impl Rng, w: usize, h: usize, radius: usize) -> Vec<f64> {
    let mut plane: Vec<f64> = (0..w * h).map(|_| rng.gen_range(-1.0..1.0)).collect();
    box_blur_plane(&mut plane, w, h, radius);
    box_blur_plane(&mut plane, w, h, radius);
    let n = plane.len() as f64;
    let mean = plane.iter().sum::<f64>() / n;
    let std = (plane.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    plane.iter().map(|v| (v - mean) / std.max(1e-12)).collect()
}

/// Photo stand-in: shared luminance structure (coarse filtered noise plus a
/// fine texture) over mild per-channel color noise and a linear gradient.
pub fn photo_proxy(rng: &mut impl Rng, width: u32, height: u32) -> PixelImage {
    let (w, h) = (width as usize, height as usize);
    let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let (gx, gy) = (angle.cos(), angle.sin());
    let radius = rng.gen_range(6..20);
    let structure = filtered_noise(rng, w, h, radius);
    let grain = rng.gen_range(1..=2);
    let texture = filtered_noise(rng, w, h, grain);
    let structure_gain = rng.gen_range(30.0..50.0);
    let texture_gain = rng.gen_range(15.0..25.0);
    let luminance: Vec<f64> = (0..w * h)
        .map(|i| structure_gain * structure[i] + texture_gain * texture[i])
        .collect();
    let channels: Vec<Vec<f64>> = (0..3)
        .map(|_| {
            let radius = rng.gen_range(12..32);
            let tint = filtered_noise(rng, w, h, radius);
            let base: f64 = rng.gen_range(80.0..170.0);
            let slope: f64 = rng.gen_range(20.0..70.0);
            let tint_gain = rng.gen_range(6.0..14.0);
            (0..w * h)
                .map(|i| {
                    let x = (i % w) as f64 / w as f64 - 0.5;
                    let y = (i / w) as f64 / h as f64 - 0.5;
                    base + slope * (gx * x + gy * y) + tint_gain * tint[i] + luminance[i]
                })
                .collect()
        })
        .collect();
    PixelImage::from_fn(width, height, |x, y| {
        let i = y as usize * w + x as usize;
        [0, 1, 2].map(|c| channels[c][i].round().clamp(0.0, 255.0) as u8)
    })
}

/// Photo proxy at a camera-like size: width 640 to 1024 with a common aspect
/// ratio, so the analysis downsamples it like a real photo.
pub fn random_photo_proxy(rng: &mut impl Rng) -> PixelImage {
    const ASPECTS: [(u32, u32); 4] = [(4, 3), (3, 2), (1, 1), (3, 4)];
    let (aw, ah) = ASPECTS[rng.gen_range(0..ASPECTS.len())];
    let width = rng.gen_range(640..=1024);
    let height = width * ah / aw;
    photo_proxy(rng, width, height)
}

pub fn save_png(img: &PixelImage, path: &Path) {
    let buf: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    image::RgbImage::from_raw(img.width(), img.height(), buf)
        .expect("dimensions match")
        .save_with_format(path, image::ImageFormat::Png)
        .expect("write png");
}
