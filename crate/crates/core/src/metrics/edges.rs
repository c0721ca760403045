//! Canny edge detection on 8-bit luma.

use crate::config::AnalysisConfig;
use crate::image_io::{resize_to_reference, to_grayscale, GrayImage, PixelImage};
use crate::plane;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    pub width: u32,
    pub height: u32,
    pub edges: Vec<bool>,
}

impl EdgeMap {
    pub fn count(&self) -> usize {
        self.edges.iter().filter(|&&e| e).count()
    }

    pub fn density(&self) -> f64 {
        self.count() as f64 / self.edges.len() as f64
    }
}

// tan(22.5°) and tan(67.5°)
const TAN_22_5: f64 = 0.414_213_562_373_095_03;
const TAN_67_5: f64 = 2.414_213_562_373_095;

/// Gaussian pre-blur (rounded back to integers), Sobel gradients,
/// non-maximum suppression and 8-connected hysteresis.
///
/// Thresholds apply to the Sobel magnitude of the blurred 8-bit image. Border
/// pixels are never edges.
pub fn canny(gray: &GrayImage, low: f64, high: f64, sigma: f64) -> EdgeMap {
    let (w, h) = (gray.width as usize, gray.height as usize);
    let blurred: Vec<i64> = plane::gaussian_blur(&gray.to_f64(), w, h, sigma)
        .into_iter()
        .map(|v| (v + 0.5).floor() as i64)
        .collect();

    let at = |x: isize, y: isize| {
        let xc = x.clamp(0, w as isize - 1) as usize;
        let yc = y.clamp(0, h as isize - 1) as usize;
        blurred[yc * w + xc]
    };
    let mut gx = vec![0i64; w * h];
    let mut gy = vec![0i64; w * h];
    let mut mag2 = vec![0i64; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let dx = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
            let dy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
            let i = y as usize * w + x as usize;
            gx[i] = dx;
            gy[i] = dy;
            mag2[i] = dx * dx + dy * dy;
        }
    }

    let low2 = low * low;
    let high2 = high * high;
    // 0 = suppressed, 1 = weak, 2 = strong
    let mut class = vec![0u8; w * h];
    if w >= 3 && h >= 3 {
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                let i = y * w + x;
                let m = mag2[i];
                if m == 0 || (m as f64) < low2 {
                    continue;
                }
                let (ax, ay) = (gx[i].abs() as f64, gy[i].abs() as f64);
                // Neighbour offsets along the gradient: (before, after).
                let (before, after) = if ay <= ax * TAN_22_5 {
                    (i - 1, i + 1)
                } else if ay >= ax * TAN_67_5 {
                    (i - w, i + w)
                } else if (gx[i] > 0) == (gy[i] > 0) {
                    (i - w - 1, i + w + 1)
                } else {
                    (i - w + 1, i + w - 1)
                };
                if m > mag2[before] && m >= mag2[after] {
                    class[i] = if m as f64 >= high2 { 2 } else { 1 };
                }
            }
        }
    }

    let mut edges = vec![false; w * h];
    let mut stack: Vec<usize> = (0..w * h).filter(|&i| class[i] == 2).collect();
    for &i in &stack {
        edges[i] = true;
    }
    while let Some(i) = stack.pop() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if class[j] == 1 && !edges[j] {
                    edges[j] = true;
                    stack.push(j);
                }
            }
        }
    }

    EdgeMap {
        width: gray.width,
        height: gray.height,
        edges,
    }
}

pub fn detect_edges(gray: &GrayImage, config: &AnalysisConfig) -> EdgeMap {
    canny(gray, config.canny_low, config.canny_high, config.canny_blur_sigma)
}

/// Share of edge pixels after resizing to the reference width.
pub fn edge_density(img: &PixelImage, config: &AnalysisConfig) -> f64 {
    let resized = resize_to_reference(img, config);
    detect_edges(&to_grayscale(&resized), config).density()
}
