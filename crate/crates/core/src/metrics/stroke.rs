//! Stroke thickness from the Euclidean distance transform of an Otsu
//! binarization.

use crate::image_io::GrayImage;

/// Otsu threshold: pixels `<= t` form the darker class. Ties resolve to the
/// lowest `t`; a single-level image yields 0.
pub fn otsu_threshold(gray: &GrayImage) -> u8 {
    let mut hist = [0i128; 256];
    for &v in &gray.values {
        hist[v as usize] += 1;
    }
    let total: i128 = hist.iter().sum();
    let total_sum: i128 = hist.iter().enumerate().map(|(v, &n)| v as i128 * n).sum();

    let (mut w0, mut s0) = (0i128, 0i128);
    let (mut best_t, mut best) = (0u8, -1.0f64);
    for (t, &n) in hist.iter().enumerate() {
        w0 += n;
        s0 += t as i128 * n;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        // Between-class variance up to a constant factor, from an exact
        // integer numerator so mirrored histograms score identically.
        let diff = (s0 * w1 - (total_sum - s0) * w0) as f64;
        let score = diff * diff / (w0 as f64 * w1 as f64);
        if score > best {
            best = score;
            best_t = t as u8;
        }
    }
    best_t
}

/// Stroke pixels: the darker Otsu class, or the lighter one when the darker
/// class holds more than half the image.
pub fn binarize_strokes(gray: &GrayImage) -> Vec<bool> {
    let t = otsu_threshold(gray);
    let dark: Vec<bool> = gray.values.iter().map(|&v| v <= t).collect();
    let dark_count = dark.iter().filter(|&&d| d).count();
    if 2 * dark_count > dark.len() {
        dark.into_iter().map(|d| !d).collect()
    } else {
        dark
    }
}

const FAR: f64 = 1e20;

/// Felzenszwalb-Huttenlocher lower envelope of parabolas rooted at `f`.
fn squared_distance_1d(f: &[f64], v: &mut [usize], z: &mut [f64], out: &mut [f64]) {
    let n = f.len();
    let intersect =
        |q: usize, p: usize| ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
    let mut k = 0;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s = intersect(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = intersect(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, slot) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *slot = d * d + f[v[k]];
    }
}

/// Exact Euclidean distance from each `true` pixel to the nearest `false`
/// pixel; `false` pixels map to 0. Infinite when there is no `false` pixel.
pub fn euclidean_distance_transform(foreground: &[bool], width: usize, height: usize) -> Vec<f64> {
    assert_eq!(foreground.len(), width * height);
    let mut grid: Vec<f64> = foreground.iter().map(|&f| if f { FAR } else { 0.0 }).collect();
    let n = width.max(height);
    let (mut f, mut out) = (vec![0.0; n], vec![0.0; n]);
    let (mut v, mut z) = (vec![0usize; n], vec![0.0; n + 1]);

    for x in 0..width {
        for y in 0..height {
            f[y] = grid[y * width + x];
        }
        squared_distance_1d(&f[..height], &mut v, &mut z, &mut out[..height]);
        for y in 0..height {
            grid[y * width + x] = out[y];
        }
    }
    for y in 0..height {
        let row = &mut grid[y * width..(y + 1) * width];
        f[..width].copy_from_slice(row);
        squared_distance_1d(&f[..width], &mut v, &mut z, &mut out[..width]);
        row.copy_from_slice(&out[..width]);
    }
    grid.into_iter()
        .map(|d2| if d2 >= FAR * 0.5 { f64::INFINITY } else { d2.sqrt() })
        .collect()
}

/// Distances at foreground pixels that are at least as far from the
/// background as every in-bounds 8-neighbour (non-strict ridge points).
pub fn ridge_samples(distances: &[f64], foreground: &[bool], width: usize, height: usize) -> Vec<f64> {
    let mut samples = Vec::new();
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            if !foreground[i] {
                continue;
            }
            let d = distances[i];
            let is_ridge = (y.saturating_sub(1)..=(y + 1).min(height - 1))
                .flat_map(|ny| (x.saturating_sub(1)..=(x + 1).min(width - 1)).map(move |nx| ny * width + nx))
                .all(|j| distances[j] <= d);
            if is_ridge {
                samples.push(d);
            }
        }
    }
    samples
}

pub fn median(mut samples: Vec<f64>) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    samples.sort_unstable_by(f64::total_cmp);
    let mid = samples.len() / 2;
    Some(if samples.len().is_multiple_of(2) {
        0.5 * (samples[mid - 1] + samples[mid])
    } else {
        samples[mid]
    })
}

/// Intermediate products of the stroke measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct StrokeAnalysis {
    pub width: u32,
    pub height: u32,
    pub foreground: Vec<bool>,
    pub distances: Vec<f64>,
    pub sample_count: usize,
    /// Typical stroke width divided by image height; `None` without foreground.
    pub relative_thickness: Option<f64>,
}

pub fn analyze_strokes(gray: &GrayImage) -> StrokeAnalysis {
    let (w, h) = (gray.width as usize, gray.height as usize);
    let foreground = binarize_strokes(gray);
    let has_foreground = foreground.iter().any(|&f| f);
    let (distances, samples) = if has_foreground {
        let distances = euclidean_distance_transform(&foreground, w, h);
        let samples = ridge_samples(&distances, &foreground, w, h);
        (distances, samples)
    } else {
        (vec![0.0; w * h], Vec::new())
    };
    let sample_count = samples.len();
    let relative_thickness = median(samples).map(|m| 2.0 * m / f64::from(gray.height));
    StrokeAnalysis {
        width: gray.width,
        height: gray.height,
        foreground,
        distances,
        sample_count,
        relative_thickness,
    }
}

/// Relative stroke thickness, `None` when binarization finds no foreground.
pub fn stroke_thickness(gray: &GrayImage) -> Option<f64> {
    analyze_strokes(gray).relative_thickness
}
