//! Resampling and smoothing on row-major `f64` planes.

/// Source taps for one output coordinate along an axis.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Tap {
    pub lo: usize,
    pub hi: usize,
    pub frac: f64,
}

/// Pixel-center aligned bilinear taps mapping `src` samples onto `dst`.
pub(crate) fn bilinear_taps(src: usize, dst: usize) -> Vec<Tap> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|i| {
            let pos = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(src - 1);
            Tap {
                lo,
                hi,
                frac: pos - lo as f64,
            }
        })
        .collect()
}

pub fn resize_bilinear(values: &[f64], width: usize, height: usize, new_width: usize, new_height: usize) -> Vec<f64> {
    debug_assert_eq!(values.len(), width * height);
    if width == new_width && height == new_height {
        return values.to_vec();
    }
    let xs = bilinear_taps(width, new_width);
    let ys = bilinear_taps(height, new_height);
    let mut out = Vec::with_capacity(new_width * new_height);
    for ty in &ys {
        let top = &values[ty.lo * width..(ty.lo + 1) * width];
        let bottom = &values[ty.hi * width..(ty.hi + 1) * width];
        for tx in &xs {
            let t = top[tx.lo] + (top[tx.hi] - top[tx.lo]) * tx.frac;
            let b = bottom[tx.lo] + (bottom[tx.hi] - bottom[tx.lo]) * tx.frac;
            out.push(t + (b - t) * ty.frac);
        }
    }
    out
}

/// Area-weighted reduction of one axis: each output cell averages the input
/// cells it overlaps, weighted by overlap length.
fn area_weights(src: usize, dst: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|i| {
            let start = i as f64 * scale;
            let end = (i + 1) as f64 * scale;
            let first = start.floor() as usize;
            let last = (end.ceil() as usize).min(src);
            (first..last)
                .filter_map(|j| {
                    let w = (end.min((j + 1) as f64) - start.max(j as f64)) / scale;
                    (w > 0.0).then_some((j, w))
                })
                .collect()
        })
        .collect()
}

/// Box-filter downscale; used where bilinear point sampling would alias.
pub fn resize_area(values: &[f64], width: usize, height: usize, new_width: usize, new_height: usize) -> Vec<f64> {
    debug_assert_eq!(values.len(), width * height);
    if width == new_width && height == new_height {
        return values.to_vec();
    }
    let wx = area_weights(width, new_width);
    let wy = area_weights(height, new_height);
    let mut rows = vec![0.0; new_width * height];
    for y in 0..height {
        let src = &values[y * width..(y + 1) * width];
        for (x, taps) in wx.iter().enumerate() {
            rows[y * new_width + x] = taps.iter().map(|&(j, w)| src[j] * w).sum();
        }
    }
    let mut out = vec![0.0; new_width * new_height];
    for (y, taps) in wy.iter().enumerate() {
        for x in 0..new_width {
            out[y * new_width + x] = taps.iter().map(|&(j, w)| rows[j * new_width + x] * w).sum();
        }
    }
    out
}

pub(crate) fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= total);
    kernel
}

/// Separable Gaussian blur with edge-replicating borders.
pub fn gaussian_blur(values: &[f64], width: usize, height: usize, sigma: f64) -> Vec<f64> {
    let kernel = gaussian_kernel(sigma);
    if kernel.len() == 1 {
        return values.to_vec();
    }
    let radius = (kernel.len() / 2) as isize;
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;

    let mut tmp = vec![0.0; values.len()];
    for y in 0..height {
        let row = &values[y * width..(y + 1) * width];
        for x in 0..width {
            tmp[y * width + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * row[clamp(x as isize + k as isize - radius, width)])
                .sum();
        }
    }
    let mut out = vec![0.0; values.len()];
    for y in 0..height {
        for x in 0..width {
            out[y * width + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * tmp[clamp(y as isize + k as isize - radius, height) * width + x])
                .sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_downscale_preserves_mean() {
        let values: Vec<f64> = (0..30 * 20).map(|i| ((i * 37) % 101) as f64).collect();
        let out = resize_area(&values, 30, 20, 7, 4);
        let mean_in = values.iter().sum::<f64>() / values.len() as f64;
        let mean_out = out.iter().sum::<f64>() / out.len() as f64;
        assert!((mean_in - mean_out).abs() < 1e-9);
    }

    #[test]
    fn bilinear_halving_averages_pairs() {
        let values = vec![0.0, 10.0, 20.0, 30.0];
        let out = resize_bilinear(&values, 4, 1, 2, 1);
        assert_eq!(out, vec![5.0, 25.0]);
    }

    #[test]
    fn blur_keeps_constants_and_mass() {
        let flat = vec![3.5; 12 * 9];
        for v in gaussian_blur(&flat, 12, 9, 2.5) {
            assert!((v - 3.5).abs() < 1e-12);
        }
        let k = gaussian_kernel(1.4);
        assert_eq!(k.len(), 11);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
