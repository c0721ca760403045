//! Spectral-residual saliency, the top-mass salient mask and its connected
//! components. The mask is shared by the concentration, contrast and
//! centering metrics.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::config::AnalysisConfig;
use crate::image_io::{scaled_height, GrayImage};
use crate::plane;

/// Slack allowed when comparing accumulated mass against the target share.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Per-pixel attention mass summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyField {
    pub width: u32,
    pub height: u32,
    pub mass: Vec<f64>,
    /// Set when the input carried no structure and the field fell back to uniform.
    pub uniform: bool,
}

impl SaliencyField {
    pub fn uniform(width: u32, height: u32) -> Self {
        let n = width as usize * height as usize;
        Self {
            width,
            height,
            mass: vec![1.0 / n as f64; n],
            uniform: true,
        }
    }

    /// Normalizes nonnegative weights to unit sum. Falls back to the uniform
    /// field when the total is negligible.
    pub fn from_weights(width: u32, height: u32, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), width as usize * height as usize);
        let mut mass: Vec<f64> = weights.into_iter().map(|w| if w > 0.0 { w } else { 0.0 }).collect();
        let total: f64 = mass.iter().sum();
        if !total.is_finite() || total < 1e-12 {
            return Self::uniform(width, height);
        }
        mass.iter_mut().for_each(|m| *m /= total);
        Self {
            width,
            height,
            mass,
            uniform: false,
        }
    }
}

/// Pixels holding the leading share of saliency mass.
#[derive(Debug, Clone, PartialEq)]
pub struct SalientMask {
    pub width: u32,
    pub height: u32,
    pub member: Vec<bool>,
    pub captured_mass: f64,
}

impl SalientMask {
    pub fn count(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn covers_everything(&self) -> bool {
        self.member.iter().all(|&m| m)
    }

    pub fn complement(&self) -> Self {
        Self {
            member: self.member.iter().map(|m| !m).collect(),
            ..self.clone()
        }
    }
}

/// 8-connected components of a salient mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentLabeling {
    pub width: u32,
    pub height: u32,
    /// 0 for background, otherwise `1..=component_masses.len()`.
    pub labels: Vec<u32>,
    pub component_masses: Vec<f64>,
}

impl ComponentLabeling {
    pub fn component_count(&self) -> usize {
        self.component_masses.len()
    }
}

fn fft_rows(data: &mut [Complex64], width: usize, planner: &mut FftPlanner<f64>, inverse: bool) {
    let fft = if inverse {
        planner.plan_fft_inverse(width)
    } else {
        planner.plan_fft_forward(width)
    };
    for row in data.chunks_exact_mut(width) {
        fft.process(row);
    }
}

fn transpose(data: &[Complex64], width: usize, height: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    for y in 0..height {
        for x in 0..width {
            out[x * height + y] = data[y * width + x];
        }
    }
    out
}

fn fft_2d(data: &mut Vec<Complex64>, width: usize, height: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    fft_rows(data, width, &mut planner, inverse);
    let mut cols = transpose(data, width, height);
    fft_rows(&mut cols, height, &mut planner, inverse);
    *data = transpose(&cols, height, width);
}

/// 3x3 mean over a periodic grid.
fn box3_wrapped(values: &[f64], width: usize, height: usize) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for dy in [height - 1, 0, 1] {
                for dx in [width - 1, 0, 1] {
                    acc += values[((y + dy) % height) * width + (x + dx) % width];
                }
            }
            out[y * width + x] = acc / 9.0;
        }
    }
    out
}

/// Spectral-residual saliency at the resolution of `gray`.
///
/// The image is box-downscaled to the working width (never upscaled), its
/// log-amplitude spectrum has its 3x3 local average removed, and the residual
/// is recombined with the original phase. Squared reconstruction magnitudes
/// are Gaussian-smoothed, resampled back and normalized to unit mass.
pub fn spectral_residual(gray: &GrayImage, config: &AnalysisConfig) -> SaliencyField {
    let (width, height) = (gray.width, gray.height);
    if gray.is_constant() {
        return SaliencyField::uniform(width, height);
    }

    let (ww, wh) = if width > config.saliency_working_width {
        let ww = config.saliency_working_width;
        (ww, scaled_height(width, height, ww))
    } else {
        (width, height)
    };
    let (ww, wh) = (ww as usize, wh as usize);
    let working = plane::resize_area(&gray.to_f64(), width as usize, height as usize, ww, wh);
    let (lo, hi) = working.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if hi - lo < 1e-9 {
        return SaliencyField::uniform(width, height);
    }

    let mut spectrum: Vec<Complex64> = working.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_2d(&mut spectrum, ww, wh, false);

    // ln(1 + A) on the 8-bit intensity scale: flat synthetic art has
    // near-empty spectral bins whose plain log would dominate the residual.
    let amplitude: Vec<f64> = spectrum.iter().map(|c| c.norm()).collect();
    let floor = amplitude.iter().cloned().fold(0.0, f64::max) * 1e-10;
    let log_amp: Vec<f64> = amplitude.iter().map(|&a| a.ln_1p()).collect();
    let smoothed = box3_wrapped(&log_amp, ww, wh);

    // Bins without energy have no meaningful phase and are dropped.
    for (i, c) in spectrum.iter_mut().enumerate() {
        *c = if amplitude[i] > floor {
            Complex64::from_polar((log_amp[i] - smoothed[i]).exp(), c.arg())
        } else {
            Complex64::default()
        };
    }
    fft_2d(&mut spectrum, ww, wh, true);

    let energy: Vec<f64> = spectrum.iter().map(|c| c.norm_sqr()).collect();
    let energy = plane::gaussian_blur(&energy, ww, wh, config.saliency_blur_sigma);
    let full = plane::resize_bilinear(&energy, ww, wh, width as usize, height as usize);
    SaliencyField::from_weights(width, height, full)
}

/// Smallest greedy prefix of pixels (by descending mass, ties by row-major
/// index) whose cumulative mass reaches `saliency_mass_fraction`.
pub fn top_mass_mask(field: &SaliencyField, config: &AnalysisConfig) -> SalientMask {
    let target = config.saliency_mass_fraction - MASS_TOLERANCE;
    let mut order: Vec<usize> = (0..field.mass.len()).collect();
    order.sort_unstable_by(|&i, &j| field.mass[j].total_cmp(&field.mass[i]).then(i.cmp(&j)));

    let mut member = vec![false; field.mass.len()];
    let mut captured = 0.0;
    for &i in &order {
        member[i] = true;
        captured += field.mass[i];
        if captured >= target {
            break;
        }
    }
    SalientMask {
        width: field.width,
        height: field.height,
        member,
        captured_mass: captured,
    }
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Two-pass 8-connected labeling. Component ids follow raster order of each
/// component's first pixel.
pub fn label_components(mask: &SalientMask, field: &SaliencyField) -> ComponentLabeling {
    let (w, h) = (mask.width as usize, mask.height as usize);
    let mut provisional = vec![0u32; w * h];
    let mut sets = DisjointSet::new();

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !mask.member[i] {
                continue;
            }
            // Already-visited 8-neighbours: W, NW, N, NE.
            let mut neighbours = [0u32; 4];
            if x > 0 {
                neighbours[0] = provisional[i - 1];
            }
            if y > 0 {
                let up = i - w;
                if x > 0 {
                    neighbours[1] = provisional[up - 1];
                }
                neighbours[2] = provisional[up];
                if x + 1 < w {
                    neighbours[3] = provisional[up + 1];
                }
            }
            let mut label = 0;
            for &n in neighbours.iter().filter(|&&n| n != 0) {
                if label == 0 {
                    label = n;
                } else {
                    sets.union(label, n);
                }
            }
            provisional[i] = if label == 0 { sets.make() } else { label };
        }
    }

    let mut remap = vec![0u32; sets.parent.len()];
    let mut component_masses = Vec::new();
    let mut labels = vec![0u32; w * h];
    for i in 0..w * h {
        if provisional[i] == 0 {
            continue;
        }
        let root = sets.find(provisional[i]) as usize;
        if remap[root] == 0 {
            component_masses.push(0.0);
            remap[root] = component_masses.len() as u32;
        }
        let id = remap[root];
        labels[i] = id;
        component_masses[id as usize - 1] += field.mass[i];
    }

    ComponentLabeling {
        width: mask.width,
        height: mask.height,
        labels,
        component_masses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_from(width: u32, height: u32, weights: Vec<f64>) -> SaliencyField {
        SaliencyField::from_weights(width, height, weights)
    }

    #[test]
    fn constant_image_gives_uniform_field() {
        let gray = GrayImage::from_fn(40, 30, |_, _| 77);
        let field = spectral_residual(&gray, &AnalysisConfig::default());
        assert!(field.uniform);
        assert!(field.mass.iter().all(|&m| m == 1.0 / 1200.0));
    }

    #[test]
    fn field_sums_to_one() {
        let gray = GrayImage::from_fn(300, 170, |x, y| ((x * 7 + y * 13) % 251) as u8);
        let field = spectral_residual(&gray, &AnalysisConfig::default());
        assert!(!field.uniform);
        assert!((field.mass.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(field.mass.iter().all(|&m| m >= 0.0));
    }

    #[test]
    fn uniform_mask_takes_ceiling_share() {
        let cfg = AnalysisConfig::default();
        for (w, h) in [(10, 10), (7, 3), (512, 512), (13, 17)] {
            let field = SaliencyField::uniform(w, h);
            let mask = top_mass_mask(&field, &cfg);
            let n = (w * h) as f64;
            assert_eq!(mask.count(), (0.2 * n).ceil() as usize, "{w}x{h}");
        }
    }

    #[test]
    fn delta_field_gives_single_pixel() {
        let mut weights = vec![0.0; 64];
        weights[37] = 5.0;
        let field = field_from(8, 8, weights);
        let mask = top_mass_mask(&field, &AnalysisConfig::default());
        assert_eq!(mask.count(), 1);
        assert!(mask.member[37]);
        assert_eq!(mask.captured_mass, 1.0);
    }

    #[test]
    fn ties_break_by_raster_index() {
        let field = field_from(5, 1, vec![1.0, 2.0, 2.0, 1.0, 2.0]);
        let cfg = AnalysisConfig {
            saliency_mass_fraction: 0.3,
            ..Default::default()
        };
        let mask = top_mass_mask(&field, &cfg);
        assert_eq!(mask.member, vec![false, true, true, false, false]);
    }

    #[test]
    fn one_blob_one_component() {
        let mut weights = vec![0.0; 100];
        for y in 3..6 {
            for x in 2..7 {
                weights[y * 10 + x] = 1.0;
            }
        }
        let field = field_from(10, 10, weights);
        let mask = top_mass_mask(&field, &AnalysisConfig::default());
        let labels = label_components(&mask, &field);
        assert_eq!(labels.component_count(), 1);
        assert!((labels.component_masses[0] - mask.captured_mass).abs() < 1e-15);
    }

    #[test]
    fn separated_blobs_split_mass() {
        let mut member = vec![false; 100];
        for i in [11, 12, 21, 22, 17, 18, 27, 28] {
            member[i] = true;
        }
        let field = SaliencyField::uniform(10, 10);
        let mask = SalientMask {
            width: 10,
            height: 10,
            member,
            captured_mass: 0.08,
        };
        let labels = label_components(&mask, &field);
        assert_eq!(labels.component_count(), 2);
        for m in &labels.component_masses {
            assert!((m / mask.captured_mass - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_pixels_connect() {
        let member = vec![true, false, false, false, true, false, false, false, true];
        let mask = SalientMask {
            width: 3,
            height: 3,
            member,
            captured_mass: 1.0 / 3.0,
        };
        let labels = label_components(&mask, &SaliencyField::uniform(3, 3));
        assert_eq!(labels.component_count(), 1);
    }

    #[test]
    fn u_shape_merges_late() {
        // Two arms that only join on the last row.
        #[rustfmt::skip]
        let member = vec![
            true, false, true,
            true, false, true,
            true, true,  true,
        ];
        let mask = SalientMask {
            width: 3,
            height: 3,
            member,
            captured_mass: 7.0 / 9.0,
        };
        let labels = label_components(&mask, &SaliencyField::uniform(3, 3));
        assert_eq!(labels.component_count(), 1);
        assert!(labels.labels.iter().all(|&l| l <= 1));
    }
}
