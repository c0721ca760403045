//! The six raw measurements and the pipeline that produces them.

pub mod contrast;
pub mod edges;
pub mod palette;
pub mod stroke;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;
use crate::image_io::{resize_to_reference, to_grayscale, to_lab, PixelImage};
use crate::saliency::{
    label_components, spectral_residual, top_mass_mask, ComponentLabeling, SaliencyField, SalientMask,
};

pub use contrast::{fg_bg_contrast, trimmed_mean};
pub use edges::{canny, detect_edges, edge_density, EdgeMap};
pub use palette::palette_count;
pub use stroke::{analyze_strokes, euclidean_distance_transform, stroke_thickness, StrokeAnalysis};

/// Degenerate-case markers attached to a measurement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MetricFlags {
    /// Binarization found no stroke pixels; stroke thickness is absent.
    pub empty_foreground: bool,
    /// The saliency field fell back to uniform mass.
    pub uniform_saliency: bool,
    /// The salient mask covers every pixel, leaving no background for contrast.
    pub full_salient_mask: bool,
}

impl MetricFlags {
    const NAMES: [&'static str; 3] = ["empty_foreground", "uniform_saliency", "full_salient_mask"];

    fn bits(&self) -> [bool; 3] {
        [self.empty_foreground, self.uniform_saliency, self.full_salient_mask]
    }

    pub fn any(&self) -> bool {
        self.bits().iter().any(|&b| b)
    }

    /// Parses the `|`-separated form produced by `Display`.
    pub fn parse(text: &str) -> Option<Self> {
        let mut flags = Self::default();
        for name in text.split('|').filter(|s| !s.is_empty()) {
            match name {
                "empty_foreground" => flags.empty_foreground = true,
                "uniform_saliency" => flags.uniform_saliency = true,
                "full_salient_mask" => flags.full_salient_mask = true,
                _ => return None,
            }
        }
        Some(flags)
    }
}

impl fmt::Display for MetricFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = Self::NAMES
            .iter()
            .zip(self.bits())
            .filter_map(|(name, set)| set.then_some(*name))
            .collect();
        f.write_str(&names.join("|"))
    }
}

/// Unnormalized measurements of one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMetrics {
    pub palette_count: u32,
    pub edge_density: f64,
    pub saliency_fraction: f64,
    pub contrast_delta: f64,
    pub stroke_rel: Option<f64>,
    pub centering_error: f64,
    pub flags: MetricFlags,
}

/// Share of the captured saliency mass held by the heaviest component.
///
/// The denominator is the summed component mass, which equals the mask's
/// captured mass up to rounding and makes a single component exactly 1.
pub fn saliency_concentration(labeling: &ComponentLabeling, _mask: &SalientMask) -> f64 {
    let largest = labeling.component_masses.iter().cloned().fold(0.0, f64::max);
    let total: f64 = labeling.component_masses.iter().sum();
    if total > 0.0 {
        (largest / total).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

/// Chebyshev offset of the unweighted mask centroid from the image center,
/// in normalized coordinates.
pub fn centering_error(mask: &SalientMask) -> f64 {
    let w = mask.width as usize;
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for (i, _) in mask.member.iter().enumerate().filter(|(_, &m)| m) {
        sx += (i % w) as f64 + 0.5;
        sy += (i / w) as f64 + 0.5;
        n += 1;
    }
    if n == 0 {
        return 0.0;
    }
    let cx = sx / n as f64 / f64::from(mask.width);
    let cy = sy / n as f64 / f64::from(mask.height);
    (cx - 0.5).abs().max((cy - 0.5).abs()).min(0.5)
}

/// Everything computed for one image, kept for inspection and debug dumps.
#[derive(Debug, Clone)]
pub struct ImageAnalysis {
    pub analyzed: PixelImage,
    pub edges: EdgeMap,
    pub saliency: SaliencyField,
    pub mask: SalientMask,
    pub components: ComponentLabeling,
    pub strokes: StrokeAnalysis,
    pub raw: RawMetrics,
}

/// Runs the full pipeline at the reference resolution. The salient mask is
/// computed once and shared by the concentration, contrast and centering
/// measurements.
pub fn analyze(img: &PixelImage, config: &AnalysisConfig) -> ImageAnalysis {
    let analyzed = resize_to_reference(img, config).into_owned();
    let gray = to_grayscale(&analyzed);
    let lab = to_lab(&analyzed);

    let palette = palette_count(&analyzed, config);
    let edges = detect_edges(&gray, config);

    let saliency = spectral_residual(&gray, config);
    let mask = top_mass_mask(&saliency, config);
    let components = label_components(&mask, &saliency);
    let concentration = saliency_concentration(&components, &mask);
    let contrast_delta = fg_bg_contrast(&lab, &mask, config);
    // Without salient structure there is no subject to place off-center.
    let centering = if saliency.uniform { 0.0 } else { centering_error(&mask) };

    let strokes = analyze_strokes(&gray);

    let flags = MetricFlags {
        empty_foreground: strokes.relative_thickness.is_none(),
        uniform_saliency: saliency.uniform,
        full_salient_mask: mask.covers_everything(),
    };
    let raw = RawMetrics {
        palette_count: palette,
        edge_density: edges.density(),
        saliency_fraction: concentration,
        contrast_delta,
        stroke_rel: strokes.relative_thickness,
        centering_error: centering,
        flags,
    };
    ImageAnalysis {
        analyzed,
        edges,
        saliency,
        mask,
        components,
        strokes,
        raw,
    }
}

pub fn compute_raw(img: &PixelImage, config: &AnalysisConfig) -> RawMetrics {
    analyze(img, config).raw
}
