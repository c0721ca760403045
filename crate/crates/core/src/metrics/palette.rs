use std::collections::HashMap;

use crate::config::AnalysisConfig;
use crate::image_io::PixelImage;

/// Minimum pixel count for a snapped color to be counted.
pub fn coverage_threshold(area: usize, fraction: f64) -> usize {
    ((fraction * area as f64).ceil() as usize).max(1)
}

pub fn snap(rgb: [u8; 3], step: u8) -> [u8; 3] {
    rgb.map(|c| c / step * step)
}

/// Effective palette size: distinct snapped colors covering at least the
/// configured share of the image area.
pub fn palette_count(img: &PixelImage, config: &AnalysisConfig) -> u32 {
    let step = config.palette_snap_step;
    let mut histogram: HashMap<[u8; 3], usize> = HashMap::new();
    for &p in img.pixels() {
        *histogram.entry(snap(p, step)).or_default() += 1;
    }
    let min_count = coverage_threshold(img.len(), config.palette_coverage_fraction);
    histogram.values().filter(|&&n| n >= min_count).count() as u32
}
