use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tunables for the raw metric pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Width every image is resampled to before measurement.
    pub reference_width: u32,
    /// Opaque color transparent pixels are composited over.
    pub background_fill: [u8; 3],
    /// Hysteresis thresholds on raw Sobel magnitude of 8-bit luma.
    pub canny_low: f64,
    pub canny_high: f64,
    pub canny_blur_sigma: f64,
    /// Channel quantization step for the palette count.
    pub palette_snap_step: u8,
    /// Minimum area fraction a snapped color must cover to be counted.
    pub palette_coverage_fraction: f64,
    /// Share of total saliency mass captured by the salient mask.
    pub saliency_mass_fraction: f64,
    pub saliency_working_width: u32,
    pub saliency_blur_sigma: f64,
    /// Fraction of samples discarded at each tail by the robust mean.
    pub trim_fraction: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            reference_width: 512,
            background_fill: [255, 255, 255],
            canny_low: 50.0,
            canny_high: 150.0,
            canny_blur_sigma: 1.4,
            palette_snap_step: 8,
            palette_coverage_fraction: 0.001,
            saliency_mass_fraction: 0.20,
            saliency_working_width: 64,
            saliency_blur_sigma: 2.5,
            trim_fraction: 0.05,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.reference_width == 0 {
            return fail("reference_width must be at least 1");
        }
        if self.saliency_working_width == 0 {
            return fail("saliency_working_width must be at least 1");
        }
        if self.palette_snap_step == 0 {
            return fail("palette_snap_step must be at least 1");
        }
        if !(self.palette_coverage_fraction > 0.0 && self.palette_coverage_fraction < 1.0) {
            return fail("palette_coverage_fraction must lie in (0, 1)");
        }
        if !(self.saliency_mass_fraction > 0.0 && self.saliency_mass_fraction < 1.0) {
            return fail("saliency_mass_fraction must lie in (0, 1)");
        }
        if !(self.trim_fraction >= 0.0 && self.trim_fraction < 0.5) {
            return fail("trim_fraction must lie in [0, 0.5)");
        }
        if !(self.canny_low >= 0.0 && self.canny_low < self.canny_high) {
            return fail("canny thresholds must satisfy 0 <= low < high");
        }
        if !(self.canny_blur_sigma >= 0.0 && self.saliency_blur_sigma >= 0.0) {
            return fail("blur sigmas must be non-negative");
        }
        Ok(())
    }
}
