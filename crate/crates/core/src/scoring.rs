//! Normalization of raw measurements into `[0, 1]` sub-scores and their
//! weighted aggregate.

use std::hash::Hasher;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::image_io::{decode_image, PixelImage};
use crate::metrics::{analyze, ImageAnalysis, RawMetrics};

/// Tolerance on the weight sum.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// One of the three normalization families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormalizationSpec {
    /// `exp(-k x)` with `x = max(0, (raw - input_offset) / input_scale)`.
    Decreasing {
        k: f64,
        #[serde(default)]
        input_offset: f64,
        #[serde(default = "unit")]
        input_scale: f64,
    },
    /// `1 - exp(-k x)` with `x = max(0, raw / input_scale)`.
    Increasing {
        k: f64,
        #[serde(default = "unit")]
        input_scale: f64,
    },
    /// `exp(-sharpness (raw - mu)^2 / (2 sigma^2))`.
    Gaussian {
        mu: f64,
        sigma: f64,
        #[serde(default = "unit")]
        sharpness: f64,
    },
}

fn unit() -> f64 {
    1.0
}

impl NormalizationSpec {
    pub fn apply(&self, raw: f64) -> f64 {
        let score = match *self {
            Self::Decreasing {
                k,
                input_offset,
                input_scale,
            } => (-k * ((raw - input_offset) / input_scale).max(0.0)).exp(),
            Self::Increasing { k, input_scale } => 1.0 - (-k * (raw / input_scale).max(0.0)).exp(),
            Self::Gaussian { mu, sigma, sharpness } => {
                let d = raw - mu;
                (-sharpness * d * d / (2.0 * sigma * sigma)).exp()
            }
        };
        score.clamp(0.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Decreasing {
                k,
                input_offset,
                input_scale,
            } => k > 0.0 && input_scale > 0.0 && input_offset.is_finite(),
            Self::Increasing { k, input_scale } => k > 0.0 && input_scale > 0.0,
            Self::Gaussian { mu, sigma, sharpness } => mu.is_finite() && sigma > 0.0 && sharpness > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid normalization {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub palette: f64,
    pub edges: f64,
    pub saliency: f64,
    pub contrast: f64,
    pub stroke: f64,
    pub centering: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self {
            palette: 0.25,
            edges: 0.20,
            saliency: 0.15,
            contrast: 0.15,
            stroke: 0.15,
            centering: 0.10,
        }
    }
}

impl Weights {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.palette,
            self.edges,
            self.saliency,
            self.contrast,
            self.stroke,
            self.centering,
        ]
    }

    pub fn sum(&self) -> f64 {
        self.as_array().iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringConfig {
    pub palette: NormalizationSpec,
    pub edges: NormalizationSpec,
    pub saliency: NormalizationSpec,
    pub contrast: NormalizationSpec,
    pub stroke: NormalizationSpec,
    pub centering: NormalizationSpec,
    pub weights: Weights,
    /// Stroke sub-score when no stroke foreground exists.
    pub missing_stroke_score: f64,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            palette: NormalizationSpec::Decreasing {
                k: 2.0,
                input_offset: 4.0,
                input_scale: 12.0,
            },
            edges: NormalizationSpec::Decreasing {
                k: 2.5,
                input_offset: 0.0,
                input_scale: 0.1,
            },
            saliency: NormalizationSpec::Increasing {
                k: 4.0,
                input_scale: 1.0,
            },
            contrast: NormalizationSpec::Increasing {
                k: 3.0,
                input_scale: 120.0,
            },
            stroke: NormalizationSpec::Gaussian {
                mu: 0.015,
                sigma: 0.006,
                sharpness: 2.0,
            },
            centering: NormalizationSpec::Decreasing {
                k: 3.0,
                input_offset: 0.0,
                input_scale: 0.5,
            },
            weights: Weights::default(),
            missing_stroke_score: 0.0,
        }
    }
}

impl ScoringConfig {
    pub fn validate(&self) -> Result<()> {
        for spec in [
            &self.palette,
            &self.edges,
            &self.saliency,
            &self.contrast,
            &self.stroke,
            &self.centering,
        ] {
            spec.validate()?;
        }
        if self.weights.as_array().iter().any(|&w| w.is_nan() || w <= 0.0) {
            return Err(Error::Config("weights must be positive".into()));
        }
        let sum = self.weights.sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::Config(format!("weights sum to {sum}, expected 1")));
        }
        if !(0.0..=1.0).contains(&self.missing_stroke_score) {
            return Err(Error::Config("missing_stroke_score must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

pub fn normalize_palette(palette_count: u32, spec: &NormalizationSpec) -> f64 {
    spec.apply(f64::from(palette_count))
}

pub fn normalize_edges(edge_density: f64, spec: &NormalizationSpec) -> f64 {
    spec.apply(edge_density)
}

pub fn normalize_saliency(concentration: f64, spec: &NormalizationSpec) -> f64 {
    spec.apply(concentration)
}

pub fn normalize_contrast(delta_l: f64, spec: &NormalizationSpec) -> f64 {
    spec.apply(delta_l)
}

pub fn normalize_stroke(relative_thickness: Option<f64>, spec: &NormalizationSpec, missing_score: f64) -> f64 {
    relative_thickness.map_or(missing_score, |t| spec.apply(t))
}

pub fn normalize_centering(error: f64, spec: &NormalizationSpec) -> f64 {
    spec.apply(error)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubScores {
    pub s_palette: f64,
    pub s_edges: f64,
    pub s_saliency: f64,
    pub s_contrast: f64,
    pub s_stroke: f64,
    pub s_centering: f64,
}

/// Metric names in aggregation order.
pub const METRIC_NAMES: [&str; 6] = ["palette", "edges", "saliency", "contrast", "stroke", "centering"];

impl SubScores {
    pub fn from_array([s_palette, s_edges, s_saliency, s_contrast, s_stroke, s_centering]: [f64; 6]) -> Self {
        Self {
            s_palette,
            s_edges,
            s_saliency,
            s_contrast,
            s_stroke,
            s_centering,
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.s_palette,
            self.s_edges,
            self.s_saliency,
            self.s_contrast,
            self.s_stroke,
            self.s_centering,
        ]
    }
}

pub fn sub_scores(raw: &RawMetrics, config: &ScoringConfig) -> SubScores {
    SubScores {
        s_palette: normalize_palette(raw.palette_count, &config.palette),
        s_edges: normalize_edges(raw.edge_density, &config.edges),
        s_saliency: normalize_saliency(raw.saliency_fraction, &config.saliency),
        s_contrast: normalize_contrast(raw.contrast_delta, &config.contrast),
        s_stroke: normalize_stroke(raw.stroke_rel, &config.stroke, config.missing_stroke_score),
        s_centering: normalize_centering(raw.centering_error, &config.centering),
    }
}

/// Weighted sum of sub-scores. Each sub-score is clamped to `[0, 1]` first.
pub fn aggregate(sub: &SubScores, config: &ScoringConfig) -> Result<f64> {
    let sum = config.weights.sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::Config(format!("weights sum to {sum}, expected 1")));
    }
    Ok(weighted_sum(sub, &config.weights))
}

fn weighted_sum(sub: &SubScores, weights: &Weights) -> f64 {
    sub.as_array()
        .iter()
        .zip(weights.as_array())
        .map(|(s, w)| w * s.clamp(0.0, 1.0))
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Per-metric share of the aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Contribution {
    pub metric: &'static str,
    pub score: f64,
    pub weight: f64,
    pub contribution: f64,
}

pub fn contributions(sub: &SubScores, weights: &Weights) -> [Contribution; 6] {
    let scores = sub.as_array();
    let w = weights.as_array();
    std::array::from_fn(|i| {
        let score = scores[i].clamp(0.0, 1.0);
        Contribution {
            metric: METRIC_NAMES[i],
            score,
            weight: w[i],
            contribution: w[i] * score,
        }
    })
}

/// Full configuration of a scoring run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub analysis: AnalysisConfig,
    pub scoring: ScoringConfig,
}

/// 64-bit FNV-1a, rendered as 16 hex digits.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hasher = FnvHasher::default();
    hasher.write(bytes);
    format!("{:016x}", hasher.finish())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.analysis.validate()?;
        self.scoring.validate()
    }

    /// Hash of the compact JSON serialization.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        fnv1a_hex(&canonical)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }
}

/// Scoring result for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErsRecord {
    pub source: String,
    pub raw: RawMetrics,
    pub scores: SubScores,
    pub ers: f64,
    pub fingerprint: String,
}

impl ErsRecord {
    /// Weighted sum recomputed from the stored sub-scores.
    pub fn recompute_ers(&self, weights: &Weights) -> f64 {
        weighted_sum(&self.scores, weights)
    }
}

/// A validated configuration with its fingerprint precomputed.
#[derive(Debug, Clone)]
pub struct Scorer {
    config: RunConfig,
    fingerprint: String,
}

impl Scorer {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let fingerprint = config.fingerprint();
        Ok(Self { config, fingerprint })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn record(&self, source: &str, raw: RawMetrics) -> ErsRecord {
        let scores = sub_scores(&raw, &self.config.scoring);
        let ers = weighted_sum(&scores, &self.config.scoring.weights);
        ErsRecord {
            source: source.to_string(),
            raw,
            scores,
            ers,
            fingerprint: self.fingerprint.clone(),
        }
    }

    /// Scores an image and keeps the intermediate analysis.
    pub fn analyze(&self, img: &PixelImage, source: &str) -> (ErsRecord, ImageAnalysis) {
        let analysis = analyze(img, &self.config.analysis);
        (self.record(source, analysis.raw.clone()), analysis)
    }

    pub fn score(&self, img: &PixelImage, source: &str) -> ErsRecord {
        self.analyze(img, source).0
    }

    pub fn score_bytes(&self, bytes: &[u8], source: &str) -> Result<ErsRecord> {
        let img = decode_image(bytes, &self.config.analysis)?;
        Ok(self.score(&img, source))
    }
}

/// One-shot scoring with explicit configs.
pub fn score_image(
    img: &PixelImage,
    analysis: &AnalysisConfig,
    scoring: &ScoringConfig,
    source: &str,
) -> Result<ErsRecord> {
    let scorer = Scorer::new(RunConfig {
        analysis: analysis.clone(),
        scoring: scoring.clone(),
    })?;
    Ok(scorer.score(img, source))
}
