//! Accessibility-oriented image metrics and the EasyRead score (ERS).
//!
//! An image is resized to a reference width and measured six ways: palette
//! size, edge density, saliency concentration, foreground/background
//! lightness contrast, relative stroke thickness and centering error. Each
//! measurement is normalized into `[0, 1]` and the weighted sum is the ERS.
//! The [`corpus`] module scores whole directories and compares score
//! distributions between two corpora.

pub mod config;
pub mod corpus;
pub mod error;
pub mod image_io;
pub mod metrics;
pub mod plane;
pub mod saliency;
pub mod scoring;

pub use config::AnalysisConfig;
pub use error::{Error, Result};
pub use image_io::{decode_image, resize_to_reference, to_grayscale, to_lab, GrayImage, LabImage, PixelImage};
pub use metrics::{analyze, compute_raw, ImageAnalysis, MetricFlags, RawMetrics};
pub use saliency::{label_components, spectral_residual, top_mass_mask, ComponentLabeling, SaliencyField, SalientMask};
pub use scoring::{
    aggregate, score_image, ErsRecord, NormalizationSpec, RunConfig, Scorer, ScoringConfig, SubScores, Weights,
};
