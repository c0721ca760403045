//! PNG debug artifacts for `ers explain --dump`.

use std::path::{Path, PathBuf};

use anyhow::Context;
use ers_core::ImageAnalysis;
use image::GrayImage;

pub const ARTIFACTS: [&str; 5] = [
    "edges.png",
    "saliency.png",
    "salient_mask.png",
    "stroke_binary.png",
    "distance_transform.png",
];

fn gray(width: u32, height: u32, values: impl Iterator<Item = u8>) -> GrayImage {
    let buf: Vec<u8> = values.collect();
    GrayImage::from_raw(width, height, buf).expect("buffer matches dimensions")
}

/// Scales nonnegative finite values so the maximum maps to 255.
fn stretch(values: &[f64]) -> impl Iterator<Item = u8> + '_ {
    let max = values.iter().cloned().filter(|v| v.is_finite()).fold(0.0, f64::max);
    values.iter().map(move |&v| {
        if max > 0.0 && v.is_finite() {
            (v / max * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    })
}

fn flag(b: bool) -> u8 {
    if b {
        255
    } else {
        0
    }
}

pub fn write_artifacts(analysis: &ImageAnalysis, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let (w, h) = (analysis.analyzed.width(), analysis.analyzed.height());
    let images = [
        gray(w, h, analysis.edges.edges.iter().map(|&e| flag(e))),
        gray(w, h, stretch(&analysis.saliency.mass)),
        gray(w, h, analysis.mask.member.iter().map(|&m| flag(m))),
        gray(w, h, analysis.strokes.foreground.iter().map(|&f| flag(f))),
        gray(w, h, stretch(&analysis.strokes.distances)),
    ];
    let mut written = Vec::with_capacity(ARTIFACTS.len());
    for (name, img) in ARTIFACTS.iter().zip(images) {
        let path = dir.join(name);
        img.save_with_format(&path, image::ImageFormat::Png)
            .with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}
