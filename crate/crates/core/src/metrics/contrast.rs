use crate::config::AnalysisConfig;
use crate::image_io::LabImage;
use crate::saliency::SalientMask;

/// Mean after dropping `floor(trim * n)` samples from each tail.
/// Returns `None` for an empty sample.
pub fn trimmed_mean(mut samples: Vec<f64>, trim: f64) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    samples.sort_unstable_by(f64::total_cmp);
    let cut = (trim * samples.len() as f64).floor() as usize;
    let kept = &samples[cut..samples.len() - cut];
    // Centered on the first kept sample so constant inputs come back exactly.
    let pivot = kept[0];
    Some(pivot + kept.iter().map(|v| v - pivot).sum::<f64>() / kept.len() as f64)
}

/// Absolute difference between robust mean lightness inside the salient mask
/// and outside it. Zero when either region is empty.
pub fn fg_bg_contrast(lab: &LabImage, mask: &SalientMask, config: &AnalysisConfig) -> f64 {
    let (mut fg, mut bg) = (Vec::new(), Vec::new());
    for (&l, &inside) in lab.l.iter().zip(&mask.member) {
        if inside {
            fg.push(l);
        } else {
            bg.push(l);
        }
    }
    match (
        trimmed_mean(fg, config.trim_fraction),
        trimmed_mean(bg, config.trim_fraction),
    ) {
        (Some(a), Some(b)) => (a - b).abs(),
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image_io::{to_lab, PixelImage};

    fn mask_of(width: u32, height: u32, f: impl Fn(u32, u32) -> bool) -> SalientMask {
        let member = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        SalientMask {
            width,
            height,
            member,
            captured_mass: 0.2,
        }
    }

    #[test]
    fn white_blob_on_black() {
        let inside = |x: u32, y: u32| (10..20).contains(&x) && (10..20).contains(&y);
        let img = PixelImage::from_fn(30, 30, |x, y| if inside(x, y) { [255; 3] } else { [0; 3] });
        let delta = fg_bg_contrast(&to_lab(&img), &mask_of(30, 30, inside), &AnalysisConfig::default());
        assert!((delta - 100.0).abs() < 0.1);
    }

    #[test]
    fn uniform_color_has_no_contrast() {
        let img = PixelImage::filled(16, 16, [30, 200, 99]);
        let delta = fg_bg_contrast(
            &to_lab(&img),
            &mask_of(16, 16, |x, _| x < 4),
            &AnalysisConfig::default(),
        );
        assert_eq!(delta, 0.0);
    }

    #[test]
    fn trim_discards_outlier() {
        let mut v = vec![10.0; 19];
        v.push(200.0);
        assert_eq!(trimmed_mean(v, 0.05), Some(10.0));
        // Below 20 samples a 5% trim removes nothing.
        assert_eq!(trimmed_mean(vec![10.0, 10.0, 40.0], 0.05), Some(20.0));
        assert_eq!(trimmed_mean(vec![], 0.05), None);
    }

    #[test]
    fn full_mask_is_degenerate_zero() {
        let img = PixelImage::from_fn(8, 8, |x, _| [(x * 30) as u8; 3]);
        let delta = fg_bg_contrast(&to_lab(&img), &mask_of(8, 8, |_, _| true), &AnalysisConfig::default());
        assert_eq!(delta, 0.0);
    }
}
