//! Chromatic coding of subband amplitudes.
//!
//! Subband `k` of `n_sub` is assigned the fully saturated hue `k / n_sub`.
//! Per-pixel subband amplitudes are normalized by their maximum, mixed with
//! the palette colors, and averaged over `n_sub`; because the palette colors
//! sum to gray, a flat spectrum renders achromatic. Brightness is then taken
//! from the multilooked full-band amplitude, clipped at a percentile.

mod hsv;

pub use hsv::{circular_mean_hue, hsv_to_rgb, hue_distance, rgb_to_hsv, HsvImage};

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::multilook::{multilook, multilook_complex, LookParams};
use crate::slc_io::{RealImage, RgbImage, SlcImage};
use crate::spectral::{decompose, SubbandLayout};

/// Reference colors, one per subband.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    pub hsv: Vec<[f64; 3]>,
    pub rgb: Vec<[f64; 3]>,
}

impl Palette {
    pub fn n_sub(&self) -> usize {
        self.rgb.len()
    }

    /// Per-channel sums of the RGB colors.
    pub fn channel_sums(&self) -> [f64; 3] {
        self.rgb.iter().fold([0.0; 3], |acc, c| {
            [acc[0] + c[0], acc[1] + c[1], acc[2] + c[2]]
        })
    }

    /// (max - min) of the channel sums relative to their mean.
    pub fn sum_spread(&self) -> f64 {
        let s = self.channel_sums();
        let max = s.iter().cloned().fold(f64::MIN, f64::max);
        let min = s.iter().cloned().fold(f64::MAX, f64::min);
        (max - min) / (s.iter().sum::<f64>() / 3.0)
    }
}

/// Uniform-hue palette with unit saturation and value.
pub fn build_palette(n_sub: usize) -> Result<Palette> {
    if n_sub < 2 {
        return Err(param(format!("n_sub must be >= 2, got {n_sub}")));
    }
    let hsv: Vec<[f64; 3]> = (0..n_sub)
        .map(|k| [k as f64 / n_sub as f64, 1.0, 1.0])
        .collect();
    let rgb = hsv
        .iter()
        .map(|c| hsv_to_rgb(c[0], c[1], c[2]))
        .collect::<Result<_>>()?;
    Ok(Palette { hsv, rgb })
}

fn check_stack(planes: &[RealImage]) -> Result<(usize, usize)> {
    let first = planes.first().ok_or_else(|| param("empty subband stack"))?;
    let dims = first.dims();
    for p in planes {
        if p.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                actual: p.dims(),
            });
        }
    }
    Ok(dims)
}

/// Divides every subband amplitude by the per-pixel maximum over subbands.
/// Pixels where all subbands are zero stay zero.
pub fn normalize_subbands(amps: &[RealImage]) -> Result<Vec<RealImage>> {
    let (rows, cols) = check_stack(amps)?;
    for a in amps {
        if let Some(v) = a.data().iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!(
                "subband amplitudes must be finite and nonnegative, got {v}"
            )));
        }
    }
    let n = rows * cols;
    let max: Vec<f64> = (0..n)
        .map(|i| amps.iter().map(|a| a.data()[i]).fold(0.0, f64::max))
        .collect();
    amps.iter()
        .map(|a| {
            let data = a
                .data()
                .iter()
                .zip(&max)
                .map(|(&v, &m)| if m > 0.0 { v / m } else { 0.0 })
                .collect();
            RealImage::new(rows, cols, data)
        })
        .collect()
}

/// Palette-weighted mean of normalized subband planes.
pub fn composite_rgb(normalized: &[RealImage], palette: &Palette) -> Result<RgbImage> {
    let (rows, cols) = check_stack(normalized)?;
    if normalized.len() != palette.n_sub() {
        return Err(param(format!(
            "{} subband planes for a {}-color palette",
            normalized.len(),
            palette.n_sub()
        )));
    }
    for p in normalized {
        if let Some(v) = p.data().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!(
                "normalized amplitude outside [0, 1]: {v}"
            )));
        }
    }
    let scale = 1.0 / palette.n_sub() as f64;
    let pixels = (0..rows * cols)
        .map(|i| {
            let mut acc = [0.0; 3];
            for (plane, c) in normalized.iter().zip(&palette.rgb) {
                let w = plane.data()[i];
                acc[0] += w * c[0];
                acc[1] += w * c[1];
                acc[2] += w * c[2];
            }
            acc.map(|v| (v * scale).clamp(0.0, 1.0))
        })
        .collect();
    RgbImage::new(rows, cols, pixels)
}

/// `p`-th percentile (0 < p <= 100) with linear interpolation between order statistics.
pub fn percentile(values: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 100.0) {
        return Err(param(format!("percentile must be in (0, 100], got {p}")));
    }
    if values.is_empty() {
        return Err(Error::Domain("percentile of an empty set".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = rank - lo as f64;
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

/// Replaces HSV value with `min(amp / percentile(amp, p), 1)`. Returns the
/// recolored image and the clip level.
pub fn encode_brightness_with_level(
    rgb: &RgbImage,
    amp_ml: &RealImage,
    p: f64,
) -> Result<(RgbImage, f64)> {
    if rgb.dims() != amp_ml.dims() {
        return Err(Error::DimensionMismatch {
            expected: rgb.dims(),
            actual: amp_ml.dims(),
        });
    }
    if let Some(v) = amp_ml
        .data()
        .iter()
        .find(|v| !(**v >= 0.0 && v.is_finite()))
    {
        return Err(Error::Domain(format!(
            "brightness amplitude must be finite and nonnegative, got {v}"
        )));
    }
    let level = percentile(amp_ml.data(), p)?;
    if level <= 0.0 {
        return Err(Error::Domain(format!(
            "{p}th percentile of the brightness plane is 0; cannot normalize"
        )));
    }
    let mut hsv = HsvImage::from_rgb(rgb);
    for (v, &a) in hsv.v.data_mut().iter_mut().zip(amp_ml.data()) {
        *v = (a / level).min(1.0);
    }
    Ok((hsv.to_rgb()?, level))
}

pub fn encode_brightness(rgb: &RgbImage, amp_ml: &RealImage, p: f64) -> Result<RgbImage> {
    encode_brightness_with_level(rgb, amp_ml, p).map(|(img, _)| img)
}

/// Coder parameters. Defaults: 9 subbands, a = 0.75 with equalization,
/// 9x9 looks, 95th percentile, amplitude averaging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoderConfig {
    pub n_sub: usize,
    pub a: f64,
    pub equalize: bool,
    pub looks: LookParams,
    pub percentile: f64,
    /// Average complex subband samples before taking the magnitude.
    pub complex_average: bool,
}

impl Default for CoderConfig {
    fn default() -> Self {
        CoderConfig {
            n_sub: 9,
            a: 0.75,
            equalize: true,
            looks: LookParams { n_az: 9, n_rg: 9 },
            percentile: 95.0,
            complex_average: false,
        }
    }
}

impl CoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_sub < 2 {
            return Err(param(format!("n_sub must be >= 2, got {}", self.n_sub)));
        }
        if !(0.5..=1.0).contains(&self.a) {
            return Err(param(format!("a must be in [0.5, 1], got {}", self.a)));
        }
        if !(self.percentile > 0.0 && self.percentile <= 100.0) {
            return Err(param(format!(
                "percentile must be in (0, 100], got {}",
                self.percentile
            )));
        }
        self.looks.validate()
    }
}

/// Everything the coder produces along the way.
#[derive(Debug, Clone)]
pub struct Coding {
    pub layout: SubbandLayout,
    /// Multilooked subband amplitudes, before normalization.
    pub subband_amplitudes: Vec<RealImage>,
    /// Palette composite before brightness coding.
    pub composite: RgbImage,
    /// Multilooked full-band amplitude driving brightness.
    pub brightness: RealImage,
    /// Amplitude mapped to full brightness.
    pub clip_level: f64,
    pub rgb: RgbImage,
}

/// Runs the full coder and keeps the intermediate products.
pub fn chromatic_code_detailed(img: &SlcImage, cfg: &CoderConfig) -> Result<Coding> {
    cfg.validate()?;
    let stack = decompose(img, cfg.n_sub, cfg.a, cfg.equalize)?;
    let subband_amplitudes = stack
        .images
        .iter()
        .map(|band| {
            if cfg.complex_average {
                Ok(multilook_complex(band, cfg.looks)?.amplitude())
            } else {
                multilook(&band.amplitude(), cfg.looks)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let palette = build_palette(cfg.n_sub)?;
    let composite = composite_rgb(&normalize_subbands(&subband_amplitudes)?, &palette)?;
    let brightness = multilook(&img.amplitude(), cfg.looks)?;
    let (rgb, clip_level) = encode_brightness_with_level(&composite, &brightness, cfg.percentile)?;
    Ok(Coding {
        layout: stack.layout,
        subband_amplitudes,
        composite,
        brightness,
        clip_level,
        rgb,
    })
}

pub fn chromatic_code(img: &SlcImage, cfg: &CoderConfig) -> Result<RgbImage> {
    chromatic_code_detailed(img, cfg).map(|c| c.rgb)
}
