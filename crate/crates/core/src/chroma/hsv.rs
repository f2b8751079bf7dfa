//! Hexcone HSV <-> RGB conversion. Hue is a fraction of a turn in `[0, 1)`;
//! a hue of exactly 1 is accepted as 0.

use crate::error::{param, Result};
use crate::slc_io::{RealImage, RgbImage};

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(param(format!("{name} must be in [0, 1], got {v}")));
    }
    Ok(())
}

pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Result<[f64; 3]> {
    check_unit("hue", h)?;
    check_unit("saturation", s)?;
    check_unit("value", v)?;
    Ok(hsv_to_rgb_unchecked(h, s, v))
}

pub(crate) fn hsv_to_rgb_unchecked(h: f64, s: f64, v: f64) -> [f64; 3] {
    let h6 = if h >= 1.0 { 0.0 } else { h * 6.0 };
    let sector = (h6.floor() as usize).min(5);
    let f = h6 - sector as f64;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match sector {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

pub fn rgb_to_hsv(r: f64, g: f64, b: f64) -> Result<[f64; 3]> {
    check_unit("red", r)?;
    check_unit("green", g)?;
    check_unit("blue", b)?;
    Ok(rgb_to_hsv_unchecked(r, g, b))
}

pub(crate) fn rgb_to_hsv_unchecked(r: f64, g: f64, b: f64) -> [f64; 3] {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    if delta == 0.0 {
        return [0.0, s, max];
    }
    let sector = if max == r {
        ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let h = sector / 6.0;
    [if h >= 1.0 { 0.0 } else { h }, s, max]
}

/// Color image in HSV planes.
#[derive(Debug, Clone, PartialEq)]
pub struct HsvImage {
    pub h: RealImage,
    pub s: RealImage,
    pub v: RealImage,
}

impl HsvImage {
    pub fn from_rgb(rgb: &RgbImage) -> Self {
        let (rows, cols) = rgb.dims();
        let hsv: Vec<[f64; 3]> = rgb
            .pixels()
            .iter()
            .map(|p| rgb_to_hsv_unchecked(p[0], p[1], p[2]))
            .collect();
        let plane = |i: usize| {
            RealImage::new(rows, cols, hsv.iter().map(|p| p[i]).collect()).expect("dims")
        };
        HsvImage {
            h: plane(0),
            s: plane(1),
            v: plane(2),
        }
    }

    pub fn to_rgb(&self) -> Result<RgbImage> {
        let (rows, cols) = self.h.dims();
        let mut pixels = Vec::with_capacity(rows * cols);
        for ((&h, &s), &v) in self.h.data().iter().zip(self.s.data()).zip(self.v.data()) {
            pixels.push(hsv_to_rgb(h, s, v)?);
        }
        RgbImage::new(rows, cols, pixels)
    }
}

/// Smallest distance between two hues on the unit circle.
pub fn hue_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Circular mean of hues, optionally weighted; `None` when the weights cancel.
pub fn circular_mean_hue(hues: &[f64], weights: Option<&[f64]>) -> Option<f64> {
    let (mut x, mut y) = (0.0, 0.0);
    for (i, &h) in hues.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        let ang = 2.0 * std::f64::consts::PI * h;
        x += w * ang.cos();
        y += w * ang.sin();
    }
    if x.hypot(y) < 1e-12 {
        return None;
    }
    Some((y.atan2(x) / (2.0 * std::f64::consts::PI)).rem_euclid(1.0))
}
