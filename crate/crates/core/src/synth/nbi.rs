use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;

use super::add_block;
use crate::error::{param, Result};
use crate::slc_io::SlcImage;

/// One continuous-wave component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    /// Baseband frequency relative to the SAR center frequency.
    pub freq_hz: f64,
    pub amp: f64,
    pub phase: f64,
}

/// Narrowband interference: a sum of tones over a block of the image.
#[derive(Debug, Clone, PartialEq)]
pub struct NbiParams {
    pub tones: Vec<Tone>,
    pub rows: Range<usize>,
    pub cols: Range<usize>,
    /// Optional per-row amplitude factor, indexed from `rows.start`.
    pub row_gain: Option<Vec<f64>>,
}

impl NbiParams {
    pub fn validate(&self, img: &SlcImage) -> Result<()> {
        let nyquist = img.meta().sample_rate_hz / 2.0;
        for t in &self.tones {
            if !(t.freq_hz.abs() <= nyquist) {
                return Err(param(format!(
                    "tone at {} Hz exceeds Nyquist {nyquist} Hz",
                    t.freq_hz
                )));
            }
            if !(t.amp.is_finite() && t.phase.is_finite()) {
                return Err(param("tone amplitude and phase must be finite"));
            }
        }
        if self.rows.end > img.rows()
            || self.cols.end > img.cols()
            || self.rows.start > self.rows.end
            || self.cols.start > self.cols.end
        {
            return Err(param(format!(
                "NBI span {:?}x{:?} outside a {}x{} image",
                self.rows,
                self.cols,
                img.rows(),
                img.cols()
            )));
        }
        if let Some(g) = &self.row_gain {
            if g.len() != self.rows.len() {
                return Err(param(format!(
                    "row_gain has {} entries for {} rows",
                    g.len(),
                    self.rows.len()
                )));
            }
        }
        Ok(())
    }
}

/// Adds `sum_l A_l exp(j (2 pi f_l tau + phi_l))`, `tau = col / f_s`, over the span.
pub fn inject_nbi(img: SlcImage, params: &NbiParams) -> Result<SlcImage> {
    params.validate(&img)?;
    let fs = img.meta().sample_rate_hz;
    let row0 = params.rows.start;
    add_block(img, params.rows.clone(), params.cols.clone(), |r, c| {
        let gain = params.row_gain.as_ref().map_or(1.0, |g| g[r - row0]);
        let tau = c as f64 / fs;
        params
            .tones
            .iter()
            .map(|t| Complex64::from_polar(gain * t.amp, 2.0 * PI * t.freq_hz * tau + t.phase))
            .sum()
    })
}
