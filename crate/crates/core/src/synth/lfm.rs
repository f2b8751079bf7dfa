use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;

use super::add_block;
use crate::error::{param, Result};
use crate::slc_io::SlcImage;

/// Focused image-domain response of one pulsed-LFM interferer: a separable
/// 2-D chirp spanning the synthetic aperture in azimuth and the residual
/// pulse length in range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LfmParams {
    /// Patch center `(row, col)`.
    pub center: (usize, usize),
    /// Interferer carrier offset from the SAR center frequency, Hz.
    pub fc_hz: f64,
    /// Interferer FM rate, Hz/s.
    pub ki: f64,
    /// SAR transmit FM rate, Hz/s.
    pub kr: f64,
    /// Interferer pulse duration, s.
    pub ti: f64,
    /// Azimuth FM rate, Hz/s.
    pub ka: f64,
    /// Synthetic aperture time, s.
    pub ta: f64,
    pub prf_hz: f64,
    pub amp: f64,
}

impl LfmParams {
    /// Residual range FM rate `Kr Ki / (Ki - Kr)`.
    pub fn range_rate(&self) -> f64 {
        self.kr * self.ki / (self.ki - self.kr)
    }

    /// Residual range duration `Ti |Ki - Kr| / Kr`.
    pub fn range_duration(&self) -> f64 {
        self.ti * (self.ki - self.kr).abs() / self.kr
    }

    /// Instantaneous range frequency at the patch edges (start, end).
    pub fn sweep_hz(&self) -> (f64, f64) {
        let half = self.range_duration() / 2.0;
        let k = self.range_rate();
        (self.fc_hz - k * half, self.fc_hz + k * half)
    }

    fn validate_basic(&self) -> Result<()> {
        if self.ki == self.kr {
            return Err(param("interferer and SAR FM rates must differ"));
        }
        if !(self.kr > 0.0) {
            return Err(param(format!("SAR FM rate must be > 0, got {}", self.kr)));
        }
        if !(self.ti > 0.0 && self.ta > 0.0) {
            return Err(param("pulse duration and aperture time must be > 0"));
        }
        if !(self.prf_hz > 0.0) {
            return Err(param(format!("PRF must be > 0, got {}", self.prf_hz)));
        }
        let all = [
            self.fc_hz,
            self.ki,
            self.kr,
            self.ti,
            self.ka,
            self.ta,
            self.prf_hz,
            self.amp,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(param("LFM parameters must be finite"));
        }
        Ok(())
    }

    /// Row and column ranges covered by the patch, after sample-center
    /// inclusion (`-T/2 <= t < T/2`).
    pub fn footprint(&self, sample_rate_hz: f64) -> Result<(Range<isize>, Range<isize>)> {
        self.validate_basic()?;
        let span = |center: usize, half_samples: f64| {
            let c = center as f64;
            (c - half_samples).ceil() as isize..(c + half_samples).ceil() as isize
        };
        Ok((
            span(self.center.0, self.ta * self.prf_hz / 2.0),
            span(self.center.1, self.range_duration() * sample_rate_hz / 2.0),
        ))
    }

    /// Continuous-time patch energy `amp^2 (Ta prf) (Tr' fs)`.
    pub fn analytic_energy(&self, sample_rate_hz: f64) -> f64 {
        self.amp * self.amp * self.ta * self.prf_hz * self.range_duration() * sample_rate_hz
    }
}

fn to_unsigned(r: Range<isize>, len: usize, axis: &str) -> Result<Range<usize>> {
    if r.start < 0 || r.end > len as isize {
        return Err(param(format!(
            "LFM patch {axis} extent {r:?} exceeds 0..{len}"
        )));
    }
    Ok(r.start as usize..r.end as usize)
}

pub fn inject_lfm(img: SlcImage, params: &LfmParams) -> Result<SlcImage> {
    let fs = img.meta().sample_rate_hz;
    let (rows, cols) = params.footprint(fs)?;
    let rows = to_unsigned(rows, img.rows(), "azimuth")?;
    let cols = to_unsigned(cols, img.cols(), "range")?;
    let kr2 = params.range_rate();
    let (r0, c0) = (params.center.0 as f64, params.center.1 as f64);
    add_block(img, rows, cols, |r, c| {
        let eta = (r as f64 - r0) / params.prf_hz;
        let t = (c as f64 - c0) / fs;
        let phase = -PI * params.ka * eta * eta + 2.0 * PI * params.fc_hz * t + PI * kr2 * t * t;
        Complex64::from_polar(params.amp, phase)
    })
}
