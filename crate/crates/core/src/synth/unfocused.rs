use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::add_block;
use crate::error::{param, Result};
use crate::slc_io::SlcImage;
use crate::spectral::{plan_layout, ComplexImage};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Point target whose azimuth spectrum is offset by a Doppler mismatch `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnfocusedParams {
    /// `(row, col)` of the focused response.
    pub target: (usize, usize),
    /// Doppler shift, Hz.
    pub delta_hz: f64,
    /// Closest-approach range, m.
    pub r0_m: f64,
    /// Platform velocity, m/s.
    pub va_mps: f64,
    /// Radar center frequency, Hz.
    pub f0_hz: f64,
    pub prf_hz: f64,
    pub amp: f64,
}

impl UnfocusedParams {
    /// Coefficient `alpha` of the coupling phase `alpha * f_eta * f_tau`:
    /// `pi R0 c delta / (Va^2 sqrt(1 - c^2 delta^2 / (4 f0^2 Va^2)))`.
    pub fn coupling(&self) -> Result<f64> {
        let c = SPEED_OF_LIGHT;
        let (va, f0, d) = (self.va_mps, self.f0_hz, self.delta_hz);
        let arg = 1.0 - c * c * d * d / (4.0 * f0 * f0 * va * va);
        if !(arg > 0.0) {
            return Err(param(format!(
                "Doppler shift {d} Hz gives a non-positive square-root argument {arg}"
            )));
        }
        Ok(PI * self.r0_m * c * d / (va * va * arg.sqrt()))
    }

    fn validate(&self, img: &SlcImage) -> Result<()> {
        let all = [
            self.delta_hz,
            self.r0_m,
            self.va_mps,
            self.f0_hz,
            self.prf_hz,
            self.amp,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(param("unfocused-target parameters must be finite"));
        }
        if !(self.va_mps > 0.0 && self.f0_hz > 0.0 && self.prf_hz > 0.0 && self.r0_m > 0.0) {
            return Err(param("R0, Va, f0 and PRF must be > 0"));
        }
        if self.target.0 >= img.rows() || self.target.1 >= img.cols() {
            return Err(param(format!(
                "target {:?} outside a {}x{} image",
                self.target,
                img.rows(),
                img.cols()
            )));
        }
        self.coupling().map(|_| ())
    }

    /// Azimuth displacement in rows of range-frequency component `f_tau`:
    /// the coupling phase is a linear azimuth-frequency ramp, i.e. a shift of
    /// `-alpha f_tau / (2 pi)` seconds.
    pub fn row_shift(&self, f_tau_hz: f64) -> Result<f64> {
        Ok(-self.coupling()? * f_tau_hz / (2.0 * PI) * self.prf_hz)
    }
}

fn signed_index(k: usize, n: usize) -> isize {
    if k < n.div_ceil(2) {
        k as isize
    } else {
        k as isize - n as isize
    }
}

/// Band-limited point response at `target` carrying the coupling phase.
///
/// The range spectrum is restricted to the valid band and, for an even row
/// count, the azimuth Nyquist bin is dropped so that `delta -> -delta`
/// mirrors the response exactly. The response is scaled so its peak is 1
/// when `delta = 0`.
pub fn point_response(
    rows: usize,
    cols: usize,
    sample_rate_hz: f64,
    oversample: f64,
    p: &UnfocusedParams,
) -> Result<ComplexImage> {
    let alpha = p.coupling()?;
    let layout = plan_layout(cols, oversample, 2)?;
    let (t_row, t_col) = (p.target.0 as f64, p.target.1 as f64);

    let az_bins: Vec<usize> = (0..rows)
        .filter(|&k| !(rows.is_multiple_of(2) && rows > 1 && k == rows / 2))
        .collect();
    let rg_bins: Vec<(usize, f64)> = layout
        .valid_bins()
        .map(|c| (layout.fft_bin(c), layout.bin_frequency(c, sample_rate_hz)))
        .collect();
    let scale = 1.0 / (az_bins.len() * rg_bins.len()) as f64;

    let mut spec = vec![Complex64::new(0.0, 0.0); rows * cols];
    for &ka in &az_bins {
        let ia = signed_index(ka, rows);
        let f_eta = ia as f64 * p.prf_hz / rows as f64;
        for &(kr, f_tau) in &rg_bins {
            let ir = signed_index(kr, cols);
            let phase =
                -2.0 * PI * (ia as f64 * t_row / rows as f64 + ir as f64 * t_col / cols as f64)
                    + alpha * f_eta * f_tau;
            spec[ka * cols + kr] = Complex64::from_polar(scale, phase);
        }
    }

    // Unnormalized inverse 2-D transform; `scale` already fixes the peak.
    let mut planner = FftPlanner::<f64>::new();
    let inv_rg = planner.plan_fft_inverse(cols);
    for line in spec.chunks_mut(cols) {
        inv_rg.process(line);
    }
    let inv_az = planner.plan_fft_inverse(rows);
    let mut column = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = spec[r * cols + c];
        }
        inv_az.process(&mut column);
        for r in 0..rows {
            spec[r * cols + c] = column[r];
        }
    }
    ComplexImage::new(rows, cols, spec)
}

pub fn inject_unfocused(img: SlcImage, params: &UnfocusedParams) -> Result<SlcImage> {
    params.validate(&img)?;
    if params.amp == 0.0 {
        return Ok(img);
    }
    let m = img.meta();
    let response = point_response(
        img.rows(),
        img.cols(),
        m.sample_rate_hz,
        m.oversample,
        params,
    )?;
    let (rows, cols) = img.dims();
    add_block(img, 0..rows, 0..cols, |r, c| {
        response.get(r, c) * params.amp
    })
}
