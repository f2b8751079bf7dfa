//! Range-frequency subband decomposition.
//!
//! Each azimuth line is transformed along range, its spectrum is centered so
//! that zero frequency sits at bin `cols / 2`, and the valid band
//! (`round(cols / oversample)` bins around zero frequency) is split into
//! `n_sub` contiguous subbands. Every subband is transformed back in place,
//! keeping its bins at their original positions, so all subband images share
//! the source pixel grid.

use std::f64::consts::PI;
use std::ops::Range;
use std::sync::Arc;

use num_complex::{Complex32, Complex64};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{param, Error, Result};
use crate::slc_io::{RealImage, SlcImage, SlcMeta};

/// Complex image in double precision, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexImage {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexImage {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexImage {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidImage(format!(
                "complex image holds {} samples, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(ComplexImage { rows, cols, data })
    }

    pub fn from_slc(img: &SlcImage) -> Self {
        let data = img
            .data()
            .iter()
            .map(|z| Complex64::new(z.re.into(), z.im.into()))
            .collect();
        ComplexImage {
            rows: img.rows(),
            cols: img.cols(),
            data,
        }
    }

    /// Rounds to single precision as an [`SlcImage`].
    pub fn to_slc(&self, meta: SlcMeta) -> Result<SlcImage> {
        let data = self
            .data
            .iter()
            .map(|z| Complex32::new(z.re as f32, z.im as f32))
            .collect();
        SlcImage::new(self.rows, self.cols, data, meta)
    }

    fn from_rows(rows: usize, cols: usize, lines: Vec<Vec<Complex64>>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for line in lines {
            data.extend(line);
        }
        ComplexImage { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn amplitude(&self) -> RealImage {
        RealImage::new(
            self.rows,
            self.cols,
            self.data.iter().map(|z| z.norm()).collect(),
        )
        .expect("dims preserved")
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Placement of the valid band and its subbands in the centered range spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubbandLayout {
    pub n_sub: usize,
    pub cols: usize,
    pub valid_len: usize,
    /// First valid bin, as an index into the centered spectrum.
    pub valid_start: usize,
    /// `n_sub + 1` boundaries relative to `valid_start`.
    pub bounds: Vec<usize>,
}

impl SubbandLayout {
    /// Centered-spectrum bins of subband `k`.
    pub fn subband_bins(&self, k: usize) -> Range<usize> {
        self.valid_start + self.bounds[k]..self.valid_start + self.bounds[k + 1]
    }

    pub fn valid_bins(&self) -> Range<usize> {
        self.valid_start..self.valid_start + self.valid_len
    }

    pub fn widths(&self) -> Vec<usize> {
        self.bounds.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Centered bin nearest the middle of subband `k` (rounded down).
    pub fn center_bin(&self, k: usize) -> usize {
        self.valid_start + (self.bounds[k] + self.bounds[k + 1]) / 2
    }

    /// Signed frequency index of a centered bin (0 at `cols / 2`).
    pub fn frequency_index(&self, centered: usize) -> isize {
        centered as isize - (self.cols / 2) as isize
    }

    /// Frequency in Hz of a centered bin.
    pub fn bin_frequency(&self, centered: usize, sample_rate_hz: f64) -> f64 {
        self.frequency_index(centered) as f64 * sample_rate_hz / self.cols as f64
    }

    pub fn center_frequency(&self, k: usize, sample_rate_hz: f64) -> f64 {
        self.bin_frequency(self.center_bin(k), sample_rate_hz)
    }

    /// FFT-order bin holding centered bin `centered`.
    pub fn fft_bin(&self, centered: usize) -> usize {
        let f = self.frequency_index(centered);
        f.rem_euclid(self.cols as isize) as usize
    }

    pub fn subband_of_bin(&self, centered: usize) -> Option<usize> {
        if !self.valid_bins().contains(&centered) {
            return None;
        }
        let rel = centered - self.valid_start;
        Some(self.bounds.partition_point(|&b| b <= rel) - 1)
    }

    /// Subband containing frequency `hz`, after rounding to the nearest bin.
    pub fn subband_of_frequency(&self, hz: f64, sample_rate_hz: f64) -> Option<usize> {
        let idx =
            (hz * self.cols as f64 / sample_rate_hz).round() as isize + (self.cols / 2) as isize;
        if idx < 0 {
            return None;
        }
        self.subband_of_bin(idx as usize)
    }
}

/// Lays out `n_sub` near-equal subbands over the valid band.
pub fn plan_layout(cols: usize, oversample: f64, n_sub: usize) -> Result<SubbandLayout> {
    if !(oversample.is_finite() && oversample >= 1.0) {
        return Err(param(format!("oversample must be >= 1, got {oversample}")));
    }
    if n_sub < 2 {
        return Err(param(format!("n_sub must be >= 2, got {n_sub}")));
    }
    if cols < 2 {
        return Err(param(format!("need at least 2 range samples, got {cols}")));
    }
    let valid_len = ((cols as f64 / oversample).round() as usize).min(cols);
    if n_sub > valid_len {
        return Err(param(format!(
            "n_sub = {n_sub} exceeds the {valid_len}-bin valid band"
        )));
    }
    let valid_start = (cols - valid_len) / 2;
    // round(k L / n), halves up, in integer arithmetic.
    let bounds = (0..=n_sub)
        .map(|k| (2 * k * valid_len + n_sub) / (2 * n_sub))
        .collect();
    Ok(SubbandLayout {
        n_sub,
        cols,
        valid_len,
        valid_start,
        bounds,
    })
}

/// Cosine profile `x[n] = a - (1 - a) cos(2 pi n / L)` over the valid band.
pub fn equalization_window(a: f64, valid_len: usize) -> Result<Vec<f64>> {
    if !(0.5..=1.0).contains(&a) {
        return Err(param(format!(
            "equalization coefficient must be in [0.5, 1], got {a}"
        )));
    }
    if valid_len < 2 {
        return Err(param(format!(
            "valid band needs >= 2 bins, got {valid_len}"
        )));
    }
    let len = valid_len as f64;
    Ok((0..valid_len)
        .map(|n| a - (1.0 - a) * (2.0 * PI * n as f64 / len).cos())
        .collect())
}

/// Spatially registered subband images of one SLC.
#[derive(Debug, Clone)]
pub struct SubbandStack {
    pub layout: SubbandLayout,
    pub images: Vec<ComplexImage>,
}

impl SubbandStack {
    pub fn n_sub(&self) -> usize {
        self.layout.n_sub
    }

    /// Pixelwise sum over all subbands.
    pub fn sum(&self) -> ComplexImage {
        let (rows, cols) = self.images[0].dims();
        let mut out = ComplexImage::zeros(rows, cols);
        for img in &self.images {
            for (o, z) in out.data.iter_mut().zip(&img.data) {
                *o += z;
            }
        }
        out
    }

    pub fn amplitudes(&self) -> Vec<RealImage> {
        self.images.iter().map(ComplexImage::amplitude).collect()
    }
}

struct RowTransform {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    cols: usize,
}

impl RowTransform {
    fn new(cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        RowTransform {
            forward: planner.plan_fft_forward(cols),
            inverse: planner.plan_fft_inverse(cols),
            cols,
        }
    }

    fn spectrum(&self, line: &[Complex64]) -> Vec<Complex64> {
        let mut buf = line.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform with 1/N normalization.
    fn synthesize(&self, mut spec: Vec<Complex64>) -> Vec<Complex64> {
        self.inverse.process(&mut spec);
        let scale = 1.0 / self.cols as f64;
        spec.iter_mut().for_each(|z| *z *= scale);
        spec
    }
}

/// Splits every range line of `img` into `n_sub` subband images.
///
/// With `equalize` set, valid-band bin `n` is divided by
/// `equalization_window(a, L)[n]` before partitioning.
pub fn decompose(img: &SlcImage, n_sub: usize, a: f64, equalize: bool) -> Result<SubbandStack> {
    decompose_complex(
        &ComplexImage::from_slc(img),
        img.meta().oversample,
        n_sub,
        a,
        equalize,
    )
}

/// [`decompose`] on a double-precision image with an explicit oversampling ratio.
pub fn decompose_complex(
    img: &ComplexImage,
    oversample: f64,
    n_sub: usize,
    a: f64,
    equalize: bool,
) -> Result<SubbandStack> {
    let layout = plan_layout(img.cols(), oversample, n_sub)?;
    let window = equalization_window(a, layout.valid_len)?;
    let gain: Vec<f64> = if equalize {
        window.iter().map(|x| 1.0 / x).collect()
    } else {
        vec![1.0; layout.valid_len]
    };
    let (rows, cols) = img.dims();
    let tf = RowTransform::new(cols);

    let per_row: Vec<Vec<Vec<Complex64>>> = (0..rows)
        .into_par_iter()
        .map(|r| {
            let spec = tf.spectrum(img.row(r));
            (0..n_sub)
                .map(|k| {
                    let mut sub = vec![Complex64::new(0.0, 0.0); cols];
                    for c in layout.subband_bins(k) {
                        let bin = layout.fft_bin(c);
                        sub[bin] = spec[bin] * gain[c - layout.valid_start];
                    }
                    tf.synthesize(sub)
                })
                .collect()
        })
        .collect();

    let mut lines_by_band: Vec<Vec<Vec<Complex64>>> =
        (0..n_sub).map(|_| Vec::with_capacity(rows)).collect();
    for row in per_row {
        for (k, line) in row.into_iter().enumerate() {
            lines_by_band[k].push(line);
        }
    }
    let images = lines_by_band
        .into_iter()
        .map(|lines| ComplexImage::from_rows(rows, cols, lines))
        .collect();
    Ok(SubbandStack { layout, images })
}

/// Source image with every range bin outside the valid band removed.
pub fn valid_band_filter(img: &ComplexImage, oversample: f64) -> Result<ComplexImage> {
    let layout = plan_layout(img.cols(), oversample, 2)?;
    let (rows, cols) = img.dims();
    let tf = RowTransform::new(cols);
    let lines = (0..rows)
        .into_par_iter()
        .map(|r| {
            let spec = tf.spectrum(img.row(r));
            let mut kept = vec![Complex64::new(0.0, 0.0); cols];
            for c in layout.valid_bins() {
                let bin = layout.fft_bin(c);
                kept[bin] = spec[bin];
            }
            tf.synthesize(kept)
        })
        .collect();
    Ok(ComplexImage::from_rows(rows, cols, lines))
}

/// Per-line range spectra, centered so zero frequency sits at column `cols / 2`.
pub fn centered_range_spectra(img: &ComplexImage) -> ComplexImage {
    let (rows, cols) = img.dims();
    let tf = RowTransform::new(cols);
    let half = cols / 2;
    let lines = (0..rows)
        .into_par_iter()
        .map(|r| {
            let spec = tf.spectrum(img.row(r));
            (0..cols).map(|c| spec[(c + cols - half) % cols]).collect()
        })
        .collect();
    ComplexImage::from_rows(rows, cols, lines)
}
