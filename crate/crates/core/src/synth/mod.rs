//! Synthetic SLC scenes: seeded speckle plus the three interference models
//! (narrowband tones, focused pulsed-LFM patches, and Doppler-mismatched
//! point responses).
//!
//! Time axes are sample-based: range time `tau = col / f_s` and azimuth time
//! `eta = row / prf`, with the PRF supplied by each injector.

mod lfm;
mod nbi;
pub mod scene;
mod unfocused;

pub use lfm::{inject_lfm, LfmParams};
pub use nbi::{inject_nbi, NbiParams, Tone};
pub use unfocused::{inject_unfocused, point_response, UnfocusedParams, SPEED_OF_LIGHT};

use num_complex::{Complex32, Complex64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use rustfft::FftPlanner;

use crate::error::{param, Result};
use crate::slc_io::{SlcImage, SlcMeta};
use crate::spectral::{equalization_window, plan_layout};

/// Circular complex Gaussian field with `E|z|^2 = sigma`.
pub fn gen_speckle(
    rows: usize,
    cols: usize,
    sigma: f64,
    seed: u64,
    meta: SlcMeta,
) -> Result<SlcImage> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(param(format!("speckle variance must be > 0, got {sigma}")));
    }
    let normal = Normal::new(0.0, (sigma / 2.0).sqrt()).map_err(|e| param(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..rows * cols)
        .map(|_| {
            let re: f64 = normal.sample(&mut rng);
            let im: f64 = normal.sample(&mut rng);
            Complex32::new(re as f32, im as f32)
        })
        .collect();
    SlcImage::new(rows, cols, data, meta)
}

/// Applies the processor's range window to `img`: every valid-band bin `n`
/// is multiplied by `equalization_window(a, L)[n]` and out-of-band bins are
/// cleared. Models the spectral taper that equalization undoes.
pub fn shape_spectrum(img: &SlcImage, a: f64) -> Result<SlcImage> {
    let layout = plan_layout(img.cols(), img.meta().oversample, 2)?;
    let window = equalization_window(a, layout.valid_len)?;
    let (rows, cols) = img.dims();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(cols);
    let inv = planner.plan_fft_inverse(cols);
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let mut line: Vec<Complex64> = img
            .row(r)
            .iter()
            .map(|z| Complex64::new(z.re.into(), z.im.into()))
            .collect();
        fwd.process(&mut line);
        let mut shaped = vec![Complex64::new(0.0, 0.0); cols];
        for (n, c) in layout.valid_bins().enumerate() {
            let bin = layout.fft_bin(c);
            shaped[bin] = line[bin] * window[n];
        }
        inv.process(&mut shaped);
        data.extend(
            shaped
                .iter()
                .map(|z| Complex32::new((z.re / cols as f64) as f32, (z.im / cols as f64) as f32)),
        );
    }
    SlcImage::new(rows, cols, data, img.meta().clone())
}

/// Adds `f(row, col)` over the given block. Exactly-zero contributions leave
/// the stored sample untouched.
pub(crate) fn add_block(
    img: SlcImage,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
    mut f: impl FnMut(usize, usize) -> Complex64,
) -> Result<SlcImage> {
    let (n_rows, n_cols) = img.dims();
    let meta = img.meta().clone();
    let mut data = img.into_data();
    for r in rows {
        for c in cols.clone() {
            let add = f(r, c);
            if add.re == 0.0 && add.im == 0.0 {
                continue;
            }
            let z = &mut data[r * n_cols + c];
            *z = Complex32::new(
                (f64::from(z.re) + add.re) as f32,
                (f64::from(z.im) + add.im) as f32,
            );
        }
    }
    SlcImage::new(n_rows, n_cols, data, meta)
}
