//! Boxcar multilooking and equivalent-number-of-looks estimation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::slc_io::RealImage;
use crate::spectral::ComplexImage;

/// Window size in azimuth (rows) and range (columns).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LookParams {
    pub n_az: usize,
    pub n_rg: usize,
}

impl LookParams {
    pub fn new(n_az: usize, n_rg: usize) -> Result<Self> {
        let looks = LookParams { n_az, n_rg };
        looks.validate()?;
        Ok(looks)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_az == 0 || self.n_rg == 0 {
            return Err(param(format!(
                "looks must be >= 1, got {}x{}",
                self.n_az, self.n_rg
            )));
        }
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.n_az * self.n_rg
    }
}

impl std::fmt::Display for LookParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.n_az, self.n_rg)
    }
}

impl std::str::FromStr for LookParams {
    type Err = Error;

    /// Parses `AZxRG`, e.g. `9x9` or `4x20`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, r) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| param(format!("looks must look like 9x9, got `{s}`")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| param(format!("bad look count `{v}`")))
        };
        LookParams::new(parse(a)?, parse(r)?)
    }
}

/// Clipped window `[lo, hi)` of `size` samples around `i` in `0..len`.
/// The window starts `(size - 1) / 2` samples before `i`.
fn window(i: usize, size: usize, len: usize) -> (usize, usize) {
    let before = (size - 1) / 2;
    let lo = i.saturating_sub(before);
    let hi = (i + size - before).min(len);
    (lo, hi)
}

/// Separable boxcar mean with border renormalization. Summation order is
/// fixed per output pixel, so results do not depend on thread scheduling.
fn box_mean<T>(data: &[T], rows: usize, cols: usize, looks: LookParams) -> Vec<T>
where
    T: Copy + Send + Sync + Default + std::ops::Add<Output = T> + std::ops::Div<f64, Output = T>,
{
    let horizontal: Vec<T> = data
        .par_chunks(cols)
        .flat_map_iter(|line| {
            (0..cols).map(move |c| {
                let (lo, hi) = window(c, looks.n_rg, cols);
                line[lo..hi].iter().fold(T::default(), |acc, &v| acc + v)
            })
        })
        .collect();
    (0..rows)
        .into_par_iter()
        .flat_map_iter(|r| {
            let (lo, hi) = window(r, looks.n_az, rows);
            let horizontal = &horizontal;
            (0..cols).map(move |c| {
                let (clo, chi) = window(c, looks.n_rg, cols);
                let count = ((hi - lo) * (chi - clo)) as f64;
                let sum = (lo..hi).fold(T::default(), |acc, rr| acc + horizontal[rr * cols + c]);
                sum / count
            })
        })
        .collect()
}

/// Local mean of a nonnegative real plane over an `n_az x n_rg` window.
pub fn multilook(img: &RealImage, looks: LookParams) -> Result<RealImage> {
    looks.validate()?;
    for (i, &v) in img.data().iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
        if v < 0.0 {
            return Err(Error::Domain(format!(
                "multilook input must be nonnegative, got {v} at index {i}"
            )));
        }
    }
    RealImage::new(
        img.rows(),
        img.cols(),
        box_mean(img.data(), img.rows(), img.cols(), looks),
    )
}

/// Local mean of complex samples; used when coding |mean(I_k)| instead of mean(|I_k|).
pub fn multilook_complex(img: &ComplexImage, looks: LookParams) -> Result<ComplexImage> {
    looks.validate()?;
    let (rows, cols) = img.dims();
    let data: Vec<Complex64> = box_mean(img.data(), rows, cols, looks);
    ComplexImage::new(rows, cols, data)
}

/// Non-overlapping block means; trailing partial blocks are dropped.
pub fn block_average(img: &RealImage, looks: LookParams) -> Result<RealImage> {
    looks.validate()?;
    let out_rows = img.rows() / looks.n_az;
    let out_cols = img.cols() / looks.n_rg;
    if out_rows == 0 || out_cols == 0 {
        return Err(param(format!(
            "{looks} blocks do not fit a {}x{} image",
            img.rows(),
            img.cols()
        )));
    }
    let n = looks.count() as f64;
    Ok(RealImage::from_fn(out_rows, out_cols, |r, c| {
        let mut sum = 0.0;
        for rr in r * looks.n_az..(r + 1) * looks.n_az {
            for cc in c * looks.n_rg..(c + 1) * looks.n_rg {
                sum += img.get(rr, cc);
            }
        }
        sum / n
    }))
}

/// Method-of-moments ENL: squared mean over unbiased variance.
pub fn estimate_enl(intensity: &RealImage) -> Result<f64> {
    enl_of(intensity.data())
}

pub fn enl_of(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Domain(format!(
            "ENL needs at least 2 samples, got {n}"
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Domain(format!(
            "intensity must be finite and nonnegative (index {i})"
        )));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Err(Error::Domain("ENL undefined for a constant image".into()));
    }
    Ok(mean * mean / var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_stays_constant() {
        let img = RealImage::filled(13, 17, 2.5);
        for looks in [(1, 1), (3, 3), (4, 20), (9, 9)] {
            let out = multilook(&img, LookParams::new(looks.0, looks.1).unwrap()).unwrap();
            assert!(out.data().iter().all(|v| (v - 2.5).abs() < 1e-12));
        }
    }

    #[test]
    fn impulse_spreads_to_one_ninth() {
        let mut img = RealImage::filled(7, 7, 0.0);
        img.set(3, 3, 1.0);
        let out = multilook(&img, LookParams::new(3, 3).unwrap()).unwrap();
        assert_eq!(out.get(3, 3), 1.0 / 9.0);
        assert_eq!(out.get(2, 4), 1.0 / 9.0);
        assert_eq!(out.get(1, 3), 0.0);
    }

    #[test]
    fn corner_window_is_renormalized() {
        let img = RealImage::filled(5, 5, 1.0);
        let out = multilook(&img, LookParams::new(3, 3).unwrap()).unwrap();
        assert_eq!(out.get(0, 0), 1.0);
        assert_eq!(out.get(4, 4), 1.0);
    }

    #[test]
    fn even_window_offset() {
        // size 4 at i=5 covers 4..8
        assert_eq!(window(5, 4, 20), (4, 8));
        assert_eq!(window(0, 4, 20), (0, 3));
        assert_eq!(window(19, 4, 20), (18, 20));
        assert_eq!(window(3, 1, 20), (3, 4));
    }

    #[test]
    fn rejects_bad_input() {
        let mut img = RealImage::filled(3, 3, 1.0);
        img.set(1, 1, f64::NAN);
        assert!(matches!(
            multilook(&img, LookParams { n_az: 3, n_rg: 3 }),
            Err(Error::NonFinite { index: 4 })
        ));
        assert!(LookParams::new(0, 3).is_err());
    }

    #[test]
    fn enl_of_constant_is_an_error() {
        assert!(estimate_enl(&RealImage::filled(4, 4, 3.0)).is_err());
        assert!(enl_of(&[1.0]).is_err());
    }

    #[test]
    fn enl_of_two_values() {
        // mean 2, unbiased variance 2
        assert_eq!(enl_of(&[1.0, 3.0]).unwrap(), 2.0);
    }

    #[test]
    fn looks_parse() {
        assert_eq!(
            "4x20".parse::<LookParams>().unwrap(),
            LookParams { n_az: 4, n_rg: 20 }
        );
        assert!("9".parse::<LookParams>().is_err());
        assert!("0x9".parse::<LookParams>().is_err());
    }
}
