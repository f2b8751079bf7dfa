//! SLC container I/O and the real-valued image types shared by the pipeline.
//!
//! A container is a pair of files sharing a stem: `<name>.meta` holds UTF-8
//! `key=value` lines (`rows`, `cols`, `sample_rate_hz`, `oversample`, and an
//! optional `description`), and `<name>.cpx` holds `rows * cols` complex samples
//! as little-endian `f32` pairs `(re, im)`, azimuth-major.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex32;

use crate::error::{param, Error, Result};

pub const META_EXT: &str = "meta";
pub const PAYLOAD_EXT: &str = "cpx";

/// Acquisition metadata carried with every SLC image.
#[derive(Debug, Clone, PartialEq)]
pub struct SlcMeta {
    pub sample_rate_hz: f64,
    /// Range oversampling ratio: sample rate over signal bandwidth.
    pub oversample: f64,
    pub description: String,
}

impl SlcMeta {
    pub fn new(sample_rate_hz: f64, oversample: f64) -> Result<Self> {
        let meta = SlcMeta {
            sample_rate_hz,
            oversample,
            description: String::new(),
        };
        meta.validate()?;
        Ok(meta)
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(param(format!(
                "sample_rate_hz must be > 0, got {}",
                self.sample_rate_hz
            )));
        }
        if !(1.0..=4.0).contains(&self.oversample) {
            return Err(param(format!(
                "oversample must be in [1, 4], got {}",
                self.oversample
            )));
        }
        if self.description.contains('\n') {
            return Err(param("description must be a single line"));
        }
        Ok(())
    }

    /// Signal bandwidth `f_s / oversample`.
    pub fn bandwidth_hz(&self) -> f64 {
        self.sample_rate_hz / self.oversample
    }
}

/// Single-look complex image, rows along azimuth, columns along range.
#[derive(Debug, Clone, PartialEq)]
pub struct SlcImage {
    rows: usize,
    cols: usize,
    data: Vec<Complex32>,
    meta: SlcMeta,
}

impl SlcImage {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex32>, meta: SlcMeta) -> Result<Self> {
        if rows < 1 || cols < 2 {
            return Err(Error::InvalidImage(format!(
                "need rows >= 1 and cols >= 2, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidImage(format!(
                "data holds {} samples, expected {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(index) = data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        meta.validate()?;
        Ok(SlcImage {
            rows,
            cols,
            data,
            meta,
        })
    }

    pub fn zeros(rows: usize, cols: usize, meta: SlcMeta) -> Result<Self> {
        Self::new(
            rows,
            cols,
            vec![Complex32::new(0.0, 0.0); rows * cols],
            meta,
        )
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

    pub fn data(&self) -> &[Complex32] {
        &self.data
    }

    pub fn meta(&self) -> &SlcMeta {
        &self.meta
    }

    pub fn row(&self, r: usize) -> &[Complex32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> Complex32 {
        self.data[r * self.cols + c]
    }

    /// Replaces the metadata, keeping samples.
    pub fn with_meta(self, meta: SlcMeta) -> Result<Self> {
        meta.validate()?;
        Ok(SlcImage { meta, ..self })
    }

    pub fn into_data(self) -> Vec<Complex32> {
        self.data
    }

    pub fn amplitude(&self) -> RealImage {
        RealImage::from_fn(self.rows, self.cols, |r, c| {
            f64::from(self.get(r, c).norm())
        })
    }

    pub fn intensity(&self) -> RealImage {
        RealImage::from_fn(self.rows, self.cols, |r, c| {
            f64::from(self.get(r, c).norm_sqr())
        })
    }
}

/// Real-valued single-plane image (amplitude, intensity, or a color plane).
#[derive(Debug, Clone, PartialEq)]
pub struct RealImage {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealImage {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidImage(format!(
                "plane holds {} values, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(RealImage { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        RealImage {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        RealImage { rows, cols, data }
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// Three-plane color image with every channel value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    rows: usize,
    cols: usize,
    /// Interleaved `[r, g, b]` per pixel, row-major.
    pixels: Vec<[f64; 3]>,
}

impl RgbImage {
    pub fn new(rows: usize, cols: usize, pixels: Vec<[f64; 3]>) -> Result<Self> {
        if pixels.len() != rows * cols {
            return Err(Error::InvalidImage(format!(
                "rgb image holds {} pixels, expected {rows}x{cols}",
                pixels.len()
            )));
        }
        if let Some(index) = pixels
            .iter()
            .position(|p| p.iter().any(|v| !(0.0..=1.0).contains(v)))
        {
            return Err(Error::InvalidImage(format!(
                "channel value outside [0, 1] at pixel {index}: {:?}",
                pixels[index]
            )));
        }
        Ok(RgbImage { rows, cols, pixels })
    }

    pub fn filled(rows: usize, cols: usize, rgb: [f64; 3]) -> Result<Self> {
        Self::new(rows, cols, vec![rgb; rows * cols])
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

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    pub fn get(&self, r: usize, c: usize) -> [f64; 3] {
        self.pixels[r * self.cols + c]
    }

    /// One channel (0 = R, 1 = G, 2 = B) as a plane.
    pub fn channel(&self, ch: usize) -> RealImage {
        RealImage {
            rows: self.rows,
            cols: self.cols,
            data: self.pixels.iter().map(|p| p[ch]).collect(),
        }
    }

    /// 8-bit interleaved bytes with `q = round(255 v)`, halves rounded up.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flat_map(|p| p.map(quantize)).collect()
    }
}

/// Maps `[0, 1]` to a byte with round-half-up.
pub fn quantize(v: f64) -> u8 {
    (255.0 * v.clamp(0.0, 1.0) + 0.5).floor() as u8
}

/// Splits a container path into its `.meta` and `.cpx` members. Accepts the
/// bare stem or either member path.
pub fn container_paths(path: &Path) -> (PathBuf, PathBuf) {
    let stem = match path.extension().and_then(|e| e.to_str()) {
        Some(META_EXT) | Some(PAYLOAD_EXT) => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    (append_ext(&stem, META_EXT), append_ext(&stem, PAYLOAD_EXT))
}

fn append_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_os_string();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

#[derive(Default)]
struct MetaFields {
    rows: Option<usize>,
    cols: Option<usize>,
    sample_rate_hz: Option<f64>,
    oversample: Option<f64>,
    description: Option<String>,
}

fn parse_meta(path: &Path, text: &str) -> Result<(usize, usize, SlcMeta)> {
    let mut f = MetaFields::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            msg,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected key=value, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let dup = || Error::DuplicateKey {
            path: path.to_path_buf(),
            line: line_no,
            key: key.to_string(),
        };
        macro_rules! set {
            ($slot:expr, $v:expr) => {{
                if $slot.is_some() {
                    return Err(dup());
                }
                $slot = Some($v);
            }};
        }
        match key {
            "rows" | "cols" => {
                let n: usize = value
                    .parse()
                    .map_err(|_| parse_err(format!("bad {key} `{value}`")))?;
                if key == "rows" {
                    set!(f.rows, n)
                } else {
                    set!(f.cols, n)
                }
            }
            "sample_rate_hz" | "oversample" => {
                let x: f64 = value
                    .parse()
                    .map_err(|_| parse_err(format!("bad {key} `{value}`")))?;
                if key == "sample_rate_hz" {
                    set!(f.sample_rate_hz, x)
                } else {
                    set!(f.oversample, x)
                }
            }
            "description" => set!(f.description, value.to_string()),
            other => return Err(parse_err(format!("unknown key `{other}`"))),
        }
    }
    let missing = |key| Error::MissingKey {
        path: path.to_path_buf(),
        key,
    };
    let meta = SlcMeta {
        sample_rate_hz: f.sample_rate_hz.ok_or_else(|| missing("sample_rate_hz"))?,
        oversample: f.oversample.ok_or_else(|| missing("oversample"))?,
        description: f.description.unwrap_or_default(),
    };
    Ok((
        f.rows.ok_or_else(|| missing("rows"))?,
        f.cols.ok_or_else(|| missing("cols"))?,
        meta,
    ))
}

/// Reads an SLC container (see module docs).
pub fn read_slc(path: impl AsRef<Path>) -> Result<SlcImage> {
    let (meta_path, payload_path) = container_paths(path.as_ref());
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let (rows, cols, meta) = parse_meta(&meta_path, &text)?;
    let bytes = fs::read(&payload_path).map_err(|e| Error::io(&payload_path, e))?;
    let expected = (rows as u64) * (cols as u64) * 8;
    if bytes.len() as u64 != expected {
        return Err(Error::PayloadSize {
            path: payload_path,
            expected,
            actual: bytes.len() as u64,
        });
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex32::new(re, im)
        })
        .collect();
    SlcImage::new(rows, cols, data, meta)
}

/// Writes an SLC container; `path` may be the stem or either member path.
pub fn write_slc(img: &SlcImage, path: impl AsRef<Path>) -> Result<()> {
    let (meta_path, payload_path) = container_paths(path.as_ref());
    let m = img.meta();
    let mut text = format!(
        "rows={}\ncols={}\nsample_rate_hz={}\noversample={}\n",
        img.rows(),
        img.cols(),
        m.sample_rate_hz,
        m.oversample
    );
    if !m.description.is_empty() {
        text.push_str(&format!("description={}\n", m.description));
    }
    fs::write(&meta_path, text).map_err(|e| Error::io(&meta_path, e))?;

    let file = fs::File::create(&payload_path).map_err(|e| Error::io(&payload_path, e))?;
    let mut w = BufWriter::new(file);
    for z in img.data() {
        w.write_all(&z.re.to_le_bytes())
            .and_then(|_| w.write_all(&z.im.to_le_bytes()))
            .map_err(|e| Error::io(&payload_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&payload_path, e))
}

/// Writes an 8-bit RGB image; the encoder follows the extension (`.png`, `.ppm`).
pub fn export_color(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let buf = image::RgbImage::from_raw(img.cols() as u32, img.rows() as u32, img.to_bytes())
        .expect("buffer sized from image dims");
    buf.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a grayscale 8-bit image of `plane / scale`, clipped to `[0, 1]`.
pub fn export_gray(plane: &RealImage, scale: f64, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Domain(format!(
            "gray export scale must be > 0, got {scale}"
        )));
    }
    let bytes = plane.data().iter().map(|v| quantize(v / scale)).collect();
    let buf = image::GrayImage::from_raw(plane.cols() as u32, plane.rows() as u32, bytes)
        .expect("buffer sized from image dims");
    buf.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> SlcMeta {
        SlcMeta::new(64e6, 1.25).unwrap()
    }

    #[test]
    fn reads_identity_payload() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("tiny");
        fs::write(
            stem.with_extension("meta"),
            "rows=1\ncols=2\nsample_rate_hz=1\noversample=1\n",
        )
        .unwrap();
        let payload: Vec<u8> = [1.0f32, 0.0, 0.0, 1.0]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        fs::write(stem.with_extension("cpx"), payload).unwrap();
        let img = read_slc(&stem).unwrap();
        assert_eq!(
            img.data(),
            &[Complex32::new(1.0, 0.0), Complex32::new(0.0, 1.0)]
        );
    }

    #[test]
    fn rejects_short_payload() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("short");
        fs::write(
            stem.with_extension("meta"),
            "rows=1\ncols=1\nsample_rate_hz=1\noversample=1\n",
        )
        .unwrap();
        let payload: Vec<u8> = [0.0f32; 7].iter().flat_map(|v| v.to_le_bytes()).collect();
        fs::write(stem.with_extension("cpx"), payload).unwrap();
        assert!(matches!(
            read_slc(&stem),
            Err(Error::PayloadSize {
                expected: 8,
                actual: 28,
                ..
            })
        ));
    }

    #[test]
    fn metadata_errors() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("m");
        fs::write(stem.with_extension("cpx"), [0u8; 16]).unwrap();

        fs::write(
            stem.with_extension("meta"),
            "rows=1\ncols=2\nsample_rate_hz=1\n",
        )
        .unwrap();
        assert!(matches!(
            read_slc(&stem),
            Err(Error::MissingKey {
                key: "oversample",
                ..
            })
        ));

        fs::write(
            stem.with_extension("meta"),
            "rows=1\ncols=2\ncols=2\nsample_rate_hz=1\noversample=1\n",
        )
        .unwrap();
        assert!(matches!(
            read_slc(&stem),
            Err(Error::DuplicateKey { line: 3, .. })
        ));
    }

    #[test]
    fn rejects_nonfinite_sample_with_index() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("nan");
        fs::write(
            stem.with_extension("meta"),
            "rows=1\ncols=2\nsample_rate_hz=1\noversample=1\n",
        )
        .unwrap();
        let payload: Vec<u8> = [0.0f32, 0.0, f32::NAN, 0.0]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        fs::write(stem.with_extension("cpx"), payload).unwrap();
        assert!(matches!(
            read_slc(&stem),
            Err(Error::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn write_sizes_payload() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("w");
        let img = SlcImage::new(
            1,
            2,
            vec![Complex32::new(1.0, 2.0), Complex32::new(3.0, 4.0)],
            meta(),
        )
        .unwrap();
        write_slc(&img, &stem).unwrap();
        assert_eq!(fs::metadata(stem.with_extension("cpx")).unwrap().len(), 16);
        assert!(stem.with_extension("meta").exists());
    }

    #[test]
    fn zero_rows_is_invalid() {
        assert!(matches!(
            SlcImage::new(0, 2, vec![], meta()),
            Err(Error::InvalidImage(_))
        ));
        assert!(SlcImage::new(1, 1, vec![Complex32::new(0.0, 0.0)], meta()).is_err());
    }

    #[test]
    fn meta_bounds() {
        assert!(SlcMeta::new(0.0, 1.0).is_err());
        assert!(SlcMeta::new(1.0, 0.99).is_err());
        assert!(SlcMeta::new(1.0, 4.5).is_err());
        assert!(SlcMeta::new(1.0, 4.0).is_ok());
    }

    #[test]
    fn quantization_rule() {
        assert_eq!(quantize(1.0), 255);
        assert_eq!(quantize(0.0), 0);
        assert_eq!(quantize(0.5), 128);
        assert_eq!(quantize(13.0 / 27.0), 123);
    }

    #[test]
    fn container_path_forms() {
        let (m, p) = container_paths(Path::new("/x/scene"));
        assert_eq!(m, Path::new("/x/scene.meta"));
        assert_eq!(p, Path::new("/x/scene.cpx"));
        assert_eq!(
            container_paths(Path::new("/x/scene.cpx")).0,
            Path::new("/x/scene.meta")
        );
        assert_eq!(
            container_paths(Path::new("/x/a.b")).1,
            Path::new("/x/a.b.cpx")
        );
    }
}
