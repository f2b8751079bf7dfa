//! Text scene descriptions and their ground truth.
//!
//! ```text
//! [scene]
//! rows = 256
//! cols = 512
//! sample_rate_hz = 64e6
//! oversample = 1.25
//! prf_hz = 1700
//! sigma = 1
//! nsub = 9
//!
//! [nbi]
//! tone = 5.1e6, 10, 0      # freq_hz, amp, phase_rad (repeatable)
//! rows = 0..128
//! cols = 100..400
//!
//! [lfm]
//! center = 128, 256
//! fc_hz = 0
//! ki = 1.054e12
//! kr = 1e12
//! ti = 7.4e-5
//! ka = 2000
//! ta = 0.05
//! amp = 10
//!
//! [unfocused]
//! target = 128, 256
//! delta_hz = 3e-16
//! r0_m = 850e3
//! va_mps = 7600
//! f0_hz = 5.405e9
//! amp = 50
//! ```
//!
//! `#` starts a comment. `[scene]` must come first; each following section
//! adds one event, applied in file order on top of the speckle background
//! (`sigma = 0` gives a zero background). `prf_hz` may be overridden per event.

use std::collections::HashMap;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{
    gen_speckle, inject_lfm, inject_nbi, inject_unfocused, LfmParams, NbiParams, Tone,
    UnfocusedParams,
};
use crate::error::{Error, Result};
use crate::slc_io::{SlcImage, SlcMeta};
use crate::spectral::{plan_layout, SubbandLayout};

/// One injected signal.
#[derive(Debug, Clone, PartialEq)]
pub enum SynthEvent {
    Nbi(NbiParams),
    Lfm(LfmParams),
    Unfocused(UnfocusedParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub rows: usize,
    pub cols: usize,
    pub meta: SlcMeta,
    pub prf_hz: f64,
    /// Speckle variance; 0 disables the background.
    pub sigma: f64,
    /// Subband count used for ground-truth predictions.
    pub n_sub: usize,
    pub events: Vec<SynthEvent>,
}

struct Section {
    name: String,
    line: usize,
    entries: Vec<(usize, String, String)>,
}

struct Fields<'a> {
    path: &'a Path,
    section: &'a Section,
    map: HashMap<&'a str, (usize, &'a str)>,
}

impl<'a> Fields<'a> {
    fn new(path: &'a Path, section: &'a Section, repeatable: &[&str]) -> Result<Self> {
        let mut map = HashMap::new();
        for (line, k, v) in &section.entries {
            if repeatable.contains(&k.as_str()) {
                continue;
            }
            if map.insert(k.as_str(), (*line, v.as_str())).is_some() {
                return Err(Error::DuplicateKey {
                    path: path.to_path_buf(),
                    line: *line,
                    key: k.clone(),
                });
            }
        }
        Ok(Fields { path, section, map })
    }

    fn err(&self, line: usize, msg: String) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            msg,
        }
    }

    fn check_known(&self, known: &[&str]) -> Result<()> {
        for (line, k, _) in &self.section.entries {
            if !known.contains(&k.as_str()) {
                return Err(self.err(
                    *line,
                    format!("unknown key `{k}` in [{}]", self.section.name),
                ));
            }
        }
        Ok(())
    }

    fn raw(&self, key: &str) -> Result<(usize, &'a str)> {
        self.map.get(key).copied().ok_or_else(|| {
            self.err(
                self.section.line,
                format!("[{}] is missing `{key}`", self.section.name),
            )
        })
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let (line, v) = self.raw(key)?;
        v.parse()
            .map_err(|_| self.err(line, format!("`{key}`: expected a number, got `{v}`")))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.map.contains_key(key) {
            self.f64(key)
        } else {
            Ok(default)
        }
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let (line, v) = self.raw(key)?;
        v.parse()
            .map_err(|_| self.err(line, format!("`{key}`: expected a count, got `{v}`")))
    }

    fn pair(&self, key: &str) -> Result<(usize, usize)> {
        let (line, v) = self.raw(key)?;
        let parts: Vec<&str> = v.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [a, b] => match (a.parse(), b.parse()) {
                (Ok(a), Ok(b)) => Ok((a, b)),
                _ => Err(self.err(line, format!("`{key}`: expected `row, col`, got `{v}`"))),
            },
            _ => Err(self.err(line, format!("`{key}`: expected `row, col`, got `{v}`"))),
        }
    }

    fn range(&self, key: &str) -> Result<Range<usize>> {
        let (line, v) = self.raw(key)?;
        let bad = || self.err(line, format!("`{key}`: expected `start..end`, got `{v}`"));
        let (a, b) = v.split_once("..").ok_or_else(bad)?;
        let (a, b) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        if a > b {
            return Err(bad());
        }
        Ok(a..b)
    }
}

fn parse_sections(path: &Path, text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            msg,
        };
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(format!("unterminated section header `{line}`")))?;
            sections.push(Section {
                name: name.trim().to_string(),
                line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key = value, got `{line}`")))?;
        let section = sections
            .last_mut()
            .ok_or_else(|| err("key before any [section]".into()))?;
        section
            .entries
            .push((line_no, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(sections)
}

impl Scene {
    pub fn parse(path: impl AsRef<Path>, text: &str) -> Result<Scene> {
        let path = path.as_ref();
        let sections = parse_sections(path, text)?;
        let head = sections
            .first()
            .filter(|s| s.name == "scene")
            .ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: sections.first().map_or(1, |s| s.line),
                msg: "scene file must start with a [scene] section".into(),
            })?;
        let f = Fields::new(path, head, &[])?;
        f.check_known(&[
            "rows",
            "cols",
            "sample_rate_hz",
            "oversample",
            "prf_hz",
            "sigma",
            "nsub",
            "description",
        ])?;
        let meta = SlcMeta {
            sample_rate_hz: f.f64("sample_rate_hz")?,
            oversample: f.f64_or("oversample", 1.0)?,
            description: f
                .map
                .get("description")
                .map_or(String::new(), |(_, v)| v.to_string()),
        };
        meta.validate()
            .map_err(|e| f.err(head.line, e.to_string()))?;
        let mut scene = Scene {
            rows: f.usize("rows")?,
            cols: f.usize("cols")?,
            meta,
            prf_hz: f.f64_or("prf_hz", 1000.0)?,
            sigma: f.f64_or("sigma", 1.0)?,
            n_sub: if f.map.contains_key("nsub") {
                f.usize("nsub")?
            } else {
                9
            },
            events: Vec::new(),
        };
        if scene.sigma < 0.0 || !scene.sigma.is_finite() {
            return Err(f.err(
                f.raw("sigma")?.0,
                format!("sigma must be >= 0, got {}", scene.sigma),
            ));
        }
        if scene.rows < 1 || scene.cols < 2 {
            return Err(f.err(
                head.line,
                format!(
                    "scene must be at least 1x2, got {}x{}",
                    scene.rows, scene.cols
                ),
            ));
        }

        for s in &sections[1..] {
            let event = match s.name.as_str() {
                "nbi" => {
                    let f = Fields::new(path, s, &["tone"])?;
                    f.check_known(&["tone", "rows", "cols"])?;
                    let mut tones = Vec::new();
                    for (line, k, v) in &s.entries {
                        if k != "tone" {
                            continue;
                        }
                        let nums: std::result::Result<Vec<f64>, _> =
                            v.split(',').map(|x| x.trim().parse::<f64>()).collect();
                        match nums.as_deref() {
                            Ok([freq_hz, amp]) => tones.push(Tone {
                                freq_hz: *freq_hz,
                                amp: *amp,
                                phase: 0.0,
                            }),
                            Ok([freq_hz, amp, phase]) => tones.push(Tone {
                                freq_hz: *freq_hz,
                                amp: *amp,
                                phase: *phase,
                            }),
                            _ => {
                                return Err(f.err(
                                    *line,
                                    format!("`tone`: expected `freq_hz, amp[, phase]`, got `{v}`"),
                                ))
                            }
                        }
                    }
                    if tones.is_empty() {
                        return Err(f.err(s.line, "[nbi] needs at least one `tone`".into()));
                    }
                    let rows = if f.map.contains_key("rows") {
                        f.range("rows")?
                    } else {
                        0..scene.rows
                    };
                    let cols = if f.map.contains_key("cols") {
                        f.range("cols")?
                    } else {
                        0..scene.cols
                    };
                    SynthEvent::Nbi(NbiParams {
                        tones,
                        rows,
                        cols,
                        row_gain: None,
                    })
                }
                "lfm" => {
                    let f = Fields::new(path, s, &[])?;
                    f.check_known(&[
                        "center", "fc_hz", "ki", "kr", "ti", "ka", "ta", "amp", "prf_hz",
                    ])?;
                    SynthEvent::Lfm(LfmParams {
                        center: f.pair("center")?,
                        fc_hz: f.f64_or("fc_hz", 0.0)?,
                        ki: f.f64("ki")?,
                        kr: f.f64("kr")?,
                        ti: f.f64("ti")?,
                        ka: f.f64_or("ka", 0.0)?,
                        ta: f.f64("ta")?,
                        prf_hz: f.f64_or("prf_hz", scene.prf_hz)?,
                        amp: f.f64("amp")?,
                    })
                }
                "unfocused" => {
                    let f = Fields::new(path, s, &[])?;
                    f.check_known(&[
                        "target", "delta_hz", "r0_m", "va_mps", "f0_hz", "amp", "prf_hz",
                    ])?;
                    SynthEvent::Unfocused(UnfocusedParams {
                        target: f.pair("target")?,
                        delta_hz: f.f64("delta_hz")?,
                        r0_m: f.f64("r0_m")?,
                        va_mps: f.f64("va_mps")?,
                        f0_hz: f.f64("f0_hz")?,
                        prf_hz: f.f64_or("prf_hz", scene.prf_hz)?,
                        amp: f.f64("amp")?,
                    })
                }
                "scene" => {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: s.line,
                        msg: "duplicate [scene] section".into(),
                    })
                }
                other => {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: s.line,
                        msg: format!("unknown event type [{other}]"),
                    })
                }
            };
            scene.events.push(event);
        }
        Ok(scene)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scene> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Scene::parse(path, &text)
    }

    /// Speckle background plus every event, deterministic in `seed`.
    pub fn render(&self, seed: u64) -> Result<SlcImage> {
        let mut img = if self.sigma > 0.0 {
            gen_speckle(self.rows, self.cols, self.sigma, seed, self.meta.clone())?
        } else {
            SlcImage::zeros(self.rows, self.cols, self.meta.clone())?
        };
        for event in &self.events {
            img = match event {
                SynthEvent::Nbi(p) => inject_nbi(img, p)?,
                SynthEvent::Lfm(p) => inject_lfm(img, p)?,
                SynthEvent::Unfocused(p) => inject_unfocused(img, p)?,
            };
        }
        Ok(img)
    }

    pub fn layout(&self) -> Result<SubbandLayout> {
        plan_layout(self.cols, self.meta.oversample, self.n_sub)
    }

    pub fn ground_truth(&self, seed: u64) -> Result<GroundTruth> {
        let layout = self.layout()?;
        let fs = self.meta.sample_rate_hz;
        let events = self
            .events
            .iter()
            .map(|e| event_truth(e, &layout, fs, self.rows, self.cols))
            .collect::<Result<_>>()?;
        Ok(GroundTruth {
            seed,
            rows: self.rows,
            cols: self.cols,
            sample_rate_hz: fs,
            oversample: self.meta.oversample,
            sigma: self.sigma,
            n_sub: self.n_sub,
            valid_start: layout.valid_start,
            valid_len: layout.valid_len,
            bounds: layout.bounds.clone(),
            events,
        })
    }
}

/// Ground-truth record written next to a synthesized scene.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub sample_rate_hz: f64,
    pub oversample: f64,
    pub sigma: f64,
    pub n_sub: usize,
    pub valid_start: usize,
    pub valid_len: usize,
    pub bounds: Vec<usize>,
    pub events: Vec<EventTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventTruth {
    pub kind: &'static str,
    /// Affected rows and columns, half-open.
    pub rows: [usize; 2],
    pub cols: [usize; 2],
    /// Expected dominant subband(s); `None` marks energy outside the valid band.
    /// Tones list one entry each; swept events list the start and end of the sweep.
    pub dominant_subbands: Vec<Option<usize>>,
    /// Direction in which the dominant subband index moves: `range+`,
    /// `range-`, `azimuth+`, `azimuth-`, or `none`.
    pub gradient: &'static str,
}

fn clamp_span(lo: f64, hi: f64, len: usize) -> [usize; 2] {
    let lo = lo.floor().max(0.0) as usize;
    let hi = (hi.ceil().max(0.0) as usize).min(len);
    [lo.min(hi), hi]
}

fn event_truth(
    event: &SynthEvent,
    layout: &SubbandLayout,
    fs: f64,
    rows: usize,
    cols: usize,
) -> Result<EventTruth> {
    Ok(match event {
        SynthEvent::Nbi(p) => EventTruth {
            kind: "nbi",
            rows: [p.rows.start, p.rows.end],
            cols: [p.cols.start, p.cols.end],
            dominant_subbands: p
                .tones
                .iter()
                .map(|t| layout.subband_of_frequency(t.freq_hz, fs))
                .collect(),
            gradient: "none",
        },
        SynthEvent::Lfm(p) => {
            let (r, c) = p.footprint(fs)?;
            let (f_start, f_end) = p.sweep_hz();
            let gradient = match f_end.partial_cmp(&f_start) {
                Some(std::cmp::Ordering::Greater) => "range+",
                Some(std::cmp::Ordering::Less) => "range-",
                _ => "none",
            };
            EventTruth {
                kind: "lfm",
                rows: clamp_span(r.start as f64, r.end as f64, rows),
                cols: clamp_span(c.start as f64, c.end as f64, cols),
                dominant_subbands: vec![
                    layout.subband_of_frequency(f_start, fs),
                    layout.subband_of_frequency(f_end, fs),
                ],
                gradient,
            }
        }
        SynthEvent::Unfocused(p) => {
            let lo_f = layout.bin_frequency(layout.valid_start, fs);
            let hi_f = layout.bin_frequency(layout.valid_start + layout.valid_len - 1, fs);
            let (s_lo, s_hi) = (p.row_shift(lo_f)?, p.row_shift(hi_f)?);
            let t = p.target.0 as f64;
            let gradient = if p.delta_hz > 0.0 {
                "azimuth-"
            } else if p.delta_hz < 0.0 {
                "azimuth+"
            } else {
                "none"
            };
            // dominant subband at the first row of the smear, then the last
            let order = if s_hi < s_lo {
                vec![Some(layout.n_sub - 1), Some(0)]
            } else if s_hi > s_lo {
                vec![Some(0), Some(layout.n_sub - 1)]
            } else {
                vec![]
            };
            EventTruth {
                kind: "unfocused",
                rows: clamp_span(t + s_lo.min(s_hi), t + s_lo.max(s_hi) + 1.0, rows),
                cols: [p.target.1, p.target.1 + 1],
                dominant_subbands: order,
                gradient,
            }
        }
    })
}

/// Default `.truth.json` path for a container stem.
pub fn truth_path(stem: &Path) -> PathBuf {
    let mut s = stem.as_os_str().to_os_string();
    s.push(".truth.json");
    PathBuf::from(s)
}
