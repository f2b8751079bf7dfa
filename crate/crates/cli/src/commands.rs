use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sarhue::chroma::{build_palette, chromatic_code_detailed, percentile};
use sarhue::multilook::{block_average, enl_of, estimate_enl, multilook};
use sarhue::slc_io::{export_color, export_gray};
use sarhue::synth::scene::{truth_path, Scene};
use sarhue::{
    decompose, plan_layout, read_slc, write_slc, CoderConfig, RealImage, RgbImage, SlcImage,
};
use serde::Serialize;

use crate::manifest::{absolute, EncodeRun, Run, RunManifest, SynthRun};
use crate::{EncodeArgs, EnlArgs, InfoArgs, PaletteArgs, SubbandArgs, SynthArgs};

/// Summary of an `encode` run, printed and optionally saved as JSON.
#[derive(Debug, Serialize)]
struct EncodeReport {
    input: PathBuf,
    output: PathBuf,
    rows: usize,
    cols: usize,
    oversample: f64,
    config: CoderConfig,
    valid_start: usize,
    valid_len: usize,
    bounds: Vec<usize>,
    enl: Option<f64>,
    clip_level: f64,
}

fn load(input: &Path, xi: Option<f64>) -> Result<SlcImage> {
    let img =
        read_slc(input).with_context(|| format!("reading SLC container {}", input.display()))?;
    match xi {
        Some(xi) => {
            let mut meta = img.meta().clone();
            meta.oversample = xi;
            Ok(img.with_meta(meta).context("applying --xi")?)
        }
        None => Ok(img),
    }
}

fn gray_scale(planes: &[RealImage]) -> Result<f64> {
    let pooled: Vec<f64> = planes
        .iter()
        .flat_map(|p| p.data().iter().copied())
        .collect();
    let s = percentile(&pooled, 99.0)?;
    Ok(if s > 0.0 { s } else { 1.0 })
}

fn dump_planes(planes: &[RealImage], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let scale = gray_scale(planes)?;
    planes
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let path = dir.join(format!("subband_{k:02}.png"));
            export_gray(p, scale, &path)?;
            Ok(path)
        })
        .collect()
}

pub fn run_encode(run: &EncodeRun) -> Result<()> {
    let img = load(&run.input, run.oversample)?;
    let coding = chromatic_code_detailed(&img, &run.config).context("chromatic coding")?;
    let enl = multilook(&img.intensity(), run.config.looks)
        .and_then(|i| estimate_enl(&i))
        .ok();
    export_color(&coding.rgb, &run.output)
        .with_context(|| format!("writing {}", run.output.display()))?;

    let l = &coding.layout;
    println!(
        "layout: cols={} L_valid={} valid_start={} bounds={:?}",
        l.cols, l.valid_len, l.valid_start, l.bounds
    );
    match enl {
        Some(e) => println!("ENL estimate ({} looks): {e:.4}", run.config.looks),
        None => println!("ENL estimate ({} looks): undefined", run.config.looks),
    }
    println!(
        "percentile {}: {:.6e}",
        run.config.percentile, coding.clip_level
    );
    println!("wrote {}", run.output.display());

    if let Some(dir) = &run.subbands_dir {
        let paths =
            dump_planes(&coding.subband_amplitudes, dir).context("writing subband dumps")?;
        println!("wrote {} subband images to {}", paths.len(), dir.display());
    }
    if let Some(path) = &run.report {
        let report = EncodeReport {
            input: run.input.clone(),
            output: run.output.clone(),
            rows: img.rows(),
            cols: img.cols(),
            oversample: img.meta().oversample,
            config: run.config.clone(),
            valid_start: l.valid_start,
            valid_len: l.valid_len,
            bounds: l.bounds.clone(),
            enl,
            clip_level: coding.clip_level,
        };
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing report {}", path.display()))?;
    }
    Ok(())
}

pub fn encode(a: EncodeArgs) -> Result<()> {
    let config = CoderConfig {
        n_sub: a.spectral.nsub,
        a: a.spectral.a,
        equalize: !a.spectral.no_equalize,
        looks: a.looks,
        percentile: a.percentile,
        complex_average: a.complex_average,
    };
    config.validate()?;
    let run = EncodeRun {
        input: absolute(&a.input)?,
        output: absolute(&a.output)?,
        config,
        oversample: a.spectral.xi,
        report: a.report.as_deref().map(absolute).transpose()?,
        subbands_dir: a.subbands_dir.as_deref().map(absolute).transpose()?,
    };
    run_encode(&run)?;
    if let Some(path) = a.save_manifest {
        RunManifest::new(Run::Encode(run)).save(&path)?;
        println!("saved manifest {}", path.display());
    }
    Ok(())
}

pub fn run_synth(run: &SynthRun) -> Result<()> {
    let scene = Scene::load(&run.scene)?;
    let img = scene.render(run.seed).context("rendering scene")?;
    let truth = scene.ground_truth(run.seed)?;
    write_slc(&img, &run.output)
        .with_context(|| format!("writing container {}", run.output.display()))?;
    let sidecar = truth_path(&run.output);
    let mut text = serde_json::to_string_pretty(&truth)?;
    text.push('\n');
    fs::write(&sidecar, text).with_context(|| format!("writing {}", sidecar.display()))?;

    println!(
        "scene {}x{}, {} event(s), seed {}",
        scene.rows,
        scene.cols,
        scene.events.len(),
        run.seed
    );
    for e in &truth.events {
        println!(
            "  {} rows {:?} cols {:?} dominant subbands {:?}",
            e.kind, e.rows, e.cols, e.dominant_subbands
        );
    }
    println!("wrote {} and {}", run.output.display(), sidecar.display());
    Ok(())
}

pub fn synth(a: SynthArgs) -> Result<()> {
    let run = SynthRun {
        scene: absolute(&a.scene)?,
        output: absolute(&a.output)?,
        seed: a.seed,
    };
    run_synth(&run)?;
    if let Some(path) = a.save_manifest {
        RunManifest::new(Run::Synth(run)).save(&path)?;
        println!("saved manifest {}", path.display());
    }
    Ok(())
}

pub fn replay(path: &Path) -> Result<()> {
    let m = RunManifest::load(path)?;
    if m.version != env!("CARGO_PKG_VERSION") {
        eprintln!(
            "warning: manifest written by {} {}, replaying with {}",
            m.tool,
            m.version,
            env!("CARGO_PKG_VERSION")
        );
    }
    match &m.run {
        Run::Encode(r) => {
            r.config.validate()?;
            run_encode(r)
        }
        Run::Synth(r) => run_synth(r),
    }
}

pub fn palette(a: PaletteArgs) -> Result<()> {
    let p = build_palette(a.nsub)?;
    println!("{:>3}  {:>8}  {:>8}  {:>8}  {:>8}", "k", "H", "R", "G", "B");
    for (k, (hsv, rgb)) in p.hsv.iter().zip(&p.rgb).enumerate() {
        println!(
            "{k:>3}  {:>8.5}  {:>8.5}  {:>8.5}  {:>8.5}",
            hsv[0], rgb[0], rgb[1], rgb[2]
        );
    }
    let s = p.channel_sums();
    println!("channel sums: R={:.4} G={:.4} B={:.4}", s[0], s[1], s[2]);
    println!("sum-white spread: {:.3}%", 100.0 * p.sum_spread());
    if let Some(path) = a.swatch {
        const BLOCK: usize = 32;
        let pixels = (0..BLOCK * BLOCK * a.nsub)
            .map(|i| p.rgb[(i % (BLOCK * a.nsub)) / BLOCK])
            .collect();
        export_color(&RgbImage::new(BLOCK, BLOCK * a.nsub, pixels)?, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn enl(a: EnlArgs) -> Result<()> {
    let img = load(&a.input, None)?;
    let mut intensity = img.intensity();
    let mut label = "single look".to_string();
    if let Some(l) = a.looks {
        intensity = multilook(&intensity, l)?;
        label = format!("{l} overlapping multilook");
    }
    if let Some(l) = a.block {
        intensity = block_average(&intensity, l)?;
        label = format!("{l} block average");
    }
    let full = estimate_enl(&intensity).context("full-image ENL")?;
    println!(
        "ENL ({label}, {}x{}): {full:.4}",
        intensity.rows(),
        intensity.cols()
    );
    if let Some(t) = a.tile {
        anyhow::ensure!(t >= 2, "tile size must be >= 2, got {t}");
        println!("{:>6}  {:>6}  {:>10}", "row", "col", "ENL");
        for r0 in (0..intensity.rows()).step_by(t) {
            for c0 in (0..intensity.cols()).step_by(t) {
                let vals: Vec<f64> = (r0..(r0 + t).min(intensity.rows()))
                    .flat_map(|r| (c0..(c0 + t).min(intensity.cols())).map(move |c| (r, c)))
                    .map(|(r, c)| intensity.get(r, c))
                    .collect();
                match enl_of(&vals) {
                    Ok(e) => println!("{r0:>6}  {c0:>6}  {e:>10.4}"),
                    Err(_) => println!("{r0:>6}  {c0:>6}  {:>10}", "n/a"),
                }
            }
        }
    }
    Ok(())
}

pub fn subbands(a: SubbandArgs) -> Result<()> {
    let img = load(&a.input, a.spectral.xi)?;
    let stack = decompose(&img, a.spectral.nsub, a.spectral.a, !a.spectral.no_equalize)
        .context("subband decomposition")?;
    let planes = stack
        .images
        .iter()
        .map(|b| multilook(&b.amplitude(), a.looks))
        .collect::<sarhue::Result<Vec<_>>>()?;
    let paths = dump_planes(&planes, &a.out_dir)?;
    let l = &stack.layout;
    println!(
        "layout: cols={} L_valid={} valid_start={} bounds={:?}",
        l.cols, l.valid_len, l.valid_start, l.bounds
    );
    println!(
        "wrote {} subband images to {}",
        paths.len(),
        a.out_dir.display()
    );
    Ok(())
}

pub fn info(a: InfoArgs) -> Result<()> {
    let img = load(&a.input, None)?;
    let m = img.meta();
    println!("size: {} rows x {} cols", img.rows(), img.cols());
    println!("sample rate: {} Hz", m.sample_rate_hz);
    println!("oversample: {}", m.oversample);
    println!("bandwidth: {} Hz", m.bandwidth_hz());
    if !m.description.is_empty() {
        println!("description: {}", m.description);
    }
    let intensity = img.intensity();
    println!("mean intensity: {:.6e}", intensity.mean());
    match estimate_enl(&intensity) {
        Ok(e) => println!("ENL: {e:.4}"),
        Err(_) => println!("ENL: undefined"),
    }
    let l = plan_layout(img.cols(), m.oversample, a.nsub)?;
    println!(
        "layout: nsub={} L_valid={} valid_start={} bounds={:?}",
        a.nsub, l.valid_len, l.valid_start, l.bounds
    );
    Ok(())
}
