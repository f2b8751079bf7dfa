use std::f64::consts::PI;

use num_complex::{Complex32, Complex64};
use sarhue::spectral::{decompose_complex, plan_layout, ComplexImage};
use sarhue::synth::{
    gen_speckle, inject_lfm, inject_nbi, inject_unfocused, point_response, LfmParams, NbiParams,
    Tone, UnfocusedParams, SPEED_OF_LIGHT,
};
use sarhue::{SlcImage, SlcMeta};

const FS: f64 = 64e6;
const PRF: f64 = 1700.0;

fn meta() -> SlcMeta {
    SlcMeta::new(FS, 1.25).unwrap()
}

fn energy(img: &SlcImage) -> f64 {
    img.data().iter().map(|z| z.norm_sqr() as f64).sum()
}

fn lfm(amp: f64) -> LfmParams {
    LfmParams {
        center: (60, 128),
        fc_hz: 1.0e6,
        ki: 3.0e12,
        kr: 1.0e12,
        ti: 1.53e-6,
        ka: 1500.0,
        ta: 60.3 / PRF,
        prf_hz: PRF,
        amp,
    }
}

fn unfocused(sign: f64, amp: f64) -> UnfocusedParams {
    let alpha = 40.0 * 2.0 * PI / (25.6e6 * PRF);
    let (r0, va) = (850e3, 7600.0);
    UnfocusedParams {
        target: (128, 128),
        delta_hz: sign * alpha * va * va / (PI * r0 * SPEED_OF_LIGHT),
        r0_m: r0,
        va_mps: va,
        f0_hz: 5.405e9,
        prf_hz: PRF,
        amp,
    }
}

fn nbi(freq_hz: f64, amp: f64) -> NbiParams {
    NbiParams {
        tones: vec![Tone {
            freq_hz,
            amp,
            phase: 0.4,
        }],
        rows: 0..64,
        cols: 0..256,
        row_gain: None,
    }
}

/// Energy of a tone in each subband, computed with a direct DFT over the valid bins.
fn dft_subband_energy(img: &SlcImage, n_sub: usize) -> Vec<f64> {
    let layout = plan_layout(img.cols(), img.meta().oversample, n_sub).unwrap();
    let n = img.cols();
    let mut out = vec![0.0; n_sub];
    for r in 0..img.rows() {
        for c in layout.valid_bins() {
            let k = layout.fft_bin(c) as f64;
            let s: Complex64 = img
                .row(r)
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    Complex64::new(z.re as f64, z.im as f64)
                        * Complex64::from_polar(1.0, -2.0 * PI * k * i as f64 / n as f64)
                })
                .sum();
            out[layout.subband_of_bin(c).unwrap()] += s.norm_sqr() / n as f64;
        }
    }
    out
}

#[test]
fn nbi_energy_lands_in_its_subband() {
    let zero = SlcImage::zeros(64, 256, meta()).unwrap();
    let layout = plan_layout(256, 1.25, 9).unwrap();
    for k in [0, 3, 4, 8] {
        let img = inject_nbi(zero.clone(), &nbi(layout.center_frequency(k, FS), 5.0)).unwrap();
        let e = dft_subband_energy(&img, 9);
        let total: f64 = e.iter().sum();
        assert!(e[k] / total >= 0.99, "k={k}: {e:?}");
    }
}

#[test]
fn zero_amplitude_is_identity() {
    let img = gen_speckle(256, 256, 1.0, 11, meta()).unwrap();
    assert_eq!(inject_nbi(img.clone(), &nbi(3e6, 0.0)).unwrap(), img);
    assert_eq!(inject_lfm(img.clone(), &lfm(0.0)).unwrap(), img);
    assert_eq!(
        inject_unfocused(img.clone(), &unfocused(1.0, 0.0)).unwrap(),
        img
    );
}

#[test]
fn injectors_scale_with_amplitude() {
    let zero = SlcImage::zeros(256, 256, meta()).unwrap();
    type Injector<'a> = Box<dyn Fn(f64) -> SlcImage + 'a>;
    let cases: [(&str, Injector); 3] = [
        (
            "nbi",
            Box::new(|a| inject_nbi(zero.clone(), &nbi(3e6, a)).unwrap()),
        ),
        (
            "lfm",
            Box::new(|a| inject_lfm(zero.clone(), &lfm(a)).unwrap()),
        ),
        (
            "unfocused",
            Box::new(|a| inject_unfocused(zero.clone(), &unfocused(1.0, a)).unwrap()),
        ),
    ];
    for (name, f) in cases {
        let (one, two) = (f(1.5), f(3.0));
        assert!(
            one.data()
                .iter()
                .zip(two.data())
                .all(|(a, b)| *a * 2.0 == *b),
            "{name}"
        );
        assert!(energy(&one) > 0.0, "{name}");
    }
}

#[test]
fn injection_adds_onto_the_background() {
    let bg = gen_speckle(256, 256, 1.0, 2, meta()).unwrap();
    let zero = SlcImage::zeros(256, 256, meta()).unwrap();
    let alone = inject_lfm(zero, &lfm(2.0)).unwrap();
    let mixed = inject_lfm(bg.clone(), &lfm(2.0)).unwrap();
    for ((m, b), a) in mixed.data().iter().zip(bg.data()).zip(alone.data()) {
        let want: Complex32 = b + a;
        assert!((m - want).norm() <= 4.0 * f32::EPSILON * want.norm().max(1.0));
    }
}

#[test]
fn lfm_energy_matches_analytic_patch() {
    let p = lfm(2.0);
    let img = inject_lfm(SlcImage::zeros(128, 256, meta()).unwrap(), &p).unwrap();
    let want = p.amp * p.amp * p.ta * p.prf_hz * p.range_duration() * FS;
    assert!(
        ((energy(&img) - want) / want).abs() < 0.01,
        "{} vs {want}",
        energy(&img)
    );
    assert!((p.analytic_energy(FS) - want).abs() < 1e-9 * want);
}

#[test]
fn lfm_rejects_equal_rates_and_overflow() {
    let zero = SlcImage::zeros(128, 256, meta()).unwrap();
    assert!(inject_lfm(
        zero.clone(),
        &LfmParams {
            ki: 1.0e12,
            ..lfm(1.0)
        }
    )
    .is_err());
    assert!(inject_lfm(
        zero,
        &LfmParams {
            center: (5, 128),
            ..lfm(1.0)
        }
    )
    .is_err());
}

#[test]
fn focused_point_has_unit_peak() {
    let r = point_response(
        64,
        64,
        FS,
        1.25,
        &UnfocusedParams {
            target: (20, 30),
            ..unfocused(0.0, 1.0)
        },
    )
    .unwrap();
    assert!((r.get(20, 30) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    assert!(r.data().iter().all(|z| z.norm() <= 1.0 + 1e-12));
}

#[test]
fn unfocused_rejects_bad_sqrt() {
    let p = UnfocusedParams {
        delta_hz: 1e9,
        f0_hz: 1.0,
        ..unfocused(1.0, 1.0)
    };
    assert!(p.coupling().is_err());
}

/// Azimuth position of each valid range-frequency bin in the range spectrum of the response.
fn ridge(resp: &ComplexImage, fs: f64) -> Vec<(f64, f64)> {
    let (rows, cols) = resp.dims();
    let layout = plan_layout(cols, 1.25, 2).unwrap();
    let spec: Vec<Vec<f64>> = (0..rows)
        .map(|r| {
            let row = resp.row(r);
            (0..cols)
                .map(|k| {
                    row.iter()
                        .enumerate()
                        .map(|(i, z)| {
                            z * Complex64::from_polar(1.0, -2.0 * PI * (k * i) as f64 / cols as f64)
                        })
                        .sum::<Complex64>()
                        .norm_sqr()
                })
                .collect()
        })
        .collect();
    let margin = layout.valid_len / 10;
    layout
        .valid_bins()
        .skip(margin)
        .take(layout.valid_len - 2 * margin)
        .map(|c| {
            let k = layout.fft_bin(c);
            let peak = (0..rows)
                .max_by(|&a, &b| spec[a][k].total_cmp(&spec[b][k]))
                .unwrap();
            let lo = peak.saturating_sub(3);
            let hi = (peak + 4).min(rows);
            let w: f64 = (lo..hi).map(|r| spec[r][k]).sum();
            let pos = (lo..hi).map(|r| r as f64 * spec[r][k]).sum::<f64>() / w;
            (layout.bin_frequency(c, fs), pos)
        })
        .collect()
}

fn fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let resid = points
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).abs())
        .fold(0.0, f64::max);
    let span = points.iter().map(|p| p.1).fold(f64::MIN, f64::max)
        - points.iter().map(|p| p.1).fold(f64::MAX, f64::min);
    (slope, resid, span)
}

#[test]
fn unfocused_ridge_is_a_sloped_line() {
    for sign in [1.0, -1.0] {
        let p = unfocused(sign, 1.0);
        let resp = point_response(
            256,
            64,
            FS / 4.0,
            1.25,
            &UnfocusedParams {
                target: (128, 32),
                ..p
            },
        )
        .unwrap();
        let pts = ridge(&resp, FS / 4.0);
        let (slope, resid, span) = fit(&pts);
        let expected = -p.coupling().unwrap() * PRF / (2.0 * PI);
        assert!(resid < 0.05 * span, "resid {resid} span {span}");
        assert_eq!(slope.signum(), -sign);
        assert!(
            (slope - expected).abs() < 0.05 * expected.abs(),
            "{slope} vs {expected}"
        );
    }
}

#[test]
fn delta_sign_mirrors_response_in_azimuth() {
    let (rows, cols) = (64, 32);
    let pos = point_response(
        rows,
        cols,
        FS,
        1.25,
        &UnfocusedParams {
            target: (20, 9),
            ..unfocused(1.0, 1.0)
        },
    )
    .unwrap();
    let neg = point_response(
        rows,
        cols,
        FS,
        1.25,
        &UnfocusedParams {
            target: (20, 9),
            ..unfocused(-1.0, 1.0)
        },
    )
    .unwrap();
    for r in 0..rows {
        let m = (2 * 20 + rows - r) % rows;
        for c in 0..cols {
            assert!((pos.get(r, c) - neg.get(m, c)).norm() < 1e-12, "({r},{c})");
        }
    }
}

#[test]
fn unfocused_energy_spreads_by_subband() {
    let resp = point_response(256, 256, FS, 1.25, &unfocused(1.0, 1.0)).unwrap();
    let stack = decompose_complex(&resp, 1.25, 9, 0.75, false).unwrap();
    let rows: Vec<f64> = stack
        .images
        .iter()
        .map(|im| {
            let col: Vec<f64> = (0..256).map(|r| im.get(r, 128).norm_sqr()).collect();
            col.iter()
                .enumerate()
                .map(|(r, e)| r as f64 * e)
                .sum::<f64>()
                / col.iter().sum::<f64>()
        })
        .collect();
    assert!(rows.windows(2).all(|w| w[1] < w[0]), "{rows:?}");
}
