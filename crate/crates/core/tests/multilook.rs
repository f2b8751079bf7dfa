use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use sarhue::multilook::{block_average, estimate_enl, multilook, LookParams};
use sarhue::synth::{gen_speckle, shape_spectrum};
use sarhue::{RealImage, SlcMeta};

fn exponential(rows: usize, cols: usize, seed: u64) -> RealImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RealImage::new(
        rows,
        cols,
        (0..rows * cols).map(|_| Exp1.sample(&mut rng)).collect(),
    )
    .unwrap()
}

#[test]
fn single_look_enl_is_one() {
    let enl = estimate_enl(&exponential(1000, 1000, 1)).unwrap();
    assert!((enl - 1.0).abs() < 0.01, "{enl}");
}

#[test]
fn averaged_exponentials_give_enl_81() {
    // each output pixel averages 81 independent unit exponentials
    let img = exponential(900, 900, 2);
    let avg = block_average(&img, LookParams::new(9, 9).unwrap()).unwrap();
    let enl = estimate_enl(&avg).unwrap();
    assert!((enl - 81.0).abs() / 81.0 < 0.10, "{enl}");
}

#[test]
fn overlapping_looks_lose_independence() {
    let raw = gen_speckle(256, 256, 1.0, 3, SlcMeta::new(1.0, 1.25).unwrap()).unwrap();
    let img = shape_spectrum(&raw, 1.0).unwrap().intensity();
    let looks = LookParams::new(9, 9).unwrap();
    let enl = estimate_enl(&multilook(&img, looks).unwrap()).unwrap();
    assert!(enl < 81.0, "{enl}");
}

#[test]
fn interior_mean_is_preserved() {
    // constant region padded by at least half a window on every side
    let mut img = RealImage::filled(40, 40, 0.0);
    for r in 10..30 {
        for c in 10..30 {
            img.set(r, c, 3.0);
        }
    }
    let out = multilook(&img, LookParams::new(5, 5).unwrap()).unwrap();
    let (a, b): (f64, f64) = (img.data().iter().sum(), out.data().iter().sum());
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn multilook_is_monotone(
        base in prop::collection::vec(0.0f64..10.0, 48),
        bump in prop::collection::vec(0.0f64..2.0, 48),
        n_az in 1usize..6,
        n_rg in 1usize..6,
    ) {
        let lo = RealImage::new(6, 8, base.clone()).unwrap();
        let hi = RealImage::new(6, 8, base.iter().zip(&bump).map(|(a, b)| a + b).collect()).unwrap();
        let looks = LookParams::new(n_az, n_rg).unwrap();
        let (a, b) = (multilook(&lo, looks).unwrap(), multilook(&hi, looks).unwrap());
        for (x, y) in a.data().iter().zip(b.data()) {
            prop_assert!(x <= y);
        }
    }
}
