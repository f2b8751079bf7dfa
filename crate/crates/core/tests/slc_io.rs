use std::fs;

use num_complex::Complex32;
use proptest::prelude::*;
use sarhue::slc_io::{export_color, quantize, read_slc, write_slc};
use sarhue::synth::gen_speckle;
use sarhue::{RgbImage, SlcImage, SlcMeta};

#[test]
fn speckle_payload_round_trips_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let img = gen_speckle(
        64,
        64,
        1.0,
        99,
        SlcMeta::new(64e6, 1.25)
            .unwrap()
            .with_description("seeded speckle"),
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    write_slc(&img, &a).unwrap();
    let back = read_slc(&a).unwrap();
    assert_eq!(back, img);
    write_slc(&back, &b).unwrap();
    assert_eq!(
        fs::read(a.with_extension("cpx")).unwrap(),
        fs::read(b.with_extension("cpx")).unwrap()
    );
    assert_eq!(
        fs::read(a.with_extension("meta")).unwrap(),
        fs::read(b.with_extension("meta")).unwrap()
    );
}

#[test]
fn uniform_gray_exports_as_123() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gray.png");
    let g = 13.0 / 27.0;
    export_color(&RgbImage::filled(4, 5, [g, g, g]).unwrap(), &path).unwrap();
    let back = image::open(&path).unwrap().to_rgb8();
    assert_eq!(back.dimensions(), (5, 4));
    assert!(back.pixels().all(|p| p.0 == [123, 123, 123]));
}

#[test]
fn ppm_export_is_raw_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.ppm");
    export_color(
        &RgbImage::new(1, 2, vec![[1.0, 0.5, 0.0], [0.0, 0.0, 1.0]]).unwrap(),
        &path,
    )
    .unwrap();
    let bytes = fs::read(&path).unwrap();
    assert_eq!(&bytes[bytes.len() - 6..], &[255, 128, 0, 0, 0, 255]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn read_inverts_write(rows in 1usize..6, cols in 2usize..9, seed in any::<u64>(), bits in prop::collection::vec(any::<u32>(), 108)) {
        let dir = tempfile::tempdir().unwrap();
        let data: Vec<Complex32> = (0..rows * cols)
            .map(|i| {
                let f = |b: u32| { let v = f32::from_bits(b); if v.is_finite() { v } else { 0.0 } };
                Complex32::new(f(bits[2 * i] ^ seed as u32), f(bits[2 * i + 1]))
            })
            .collect();
        let img = SlcImage::new(rows, cols, data, SlcMeta::new(1.5e7, 1.3).unwrap()).unwrap();
        let stem = dir.path().join("p");
        write_slc(&img, &stem).unwrap();
        let back = read_slc(&stem).unwrap();
        prop_assert!(back.data().iter().zip(img.data()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
        prop_assert_eq!(back.meta(), img.meta());
    }

    #[test]
    fn quantization_is_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(quantize(lo) <= quantize(hi));
    }
}
