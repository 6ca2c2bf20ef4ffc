use proptest::prelude::*;

use toposnake_core::contour::extract_zero_level;
use toposnake_core::levelset::{circle_sdf, init_level_set, sdf_from_mask, InitSpec};
use toposnake_core::topology::{jaccard, BinaryMask};
use toposnake_core::{GridDims, ScalarField};

/// `φ` linearly interpolated along the grid edge a vertex sits on.
fn interpolate(phi: &ScalarField, (r, c): (f64, f64)) -> f64 {
    let d = phi.dims();
    let clamp = |x: f64, n: usize| x.clamp(0.0, (n - 1) as f64);
    let (r, c) = (clamp(r, d.rows()), clamp(c, d.cols()));
    let (i0, j0) = (r.floor() as usize, c.floor() as usize);
    let (i1, j1) = ((i0 + 1).min(d.rows() - 1), (j0 + 1).min(d.cols() - 1));
    let (fr, fc) = (r - i0 as f64, c - j0 as f64);
    let top = phi.get(i0, j0) * (1.0 - fc) + phi.get(i0, j1) * fc;
    let bottom = phi.get(i1, j0) * (1.0 - fc) + phi.get(i1, j1) * fc;
    top * (1.0 - fr) + bottom * fr
}

proptest! {
    #[test]
    fn circle_contour_lies_on_the_zero_level(
        cy in 20.0..44.0f64,
        cx in 20.0..44.0f64,
        r in 4.0..16.0f64,
    ) {
        let d = GridDims::new(64, 64).unwrap();
        let phi = circle_sdf(d, (cy, cx), r);
        let lines = extract_zero_level(&phi);
        prop_assert_eq!(lines.len(), 1);
        let line = &lines[0];
        for &p in &line.points {
            prop_assert!(interpolate(&phi, p).abs() <= 1e-9);
        }
        let perimeter = 2.0 * std::f64::consts::PI * r;
        prop_assert!((line.length() - perimeter).abs() <= 0.05 * perimeter);
        let area = std::f64::consts::PI * r * r;
        prop_assert!((line.signed_area().abs() - area).abs() <= 0.05 * area);
    }

    #[test]
    fn mask_survives_a_distance_round_trip(
        (rows, cols, cells) in (3usize..24, 3usize..24).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec(any::<bool>(), r * c))
        }),
    ) {
        let d = GridDims::new(rows, cols).unwrap();
        let mask = BinaryMask::from_fn(d, |i, j| cells[i * cols + j]);
        prop_assume!(mask.count() > 0 && mask.count() < d.len());
        let phi = sdf_from_mask(&mask).unwrap();
        prop_assert_eq!(BinaryMask::inside(&phi), mask);
        for &v in phi.as_slice() {
            prop_assert!(v.abs() >= 0.5);
        }
    }

    #[test]
    fn jaccard_is_a_symmetric_similarity(
        a in prop::collection::vec(any::<bool>(), 100),
        b in prop::collection::vec(any::<bool>(), 100),
    ) {
        let d = GridDims::new(10, 10).unwrap();
        let ma = BinaryMask::from_fn(d, |i, j| a[i * 10 + j]);
        let mb = BinaryMask::from_fn(d, |i, j| b[i * 10 + j]);
        let j = jaccard(&ma, &mb).unwrap();
        prop_assert_eq!(j, jaccard(&mb, &ma).unwrap());
        prop_assert!((0.0..=1.0).contains(&j));
        prop_assert_eq!(jaccard(&ma, &ma).unwrap(), 1.0);
    }
}

#[test]
fn overlapping_strips_have_jaccard_one_third() {
    let d = GridDims::new(10, 30).unwrap();
    let a = BinaryMask::from_fn(d, |_, j| j < 20);
    let b = BinaryMask::from_fn(d, |_, j| j >= 10);
    assert!((jaccard(&a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn threshold_init_of_a_disk_is_close_to_its_distance() {
    let d = GridDims::new(48, 48).unwrap();
    let image = ScalarField::from_fn(d, |i, j| {
        if (i as f64 - 24.0).hypot(j as f64 - 24.0) < 10.0 {
            0.2
        } else {
            0.9
        }
    });
    let phi = init_level_set(&InitSpec::Threshold { level: 0.5 }, d, Some(&image)).unwrap();
    let exact = circle_sdf(d, (24.0, 24.0), 10.0);
    let worst = phi
        .as_slice()
        .iter()
        .zip(exact.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1.0, "worst {worst}");
}

#[test]
fn circle_init_is_eikonal_almost_everywhere() {
    let d = GridDims::new(40, 40).unwrap();
    let spec = InitSpec::Circle {
        center: (20.0, 20.0),
        radius: 8.0,
    };
    let phi = init_level_set(&spec, d, None).unwrap();
    let mut good = 0;
    let mut total = 0;
    for i in 1..39 {
        for j in 1..39 {
            let gx = 0.5 * (phi.get(i, j + 1) - phi.get(i, j - 1));
            let gy = 0.5 * (phi.get(i + 1, j) - phi.get(i - 1, j));
            total += 1;
            if (gx.hypot(gy) - 1.0).abs() <= 0.05 {
                good += 1;
            }
        }
    }
    assert!(good as f64 >= 0.95 * total as f64, "{good}/{total}");
}
