//! Property tests for geometry generators and the SI model.

use fdarray::geometry::{
    generate_interleaved, generate_nested, generate_partitioned, joint_aperture, validate,
    ArrayGeometry,
};
use fdarray::si::{distance_matrix, is_toeplitz, si_matrix, sign_pattern, SignPattern};
use fdarray::{FullDuplexLayout, Position};
use num_rational::Ratio;
use proptest::prelude::*;

fn distinct_rationals(max_len: usize) -> impl Strategy<Value = Vec<Position>> {
    proptest::collection::btree_set((-400i64..400, 1i64..=8), 1..=max_len).prop_map(|set| {
        let mut v: Vec<Position> = set.into_iter().map(|(n, d)| Ratio::new(n, d)).collect();
        v.sort();
        v.dedup();
        v
    })
}

/// Random disjoint Tx/Rx geometries on a rational grid.
fn rational_layout() -> impl Strategy<Value = FullDuplexLayout> {
    (distinct_rationals(12), distinct_rationals(12)).prop_filter_map("overlap", |(tx, rx)| {
        let tx: Vec<Position> = tx.into_iter().filter(|p| !rx.contains(p)).collect();
        if tx.is_empty() {
            return None;
        }
        FullDuplexLayout::new(
            ArrayGeometry::new(tx).ok()?,
            ArrayGeometry::new(rx).ok()?,
            "random",
        )
        .ok()
    })
}

fn integer_layout() -> impl Strategy<Value = FullDuplexLayout> {
    let side = || proptest::collection::btree_set(-60i64..60, 1..10);
    (side(), side()).prop_filter_map("overlap", |(tx, rx)| {
        let tx: Vec<i64> = tx.difference(&rx).copied().collect();
        FullDuplexLayout::new(
            ArrayGeometry::from_integers(tx).ok()?,
            ArrayGeometry::from_integers(rx).ok()?,
            "grid",
        )
        .ok()
    })
}

proptest! {
    #[test]
    fn generated_layouts_validate(n in 1usize..40, d1 in 0u64..30, d2 in 1u64..8, m1 in 1usize..12, m2 in 1usize..12, d3 in 1u64..8) {
        let p = generate_partitioned(n, d1).unwrap();
        prop_assert!(validate(&p).is_ok());
        prop_assert_eq!((p.n_tx(), p.n_rx()), (n, n));
        prop_assert_eq!(p.tx.min() - p.rx.max(), Ratio::from_integer(d1 as i64 + 1));
        prop_assert_eq!(joint_aperture(&p), Ratio::from_integer(2 * n as i64 - 1 + d1 as i64));

        let i = generate_interleaved(n, d2).unwrap();
        prop_assert!(validate(&i).is_ok());
        prop_assert_eq!(joint_aperture(&i), Ratio::from_integer(d2 as i64 * (2 * n as i64 - 1)));
        // sorted merge alternates R, T, R, T, ...
        let mut merged: Vec<(Position, char)> = i.rx.positions().iter().map(|p| (*p, 'R'))
            .chain(i.tx.positions().iter().map(|p| (*p, 'T'))).collect();
        merged.sort();
        for (k, (_, side)) in merged.iter().enumerate() {
            prop_assert_eq!(*side, if k % 2 == 0 { 'R' } else { 'T' });
        }

        let s = generate_nested(m1, m2, d3).unwrap();
        prop_assert!(validate(&s).is_ok());
        prop_assert_eq!((s.n_tx(), s.n_rx()), (m1 + m2, m1 + m2));
        // Tx = max(Rx) − Rx + M₁ − 1 + δ₃
        let shift = s.rx.max() + Ratio::from_integer(m1 as i64 - 1 + d3 as i64);
        let mirrored = ArrayGeometry::new(s.rx.positions().iter().map(|p| shift - p).collect()).unwrap();
        prop_assert_eq!(&s.tx, &mirrored);
    }

    #[test]
    fn si_entries_follow_spherical_model(layout in rational_layout(), rho in 0.01f64..50.0) {
        let h = si_matrix(&layout, rho).unwrap();
        let d = h.distances.to_f64();
        for ((idx, z), delta) in h.h.indexed_iter().zip(d.iter()) {
            let unit = z.norm() * delta / rho;
            prop_assert!((unit - 1.0).abs() <= 1e-12, "{idx:?}: {unit}");
            let phase = num_complex::Complex64::from_polar(1.0, std::f64::consts::PI * delta);
            prop_assert!((z / z.norm() - phase).norm() <= 1e-9);
        }
    }

    #[test]
    fn integer_grid_is_exactly_real_with_parity_sign(layout in integer_layout(), rho in 0.01f64..50.0) {
        let h = si_matrix(&layout, rho).unwrap();
        for (z, d) in h.h.iter().zip(h.distances.delta.iter()) {
            prop_assert_eq!(z.im, 0.0);
            let odd = d.to_integer() % 2 == 1;
            prop_assert_eq!(z.re < 0.0, odd);
        }
        prop_assert_ne!(sign_pattern(&h), SignPattern::Complex);
        prop_assert_ne!(sign_pattern(&h), SignPattern::Mixed);
    }

    #[test]
    fn rho_scales_linearly(layout in rational_layout(), rho in 0.01f64..10.0, c in 0.125f64..8.0) {
        let a = si_matrix(&layout, rho).unwrap();
        let b = si_matrix(&layout, c * rho).unwrap();
        for (x, y) in a.h.iter().zip(b.h.iter()) {
            prop_assert!((x * c - y).norm() <= 1e-14 * y.norm());
        }
    }
}

#[test]
fn scaling_and_translation_sets() {
    // 𝕌₃ = {0,1,2}; 3(𝕌₃ + 1) − 1 = {2, 5, 8}
    let u = ArrayGeometry::uniform(3).unwrap();
    let g = u
        .translate(Ratio::from_integer(1))
        .scale(Ratio::from_integer(3))
        .unwrap()
        .translate(Ratio::from_integer(-1));
    assert_eq!(g, ArrayGeometry::from_integers([2, 5, 8]).unwrap());
    assert!(ArrayGeometry::uniform(0).is_err());
}

#[test]
fn partitioned_and_interleaved_are_exactly_toeplitz() {
    for n in 1..=32 {
        for d1 in 0..=5 {
            let l = generate_partitioned(n, d1).unwrap();
            assert!(distance_matrix(&l).unwrap().is_toeplitz());
            assert!(is_toeplitz(&si_matrix(&l, 1.0).unwrap().h, 0.0));
        }
        for d2 in 1..=5 {
            let l = generate_interleaved(n, d2).unwrap();
            assert!(distance_matrix(&l).unwrap().is_toeplitz());
            assert!(is_toeplitz(&si_matrix(&l, 1.0).unwrap().h, 0.0));
        }
    }
    let nested = si_matrix(&generate_nested(6, 5, 3).unwrap(), 1.0).unwrap();
    assert!(!is_toeplitz(&nested.h, 0.0));
    assert!(!nested.distances.is_toeplitz());
}
