//! Independent oracles shared by the integration and acceptance suites.
//! Nothing here calls into the Jacobi SVD or the histogram co-array path.
#![allow(dead_code)]

use std::collections::HashMap;

use fdarray::{Complex64, FullDuplexLayout, Position};
use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn random_complex<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((rows, cols), |_| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Gram matrix on the smaller side: H*H (cols ≤ rows) or HH* (rows < cols).
fn gram(h: &Array2<Complex64>) -> Array2<Complex64> {
    let hc = h.t().mapv(|z| z.conj());
    if h.ncols() <= h.nrows() {
        hc.dot(h)
    } else {
        h.dot(&hc)
    }
}

/// Singular values of a matrix whose smaller dimension is 1, 2 or 3, from the
/// roots of the characteristic polynomial of its Gram matrix. Descending.
pub fn charpoly_singular_values(h: &Array2<Complex64>) -> Vec<f64> {
    if h.dim() == (2, 2) {
        return square_2x2(h);
    }
    let g = gram(h);
    let mut lambdas = match g.nrows() {
        1 => vec![g[[0, 0]].re],
        2 => quadratic_roots(&g),
        3 => cubic_roots(&g),
        k => panic!("oracle handles up to 3x3 Gram matrices, got {k}"),
    };
    lambdas.sort_by(|a, b| b.total_cmp(a));
    lambdas.into_iter().map(|l| l.max(0.0).sqrt()).collect()
}

/// Square 2×2: the Gram polynomial is λ² − ‖H‖_F²λ + |det H|². Taking det H
/// from the entries keeps σ₂ accurate when H is nearly rank 1.
fn square_2x2(h: &Array2<Complex64>) -> Vec<f64> {
    let f = frobenius_sq(h);
    let det = (h[[0, 0]] * h[[1, 1]] - h[[0, 1]] * h[[1, 0]]).norm();
    let big = ((f + (f * f - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt();
    let small = if big > 0.0 { det / big } else { 0.0 };
    vec![big, small]
}

/// λ² − tλ + d = 0 for the Hermitian 2×2 Gram matrix.
fn quadratic_roots(g: &Array2<Complex64>) -> Vec<f64> {
    let (a, d, b) = (g[[0, 0]].re, g[[1, 1]].re, g[[0, 1]]);
    let trace = a + d;
    let det = a * d - b.norm_sqr();
    let disc = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    let big = trace / 2.0 + disc;
    // product of roots is det; avoids cancellation for the small root
    let small = if big > 0.0 {
        det / big
    } else {
        trace / 2.0 - disc
    };
    vec![big, small]
}

/// λ³ − c₂λ² + c₁λ − c₀ = 0 solved trigonometrically, then Newton-polished.
fn cubic_roots(g: &Array2<Complex64>) -> Vec<f64> {
    let e = |i: usize, j: usize| g[[i, j]];
    let c2 = e(0, 0).re + e(1, 1).re + e(2, 2).re;
    let minor = |i: usize, j: usize| (e(i, i) * e(j, j) - e(i, j) * e(j, i)).re;
    let c1 = minor(0, 1) + minor(0, 2) + minor(1, 2);
    let c0 = (e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
        - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0)))
    .re;

    // λ = t + c₂/3  ⇒  t³ + pt + q = 0
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = -2.0 * c2.powi(3) / 27.0 + c2 * c1 / 3.0 - c0;
    let roots: Vec<f64> = if p.abs() < 1e-300 {
        vec![shift; 3]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .collect()
    };
    let poly = |x: f64| ((x - c2) * x + c1) * x - c0;
    let dpoly = |x: f64| (3.0 * x - 2.0 * c2) * x + c1;
    roots
        .into_iter()
        .map(|mut x| {
            for _ in 0..4 {
                let d = dpoly(x);
                if d == 0.0 {
                    break;
                }
                let next = x - poly(x) / d;
                if !next.is_finite() {
                    break;
                }
                x = next;
            }
            x
        })
        .collect()
}

pub fn frobenius_sq(h: &Array2<Complex64>) -> f64 {
    h.iter().map(|z| z.norm_sqr()).sum()
}

/// Every (tx, rx) pair sum, counted by hashing; for integer-grid layouts, the
/// longest run of consecutive integers found by scanning the sorted sums.
pub fn brute_force_coarray(
    layout: &FullDuplexLayout,
) -> (Vec<Position>, Vec<usize>, Option<usize>) {
    let mut counts: HashMap<Position, usize> = HashMap::new();
    for t in layout.tx.positions() {
        for r in layout.rx.positions() {
            *counts.entry(*t + *r).or_insert(0) += 1;
        }
    }
    let mut sums: Vec<Position> = counts.keys().copied().collect();
    sums.sort();
    let mults = sums.iter().map(|s| counts[s]).collect();
    let on_grid = layout
        .tx
        .positions()
        .iter()
        .chain(layout.rx.positions())
        .all(|p| p.is_integer());
    let contiguous = on_grid.then(|| {
        let mut best = 1;
        let mut run = 1;
        for w in sums.windows(2) {
            run = if w[1] - w[0] == Position::from_integer(1) {
                run + 1
            } else {
                1
            };
            best = best.max(run);
        }
        best
    });
    (sums, mults, contiguous)
}
