//! Spherical-wave self-interference model.
//!
//! `H[n][m] = ρ · exp(jπΔ[n][m]) / Δ[n][m]` with `Δ[n][m] = |d_rx[n] − d_tx[m]|`
//! in λ/2 units. Rows index Rx antennas, columns index Tx antennas.

use ndarray::Array2;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{position_to_f64, validate, FullDuplexLayout, Position};

/// Pairwise Tx/Rx distances, exact, in λ/2 units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    pub delta: Array2<Position>,
}

impl DistanceMatrix {
    pub fn is_integer(&self) -> bool {
        self.delta.iter().all(Ratio::is_integer)
    }

    pub fn to_f64(&self) -> Array2<f64> {
        self.delta.map(position_to_f64)
    }

    pub fn is_toeplitz(&self) -> bool {
        is_toeplitz(&self.delta, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiChannelMatrix {
    pub h: Array2<Complex64>,
    pub rho: f64,
    pub distances: DistanceMatrix,
    pub label: String,
}

impl SiChannelMatrix {
    pub fn n_rx(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.h.ncols()
    }

    pub fn is_real(&self) -> bool {
        self.h.iter().all(|z| z.im == 0.0)
    }
}

pub fn distance_matrix(layout: &FullDuplexLayout) -> Result<DistanceMatrix> {
    validate(layout).into_result()?;
    let rx = layout.rx.positions();
    let tx = layout.tx.positions();
    let delta = Array2::from_shape_fn((rx.len(), tx.len()), |(n, m)| (rx[n] - tx[m]).abs());
    Ok(DistanceMatrix { delta })
}

/// exp(jπΔ). Integer Δ gives (−1)^Δ and half-integer Δ gives ±j, both exactly;
/// other values go through sin/cos of the phase reduced modulo 2π.
pub fn unit_phase(delta: &Position) -> Complex64 {
    let two = Ratio::from_integer(2);
    let mut r = delta % two;
    if r.is_negative() {
        r += two;
    }
    match (*r.numer(), *r.denom()) {
        (0, 1) => Complex64::new(1.0, 0.0),
        (1, 1) => Complex64::new(-1.0, 0.0),
        (1, 2) => Complex64::new(0.0, 1.0),
        (3, 2) => Complex64::new(0.0, -1.0),
        _ => {
            let (s, c) = (std::f64::consts::PI * position_to_f64(&r)).sin_cos();
            Complex64::new(c, s)
        }
    }
}

pub fn si_matrix(layout: &FullDuplexLayout, rho: f64) -> Result<SiChannelMatrix> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::param(
            "rho",
            format!("must be a positive finite number, got {rho}"),
        ));
    }
    let distances = distance_matrix(layout)?;
    let h = distances
        .delta
        .map(|d| unit_phase(d) * (rho / position_to_f64(d)));
    Ok(SiChannelMatrix {
        h,
        rho,
        distances,
        label: layout.label.clone(),
    })
}

/// Entry comparison used by [`is_toeplitz`].
pub trait ToeplitzEntry {
    fn within(&self, other: &Self, tol: f64) -> bool;
}

impl ToeplitzEntry for Position {
    fn within(&self, other: &Self, tol: f64) -> bool {
        self == other || position_to_f64(&(self - other).abs()) <= tol
    }
}

impl ToeplitzEntry for f64 {
    fn within(&self, other: &Self, tol: f64) -> bool {
        self == other || (self - other).abs() <= tol
    }
}

impl ToeplitzEntry for Complex64 {
    fn within(&self, other: &Self, tol: f64) -> bool {
        self == other || (self - other).norm() <= tol
    }
}

/// True when every diagonal is constant to within `tol`; `tol = 0` demands
/// exact equality.
pub fn is_toeplitz<T: ToeplitzEntry>(m: &Array2<T>, tol: f64) -> bool {
    let (rows, cols) = m.dim();
    (1..rows).all(|i| (1..cols).all(|j| m[[i, j]].within(&m[[i - 1, j - 1]], tol)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignPattern {
    /// Real entries whose sign is (−1)^Δ, with both parities present.
    Alternating,
    /// Real entries all of one sign.
    Uniform,
    /// Real entries with both signs not explained by distance parity.
    Mixed,
    /// Some entry has a nonzero imaginary part.
    Complex,
}

pub fn sign_pattern(h: &SiChannelMatrix) -> SignPattern {
    if !h.is_real() {
        return SignPattern::Complex;
    }
    let positive = h.h.iter().filter(|z| z.re > 0.0).count();
    if positive == 0 || positive == h.h.len() {
        return SignPattern::Uniform;
    }
    let follows_parity =
        h.h.iter()
            .zip(h.distances.delta.iter())
            .all(|(z, d)| d.is_integer() && (z.re < 0.0) == (d.to_integer() % 2 != 0));
    if follows_parity {
        SignPattern::Alternating
    } else {
        SignPattern::Mixed
    }
}

/// The SI term `H s` received when the Tx array emits `s`.
pub fn si_leakage(h: &SiChannelMatrix, s: &[Complex64]) -> Result<Vec<Complex64>> {
    if s.len() != h.n_tx() {
        return Err(Error::DimensionMismatch {
            expected: h.n_tx(),
            actual: s.len(),
        });
    }
    Ok(h.h
        .rows()
        .into_iter()
        .map(|row| {
            row.iter()
                .zip(s)
                .fold(Complex64::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect())
}
