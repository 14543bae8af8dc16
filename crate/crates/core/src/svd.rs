//! One-sided (Hestenes) Jacobi SVD for dense complex matrices.
//!
//! Columns are rotated pairwise until mutually orthogonal; the singular values
//! are the final column norms. The method resolves small singular values to
//! high relative accuracy on graded matrices, which matters for the rapidly
//! decaying SI spectra of partitioned and nested layouts.

use ndarray::{Array2, ArrayView2, Axis};
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

#[derive(Clone, Debug)]
pub struct Svd {
    /// Descending singular values, `min(rows, cols)` of them.
    pub sigmas: Vec<f64>,
    /// Left factor, `rows × k`.
    pub u: Option<Array2<Complex64>>,
    /// Right factor, `cols × k`.
    pub v: Option<Array2<Complex64>>,
}

impl Svd {
    /// `U · diag(σ) · V*`, when factors were retained.
    pub fn reconstruct(&self) -> Option<Array2<Complex64>> {
        let (u, v) = (self.u.as_ref()?, self.v.as_ref()?);
        let mut us = u.clone();
        for (mut col, &s) in us.axis_iter_mut(Axis(1)).zip(&self.sigmas) {
            col.mapv_inplace(|z| z * s);
        }
        Some(us.dot(&v.t().mapv(|z| z.conj())))
    }
}

pub fn check_finite(a: ArrayView2<'_, Complex64>) -> Result<()> {
    match a.indexed_iter().find(|(_, z)| !z.is_finite()) {
        Some(((row, col), _)) => Err(Error::NonFinite { row, col }),
        None => Ok(()),
    }
}

pub fn svd(a: ArrayView2<'_, Complex64>, with_factors: bool) -> Result<Svd> {
    check_finite(a)?;
    if a.is_empty() {
        return Err(Error::InvalidGeometry("empty matrix".into()));
    }
    if a.nrows() >= a.ncols() {
        jacobi(a.to_owned(), with_factors)
    } else {
        // A* = U' Σ V'*  ⇒  A = V' Σ U'*
        let t = jacobi(a.t().mapv(|z| z.conj()), with_factors)?;
        Ok(Svd {
            sigmas: t.sigmas,
            u: t.v,
            v: t.u,
        })
    }
}

fn jacobi(mut w: Array2<Complex64>, with_factors: bool) -> Result<Svd> {
    let (m, n) = w.dim();
    let tol = (m as f64).sqrt() * f64::EPSILON;
    let mut v = with_factors.then(|| Array2::<Complex64>::eye(n));
    let mut converged = n < 2;

    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, Complex64::new(0.0, 0.0));
                for i in 0..m {
                    let (wp, wq) = (w[[i, p]], w[[i, q]]);
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let e = gamma / g;
                rotate(&mut w, p, q, c, s, e);
                if let Some(v) = v.as_mut() {
                    rotate(v, p, q, c, s, e);
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let norms: Vec<f64> = w
        .axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal values keep their column order
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let sigmas = order.iter().map(|&j| norms[j]).collect();

    let (u, v) = match v {
        Some(v) => {
            let u = Array2::from_shape_fn((m, n), |(i, k)| {
                let j = order[k];
                if norms[j] > 0.0 {
                    w[[i, j]] / norms[j]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let v = Array2::from_shape_fn((n, n), |(i, k)| v[[i, order[k]]]);
            (Some(u), Some(v))
        }
        None => (None, None),
    };
    Ok(Svd { sigmas, u, v })
}

/// Columns p, q ← (c·p − s·ē·q, s·e·p + c·q).
fn rotate(a: &mut Array2<Complex64>, p: usize, q: usize, c: f64, s: f64, e: Complex64) {
    let se = e * s;
    let se_conj = se.conj();
    for i in 0..a.nrows() {
        let (ap, aq) = (a[[i, p]], a[[i, q]]);
        a[[i, p]] = ap * c - se_conj * aq;
        a[[i, q]] = se * ap + aq * c;
    }
}
