//! Singular spectra of SI matrices.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::generate_partitioned;
use crate::io::{fmt_f64, table_to_csv};
use crate::si::si_matrix;
use crate::svd::{svd, Svd};

#[derive(Clone, Debug, PartialEq)]
pub struct SingularSpectrum {
    /// Descending, nonnegative.
    pub sigmas: Vec<f64>,
    /// Frobenius norm of the source matrix.
    pub frob: f64,
    /// max |H − UΣV*| when factors were computed.
    pub recon_error: Option<f64>,
}

impl SingularSpectrum {
    pub fn largest(&self) -> f64 {
        self.sigmas[0]
    }

    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    /// `index,sigma` with 1-based indices.
    pub fn to_csv(&self) -> Result<String> {
        table_to_csv(
            &["index", "sigma"],
            self.sigmas
                .iter()
                .enumerate()
                .map(|(i, s)| [(i + 1).to_string(), fmt_f64(*s)]),
        )
    }
}

fn frobenius(h: ArrayView2<'_, Complex64>) -> f64 {
    h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn svd_spectrum(h: &Array2<Complex64>) -> Result<SingularSpectrum> {
    let Svd { sigmas, .. } = svd(h.view(), false)?;
    Ok(SingularSpectrum {
        sigmas,
        frob: frobenius(h.view()),
        recon_error: None,
    })
}

/// Spectrum plus the factors it came from; fills in `recon_error`.
pub fn svd_full(h: &Array2<Complex64>) -> Result<(SingularSpectrum, Svd)> {
    let decomposition = svd(h.view(), true)?;
    let recon = decomposition.reconstruct().expect("factors retained");
    let recon_error = (recon - h).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let spectrum = SingularSpectrum {
        sigmas: decomposition.sigmas.clone(),
        frob: frobenius(h.view()),
        recon_error: Some(recon_error),
    };
    Ok((spectrum, decomposition))
}

/// ‖H‖₂, the largest singular value.
pub fn spectral_norm(h: &Array2<Complex64>) -> Result<f64> {
    Ok(svd_spectrum(h)?.largest())
}

/// Number of singular values at or above `eps · σ₀`.
pub fn effective_rank(spectrum: &SingularSpectrum, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(
            "eps",
            format!("must lie in (0, 1), got {eps}"),
        ));
    }
    let Some(&top) = spectrum.sigmas.first() else {
        return Ok(0);
    };
    if top == 0.0 {
        return Ok(0);
    }
    Ok(spectrum.sigmas.iter().filter(|&&s| s >= eps * top).count())
}

/// σ₂/σ₁ of the N = 2 partitioned SI matrix for each gap δ₁.
pub fn partitioned_rank1_gap(delta1s: &[u64], rho: f64) -> Result<Vec<(u64, f64)>> {
    if delta1s.is_empty() {
        return Err(Error::param("delta1", "range is empty"));
    }
    delta1s
        .iter()
        .map(|&d| {
            let h = si_matrix(&generate_partitioned(2, d)?, rho)?;
            let s = svd_spectrum(&h.h)?;
            Ok((d, s.sigmas[1] / s.sigmas[0]))
        })
        .collect()
}

/// Closed-form singular values of the N = 2 interleaved SI matrix:
/// √((14 ± 4√10)/9) · ρ/δ₂.
pub fn interleaved_closed_form_n2(rho: f64, delta2: u64) -> (f64, f64) {
    let scale = rho / delta2 as f64;
    let r = 4.0 * 10f64.sqrt();
    (
        ((14.0 + r) / 9.0).sqrt() * scale,
        ((14.0 - r) / 9.0).sqrt() * scale,
    )
}
