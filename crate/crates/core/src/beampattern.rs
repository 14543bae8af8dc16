//! Narrowband array factor and sampled beampatterns.
//!
//! `A(θ) = Σₙ exp(jπ dₙ (sin θ − sin θₛ))` with positions `dₙ` in λ/2 units and
//! uniform weights. Curves are sampled on a uniform θ grid over [−π/2, π/2].

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::ArrayGeometry;
use crate::io::{fmt_f64, table_to_csv};

pub const DEFAULT_GRID_SIZE: usize = 4096;

/// Gains below this level (including exact nulls) are clamped to it.
pub const FLOOR_DB: f64 = -120.0;

/// Depth below the main-lobe peak a minimum needs to count as a null.
pub const NULL_DEPTH_DB: f64 = 20.0;

const ANGLE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct BeampatternCurve {
    pub thetas: Vec<f64>,
    pub gains_db: Vec<f64>,
    pub steering: f64,
    pub normalized: bool,
}

impl BeampatternCurve {
    pub fn step(&self) -> f64 {
        PI / (self.thetas.len() - 1) as f64
    }

    pub fn peak_db(&self) -> f64 {
        self.gains_db
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `theta,B` rows, angles in radians, gains in dB.
    pub fn to_csv(&self) -> Result<String> {
        table_to_csv(
            &["theta", "B"],
            self.thetas
                .iter()
                .zip(&self.gains_db)
                .map(|(t, b)| [fmt_f64(*t), fmt_f64(*b)]),
        )
    }
}

fn check_angle(name: &'static str, theta: f64) -> Result<()> {
    if theta.is_finite() && theta.abs() <= FRAC_PI_2 + ANGLE_SLACK {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("angle {theta} outside [-pi/2, pi/2]"),
        ))
    }
}

fn factor_at(positions: &[f64], u: f64) -> Complex64 {
    positions
        .iter()
        .map(|d| {
            let (s, c) = (PI * d * u).sin_cos();
            Complex64::new(c, s)
        })
        .sum()
}

pub fn array_factor(g: &ArrayGeometry, theta: f64, theta_s: f64) -> Result<Complex64> {
    check_angle("theta", theta)?;
    check_angle("theta_s", theta_s)?;
    Ok(factor_at(&g.to_f64(), theta.sin() - theta_s.sin()))
}

/// `size` uniformly spaced angles from −π/2 to π/2 inclusive.
pub fn angle_grid(size: usize) -> Vec<f64> {
    let step = PI / (size - 1) as f64;
    let mut grid: Vec<f64> = (0..size).map(|i| -FRAC_PI_2 + i as f64 * step).collect();
    grid[size - 1] = FRAC_PI_2;
    grid
}

pub fn beampattern(
    g: &ArrayGeometry,
    theta_s: f64,
    grid_size: usize,
    normalized: bool,
) -> Result<BeampatternCurve> {
    beampattern_with(Execution::default(), g, theta_s, grid_size, normalized)
}

pub fn beampattern_with(
    exec: Execution,
    g: &ArrayGeometry,
    theta_s: f64,
    grid_size: usize,
    normalized: bool,
) -> Result<BeampatternCurve> {
    check_angle("theta_s", theta_s)?;
    if grid_size < 3 {
        return Err(Error::param(
            "grid_size",
            format!("need at least 3 points, got {grid_size}"),
        ));
    }
    let positions = g.to_f64();
    let thetas = angle_grid(grid_size);
    let sin_s = theta_s.sin();
    let mut gains_db = exec.map(&thetas, |t| {
        let magnitude = factor_at(&positions, t.sin() - sin_s).norm();
        (20.0 * magnitude.log10()).max(FLOOR_DB)
    });
    if normalized {
        let peak = gains_db.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        gains_db
            .iter_mut()
            .for_each(|b| *b = (*b - peak).max(FLOOR_DB));
    }
    Ok(BeampatternCurve {
        thetas,
        gains_db,
        steering: theta_s,
        normalized,
    })
}

/// Vertex of the parabola through three equally spaced samples:
/// (offset in steps from the middle sample, value there).
fn parabola_vertex(left: f64, mid: f64, right: f64) -> (f64, f64) {
    let curvature = left - 2.0 * mid + right;
    if curvature == 0.0 {
        return (0.0, mid);
    }
    let offset = (0.5 * (left - right) / curvature).clamp(-0.5, 0.5);
    (offset, mid - 0.25 * (left - right) * offset)
}

fn nearest_index(curve: &BeampatternCurve, theta: f64) -> usize {
    let idx = ((theta + FRAC_PI_2) / curve.step()).round();
    (idx.max(0.0) as usize).min(curve.thetas.len() - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WidthMethod {
    /// Distance between the first nulls either side of the peak.
    NullToNull,
    /// −3 dB width; used when a first minimum is shallower than the null depth.
    HalfPower,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MainLobe {
    pub width: f64,
    pub left: f64,
    pub right: f64,
    pub method: WidthMethod,
}

/// Main-lobe width around the steering direction.
///
/// The lobe is bounded by the first local minimum on each side of the peak.
/// When both minima sit at least [`NULL_DEPTH_DB`] below the peak the result
/// is the null-to-null width (null locations refined on |A|²); otherwise it
/// falls back to the half-power width and says so in `method`.
pub fn main_lobe_width(curve: &BeampatternCurve) -> Result<MainLobe> {
    let y = &curve.gains_db;
    let n = y.len();
    let lowest = y.iter().copied().fold(f64::INFINITY, f64::min);
    if curve.peak_db() - lowest < 1e-9 {
        return Err(Error::DegenerateCurve(
            "flat beampattern has no main lobe".into(),
        ));
    }

    let mut peak = nearest_index(curve, curve.steering);
    loop {
        let up = [peak.wrapping_sub(1), peak + 1]
            .into_iter()
            .filter(|&j| j < n && y[j] > y[peak])
            .max_by(|&a, &b| y[a].total_cmp(&y[b]));
        match up {
            Some(j) => peak = j,
            None => break,
        }
    }
    let peak_db = if peak > 0 && peak + 1 < n {
        parabola_vertex(y[peak - 1], y[peak], y[peak + 1]).1
    } else {
        y[peak]
    };

    let first_min = |forward: bool| -> Option<usize> {
        let mut j = peak;
        loop {
            j = if forward { j + 1 } else { j.checked_sub(1)? };
            if j == 0 || j + 1 >= n {
                return None;
            }
            if y[j] <= y[j - 1] && y[j] <= y[j + 1] {
                return Some(j);
            }
        }
    };
    let step = curve.step();
    let threshold = peak_db - NULL_DEPTH_DB;
    if let (Some(l), Some(r)) = (first_min(false), first_min(true)) {
        if y[l] <= threshold && y[r] <= threshold {
            let null_at = |j: usize| {
                let power = |k: usize| 10f64.powf(y[k] / 10.0);
                let (offset, _) = parabola_vertex(power(j - 1), power(j), power(j + 1));
                curve.thetas[j] + offset * step
            };
            let (left, right) = (null_at(l), null_at(r));
            return Ok(MainLobe {
                width: right - left,
                left,
                right,
                method: WidthMethod::NullToNull,
            });
        }
    }

    let half = peak_db - 10.0 * 2f64.log10();
    let crossing = |forward: bool| -> f64 {
        let mut j = peak;
        loop {
            let next = if forward { j + 1 } else { j.wrapping_sub(1) };
            if next >= n {
                return curve.thetas[j];
            }
            if y[next] <= half {
                let frac = (y[j] - half) / (y[j] - y[next]);
                return curve.thetas[j] + frac * (curve.thetas[next] - curve.thetas[j]);
            }
            j = next;
        }
    };
    let (left, right) = (crossing(false), crossing(true));
    Ok(MainLobe {
        width: right - left,
        left,
        right,
        method: WidthMethod::HalfPower,
    })
}

/// Angles of local maxima within `tol_db` of the global peak, other than the
/// lobe at the steering angle. Interior maxima are refined by parabolic
/// interpolation; the grid endpoints count when they exceed their neighbour.
pub fn grating_lobes(curve: &BeampatternCurve, tol_db: f64) -> Vec<f64> {
    let y = &curve.gains_db;
    let n = y.len();
    let step = curve.step();
    let mut maxima: Vec<(f64, f64)> = Vec::new();
    if y[0] > y[1] {
        maxima.push((curve.thetas[0], y[0]));
    }
    for i in 1..n - 1 {
        if y[i] > y[i - 1] && y[i] >= y[i + 1] {
            let (offset, value) = parabola_vertex(y[i - 1], y[i], y[i + 1]);
            maxima.push((curve.thetas[i] + offset * step, value));
        }
    }
    if y[n - 1] > y[n - 2] {
        maxima.push((curve.thetas[n - 1], y[n - 1]));
    }
    let peak = maxima.iter().map(|m| m.1).fold(curve.peak_db(), f64::max);
    maxima
        .into_iter()
        .filter(|&(theta, value)| {
            value >= peak - tol_db && (theta - curve.steering).abs() > 1.5 * step
        })
        .map(|(theta, _)| theta)
        .collect()
}
