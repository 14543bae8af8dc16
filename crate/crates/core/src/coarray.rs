//! Sum co-array of a full-duplex layout: the virtual positions `d_tx + d_rx`.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::experiments::{solve_params, ApertureRule};
use crate::geometry::{Family, FamilyParams, FullDuplexLayout, Position};
use crate::io::table_to_csv;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumCoarray {
    /// Distinct sums, ascending.
    pub sums: Vec<Position>,
    /// Number of (tx, rx) pairs landing on each sum.
    pub multiplicities: Vec<usize>,
    /// Longest run of consecutive integers in `sums`; `None` off the integer grid.
    pub contiguous_len: Option<usize>,
}

impl SumCoarray {
    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    pub fn total_pairs(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// `sum,multiplicity` rows.
    pub fn to_csv(&self) -> Result<String> {
        table_to_csv(
            &["sum", "multiplicity"],
            self.sums
                .iter()
                .zip(&self.multiplicities)
                .map(|(s, m)| [s.to_string(), m.to_string()]),
        )
    }
}

pub fn sum_coarray(layout: &FullDuplexLayout) -> SumCoarray {
    if layout.is_integer_grid() {
        integer_coarray(layout)
    } else {
        let mut counts: BTreeMap<Position, usize> = BTreeMap::new();
        for t in layout.tx.positions() {
            for r in layout.rx.positions() {
                *counts.entry(t + r).or_default() += 1;
            }
        }
        SumCoarray {
            sums: counts.keys().copied().collect(),
            multiplicities: counts.into_values().collect(),
            contiguous_len: None,
        }
    }
}

/// Dense histogram over `[min sum, max sum]`.
fn integer_coarray(layout: &FullDuplexLayout) -> SumCoarray {
    let tx: Vec<i64> = layout
        .tx
        .positions()
        .iter()
        .map(Ratio::to_integer)
        .collect();
    let rx: Vec<i64> = layout
        .rx
        .positions()
        .iter()
        .map(Ratio::to_integer)
        .collect();
    let lo = tx[0] + rx[0];
    let span = (tx[tx.len() - 1] + rx[rx.len() - 1] - lo) as usize + 1;
    let mut hist = vec![0usize; span];
    for t in &tx {
        for r in &rx {
            hist[(t + r - lo) as usize] += 1;
        }
    }
    let (mut sums, mut multiplicities) = (Vec::new(), Vec::new());
    let (mut run, mut best) = (0usize, 0usize);
    for (offset, &count) in hist.iter().enumerate() {
        if count == 0 {
            run = 0;
            continue;
        }
        run += 1;
        best = best.max(run);
        sums.push(Ratio::from_integer(lo + offset as i64));
        multiplicities.push(count);
    }
    SumCoarray {
        sums,
        multiplicities,
        contiguous_len: Some(best),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoarrayScalingRow {
    pub n: usize,
    pub contiguous_len: usize,
    /// Joint aperture of the solved layout.
    pub aperture: i64,
    pub params: FamilyParams,
}

/// Contiguous sum co-array length of nested layouts across `ns`, with
/// M₁ = ⌈N/2⌉, M₂ = N − M₁ and δ₃ solved from `rule`.
pub fn coarray_scaling(ns: &[usize], rule: &ApertureRule) -> Result<Vec<CoarrayScalingRow>> {
    coarray_scaling_with(Execution::default(), ns, rule)
}

pub fn coarray_scaling_with(
    exec: Execution,
    ns: &[usize],
    rule: &ApertureRule,
) -> Result<Vec<CoarrayScalingRow>> {
    if ns.is_empty() {
        return Err(Error::param("n", "range is empty"));
    }
    exec.map(ns, |&n| {
        let solved = solve_params(Family::Nested, n, rule)?;
        let layout = solved.params.build()?;
        Ok(CoarrayScalingRow {
            n,
            contiguous_len: sum_coarray(&layout)
                .contiguous_len
                .expect("nested layouts are on the grid"),
            aperture: solved.l_actual,
            params: solved.params,
        })
    })
    .into_iter()
    .collect()
}

pub fn scaling_table_csv(rows: &[CoarrayScalingRow]) -> Result<String> {
    table_to_csv(
        &["N", "contiguous_len", "L"],
        rows.iter().map(|r| {
            [
                r.n.to_string(),
                r.contiguous_len.to_string(),
                r.aperture.to_string(),
            ]
        }),
    )
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::param(
            "points",
            "need at least two points with positive coordinates",
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::param("points", "all x values coincide"));
    }
    Ok(sxy / sxx)
}

pub fn scaling_slope(rows: &[CoarrayScalingRow]) -> Result<f64> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.n as f64, r.contiguous_len as f64))
        .collect();
    loglog_slope(&points)
}
