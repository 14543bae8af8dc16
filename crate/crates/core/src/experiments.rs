//! Figure-level studies: the N = 11 geometry/beampattern/spectrum comparison
//! and spectral-norm scaling sweeps under aperture growth laws.

use std::fmt;
use std::path::Path;

use crate::beampattern::{beampattern_with, BeampatternCurve, DEFAULT_GRID_SIZE};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{joint_aperture, Family, FamilyParams, FullDuplexLayout};
use crate::io::{fmt_f64, table_to_csv};
use crate::si::si_matrix;
use crate::spectral::{spectral_norm, svd_spectrum, SingularSpectrum};

pub const DEFAULT_LINEAR_SCALE: f64 = 2.0;
pub const DEFAULT_QUADRATIC_SCALE: f64 = 0.26;

/// Parameters of the N = 11 comparison study.
pub const FIG2_PARAMS: [FamilyParams; 3] = [
    FamilyParams::Partitioned { n: 11, delta1: 23 },
    FamilyParams::Interleaved { n: 11, delta2: 2 },
    FamilyParams::Nested {
        m1: 6,
        m2: 5,
        delta3: 3,
    },
];

pub const FIG2_RHO: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ApertureLaw {
    /// L = c·N
    Linear,
    /// L = c·N²
    Quadratic,
    /// L = c
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApertureRule {
    pub law: ApertureLaw,
    pub scale: f64,
}

impl ApertureRule {
    pub fn linear(scale: f64) -> Self {
        Self {
            law: ApertureLaw::Linear,
            scale,
        }
    }

    pub fn quadratic(scale: f64) -> Self {
        Self {
            law: ApertureLaw::Quadratic,
            scale,
        }
    }

    pub fn constant(aperture: f64) -> Self {
        Self {
            law: ApertureLaw::Constant,
            scale: aperture,
        }
    }

    pub fn target(&self, n: usize) -> f64 {
        let n = n as f64;
        match self.law {
            ApertureLaw::Linear => self.scale * n,
            ApertureLaw::Quadratic => self.scale * n * n,
            ApertureLaw::Constant => self.scale,
        }
    }
}

impl fmt::Display for ApertureRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.law {
            ApertureLaw::Linear => write!(f, "L = {}*N", self.scale),
            ApertureLaw::Quadratic => write!(f, "L = {}*N^2", self.scale),
            ApertureLaw::Constant => write!(f, "L = {}", self.scale),
        }
    }
}

/// Family parameters solved from an aperture target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolvedParams {
    pub params: FamilyParams,
    pub l_target: f64,
    pub l_actual: i64,
    /// Aperture change produced by one unit step of the family's gap parameter.
    pub quantum: i64,
    /// `|l_actual − l_target| ≤ quantum`; false when the target sits below the
    /// family's minimum aperture for this N.
    pub feasible: bool,
}

/// Inverts each family's aperture formula:
///
/// * partitioned, L = 2N − 1 + δ₁: δ₁ = max(0, round(L) − (2N − 1))
/// * interleaved, L = δ₂(2N − 1): δ₂ = max(1, round(L / (2N − 1)))
/// * nested with M₁ = ⌈N/2⌉, M₂ = N − M₁, L = 2(M₁ − 1) + δ₃(2M₂ + 1):
///   δ₃ = max(1, ⌊(L − 2(M₁ − 1)) / (2M₂ + 1)⌋)
pub fn solve_params(family: Family, n: usize, rule: &ApertureRule) -> Result<SolvedParams> {
    let l_target = rule.target(n);
    if !l_target.is_finite() || l_target < 0.0 {
        return Err(Error::param(
            "aperture",
            format!("target {l_target} for N={n}"),
        ));
    }
    let min_n = if family == Family::Nested { 2 } else { 1 };
    if n < min_n {
        return Err(Error::param(
            "n",
            format!("{family} needs N >= {min_n}, got {n}"),
        ));
    }
    let span = 2 * n as i64 - 1;
    let (params, quantum) = match family {
        Family::Partitioned => {
            let delta1 = (l_target.round() as i64 - span).max(0) as u64;
            (FamilyParams::Partitioned { n, delta1 }, 1)
        }
        Family::Interleaved => {
            let delta2 = (l_target / span as f64).round().max(1.0) as u64;
            (FamilyParams::Interleaved { n, delta2 }, span)
        }
        Family::Nested => {
            let m1 = n.div_ceil(2);
            let m2 = n - m1;
            let quantum = 2 * m2 as i64 + 1;
            let base = 2.0 * (m1 as f64 - 1.0);
            let delta3 = ((l_target - base) / quantum as f64).floor().max(1.0) as u64;
            (FamilyParams::Nested { m1, m2, delta3 }, quantum)
        }
    };
    let l_actual = joint_aperture(&params.build()?).to_integer();
    Ok(SolvedParams {
        params,
        l_target,
        l_actual,
        quantum,
        feasible: (l_actual as f64 - l_target).abs() <= quantum as f64,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub family: Family,
    pub l: i64,
    pub l_target: f64,
    pub spectral_norm: f64,
    pub params: FamilyParams,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    /// Sorted by N, then by family.
    pub rows: Vec<SweepRow>,
    pub rule: ApertureRule,
    pub rho: f64,
    /// Largest joint aperture reached by the sweep.
    pub l_max: i64,
}

impl SweepResult {
    pub fn family_rows(&self, family: Family) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.family == family)
    }

    /// `N,L,family,spectral_norm,L_target,params,feasible`.
    pub fn to_csv(&self) -> Result<String> {
        table_to_csv(
            &[
                "N",
                "L",
                "family",
                "spectral_norm",
                "L_target",
                "params",
                "feasible",
            ],
            self.rows.iter().map(|r| {
                [
                    r.n.to_string(),
                    r.l.to_string(),
                    r.family.to_string(),
                    fmt_f64(r.spectral_norm),
                    fmt_f64(r.l_target),
                    compact_params(&r.params),
                    r.feasible.to_string(),
                ]
            }),
        )
    }
}

/// `delta1=7`, `delta2=3`, `m1=5;m2=5;delta3=4`.
pub fn compact_params(p: &FamilyParams) -> String {
    match p {
        FamilyParams::Partitioned { delta1, .. } => format!("delta1={delta1}"),
        FamilyParams::Interleaved { delta2, .. } => format!("delta2={delta2}"),
        FamilyParams::Nested { m1, m2, delta3 } => format!("m1={m1};m2={m2};delta3={delta3}"),
    }
}

pub fn scaling_sweep(
    families: &[Family],
    ns: &[usize],
    rule: &ApertureRule,
    rho: f64,
) -> Result<SweepResult> {
    scaling_sweep_with(Execution::default(), families, ns, rule, rho)
}

/// ‖H‖₂ for every (N, family) pair, with geometry parameters solved from
/// `rule`. Rows whose target aperture cannot be met are kept and marked
/// `feasible = false`.
pub fn scaling_sweep_with(
    exec: Execution,
    families: &[Family],
    ns: &[usize],
    rule: &ApertureRule,
    rho: f64,
) -> Result<SweepResult> {
    if ns.is_empty() {
        return Err(Error::param("n", "range is empty"));
    }
    if families.is_empty() {
        return Err(Error::param("family", "no families selected"));
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut families = families.to_vec();
    families.sort();
    families.dedup();

    let jobs: Vec<(usize, Family)> = ns
        .iter()
        .flat_map(|&n| families.iter().map(move |&f| (n, f)))
        .collect();
    let rows = exec
        .map(&jobs, |&(n, family)| -> Result<SweepRow> {
            let solved = solve_params(family, n, rule)?;
            let h = si_matrix(&solved.params.build()?, rho)?;
            Ok(SweepRow {
                n,
                family,
                l: solved.l_actual,
                l_target: solved.l_target,
                spectral_norm: spectral_norm(&h.h)?,
                params: solved.params,
                feasible: solved.feasible,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let l_max = rows.iter().map(|r| r.l).max().unwrap_or(0);
    Ok(SweepResult {
        rows,
        rule: *rule,
        rho,
        l_max,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyEntry {
    pub family: Family,
    pub layout: FullDuplexLayout,
    /// Rx beampattern steered to broadside, unnormalized.
    pub beampattern: BeampatternCurve,
    pub spectrum: SingularSpectrum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig2Study {
    pub rho: f64,
    pub entries: Vec<StudyEntry>,
}

impl Fig2Study {
    pub fn entry(&self, family: Family) -> &StudyEntry {
        self.entries
            .iter()
            .find(|e| e.family == family)
            .expect("study covers all three families")
    }

    /// Writes `<family>_geometry.json`, `<family>_beampattern.csv` and
    /// `<family>_spectrum.csv` for each family into `dir`.
    pub fn write_bundle(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for e in &self.entries {
            let name = e.family.name();
            e.layout.save(&dir.join(format!("{name}_geometry.json")))?;
            std::fs::write(
                dir.join(format!("{name}_beampattern.csv")),
                e.beampattern.to_csv()?,
            )?;
            std::fs::write(
                dir.join(format!("{name}_spectrum.csv")),
                e.spectrum.to_csv()?,
            )?;
        }
        Ok(())
    }
}

/// Partitioned(11, δ₁=23), interleaved(11, δ₂=2) and nested(6, 5, δ₃=3):
/// layouts, broadside Rx beampatterns and SI spectra at the given ρ.
pub fn fig2_study(rho: f64) -> Result<Fig2Study> {
    fig2_study_with(Execution::default(), rho)
}

pub fn fig2_study_with(exec: Execution, rho: f64) -> Result<Fig2Study> {
    let entries = exec
        .map(&FIG2_PARAMS, |params| -> Result<StudyEntry> {
            let layout = params.build()?;
            let spectrum = svd_spectrum(&si_matrix(&layout, rho)?.h)?;
            // the grid is already split across the three families
            let beampattern = beampattern_with(
                Execution::Sequential,
                &layout.rx,
                0.0,
                DEFAULT_GRID_SIZE,
                false,
            )?;
            Ok(StudyEntry {
                family: params.family(),
                layout,
                beampattern,
                spectrum,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Fig2Study { rho, entries })
}
