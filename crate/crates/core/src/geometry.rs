//! Collinear Tx/Rx array geometries.
//!
//! Positions are exact rationals in half-wavelength (λ/2) units, so integer-grid
//! layouts produce exact distances and exact phase signs downstream.

use std::fmt;
use std::path::Path;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Antenna coordinate in λ/2 units.
pub type Position = Ratio<i64>;

pub const UNITS_HALF_WAVELENGTH: &str = "half-wavelength";

/// Parses a plain decimal literal (`-12`, `0.25`, `1.5e-3`) into an exact rational.
pub fn parse_position(text: &str) -> Result<Position> {
    let bad = || Error::Parse(format!("not a decimal number: {text:?}"));
    let overflow = || Error::Parse(format!("position out of range: {text:?}"));
    let s = text.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let frac_part = frac_part.trim_end_matches('0');
    let mut numer: i64 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        numer = numer
            .checked_mul(10)
            .and_then(|v| v.checked_add(i64::from(b - b'0')))
            .ok_or_else(overflow)?;
    }
    let scale = exp - frac_part.len() as i32;
    let pow10 = |k: u32| 10i64.checked_pow(k).ok_or_else(overflow);
    let value = if scale >= 0 {
        Ratio::from_integer(
            numer
                .checked_mul(pow10(scale as u32)?)
                .ok_or_else(overflow)?,
        )
    } else {
        Ratio::new(numer, pow10(scale.unsigned_abs())?)
    };
    Ok(if negative { -value } else { value })
}

/// Exact rational for the shortest decimal that round-trips `x`.
pub fn position_from_f64(x: f64) -> Result<Position> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite position {x}")));
    }
    parse_position(&format!("{x}"))
}

pub fn position_to_f64(p: &Position) -> f64 {
    // i64 -> f64 division is exact for every integer below 2^53
    p.to_f64().unwrap_or(f64::NAN)
}

/// A non-empty, strictly increasing set of antenna positions on a line.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArrayGeometry {
    positions: Vec<Position>,
}

impl ArrayGeometry {
    /// Builds a geometry from positions in any order. Duplicates and empty
    /// input are rejected.
    pub fn new(mut positions: Vec<Position>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidGeometry("geometry has no antennas".into()));
        }
        positions.sort();
        if let Some(w) = positions.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGeometry(format!(
                "duplicate antenna position {}",
                w[0]
            )));
        }
        Ok(Self { positions })
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(positions: I) -> Result<Self> {
        Self::new(positions.into_iter().map(Ratio::from_integer).collect())
    }

    /// The uniform set {0, 1, …, n−1}.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        Self::from_integers(0..n as i64)
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> Position {
        self.positions[0]
    }

    pub fn max(&self) -> Position {
        self.positions[self.positions.len() - 1]
    }

    pub fn aperture(&self) -> Position {
        self.max() - self.min()
    }

    pub fn is_integer_grid(&self) -> bool {
        self.positions.iter().all(Ratio::is_integer)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.positions.iter().map(position_to_f64).collect()
    }

    /// 𝕏 + c
    pub fn translate(&self, offset: Position) -> Self {
        Self {
            positions: self.positions.iter().map(|p| p + offset).collect(),
        }
    }

    /// c·𝕏 for c ≠ 0.
    pub fn scale(&self, factor: Position) -> Result<Self> {
        if factor.is_zero() {
            return Err(Error::param(
                "factor",
                "scaling by zero collapses the array",
            ));
        }
        let mut positions: Vec<_> = self.positions.iter().map(|p| p * factor).collect();
        if factor.is_negative() {
            positions.reverse();
        }
        Ok(Self { positions })
    }

    /// max(𝕏) + min(𝕏) − 𝕏, the set mirrored about its own midpoint.
    pub fn mirror(&self) -> Self {
        let pivot = self.max() + self.min();
        Self {
            positions: self.positions.iter().rev().map(|p| pivot - p).collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut positions: Vec<_> = self
            .positions
            .iter()
            .chain(&other.positions)
            .copied()
            .collect();
        positions.sort();
        positions.dedup();
        Self { positions }
    }

    pub fn contains(&self, p: &Position) -> bool {
        self.positions.binary_search(p).is_ok()
    }

    /// Largest gap between neighbouring elements; zero for a single antenna.
    pub fn max_spacing(&self) -> Position {
        self.positions
            .windows(2)
            .map(|w| w[1] - w[0])
            .max()
            .unwrap_or_else(Position::zero)
    }
}

/// The three canonical geometry families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Partitioned,
    Interleaved,
    Nested,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Partitioned, Family::Interleaved, Family::Nested];

    pub fn name(self) -> &'static str {
        match self {
            Family::Partitioned => "partitioned",
            Family::Interleaved => "interleaved",
            Family::Nested => "nested",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "partitioned" => Ok(Family::Partitioned),
            "interleaved" => Ok(Family::Interleaved),
            "nested" => Ok(Family::Nested),
            other => Err(Error::param("family", format!("unknown family {other:?}"))),
        }
    }
}

/// Generator parameters for one of the canonical families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyParams {
    Partitioned { n: usize, delta1: u64 },
    Interleaved { n: usize, delta2: u64 },
    Nested { m1: usize, m2: usize, delta3: u64 },
}

impl FamilyParams {
    pub fn family(&self) -> Family {
        match self {
            FamilyParams::Partitioned { .. } => Family::Partitioned,
            FamilyParams::Interleaved { .. } => Family::Interleaved,
            FamilyParams::Nested { .. } => Family::Nested,
        }
    }

    /// Antennas per side.
    pub fn antennas(&self) -> usize {
        match *self {
            FamilyParams::Partitioned { n, .. } | FamilyParams::Interleaved { n, .. } => n,
            FamilyParams::Nested { m1, m2, .. } => m1 + m2,
        }
    }

    pub fn build(&self) -> Result<FullDuplexLayout> {
        match *self {
            FamilyParams::Partitioned { n, delta1 } => generate_partitioned(n, delta1),
            FamilyParams::Interleaved { n, delta2 } => generate_interleaved(n, delta2),
            FamilyParams::Nested { m1, m2, delta3 } => generate_nested(m1, m2, delta3),
        }
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyParams::Partitioned { n, delta1 } => {
                write!(f, "partitioned(n={n}, delta1={delta1})")
            }
            FamilyParams::Interleaved { n, delta2 } => {
                write!(f, "interleaved(n={n}, delta2={delta2})")
            }
            FamilyParams::Nested { m1, m2, delta3 } => {
                write!(f, "nested(m1={m1}, m2={m2}, delta3={delta3})")
            }
        }
    }
}

/// A Tx geometry paired with an Rx geometry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullDuplexLayout {
    pub tx: ArrayGeometry,
    pub rx: ArrayGeometry,
    pub label: String,
}

impl FullDuplexLayout {
    /// Pairs two geometries, rejecting any shared position.
    pub fn new(tx: ArrayGeometry, rx: ArrayGeometry, label: impl Into<String>) -> Result<Self> {
        let layout = Self::from_parts(tx, rx, label);
        validate(&layout).into_result()?;
        Ok(layout)
    }

    /// Pairs two geometries without validation. Use [`validate`] before
    /// handing the result to the SI model.
    pub fn from_parts(tx: ArrayGeometry, rx: ArrayGeometry, label: impl Into<String>) -> Self {
        Self {
            tx,
            rx,
            label: label.into(),
        }
    }

    pub fn n_tx(&self) -> usize {
        self.tx.len()
    }

    pub fn n_rx(&self) -> usize {
        self.rx.len()
    }

    pub fn joint(&self) -> ArrayGeometry {
        self.tx.union(&self.rx)
    }

    pub fn is_integer_grid(&self) -> bool {
        self.tx.is_integer_grid() && self.rx.is_integer_grid()
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Parses and re-validates a geometry file. Duplicate positions within one
    /// side are merged; a Tx/Rx collision is an error.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GeometryFile = serde_json::from_str(text)?;
        if let Some(units) = &file.units {
            if units != UNITS_HALF_WAVELENGTH {
                return Err(Error::Parse(format!(
                    "unsupported units {units:?}, expected {UNITS_HALF_WAVELENGTH:?}"
                )));
            }
        }
        let side = |name: &str, nums: &[serde_json::Number]| -> Result<ArrayGeometry> {
            let mut positions = nums
                .iter()
                .map(number_to_position)
                .collect::<Result<Vec<_>>>()?;
            if positions.is_empty() {
                return Err(Error::InvalidGeometry(format!("{name} array is empty")));
            }
            positions.sort();
            positions.dedup();
            ArrayGeometry::new(positions)
        };
        let layout = Self::from_parts(side("tx", &file.tx)?, side("rx", &file.rx)?, file.label);
        validate(&layout).into_result()?;
        Ok(layout)
    }

    /// Pretty-printed geometry JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let file = GeometryFile {
            label: self.label.clone(),
            tx: self.tx.positions().iter().map(position_to_number).collect(),
            rx: self.rx.positions().iter().map(position_to_number).collect(),
            units: Some(UNITS_HALF_WAVELENGTH.to_string()),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("geometry serializes");
        out.push('\n');
        out
    }

    /// One-line picture of an integer-grid layout: `R` Rx, `T` Tx, `.` empty.
    pub fn sketch(&self, max_width: usize) -> Option<String> {
        if !self.is_integer_grid() {
            return None;
        }
        let joint = self.joint();
        let lo = joint.min().to_integer();
        let width = (joint.max().to_integer() - lo) as usize + 1;
        if width > max_width {
            return None;
        }
        let mut cells = vec!['.'; width];
        for p in self.rx.positions() {
            cells[(p.to_integer() - lo) as usize] = 'R';
        }
        for p in self.tx.positions() {
            cells[(p.to_integer() - lo) as usize] = 'T';
        }
        Some(cells.into_iter().collect())
    }
}

#[derive(Serialize, Deserialize)]
struct GeometryFile {
    #[serde(default)]
    label: String,
    tx: Vec<serde_json::Number>,
    rx: Vec<serde_json::Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    units: Option<String>,
}

fn number_to_position(n: &serde_json::Number) -> Result<Position> {
    if let Some(i) = n.as_i64() {
        return Ok(Ratio::from_integer(i));
    }
    match n.as_f64() {
        Some(x) => position_from_f64(x),
        None => Err(Error::Parse(format!("unrepresentable position {n}"))),
    }
}

fn position_to_number(p: &Position) -> serde_json::Number {
    if p.is_integer() {
        serde_json::Number::from(p.to_integer())
    } else {
        serde_json::Number::from_f64(position_to_f64(p)).expect("finite position")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Info,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Issue {
    /// A Tx and an Rx antenna share a position; the SI model divides by zero there.
    Colocated(Position),
    /// Tx and Rx counts differ (allowed by the SI model, not by the generators).
    UnequalCounts { n_tx: usize, n_rx: usize },
    /// Some position is not on the integer λ/2 grid.
    OffGrid,
    /// Some position lies left of the origin.
    NegativePosition(Position),
}

impl Issue {
    pub fn severity(&self) -> Severity {
        match self {
            Issue::Colocated(_) => Severity::Error,
            _ => Severity::Info,
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::Colocated(p) => write!(f, "error: colocated Tx/Rx pair at {p}"),
            Issue::UnequalCounts { n_tx, n_rx } => {
                write!(f, "info: {n_tx} Tx vs {n_rx} Rx antennas")
            }
            Issue::OffGrid => write!(f, "info: positions off the integer grid"),
            Issue::NegativePosition(p) => write!(f, "info: negative position {p}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues
            .iter()
            .filter(|i| i.severity() == Severity::Error)
    }

    /// First error as an [`Error`], if any.
    pub fn into_result(self) -> Result<()> {
        match self
            .issues
            .into_iter()
            .find(|i| i.severity() == Severity::Error)
        {
            Some(Issue::Colocated(p)) => Err(Error::ColocatedPair(p)),
            Some(other) => Err(Error::InvalidGeometry(other.to_string())),
            None => Ok(()),
        }
    }
}

pub fn validate(layout: &FullDuplexLayout) -> ValidationReport {
    let mut issues: Vec<Issue> = layout
        .rx
        .positions()
        .iter()
        .filter(|p| layout.tx.contains(p))
        .map(|p| Issue::Colocated(*p))
        .collect();
    if layout.n_tx() != layout.n_rx() {
        issues.push(Issue::UnequalCounts {
            n_tx: layout.n_tx(),
            n_rx: layout.n_rx(),
        });
    }
    if !layout.is_integer_grid() {
        issues.push(Issue::OffGrid);
    }
    let lowest = layout.tx.min().min(layout.rx.min());
    if lowest.is_negative() {
        issues.push(Issue::NegativePosition(lowest));
    }
    ValidationReport { issues }
}

pub fn aperture(g: &ArrayGeometry) -> Position {
    g.aperture()
}

/// L = max(𝔻_tx ∪ 𝔻_rx) − min(𝔻_tx ∪ 𝔻_rx).
pub fn joint_aperture(layout: &FullDuplexLayout) -> Position {
    layout.tx.max().max(layout.rx.max()) - layout.tx.min().min(layout.rx.min())
}

/// Rx = {0, …, n−1}, Tx = Rx + n + δ₁.
pub fn generate_partitioned(n: usize, delta1: u64) -> Result<FullDuplexLayout> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let rx = ArrayGeometry::uniform(n)?;
    let tx = rx.translate(Ratio::from_integer(n as i64 + delta1 as i64));
    FullDuplexLayout::new(tx, rx, FamilyParams::Partitioned { n, delta1 }.to_string())
}

/// Rx = 2δ₂·{0, …, n−1}, Tx = Rx + δ₂.
pub fn generate_interleaved(n: usize, delta2: u64) -> Result<FullDuplexLayout> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if delta2 == 0 {
        return Err(Error::param(
            "delta2",
            "must be at least 1 (zero colocates Tx and Rx)",
        ));
    }
    let step = Ratio::from_integer(delta2 as i64);
    let rx = ArrayGeometry::uniform(n)?.scale(step * 2)?;
    let tx = rx.translate(step);
    FullDuplexLayout::new(tx, rx, FamilyParams::Interleaved { n, delta2 }.to_string())
}

/// Rx = {0, …, M₁−1} ∪ (2δ₃({0, …, M₂−1} + 1) + M₁ − 1),
/// Tx = max(Rx) − Rx + M₁ − 1 + δ₃.
pub fn generate_nested(m1: usize, m2: usize, delta3: u64) -> Result<FullDuplexLayout> {
    for (name, v) in [("m1", m1 as u64), ("m2", m2 as u64), ("delta3", delta3)] {
        if v == 0 {
            return Err(Error::param(name, "must be at least 1"));
        }
    }
    let dense = ArrayGeometry::uniform(m1)?;
    let one = Ratio::from_integer(1);
    let sparse = ArrayGeometry::uniform(m2)?
        .translate(one)
        .scale(Ratio::from_integer(2 * delta3 as i64))?
        .translate(Ratio::from_integer(m1 as i64 - 1));
    let rx = dense.union(&sparse);
    let shift = rx.max() + Ratio::from_integer(m1 as i64 - 1 + delta3 as i64);
    let tx = ArrayGeometry::new(rx.positions().iter().map(|p| shift - p).collect())?;
    FullDuplexLayout::new(tx, rx, FamilyParams::Nested { m1, m2, delta3 }.to_string())
}
