use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdarray::beampattern::{beampattern, DEFAULT_GRID_SIZE};
use fdarray::coarray::sum_coarray;
use fdarray::experiments::{
    fig2_study, scaling_sweep_with, ApertureRule, DEFAULT_LINEAR_SCALE, DEFAULT_QUADRATIC_SCALE,
    FIG2_RHO,
};
use fdarray::io::{fmt_f64, matrix_from_csv, matrix_from_json, matrix_to_csv, matrix_to_json};
use fdarray::si::si_matrix;
use fdarray::spectral::svd_spectrum;
use fdarray::{Complex64, Error, Execution, Family, FamilyParams, FullDuplexLayout};
use ndarray::Array2;

const EXIT_CODES: &str = "\
Exit status:
  0  success
  1  I/O failure (unreadable input, unwritable output)
  2  invalid flags, unparsable input or invalid layout
  3  layout has a colocated Tx/Rx pair
  4  numerical failure (non-finite data, degenerate curve)";

/// Full-duplex Tx/Rx array geometries, SI channel spectra, beampatterns and
/// sum co-arrays. Positions are in half-wavelength units.
///
/// Every command reads a file path or `-` (stdin) and writes to `-o` or stdout,
/// so `geometry` output can be piped straight into the other commands.
#[derive(Parser, Debug)]
#[command(name = "fdarray", version, after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a Tx/Rx layout as JSON; a sketch goes to stderr.
    Geometry(GeometryArgs),
    /// SI channel matrix (rows Rx, columns Tx) of a layout.
    Si(SiArgs),
    /// Singular spectrum of a matrix file, or of a layout's SI matrix.
    Svd(SvdArgs),
    /// Array-factor beampattern of one side of a layout.
    Beampattern(BeampatternArgs),
    /// Sum co-array positions and multiplicities.
    Coarray(CoarrayArgs),
    /// Spectral norm against N under an aperture scaling rule.
    Sweep(SweepArgs),
    /// Layout, beampattern and spectrum bundle for the three reference layouts.
    Fig2(Fig2Args),
}

#[derive(Args, Debug)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Input {
    /// Input file, or `-` for stdin.
    #[arg(short, long, default_value = "-")]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct GeometryArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Antennas per side (partitioned, interleaved).
    #[arg(long)]
    n: Option<usize>,
    /// Extra gap between the Rx and Tx blocks (partitioned).
    #[arg(long)]
    delta1: Option<u64>,
    /// Tx/Rx offset; same-side spacing is twice this (interleaved).
    #[arg(long)]
    delta2: Option<u64>,
    /// Dense segment length (nested).
    #[arg(long)]
    m1: Option<usize>,
    /// Sparse segment length (nested).
    #[arg(long)]
    m2: Option<usize>,
    /// Sparse segment spacing factor (nested).
    #[arg(long)]
    delta3: Option<u64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct SiArgs {
    #[command(flatten)]
    input: Input,
    /// Coupling constant ρ.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct SvdArgs {
    /// Matrix (CSV or JSON) or layout JSON; `-` for stdin.
    #[command(flatten)]
    input: Input,
    /// Coupling constant ρ, used when the input is a layout.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct BeampatternArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = Side::Rx)]
    side: Side,
    /// Steering angle in radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta_s: f64,
    /// Number of angles on [-pi/2, pi/2].
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    grid: usize,
    /// Report gains relative to the peak.
    #[arg(long)]
    normalize: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct CoarrayArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Families to include; all three when omitted.
    #[arg(long, value_enum, value_delimiter = ',')]
    family: Vec<FamilyArg>,
    #[arg(long, value_enum, default_value_t = RuleArg::Quadratic)]
    rule: RuleArg,
    /// Rule constant c (L = cN, cN² or c); the rule's default when omitted.
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long, default_value_t = 10)]
    n_start: usize,
    #[arg(long, default_value_t = 100)]
    n_end: usize,
    #[arg(long, default_value_t = 10)]
    n_step: usize,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Compute rows on the calling thread only.
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct Fig2Args {
    #[arg(long, default_value_t = FIG2_RHO)]
    rho: f64,
    /// Directory receiving the per-family files.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Partitioned,
    Interleaved,
    Nested,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Partitioned => Family::Partitioned,
            FamilyArg::Interleaved => Family::Interleaved,
            FamilyArg::Nested => Family::Nested,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Side {
    Rx,
    Tx,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    Linear,
    Quadratic,
    Constant,
}

/// Failure with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => 1,
            Error::ColocatedPair(_) => 3,
            Error::NonFinite { .. } | Error::Numerical(_) | Error::DegenerateCurve(_) => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(flag: &str, reason: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: format!("--{flag}: {reason}"),
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| io_failure(path, e))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| io_failure(path, e))
    }
}

fn write_output(out: &Output, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| io_failure(Path::new("<stdout>"), e)),
    }
}

fn check_rho(rho: f64) -> Result<(), Failure> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(usage(
            "rho",
            format!("must be positive and finite, got {rho}"),
        ))
    }
}

fn load_layout(input: &Input) -> Result<FullDuplexLayout, Failure> {
    Ok(FullDuplexLayout::from_json(&read_input(&input.input)?)?)
}

fn require<T>(value: Option<T>, flag: &str, family: &str) -> Result<T, Failure> {
    value.ok_or_else(|| usage(flag, format!("required for the {family} family")))
}

fn family_params(a: &GeometryArgs) -> Result<FamilyParams, Failure> {
    let stray = |flags: &[(&str, bool)], family: &str| -> Result<(), Failure> {
        match flags.iter().find(|(_, set)| *set) {
            Some((flag, _)) => Err(usage(
                flag,
                format!("does not apply to the {family} family"),
            )),
            None => Ok(()),
        }
    };
    Ok(match a.family {
        FamilyArg::Partitioned => {
            stray(
                &[
                    ("delta2", a.delta2.is_some()),
                    ("m1", a.m1.is_some()),
                    ("m2", a.m2.is_some()),
                    ("delta3", a.delta3.is_some()),
                ],
                "partitioned",
            )?;
            FamilyParams::Partitioned {
                n: require(a.n, "n", "partitioned")?,
                delta1: require(a.delta1, "delta1", "partitioned")?,
            }
        }
        FamilyArg::Interleaved => {
            stray(
                &[
                    ("delta1", a.delta1.is_some()),
                    ("m1", a.m1.is_some()),
                    ("m2", a.m2.is_some()),
                    ("delta3", a.delta3.is_some()),
                ],
                "interleaved",
            )?;
            FamilyParams::Interleaved {
                n: require(a.n, "n", "interleaved")?,
                delta2: require(a.delta2, "delta2", "interleaved")?,
            }
        }
        FamilyArg::Nested => {
            stray(
                &[
                    ("n", a.n.is_some()),
                    ("delta1", a.delta1.is_some()),
                    ("delta2", a.delta2.is_some()),
                ],
                "nested",
            )?;
            FamilyParams::Nested {
                m1: require(a.m1, "m1", "nested")?,
                m2: require(a.m2, "m2", "nested")?,
                delta3: require(a.delta3, "delta3", "nested")?,
            }
        }
    })
}

fn cmd_geometry(a: GeometryArgs) -> Result<(), Failure> {
    let params = family_params(&a)?;
    let layout = params.build()?;
    match layout.sketch(120) {
        Some(line) => eprintln!("{line}"),
        None => eprintln!("{params}: too wide to sketch"),
    }
    write_output(&a.out, &layout.to_json())
}

fn cmd_si(a: SiArgs) -> Result<(), Failure> {
    check_rho(a.rho)?;
    let h = si_matrix(&load_layout(&a.input)?, a.rho)?;
    let text = match a.format {
        Format::Csv => matrix_to_csv(&h.h)?,
        Format::Json => matrix_to_json(&h.h),
    };
    write_output(&a.out, &text)
}

/// A JSON object is a layout, a JSON array a matrix, anything else CSV.
fn load_svd_input(a: &SvdArgs) -> Result<Array2<Complex64>, Failure> {
    let text = read_input(&a.input.input)?;
    match text.trim_start().chars().next() {
        Some('{') => {
            check_rho(a.rho)?;
            Ok(si_matrix(&FullDuplexLayout::from_json(&text)?, a.rho)?.h)
        }
        Some('[') => Ok(matrix_from_json(&text)?),
        _ => Ok(matrix_from_csv(&text)?),
    }
}

fn cmd_svd(a: SvdArgs) -> Result<(), Failure> {
    let h = load_svd_input(&a)?;
    let spectrum = svd_spectrum(&h)?;
    let text = match a.format {
        Format::Csv => spectrum.to_csv()?,
        Format::Json => {
            let sigmas: Vec<String> = spectrum.sigmas.iter().map(|s| fmt_f64(*s)).collect();
            format!("{{\"sigmas\": [{}]}}\n", sigmas.join(", "))
        }
    };
    write_output(&a.out, &text)
}

fn cmd_beampattern(a: BeampatternArgs) -> Result<(), Failure> {
    let layout = load_layout(&a.input)?;
    let side = match a.side {
        Side::Rx => &layout.rx,
        Side::Tx => &layout.tx,
    };
    let curve = beampattern(side, a.theta_s, a.grid, a.normalize)?;
    write_output(&a.out, &curve.to_csv()?)
}

fn cmd_coarray(a: CoarrayArgs) -> Result<(), Failure> {
    let layout = load_layout(&a.input)?;
    write_output(&a.out, &sum_coarray(&layout).to_csv()?)
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Failure> {
    check_rho(a.rho)?;
    if a.n_step == 0 {
        return Err(usage("n-step", "must be positive"));
    }
    if a.n_start == 0 || a.n_start > a.n_end {
        return Err(usage(
            "n-start",
            format!("need 1 <= n-start <= n-end, got {}..{}", a.n_start, a.n_end),
        ));
    }
    let scale = match (a.scale, a.rule) {
        (Some(c), _) => c,
        (None, RuleArg::Linear) => DEFAULT_LINEAR_SCALE,
        (None, RuleArg::Quadratic) => DEFAULT_QUADRATIC_SCALE,
        (None, RuleArg::Constant) => return Err(usage("scale", "required for the constant rule")),
    };
    if !(scale.is_finite() && scale > 0.0) {
        return Err(usage(
            "scale",
            format!("must be positive and finite, got {scale}"),
        ));
    }
    let rule = match a.rule {
        RuleArg::Linear => ApertureRule::linear(scale),
        RuleArg::Quadratic => ApertureRule::quadratic(scale),
        RuleArg::Constant => ApertureRule::constant(scale),
    };
    let families: Vec<Family> = if a.family.is_empty() {
        Family::ALL.to_vec()
    } else {
        a.family.iter().map(|&f| f.into()).collect()
    };
    let ns: Vec<usize> = (a.n_start..=a.n_end).step_by(a.n_step).collect();
    let exec = if a.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let result = scaling_sweep_with(exec, &families, &ns, &rule, a.rho)?;
    let infeasible = result.rows.iter().filter(|r| !r.feasible).count();
    if infeasible > 0 {
        eprintln!("{infeasible} row(s) cannot meet {rule}; flagged feasible=false");
    }
    write_output(&a.out, &result.to_csv()?)
}

fn cmd_fig2(a: Fig2Args) -> Result<(), Failure> {
    check_rho(a.rho)?;
    fig2_study(a.rho)?.write_bundle(&a.out_dir)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Geometry(a) => cmd_geometry(a),
        Command::Si(a) => cmd_si(a),
        Command::Svd(a) => cmd_svd(a),
        Command::Beampattern(a) => cmd_beampattern(a),
        Command::Coarray(a) => cmd_coarray(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Fig2(a) => cmd_fig2(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("fdarray: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
