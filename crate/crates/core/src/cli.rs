//! Command-line surface.
//!
//! Exit codes: 0 for PASS or membership, 1 for FAIL, NOT_MEMBER or
//! INCONCLUSIVE, 2 for usage and parse errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::criteria::{
    coefficient_audit, derivative_band, epsilon_family_check, growth_check, noshiro_warschawski,
    sufficient_condition, CriterionReport, Holds,
};
use crate::error::{Error, Result};
use crate::extraction::{
    default_samples, default_schwarz_angles, dft_coefficients, orthogonality_selftest, schwarz_check,
    CoefficientTable, DEFAULT_SCHWARZ_RADII,
};
use crate::functionals::{membership, MembershipReport, TorusGrid, Verdict};
use crate::sampling::{default_injectivity_points, default_polydisk_sample, growth_sample};
use crate::series::{
    extremal_growth_map, extremal_sharpness_map, read_map_file, render_map, Part, PluriharmonicMap,
};
use crate::univalence::{default_lambdas, local_nonvanishing, stable_scan, DEFAULT_DELTA, DEFAULT_ETA};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "pluriharmonic", version, about = "Numerical checks for pluriharmonic maps on the unit polydisk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Membership verdict from the sampled supremum and the coefficient majorant.
    Check(CheckArgs),
    /// Per-degree coefficient sums against their bounds.
    Audit(AuditArgs),
    /// Two-sided growth envelope on an interior sample.
    Growth(LevelArgs),
    /// Injectivity scans of the rotated and holomorphic families.
    Univalence(UnivalenceArgs),
    /// Coefficient recovery from torus samples.
    Extract(ExtractArgs),
    /// Every criterion on one map, as a name-to-verdict matrix.
    Report(ReportArgs),
    /// Discrete orthogonality of the torus characters.
    Selftest(SelftestArgs),
    /// Write one of the extremal maps as a map file.
    Extremal(ExtremalArgs),
}

#[derive(Debug, Args)]
struct MapArg {
    /// Map-spec JSON file.
    #[arg(long)]
    map: PathBuf,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct LevelArgs {
    #[command(flatten)]
    input: MapArg,
    #[arg(long = "M")]
    level: f64,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    base: LevelArgs,
    /// Torus radius for the sampled supremum.
    #[arg(long, default_value_t = 0.999)]
    radius: f64,
    /// Angles per axis (defaults depend on n).
    #[arg(long)]
    angles: Option<usize>,
}

#[derive(Debug, Args)]
struct AuditArgs {
    #[command(flatten)]
    base: LevelArgs,
    /// Highest audited degree (defaults to the map's D).
    #[arg(long)]
    mmax: Option<u32>,
}

#[derive(Debug, Args)]
struct UnivalenceArgs {
    #[command(flatten)]
    input: MapArg,
    /// Equally spaced unimodular values (±1 and ±i are always added).
    #[arg(long, default_value_t = 16)]
    lambdas: usize,
    /// Seed for the quasi-random point set (n ≥ 2).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[command(flatten)]
    input: MapArg,
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    /// Samples per axis (defaults to 2·(mmax+1)).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    mmax: Option<u32>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    base: LevelArgs,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value_t = 16)]
    lambdas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long = "nu-max", default_value_t = 6)]
    nu_max: u32,
    #[arg(long, default_value_t = 16)]
    samples: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExtremalKind {
    Sharpness,
    SharpnessConjugate,
    GrowthPlus,
    GrowthMinus,
}

#[derive(Debug, Args)]
struct ExtremalArgs {
    #[arg(value_enum)]
    kind: ExtremalKind,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Degree of the sharpness tail.
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long = "M", default_value_t = 1.0)]
    level: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<String> {
    if json {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::usage(e.to_string()))?;
        s.push('\n');
        Ok(s)
    } else {
        Ok(text())
    }
}

fn holds_code(h: Holds) -> u8 {
    match h {
        Holds::Pass => EXIT_OK,
        Holds::Fail | Holds::Inconclusive => EXIT_FAIL,
    }
}

fn load(input: &MapArg) -> Result<PluriharmonicMap> {
    read_map_file(&input.map)
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level.is_finite() {
        Ok(())
    } else {
        Err(Error::usage(format!("--M {level} must be a positive finite number")))
    }
}

fn dispatch(command: Command) -> Result<(String, u8)> {
    match command {
        Command::Check(a) => {
            let f = load(&a.base.input)?;
            check_level(a.base.level)?;
            let mut grid = TorusGrid::default_for(f.dim()).with_radius(a.radius)?;
            if let Some(k) = a.angles {
                grid = TorusGrid::new(f.dim(), a.radius, k)?;
            }
            let report = membership(&f, a.base.level, &grid)?;
            let code = if report.verdict == Verdict::NotMember {
                EXIT_FAIL
            } else {
                EXIT_OK
            };
            Ok((emit(a.base.input.json, &report, || report.render_text())?, code))
        }
        Command::Audit(a) => {
            let f = load(&a.base.input)?;
            check_level(a.base.level)?;
            let m_max = a.mmax.unwrap_or(f.cap());
            if m_max > f.cap() {
                return Err(Error::usage(format!("--mmax {m_max} exceeds D = {}", f.cap())));
            }
            let report = coefficient_audit(&f, a.base.level, m_max)?;
            criterion_output(a.base.input.json, &report)
        }
        Command::Growth(a) => {
            let f = load(&a.input)?;
            check_level(a.level)?;
            let report = growth_check(&f, a.level, &growth_sample(f.dim()))?;
            criterion_output(a.input.json, &report)
        }
        Command::Univalence(a) => {
            let f = load(&a.input)?;
            if a.lambdas == 0 {
                return Err(Error::usage("--lambdas must be at least 1"));
            }
            let points = default_injectivity_points(f.dim(), a.seed);
            let report = stable_scan(&f, &default_lambdas(a.lambdas), &points, a.delta, a.eta)?;
            let code = if report.stable_pluriharmonic {
                EXIT_OK
            } else {
                EXIT_FAIL
            };
            Ok((emit(a.input.json, &report, || report.render_text())?, code))
        }
        Command::Extract(a) => {
            let f = load(&a.input)?;
            let m_max = a.mmax.unwrap_or(f.cap());
            let samples = a.samples.unwrap_or_else(|| default_samples(m_max));
            let h = dft_coefficients(f.h(), a.radius, samples, m_max)?;
            let g = dft_coefficients(f.g(), a.radius, samples, m_max)?;
            let dev = h.max_deviation(f.h()).max(g.max_deviation(f.g()));
            let result = ExtractOutput {
                h,
                g,
                max_deviation: dev,
            };
            let code = if dev <= 1e-9 { EXIT_OK } else { EXIT_FAIL };
            let text = || {
                format!(
                    "h coefficients\n{}\ng coefficients\n{}\nmax deviation from stored coefficients {:.3e}\n",
                    result.h.render_text(),
                    result.g.render_text(),
                    dev
                )
            };
            Ok((emit(a.input.json, &result, text)?, code))
        }
        Command::Report(a) => {
            let f = load(&a.base.input)?;
            check_level(a.base.level)?;
            let matrix = criteria_matrix(&f, a.base.level, a.gamma, a.lambdas, a.seed)?;
            let code = if matrix.rows.iter().any(|r| r.holds == Holds::Fail) {
                EXIT_FAIL
            } else {
                EXIT_OK
            };
            Ok((emit(a.base.input.json, &matrix, || matrix.render_text())?, code))
        }
        Command::Selftest(a) => {
            let report = orthogonality_selftest(a.n, a.nu_max, a.samples)?;
            let code = if report.passed { EXIT_OK } else { EXIT_FAIL };
            let text = || {
                format!(
                    "orthogonality n = {}, |nu_j| <= {}, N = {}\n  zero mode average   {}\n  max nonzero modulus {:.3e} at {:?}\n  modes checked       {}\n  passed              {}\n",
                    report.n,
                    report.nu_max,
                    report.samples_per_dim,
                    report.zero_mode_average,
                    report.max_nonzero_modulus,
                    report.worst_nu,
                    report.modes_checked,
                    report.passed
                )
            };
            Ok((emit(a.json, &report, text)?, code))
        }
        Command::Extremal(a) => {
            let f = match a.kind {
                ExtremalKind::Sharpness => extremal_sharpness_map(a.n, a.m, a.level, Part::Holomorphic)?,
                ExtremalKind::SharpnessConjugate => {
                    extremal_sharpness_map(a.n, a.m, a.level, Part::Antiholomorphic)?
                }
                ExtremalKind::GrowthPlus => extremal_growth_map(a.n, a.level, 1)?,
                ExtremalKind::GrowthMinus => extremal_growth_map(a.n, a.level, -1)?,
            };
            let text = render_map(&f);
            match a.out {
                Some(path) => {
                    std::fs::write(&path, &text)
                        .map_err(|e| Error::MapFile(format!("{}: {e}", path.display())))?;
                    Ok((String::new(), EXIT_OK))
                }
                None => Ok((text, EXIT_OK)),
            }
        }
    }
}

fn criterion_output(json: bool, report: &CriterionReport) -> Result<(String, u8)> {
    Ok((emit(json, report, || report.render_text())?, holds_code(report.holds)))
}

#[derive(Debug, Serialize)]
struct ExtractOutput {
    h: CoefficientTable,
    g: CoefficientTable,
    max_deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct MatrixRow {
    pub criterion: String,
    pub holds: Holds,
    pub summary: String,
}

#[derive(Debug, Serialize)]
pub struct CriteriaMatrix {
    pub level: f64,
    pub membership: MembershipReport,
    pub rows: Vec<MatrixRow>,
    pub reports: Vec<CriterionReport>,
}

impl CriteriaMatrix {
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "criteria at M = {}\n  {:<24} {:<16} {}\n",
            self.level, "criterion", "verdict", "summary"
        );
        out.push_str(&format!(
            "  {:<24} {:<16} sampled sup {:.9}\n",
            "membership",
            format!("{:?}", self.membership.verdict),
            self.membership.sampled_sup
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "  {:<24} {:<16} {}\n",
                r.criterion,
                format!("{:?}", r.holds),
                r.summary
            ));
        }
        out
    }
}

fn summarize(r: &CriterionReport) -> String {
    match &r.witness {
        Some(w) if r.holds == Holds::Fail => match &w.point {
            Some(p) => format!("witness {p}"),
            None => w
                .values
                .iter()
                .map(|v| format!("{} = {:.6}", v.name, v.value))
                .collect::<Vec<_>>()
                .join(", "),
        },
        _ => r.notes.first().cloned().unwrap_or_default(),
    }
}

fn not_applicable(name: &str, why: &str) -> CriterionReport {
    CriterionReport {
        name: name.to_string(),
        holds: Holds::Inconclusive,
        witness: None,
        details: Vec::new(),
        notes: vec![why.to_string()],
    }
}

/// Runs every criterion on `f` at level `M`.
pub fn criteria_matrix(
    f: &PluriharmonicMap,
    level: f64,
    gamma: f64,
    lambda_count: usize,
    seed: u64,
) -> Result<CriteriaMatrix> {
    let n = f.dim();
    let grid = TorusGrid::default_for(n);
    let sample = default_polydisk_sample(n);
    let member = membership(f, level, &grid)?;
    let mut reports = vec![
        noshiro_warschawski(f, gamma, &sample),
        epsilon_family_check(f, level, &default_lambdas(lambda_count.max(1)), &grid)?,
        coefficient_audit(f, level, f.cap())?,
        sufficient_condition(f, level),
        growth_check(f, level, &growth_sample(n))?,
        local_nonvanishing(f, &sample),
    ];
    if f.is_holomorphic() {
        reports.push(derivative_band(f.h(), level, &sample));
        reports.push(schwarz_check(f.h(), level, &DEFAULT_SCHWARZ_RADII, default_schwarz_angles(n))?);
    } else {
        reports.push(not_applicable("derivative_band", "defined for holomorphic maps (g = 0)"));
        reports.push(not_applicable("schwarz_check", "defined for holomorphic maps (g = 0)"));
    }
    let scan = stable_scan(
        f,
        &default_lambdas(lambda_count.max(1)),
        &default_injectivity_points(n, seed),
        DEFAULT_DELTA,
        DEFAULT_ETA,
    )?;
    let mut rows: Vec<MatrixRow> = reports
        .iter()
        .map(|r| MatrixRow {
            criterion: r.name.clone(),
            holds: r.holds,
            summary: summarize(r),
        })
        .collect();
    rows.push(MatrixRow {
        criterion: "stable_scan".into(),
        holds: if scan.biconditional_holds {
            Holds::Pass
        } else {
            Holds::Fail
        },
        summary: format!(
            "pluriharmonic stable {}, holomorphic stable {}",
            scan.stable_pluriharmonic, scan.stable_holomorphic
        ),
    });
    Ok(CriteriaMatrix {
        level,
        membership: member,
        rows,
        reports,
    })
}
