//! Command-line front end.

use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::area::{convergence_study, rows_to_csv};
use crate::error::{KakeyaError, Result};
use crate::geometry::{Circle, Point};
use crate::lemmas::{alpha_sandwich, beta_sum, consecutive_junction_bounds, polynomial_certificate, LemmaReport};
use crate::motion::{build_motion_plan, compose_theorem1, refine_plan, validate_plan, ArcPose, DEFAULT_ARC_LEN};
use crate::render::render_frames;
use crate::scalar::{Precision, Scalar};
use crate::sprouting::{build_scene, check_invariants, CircleFamily, SproutConfig, SproutScene, DEFAULT_R};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_INVALID_SPEC: i32 = 2;
pub const EXIT_CONSTRUCTION_FAILED: i32 = 3;

/// Upper end of the grid for the quartic certificate.
pub const CERTIFICATE_T_MAX: &str = "1.228";
pub const CERTIFICATE_GRID: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Sprout,
    Verify,
    Plan,
    Area,
    Render,
    Theorem1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("named").get_name())
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("named").get_name())
    }
}

#[derive(Parser, Debug)]
#[command(name = "kakeya-arcs", version, about = "Move a unit circular arc through small area", arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Build a scene and write it as JSON.
    Sprout(Flags),
    /// Run every invariant and lemma check on a scene.
    Verify(Flags),
    /// Build the motion plan through a scene.
    Plan(Flags),
    /// Convergence table for the area of T_n minus the seed horn.
    Area(Flags),
    /// SVG frames of the moving arc.
    Render(Flags),
    /// Chain of plans between two far-apart arcs.
    Theorem1(Flags),
}

#[derive(Args, Debug)]
struct Flags {
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// Level, or a comma-separated list for `area`.
    #[arg(long)]
    n: Option<String>,
    #[arg(long = "R", allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    arc_len: Option<String>,
    /// `hw` or a bit count.
    #[arg(long)]
    precision: Option<String>,
    #[arg(long, conflicts_with = "relaxed")]
    strict: bool,
    #[arg(long)]
    relaxed: bool,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Frame count for `render`.
    #[arg(long)]
    frames: Option<usize>,
    /// Centre distance for `theorem1`.
    #[arg(long, allow_hyphen_values = true)]
    distance: Option<String>,
    /// Per-piece pivot budget for `theorem1`.
    #[arg(long, allow_hyphen_values = true)]
    budget: Option<String>,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

/// A fully resolved invocation. Numbers stay as the decimal text given so
/// that rendering back to flags is exact at any precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub strict: bool,
    pub h: String,
    pub eps: String,
    pub r: String,
    pub n_list: Vec<u32>,
    pub precision: Precision,
    pub arc_len: String,
    pub samples: u64,
    pub seed: u64,
    pub depth: u32,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub frames: usize,
    pub distance: String,
    pub budget: String,
    pub inject_fault: bool,
}

/// Rejected command line; `code` is 0 for help and version output.
#[derive(Debug)]
pub struct UsageError {
    pub message: String,
    pub code: i32,
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<KakeyaError> for UsageError {
    fn from(e: KakeyaError) -> UsageError {
        UsageError { message: format!("error: {e}"), code: EXIT_INVALID_SPEC }
    }
}

fn invalid(msg: impl Into<String>) -> KakeyaError {
    KakeyaError::InvalidSpec(msg.into())
}

fn parse_precision(s: &str) -> Result<Precision> {
    let p = match s {
        "hw" => Precision::Hardware,
        bits => Precision::Big(bits.parse().map_err(|_| invalid(format!("precision must be hw or a bit count, got {bits:?}")))?),
    };
    if !p.is_valid() {
        return Err(invalid(format!("precision must be hw or at least {} bits", Precision::MIN_BIG_BITS)));
    }
    Ok(p)
}

fn parse_n_list(s: &str) -> Result<Vec<u32>> {
    s.split(',').map(|t| t.trim().parse::<u32>().map_err(|_| invalid(format!("bad level {t:?} in --n")))).collect()
}

pub fn parse_args<I, T>(argv: I) -> std::result::Result<ExperimentSpec, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| UsageError { message: e.render().to_string(), code: e.exit_code() })?;
    let (command, f) = match cli.command {
        Sub::Sprout(f) => (Command::Sprout, f),
        Sub::Verify(f) => (Command::Verify, f),
        Sub::Plan(f) => (Command::Plan, f),
        Sub::Area(f) => (Command::Area, f),
        Sub::Render(f) => (Command::Render, f),
        Sub::Theorem1(f) => (Command::Theorem1, f),
    };
    Ok(resolve(command, f)?)
}

fn resolve(command: Command, f: Flags) -> Result<ExperimentSpec> {
    let strict = !f.relaxed && (f.strict || !matches!(command, Command::Area | Command::Render | Command::Theorem1));
    let (h, eps, n, prec) = if strict { ("9e-10", "9e-7", "10", "256") } else { ("1e-3", "0.05", "6", "hw") };
    let n_default = if command == Command::Area && !strict { "6,8,10,12" } else { n };
    let format = f.format.unwrap_or(match command {
        Command::Area => Format::Csv,
        Command::Render => Format::Svg,
        _ => Format::Json,
    });
    let spec = ExperimentSpec {
        command,
        strict,
        h: f.h.unwrap_or_else(|| h.into()),
        eps: f.eps.unwrap_or_else(|| eps.into()),
        r: f.r.unwrap_or_else(|| DEFAULT_R.into()),
        n_list: parse_n_list(f.n.as_deref().unwrap_or(n_default))?,
        precision: parse_precision(f.precision.as_deref().unwrap_or(prec))?,
        arc_len: f.arc_len.unwrap_or_else(|| DEFAULT_ARC_LEN.into()),
        samples: f.samples.unwrap_or(1_000_000),
        seed: f.seed.unwrap_or(42),
        depth: f.depth.unwrap_or(0),
        output_path: f.out,
        format,
        frames: f.frames.unwrap_or(24),
        distance: f.distance.unwrap_or_else(|| "5".into()),
        budget: f.budget.unwrap_or_else(|| "0.05".into()),
        inject_fault: f.inject_fault,
    };
    spec.validate()?;
    Ok(spec)
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(invalid("--n needs at least one level"));
        }
        if self.command != Command::Area && self.n_list.len() != 1 {
            return Err(invalid(format!("{} takes a single --n", self.command)));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("--n list must be strictly ascending"));
        }
        let ok = match self.command {
            Command::Area => matches!(self.format, Format::Csv | Format::Json),
            Command::Render => self.format == Format::Svg,
            _ => self.format == Format::Json,
        };
        if !ok {
            return Err(invalid(format!("{} cannot write {}", self.command, self.format)));
        }
        if self.samples < crate::area::MIN_SAMPLES {
            return Err(invalid(format!("--samples must be at least {}", crate::area::MIN_SAMPLES)));
        }
        if self.command == Command::Render && self.frames == 0 {
            return Err(invalid("--frames must be positive"));
        }
        for &n in &self.n_list {
            self.config(n)?.validate()?;
        }
        let arc = self.scalar(&self.arc_len, "arc-len")?;
        let max = Scalar::parse(crate::motion::MAX_ARC_LEN, self.precision).expect("literal");
        if !arc.is_positive() || arc >= max {
            return Err(invalid(format!("--arc-len must lie in (0, {})", crate::motion::MAX_ARC_LEN)));
        }
        if !self.scalar(&self.distance, "distance")?.is_finite() || self.scalar(&self.distance, "distance")?.is_negative() {
            return Err(invalid("--distance must be a non-negative number"));
        }
        if !self.scalar(&self.budget, "budget")?.is_positive() {
            return Err(invalid("--budget must be positive"));
        }
        Ok(())
    }

    fn scalar(&self, s: &str, what: &str) -> Result<Scalar> {
        Scalar::parse(s, self.precision).ok_or_else(|| invalid(format!("cannot parse --{what} {s:?}")))
    }

    pub fn config(&self, n: u32) -> Result<SproutConfig> {
        let cfg = SproutConfig::from_decimal(&self.h, &self.eps, n, self.precision, self.strict)?;
        Ok(cfg.with_r(self.scalar(&self.r, "R")?))
    }

    /// Flags that parse back to this spec.
    pub fn to_args(&self) -> Vec<String> {
        let n_list = self.n_list.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",");
        let mut a = vec![
            self.command.to_string(),
            if self.strict { "--strict" } else { "--relaxed" }.into(),
            format!("--h={}", self.h),
            format!("--eps={}", self.eps),
            format!("--R={}", self.r),
            format!("--n={n_list}"),
            format!("--precision={}", self.precision),
            format!("--arc-len={}", self.arc_len),
            format!("--samples={}", self.samples),
            format!("--seed={}", self.seed),
            format!("--depth={}", self.depth),
            format!("--format={}", self.format),
            format!("--frames={}", self.frames),
            format!("--distance={}", self.distance),
            format!("--budget={}", self.budget),
        ];
        if let Some(p) = &self.output_path {
            a.push(format!("--out={}", p.display()));
        }
        if self.inject_fault {
            a.push("--inject-fault".into());
        }
        a
    }
}

/// Exit status for an error raised while running a valid spec.
pub fn exit_code_for(e: &KakeyaError) -> i32 {
    match e {
        KakeyaError::InvalidSpec(_) | KakeyaError::HypothesesViolated(_) | KakeyaError::ArcTooLong(_) | KakeyaError::OutOfRange(_) => {
            EXIT_INVALID_SPEC
        }
        _ => EXIT_CONSTRUCTION_FAILED,
    }
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| invalid(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(spec: &ExperimentSpec, body: &str) -> Result<()> {
    match &spec.output_path {
        Some(p) => write_atomic(p, body.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn json_text(v: &serde_json::Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn scene_for(spec: &ExperimentSpec) -> Result<SproutScene> {
    let mut scene = build_scene(&spec.config(spec.n_list[0])?)?;
    if spec.inject_fault {
        let top = 1u64 << scene.n();
        let off = &scene.frame().eps * 1e-3;
        let prec = scene.precision();
        scene.displace_center(CircleFamily::K0, top.div_ceil(2), &Point::new(off, Scalar::zero(prec)))?;
    }
    Ok(scene)
}

/// Every report the verifier produces for a scene.
pub fn verify_reports(scene: &SproutScene, arc_len: &Scalar) -> Result<Vec<LemmaReport>> {
    let mut reports = check_invariants(scene);
    for i in 1..=scene.n() {
        for k in 0..(1u64 << i) {
            reports.push(alpha_sandwich(scene, i, k)?);
        }
    }
    reports.push(beta_sum(scene)?);
    reports.push(consecutive_junction_bounds(scene)?);
    let t_max = Scalar::parse(CERTIFICATE_T_MAX, scene.precision()).expect("literal");
    reports.push(polynomial_certificate(&t_max, CERTIFICATE_GRID));
    reports.push(validate_plan(&build_motion_plan(scene, arc_len)?));
    Ok(reports)
}

pub fn summarize(reports: &[LemmaReport]) -> String {
    let pass = reports.iter().filter(|r| r.pass).count();
    let gated = reports.iter().filter(|r| !r.hypotheses_met).count();
    let bad: Vec<&str> = reports.iter().filter(|r| r.is_violation()).map(|r| r.lemma_id.as_str()).collect();
    let mut s = format!("{} reports: {pass} pass, {gated} outside hypotheses, {} violations", reports.len(), bad.len());
    if !bad.is_empty() {
        s.push_str(&format!(" ({})", bad.join(", ")));
    }
    s
}

/// Theorem-1 endpoints: arcs ending at the tops of unit circles `distance` apart.
pub fn theorem1_poses(distance: &Scalar, arc_len: &Scalar) -> (ArcPose, ArcPose) {
    let prec = distance.precision();
    let zero = Scalar::zero(prec);
    let one = Scalar::one(prec);
    let start = ArcPose::ending_at(&Circle::unit(Point::new(zero.clone(), zero.clone())), &Point::new(zero.clone(), one.clone()), arc_len);
    let end = ArcPose::ending_at(&Circle::unit(Point::new(distance.clone(), zero)), &Point::new(distance.clone(), one), arc_len);
    (start, end)
}

/// Runs a spec, writing artifacts; returns the process exit status.
pub fn run_command(spec: &ExperimentSpec) -> Result<i32> {
    let arc_len = spec.scalar(&spec.arc_len, "arc-len")?;
    match spec.command {
        Command::Sprout => {
            let scene = scene_for(spec)?;
            emit(spec, &json_text(&scene.to_json())?)?;
        }
        Command::Verify => {
            let scene = scene_for(spec)?;
            let reports = verify_reports(&scene, &arc_len)?;
            emit(spec, &json_text(&serde_json::to_value(&reports)?)?)?;
            eprintln!("{}", summarize(&reports));
            if reports.iter().any(|r| r.is_violation()) {
                return Ok(EXIT_VERIFICATION_FAILED);
            }
        }
        Command::Plan => {
            let scene = scene_for(spec)?;
            let mut plan = build_motion_plan(&scene, &arc_len)?;
            if spec.depth > 0 {
                plan = refine_plan(&plan, &scene, spec.depth)?;
            }
            emit(spec, &json_text(&plan.to_json())?)?;
        }
        Command::Area => {
            let rows = convergence_study(&spec.config(0)?, &spec.n_list, spec.samples, spec.seed)?;
            let body = match spec.format {
                Format::Csv => rows_to_csv(&rows),
                _ => json_text(&serde_json::to_value(&rows)?)?,
            };
            emit(spec, &body)?;
            if rows.iter().any(|r| r.failure.is_some()) {
                return Ok(EXIT_CONSTRUCTION_FAILED);
            }
        }
        Command::Render => {
            let scene = scene_for(spec)?;
            let plan = build_motion_plan(&scene, &arc_len)?;
            let frames = render_frames(&scene, &plan, spec.frames)?;
            let dir = spec.output_path.clone().unwrap_or_else(|| PathBuf::from("frames"));
            for (j, svg) in frames.iter().enumerate() {
                write_atomic(&dir.join(format!("frame_{j:04}.svg")), svg.as_bytes())?;
            }
            eprintln!("wrote {} frames to {}", frames.len(), dir.display());
        }
        Command::Theorem1 => {
            let (start, end) = theorem1_poses(&spec.scalar(&spec.distance, "distance")?, &arc_len);
            let chain = compose_theorem1(&start, &end, &spec.scalar(&spec.budget, "budget")?)?;
            emit(spec, &json_text(&chain.to_json())?)?;
        }
    }
    Ok(EXIT_OK)
}

/// Entry point shared by the binary and tests.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let spec = match parse_args(argv) {
        Ok(s) => s,
        Err(e) => {
            if e.code == 0 {
                print!("{}", e.message);
            } else {
                eprintln!("{}", e.message.trim_end());
            }
            return e.code;
        }
    };
    match run_command(&spec) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            exit_code_for(&e)
        }
    }
}
