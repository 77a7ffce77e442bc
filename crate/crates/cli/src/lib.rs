//! `discpower` command line: discord reports, discording-power curves,
//! angle sweeps, the discord-purity boundary, random-state clouds, gate
//! inspection and self-verification. Results are written as CSV with a JSON
//! run manifest next to every output file.

pub mod format;
pub mod manifest;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use discpower_core::discord::{concurrence, discord_with, DiscordSettings};
use discpower_core::gates::{canonical_coordinates, named_gate, CartanCoordinates};
use discpower_core::mdms::boundary_curve;
use discpower_core::power::{angle_sweep, power_curve, GateFamily, PowerSearchConfig};
use discpower_core::states::{read_density_matrix, read_matrix, sample_random_states, RandomStateConfig};
use discpower_core::verify::{identity_suite, property_suite};
use rayon::prelude::*;

use crate::format::{linspace, num, opt_num, parse_angle, parse_coords, parse_grid};
use crate::manifest::RunManifest;

/// Environment variable with the default worker-thread count.
pub const THREADS_ENV: &str = "DISCPOWER_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "discpower", version, about = "Two-qubit discord and discording power of gates")]
pub struct Cli {
    /// Worker threads; defaults to $DISCPOWER_THREADS, then to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discord report of a two-qubit state stored as JSON {dim, re, im}.
    Discord(DiscordArgs),
    /// Discording power of a gate over one or more purities.
    Power(PowerArgs),
    /// Discording power along (a,0,0) or (a,a,0) at fixed purity.
    Sweep(SweepArgs),
    /// Maximum symmetric discord as a function of purity.
    Boundary(BoundaryArgs),
    /// Purity and discord of random states of a given rank.
    Cloud(CloudArgs),
    /// Canonical Cartan coordinates of a gate.
    GateInfo(GateArgs),
    /// Analytic identities and a sample of library invariants.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct MeasurementArgs {
    /// Polar grid steps of the measurement minimizer.
    #[arg(long, default_value_t = DiscordSettings::default().theta_steps)]
    pub theta_steps: usize,
    /// Azimuthal grid points of the measurement minimizer.
    #[arg(long, default_value_t = DiscordSettings::default().phi_steps)]
    pub phi_steps: usize,
    /// Grid points refined by Nelder-Mead (0 disables refinement).
    #[arg(long, default_value_t = DiscordSettings::default().refine_starts)]
    pub refine_starts: usize,
    /// Use the cheap screening settings instead.
    #[arg(long)]
    pub screening: bool,
}

impl MeasurementArgs {
    fn settings(&self) -> DiscordSettings {
        if self.screening {
            return DiscordSettings::screening();
        }
        DiscordSettings {
            theta_steps: self.theta_steps,
            phi_steps: self.phi_steps,
            refine_starts: self.refine_starts,
            ..DiscordSettings::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct DiscordArgs {
    pub state: PathBuf,
    #[command(flatten)]
    pub measurement: MeasurementArgs,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct GateSource {
    /// Catalog gate: identity, cnot, cz, swap, sqrt_swap, iswap.
    #[arg(long)]
    pub named: Option<String>,
    /// Cartan coordinates `x,y,z`; angles take `0.25pi` or radians.
    #[arg(long, allow_hyphen_values = true)]
    pub coords: Option<String>,
    /// 4x4 unitary stored as JSON {dim, re, im}.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

impl GateSource {
    fn resolve(&self) -> Result<CartanCoordinates, CliError> {
        if let Some(name) = &self.named {
            return Ok(named_gate(name)?.cartan.coords);
        }
        if let Some(text) = &self.coords {
            let [x, y, z] = parse_coords(text).map_err(CliError::Usage)?;
            return Ok(CartanCoordinates::new(x, y, z));
        }
        let path = self.file.as_ref().expect("clap enforces one gate source");
        Ok(canonical_coordinates(&read_matrix(path)?)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// About 10^5 candidates per point.
    Desk,
    /// About 8·10^6 candidates per point.
    Full,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, value_enum, default_value_t = Preset::Desk)]
    pub preset: Preset,
    /// Basis-angle grid step; must divide pi.
    #[arg(long, default_value = "0.1pi", value_parser = parse_angle)]
    pub angle_step: f64,
    /// Probability spectra per search.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Logical-basis assignments carried into the basis scan.
    #[arg(long)]
    pub top_assignments: Option<usize>,
    /// Basis pairs carried into the assignment rescan.
    #[arg(long)]
    pub top_bases: Option<usize>,
    /// Candidates re-scored with the full measurement minimizer.
    #[arg(long)]
    pub finalists: Option<usize>,
    /// Skip the Nelder-Mead polish of the best candidates.
    #[arg(long)]
    pub no_refine: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SearchArgs {
    fn config(&self, purity: f64) -> PowerSearchConfig {
        let base = match self.preset {
            Preset::Desk => PowerSearchConfig::new(purity),
            Preset::Full => PowerSearchConfig::full(purity),
        };
        PowerSearchConfig {
            angle_step: self.angle_step,
            prob_samples: self.samples.unwrap_or(base.prob_samples),
            top_assignments: self.top_assignments.unwrap_or(base.top_assignments),
            top_bases: self.top_bases.unwrap_or(base.top_bases),
            finalists: self.finalists.unwrap_or(base.finalists),
            refine: !self.no_refine,
            seed: self.seed,
            ..base
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// CSV destination; standard output when absent (no manifest then).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long, requires = "out")]
    pub gnuplot: bool,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("purities").required(true).args(["purity", "purity_grid"])))]
pub struct PowerArgs {
    #[command(flatten)]
    pub gate: GateSource,
    /// Single purity in [1/4, 1].
    #[arg(long)]
    pub purity: Option<f64>,
    /// Purities as `start:stop:step`.
    #[arg(long)]
    pub purity_grid: Option<String>,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// (a, 0, 0)
    #[value(alias = "a00")]
    Single,
    /// (a, a, 0)
    #[value(alias = "aa0")]
    Double,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 0.7)]
    pub purity: f64,
    /// Number of evenly spaced angles on [0, pi/4].
    #[arg(long, default_value_t = 26)]
    pub points: usize,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    /// Number of evenly spaced purities on [1/4, 1].
    #[arg(long, default_value_t = 40, conflicts_with = "purity_grid")]
    pub points: usize,
    /// Purities as `start:stop:step`.
    #[arg(long)]
    pub purity_grid: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CloudArgs {
    /// Rank of the Ginibre factor, 1 to 4.
    #[arg(long)]
    pub rank: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub measurement: MeasurementArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GateArgs {
    #[command(flatten)]
    pub gate: GateSource,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Seed of the randomized property checks.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Verification(usize),
}

impl From<discpower_core::Error> for CliError {
    fn from(e: discpower_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Validation(m) => f.write_str(m),
            CliError::Verification(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    if let Err(e) = configure_threads(cli.threads) {
        let _ = writeln!(err, "error: {e}");
        return e.exit_code();
    }
    let recorded: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli.command, &recorded, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads(flag: Option<usize>) -> Result<(), CliError> {
    let threads = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| CliError::Usage(format!("{THREADS_ENV}='{v}' is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(n) = threads {
        // a pool built earlier in the same process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn execute(command: &Command, args: &[String], out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Discord(a) => cmd_discord(a, out),
        Command::Power(a) => cmd_power(a, args, out),
        Command::Sweep(a) => cmd_sweep(a, args, out),
        Command::Boundary(a) => cmd_boundary(a, args, out),
        Command::Cloud(a) => cmd_cloud(a, args, out),
        Command::GateInfo(a) => cmd_gate_info(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

pub fn cmd_discord(a: &DiscordArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let rho = read_density_matrix(&a.state)?;
    let report = discord_with(&rho, &a.measurement.settings());
    if a.json {
        let mut value = serde_json::to_value(report).map_err(|e| CliError::Validation(e.to_string()))?;
        value["purity"] = rho.purity().into();
        value["concurrence"] = concurrence(&rho).into();
        writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap())?;
        return Ok(());
    }
    let rows = [
        ("purity", rho.purity()),
        ("mutual_information", report.mutual_information),
        ("classical_ab", report.classical_ab),
        ("classical_ba", report.classical_ba),
        ("discord_ab", report.discord_ab),
        ("discord_ba", report.discord_ba),
        ("symmetric_discord", report.symmetric),
        ("concurrence", concurrence(&rho)),
    ];
    for (k, v) in rows {
        writeln!(out, "{k} = {}", num(v))?;
    }
    Ok(())
}

fn purities(single: Option<f64>, grid: &Option<String>) -> Result<Vec<f64>, CliError> {
    let values = match (single, grid) {
        (Some(mu), _) => vec![mu],
        (None, Some(text)) => parse_grid(text).map_err(CliError::Usage)?,
        (None, None) => return Err(CliError::Usage("give --purity or --purity-grid".into())),
    };
    if let Some(mu) = values.iter().find(|m| !(0.25..=1.0).contains(*m)) {
        return Err(CliError::Validation(format!("purity {mu} outside [1/4, 1]")));
    }
    Ok(values)
}

pub fn cmd_power(a: &PowerArgs, args: &[String], out: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    let coords = a.gate.resolve()?;
    let mus = purities(a.purity, &a.purity_grid)?;
    let cfg = a.search.config(mus[0]);
    cfg.validate()?;
    let results = power_curve(&coords, &mus, &cfg)?;
    let mut csv = String::from("mu,dp,theta_x,theta_y,theta_z,n_evals\n");
    for r in &results {
        let c = r.coords;
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            num(r.purity),
            num(r.dp),
            num(c.theta_x),
            num(c.theta_y),
            num(c.theta_z),
            r.evaluations
        )
        .unwrap();
    }
    let config = serde_json::json!({ "gate": coords, "purities": mus, "search": cfg });
    emit(&a.output, "power", args, config, Some(cfg.seed), &csv, start, out, ("mu", "dp"))
}

pub fn cmd_sweep(a: &SweepArgs, args: &[String], out: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = a.search.config(a.purity);
    cfg.validate()?;
    if a.points == 0 {
        return Err(CliError::Validation("--points must be at least 1".into()));
    }
    let family = match a.family {
        FamilyArg::Single => GateFamily::SingleAxis,
        FamilyArg::Double => GateFamily::DoubleAxis,
    };
    let alphas = linspace(0.0, std::f64::consts::FRAC_PI_4, a.points);
    let rows = angle_sweep(family, &alphas, &cfg)?;
    let mut csv = String::from("alpha,dp\n");
    for (alpha, r) in &rows {
        writeln!(csv, "{},{}", num(*alpha), num(r.dp)).unwrap();
    }
    let config = serde_json::json!({ "family": family, "alphas": alphas, "search": cfg });
    emit(&a.output, "sweep", args, config, Some(cfg.seed), &csv, start, out, ("alpha", "dp"))
}

pub fn cmd_boundary(a: &BoundaryArgs, args: &[String], out: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    let mus = match &a.purity_grid {
        Some(_) => purities(None, &a.purity_grid)?,
        None if a.points == 0 => return Err(CliError::Validation("--points must be at least 1".into())),
        None => linspace(0.25, 1.0, a.points),
    };
    let curve = boundary_curve(&mus)?;
    let mut csv = String::from("mu,delta_max,branch,a,b,w\n");
    for p in &curve {
        writeln!(csv, "{},{},{},{},{},{}", num(p.mu), num(p.delta_max), p.branch, opt_num(p.a), opt_num(p.b), opt_num(p.w))
            .unwrap();
    }
    let config = serde_json::json!({ "purities": mus, "discord": DiscordSettings::default() });
    emit(&a.output, "boundary", args, config, None, &csv, start, out, ("mu", "delta_max"))
}

pub fn cmd_cloud(a: &CloudArgs, args: &[String], out: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = RandomStateConfig { rank: a.rank, sample_count: a.samples, seed: a.seed };
    let states = sample_random_states(&cfg)?;
    let settings = a.measurement.settings();
    let rows: Vec<(f64, f64)> = states.par_iter().map(|r| (r.purity(), discord_with(r, &settings).symmetric)).collect();
    let mut csv = String::from("purity,discord\n");
    for (mu, d) in rows {
        writeln!(csv, "{},{}", num(mu), num(d)).unwrap();
    }
    let config = serde_json::json!({ "rank": a.rank, "samples": a.samples, "discord": settings });
    emit(&a.output, "cloud", args, config, Some(a.seed), &csv, start, out, ("purity", "discord"))
}

pub fn cmd_gate_info(a: &GateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let coords = a.gate.resolve()?;
    let c = coords.normalized();
    writeln!(out, "theta = {c}")?;
    writeln!(out, "radians = ({}, {}, {})", num(c.theta_x), num(c.theta_y), num(c.theta_z))?;
    Ok(())
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let checks: Vec<_> = identity_suite().into_iter().chain(property_suite(a.seed)).collect();
    for c in &checks {
        writeln!(out, "{c}")?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len())?;
    if failed > 0 {
        return Err(CliError::Verification(failed));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn emit(
    output: &OutputArgs,
    subcommand: &str,
    args: &[String],
    config: serde_json::Value,
    seed: Option<u64>,
    csv: &str,
    start: Instant,
    out: &mut dyn Write,
    axes: (&str, &str),
) -> Result<(), CliError> {
    let Some(path) = &output.out else {
        out.write_all(csv.as_bytes())?;
        return Ok(());
    };
    std::fs::write(path, csv)?;
    let mut outputs = vec![path.display().to_string()];
    if output.gnuplot {
        let script = gnuplot_path(path);
        std::fs::write(&script, gnuplot_script(path, axes))?;
        outputs.push(script.display().to_string());
    }
    let manifest = RunManifest::new(subcommand, args, config, seed, outputs, start.elapsed());
    manifest.write(&manifest::manifest_path(path))?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn gnuplot_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}

fn gnuplot_script(csv: &Path, (x, y): (&str, &str)) -> String {
    let name = csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel '{x}'\nset ylabel '{y}'\nplot '{name}' using '{x}':'{y}' with linespoints\n"
    )
}
