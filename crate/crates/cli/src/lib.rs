//! `nisq-modal`: build oscillator models, estimate eigenvalues on a simulated
//! noisy quantum computer, sweep geometries, and assess device feasibility.

#[cfg(test)]
mod command_tests;
mod config;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nisq_modal::circuit::NoiseModel;
use nisq_modal::estimator::eigendecompose;
use nisq_modal::estimator::{
    estimate_eigenvalue, rows_to_csv, rows_to_json, sweep, EigenEstimate, Repetitions, Shots, SweepConfig,
};
use nisq_modal::oscillator::{assemble_dynamical_matrix, qubits_for_dim, standard_ladder, Geometry};
use nisq_modal::qpi::{load_device_registry, run_gate, AssessmentReport, GateConfig, ProblemProfile, Stage};

use config::RunConfig;

macro_rules! emit {
    ($o:expr, $($arg:tt)*) => {{
        $o.push_str(&format!($($arg)*));
        $o.push('\n');
    }};
}

pub const SEED_ENV: &str = "NISQ_MODAL_SEED";
const DEFAULT_NOISE: f64 = nisq_modal::circuit::DEFAULT_GATE_FIDELITY;
const DEFAULT_STEPS: u64 = 5_000_000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(nisq_modal::Error),
    Io(std::io::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<nisq_modal::Error> for CliError {
    fn from(e: nisq_modal::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "nisq-modal", version, about, propagate_version = true)]
struct Cli {
    /// Worker threads [default: available parallelism]
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,

    /// JSON file holding any of the flags below (snake_case keys, plus
    /// `subcommand`); flags given on the command line take precedence
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a geometry, write its dynamical matrix and geometry JSON, print its spectrum
    Model(ModelArgs),
    /// Estimate one eigenvalue through the Pauli-measurement routine
    Estimate(EstimateArgs),
    /// Repeat max-eigenvalue estimates over geometries and tabulate relative errors
    Sweep(SweepArgs),
    /// Run the suitability / classical-alternative / feasibility gate for a device
    Assess(AssessArgs),
}

#[derive(Args, Debug, Default)]
struct ModelArgs {
    /// chain:N[:fixed_fixed|fixed_free] or blade:a|b|c[:height_mm]
    geometry: Option<String>,

    /// Output directory [default: .]
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct SamplingArgs {
    /// Per-gate fidelity f in (0, 1]; 1.0 is noiseless [default: 0.993]
    #[arg(long, value_name = "F")]
    noise: Option<f64>,

    /// Shots per measured Pauli term, or `analytic` [default: 4096]
    #[arg(long, value_name = "N|analytic")]
    shots: Option<String>,

    /// Base RNG seed [default: $NISQ_MODAL_SEED, else 0]
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
struct EstimateArgs {
    /// chain:N[:fixed_fixed|fixed_free] or blade:a|b|c[:height_mm]
    geometry: Option<String>,

    #[command(flatten)]
    sampling: SamplingArgs,

    /// Eigenpair index in ascending order of the padded spectrum [default: largest]
    #[arg(long)]
    k: Option<usize>,

    /// Stdout format [default: text]
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Also write the estimate as JSON to this file
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct SweepArgs {
    /// Geometries to sweep [default: chains 2..64 and blades a/b/c at 10..60 mm]
    geometries: Vec<String>,

    #[command(flatten)]
    sampling: SamplingArgs,

    /// Repetitions for every geometry (overrides the per-family defaults)
    #[arg(long)]
    repetitions: Option<usize>,

    /// Repetitions per chain [default: 100]
    #[arg(long)]
    chain_repetitions: Option<usize>,

    /// Repetitions per blade [default: 1000]
    #[arg(long)]
    blade_repetitions: Option<usize>,

    /// Table format [default: csv]
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Write the table here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct AssessArgs {
    /// Device name from the bundled registry, e.g. ibm_torino
    #[arg(long)]
    device: Option<String>,

    /// Derive the problem profile from this geometry's top eigenvector encoding
    #[arg(long, value_name = "GEOMETRY")]
    from_geometry: Option<String>,

    /// Explicit profile: system dimension N (taken as Hermitian)
    #[arg(long, conflicts_with = "from_geometry")]
    system_size: Option<u64>,

    /// Explicit profile: qubits required [default: ceil(log2 N)]
    #[arg(long, conflicts_with = "from_geometry")]
    qubits: Option<u32>,

    /// Explicit profile: encoding gate count
    #[arg(long, conflicts_with = "from_geometry")]
    gates: Option<u64>,

    /// Kernel invocations per simulation [default: 5000000]
    #[arg(long)]
    steps: Option<u64>,

    /// Declare the workload embarrassingly parallel
    #[arg(long)]
    parallel: bool,

    /// Minimum acceptable circuit fidelity [default: 0.5]
    #[arg(long, value_name = "F")]
    fidelity_floor: Option<f64>,

    /// Stdout format [default: text]
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Also write the report as JSON to this file
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

/// Runs the command line `args` (program name first). `seed_env` is the value
/// of `NISQ_MODAL_SEED`, if set. Returns the process exit code.
pub fn run_with<I, T>(args: I, seed_env: Option<&str>, stdout: &mut impl Write, stderr: &mut impl Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return match stdout.write_all(rendered.as_bytes()) {
                    Ok(()) => 0,
                    Err(_) => 1,
                };
            }
            let first = rendered.lines().next().unwrap_or_default();
            let _ = writeln!(stderr, "error[usage]: {}", first.trim_start_matches("error: "));
            return 2;
        }
    };
    let result = run(cli, seed_env).and_then(|text| {
        stdout.write_all(text.as_bytes())?;
        stdout.flush()?;
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error[{}]: {e}", e.kind());
            e.exit_code()
        }
    }
}

fn run(cli: Cli, seed_env: Option<&str>) -> CliResult<String> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if cfg.seed.is_none() {
        if let Some(v) = seed_env {
            let seed = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{v}` is not an unsigned integer")))?;
            cfg.seed = Some(seed);
        }
    }
    let command = match cli.command {
        Some(c) => c,
        None => match cfg.subcommand.as_deref() {
            Some("model") => Command::Model(ModelArgs::default()),
            Some("estimate") => Command::Estimate(EstimateArgs::default()),
            Some("sweep") => Command::Sweep(SweepArgs::default()),
            Some("assess") => Command::Assess(AssessArgs::default()),
            Some(other) => return Err(CliError::Usage(format!("unknown subcommand `{other}` in config"))),
            None => return Err(CliError::Usage("no subcommand given (see --help)".into())),
        },
    };
    let jobs = cli.jobs.map(|j| j as usize).or(cfg.jobs);
    let go = || match command {
        Command::Model(a) => cmd_model(a, &cfg),
        Command::Estimate(a) => cmd_estimate(a, &cfg),
        Command::Sweep(a) => cmd_sweep(a, &cfg),
        Command::Assess(a) => cmd_assess(a, &cfg),
    };
    match jobs {
        Some(0) => Err(CliError::Usage("--jobs must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?
            .install(go),
        None => go(),
    }
}

fn parse_geometry(s: &str) -> CliResult<Geometry> {
    s.parse()
        .map_err(|e: nisq_modal::Error| CliError::Usage(format!("geometry `{s}`: {e}")))
}

fn required_geometry(flag: Option<String>, cfg: &RunConfig) -> CliResult<Geometry> {
    let s = flag
        .or_else(|| cfg.geometry.clone())
        .ok_or_else(|| CliError::Usage("missing geometry selector".into()))?;
    parse_geometry(&s)
}

struct Sampling {
    noise: NoiseModel,
    shots: Shots,
    seed: u64,
}

fn resolve_sampling(a: SamplingArgs, cfg: &RunConfig) -> CliResult<Sampling> {
    let f = a.noise.or(cfg.noise).unwrap_or(DEFAULT_NOISE);
    let noise = NoiseModel::from_fidelity(f).map_err(|e| CliError::Usage(format!("--noise: {e}")))?;
    let shots = match a.shots.or_else(|| cfg.shots.as_ref().map(|s| s.as_flag())) {
        Some(s) => s
            .parse()
            .map_err(|e: nisq_modal::Error| CliError::Usage(format!("--shots: {e}")))?,
        None => Shots::default(),
    };
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    Ok(Sampling { noise, shots, seed })
}

fn resolve_format(flag: Option<Format>, cfg: &RunConfig, default: Format, allowed: &[Format]) -> CliResult<Format> {
    let format = match (flag, &cfg.format) {
        (Some(f), _) => f,
        (None, Some(s)) => Format::from_str(s, true).map_err(|e| CliError::Usage(format!("format: {e}")))?,
        (None, None) => default,
    };
    if !allowed.contains(&format) {
        return Err(CliError::Usage(format!(
            "format `{}` not available here",
            format.to_possible_value().expect("no skipped variants").get_name()
        )));
    }
    Ok(format)
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}

fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn file_stem(g: &Geometry) -> String {
    g.to_string().replace(':', "_")
}

fn cmd_model(a: ModelArgs, cfg: &RunConfig) -> CliResult<String> {
    let mut o = String::new();
    let g = required_geometry(a.geometry, cfg)?;
    let sys = g.build()?;
    let h = assemble_dynamical_matrix(&sys);
    let n = h.dim();
    let dir = a.out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let matrix_path = dir.join(format!("{}.matrix.txt", file_stem(&g)));
    let geometry_path = dir.join(format!("{}.geometry.json", file_stem(&g)));
    write_file(&matrix_path, &h.matrix().to_text())?;
    write_file(&geometry_path, &sys.to_json()?)?;

    let values: Vec<f64> = eigendecompose(h.matrix())?.iter().map(|p| p.value).collect();
    let lambda_max = *values.last().expect("at least two oscillators");
    emit!(o, "geometry     {g}");
    emit!(o, "N            {n}");
    emit!(o, "n_qubits     {}", qubits_for_dim(n));
    emit!(
        o,
        "eigenvalues  {}",
        values.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(" ")
    );
    emit!(o, "lambda_min   {}", fmt_num(values[0]));
    emit!(o, "lambda_max   {}", fmt_num(lambda_max));
    emit!(o, "omega_max    {}", fmt_num(lambda_max.max(0.0).sqrt()));
    emit!(o, "matrix       {}", matrix_path.display());
    emit!(o, "geometry_js  {}", geometry_path.display());
    Ok(o)
}

#[derive(Serialize)]
struct EstimateReport {
    geometry: String,
    n_osc: usize,
    n_qubits: usize,
    #[serde(flatten)]
    estimate: EigenEstimate,
}

fn cmd_estimate(a: EstimateArgs, cfg: &RunConfig) -> CliResult<String> {
    let mut o = String::new();
    let g = required_geometry(a.geometry, cfg)?;
    let sampling = resolve_sampling(a.sampling, cfg)?;
    let format = resolve_format(a.format, cfg, Format::Text, &[Format::Text, Format::Json])?;
    let out = a.out.or_else(|| cfg.out.clone());

    let padded = g.padded_matrix()?;
    let k = a.k.or(cfg.k).unwrap_or(padded.matrix.dim() - 1);
    let estimate = estimate_eigenvalue(&padded.matrix, k, &sampling.noise, sampling.shots, sampling.seed)?;
    let report = EstimateReport {
        geometry: g.to_string(),
        n_osc: padded.original_dim,
        n_qubits: padded.n_qubits,
        estimate,
    };
    let json = serde_json::to_string_pretty(&report).map_err(nisq_modal::Error::from)? + "\n";
    if let Some(path) = &out {
        write_file(path, &json)?;
    }
    match format {
        Format::Json => o.push_str(&json),
        _ => print_estimate(&mut o, &report, sampling.shots),
    }
    Ok(o)
}

fn print_estimate(o: &mut String, r: &EstimateReport, shots: Shots) {
    let e = &r.estimate;
    let opt = |x: Option<f64>| {
        x.map(fmt_num)
            .unwrap_or_else(|| "undefined (lambda_k equals lambda_mixed)".into())
    };
    emit!(o, "geometry      {}", r.geometry);
    emit!(o, "n_osc         {}", r.n_osc);
    emit!(o, "n_qubits      {}", r.n_qubits);
    emit!(o, "k             {}", e.k);
    emit!(o, "gate_count    {}", e.gate_count);
    emit!(o, "terms         {}", e.total_terms);
    emit!(o, "f             {}", fmt_num(e.gate_fidelity));
    emit!(o, "shots         {shots}");
    emit!(o, "lambda_exact  {}", fmt_num(e.lambda_exact));
    emit!(o, "lambda_est    {}", fmt_num(e.lambda_est));
    emit!(
        o,
        "omega_est     {}{}",
        fmt_num(e.omega_est),
        if e.omega_clamped {
            " (clamped, estimate was negative)"
        } else {
            ""
        }
    );
    emit!(o, "lambda_mixed  {}", fmt_num(e.lambda_mixed));
    emit!(o, "rel_error     {}", opt(e.rel_error));
}

fn cmd_sweep(a: SweepArgs, cfg: &RunConfig) -> CliResult<String> {
    let mut o = String::new();
    let sampling = resolve_sampling(a.sampling, cfg)?;
    let format = resolve_format(a.format, cfg, Format::Csv, &[Format::Csv, Format::Json])?;
    let out = a.out.or_else(|| cfg.out.clone());

    let selectors = if a.geometries.is_empty() {
        cfg.geometries.clone().unwrap_or_default()
    } else {
        a.geometries
    };
    let geometries = if selectors.is_empty() {
        standard_ladder()
    } else {
        selectors
            .iter()
            .map(|s| parse_geometry(s))
            .collect::<CliResult<Vec<_>>>()?
    };

    let mut repetitions = Repetitions::default();
    if let Some(n) = a.repetitions.or(cfg.repetitions) {
        repetitions = Repetitions::uniform(n);
    }
    if let Some(n) = a.chain_repetitions.or(cfg.chain_repetitions) {
        repetitions.chain = n;
    }
    if let Some(n) = a.blade_repetitions.or(cfg.blade_repetitions) {
        repetitions.blade = n;
    }

    let config = SweepConfig {
        noise: sampling.noise,
        shots: sampling.shots,
        repetitions,
        seed: sampling.seed,
    };
    let rows = sweep(&geometries, &config)?;
    let table = match format {
        Format::Json => rows_to_json(&rows)? + "\n",
        _ => rows_to_csv(&rows)?,
    };
    match out {
        Some(path) => {
            write_file(&path, &table)?;
            emit!(o, "wrote {} rows to {}", rows.len(), path.display());
        }
        None => o.push_str(&table),
    }
    Ok(o)
}

fn cmd_assess(a: AssessArgs, cfg: &RunConfig) -> CliResult<String> {
    let mut o = String::new();
    let format = resolve_format(a.format, cfg, Format::Text, &[Format::Text, Format::Json])?;
    let out = a.out.or_else(|| cfg.out.clone());
    let name = a
        .device
        .or_else(|| cfg.device.clone())
        .ok_or_else(|| CliError::Usage("missing --device".into()))?;
    let registry = load_device_registry()?;
    let device = registry.lookup(&name)?;

    let steps = a.steps.or(cfg.steps).unwrap_or(DEFAULT_STEPS);
    let from_geometry = a.from_geometry.or_else(|| cfg.from_geometry.clone());
    let profile = match from_geometry {
        Some(s) => {
            let g = parse_geometry(&s)?;
            let h = assemble_dynamical_matrix(&g.build()?);
            ProblemProfile::from_matrix(h.matrix(), steps)?
        }
        None => {
            let size = a
                .system_size
                .or(cfg.system_size)
                .ok_or_else(|| CliError::Usage("give --from-geometry or --system-size with --gates".into()))?;
            let gates = a
                .gates
                .or(cfg.gates)
                .ok_or_else(|| CliError::Usage("--system-size needs --gates".into()))?;
            let qubits = a
                .qubits
                .or(cfg.qubits)
                .unwrap_or_else(|| qubits_for_dim(size.max(1) as usize) as u32);
            ProblemProfile::new(size, steps, true, qubits, gates)?
        }
    }
    .parallel(a.parallel || cfg.parallel.unwrap_or(false));

    let mut gate = GateConfig::default();
    if let Some(f) = a.fidelity_floor.or(cfg.fidelity_floor) {
        gate.fidelity_floor = f;
    }
    let report = run_gate(&profile, device, &gate)?;
    let json = report.to_json()? + "\n";
    if let Some(path) = &out {
        write_file(path, &json)?;
    }
    match format {
        Format::Json => o.push_str(&json),
        _ => print_assessment(&mut o, &report, &profile),
    }
    Ok(o)
}

fn print_assessment(o: &mut String, r: &AssessmentReport, p: &ProblemProfile) {
    let stage = |s: &Stage| {
        let mark = match (s.evaluated, s.value) {
            (false, _) => "-  ",
            (true, true) => "yes",
            (true, false) => "no ",
        };
        format!("{mark}  {}", s.reasons.join("; "))
    };
    let d = &r.device;
    emit!(
        o,
        "device                 {} ({} qubits, EPLG {})",
        d.name,
        d.qubits,
        d.eplg_100q.map(fmt_num).unwrap_or_else(|| "n/a".into())
    );
    emit!(
        o,
        "profile                N {}, steps {}, {} qubits, {} encoding gates",
        p.system_size,
        p.n_steps,
        p.required_qubits,
        p.encoding_gate_count
    );
    emit!(o, "suitable               {}", stage(&r.suitable));
    emit!(
        o,
        "classical alternative  {}",
        stage(&r.classical_alternative_preferred)
    );
    emit!(o, "feasible               {}", stage(&r.feasible));
    let verdict = if !r.suitable.value {
        "not a quantum candidate".to_string()
    } else if r.classical_alternative_preferred.value {
        "classical parallelisation preferred".to_string()
    } else if r.feasible.value {
        format!("feasible on {}", d.name)
    } else {
        format!("infeasible on {}", d.name)
    };
    emit!(o, "verdict                {verdict}");
}
