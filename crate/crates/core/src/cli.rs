//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain or solver error, 3 internal
//! error. "No bound state" is a valid answer for `solve` and `gap` and exits 0.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adiabatic::{min_culling_time_with_inset, DEFAULT_INSET};
use crate::capacity::{ionization_threshold, trap_capacity, Axis, ThresholdQuery, DEFAULT_THRESHOLD_TOLERANCE};
use crate::config::{parse_quantity, ConfigFile, QuantityKind};
use crate::oracles::{central_difference_jacobian, fd_two_body_extrapolated, single_particle_levels, FdGridSpec};
use crate::secular::{
    jacobian, residual, single_particle_wavenumber, solve_tonks_limit, solve_with, QuantumNumbers, SolveOutcome,
    SolverSettings,
};
use crate::spectrum::energy_gap;
use crate::sweep::{format_number, json_number, run_sweep, AxisRange, GridSpec, Quantity, Scale};
use crate::units::{energy_to_nanokelvin, joules_to_nanokelvin, to_trap_units, PhysicalTrapConfig, TrapUnitsProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    JsonLines,
}

#[derive(Debug, Parser)]
#[command(
    name = "bethe-well",
    version,
    about = "Bethe-ansatz bound states of bosons in a 1D square-well trap"
)]
pub struct Cli {
    /// Trap configuration file (flat key = value).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout; a `.manifest.toml` sibling is written alongside.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Newton residual tolerance (∞-norm).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Nominal continuation steps in the interaction strength.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the Bethe state with the given quantum numbers.
    Solve {
        /// Comma-separated, e.g. 1,2,3,4. Defaults to the ground state.
        #[arg(long)]
        quantum_numbers: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Ground and first-excited energies and the gap between them.
    Gap {
        #[arg(long)]
        n: Option<usize>,
    },
    /// Largest number of atoms the trap binds.
    Capacity {
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Bisect for the parameter value where the n-atom ground state appears or disappears.
    Threshold {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        axis: Axis,
        /// low,high with unit suffixes (nK, uK, um, nm, /cm) or bare SI values.
        #[arg(long)]
        bracket: String,
        /// Relative bisection width.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD_TOLERANCE)]
        rel_tol: f64,
    },
    /// Evaluate a quantity over a 1D or 2D parameter grid.
    Sweep {
        /// axis:low:high:count:lin|log, e.g. trap_depth:0.5nK:50nK:200:log
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        quantity: Quantity,
        /// Particle count (capacity: upper limit).
        #[arg(long)]
        n: Option<usize>,
        /// State traced for e_total / e_single_max.
        #[arg(long)]
        quantum_numbers: Option<String>,
        /// Measure energies from the trap bottom.
        #[arg(long)]
        shift_to_trap_bottom: bool,
        /// Evaluate cells on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// Minimum adiabatic time to lower the trap depth between two values.
    CullingTime {
        #[arg(long)]
        n: Option<usize>,
        /// Starting (deeper) trap depth.
        #[arg(long)]
        from: Option<String>,
        /// Final (shallower) trap depth.
        #[arg(long)]
        to: Option<String>,
        /// Use the depth thresholds of two atom numbers as endpoints, e.g. 3,2.
        #[arg(long, conflicts_with_all = ["from", "to"])]
        between_thresholds: Option<String>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Fraction of the interval trimmed from each end.
        #[arg(long, default_value_t = DEFAULT_INSET)]
        inset: f64,
    },
    /// Cross-check the solver against independent oracles.
    Verify,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Internal(m) => m,
        }
    }
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(&cli, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Tabular output shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Num(v) => format_number(*v),
            Field::Int(i) => i.to_string(),
            Field::Text(t) => t.clone(),
            Field::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Field::Num(v) => json_number(&format_number(*v)),
            Field::Int(i) => serde_json::Value::from(*i),
            Field::Text(t) => serde_json::Value::String(t.clone()),
            Field::Empty => serde_json::Value::Null,
        }
    }
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).map_err(internal)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Field::csv)).map_err(internal)?;
                }
                String::from_utf8(w.into_inner().map_err(internal)?).map_err(internal)
            }
            Format::JsonLines => {
                let mut out = String::new();
                for row in &self.rows {
                    let obj: serde_json::Map<String, serde_json::Value> =
                        self.header.iter().cloned().zip(row.iter().map(Field::json)).collect();
                    out.push_str(&serde_json::Value::Object(obj).to_string());
                    out.push('\n');
                }
                Ok(out)
            }
        }
    }
}

fn internal<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Internal(e.to_string())
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

struct Context {
    file: Option<ConfigFile>,
    settings: SolverSettings,
}

impl Context {
    fn config(&self) -> Result<PhysicalTrapConfig, CliError> {
        self.file
            .as_ref()
            .ok_or_else(|| CliError::Usage("this command needs --config".into()))?
            .to_physical()
            .map_err(domain)
    }

    fn particles(&self, flag: Option<usize>) -> Result<usize, CliError> {
        let n = flag
            .or_else(|| self.file.as_ref().and_then(|f| f.n_particles))
            .ok_or_else(|| CliError::Usage("particle count needed: pass --n or set n_particles".into()))?;
        if n == 0 {
            return Err(CliError::Usage("particle count must be at least 1".into()));
        }
        Ok(n)
    }
}

fn execute(cli: &Cli, argv: &[String]) -> Result<(), CliError> {
    let mut settings = SolverSettings::default();
    if let Some(tol) = cli.tol {
        if !(tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
        }
        settings.tolerance = tol;
    }
    if let Some(steps) = cli.steps {
        if steps == 0 {
            return Err(CliError::Usage("--steps must be at least 1".into()));
        }
        settings.continuation_steps = steps;
    }
    let file = match &cli.config {
        Some(path) => Some(ConfigFile::read(path).map_err(usage)?),
        None => None,
    };
    let ctx = Context { file, settings };

    let mut sweep_metadata = None;
    let table = match &cli.command {
        Command::Solve { quantum_numbers, n } => cmd_solve(&ctx, quantum_numbers.as_deref(), *n)?,
        Command::Gap { n } => cmd_gap(&ctx, *n)?,
        Command::Capacity { n_max } => cmd_capacity(&ctx, *n_max)?,
        Command::Threshold {
            n,
            axis,
            bracket,
            rel_tol,
        } => cmd_threshold(&ctx, *n, *axis, bracket, *rel_tol)?,
        Command::Sweep {
            x,
            y,
            quantity,
            n,
            quantum_numbers,
            shift_to_trap_bottom,
            serial,
        } => {
            let (table, meta) = cmd_sweep(
                &ctx,
                x,
                y.as_deref(),
                *quantity,
                *n,
                quantum_numbers.as_deref(),
                *shift_to_trap_bottom,
                *serial,
            )?;
            sweep_metadata = Some(meta);
            table
        }
        Command::CullingTime {
            n,
            from,
            to,
            between_thresholds,
            samples,
            inset,
        } => cmd_culling(
            &ctx,
            *n,
            from.as_deref(),
            to.as_deref(),
            between_thresholds.as_deref(),
            *samples,
            *inset,
        )?,
        Command::Verify => {
            let (table, all_passed) = cmd_verify(&ctx)?;
            emit(cli, argv, &ctx, &table, None)?;
            return if all_passed {
                Ok(())
            } else {
                Err(CliError::Domain("one or more oracle cross-checks failed".into()))
            };
        }
    };
    emit(cli, argv, &ctx, &table, sweep_metadata.as_deref())
}

fn emit(cli: &Cli, argv: &[String], ctx: &Context, table: &Table, metadata: Option<&str>) -> Result<(), CliError> {
    let text = table.render(cli.format)?;
    match &cli.out {
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes()).map_err(internal)?;
        }
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
            if let Some(meta) = metadata {
                write_sibling(path, "meta.toml", meta)?;
            }
            write_sibling(path, "manifest.toml", &manifest(cli, argv, ctx)?)?;
        }
    }
    Ok(())
}

/// `<out>.<suffix>` next to the output file.
pub fn sibling_path(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(suffix);
    out.with_file_name(name)
}

fn write_sibling(out: &Path, suffix: &str, text: &str) -> Result<(), CliError> {
    let path = sibling_path(out, suffix);
    std::fs::write(&path, text).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
}

/// Provenance record written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp_unix: u64,
    pub command_line: &'a [String],
    pub format: Format,
    pub solver: SolverSettings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<&'a ConfigFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolved_config: Option<PhysicalTrapConfig>,
}

fn manifest(cli: &Cli, argv: &[String], ctx: &Context) -> Result<String, CliError> {
    let timestamp_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let m = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        timestamp_unix,
        command_line: argv,
        format: cli.format,
        solver: ctx.settings,
        config: ctx.file.as_ref(),
        resolved_config: ctx.file.as_ref().and_then(|f| f.to_physical().ok()),
    };
    toml::to_string(&m).map_err(internal)
}

fn parse_qn(text: &str) -> Result<QuantumNumbers, CliError> {
    text.parse::<QuantumNumbers>().map_err(CliError::Usage)
}

fn axis_kind(axis: Axis) -> QuantityKind {
    match axis {
        Axis::TrapDepth => QuantityKind::Depth,
        Axis::TrapLength => QuantityKind::Length,
        Axis::InteractionStrength => QuantityKind::InverseLength,
    }
}

/// `axis:low:high:count:lin|log`
pub fn parse_axis_range(text: &str) -> Result<AxisRange, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 5 {
        return Err(format!(
            "axis range {text:?} must look like axis:low:high:count:lin|log"
        ));
    }
    let axis: Axis = parts[0].parse()?;
    let kind = axis_kind(axis);
    let low = parse_quantity(parts[1], kind)?;
    let high = parse_quantity(parts[2], kind)?;
    let count = parts[3]
        .parse::<usize>()
        .map_err(|e| format!("bad point count {:?}: {e}", parts[3]))?;
    let scale = match parts[4] {
        "lin" | "linear" => Scale::Linear,
        "log" => Scale::Log,
        other => return Err(format!("unknown scale {other:?} (lin or log)")),
    };
    Ok(AxisRange {
        axis,
        low,
        high,
        count,
        scale,
    })
}

fn cmd_solve(ctx: &Context, qn: Option<&str>, n: Option<usize>) -> Result<Table, CliError> {
    let cfg = ctx.config()?;
    let qn = match qn {
        Some(text) => parse_qn(text)?,
        None => QuantumNumbers::ground(ctx.particles(n)?),
    };
    if let Some(n) = n {
        if n != qn.len() {
            return Err(CliError::Usage(format!(
                "--n {n} disagrees with {} quantum numbers",
                qn.len()
            )));
        }
    }
    let p = to_trap_units(&cfg, qn.len()).map_err(domain)?;
    let mut t = Table::new(&["row", "quantum_number", "k", "kappa", "e_trap_units", "e_nk", "status"]);
    match solve_with(&p, &qn, &ctx.settings) {
        SolveOutcome::Bound(s) => {
            for j in 0..s.k.len() {
                t.push(vec![
                    Field::Int(j as i64 + 1),
                    Field::Int(s.quantum_numbers[j] as i64),
                    Field::Num(s.k[j]),
                    Field::Num(s.kappa[j]),
                    Field::Num(s.e_single[j]),
                    Field::Num(energy_to_nanokelvin(s.e_single[j], &cfg)),
                    Field::Text("bound".into()),
                ]);
            }
            t.push(vec![
                Field::Text("total".into()),
                Field::Text(qn.to_string()),
                Field::Empty,
                Field::Empty,
                Field::Num(s.e_total),
                Field::Num(energy_to_nanokelvin(s.e_total, &cfg)),
                Field::Text("bound".into()),
            ]);
        }
        SolveOutcome::Unbound(d) => t.push(vec![
            Field::Text("total".into()),
            Field::Text(qn.to_string()),
            Field::Empty,
            Field::Empty,
            Field::Empty,
            Field::Empty,
            Field::Text(format!("unbound: {}", d.reason)),
        ]),
    }
    Ok(t)
}

fn cmd_gap(ctx: &Context, n: Option<usize>) -> Result<Table, CliError> {
    let cfg = ctx.config()?;
    let n = ctx.particles(n)?;
    let p = to_trap_units(&cfg, n).map_err(domain)?;
    let mut t = Table::new(&["state", "quantum_numbers", "e_trap_units", "e_nk", "status"]);
    let state_row = |name: &str, qn: QuantumNumbers, e: Option<f64>, status: String| {
        vec![
            Field::Text(name.into()),
            Field::Text(qn.to_string()),
            e.map_or(Field::Empty, Field::Num),
            e.map_or(Field::Empty, |e| Field::Num(energy_to_nanokelvin(e, &cfg))),
            Field::Text(status),
        ]
    };
    match energy_gap(&p, &ctx.settings) {
        Ok(g) => {
            t.push(state_row(
                "ground",
                QuantumNumbers::ground(n),
                Some(g.ground.e_total),
                "bound".into(),
            ));
            let excited_status = if g.excited.is_some() { "bound" } else { "unbound" };
            t.push(state_row(
                "first_excited",
                QuantumNumbers::first_excited(n),
                g.excited.as_ref().map(|e| e.e_total),
                excited_status.into(),
            ));
            t.push(vec![
                Field::Text("gap".into()),
                Field::Empty,
                g.gap.map_or(Field::Empty, Field::Num),
                g.gap
                    .map_or(Field::Empty, |x| Field::Num(energy_to_nanokelvin(x, &cfg))),
                Field::Text(if g.gap.is_some() { "defined" } else { "undefined" }.into()),
            ]);
        }
        Err(e) => t.push(state_row(
            "ground",
            QuantumNumbers::ground(n),
            None,
            format!("unbound: {e}"),
        )),
    }
    Ok(t)
}

fn cmd_capacity(ctx: &Context, n_max: usize) -> Result<Table, CliError> {
    if n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let cfg = ctx.config()?;
    let cap = trap_capacity(&cfg, n_max, &ctx.settings);
    let mut t = Table::new(&[
        "trap_depth_nk",
        "trap_length_m",
        "interaction_strength_per_m",
        "n_max",
        "capacity",
    ]);
    t.push(vec![
        Field::Num(cfg.trap_depth_nk()),
        Field::Num(cfg.trap_length),
        Field::Num(cfg.interaction_strength().map_err(domain)?),
        Field::Int(n_max as i64),
        Field::Int(cap as i64),
    ]);
    Ok(t)
}

fn parse_bracket(text: &str, axis: Axis) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("bracket {text:?} must be low,high")));
    }
    let kind = axis_kind(axis);
    Ok((
        parse_quantity(parts[0], kind).map_err(CliError::Usage)?,
        parse_quantity(parts[1], kind).map_err(CliError::Usage)?,
    ))
}

fn cmd_threshold(ctx: &Context, n: Option<usize>, axis: Axis, bracket: &str, rel_tol: f64) -> Result<Table, CliError> {
    let cfg = ctx.config()?;
    let n = ctx.particles(n)?;
    let bracket = parse_bracket(bracket, axis)?;
    let q = ThresholdQuery {
        base_config: cfg,
        n,
        axis,
        bracket,
    };
    let r = ionization_threshold(&q, rel_tol, &ctx.settings).map_err(domain)?;
    let mut header = vec!["axis", "n", "value_si", "si_unit"];
    if axis == Axis::TrapDepth {
        header.push("value_nk");
    }
    header.extend([
        "bisection_width_si",
        "capacity_below",
        "capacity_above",
        "e_highest_trap_units",
    ]);
    let mut t = Table::new(&header);
    let mut row = vec![
        Field::Text(axis.name().into()),
        Field::Int(n as i64),
        Field::Num(r.value),
        Field::Text(axis.si_unit().into()),
    ];
    if axis == Axis::TrapDepth {
        row.push(Field::Num(joules_to_nanokelvin(r.value)));
    }
    row.extend([
        Field::Num(r.bisection_width),
        Field::Int(r.capacity_below as i64),
        Field::Int(r.capacity_above as i64),
        Field::Num(r.bound_side.highest_single_energy()),
    ]);
    t.push(row);
    Ok(t)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    ctx: &Context,
    x: &str,
    y: Option<&str>,
    quantity: Quantity,
    n: Option<usize>,
    qn: Option<&str>,
    shift: bool,
    serial: bool,
) -> Result<(Table, String), CliError> {
    let cfg = ctx.config()?;
    let quantum_numbers = qn.map(parse_qn).transpose()?;
    let n = match (&quantum_numbers, n) {
        (Some(q), _) => q.len(),
        (None, Some(n)) => n,
        (None, None) => ctx.particles(None)?,
    };
    let spec = GridSpec {
        x_axis: parse_axis_range(x).map_err(CliError::Usage)?,
        y_axis: y.map(parse_axis_range).transpose().map_err(CliError::Usage)?,
        fixed: cfg,
        quantity,
        n_particles: n,
        quantum_numbers,
        shift_to_trap_bottom: shift,
    };
    let grid = run_sweep(&spec, &ctx.settings, !serial).map_err(usage)?;
    let mut t = Table {
        header: grid.header().into_iter().map(String::from).collect(),
        rows: Vec::new(),
    };
    for (cell, text) in grid.cells.iter().zip(grid.rows()) {
        let last = text.len() - 1;
        t.rows.push(
            text.into_iter()
                .enumerate()
                .map(|(i, s)| {
                    if i == last && cell.value.is_none() {
                        Field::Empty
                    } else if i == last && quantity == Quantity::Capacity {
                        Field::Int(s.parse().unwrap_or(0))
                    } else {
                        Field::Num(s.parse().unwrap_or(f64::NAN))
                    }
                })
                .collect(),
        );
    }
    let meta = grid.metadata_toml().map_err(internal)?;
    Ok((t, meta))
}

fn cmd_culling(
    ctx: &Context,
    n: Option<usize>,
    from: Option<&str>,
    to: Option<&str>,
    between: Option<&str>,
    samples: usize,
    inset: f64,
) -> Result<Table, CliError> {
    let cfg = ctx.config()?;
    let n = ctx.particles(n)?;
    let (v_start, v_end) = match (from, to, between) {
        (Some(a), Some(b), None) => (
            parse_quantity(a, QuantityKind::Depth).map_err(CliError::Usage)?,
            parse_quantity(b, QuantityKind::Depth).map_err(CliError::Usage)?,
        ),
        (None, None, Some(pair)) => {
            let counts: Vec<usize> = pair
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(usage))
                .collect::<Result<_, _>>()?;
            if counts.len() != 2 {
                return Err(CliError::Usage("--between-thresholds needs two atom numbers".into()));
            }
            let threshold = |count: usize| {
                let q = ThresholdQuery {
                    base_config: cfg,
                    n: count,
                    axis: Axis::TrapDepth,
                    bracket: (cfg.trap_depth * 1e-4, cfg.trap_depth * 1e2),
                };
                ionization_threshold(&q, 1e-8, &ctx.settings)
                    .map(|r| r.value)
                    .map_err(domain)
            };
            (threshold(counts[0])?, threshold(counts[1])?)
        }
        _ => return Err(CliError::Usage("give --from and --to, or --between-thresholds".into())),
    };
    let est = min_culling_time_with_inset(&cfg, n, v_start, v_end, samples, inset, &ctx.settings).map_err(domain)?;
    let mut t = Table::new(&["v0_nk", "gap_nk", "t_min_s"]);
    for &(v, g) in &est.samples {
        t.push(vec![
            Field::Num(joules_to_nanokelvin(v)),
            Field::Num(joules_to_nanokelvin(g)),
            Field::Empty,
        ]);
    }
    t.push(vec![Field::Empty, Field::Empty, Field::Num(est.t_min)]);
    Ok(t)
}

struct Check {
    name: String,
    value: f64,
    tolerance: f64,
}

fn cmd_verify(ctx: &Context) -> Result<(Table, bool), CliError> {
    let s = &ctx.settings;
    let mut checks = Vec::new();

    // Tonks limit, corrected to first order in 1/ĉ
    let c_big = 1e6;
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        let qn = QuantumNumbers::ground(n);
        let p = TrapUnitsProblem::new(c_big, 20.0, n).map_err(internal)?;
        let sol = solve_with(&p, &qn, s)
            .into_bound()
            .ok_or_else(|| CliError::Domain("Tonks check unbound".into()))?;
        let tonks = solve_tonks_limit(&qn, 20.0).map_err(domain)?;
        for (k, t) in sol.k.iter().zip(&tonks) {
            let kappa = (400.0 - t * t).sqrt();
            let corrected = t - 2.0 * (n as f64 - 1.0) * t / (c_big * (1.0 + 2.0 / kappa));
            worst = worst.max((k / corrected - 1.0).abs());
        }
    }
    checks.push(Check {
        name: "tonks_limit_first_order".into(),
        value: worst,
        tolerance: 1e-9,
    });

    // one particle against the parity-split textbook levels
    let k0 = 7.7;
    let levels = single_particle_levels(k0, 10);
    let mut worst: f64 = 0.0;
    for (i, level) in levels.iter().enumerate() {
        let k = single_particle_wavenumber(i as u32 + 1, k0)
            .ok_or_else(|| CliError::Internal("level count mismatch".into()))?;
        worst = worst.max(((0.5 * (k * k - k0 * k0)) - level).abs());
    }
    checks.push(Check {
        name: "single_particle_levels".into(),
        value: worst,
        tolerance: 1e-9,
    });

    // analytic Jacobian against central differences
    let qn = QuantumNumbers::ground(4);
    let p = TrapUnitsProblem::new(3.0, 15.0, 4).map_err(internal)?;
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let phase = i as f64 * 0.618_033_988_749_895;
        let k: Vec<f64> = (0..4)
            .map(|j| 1.0 + 3.0 * j as f64 + 2.0 * ((phase + 0.37 * j as f64).fract()))
            .collect();
        let analytic = jacobian(&k, &qn, &p).map_err(internal)?;
        let numeric = central_difference_jacobian(|x| residual(x, &qn, &p), &k, 1e-6).map_err(internal)?;
        worst = worst.max((analytic - numeric).abs().max());
    }
    checks.push(Check {
        name: "jacobian_vs_central_difference".into(),
        value: worst,
        tolerance: 1e-6,
    });

    // two-body brute force
    let grid = FdGridSpec {
        points_per_dimension: 128,
        domain_half_width: 1.0,
    };
    for c_hat in [1.0, 20.0] {
        let p = TrapUnitsProblem::new(c_hat, 30.0, 2).map_err(internal)?;
        let sol = solve_with(&p, &QuantumNumbers::ground(2), s)
            .into_bound()
            .ok_or_else(|| CliError::Domain("two-body check unbound".into()))?;
        let fd = fd_two_body_extrapolated(&p, &grid).map_err(domain)?;
        let floor = 2.0 * p.well_depth();
        checks.push(Check {
            name: format!("two_body_fd_c{c_hat}"),
            value: ((sol.e_total + floor) / (fd + floor) - 1.0).abs(),
            tolerance: 1e-3,
        });
    }

    let mut t = Table::new(&["check", "value", "tolerance", "status"]);
    let mut all = true;
    for c in checks {
        let pass = c.value <= c.tolerance;
        all &= pass;
        t.push(vec![
            Field::Text(c.name),
            Field::Num(c.value),
            Field::Num(c.tolerance),
            Field::Text(if pass { "pass" } else { "fail" }.into()),
        ]);
    }
    Ok((t, all))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_range_literals() {
        let r = parse_axis_range("trap_depth:0.5nK:50nK:200:log").unwrap();
        assert_eq!(r.axis, Axis::TrapDepth);
        assert_eq!(r.count, 200);
        assert_eq!(r.scale, Scale::Log);
        assert!((joules_to_nanokelvin(r.high) - 50.0).abs() < 1e-9);
        let l = parse_axis_range("trap_length:1um:10um:100:lin").unwrap();
        assert!((l.low - 1e-6).abs() < 1e-18);
        assert!(parse_axis_range("trap_length:1um:10um:100").is_err());
        assert!(parse_axis_range("trap_length:1nK:10um:100:lin").is_err());
        assert!(parse_axis_range("width:1um:10um:100:lin").is_err());
        assert!(parse_axis_range("trap_length:1um:10um:100:cubic").is_err());
    }

    #[test]
    fn sibling_names() {
        assert_eq!(
            sibling_path(Path::new("/tmp/out.csv"), "manifest.toml"),
            PathBuf::from("/tmp/out.csv.manifest.toml")
        );
    }

    #[test]
    fn table_rendering() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![Field::Num(1.0 / 3.0), Field::Empty, Field::Int(4)]);
        assert_eq!(t.render(Format::Csv).unwrap(), "a,b,c\n3.33333333333e-1,,4\n");
        assert_eq!(
            t.render(Format::JsonLines).unwrap(),
            "{\"a\":0.333333333333,\"b\":null,\"c\":4}\n"
        );
    }
}
