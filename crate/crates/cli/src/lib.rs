//! Command-line front end for the cqubit simulator.
//!
//! Exit codes: 0 success, 1 tolerance failure, 2 parse or usage error.

mod csv;
mod demo;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use cqubit::dsl::{compile, format_float, parse_bytes, Backend, NetlistOptions, Program};
use cqubit::netlist::{design_divider, divider_ratio, DividerDesign, STOCK_R1};
use cqubit::state::ChannelQuadWave;

pub use csv::{write_csv, CSV_HEADER};
pub use demo::{hadamard_closed_form, hadamard_demo_program, rphi_closed_form, rphi_demo_program, DEMO_OMEGA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cqubit",
    version,
    about = "Run cqubit programs on ideal or analog-netlist backends"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a .cq program and write input/output waveforms as CSV
    Run {
        program: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run one of the built-in reference experiments
    Demo {
        #[arg(value_enum)]
        which: DemoKind,
        #[command(flatten)]
        grid: GridArgs,
        /// Fail (exit 1) if the deviation from the closed form exceeds this
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Size the shunt resistor of a voltage divider
    DesignDivider {
        #[arg(long)]
        ratio: f64,
        #[arg(long, default_value_t = STOCK_R1)]
        r1: f64,
    },
    /// Run a program on both backends and report their deviation
    CompareBackends {
        program: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Print the netlist each gate of a program compiles to
    DumpNetlist {
        program: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DemoKind {
    Hadamard,
    Rphi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Ideal,
    Netlist,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Ideal => Backend::Ideal,
            BackendArg::Netlist => Backend::Netlist,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct GridArgs {
    /// Start time (s)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    /// End time (s), inclusive
    #[arg(long, default_value_t = 2e-9, allow_negative_numbers = true)]
    t1: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = BackendArg::Ideal)]
    backend: BackendArg,
    /// CSV destination; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Series resistor of every divider (ohm)
    #[arg(long, default_value_t = STOCK_R1)]
    divider_r1: f64,
    /// Round designed shunt resistors to this many significant digits
    /// (4 reproduces the 24.14 kΩ part)
    #[arg(long)]
    resistor_digits: Option<u32>,
    /// Resistor tolerance in percent
    #[arg(long, default_value_t = 0.0)]
    resistor_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
    pub backend: Backend,
    pub netlist: NetlistOptions,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / (self.samples - 1) as f64
    }

    /// Sample the program's initial cqubit on the configured grid.
    pub fn input_wave(&self, program: &Program) -> anyhow::Result<ChannelQuadWave> {
        Ok(ChannelQuadWave::from_params(
            &program.init,
            self.t0,
            self.dt(),
            self.samples,
        )?)
    }
}

impl TryFrom<&GridArgs> for RunConfig {
    type Error = String;

    fn try_from(g: &GridArgs) -> Result<Self, String> {
        if !(g.t0.is_finite() && g.t1.is_finite()) || g.t1 <= g.t0 {
            return Err(format!("--t1 ({}) must exceed --t0 ({})", g.t1, g.t0));
        }
        if g.samples < 2 {
            return Err("--samples must be at least 2".into());
        }
        if !(g.resistor_tol.is_finite() && (0.0..100.0).contains(&g.resistor_tol)) {
            return Err("--resistor-tol must lie in [0, 100)".into());
        }
        let design = match g.resistor_digits {
            Some(d) => DividerDesign::rounded(g.divider_r1, d),
            None => DividerDesign::exact(g.divider_r1),
        }
        .map_err(|e| format!("invalid divider design: {e}"))?;
        Ok(RunConfig {
            t0: g.t0,
            t1: g.t1,
            samples: g.samples,
            backend: g.backend.into(),
            netlist: NetlistOptions {
                design,
                resistor_tol_pct: g.resistor_tol,
                seed: g.seed,
            },
            out: g.out.clone(),
        })
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render().ansi());
            return e.exit_code();
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> anyhow::Result<i32> {
    match command {
        Command::Run { program, grid } => {
            let Some(config) = config_or_usage(&grid, stderr)? else {
                return Ok(EXIT_USAGE);
            };
            let Some(prog) = load_program(&program, stderr)? else {
                return Ok(EXIT_USAGE);
            };
            cmd_run(&prog, &program.display().to_string(), &config, stdout, stderr)
        }
        Command::Demo { which, grid, tol } => {
            let Some(config) = config_or_usage(&grid, stderr)? else {
                return Ok(EXIT_USAGE);
            };
            cmd_demo(which, &config, tol, stdout, stderr)
        }
        Command::DesignDivider { ratio, r1 } => cmd_design_divider(ratio, r1, stdout, stderr),
        Command::CompareBackends { program, grid, tol } => {
            let Some(config) = config_or_usage(&grid, stderr)? else {
                return Ok(EXIT_USAGE);
            };
            let Some(prog) = load_program(&program, stderr)? else {
                return Ok(EXIT_USAGE);
            };
            cmd_compare(&prog, &config, tol, stdout)
        }
        Command::DumpNetlist { program, grid } => {
            let Some(config) = config_or_usage(&grid, stderr)? else {
                return Ok(EXIT_USAGE);
            };
            let Some(prog) = load_program(&program, stderr)? else {
                return Ok(EXIT_USAGE);
            };
            let compiled = compile(&prog, Backend::Netlist, &config.netlist)?;
            if let cqubit::CompiledPipeline::Netlist(stages) = compiled {
                for (i, (stage, gate)) in stages.iter().zip(&prog.gates).enumerate() {
                    writeln!(stdout, "# stage {i}: {gate}")?;
                    write!(stdout, "{stage}")?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn config_or_usage(grid: &GridArgs, stderr: &mut dyn Write) -> anyhow::Result<Option<RunConfig>> {
    match RunConfig::try_from(grid) {
        Ok(c) => Ok(Some(c)),
        Err(msg) => {
            writeln!(stderr, "error: {msg}")?;
            Ok(None)
        }
    }
}

fn load_program(path: &Path, stderr: &mut dyn Write) -> anyhow::Result<Option<Program>> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    match parse_bytes(&bytes) {
        Ok(p) => Ok(Some(p)),
        Err(diags) => {
            for d in diags {
                writeln!(stderr, "{}:{d}", path.display())?;
            }
            Ok(None)
        }
    }
}

/// Run `program` under `config` and write the CSV to `--out` or `stdout`.
fn execute(
    program: &Program,
    config: &RunConfig,
    stdout: &mut dyn Write,
) -> anyhow::Result<(ChannelQuadWave, ChannelQuadWave)> {
    let input = config.input_wave(program)?;
    let pipeline = compile(program, config.backend, &config.netlist)?;
    let output = pipeline.run(&input);
    match &config.out {
        Some(path) => {
            let mut file = std::io::BufWriter::new(
                fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            );
            write_csv(&mut file, &input, &output)?;
            file.flush()?;
        }
        None => write_csv(stdout, &input, &output)?,
    }
    Ok((input, output))
}

/// The summary goes to `stdout` when the CSV went to a file, otherwise to
/// `stderr` so the CSV stream stays clean.
fn summary_sink<'a>(config: &RunConfig, stdout: &'a mut dyn Write, stderr: &'a mut dyn Write) -> &'a mut dyn Write {
    if config.out.is_some() {
        stdout
    } else {
        stderr
    }
}

fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Ideal => "ideal",
        Backend::Netlist => "netlist",
    }
}

fn write_run_header(out: &mut dyn Write, name: &str, program: &Program, config: &RunConfig) -> std::io::Result<()> {
    writeln!(out, "program: {name}")?;
    writeln!(out, "backend: {}", backend_name(config.backend))?;
    let gates: Vec<String> = program.gates.iter().map(|g| g.to_string()).collect();
    writeln!(out, "gates: [{}]", gates.join(", "))?;
    writeln!(
        out,
        "samples: {} over [{}, {}] s",
        config.samples,
        format_float(config.t0),
        format_float(config.t1)
    )?;
    if let Some(path) = &config.out {
        writeln!(out, "csv: {}", path.display())?;
    }
    Ok(())
}

fn cmd_run(
    program: &Program,
    name: &str,
    config: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> anyhow::Result<i32> {
    let (_, output) = execute(program, config, stdout)?;
    let sink = summary_sink(config, stdout, stderr);
    write_run_header(sink, name, program, config)?;
    writeln!(sink, "max |norm - 1|: {:e}", output.max_norm_error())?;
    Ok(EXIT_OK)
}

fn cmd_demo(
    which: DemoKind,
    config: &RunConfig,
    tol: Option<f64>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> anyhow::Result<i32> {
    let (program, name) = match which {
        DemoKind::Hadamard => (hadamard_demo_program(), "demo hadamard"),
        DemoKind::Rphi => (rphi_demo_program(), "demo rphi"),
    };
    let (input, output) = execute(&program, config, stdout)?;
    let deviation = output
        .samples()
        .enumerate()
        .map(|(k, q)| {
            let t = input.time(k);
            let want = match which {
                DemoKind::Hadamard => hadamard_closed_form(t),
                DemoKind::Rphi => rphi_closed_form(t),
            };
            q.max_abs_diff(&want)
        })
        .fold(0.0, f64::max);
    let sink = summary_sink(config, stdout, stderr);
    write_run_header(sink, name, &program, config)?;
    writeln!(sink, "max |norm - 1|: {:e}", output.max_norm_error())?;
    writeln!(sink, "max deviation from closed form: {deviation:e}")?;
    match tol {
        Some(tol) if deviation > tol => {
            writeln!(sink, "FAIL: deviation exceeds tolerance {tol:e}")?;
            Ok(EXIT_TOLERANCE)
        }
        _ => Ok(EXIT_OK),
    }
}

/// Six significant digits.
fn six_digits(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn cmd_design_divider(ratio: f64, r1: f64, stdout: &mut dyn Write, stderr: &mut dyn Write) -> anyhow::Result<i32> {
    let r2 = match design_divider(ratio, r1) {
        Ok(r2) => r2,
        Err(e) => {
            writeln!(stderr, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let achieved = divider_ratio(r1, r2)?;
    writeln!(stdout, "r1: {} ohm", six_digits(r1))?;
    writeln!(stdout, "r2: {} ohm", six_digits(r2))?;
    writeln!(stdout, "achieved ratio: {achieved}")?;
    Ok(EXIT_OK)
}

/// Per-channel deviation between two runs of the same grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDeviation {
    pub max_abs: f64,
    pub rms: f64,
}

pub fn channel_deviations(a: &ChannelQuadWave, b: &ChannelQuadWave) -> [ChannelDeviation; 4] {
    std::array::from_fn(|i| {
        let (x, y) = (a.channels()[i].values(), b.channels()[i].values());
        let mut max_abs: f64 = 0.0;
        let mut sum_sq = 0.0;
        for (u, v) in x.iter().zip(y) {
            let d = (u - v).abs();
            max_abs = max_abs.max(d);
            sum_sq += d * d;
        }
        ChannelDeviation {
            max_abs,
            rms: (sum_sq / x.len() as f64).sqrt(),
        }
    })
}

fn cmd_compare(program: &Program, config: &RunConfig, tol: f64, stdout: &mut dyn Write) -> anyhow::Result<i32> {
    let input = config.input_wave(program)?;
    let ideal = compile(program, Backend::Ideal, &config.netlist)?.run(&input);
    let netlist = compile(program, Backend::Netlist, &config.netlist)?.run(&input);
    let devs = channel_deviations(&ideal, &netlist);

    writeln!(stdout, "{:<8} {:>14} {:>14}", "channel", "max_abs", "rms")?;
    for (name, d) in ["c0_re", "c0_im", "c1_re", "c1_im"].iter().zip(&devs) {
        writeln!(stdout, "{name:<8} {:>14.6e} {:>14.6e}", d.max_abs, d.rms)?;
    }
    let worst = devs.iter().map(|d| d.max_abs).fold(0.0, f64::max);
    let pass = worst < tol;
    writeln!(
        stdout,
        "max deviation: {worst:e} (tol {tol:e}) {}",
        if pass { "PASS" } else { "FAIL" }
    )?;
    Ok(if pass { EXIT_OK } else { EXIT_TOLERANCE })
}
