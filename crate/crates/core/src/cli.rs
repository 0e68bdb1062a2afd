//! Subcommands behind the `evenodd` binary.
//!
//! Settings come from an optional TOML file named by `EVENODD_CONFIG`, then
//! from flags, which win. Exit codes: 0 success, 2 usage or configuration
//! error, 3 simulation or verification failure.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::boolfun::{
    catalog, catalog_entry, catalog_entry_for, classical_classify, is_separable, subclass, BoolFn2,
    Parity, SubClass,
};
use crate::coherence::{
    analytic_lines, classify_from_readout, decompose, simulate_fid, spectrum_from_fid, Acquisition,
    LineSpectrum, SpinSystemParams,
};
use crate::error::{Error, Result};
use crate::evenodd::{run_sequence_with, DeviationDensity, HConvention, InitialState, PhaseOracle};
use crate::pulse::{compile_gate, run_pulse_algorithm_detailed, verify_program, Frame, Gate};
use crate::verify::{run_verification, VerifyOptions};

pub const CONFIG_ENV: &str = "EVENODD_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "evenodd",
    version,
    about = "Even/odd classification of two-bit Boolean functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the algorithm for one function and report its parity.
    Classify(CommonArgs),
    /// Classify all sixteen functions and list the oracle catalog.
    Enumerate(CommonArgs),
    /// Compile a gate (h1, h2, h12, h12inv, U1..U16) to a pulse program.
    Compile {
        /// Gate name; defaults to the oracle of --function/--index.
        gate: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Simulate the readout FID and write the line spectrum as CSV.
    Spectrum {
        /// Also write the raw FID as CSV.
        #[arg(long)]
        fid: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the built-in self-checks.
    Verify {
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    DropRefocusing,
    FlipSign,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Thermal,
    Pseudopure,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ideal,
    Pulse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameArg {
    Rotating,
    Hardware,
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Frame {
        match f {
            FrameArg::Rotating => Frame::DoublyRotating,
            FrameArg::Hardware => Frame::HardwareFaithful,
        }
    }
}

/// Flags shared by every subcommand. Each one may also come from the config file.
#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommonArgs {
    /// Truth table as 0bXXXX; bit x (counting from the right, from 0) is f(x).
    #[arg(long)]
    pub function: Option<String>,
    /// Oracle catalog index 1..16 (alternative to --function).
    #[arg(long)]
    pub index: Option<u8>,
    #[arg(long, value_enum)]
    pub init: Option<InitKind>,
    /// Weight of |00⟩⟨00| for --init custom.
    #[arg(long, allow_hyphen_values = true)]
    pub k1: Option<f64>,
    /// Weight of |11⟩⟨11| for --init custom.
    #[arg(long, allow_hyphen_values = true)]
    pub k2: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, value_enum)]
    pub frame: Option<FrameArg>,
    /// Qubit 1 offset (Hz).
    #[arg(long, allow_hyphen_values = true)]
    pub nu1: Option<f64>,
    /// Qubit 2 offset (Hz).
    #[arg(long, allow_hyphen_values = true)]
    pub nu2: Option<f64>,
    /// Scalar coupling (Hz).
    #[arg(long)]
    pub j: Option<f64>,
    /// Sampling interval (s).
    #[arg(long)]
    pub dwell: Option<f64>,
    #[arg(long)]
    pub npoints: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(default)]
    pub json: bool,
}

impl CommonArgs {
    /// Flag values override file values. `function`/`index` and
    /// `init`/`k1`/`k2` are replaced as groups.
    pub fn merged_over(&self, file: &CommonArgs) -> CommonArgs {
        let (function, index) = if self.function.is_some() || self.index.is_some() {
            (self.function.clone(), self.index)
        } else {
            (file.function.clone(), file.index)
        };
        let (init, k1, k2) = if self.init.is_some() {
            (self.init, self.k1, self.k2)
        } else {
            (file.init, self.k1.or(file.k1), self.k2.or(file.k2))
        };
        CommonArgs {
            function,
            index,
            init,
            k1,
            k2,
            mode: self.mode.or(file.mode),
            frame: self.frame.or(file.frame),
            nu1: self.nu1.or(file.nu1),
            nu2: self.nu2.or(file.nu2),
            j: self.j.or(file.j),
            dwell: self.dwell.or(file.dwell),
            npoints: self.npoints.or(file.npoints),
            out: self.out.clone().or_else(|| file.out.clone()),
            json: self.json || file.json,
        }
    }
}

pub fn load_config_file(path: &Path) -> Result<CommonArgs> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Fully resolved settings for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub function: Option<BoolFn2>,
    pub init: InitialState,
    pub init_kind: InitKind,
    pub mode: Mode,
    pub frame: Frame,
    pub params: SpinSystemParams,
    pub acquisition: Acquisition,
    pub out: Option<PathBuf>,
    pub json: bool,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<RunConfig> {
        let function = match (&args.function, args.index) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either --function or --index, not both".into(),
                ))
            }
            (Some(text), None) => Some(parse_function(text)?),
            (None, Some(i)) => Some(
                catalog_entry(i)
                    .ok_or_else(|| Error::Config(format!("index must be 1..16, got {i}")))?
                    .function(),
            ),
            (None, None) => None,
        };
        let init_kind = args.init.unwrap_or(InitKind::Thermal);
        let init = match init_kind {
            InitKind::Custom => match (args.k1, args.k2) {
                (Some(k1), Some(k2)) => InitialState::new(k1, k2)?,
                _ => {
                    return Err(Error::Config(
                        "--init custom needs both --k1 and --k2".into(),
                    ))
                }
            },
            _ if args.k1.is_some() || args.k2.is_some() => {
                return Err(Error::Config(
                    "--k1/--k2 only apply to --init custom".into(),
                ))
            }
            InitKind::Thermal => InitialState::THERMAL,
            InitKind::Pseudopure => InitialState::PSEUDOPURE,
        };
        let defaults = SpinSystemParams::default();
        let params = SpinSystemParams::new(
            args.nu1.unwrap_or(defaults.nu1),
            args.nu2.unwrap_or(defaults.nu2),
            args.j.unwrap_or(defaults.j),
        )?;
        let acq_defaults = Acquisition::default();
        let acquisition = Acquisition {
            dwell: args.dwell.unwrap_or(acq_defaults.dwell),
            npoints: args.npoints.unwrap_or(acq_defaults.npoints),
        };
        acquisition.validate()?;
        Ok(RunConfig {
            function,
            init,
            init_kind,
            mode: args.mode.unwrap_or(Mode::Ideal),
            frame: args.frame.unwrap_or(FrameArg::Rotating).into(),
            params,
            acquisition,
            out: args.out.clone(),
            json: args.json,
        })
    }

    fn require_function(&self) -> Result<BoolFn2> {
        self.function
            .ok_or_else(|| Error::Config("this command needs --function or --index".into()))
    }
}

/// Accepts `0b0110` or a bare `0110`.
pub fn parse_function(text: &str) -> Result<BoolFn2> {
    let t = text.trim();
    if t.starts_with("0b") {
        t.parse()
    } else {
        format!("0b{t}")
            .parse()
            .map_err(|_| Error::BadTruthTable(text.to_string()))
    }
}

/// Usage and configuration problems map to 2, everything else to 3.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::BadTruthTable(_)
        | Error::UnsupportedGate(_)
        | Error::BadAcquisition(_)
        | Error::ZeroState => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Final state and oracle-call count for the configured mode.
fn run_algorithm(f: BoolFn2, cfg: &RunConfig) -> Result<(DeviationDensity, usize)> {
    match cfg.mode {
        Mode::Ideal => {
            let oracle = PhaseOracle::new(f);
            let rho = run_sequence_with(&oracle, cfg.init, HConvention::KetAction);
            Ok((rho, oracle.calls()))
        }
        Mode::Pulse => {
            let run = run_pulse_algorithm_detailed(f, cfg.init, &cfg.params, cfg.frame)?;
            Ok((run.rho, run.oracle_calls))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationRecord {
    pub function: String,
    pub outputs: [u8; 4],
    pub uf_index: u8,
    pub subclass: SubClass,
    pub expected: Parity,
    pub measured: Option<Parity>,
    pub agrees: bool,
    pub oracle_calls: usize,
    pub classical_queries: usize,
    pub single_quantum: f64,
    pub double_quantum: f64,
    pub k1: f64,
    pub k2: f64,
    pub mode: Mode,
    pub frame: Frame,
}

pub fn classify_record(f: BoolFn2, cfg: &RunConfig) -> Result<ClassificationRecord> {
    let (expected, classical_queries) = classical_classify(f);
    let (rho, oracle_calls) = run_algorithm(f, cfg)?;
    let profile = decompose(&rho);
    let measured = match classify_from_readout(&rho, &cfg.params) {
        Ok(p) => Some(p),
        Err(Error::AmbiguousReadout { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ClassificationRecord {
        function: f.to_string(),
        outputs: f.outputs().map(u8::from),
        uf_index: catalog_entry_for(f).index,
        subclass: subclass(f),
        expected,
        measured,
        agrees: measured == Some(expected),
        oracle_calls,
        classical_queries,
        single_quantum: profile.single_quantum(),
        double_quantum: profile.double_quantum(),
        k1: cfg.init.k1,
        k2: cfg.init.k2,
        mode: cfg.mode,
        frame: cfg.frame,
    })
}

fn describe_run(cfg: &RunConfig) -> String {
    let mode = match cfg.mode {
        Mode::Ideal => "ideal".to_string(),
        Mode::Pulse => format!("pulse, {} frame", cfg.frame),
    };
    format!("k1={} k2={}, {mode}", cfg.init.k1, cfg.init.k2)
}

fn parity_text(p: Option<Parity>) -> String {
    p.map(|p| p.to_string())
        .unwrap_or_else(|| "ambiguous".into())
}

/// Output of a subcommand: text for stdout plus the exit code.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }
}

pub fn cmd_classify(cfg: &RunConfig) -> Result<Outcome> {
    let f = cfg.require_function()?;
    let rec = classify_record(f, cfg)?;
    let text = if cfg.json {
        serde_json::to_string_pretty(&rec)? + "\n"
    } else {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "function      {} (U{}, subclass {})",
            rec.function, rec.uf_index, rec.subclass
        );
        let _ = writeln!(s, "run           {}", describe_run(cfg));
        let _ = writeln!(
            s,
            "coherence     single-quantum {:.6}  double-quantum {:.6}",
            rec.single_quantum, rec.double_quantum
        );
        let _ = writeln!(
            s,
            "quantum       {} after {} oracle calls",
            parity_text(rec.measured),
            rec.oracle_calls
        );
        let _ = writeln!(
            s,
            "classical     {} after {} queries",
            rec.expected, rec.classical_queries
        );
        s
    };
    write_out(cfg, &text)?;
    let mut outcome = Outcome::ok(text);
    if !rec.agrees {
        outcome.stderr = format!("readout disagrees with the classical parity for {f}\n");
        outcome.code = EXIT_FAILURE;
    }
    Ok(outcome)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogRecord {
    pub index: u8,
    pub function: String,
    pub diagonal: [i8; 4],
    pub parity: Parity,
    pub separable: bool,
    pub classification: ClassificationRecord,
}

pub fn enumerate_records(cfg: &RunConfig) -> Result<Vec<CatalogRecord>> {
    catalog()
        .into_iter()
        .map(|e| {
            let f = e.function();
            Ok(CatalogRecord {
                index: e.index,
                function: f.to_string(),
                diagonal: e.diagonal,
                parity: e.parity,
                separable: is_separable(&e.matrix())?,
                classification: classify_record(f, cfg)?,
            })
        })
        .collect()
}

pub fn cmd_enumerate(cfg: &RunConfig) -> Result<Outcome> {
    let records = enumerate_records(cfg)?;
    let json = serde_json::to_string_pretty(&records)? + "\n";
    let count = |parity: Parity, separable: bool| {
        records
            .iter()
            .filter(|r| r.parity == parity && r.separable == separable)
            .count()
    };
    let agreeing = records.iter().filter(|r| r.classification.agrees).count();
    let text = if cfg.json {
        json.clone()
    } else {
        let mut s = format!("run: {}\n", describe_run(cfg));
        s.push_str("U     f        diagonal           parity subclass  oracle       readout\n");
        for r in &records {
            let d = r
                .diagonal
                .map(|x| if x > 0 { "+1" } else { "-1" })
                .join(" ");
            let _ = writeln!(
                s,
                "{:<5} {:<8} {:<18} {:<6} {:<9} {:<12} {}",
                format!("U{}", r.index),
                r.function,
                d,
                r.parity,
                r.classification.subclass,
                if r.separable {
                    "separable"
                } else {
                    "entangling"
                },
                parity_text(r.classification.measured),
            );
        }
        let _ = writeln!(s, "even: {}/8 separable", count(Parity::Even, true));
        let _ = writeln!(s, "odd:  {}/8 entangling", count(Parity::Odd, false));
        let _ = writeln!(s, "readout agrees with classical parity: {agreeing}/16");
        s
    };
    if let Some(path) = &cfg.out {
        fs::write(path, &json)?;
    }
    let mut outcome = Outcome::ok(text);
    if agreeing != records.len() {
        outcome.code = EXIT_FAILURE;
        outcome.stderr = format!("{} functions misclassified\n", records.len() - agreeing);
    }
    Ok(outcome)
}

pub fn cmd_compile(gate: Option<&str>, cfg: &RunConfig) -> Result<Outcome> {
    let gate = match (gate, cfg.function) {
        (Some(name), _) => name.parse::<Gate>()?,
        (None, Some(f)) => Gate::U(catalog_entry_for(f).index),
        (None, None) => {
            return Err(Error::Config(
                "compile needs a gate name or --function/--index".into(),
            ))
        }
    };
    let program = compile_gate(gate, cfg.frame, &cfg.params)?;
    let json = program.to_json()? + "\n";
    if let Some(path) = &cfg.out {
        fs::write(path, &json)?;
    }
    let report = verify_program(gate, program, &cfg.params);
    let mut text = if cfg.json { json } else { String::new() };
    let mut stderr = String::new();
    match &report {
        Ok(r) if !cfg.json => {
            text.push_str(&r.program.timeline());
            let target = if r.frame_flip_applied {
                format!("Π·{gate}")
            } else {
                gate.to_string()
            };
            let _ = writeln!(
                text,
                "propagator = {target} up to global phase {:.6} rad (residual {:.1e})",
                r.achieved_phase, r.residual
            );
        }
        Ok(_) => {}
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
        }
    }
    let code = if report.is_ok() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    Ok(Outcome {
        stdout: text,
        stderr,
        code,
    })
}

/// Line amplitude that maps to full scale in the stick plot: the largest line of
/// the thermal-state spectrum of the constant-zero function.
pub fn reference_scale(params: &SpinSystemParams) -> f64 {
    let zero = BoolFn2::from_bits(0).expect("0 is a valid truth table");
    analytic_lines(
        &run_sequence_with(
            &PhaseOracle::new(zero),
            InitialState::THERMAL,
            HConvention::KetAction,
        ),
        params,
    )
    .max_amplitude()
}

/// Horizontal bar per line, `width` characters at `scale`.
pub fn stick_plot(spectrum: &LineSpectrum, scale: f64, width: usize) -> String {
    let mut s = String::new();
    for line in &spectrum.lines {
        let a = line.amplitude;
        let bars = ((a.norm() / scale) * width as f64)
            .round()
            .min(4.0 * width as f64) as usize;
        let _ = writeln!(
            s,
            "{:>10.3} Hz | {:<width$} {:+.4}{:+.4}i",
            line.frequency_hz,
            "#".repeat(bars),
            a.re,
            a.im
        );
    }
    s
}

pub fn cmd_spectrum(fid_path: Option<&Path>, cfg: &RunConfig) -> Result<Outcome> {
    let f = cfg.require_function()?;
    let (rho, _) = run_algorithm(f, cfg)?;
    let fid = simulate_fid(&rho, &cfg.params, &cfg.acquisition)?;
    if let Some(path) = fid_path {
        fs::write(path, fid.to_csv())?;
    }
    let spectrum = spectrum_from_fid(&fid);
    let scale = reference_scale(&cfg.params);
    let csv = spectrum.to_csv(Some(scale));
    let mut stderr = String::new();
    if spectrum.is_empty() {
        stderr.push_str("no lines above threshold\n");
    }
    let stdout = match &cfg.out {
        Some(path) => {
            fs::write(path, &csv)?;
            let mut s = format!("{f}: {} line(s), {}\n", spectrum.len(), describe_run(cfg));
            s.push_str(&stick_plot(&spectrum, scale, 40));
            s
        }
        None => csv,
    };
    Ok(Outcome {
        stdout,
        stderr,
        code: EXIT_OK,
    })
}

pub fn cmd_verify(fault: Option<Fault>, cfg: &RunConfig) -> Result<Outcome> {
    let options = VerifyOptions {
        drop_refocusing: fault == Some(Fault::DropRefocusing),
        flip_diagonal_sign: fault == Some(Fault::FlipSign),
    };
    let report = run_verification(&cfg.params, options);
    let text = if cfg.json {
        serde_json::to_string_pretty(&report)? + "\n"
    } else {
        let mut s = String::new();
        for g in &report.groups {
            let status = if g.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{status}  {} ({} checks)", g.name, g.checks);
            for failure in &g.failures {
                let _ = writeln!(s, "      {failure}");
            }
        }
        s
    };
    write_out(cfg, &text)?;
    let code = if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    Ok(Outcome {
        stdout: text,
        stderr: String::new(),
        code,
    })
}

fn write_out(cfg: &RunConfig, text: &str) -> Result<()> {
    if let Some(path) = &cfg.out {
        fs::write(path, text)?;
    }
    Ok(())
}

fn common(command: &Command) -> &CommonArgs {
    match command {
        Command::Classify(c) | Command::Enumerate(c) => c,
        Command::Compile { common, .. }
        | Command::Spectrum { common, .. }
        | Command::Verify { common, .. } => common,
    }
}

/// Runs a parsed command with an optional config file.
pub fn execute(cli: &Cli, config_path: Option<&Path>) -> Result<Outcome> {
    let file = match config_path {
        Some(p) => load_config_file(p)?,
        None => CommonArgs::default(),
    };
    let cfg = RunConfig::resolve(&common(&cli.command).merged_over(&file))?;
    match &cli.command {
        Command::Classify(_) => cmd_classify(&cfg),
        Command::Enumerate(_) => cmd_enumerate(&cfg),
        Command::Compile { gate, .. } => cmd_compile(gate.as_deref(), &cfg),
        Command::Spectrum { fid, .. } => cmd_spectrum(fid.as_deref(), &cfg),
        Command::Verify { inject_fault, .. } => cmd_verify(*inject_fault, &cfg),
    }
}

/// Parses `args`, runs the command and writes its output; returns the exit code.
pub fn run<I, T>(
    args: I,
    config_path: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match execute(&cli, config_path) {
        Ok(outcome) => {
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            let _ = stderr.write_all(outcome.stderr.as_bytes());
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point for the binary: process arguments and `EVENODD_CONFIG`.
pub fn main_from_env() -> i32 {
    let config = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    run(
        std::env::args_os(),
        config.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
