//! Command-line driver. Each subcommand maps onto one library operation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::adders::{qma_ledger, resources, Adder, AdderSpec, ResourceReport};
use crate::attacks::{conformance_report_with, AttackKind, Realization};
use crate::bench::{
    calibrate_to_reference, output_probability, run_suite, write_report, AttackChoice, ConfigFile,
    ExperimentConfig, ReportFormat,
};
use crate::error::{Error, Result};
use crate::tenancy::TenancyModel;

pub const WORKERS_ENV: &str = "QTSIM_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "qtsim",
    version,
    about = "Crosstalk attack simulation for trapped-ion quantum adders"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TenancyArg {
    Grey,
    Black,
    None,
}

impl From<TenancyArg> for TenancyModel {
    fn from(t: TenancyArg) -> Self {
        match t {
            TenancyArg::Grey => TenancyModel::Grey,
            TenancyArg::Black => TenancyModel::Black,
            TenancyArg::None => TenancyModel::None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AttackArg {
    None,
    Existing,
    AltCnot,
    Sac,
    Apc,
}

impl From<AttackArg> for AttackChoice {
    fn from(a: AttackArg) -> Self {
        match a {
            AttackArg::None => AttackChoice::None,
            AttackArg::Existing => AttackChoice::Existing,
            AttackArg::AltCnot => AttackChoice::AltCnot,
            AttackArg::Sac => AttackChoice::Sac,
            AttackArg::Apc => AttackChoice::Apc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Existing,
    AltCnot,
    Sac,
    Apc,
}

impl From<KindArg> for AttackKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Existing => AttackKind::Existing,
            KindArg::AltCnot => AttackKind::AltCnot,
            KindArg::Sac => AttackKind::Sac,
            KindArg::Apc => AttackKind::Apc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RealizationArg {
    Literal,
    Synthesized,
}

impl From<RealizationArg> for Realization {
    fn from(r: RealizationArg) -> Self {
        match r {
            RealizationArg::Literal => Realization::Literal,
            RealizationArg::Synthesized => Realization::Synthesized,
        }
    }
}

/// Flags accepted by every subcommand. Flags override config file values.
#[derive(Debug, Default, Args)]
pub struct Shared {
    /// JSON config with device, noise, experiment and tenancy sections
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed for all randomness
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
    /// Trajectories per input case
    #[arg(long, global = true, value_name = "INT")]
    pub shots: Option<usize>,
    /// Directory for output files (default: print to stdout)
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Attacker knowledge model
    #[arg(long, global = true, value_enum)]
    pub tenancy: Option<TenancyArg>,
    /// Single-qubit depolarizing probability
    #[arg(long, global = true, value_name = "P")]
    pub p1: Option<f64>,
    /// Two-qubit depolarizing probability
    #[arg(long, global = true, value_name = "P")]
    pub p2: Option<f64>,
    /// Readout flip probability
    #[arg(long = "p-meas", global = true, value_name = "P")]
    pub p_meas: Option<f64>,
    /// Crosstalk Pauli probability on spectators
    #[arg(long = "ct-strength", global = true, value_name = "P")]
    pub ct_strength: Option<f64>,
    /// Coherent crosstalk ZZ angle in radians
    #[arg(long = "ct-coherent-angle", global = true, value_name = "RAD")]
    pub ct_coherent_angle: Option<f64>,
    /// Crosstalk attenuation per unit of chain distance
    #[arg(long = "ct-decay", global = true, value_name = "F")]
    pub ct_decay: Option<f64>,
    /// Toffoli error multiplier over two-qubit gates
    #[arg(long = "toffoli-factor", global = true, value_name = "F")]
    pub toffoli_factor: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure one adder's output probability under one attack
    Simulate {
        /// Adder selector: qfa:<bits> or qma:<modulus>[:<family>]
        #[arg(long, value_name = "SEL")]
        adder: String,
        #[arg(long, value_enum, default_value = "none")]
        attack: AttackArg,
    },
    /// Compare attack circuits layer by layer with their closed-form states
    AttackConformance {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Number of layers to check
        #[arg(long = "max-n", default_value_t = 32)]
        max_n: usize,
        /// Initial target bit
        #[arg(long, default_value_t = 0)]
        x: u8,
        #[arg(long, value_enum, default_value = "literal")]
        realization: RealizationArg,
    },
    /// Gate counts and depths of adders
    Resources {
        /// Adder selectors; defaults to every published adder
        #[arg(long, value_name = "SEL")]
        adder: Vec<String>,
        /// Print the modulo-adder conformance ledger instead
        #[arg(long)]
        ledger: bool,
    },
    /// Fit noise parameters to the published full-adder probabilities
    Calibrate {
        /// Trajectories per input case for each evaluation
        #[arg(long, default_value_t = 300)]
        budget: usize,
    },
    /// Run the full experiment grid and write a report
    RunSuite,
}

impl Shared {
    /// Config file (or defaults) with flag overrides applied.
    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let mut c = ExperimentConfig::from(file);
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(s) = self.shots {
            c.shots = s;
        }
        if let Some(t) = self.tenancy {
            c.tenancy = t.into();
        }
        let n = &mut c.noise;
        let overrides = [
            (&mut n.p1, self.p1),
            (&mut n.p2, self.p2),
            (&mut n.p_meas, self.p_meas),
            (&mut n.ct_strength, self.ct_strength),
            (&mut n.ct_coherent_angle, self.ct_coherent_angle),
            (&mut n.ct_decay, self.ct_decay),
            (&mut n.toffoli_factor, self.toffoli_factor),
        ];
        for (slot, value) in overrides {
            if let Some(v) = value {
                *slot = v;
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn format(&self, default: ReportFormat) -> ReportFormat {
        self.format.map_or(default, Into::into)
    }
}

fn emit(out: Option<&Path>, file_name: &str, body: &str) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let path = dir.join(file_name);
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            println!("{}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn resources_csv(rows: &[ResourceReport]) -> String {
    let mut s = format!("{}\n", ResourceReport::CSV_HEADER);
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

const DEFAULT_ADDERS: [&str; 11] = [
    "qfa:6",
    "qfa:7",
    "qfa:8",
    "qfa:9",
    "qma:3:2^n-1",
    "qma:3:2^n+1",
    "qma:4",
    "qma:5",
    "qma:7",
    "qma:8",
    "qma:9",
];

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    let shared = &cli.shared;
    let out = shared.out.as_deref();
    match &cli.command {
        Command::Simulate { adder, attack } => {
            let config = shared.experiment()?;
            let spec: AdderSpec = adder.parse()?;
            let m = output_probability(&spec, (*attack).into(), &config)?;
            let body = match shared.format(ReportFormat::Json) {
                ReportFormat::Json => json(&m)?,
                ReportFormat::Csv => {
                    let mut s =
                        String::from("adder,attack,a,b,expected,shots,correct,probability\n");
                    for c in &m.cases {
                        s.push_str(&format!(
                            "{},{},{},{},{},{},{},{}\n",
                            m.adder,
                            m.attack,
                            c.a,
                            c.b,
                            c.expected,
                            c.shots,
                            c.correct,
                            c.probability
                        ));
                    }
                    s.push_str(&format!(
                        "{},{},,,,{},,{}\n",
                        m.adder, m.attack, m.trajectories, m.mean
                    ));
                    s
                }
            };
            let ext = shared.format(ReportFormat::Json).extension();
            emit(
                out,
                &format!(
                    "simulate-{}-{}-seed{}.{ext}",
                    spec.label().replace(['^', ':'], "_"),
                    m.attack,
                    config.seed
                ),
                &body,
            )
        }
        Command::AttackConformance {
            kind,
            max_n,
            x,
            realization,
        } => {
            let kind: AttackKind = (*kind).into();
            let report = conformance_report_with(kind, *max_n, *x, (*realization).into())?;
            emit(
                out,
                &format!("conformance-{kind}-x{x}.json"),
                &json(&report)?,
            )
        }
        Command::Resources { adder, ledger } => {
            if *ledger {
                return emit(out, "qma-ledger.json", &json(&qma_ledger()?)?);
            }
            let selectors: Vec<&str> = if adder.is_empty() {
                DEFAULT_ADDERS.to_vec()
            } else {
                adder.iter().map(String::as_str).collect()
            };
            let rows = selectors
                .iter()
                .map(|s| Ok(resources(&Adder::build(s.parse()?)?.circuit)))
                .collect::<Result<Vec<_>>>()?;
            let format = shared.format(ReportFormat::Csv);
            let body = match format {
                ReportFormat::Csv => resources_csv(&rows),
                ReportFormat::Json => json(&rows)?,
            };
            emit(out, &format!("resources.{}", format.extension()), &body)
        }
        Command::Calibrate { budget } => {
            let config = shared.experiment()?;
            let cal = calibrate_to_reference(&config, *budget)?;
            let body = json(&ConfigFile::from(&cal.config))?;
            if let Some(dir) = out {
                let stages = json(&cal.stages)?;
                emit(
                    Some(dir),
                    &format!("calibration-stages-seed{}.json", config.seed),
                    &stages,
                )?;
            }
            emit(out, &format!("calibrated-seed{}.json", config.seed), &body)
        }
        Command::RunSuite => {
            let config = shared.experiment()?;
            let report = run_suite(&config)?;
            let dir = out.unwrap_or(Path::new("."));
            let path = write_report(&report, dir, shared.format(ReportFormat::Csv))?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn configure_workers() -> Result<()> {
    let Ok(value) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            Error::param(format!(
                "{WORKERS_ENV} must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::param(format!("cannot size worker pool: {e}")))
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 on success, 1 on validation errors, 2 on runtime errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = configure_workers().and_then(|_| run(&cli));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}
