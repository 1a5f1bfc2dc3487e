//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::design::Mechanism;
use crate::error::{Error, Result};
use crate::estimate::{EstimatorSpec, Family, SlopeSource};
use crate::mc::{
    compare_theory_empirical, run_replications, synthesize_population, theory_moments,
    SimulationConfig, StartSelection, SynthesisParams,
};
use crate::moments::{
    compute_moments, derive_coefficients, load_population, write_population, Column, LoadOptions,
    MomentsFile, Population, PopulationMoments,
};
use crate::report::{consolidate, Analysis, Document, Format, OptimumEntry};
use crate::theory::{
    discrepancy_report, mse_first_order, optimum_constants, optimum_report, pre, pre_table,
    DiscrepancyTolerances, ReferenceTable, Setting, ShrinkagePolicy,
};

#[derive(Debug, Parser)]
#[command(
    name = "syssamp",
    version,
    about = "Mean estimation under systematic sampling with non-response sub-sampling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moments and derived coefficients of a population or moments file.
    Analyze(AnalyzeArgs),
    /// Percent relative efficiency over a (K, L) grid.
    PreTable(PreTableArgs),
    /// Monte Carlo check of the first-order MSE formulas.
    Simulate(SimulateArgs),
    /// Generate a synthetic population.
    Gen(GenArgs),
    /// Combine JSON outputs from a directory into one document.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Markdown,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Markdown => Format::Markdown,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Population file (delimited text with a header row).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long = "y-col", default_value = "y")]
    pub y_col: String,
    #[arg(long = "x-col", default_value = "x")]
    pub x_col: String,
    /// Non-response stratum column (0/1 or true/false).
    #[arg(long = "stratum-col")]
    pub stratum_col: Option<String>,
    #[arg(long, default_value = ",")]
    pub delimiter: char,
}

impl DataArgs {
    fn load(&self) -> Result<Option<Population>> {
        let Some(path) = &self.data else {
            return Ok(None);
        };
        if !self.delimiter.is_ascii() {
            return Err(Error::Config(
                "delimiter must be a single ASCII character".into(),
            ));
        }
        let options = LoadOptions {
            y: Column::parse(&self.y_col),
            x: Column::parse(&self.x_col),
            stratum: Some(Column::parse(
                self.stratum_col.as_deref().unwrap_or("stratum"),
            )),
            stratum_required: self.stratum_col.is_some(),
            delimiter: self.delimiter as u8,
        };
        load_population(path, &options).map(Some)
    }
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    /// Flat JSON moments file.
    #[arg(long)]
    pub moments: Option<PathBuf>,
    /// Sets both intraclass correlations.
    #[arg(long = "rho-intra")]
    pub rho_intra: Option<f64>,
    #[arg(long = "rho-y-intra")]
    pub rho_y_intra: Option<f64>,
    #[arg(long = "rho-x-intra")]
    pub rho_x_intra: Option<f64>,
    /// Override any moment field, e.g. `--set s2_y2=18000`.
    #[arg(long = "set", value_name = "FIELD=VALUE")]
    pub overrides: Vec<String>,
}

impl MomentArgs {
    fn apply(&self, m: &mut PopulationMoments) -> Result<()> {
        if let Some(v) = self.rho_intra {
            m.rho_y_intra = v;
            m.rho_x_intra = v;
        }
        if let Some(v) = self.rho_y_intra {
            m.rho_y_intra = v;
        }
        if let Some(v) = self.rho_x_intra {
            m.rho_x_intra = v;
        }
        for item in &self.overrides {
            let (field, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override {item:?} is not FIELD=VALUE")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("override {item:?} has a non-numeric value")))?;
            m.set(field.trim(), value)?;
        }
        m.validate()
    }
}

/// Moments from a data file or a moments file, with overrides applied.
fn resolve_moments(
    data: &DataArgs,
    moments: &MomentArgs,
    n: Option<usize>,
) -> Result<(String, PopulationMoments)> {
    let (source, mut m) = match (data.load()?, &moments.moments) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "give either --data or --moments, not both".into(),
            ));
        }
        (Some(pop), None) => {
            let n = n.ok_or_else(|| Error::Config("--n is required with --data".into()))?;
            let path = data.data.as_ref().expect("loaded");
            (path.display().to_string(), compute_moments(&pop, n)?)
        }
        (None, Some(path)) => {
            let mut m = MomentsFile::read(path)?.into_moments()?;
            if let Some(n) = n {
                m.set("n", n as f64)?;
            }
            (path.display().to_string(), m)
        }
        (None, None) => return Err(Error::Config("give --data or --moments".into())),
    };
    moments.apply(&mut m)?;
    Ok((source, m))
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Base alpha of t4.
    #[arg(long = "t4-alpha", default_value_t = 0.0)]
    pub t4_alpha: f64,
    /// Base (a,b,p) of t5; defaults to A = 0 with D matched to rho c0/c1.
    #[arg(long = "t5-abp", value_name = "A,B,P")]
    pub t5_abp: Option<String>,
    /// Base w of t6; defaults to rho c0/c1.
    #[arg(long = "t6-w")]
    pub t6_w: Option<f64>,
}

impl PolicyArgs {
    fn policy(&self) -> Result<ShrinkagePolicy> {
        let t5_abp = match &self.t5_abp {
            None => None,
            Some(text) => {
                let v = parse_list(text)?;
                match v[..] {
                    [a, b, p] => Some((a, b, p)),
                    _ => return Err(Error::Config("--t5-abp needs three numbers".into())),
                }
            }
        };
        Ok(ShrinkagePolicy {
            t4_alpha: Some(self.t4_alpha),
            t5_abp,
            t6_w: self.t6_w,
        })
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub moments: MomentArgs,
    /// Sample size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Non-response rate for the optimum listing.
    #[arg(long = "K", default_value_t = 0.0)]
    pub k_rate: f64,
    /// Sub-sampling factor for the optimum listing.
    #[arg(long = "L", default_value_t = 1.0)]
    pub l_factor: f64,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PreTableArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub moments: MomentArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "k-grid", default_value = "0.1,0.2,0.3,0.4")]
    pub k_grid: String,
    #[arg(long = "l-grid", default_value = "2,2.5,3,3.5")]
    pub l_grid: String,
    /// Comma-separated families; `t1..t6` and `all` are accepted.
    #[arg(long, default_value = "t1..t6")]
    pub estimators: String,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MechanismArg {
    /// Stratum when its fraction equals K, Bernoulli otherwise.
    Auto,
    Stratum,
    Bernoulli,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StartArg {
    Exhaustive,
    Uniform,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 50_000)]
    pub reps: usize,
    /// Non-response rate; defaults to the stratum fraction, or 0 without one.
    #[arg(long = "K")]
    pub k_rate: Option<f64>,
    #[arg(long = "L", default_value_t = 2.0)]
    pub l_factor: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "auto")]
    pub mechanism: MechanismArg,
    #[arg(long = "start-selection", value_enum, default_value = "exhaustive")]
    pub start_selection: StartArg,
    /// Regression slope: `population`, `sample`, or a number.
    #[arg(long, default_value = "population")]
    pub slope: String,
    /// Families evaluated at their optimum constants.
    #[arg(long, default_value = "all")]
    pub estimators: String,
    /// Extra estimator with explicit constants, as JSON, e.g. `{"kind":"t3","w":10}`.
    #[arg(long = "spec", value_name = "JSON")]
    pub specs: Vec<String>,
    /// Per-replication trace file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long = "N")]
    pub population_size: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub rho: f64,
    /// Smooth trend across systematic samples.
    #[arg(long)]
    pub sorted: bool,
    /// Intraclass correlation target used with --sorted.
    #[arg(long, default_value_t = 0.6)]
    pub intra: f64,
    #[arg(long = "nr-frac", default_value_t = 0.25)]
    pub nr_frac: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long = "mean-x", default_value_t = 100.0)]
    pub mean_x: f64,
    #[arg(long = "mean-y", default_value_t = 280.0)]
    pub mean_y: f64,
    #[arg(long = "cv-x", default_value_t = 0.1)]
    pub cv_x: f64,
    #[arg(long = "cv-y", default_value_t = 0.1)]
    pub cv_y: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory of JSON outputs.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("{s:?} is not a number")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.is_empty() {
        return Err(Error::Config(format!("empty list {text:?}")));
    }
    Ok(values)
}

fn emit(output: &OutputArgs, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn analyze(args: &AnalyzeArgs) -> Result<Document> {
    let (source, m) = resolve_moments(&args.data, &args.moments, args.n)?;
    let coefficients = derive_coefficients(&m)?;
    let s = Setting::new(&m, args.k_rate, args.l_factor)?;
    let policy = args.policy.policy()?;
    let optima = Family::ALL
        .into_iter()
        .map(|family| {
            let report = optimum_report(family, &s, &policy)?;
            Ok(OptimumEntry {
                family,
                spec: report.estimator,
                mse: report.mse,
                pre: pre(&s, &report)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Document::Analysis(Analysis {
        source,
        moments: m,
        coefficients,
        k_rate: args.k_rate,
        l_factor: args.l_factor,
        optima,
    }))
}

fn pre_table_doc(args: &PreTableArgs) -> Result<Document> {
    let (_, m) = resolve_moments(&args.data, &args.moments, args.n)?;
    let k_grid = parse_list(&args.k_grid)?;
    let l_grid = parse_list(&args.l_grid)?;
    let families = Family::parse_list(&args.estimators)?;
    let table = pre_table(&m, &families, &k_grid, &l_grid, &args.policy.policy()?)?;
    let discrepancy = discrepancy_report(
        &table,
        &ReferenceTable::forest_strips(),
        &DiscrepancyTolerances::default(),
    );
    Ok(Document::PreTable { table, discrepancy })
}

fn slope_source(text: &str) -> Result<SlopeSource> {
    match text {
        "population" => Ok(SlopeSource::Population),
        "sample" => Ok(SlopeSource::Sample),
        other => other
            .parse()
            .map(|b| SlopeSource::Fixed { b })
            .map_err(|_| {
                Error::Config(format!(
                    "slope {other:?} is not population, sample or a number"
                ))
            }),
    }
}

fn simulate(args: &SimulateArgs) -> Result<Document> {
    let pop = args
        .data
        .load()?
        .ok_or_else(|| Error::Config("--data is required".into()))?;
    let fraction = pop.stratum_fraction();
    let k_rate = args.k_rate.or(fraction).unwrap_or(0.0);
    let mechanism = match args.mechanism {
        MechanismArg::Stratum => Mechanism::Stratum,
        MechanismArg::Bernoulli => Mechanism::Bernoulli { rate: k_rate },
        MechanismArg::Auto => match fraction {
            Some(f) if (f - k_rate).abs() <= 1e-9 => Mechanism::Stratum,
            _ => Mechanism::Bernoulli { rate: k_rate },
        },
    };
    let mut cfg = SimulationConfig {
        sample_size: args.n,
        replications: args.reps,
        base_seed: args.seed,
        mechanism,
        k_rate,
        l_factor: args.l_factor,
        estimators: Vec::new(),
        start_selection: match args.start_selection {
            StartArg::Exhaustive => StartSelection::ExhaustiveCycle,
            StartArg::Uniform => StartSelection::UniformRandom,
        },
        trace: args.trace.is_some(),
    };
    let m = theory_moments(&pop, &cfg)?;
    let s = Setting::new(&m, k_rate, args.l_factor)?;
    let policy = args.policy.policy()?;
    let slope = slope_source(&args.slope)?;
    for family in Family::parse_list(&args.estimators)? {
        let spec = match optimum_constants(family, &s, &policy)? {
            EstimatorSpec::Regression { .. } => EstimatorSpec::Regression { slope },
            other => other,
        };
        cfg.estimators.push(spec);
    }
    for text in &args.specs {
        let spec: EstimatorSpec = serde_json::from_str(text)?;
        spec.validate()?;
        cfg.estimators.push(spec);
    }

    let report = run_replications(&pop, &cfg)?;
    let theory = report
        .rows
        .iter()
        .map(|r| mse_first_order(&r.estimator, &s))
        .collect::<Result<Vec<_>>>()?;
    let comparison = compare_theory_empirical(&report, &theory)?;

    let mut report = report;
    if let (Some(path), Some(trace)) = (&args.trace, report.trace.take()) {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "replication".to_string(),
            "start".into(),
            "n2".into(),
            "h2".into(),
            "l_factor".into(),
        ];
        header.extend(report.rows.iter().map(|r| r.name.clone()));
        w.write_record(&header)?;
        for t in trace {
            let mut record = vec![
                t.replication.to_string(),
                t.start.to_string(),
                t.n2.to_string(),
                t.h2.to_string(),
                t.l_factor.to_string(),
            ];
            record.extend(
                t.estimates
                    .iter()
                    .map(|v| v.map_or(String::new(), |v| v.to_string())),
            );
            w.write_record(&record)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        write_file(path, &String::from_utf8(bytes).expect("utf-8"))?;
    }
    Ok(Document::Simulation { report, comparison })
}

fn generate(args: &GenArgs) -> Result<String> {
    let params = SynthesisParams {
        population_size: args.population_size,
        sample_size: args.n,
        target_rho: args.rho,
        target_intra: args.intra,
        sorted: args.sorted,
        nr_fraction: args.nr_frac,
        seed: args.seed,
        mean_x: args.mean_x,
        mean_y: args.mean_y,
        cv_x: args.cv_x,
        cv_y: args.cv_y,
    };
    let pop = synthesize_population(&params)?;
    write_population(&pop, &args.out)?;
    let m = compute_moments(&pop, args.n)?;
    Ok(format!(
        "wrote {} units to {}: rho {:.4}, intraclass y {:.4}, x {:.4}\n",
        pop.len(),
        args.out.display(),
        m.rho,
        m.rho_y_intra,
        m.rho_x_intra
    ))
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Analyze(a) => emit(&a.output, &analyze(a)?.render(a.output.format.into())?),
        Command::PreTable(a) => emit(
            &a.output,
            &pre_table_doc(a)?.render(a.output.format.into())?,
        ),
        Command::Simulate(a) => emit(&a.output, &simulate(a)?.render(a.output.format.into())?),
        Command::Gen(a) => {
            eprint!("{}", generate(a)?);
            Ok(())
        }
        Command::Report(a) => emit(&a.output, &consolidate(&a.input, a.output.format.into())?),
    }
}

/// Cap the global thread pool at `SYSSAMP_THREADS` when set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("SYSSAMP_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Parse `argv` and run; returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
