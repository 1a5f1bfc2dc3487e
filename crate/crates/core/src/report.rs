//! Output documents and their JSON, CSV and markdown renderings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{EstimatorSpec, Family};
use crate::mc::{Comparison, EmpiricalReport};
use crate::moments::{DerivedCoefficients, PopulationMoments};
use crate::theory::{DiscrepancyReport, PreTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// Optimum of one family at the analysed `(K, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumEntry {
    pub family: Family,
    pub spec: EstimatorSpec,
    pub mse: f64,
    pub pre: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub source: String,
    pub moments: PopulationMoments,
    pub coefficients: DerivedCoefficients,
    pub k_rate: f64,
    pub l_factor: f64,
    pub optima: Vec<OptimumEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    Analysis(Analysis),
    PreTable {
        table: PreTable,
        discrepancy: DiscrepancyReport,
    },
    Simulation {
        report: EmpiricalReport,
        comparison: Comparison,
    },
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Analysis(_) => "analysis",
            Document::PreTable { .. } => "pre_table",
            Document::Simulation { .. } => "simulation",
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Markdown => Ok(self.to_markdown()),
        }
    }

    pub fn to_markdown(&self) -> String {
        match self {
            Document::Analysis(a) => analysis_markdown(a),
            Document::PreTable { table, discrepancy } => {
                let mut s = pre_table_markdown(table);
                s.push('\n');
                s.push_str(&discrepancy_markdown(discrepancy));
                s
            }
            Document::Simulation { report, comparison } => simulation_markdown(report, comparison),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self {
            Document::Analysis(a) => {
                w.write_record(["field", "value"])?;
                for (name, v) in moment_rows(&a.moments)
                    .into_iter()
                    .chain(coefficient_rows(&a.coefficients))
                {
                    w.write_record([name.to_string(), v])?;
                }
                w.write_record(["K".to_string(), a.k_rate.to_string()])?;
                w.write_record(["L".to_string(), a.l_factor.to_string()])?;
                for o in &a.optima {
                    w.write_record([format!("mse_{}", o.family), sig6(o.mse)])?;
                    w.write_record([format!("pre_{}", o.family), format!("{:.4}", o.pre)])?;
                }
            }
            Document::PreTable { table, discrepancy } => {
                w.write_record([
                    "K",
                    "L",
                    "estimator",
                    "pre",
                    "mse",
                    "oracle_pre",
                    "reference",
                    "status",
                ])?;
                for row in &table.rows {
                    for cell in &row.cells {
                        let cmp = discrepancy.column(cell.family).and_then(|c| {
                            c.cells
                                .iter()
                                .find(|x| x.k_rate == row.k_rate && x.l_factor == row.l_factor)
                        });
                        w.write_record([
                            row.k_rate.to_string(),
                            row.l_factor.to_string(),
                            cell.family.to_string(),
                            format!("{:.4}", cell.pre),
                            sig6(cell.mse),
                            format!("{:.4}", cell.oracle_pre),
                            cmp.and_then(|c| c.reference)
                                .map_or(String::new(), |r| format!("{r:.4}")),
                            cmp.map_or("", |c| c.status.label()).to_string(),
                        ])?;
                    }
                }
            }
            Document::Simulation { report, comparison } => {
                w.write_record([
                    "estimator",
                    "empirical_bias",
                    "empirical_mse",
                    "monte_carlo_se",
                    "theoretical_mse",
                    "ratio",
                    "z_score",
                    "pass",
                ])?;
                for (r, c) in report.rows.iter().zip(&comparison.rows) {
                    w.write_record([
                        label(&r.estimator),
                        sig6(r.empirical_bias),
                        sig6(r.empirical_mse),
                        sig6(r.monte_carlo_se),
                        sig6(r.theoretical_mse),
                        format!("{:.4}", r.ratio),
                        format!("{:.3}", c.z_score),
                        c.pass.to_string(),
                    ])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Six significant digits.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    if (-4..=9).contains(&magnitude) {
        let decimals = (5 - magnitude).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}

fn label(spec: &EstimatorSpec) -> String {
    let constants = spec.constants();
    if constants.is_empty() {
        return spec.name().to_string();
    }
    let inner: Vec<String> = constants
        .iter()
        .map(|(n, v)| format!("{n}={}", sig6(*v)))
        .collect();
    format!("{}({})", spec.name(), inner.join(", "))
}

fn moment_rows(m: &PopulationMoments) -> Vec<(&'static str, String)> {
    vec![
        ("N", m.population_size.to_string()),
        ("n", m.sample_size.to_string()),
        ("k", m.interval.to_string()),
        ("mean_y", m.mean_y.to_string()),
        ("mean_x", m.mean_x.to_string()),
        ("s2_y", m.s2_y.to_string()),
        ("s2_x", m.s2_x.to_string()),
        ("rho", m.rho.to_string()),
        ("rho_y_intra", m.rho_y_intra.to_string()),
        ("rho_x_intra", m.rho_x_intra.to_string()),
        ("s2_y2", m.s2_y2.map_or("absent".into(), |v| v.to_string())),
    ]
}

fn coefficient_rows(d: &DerivedCoefficients) -> Vec<(&'static str, String)> {
    vec![
        ("theta", d.theta.to_string()),
        ("c_y", d.c_y.to_string()),
        ("c_x", d.c_x.to_string()),
        ("factor_y", d.factor_y.to_string()),
        ("factor_x", d.factor_x.to_string()),
        ("c0", d.c0.to_string()),
        ("c1", d.c1.to_string()),
        (
            "rho_star",
            d.rho_star.map_or("undefined".into(), |v| v.to_string()),
        ),
        ("k1", d.k1.to_string()),
    ]
}

fn analysis_markdown(a: &Analysis) -> String {
    let mut s = format!("# Population analysis\n\nSource: `{}`\n\n", a.source);
    s.push_str("| quantity | value |\n|---|---|\n");
    for (name, v) in moment_rows(&a.moments)
        .into_iter()
        .chain(coefficient_rows(&a.coefficients))
    {
        let _ = writeln!(s, "| {name} | {v} |");
    }
    if !a.optima.is_empty() {
        let _ = write!(
            s,
            "\n## Optimum estimators at K = {}, L = {}\n\n| estimator | MSE | PRE |\n|---|---|---|\n",
            a.k_rate, a.l_factor
        );
        for o in &a.optima {
            let _ = writeln!(s, "| {} | {} | {:.4} |", label(&o.spec), sig6(o.mse), o.pre);
        }
    }
    s
}

fn pre_table_markdown(t: &PreTable) -> String {
    let mut s = String::from("# Percent relative efficiency\n\n| K | L |");
    let families: Vec<Family> = t
        .rows
        .first()
        .map(|r| r.cells.iter().map(|c| c.family).collect())
        .unwrap_or_default();
    for f in &families {
        let _ = write!(s, " {f} |");
    }
    s.push_str("\n|---|---|");
    s.push_str(&"---:|".repeat(families.len()));
    s.push('\n');
    for row in &t.rows {
        let _ = write!(s, "| {} | {} |", row.k_rate, row.l_factor);
        for c in &row.cells {
            let _ = write!(s, " {:.4} |", c.pre);
        }
        s.push('\n');
    }
    s
}

fn discrepancy_markdown(d: &DiscrepancyReport) -> String {
    let mut s = String::from("## Comparison with the reference table\n\n");
    s.push_str("| estimator | status | constants | note |\n|---|---|---|---|\n");
    for c in &d.columns {
        let constants: Vec<String> = c
            .constants
            .iter()
            .map(|(n, v)| format!("{n}={}", sig6(*v)))
            .collect();
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} |",
            c.family,
            c.status.label(),
            constants.join(", "),
            c.note
        );
    }
    let flagged: Vec<_> = d
        .columns
        .iter()
        .flat_map(|c| c.cells.iter().map(move |cell| (c.family, cell)))
        .filter(|(_, cell)| cell.reference.is_some() && cell.status.label() != "PASS")
        .collect();
    if !flagged.is_empty() {
        s.push_str("\n| estimator | K | L | computed | reference | relative gap | status |\n");
        s.push_str("|---|---|---|---:|---:|---:|---|\n");
        for (f, c) in flagged {
            let _ = writeln!(
                s,
                "| {f} | {} | {} | {:.4} | {:.4} | {:+.4}% | {} |",
                c.k_rate,
                c.l_factor,
                c.computed,
                c.reference.unwrap_or(f64::NAN),
                100.0 * c.relative_gap.unwrap_or(f64::NAN),
                c.status.label()
            );
        }
    }
    s.push('\n');
    if let Some(g) = d.t1_vs_t3_max_relative_gap {
        let _ = writeln!(
            s,
            "Largest relative gap between the t1 and t3 optima: {g:.3e}  "
        );
    }
    let _ = writeln!(
        s,
        "Largest relative gap between closed-form and numeric optima: {:.3e}",
        d.oracle_max_relative_gap
    );
    s
}

fn simulation_markdown(r: &EmpiricalReport, c: &Comparison) -> String {
    let mut s = format!(
        "# Monte Carlo comparison\n\n{} replications, K = {}, L = {}, seed {}, mechanism {}, \
         mean non-respondents {:.3}, mean realised L {:.4}\n\n",
        r.config.replications,
        r.config.k_rate,
        r.config.l_factor,
        r.config.base_seed,
        r.config.mechanism,
        r.mean_nonrespondents,
        r.mean_realized_l,
    );
    s.push_str(
        "| estimator | bias | MSE | MC s.e. | theoretical MSE | ratio | z | pass |\n\
         |---|---:|---:|---:|---:|---:|---:|---|\n",
    );
    for (row, cmp) in r.rows.iter().zip(&c.rows) {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {:.4} | {:.3} | {} |",
            label(&row.estimator),
            sig6(row.empirical_bias),
            sig6(row.empirical_mse),
            sig6(row.monte_carlo_se),
            sig6(row.theoretical_mse),
            row.ratio,
            cmp.z_score,
            if cmp.pass { "PASS" } else { "FAIL" }
        );
    }
    s
}

/// Every `*.json` document under `dir`, sorted by file name.
pub fn collect_documents(dir: impl AsRef<Path>) -> Result<Vec<(String, Document)>> {
    let dir = dir.as_ref();
    if !dir.is_dir() {
        return Err(Error::MissingFile(dir.to_path_buf()));
    }
    let io = |source| Error::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).map_err(|source| Error::Io {
                path: p.clone(),
                source,
            })?;
            let name = p
                .file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            let doc = serde_json::from_str(&text).map_err(|source| Error::JsonFile {
                path: p.clone(),
                source,
            })?;
            Ok((name, doc))
        })
        .collect()
}

/// One document combining everything found in `dir`.
pub fn consolidate(dir: impl AsRef<Path>, format: Format) -> Result<String> {
    let docs = collect_documents(dir)?;
    if docs.is_empty() {
        return Err(Error::Config("no JSON documents found".into()));
    }
    match format {
        Format::Json => {
            let entries: Vec<serde_json::Value> = docs
                .iter()
                .map(|(name, d)| Ok(serde_json::json!({ "file": name, "document": d })))
                .collect::<Result<_>>()?;
            let mut s = serde_json::to_string_pretty(&serde_json::json!({
                "kind": "collection",
                "documents": entries,
            }))?;
            s.push('\n');
            Ok(s)
        }
        Format::Markdown => {
            let mut s = String::from("# Results\n");
            for (name, d) in &docs {
                let _ = write!(s, "\n---\n\nFrom `{name}` ({})\n\n", d.kind());
                s.push_str(&d.to_markdown());
            }
            Ok(s)
        }
        Format::Csv => {
            let mut s = String::new();
            for (i, (name, d)) in docs.iter().enumerate() {
                if i > 0 {
                    s.push('\n');
                }
                let _ = writeln!(s, "file,{name}");
                s.push_str(&d.to_csv()?);
            }
            Ok(s)
        }
    }
}
