//! Population data model and the population-level symbols consumed by the
//! closed-form theory.
//!
//! Mean squares use divisor `N - 1` throughout. With that convention the
//! variance of the systematic sample mean over all `k` possible samples is
//! exactly `theta * {1 + (n-1) rho_intra} * S^2`, which the Monte Carlo
//! module checks by enumeration.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit-level `(y, x)` records in file order.
///
/// Order matters: systematic sample `i` holds the units at positions
/// `i, i+k, i+2k, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    y: Vec<f64>,
    x: Vec<f64>,
    nr_stratum: Option<Vec<bool>>,
}

impl Population {
    pub fn new(y: Vec<f64>, x: Vec<f64>, nr_stratum: Option<Vec<bool>>) -> Result<Self> {
        if y.len() != x.len() {
            return Err(Error::LengthMismatch {
                row: y.len().min(x.len()) + 1,
                expected: y.len(),
                found: x.len(),
            });
        }
        if y.len() < 2 {
            return Err(Error::TooFewUnits(y.len()));
        }
        if let Some(flags) = &nr_stratum {
            if flags.len() != y.len() {
                return Err(Error::LengthMismatch {
                    row: flags.len().min(y.len()) + 1,
                    expected: y.len(),
                    found: flags.len(),
                });
            }
            let members = flags.iter().filter(|&&f| f).count();
            if members == 0 || members == flags.len() {
                return Err(Error::DegenerateStratum);
            }
        }
        Ok(Self { y, x, nr_stratum })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn nr_stratum(&self) -> Option<&[bool]> {
        self.nr_stratum.as_deref()
    }

    /// Fraction of units in the designated non-response stratum.
    pub fn stratum_fraction(&self) -> Option<f64> {
        self.nr_stratum
            .as_ref()
            .map(|f| f.iter().filter(|&&m| m).count() as f64 / f.len() as f64)
    }

    pub fn mean_y(&self) -> f64 {
        mean(&self.y)
    }

    pub fn mean_x(&self) -> f64 {
        mean(&self.x)
    }

    /// Sampling interval `k = N / n`.
    pub fn interval(&self, sample_size: usize) -> Result<usize> {
        interval(self.len(), sample_size)
    }
}

pub(crate) fn interval(population: usize, sample: usize) -> Result<usize> {
    if sample == 0 || !population.is_multiple_of(sample) {
        return Err(Error::NotDivisible { population, sample });
    }
    Ok(population / sample)
}

/// Column selector for [`load_population`]: header name or zero-based index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Name(String),
    Index(usize),
}

impl Column {
    /// Digits are read as an index, anything else as a header name.
    pub fn parse(spec: &str) -> Self {
        spec.parse::<usize>()
            .map(Column::Index)
            .unwrap_or_else(|_| Column::Name(spec.to_string()))
    }

    fn resolve(&self, headers: &csv::StringRecord) -> Result<(usize, String)> {
        match self {
            Column::Index(i) => headers
                .get(*i)
                .map(|h| (*i, h.to_string()))
                .ok_or_else(|| Error::UnknownColumn(i.to_string())),
            Column::Name(name) => headers
                .iter()
                .position(|h| h.trim() == name)
                .map(|i| (i, name.clone()))
                .ok_or_else(|| Error::UnknownColumn(name.clone())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub y: Column,
    pub x: Column,
    /// `None` skips the stratum. The default looks for a `stratum` header and
    /// ignores it when absent.
    pub stratum: Option<Column>,
    pub stratum_required: bool,
    pub delimiter: u8,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            y: Column::Name("y".into()),
            x: Column::Name("x".into()),
            stratum: Some(Column::Name("stratum".into())),
            stratum_required: false,
            delimiter: b',',
        }
    }
}

/// Read a delimiter-separated file with a header row.
///
/// Row numbers in errors are 1-based data rows (the header is not counted).
pub fn load_population(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Population> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader.headers()?.clone();
    let (y_idx, y_name) = options.y.resolve(&headers)?;
    let (x_idx, x_name) = options.x.resolve(&headers)?;
    let stratum = match &options.stratum {
        Some(col) => match col.resolve(&headers) {
            Ok(found) => Some(found),
            Err(e) if options.stratum_required => return Err(e),
            Err(_) => None,
        },
        None => None,
    };

    let mut y = Vec::new();
    let mut x = Vec::new();
    let mut flags = stratum.as_ref().map(|_| Vec::new());
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() != headers.len() {
            return Err(Error::LengthMismatch {
                row,
                expected: headers.len(),
                found: record.len(),
            });
        }
        y.push(parse_cell(&record, y_idx, &y_name, row)?);
        x.push(parse_cell(&record, x_idx, &x_name, row)?);
        if let (Some((s_idx, _)), Some(flags)) = (&stratum, flags.as_mut()) {
            let cell = &record[*s_idx];
            let flag = match cell {
                "0" | "false" | "FALSE" | "False" => false,
                "1" | "true" | "TRUE" | "True" => true,
                other => {
                    return Err(Error::BadStratumFlag {
                        row,
                        value: other.to_string(),
                    })
                }
            };
            flags.push(flag);
        }
    }
    Population::new(y, x, flags)
}

fn parse_cell(record: &csv::StringRecord, idx: usize, column: &str, row: usize) -> Result<f64> {
    let cell = &record[idx];
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            row,
            column: column.to_string(),
            value: cell.to_string(),
        })
}

/// Write a population in the format [`load_population`] reads with default
/// options.
pub fn write_population(pop: &Population, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut writer = csv::Writer::from_writer(file);
    match pop.nr_stratum() {
        Some(flags) => {
            writer.write_record(["y", "x", "stratum"])?;
            for ((y, x), f) in pop.y().iter().zip(pop.x()).zip(flags) {
                writer.write_record([y.to_string(), x.to_string(), u8::from(*f).to_string()])?;
            }
        }
        None => {
            writer.write_record(["y", "x"])?;
            for (y, x) in pop.y().iter().zip(pop.x()) {
                writer.write_record([y.to_string(), x.to_string()])?;
            }
        }
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

/// Every population-level symbol the closed forms consume.
///
/// Serialises as the flat moments-file object (`N`, `n`, `k`, `mean_y`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationMoments {
    #[serde(rename = "N")]
    pub population_size: usize,
    #[serde(rename = "n")]
    pub sample_size: usize,
    #[serde(rename = "k")]
    pub interval: usize,
    pub mean_y: f64,
    pub mean_x: f64,
    pub s2_y: f64,
    pub s2_x: f64,
    pub rho: f64,
    pub rho_y_intra: f64,
    pub rho_x_intra: f64,
    pub s2_y2: Option<f64>,
}

impl PopulationMoments {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMoments(msg));
        let n = self.sample_size;
        if n == 0 || self.population_size != n * self.interval || self.interval == 0 {
            return bad(format!(
                "N = {} must equal n * k with n = {}, k = {}",
                self.population_size, n, self.interval
            ));
        }
        let finite = [
            self.mean_y,
            self.mean_x,
            self.s2_y,
            self.s2_x,
            self.rho,
            self.rho_y_intra,
            self.rho_x_intra,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("all moments must be finite".into());
        }
        if self.s2_y <= 0.0 || self.s2_x <= 0.0 {
            return bad("s2_y and s2_x must be positive".into());
        }
        if let Some(s2) = self.s2_y2 {
            if !(s2 >= 0.0 && s2.is_finite()) {
                return bad(format!("s2_y2 must be finite and >= 0, got {s2}"));
            }
        }
        if self.rho.abs() > 1.0 {
            return bad(format!("|rho| must be <= 1, got {}", self.rho));
        }
        let lower = if n > 1 { -1.0 / (n as f64 - 1.0) } else { -1.0 };
        for (name, r) in [
            ("rho_y_intra", self.rho_y_intra),
            ("rho_x_intra", self.rho_x_intra),
        ] {
            if r < lower - 1e-12 || r > 1.0 + 1e-12 {
                return bad(format!("{name} = {r} outside [{lower}, 1]"));
            }
        }
        if self.mean_x == 0.0 {
            return bad("mean_x must be nonzero".into());
        }
        if self.mean_y == 0.0 {
            return bad("mean_y must be nonzero".into());
        }
        Ok(())
    }

    pub fn theta(&self) -> f64 {
        let big_n = self.population_size as f64;
        (big_n - 1.0) / (self.sample_size as f64 * big_n)
    }

    /// Set a field by its moments-file name.
    pub fn set(&mut self, field: &str, value: f64) -> Result<()> {
        let count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Config(format!(
                    "{field} must be a non-negative integer"
                )))
            }
        };
        match field {
            "N" => {
                self.population_size = count(value)?;
                self.interval = interval(self.population_size, self.sample_size)?;
            }
            "n" => {
                self.sample_size = count(value)?;
                self.interval = interval(self.population_size, self.sample_size)?;
            }
            "k" => self.interval = count(value)?,
            "mean_y" => self.mean_y = value,
            "mean_x" => self.mean_x = value,
            "s2_y" => self.s2_y = value,
            "s2_x" => self.s2_x = value,
            "rho" => self.rho = value,
            "rho_y_intra" => self.rho_y_intra = value,
            "rho_x_intra" => self.rho_x_intra = value,
            "s2_y2" => self.s2_y2 = Some(value),
            other => return Err(Error::Config(format!("unknown moment field {other:?}"))),
        }
        Ok(())
    }
}

/// Moments file as stored on disk: intraclass correlations and `k` may be
/// left out and supplied later.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentsFile {
    #[serde(rename = "N")]
    pub population_size: usize,
    #[serde(rename = "n")]
    pub sample_size: usize,
    #[serde(rename = "k", default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<usize>,
    pub mean_y: f64,
    pub mean_x: f64,
    pub s2_y: f64,
    pub s2_x: f64,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_y_intra: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_x_intra: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s2_y2: Option<f64>,
}

impl MomentsFile {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Resolve into full moments. Missing intraclass correlations default to
    /// 0 (no intraclass effect) unless the caller overrides them afterwards.
    pub fn into_moments(self) -> Result<PopulationMoments> {
        let interval = match self.interval {
            Some(k) => k,
            None => interval(self.population_size, self.sample_size)?,
        };
        Ok(PopulationMoments {
            population_size: self.population_size,
            sample_size: self.sample_size,
            interval,
            mean_y: self.mean_y,
            mean_x: self.mean_x,
            s2_y: self.s2_y,
            s2_x: self.s2_x,
            rho: self.rho,
            rho_y_intra: self.rho_y_intra.unwrap_or(0.0),
            rho_x_intra: self.rho_x_intra.unwrap_or(0.0),
            s2_y2: self.s2_y2,
        })
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean square with divisor `len - 1`.
pub(crate) fn mean_square(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() as f64 - 1.0)
}

fn correlation(y: &[f64], x: &[f64]) -> Result<f64> {
    let (my, mx) = (mean(y), mean(x));
    let (mut syy, mut sxx, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in y.iter().zip(x) {
        let (dy, dx) = (a - my, b - mx);
        syy += dy * dy;
        sxx += dx * dx;
        sxy += dy * dx;
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("y"));
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x"));
    }
    Ok((sxy / (syy * sxx).sqrt()).clamp(-1.0, 1.0))
}

/// Intraclass correlation within systematic samples by exact enumeration
/// over all `k` samples and all `n(n-1)` ordered within-sample pairs.
pub(crate) fn intraclass(values: &[f64], sample_size: usize, name: &'static str) -> Result<f64> {
    let k = interval(values.len(), sample_size)?;
    let m = mean(values);
    let total_sq: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    if total_sq == 0.0 {
        return Err(Error::ZeroVariance(name));
    }
    if sample_size < 2 {
        return Ok(0.0);
    }
    // sum_{j != u} d_j d_u = (sum_j d_j)^2 - sum_j d_j^2, per sample
    let mut cross = 0.0;
    for start in 0..k {
        let (mut s, mut s2) = (0.0, 0.0);
        for d in values[start..].iter().step_by(k).map(|v| v - m) {
            s += d;
            s2 += d * d;
        }
        cross += s * s - s2;
    }
    let pairs = (k * sample_size * (sample_size - 1)) as f64;
    let mean_cross = cross / pairs;
    let mean_sq = total_sq / values.len() as f64;
    Ok(mean_cross / mean_sq)
}

/// `(rho_y_intra, rho_x_intra)` for systematic samples of size `n`.
pub fn systematic_correlations(pop: &Population, sample_size: usize) -> Result<(f64, f64)> {
    Ok((
        intraclass(pop.y(), sample_size, "y")?,
        intraclass(pop.x(), sample_size, "x")?,
    ))
}

pub fn compute_moments(pop: &Population, sample_size: usize) -> Result<PopulationMoments> {
    let interval = pop.interval(sample_size)?;
    let rho = correlation(pop.y(), pop.x())?;
    let (rho_y_intra, rho_x_intra) = systematic_correlations(pop, sample_size)?;
    let s2_y2 = pop.nr_stratum().map(|flags| {
        let group: Vec<f64> = pop
            .y()
            .iter()
            .zip(flags)
            .filter_map(|(&y, &f)| f.then_some(y))
            .collect();
        if group.len() < 2 {
            0.0
        } else {
            mean_square(&group)
        }
    });
    Ok(PopulationMoments {
        population_size: pop.len(),
        sample_size,
        interval,
        mean_y: pop.mean_y(),
        mean_x: pop.mean_x(),
        s2_y: mean_square(pop.y()),
        s2_x: mean_square(pop.x()),
        rho,
        rho_y_intra,
        rho_x_intra,
        s2_y2,
    })
}

/// Symbols derived from [`PopulationMoments`].
///
/// `c0` and `c1` are the coefficients of variation inflated by the intraclass
/// factor: `c0^2 = {1+(n-1)rho_y} c_y^2`, `c1^2 = {1+(n-1)rho_x} c_x^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedCoefficients {
    pub theta: f64,
    pub c_y: f64,
    pub c_x: f64,
    pub factor_y: f64,
    pub factor_x: f64,
    pub c0: f64,
    pub c1: f64,
    /// `None` when the auxiliary intraclass factor is zero.
    pub rho_star: Option<f64>,
    pub k1: f64,
}

pub fn derive_coefficients(m: &PopulationMoments) -> Result<DerivedCoefficients> {
    m.validate()?;
    let n = m.sample_size as f64;
    let factor = |r: f64, name: &'static str| -> Result<f64> {
        let f = 1.0 + (n - 1.0) * r;
        if f < -1e-12 {
            Err(Error::NegativeIntraclassFactor(name))
        } else {
            Ok(f.max(0.0))
        }
    };
    let factor_y = factor(m.rho_y_intra, "y")?;
    let factor_x = factor(m.rho_x_intra, "x")?;
    let c_y = m.s2_y.sqrt() / m.mean_y;
    let c_x = m.s2_x.sqrt() / m.mean_x;
    Ok(DerivedCoefficients {
        theta: m.theta(),
        c_y,
        c_x,
        factor_y,
        factor_x,
        c0: factor_y.sqrt() * c_y,
        c1: factor_x.sqrt() * c_x,
        rho_star: (factor_x > 0.0).then(|| (factor_y / factor_x).sqrt()),
        k1: m.rho * c_y / c_x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn toy(y: Vec<f64>, x: Vec<f64>) -> Population {
        Population::new(y, x, None).unwrap()
    }

    fn forest() -> PopulationMoments {
        MomentsFile {
            population_size: 176,
            sample_size: 16,
            interval: None,
            mean_y: 282.6136,
            mean_x: 6.9943,
            s2_y: 24114.67,
            s2_x: 8.76,
            rho: 0.871,
            rho_y_intra: Some(0.871),
            rho_x_intra: Some(0.871),
            s2_y2: Some(18086.0025),
        }
        .into_moments()
        .unwrap()
    }

    #[test]
    fn toy_moments() {
        let pop = toy(vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 4.0, 6.0, 8.0]);
        let m = compute_moments(&pop, 2).unwrap();
        assert_eq!(m.interval, 2);
        assert_eq!(m.mean_y, 2.5);
        assert!((m.s2_y - 5.0 / 3.0).abs() < 1e-15);
        assert!((m.rho - 1.0).abs() < 1e-15);
        assert!((m.rho_y_intra + 0.6).abs() < 1e-15);
        assert_eq!(m.s2_y2, None);
    }

    #[test]
    fn perfect_intraclass() {
        let pop = toy(vec![1.0, 2.0, 1.0, 2.0], vec![1.0, 2.0, 3.0, 4.0]);
        let (ry, _) = systematic_correlations(&pop, 2).unwrap();
        assert!((ry - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stratum_mean_square() {
        let pop = Population::new(
            vec![1.0, 2.0, 3.0, 4.0],
            vec![2.0, 3.0, 5.0, 9.0],
            Some(vec![true, true, false, false]),
        )
        .unwrap();
        assert_eq!(compute_moments(&pop, 2).unwrap().s2_y2, Some(0.5));
        assert_eq!(pop.stratum_fraction(), Some(0.5));
    }

    #[test]
    fn constant_variable_is_rejected() {
        let pop = toy(vec![3.0; 4], vec![1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(
            compute_moments(&pop, 2),
            Err(Error::ZeroVariance(_))
        ));
    }

    #[test]
    fn interval_must_divide() {
        let pop = toy(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![1.0, 3.0, 2.0, 5.0, 4.0]);
        assert!(matches!(
            compute_moments(&pop, 2),
            Err(Error::NotDivisible {
                population: 5,
                sample: 2
            })
        ));
    }

    #[test]
    fn forest_coefficients() {
        let m = forest();
        assert_eq!(m.interval, 11);
        assert!((m.theta() - 175.0 / 2816.0).abs() < 1e-15);
        let d = derive_coefficients(&m).unwrap();
        assert!((d.c0 * d.c0 - 4.2466).abs() < 1e-4, "{}", d.c0 * d.c0);
        assert!((d.factor_y - 14.065).abs() < 1e-12);
        assert!((d.rho_star.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn intraclass_below_bound_is_rejected() {
        let mut m = forest();
        m.rho_y_intra = -0.2;
        assert!(matches!(
            derive_coefficients(&m),
            Err(Error::InvalidMoments(_))
        ));
        m.rho_y_intra = -1.0 / 15.0;
        assert_eq!(derive_coefficients(&m).unwrap().factor_y, 0.0);
    }

    #[test]
    fn overrides() {
        let mut m = forest();
        m.set("rho_x_intra", 0.5).unwrap();
        assert_eq!(m.rho_x_intra, 0.5);
        m.set("n", 8.0).unwrap();
        assert_eq!(m.interval, 22);
        assert!(m.set("n", 7.0).is_err());
        assert!(m.set("n", 2.5).is_err());
        assert!(m.set("bogus", 1.0).is_err());
    }

    #[test]
    fn load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pop.csv");
        let pop = Population::new(
            vec![1.5, 2.0, 3.25, 4.0],
            vec![2.0, 3.0, 5.0, 9.0],
            Some(vec![false, true, false, true]),
        )
        .unwrap();
        write_population(&pop, &path).unwrap();
        assert_eq!(
            load_population(&path, &LoadOptions::default()).unwrap(),
            pop
        );
    }

    #[test]
    fn load_errors() {
        let dir = tempfile::tempdir().unwrap();
        let write = |name: &str, text: &str| {
            let p = dir.path().join(name);
            std::fs::File::create(&p)
                .unwrap()
                .write_all(text.as_bytes())
                .unwrap();
            p
        };
        let opts = LoadOptions::default();
        let bad = write("bad.csv", "y,x\n1,2\n2,abc\n");
        assert!(matches!(
            load_population(&bad, &opts),
            Err(Error::Parse { row: 2, .. })
        ));
        let short = write("short.csv", "y,x\n1,2\n3\n");
        assert!(matches!(
            load_population(&short, &opts),
            Err(Error::LengthMismatch { row: 2, .. })
        ));
        let flags = write("flags.csv", "y,x,stratum\n1,2,yes\n3,4,0\n");
        assert!(matches!(
            load_population(&flags, &opts),
            Err(Error::BadStratumFlag { row: 1, .. })
        ));
        let words = write("words.csv", "y,x,stratum\n1,2,true\n3,4,false\n");
        let pop = load_population(&words, &opts).unwrap();
        assert_eq!(pop.nr_stratum(), Some(&[true, false][..]));
        let cols = write("cols.csv", "a,b\n1,2\n3,4\n");
        assert!(matches!(
            load_population(&cols, &opts),
            Err(Error::UnknownColumn(_))
        ));
        let by_index = LoadOptions {
            y: Column::parse("1"),
            x: Column::parse("0"),
            ..LoadOptions::default()
        };
        let pop = load_population(&cols, &by_index).unwrap();
        assert_eq!(pop.y(), &[2.0, 4.0]);
        assert!(matches!(
            load_population(dir.path().join("none.csv"), &opts),
            Err(Error::MissingFile(_))
        ));
    }
}
