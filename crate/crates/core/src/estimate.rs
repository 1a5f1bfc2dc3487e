//! Point estimators of the population mean from one realised sample.
//!
//! Every estimator consumes the Hansen-Hurwitz mean `y**` of the study
//! variable and the plain sample mean `x*` of the auxiliary variable, which is
//! observed for all sampled units.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::design::{NonResponseOutcome, SystematicSample};
use crate::error::{Error, Result};
use crate::moments::Population;

/// Where the regression estimator gets its slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum SlopeSource {
    /// `S_xy / S_x^2` over the whole population.
    #[default]
    Population,
    /// Least-squares slope over the measured units (respondents plus the
    /// followed-up sub-sample).
    Sample,
    Fixed {
        b: f64,
    },
}

/// Estimator family plus its free constants.
///
/// In the shrinkage families `k_base` multiplies the base estimator and
/// `k_diff` multiplies `X - x*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorSpec {
    HhMean,
    Ratio,
    Product,
    Regression {
        slope: SlopeSource,
    },
    T1 {
        alpha: f64,
    },
    T2 {
        a: f64,
        b: f64,
        p: f64,
    },
    T3 {
        w: f64,
    },
    T4 {
        alpha: f64,
        k_base: f64,
        k_diff: f64,
    },
    T5 {
        a: f64,
        b: f64,
        p: f64,
        k_base: f64,
        k_diff: f64,
    },
    T6 {
        w: f64,
        k_base: f64,
        k_diff: f64,
    },
}

impl EstimatorSpec {
    pub fn family(&self) -> Family {
        match self {
            EstimatorSpec::HhMean => Family::HhMean,
            EstimatorSpec::Ratio => Family::Ratio,
            EstimatorSpec::Product => Family::Product,
            EstimatorSpec::Regression { .. } => Family::Regression,
            EstimatorSpec::T1 { .. } => Family::T1,
            EstimatorSpec::T2 { .. } => Family::T2,
            EstimatorSpec::T3 { .. } => Family::T3,
            EstimatorSpec::T4 { .. } => Family::T4,
            EstimatorSpec::T5 { .. } => Family::T5,
            EstimatorSpec::T6 { .. } => Family::T6,
        }
    }

    pub fn name(&self) -> &'static str {
        self.family().name()
    }

    /// Free constants in declaration order, for reports.
    pub fn constants(&self) -> Vec<(&'static str, f64)> {
        match *self {
            EstimatorSpec::HhMean | EstimatorSpec::Ratio | EstimatorSpec::Product => vec![],
            EstimatorSpec::Regression { slope } => match slope {
                SlopeSource::Fixed { b } => vec![("b", b)],
                _ => vec![],
            },
            EstimatorSpec::T1 { alpha } => vec![("alpha", alpha)],
            EstimatorSpec::T2 { a, b, p } => vec![("a", a), ("b", b), ("p", p)],
            EstimatorSpec::T3 { w } => vec![("w", w)],
            EstimatorSpec::T4 {
                alpha,
                k_base,
                k_diff,
            } => {
                vec![("alpha", alpha), ("k_base", k_base), ("k_diff", k_diff)]
            }
            EstimatorSpec::T5 {
                a,
                b,
                p,
                k_base,
                k_diff,
            } => vec![
                ("a", a),
                ("b", b),
                ("p", p),
                ("k_base", k_base),
                ("k_diff", k_diff),
            ],
            EstimatorSpec::T6 { w, k_base, k_diff } => {
                vec![("w", w), ("k_base", k_base), ("k_diff", k_diff)]
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((name, v)) = self.constants().into_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Domain {
                estimator: self.name(),
                reason: format!("constant {name} = {v} is not finite"),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    HhMean,
    Ratio,
    Product,
    Regression,
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::HhMean,
        Family::Ratio,
        Family::Product,
        Family::Regression,
        Family::T1,
        Family::T2,
        Family::T3,
        Family::T4,
        Family::T5,
        Family::T6,
    ];

    pub const PROPOSED: [Family; 6] = [
        Family::T1,
        Family::T2,
        Family::T3,
        Family::T4,
        Family::T5,
        Family::T6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::HhMean => "hh_mean",
            Family::Ratio => "ratio",
            Family::Product => "product",
            Family::Regression => "regression",
            Family::T1 => "t1",
            Family::T2 => "t2",
            Family::T3 => "t3",
            Family::T4 => "t4",
            Family::T5 => "t5",
            Family::T6 => "t6",
        }
    }

    pub fn is_shrinkage(self) -> bool {
        matches!(self, Family::T4 | Family::T5 | Family::T6)
    }

    /// Parse a comma-separated selection; `tA..tB` expands to a range of the
    /// proposed families.
    pub fn parse_list(list: &str) -> Result<Vec<Family>> {
        let mut out = Vec::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if item == "all" {
                out.extend(Family::ALL);
            } else if let Some((lo, hi)) = item.split_once("..") {
                let (lo, hi) = (lo.parse::<Family>()?, hi.parse::<Family>()?);
                out.extend(Family::ALL.into_iter().filter(|f| (lo..=hi).contains(f)));
            } else {
                out.push(item.parse()?);
            }
        }
        let mut seen = Vec::new();
        out.retain(|f| {
            let fresh = !seen.contains(f);
            seen.push(*f);
            fresh
        });
        if out.is_empty() {
            return Err(Error::Config("empty estimator selection".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s || (s == "hh" && *f == Family::HhMean))
            .ok_or_else(|| Error::Config(format!("unknown estimator {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// Hansen-Hurwitz mean `y**`.
    pub y_hh: f64,
    /// Auxiliary sample mean `x*`.
    pub x_bar: f64,
    pub spec: EstimatorSpec,
    /// Slope actually used by the regression estimator.
    pub slope: Option<f64>,
}

/// `y** = (n1 * mean(respondents) + n2 * mean(sub-sample)) / n`.
pub fn hh_mean(
    sample: &SystematicSample,
    outcome: &NonResponseOutcome,
    pop: &Population,
) -> Result<f64> {
    let (n1, n2, h2) = (outcome.n1(), outcome.n2(), outcome.h2());
    if n1 + h2 == 0 {
        return Err(Error::NoMeasuredUnits);
    }
    let y = pop.y();
    let respondent_total: f64 = outcome.respondents.iter().map(|&i| y[i]).sum();
    let mut total = respondent_total;
    if n2 > 0 {
        if h2 == 0 {
            return Err(Error::NoMeasuredUnits);
        }
        let sub_mean = outcome.subsample.iter().map(|&i| y[i]).sum::<f64>() / h2 as f64;
        total += n2 as f64 * sub_mean;
    }
    Ok(total / sample.len() as f64)
}

pub fn aux_mean(sample: &SystematicSample) -> f64 {
    sample.x_values.iter().sum::<f64>() / sample.x_values.len() as f64
}

/// Least-squares slope over the measured units.
fn sample_slope(outcome: &NonResponseOutcome, pop: &Population) -> Result<f64> {
    let units: Vec<usize> = outcome
        .respondents
        .iter()
        .chain(&outcome.subsample)
        .copied()
        .collect();
    let domain = |reason: &str| Error::Domain {
        estimator: "regression",
        reason: reason.to_string(),
    };
    if units.len() < 2 {
        return Err(domain("fewer than two measured units for the sample slope"));
    }
    let m = units.len() as f64;
    let mx = units.iter().map(|&i| pop.x()[i]).sum::<f64>() / m;
    let my = units.iter().map(|&i| pop.y()[i]).sum::<f64>() / m;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &i in &units {
        let dx = pop.x()[i] - mx;
        sxx += dx * dx;
        sxy += dx * (pop.y()[i] - my);
    }
    if sxx == 0.0 {
        return Err(domain("measured units have constant x"));
    }
    Ok(sxy / sxx)
}

pub fn population_slope(pop: &Population) -> Result<f64> {
    let (my, mx) = (pop.mean_y(), pop.mean_x());
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (y, x) in pop.y().iter().zip(pop.x()) {
        sxx += (x - mx).powi(2);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x"));
    }
    Ok(sxy / sxx)
}

fn ratio_checked(num: f64, den: f64, estimator: &'static str) -> Result<f64> {
    if den == 0.0 {
        return Err(Error::Domain {
            estimator,
            reason: "zero denominator".into(),
        });
    }
    Ok(num / den)
}

fn power_checked(base: f64, exponent: f64, estimator: &'static str) -> Result<f64> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(Error::Domain {
            estimator,
            reason: format!("negative base {base} under non-integer power {exponent}"),
        });
    }
    let value = base.powf(exponent);
    if !value.is_finite() {
        return Err(Error::Domain {
            estimator,
            reason: format!("{base}^{exponent} is not finite"),
        });
    }
    Ok(value)
}

/// `[X - alpha (X - x)] / [x + alpha (X - x)]`.
pub(crate) fn t1_factor(alpha: f64, x_bar: f64, x_pop: f64) -> Result<f64> {
    let d = x_pop - x_bar;
    ratio_checked(x_pop - alpha * d, x_bar + alpha * d, "t1")
}

/// `{[x + a (X - x)] / [x + b (X - x)]}^p`.
pub(crate) fn t2_factor(a: f64, b: f64, p: f64, x_bar: f64, x_pop: f64) -> Result<f64> {
    let d = x_pop - x_bar;
    let base = ratio_checked(x_bar + a * d, x_bar + b * d, "t2")?;
    power_checked(base, p, "t2")
}

/// `2 - (x / X)^w`.
pub(crate) fn t3_factor(w: f64, x_bar: f64, x_pop: f64) -> Result<f64> {
    let base = ratio_checked(x_bar, x_pop, "t3")?;
    Ok(2.0 - power_checked(base, w, "t3")?)
}

/// Evaluate one estimator on a realised sample. `x_pop` is the known
/// population mean of the auxiliary variable.
pub fn evaluate(
    spec: &EstimatorSpec,
    sample: &SystematicSample,
    outcome: &NonResponseOutcome,
    pop: &Population,
    x_pop: f64,
) -> Result<Estimate> {
    let y_hh = hh_mean(sample, outcome, pop)?;
    let x_bar = aux_mean(sample);
    let slope = match spec {
        EstimatorSpec::Regression { slope } => Some(match *slope {
            SlopeSource::Population => population_slope(pop)?,
            SlopeSource::Sample => sample_slope(outcome, pop)?,
            SlopeSource::Fixed { b } => b,
        }),
        _ => None,
    };
    let value = evaluate_means(spec, y_hh, x_bar, x_pop, slope)?;
    Ok(Estimate {
        value,
        y_hh,
        x_bar,
        spec: *spec,
        slope,
    })
}

/// Estimator value from the two sample means. `slope` is required for the
/// regression estimator and ignored otherwise.
pub fn evaluate_means(
    spec: &EstimatorSpec,
    y_hh: f64,
    x_bar: f64,
    x_pop: f64,
    slope: Option<f64>,
) -> Result<f64> {
    spec.validate()?;
    let diff = x_pop - x_bar;
    let value = match *spec {
        EstimatorSpec::HhMean => y_hh,
        EstimatorSpec::Ratio => y_hh * ratio_checked(x_pop, x_bar, "ratio")?,
        EstimatorSpec::Product => y_hh * ratio_checked(x_bar, x_pop, "product")?,
        EstimatorSpec::Regression { .. } => {
            let b = slope.ok_or(Error::Domain {
                estimator: "regression",
                reason: "slope not supplied".into(),
            })?;
            y_hh + b * diff
        }
        EstimatorSpec::T1 { alpha } => y_hh * t1_factor(alpha, x_bar, x_pop)?,
        EstimatorSpec::T2 { a, b, p } => y_hh * t2_factor(a, b, p, x_bar, x_pop)?,
        EstimatorSpec::T3 { w } => y_hh * t3_factor(w, x_bar, x_pop)?,
        EstimatorSpec::T4 {
            alpha,
            k_base,
            k_diff,
        } => k_base * (y_hh * t1_factor(alpha, x_bar, x_pop)?) + k_diff * diff,
        EstimatorSpec::T5 {
            a,
            b,
            p,
            k_base,
            k_diff,
        } => k_base * (y_hh * t2_factor(a, b, p, x_bar, x_pop)?) + k_diff * diff,
        EstimatorSpec::T6 { w, k_base, k_diff } => {
            k_base * (y_hh * t3_factor(w, x_bar, x_pop)?) + k_diff * diff
        }
    };
    if !value.is_finite() {
        return Err(Error::Domain {
            estimator: spec.name(),
            reason: "estimate is not finite".into(),
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::draw_systematic;

    fn outcome(resp: Vec<usize>, nonresp: Vec<usize>, sub: Vec<usize>) -> NonResponseOutcome {
        let l = if nonresp.is_empty() {
            1.0
        } else {
            nonresp.len() as f64 / sub.len() as f64
        };
        NonResponseOutcome {
            respondents: resp,
            nonrespondents: nonresp,
            subsample: sub,
            l_factor: l,
        }
    }

    #[test]
    fn hh_mean_cases() {
        // n = 4 with k = 1
        let pop = Population::new(vec![10.0, 12.0, 20.0, 30.0], vec![1.0; 4], None).unwrap();
        let s = draw_systematic(&pop, 4, 1).unwrap();
        let o = outcome(vec![0, 1], vec![2, 3], vec![2]);
        assert_eq!(hh_mean(&s, &o, &pop).unwrap(), 15.5);

        let pop = Population::new(vec![1.0, 2.0, 3.0, 4.0], vec![1.0; 4], None).unwrap();
        let s = draw_systematic(&pop, 4, 1).unwrap();
        let o = NonResponseOutcome::full_response(&s);
        assert_eq!(hh_mean(&s, &o, &pop).unwrap(), 2.5);

        let pop = Population::new(vec![8.0, 1.0, 10.0, 1.0], vec![1.0; 4], None).unwrap();
        let s = draw_systematic(&pop, 4, 1).unwrap();
        let o = outcome(vec![], vec![0, 1, 2, 3], vec![0, 2]);
        assert_eq!(hh_mean(&s, &o, &pop).unwrap(), 9.0);

        let o = outcome(vec![], vec![0, 1, 2, 3], vec![]);
        assert!(matches!(hh_mean(&s, &o, &pop), Err(Error::NoMeasuredUnits)));
    }

    #[test]
    fn aux_mean_cases() {
        let pop = Population::new(vec![0.0; 2], vec![2.0, 4.0], None).unwrap();
        assert_eq!(aux_mean(&draw_systematic(&pop, 2, 1).unwrap()), 3.0);
        let pop = Population::new(vec![0.0; 4], vec![1.0, 2.0, 3.0, 4.0], None).unwrap();
        assert_eq!(aux_mean(&draw_systematic(&pop, 2, 1).unwrap()), 2.0);
        let pop = Population::new(vec![0.0; 16], vec![6.9943; 16], None).unwrap();
        assert!((aux_mean(&draw_systematic(&pop, 16, 1).unwrap()) - 6.9943).abs() < 1e-12);
    }

    #[test]
    fn worked_values() {
        let t1 = EstimatorSpec::T1 { alpha: 0.0 };
        let v = evaluate_means(&t1, 15.5, 5.0, 4.0, None).unwrap();
        assert!((v - 12.4).abs() < 1e-12);
        assert_eq!(
            v,
            evaluate_means(&EstimatorSpec::Ratio, 15.5, 5.0, 4.0, None).unwrap()
        );

        let t3 = EstimatorSpec::T3 { w: 0.0 };
        assert_eq!(evaluate_means(&t3, 15.5, 5.0, 4.0, None).unwrap(), 15.5);

        let t2 = EstimatorSpec::T2 {
            a: 1.0,
            b: 0.0,
            p: 1.0,
        };
        assert_eq!(evaluate_means(&t2, 10.0, 2.0, 3.0, None).unwrap(), 15.0);
    }

    #[test]
    fn domain_errors() {
        // base (x + a d)/(x + b d) = (1 - 3)/1 < 0 with p = 0.5
        let t2 = EstimatorSpec::T2 {
            a: -3.0,
            b: 0.0,
            p: 0.5,
        };
        assert!(matches!(
            evaluate_means(&t2, 1.0, 1.0, 2.0, None),
            Err(Error::Domain {
                estimator: "t2",
                ..
            })
        ));
        let t3 = EstimatorSpec::T3 { w: 0.5 };
        assert!(evaluate_means(&t3, 1.0, -1.0, 2.0, None).is_err());
        assert!(evaluate_means(&EstimatorSpec::Ratio, 1.0, 0.0, 2.0, None).is_err());
        // integer power of a negative base is fine
        let t3 = EstimatorSpec::T3 { w: 2.0 };
        assert_eq!(evaluate_means(&t3, 1.0, -2.0, 2.0, None).unwrap(), 1.0);
        let bad = EstimatorSpec::T1 { alpha: f64::NAN };
        assert!(evaluate_means(&bad, 1.0, 1.0, 1.0, None).is_err());
    }

    #[test]
    fn family_selection() {
        assert_eq!(
            Family::parse_list("t1..t6").unwrap(),
            Family::PROPOSED.to_vec()
        );
        assert_eq!(
            Family::parse_list("hh, ratio,t3,ratio").unwrap(),
            vec![Family::HhMean, Family::Ratio, Family::T3]
        );
        assert!(Family::parse_list("t7").is_err());
        assert!(Family::parse_list("").is_err());
    }

    #[test]
    fn spec_json_shape() {
        let spec = EstimatorSpec::T6 {
            w: 1.0,
            k_base: 0.5,
            k_diff: 2.0,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"kind":"t6","w":1.0,"k_base":0.5,"k_diff":2.0}"#);
        let back: EstimatorSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
