//! First-order biases and MSEs, optimum constants, and percent relative
//! efficiency against the Hansen-Hurwitz mean.
//!
//! All estimators are expanded in the relative errors
//! `e0 = (y** - Y)/Y` and `e1 = (x* - X)/X` with
//! `E[e0^2] = theta c0^2`, `E[e1^2] = theta c1^2`, `E[e0 e1] = theta rho c0 c1`
//! (plus the non-response load on `e0^2`). Each ratio-type base factor is
//! `1 - D e1 + A e1^2` to second order:
//!
//! | base | D | A |
//! |------|---|---|
//! | t1(alpha) | `1 - 2 alpha` | `(1 - alpha)(1 - 2 alpha)` |
//! | t2(a,b,p) | `(a - b) p` | see [`ad_coefficients`] |
//! | t3(w) | `w` | `-w (w - 1) / 2` |
//!
//! The shrinkage families `K * base + K' (X - x*)` reduce to a quadratic form
//! in `(K, K' X / Y)`, see [`ShrinkageCoefficients`].

mod oracle;
mod table;

pub use oracle::{default_search_box, numeric_min_oracle, OracleResult, SearchBox};
pub use table::{
    discrepancy_report, pre_table, CellStatus, ColumnReport, DiscrepancyReport,
    DiscrepancyTolerances, PreCell, PreRow, PreTable, ReferenceTable, ToleranceRule,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{EstimatorSpec, Family, SlopeSource};
use crate::moments::{derive_coefficients, DerivedCoefficients, PopulationMoments};

/// Extra variance from sub-sampling non-respondents: `((L-1)/n) K S_Y2^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NrTerm {
    pub k_rate: f64,
    pub l_factor: f64,
    pub value: f64,
}

pub fn nr_term(m: &PopulationMoments, k_rate: f64, l_factor: f64) -> Result<NrTerm> {
    if !(0.0..1.0).contains(&k_rate) {
        return Err(Error::InvalidRate(k_rate));
    }
    if l_factor.is_nan() || l_factor < 1.0 || l_factor.is_infinite() {
        return Err(Error::InvalidSubsamplingFactor(l_factor));
    }
    let value = if k_rate == 0.0 || l_factor == 1.0 {
        0.0
    } else {
        let s2_y2 = m.s2_y2.ok_or_else(|| {
            Error::Config("non-response mean square s2_y2 is required when K > 0 and L > 1".into())
        })?;
        (l_factor - 1.0) / m.sample_size as f64 * k_rate * s2_y2
    };
    Ok(NrTerm {
        k_rate,
        l_factor,
        value,
    })
}

/// `theta {1 + (n-1) rho_y} S_Y^2 + NrTerm`.
pub fn variance_hh(m: &PopulationMoments, k_rate: f64, l_factor: f64) -> Result<f64> {
    let factor = 1.0 + (m.sample_size as f64 - 1.0) * m.rho_y_intra;
    if factor < -1e-12 {
        return Err(Error::NegativeIntraclassFactor("y"));
    }
    Ok(m.theta() * factor.max(0.0) * m.s2_y + nr_term(m, k_rate, l_factor)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdCoefficients {
    pub a_coef: f64,
    pub d_coef: f64,
}

/// `A = p(p+1)/2 (1-b)^2 - p^2 (1-a)(1-b) + p(p-1)/2 (1-a)^2`, `D = (a-b) p`.
pub fn ad_coefficients(a: f64, b: f64, p: f64) -> AdCoefficients {
    let (ua, ub) = (1.0 - a, 1.0 - b);
    AdCoefficients {
        a_coef: p * (p + 1.0) / 2.0 * ub * ub - p * p * ua * ub + p * (p - 1.0) / 2.0 * ua * ua,
        d_coef: (a - b) * p,
    }
}

/// Moments, derived coefficients and the non-response load for one `(K, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    pub moments: PopulationMoments,
    pub coeffs: DerivedCoefficients,
    pub nr: NrTerm,
}

impl Setting {
    pub fn new(moments: &PopulationMoments, k_rate: f64, l_factor: f64) -> Result<Self> {
        Ok(Self {
            moments: *moments,
            coeffs: derive_coefficients(moments)?,
            nr: nr_term(moments, k_rate, l_factor)?,
        })
    }

    fn theta(&self) -> f64 {
        self.coeffs.theta
    }

    fn y2(&self) -> f64 {
        self.moments.mean_y * self.moments.mean_y
    }

    /// `rho c0 c1`.
    fn cross(&self) -> f64 {
        self.moments.rho * self.coeffs.c0 * self.coeffs.c1
    }

    fn c0_sq(&self) -> f64 {
        self.coeffs.c0 * self.coeffs.c0
    }

    fn c1_sq(&self) -> f64 {
        self.coeffs.c1 * self.coeffs.c1
    }

    /// `rho c0 / c1`: the value of `D` (or `w`, or `1 - 2 alpha`) at which the
    /// first-order cross term with `e1` vanishes.
    pub fn matched_constant(&self, family: &'static str) -> Result<f64> {
        if self.coeffs.c1 == 0.0 {
            return Err(Error::NoAuxiliaryVariation(family));
        }
        Ok(self.moments.rho * self.coeffs.c0 / self.coeffs.c1)
    }

    /// First-order MSE of `y** (1 - D e1 + ...)`: `theta Y^2 [c0^2 + D^2 c1^2 - 2 D rho c0 c1] + NrTerm`.
    fn base_sampling_mse(&self, d: f64) -> f64 {
        self.theta() * self.y2() * (self.c0_sq() + d * d * self.c1_sq() - 2.0 * d * self.cross())
    }
}

/// Quadratic-form coefficients of a shrinkage estimator.
///
/// `MSE / Y^2 = K^2 a_self - 2 K v a_cross + v^2 a_aux - 2 K a_lin + 1`
/// with `v = K' X / Y`. The non-response load `NrTerm / Y^2` is already folded
/// into `a_self`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkageCoefficients {
    pub a_self: f64,
    pub a_aux: f64,
    pub a_cross: f64,
    pub a_lin: f64,
}

impl ShrinkageCoefficients {
    /// Coefficients for a base factor with expansion `1 - D e1 + A e1^2`.
    pub fn from_expansion(d: f64, a: f64, s: &Setting) -> Self {
        let th = s.theta();
        Self {
            a_self: 1.0
                + th * (s.c0_sq() + (d * d + 2.0 * a) * s.c1_sq() - 4.0 * d * s.cross())
                + s.nr.value / s.y2(),
            a_aux: th * s.c1_sq(),
            a_cross: th * (s.cross() - d * s.c1_sq()),
            a_lin: 1.0 + th * (a * s.c1_sq() - d * s.cross()),
        }
    }

    pub fn determinant(&self) -> f64 {
        self.a_self * self.a_aux - self.a_cross * self.a_cross
    }

    /// `(K, v)` minimising the quadratic form.
    pub fn solve(&self, family: &'static str) -> Result<(f64, f64)> {
        let det = self.determinant();
        if det.is_nan() || det <= 0.0 || self.a_aux.is_nan() || self.a_aux <= 0.0 {
            return Err(Error::SingularQuadratic(family));
        }
        Ok((
            self.a_lin * self.a_aux / det,
            self.a_cross * self.a_lin / det,
        ))
    }

    pub fn scaled_mse(&self, k_base: f64, v: f64) -> f64 {
        k_base * k_base * self.a_self - 2.0 * k_base * v * self.a_cross + v * v * self.a_aux
            - 2.0 * k_base * self.a_lin
            + 1.0
    }
}

/// `(D, A)` of a ratio-type base factor.
fn base_expansion(spec: &EstimatorSpec) -> Option<(f64, f64)> {
    match *spec {
        EstimatorSpec::Ratio => Some((1.0, 1.0)),
        EstimatorSpec::Product => Some((-1.0, 0.0)),
        EstimatorSpec::T1 { alpha } | EstimatorSpec::T4 { alpha, .. } => {
            Some((1.0 - 2.0 * alpha, (1.0 - alpha) * (1.0 - 2.0 * alpha)))
        }
        EstimatorSpec::T2 { a, b, p } | EstimatorSpec::T5 { a, b, p, .. } => {
            let ad = ad_coefficients(a, b, p);
            Some((ad.d_coef, ad.a_coef))
        }
        EstimatorSpec::T3 { w } | EstimatorSpec::T6 { w, .. } => Some((w, -w * (w - 1.0) / 2.0)),
        EstimatorSpec::HhMean | EstimatorSpec::Regression { .. } => None,
    }
}

fn shrinkage_constants(spec: &EstimatorSpec) -> Option<(f64, f64)> {
    match *spec {
        EstimatorSpec::T4 { k_base, k_diff, .. }
        | EstimatorSpec::T5 { k_base, k_diff, .. }
        | EstimatorSpec::T6 { k_base, k_diff, .. } => Some((k_base, k_diff)),
        _ => None,
    }
}

pub fn shrinkage_coefficients(spec: &EstimatorSpec, s: &Setting) -> Option<ShrinkageCoefficients> {
    shrinkage_constants(spec)?;
    let (d, a) = base_expansion(spec)?;
    Some(ShrinkageCoefficients::from_expansion(d, a, s))
}

/// First-order bias.
pub fn bias(spec: &EstimatorSpec, s: &Setting) -> f64 {
    let y = s.moments.mean_y;
    let th = s.theta();
    let (c1_sq, cross) = (s.c1_sq(), s.cross());
    let t1_bracket = |alpha: f64| {
        (1.0 - 3.0 * alpha + 2.0 * alpha * alpha) * c1_sq - (1.0 - 2.0 * alpha) * cross
    };
    match *spec {
        EstimatorSpec::HhMean | EstimatorSpec::Regression { .. } => 0.0,
        EstimatorSpec::Ratio => th * y * (c1_sq - cross),
        EstimatorSpec::Product => th * y * cross,
        EstimatorSpec::T1 { alpha } => th * y * t1_bracket(alpha),
        EstimatorSpec::T2 { a, b, p } => {
            let ad = ad_coefficients(a, b, p);
            y * th * (ad.a_coef * c1_sq - ad.d_coef * cross)
        }
        EstimatorSpec::T3 { w } => y * th * (-0.5 * w * (w - 1.0) * c1_sq - w * cross),
        EstimatorSpec::T4 { alpha, k_base, .. } => {
            y * (k_base - 1.0) + k_base * y * th * t1_bracket(alpha)
        }
        EstimatorSpec::T5 {
            a, b, p, k_base, ..
        } => {
            let ad = ad_coefficients(a, b, p);
            k_base * y * (1.0 + th * (ad.a_coef * c1_sq - ad.d_coef * cross)) - y
        }
        EstimatorSpec::T6 { w, k_base, .. } => {
            (k_base - 1.0) * y - k_base * y * th * (0.5 * w * (w - 1.0) * c1_sq + w * cross)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    NumericOptimum,
    UserSupplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseReport {
    pub estimator: EstimatorSpec,
    pub bias: f64,
    pub mse: f64,
    pub sampling_component: f64,
    pub nr_component: f64,
    pub constants_provenance: Provenance,
}

/// Classical ratio, product and regression MSEs written with `rho*` and `K1`.
fn classical_sampling_mse(family: Family, s: &Setting) -> f64 {
    let m = &s.moments;
    let d = &s.coeffs;
    let lead = d.theta * m.mean_y * m.mean_y * d.factor_x;
    match (family, d.rho_star) {
        (Family::Ratio, Some(rs)) => {
            lead * (rs * rs * d.c_y * d.c_y + (1.0 - 2.0 * d.k1 * rs) * d.c_x * d.c_x)
        }
        (Family::Product, Some(rs)) => {
            lead * (rs * rs * d.c_y * d.c_y + (1.0 + 2.0 * d.k1 * rs) * d.c_x * d.c_x)
        }
        (Family::Regression, Some(rs)) => {
            lead * (d.c_y * d.c_y - d.k1 * d.k1 * d.c_x * d.c_x) * rs * rs
        }
        // no auxiliary intraclass spread: rho* undefined, fall back to c0/c1
        (Family::Ratio, None) => s.base_sampling_mse(1.0),
        (Family::Product, None) => s.base_sampling_mse(-1.0),
        _ => s.theta() * s.y2() * s.c0_sq() * (1.0 - m.rho * m.rho),
    }
}

/// First-order MSE at the constants carried by `spec`.
pub fn mse_first_order(spec: &EstimatorSpec, s: &Setting) -> Result<MseReport> {
    spec.validate()?;
    let nr = s.nr.value;
    let (mse, nr_component) = match *spec {
        EstimatorSpec::HhMean => {
            let v = variance_hh(&s.moments, s.nr.k_rate, s.nr.l_factor)?;
            (v, nr)
        }
        EstimatorSpec::Ratio => (classical_sampling_mse(Family::Ratio, s) + nr, nr),
        EstimatorSpec::Product => (classical_sampling_mse(Family::Product, s) + nr, nr),
        EstimatorSpec::Regression { slope } => {
            let sampling = match slope {
                SlopeSource::Population | SlopeSource::Sample => {
                    classical_sampling_mse(Family::Regression, s)
                }
                SlopeSource::Fixed { b } => {
                    let m = &s.moments;
                    let d = &s.coeffs;
                    let cov = m.rho * (d.factor_x * d.factor_y * m.s2_x * m.s2_y).sqrt();
                    d.theta * (d.factor_y * m.s2_y + b * b * d.factor_x * m.s2_x - 2.0 * b * cov)
                }
            };
            (sampling + nr, nr)
        }
        EstimatorSpec::T1 { .. } | EstimatorSpec::T2 { .. } | EstimatorSpec::T3 { .. } => {
            let (d, _) = base_expansion(spec).expect("ratio-type base");
            (s.base_sampling_mse(d) + nr, nr)
        }
        EstimatorSpec::T4 { .. } | EstimatorSpec::T5 { .. } | EstimatorSpec::T6 { .. } => {
            let q = shrinkage_coefficients(spec, s).expect("shrinkage family");
            let (k_base, k_diff) = shrinkage_constants(spec).expect("shrinkage family");
            let v = k_diff * s.moments.mean_x / s.moments.mean_y;
            (s.y2() * q.scaled_mse(k_base, v), k_base * k_base * nr)
        }
    };
    Ok(MseReport {
        estimator: *spec,
        bias: bias(spec, s),
        mse,
        sampling_component: mse - nr_component,
        nr_component,
        constants_provenance: Provenance::UserSupplied,
    })
}

/// How the base constant of a shrinkage family is fixed before solving for
/// `(K, K')`.
///
/// The base constant is not optimised jointly: the first-order MSE is
/// unbounded below along `alpha` (t4) and `w` (t6) once `K` and `K'` are free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkagePolicy {
    /// `None`: matched `alpha = (1 - rho c0/c1) / 2`.
    pub t4_alpha: Option<f64>,
    /// `None`: `A = 0`, `D = rho c0/c1` via `a = 1 + D, b = 1, p = 1`.
    pub t5_abp: Option<(f64, f64, f64)>,
    /// `None`: matched `w = rho c0/c1`.
    pub t6_w: Option<f64>,
}

impl Default for ShrinkagePolicy {
    fn default() -> Self {
        Self {
            t4_alpha: Some(0.0),
            t5_abp: None,
            t6_w: None,
        }
    }
}

/// Base-constant spec (with `K = 1, K' = 0`) for a shrinkage family.
pub fn shrinkage_base(
    family: Family,
    s: &Setting,
    policy: &ShrinkagePolicy,
) -> Result<EstimatorSpec> {
    Ok(match family {
        Family::T4 => EstimatorSpec::T4 {
            alpha: match policy.t4_alpha {
                Some(alpha) => alpha,
                None => 0.5 * (1.0 - s.matched_constant("t4")?),
            },
            k_base: 1.0,
            k_diff: 0.0,
        },
        Family::T5 => {
            let (a, b, p) = match policy.t5_abp {
                Some(abp) => abp,
                None => (1.0 + s.matched_constant("t5")?, 1.0, 1.0),
            };
            EstimatorSpec::T5 {
                a,
                b,
                p,
                k_base: 1.0,
                k_diff: 0.0,
            }
        }
        Family::T6 => EstimatorSpec::T6 {
            w: match policy.t6_w {
                Some(w) => w,
                None => s.matched_constant("t6")?,
            },
            k_base: 1.0,
            k_diff: 0.0,
        },
        other => {
            return Err(Error::Config(format!("{other} is not a shrinkage family")));
        }
    })
}

fn with_shrinkage(spec: EstimatorSpec, k: f64, kd: f64) -> EstimatorSpec {
    match spec {
        EstimatorSpec::T4 { alpha, .. } => EstimatorSpec::T4 {
            alpha,
            k_base: k,
            k_diff: kd,
        },
        EstimatorSpec::T5 { a, b, p, .. } => EstimatorSpec::T5 {
            a,
            b,
            p,
            k_base: k,
            k_diff: kd,
        },
        EstimatorSpec::T6 { w, .. } => EstimatorSpec::T6 {
            w,
            k_base: k,
            k_diff: kd,
        },
        other => other,
    }
}

/// Closed-form optimum constants for a family.
pub fn optimum_constants(
    family: Family,
    s: &Setting,
    policy: &ShrinkagePolicy,
) -> Result<EstimatorSpec> {
    Ok(match family {
        Family::HhMean => EstimatorSpec::HhMean,
        Family::Ratio => EstimatorSpec::Ratio,
        Family::Product => EstimatorSpec::Product,
        Family::Regression => EstimatorSpec::Regression {
            slope: SlopeSource::Population,
        },
        Family::T1 => EstimatorSpec::T1 {
            alpha: 0.5 * (1.0 - s.matched_constant("t1")?),
        },
        Family::T2 => EstimatorSpec::T2 {
            a: s.matched_constant("t2")?,
            b: 0.0,
            p: 1.0,
        },
        Family::T3 => EstimatorSpec::T3 {
            w: s.matched_constant("t3")?,
        },
        Family::T4 | Family::T5 | Family::T6 => {
            let base = shrinkage_base(family, s, policy)?;
            let q = shrinkage_coefficients(&base, s).expect("shrinkage family");
            let (k, v) = q.solve(family.name())?;
            with_shrinkage(base, k, v * s.moments.mean_y / s.moments.mean_x)
        }
    })
}

/// MSE report at the closed-form optimum.
pub fn optimum_report(family: Family, s: &Setting, policy: &ShrinkagePolicy) -> Result<MseReport> {
    let spec = optimum_constants(family, s, policy)?;
    let mut report = mse_first_order(&spec, s)?;
    if !matches!(family, Family::HhMean | Family::Ratio | Family::Product) {
        report.constants_provenance = Provenance::ClosedForm;
    }
    Ok(report)
}

/// Minimum MSE written directly: `theta Y^2 c0^2 (1 - rho^2) + NrTerm` for
/// t1-t3 and `Y^2 (1 - a_lin^2 a_aux / det)` for the shrinkage families.
pub fn optimum_mse_closed_form(
    family: Family,
    s: &Setting,
    policy: &ShrinkagePolicy,
) -> Result<f64> {
    let rho = s.moments.rho;
    match family {
        Family::T1 | Family::T2 | Family::T3 | Family::Regression => {
            Ok(s.theta() * s.y2() * s.c0_sq() * (1.0 - rho * rho) + s.nr.value)
        }
        Family::T4 | Family::T5 | Family::T6 => {
            let base = shrinkage_base(family, s, policy)?;
            let q = shrinkage_coefficients(&base, s).expect("shrinkage family");
            let det = q.determinant();
            if det.is_nan() || det <= 0.0 {
                return Err(Error::SingularQuadratic(family.name()));
            }
            Ok(s.y2() * (1.0 - q.a_lin * q.a_lin * q.a_aux / det))
        }
        other => Ok(mse_first_order(&optimum_constants(other, s, policy)?, s)?.mse),
    }
}

/// `100 * V(y**) / MSE(target)`.
pub fn pre(s: &Setting, target: &MseReport) -> Result<f64> {
    if target.mse.is_nan() || target.mse <= 0.0 {
        return Err(Error::Domain {
            estimator: target.estimator.name(),
            reason: format!("first-order MSE {} is not positive", target.mse),
        });
    }
    Ok(100.0 * variance_hh(&s.moments, s.nr.k_rate, s.nr.l_factor)? / target.mse)
}
