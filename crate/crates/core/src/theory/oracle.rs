//! Deterministic numeric minimiser of the first-order MSE, used to check the
//! closed-form optimum constants.
//!
//! A coarse grid picks a starting point, then cyclic coordinate sweeps run a
//! golden-section search along each free constant over its full box range.
//! The objective is [`mse_first_order`], never the closed-form solution.

use serde::{Deserialize, Serialize};

use super::{mse_first_order, shrinkage_base, Setting, ShrinkagePolicy};
use crate::error::{Error, Result};
use crate::estimate::{EstimatorSpec, Family, SlopeSource};

const GRID_POINTS: usize = 41;
const MAX_SWEEPS: usize = 400;
const TOLERANCE: f64 = 1e-10;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    /// One `(lower, upper)` pair per free constant, in the order used by
    /// [`numeric_min_oracle`]: t1 `alpha`; t2 `p` (with `a = 1, b = 0`, so
    /// `D = p`); t3 `w`; t4-t6 `(k_base, k_diff)`.
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub spec: EstimatorSpec,
    pub mse: f64,
    pub evaluations: usize,
}

/// A box wide enough to contain the optimum for any valid moment set.
pub fn default_search_box(
    family: Family,
    s: &Setting,
    policy: &ShrinkagePolicy,
) -> Result<SearchBox> {
    let c1 = s.coeffs.c1;
    if c1 == 0.0 && family != Family::HhMean {
        return Err(Error::NoAuxiliaryVariation(family.name()));
    }
    let r = (s.moments.rho * s.coeffs.c0 / c1).abs();
    let bounds = match family {
        Family::HhMean | Family::Ratio | Family::Product | Family::Regression => vec![],
        Family::T1 => vec![(-(r + 3.0) / 2.0, (r + 3.0) / 2.0)],
        Family::T2 | Family::T3 => vec![(-(r + 2.0), r + 2.0)],
        Family::T4 | Family::T5 | Family::T6 => {
            let base = shrinkage_base(family, s, policy)?;
            let d = super::base_expansion(&base).map_or(0.0, |(d, _)| d.abs());
            let scale = (s.moments.mean_y / s.moments.mean_x).abs();
            vec![(-2.0, 4.0), (-scale * (r + d + 2.0), scale * (r + d + 2.0))]
        }
    };
    Ok(SearchBox { bounds })
}

fn spec_at(family: Family, base: Option<EstimatorSpec>, point: &[f64]) -> EstimatorSpec {
    match family {
        Family::HhMean => EstimatorSpec::HhMean,
        Family::Ratio => EstimatorSpec::Ratio,
        Family::Product => EstimatorSpec::Product,
        Family::Regression => EstimatorSpec::Regression {
            slope: SlopeSource::Population,
        },
        Family::T1 => EstimatorSpec::T1 { alpha: point[0] },
        Family::T2 => EstimatorSpec::T2 {
            a: 1.0,
            b: 0.0,
            p: point[0],
        },
        Family::T3 => EstimatorSpec::T3 { w: point[0] },
        Family::T4 | Family::T5 | Family::T6 => {
            super::with_shrinkage(base.expect("shrinkage base"), point[0], point[1])
        }
    }
}

/// Minimise the first-order MSE of `family` over its free constants inside
/// `search_box`. Shrinkage families keep their base constant from `policy`.
pub fn numeric_min_oracle(
    family: Family,
    s: &Setting,
    policy: &ShrinkagePolicy,
    search_box: &SearchBox,
) -> Result<OracleResult> {
    let base = if family.is_shrinkage() {
        Some(shrinkage_base(family, s, policy)?)
    } else {
        None
    };
    let dims = match family {
        Family::HhMean | Family::Ratio | Family::Product | Family::Regression => 0,
        Family::T1 | Family::T2 | Family::T3 => 1,
        _ => 2,
    };
    if search_box.bounds.len() != dims {
        return Err(Error::Config(format!(
            "{family} needs a {dims}-dimensional search box, got {}",
            search_box.bounds.len()
        )));
    }
    if let Some(&(lo, hi)) = search_box
        .bounds
        .iter()
        .find(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi))
    {
        return Err(Error::Config(format!(
            "invalid search interval [{lo}, {hi}]"
        )));
    }

    let mut evaluations = 0usize;
    let mut objective = |point: &[f64]| -> Result<f64> {
        evaluations += 1;
        let spec = spec_at(family, base, point);
        let value = mse_first_order(&spec, s).map(|r| r.mse).unwrap_or(f64::NAN);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFiniteObjective {
                family: family.name(),
                at: point.to_vec(),
            })
        }
    };

    if dims == 0 {
        let mse = objective(&[])?;
        return Ok(OracleResult {
            spec: spec_at(family, base, &[]),
            mse,
            evaluations,
        });
    }

    // grid phase
    let bounds = &search_box.bounds;
    let axis = |d: usize, i: usize| {
        let (lo, hi) = bounds[d];
        lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64
    };
    let mut best = vec![0.0; dims];
    let mut best_value = f64::INFINITY;
    let total = GRID_POINTS.pow(dims as u32);
    for flat in 0..total {
        let mut point = vec![0.0; dims];
        let mut rest = flat;
        for (d, p) in point.iter_mut().enumerate() {
            *p = axis(d, rest % GRID_POINTS);
            rest /= GRID_POINTS;
        }
        let v = objective(&point)?;
        if v < best_value {
            best_value = v;
            best = point;
        }
    }

    // coordinate refinement
    for _ in 0..MAX_SWEEPS {
        let previous = best.clone();
        for d in 0..dims {
            let (lo, hi) = bounds[d];
            let mut line = |t: f64| {
                let mut p = best.clone();
                p[d] = t;
                objective(&p)
            };
            let (t, v) = golden_section(&mut line, lo, hi)?;
            if v <= best_value {
                best[d] = t;
                best_value = v;
            }
        }
        let moved = best
            .iter()
            .zip(&previous)
            .map(|(a, b)| (a - b).abs() / (1.0 + b.abs()))
            .fold(0.0, f64::max);
        if moved < TOLERANCE {
            break;
        }
    }

    Ok(OracleResult {
        spec: spec_at(family, base, &best),
        mse: best_value,
        evaluations,
    })
}

fn golden_section<F>(f: &mut F, mut lo: f64, mut hi: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (hi - lo) > TOLERANCE * (1.0 + c.abs()) {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}
