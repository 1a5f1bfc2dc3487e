//! Estimators of a finite-population mean under systematic sampling with
//! non-response handled by Hansen-Hurwitz sub-sampling.
//!
//! The library covers population moments ([`moments`]), the sampling design
//! ([`design`]), point estimators ([`estimate`]), first-order bias and MSE
//! with optimum constants ([`theory`]), and Monte Carlo validation ([`mc`]).

pub mod cli;
pub mod design;
pub mod error;
pub mod estimate;
pub mod mc;
pub mod moments;
pub mod report;
pub mod theory;

pub use design::{
    draw_systematic, realize_nonresponse, Mechanism, NonResponseOutcome, SystematicSample,
};
pub use error::{Error, Result};
pub use estimate::{evaluate, EstimatorSpec, Family, SlopeSource};
pub use mc::{
    compare_theory_empirical, enumerate_variance, run_replications, synthesize_population,
    EmpiricalReport, SimulationConfig, StartSelection, SynthesisParams,
};
pub use moments::{
    compute_moments, derive_coefficients, load_population, DerivedCoefficients, Population,
    PopulationMoments,
};
pub use theory::{
    mse_first_order, optimum_constants, pre_table, MseReport, Setting, ShrinkagePolicy,
};
