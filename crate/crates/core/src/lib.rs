//! Fitting the log-logistic distribution with maximum likelihood and robust
//! closed-form estimators, plus the tooling to compare them: breakdown points,
//! contamination Monte Carlo and Kolmogorov-Smirnov goodness of fit.

pub mod dataset;
pub mod distribution;
pub mod error;
pub mod estimators;
pub mod gof;
pub mod rng;
pub mod robust;
pub mod simulation;

pub use distribution::{LLParams, Sample};
pub use error::{Error, Result};
pub use estimators::{
    fit, BreakdownReport, Diagnostics, EstimateResult, FitOptions, Method, MleOptions, PercentilePair,
};
pub use gof::GofReport;
pub use robust::{HlVariant, InnerMedian, LineFit, RmOptions, TieHandling};
pub use simulation::{ContaminationScenario, SimulationConfig, SimulationReport};
