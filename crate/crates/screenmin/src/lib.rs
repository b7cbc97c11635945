//! Screening-then-testing for collections of two-component union hypotheses.
//!
//! Each hypothesis is a union `H_i = H_i1 ∪ H_i2` with one p-value per
//! component. Rejecting `H_i` claims both components false, the case of
//! interest in exploratory mediation and replicability analysis. Testing
//! the per-pair maximum p-value directly is valid but very conservative;
//! the procedures here first screen pairs by their minimum p-value against
//! a selection threshold `c` and then Bonferroni-test the maxima of the
//! survivors.
//!
//! The crate provides
//!
//! * the probability model for non-null p-values ([`probmodel`]),
//! * the distributions induced by screening on the minimum ([`screening`]),
//! * finite-sample FWER bounds and rejection probabilities ([`fwer_power`]),
//! * selection-threshold solvers, including the data-adaptive threshold
//!   ([`thresholds`]),
//! * the procedures applied to a realized p-value matrix ([`testing`]),
//! * a seeded, reproducible Monte Carlo engine ([`simulation`]).

pub mod error;
pub mod fwer_power;
pub mod probmodel;
pub mod screening;
pub mod simulation;
pub mod testing;
pub mod thresholds;

pub use error::{Error, Result};
pub use fwer_power::{
    fwer_approx, fwer_upper_bound, power_unconditional, rejection_prob_conditional,
    ErrorPowerReport,
};
pub use probmodel::{alt_cdf, normal_cdf, normal_quantile, AltModel};
pub use screening::{
    cond_max_cdf, expected_selected, selected_size_pmf, selection_prob, HypothesisMix, PairType,
    SelectedSizeDistribution, EXACT_PMF_CAP,
};
pub use simulation::{
    generate_pmatrix, run_simulation, Procedure, ProcedureStats, SimConfig, SimResult,
};
pub use testing::{bonferroni_max, screenmin, PValueMatrix, TestResult};
pub use thresholds::{
    adaptive_threshold, default_threshold, oracle_threshold, OracleMethod, ThresholdMethod,
    ThresholdResult, ThresholdSpec,
};
