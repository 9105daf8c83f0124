//! Seeded Monte Carlo and exhaustive experiments over random additive polynomials.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]. Trials draw
//! from independent ChaCha streams keyed by `(seed, n, trial)`, so they run in
//! parallel and aggregate in trial order.

mod certificate;
mod config;
mod content;
mod delta;
mod report;
mod specfact;

pub use certificate::{
    largeness_certificate, run_theorem_experiment, Certificate, SweepContext, TheoremReport,
    TheoremRow, Verdict,
};
pub use config::{sample_additive, trial_rng, ExperimentConfig, Mode, DEFAULT_TAU_BUDGET};
pub use content::{
    asymptotic_cell, content_distribution, exact_cell_probabilities, exact_family_count,
    family_count_bruteforce, lemma_constant, ContentReport, ContentRow, LEMMA_CONSTANT_NOTE,
};
pub use delta::{
    construct_with_content, default_delta_a0s, delta_experiment, delta_image_empirical,
    norm_r0_search, norm_surjectivity_check, DeltaComparison, DeltaReport, DeltaRow, NormCheck,
    NormSearch, NORM_SEARCH_MIN_DEGREE,
};
pub use report::{run_experiment, write_reports, ExperimentReport};
pub use specfact::{
    partitions, spec_fact_search, spec_fact_statistics, SpecFactReport, SpecFactRow,
    SPECFACT_EXHAUSTIVE_LIMIT,
};
