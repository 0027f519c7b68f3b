//! Continuous-time arrivals, the online greedy rules, and Monte Carlo
//! estimation of selection probabilities.

mod greedy;
mod ks;
mod lemma;
mod monte_carlo;
mod schedule;

pub use greedy::{
    run, run_reference, run_traced, AlgorithmKind, AlgorithmSpec, RunOutcome, TraceRecord,
};
pub use ks::{ks_critical_95, ks_statistic};
pub use lemma::{lemma_distribution_test, qualified_times, LemmaTestConfig, LemmaTestReport};
pub use monte_carlo::{monte_carlo, CompetitiveEstimate};
pub use schedule::{sample_schedule, ArrivalSchedule};
