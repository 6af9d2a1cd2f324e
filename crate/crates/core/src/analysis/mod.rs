//! Group-quality metrics, misclassification reasoning, channel localization and
//! layer-wise sweeps.

mod harness;
mod localize;
mod metrics;
mod misclassify;
mod oracle;
mod stats;
mod sweep;

pub use harness::{
    equalize_group, group_benchmark, random_group, BenchmarkParams, GroupBenchmark, MethodSummary, TargetResult,
};
pub use localize::{localize, ActivationMap, Aggregation, ChannelCount, LocalizationReport};
pub use metrics::{evaluate_group, evaluate_labels, GroupEvaluation};
pub use misclassify::{misclassification_report, ClassRatioReport, MisclassificationReport};
pub use oracle::{greedy_oracle_suite, random_profile, OracleCase, OracleSuite};
pub use stats::{average_ranks, pearson, spearman};
pub use sweep::layer_sweep;

#[cfg(test)]
mod tests;
