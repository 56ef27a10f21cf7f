//! Spark computations, recovery-condition bounds, hit scoring and the
//! Monte Carlo experiment driver.

mod experiment;
mod hits;
mod spark;
mod theory;

pub use experiment::{
    desk_train2, monte_carlo, Curve, ExperimentConfig, ExperimentResult, Scenario, SweepPoint, CSV_HEADER,
};
pub use hits::{score_hits, HitCriterion, HitScore};
pub use spark::{is_dependent, spark_bruteforce, Spark, SparkReport, RANK_TOLERANCE, SPARK_COLUMN_LIMIT};
pub use theory::{
    nyquist_condition_check, theorem2_max_targets, verify_no_coding, verify_theorem1, CollapseSummary, RangeBinCheck,
    Theorem1Summary,
};
