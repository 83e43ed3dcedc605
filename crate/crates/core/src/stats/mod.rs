//! Evaluation metrics, bootstrap inference and inter-annotator agreement.

pub mod agreement;
pub mod bootstrap;
pub mod metrics;

pub use agreement::{krippendorff_alpha, raw_agreement};
pub use bootstrap::{bootstrap_ci, bootstrap_compare, BootstrapResult, CompareResult};
pub use metrics::{class_metrics, macro_f1, ClassMetrics, MetricsReport};
