//! Exact-match scoring, report averaging and labeller agreement.

mod agreement;
mod metrics;

pub use agreement::{agreement, disagreements, AgreementReport, SentenceDiff};
pub use metrics::{average_reports, f1, report_from_tallies, score, tally, weighted_overall, write_report, ClassRow, MetricsReport, Overall, Tally};
