//! Enumeration of pairs, statement suites and report files.

mod config;
mod enumerate;
mod record;
mod report;
mod suite;

pub use config::Config;
pub use enumerate::{candidate_pairs, enumerate, Dedup, EnumerationTask};
pub use record::{
    classify_pair, verify_periodic_reduction, BeyondView, CertificateView, Outcome, PairRecord, Status, WitnessView,
};
pub use report::{summarize, write_csv, write_jsonl, SummaryRow};
pub use suite::{near_progression_check, verify_suite, NearProgressionReport, StatementReport, Suite, SuiteReport};
