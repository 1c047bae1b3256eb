//! Verification of the inequality variants on finite truncations.

pub mod pipeline;
pub mod report;
pub mod suite;
pub mod variants;
pub mod ww;

pub use pipeline::{run_proof_pipeline, ChainLink, PipelineTrace, Relation};
pub use report::{reports_to_csv, InequalityReport, Verdict};
pub use suite::{corpus, run_cells, run_suite, CellOutcome, SuiteCell, SuiteName, SuiteResult};
pub use variants::{
    verify, verify_seeded, CStarPayload, LatticeField, ModulePayload, OperatorPayload,
    SemigroupPayload, Variant, VariantSpec, DEFAULT_MARGIN_TOL,
};
pub use ww::{wiener_wintner_sup, GridSpec, TorusPoint};
