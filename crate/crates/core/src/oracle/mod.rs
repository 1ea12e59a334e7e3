//! Numerical ground truth: direct integration of the Schrodinger equation
//! and a deterministic search over the field constants.

pub mod integrate;
pub mod report;
pub mod search;

pub use integrate::{integrate_u, midpoint_product, Integration, IntegratorConfig, OracleTrajectory};
pub use report::{verify_report, Check, CheckStatus, Discrepancy, Scenario, ScenarioReport, Tolerances, VerificationReport};
pub use search::{hessian_at, maximize_tau13, Evaluator, Hessian, SearchBounds, SearchResult};
