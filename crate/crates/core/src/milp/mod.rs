//! The placement program: symbolic model, file emission, exact search and
//! solution checking.

mod exact;
mod lp;
mod model;
mod solution_io;
mod validate;

pub use exact::{solve_exact, ExactOutcome, SearchLimits};
pub use lp::{emit_lp, emit_mps, parse_lp_summary, write_model_files, LpSummary, ModelFormat};
pub use model::{build_model, Family, MilpModel, ModelCounts, Row, Sense, Var};
pub use solution_io::{export_solution, import_solution, read_values, solution_values};
pub use validate::{validate_solution, ValidationReport, Violation};
