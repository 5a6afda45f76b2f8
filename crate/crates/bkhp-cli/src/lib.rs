//! Batch front end: problem documents in, exact reports out.

pub mod commands;
pub mod doc;
pub mod expr;
pub mod report;

pub use commands::{
    run, Failure, Options, Outcome, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, EXIT_PRECISION,
};
pub use doc::{parse_problem, Doc, DocError};
pub use report::{Format, Node, Report};
