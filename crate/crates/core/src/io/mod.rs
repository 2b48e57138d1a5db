//! Parsing and serialization.

pub mod litmus;
pub mod native;
pub mod report;

pub use litmus::{emit_litmus, parse_litmus, LitmusError};
pub use native::{parse_param, ParamError, ParamFile};
pub use report::{emit_report, Format, Report};
