//! File formats and report rendering behind the `strata` binary, exposed as
//! a library so integration tests can parse what the binary prints.

pub mod format;
pub mod report;
