//! Document schema and canonical JSON rendering shared by the `bmpa` binary
//! and its integration tests.

pub mod doc;
pub mod report;
