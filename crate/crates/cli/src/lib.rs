//! File formats, oracle storage and the command implementations behind the
//! `repath` binary.

pub mod app;
pub mod graph_io;
pub mod report;
pub mod store;
