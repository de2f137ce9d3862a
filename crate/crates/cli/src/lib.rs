//! Library surface of the driver: configuration, reports, catalog cache,
//! task runners and the verify-all harness. The binary in `main.rs` is a
//! thin argument-parsing wrapper.

pub mod cache;
pub mod config;
pub mod report;
pub mod tasks;
pub mod verify;
