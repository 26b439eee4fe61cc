//! Command-line front end: system files, settings resolution, reports.

pub mod commands;
pub mod error;
pub mod file;
pub mod report;
pub mod settings;
