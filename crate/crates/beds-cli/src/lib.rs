//! Library surface of the scenario front end; the `beds` binary is a thin
//! wrapper around [`config::parse_config`] and [`scenarios::run_scenario`].

pub mod config;
pub mod csv;
pub mod report;
pub mod scenarios;
