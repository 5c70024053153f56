//! Command-line frontend for the regularized two-satellite problem.

pub mod checks;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod envelope;
