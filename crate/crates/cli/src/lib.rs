//! Command line and HTTP session service for the McMullen game workbench.

pub mod commands;
pub mod service;
