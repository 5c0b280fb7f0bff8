//! Command-line front end and HTTP JSON service for gatherplot layouts.

pub mod cli;
pub mod request;
pub mod service;
