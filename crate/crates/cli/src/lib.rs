//! Command-line front end for the `bbp` tool.

pub mod catalog;
pub mod config;
pub mod expand;
pub mod notation;
pub mod reproduce;
pub mod sketch;
