//! Spec files, report emission and the command line for `veq-core`.
//!
//! * [`spec`] parses and prints the `.veq` format.
//! * [`build`] turns a parsed file into a virtual double category.
//! * [`output`] renders reports as text or as `CHECK` records.
//! * [`cli`] implements the `veq` commands.

pub mod build;
pub mod cli;
pub mod fixtures;
pub mod output;
pub mod spec;
