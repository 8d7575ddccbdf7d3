//! Accommodation force control for simulated peg-in-hole insertion.
//!
//! A compliant peg descends onto a planar surface with a round hole. Two
//! accommodation laws bound the contact force, a windowed-statistics
//! criterion decides when the force has settled, and the settled wrench is
//! used to learn the lateral misalignment and drive a corrective policy.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod contact;
pub mod control;
pub mod convergence;
pub mod error;
pub mod io;
pub mod learning;
pub mod policy;
pub mod types;

pub use error::{Error, Result};
