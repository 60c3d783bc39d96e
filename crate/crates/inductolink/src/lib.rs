//! Catalog files, reports and the command-line frontend around
//! [`inductolink_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod design;
pub mod export;

pub use inductolink_core as core;
