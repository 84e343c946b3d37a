#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod error;
pub mod funcspace;
pub mod jet;
pub mod linalg;
pub mod operator;
pub mod oracle;
pub mod report;
pub mod runner;
pub mod scalar;
pub mod scenario;
pub mod testfns;

pub use error::{Error, Result};
