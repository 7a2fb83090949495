// `!(x > 0.0)` guards are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod block;
pub mod catenary;
pub mod discrete;
pub mod error;
pub mod flow;
pub mod metric;
pub mod numeric;
pub mod scenario;
pub mod sections;

pub use error::{Error, Result};
