//! Command-line tools, file formats, reference oracles and the numerical
//! checks built on `eqgh-core`.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod checks;
pub mod cli;
pub mod fixtures;
pub mod io;
pub mod oracle;
pub mod scenarios;
