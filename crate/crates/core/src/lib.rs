// `!(x > 0.0)` style guards are used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod functionals;
pub mod optimize;
pub mod quad;
pub mod specfun;
pub mod trial;
pub mod verify;
