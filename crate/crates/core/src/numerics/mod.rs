//! Special functions and dense linear-algebra primitives used by every other
//! module. All operations are pure functions on immutable inputs.

pub mod matrix;
pub mod special;
pub mod svd;
