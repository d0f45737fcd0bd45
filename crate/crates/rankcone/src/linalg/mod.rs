//! Backend-specific rank, determinant and PSD algorithms.

pub mod exact;
pub mod float;
