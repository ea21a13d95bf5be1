//! Exact reduction calculus for free normal boxes given by differential
//! biquivers, together with the brick-family algorithm for BT-boxes and the
//! coadjoint box of a finite-dimensional algebra.

pub mod boxcore;
pub mod brickfamily;
pub mod coadjoint;
pub mod freecat;
pub mod matrix;
pub mod scalar;
pub mod dsl;
pub mod rep;
pub mod reduction;
pub mod json;
