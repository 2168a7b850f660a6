//! Simulation of randomized LOCAL-model algorithms for low-diameter
//! decompositions and packing/covering integer programs.

mod error;
pub mod graph;
pub mod ilp;
pub mod sim;
pub mod classic;
pub mod whp;
pub mod components;
pub mod packing;
pub mod covering;
pub mod harness;

pub use error::{Error, Result};
