pub mod experiments;
pub mod geometry;
pub mod percolation;
pub mod process;
pub mod rng;
