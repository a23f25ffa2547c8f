pub mod bits;
pub mod bounds;
pub mod classifier;
pub mod error;
pub mod group;
pub mod harness;
pub mod parse;
pub mod sumset;
pub mod structure;
