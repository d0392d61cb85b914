pub mod analysis;
pub mod bounds;
pub mod code;
pub mod correctability;
pub mod error;
pub mod generators;
pub mod gf2;
pub mod graph;
pub mod region;
pub mod report;
