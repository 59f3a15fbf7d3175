pub mod benchgen;
pub mod cbn;
pub mod cli;
pub mod disentangle;
pub mod estimate;
pub mod fixtures;
pub mod intervene;
pub mod io;
pub mod manifest;
pub mod scalar;
pub mod solver;
