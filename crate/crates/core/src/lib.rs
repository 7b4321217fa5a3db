pub mod channels;
pub mod cli;
pub mod figures;
pub mod fm;
pub mod geometry;
pub mod lp;
pub mod prob;
pub mod prover;
pub mod regions;
pub mod sim;
