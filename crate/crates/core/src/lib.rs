pub mod bounds;
pub mod cli;
pub mod count;
pub mod equation;
pub mod error;
pub mod gadget;
pub mod hypergraph;
pub mod setcore;
pub mod solve;
