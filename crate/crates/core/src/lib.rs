pub mod allocation;
pub mod boolean_functions;
pub mod cli;
pub mod constants;
pub mod distributions;
pub mod error;
pub mod gadgets;
pub mod limits;
pub mod point;
pub mod rational;
pub mod reduction;
pub mod report;
pub mod solvers;
pub mod unique_games;
