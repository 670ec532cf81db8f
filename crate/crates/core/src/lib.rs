pub mod exactlinalg;
pub mod kleingraph;
pub mod diagram;
pub mod signature;
pub mod cover;
pub mod movie;
pub mod solver;
pub mod pipeline;
pub mod cli;
