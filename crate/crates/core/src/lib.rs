pub mod analysis;
pub mod bench;
pub mod checker;
pub mod cli;
pub mod config;
pub mod ir;
pub mod parser;
pub mod pipeline;
pub mod poly;
pub mod report;
pub mod solver;
pub mod symexec;
