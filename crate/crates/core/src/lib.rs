pub mod engine;
pub mod formula;
pub mod interval;
pub mod matching;
pub mod proof;
pub mod rational;
pub mod strategies;
pub mod syntax;
