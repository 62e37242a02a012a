pub mod automata;
pub mod bench;
pub mod certify;
pub mod cli;
pub mod learn;
pub mod metric;
pub mod rational;
pub mod robust;

pub use rational::Rational;
