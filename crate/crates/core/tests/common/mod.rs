pub mod brute;
pub mod fixtures;
pub mod grid;
pub mod oracles;
pub mod random_dra;
