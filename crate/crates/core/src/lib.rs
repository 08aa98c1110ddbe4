pub mod cli;
pub mod exponent_calculus;
pub mod ledger;
pub mod mollifier;
pub mod snapshot;
pub mod solver;
pub mod spectral;
