pub mod calculus;
pub mod cli;
pub mod lattice;
pub mod mutation;
pub mod oracle;
pub mod sweep;
pub mod toric;
pub mod verify;
