//! Stopping sets, stopping distance and stopping-set distributions of residue
//! AG codes `C_Omega(D, mO)` from elliptic curves, with brute-force oracles.

pub mod agcode;
pub mod cli;
pub mod curve;
pub mod decoder;
pub mod ffield;
pub mod groupcount;
pub mod stoptheory;
pub mod subsets;
pub mod verify;
