//! Exact local factors, Shahidi local coefficient matrices and Plancherel
//! measures for tame n-fold covers of SL2 over a p-adic field.

pub mod exact_scalars;
pub mod ratfun;
pub mod tame_field;
pub mod characters;
pub mod lagrangian;
pub mod factors;
pub mod schwartz;
pub mod slcm;
pub mod cli;
