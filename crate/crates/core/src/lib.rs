//! Checking engine for fibered categories over finite bases.

pub mod adjoint;
pub mod base;
pub mod diagram;
pub mod ets;
pub mod fibered;
pub mod fincat;
pub mod generators;
pub mod instance;
pub mod localic;
pub mod report;
pub mod skeleton;
pub mod suites;
