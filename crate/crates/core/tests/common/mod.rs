//! Test support shared by the integration tests of both crates.
#![allow(dead_code)]

pub mod checks;
pub mod faults;
pub mod gen;
pub mod golden;
pub mod oracles;
