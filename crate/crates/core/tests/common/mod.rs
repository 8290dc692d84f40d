//! Oracles and property checks shared by the integration tests and the
//! acceptance runner.
#![allow(dead_code)]

pub mod properties;
pub mod shooting;
