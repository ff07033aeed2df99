//! Fixtures and reference implementations shared by the test targets.
#![allow(dead_code)]

pub mod goldens;
pub mod oracles;
pub mod transcripts;
pub mod witnesses;
