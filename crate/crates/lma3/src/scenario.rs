//! Scenario files.

use std::path::Path;

use lma3_core::world::{ScenarioError, ScenarioSpec, World};

/// The built-in kitchen scenario as shipped in `scenarios/cooking_world.toml`.
pub const COOKING_WORLD_TOML: &str = include_str!("../scenarios/cooking_world.toml");

#[derive(Debug, thiserror::Error)]
pub enum ScenarioFileError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scenario file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] ScenarioError),
}

pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, ScenarioFileError> {
    Ok(toml::from_str(text)?)
}

pub fn load_world(path: &Path) -> Result<World, ScenarioFileError> {
    let spec = parse_scenario(&std::fs::read_to_string(path)?)?;
    Ok(World::new(spec)?)
}
