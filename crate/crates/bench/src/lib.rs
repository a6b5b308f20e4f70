//! Fixtures shared by the benchmarks.

use cavsim::{load_scenario, Scenario};

pub const REFERENCE: &str = include_str!("../../../scenarios/merge_5x5.toml");

/// The five-plus-five merge scenario.
pub fn reference_scenario() -> Scenario {
    load_scenario(REFERENCE).expect("reference scenario is valid")
}
