//! Built-in sweep recipes, one per figure panel.

use crate::config::SweepConfig;
use crate::error::{CliError, CliResult};

const RECIPES: &[(&str, &str)] = &[
    ("fig1a", include_str!("../recipes/fig1a.json")),
    ("fig1b", include_str!("../recipes/fig1b.json")),
    ("fig2a", include_str!("../recipes/fig2a.json")),
    ("fig2b", include_str!("../recipes/fig2b.json")),
    ("fig3a", include_str!("../recipes/fig3a.json")),
    ("fig3b", include_str!("../recipes/fig3b.json")),
    ("figs2_beta1", include_str!("../recipes/figs2_beta1.json")),
    ("figs2_beta5", include_str!("../recipes/figs2_beta5.json")),
    ("figs3_beta1", include_str!("../recipes/figs3_beta1.json")),
    ("figs4_fast", include_str!("../recipes/figs4_fast.json")),
    ("figs4_slow", include_str!("../recipes/figs4_slow.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    RECIPES.iter().map(|(n, _)| *n)
}

pub fn recipe(name: &str) -> CliResult<SweepConfig> {
    let (_, text) = RECIPES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| CliError::UnknownRecipe(name.to_string()))?;
    SweepConfig::from_json(text)
}
