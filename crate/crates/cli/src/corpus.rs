//! Fixture files shipped with the binary. Set `UPSLOPE_BLESS=1` when running this module's
//! tests to regenerate them from the core constructors.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use upslope_core::quatalg::Quaternion;
use upslope_core::upmat::UpRecipe;
use upslope_core::{Matrix, PadicContext};

use crate::wire::{MatrixFile, RecipeFile};
use crate::InputError;

pub const M3_JSON: &str = include_str!("../fixtures/m3.json");
pub const M4_JSON: &str = include_str!("../fixtures/m4.json");
pub const EXAMPLE_RECIPE_JSON: &str = include_str!("../fixtures/example-5.recipe.json");
pub const UNITS_JSON: &str = include_str!("../fixtures/units.json");

pub const SCENARIOS: [(&str, &str); 4] = [
    ("example-5", include_str!("../fixtures/scenarios/example-5.json")),
    ("fixtures-6x", include_str!("../fixtures/scenarios/fixtures-6x.json")),
    ("synthetic-m4", include_str!("../fixtures/scenarios/synthetic-m4.json")),
    ("empty", include_str!("../fixtures/scenarios/empty.json")),
];

pub fn scenario_json(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn matrix_file(name: &str) -> Option<MatrixFile> {
    let src = match name {
        "m3" => M3_JSON,
        "m4" => M4_JSON,
        _ => return None,
    };
    Some(serde_json::from_str(src).expect("shipped fixture parses"))
}

pub fn matrix(name: &str, prec: Option<u32>) -> Result<Matrix, InputError> {
    matrix_file(name)
        .ok_or_else(|| InputError::Usage(format!("unknown matrix fixture {name:?}")))?
        .to_matrix(prec)
}

pub fn recipe_file(name: &str) -> Option<RecipeFile> {
    match name {
        "example-5" => Some(serde_json::from_str(EXAMPLE_RECIPE_JSON).expect("shipped fixture parses")),
        _ => None,
    }
}

pub fn recipe(name: &str, prec: Option<u32>) -> Result<(Arc<PadicContext>, UpRecipe), InputError> {
    let file = recipe_file(name).ok_or_else(|| InputError::Usage(format!("unknown recipe fixture {name:?}")))?;
    let spec = file.context.ok_or_else(|| InputError::Usage("recipe fixture has no context".into()))?;
    let ctx = spec.with_prec(prec).build()?;
    let r = file.to_recipe(&ctx)?;
    Ok((ctx, r))
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct QuaternionJson {
    /// Coordinates of `2q` in `1, i, j, k`.
    pub doubled: [i64; 4],
    pub display: String,
}

impl QuaternionJson {
    pub fn of(q: &Quaternion) -> Self {
        QuaternionJson { doubled: q.doubled(), display: q.to_string() }
    }
}

pub fn units() -> Vec<QuaternionJson> {
    serde_json::from_str(UNITS_JSON).expect("shipped fixture parses")
}
