//! Models by string id.

use serde::Serialize;

use super::models::{darboux_perturbed, darboux_pseudo, darboux_sasakian, s5_nearly_sasakian};
use super::{AcmsField, ZooError};

/// Largest `n` accepted by the Darboux families (dimension `2n + 1 ≤ 9`).
pub const MAX_DARBOUX_N: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelInfo {
    pub id: &'static str,
    pub description: &'static str,
    /// Models that are deliberately not nearly Sasakian.
    pub negative_control: bool,
}

/// Stable-ordered listing of the registered model instances.
pub fn catalogue() -> Vec<ModelInfo> {
    vec![
        ModelInfo {
            id: "darboux-sasakian:1",
            description: "standard Sasakian structure on R^3 in Darboux coordinates",
            negative_control: false,
        },
        ModelInfo {
            id: "darboux-sasakian:2",
            description: "standard Sasakian structure on R^5 in Darboux coordinates",
            negative_control: false,
        },
        ModelInfo {
            id: "darboux-sasakian:3",
            description: "standard Sasakian structure on R^7 in Darboux coordinates",
            negative_control: false,
        },
        ModelInfo {
            id: "s5-nearly-sasakian",
            description: "nearly Sasakian non-Sasakian five-sphere inside the nearly Kaehler six-sphere",
            negative_control: false,
        },
        ModelInfo {
            id: "darboux-pseudo:2:+-",
            description: "pseudo-Sasakian Darboux structure on R^5 of signature (3,2)",
            negative_control: false,
        },
        ModelInfo {
            id: "darboux-perturbed:2",
            description: "Darboux structure on R^5 with a 1% conformal wobble of the transverse metric",
            negative_control: true,
        },
    ]
}

fn parse_n(id: &str, s: &str) -> Result<usize, ZooError> {
    let n: usize = s.parse().map_err(|_| ZooError::BadParameter {
        id: id.to_string(),
        reason: format!("{s:?} is not a count"),
    })?;
    if n == 0 || n > MAX_DARBOUX_N {
        return Err(ZooError::BadParameter {
            id: id.to_string(),
            reason: format!("n must lie in 1..={MAX_DARBOUX_N}"),
        });
    }
    Ok(n)
}

fn parse_signs(id: &str, s: &str) -> Result<Vec<i8>, ZooError> {
    let bad = || ZooError::BadParameter {
        id: id.to_string(),
        reason: format!("{s:?} is not a sign list such as \"+-\" or \"+1,-1\""),
    };
    if s.contains(',') {
        s.split(',')
            .map(|t| match t.trim() {
                "+1" | "1" | "+" => Ok(1),
                "-1" | "-" => Ok(-1),
                _ => Err(bad()),
            })
            .collect()
    } else {
        s.chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(bad()),
            })
            .collect()
    }
}

/// Builds a model from its id:
/// `darboux-sasakian:n`, `darboux-pseudo:n:signs`, `darboux-perturbed:n`,
/// `s5-nearly-sasakian`.
pub fn model(id: &str) -> Result<AcmsField, ZooError> {
    let parts: Vec<&str> = id.split(':').collect();
    match parts.as_slice() {
        ["s5-nearly-sasakian"] => s5_nearly_sasakian(),
        ["darboux-sasakian", n] => darboux_sasakian(parse_n(id, n)?),
        ["darboux-perturbed", n] => darboux_perturbed(parse_n(id, n)?),
        ["darboux-pseudo", n, signs] => {
            let n = parse_n(id, n)?;
            let signs = parse_signs(id, signs)?;
            if signs.len() != n {
                return Err(ZooError::Signature(format!(
                    "{id}: expected {n} signs, got {}",
                    signs.len()
                )));
            }
            darboux_pseudo(n, &signs)
        }
        _ => Err(ZooError::UnknownModel(id.to_string())),
    }
}
