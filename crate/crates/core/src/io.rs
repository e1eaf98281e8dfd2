//! JSON file format for [`GameInstance`].
//!
//! ```json
//! {"n": 2, "m": 2,
//!  "intrinsic": [["1", "0"], ["0", "7/3"]],
//!  "edges": [{"i": 0, "j": 1, "w": "4", "share_ij": "1/2"}]}
//! ```
//!
//! Indices are 0-based; rationals are `"p/q"` or integer strings.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{Edge, GameInstance};
use crate::numeric::{format_rational, parse_rational, Num};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    m: usize,
    intrinsic: Vec<Vec<String>>,
    edges: Vec<EdgeFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    i: usize,
    j: usize,
    w: String,
    share_ij: String,
}

pub(crate) fn field_rational(field: impl Into<String>, text: &str) -> Result<Num> {
    let field = field.into();
    parse_rational(text).map_err(|e| Error::Invalid {
        field,
        message: e.to_string(),
    })
}

pub fn parse_instance(text: &str) -> Result<GameInstance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    if file.intrinsic.len() != file.n {
        return invalid(
            "intrinsic",
            format!("expected {} rows, found {}", file.n, file.intrinsic.len()),
        );
    }
    let intrinsic = file
        .intrinsic
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(k, t)| field_rational(format!("intrinsic[{i}][{k}]"), t))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = file
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            Ok(Edge::new(
                edge.i,
                edge.j,
                field_rational(format!("edges[{e}].w"), &edge.w)?,
                field_rational(format!("edges[{e}].share_ij"), &edge.share_ij)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    GameInstance::new(file.m, intrinsic, edges)
}

/// Pretty-printed, newline-terminated JSON.
pub fn serialize_instance(game: &GameInstance) -> String {
    let file = InstanceFile {
        n: game.n(),
        m: game.m(),
        intrinsic: game
            .intrinsic()
            .iter()
            .map(|row| row.iter().map(format_rational).collect())
            .collect(),
        edges: game
            .edges()
            .iter()
            .map(|e| EdgeFile {
                i: e.i,
                j: e.j,
                w: format_rational(&e.weight),
                share_ij: format_rational(&e.share_ij),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("instance serializes");
    out.push('\n');
    out
}
