//! CSP instances as JSON:
//! `{"n": 4, "k": 2, "constraints": [{"scope": [0, 1], "table": "0110"}]}`.
//! Character `t` of `table` is the constraint value on assignment `t`, read
//! with the first scope variable as the most significant bit.

use serde::{Deserialize, Serialize};

use super::{CspConstraint, CspInstance};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct CspFile {
    n: usize,
    k: usize,
    constraints: Vec<ConstraintFile>,
}

#[derive(Serialize, Deserialize)]
struct ConstraintFile {
    scope: Vec<usize>,
    table: String,
}

pub fn parse_csp_json(text: &str) -> Result<CspInstance> {
    let file: CspFile =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let constraints = file
        .constraints
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let table = c
                .table
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::InvalidParameter(format!(
                        "constraint {i}: truth table character {other:?}"
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CspConstraint {
                scope: c.scope,
                table,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CspInstance::new(file.n, file.k, constraints)
}

pub fn write_csp_json(c: &CspInstance) -> String {
    let file = CspFile {
        n: c.n(),
        k: c.k(),
        constraints: c
            .constraints()
            .iter()
            .map(|con| ConstraintFile {
                scope: con.scope.clone(),
                table: con
                    .table
                    .iter()
                    .map(|&b| if b { '1' } else { '0' })
                    .collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("plain data serializes");
    out.push('\n');
    out
}
