//! Boolean vectors as `0`/`1` strings.

use crate::error::{Error, Result};

pub fn fmt_bits(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Parses a `0`/`1` string, ignoring surrounding whitespace.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.trim()
        .chars()
        .enumerate()
        .map(|(i, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::parse(
                1,
                format!("character {other:?} at column {}", i + 1),
            )),
        })
        .collect()
}

pub fn hamming(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Serde adapter for `Vec<bool>` as a bit string.
pub mod serde_bits {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &[bool], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&super::fmt_bits(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<bool>, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_bits(&s).map_err(serde::de::Error::custom)
    }
}
