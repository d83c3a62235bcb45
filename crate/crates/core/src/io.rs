//! JSON matrix schema shared by operators, functionals and instances.
//!
//! ```json
//! {"dims": [2, 1], "blocks": [{"re": [[1, 0], [0, 4]], "im": [[0, 0], [0, 0]]}, {"re": [[2]]}]}
//! ```
//!
//! Functionals use the key `k_blocks` instead of `blocks`. `im` may be omitted for
//! real blocks. Floats are written in shortest round-trip form, so a write/read
//! cycle is exact.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::Operator;
use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::matrix::CMatrix;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BlockJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<Vec<f64>>,
}

impl BlockJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let im = m.imag_rows();
        let all_real = im.iter().flatten().all(|&v| v == 0.0);
        Self { re: m.real_rows(), im: if all_real { Vec::new() } else { im } }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.re.len();
        let im = if self.im.is_empty() { vec![vec![0.0; n]; n] } else { self.im.clone() };
        CMatrix::from_parts(&self.re, &im)
            .ok_or_else(|| Error::InvalidStructure("block is not square or re/im shapes differ".into()))
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    dims: Vec<usize>,
    blocks: Vec<BlockJson>,
}

#[derive(Serialize, Deserialize)]
struct FunctionalJson {
    dims: Vec<usize>,
    k_blocks: Vec<BlockJson>,
}

fn decode_blocks(dims: &[usize], blocks: &[BlockJson]) -> Result<Vec<CMatrix>> {
    if dims.len() != blocks.len() {
        return Err(Error::InvalidStructure(format!("{} dims but {} blocks", dims.len(), blocks.len())));
    }
    blocks
        .iter()
        .zip(dims)
        .map(|(b, &n)| {
            let m = b.to_matrix()?;
            if m.dim() != n {
                return Err(Error::InvalidStructure(format!("block of side {} declared as {n}", m.dim())));
            }
            Ok(m)
        })
        .collect()
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorJson {
            dims: self.structure().dims().to_vec(),
            blocks: self.blocks().iter().map(BlockJson::from_matrix).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = OperatorJson::deserialize(d)?;
        decode_blocks(&raw.dims, &raw.blocks)
            .and_then(Operator::from_blocks)
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for Functional {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FunctionalJson {
            dims: self.structure().dims().to_vec(),
            k_blocks: self.k_blocks().iter().map(BlockJson::from_matrix).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Functional {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FunctionalJson::deserialize(d)?;
        decode_blocks(&raw.dims, &raw.k_blocks)
            .and_then(Functional::from_density)
            .map_err(serde::de::Error::custom)
    }
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;
    use proptest::prelude::*;

    #[test]
    fn parses_documented_schema() {
        let op: Operator = serde_json::from_str(
            r#"{"dims":[2,1],"blocks":[{"re":[[1,0],[0,4]],"im":[[0,0],[0,0]]},{"re":[[2]]}]}"#,
        )
        .unwrap();
        assert_eq!(op.structure().dims(), &[2, 1]);
        assert_eq!(op.block(0)[(1, 1)], c64(4.0, 0.0));

        let phi: Functional =
            serde_json::from_str(r#"{"dims":[2],"k_blocks":[{"re":[[0,1],[1,0]],"im":[[0,0.5],[-0.5,0]]}]}"#).unwrap();
        assert!(phi.is_hermitian());
        assert_eq!(phi.k_blocks()[0][(0, 1)], c64(1.0, 0.5));
    }

    #[test]
    fn rejects_mismatched_dims() {
        let r: std::result::Result<Operator, _> = serde_json::from_str(r#"{"dims":[3],"blocks":[{"re":[[1]]}]}"#);
        assert!(r.is_err());
        let r: std::result::Result<Operator, _> = serde_json::from_str(r#"{"dims":[2],"blocks":[{"re":[[1,2],[3]]}]}"#);
        assert!(r.is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip_is_exact(entries in prop::collection::vec(-1e6f64..1e6, 8)) {
            let m = CMatrix::from_vec(2, entries.chunks(2).map(|p| c64(p[0], p[1])).collect());
            let op = Operator::single(m).unwrap();
            let text = serde_json::to_string(&op).unwrap();
            let back: Operator = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, op);
        }
    }
}
