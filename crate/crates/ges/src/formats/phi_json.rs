//! `.phi.json`: a sensing matrix as 0-based row lists, one per column.
//!
//! ```text
//! {
//!   "format": "phi",
//!   "version": 1,
//!   "n": 3, "k": 2, "t": 1,
//!   "rows": 6, "cols": 9, "block_width": 3,
//!   "provenance": { ... },
//!   "columns": [
//!     [0, 3],
//!     ...
//!   ],
//!   "run_config": { ... },
//!   "content_hash": "sha256:..."
//! }
//! ```

use ges_core::ges::Provenance;
use ges_core::BinarySensingMatrix;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{expect_format, FormatError};
use crate::config::RunConfig;
use crate::doc;

pub const VERSION: u64 = 1;

/// Header fields shared with the `.meta.json` sidecar.
pub(crate) fn header(format: &str, m: &BinarySensingMatrix) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("format".into(), json!(format));
    map.insert("version".into(), json!(VERSION));
    map.insert("n".into(), json!(m.n()));
    map.insert("k".into(), json!(m.k()));
    map.insert("t".into(), json!(m.t()));
    map.insert("rows".into(), json!(m.rows()));
    map.insert("cols".into(), json!(m.cols()));
    map.insert("block_width".into(), json!(m.block_width()));
    map
}

pub fn render(m: &BinarySensingMatrix, rc: &RunConfig) -> String {
    let mut map = header("phi", m);
    map.insert("provenance".into(), json!(m.provenance()));
    map.insert(
        "columns".into(),
        Value::Array((0..m.cols()).map(|j| json!(m.column(j))).collect()),
    );
    map.insert("run_config".into(), json!(rc));
    doc::render(&doc::seal(map))
}

#[derive(Deserialize)]
pub(crate) struct Header {
    pub n: u32,
    pub k: usize,
    pub t: u32,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub block_width: Option<usize>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl Header {
    pub(crate) fn check(&self, m: &BinarySensingMatrix) -> Result<(), FormatError> {
        let pairs = [
            ("rows", self.rows, m.rows()),
            ("cols", self.cols, m.cols()),
            ("block_width", self.block_width, m.block_width()),
        ];
        for (name, stated, actual) in pairs {
            if let Some(s) = stated.filter(|&s| s != actual) {
                return Err(FormatError::MetadataMismatch(format!(
                    "{name} = {s} in metadata, {actual} implied by n={}, k={}, t={}",
                    self.n, self.k, self.t
                )));
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct Body {
    #[serde(flatten)]
    header: Header,
    columns: Vec<Vec<u32>>,
}

pub fn parse(text: &str) -> Result<BinarySensingMatrix, FormatError> {
    let v: Value = serde_json::from_str(text)?;
    expect_format(&v, "phi")?;
    let body: Body = serde_json::from_value(v)?;
    let h = body.header;
    let mut entries = Vec::with_capacity(body.columns.len() * h.k);
    for (j, col) in body.columns.iter().enumerate() {
        if col.len() != h.k {
            return Err(FormatError::MetadataMismatch(format!(
                "column {j} has {} entries, metadata says k={}",
                col.len(),
                h.k
            )));
        }
        let mut col = col.clone();
        col.sort_unstable();
        entries.extend(col);
    }
    let m = BinarySensingMatrix::from_columns(h.n, h.k, h.t, entries, h.provenance.clone())?;
    h.check(&m)?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ges_core::{build_matrix, construct_ges};

    #[test]
    fn round_trip() {
        let m = build_matrix(&construct_ges(4, 3, 2).unwrap()).unwrap();
        let text = render(&m, &RunConfig::new("matrix"));
        assert_eq!(parse(&text).unwrap(), m);
    }

    #[test]
    fn short_column() {
        let m = build_matrix(&construct_ges(3, 2, 1).unwrap()).unwrap();
        let text = render(&m, &RunConfig::new("matrix")).replacen("[0, 3]", "[0]", 1);
        assert!(matches!(parse(&text), Err(FormatError::MetadataMismatch(_))));
    }
}
