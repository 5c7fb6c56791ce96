//! `.ges.json`: a GES array with its provenance.
//!
//! ```text
//! {
//!   "format": "ges",
//!   "version": 1,
//!   "n": 3,
//!   "k": 2,
//!   "t": 1,
//!   "rows": 3,
//!   "cols": 3,
//!   "provenance": { ... },
//!   "entries": [
//!     [0, 0],
//!     ...
//!   ],
//!   "run_config": { ... },
//!   "content_hash": "sha256:..."
//! }
//! ```

use ges_core::ges::Provenance;
use ges_core::GesArray;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{expect_format, FormatError};
use crate::config::RunConfig;
use crate::doc;

pub const VERSION: u64 = 1;

pub fn to_value(g: &GesArray, rc: Option<&RunConfig>) -> Value {
    let mut map = Map::new();
    map.insert("format".into(), json!("ges"));
    map.insert("version".into(), json!(VERSION));
    map.insert("n".into(), json!(g.n()));
    map.insert("k".into(), json!(g.k()));
    map.insert("t".into(), json!(g.t()));
    map.insert("rows".into(), json!(g.rows()));
    map.insert("cols".into(), json!(g.cols()));
    map.insert("provenance".into(), json!(g.provenance()));
    map.insert(
        "entries".into(),
        Value::Array(g.tuples().map(|t| json!(t)).collect()),
    );
    if let Some(rc) = rc {
        map.insert("run_config".into(), json!(rc));
    }
    doc::seal(map)
}

pub fn render(g: &GesArray, rc: Option<&RunConfig>) -> String {
    doc::render(&to_value(g, rc))
}

#[derive(Deserialize)]
struct Body {
    n: u32,
    k: usize,
    t: u32,
    rows: Option<usize>,
    cols: Option<usize>,
    #[serde(default)]
    provenance: Provenance,
    entries: Vec<Vec<u32>>,
}

pub fn parse(text: &str) -> Result<GesArray, FormatError> {
    let v: Value = serde_json::from_str(text)?;
    from_value(v)
}

pub fn from_value(v: Value) -> Result<GesArray, FormatError> {
    expect_format(&v, "ges")?;
    let body: Body = serde_json::from_value(v)?;
    let mut values = Vec::with_capacity(body.entries.len() * body.k);
    for (i, tup) in body.entries.iter().enumerate() {
        if tup.len() != body.k {
            return Err(FormatError::MetadataMismatch(format!(
                "entry {i} has {} coordinates, header says k={}",
                tup.len(),
                body.k
            )));
        }
        values.extend_from_slice(tup);
    }
    let g = GesArray::from_parts(body.n, body.k, body.t, values, body.provenance)?;
    if body.rows.is_some_and(|r| r != g.rows()) || body.cols.is_some_and(|c| c != g.cols()) {
        return Err(FormatError::MetadataMismatch(format!(
            "header shape {:?}x{:?} disagrees with {}x{}",
            body.rows,
            body.cols,
            g.rows(),
            g.cols()
        )));
    }
    Ok(g)
}
