//! Matrix Market coordinate pattern files plus a `.meta.json` sidecar.
//!
//! ```text
//! %%MatrixMarket matrix coordinate pattern general
//! % binary sensing matrix Phi(n=3, k=2, t=1)
//! 6 9 18
//! 1 1
//! 4 1
//! 2 2
//! ...
//! ```
//!
//! Indices are 1-based; entries are listed column after column, rows
//! ascending within a column.

use std::fmt::Write;

use ges_core::BinarySensingMatrix;
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::phi_json::{header, Header};
use super::{expect_format, FormatError};
use crate::config::RunConfig;
use crate::doc;

pub const BANNER: &str = "%%MatrixMarket matrix coordinate pattern general";

pub fn render(m: &BinarySensingMatrix) -> String {
    let mut out = String::with_capacity(16 * m.nnz() + 128);
    out.push_str(BANNER);
    out.push('\n');
    let _ = writeln!(
        out,
        "% binary sensing matrix Phi(n={}, k={}, t={})",
        m.n(),
        m.k(),
        m.t()
    );
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), m.nnz());
    for j in 0..m.cols() {
        for &r in m.column(j) {
            let _ = writeln!(out, "{} {}", r + 1, j + 1);
        }
    }
    out
}

/// `sha256:<hex>` of the `.mtx` bytes, recorded in the sidecar.
pub fn body_hash(body: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(body.as_bytes())))
}

pub fn render_meta(m: &BinarySensingMatrix, body: &str, rc: &RunConfig) -> String {
    let mut map = header("ges-meta", m);
    map.insert("nnz".into(), json!(m.nnz()));
    map.insert("mtx_hash".into(), json!(body_hash(body)));
    map.insert("provenance".into(), json!(m.provenance()));
    map.insert("run_config".into(), json!(rc));
    doc::render(&doc::seal(map))
}

#[derive(Deserialize)]
struct Meta {
    #[serde(flatten)]
    header: Header,
    nnz: Option<usize>,
}

/// Stored hashes that disagree with the content.
pub fn hash_warnings(body: &str, sidecar: &str) -> Vec<String> {
    let mut out = Vec::new();
    let Ok(v) = serde_json::from_str::<Value>(sidecar) else {
        return out;
    };
    if doc::check_hash(&v) == Some(false) {
        out.push("sidecar content_hash does not match its content".into());
    }
    if let Some(stored) = v.get("mtx_hash").and_then(Value::as_str) {
        if stored != body_hash(body) {
            out.push("mtx_hash in sidecar does not match the .mtx file".into());
        }
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.into(),
    }
}

fn numbers(line: usize, text: &str, want: usize) -> Result<Vec<usize>, FormatError> {
    let nums = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| parse_err(line, format!("expected an integer, found {tok:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if nums.len() != want {
        return Err(parse_err(
            line,
            format!("expected {want} integers, found {}", nums.len()),
        ));
    }
    Ok(nums)
}

/// Parses a `.mtx` body together with its sidecar text.
pub fn parse(body: &str, sidecar: &str) -> Result<BinarySensingMatrix, FormatError> {
    let meta: Value = serde_json::from_str(sidecar)?;
    expect_format(&meta, "ges-meta")?;
    let meta: Meta = serde_json::from_value(meta)?;
    let h = &meta.header;

    let mut lines = body.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, first))
            if first
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ")
                .eq_ignore_ascii_case(BANNER) => {}
        _ => return Err(parse_err(1, format!("expected header {BANNER:?}"))),
    }
    let mut lines = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = lines
        .next()
        .ok_or_else(|| parse_err(2, "missing size line"))?;
    let dims = numbers(size_line, size, 3)?;
    let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
    let expected_rows = h.n as usize * h.k;
    let expected_cols = (h.n as usize).checked_pow(h.t + 1).unwrap_or(usize::MAX);
    if rows != expected_rows || cols != expected_cols {
        return Err(FormatError::MetadataMismatch(format!(
            "size line says {rows}x{cols}, metadata n={}, k={}, t={} implies {expected_rows}x{expected_cols}",
            h.n, h.k, h.t
        )));
    }
    if let Some(stated) = meta.nnz.filter(|&s| s != nnz) {
        return Err(FormatError::MetadataMismatch(format!(
            "size line says {nnz} nonzeros, metadata says {stated}"
        )));
    }

    let mut per_col: Vec<Vec<u32>> = vec![Vec::new(); cols];
    let mut seen = 0usize;
    let mut last = size_line;
    for (line, text) in lines {
        last = line;
        let ij = numbers(line, text, 2)?;
        let (i, j) = (ij[0], ij[1]);
        if i == 0 || i > rows || j == 0 || j > cols {
            return Err(parse_err(line, format!("entry ({i}, {j}) outside {rows}x{cols}")));
        }
        let col = &mut per_col[j - 1];
        if col.contains(&((i - 1) as u32)) {
            return Err(parse_err(line, format!("duplicate entry ({i}, {j})")));
        }
        col.push((i - 1) as u32);
        seen += 1;
    }
    for (j, col) in per_col.iter().enumerate() {
        if col.len() != h.k {
            return Err(FormatError::MetadataMismatch(format!(
                "column {} has {} entries, metadata says k={}",
                j + 1,
                col.len(),
                h.k
            )));
        }
    }
    if seen != nnz {
        return Err(parse_err(last, format!("expected {nnz} entries, found {seen}")));
    }

    let mut entries = Vec::with_capacity(nnz);
    for mut col in per_col {
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

    fn phi321() -> BinarySensingMatrix {
        build_matrix(&construct_ges(3, 2, 1).unwrap()).unwrap()
    }

    #[test]
    fn round_trip_and_count() {
        let m = phi321();
        let body = render(&m);
        let meta = render_meta(&m, &body, &RunConfig::new("matrix"));
        assert_eq!(body.lines().nth(2), Some("6 9 18"));
        assert_eq!(body.lines().count(), 3 + 18);
        assert_eq!(parse(&body, &meta).unwrap(), m);
    }

    #[test]
    fn planted_corruption() {
        let m = phi321();
        let body = render(&m);
        let meta = render_meta(&m, &body, &RunConfig::new("matrix"));
        let mut lines: Vec<&str> = body.lines().collect();
        lines.remove(3);
        let dropped = lines.join("\n").replacen("6 9 18", "6 9 17", 1);
        assert!(matches!(
            parse(&dropped, &meta),
            Err(FormatError::MetadataMismatch(_))
        ));
        let meta17 = meta.replacen("\"nnz\": 18", "\"nnz\": 17", 1);
        let err = parse(&dropped, &meta17).unwrap_err();
        assert!(err.to_string().contains("column 1 has 1 entries"), "{err}");

        let bad = body.replacen("\n4 1\n", "\n4 x\n", 1);
        assert!(matches!(parse(&bad, &meta), Err(FormatError::Parse { line: 5, .. })));
        let bad = body.replacen(BANNER, "%%MatrixMarket matrix array real general", 1);
        assert!(matches!(parse(&bad, &meta), Err(FormatError::Parse { line: 1, .. })));
        let bad = body.replacen("\n4 1\n", "\n1 1\n", 1);
        assert!(matches!(parse(&bad, &meta), Err(FormatError::Parse { line: 5, .. })));
    }
}
