//! The binary sensing matrix `Φ(n, k, t)` of size `nk × n^(t+1)`.
//!
//! A tuple `(t_0, …, t_{k-1})` becomes the column with ones at rows
//! `l·n + t_l`, one in each band of `n` rows. Columns are ordered block by
//! block: block `b` holds the `n` tuples of GES column `b` in row order, so
//! matrix column `b·n + j` is the tuple at row `j`, column `b`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::ges::{agreeing_pair, GesArray, GesError, Provenance};

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum MatrixWitness {
    /// Column `col` does not hold exactly one entry in row band `band`.
    Band { col: usize, band: usize },
    /// Two columns of one native block share a row.
    BlockCollision { block: usize, a: usize, b: usize },
    /// Two columns overlap in more than `t` rows.
    Overlap { a: usize, b: usize, overlap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("value {value} at coordinate {coordinate} is outside 0..{n}")]
    ValueOutOfRange { coordinate: usize, value: u32, n: u32 },
    #[error("tuple has {got} coordinates, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix invariant violated: {0:?}")]
    Invariant(MatrixWitness),
    #[error("invalid matrix shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Ges(#[from] GesError),
}

/// Row indices `l·n + tup[l]` of the column for one tuple.
pub fn column_vector(tup: &[u32], n: u32, k: usize) -> Result<Vec<u32>, MatrixError> {
    if tup.len() != k {
        return Err(MatrixError::LengthMismatch {
            expected: k,
            got: tup.len(),
        });
    }
    tup.iter()
        .enumerate()
        .map(|(l, &v)| {
            if v >= n {
                Err(MatrixError::ValueOutOfRange {
                    coordinate: l,
                    value: v,
                    n,
                })
            } else {
                Ok(l as u32 * n + v)
            }
        })
        .collect()
}

/// Sparse column-major 0/1 matrix with `k` ones per column.
///
/// Entries are stored unscaled; `normalized` arguments apply `1/√k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarySensingMatrix {
    n: u32,
    k: usize,
    t: u32,
    rows: usize,
    cols: usize,
    block_width: usize,
    /// `k` sorted row indices per column, column after column.
    entries: Vec<u32>,
    provenance: Provenance,
}

/// Builds `Φ` from a GES array and checks every matrix invariant.
pub fn build_matrix(g: &GesArray) -> Result<BinarySensingMatrix, MatrixError> {
    let (n, k) = (g.n(), g.k());
    let (rows, cols) = (g.rows(), g.cols());
    let mut entries = Vec::with_capacity(g.len() * k);
    for b in 0..cols {
        for j in 0..rows {
            entries.extend(column_vector(g.tuple(j, b), n, k)?);
        }
    }
    let m = BinarySensingMatrix {
        n,
        k,
        t: g.t(),
        rows: n as usize * k,
        cols: g.len(),
        block_width: n as usize,
        entries,
        provenance: g.provenance().clone(),
    };
    m.check_blocks()?;
    // Columns agree in a row exactly when their tuples agree in a coordinate.
    if let Some((p, q)) = agreeing_pair(g, g.t() as usize + 1) {
        let to_col = |pos: usize| (pos % cols) * rows + pos / cols;
        let (a, b) = (to_col(p).min(to_col(q)), to_col(p).max(to_col(q)));
        return Err(MatrixError::Invariant(MatrixWitness::Overlap {
            a,
            b,
            overlap: m.overlap(a, b),
        }));
    }
    Ok(m)
}

impl BinarySensingMatrix {
    /// Assembles a matrix from flat per-column row lists, checking shape and
    /// the one-entry-per-band structure only. [`Self::validate`] checks the
    /// block and overlap invariants.
    pub fn from_columns(
        n: u32,
        k: usize,
        t: u32,
        entries: Vec<u32>,
        provenance: Provenance,
    ) -> Result<Self, MatrixError> {
        crate::ges::check_index(n, k, t)?;
        let cols = (n as usize)
            .checked_pow(t + 1)
            .ok_or_else(|| MatrixError::Shape(format!("{n}^{} columns overflow", t + 1)))?;
        if entries.len() != cols * k {
            return Err(MatrixError::Shape(format!(
                "expected {} entries ({cols} columns x {k}), got {}",
                cols * k,
                entries.len()
            )));
        }
        let m = BinarySensingMatrix {
            n,
            k,
            t,
            rows: n as usize * k,
            cols,
            block_width: n as usize,
            entries,
            provenance,
        };
        for col in 0..cols {
            for (band, &r) in m.column(col).iter().enumerate() {
                if r as usize / n as usize != band {
                    return Err(MatrixError::Invariant(MatrixWitness::Band { col, band }));
                }
            }
        }
        Ok(m)
    }

    /// Block disjointness plus pairwise overlap `≤ t`, by direct comparison.
    pub fn validate(&self) -> Result<(), MatrixError> {
        self.check_blocks()?;
        let ov = crate::analysis::max_overlap(self);
        match ov.witness {
            Some((a, b)) if ov.max > self.t as usize => {
                Err(MatrixError::Invariant(MatrixWitness::Overlap {
                    a,
                    b,
                    overlap: ov.max,
                }))
            }
            _ => Ok(()),
        }
    }

    fn check_blocks(&self) -> Result<(), MatrixError> {
        let w = self.block_width;
        let mut owner = vec![usize::MAX; self.rows];
        for block in 0..self.cols / w {
            for a in block * w..(block + 1) * w {
                for &r in self.column(a) {
                    let slot = &mut owner[r as usize];
                    if *slot != usize::MAX && *slot / w == block {
                        return Err(MatrixError::Invariant(MatrixWitness::BlockCollision {
                            block,
                            a: *slot,
                            b: a,
                        }));
                    }
                    *slot = a;
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Native block width `n`; block `b` is columns `b·n .. (b+1)·n`.
    pub fn block_width(&self) -> usize {
        self.block_width
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Normalization factor `1/√k`.
    pub fn scale(&self) -> f64 {
        1.0 / libm::sqrt(self.k as f64)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Sorted row indices of column `j`; entry `l` lies in band `l`.
    pub fn column(&self, j: usize) -> &[u32] {
        &self.entries[j * self.k..(j + 1) * self.k]
    }

    /// Flat column-major entry list.
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Number of rows shared by columns `i` and `j`.
    pub fn overlap(&self, i: usize, j: usize) -> usize {
        crate::ges::intersection(self.column(i), self.column(j)).unwrap_or(0)
    }

    /// `y = Φx` (times `1/√k` when `normalized`).
    pub fn apply(&self, x: &[f64], normalized: bool) -> Result<Vec<f64>, MatrixError> {
        if x.len() != self.cols {
            return Err(MatrixError::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for &r in self.column(j) {
                    y[r as usize] += xj;
                }
            }
        }
        if normalized {
            let s = self.scale();
            y.iter_mut().for_each(|v| *v *= s);
        }
        Ok(y)
    }

    /// `Φᵀy` (times `1/√k` when `normalized`).
    pub fn apply_adjoint(&self, y: &[f64], normalized: bool) -> Result<Vec<f64>, MatrixError> {
        if y.len() != self.rows {
            return Err(MatrixError::DimensionMismatch {
                expected: self.rows,
                got: y.len(),
            });
        }
        let s = if normalized { self.scale() } else { 1.0 };
        Ok((0..self.cols)
            .map(|j| self.column(j).iter().map(|&r| y[r as usize]).sum::<f64>() * s)
            .collect())
    }

    /// Dense 0/1 column `j`, for display and tests.
    pub fn dense_column(&self, j: usize) -> Vec<u8> {
        let mut v = vec![0u8; self.rows];
        for &r in self.column(j) {
            v[r as usize] = 1;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ges::{construct_es, construct_ges};
    use proptest::prelude::*;

    #[test]
    fn column_vector_examples() {
        assert_eq!(column_vector(&[0, 0], 3, 2).unwrap(), [0, 3]);
        assert_eq!(column_vector(&[1, 2], 3, 2).unwrap(), [1, 5]);
        assert_eq!(column_vector(&[2, 1], 3, 2).unwrap(), [2, 4]);
        assert_eq!(
            column_vector(&[0, 3], 3, 2),
            Err(MatrixError::ValueOutOfRange {
                coordinate: 1,
                value: 3,
                n: 3
            })
        );
        assert!(matches!(
            column_vector(&[0], 3, 2),
            Err(MatrixError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn phi_3_2_blocks() {
        let m = build_matrix(&construct_es(3, 2).unwrap()).unwrap();
        assert_eq!((m.rows(), m.cols(), m.nnz()), (6, 9, 18));
        // Columns of the three 6x3 blocks, block after block.
        let expect: [[u8; 6]; 9] = [
            [1, 0, 0, 1, 0, 0],
            [0, 1, 0, 0, 0, 1],
            [0, 0, 1, 0, 1, 0],
            [0, 1, 0, 0, 1, 0],
            [0, 0, 1, 1, 0, 0],
            [1, 0, 0, 0, 0, 1],
            [0, 0, 1, 0, 0, 1],
            [1, 0, 0, 0, 1, 0],
            [0, 1, 0, 1, 0, 0],
        ];
        for (j, col) in expect.iter().enumerate() {
            assert_eq!(m.dense_column(j), col, "column {j}");
        }
    }

    #[test]
    fn sizes_and_apply() {
        let m = build_matrix(&construct_ges(5, 4, 2).unwrap()).unwrap();
        assert_eq!((m.rows(), m.cols(), m.block_width()), (20, 125, 5));
        let ones = build_matrix(&construct_es(3, 2).unwrap()).unwrap();
        assert_eq!(ones.apply(&[1.0; 9], false).unwrap(), vec![3.0; 6]);
        let mut e = vec![0.0; 125];
        e[17] = 1.0;
        let y = m.apply(&e, false).unwrap();
        let back = m.apply_adjoint(&y, false).unwrap();
        assert_eq!(back[17], 4.0);
        assert!(back
            .iter()
            .enumerate()
            .all(|(j, &v)| j == 17 || v as u32 <= 2));
        assert!(matches!(
            m.apply(&[0.0; 3], true),
            Err(MatrixError::DimensionMismatch { expected: 125, got: 3 })
        ));
        assert!(matches!(
            m.apply_adjoint(&[0.0; 3], true),
            Err(MatrixError::DimensionMismatch { expected: 20, got: 3 })
        ));
    }

    #[test]
    fn from_columns_structure() {
        let m = build_matrix(&construct_es(3, 2).unwrap()).unwrap();
        let again = BinarySensingMatrix::from_columns(
            3,
            2,
            1,
            m.entries().to_vec(),
            m.provenance().clone(),
        )
        .unwrap();
        assert_eq!(again, m);
        again.validate().unwrap();

        let mut bad = m.entries().to_vec();
        bad[1] = 2;
        assert_eq!(
            BinarySensingMatrix::from_columns(3, 2, 1, bad, Provenance::default()),
            Err(MatrixError::Invariant(MatrixWitness::Band { col: 0, band: 1 }))
        );

        // A single copied column collides inside its new block.
        let mut dup = m.entries().to_vec();
        dup.copy_within(2..4, 8);
        let dup = BinarySensingMatrix::from_columns(3, 2, 1, dup, Provenance::default()).unwrap();
        assert_eq!(
            dup.validate(),
            Err(MatrixError::Invariant(MatrixWitness::BlockCollision {
                block: 1,
                a: 3,
                b: 4
            }))
        );
        // A copied block stays block-disjoint but repeats columns.
        let mut dup = m.entries().to_vec();
        dup.copy_within(0..6, 6);
        let dup = BinarySensingMatrix::from_columns(3, 2, 1, dup, Provenance::default()).unwrap();
        assert_eq!(
            dup.validate(),
            Err(MatrixError::Invariant(MatrixWitness::Overlap {
                a: 0,
                b: 3,
                overlap: 2
            }))
        );
    }

    proptest! {
        #[test]
        fn adjointness(x in proptest::collection::vec(-100i32..100, 64),
                       y in proptest::collection::vec(-100i32..100, 56)) {
            let m = build_matrix(&construct_es(8, 7).unwrap()).unwrap();
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let y: Vec<f64> = y.into_iter().map(f64::from).collect();
            let lhs: f64 = m.apply(&x, false).unwrap().iter().zip(&y).map(|(a, b)| a * b).sum();
            let rhs: f64 = m.apply_adjoint(&y, false).unwrap().iter().zip(&x).map(|(a, b)| a * b).sum();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
