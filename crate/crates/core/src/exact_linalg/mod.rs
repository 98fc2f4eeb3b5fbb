//! Exact sparse integer linear algebra.

mod csc;
mod elim;
mod matrix;
mod minors;
mod norm;
mod scalar;
mod smith;

pub use elim::{invariant_factors, rank, rank_mod_p};
pub use matrix::IntMatrix;
pub(crate) use matrix::{for_each_combined_column, SmallColumns};
pub use minors::{det_bareiss, pseudo_determinant_squared};
pub use norm::{coarse_upper, operator_norm, operator_norm_with, NormEstimate};
pub use smith::{normalize_diagonal, smith_normal_form, SmithDecomposition};

use crate::text::{Lines, ParseError};
use num_bigint::BigInt;
use thiserror::Error;

/// Resource limits for exact computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest bit length allowed for intermediate entries.
    pub max_bits: u64,
    /// Largest number of r×r minors enumerated for a pseudo-determinant.
    pub max_minors: u64,
    /// Iteration cap for norm estimation.
    pub max_iterations: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_bits: 1 << 16, max_minors: 1_000_000, max_iterations: 10_000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("intermediate entry of {bits} bits exceeds the cap of {cap} bits")]
    BitCap { bits: u64, cap: u64 },
    #[error("{count} minors exceed the cap of {cap}")]
    MinorCap { count: u64, cap: u64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl IntMatrix {
    /// Parses the triplet exchange format.
    pub fn parse_triplets(text: &str) -> Result<IntMatrix, LinalgError> {
        let mut lines = Lines::new(text);
        let m = Self::read_triplets(&mut lines)?;
        if let Some((ln, _)) = lines.next_line() {
            return Err(ParseError::new(ln, "trailing content after matrix").into());
        }
        Ok(m)
    }

    pub(crate) fn read_triplets(lines: &mut Lines<'_>) -> Result<IntMatrix, LinalgError> {
        let (hl, h) = lines.expect_ints::<usize>(3, "matrix header `rows cols nnz`")?;
        let (rows, cols, nnz) = (h[0], h[1], h[2]);
        let mut entries = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            let (ln, l) = lines.expect_line("matrix entry `row col value`")?;
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 {
                return Err(ParseError::new(ln, "expected `row col value`").into());
            }
            let r: usize = t[0].parse().map_err(|_| ParseError::new(ln, format!("invalid row `{}`", t[0])))?;
            let c: usize = t[1].parse().map_err(|_| ParseError::new(ln, format!("invalid column `{}`", t[1])))?;
            let v: BigInt = t[2].parse().map_err(|_| ParseError::new(ln, format!("invalid value `{}`", t[2])))?;
            if r >= rows || c >= cols {
                return Err(ParseError::new(ln, format!("entry ({r}, {c}) outside {rows}x{cols} (header on line {hl})"))
                    .into());
            }
            entries.push((r, c, v));
        }
        IntMatrix::from_triplets(rows, cols, entries)
    }
}
