//! Finite free chain complexes over ℤ and graded maps between them.

mod homology;
mod io;
mod ops;
pub mod random;

pub use homology::{
    check_bt3, check_gabber, check_universal_coefficients, euler_characteristic, gabber_bound, gabber_bound_with,
    homology, homology_all, homology_with, ln_big, Bt3Report, GabberReport, HomologyResult,
};
pub use ops::{direct_sum, shift, tensor_with_interval};

use crate::exact_linalg::{Caps, IntMatrix, LinalgError};
use crate::text::ParseError;
use num_bigint::BigInt;
use std::borrow::Cow;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("degree {degree} outside 0..={top}")]
    DegreeOutOfRange { degree: usize, top: usize },
    #[error("boundary ∂_{degree} has shape {found:?}, expected {expected:?}")]
    Shape { degree: usize, expected: (usize, usize), found: (usize, usize) },
    #[error("∂∘∂ is nonzero on C_{degree}")]
    NotAComplex { degree: usize },
    #[error("map component in degree {degree} has shape {found:?}, expected {expected:?}")]
    MapShape { degree: usize, expected: (usize, usize), found: (usize, usize) },
    #[error("label count in degree {degree} is {found}, expected {expected}")]
    Labels { degree: usize, expected: usize, found: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A bounded chain complex `C_D → … → C_0` of finitely generated free ℤ-modules.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    dims: Vec<usize>,
    // boundaries[j - 1] = ∂_j : C_j → C_{j-1}
    boundaries: Vec<IntMatrix>,
    labels: Option<Vec<Vec<String>>>,
    factors: Vec<OnceLock<Result<Vec<BigInt>, LinalgError>>>,
}

impl PartialEq for ChainComplex {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.boundaries == other.boundaries
    }
}

impl ChainComplex {
    /// Checks shapes and ∂∂ = 0.
    pub fn new(dims: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self, ChainError> {
        let c = Self::new_unchecked(dims, boundaries)?;
        if let Some(j) = c.first_nonzero_square() {
            return Err(ChainError::NotAComplex { degree: j });
        }
        Ok(c)
    }

    /// Checks shapes only.
    pub(crate) fn new_unchecked(dims: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self, ChainError> {
        assert!(!dims.is_empty(), "a chain complex needs at least degree 0");
        assert_eq!(boundaries.len(), dims.len() - 1, "need one boundary per positive degree");
        for (i, b) in boundaries.iter().enumerate() {
            let j = i + 1;
            let expected = (dims[j - 1], dims[j]);
            if b.shape() != expected {
                return Err(ChainError::Shape { degree: j, expected, found: b.shape() });
            }
        }
        let factors = (0..boundaries.len()).map(|_| OnceLock::new()).collect();
        Ok(ChainComplex { dims, boundaries, labels: None, factors })
    }

    /// The complex with a single generator in degree 0.
    pub fn point() -> Self {
        Self::new_unchecked(vec![1], vec![]).unwrap()
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self, ChainError> {
        for (j, l) in labels.iter().enumerate() {
            let expected = self.dims.get(j).copied().unwrap_or(0);
            if l.len() != expected {
                return Err(ChainError::Labels { degree: j, expected, found: l.len() });
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    fn first_nonzero_square(&self) -> Option<usize> {
        (2..=self.top_degree()).find(|&j| !self.boundaries[j - 2].mul(&self.boundaries[j - 1]).is_zero())
    }

    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `dim C_j`, zero outside `0..=D`.
    pub fn dim(&self, j: usize) -> usize {
        self.dims.get(j).copied().unwrap_or(0)
    }

    pub fn total_cells(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Number of cells of dimension ≤ j.
    pub fn skeleton_cells(&self, j: usize) -> usize {
        self.dims.iter().take(j + 1).sum()
    }

    /// `∂_j`, with zero maps outside `1..=D`.
    pub fn boundary(&self, j: usize) -> Cow<'_, IntMatrix> {
        if j >= 1 && j <= self.top_degree() {
            Cow::Borrowed(&self.boundaries[j - 1])
        } else {
            let rows = if j == 0 { 0 } else { self.dim(j - 1) };
            Cow::Owned(IntMatrix::zeros(rows, self.dim(j)))
        }
    }

    pub fn boundaries(&self) -> &[IntMatrix] {
        &self.boundaries
    }

    /// Invariant factors of `∂_j`, computed once and cached.
    pub fn boundary_factors(&self, j: usize, caps: &Caps) -> Result<&[BigInt], LinalgError> {
        if j == 0 || j > self.top_degree() {
            return Ok(&[]);
        }
        self.factors[j - 1]
            .get_or_init(|| crate::exact_linalg::invariant_factors(&self.boundaries[j - 1], caps))
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(|e| e.clone())
    }

    /// Truncation to degrees `0..=d`.
    pub fn truncate(&self, d: usize) -> ChainComplex {
        let d = d.min(self.top_degree());
        let mut c = Self::new_unchecked(self.dims[..=d].to_vec(), self.boundaries[..d].to_vec()).unwrap();
        if let Some(l) = &self.labels {
            c.labels = Some(l[..=d].to_vec());
        }
        c
    }
}

/// A family of matrices `f_j : C_j → D_{j+shift}` for `j` in `0..=valid_top`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMap {
    shift: usize,
    components: Vec<IntMatrix>,
}

impl GradedMap {
    pub fn new(shift: usize, components: Vec<IntMatrix>) -> Self {
        GradedMap { shift, components }
    }

    /// Validates component shapes against the two complexes.
    pub fn checked(
        shift: usize,
        components: Vec<IntMatrix>,
        source: &ChainComplex,
        target: &ChainComplex,
    ) -> Result<Self, ChainError> {
        let m = GradedMap { shift, components };
        m.check_shapes(source, target)?;
        Ok(m)
    }

    pub fn check_shapes(&self, source: &ChainComplex, target: &ChainComplex) -> Result<(), ChainError> {
        for (j, c) in self.components.iter().enumerate() {
            let expected = (target.dim(j + self.shift), source.dim(j));
            if c.shape() != expected {
                return Err(ChainError::MapShape { degree: j, expected, found: c.shape() });
            }
        }
        Ok(())
    }

    pub fn identity(c: &ChainComplex, top: usize) -> Self {
        GradedMap { shift: 0, components: (0..=top).map(|j| IntMatrix::identity(c.dim(j))).collect() }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex, shift: usize, top: usize) -> Self {
        GradedMap {
            shift,
            components: (0..=top).map(|j| IntMatrix::zeros(target.dim(j + shift), source.dim(j))).collect(),
        }
    }

    pub fn degree_shift(&self) -> usize {
        self.shift
    }

    /// Highest degree with a stored component; `None` for an empty map.
    pub fn valid_top(&self) -> Option<usize> {
        self.components.len().checked_sub(1)
    }

    pub fn components(&self) -> &[IntMatrix] {
        &self.components
    }

    pub fn component(&self, j: usize) -> Option<&IntMatrix> {
        self.components.get(j)
    }

    pub fn into_components(self) -> Vec<IntMatrix> {
        self.components
    }

    /// Degrees `j` in `1..=top` where `∂ f_j ≠ f_{j-1} ∂`.
    pub fn chain_map_failures(&self, source: &ChainComplex, target: &ChainComplex, top: usize) -> Vec<usize> {
        assert_eq!(self.shift, 0, "chain map identity applies to degree-0 maps");
        (1..=top.min(self.components.len().saturating_sub(1)))
            .filter(|&j| {
                target.boundary(j).mul(&self.components[j]) != self.components[j - 1].mul(&source.boundary(j))
            })
            .collect()
    }
}
