//! Rebuildings `(X, X′, g, h, ρ)` with exact verification and measured quality.

mod induce;
mod io;
mod quality;

pub use induce::{induce_to_cover, max_attaching_multiplicity, CoverLiftData, InducedRebuilding};
pub use quality::{quality, quality_with, QualityReport};

use crate::chain::{ChainComplex, ChainError, GradedMap};
use crate::exact_linalg::{for_each_combined_column, IntMatrix, LinalgError};
use crate::text::ParseError;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RebuildError {
    #[error("{0}")]
    Mismatch(String),
    #[error("missing lift data for {0}")]
    MissingLift(&'static str),
    #[error("scale T must be at least 1, got {0}")]
    InvalidScale(f64),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Maps `g: X → X′`, `h: X′ → X` (degrees `0..=α`) and `ρ: X_j → X_{j+1}`
/// (degrees `0..α`) with `hg − 1 = ∂ρ + ρ∂` below `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rebuilding {
    pub alpha: usize,
    pub source: ChainComplex,
    pub target: ChainComplex,
    pub g: GradedMap,
    pub h: GradedMap,
    pub rho: GradedMap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Identity {
    ChainMapG,
    ChainMapH,
    Homotopy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub degree: usize,
    pub identity: Identity,
    /// First basis column where the identity fails.
    pub column: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.identity {
            Identity::ChainMapG => "∂′g = g∂",
            Identity::ChainMapH => "∂h = h∂′",
            Identity::Homotopy => "hg − 1 = ∂ρ + ρ∂",
        };
        write!(f, "degree {}: {} fails at column {}", self.degree, what, self.column)
    }
}

/// Index of the first column of `Σ coeff·chain` that is nonzero.
fn first_nonzero_column(terms: &[(i64, Vec<&IntMatrix>)], ncols: usize, rows: usize) -> Option<usize> {
    let mut bad = None;
    for_each_combined_column(terms, ncols, rows, |c, col| {
        if col.is_empty() {
            true
        } else {
            bad = Some(c);
            false
        }
    });
    bad
}

impl Rebuilding {
    pub fn new(
        alpha: usize,
        source: ChainComplex,
        target: ChainComplex,
        g: GradedMap,
        h: GradedMap,
        rho: GradedMap,
    ) -> Result<Self, RebuildError> {
        let r = Rebuilding { alpha, source, target, g, h, rho };
        r.check_shapes()?;
        Ok(r)
    }

    /// `g = h = id`, `ρ = 0`.
    pub fn identity(c: &ChainComplex, alpha: usize) -> Self {
        Rebuilding {
            alpha,
            source: c.clone(),
            target: c.clone(),
            g: GradedMap::identity(c, alpha),
            h: GradedMap::identity(c, alpha),
            rho: GradedMap::zero(c, c, 1, alpha.saturating_sub(1)).truncated(alpha),
        }
    }

    pub fn check_shapes(&self) -> Result<(), RebuildError> {
        let (a, x, y) = (self.alpha, &self.source, &self.target);
        if x.top_degree() < a || y.top_degree() < a {
            return Err(RebuildError::Mismatch(format!(
                "α = {a} exceeds the top degree of source ({}) or target ({})",
                x.top_degree(),
                y.top_degree()
            )));
        }
        let want = |m: &GradedMap, name: &str, shift: usize, count: usize| {
            if m.degree_shift() != shift || m.components().len() != count {
                return Err(RebuildError::Mismatch(format!(
                    "{name} has shift {} and {} components, expected shift {shift} and {count}",
                    m.degree_shift(),
                    m.components().len()
                )));
            }
            Ok(())
        };
        want(&self.g, "g", 0, a + 1)?;
        want(&self.h, "h", 0, a + 1)?;
        want(&self.rho, "ρ", 1, a)?;
        self.g.check_shapes(x, y)?;
        self.h.check_shapes(y, x)?;
        self.rho.check_shapes(x, x)?;
        Ok(())
    }

    /// All failing integer identities; empty iff this is a rebuilding.
    pub fn verify(&self) -> Result<Vec<Violation>, RebuildError> {
        self.check_shapes()?;
        let (x, y) = (&self.source, &self.target);
        let mut out = Vec::new();
        for j in 1..=self.alpha {
            let (dx, dy) = (x.boundary(j), y.boundary(j));
            let (g, gl) = (&self.g.components()[j], &self.g.components()[j - 1]);
            if let Some(c) = first_nonzero_column(&[(1, vec![&dy, g]), (-1, vec![gl, &dx])], x.dim(j), y.dim(j - 1)) {
                out.push(Violation { degree: j, identity: Identity::ChainMapG, column: c });
            }
            let (h, hl) = (&self.h.components()[j], &self.h.components()[j - 1]);
            if let Some(c) = first_nonzero_column(&[(1, vec![&dx, h]), (-1, vec![hl, &dy])], y.dim(j), x.dim(j - 1)) {
                out.push(Violation { degree: j, identity: Identity::ChainMapH, column: c });
            }
        }
        for j in 0..self.alpha {
            let g = &self.g.components()[j];
            let h = &self.h.components()[j];
            let rho = &self.rho.components()[j];
            let up = x.boundary(j + 1);
            let down = x.boundary(j);
            let mut terms: Vec<(i64, Vec<&IntMatrix>)> = vec![(1, vec![h, g]), (-1, vec![]), (-1, vec![&up, rho])];
            if j > 0 {
                terms.push((-1, vec![&self.rho.components()[j - 1], &down]));
            }
            if let Some(c) = first_nonzero_column(&terms, x.dim(j), x.dim(j)) {
                out.push(Violation { degree: j, identity: Identity::Homotopy, column: c });
            }
        }
        out.sort();
        Ok(out)
    }

    /// True when `α` is the top degree of both complexes and the homotopy
    /// identity also holds in degree `α` with `ρ_α = 0`.
    pub fn is_full(&self) -> Result<bool, RebuildError> {
        let a = self.alpha;
        if a != self.source.top_degree() || a != self.target.top_degree() || !self.verify()?.is_empty() {
            return Ok(false);
        }
        let (h, g) = (&self.h.components()[a], &self.g.components()[a]);
        let down = self.source.boundary(a);
        let mut terms: Vec<(i64, Vec<&IntMatrix>)> = vec![(1, vec![h, g]), (-1, vec![])];
        if a > 0 {
            terms.push((-1, vec![&self.rho.components()[a - 1], &down]));
        }
        Ok(first_nonzero_column(&terms, self.source.dim(a), self.source.dim(a)).is_none())
    }

    /// The same maps with `α` lowered.
    pub fn restrict(&self, alpha: usize) -> Rebuilding {
        assert!(alpha <= self.alpha);
        Rebuilding {
            alpha,
            source: self.source.clone(),
            target: self.target.clone(),
            g: self.g.truncated(alpha + 1),
            h: self.h.truncated(alpha + 1),
            rho: self.rho.truncated(alpha),
        }
    }
}

impl GradedMap {
    /// Keeps the first `count` components.
    pub fn truncated(&self, count: usize) -> GradedMap {
        GradedMap::new(self.degree_shift(), self.components().iter().take(count).cloned().collect())
    }
}

/// `(g₂g₁, h₁h₂, ρ₁ + h₁ρ₂g₁)` for `R1: X → X′`, `R2: X′ → X″`, at `α = min(α₁, α₂)`.
pub fn compose(r1: &Rebuilding, r2: &Rebuilding) -> Result<Rebuilding, RebuildError> {
    compose_owned(r1.clone(), r2)
}

/// [`compose`] reusing the storage of `r1`.
pub fn compose_owned(r1: Rebuilding, r2: &Rebuilding) -> Result<Rebuilding, RebuildError> {
    if r1.target != r2.source {
        return Err(RebuildError::Mismatch("target of the first rebuilding differs from source of the second".into()));
    }
    let alpha = r1.alpha.min(r2.alpha);
    let g = (0..=alpha).map(|j| r2.g.components()[j].mul(&r1.g.components()[j])).collect();
    let h = (0..=alpha).map(|j| r1.h.components()[j].mul(&r2.h.components()[j])).collect();
    let h1 = r1.h.components();
    let g1 = r1.g.components();
    let mut rho = Vec::with_capacity(alpha);
    for j in 0..alpha {
        let inner = h1[j + 1].mul(&r2.rho.components()[j].mul(&g1[j]));
        rho.push(inner);
    }
    let rho1 = r1.rho.into_components();
    let rho = rho
        .into_iter()
        .zip(rho1)
        .map(|(inner, r)| if inner.is_zero() { r } else { r.add(&inner) })
        .collect();
    Ok(Rebuilding {
        alpha,
        source: r1.source,
        target: r2.target.clone(),
        g: GradedMap::new(0, g),
        h: GradedMap::new(0, h),
        rho: GradedMap::new(1, rho),
    })
}
