//! Complexes fibered over a finite base, with the boundary split into a
//! vertical part (inside fibers) and a horizontal part (across base cells).

mod io;

use crate::chain::{ChainComplex, ChainError, GradedMap};
use crate::exact_linalg::{IntMatrix, LinalgError};
use crate::rebuild::{RebuildError, Rebuilding};
use crate::text::ParseError;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StackError {
    #[error("∂² ≠ 0 in total degree {degree}, on columns over base cell {cell}")]
    NotAComplex { degree: usize, cell: usize },
    #[error("horizontal map {from} → {to} does not lower the base dimension")]
    Filtration { from: usize, to: usize },
    #[error("{0}")]
    Mismatch(String),
    #[error("cannot read `{path}`: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Rebuild(#[from] RebuildError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseCell {
    pub id: String,
    pub dim: usize,
}

impl BaseCell {
    pub fn new(id: impl Into<String>, dim: usize) -> Self {
        BaseCell { id: id.into(), dim }
    }
}

/// Base cells are indexed `0..n` in the order given; that order is the
/// basis order of the total complex. A horizontal map for `(e, e′)` has degree shift
/// `dim e − dim e′ − 1` on fiber degrees and already carries its sign.
///
/// Total degree `n` is spanned by `C_{n − dim e}(F_e)` over `e` in id order.
#[derive(Clone, Debug, PartialEq)]
pub struct StackComplex {
    base: Vec<BaseCell>,
    base_dims: Vec<usize>,
    fibers: Vec<ChainComplex>,
    horizontal: BTreeMap<(usize, usize), GradedMap>,
}

impl StackComplex {
    pub fn new(
        base: Vec<BaseCell>,
        fibers: Vec<ChainComplex>,
        horizontal: BTreeMap<(usize, usize), GradedMap>,
    ) -> Result<Self, StackError> {
        let base_dims: Vec<usize> = base.iter().map(|b| b.dim).collect();
        for (i, b) in base.iter().enumerate() {
            if base[..i].iter().any(|o| o.id == b.id) {
                return Err(StackError::Mismatch(format!("duplicate base cell `{}`", b.id)));
            }
        }
        if base_dims.len() != fibers.len() || base_dims.is_empty() {
            return Err(StackError::Mismatch(format!(
                "{} base cells but {} fibers",
                base_dims.len(),
                fibers.len()
            )));
        }
        for (&(e, f), m) in &horizontal {
            if e >= base_dims.len() || f >= base_dims.len() {
                return Err(StackError::Mismatch(format!("horizontal map {e} → {f} names a missing base cell")));
            }
            if base_dims[f] >= base_dims[e] {
                return Err(StackError::Filtration { from: e, to: f });
            }
            let shift = base_dims[e] - base_dims[f] - 1;
            if m.degree_shift() != shift {
                return Err(StackError::Mismatch(format!(
                    "horizontal map {e} → {f} has shift {}, expected {shift}",
                    m.degree_shift()
                )));
            }
            if m.components().len() != fibers[e].top_degree() + 1 {
                return Err(StackError::Mismatch(format!(
                    "horizontal map {e} → {f} needs {} components",
                    fibers[e].top_degree() + 1
                )));
            }
            m.check_shapes(&fibers[e], &fibers[f])?;
        }
        let s = StackComplex { base, base_dims, fibers, horizontal };
        s.total_complex()?;
        Ok(s)
    }

    pub fn base(&self) -> &[BaseCell] {
        &self.base
    }

    pub fn fibers(&self) -> &[ChainComplex] {
        &self.fibers
    }

    pub fn horizontal(&self) -> &BTreeMap<(usize, usize), GradedMap> {
        &self.horizontal
    }

    /// Highest total degree.
    pub fn top_degree(&self) -> usize {
        self.fibers.iter().zip(&self.base_dims).map(|(f, d)| f.top_degree() + d).max().unwrap()
    }

    /// Maximal base dimension; `(∂ʰσ)^i` vanishes for `i` above it.
    pub fn depth(&self) -> usize {
        *self.base_dims.iter().max().unwrap()
    }

    /// Sizes of the blocks `C_{n − dim e}(F_e)` in total degree `n`.
    fn block_sizes(&self, n: isize) -> Vec<usize> {
        self.fibers.iter().zip(&self.base_dims).map(|(f, &d)| fdim(f, n - d as isize)).collect()
    }

    fn vertical_blocks(&self, n: usize) -> IntMatrix {
        let parts: Vec<IntMatrix> = self
            .fibers
            .iter()
            .zip(&self.base_dims)
            .map(|(f, &d)| {
                let k = n as isize - d as isize;
                if k >= 1 {
                    f.boundary(k as usize).into_owned()
                } else {
                    IntMatrix::zeros(fdim(f, k - 1), fdim(f, k))
                }
            })
            .collect();
        let blocks: Vec<(usize, usize, &IntMatrix)> = parts.iter().enumerate().map(|(e, m)| (e, e, m)).collect();
        IntMatrix::from_blocks(&self.block_sizes(n as isize - 1), &self.block_sizes(n as isize), &blocks)
    }

    fn horizontal_blocks(&self, n: usize) -> IntMatrix {
        let mut owned = Vec::new();
        for (&(e, f), m) in &self.horizontal {
            let k = n as isize - self.base_dims[e] as isize;
            if k >= 0 {
                if let Some(c) = m.component(k as usize) {
                    owned.push((f, e, c.clone()));
                }
            }
        }
        let blocks: Vec<(usize, usize, &IntMatrix)> = owned.iter().map(|(f, e, m)| (*f, *e, m)).collect();
        IntMatrix::from_blocks(&self.block_sizes(n as isize - 1), &self.block_sizes(n as isize), &blocks)
    }

    /// Assembles `∂ = ∂ᵛᵉʳᵗ + ∂ʰᵒʳ`, checking `∂² = 0`.
    pub fn total_complex(&self) -> Result<ChainComplex, StackError> {
        let top = self.top_degree();
        let dims: Vec<usize> = (0..=top).map(|n| self.block_sizes(n as isize).iter().sum()).collect();
        let bds: Vec<IntMatrix> = (1..=top).map(|n| self.vertical_blocks(n).add(&self.horizontal_blocks(n))).collect();
        for n in 2..=top {
            let sq = bds[n - 2].mul(&bds[n - 1]);
            if let Some((_, c, _)) = sq.triplets().first() {
                let sizes = self.block_sizes(n as isize);
                let mut acc = 0;
                let cell = sizes.iter().position(|s| {
                    acc += s;
                    *c < acc
                });
                return Err(StackError::NotAComplex { degree: n, cell: cell.unwrap_or(0) });
            }
        }
        Ok(ChainComplex::new_unchecked(dims, bds)?)
    }
}

fn fdim(c: &ChainComplex, k: isize) -> usize {
    if k < 0 {
        0
    } else {
        c.dim(k as usize)
    }
}

/// Base = one vertex (cell 0) and one edge (cell 1), both fibers `C`,
/// `∂ʰ(c⊗edge) = (−1)^{deg c}(θ(c) − c)⊗vertex`.
pub fn mapping_torus_as_stack(c: &ChainComplex, theta: &GradedMap) -> Result<StackComplex, StackError> {
    let top = c.top_degree();
    if theta.components().len() != top + 1 || theta.degree_shift() != 0 {
        return Err(StackError::Mismatch("θ needs one degree-0 component per degree".into()));
    }
    if let Some(&j) = theta.chain_map_failures(c, c, top).first() {
        return Err(StackError::Mismatch(format!("θ is not a chain map in degree {j}")));
    }
    let comps = theta
        .components()
        .iter()
        .enumerate()
        .map(|(k, t)| t.sub(&IntMatrix::identity(c.dim(k))).scale(if k % 2 == 0 { 1 } else { -1 }))
        .collect();
    let mut horizontal = BTreeMap::new();
    horizontal.insert((1, 0), GradedMap::new(0, comps));
    StackComplex::new(vec![BaseCell::new("v", 0), BaseCell::new("e", 1)], vec![c.clone(), c.clone()], horizontal)
}

/// `Σ_{i=0}^{depth} X^i`, checking that `X^{depth+1} = 0`.
fn truncated_series(x: &IntMatrix, depth: usize) -> Result<IntMatrix, StackError> {
    let mut sum = IntMatrix::identity(x.rows());
    let mut p = IntMatrix::identity(x.rows());
    for _ in 0..depth {
        p = x.mul(&p);
        if p.is_zero() {
            return Ok(sum);
        }
        sum = sum.add(&p);
    }
    if !x.mul(&p).is_zero() {
        return Err(StackError::Mismatch("perturbation series does not terminate at the base depth".into()));
    }
    Ok(sum)
}

/// Replaces every fiber by the target of its rebuilding and perturbs the
/// maps through the horizontal boundary:
///
/// `g = k Σ(∂ʰσ)^i`, `h = Σ(σ∂ʰ)^i l`, `ρ = σ Σ(∂ʰσ)^i`,
/// `∂′ = ∂′ᵛ + k Σ(∂ʰσ)^i ∂ʰ l`,
///
/// with the series truncated at the base depth. Each fiber rebuilding must
/// run through the top degree of its fiber. The result is verified.
pub fn rebuild_stack(s: &StackComplex, fiber_rebuildings: &[Rebuilding]) -> Result<(StackComplex, Rebuilding), StackError> {
    let nb = s.base_dims.len();
    if fiber_rebuildings.len() != nb {
        return Err(StackError::Mismatch(format!("{} fiber rebuildings for {nb} base cells", fiber_rebuildings.len())));
    }
    let mut alpha = usize::MAX;
    for (e, r) in fiber_rebuildings.iter().enumerate() {
        let f = &s.fibers[e];
        if r.source != *f {
            return Err(StackError::Mismatch(format!("rebuilding {e} does not start at fiber {e}")));
        }
        if r.alpha != f.top_degree() || r.target.top_degree() != f.top_degree() {
            return Err(StackError::Mismatch(format!("rebuilding {e} must run through the fiber's top degree")));
        }
        if !r.verify()?.is_empty() {
            return Err(StackError::Mismatch(format!("rebuilding {e} does not verify on its fiber")));
        }
        if !r.is_full()? {
            alpha = alpha.min(r.alpha + s.base_dims[e]);
        }
    }
    let new_fibers: Vec<ChainComplex> = fiber_rebuildings.iter().map(|r| r.target.clone()).collect();
    let top = s.top_degree();
    let alpha = alpha.min(top);
    let depth = s.depth();
    let src_sizes = |n: isize| s.block_sizes(n);
    let dst_sizes = |n: isize| -> Vec<usize> { new_fibers.iter().zip(&s.base_dims).map(|(f, &d)| fdim(f, n - d as isize)).collect() };

    // Block-diagonal fiber maps in total degree n.
    let diag = |n: isize, pick: &dyn Fn(&Rebuilding, isize) -> IntMatrix, rows: &dyn Fn(isize) -> Vec<usize>, cols: &dyn Fn(isize) -> Vec<usize>, shift: isize| {
        let parts: Vec<IntMatrix> = fiber_rebuildings
            .iter()
            .zip(&s.base_dims)
            .map(|(r, &d)| pick(r, n - d as isize))
            .collect();
        let blocks: Vec<(usize, usize, &IntMatrix)> = parts.iter().enumerate().map(|(e, m)| (e, e, m)).collect();
        IntMatrix::from_blocks(&rows(n + shift), &cols(n), &blocks)
    };
    let comp = |m: &GradedMap, k: isize, rows: usize, cols: usize| -> IntMatrix {
        if k < 0 {
            return IntMatrix::zeros(rows, cols);
        }
        m.component(k as usize).cloned().unwrap_or_else(|| IntMatrix::zeros(rows, cols))
    };
    let k_of = |r: &Rebuilding, k: isize| comp(&r.g, k, fdim(&r.target, k), fdim(&r.source, k));
    let l_of = |r: &Rebuilding, k: isize| comp(&r.h, k, fdim(&r.source, k), fdim(&r.target, k));
    let s_of = |r: &Rebuilding, k: isize| comp(&r.rho, k, fdim(&r.source, k + 1), fdim(&r.source, k));
    let kk = |n: isize| diag(n, &k_of, &dst_sizes, &src_sizes, 0);
    let ll = |n: isize| diag(n, &l_of, &src_sizes, &dst_sizes, 0);
    let sig = |n: isize| diag(n, &s_of, &src_sizes, &src_sizes, 1);
    let hor = |n: isize| {
        if n < 1 || n as usize > top {
            IntMatrix::zeros(src_sizes(n - 1).iter().sum(), src_sizes(n).iter().sum())
        } else {
            s.horizontal_blocks(n as usize)
        }
    };
    // Σ(∂ʰσ)^i and Σ(σ∂ʰ)^i in total degree n.
    let fwd = |n: isize| truncated_series(&hor(n + 1).mul(&sig(n)), depth);
    let bwd = |n: isize| if n < 1 { Ok(IntMatrix::identity(src_sizes(n).iter().sum())) } else { truncated_series(&sig(n - 1).mul(&hor(n)), depth) };

    let mut g = Vec::with_capacity(alpha + 1);
    let mut h = Vec::with_capacity(alpha + 1);
    let mut rho = Vec::with_capacity(alpha);
    for n in 0..=alpha as isize {
        let f = fwd(n)?;
        g.push(kk(n).mul(&f));
        h.push(bwd(n)?.mul(&ll(n)));
        if n < alpha as isize {
            rho.push(sig(n).mul(&f));
        }
    }

    // New horizontal part: k Σ(∂ʰσ)^i ∂ʰ l, cut into base-cell blocks.
    let new_top = new_fibers.iter().zip(&s.base_dims).map(|(f, d)| f.top_degree() + d).max().unwrap();
    let mut pert: Vec<IntMatrix> = Vec::with_capacity(new_top);
    for n in 1..=new_top as isize {
        pert.push(kk(n - 1).mul(&fwd(n - 1)?).mul(&hor(n)).mul(&ll(n)));
    }
    let mut horizontal = BTreeMap::new();
    for e in 0..nb {
        for f in 0..nb {
            let mut comps = Vec::new();
            let mut any = false;
            for k in 0..=new_fibers[e].top_degree() {
                let n = k + s.base_dims[e];
                let kf = n as isize - 1 - s.base_dims[f] as isize;
                let rows = offsets(&dst_sizes(n as isize - 1), f);
                let cols = offsets(&dst_sizes(n as isize), e);
                let block = if n >= 1 && n <= new_top { pert[n - 1].submatrix(&rows, &cols) } else { IntMatrix::zeros(rows.len(), cols.len()) };
                any |= !block.is_zero();
                if kf < 0 && !block.is_zero() {
                    return Err(StackError::Filtration { from: e, to: f });
                }
                comps.push(block);
            }
            if any {
                if s.base_dims[f] >= s.base_dims[e] {
                    return Err(StackError::Filtration { from: e, to: f });
                }
                horizontal.insert((e, f), GradedMap::new(s.base_dims[e] - s.base_dims[f] - 1, comps));
            }
        }
    }
    let rebuilt = StackComplex::new(s.base.clone(), new_fibers, horizontal)?;
    let r = Rebuilding::new(alpha, s.total_complex()?, rebuilt.total_complex()?, GradedMap::new(0, g), GradedMap::new(0, h), GradedMap::new(1, rho))?;
    if let Some(v) = r.verify()?.first() {
        return Err(StackError::Mismatch(format!("rebuilt stack fails: {v}")));
    }
    Ok((rebuilt, r))
}

/// Global indices of block `e` within a degree's block layout.
fn offsets(sizes: &[usize], e: usize) -> Vec<usize> {
    let start: usize = sizes[..e].iter().sum();
    (start..start + sizes[e]).collect()
}
