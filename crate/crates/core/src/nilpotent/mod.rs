//! Unipotent towers, their finite covers as iterated mapping tori, and the
//! two-step rebuildings that collapse those covers.

mod glue;
mod hnf;
mod lattice;
mod spec;
mod torus;
mod unwind;

pub use glue::glue_rebuilding;
pub use hnf::Hnf;
pub use lattice::{CubicalLift, LatticeCover};
pub use spec::{LevelSpec, SubgroupSpec};
pub use torus::{
    build_mapping_torus, fit_log_slope, theta_power_norm_scan, CellularSelfMap, MappingTorusSpec, NormScanRow,
};
pub use unwind::unwind_rebuilding;

use crate::chain::{ChainComplex, ChainError, GradedMap};
use crate::exact_linalg::{IntMatrix, LinalgError};
use crate::rebuild::{compose_owned, RebuildError, Rebuilding};
use crate::text::ParseError;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NilpotentError {
    #[error("{0}")]
    Invalid(String),
    #[error("unsupported tower: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Rebuild(#[from] RebuildError),
}

/// `ℤ → ℤ² → … → Γ`, each level an extension of the previous group by `ℤ`
/// through a unipotent matrix acting on `ℤ^{k}` (lower levels abelian).
#[derive(Clone, Debug, PartialEq)]
pub struct UnipotentTower {
    name: String,
    /// `levels[k]` is the `k × k` matrix of the `(k+1)`-th level.
    levels: Vec<Vec<Vec<i64>>>,
}

fn identity_rows(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// Coefficients of `det(xI − M)`, highest power first (Faddeev–LeVerrier).
fn characteristic_polynomial(m: &[Vec<i64>]) -> Option<Vec<i128>> {
    let n = m.len();
    let mm: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut coeffs = vec![1i128];
    let mut mk: Vec<Vec<i128>> = vec![vec![0; n]; n];
    for k in 1..=n {
        // M_k = M·M_{k−1} + c_{k−1} I
        let c_prev = *coeffs.last().unwrap();
        let mut next = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0i128;
                for (l, row) in mk.iter().enumerate() {
                    s = s.checked_add(mm[i][l].checked_mul(row[j])?)?;
                }
                if i == j {
                    s = s.checked_add(c_prev)?;
                }
                next[i][j] = s;
            }
        }
        mk = next;
        let mut tr = 0i128;
        for i in 0..n {
            for (l, row) in mk.iter().enumerate() {
                tr = tr.checked_add(mm[i][l].checked_mul(row[i])?)?;
            }
        }
        if tr % k as i128 != 0 {
            return None;
        }
        coeffs.push(-tr / k as i128);
    }
    Some(coeffs)
}

fn is_unipotent(m: &[Vec<i64>]) -> bool {
    let n = m.len();
    let Some(p) = characteristic_polynomial(m) else { return false };
    // (x − 1)^n
    let mut b = vec![1i128];
    for _ in 0..n {
        let mut nb = b.clone();
        nb.push(0);
        for i in 1..nb.len() {
            nb[i] -= b[i - 1];
        }
        b = nb;
    }
    p == b
}

impl UnipotentTower {
    /// Validates shapes, unipotency and that only the top level is twisted.
    pub fn new(name: impl Into<String>, levels: Vec<Vec<Vec<i64>>>) -> Result<Self, NilpotentError> {
        let name = name.into();
        for (k, m) in levels.iter().enumerate() {
            if m.len() != k || m.iter().any(|r| r.len() != k) {
                return Err(NilpotentError::Invalid(format!("level {} needs a {k}×{k} matrix", k + 1)));
            }
            if !is_unipotent(m) {
                return Err(NilpotentError::Invalid(format!(
                    "level {} matrix is not unipotent (characteristic polynomial ≠ (x−1)^{k})",
                    k + 1
                )));
            }
            if k + 1 < levels.len() && *m != identity_rows(k) {
                return Err(NilpotentError::Unsupported(format!(
                    "level {} is twisted but is not the top level",
                    k + 1
                )));
            }
        }
        Ok(UnipotentTower { name, levels })
    }

    /// `ℤ^d`.
    pub fn abelian(d: usize) -> Self {
        UnipotentTower { name: format!("z{d}"), levels: (0..d).map(identity_rows).collect() }
    }

    /// Integer Heisenberg group `ℤ² ⋊ ℤ`, twisted by `[[1,1],[0,1]]`.
    pub fn heisenberg() -> Self {
        let mut levels: Vec<Vec<Vec<i64>>> = (0..2).map(identity_rows).collect();
        levels.push(vec![vec![1, 1], vec![0, 1]]);
        UnipotentTower { name: "heisenberg".into(), levels }
    }

    /// `ℤ³ ⋊ ℤ` twisted by the single Jordan block `[[1,1,0],[0,1,1],[0,0,1]]`.
    pub fn composite_twist() -> Self {
        let mut levels: Vec<Vec<Vec<i64>>> = (0..3).map(identity_rows).collect();
        levels.push(vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]);
        UnipotentTower { name: "twist3".into(), levels }
    }

    /// `z<d>`, `heisenberg` or `twist3`.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "heisenberg" => Some(Self::heisenberg()),
            "twist3" => Some(Self::composite_twist()),
            _ => name.strip_prefix('z').and_then(|d| d.parse().ok()).filter(|&d| (1..=8).contains(&d)).map(Self::abelian),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn hirsch_length(&self) -> usize {
        self.levels.len()
    }

    pub fn level_matrix(&self, k: usize) -> &[Vec<i64>] {
        &self.levels[k]
    }

    /// Matrix of the top level, acting on `ℤ^{h−1}`.
    pub fn top_matrix(&self) -> &[Vec<i64>] {
        self.levels.last().map_or(&[], |m| m.as_slice())
    }

    pub fn is_abelian(&self) -> bool {
        self.levels.last().is_none_or(|m| *m == identity_rows(m.len()))
    }
}

/// The `ℓ` slabs `F_0, …, F_{ℓ−1}` of one level of a cover together with the
/// seam maps `Θ_i : F_i → F_{i+1 mod ℓ}`, and the assembled complex.
#[derive(Clone, Debug)]
pub struct LevelCover {
    pub fibers: Vec<Arc<ChainComplex>>,
    pub seams: Vec<GradedMap>,
    pub complex: ChainComplex,
}

impl LevelCover {
    pub fn jump(&self) -> usize {
        self.fibers.len()
    }

    /// Stacks the slabs as mapping cylinders glued along the seams.
    pub fn assemble(fibers: Vec<Arc<ChainComplex>>, seams: Vec<GradedMap>) -> Result<LevelCover, NilpotentError> {
        let l = fibers.len();
        assert!(l >= 1 && seams.len() == l);
        let f = fibers[0].dims().to_vec();
        if fibers.iter().any(|x| x.dims() != f.as_slice()) {
            return Err(NilpotentError::Invalid("slab fibers have different cell counts".into()));
        }
        let n = f.len() - 1;
        let fd = |j: isize| if j < 0 { 0 } else { f.get(j as usize).copied().unwrap_or(0) };
        let mut dims = Vec::with_capacity(n + 2);
        for j in 0..=n + 1 {
            dims.push(l * (fd(j as isize) + fd(j as isize - 1)));
        }
        let mut bds = Vec::with_capacity(n + 1);
        for j in 1..=n + 1 {
            let ji = j as isize;
            let s: i64 = if (j - 1) % 2 == 0 { 1 } else { -1 };
            let row_sizes: Vec<usize> = std::iter::repeat_n(fd(ji - 1), l).chain(std::iter::repeat_n(fd(ji - 2), l)).collect();
            let col_sizes: Vec<usize> = std::iter::repeat_n(fd(ji), l).chain(std::iter::repeat_n(fd(ji - 1), l)).collect();
            let own: Vec<_> = fibers.iter().map(|x| (x.boundary(j).into_owned(), x.boundary(j - 1).into_owned())).collect();
            let neg_id = IntMatrix::identity(fd(ji - 1)).scale(-s);
            let seam: Vec<IntMatrix> = seams.iter().map(|m| m.components()[j - 1].scale(s)).collect();
            let mut blocks: Vec<(usize, usize, &IntMatrix)> = Vec::new();
            for i in 0..l {
                blocks.push((i, i, &own[i].0));
                if j >= 2 {
                    blocks.push((l + i, l + i, &own[i].1));
                }
                blocks.push(((i + 1) % l, l + i, &seam[i]));
                blocks.push((i, l + i, &neg_id));
            }
            bds.push(IntMatrix::from_blocks(&row_sizes, &col_sizes, &blocks));
        }
        let complex = ChainComplex::new_unchecked(dims, bds)?;
        Ok(LevelCover { fibers, seams, complex })
    }
}

/// One level: `ℓ` slabs with fibers `ℝ^n / M^iΛ₁`, seams the lift of `M`,
/// the last one followed by translation by `−M^ℓ a`.
pub(crate) fn build_level(lower: &Hnf, jump: usize, correction: &[i64], m: &[Vec<i64>]) -> Result<LevelCover, NilpotentError> {
    let n = lower.rank();
    let lift = CubicalLift::new(m.to_vec())?;
    let twisted = *m != identity_rows(n);
    let mut lattices = vec![lower.clone()];
    if twisted {
        for i in 1..=jump {
            lattices.push(lattices[i - 1].transform(m)?);
        }
        if lattices[jump] != *lower {
            return Err(NilpotentError::Invalid("M^ℓ does not preserve the lower lattice".into()));
        }
    }
    let covers: Vec<Arc<LatticeCover>> = if twisted {
        lattices[..jump].iter().map(|h| LatticeCover::new(h.clone()).map(Arc::new)).collect::<Result<_, _>>()?
    } else {
        vec![Arc::new(LatticeCover::new(lower.clone())?); jump]
    };
    let ml = hnf::mat_vec(&hnf::mat_pow(m, jump as u64)?, correction)?;
    let back: Vec<i64> = ml.iter().map(|v| -v).collect();
    let zero = vec![0; n];
    let mut seams = Vec::with_capacity(jump);
    let mut plain_seam: Option<GradedMap> = None;
    for i in 0..jump {
        let last = i + 1 == jump;
        let seam = if !twisted && !last {
            plain_seam.get_or_insert_with(|| GradedMap::identity(covers[0].complex(), n)).clone()
        } else {
            let to = &covers[(i + 1) % jump];
            lift.descend(&covers[i], to, if last { &back } else { &zero })?
        };
        seams.push(seam);
    }
    let fibers = if twisted {
        covers.iter().map(|c| Arc::new(c.complex().clone())).collect()
    } else {
        vec![Arc::new(covers[0].complex().clone()); jump]
    };
    LevelCover::assemble(fibers, seams)
}

/// The cover of `Γ` for `sub`, as the top level's slab structure.
pub fn build_cover(tower: &UnipotentTower, sub: &SubgroupSpec) -> Result<LevelCover, NilpotentError> {
    sub.validate(tower)?;
    let h = tower.hirsch_length();
    if h == 0 {
        let p = Arc::new(ChainComplex::point());
        return Ok(LevelCover { fibers: vec![p.clone()], seams: vec![GradedMap::identity(&p, 0)], complex: (*p).clone() });
    }
    let top = &sub.levels[h - 1];
    build_level(&sub.lower_lattice(h - 1)?, top.jump as usize, &top.correction, tower.top_matrix())
}

fn rebuild_level(lower: &Hnf, jump: usize, correction: &[i64], m: &[Vec<i64>]) -> Result<Rebuilding, NilpotentError> {
    let level = build_level(lower, jump, correction, m)?;
    let (r1, torus) = unwind_rebuilding(&level)?;
    drop(level);
    let fiber = rebuild_lattice(lower)?;
    let r2 = glue_rebuilding(&torus, &fiber)?;
    Ok(compose_owned(r1, &r2)?)
}

/// Rebuilding of `ℝ^n / Λ` onto the one-vertex torus `T^n`, level by level.
pub fn rebuild_lattice(lattice: &Hnf) -> Result<Rebuilding, NilpotentError> {
    let n = lattice.rank();
    if n == 0 {
        return Ok(Rebuilding::identity(&ChainComplex::point(), 0));
    }
    let col = lattice.column(n - 1);
    rebuild_level(&lattice.leading(n - 1), lattice.get(n - 1, n - 1) as usize, &col[..n - 1], &identity_rows(n - 1))
}

/// Rebuilding of the cover for `sub` onto a complex with `C(h, j)` cells in
/// degree `j` when the tower is abelian. `α` is the Hirsch length.
pub fn rebuild_unipotent(tower: &UnipotentTower, sub: &SubgroupSpec) -> Result<Rebuilding, NilpotentError> {
    sub.validate(tower)?;
    let h = tower.hirsch_length();
    if h == 0 {
        return Ok(Rebuilding::identity(&ChainComplex::point(), 0));
    }
    let top = &sub.levels[h - 1];
    rebuild_level(&sub.lower_lattice(h - 1)?, top.jump as usize, &top.correction, tower.top_matrix())
}
