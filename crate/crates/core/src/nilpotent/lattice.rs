//! Cubical cell structure on `ℝ^n / Λ` and equivariant cellular lifts of
//! linear maps.
//!
//! A cell is a pair `(S, p)`: the unit cube spanned by the coordinate
//! directions in the bitmask `S` with lowest corner `p ∈ ℤ^n`. Cells are
//! ordered recursively along the last coordinate, matching the
//! mapping-torus layout `[F⊗[0] slab by slab, F⊗[I] slab by slab]`.

use super::hnf::{mat_vec, Hnf};
use super::NilpotentError;
use crate::chain::{ChainComplex, GradedMap};
use crate::exact_linalg::IntMatrix;
use std::collections::HashMap;

/// An integral chain in the cubical structure of `ℝ^n`.
pub(crate) type CubeChain = HashMap<(u32, Vec<i64>), i64>;

#[derive(Clone, Debug)]
pub struct LatticeCover {
    lattice: Hnf,
    /// `prefix[k][j]`: `j`-cells of the cover restricted to the first `k` coordinates.
    prefix: Vec<Vec<usize>>,
    cells: Vec<Vec<(u32, Vec<i64>)>>,
    complex: ChainComplex,
}

/// `∂(S, p) = Σ_r (−1)^r [(S∖s_r, p + e_{s_r}) − (S∖s_r, p)]` over the bits of `S` in order.
pub(crate) fn cube_boundary(mask: u32, p: &[i64]) -> Vec<(u32, Vec<i64>, i64)> {
    let mut out = Vec::new();
    let mut r = 0;
    for s in 0..p.len() {
        if mask & (1 << s) == 0 {
            continue;
        }
        let sign = if r % 2 == 0 { 1 } else { -1 };
        let face = mask & !(1 << s);
        let mut q = p.to_vec();
        q[s] += 1;
        out.push((face, q, sign));
        out.push((face, p.to_vec(), -sign));
        r += 1;
    }
    out
}

impl LatticeCover {
    pub fn new(lattice: Hnf) -> Result<LatticeCover, NilpotentError> {
        let n = lattice.rank();
        if n > 16 {
            return Err(NilpotentError::Invalid("lattice rank above 16 is not supported".into()));
        }
        let mut prefix = vec![vec![1usize]];
        for k in 0..n {
            let l = lattice.get(k, k) as usize;
            let prev = &prefix[k];
            let next: Vec<usize> = (0..=k + 1)
                .map(|j| l * (prev.get(j).copied().unwrap_or(0) + j.checked_sub(1).map_or(0, |i| prev[i])))
                .collect();
            prefix.push(next);
        }
        let dims = prefix[n].clone();
        let mut cells: Vec<Vec<(u32, Vec<i64>)>> = dims.iter().map(|&d| vec![(0, Vec::new()); d]).collect();
        let diag: Vec<i64> = (0..n).map(|k| lattice.get(k, k)).collect();
        let index = lattice.index() as usize;
        let mut p = vec![0i64; n];
        let mut cover = LatticeCover { lattice, prefix, cells: Vec::new(), complex: ChainComplex::point() };
        for _ in 0..index {
            for mask in 0u32..(1 << n) {
                let j = mask.count_ones() as usize;
                let i = cover.index_canonical(mask, &p);
                cells[j][i] = (mask, p.clone());
            }
            for k in 0..n {
                p[k] += 1;
                if p[k] < diag[k] {
                    break;
                }
                p[k] = 0;
            }
        }
        let mut boundaries = Vec::with_capacity(n);
        for j in 1..=n {
            let cols = cells[j]
                .iter()
                .map(|(mask, p)| {
                    cube_boundary(*mask, p).into_iter().map(|(f, q, s)| (cover.locate(f, q) as u32, s)).collect()
                })
                .collect();
            boundaries.push(IntMatrix::from_columns_i64(dims[j - 1], cols));
        }
        cover.cells = cells;
        cover.complex = ChainComplex::new_unchecked(dims, boundaries).map_err(NilpotentError::from)?;
        Ok(cover)
    }

    pub fn lattice(&self) -> &Hnf {
        &self.lattice
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn into_complex(self) -> ChainComplex {
        self.complex
    }

    /// `(S, p)` of the `i`-th cell in degree `j`, with `p` canonical.
    pub fn cell(&self, j: usize, i: usize) -> (u32, &[i64]) {
        let (m, p) = &self.cells[j][i];
        (*m, p)
    }

    /// Index in degree `|S|` of the cell `(S, p)` for any `p ∈ ℤ^n`.
    pub fn locate(&self, mask: u32, mut p: Vec<i64>) -> usize {
        self.lattice.reduce(&mut p);
        self.index_canonical(mask, &p)
    }

    fn index_canonical(&self, mask: u32, p: &[i64]) -> usize {
        let mut idx = 0;
        let mut j = mask.count_ones() as usize;
        for k in (0..p.len()).rev() {
            let f = &self.prefix[k];
            let i = p[k] as usize;
            let l = self.lattice.get(k, k) as usize;
            if mask & (1 << k) == 0 {
                idx += i * f.get(j).copied().unwrap_or(0);
            } else {
                idx += l * f.get(j).copied().unwrap_or(0) + i * f[j - 1];
                j -= 1;
            }
        }
        idx
    }
}

/// Contracting homotopy `s` of the cubical chains of `ℝ^n` onto the origin:
/// tensor product of the one-dimensional contractions, first coordinate first.
pub(crate) fn contract(chain: &CubeChain) -> CubeChain {
    let mut out = CubeChain::new();
    for ((mask, p), &c) in chain {
        if c == 0 {
            continue;
        }
        for k in 0..p.len() {
            if mask & (1 << k) != 0 {
                break;
            }
            let mut q = p.clone();
            q[..k].iter_mut().for_each(|v| *v = 0);
            let (range, sign) = if p[k] >= 0 { (0..p[k], 1) } else { (p[k]..0, -1) };
            for i in range {
                q[k] = i;
                *out.entry((mask | (1 << k), q.clone())).or_insert(0) += sign * c;
            }
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// Equivariant cellular lift `θ̃` of a linear map `M` of `ℤ^n`:
/// `θ̃(v_p) = v_{Mp}`, `θ̃(S, 0) = s(θ̃(∂(S, 0)))`, `θ̃(S, p) = θ̃(S, 0) + Mp`.
#[derive(Clone, Debug)]
pub struct CubicalLift {
    m: Vec<Vec<i64>>,
    /// Image of `(S, 0)` for every mask `S`.
    reps: Vec<Vec<(u32, Vec<i64>, i64)>>,
}

impl CubicalLift {
    pub fn new(m: Vec<Vec<i64>>) -> Result<CubicalLift, NilpotentError> {
        let n = m.len();
        if m.iter().any(|r| r.len() != n) {
            return Err(NilpotentError::Invalid("lift matrix must be square".into()));
        }
        let mut masks: Vec<u32> = (0..1u32 << n).collect();
        masks.sort_by_key(|m| m.count_ones());
        let mut reps: Vec<Vec<(u32, Vec<i64>, i64)>> = vec![Vec::new(); 1 << n];
        reps[0] = vec![(0, vec![0; n], 1)];
        let lift = CubicalLift { m, reps: Vec::new() };
        for &mask in &masks[1..] {
            let mut z = CubeChain::new();
            for (face, q, s) in cube_boundary(mask, &vec![0; n]) {
                let shift = mat_vec(&lift.m, &q)?;
                for (fm, fp, c) in &reps[face as usize] {
                    let key: Vec<i64> = fp.iter().zip(&shift).map(|(a, b)| a + b).collect();
                    *z.entry((*fm, key)).or_insert(0) += s * c;
                }
            }
            z.retain(|_, v| *v != 0);
            let mut img: Vec<(u32, Vec<i64>, i64)> = contract(&z).into_iter().map(|((m, p), c)| (m, p, c)).collect();
            img.sort();
            reps[mask as usize] = img;
        }
        Ok(CubicalLift { reps, ..lift })
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.m
    }

    /// `θ̃(S, p)` as a list of cells.
    pub fn image(&self, mask: u32, p: &[i64]) -> Result<Vec<(u32, Vec<i64>, i64)>, NilpotentError> {
        let mp = mat_vec(&self.m, p)?;
        Ok(self.reps[mask as usize]
            .iter()
            .map(|(m, q, c)| (*m, q.iter().zip(&mp).map(|(a, b)| a + b).collect(), *c))
            .collect())
    }

    /// The induced chain map `ℝ^n/Λ → ℝ^n/Λ′`, followed by translation by `shift`.
    ///
    /// Requires `MΛ ⊆ Λ′`.
    pub fn descend(&self, from: &LatticeCover, to: &LatticeCover, shift: &[i64]) -> Result<GradedMap, NilpotentError> {
        let n = self.m.len();
        for j in 0..n {
            let img = mat_vec(&self.m, &from.lattice.column(j))?;
            if !to.lattice.contains(&img) {
                return Err(NilpotentError::Invalid("the lift does not descend: MΛ is not inside the target lattice".into()));
            }
        }
        let mut comps = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let cols = (0..from.complex.dim(j))
                .map(|i| {
                    let (mask, p) = from.cell(j, i);
                    Ok(self
                        .image(mask, p)?
                        .into_iter()
                        .map(|(m, q, c)| {
                            let q: Vec<i64> = q.iter().zip(shift).map(|(a, b)| a + b).collect();
                            (to.locate(m, q) as u32, c)
                        })
                        .collect())
                })
                .collect::<Result<Vec<_>, NilpotentError>>()?;
            comps.push(IntMatrix::from_columns_i64(to.complex.dim(j), cols));
        }
        Ok(GradedMap::new(0, comps))
    }
}
