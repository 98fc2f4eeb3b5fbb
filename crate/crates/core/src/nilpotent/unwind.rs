use super::torus::{twisted_cylinder, MappingTorusSpec};
use super::{LevelCover, NilpotentError};
use crate::chain::GradedMap;
use crate::exact_linalg::{IntMatrix, SmallColumns};
use crate::rebuild::Rebuilding;

fn overflow() -> NilpotentError {
    NilpotentError::Invalid("unwind homotopy entries exceed 64 bits".into())
}

/// `v ↦ Θ v` on a sparse column, with a dense scratch row.
fn apply(m: &IntMatrix, v: &[(u32, i64)], scratch: &mut [i64], touched: &mut Vec<u32>) -> Result<Vec<(u32, i64)>, NilpotentError> {
    for &(c, x) in v {
        let (ri, rv) = m.small_col(c as usize).ok_or_else(overflow)?;
        for (r, a) in ri.iter().zip(rv) {
            let slot = &mut scratch[*r as usize];
            if *slot == 0 {
                touched.push(*r);
            }
            *slot = a.checked_mul(x).and_then(|p| slot.checked_add(p)).ok_or_else(overflow)?;
        }
    }
    touched.sort_unstable();
    let out = touched.iter().map(|&r| (r, std::mem::take(&mut scratch[r as usize]))).filter(|e| e.1 != 0).collect();
    touched.clear();
    Ok(out)
}

/// Collapses the `ℓ` slabs of a level onto a single mapping torus of
/// `θ₁ = Θ_{ℓ−1}⋯Θ_0` on `F_0`.
///
/// With `Θ^{i→k} = Θ_{k−1}⋯Θ_i`:
/// `g(c_(i)⊗[0]) = Θ^{i→ℓ}c⊗[0]`, `g(c_(0)⊗[I]) = c⊗[I]`, `g(c_(i>0)⊗[I]) = 0`;
/// `h(c⊗[0]) = c_(0)⊗[0]`, `h(c⊗[I]) = Σ_i Θ^{0→i}c⊗[I]_(i)`;
/// `ρ(c_(i>0)⊗[0]) = (−1)^{dim c} Σ_{k=i}^{ℓ−1} Θ^{i→k}c⊗[I]_(k)`, zero elsewhere.
/// The identities hold in every degree, so `α` is the top degree.
pub fn unwind_rebuilding(level: &LevelCover) -> Result<(Rebuilding, MappingTorusSpec), NilpotentError> {
    let l = level.jump();
    let f0 = level.fibers[0].as_ref();
    let n = f0.top_degree();
    let f = |j: isize| if j < 0 { 0 } else { f0.dim(j as usize) };
    let seam = |i: usize, j: usize| &level.seams[i].components()[j];

    // suffix[i][j] = Θ^{i→ℓ} for i in 1..=ℓ, prefix[i][j] = Θ^{0→i} for i in 0..ℓ.
    let mut suffix: Vec<Vec<IntMatrix>> = vec![Vec::new(); l + 1];
    suffix[l] = (0..=n).map(|j| IntMatrix::identity(f(j as isize))).collect();
    for i in (0..l).rev() {
        suffix[i] = (0..=n).map(|j| suffix[i + 1][j].mul(seam(i, j))).collect();
    }
    let mut prefix: Vec<Vec<IntMatrix>> = vec![(0..=n).map(|j| IntMatrix::identity(f(j as isize))).collect()];
    for i in 1..l {
        let next = (0..=n).map(|j| seam(i - 1, j).mul(&prefix[i - 1][j])).collect();
        prefix.push(next);
    }
    let theta1 = std::mem::take(&mut suffix[0]);
    let spec = MappingTorusSpec { fiber: f0.clone(), monodromy: GradedMap::new(0, theta1) };
    let target = twisted_cylinder(f0, spec.monodromy.components(), None)?;

    let mut g = Vec::with_capacity(n + 2);
    let mut h = Vec::with_capacity(n + 2);
    for j in 0..=n + 1 {
        let ji = j as isize;
        let (a, b) = (f(ji), f(ji - 1));
        let id_a = IntMatrix::identity(a);
        let id_b = IntMatrix::identity(b);
        let mut gb: Vec<(usize, usize, &IntMatrix)> = vec![(0, 0, &id_a), (1, l, &id_b)];
        if j <= n {
            for (i, s) in suffix.iter().enumerate().take(l).skip(1) {
                gb.push((0, i, &s[j]));
            }
        }
        let src_cols: Vec<usize> = std::iter::repeat_n(a, l).chain(std::iter::repeat_n(b, l)).collect();
        g.push(IntMatrix::from_blocks(&[a, b], &src_cols, &gb));

        let mut hb: Vec<(usize, usize, &IntMatrix)> = vec![(0, 0, &id_a)];
        if j >= 1 {
            for (i, p) in prefix.iter().enumerate() {
                hb.push((l + i, 1, &p[j - 1]));
            }
        }
        h.push(IntMatrix::from_blocks(&src_cols, &[a, b], &hb));
    }

    let mut rho = Vec::with_capacity(n + 1);
    let mut scratch = vec![0i64; (0..=n).map(|j| f(j as isize)).max().unwrap_or(0)];
    let mut touched = Vec::new();
    for j in 0..=n {
        let ji = j as isize;
        let (a, b, up) = (f(ji), f(ji - 1), f(ji + 1));
        let sign: i64 = if j % 2 == 0 { 1 } else { -1 };
        let rows = l * (up + a);
        let nnz_hint = if l > 1 { a * l * (l - 1) / 2 } else { 0 };
        let mut cols = SmallColumns::new(rows, l * (a + b), nnz_hint);
        for _ in 0..a {
            cols.push(Vec::new()).unwrap();
        }
        for i in 1..l {
            for c in 0..a {
                let mut v = vec![(c as u32, sign)];
                let mut col = Vec::new();
                for k in i..l {
                    let off = (l * up + k * a) as u32;
                    col.extend(v.iter().map(|&(r, x)| (r + off, x)));
                    if k + 1 < l {
                        v = apply(seam(k, j), &v, &mut scratch, &mut touched)?;
                    }
                }
                cols.push(col).ok_or_else(overflow)?;
            }
        }
        for _ in 0..l * b {
            cols.push(Vec::new()).unwrap();
        }
        rho.push(cols.finish());
    }

    let r = Rebuilding::new(n + 1, level.complex.clone(), target, GradedMap::new(0, g), GradedMap::new(0, h), GradedMap::new(1, rho))?;
    Ok((r, spec))
}
