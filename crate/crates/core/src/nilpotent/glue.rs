use super::torus::{twisted_cylinder, MappingTorusSpec};
use super::NilpotentError;
use crate::chain::GradedMap;
use crate::exact_linalg::IntMatrix;
use crate::rebuild::Rebuilding;

/// Transfers a fiber rebuilding `(k, l, σ): F → F′` to the mapping torus of
/// `θ₁` on `F`. The target is the mapping torus of `kθ₁l` (relative to `kl`):
///
/// `g(c⊗[I]) = kc⊗[I] − (−1)^{dim c} k(θ₁σc − σc)⊗[0]`,
/// `h(c⊗[I]) = lc⊗[I] + (−1)^{dim c} σ(θ₁lc − lc)⊗[0]`,
/// `ρ(c⊗[I]) = σc⊗[I] − (−1)^{dim c} σ(θ₁σc − σc)⊗[0]`,
/// and `k`, `l`, `σ` unchanged on `⊗[0]`.
///
/// `α` is one more than the fiber's when the fiber rebuilding is full.
pub fn glue_rebuilding(torus: &MappingTorusSpec, fiber: &Rebuilding) -> Result<Rebuilding, NilpotentError> {
    let src = &torus.fiber;
    let dst = &fiber.target;
    if fiber.source != *src {
        return Err(NilpotentError::Invalid("fiber rebuilding source differs from the torus fiber".into()));
    }
    let nf = src.top_degree();
    if fiber.alpha != nf || dst.top_degree() != nf {
        return Err(NilpotentError::Invalid(format!(
            "gluing needs a fiber rebuilding through the top degree {nf}, got α = {}",
            fiber.alpha
        )));
    }
    let full = fiber.is_full()?;
    let alpha = nf + usize::from(full);

    let fs = |j: isize| if j < 0 { 0 } else { src.dim(j as usize) };
    let ft = |j: isize| if j < 0 { 0 } else { dst.dim(j as usize) };
    let pick = |m: &GradedMap, j: isize, rows: usize, cols: usize| -> IntMatrix {
        if j < 0 {
            return IntMatrix::zeros(rows, cols);
        }
        m.component(j as usize).cloned().unwrap_or_else(|| IntMatrix::zeros(rows, cols))
    };
    let k = |j: isize| pick(&fiber.g, j, ft(j), fs(j));
    let l = |j: isize| pick(&fiber.h, j, fs(j), ft(j));
    let sigma = |j: isize| pick(&fiber.rho, j, fs(j + 1), fs(j));
    // θ₁ − 1 on F_j
    let tm = |j: isize| pick(&torus.monodromy, j, fs(j), fs(j)).sub(&IntMatrix::identity(fs(j)));

    let top = nf as isize;
    let a: Vec<IntMatrix> =
        (0..=top).map(|j| k(j).mul(&torus.monodromy.components()[j as usize]).mul(&l(j))).collect();
    let b: Vec<IntMatrix> = (0..=top).map(|j| k(j).mul(&l(j))).collect();
    let target = twisted_cylinder(dst, &a, Some(&b))?;
    let source = twisted_cylinder(src, torus.monodromy.components(), None)?;

    let mut g = Vec::with_capacity(alpha + 1);
    let mut h = Vec::with_capacity(alpha + 1);
    let mut rho = Vec::with_capacity(alpha);
    for j in 0..=alpha as isize {
        let s: i64 = if (j - 1).rem_euclid(2) == 0 { 1 } else { -1 };
        let (kj, kl, lj, ll, sl) = (k(j), k(j - 1), l(j), l(j - 1), sigma(j - 1));
        let g01 = kj.mul(&tm(j)).mul(&sl).scale(-s);
        g.push(IntMatrix::from_blocks(&[ft(j), ft(j - 1)], &[fs(j), fs(j - 1)], &[(0, 0, &kj), (0, 1, &g01), (1, 1, &kl)]));
        let h01 = sl.mul(&tm(j - 1)).mul(&ll).scale(s);
        h.push(IntMatrix::from_blocks(&[fs(j), fs(j - 1)], &[ft(j), ft(j - 1)], &[(0, 0, &lj), (0, 1, &h01), (1, 1, &ll)]));
        if j < alpha as isize {
            let sj = sigma(j);
            let r01 = sj.mul(&tm(j)).mul(&sl).scale(-s);
            rho.push(IntMatrix::from_blocks(
                &[fs(j + 1), fs(j)],
                &[fs(j), fs(j - 1)],
                &[(0, 0, &sj), (0, 1, &r01), (1, 1, &sl)],
            ));
        }
    }
    Ok(Rebuilding::new(alpha, source, target, GradedMap::new(0, g), GradedMap::new(0, h), GradedMap::new(1, rho))?)
}
