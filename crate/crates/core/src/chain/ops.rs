use super::ChainComplex;
use crate::exact_linalg::IntMatrix;

/// Degreewise direct sum, `A`'s cells first.
pub fn direct_sum(a: &ChainComplex, b: &ChainComplex) -> ChainComplex {
    let top = a.top_degree().max(b.top_degree());
    let dims: Vec<usize> = (0..=top).map(|j| a.dim(j) + b.dim(j)).collect();
    let boundaries = (1..=top)
        .map(|j| {
            let (da, db) = (a.boundary(j), b.boundary(j));
            IntMatrix::from_blocks(&[a.dim(j - 1), b.dim(j - 1)], &[a.dim(j), b.dim(j)], &[(0, 0, &da), (1, 1, &db)])
        })
        .collect();
    ChainComplex::new_unchecked(dims, boundaries).unwrap()
}

/// `C[k]_j = C_{j−k}` with `∂[k] = (−1)^k ∂`.
pub fn shift(c: &ChainComplex, k: usize) -> ChainComplex {
    let top = c.top_degree() + k;
    let dims: Vec<usize> = (0..=top).map(|j| if j < k { 0 } else { c.dim(j - k) }).collect();
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let boundaries = (1..=top)
        .map(|j| if j <= k { IntMatrix::zeros(dims[j - 1], dims[j]) } else { c.boundary(j - k).scale(sign) })
        .collect();
    ChainComplex::new_unchecked(dims, boundaries).unwrap()
}

/// `C ⊗ C(interval)`.
///
/// Degree `j` has basis `C_j⊗[0]`, then `C_j⊗[1]`, then `C_{j−1}⊗[I]`, with
/// `∂(c⊗[I]) = ∂c⊗[I] + (−1)^{deg c}(c⊗[1] − c⊗[0])`.
pub fn tensor_with_interval(c: &ChainComplex) -> ChainComplex {
    let top = c.top_degree() + 1;
    let dims: Vec<usize> = (0..=top).map(|j| 2 * c.dim(j) + if j == 0 { 0 } else { c.dim(j - 1) }).collect();
    let sizes = |j: usize| [c.dim(j), c.dim(j), if j == 0 { 0 } else { c.dim(j - 1) }];
    let boundaries = (1..=top)
        .map(|j| {
            let d = c.boundary(j);
            let dl = c.boundary(j - 1);
            let n = c.dim(j - 1);
            let s: i64 = if (j - 1) % 2 == 0 { 1 } else { -1 };
            let plus = IntMatrix::identity(n).scale(s);
            let minus = IntMatrix::identity(n).scale(-s);
            IntMatrix::from_blocks(
                &sizes(j - 1),
                &sizes(j),
                &[(0, 0, &d), (1, 1, &d), (2, 2, &dl), (0, 2, &minus), (1, 2, &plus)],
            )
        })
        .collect();
    ChainComplex::new(dims, boundaries).expect("tensor with interval is a complex")
}
