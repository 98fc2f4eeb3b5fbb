//! Seeded random chain complexes for fuzzing.

use super::ChainComplex;
use crate::exact_linalg::IntMatrix;
use rand::Rng;

type Dense = Vec<Vec<i64>>;

fn to_matrix(m: &Dense, rows: usize, cols: usize) -> IntMatrix {
    let mut columns = vec![Vec::new(); cols];
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != 0 {
                columns[j].push((i as u32, v));
            }
        }
    }
    IntMatrix::from_columns_i64(rows, columns)
}

fn sparse_entry<R: Rng>(rng: &mut R, density: f64, bound: i64) -> i64 {
    if rng.gen_bool(density) {
        let v = rng.gen_range(1..=bound);
        if rng.gen_bool(0.5) {
            -v
        } else {
            v
        }
    } else {
        0
    }
}

/// Applies a random basis change `e_i ↦ e_i + s·e_k` in degree `j`: row op on
/// `∂_{j+1}`, inverse column op on `∂_j`. Skips moves that would leave
/// `[−bound, bound]`.
fn mix<R: Rng>(rng: &mut R, dims: &[usize], b: &mut [Dense], moves: usize, bound: i64) {
    for _ in 0..moves {
        let j = rng.gen_range(0..dims.len());
        if dims[j] < 2 {
            continue;
        }
        let i = rng.gen_range(0..dims[j]);
        let mut k = rng.gen_range(0..dims[j] - 1);
        if k >= i {
            k += 1;
        }
        let s = if rng.gen_bool(0.5) { 1 } else { -1 };
        // ∂_{j+1} ← E ∂_{j+1}: row i += s·row k.
        let up_ok = j + 1 > b.len() || b[j].get(i).is_none_or(|ri| ri.iter().zip(&b[j][k]).all(|(a, c)| (a + s * c).abs() <= bound));
        // ∂_j ← ∂_j E⁻¹: column k −= s·column i.
        let down_ok = j == 0 || b[j - 1].iter().all(|row| (row[k] - s * row[i]).abs() <= bound);
        if !(up_ok && down_ok) {
            continue;
        }
        if j < b.len() {
            let rk = b[j][k].clone();
            for (a, c) in b[j][i].iter_mut().zip(rk) {
                *a += s * c;
            }
        }
        if j > 0 {
            for row in b[j - 1].iter_mut() {
                row[k] -= s * row[i];
            }
        }
    }
}

/// A complex `C_2 → C_1 → C_0` with each `dim C_j` in `1..=max_size` and
/// entries in `[−bound, bound]`.
///
/// `C_1` starts as `A ⊕ B` with `∂_2` landing in `A` and `∂_1` vanishing on `A`,
/// then the bases are mixed by random elementary moves.
pub fn random_two_step<R: Rng>(rng: &mut R, max_size: usize, bound: i64) -> ChainComplex {
    let dims: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=max_size)).collect();
    let a = rng.gen_range(0..=dims[1]);
    let d1 = rng.gen_range(0.1..0.6);
    let d2 = rng.gen_range(0.1..0.6);
    let mut b: Vec<Dense> = vec![
        (0..dims[0]).map(|_| (0..dims[1]).map(|c| if c >= a { sparse_entry(rng, d1, bound) } else { 0 }).collect()).collect(),
        (0..dims[1]).map(|r| (0..dims[2]).map(|_| if r < a { sparse_entry(rng, d2, bound) } else { 0 }).collect()).collect(),
    ];
    mix(rng, &dims, &mut b[..], 2 * dims[1], bound);
    let boundaries = vec![to_matrix(&b[0], dims[0], dims[1]), to_matrix(&b[1], dims[1], dims[2])];
    ChainComplex::new(dims, boundaries).expect("random two-step complex")
}

/// A complex of top degree `top` with each `dim C_j` in `0..=max_dim` and
/// entries in `[−bound, bound]`.
pub fn random_complex<R: Rng>(rng: &mut R, top: usize, max_dim: usize, bound: i64) -> ChainComplex {
    // C_j = K_j ⊕ Q_j; ∂_j vanishes on K_j and maps Q_j into K_{j−1}.
    let mut k = Vec::with_capacity(top + 1);
    let mut q = Vec::with_capacity(top + 1);
    for j in 0..=top {
        let n = rng.gen_range(0..=max_dim);
        let qj = if j == 0 { 0 } else { rng.gen_range(0..=n) };
        k.push(n - qj);
        q.push(qj);
    }
    let dims: Vec<usize> = (0..=top).map(|j| k[j] + q[j]).collect();
    let density = rng.gen_range(0.2..0.7);
    let mut b: Vec<Dense> = (1..=top)
        .map(|j| {
            (0..dims[j - 1])
                .map(|r| (0..dims[j]).map(|c| if r < k[j - 1] && c >= k[j] { sparse_entry(rng, density, bound) } else { 0 }).collect())
                .collect()
        })
        .collect();
    mix(rng, &dims, &mut b[..], dims.iter().sum::<usize>(), bound);
    let boundaries = (1..=top).map(|j| to_matrix(&b[j - 1], dims[j - 1], dims[j])).collect();
    ChainComplex::new(dims, boundaries).expect("random complex")
}
