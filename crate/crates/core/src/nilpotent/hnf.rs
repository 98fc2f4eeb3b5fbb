//! Column-style Hermite normal form of full-rank sublattices of `ℤ^n`.

use super::NilpotentError;

/// Upper-triangular basis `H` of a full-rank lattice: columns generate it,
/// `H_ii > 0` and `0 ≤ H_ij < H_ii` for `j > i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hnf {
    n: usize,
    /// Row-major entries.
    h: Vec<i64>,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

fn overflow() -> NilpotentError {
    NilpotentError::Invalid("lattice entries overflow 64 bits".into())
}

impl Hnf {
    /// HNF of the lattice spanned by the given columns (each of length `n`).
    pub fn from_generators(n: usize, gens: &[Vec<i64>]) -> Result<Hnf, NilpotentError> {
        let mut cols: Vec<Vec<i128>> = gens
            .iter()
            .map(|c| {
                assert_eq!(c.len(), n, "generator length");
                c.iter().map(|&v| v as i128).collect()
            })
            .collect();
        let mut pivots: Vec<Vec<i128>> = vec![Vec::new(); n];
        for r in (0..n).rev() {
            // Fold every active column into one with gcd in row r.
            let mut piv: Option<Vec<i128>> = None;
            let mut rest = Vec::with_capacity(cols.len());
            for c in cols.drain(..) {
                if c[r] == 0 {
                    rest.push(c);
                    continue;
                }
                match piv.take() {
                    None => piv = Some(c),
                    Some(p) => {
                        let (g, x, y) = ext_gcd(p[r], c[r]);
                        let (u, v) = (p[r] / g, c[r] / g);
                        let new_p: Vec<i128> = p.iter().zip(&c).map(|(a, b)| x * a + y * b).collect();
                        let zeroed: Vec<i128> = p.iter().zip(&c).map(|(a, b)| v * a - u * b).collect();
                        if new_p.iter().chain(&zeroed).any(|e| e.unsigned_abs() > i64::MAX as u128) {
                            return Err(overflow());
                        }
                        rest.push(zeroed);
                        piv = Some(new_p);
                    }
                }
            }
            let mut p = piv.ok_or_else(|| NilpotentError::Invalid("generators do not span a full-rank lattice".into()))?;
            if p[r] < 0 {
                p.iter_mut().for_each(|e| *e = -*e);
            }
            pivots[r] = p;
            cols = rest;
        }
        let mut h = vec![0i64; n * n];
        // Reduce entries right of the diagonal, bottom row first.
        for r in (0..n).rev() {
            for j in r + 1..n {
                let q = pivots[j][r].div_euclid(pivots[r][r]);
                if q != 0 {
                    let pr = pivots[r].clone();
                    for (e, a) in pivots[j].iter_mut().zip(&pr) {
                        *e -= q * a;
                    }
                }
            }
        }
        for (j, p) in pivots.iter().enumerate() {
            for i in 0..n {
                h[i * n + j] = i64::try_from(p[i]).map_err(|_| overflow())?;
            }
        }
        Ok(Hnf { n, h })
    }

    /// Checks the normal-form conditions on a row-major square matrix.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Hnf, NilpotentError> {
        let n = rows.len();
        let mut h = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(NilpotentError::Invalid(format!("HNF row {i} has {} entries, expected {n}", r.len())));
            }
            h.extend_from_slice(r);
        }
        let m = Hnf { n, h };
        for i in 0..n {
            if m.get(i, i) <= 0 {
                return Err(NilpotentError::Invalid(format!("HNF diagonal entry {i} must be positive")));
            }
            for j in 0..n {
                let v = m.get(i, j);
                if (j < i && v != 0) || (j > i && !(0..m.get(i, i)).contains(&v)) {
                    return Err(NilpotentError::Invalid(format!("HNF entry ({i},{j}) = {v} is not reduced")));
                }
            }
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Hnf {
        let mut h = vec![0; n * n];
        for i in 0..n {
            h[i * n + i] = 1;
        }
        Hnf { n, h }
    }

    pub fn scalar(n: usize, k: i64) -> Hnf {
        let mut h = Hnf::identity(n);
        h.h.iter_mut().for_each(|v| *v *= k);
        h
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.h[i * self.n + j]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.h.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    /// `[ℤ^n : Λ]`.
    pub fn index(&self) -> u64 {
        (0..self.n).map(|i| self.get(i, i) as u64).product()
    }

    /// Upper-left `k × k` block, the lattice of the first `k` coordinates.
    pub fn leading(&self, k: usize) -> Hnf {
        let mut h = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                h.push(self.get(i, j));
            }
        }
        Hnf { n: k, h }
    }

    /// Canonical coset representative: `0 ≤ p_i < H_ii` for all `i`.
    pub fn reduce(&self, p: &mut [i64]) {
        for k in (0..self.n).rev() {
            let q = p[k].div_euclid(self.get(k, k));
            if q != 0 {
                for (i, v) in p.iter_mut().enumerate().take(k + 1) {
                    *v -= q * self.get(i, k);
                }
            }
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let mut p = v.to_vec();
        self.reduce(&mut p);
        p.iter().all(|&x| x == 0)
    }

    /// HNF of `M·Λ`.
    pub fn transform(&self, m: &[Vec<i64>]) -> Result<Hnf, NilpotentError> {
        let gens: Vec<Vec<i64>> = (0..self.n).map(|j| mat_vec(m, &self.column(j))).collect::<Result<_, _>>()?;
        Hnf::from_generators(self.n, &gens)
    }
}

pub(crate) fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Result<Vec<i64>, NilpotentError> {
    m.iter()
        .map(|row| {
            row.iter().zip(v).try_fold(0i64, |acc, (a, b)| a.checked_mul(*b).and_then(|x| acc.checked_add(x)))
        })
        .collect::<Option<Vec<i64>>>()
        .ok_or_else(overflow)
}

pub(crate) fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Vec<Vec<i64>>, NilpotentError> {
    let n = b.len();
    let cols: Vec<Vec<i64>> =
        (0..b.first().map_or(0, |r| r.len())).map(|j| mat_vec(a, &(0..n).map(|i| b[i][j]).collect::<Vec<_>>())).collect::<Result<_, _>>()?;
    Ok((0..a.len()).map(|i| cols.iter().map(|c| c[i]).collect()).collect())
}

pub(crate) fn mat_pow(m: &[Vec<i64>], e: u64) -> Result<Vec<Vec<i64>>, NilpotentError> {
    let n = m.len();
    let mut acc: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..e {
        acc = mat_mul(m, &acc)?;
    }
    Ok(acc)
}
