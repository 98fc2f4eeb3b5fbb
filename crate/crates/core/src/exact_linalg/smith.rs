use super::{Caps, IntMatrix, LinalgError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Diagonalization `transform_left · A · transform_right = diag(invariant_factors, 0, …)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmithDecomposition {
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    pub transform_left: IntMatrix,
    pub transform_right: IntMatrix,
}

impl SmithDecomposition {
    /// The diagonal matrix with the same shape as the input.
    pub fn diagonal(&self) -> IntMatrix {
        let rows = self.transform_left.rows();
        let cols = self.transform_right.cols();
        IntMatrix::from_triplets(
            rows,
            cols,
            self.invariant_factors.iter().enumerate().map(|(i, d)| (i, i, d.clone())),
        )
        .unwrap()
    }
}

struct Dense {
    a: Vec<Vec<BigInt>>,
    left: Option<Vec<Vec<BigInt>>>,
    right: Option<Vec<Vec<BigInt>>>,
    max_bits: u64,
}

fn ident(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

impl Dense {
    fn check(&self, v: &BigInt) -> Result<(), LinalgError> {
        if v.bits() > self.max_bits {
            return Err(LinalgError::BitCap { bits: v.bits(), cap: self.max_bits });
        }
        Ok(())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(l) = &mut self.left {
            l.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
        if let Some(r) = &mut self.right {
            for row in r.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    /// row_i -= q * row_j
    fn row_axpy(&mut self, i: usize, j: usize, q: &BigInt, from: usize) -> Result<(), LinalgError> {
        let (src, dst) = if i < j {
            let (lo, hi) = self.a.split_at_mut(j);
            (&hi[0], &mut lo[i])
        } else {
            let (lo, hi) = self.a.split_at_mut(i);
            (&lo[j], &mut hi[0])
        };
        for k in from..src.len() {
            if !src[k].is_zero() {
                dst[k] -= q * &src[k];
                if dst[k].bits() > self.max_bits {
                    return Err(LinalgError::BitCap { bits: dst[k].bits(), cap: self.max_bits });
                }
            }
        }
        if let Some(l) = &mut self.left {
            let srcl = l[j].clone();
            for (k, s) in srcl.iter().enumerate() {
                if !s.is_zero() {
                    l[i][k] -= q * s;
                }
            }
            if let Some(v) = l[i].iter().find(|v| v.bits() > self.max_bits) {
                return Err(LinalgError::BitCap { bits: v.bits(), cap: self.max_bits });
            }
        }
        Ok(())
    }

    /// col_i -= q * col_j
    fn col_axpy(&mut self, i: usize, j: usize, q: &BigInt, from: usize) -> Result<(), LinalgError> {
        for r in from..self.a.len() {
            if !self.a[r][j].is_zero() {
                let t = q * &self.a[r][j];
                self.a[r][i] -= t;
                self.check(&self.a[r][i])?;
            }
        }
        if let Some(rm) = &mut self.right {
            for row in rm.iter_mut() {
                if !row[j].is_zero() {
                    let t = q * &row[j];
                    row[i] -= t;
                }
            }
            if let Some(row) = rm.iter().find(|row| row[i].bits() > self.max_bits) {
                return Err(LinalgError::BitCap { bits: row[i].bits(), cap: self.max_bits });
            }
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for v in &mut self.a[i] {
            *v = -&*v;
        }
        if let Some(l) = &mut self.left {
            for v in &mut l[i] {
                *v = -&*v;
            }
        }
    }

    /// Minimal absolute value in the active block, ties by lowest (row, col).
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.len() {
            for j in t..self.a[i].len() {
                let v = &self.a[i][j];
                if v.is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((i, j)),
                    Some((bi, bj)) => {
                        if v.abs() < self.a[bi][bj].abs() {
                            best = Some((i, j));
                        }
                    }
                }
            }
        }
        best
    }

    fn run(&mut self) -> Result<Vec<BigInt>, LinalgError> {
        let m = self.a.len();
        let n = if m == 0 { 0 } else { self.a[0].len() };
        let mut factors = Vec::new();
        for t in 0..m.min(n) {
            loop {
                let Some((pi, pj)) = self.pivot(t) else {
                    return Ok(factors);
                };
                if pi != t {
                    self.swap_rows(pi, t);
                }
                if pj != t {
                    self.swap_cols(pj, t);
                }
                let p = self.a[t][t].clone();
                let mut dirty = false;
                for i in t + 1..m {
                    if !self.a[i][t].is_zero() {
                        let q = &self.a[i][t] / &p;
                        if !q.is_zero() {
                            self.row_axpy(i, t, &q, t)?;
                        }
                        dirty |= !self.a[i][t].is_zero();
                    }
                }
                for j in t + 1..n {
                    if !self.a[t][j].is_zero() {
                        let q = &self.a[t][j] / &p;
                        if !q.is_zero() {
                            self.col_axpy(j, t, &q, t)?;
                        }
                        dirty |= !self.a[t][j].is_zero();
                    }
                }
                if dirty {
                    continue;
                }
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !self.a[i][j].is_multiple_of(&p)));
                if let Some(i) = bad {
                    self.row_axpy(t, i, &BigInt::from(-1), t)?;
                    continue;
                }
                if p.is_negative() {
                    self.negate_row(t);
                }
                factors.push(self.a[t][t].clone());
                break;
            }
        }
        Ok(factors)
    }
}

/// Smith normal form with unimodular transforms.
///
/// Dense algorithm; intended for matrices of moderate size. Homology uses
/// [`super::invariant_factors`], which agrees on the factors and scales better.
pub fn smith_normal_form(a: &IntMatrix, caps: &Caps) -> Result<SmithDecomposition, LinalgError> {
    let (m, n) = a.shape();
    let mut d = Dense { a: a.to_dense_big(), left: Some(ident(m)), right: Some(ident(n)), max_bits: caps.max_bits };
    let factors = d.run()?;
    let to_mat = |v: Vec<Vec<BigInt>>, k: usize| {
        IntMatrix::from_triplets(
            k,
            k,
            v.into_iter()
                .enumerate()
                .flat_map(|(i, row)| row.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).map(move |(j, x)| (i, j, x))),
        )
        .unwrap()
    };
    Ok(SmithDecomposition {
        rank: factors.len(),
        invariant_factors: factors,
        transform_left: to_mat(d.left.take().unwrap(), m),
        transform_right: to_mat(d.right.take().unwrap(), n),
    })
}

/// Invariant factors of a dense matrix, no transforms.
pub(crate) fn dense_factors(a: Vec<Vec<BigInt>>, caps: &Caps) -> Result<Vec<BigInt>, LinalgError> {
    let mut d = Dense { a, left: None, right: None, max_bits: caps.max_bits };
    d.run()
}

/// Turns any list of nonzero diagonal entries into the divisibility chain of
/// the corresponding diagonal matrix.
pub fn normalize_diagonal(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for v in &mut d {
        *v = v.abs();
    }
    let mut ones = 0usize;
    d.retain(|v| {
        if v.is_one() {
            ones += 1;
            false
        } else {
            true
        }
    });
    let k = d.len();
    for i in 0..k {
        for j in i + 1..k {
            if !d[j].is_multiple_of(&d[i]) {
                let g = d[i].gcd(&d[j]);
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    let mut out = vec![BigInt::one(); ones];
    out.extend(d);
    let mut head: Vec<BigInt> = out.iter().filter(|v| v.is_one()).cloned().collect();
    head.extend(out.into_iter().filter(|v| !v.is_one()));
    head
}
