use super::{invariant_factors, Caps, IntMatrix, LinalgError};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Fraction-free (Bareiss) determinant.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    r
}

fn next_subset(s: &mut [usize], n: usize) -> bool {
    let k = s.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if s[i] < n - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// det′(A)², the sum of squares of all r×r minors where r = rank A.
///
/// Zero-rank matrices give 1.
pub fn pseudo_determinant_squared(a: &IntMatrix, caps: &Caps) -> Result<BigInt, LinalgError> {
    // Zero rows and columns contribute nothing; drop them first.
    let nz_rows: Vec<usize> = {
        let mut seen = vec![false; a.rows()];
        for (r, _, _) in a.triplets() {
            seen[r] = true;
        }
        (0..a.rows()).filter(|&r| seen[r]).collect()
    };
    let nz_cols: Vec<usize> = (0..a.cols()).filter(|&c| !a.col(c).is_empty()).collect();
    let b = a.submatrix(&nz_rows, &nz_cols);
    let r = invariant_factors(&b, caps)?.len();
    if r == 0 {
        return Ok(BigInt::one());
    }
    let (m, n) = b.shape();
    let count = binom(m, r).saturating_mul(binom(n, r));
    if count > caps.max_minors as u128 {
        return Err(LinalgError::MinorCap { count: count.min(u64::MAX as u128) as u64, cap: caps.max_minors });
    }
    let dense = b.to_dense_big();
    let mut total = BigInt::zero();
    let mut rs: Vec<usize> = (0..r).collect();
    loop {
        let mut cs: Vec<usize> = (0..r).collect();
        loop {
            let sub: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| dense[i][j].clone()).collect()).collect();
            let d = det_bareiss(sub);
            total += &d * &d;
            if !next_subset(&mut cs, n) {
                break;
            }
        }
        if !next_subset(&mut rs, m) {
            break;
        }
    }
    Ok(total)
}
