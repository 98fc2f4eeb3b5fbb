//! Cyclic covers of the circle and their explicit rebuildings.

use crate::chain::{ChainComplex, GradedMap};
use crate::exact_linalg::IntMatrix;
use crate::rebuild::{CoverLiftData, RebuildError, Rebuilding};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircleError {
    #[error("need N ≥ 4T and T ≥ 1, got N = {n}, T = {t}")]
    OutOfRange { n: usize, t: f64 },
    #[error(transparent)]
    Rebuild(#[from] RebuildError),
}

/// `0 = a₀ < a₁ < … < a_m = N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CirclePartition {
    pub n: usize,
    pub breakpoints: Vec<usize>,
    pub t: f64,
}

impl CirclePartition {
    pub fn pieces(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn gaps(&self) -> Vec<usize> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `T/2 ≤ gap ≤ T` for every gap and `N/T ≤ m ≤ 2N/T`.
    pub fn is_valid(&self) -> bool {
        let m = self.pieces() as f64;
        let n = self.n as f64;
        self.gaps().iter().all(|&g| self.t / 2.0 <= g as f64 && g as f64 <= self.t)
            && n / self.t <= m
            && m <= 2.0 * n / self.t
    }

    /// The same partition repeated around the `k`-fold cover.
    pub fn lift(&self, k: usize) -> CirclePartition {
        let mut b = vec![0];
        for s in 0..k {
            b.extend(self.breakpoints[1..].iter().map(|a| a + s * self.n));
        }
        CirclePartition { n: self.n * k, breakpoints: b, t: self.t }
    }
}

/// `N` vertices and `N` edges, `∂e_j = v_{j+1 mod N} − v_j`.
pub fn build_circle_cover(n: usize) -> ChainComplex {
    assert!(n >= 1, "circle cover needs N ≥ 1");
    let cols = (0..n)
        .map(|j| {
            let next = (j + 1) % n;
            if next == j {
                vec![]
            } else {
                vec![(j as u32, -1), (next as u32, 1)]
            }
        })
        .collect();
    ChainComplex::new(vec![n, n], vec![IntMatrix::from_columns_i64(n, cols)]).unwrap()
}

/// `m = ⌈N/T⌉` balanced pieces, longer ones first.
pub fn choose_partition(n: usize, t: f64) -> Result<CirclePartition, CircleError> {
    if !(t >= 1.0) || (n as f64) < 4.0 * t {
        return Err(CircleError::OutOfRange { n, t });
    }
    let m = (n as f64 / t).ceil() as usize;
    let (q, r) = (n / m, n % m);
    let mut b = Vec::with_capacity(m + 1);
    b.push(0);
    for i in 0..m {
        b.push(b[i] + q + usize::from(i < r));
    }
    let p = CirclePartition { n, breakpoints: b, t };
    debug_assert!(p.is_valid());
    Ok(p)
}

/// The rebuilding `X_N → X_m` collapsing each piece `[a_i, a_{i+1}]` to one edge.
///
/// Always verified before returning.
pub fn circle_rebuilding(n: usize, t: f64) -> Result<Rebuilding, CircleError> {
    let p = choose_partition(n, t)?;
    Ok(rebuilding_for_partition(&p)?)
}

/// [`circle_rebuilding`] for an explicit partition.
pub fn rebuilding_for_partition(p: &CirclePartition) -> Result<Rebuilding, RebuildError> {
    let n = p.n;
    let a = &p.breakpoints;
    let m = p.pieces();
    let source = build_circle_cover(n);
    let target = build_circle_cover(m);

    let mut iota = vec![0usize; n];
    for i in 0..m {
        for slot in &mut iota[a[i]..a[i + 1]] {
            *slot = i;
        }
    }
    let at_break = |j: usize| a[iota[j]] == j;

    let g0 = (0..n)
        .map(|j| {
            let i = if at_break(j) { iota[j] } else { (iota[j] + 1) % m };
            vec![(i as u32, 1)]
        })
        .collect();
    let g1 = (0..n).map(|j| if at_break(j) { vec![(iota[j] as u32, 1)] } else { vec![] }).collect();
    let h0 = (0..m).map(|i| vec![(a[i] as u32, 1)]).collect();
    let h1 = (0..m).map(|i| (a[i]..a[i + 1]).map(|j| (j as u32, 1)).collect()).collect();
    let rho0 = (0..n)
        .map(|j| if at_break(j) { vec![] } else { (j..a[iota[j] + 1]).map(|k| (k as u32, 1)).collect() })
        .collect();

    let r = Rebuilding::new(
        1,
        source,
        target,
        GradedMap::new(0, vec![IntMatrix::from_columns_i64(m, g0), IntMatrix::from_columns_i64(m, g1)]),
        GradedMap::new(0, vec![IntMatrix::from_columns_i64(n, h0), IntMatrix::from_columns_i64(n, h1)]),
        GradedMap::new(1, vec![IntMatrix::from_columns_i64(n, rho0)]),
    )?;
    let bad = r.verify()?;
    if let Some(v) = bad.first() {
        return Err(RebuildError::Mismatch(format!("circle rebuilding fails: {v}")));
    }
    Ok(r)
}

/// Lift of the partition's rebuilding to the `k`-fold cover `X_{kN} → X_{km}`.
pub fn cover_lift(p: &CirclePartition, k: usize) -> Result<CoverLiftData, RebuildError> {
    let r = rebuilding_for_partition(&p.lift(k))?;
    Ok(CoverLiftData { degree: k, source: r.source, target: r.target, g: Some(r.g), h: Some(r.h), rho: Some(r.rho) })
}
