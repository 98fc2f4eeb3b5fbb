use super::{ChainComplex, ChainError};
use crate::exact_linalg::{invariant_factors, operator_norm_with, pseudo_determinant_squared, rank_mod_p, Caps, IntMatrix};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use std::collections::BTreeMap;

/// Natural log of a positive big integer.
pub fn ln_big(x: &BigInt) -> f64 {
    let b = x.bits();
    if b <= 1000 {
        x.to_f64().unwrap().ln()
    } else {
        let s = b - 64;
        (x >> s).to_f64().unwrap().ln() + s as f64 * std::f64::consts::LN_2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomologyResult {
    pub degree: usize,
    pub betti_rational: usize,
    pub betti_mod_p: BTreeMap<u64, usize>,
    /// Invariant factors of `∂_{j+1}` greater than 1.
    pub torsion_factors: Vec<BigInt>,
    pub log_torsion: f64,
    /// Set for the top degree, where the complex has no `∂_{D+1}`.
    pub truncated: bool,
}

impl HomologyResult {
    /// `|H_j tors|` exactly.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion_factors.iter().fold(BigInt::one(), |a, b| a * b)
    }
}

pub fn homology(c: &ChainComplex, j: usize, primes: &[u64]) -> Result<HomologyResult, ChainError> {
    homology_with(c, j, primes, &Caps::default())
}

pub fn homology_with(c: &ChainComplex, j: usize, primes: &[u64], caps: &Caps) -> Result<HomologyResult, ChainError> {
    let top = c.top_degree();
    if j > top {
        return Err(ChainError::DegreeOutOfRange { degree: j, top });
    }
    let lower = c.boundary_factors(j, caps)?.len();
    let upper = c.boundary_factors(j + 1, caps)?;
    let torsion_factors: Vec<BigInt> = upper.iter().filter(|d| !d.is_one()).cloned().collect();
    let log_torsion = torsion_factors.iter().map(ln_big).sum();
    let betti_mod_p = primes
        .iter()
        .map(|&p| {
            let rl = if j == 0 { 0 } else { rank_mod_p(&c.boundary(j), p) };
            let ru = if j == top { 0 } else { rank_mod_p(&c.boundary(j + 1), p) };
            (p, c.dim(j) - rl - ru)
        })
        .collect();
    Ok(HomologyResult {
        degree: j,
        betti_rational: c.dim(j) - lower - upper.len(),
        betti_mod_p,
        torsion_factors,
        log_torsion,
        truncated: j == top,
    })
}

/// Homology in every degree; each boundary is reduced once.
pub fn homology_all(c: &ChainComplex, primes: &[u64], caps: &Caps) -> Result<Vec<HomologyResult>, ChainError> {
    (0..=c.top_degree()).map(|j| homology_with(c, j, primes, caps)).collect()
}

/// `Σ(−1)^j dim C_j`.
pub fn euler_characteristic(c: &ChainComplex) -> i64 {
    c.dims().iter().enumerate().map(|(j, &d)| if j % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
}

/// Universal coefficients: `b_j(𝔽_p) = b_j + #{p | d in H_j tors} + #{p | d in H_{j−1} tors}`.
///
/// Returns the degrees and primes where the identity fails. `results` must
/// be indexed by degree and start at 0.
pub fn check_universal_coefficients(results: &[HomologyResult]) -> Vec<(usize, u64)> {
    let divisible = |r: &HomologyResult, p: u64| {
        let p = BigInt::from(p);
        r.torsion_factors.iter().filter(|d| (*d % &p) == BigInt::from(0)).count()
    };
    let mut bad = Vec::new();
    for (j, r) in results.iter().enumerate() {
        for (&p, &b) in &r.betti_mod_p {
            let below = if j == 0 { 0 } else { divisible(&results[j - 1], p) };
            if b != r.betti_rational + divisible(r, p) + below {
                bad.push((j, p));
            }
        }
    }
    bad
}

pub fn gabber_bound(c: &ChainComplex, j: usize) -> Result<f64, ChainError> {
    gabber_bound_with(c, j, &Caps::default())
}

/// `dim C_j · max(log ‖∂_{j+1}‖, 0)` with a certified upper norm.
pub fn gabber_bound_with(c: &ChainComplex, j: usize, caps: &Caps) -> Result<f64, ChainError> {
    let top = c.top_degree();
    if j >= top {
        return Err(ChainError::DegreeOutOfRange { degree: j, top: top.saturating_sub(1) });
    }
    let est = operator_norm_with(&c.boundary(j + 1), 1e-6, caps);
    Ok(c.dim(j) as f64 * est.upper.ln().max(0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GabberReport {
    pub degree: usize,
    pub log_torsion: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Relative slack for comparing a log of an exact integer against a float bound.
const GABBER_REL_TOL: f64 = 1e-12;

pub fn check_gabber(c: &ChainComplex, j: usize, caps: &Caps) -> Result<GabberReport, ChainError> {
    let bound = gabber_bound_with(c, j, caps)?;
    let h = homology_with(c, j, &[], caps)?;
    let holds = h.log_torsion <= bound + GABBER_REL_TOL * (1.0 + bound);
    Ok(GabberReport { degree: j, log_torsion: h.log_torsion, bound, holds })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bt3Report {
    /// `|coker(f)_tors|`.
    pub torsion: BigInt,
    pub det_prime_squared: BigInt,
    pub holds: bool,
}

/// `|coker(f)_tors|² ≤ det′(f)²`.
pub fn check_bt3(f: &IntMatrix, caps: &Caps) -> Result<Bt3Report, ChainError> {
    let torsion = invariant_factors(f, caps)?.iter().fold(BigInt::one(), |a, b| a * b);
    let det_prime_squared = pseudo_determinant_squared(f, caps)?;
    let holds = &torsion * &torsion <= det_prime_squared;
    Ok(Bt3Report { torsion, det_prime_squared, holds })
}
