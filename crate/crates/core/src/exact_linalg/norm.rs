use super::{Caps, IntMatrix};
use num_bigint::BigInt;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

/// Certified interval for the ℓ²→ℓ² operator norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub tolerance: f64,
    /// False when the iteration cap was hit before `upper/lower ≤ 1 + tolerance`.
    pub converged: bool,
}

const FRAC_BITS: u64 = 26;

/// Smallest f64 that is ≥ the rational `n / 2^k`.
fn f64_up(n: &BigInt, k: u64) -> f64 {
    let mut f = n.to_f64().unwrap_or(f64::MAX);
    match BigInt::from_f64(f) {
        Some(back) if &back < n => f = f.next_up(),
        _ => {}
    }
    f / (2f64).powi(k as i32)
}

/// Upper bound √(‖A‖₁‖A‖∞), exact when the product is a perfect square.
pub fn coarse_upper(a: &IntMatrix) -> f64 {
    let p = a.norm_one() * a.norm_inf();
    if p.is_zero() {
        return 0.0;
    }
    let scaled: BigInt = &p << (2 * FRAC_BITS);
    let s = scaled.sqrt();
    if &s * &s == scaled {
        f64_up(&s, FRAC_BITS)
    } else {
        f64_up(&(s + 1), FRAC_BITS)
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn start_vector(n: usize) -> Vec<f64> {
    (0..n).map(|i| 1.0 + ((i as u64).wrapping_mul(2654435761) % 1009) as f64 / 1009.0).collect()
}

/// Operator norm with the default caps.
pub fn operator_norm(a: &IntMatrix, tol: f64) -> NormEstimate {
    operator_norm_with(a, tol, &Caps::default())
}

/// Interval `[lower, upper]` containing ‖A‖₂.
///
/// `lower` is the norm ratio ‖Ax‖/‖x‖ of a power-iteration vector, shaded
/// down for rounding. `upper` is the smaller of √(‖A‖₁‖A‖∞) and a
/// Collatz–Wielandt bound `max_i (|A|ᵀ|A|z)_i / z_i` over a positive
/// iterate `z`, shaded up for rounding.
pub fn operator_norm_with(a: &IntMatrix, tol: f64, caps: &Caps) -> NormEstimate {
    assert!(tol > 0.0, "tolerance must be positive");
    let coarse = coarse_upper(a);
    if a.is_zero() {
        return NormEstimate { lower: 0.0, upper: 0.0, tolerance: tol, converged: true };
    }
    let n = a.cols();
    let (dc, dr) = a.max_degrees();
    let slack = 1.0 + 8.0 * (dc + dr + 4) as f64 * f64::EPSILON + 1e-13;

    let mut x = start_vector(n);
    let mut z = start_vector(n);
    let mut lower = 0.0f64;
    let mut upper = coarse;
    let mut converged = false;
    for _ in 0..caps.max_iterations.max(1) {
        let ax = a.matvec_f64(&x, false);
        let nx = norm2(&x);
        if nx > 0.0 {
            lower = lower.max(norm2(&ax) / nx * (1.0 - 1e-12));
        }
        let y = a.tmatvec_f64(&ax, false);
        let ny = norm2(&y);
        if ny > 0.0 {
            x = y.iter().map(|v| v / ny).collect();
        }

        let bz = a.tmatvec_f64(&a.matvec_f64(&z, true), true);
        let ratio = bz.iter().zip(&z).map(|(b, zz)| b / zz).fold(0.0f64, f64::max);
        if ratio.is_finite() {
            upper = upper.min(ratio.sqrt() * slack);
        }
        let mz = bz.iter().cloned().fold(0.0f64, f64::max);
        if mz > 0.0 {
            z = bz.iter().map(|v| v / mz + 1e-9).collect();
        }

        if lower > 0.0 && upper <= lower * (1.0 + tol) {
            converged = true;
            break;
        }
    }
    if lower > upper {
        lower = upper;
    }
    NormEstimate { lower, upper, tolerance: tol, converged }
}
