use super::hnf::Hnf;
use super::lattice::{CubicalLift, LatticeCover};
use super::NilpotentError;
use crate::chain::{ChainComplex, GradedMap};
use crate::exact_linalg::{operator_norm, IntMatrix};
use serde::Serialize;

/// A fiber complex with a chain self-map `θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MappingTorusSpec {
    pub fiber: ChainComplex,
    pub monodromy: GradedMap,
}

/// A cellular self-map of a complex, with the homotopy `r` describing how it
/// extends over the previous mapping-torus level when known.
#[derive(Clone, Debug, PartialEq)]
pub struct CellularSelfMap {
    pub complex: ChainComplex,
    pub theta: GradedMap,
    pub twist_homotopy: Option<GradedMap>,
}

/// `∂(c⊗[I]) = ∂c⊗[I] + (−1)^{deg c}(A c − B c)⊗[0]` on `[F⊗[0], F⊗[I]]`,
/// with `B = 1` when absent.
pub(crate) fn twisted_cylinder(
    fiber: &ChainComplex,
    a: &[IntMatrix],
    b: Option<&[IntMatrix]>,
) -> Result<ChainComplex, NilpotentError> {
    let n = fiber.top_degree();
    let fd = |j: isize| if j < 0 { 0 } else { fiber.dim(j as usize) };
    let dims: Vec<usize> = (0..=n + 1).map(|j| fd(j as isize) + fd(j as isize - 1)).collect();
    let mut bds = Vec::with_capacity(n + 1);
    for j in 1..=n + 1 {
        let ji = j as isize;
        let s: i64 = if (j - 1) % 2 == 0 { 1 } else { -1 };
        let diff = match b {
            Some(b) => a[j - 1].sub(&b[j - 1]),
            None => a[j - 1].sub(&IntMatrix::identity(fd(ji - 1))),
        }
        .scale(s);
        let d0 = fiber.boundary(j);
        let d1 = fiber.boundary(j - 1);
        let mut blocks: Vec<(usize, usize, &IntMatrix)> = vec![(0, 0, &d0), (0, 1, &diff)];
        if j >= 2 {
            blocks.push((1, 1, &d1));
        }
        bds.push(IntMatrix::from_blocks(&[fd(ji - 1), fd(ji - 2)], &[fd(ji), fd(ji - 1)], &blocks));
    }
    Ok(ChainComplex::new_unchecked(dims, bds)?)
}

/// Mapping torus of `θ`: degree `j` basis `[X_j⊗[0], X_{j−1}⊗[I]]`.
pub fn build_mapping_torus(spec: &MappingTorusSpec) -> Result<ChainComplex, NilpotentError> {
    let n = spec.fiber.top_degree();
    if spec.monodromy.degree_shift() != 0 || spec.monodromy.components().len() != n + 1 {
        return Err(NilpotentError::Invalid("monodromy needs one degree-0 component per fiber degree".into()));
    }
    spec.monodromy.check_shapes(&spec.fiber, &spec.fiber)?;
    if let Some(&j) = spec.monodromy.chain_map_failures(&spec.fiber, &spec.fiber, n).first() {
        return Err(NilpotentError::Invalid(format!("monodromy is not a chain map in degree {j}")));
    }
    twisted_cylinder(&spec.fiber, spec.monodromy.components(), None)
}

impl CellularSelfMap {
    pub fn new(complex: ChainComplex, theta: GradedMap, twist_homotopy: Option<GradedMap>) -> Result<Self, NilpotentError> {
        let n = complex.top_degree();
        theta.check_shapes(&complex, &complex)?;
        if theta.degree_shift() != 0 || theta.components().len() != n + 1 {
            return Err(NilpotentError::Invalid("θ needs one degree-0 component per degree".into()));
        }
        if let Some(&j) = theta.chain_map_failures(&complex, &complex, n).first() {
            return Err(NilpotentError::Invalid(format!("θ is not a chain map in degree {j}")));
        }
        Ok(CellularSelfMap { complex, theta, twist_homotopy })
    }

    /// `T^n = ℝ^n/ℤ^n` with the cellular lift of the unipotent matrix `m`.
    pub fn torus(m: Vec<Vec<i64>>) -> Result<Self, NilpotentError> {
        let n = m.len();
        let cover = LatticeCover::new(Hnf::identity(n))?;
        let theta = CubicalLift::new(m)?.descend(&cover, &cover, &vec![0; n])?;
        CellularSelfMap::new(cover.into_complex(), theta, None)
    }

    /// `T²` with cells `v; e, f; q` and `θ(f) = f + e`, fixing `v, e, q`.
    ///
    /// The twist homotopy lives on the circle `(v, e)` beneath `T²`:
    /// `r(v) = e`, `r(e) = 0`.
    pub fn dehn_twist_torus() -> Self {
        let mut t = CellularSelfMap::torus(vec![vec![1, 1], vec![0, 1]]).expect("Dehn twist is unipotent");
        let r = GradedMap::new(1, vec![IntMatrix::from_dense(&[vec![1]]), IntMatrix::zeros(0, 1)]);
        t.twist_homotopy = Some(r);
        t
    }

    pub fn mapping_torus(&self) -> Result<ChainComplex, NilpotentError> {
        build_mapping_torus(&MappingTorusSpec { fiber: self.complex.clone(), monodromy: self.theta.clone() })
    }

    /// `θ^m`, degree by degree.
    pub fn power(&self, m: u64) -> GradedMap {
        let comps = self
            .theta
            .components()
            .iter()
            .map(|t| {
                let mut acc = IntMatrix::identity(t.cols());
                let mut base = t.clone();
                let mut e = m;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = base.mul(&acc);
                    }
                    e >>= 1;
                    if e > 0 {
                        base = base.mul(&base);
                    }
                }
                acc
            })
            .collect();
        GradedMap::new(0, comps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormScanRow {
    pub power: u64,
    /// Certified upper bound on `max_j ‖θ^m_j‖₂`.
    pub upper: f64,
}

/// Upper norm bounds of `θ^m` for `m = 1..=m_max`.
pub fn theta_power_norm_scan(map: &CellularSelfMap, m_max: u64) -> Vec<NormScanRow> {
    let mut cur: Vec<IntMatrix> = map.theta.components().to_vec();
    let mut rows = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        let upper = cur.iter().map(|c| operator_norm(c, 1e-6).upper).fold(0.0, f64::max);
        rows.push(NormScanRow { power: m, upper });
        if m < m_max {
            cur = cur.iter().zip(map.theta.components()).map(|(c, t)| t.mul(c)).collect();
        }
    }
    rows
}

/// Least-squares slope of `ln upper` against `ln m`, over rows with `m ≥ from`.
pub fn fit_log_slope(rows: &[NormScanRow], from: u64) -> f64 {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.power >= from && r.upper > 0.0).map(|r| ((r.power as f64).ln(), r.upper.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
