use super::{quality_with, QualityReport, RebuildError, Rebuilding};
use crate::chain::{ChainComplex, GradedMap};
use crate::exact_linalg::Caps;
use num_traits::ToPrimitive;

/// Lifted complexes and maps on a finite cover of both sides of a rebuilding.
///
/// Only families with explicit deck data can produce these; see the circle
/// and nilpotent modules.
#[derive(Clone, Debug)]
pub struct CoverLiftData {
    pub degree: usize,
    pub source: ChainComplex,
    pub target: ChainComplex,
    pub g: Option<GradedMap>,
    pub h: Option<GradedMap>,
    pub rho: Option<GradedMap>,
}

/// Largest `ℓ¹` column norm over all boundaries, i.e. the largest number of
/// times a cell's boundary runs over lower cells, counted with multiplicity.
pub fn max_attaching_multiplicity(c: &ChainComplex) -> usize {
    c.boundaries()
        .iter()
        .flat_map(|b| (0..b.cols()).map(move |j| b.col(j).iter().map(|(_, v)| v.magnitude().to_usize().unwrap_or(usize::MAX)).sum::<usize>()))
        .max()
        .unwrap_or(0)
}

/// Builds the rebuilding on the cover from its lifted maps.
///
/// Checks that every cell count is the base count times the degree and that
/// the result verifies.
pub fn induce_to_cover(r: &Rebuilding, lift: CoverLiftData) -> Result<Rebuilding, RebuildError> {
    let g = lift.g.ok_or(RebuildError::MissingLift("g"))?;
    let h = lift.h.ok_or(RebuildError::MissingLift("h"))?;
    let rho = lift.rho.ok_or(RebuildError::MissingLift("ρ"))?;
    for (name, base, cover) in [("source", &r.source, &lift.source), ("target", &r.target, &lift.target)] {
        let expect: Vec<usize> = base.dims().iter().map(|d| d * lift.degree).collect();
        if cover.dims() != expect.as_slice() {
            return Err(RebuildError::Mismatch(format!(
                "cover {name} has dims {:?}, expected {:?} for degree {}",
                cover.dims(),
                expect,
                lift.degree
            )));
        }
    }
    let out = Rebuilding::new(r.alpha, lift.source, lift.target, g, h, rho)?;
    let bad = out.verify()?;
    if let Some(v) = bad.first() {
        return Err(RebuildError::Mismatch(format!("induced rebuilding fails: {v}")));
    }
    Ok(out)
}

/// Base and cover quality against the `κδ` bound.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedRebuilding {
    pub base: QualityReport,
    pub cover: QualityReport,
    /// Measured on the base and the cover source complexes; the larger one.
    pub delta: usize,
    pub bound: f64,
    pub holds: bool,
}

impl InducedRebuilding {
    /// Compares clamped `κ` values: `κ_cover ≤ κ_base · δ`.
    pub fn measure(base: &Rebuilding, cover: &Rebuilding, t: f64, caps: &Caps) -> Result<Self, RebuildError> {
        let qb = quality_with(base, t, caps)?;
        let qc = quality_with(cover, t, caps)?;
        let delta = max_attaching_multiplicity(&base.source).max(max_attaching_multiplicity(&cover.source)).max(1);
        let bound = qb.kappa_min * delta as f64;
        let holds = qc.kappa_min <= bound;
        Ok(InducedRebuilding { base: qb, cover: qc, delta, bound, holds })
    }
}
