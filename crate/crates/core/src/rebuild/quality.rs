use super::{RebuildError, Rebuilding};
use crate::exact_linalg::{operator_norm_with, Caps, IntMatrix};
use serde::Serialize;

/// Cell and norm terms of a rebuilding at scale `T`.
///
/// Norms are certified upper bounds. Each norm term is
/// `max(log ‖·‖, 0) / (1 + log T)`; cell terms are `|X′^{(j)}|·T / |X^{(j)}|`
/// over skeleta.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QualityReport {
    pub t: f64,
    /// Indexed by degree `0..=α`.
    pub cell_ratios: Vec<f64>,
    /// Upper bounds for `‖g_j‖`, `‖h_j‖` (`j ≤ α`), `‖ρ_j‖` (`j < α`) and
    /// `‖∂′_j‖` (`1 ≤ j ≤ α`, stored at index `j − 1`).
    pub norm_g: Vec<f64>,
    pub norm_h: Vec<f64>,
    pub norm_rho: Vec<f64>,
    pub norm_boundary: Vec<f64>,
    /// Largest term among `cell_j, g_j, h_j, ρ_{j−1}, ∂′_j`.
    pub per_degree_kappa: Vec<f64>,
    pub kappa_raw: f64,
    /// `max(kappa_raw, 1)`.
    pub kappa_min: f64,
}

impl QualityReport {
    pub fn norm_term(&self, upper: f64) -> f64 {
        upper.ln().max(0.0) / (1.0 + self.t.ln())
    }

    pub fn cell_kappa(&self) -> f64 {
        self.cell_ratios.iter().cloned().fold(0.0, f64::max)
    }

    pub fn norm_kappa(&self) -> f64 {
        self.norm_g
            .iter()
            .chain(&self.norm_h)
            .chain(&self.norm_rho)
            .chain(&self.norm_boundary)
            .map(|&u| self.norm_term(u))
            .fold(0.0, f64::max)
    }
}

const QUALITY_NORM_TOL: f64 = 1e-6;

pub fn quality(r: &Rebuilding, t: f64) -> Result<QualityReport, RebuildError> {
    quality_with(r, t, &Caps::default())
}

pub fn quality_with(r: &Rebuilding, t: f64, caps: &Caps) -> Result<QualityReport, RebuildError> {
    if !(t >= 1.0) {
        return Err(RebuildError::InvalidScale(t));
    }
    r.check_shapes()?;
    let a = r.alpha;
    let norm = |m: &IntMatrix| operator_norm_with(m, QUALITY_NORM_TOL, caps).upper;
    let cell_ratios: Vec<f64> = (0..=a)
        .map(|j| {
            let (src, tgt) = (r.source.skeleton_cells(j), r.target.skeleton_cells(j));
            match (src, tgt) {
                (0, 0) => 0.0,
                (0, _) => f64::INFINITY,
                _ => tgt as f64 * t / src as f64,
            }
        })
        .collect();
    let norm_g: Vec<f64> = r.g.components().iter().map(norm).collect();
    let norm_h: Vec<f64> = r.h.components().iter().map(norm).collect();
    let norm_rho: Vec<f64> = r.rho.components().iter().map(norm).collect();
    let norm_boundary: Vec<f64> = (1..=a).map(|j| norm(&r.target.boundary(j))).collect();
    let mut rep = QualityReport {
        t,
        cell_ratios,
        norm_g,
        norm_h,
        norm_rho,
        norm_boundary,
        per_degree_kappa: Vec::new(),
        kappa_raw: 0.0,
        kappa_min: 0.0,
    };
    rep.per_degree_kappa = (0..=a)
        .map(|j| {
            let mut k = rep.cell_ratios[j].max(rep.norm_term(rep.norm_g[j])).max(rep.norm_term(rep.norm_h[j]));
            if j >= 1 {
                k = k.max(rep.norm_term(rep.norm_rho[j - 1])).max(rep.norm_term(rep.norm_boundary[j - 1]));
            }
            k
        })
        .collect();
    rep.kappa_raw = rep.per_degree_kappa.iter().cloned().fold(0.0, f64::max);
    rep.kappa_min = rep.kappa_raw.max(1.0);
    Ok(rep)
}
