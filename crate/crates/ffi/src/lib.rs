//! C ABI over `chainrebuild`.
//!
//! Objects are opaque heap handles released with their `*_free` function.
//! Every fallible call returns a [`CrStatus`]; on failure the message is
//! available from [`cr_last_error`] on the same thread. Strings returned
//! through `char **` out-parameters are owned by the caller and released with
//! [`cr_string_free`].

#![allow(clippy::missing_safety_doc)]

mod status;

pub use status::CrStatus;
use status::{guard, set_error, Classify};

use chainrebuild::chain::{gabber_bound_with, homology_with, ChainComplex};
use chainrebuild::circle::{build_circle_cover, circle_rebuilding};
use chainrebuild::farber::{fixed_point_ratio, PermutationAction, Word};
use chainrebuild::nilpotent::{rebuild_lattice, rebuild_unipotent, Hnf, SubgroupSpec, UnipotentTower};
use chainrebuild::rebuild::quality_with;
use chainrebuild::{Caps, Rebuilding};
use num_traits::ToPrimitive;
use std::ffi::{c_char, CStr, CString};

/// A chain complex of free abelian groups.
pub struct CrComplex(ChainComplex);

/// A rebuilding `(X, X′, g, h, ρ)`.
pub struct CrRebuilding(Rebuilding);

/// A transitive permutation action of a finitely generated group.
pub struct CrAction(PermutationAction);

/// Resource limits; see [`cr_caps_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct CrCaps {
    pub max_bits: u64,
    pub max_minors: u64,
    pub max_iterations: u32,
}

impl From<CrCaps> for Caps {
    fn from(c: CrCaps) -> Caps {
        Caps { max_bits: c.max_bits, max_minors: c.max_minors, max_iterations: c.max_iterations }
    }
}

/// Homology of one degree. Torsion factors are read with [`cr_complex_torsion`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct CrHomology {
    pub degree: usize,
    pub betti_rational: usize,
    pub betti_mod2: usize,
    pub torsion_count: usize,
    pub log_torsion: f64,
    /// Set in the top degree, where there is no outgoing boundary.
    pub truncated: bool,
}

unsafe fn caps_or_default(caps: *const CrCaps) -> Caps {
    if caps.is_null() {
        Caps::default()
    } else {
        (*caps).into()
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, CrStatus> {
    if s.is_null() {
        return Err(set_error(CrStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| set_error(CrStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn put<T>(out: *mut T, v: T) -> CrStatus {
    if out.is_null() {
        return set_error(CrStatus::NullPointer, "null output pointer");
    }
    out.write(v);
    CrStatus::Ok
}

unsafe fn put_box<T>(out: *mut *mut T, v: T) -> CrStatus {
    put(out, Box::into_raw(Box::new(v)))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> CrStatus {
    match CString::new(s) {
        Ok(c) => put(out, c.into_raw()),
        Err(_) => set_error(CrStatus::Invalid, "string contains a NUL byte"),
    }
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, CrStatus> {
    p.as_ref().ok_or_else(|| set_error(CrStatus::NullPointer, "null handle"))
}

fn lift<T, E: Classify>(r: Result<T, E>) -> Result<T, CrStatus> {
    r.map_err(|e| set_error(e.status(), &e.to_string()))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The default caps used by the Rust API.
#[no_mangle]
pub extern "C" fn cr_caps_default() -> CrCaps {
    let c = Caps::default();
    CrCaps { max_bits: c.max_bits, max_minors: c.max_minors, max_iterations: c.max_iterations }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn cr_last_error() -> *const c_char {
    status::last_error_ptr()
}

#[no_mangle]
pub unsafe extern "C" fn cr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses the chain-complex text format.
#[no_mangle]
pub unsafe extern "C" fn cr_complex_parse(src: *const c_char, out: *mut *mut CrComplex) -> CrStatus {
    guard(|| {
        let c = lift(ChainComplex::parse(text(src)?))?;
        Ok(put_box(out, CrComplex(c)))
    })
}

/// The `n`-fold cyclic cover of the circle.
#[no_mangle]
pub unsafe extern "C" fn cr_complex_circle_cover(n: usize, out: *mut *mut CrComplex) -> CrStatus {
    guard(|| {
        if n == 0 {
            return Err(set_error(CrStatus::OutOfRange, "n must be positive"));
        }
        Ok(put_box(out, CrComplex(build_circle_cover(n))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn cr_complex_free(c: *mut CrComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

#[no_mangle]
pub unsafe extern "C" fn cr_complex_top_degree(c: *const CrComplex, out: *mut usize) -> CrStatus {
    guard(|| Ok(put(out, get(c)?.0.top_degree())))
}

/// `dim C_j`; zero above the top degree.
#[no_mangle]
pub unsafe extern "C" fn cr_complex_dim(c: *const CrComplex, j: usize, out: *mut usize) -> CrStatus {
    guard(|| Ok(put(out, get(c)?.0.dims().get(j).copied().unwrap_or(0))))
}

/// Writes the complex in its text format.
#[no_mangle]
pub unsafe extern "C" fn cr_complex_to_text(c: *const CrComplex, out: *mut *mut c_char) -> CrStatus {
    guard(|| Ok(put_string(out, get(c)?.0.to_string())))
}

/// Homology in degree `j`. `caps` may be NULL for the defaults.
#[no_mangle]
pub unsafe extern "C" fn cr_complex_homology(c: *const CrComplex, j: usize, caps: *const CrCaps, out: *mut CrHomology) -> CrStatus {
    guard(|| {
        let h = lift(homology_with(&get(c)?.0, j, &[2], &caps_or_default(caps)))?;
        Ok(put(
            out,
            CrHomology {
                degree: h.degree,
                betti_rational: h.betti_rational,
                betti_mod2: h.betti_mod_p[&2],
                torsion_count: h.torsion_factors.len(),
                log_torsion: h.log_torsion,
                truncated: h.truncated,
            },
        ))
    })
}

/// Torsion invariant factors of `H_j` as space-separated decimal integers.
#[no_mangle]
pub unsafe extern "C" fn cr_complex_torsion(c: *const CrComplex, j: usize, caps: *const CrCaps, out: *mut *mut c_char) -> CrStatus {
    guard(|| {
        let h = lift(homology_with(&get(c)?.0, j, &[], &caps_or_default(caps)))?;
        let s: Vec<String> = h.torsion_factors.iter().map(|f| f.to_string()).collect();
        Ok(put_string(out, s.join(" ")))
    })
}

/// `dim C_j · max(log ‖∂_{j+1}‖, 0)`, for `j` below the top degree.
#[no_mangle]
pub unsafe extern "C" fn cr_complex_gabber_bound(c: *const CrComplex, j: usize, caps: *const CrCaps, out: *mut f64) -> CrStatus {
    guard(|| Ok(put(out, lift(gabber_bound_with(&get(c)?.0, j, &caps_or_default(caps)))?)))
}

/// Rebuilding of the `n`-fold circle cover at scale `t`.
#[no_mangle]
pub unsafe extern "C" fn cr_rebuild_circle(n: usize, t: f64, out: *mut *mut CrRebuilding) -> CrStatus {
    guard(|| Ok(put_box(out, CrRebuilding(lift(circle_rebuilding(n, t))?))))
}

/// Rebuilding of `ℝ^d / Λ` onto the one-vertex torus. `hnf` holds the `d×d`
/// upper-triangular Hermite normal form of `Λ` row by row.
#[no_mangle]
pub unsafe extern "C" fn cr_rebuild_lattice(d: usize, hnf: *const i64, out: *mut *mut CrRebuilding) -> CrStatus {
    guard(|| {
        if hnf.is_null() && d > 0 {
            return Err(set_error(CrStatus::NullPointer, "null HNF"));
        }
        let flat = if d == 0 { &[][..] } else { std::slice::from_raw_parts(hnf, d * d) };
        let rows: Vec<Vec<i64>> = flat.chunks(d.max(1)).map(<[i64]>::to_vec).collect();
        let h = lift(Hnf::from_rows(&rows))?;
        Ok(put_box(out, CrRebuilding(lift(rebuild_lattice(&h))?)))
    })
}

/// Rebuilding of the congruence cover of index `n³` of the Heisenberg nilmanifold.
#[no_mangle]
pub unsafe extern "C" fn cr_rebuild_heisenberg(n: u64, out: *mut *mut CrRebuilding) -> CrStatus {
    guard(|| {
        if n == 0 {
            return Err(set_error(CrStatus::OutOfRange, "n must be positive"));
        }
        let r = lift(rebuild_unipotent(&UnipotentTower::heisenberg(), &SubgroupSpec::heisenberg_mod(n)))?;
        Ok(put_box(out, CrRebuilding(r)))
    })
}

/// Rebuilding for a subgroup given in the subgroup text format.
#[no_mangle]
pub unsafe extern "C" fn cr_rebuild_subgroup(src: *const c_char, out: *mut *mut CrRebuilding) -> CrStatus {
    guard(|| {
        let (tower, sub) = lift(SubgroupSpec::parse(text(src)?))?;
        Ok(put_box(out, CrRebuilding(lift(rebuild_unipotent(&tower, &sub))?)))
    })
}

/// Parses the rebuilding text format.
#[no_mangle]
pub unsafe extern "C" fn cr_rebuilding_parse(src: *const c_char, out: *mut *mut CrRebuilding) -> CrStatus {
    guard(|| Ok(put_box(out, CrRebuilding(lift(Rebuilding::parse(text(src)?))?))))
}

#[no_mangle]
pub unsafe extern "C" fn cr_rebuilding_free(r: *mut CrRebuilding) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

#[no_mangle]
pub unsafe extern "C" fn cr_rebuilding_alpha(r: *const CrRebuilding, out: *mut usize) -> CrStatus {
    guard(|| Ok(put(out, get(r)?.0.alpha)))
}

/// A copy of the source complex; free it with [`cr_complex_free`].
#[no_mangle]
pub unsafe extern "C" fn cr_rebuilding_source(r: *const CrRebuilding, out: *mut *mut CrComplex) -> CrStatus {
    guard(|| Ok(put_box(out, CrComplex(get(r)?.0.source.clone()))))
}

/// A copy of the target complex; free it with [`cr_complex_free`].
#[no_mangle]
pub unsafe extern "C" fn cr_rebuilding_target(r: *const CrRebuilding, out: *mut *mut CrComplex) -> CrStatus {
    guard(|| Ok(put_box(out, CrComplex(get(r)?.0.target.clone()))))
}

/// Number of violated identities; zero means the rebuilding checks out exactly.
#[no_mangle]
pub unsafe extern "C" fn cr_rebuilding_verify(r: *const CrRebuilding, violations: *mut usize) -> CrStatus {
    guard(|| Ok(put(violations, lift(get(r)?.0.verify())?.len())))
}

#[no_mangle]
pub unsafe extern "C" fn cr_rebuilding_to_text(r: *const CrRebuilding, out: *mut *mut c_char) -> CrStatus {
    guard(|| Ok(put_string(out, get(r)?.0.to_string())))
}

/// Measured quality `κ` at scale `t ≥ 1`.
#[no_mangle]
pub unsafe extern "C" fn cr_rebuilding_kappa(r: *const CrRebuilding, t: f64, caps: *const CrCaps, out: *mut f64) -> CrStatus {
    guard(|| Ok(put(out, lift(quality_with(&get(r)?.0, t, &caps_or_default(caps)))?.kappa_min)))
}

/// Parses the permutation-action text format.
#[no_mangle]
pub unsafe extern "C" fn cr_action_parse(src: *const c_char, out: *mut *mut CrAction) -> CrStatus {
    guard(|| Ok(put_box(out, CrAction(lift(PermutationAction::parse(text(src)?))?))))
}

#[no_mangle]
pub unsafe extern "C" fn cr_action_free(a: *mut CrAction) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

#[no_mangle]
pub unsafe extern "C" fn cr_action_degree(a: *const CrAction, out: *mut usize) -> CrStatus {
    guard(|| Ok(put(out, get(a)?.0.degree())))
}

/// Fixed-point ratio of a word as a reduced fraction `num / den`.
#[no_mangle]
pub unsafe extern "C" fn cr_action_fixed_point_ratio(a: *const CrAction, word: *const c_char, num: *mut u64, den: *mut u64) -> CrStatus {
    guard(|| {
        let a = get(a)?;
        let w = lift(Word::parse(text(word)?))?;
        let r = lift(fixed_point_ratio(&a.0, &w))?;
        if num.is_null() || den.is_null() {
            return Err(set_error(CrStatus::NullPointer, "null output pointer"));
        }
        // The denominator divides the degree, so both fit.
        num.write(r.numer().to_u64().unwrap());
        den.write(r.denom().to_u64().unwrap());
        Ok(CrStatus::Ok)
    })
}
