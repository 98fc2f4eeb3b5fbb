use chainrebuild::chain::ChainError;
use chainrebuild::circle::CircleError;
use chainrebuild::farber::FarberError;
use chainrebuild::nilpotent::NilpotentError;
use chainrebuild::{LinalgError, RebuildError};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    OutOfRange = 5,
    CapExceeded = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

pub(crate) fn set_error(status: CrStatus, msg: &str) -> CrStatus {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
    status
}

pub(crate) fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

pub(crate) fn last_error_ptr() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Clears the last error, runs `f`, and turns panics into [`CrStatus::Panic`].
pub(crate) fn guard(f: impl FnOnce() -> Result<CrStatus, CrStatus>) -> CrStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) | Ok(Err(s)) => s,
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned());
            set_error(CrStatus::Panic, &msg.unwrap_or_else(|| "panic".into()))
        }
    }
}

pub(crate) trait Classify: std::fmt::Display {
    fn status(&self) -> CrStatus;
}

impl Classify for LinalgError {
    fn status(&self) -> CrStatus {
        match self {
            LinalgError::BitCap { .. } | LinalgError::MinorCap { .. } => CrStatus::CapExceeded,
            LinalgError::Parse(_) => CrStatus::Parse,
            LinalgError::IndexOutOfRange { .. } => CrStatus::OutOfRange,
            _ => CrStatus::Invalid,
        }
    }
}

impl Classify for ChainError {
    fn status(&self) -> CrStatus {
        match self {
            ChainError::DegreeOutOfRange { .. } => CrStatus::OutOfRange,
            ChainError::Linalg(e) => e.status(),
            ChainError::Parse(_) => CrStatus::Parse,
            _ => CrStatus::Invalid,
        }
    }
}

impl Classify for RebuildError {
    fn status(&self) -> CrStatus {
        match self {
            RebuildError::Chain(e) => e.status(),
            RebuildError::Linalg(e) => e.status(),
            RebuildError::Parse(_) => CrStatus::Parse,
            RebuildError::InvalidScale(_) => CrStatus::OutOfRange,
            _ => CrStatus::Invalid,
        }
    }
}

impl Classify for CircleError {
    fn status(&self) -> CrStatus {
        match self {
            CircleError::OutOfRange { .. } => CrStatus::OutOfRange,
            CircleError::Rebuild(e) => e.status(),
        }
    }
}

impl Classify for NilpotentError {
    fn status(&self) -> CrStatus {
        match self {
            NilpotentError::Parse(_) => CrStatus::Parse,
            NilpotentError::Chain(e) => e.status(),
            NilpotentError::Linalg(e) => e.status(),
            NilpotentError::Rebuild(e) => e.status(),
            _ => CrStatus::Invalid,
        }
    }
}

impl Classify for FarberError {
    fn status(&self) -> CrStatus {
        match self {
            FarberError::Parse(_) => CrStatus::Parse,
            _ => CrStatus::Invalid,
        }
    }
}
