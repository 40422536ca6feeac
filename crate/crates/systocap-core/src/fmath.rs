//! Float math shim: `std` intrinsics when available, `libm` otherwise.
//!
//! Only the handful of functions the crate actually uses. Both backends are
//! correctly rounded or within 1 ulp for these functions, far below every
//! tolerance in the certificates.

#![allow(dead_code)]

#[cfg(feature = "std")]
mod backend {
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    pub fn powf(x: f64, y: f64) -> f64 {
        x.powf(y)
    }
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    pub fn cos(x: f64) -> f64 {
        x.cos()
    }
    pub fn sin(x: f64) -> f64 {
        x.sin()
    }
    pub fn atan2(y: f64, x: f64) -> f64 {
        y.atan2(x)
    }
    pub fn floor(x: f64) -> f64 {
        x.floor()
    }
    pub fn ceil(x: f64) -> f64 {
        x.ceil()
    }
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
mod backend {
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    pub fn powf(x: f64, y: f64) -> f64 {
        libm::pow(x, y)
    }
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }
    pub fn atan2(y: f64, x: f64) -> f64 {
        libm::atan2(y, x)
    }
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }
    pub fn ceil(x: f64) -> f64 {
        libm::ceil(x)
    }
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
}

pub use backend::*;
