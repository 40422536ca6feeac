//! Symplectic capacities of disc cotangent bundles of flat reversible Finsler
//! tori.
//!
//! A flat reversible Finsler norm on the torus `T^n = R^n / Z^n` is determined
//! by a single convex gauge `f: R^n -> R` (positively homogeneous, even,
//! positive away from the origin) with open unit ball `K = {v | f(v) < 1}`.
//! The disc cotangent bundle is
//!
//! ```text
//! D*_F T^n = {(q, p) in T^n x (R^n)* | f*(p) < 1},
//! ```
//!
//! carrying the canonical symplectic form `omega = sum_k dp_k ^ dq_k`, where
//! `f*(p) = sup_{v in K} |p . v|` is the dual (polar) gauge. Every normalized
//! symplectic capacity `c` satisfies
//!
//! ```text
//! c(D*_F T^n, omega) <= 2 sys(F),      sys(F) = min{f(v) | v in Z^n \ {0}},
//! ```
//!
//! with equality when `f` admits a flat Riemannian minorant with the same
//! systole, or when `c >= c_HZ`. This crate computes the value `2 sys(F)` and
//! produces the data needed to re-check both bounds independently:
//!
//! * the upper bound as an explicit symplectic embedding into the cylinder
//!   `Z_r1` with `pi r1^2 = 2 sys(F)`, verified numerically (symplectic
//!   defect, containment, injectivity on samples), and
//! * the lower bound as an exact lattice statement (no nonzero integer vector
//!   lies in the open scaled ball `s K`) plus the Lagrangian product
//!   inclusion, with the constant `c_HZ(K x K*) = 4` cited, not computed.
//!
//! Module map:
//!
//! * [`gauge`]: gauge families (`l^p`, ellipsoid, polytope in V- or H-form,
//!   oracle callbacks), dual gauges, polar duality, Euclidean sandwich bounds,
//!   axiom diagnostics.
//! * [`lattice`]: lattice systoles with certified minimizers by box
//!   enumeration, unimodular completion of primitive vectors, norm reduction.
//! * [`embedding`]: the coordinate splitting, cotangent lifts, annulus-to-disc
//!   maps, the full cylinder embedding, and finite-difference verification.
//! * [`capacity`]: orchestration of the theorem, case classification for the
//!   lower bound, certificate assembly, gauge scaling.
//!
//! ```
//! use systocap_core::capacity::capacity;
//! use systocap_core::gauge::GaugeSpec;
//!
//! // The Gram matrix [[5, 3], [3, 2]] has systole 1, attained at (1, -1).
//! let spec = GaugeSpec::ellipsoid(&[vec![5.0, 3.0], vec![3.0, 2.0]])?;
//! let cert = capacity(&spec)?;
//! assert_eq!(cert.value, 2.0 * cert.systole.s);
//! assert_eq!(cert.systole.u, vec![1, -1]);
//! assert!(cert.upper_report.passes() && cert.lower_lattice_check);
//! # Ok::<(), systocap_core::Error>(())
//! ```
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default `std`
//! feature and enable `libm` for the float math backend. All randomized
//! routines take explicit seeds and use a fixed counter-based generator, so
//! results are reproducible across runs and platforms.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("systocap-core needs either the `std` feature or the `libm` feature");

extern crate alloc;

pub mod capacity;
pub mod embedding;
mod error;
pub(crate) mod fmath;
pub mod gauge;
pub mod lattice;
pub mod linalg;
pub(crate) mod rand_util;
pub mod simplex;

pub use error::{Error, Result};
