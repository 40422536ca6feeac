//! Lattice systoles with certified minimizers, and SL(n,Z) plumbing.
//!
//! The systole of a flat Finsler torus is a shortest-vector problem,
//!
//! ```text
//! sys(F) = min{f(v) | v in Z^n \ {0}},
//! ```
//!
//! solved here by complete enumeration of a coordinate box: every coordinate
//! of a candidate obeys `|v_k| = |e_k . v| <= f*(e_k) f(v)`, so once any
//! incumbent with value `s` is known the minimizer lives in the box
//! `|v_k| <= f*(e_k) s`. The initial incumbent is the best basis vector and
//! the box shrinks as better vectors appear. Comparisons go through the exact
//! measures of [`crate::gauge`], so for rational-data families the reported
//! minimum does not depend on floating-point rounding.
//!
//! [`unimodular_complete`] extends a primitive vector `u` to a matrix
//! `A in SL(n,Z)` with `A e_1 = u` by integer column operations, which is what
//! lets the capacity engine assume `f(e_1) = sys(F)` after a change of basis.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::gauge::GaugeSpec;
use crate::linalg::MatZ;

/// Default limit on enumerated box volume (number of lattice points).
pub const DEFAULT_ENUM_CAP: u128 = 1_000_000_000;

/// Safety margin on enumeration boxes: covers `f64` rounding of the products
/// `f*(e_k) * s` so boundary minimizers are never excluded.
const BOX_REL_MARGIN: f64 = 1e-12;
const BOX_ABS_MARGIN: f64 = 1e-9;

/// Extra inflation for boxes derived from approximate (oracle-ascent) dual
/// values, which are lower bounds on the true duals.
const ORACLE_BOX_INFLATION: f64 = 1.25;

/// The systole and a canonical minimizing lattice vector.
#[derive(Clone, Debug)]
pub struct SystoleResult {
    /// The systole `sys(F)`.
    pub s: f64,
    /// Canonical minimizer: first nonzero entry positive, smallest in the
    /// order of [`cmp_canonical`] among all such minimizers.
    pub u: Vec<i64>,
    /// False when the enumeration box relied on approximate dual values
    /// (oracle family without a dual callback).
    pub exhaustive: bool,
}

/// An integer matrix with determinant +1, carrying its exact integer inverse.
#[derive(Clone, Debug)]
pub struct UnimodularMatrix {
    mat: MatZ,
    inv: MatZ,
}

impl UnimodularMatrix {
    /// Validates `det = +1` in exact integer arithmetic and computes the
    /// exact inverse.
    pub fn new(mat: MatZ) -> Result<UnimodularMatrix> {
        if mat.rows() != mat.cols() {
            return Err(Error::DimensionMismatch {
                expected: mat.rows(),
                got: mat.cols(),
            });
        }
        let det = mat.det()?;
        if det != 1 {
            return Err(Error::NotUnimodular { det });
        }
        let inv = crate::linalg::RatMat::from_matz(&mat).inverse()?.to_matz()?;
        Ok(UnimodularMatrix { mat, inv })
    }

    pub fn identity(n: usize) -> UnimodularMatrix {
        UnimodularMatrix {
            mat: MatZ::identity(n),
            inv: MatZ::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &MatZ {
        &self.mat
    }

    pub fn inverse(&self) -> &MatZ {
        &self.inv
    }

    pub fn mul(&self, other: &UnimodularMatrix) -> Result<UnimodularMatrix> {
        Ok(UnimodularMatrix {
            mat: self.mat.mul(&other.mat)?,
            inv: other.inv.mul(&self.inv)?,
        })
    }
}

/// Entry order `0 < 1 < -1 < 2 < -2 < ...` applied lexicographically.
///
/// This is the order in which the enumerator visits candidates, the sort
/// order of [`enumerate_short_vectors`], and the tie-break among systole
/// minimizers.
pub fn cmp_canonical(a: &[i64], b: &[i64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let kx = (x.unsigned_abs(), *x < 0);
        let ky = (y.unsigned_abs(), *y < 0);
        match kx.cmp(&ky) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Per-coordinate enumeration bounds `|v_k| <= f*(e_k) * s`, slightly
/// inflated to absorb rounding (and oracle undershoot).
struct BoxBounds {
    duals: Vec<f64>,
    bounds: Vec<i64>,
    approximate: bool,
}

impl BoxBounds {
    fn new(spec: &GaugeSpec, s: f64) -> Result<BoxBounds> {
        let n = spec.dim();
        let mut duals = Vec::with_capacity(n);
        let mut approximate = false;
        for k in 0..n {
            let d = spec.dual_unit(k)?;
            if !d.value.is_finite() || d.value <= 0.0 || d.value > 1e15 {
                return Err(Error::Domain(String::from(
                    "dual gauge of a basis covector is unusable for box bounds",
                )));
            }
            let inflation = if d.approximate {
                approximate = true;
                ORACLE_BOX_INFLATION
            } else {
                1.0
            };
            duals.push(d.value * inflation);
        }
        let mut bb = BoxBounds {
            duals,
            bounds: vec![0; n],
            approximate,
        };
        bb.reset(s)?;
        Ok(bb)
    }

    fn bound_for(dual: f64, s: f64) -> Result<i64> {
        let raw = dual * s * (1.0 + BOX_REL_MARGIN) + BOX_ABS_MARGIN;
        if !(0.0..4e18).contains(&raw) {
            return Err(Error::ResourceLimit {
                points: u128::MAX,
                cap: 0,
            });
        }
        Ok(raw as i64)
    }

    fn reset(&mut self, s: f64) -> Result<()> {
        for k in 0..self.duals.len() {
            self.bounds[k] = Self::bound_for(self.duals[k], s)?;
        }
        Ok(())
    }

    fn volume(&self) -> u128 {
        let mut points: u128 = 1;
        for &b in &self.bounds {
            let side = 2u128 * (b as u128) + 1;
            points = match points.checked_mul(side) {
                Some(p) => p,
                None => return u128::MAX,
            };
        }
        points
    }
}

/// Depth-first walk over the sign-normalized half of the box (first nonzero
/// entry positive), visiting candidates in the order of [`cmp_canonical`].
/// The sink may shrink `bounds` between leaves.
fn walk<F>(
    bounds: &mut Vec<i64>,
    v: &mut Vec<i64>,
    k: usize,
    nonzero: bool,
    sink: &mut F,
) -> Result<()>
where
    F: FnMut(&[i64], &mut Vec<i64>) -> Result<()>,
{
    if k == v.len() {
        if nonzero {
            sink(&v[..], bounds)?;
        }
        return Ok(());
    }
    let mut m: i64 = 0;
    while m <= bounds[k] {
        v[k] = m;
        walk(bounds, v, k + 1, nonzero || m != 0, sink)?;
        // Leading entries stay non-negative so each +-v pair is visited once.
        if m != 0 && nonzero {
            v[k] = -m;
            walk(bounds, v, k + 1, true, sink)?;
        }
        m += 1;
    }
    v[k] = 0;
    Ok(())
}

/// Computes the systole with the default resource cap.
pub fn systole(spec: &GaugeSpec) -> Result<SystoleResult> {
    systole_capped(spec, DEFAULT_ENUM_CAP)
}

/// Computes the systole, refusing enumeration boxes above `cap` points.
pub fn systole_capped(spec: &GaugeSpec, cap: u128) -> Result<SystoleResult> {
    let n = spec.dim();

    // Initial incumbent: the best basis vector, canonically smallest on ties.
    let mut best_vec = vec![0i64; n];
    let mut best_gauge = f64::INFINITY;
    let mut probe = vec![0i64; n];
    for k in 0..n {
        probe[k] = 1;
        let g = spec.gauge(&int_vec_f64(&probe))?;
        let better = g < best_gauge
            || (g == best_gauge && cmp_canonical(&probe, &best_vec) == Ordering::Less);
        if better {
            best_gauge = g;
            best_vec = probe.clone();
        }
        probe[k] = 0;
    }
    let mut best_measure = spec.measure(&best_vec)?;

    let mut boxes = BoxBounds::new(spec, best_gauge)?;
    let points = boxes.volume();
    if points > cap {
        return Err(Error::ResourceLimit { points, cap });
    }
    let exhaustive = !boxes.approximate;

    let mut v = vec![0i64; n];
    {
        let best_vec = &mut best_vec;
        let best_measure = &mut best_measure;
        let best_gauge = &mut best_gauge;
        let duals = boxes.duals.clone();
        let mut sink = |cand: &[i64], bounds: &mut Vec<i64>| -> Result<()> {
            let m = spec.measure(cand)?;
            match m.cmp_measure(best_measure) {
                Ordering::Less => {
                    *best_measure = m;
                    best_vec.clear();
                    best_vec.extend_from_slice(cand);
                    *best_gauge = spec.gauge(&int_vec_f64(cand))?;
                    for (k, b) in bounds.iter_mut().enumerate() {
                        *b = (*b).min(BoxBounds::bound_for(duals[k], *best_gauge)?);
                    }
                }
                Ordering::Equal => {
                    if cmp_canonical(cand, best_vec) == Ordering::Less {
                        best_vec.clear();
                        best_vec.extend_from_slice(cand);
                    }
                }
                Ordering::Greater => {}
            }
            Ok(())
        };
        walk(&mut boxes.bounds, &mut v, 0, false, &mut sink)?;
    }

    Ok(SystoleResult {
        s: best_gauge,
        u: best_vec,
        exhaustive,
    })
}

/// All nonzero lattice vectors with `gauge(v) <= bound`, sign-normalized and
/// sorted canonically. Default resource cap.
pub fn enumerate_short_vectors(spec: &GaugeSpec, bound: f64) -> Result<Vec<Vec<i64>>> {
    enumerate_short_vectors_capped(spec, bound, DEFAULT_ENUM_CAP)
}

/// [`enumerate_short_vectors`] with an explicit box-volume cap.
pub fn enumerate_short_vectors_capped(
    spec: &GaugeSpec,
    bound: f64,
    cap: u128,
) -> Result<Vec<Vec<i64>>> {
    if !bound.is_finite() || bound <= 0.0 {
        return Err(Error::Domain(String::from(
            "enumeration bound must be positive and finite",
        )));
    }
    let mut boxes = BoxBounds::new(spec, bound)?;
    let points = boxes.volume();
    if points > cap {
        return Err(Error::ResourceLimit { points, cap });
    }
    let gate = spec.bound_gate(bound)?;
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut v = vec![0i64; spec.dim()];
    let mut sink = |cand: &[i64], _bounds: &mut Vec<i64>| -> Result<()> {
        if gate.admits(&spec.measure(cand)?) {
            out.push(cand.to_vec());
        }
        Ok(())
    };
    walk(&mut boxes.bounds, &mut v, 0, false, &mut sink)?;
    // The walk already visits in canonical order; keep the sort as a
    // guarantee rather than an accident of traversal.
    out.sort_by(|a, b| cmp_canonical(a, b));
    Ok(out)
}

fn int_vec_f64(v: &[i64]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

/// Extended gcd: `(g, x, y)` with `a x + b y = g`, `g >= 0`.
fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_x, mut x) = (1i128, 0i128);
    let (mut old_y, mut y) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_x, x) = (x, old_x - q * x);
        (old_y, y) = (y, old_y - q * y);
    }
    if old_r < 0 {
        (-old_r, -old_x, -old_y)
    } else {
        (old_r, old_x, old_y)
    }
}

/// Completes a primitive integer vector `u` to `A in SL(n,Z)` with
/// `A e_1 = u`.
///
/// Column operations on the pair `(w_1, w_k)` clear `w_k` with a Bezout
/// block of determinant one; the Bezout coefficient is normalized to the
/// least non-negative residue so the construction is canonical. Both
/// postconditions (`det A = 1`, `A e_1 = u`) are re-verified in exact
/// integer arithmetic before returning.
pub fn unimodular_complete(u: &[i64]) -> Result<UnimodularMatrix> {
    let n = u.len();
    if n == 0 {
        return Err(Error::InvalidSpec(String::from("empty vector")));
    }
    let mut g_all: i128 = 0;
    for &x in u {
        g_all = crate::linalg::gcd_i128(g_all, x as i128);
    }
    if g_all != 1 {
        return Err(Error::NotPrimitive { gcd: g_all });
    }
    if n == 1 {
        // u = (1) is the identity; u = (-1) has no det +1 completion.
        return if u[0] == 1 {
            Ok(UnimodularMatrix::identity(1))
        } else {
            Err(Error::NotUnimodular { det: -1 })
        };
    }

    let mut w: Vec<i128> = u.iter().map(|&x| x as i128).collect();
    let mut a = MatZ::identity(n);
    for k in 1..n {
        let (w0, wk) = (w[0], w[k]);
        if w0 == 0 && wk == 0 {
            continue;
        }
        let (g, x, y) = if wk == 0 {
            (w0.abs(), w0.signum(), 0)
        } else {
            let (g0, x0, _) = extended_gcd(w0, wk);
            let modulus = (wk / g0).abs();
            let x = x0.rem_euclid(modulus);
            // a x + b y = g determines y exactly.
            let y = (g0 - x * w0) / wk;
            (g0, x, y)
        };
        // Determinant-one block acting on columns 0 and k.
        let mut e_inv = MatZ::identity(n);
        e_inv.set(0, 0, w0 / g);
        e_inv.set(0, k, -y);
        e_inv.set(k, 0, wk / g);
        e_inv.set(k, k, x);
        a = a.mul(&e_inv)?;
        w[0] = g;
        w[k] = 0;
    }

    // Defensive re-verification in exact arithmetic.
    let det = a.det()?;
    if det != 1 {
        return Err(Error::NotUnimodular { det });
    }
    for (i, &ui) in u.iter().enumerate() {
        if a.get(i, 0) != ui as i128 {
            return Err(Error::InvalidSpec(String::from(
                "completion lost its first column",
            )));
        }
    }
    UnimodularMatrix::new(a)
}

/// Pullback gauge `f o A`.
pub fn pull_back(spec: &GaugeSpec, a: &UnimodularMatrix) -> Result<GaugeSpec> {
    spec.compose_integer(a.matrix(), a.inverse())
}

/// Changes basis so the systole is attained at `e_1`: returns the pullback
/// spec `f o A`, the matrix `A` with `A e_1 = u`, and the systole `s`.
pub fn reduce_norm(spec: &GaugeSpec) -> Result<(GaugeSpec, UnimodularMatrix, f64)> {
    let sys = systole(spec)?;
    let a = unimodular_complete(&sys.u)?;
    let spec_a = pull_back(spec, &a)?;
    Ok((spec_a, a, sys.s))
}
