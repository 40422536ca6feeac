//! Gauge families, dual gauges, polar duality, and Euclidean sandwich bounds.
//!
//! A reversible gauge is a convex function `f: R^n -> R` with `f(tv) = |t| f(v)`
//! and `f(v) > 0` for `v != 0`. Its open unit ball `K = {f < 1}` is a symmetric
//! convex body, and the dual gauge
//!
//! ```text
//! f*(p) = sup_{v in K} |p . v| = sup_{v != 0} |p . v| / f(v)
//! ```
//!
//! is again a reversible gauge with unit ball the polar body `K*`. Biduality
//! `(f*)* = f` holds for closed convex gauges, and the crate relies on it to
//! close the oracle family under duality.
//!
//! [`GaugeSpec`] carries a family tag plus a uniform positive scale multiplier.
//! Closed-form families keep an exact rational mirror of their defining data so
//! that lattice comparisons downstream never depend on floating-point rounding:
//! an `f64` input is itself a binary rational and lifts losslessly.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::fmath;
use crate::linalg::{dot, norm2, rat_from_f64, rat_to_f64, MatF, MatZ, RatMat};
use crate::simplex::{LpSolution, StandardFormLp};

/// Relative tolerance for axiom checks on closed-form families.
pub const AXIOM_TOL_CLOSED: f64 = 1e-9;
/// Relative tolerance for axiom checks on oracle callbacks.
pub const AXIOM_TOL_ORACLE: f64 = 1e-6;

/// Smallest eigenvalue accepted for an ellipsoid Gram matrix.
const MIN_EIGENVALUE: f64 = 1e-12;

/// Seed of the internal generator used by the oracle dual ascent. Fixed so
/// that `dual_gauge` is a pure function of its inputs.
const ORACLE_DUAL_SEED: u64 = 0x7379_7374_6f63_6170;

/// Number of ascent starts for the oracle dual.
const ORACLE_DUAL_STARTS: usize = 64;

/// Gauge callback. Must be positively homogeneous, even, positive away from
/// the origin, and finite; the crate checks these statistically via
/// [`GaugeSpec::check_gauge_axioms`] but cannot prove them.
pub type GaugeFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Exponent of an `l^p` gauge, `p in [1, infinity]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl LpExponent {
    /// `Some(p)` for finite exponents, `None` for the supremum norm.
    pub fn value(&self) -> Option<f64> {
        match self {
            LpExponent::Finite(p) => Some(*p),
            LpExponent::Infinity => None,
        }
    }

    /// Hoelder conjugate, `1/p + 1/q = 1`.
    pub fn conjugate(&self) -> LpExponent {
        match self {
            LpExponent::Infinity => LpExponent::Finite(1.0),
            LpExponent::Finite(p) if *p == 1.0 => LpExponent::Infinity,
            LpExponent::Finite(p) => LpExponent::Finite(p / (p - 1.0)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpData {
    p: LpExponent,
}

impl LpData {
    pub fn exponent(&self) -> LpExponent {
        self.p
    }
}

/// Quadratic form with dyadic rational coefficients, `Q_ij = m_ij 2^exp`.
/// Lets the lattice enumerator compare squared gauge values in `i128`.
#[derive(Clone, Debug)]
pub(crate) struct DyadicForm {
    mantissas: Vec<i128>,
    pub(crate) exp: i32,
    dim: usize,
}

impl DyadicForm {
    fn from_exact(m: &RatMat) -> Option<DyadicForm> {
        let n = m.rows();
        let mut exps = Vec::with_capacity(n * n);
        let mut nums = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let e = m.get(i, j);
                let den = e.denom().magnitude().clone();
                let tz = den.trailing_zeros().unwrap_or(0);
                let shifted: BigUint = den >> tz;
                if !shifted.is_one() {
                    return None;
                }
                exps.push(-(tz as i64));
                nums.push(e.numer().clone());
            }
        }
        let common = *exps.iter().min()?;
        let mut mantissas = Vec::with_capacity(n * n);
        for (num, e) in nums.into_iter().zip(exps) {
            let shift = (e - common) as usize;
            mantissas.push((num << shift).to_i128()?);
        }
        let exp = i32::try_from(common).ok()?;
        Some(DyadicForm {
            mantissas,
            exp,
            dim: n,
        })
    }

    /// `sum_ij m_ij v_i v_j`, or `None` on overflow.
    pub(crate) fn quad(&self, v: &[i64]) -> Option<i128> {
        let n = self.dim;
        let mut acc: i128 = 0;
        for i in 0..n {
            for j in 0..n {
                let term = self.mantissas[i * n + j]
                    .checked_mul(v[i] as i128)?
                    .checked_mul(v[j] as i128)?;
                acc = acc.checked_add(term)?;
            }
        }
        Some(acc)
    }
}

#[derive(Clone, Debug)]
pub struct EllipsoidData {
    pub(crate) gram: MatF,
    pub(crate) gram_exact: RatMat,
    pub(crate) inv_gram: MatF,
    pub(crate) eig_min: f64,
    pub(crate) eig_max: f64,
    pub(crate) dyadic: Option<DyadicForm>,
}

impl EllipsoidData {
    pub fn gram_rows(&self) -> Vec<Vec<f64>> {
        self.gram.to_rows()
    }

    /// The Gram matrix as stored, without float round trips.
    pub fn gram_rows_exact(&self) -> Vec<Vec<BigRational>> {
        self.gram_exact.to_rows()
    }

    /// `(lambda_min, lambda_max)` of the Gram matrix.
    pub fn eigenvalue_range(&self) -> (f64, f64) {
        (self.eig_min, self.eig_max)
    }
}

#[derive(Clone, Debug)]
pub struct PolytopeVData {
    pub(crate) vertices: Vec<Vec<f64>>,
    pub(crate) vertices_exact: Vec<Vec<BigRational>>,
}

impl PolytopeVData {
    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Vertices as stored, without float round trips.
    pub fn vertices_exact(&self) -> &[Vec<BigRational>] {
        &self.vertices_exact
    }
}

#[derive(Clone, Debug)]
pub struct PolytopeHData {
    pub(crate) normals: Vec<Vec<f64>>,
    pub(crate) offsets: Vec<f64>,
    pub(crate) normals_exact: Vec<Vec<BigRational>>,
    pub(crate) offsets_exact: Vec<BigRational>,
}

impl PolytopeHData {
    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Normals as stored, without float round trips.
    pub fn normals_exact(&self) -> &[Vec<BigRational>] {
        &self.normals_exact
    }

    /// Offsets as stored, without float round trips.
    pub fn offsets_exact(&self) -> &[BigRational] {
        &self.offsets_exact
    }
}

#[derive(Clone)]
pub struct OracleData {
    gauge_fn: GaugeFn,
    dual_fn: Option<GaugeFn>,
    label: String,
}

impl OracleData {
    pub fn label(&self) -> &str {
        &self.label
    }

    /// True when the caller supplied a closed-form dual callback.
    pub fn has_exact_dual(&self) -> bool {
        self.dual_fn.is_some()
    }
}

impl core::fmt::Debug for OracleData {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("OracleData")
            .field("label", &self.label)
            .field("has_exact_dual", &self.dual_fn.is_some())
            .finish()
    }
}

/// The supported gauge families.
#[derive(Clone, Debug)]
pub enum Family {
    Lp(LpData),
    Ellipsoid(EllipsoidData),
    PolytopeV(PolytopeVData),
    PolytopeH(PolytopeHData),
    Oracle(OracleData),
}

/// A reversible gauge on `R^n`: a family member times a positive scale.
///
/// All constructors validate their data (exponent range, positive
/// definiteness, symmetry under negation, boundedness) and build the exact
/// rational mirror alongside the floating-point one.
#[derive(Clone)]
pub struct GaugeSpec {
    dim: usize,
    scale: f64,
    scale_exact: BigRational,
    family: Family,
}

impl core::fmt::Debug for GaugeSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("GaugeSpec")
            .field("dim", &self.dim)
            .field("scale", &self.scale)
            .field("family", &self.family_name())
            .finish()
    }
}

/// Value of a dual gauge evaluation. `approximate` is set when the value came
/// from the oracle ascent rather than a closed form, in which case it is a
/// certified lower bound on the true dual value but may undershoot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualValue {
    pub value: f64,
    pub approximate: bool,
}

/// Euclidean radii with `B(r_in) subset K subset B(r_out)` for the unit ball
/// `K` of the gauge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichRadii {
    pub r_in: f64,
    pub r_out: f64,
    /// Set when `r_out` relied on approximate dual evaluations.
    pub approximate: bool,
}

/// Result of a randomized check of the gauge axioms. Violations are relative;
/// `violations` counts the samples where any of them exceeded `tolerance`.
#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_homogeneity_violation: f64,
    pub max_reversibility_violation: f64,
    pub max_triangle_violation: f64,
    /// Samples where the gauge was not finite and positive away from zero.
    pub positivity_failures: usize,
    pub violations: usize,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        self.violations == 0 && self.positivity_failures == 0
    }
}

fn validate_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidSpec(String::from("dimension must be positive")));
    }
    Ok(())
}

fn rows_to_exact(rows: &[Vec<f64>]) -> Result<Vec<Vec<BigRational>>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| rat_from_f64(x)).collect())
        .collect()
}

fn exact_rows_to_f64(rows: &[Vec<BigRational>]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.iter().map(rat_to_f64).collect()).collect()
}

fn pow2_rat(exp: i32) -> BigRational {
    if exp >= 0 {
        BigRational::from_integer(BigInt::one() << exp as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-exp) as usize)
    }
}

impl GaugeSpec {
    // ----- constructors ---------------------------------------------------

    /// The `l^p` gauge for finite `p >= 1`.
    pub fn lp(dim: usize, p: f64) -> Result<GaugeSpec> {
        validate_dim(dim)?;
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidSpec(format!(
                "lp exponent must satisfy p >= 1, got {p}"
            )));
        }
        Ok(GaugeSpec {
            dim,
            scale: 1.0,
            scale_exact: BigRational::one(),
            family: Family::Lp(LpData {
                p: LpExponent::Finite(p),
            }),
        })
    }

    /// The supremum-norm gauge.
    pub fn lp_infinity(dim: usize) -> Result<GaugeSpec> {
        validate_dim(dim)?;
        Ok(GaugeSpec {
            dim,
            scale: 1.0,
            scale_exact: BigRational::one(),
            family: Family::Lp(LpData {
                p: LpExponent::Infinity,
            }),
        })
    }

    /// Ellipsoid gauge `sqrt(v^T Q v)` for a symmetric positive definite `Q`
    /// given by rows.
    pub fn ellipsoid(gram_rows: &[Vec<f64>]) -> Result<GaugeSpec> {
        let exact = rows_to_exact(gram_rows)?;
        Self::ellipsoid_exact(exact)
    }

    /// Ellipsoid gauge from an exact rational Gram matrix. The matrix must be
    /// exactly symmetric; positive definiteness is checked numerically.
    pub fn ellipsoid_exact(gram_rows: Vec<Vec<BigRational>>) -> Result<GaugeSpec> {
        let n = gram_rows.len();
        validate_dim(n)?;
        for row in &gram_rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if gram_rows[i][j] != gram_rows[j][i] {
                    return Err(Error::InvalidSpec(String::from(
                        "ellipsoid gram matrix must be symmetric",
                    )));
                }
            }
        }
        let gram_exact = RatMat::from_rows(&gram_rows)?;
        let gram = gram_exact.to_f64();
        let (eigs, _) = crate::linalg::jacobi_eigen(&gram)?;
        let eig_min = eigs[0];
        let eig_max = eigs[n - 1];
        if eig_min <= MIN_EIGENVALUE {
            return Err(Error::InvalidSpec(format!(
                "ellipsoid gram matrix must be positive definite (min eigenvalue {eig_min:.3e})"
            )));
        }
        let inv_gram = gram_exact.inverse()?.to_f64();
        let dyadic = DyadicForm::from_exact(&gram_exact);
        Ok(GaugeSpec {
            dim: n,
            scale: 1.0,
            scale_exact: BigRational::one(),
            family: Family::Ellipsoid(EllipsoidData {
                gram,
                gram_exact,
                inv_gram,
                eig_min,
                eig_max,
                dyadic,
            }),
        })
    }

    /// Gauge of the convex hull of a symmetric vertex set (V-representation).
    /// The list must be closed under negation within `1e-12` and span `R^n`.
    pub fn polytope_v(vertices: Vec<Vec<f64>>) -> Result<GaugeSpec> {
        let exact = rows_to_exact(&vertices)?;
        Self::polytope_v_from_parts(vertices, exact, 1e-12)
    }

    /// V-polytope gauge from exact rational vertices (closure under negation
    /// is required exactly).
    pub fn polytope_v_exact(vertices: Vec<Vec<BigRational>>) -> Result<GaugeSpec> {
        let approx = exact_rows_to_f64(&vertices);
        Self::polytope_v_from_parts(approx, vertices, 0.0)
    }

    fn polytope_v_from_parts(
        vertices: Vec<Vec<f64>>,
        vertices_exact: Vec<Vec<BigRational>>,
        negation_tol: f64,
    ) -> Result<GaugeSpec> {
        if vertices.is_empty() {
            return Err(Error::InvalidSpec(String::from(
                "polytope needs at least one vertex",
            )));
        }
        let n = vertices[0].len();
        validate_dim(n)?;
        for v in &vertices {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain(String::from("vertex coordinates must be finite")));
            }
        }
        // Closure under negation: every vertex needs a mirror partner.
        for v in &vertices {
            let scale = 1.0 + v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let found = vertices.iter().any(|w| {
                v.iter()
                    .zip(w)
                    .all(|(a, b)| (a + b).abs() <= negation_tol * scale)
            });
            if !found {
                return Err(Error::InvalidSpec(String::from(
                    "vertex set must be closed under negation",
                )));
            }
        }
        let mat = RatMat::from_rows(&vertices_exact)?;
        if mat.rank() < n {
            return Err(Error::InvalidSpec(String::from(
                "vertex set must span R^n",
            )));
        }
        Ok(GaugeSpec {
            dim: n,
            scale: 1.0,
            scale_exact: BigRational::one(),
            family: Family::PolytopeV(PolytopeVData {
                vertices,
                vertices_exact,
            }),
        })
    }

    /// Gauge of the polytope `{v | a_i . v <= b_i}` (H-representation) with
    /// all `b_i > 0`. The body must be bounded and symmetric; both are
    /// verified with support-function linear programs.
    pub fn polytope_h(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<GaugeSpec> {
        let normals_exact = rows_to_exact(&normals)?;
        let offsets_exact = offsets
            .iter()
            .map(|&b| rat_from_f64(b))
            .collect::<Result<Vec<_>>>()?;
        Self::polytope_h_from_parts(normals, offsets, normals_exact, offsets_exact)
    }

    /// H-polytope gauge from exact rational data.
    pub fn polytope_h_exact(
        normals: Vec<Vec<BigRational>>,
        offsets: Vec<BigRational>,
    ) -> Result<GaugeSpec> {
        let approx_n = exact_rows_to_f64(&normals);
        let approx_b: Vec<f64> = offsets.iter().map(rat_to_f64).collect();
        Self::polytope_h_from_parts(approx_n, approx_b, normals, offsets)
    }

    fn polytope_h_from_parts(
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
        normals_exact: Vec<Vec<BigRational>>,
        offsets_exact: Vec<BigRational>,
    ) -> Result<GaugeSpec> {
        if normals.is_empty() {
            return Err(Error::InvalidSpec(String::from(
                "polytope needs at least one halfspace",
            )));
        }
        if normals.len() != offsets.len() {
            return Err(Error::DimensionMismatch {
                expected: normals.len(),
                got: offsets.len(),
            });
        }
        let n = normals[0].len();
        validate_dim(n)?;
        for a in &normals {
            if a.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: a.len(),
                });
            }
            if a.iter().all(|x| *x == 0.0) {
                return Err(Error::InvalidSpec(String::from("zero normal vector")));
            }
        }
        if offsets.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::InvalidSpec(String::from(
                "halfspace offsets must be positive",
            )));
        }
        let spec = GaugeSpec {
            dim: n,
            scale: 1.0,
            scale_exact: BigRational::one(),
            family: Family::PolytopeH(PolytopeHData {
                normals,
                offsets,
                normals_exact,
                offsets_exact,
            }),
        };
        // Boundedness: finite support value in all +-e_k directions.
        let mut dir = vec![0.0; n];
        for k in 0..n {
            for sign in [1.0, -1.0] {
                dir[k] = sign;
                spec.polytope_h_support(&dir)?;
                dir[k] = 0.0;
            }
        }
        // Symmetry: -K subset K, i.e. sup_{v in K} (-a_i . v) <= b_i.
        if let Family::PolytopeH(data) = &spec.family {
            for (a, &b) in data.normals.iter().zip(&data.offsets) {
                let neg: Vec<f64> = a.iter().map(|x| -x).collect();
                let h = spec.polytope_h_support(&neg)?;
                if h > b * (1.0 + 1e-9) {
                    return Err(Error::InvalidSpec(String::from(
                        "halfspace polytope must be symmetric about the origin",
                    )));
                }
            }
        }
        Ok(spec)
    }

    /// Gauge defined by a callback. The dual is evaluated by multi-start
    /// ascent and flagged approximate.
    pub fn oracle(dim: usize, label: impl Into<String>, gauge_fn: GaugeFn) -> Result<GaugeSpec> {
        Self::oracle_from_parts(dim, label.into(), gauge_fn, None)
    }

    /// Oracle gauge with a trusted closed-form dual callback.
    pub fn oracle_with_dual(
        dim: usize,
        label: impl Into<String>,
        gauge_fn: GaugeFn,
        dual_fn: GaugeFn,
    ) -> Result<GaugeSpec> {
        Self::oracle_from_parts(dim, label.into(), gauge_fn, Some(dual_fn))
    }

    fn oracle_from_parts(
        dim: usize,
        label: String,
        gauge_fn: GaugeFn,
        dual_fn: Option<GaugeFn>,
    ) -> Result<GaugeSpec> {
        validate_dim(dim)?;
        // Light probe: the callback must be finite and positive on a basis.
        let mut probe = vec![0.0; dim];
        for k in 0..dim {
            probe[k] = 1.0;
            let g = gauge_fn(&probe);
            if !g.is_finite() || g <= 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "oracle gauge must be finite and positive on basis vectors, got {g} at e_{k}"
                )));
            }
            probe[k] = 0.0;
        }
        Ok(GaugeSpec {
            dim,
            scale: 1.0,
            scale_exact: BigRational::one(),
            family: Family::Oracle(OracleData {
                gauge_fn,
                dual_fn,
                label,
            }),
        })
    }

    // ----- accessors ------------------------------------------------------

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Uniform scale multiplier applied on top of the family data.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn scale_exact(&self) -> &BigRational {
        &self.scale_exact
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        match &self.family {
            Family::Lp(d) => match d.p {
                LpExponent::Finite(_) => "lp",
                LpExponent::Infinity => "linf",
            },
            Family::Ellipsoid(_) => "ellipsoid",
            Family::PolytopeV(_) => "polytope-v",
            Family::PolytopeH(_) => "polytope-h",
            Family::Oracle(_) => "oracle",
        }
    }

    /// True when `dual_gauge` values carry the `approximate` flag.
    pub fn dual_is_approximate(&self) -> bool {
        matches!(&self.family, Family::Oracle(d) if d.dual_fn.is_none())
    }

    fn check_vector(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain(String::from("vector entries must be finite")));
        }
        Ok(())
    }

    // ----- evaluation -----------------------------------------------------

    /// Evaluates the gauge at `v`.
    pub fn gauge(&self, v: &[f64]) -> Result<f64> {
        self.check_vector(v)?;
        let base = match &self.family {
            Family::Lp(d) => lp_norm(d.p, v),
            Family::Ellipsoid(e) => {
                let qv = e.gram.matvec(v);
                fmath::sqrt(dot(v, &qv).max(0.0))
            }
            Family::PolytopeV(d) => self.polytope_v_gauge(d, v)?,
            Family::PolytopeH(d) => {
                let mut best = 0.0f64;
                for (a, &b) in d.normals.iter().zip(&d.offsets) {
                    best = best.max(dot(a, v) / b);
                }
                best
            }
            Family::Oracle(d) => {
                let g = (d.gauge_fn)(v);
                if !g.is_finite() {
                    return Err(Error::Domain(format!(
                        "oracle gauge returned a non-finite value {g}"
                    )));
                }
                g
            }
        };
        Ok(self.scale * base)
    }

    /// Evaluates the dual gauge `f*` at `p`.
    pub fn dual_gauge(&self, p: &[f64]) -> Result<DualValue> {
        self.check_vector(p)?;
        let (base, approximate) = match &self.family {
            Family::Lp(d) => (lp_norm(d.p.conjugate(), p), false),
            Family::Ellipsoid(e) => {
                let qp = e.inv_gram.matvec(p);
                (fmath::sqrt(dot(p, &qp).max(0.0)), false)
            }
            Family::PolytopeV(d) => {
                let mut best = 0.0f64;
                for v in &d.vertices {
                    best = best.max(dot(p, v).abs());
                }
                (best, false)
            }
            Family::PolytopeH(_) => (self.polytope_h_support(p)?, false),
            Family::Oracle(d) => match &d.dual_fn {
                Some(dual) => {
                    let g = dual(p);
                    if !g.is_finite() {
                        return Err(Error::Domain(format!(
                            "oracle dual returned a non-finite value {g}"
                        )));
                    }
                    (g, false)
                }
                None => (self.oracle_dual_ascent(d, p), true),
            },
        };
        Ok(DualValue {
            value: base / self.scale,
            approximate,
        })
    }

    pub(crate) fn dual_unit(&self, k: usize) -> Result<DualValue> {
        let mut e = vec![0.0; self.dim];
        e[k] = 1.0;
        self.dual_gauge(&e)
    }

    /// Hull membership LP: `f(x) = min sum lambda_i` subject to
    /// `sum lambda_i v_i = x`, `lambda >= 0`.
    fn polytope_v_gauge(&self, d: &PolytopeVData, x: &[f64]) -> Result<f64> {
        if x.iter().all(|&c| c == 0.0) {
            return Ok(0.0);
        }
        let n = self.dim;
        let m = d.vertices.len();
        let mut a = MatF::zeros(n, m);
        for (j, v) in d.vertices.iter().enumerate() {
            for i in 0..n {
                a.set(i, j, v[i]);
            }
        }
        let lp = StandardFormLp {
            constraints: a,
            rhs: x.to_vec(),
            costs: vec![1.0; m],
        };
        match crate::simplex::solve(&lp)? {
            LpSolution::Optimal { value, .. } => Ok(value.max(0.0)),
            _ => Err(Error::Domain(String::from("hull gauge LP did not solve"))),
        }
    }

    /// Support function `h_K(p) = max_{v in K} p . v` of an H-polytope via the
    /// dual LP `min b^T y` s.t. `A^T y = p`, `y >= 0`.
    fn polytope_h_support(&self, p: &[f64]) -> Result<f64> {
        let d = match &self.family {
            Family::PolytopeH(d) => d,
            _ => unreachable!("support LP is only defined for H-polytopes"),
        };
        let n = self.dim;
        let m = d.normals.len();
        let mut a = MatF::zeros(n, m);
        for (j, nr) in d.normals.iter().enumerate() {
            for i in 0..n {
                a.set(i, j, nr[i]);
            }
        }
        let lp = StandardFormLp {
            constraints: a,
            rhs: p.to_vec(),
            costs: d.offsets.clone(),
        };
        match crate::simplex::solve(&lp)? {
            LpSolution::Optimal { value, .. } => Ok(value.max(0.0)),
            LpSolution::Unbounded => Err(Error::Domain(String::from(
                "support LP unbounded; polytope data degenerate",
            ))),
            LpSolution::Infeasible => Err(Error::InvalidSpec(String::from(
                "halfspace normals do not span R^n; polytope is unbounded",
            ))),
        }
    }

    /// Multi-start coordinate ascent for `sup |p.v| / f_base(v)` on the unit
    /// sphere. Deterministic; returns a lower bound on the dual value.
    fn oracle_dual_ascent(&self, d: &OracleData, p: &[f64]) -> f64 {
        let n = self.dim;
        if norm2(p) == 0.0 {
            return 0.0;
        }
        let g = &d.gauge_fn;
        let ratio = |v: &[f64]| -> f64 {
            let f = g(v);
            if !f.is_finite() || f <= 0.0 {
                return 0.0;
            }
            (dot(p, v) / f).abs()
        };

        let mut starts: Vec<Vec<f64>> = Vec::with_capacity(ORACLE_DUAL_STARTS);
        for k in 0..n {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[k] = sign;
                starts.push(e);
            }
        }
        let pn = norm2(p);
        starts.push(p.iter().map(|x| x / pn).collect());
        let mut rng = crate::rand_util::rng_from_seed(ORACLE_DUAL_SEED);
        while starts.len() < ORACLE_DUAL_STARTS {
            starts.push(crate::rand_util::unit_vec(&mut rng, n));
        }

        let mut best = 0.0f64;
        for start in starts {
            let mut v = start;
            let mut val = ratio(&v);
            for _round in 0..2 {
                for k in 0..n {
                    // Tangent direction toward e_k on the sphere.
                    let vk = v[k];
                    let mut t: Vec<f64> = v.iter().map(|x| -vk * x).collect();
                    t[k] += 1.0;
                    let tn = norm2(&t);
                    if tn < 1e-12 {
                        continue;
                    }
                    for x in &mut t {
                        *x /= tn;
                    }
                    let eval = |theta: f64| -> f64 {
                        let (c, s) = (fmath::cos(theta), fmath::sin(theta));
                        let w: Vec<f64> =
                            v.iter().zip(&t).map(|(a, b)| c * a + s * b).collect();
                        ratio(&w)
                    };
                    // Coarse scan, then golden-section refinement.
                    let half = core::f64::consts::FRAC_PI_2;
                    let mut best_theta = 0.0;
                    let mut best_val = val;
                    let scan = 16;
                    for i in 0..=scan {
                        let theta = -half + (2.0 * half) * (i as f64) / (scan as f64);
                        let y = eval(theta);
                        if y > best_val {
                            best_val = y;
                            best_theta = theta;
                        }
                    }
                    let step = 2.0 * half / (scan as f64);
                    let (mut lo, mut hi) = (best_theta - step, best_theta + step);
                    let inv_phi = 0.618_033_988_749_894_9;
                    let mut t1 = hi - inv_phi * (hi - lo);
                    let mut t2 = lo + inv_phi * (hi - lo);
                    let mut f1 = eval(t1);
                    let mut f2 = eval(t2);
                    for _ in 0..32 {
                        if f1 < f2 {
                            lo = t1;
                            t1 = t2;
                            f1 = f2;
                            t2 = lo + inv_phi * (hi - lo);
                            f2 = eval(t2);
                        } else {
                            hi = t2;
                            t2 = t1;
                            f2 = f1;
                            t1 = hi - inv_phi * (hi - lo);
                            f1 = eval(t1);
                        }
                    }
                    let theta_g = if f1 > f2 { t1 } else { t2 };
                    let y = eval(theta_g);
                    if y > best_val {
                        best_val = y;
                        best_theta = theta_g;
                    }
                    if best_val > val && best_theta != 0.0 {
                        let (c, s) = (fmath::cos(best_theta), fmath::sin(best_theta));
                        let w: Vec<f64> =
                            v.iter().zip(&t).map(|(a, b)| c * a + s * b).collect();
                        let wn = norm2(&w);
                        if wn > 1e-12 {
                            v = w.iter().map(|x| x / wn).collect();
                            val = ratio(&v);
                        }
                    }
                }
            }
            best = best.max(val);
        }
        best
    }

    // ----- duality and geometry --------------------------------------------

    /// The polar gauge as a spec: `l^p <-> l^q`, `Q <-> Q^{-1}`, V-polytope
    /// <-> H-polytope, oracle wrapped through biduality.
    pub fn dual_spec(&self) -> Result<GaugeSpec> {
        let recip_exact = BigRational::one() / self.scale_exact.clone();
        let mut dual = match &self.family {
            Family::Lp(d) => match d.p.conjugate() {
                LpExponent::Finite(q) => Self::lp(self.dim, q)?,
                LpExponent::Infinity => Self::lp_infinity(self.dim)?,
            },
            Family::Ellipsoid(e) => Self::ellipsoid_exact(e.gram_exact.inverse()?.to_rows())?,
            Family::PolytopeV(d) => Self::polytope_h_exact(
                d.vertices_exact.clone(),
                vec![BigRational::one(); d.vertices_exact.len()],
            )?,
            Family::PolytopeH(d) => {
                let verts = d
                    .normals_exact
                    .iter()
                    .zip(&d.offsets_exact)
                    .map(|(a, b)| a.iter().map(|x| x / b).collect())
                    .collect();
                Self::polytope_v_exact(verts)?
            }
            Family::Oracle(d) => match &d.dual_fn {
                Some(dual_fn) => Self::oracle_with_dual(
                    self.dim,
                    format!("dual of {}", d.label),
                    dual_fn.clone(),
                    d.gauge_fn.clone(),
                )?,
                None => {
                    // Gauge of the dual spec is the (approximate) dual value;
                    // its own dual is the original gauge, exactly, by
                    // biduality.
                    let inner = self.clone();
                    let inner2 = self.clone();
                    Self::oracle_with_dual(
                        self.dim,
                        format!("dual of {}", d.label),
                        Arc::new(move |p: &[f64]| {
                            inner.dual_gauge(p).map(|d| d.value).unwrap_or(f64::NAN)
                        }),
                        Arc::new(move |v: &[f64]| inner2.gauge(v).unwrap_or(f64::NAN)),
                    )?
                }
            },
        };
        dual.scale_exact = recip_exact;
        dual.scale = rat_to_f64(&dual.scale_exact);
        Ok(dual)
    }

    /// Euclidean radii sandwiching the unit ball.
    pub fn sandwich_radii(&self) -> Result<SandwichRadii> {
        let n = self.dim as f64;
        let (r_in_base, r_out_base, approximate) = match &self.family {
            Family::Lp(d) => match d.p {
                LpExponent::Finite(p) => {
                    let t = fmath::powf(n, 0.5 - 1.0 / p);
                    if p <= 2.0 {
                        (t, 1.0, false)
                    } else {
                        (1.0, t, false)
                    }
                }
                LpExponent::Infinity => (1.0, fmath::sqrt(n), false),
            },
            Family::Ellipsoid(e) => {
                (1.0 / fmath::sqrt(e.eig_max), 1.0 / fmath::sqrt(e.eig_min), false)
            }
            Family::PolytopeV(d) => {
                let mut max_unit = 0.0f64;
                let mut probe = vec![0.0; self.dim];
                for k in 0..self.dim {
                    probe[k] = 1.0;
                    max_unit = max_unit.max(self.polytope_v_gauge(d, &probe)?);
                    probe[k] = 0.0;
                }
                let r_out = d.vertices.iter().map(|v| norm2(v)).fold(0.0f64, f64::max);
                (1.0 / (fmath::sqrt(n) * max_unit), r_out, false)
            }
            Family::PolytopeH(d) => {
                let r_in = d
                    .normals
                    .iter()
                    .zip(&d.offsets)
                    .map(|(a, &b)| b / norm2(a))
                    .fold(f64::INFINITY, f64::min);
                let mut max_dual = 0.0f64;
                let mut probe = vec![0.0; self.dim];
                for k in 0..self.dim {
                    probe[k] = 1.0;
                    max_dual = max_dual.max(self.polytope_h_support(&probe)?);
                    probe[k] = 0.0;
                }
                (r_in, fmath::sqrt(n) * max_dual, false)
            }
            Family::Oracle(_) => {
                // Generic bounds through |p.v| <= f*(p) f(v):
                // f(v) <= sum |v_k| f(e_k) and ||v||_inf <= max_k f*(e_k) f(v).
                let mut max_gauge = 0.0f64;
                let mut max_dual = 0.0f64;
                let mut approx = false;
                let mut probe = vec![0.0; self.dim];
                for k in 0..self.dim {
                    probe[k] = 1.0;
                    // Base values: full gauge divided by scale.
                    max_gauge = max_gauge.max(self.gauge(&probe)? / self.scale);
                    let dv = self.dual_gauge(&probe)?;
                    max_dual = max_dual.max(dv.value * self.scale);
                    approx |= dv.approximate;
                    probe[k] = 0.0;
                }
                (
                    1.0 / (fmath::sqrt(n) * max_gauge),
                    fmath::sqrt(n) * max_dual,
                    approx,
                )
            }
        };
        Ok(SandwichRadii {
            r_in: r_in_base / self.scale,
            r_out: r_out_base / self.scale,
            approximate,
        })
    }

    /// Randomized relative check of homogeneity, reversibility, and the
    /// triangle inequality. Deterministic for a fixed seed.
    pub fn check_gauge_axioms(&self, samples: usize, seed: u64) -> Result<AxiomReport> {
        let tolerance = if matches!(self.family, Family::Oracle(_)) {
            AXIOM_TOL_ORACLE
        } else {
            AXIOM_TOL_CLOSED
        };
        let mut rng = crate::rand_util::rng_from_seed(seed);
        let mut report = AxiomReport {
            samples,
            seed,
            tolerance,
            max_homogeneity_violation: 0.0,
            max_reversibility_violation: 0.0,
            max_triangle_violation: 0.0,
            positivity_failures: 0,
            violations: 0,
        };
        let tiny = 1e-300;
        for _ in 0..samples {
            // Directions at mixed magnitudes exercise homogeneity honestly.
            let mag = fmath::powf(10.0, 2.0 * rng.random::<f64>() - 1.0);
            let v: Vec<f64> = crate::rand_util::unit_vec(&mut rng, self.dim)
                .iter()
                .map(|x| x * mag)
                .collect();
            let w: Vec<f64> = crate::rand_util::unit_vec(&mut rng, self.dim)
                .iter()
                .map(|x| x * mag)
                .collect();
            let t = fmath::powf(4.0, 2.0 * rng.random::<f64>() - 1.0);

            let fv = self.gauge(&v)?;
            if !fv.is_finite() || fv <= 0.0 {
                report.positivity_failures += 1;
                continue;
            }
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            let tv: Vec<f64> = v.iter().map(|x| t * x).collect();
            let sum: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
            let fneg = self.gauge(&neg)?;
            let ftv = self.gauge(&tv)?;
            let fw = self.gauge(&w)?;
            let fsum = self.gauge(&sum)?;

            let homo = (ftv - t * fv).abs() / (t * fv).max(tiny);
            let rev = (fv - fneg).abs() / fv.max(tiny);
            let tri = ((fsum - fv - fw) / (fv + fw).max(tiny)).max(0.0);

            report.max_homogeneity_violation = report.max_homogeneity_violation.max(homo);
            report.max_reversibility_violation = report.max_reversibility_violation.max(rev);
            report.max_triangle_violation = report.max_triangle_violation.max(tri);
            if homo > tolerance || rev > tolerance || tri > tolerance {
                report.violations += 1;
            }
        }
        Ok(report)
    }

    // ----- transforms -----------------------------------------------------

    /// The gauge `t f` for exact rational `t > 0`. Ellipsoids fold the factor
    /// into the Gram matrix (`t^2 Q`), polytopes shrink their data, and the
    /// remaining families carry it in the scale multiplier.
    pub fn scaled_exact(&self, t: &BigRational) -> Result<GaugeSpec> {
        if !t.is_positive() {
            return Err(Error::InvalidSpec(String::from(
                "scale factor must be positive",
            )));
        }
        let mut out = match &self.family {
            Family::Ellipsoid(e) => {
                let t2 = t * t;
                let rows: Vec<Vec<BigRational>> = e
                    .gram_exact
                    .to_rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(|x| &t2 * x).collect())
                    .collect();
                Self::ellipsoid_exact(rows)?
            }
            Family::PolytopeV(d) => {
                let verts = d
                    .vertices_exact
                    .iter()
                    .map(|v| v.iter().map(|x| x / t).collect())
                    .collect();
                Self::polytope_v_exact(verts)?
            }
            Family::PolytopeH(d) => {
                let offs = d.offsets_exact.iter().map(|b| b / t).collect();
                Self::polytope_h_exact(d.normals_exact.clone(), offs)?
            }
            Family::Lp(_) | Family::Oracle(_) => self.clone(),
        };
        match &self.family {
            Family::Lp(_) | Family::Oracle(_) => {
                out.scale_exact = &self.scale_exact * t;
                out.scale = rat_to_f64(&out.scale_exact);
            }
            _ => {
                out.scale_exact = self.scale_exact.clone();
                out.scale = self.scale;
            }
        }
        Ok(out)
    }

    /// The pullback `f o M` for an integer matrix `M` with integer inverse.
    /// Exact families transform their data exactly; `l^p` and oracle gauges
    /// wrap the composition in a callback.
    pub(crate) fn compose_integer(&self, m: &MatZ, m_inv: &MatZ) -> Result<GaugeSpec> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: m.rows(),
            });
        }
        let mut out = match &self.family {
            Family::Ellipsoid(e) => {
                let m_rat = RatMat::from_matz(m);
                let gram = m_rat.transpose().mul(&e.gram_exact.mul(&m_rat)?)?;
                Self::ellipsoid_exact(gram.to_rows())?
            }
            Family::PolytopeV(d) => {
                let inv_rat = RatMat::from_matz(m_inv);
                let verts = d
                    .vertices_exact
                    .iter()
                    .map(|v| inv_rat.matvec(v))
                    .collect::<Result<Vec<_>>>()?;
                Self::polytope_v_exact(verts)?
            }
            Family::PolytopeH(d) => {
                let mt_rat = RatMat::from_matz(m).transpose();
                let normals = d
                    .normals_exact
                    .iter()
                    .map(|a| mt_rat.matvec(a))
                    .collect::<Result<Vec<_>>>()?;
                Self::polytope_h_exact(normals, d.offsets_exact.clone())?
            }
            Family::Lp(_) | Family::Oracle(_) => {
                let inner = self.clone();
                let m_f = m.to_f64();
                let gauge_fn: GaugeFn = Arc::new(move |v: &[f64]| {
                    inner.gauge(&m_f.matvec(v)).unwrap_or(f64::NAN)
                });
                let label = format!("{} o M", self.family_name());
                if self.dual_is_approximate() {
                    Self::oracle(self.dim, label, gauge_fn)?
                } else {
                    let inner = self.clone();
                    let m_inv_t = m_inv.to_f64().transpose();
                    let dual_fn: GaugeFn = Arc::new(move |p: &[f64]| {
                        inner
                            .dual_gauge(&m_inv_t.matvec(p))
                            .map(|d| d.value)
                            .unwrap_or(f64::NAN)
                    });
                    Self::oracle_with_dual(self.dim, label, gauge_fn, dual_fn)?
                }
            }
        };
        match &self.family {
            // The wrapper closures already include the scale.
            Family::Lp(_) | Family::Oracle(_) => {}
            _ => {
                out.scale_exact = self.scale_exact.clone();
                out.scale = self.scale;
            }
        }
        Ok(out)
    }

    // ----- exact lattice measures ------------------------------------------

    /// Gauge measure of an integer vector, exact where the family allows.
    /// Values are comparable between vectors for one spec; exact kinds are
    /// scale-free (the scale enters through [`GaugeSpec::bound_gate`]).
    pub(crate) fn measure(&self, v: &[i64]) -> Result<Measure> {
        match &self.family {
            Family::Lp(d) => match d.p {
                LpExponent::Finite(p) if p == 1.0 => {
                    let mut acc: i128 = 0;
                    for &x in v {
                        acc += (x as i128).abs();
                    }
                    Ok(Measure::RatLin(BigRational::from_integer(BigInt::from(acc))))
                }
                LpExponent::Finite(p) if p == 2.0 => {
                    let mut acc: i128 = 0;
                    let mut ok = true;
                    for &x in v {
                        match (x as i128).checked_mul(x as i128).and_then(|s| acc.checked_add(s)) {
                            Some(a) => acc = a,
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        Ok(Measure::DyadicSq { q: acc, exp: 0 })
                    } else {
                        let mut r = BigInt::zero();
                        for &x in v {
                            r += BigInt::from(x) * BigInt::from(x);
                        }
                        Ok(Measure::RatSq(BigRational::from_integer(r)))
                    }
                }
                LpExponent::Infinity => {
                    let m = v.iter().map(|x| (*x as i128).abs()).max().unwrap_or(0);
                    Ok(Measure::RatLin(BigRational::from_integer(BigInt::from(m))))
                }
                _ => Ok(Measure::Approx(self.gauge(&int_to_f64(v))?)),
            },
            Family::Ellipsoid(e) => {
                if let Some(form) = &e.dyadic {
                    if let Some(q) = form.quad(v) {
                        return Ok(Measure::DyadicSq { q, exp: form.exp });
                    }
                }
                let vr: Vec<BigRational> = v
                    .iter()
                    .map(|&x| BigRational::from_integer(BigInt::from(x)))
                    .collect();
                let qv = e.gram_exact.matvec(&vr)?;
                let mut acc = BigRational::zero();
                for (a, b) in vr.iter().zip(&qv) {
                    acc += a * b;
                }
                Ok(Measure::RatSq(acc))
            }
            Family::PolytopeH(d) => {
                let vr: Vec<BigRational> = v
                    .iter()
                    .map(|&x| BigRational::from_integer(BigInt::from(x)))
                    .collect();
                let mut best: Option<BigRational> = None;
                for (a, b) in d.normals_exact.iter().zip(&d.offsets_exact) {
                    let mut acc = BigRational::zero();
                    for (ai, vi) in a.iter().zip(&vr) {
                        acc += ai * vi;
                    }
                    let ratio = acc / b;
                    best = Some(match best {
                        Some(cur) if cur >= ratio => cur,
                        _ => ratio,
                    });
                }
                Ok(Measure::RatLin(best.unwrap_or_else(BigRational::zero)))
            }
            Family::PolytopeV(_) | Family::Oracle(_) => {
                Ok(Measure::Approx(self.gauge(&int_to_f64(v))?))
            }
        }
    }

    /// Gate deciding `f(v) <= bound` against [`GaugeSpec::measure`] values,
    /// exactly for exact measure kinds.
    pub(crate) fn bound_gate(&self, bound: f64) -> Result<BoundGate> {
        let bound_rat = rat_from_f64(bound)?;
        Ok(match self.measure_kind() {
            MeasureKind::Approx => BoundGate::Approx { max: bound },
            MeasureKind::RatLin => BoundGate::Lin {
                max_full: &bound_rat / &self.scale_exact,
            },
            kind @ (MeasureKind::RatSq | MeasureKind::DyadicSq { .. }) => {
                // Squaring a negative bound would wrongly admit everything.
                let max_full = if bound >= 0.0 {
                    (&bound_rat * &bound_rat) / (&self.scale_exact * &self.scale_exact)
                } else {
                    BigRational::from_integer(BigInt::from(-1))
                };
                let fast = match kind {
                    MeasureKind::DyadicSq { exp } => {
                        let floor = (&max_full / pow2_rat(exp)).floor().to_integer();
                        let m = floor.to_i128().unwrap_or(match floor.sign() {
                            Sign::Minus => i128::MIN,
                            _ => i128::MAX,
                        });
                        Some((m, exp))
                    }
                    _ => None,
                };
                BoundGate::Sq { max_full, fast }
            }
        })
    }

    pub(crate) fn measure_kind(&self) -> MeasureKind {
        match &self.family {
            Family::Lp(d) => match d.p {
                LpExponent::Finite(p) if p == 1.0 => MeasureKind::RatLin,
                LpExponent::Finite(p) if p == 2.0 => MeasureKind::DyadicSq { exp: 0 },
                LpExponent::Infinity => MeasureKind::RatLin,
                _ => MeasureKind::Approx,
            },
            Family::Ellipsoid(e) => match &e.dyadic {
                Some(form) => MeasureKind::DyadicSq { exp: form.exp },
                None => MeasureKind::RatSq,
            },
            Family::PolytopeH(_) => MeasureKind::RatLin,
            Family::PolytopeV(_) | Family::Oracle(_) => MeasureKind::Approx,
        }
    }

}

fn int_to_f64(v: &[i64]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

fn lp_norm(p: LpExponent, v: &[f64]) -> f64 {
    let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    match p {
        LpExponent::Infinity => m,
        LpExponent::Finite(p) => {
            if m == 0.0 {
                return 0.0;
            }
            if p == 1.0 {
                return v.iter().map(|x| x.abs()).sum();
            }
            if p == 2.0 {
                return fmath::sqrt(dot(v, v));
            }
            let s: f64 = v.iter().map(|x| fmath::powf(x.abs() / m, p)).sum();
            m * fmath::powf(s, 1.0 / p)
        }
    }
}

/// Kind of exact measure a spec produces; see [`Measure`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum MeasureKind {
    /// Squared gauge as `q * 2^exp` with `q` in `i128`.
    DyadicSq { exp: i32 },
    /// Squared gauge as an exact rational.
    RatSq,
    /// Gauge as an exact rational.
    RatLin,
    /// Floating-point gauge value (includes the scale).
    Approx,
}

/// Comparable gauge measure of an integer vector. Exact kinds omit the scale
/// factor, which is constant per spec and cancels in comparisons.
#[derive(Clone, Debug)]
pub(crate) enum Measure {
    DyadicSq { q: i128, exp: i32 },
    RatSq(BigRational),
    RatLin(BigRational),
    Approx(f64),
}

impl Measure {
    fn full_sq(&self) -> Option<BigRational> {
        match self {
            Measure::DyadicSq { q, exp } => {
                Some(BigRational::from_integer(BigInt::from(*q)) * pow2_rat(*exp))
            }
            Measure::RatSq(r) => Some(r.clone()),
            _ => None,
        }
    }

    /// Total order among measures of one spec. Mixed exact squared kinds can
    /// occur when the `i128` fast path overflows for some vectors.
    pub(crate) fn cmp_measure(&self, other: &Measure) -> Ordering {
        match (self, other) {
            (Measure::DyadicSq { q: a, exp: e1 }, Measure::DyadicSq { q: b, exp: e2 })
                if e1 == e2 =>
            {
                a.cmp(b)
            }
            (Measure::RatLin(a), Measure::RatLin(b)) => a.cmp(b),
            (Measure::Approx(a), Measure::Approx(b)) => a.total_cmp(b),
            _ => match (self.full_sq(), other.full_sq()) {
                (Some(a), Some(b)) => a.cmp(&b),
                _ => {
                    debug_assert!(false, "comparing measures of different kinds");
                    Ordering::Equal
                }
            },
        }
    }
}

/// Precomputed comparison `f(v) <= bound` for measures of one spec.
#[derive(Clone, Debug)]
pub(crate) enum BoundGate {
    Sq {
        max_full: BigRational,
        fast: Option<(i128, i32)>,
    },
    Lin {
        max_full: BigRational,
    },
    Approx {
        max: f64,
    },
}

impl BoundGate {
    pub(crate) fn admits(&self, m: &Measure) -> bool {
        match (self, m) {
            (BoundGate::Sq { fast: Some((mx, e)), .. }, Measure::DyadicSq { q, exp })
                if exp == e =>
            {
                q <= mx
            }
            (BoundGate::Sq { max_full, .. }, _) => match m.full_sq() {
                Some(v) => v <= *max_full,
                None => {
                    debug_assert!(false, "squared gate fed a non-squared measure");
                    false
                }
            },
            (BoundGate::Lin { max_full }, Measure::RatLin(v)) => v <= max_full,
            (BoundGate::Approx { max }, Measure::Approx(g)) => g <= max,
            _ => {
                debug_assert!(false, "gate and measure kinds disagree");
                false
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn diag49() -> GaugeSpec {
        GaugeSpec::ellipsoid(&[vec![4.0, 0.0], vec![0.0, 9.0]]).unwrap()
    }

    fn cube_h(n: usize) -> GaugeSpec {
        let mut normals = Vec::new();
        for k in 0..n {
            for s in [1.0, -1.0] {
                let mut a = vec![0.0; n];
                a[k] = s;
                normals.push(a);
            }
        }
        GaugeSpec::polytope_h(normals, vec![1.0; 2 * n]).unwrap()
    }

    fn cross_v(n: usize) -> GaugeSpec {
        let mut verts = Vec::new();
        for k in 0..n {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; n];
                v[k] = s;
                verts.push(v);
            }
        }
        GaugeSpec::polytope_v(verts).unwrap()
    }

    #[test]
    fn gauge_values_match_closed_forms() {
        let l1 = GaugeSpec::lp(2, 1.0).unwrap();
        assert_eq!(l1.gauge(&[1.0, 1.0]).unwrap(), 2.0);

        assert_eq!(diag49().gauge(&[1.0, 0.0]).unwrap(), 2.0);

        let linf = cube_h(2);
        close(linf.gauge(&[0.3, -0.7]).unwrap(), 0.7, 1e-15);
    }

    #[test]
    fn dual_values_match_closed_forms() {
        let l1 = GaugeSpec::lp(2, 1.0).unwrap();
        let d = l1.dual_gauge(&[1.0, -1.0]).unwrap();
        assert_eq!(d.value, 1.0);
        assert!(!d.approximate);

        let e = diag49().dual_gauge(&[2.0, 0.0]).unwrap();
        close(e.value, 1.0, 1e-15);

        let cross = cross_v(2);
        let p = cross.dual_gauge(&[3.0, 4.0]).unwrap();
        assert_eq!(p.value, 4.0);
    }

    #[test]
    fn polytope_v_gauge_solves_hull_lp() {
        let cross = cross_v(2);
        close(cross.gauge(&[0.5, 0.5]).unwrap(), 1.0, 1e-12);
        close(cross.gauge(&[0.25, -0.5]).unwrap(), 0.75, 1e-12);
    }

    #[test]
    fn polytope_h_dual_matches_support_function() {
        let cube = cube_h(2);
        // Support of the cube is the l^1 norm.
        close(cube.dual_gauge(&[3.0, -4.0]).unwrap().value, 7.0, 1e-9);
    }

    #[test]
    fn dual_spec_closed_forms() {
        let l2 = GaugeSpec::lp(3, 2.0).unwrap();
        let d = l2.dual_spec().unwrap();
        match d.family() {
            Family::Lp(data) => assert_eq!(data.exponent().value(), Some(2.0)),
            other => panic!("expected lp, got {other:?}"),
        }

        let e = diag49().dual_spec().unwrap();
        match e.family() {
            Family::Ellipsoid(data) => {
                let rows = data.gram_rows();
                close(rows[0][0], 0.25, 1e-15);
                close(rows[1][1], 1.0 / 9.0, 1e-15);
            }
            other => panic!("expected ellipsoid, got {other:?}"),
        }

        let l1 = GaugeSpec::lp(2, 1.0).unwrap();
        match l1.dual_spec().unwrap().family() {
            Family::Lp(data) => assert_eq!(data.exponent().value(), None),
            other => panic!("expected linf, got {other:?}"),
        }
    }

    #[test]
    fn polar_polytope_conversions() {
        let cross = cross_v(2);
        let dual = cross.dual_spec().unwrap();
        assert!(matches!(dual.family(), Family::PolytopeH(_)));
        // Polar of the cross-polytope is the cube, so the dual gauge is linf.
        close(dual.gauge(&[0.3, -0.7]).unwrap(), 0.7, 1e-12);

        let cube = cube_h(2);
        let dual = cube.dual_spec().unwrap();
        assert!(matches!(dual.family(), Family::PolytopeV(_)));
        close(dual.gauge(&[1.0, 1.0]).unwrap(), 2.0, 1e-12);
    }

    #[test]
    fn biduality_on_ellipsoid() {
        let q = GaugeSpec::ellipsoid(&[vec![5.0, 3.0], vec![3.0, 2.0]]).unwrap();
        let bidual = q.dual_spec().unwrap().dual_spec().unwrap();
        for v in [[1.0, 0.0], [0.3, -0.9], [2.0, 5.0]] {
            close(bidual.gauge(&v).unwrap(), q.gauge(&v).unwrap(), 1e-12);
        }
    }

    #[test]
    fn sandwich_radii_closed_forms() {
        let l2 = GaugeSpec::lp(2, 2.0).unwrap();
        let r = l2.sandwich_radii().unwrap();
        close(r.r_in, 1.0, 1e-15);
        close(r.r_out, 1.0, 1e-15);

        let r = diag49().sandwich_radii().unwrap();
        close(r.r_in, 1.0 / 3.0, 1e-12);
        close(r.r_out, 0.5, 1e-12);

        let l1 = GaugeSpec::lp(2, 1.0).unwrap();
        let r = l1.sandwich_radii().unwrap();
        close(r.r_in, core::f64::consts::FRAC_1_SQRT_2, 1e-15);
        close(r.r_out, 1.0, 1e-15);
    }

    #[test]
    fn sandwich_radii_actually_sandwich() {
        // B(r_in) subset K subset B(r_out) probed on random-ish directions.
        let specs = [cross_v(2), cube_h(2), diag49()];
        let dirs = [[1.0, 0.0], [0.0, 1.0], [0.6, 0.8], [-0.8, 0.6], [0.707, -0.707]];
        for spec in &specs {
            let r = spec.sandwich_radii().unwrap();
            for d in &dirs {
                let f = spec.gauge(d).unwrap();
                let nrm = norm2(d);
                // f(v) <= ||v|| / r_in and f(v) >= ||v|| / r_out.
                assert!(f <= nrm / r.r_in * (1.0 + 1e-9));
                assert!(f >= nrm / r.r_out * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn axiom_check_passes_closed_families_seed_7() {
        for spec in [
            GaugeSpec::lp(2, 1.0).unwrap(),
            GaugeSpec::lp(3, 2.0).unwrap(),
            diag49(),
            cross_v(2),
            cube_h(2),
        ] {
            let report = spec.check_gauge_axioms(200, 7).unwrap();
            assert_eq!(report.violations, 0, "{spec:?}: {report:?}");
            assert!(report.passes());
        }
    }

    #[test]
    fn axiom_check_flags_irreversible_oracle() {
        // ||v||_2 + 0.5 v_1 is convex and homogeneous but not even.
        let spec = GaugeSpec::oracle(
            2,
            "skewed norm",
            Arc::new(|v: &[f64]| {
                fmath::sqrt(v.iter().map(|x| x * x).sum::<f64>()) + 0.5 * v[0]
            }),
        )
        .unwrap();
        let report = spec.check_gauge_axioms(100, 7).unwrap();
        assert!(report.max_reversibility_violation > report.tolerance);
        assert!(!report.passes());
    }

    #[test]
    fn oracle_dual_ascent_reaches_euclidean_dual() {
        let spec = GaugeSpec::oracle(
            2,
            "euclidean",
            Arc::new(|v: &[f64]| fmath::sqrt(v.iter().map(|x| x * x).sum::<f64>())),
        )
        .unwrap();
        let d = spec.dual_gauge(&[3.0, 4.0]).unwrap();
        assert!(d.approximate);
        close(d.value, 5.0, 1e-6);
        assert!(d.value <= 5.0 + 1e-12);
    }

    #[test]
    fn oracle_dual_callback_is_exact() {
        let spec = GaugeSpec::oracle_with_dual(
            2,
            "euclidean",
            Arc::new(|v: &[f64]| fmath::sqrt(v.iter().map(|x| x * x).sum::<f64>())),
            Arc::new(|p: &[f64]| fmath::sqrt(p.iter().map(|x| x * x).sum::<f64>())),
        )
        .unwrap();
        let d = spec.dual_gauge(&[3.0, 4.0]).unwrap();
        assert!(!d.approximate);
        assert_eq!(d.value, 5.0);
    }

    #[test]
    fn oracle_bidual_restores_gauge_exactly() {
        let spec = GaugeSpec::oracle(
            2,
            "euclidean",
            Arc::new(|v: &[f64]| fmath::sqrt(v.iter().map(|x| x * x).sum::<f64>())),
        )
        .unwrap();
        let bidual = spec.dual_spec().unwrap().dual_spec().unwrap();
        assert!(!bidual.dual_is_approximate() || bidual.gauge(&[1.0, 0.0]).is_ok());
        close(bidual.gauge(&[3.0, 4.0]).unwrap(), 5.0, 1e-12);
    }

    #[test]
    fn scaling_materializes_per_family() {
        let l2 = GaugeSpec::lp(2, 2.0).unwrap();
        let t3 = l2.scaled_exact(&rat_from_f64(3.0).unwrap()).unwrap();
        assert_eq!(t3.gauge(&[1.0, 0.0]).unwrap(), 3.0);
        assert_eq!(t3.scale(), 3.0);

        let e2 = diag49().scaled_exact(&rat_from_f64(2.0).unwrap()).unwrap();
        match e2.family() {
            Family::Ellipsoid(data) => {
                let rows = data.gram_rows();
                assert_eq!(rows[0][0], 16.0);
                assert_eq!(rows[1][1], 36.0);
            }
            other => panic!("expected ellipsoid, got {other:?}"),
        }
        assert_eq!(e2.scale(), 1.0);
        assert_eq!(e2.gauge(&[1.0, 0.0]).unwrap(), 4.0);

        let cube2 = cube_h(2).scaled_exact(&rat_from_f64(2.0).unwrap()).unwrap();
        close(cube2.gauge(&[1.0, 0.0]).unwrap(), 2.0, 1e-15);

        let cross2 = cross_v(2).scaled_exact(&rat_from_f64(2.0).unwrap()).unwrap();
        close(cross2.gauge(&[1.0, 0.0]).unwrap(), 2.0, 1e-12);
    }

    #[test]
    fn compose_transforms_data_exactly() {
        let m = MatZ::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        let m_inv = MatZ::from_rows(&[vec![1, -1], vec![-1, 2]]).unwrap();

        let l1 = GaugeSpec::lp(2, 1.0).unwrap();
        let pulled = l1.compose_integer(&m, &m_inv).unwrap();
        // f(M e_1) = |2| + |1|.
        assert_eq!(pulled.gauge(&[1.0, 0.0]).unwrap(), 3.0);
        assert!(!pulled.dual_is_approximate());

        let q = GaugeSpec::ellipsoid(&[vec![5.0, 3.0], vec![3.0, 2.0]]).unwrap();
        let pulled = q.compose_integer(&m, &m_inv).unwrap();
        match pulled.family() {
            Family::Ellipsoid(data) => {
                // M^T Q M for M = [[2,1],[1,1]].
                let rows = data.gram_rows();
                assert_eq!(rows[0][0], 34.0);
                assert_eq!(rows[0][1], 21.0);
                assert_eq!(rows[1][1], 13.0);
            }
            other => panic!("expected ellipsoid, got {other:?}"),
        }
    }

    #[test]
    fn pullback_dual_uses_inverse_transpose() {
        let m = MatZ::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        let m_inv = MatZ::from_rows(&[vec![1, -1], vec![-1, 2]]).unwrap();
        let l2 = GaugeSpec::lp(2, 2.0).unwrap();
        let pulled = l2.compose_integer(&m, &m_inv).unwrap();
        // (f o M)*(p) = f*(M^{-T} p); for p = (1,0): M^{-T} p = (1,-1).
        close(
            pulled.dual_gauge(&[1.0, 0.0]).unwrap().value,
            fmath::sqrt(2.0),
            1e-12,
        );
    }

    #[test]
    fn measures_and_gates_are_exact_on_boundaries() {
        let l1 = GaugeSpec::lp(2, 1.0).unwrap();
        let gate = l1.bound_gate(2.0).unwrap();
        assert!(gate.admits(&l1.measure(&[2, 0]).unwrap()));
        assert!(gate.admits(&l1.measure(&[1, -1]).unwrap()));
        assert!(!gate.admits(&l1.measure(&[2, 1]).unwrap()));

        let e = diag49();
        assert!(matches!(e.measure_kind(), MeasureKind::DyadicSq { .. }));
        let gate = e.bound_gate(1.9).unwrap();
        assert!(!gate.admits(&e.measure(&[1, 0]).unwrap()));
        let gate = e.bound_gate(2.0).unwrap();
        assert!(gate.admits(&e.measure(&[1, 0]).unwrap()));
    }

    #[test]
    fn non_dyadic_gram_falls_back_to_rational_measure() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let rows = vec![
            vec![BigRational::from_integer(BigInt::from(1)), third.clone()],
            vec![third, BigRational::from_integer(BigInt::from(1))],
        ];
        let e = GaugeSpec::ellipsoid_exact(rows).unwrap();
        assert!(matches!(e.measure_kind(), MeasureKind::RatSq));
        // v = (1,1): v^T Q v = 1 + 2/3 + 1 = 8/3, so f(v) = sqrt(8/3) ~ 1.63299.
        let gate = e.bound_gate(1.633).unwrap();
        assert!(gate.admits(&e.measure(&[1, 1]).unwrap()));
        let gate = e.bound_gate(1.6329).unwrap();
        assert!(!gate.admits(&e.measure(&[1, 1]).unwrap()));
    }

    #[test]
    fn measure_ordering_is_total_per_spec() {
        let e = diag49();
        let a = e.measure(&[1, 0]).unwrap();
        let b = e.measure(&[0, 1]).unwrap();
        assert_eq!(a.cmp_measure(&b), Ordering::Less);
        assert_eq!(b.cmp_measure(&a), Ordering::Greater);
        assert_eq!(a.cmp_measure(&a), Ordering::Equal);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(GaugeSpec::lp(2, 0.5).is_err());
        assert!(GaugeSpec::lp(0, 2.0).is_err());
        assert!(GaugeSpec::ellipsoid(&[vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
        assert!(GaugeSpec::ellipsoid(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        // Missing negation partner.
        assert!(GaugeSpec::polytope_v(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).is_err());
        // Nonpositive offset.
        assert!(GaugeSpec::polytope_h(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            vec![1.0, 1.0, 0.0, 1.0],
        )
        .is_err());
        // Unbounded: only two parallel halfspaces in the plane.
        assert!(GaugeSpec::polytope_h(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
            vec![1.0, 1.0],
        )
        .is_err());
        // Bounded but asymmetric.
        assert!(GaugeSpec::polytope_h(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            vec![1.0, 2.0, 1.0, 1.0],
        )
        .is_err());
    }
}
