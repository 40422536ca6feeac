//! Capacity certificates for disc cotangent bundles of flat tori.
//!
//! The common value of every normalized symplectic capacity on
//! `D*_F T^n` is `2 sys(F)`. The upper bound is unconditional: after an
//! SL(n,Z) change of basis puts a systole minimizer at `e_1`, the bundle
//! embeds symplectically into the cylinder `Z_{r_1}` with
//! `pi r_1^2 = 2 s_1 = 2 sys(F)`. Equality needs one of two hypotheses:
//!
//! 1. a flat Riemannian minorant `G <= F` with the same systole, or
//! 2. the capacity dominates the Hofer-Zehnder capacity, so the Lagrangian
//!    product `(s/2) K x K*` inside the bundle forces `c >= 2s`.
//!
//! [`capacity`] assembles the full certificate: the systole with its
//! minimizer, the reduction basis, the cylinder radius, a sampled
//! verification of the embedding, the lattice emptiness check behind the
//! lower bound, and a case tag recording which hypothesis (if any) turns the
//! upper bound into equality. The engine never asserts equality it cannot
//! attribute to a hypothesis: without a minorant and with the
//! Hofer-Zehnder assumption declined, the tag is [`Case::UpperBoundOnly`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;

use rand::Rng;

use crate::embedding::{verify_embedding_samples, EmbeddingReport};
use crate::error::{Error, Result};
use crate::fmath;
use crate::gauge::{Family, GaugeSpec, LpExponent};
use crate::lattice::{
    enumerate_short_vectors_capped, pull_back, systole_capped, unimodular_complete, SystoleResult,
    UnimodularMatrix, DEFAULT_ENUM_CAP,
};
use crate::linalg::rat_from_f64;
use crate::rand_util::{rng_from_seed, unit_vec};

/// The cited constant for the Hofer-Zehnder capacity of the Lagrangian
/// product `K x K*`; used as a known value, never computed.
pub const CHZ_CITATION: &str = "c_HZ(K x K*) = 4 by [Theorem 1.7]{AKO}";

/// Pointwise-minorant slack allowed before a Riemannian minorant check fails.
pub const MINORANT_TOL: f64 = 1e-9;

/// Relative tolerance for systole equality between a gauge and its minorant.
pub const SYSTOLE_EQ_TOL: f64 = 1e-12;

const AXIOM_PRECHECK_SAMPLES: usize = 100;
const INCLUSION_SAMPLES: u64 = 1000;

/// Which hypothesis of the theorem certifies equality.
#[derive(Clone, Debug, PartialEq)]
pub enum Case {
    /// The gauge itself is induced by a flat Riemannian metric.
    Riemannian,
    /// A user-supplied Gram matrix passed [`verify_riemannian_minorant`].
    MinorantProvided(Vec<Vec<f64>>),
    /// `l^p` with `p < 2`: the scaled identity Gram is a minorant with equal
    /// systole.
    LpWithSmallExponent,
    /// Equality assumed for capacities dominating the Hofer-Zehnder
    /// capacity.
    HZOnly,
    /// No hypothesis available: the value certifies an upper bound only.
    UpperBoundOnly,
}

impl Case {
    pub fn name(&self) -> &'static str {
        match self {
            Case::Riemannian => "riemannian",
            Case::MinorantProvided(_) => "minorant-provided",
            Case::LpWithSmallExponent => "lp-small-exponent",
            Case::HZOnly => "hz-only",
            Case::UpperBoundOnly => "upper-bound-only",
        }
    }
}

/// Tunables for the certificate pipeline.
#[derive(Clone, Debug)]
pub struct CapacityOptions {
    /// Sample count for the embedding verification harness.
    pub samples: u64,
    /// Seed shared by every randomized component of the pipeline.
    pub seed: u64,
    /// Box-volume cap for lattice enumeration.
    pub enum_cap: u128,
    /// Whether equality may be claimed via the Hofer-Zehnder hypothesis
    /// when no minorant is available.
    pub assume_hz: bool,
    /// Optional user-supplied minorant Gram matrix (row-major, symmetric
    /// positive definite).
    pub minorant_gram: Option<Vec<Vec<f64>>>,
    /// Sample count for minorant verification.
    pub minorant_samples: u64,
}

impl Default for CapacityOptions {
    fn default() -> CapacityOptions {
        CapacityOptions {
            samples: 10_000,
            seed: 0,
            enum_cap: DEFAULT_ENUM_CAP,
            assume_hz: true,
            minorant_gram: None,
            minorant_samples: 1000,
        }
    }
}

/// Outcome of a Riemannian-minorant check: worst pointwise violation and the
/// two systoles that must agree.
#[derive(Clone, Debug)]
pub struct MinorantReport {
    pub samples: u64,
    pub seed: u64,
    /// Worst value of `sqrt(v' G v) / gauge(v) - 1` over all probes; any
    /// positive value means `G` exceeds the gauge in that direction.
    pub worst_violation: f64,
    pub spec_systole: f64,
    pub minorant_systole: f64,
}

impl MinorantReport {
    pub fn passes(&self) -> bool {
        let scale = fmath::abs(self.spec_systole).max(fmath::abs(self.minorant_systole));
        self.worst_violation <= MINORANT_TOL
            && fmath::abs(self.spec_systole - self.minorant_systole) <= SYSTOLE_EQ_TOL * scale
    }
}

/// Evidence behind the lower bound `c >= 2s`.
#[derive(Clone, Debug)]
pub struct LowerBoundEvidence {
    /// No nonzero lattice vector lies in the open body `s K`.
    pub empty_below_systole: bool,
    /// False when the enumeration box relied on approximate dual values.
    pub exhaustive: bool,
    pub inclusion_samples: u64,
    pub inclusion_failures: u64,
    /// The cited Hofer-Zehnder constant for `K x K*`.
    pub citation: &'static str,
}

impl LowerBoundEvidence {
    pub fn holds(&self) -> bool {
        self.empty_below_systole && self.inclusion_failures == 0
    }

    /// "certified" for exhaustive enumeration, "probable" otherwise.
    pub fn status(&self) -> &'static str {
        if !self.holds() {
            "failed"
        } else if self.exhaustive {
            "certified"
        } else {
            "probable"
        }
    }
}

/// A classification with its explanation and any minorant evidence.
#[derive(Clone, Debug)]
pub struct Classification {
    pub case: Case,
    pub minorant: Option<MinorantReport>,
    pub notes: String,
}

/// The full, independently checkable certificate.
#[derive(Clone, Debug)]
pub struct CapacityCertificate {
    /// `2 * systole.s`; an equality when the case tag carries a hypothesis,
    /// an upper bound for [`Case::UpperBoundOnly`].
    pub value: f64,
    pub systole: SystoleResult,
    /// Basis with `A e_1 = u`; the embedding is built in these coordinates.
    pub basis: UnimodularMatrix,
    /// Widths `s_k = f_A(e_k)` of the reduced dual body.
    pub widths: Vec<f64>,
    /// Cylinder radius, `pi r_1^2 = 2 s_1`.
    pub r1: f64,
    pub upper_report: EmbeddingReport,
    /// True when no nonzero lattice vector lies in the open body `s K`.
    pub lower_lattice_check: bool,
    pub case: Case,
    pub notes: String,
}

/// Certificate with default options.
pub fn capacity(spec: &GaugeSpec) -> Result<CapacityCertificate> {
    capacity_with(spec, &CapacityOptions::default())
}

/// Runs the full pipeline: axiom precheck, systole, basis reduction, widths,
/// embedding verification, lattice lower bound, classification.
pub fn capacity_with(spec: &GaugeSpec, opts: &CapacityOptions) -> Result<CapacityCertificate> {
    let axioms = spec.check_gauge_axioms(AXIOM_PRECHECK_SAMPLES, opts.seed)?;
    if !axioms.passes() {
        return Err(Error::InvalidSpec(format!(
            "gauge axioms violated (homogeneity {:.3e}, reversibility {:.3e}, triangle {:.3e}, positivity failures {})",
            axioms.max_homogeneity_violation,
            axioms.max_reversibility_violation,
            axioms.max_triangle_violation,
            axioms.positivity_failures,
        )));
    }

    let sys = systole_capped(spec, opts.enum_cap)?;
    let basis = unimodular_complete(&sys.u)?;
    let spec_a = pull_back(spec, &basis)?;

    let n = spec.dim();
    let mut widths = Vec::with_capacity(n);
    let mut unit = vec![0.0; n];
    for k in 0..n {
        unit[k] = 1.0;
        widths.push(spec_a.gauge(&unit)?);
        unit[k] = 0.0;
    }
    if fmath::abs(widths[0] - sys.s) > SYSTOLE_EQ_TOL * sys.s {
        return Err(Error::Certificate(format!(
            "reduced width s_1 = {} disagrees with the systole {}",
            widths[0], sys.s
        )));
    }
    let r1 = fmath::sqrt(2.0 * widths[0] / PI);

    let upper_report = verify_embedding_samples(spec, &basis, &widths, opts.samples, opts.seed)?;
    if !upper_report.passes() {
        return Err(Error::Certificate(format!(
            "embedding verification failed: defect {:.3e}, containment failures {}, collisions {}",
            upper_report.max_symplectic_defect,
            upper_report.containment_failures,
            upper_report.collision_pairs,
        )));
    }

    let lower = lower_certificate_with(spec, sys.s, opts.enum_cap, opts.seed)?;
    let classification = classify_case(spec, sys.s, opts)?;

    let mut notes = classification.notes.clone();
    notes.push_str(&format!(
        " lower bound {}: open-body lattice check {} ({} inclusion spot-checks, {} failures); {}.",
        lower.status(),
        if lower.empty_below_systole {
            "empty"
        } else {
            "NONEMPTY"
        },
        lower.inclusion_samples,
        lower.inclusion_failures,
        lower.citation,
    ));
    if matches!(classification.case, Case::UpperBoundOnly) {
        notes.push_str(" value certifies an upper bound only; equality is not certified.");
    }

    Ok(CapacityCertificate {
        value: 2.0 * sys.s,
        systole: sys,
        basis,
        widths,
        r1,
        upper_report,
        lower_lattice_check: lower.empty_below_systole,
        case: classification.case,
        notes,
    })
}

/// Picks the equality hypothesis for a gauge with systole `s`.
///
/// Precedence: ellipsoids and `l^2` are themselves flat Riemannian metrics;
/// `l^p` with `p < 2` has the built-in scaled-identity minorant; a
/// user-supplied Gram that verifies takes over next; otherwise the
/// Hofer-Zehnder hypothesis applies unless declined.
pub fn classify_case(spec: &GaugeSpec, s: f64, opts: &CapacityOptions) -> Result<Classification> {
    match spec.family() {
        Family::Ellipsoid(_) => {
            return Ok(Classification {
                case: Case::Riemannian,
                minorant: None,
                notes: String::from(
                    "case riemannian: the gauge is induced by a flat Riemannian metric (item 1 with G = F).",
                ),
            });
        }
        Family::Lp(data) => match data.exponent() {
            LpExponent::Finite(p) if p == 2.0 => {
                return Ok(Classification {
                    case: Case::Riemannian,
                    minorant: None,
                    notes: String::from(
                        "case riemannian: l^2 is induced by the flat Euclidean metric (item 1 with G = F).",
                    ),
                });
            }
            LpExponent::Finite(p) if p < 2.0 => {
                let t = spec.scale();
                let mut gram = vec![vec![0.0; spec.dim()]; spec.dim()];
                for k in 0..spec.dim() {
                    gram[k][k] = t * t;
                }
                let report =
                    verify_riemannian_minorant(spec, &gram, opts.minorant_samples, opts.seed)?;
                if !report.passes() {
                    return Err(Error::Certificate(format!(
                        "built-in l^p minorant failed verification (violation {:.3e})",
                        report.worst_violation
                    )));
                }
                check_systole_consistency(report.spec_systole, s)?;
                let notes = format!(
                    "case lp-small-exponent: l^{p} >= l^2 pointwise with equal systoles; scaled identity Gram verified (worst violation {:.3e}, systoles {} and {}).",
                    report.worst_violation, report.spec_systole, report.minorant_systole,
                );
                return Ok(Classification {
                    case: Case::LpWithSmallExponent,
                    minorant: Some(report),
                    notes,
                });
            }
            _ => {}
        },
        _ => {}
    }

    let mut failed_user_gram: Option<f64> = None;
    if let Some(gram) = &opts.minorant_gram {
        let report = verify_riemannian_minorant(spec, gram, opts.minorant_samples, opts.seed)?;
        check_systole_consistency(report.spec_systole, s)?;
        if report.passes() {
            let notes = format!(
                "case minorant-provided: user Gram verified as a flat Riemannian minorant (worst violation {:.3e}, systoles {} and {}).",
                report.worst_violation, report.spec_systole, report.minorant_systole,
            );
            return Ok(Classification {
                case: Case::MinorantProvided(gram.clone()),
                minorant: Some(report),
                notes,
            });
        }
        failed_user_gram = Some(report.worst_violation);
    }

    let mut notes = String::new();
    if let Some(violation) = failed_user_gram {
        notes.push_str(&format!(
            "user Gram rejected as a minorant (worst violation {violation:.3e}). "
        ));
    }
    if opts.assume_hz {
        notes.push_str(&format!(
            "case hz-only: equality assumed for capacities c >= c_HZ ({CHZ_CITATION}); equality for all normalized capacities is not certified.",
        ));
        Ok(Classification {
            case: Case::HZOnly,
            minorant: None,
            notes,
        })
    } else {
        notes.push_str(
            "case upper-bound-only: no minorant and the c_HZ hypothesis was declined.",
        );
        Ok(Classification {
            case: Case::UpperBoundOnly,
            minorant: None,
            notes,
        })
    }
}

/// The classification precondition is `s = systole(spec).s`.
fn check_systole_consistency(recomputed: f64, s: f64) -> Result<()> {
    if fmath::abs(recomputed - s) > SYSTOLE_EQ_TOL * fmath::abs(s).max(1.0) {
        return Err(Error::Certificate(format!(
            "classification called with systole {s}, but enumeration gives {recomputed}"
        )));
    }
    Ok(())
}

/// Checks that the flat metric with the given Gram matrix minorizes the
/// gauge pointwise and attains the same systole.
///
/// Probes are deterministic (`+-e_k`, pairwise sums and differences, the
/// all-ones vector) plus seeded random unit directions; the systoles on both
/// sides come from exact lattice enumeration.
pub fn verify_riemannian_minorant(
    spec: &GaugeSpec,
    gram: &[Vec<f64>],
    samples: u64,
    seed: u64,
) -> Result<MinorantReport> {
    let n = spec.dim();
    let minorant = GaugeSpec::ellipsoid(gram)?;
    if minorant.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: minorant.dim(),
        });
    }

    let mut probes: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        probes.push(e.clone());
        e[k] = -1.0;
        probes.push(e);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sum = vec![0.0; n];
            sum[i] = 1.0;
            sum[j] = 1.0;
            probes.push(sum.clone());
            sum[j] = -1.0;
            probes.push(sum);
        }
    }
    probes.push(vec![1.0; n]);

    let mut rng = rng_from_seed(seed);
    for _ in 0..samples {
        probes.push(unit_vec(&mut rng, n));
    }

    let mut worst = f64::NEG_INFINITY;
    for v in &probes {
        let g = minorant.gauge(v)?;
        let f = spec.gauge(v)?;
        if f <= 0.0 {
            return Err(Error::Domain(String::from(
                "gauge vanished on a nonzero probe",
            )));
        }
        worst = worst.max(g / f - 1.0);
    }

    let spec_systole = crate::lattice::systole(spec)?.s;
    let minorant_systole = crate::lattice::systole(&minorant)?.s;

    Ok(MinorantReport {
        samples,
        seed,
        worst_violation: worst,
        spec_systole,
        minorant_systole,
    })
}

/// Gathers the lower-bound evidence with default cap and seed.
pub fn lower_certificate(spec: &GaugeSpec, s: f64) -> Result<LowerBoundEvidence> {
    lower_certificate_with(spec, s, DEFAULT_ENUM_CAP, 0)
}

/// The two checkable halves of the lower bound: the open body `s K` contains
/// no nonzero lattice vector (so the torus projection is injective on
/// `(s/2) K`), and sampled points of `(s/2) K x K*` lie in the bundle. The
/// Hofer-Zehnder constant enters by citation only.
pub fn lower_certificate_with(
    spec: &GaugeSpec,
    s: f64,
    cap: u128,
    seed: u64,
) -> Result<LowerBoundEvidence> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::Domain(String::from("systole must be positive")));
    }
    let bound = s * (1.0 - 1e-12);
    let short = enumerate_short_vectors_capped(spec, bound, cap)?;
    let empty_below_systole = short.is_empty();
    let exhaustive = !spec.dual_is_approximate();

    let n = spec.dim();
    let mut rng = rng_from_seed(seed);
    let mut failures = 0u64;
    for _ in 0..INCLUSION_SAMPLES {
        let dir = unit_vec(&mut rng, n);
        let gauge_dir = spec.gauge(&dir)?;
        let radius = rng.random::<f64>() * (s / 2.0) * (1.0 - 1e-9);
        let v: Vec<f64> = dir.iter().map(|x| x * radius / gauge_dir).collect();

        let pdir = unit_vec(&mut rng, n);
        let dual_dir = spec.dual_gauge(&pdir)?.value;
        let pr = rng.random::<f64>() * (1.0 - 1e-9);
        let p: Vec<f64> = pdir.iter().map(|x| x * pr / dual_dir).collect();

        let inside_half_body = spec.gauge(&v)? < s / 2.0;
        let inside_dual_body = spec.dual_gauge(&p)?.value < 1.0;
        if !(inside_half_body && inside_dual_body) {
            failures += 1;
        }
    }

    Ok(LowerBoundEvidence {
        empty_below_systole,
        exhaustive,
        inclusion_samples: INCLUSION_SAMPLES,
        inclusion_failures: failures,
        citation: CHZ_CITATION,
    })
}

/// The gauge `t * f`, materialized exactly.
pub fn scale_gauge(spec: &GaugeSpec, t: f64) -> Result<GaugeSpec> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(String::from(
            "scale factor must be positive and finite",
        )));
    }
    spec.scaled_exact(&rat_from_f64(t)?)
}
