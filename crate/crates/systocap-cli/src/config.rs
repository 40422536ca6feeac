//! Strict configuration parsing.
//!
//! The document is JSON with a closed schema: unknown fields are rejected,
//! numbers never coerce silently, and rationals written as strings ("5/3")
//! reach the exact families without passing through floating point.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;

use systocap_core::gauge::{Family, GaugeSpec, LpExponent};
use systocap_core::linalg::{rat_from_f64, rat_to_f64};

use crate::report::Val;

/// A command name shared by the CLI surface and the config document.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Systole,
    Capacity,
    CertifyUpper,
    CertifyLower,
    VerifyEmbedding,
    Axioms,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Systole => "systole",
            Command::Capacity => "capacity",
            Command::CertifyUpper => "certify-upper",
            Command::CertifyLower => "certify-lower",
            Command::VerifyEmbedding => "verify-embedding",
            Command::Axioms => "axioms",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Command, String> {
        match s {
            "systole" => Ok(Command::Systole),
            "capacity" => Ok(Command::Capacity),
            "certify-upper" => Ok(Command::CertifyUpper),
            "certify-lower" => Ok(Command::CertifyLower),
            "verify-embedding" => Ok(Command::VerifyEmbedding),
            "axioms" => Ok(Command::Axioms),
            other => Err(format!(
                "unknown command {other:?}; expected one of systole, capacity, \
                 certify-upper, certify-lower, verify-embedding, axioms"
            )),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tolerances recorded in every report. Only the embedding defect is
/// overridable; the other thresholds are fixed by the certificate contracts.
#[derive(Clone, Debug)]
pub struct Tolerances {
    pub embedding_defect: f64,
}

impl Default for Tolerances {
    fn default() -> Tolerances {
        Tolerances {
            embedding_defect: 1e-6,
        }
    }
}

/// A fully resolved run: the gauge, the command, and all knobs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec: GaugeSpec,
    pub command: Option<Command>,
    pub samples: u64,
    pub seed: u64,
    pub assume_hz: bool,
    pub minorant_gram: Option<Vec<Vec<f64>>>,
    pub tolerances: Tolerances,
}

/// A number, or a string holding an exact rational ("a/b" or "a") or "inf".
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum NumOrRat {
    Num(f64),
    Str(String),
}

impl NumOrRat {
    fn to_rational(&self, field: &str) -> Result<BigRational, String> {
        match self {
            NumOrRat::Num(x) => {
                rat_from_f64(*x).map_err(|_| format!("{field}: {x} is not a finite number"))
            }
            NumOrRat::Str(s) => parse_rational(s).ok_or_else(|| {
                format!("{field}: {s:?} is not a rational of the form \"a/b\"")
            }),
        }
    }

    fn to_f64(&self, field: &str) -> Result<f64, String> {
        match self {
            NumOrRat::Num(x) if x.is_finite() => Ok(*x),
            NumOrRat::Num(x) => Err(format!("{field}: {x} is not a finite number")),
            NumOrRat::Str(s) => {
                let r = parse_rational(s)
                    .ok_or_else(|| format!("{field}: {s:?} is not a rational"))?;
                Ok(rat_to_f64(&r))
            }
        }
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den == BigInt::from(0) {
        return None;
    }
    Some(BigRational::new(num, den))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HalfspaceDoc {
    normal: Vec<NumOrRat>,
    offset: NumOrRat,
}

/// The norm block. All family payloads share one struct so a foreign field
/// is reported against the declared family, not as a generic schema error.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormDoc {
    family: String,
    #[serde(default)]
    p: Option<NumOrRat>,
    #[serde(default)]
    dim: Option<usize>,
    #[serde(default)]
    gram: Option<Vec<Vec<NumOrRat>>>,
    #[serde(default)]
    vertices: Option<Vec<Vec<NumOrRat>>>,
    #[serde(default)]
    halfspaces: Option<Vec<HalfspaceDoc>>,
    #[serde(default)]
    scale: Option<NumOrRat>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ToleranceDoc {
    #[serde(default)]
    embedding_defect: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    norm: NormDoc,
    #[serde(default)]
    command: Option<String>,
    #[serde(default)]
    samples: Option<u64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    assume_hz: Option<bool>,
    #[serde(default)]
    minorant_gram: Option<Vec<Vec<NumOrRat>>>,
    #[serde(default)]
    tolerances: Option<ToleranceDoc>,
}

fn reject_foreign(norm: &NormDoc) -> Result<(), String> {
    let mut foreign: Vec<&str> = Vec::new();
    let family = norm.family.as_str();
    let allowed: &[&str] = match family {
        "lp" => &["p", "dim"],
        "ellipsoid" => &["gram"],
        "polytope-v" => &["vertices"],
        "polytope-h" => &["halfspaces"],
        other => {
            return Err(format!(
                "unknown norm family {other:?}; expected one of lp, ellipsoid, \
                 polytope-v, polytope-h"
            ))
        }
    };
    if norm.p.is_some() && !allowed.contains(&"p") {
        foreign.push("p");
    }
    if norm.dim.is_some() && !allowed.contains(&"dim") {
        foreign.push("dim");
    }
    if norm.gram.is_some() && !allowed.contains(&"gram") {
        foreign.push("gram");
    }
    if norm.vertices.is_some() && !allowed.contains(&"vertices") {
        foreign.push("vertices");
    }
    if norm.halfspaces.is_some() && !allowed.contains(&"halfspaces") {
        foreign.push("halfspaces");
    }
    if foreign.is_empty() {
        Ok(())
    } else {
        Err(format!(
            "fields {foreign:?} do not belong to family {family:?}"
        ))
    }
}

fn rational_matrix(
    rows: &[Vec<NumOrRat>],
    field: &str,
) -> Result<Vec<Vec<BigRational>>, String> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, x)| x.to_rational(&format!("{field}[{i}][{j}]")))
                .collect()
        })
        .collect()
}

fn build_spec(norm: &NormDoc) -> Result<GaugeSpec, String> {
    reject_foreign(norm)?;
    let spec = match norm.family.as_str() {
        "lp" => {
            let p = norm.p.as_ref().ok_or("lp family needs field `p`")?;
            let dim = norm.dim.ok_or("lp family needs field `dim`")?;
            match p {
                NumOrRat::Str(s) if s == "inf" => GaugeSpec::lp_infinity(dim),
                other => GaugeSpec::lp(dim, other.to_f64("p")?),
            }
            .map_err(|e| format!("invalid lp norm: {e}"))?
        }
        "ellipsoid" => {
            let gram = norm.gram.as_ref().ok_or("ellipsoid family needs field `gram`")?;
            GaugeSpec::ellipsoid_exact(rational_matrix(gram, "gram")?)
                .map_err(|e| format!("invalid ellipsoid: {e}"))?
        }
        "polytope-v" => {
            let verts = norm
                .vertices
                .as_ref()
                .ok_or("polytope-v family needs field `vertices`")?;
            GaugeSpec::polytope_v_exact(rational_matrix(verts, "vertices")?)
                .map_err(|e| format!("invalid polytope: {e}"))?
        }
        "polytope-h" => {
            let halves = norm
                .halfspaces
                .as_ref()
                .ok_or("polytope-h family needs field `halfspaces`")?;
            let normals = halves
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    h.normal
                        .iter()
                        .enumerate()
                        .map(|(j, x)| x.to_rational(&format!("halfspaces[{i}].normal[{j}]")))
                        .collect()
                })
                .collect::<Result<Vec<Vec<BigRational>>, String>>()?;
            let offsets = halves
                .iter()
                .enumerate()
                .map(|(i, h)| h.offset.to_rational(&format!("halfspaces[{i}].offset")))
                .collect::<Result<Vec<BigRational>, String>>()?;
            GaugeSpec::polytope_h_exact(normals, offsets)
                .map_err(|e| format!("invalid polytope: {e}"))?
        }
        _ => unreachable!("rejected by reject_foreign"),
    };
    match &norm.scale {
        None => Ok(spec),
        Some(t) => {
            let t = t.to_rational("scale")?;
            spec.scaled_exact(&t)
                .map_err(|e| format!("invalid scale: {e}"))
        }
    }
}

/// Parses and fully resolves a configuration document. Strict: schema
/// violations, foreign fields, and invalid norms are all errors.
pub fn parse_config(text: &str) -> Result<RunConfig, String> {
    let doc: ConfigDoc =
        serde_json::from_str(text).map_err(|e| format!("config parse error: {e}"))?;
    let spec = build_spec(&doc.norm)?;
    let command = match &doc.command {
        None => None,
        Some(s) => Some(s.parse::<Command>()?),
    };
    let minorant_gram = match &doc.minorant_gram {
        None => None,
        Some(rows) => Some(
            rows.iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, x)| x.to_f64(&format!("minorant_gram[{i}][{j}]")))
                        .collect()
                })
                .collect::<Result<Vec<Vec<f64>>, String>>()?,
        ),
    };
    let mut tolerances = Tolerances::default();
    if let Some(doc_tol) = &doc.tolerances {
        if let Some(d) = doc_tol.embedding_defect {
            if !(d.is_finite() && d > 0.0) {
                return Err(format!("tolerances.embedding_defect must be positive, got {d}"));
            }
            tolerances.embedding_defect = d;
        }
    }
    Ok(RunConfig {
        spec,
        command,
        samples: doc.samples.unwrap_or(10_000),
        seed: doc.seed.unwrap_or(0),
        assume_hz: doc.assume_hz.unwrap_or(true),
        minorant_gram,
        tolerances,
    })
}

fn rational_vector_val(row: &[BigRational]) -> Val {
    Val::List(row.iter().map(|x| Val::Str(x.to_string())).collect())
}

fn rational_matrix_val(rows: &[Vec<BigRational>]) -> Val {
    Val::List(rows.iter().map(|row| rational_vector_val(row)).collect())
}

/// Emits the effective run as a config document value. Parsing the emitted
/// document reproduces the same run; exact data stays in rational strings.
pub fn config_echo(cfg: &RunConfig, command: Command) -> Result<Val, String> {
    let spec = &cfg.spec;
    let mut norm: Vec<(&str, Val)> = Vec::new();
    match spec.family() {
        Family::Lp(d) => {
            norm.push(("family", Val::Str(String::from("lp"))));
            norm.push(("dim", Val::Int(spec.dim() as i128)));
            match d.exponent() {
                LpExponent::Finite(p) => norm.push(("p", Val::Real(p))),
                LpExponent::Infinity => norm.push(("p", Val::Str(String::from("inf")))),
            }
        }
        Family::Ellipsoid(d) => {
            norm.push(("family", Val::Str(String::from("ellipsoid"))));
            norm.push(("gram", rational_matrix_val(&d.gram_rows_exact())));
        }
        Family::PolytopeV(d) => {
            norm.push(("family", Val::Str(String::from("polytope-v"))));
            norm.push(("vertices", rational_matrix_val(d.vertices_exact())));
        }
        Family::PolytopeH(d) => {
            norm.push(("family", Val::Str(String::from("polytope-h"))));
            let halfspaces: Vec<Val> = d
                .normals_exact()
                .iter()
                .zip(d.offsets_exact())
                .map(|(a, b)| {
                    Val::map(vec![
                        ("normal", rational_vector_val(a)),
                        ("offset", Val::Str(b.to_string())),
                    ])
                })
                .collect();
            norm.push(("halfspaces", Val::List(halfspaces)));
        }
        Family::Oracle(_) => {
            return Err(String::from("oracle gauges have no config representation"));
        }
    }
    if *spec.scale_exact() != BigRational::from(BigInt::from(1)) {
        norm.push(("scale", Val::Str(spec.scale_exact().to_string())));
    }

    let mut doc = vec![
        ("assume_hz", Val::Bool(cfg.assume_hz)),
        ("command", Val::Str(command.name().to_string())),
        ("norm", Val::map(norm)),
        ("samples", Val::Int(cfg.samples as i128)),
        ("seed", Val::Int(cfg.seed as i128)),
        (
            "tolerances",
            Val::map(vec![(
                "embedding_defect",
                Val::Real(cfg.tolerances.embedding_defect),
            )]),
        ),
    ];
    if let Some(gram) = &cfg.minorant_gram {
        doc.push((
            "minorant_gram",
            Val::List(gram.iter().map(|row| Val::reals(row)).collect()),
        ));
    }
    Ok(Val::map(doc))
}

/// Parses a standalone Gram matrix document: JSON rows of numbers or
/// rational strings.
pub fn parse_gram_matrix(text: &str) -> Result<Vec<Vec<f64>>, String> {
    let rows: Vec<Vec<NumOrRat>> =
        serde_json::from_str(text).map_err(|e| format!("gram matrix parse error: {e}"))?;
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, x)| x.to_f64(&format!("gram[{i}][{j}]")))
                .collect()
        })
        .collect()
}
