//! Report values and the two output formats.
//!
//! The machine format is JSON with sorted keys, reals at 17 significant
//! digits, integers exact, and no wall-clock data, so identical runs emit
//! byte-identical documents. The human format is a labeled table; runtimes
//! appear only there.

use std::collections::BTreeMap;
use std::fmt::Write;

/// A report tree. Maps iterate in key order, which fixes the machine layout.
#[derive(Clone, Debug)]
pub enum Val {
    Bool(bool),
    Int(i128),
    Real(f64),
    Str(String),
    List(Vec<Val>),
    Map(BTreeMap<String, Val>),
}

impl Val {
    pub fn map(entries: Vec<(&str, Val)>) -> Val {
        Val::Map(
            entries
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        )
    }

    pub fn reals(xs: &[f64]) -> Val {
        Val::List(xs.iter().map(|&x| Val::Real(x)).collect())
    }

    pub fn ints(xs: &[i64]) -> Val {
        Val::List(xs.iter().map(|&x| Val::Int(x as i128)).collect())
    }

    pub fn int_matrix(rows: &[Vec<i128>]) -> Val {
        Val::List(
            rows.iter()
                .map(|row| Val::List(row.iter().map(|&x| Val::Int(x)).collect()))
                .collect(),
        )
    }

}

/// 17 significant digits; round-trips every f64 and never varies by locale.
fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // JSON has no infinities; certificates never contain them, but a
        // diagnostic report of a degenerate oracle might.
        format!("\"{x}\"")
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn write_machine(val: &Val, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match val {
        Val::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Val::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Val::Real(x) => out.push_str(&fmt_real(*x)),
        Val::Str(s) => {
            let _ = write!(out, "\"{}\"", escape(s));
        }
        Val::List(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // Scalar lists stay on one line; nested structures get one
            // element per line.
            let flat = items
                .iter()
                .all(|v| !matches!(v, Val::List(_) | Val::Map(_)));
            if flat {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_machine(item, indent, out);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    let _ = write!(out, "{pad}  ");
                    write_machine(item, indent + 1, out);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                let _ = write!(out, "{pad}]");
            }
        }
        Val::Map(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, v)) in map.iter().enumerate() {
                let _ = write!(out, "{pad}  \"{}\": ", escape(k));
                write_machine(v, indent + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            let _ = write!(out, "{pad}}}");
        }
    }
}

/// The byte-stable machine document.
pub fn fmt_machine(val: &Val) -> String {
    let mut out = String::new();
    write_machine(val, 0, &mut out);
    out.push('\n');
    out
}

fn human_scalar(val: &Val) -> Option<String> {
    match val {
        Val::Bool(b) => Some(b.to_string()),
        Val::Int(i) => Some(i.to_string()),
        Val::Real(x) => Some(format!("{x:.12}")),
        Val::Str(s) => Some(s.clone()),
        Val::List(items) => {
            let parts: Option<Vec<String>> = items.iter().map(human_scalar).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        Val::Map(_) => None,
    }
}

fn write_human(val: &Val, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match val {
        Val::Map(map) => {
            for (k, v) in map {
                match human_scalar(v) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        write_human(v, indent + 1, out);
                    }
                }
            }
        }
        Val::List(items) => {
            for v in items {
                match human_scalar(v) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        write_human(v, indent + 1, out);
                    }
                }
            }
        }
        other => {
            if let Some(s) = human_scalar(other) {
                let _ = writeln!(out, "{pad}{s}");
            }
        }
    }
}

/// The human table: a header, the template identity line for capacity
/// reports, the report tree, and the runtime.
pub fn fmt_human(command: &str, val: &Val, runtime_ms: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "systocap {command} report");
    if command == "capacity" {
        let _ = writeln!(out, "  value = 2·systole");
    }
    write_human(val, 1, &mut out);
    let _ = writeln!(out, "  runtime: {runtime_ms:.1} ms");
    out
}
