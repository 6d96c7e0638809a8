//! Algebraic text export of a [`MipModel`] for external solvers, and the cut
//! dump format that shares its row grammar.
//!
//! Grammar (one item per line, `\` starts a comment line):
//!
//! ```text
//! minimize
//!  obj: <terms>                       terms: <coef> <name> joined by " + " / " - "
//! subject to
//!  <label>: <terms> <=|>=|= <rhs>
//! bounds
//!  <lo> <= <name> <= <hi>             or  <name> free
//! binaries
//!  <name> …
//! end
//! ```
//!
//! Coefficients use the shortest decimal form that reads back to the same
//! `f64`. An empty objective is written `obj: 0`.

use std::fmt::Write as _;

use crate::formulation::{LinearRow, MipModel, VarKind};
use crate::solver::mip::cone_outer_rows;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportStyle {
    /// Cone rows replaced by their outer-approximation rows.
    LinearizedText,
    /// As `LinearizedText`, plus a comment block with the exact cone data.
    ConicAnnotatedText,
}

fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

/// `3 x0 - 2 x1 + 1 t`, or `0` when there are no terms.
pub fn format_terms(terms: &[(usize, f64)], names: &dyn Fn(usize) -> String) -> String {
    let mut out = String::new();
    for (n, &(j, c)) in terms.iter().enumerate() {
        let (sign, mag) = if c < 0.0 { ("-", -c) } else { ("+", c) };
        if n == 0 {
            if c < 0.0 {
                out.push_str("- ");
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        let _ = write!(out, "{} {}", num(mag), names(j));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn format_row(row: &LinearRow, names: &dyn Fn(usize) -> String) -> String {
    format!(
        "{}: {} {} {}",
        row.label,
        format_terms(&row.terms, names),
        row.sense,
        num(row.rhs)
    )
}

/// Model text. `extra_rows` (e.g. cuts or refinement rows gathered during a
/// solve) are appended to the constraint section.
pub fn export_model(model: &MipModel, style: ExportStyle, extra_rows: &[LinearRow]) -> String {
    let names = |j: usize| model.variables[j].name.clone();
    let mut out = String::new();
    let _ = writeln!(out, "\\ drccp model export 1");
    let _ = writeln!(out, "\\ formulation {}", model.kind);
    out.push_str("minimize\n");
    let _ = writeln!(out, " obj: {}", format_terms(&model.objective, &names));
    out.push_str("subject to\n");
    for row in model
        .linear_rows
        .iter()
        .chain(cone_outer_rows(model).iter())
        .chain(extra_rows)
    {
        let _ = writeln!(out, " {}", format_row(row, &names));
    }
    out.push_str("bounds\n");
    for v in &model.variables {
        if v.kind == VarKind::Binary {
            continue;
        }
        if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            let _ = writeln!(out, " {} free", v.name);
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", num(v.lower), v.name, num(v.upper));
        }
    }
    let bins: Vec<&str> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !bins.is_empty() {
        out.push_str("binaries\n");
        let _ = writeln!(out, " {}", bins.join(" "));
    }
    out.push_str("end\n");
    if style == ExportStyle::ConicAnnotatedText && !model.cone_rows.is_empty() {
        out.push_str("\\ cones: <label>: <lhs> >= <scale> * norm_<p>(<input> ; …)\n");
        for cone in &model.cone_rows {
            let inputs: Vec<String> = cone
                .inputs
                .iter()
                .map(|u| {
                    let mut s = format_terms(&u.terms, &names);
                    if u.constant != 0.0 {
                        let _ = write!(s, " + {}", num(u.constant));
                    }
                    s
                })
                .collect();
            let _ = writeln!(
                out,
                "\\ cone {}: {} >= {} * norm_{}({})",
                cone.label,
                format_terms(&cone.lhs, &names),
                num(cone.scale),
                cone.tag.dual(),
                inputs.join(" ; ")
            );
        }
    }
    out
}

pub const CUTS_MAGIC: &str = "drccp-cuts";

/// Cut dump: header, then one row per line in the export grammar.
pub fn write_cuts(model: &MipModel, rows: &[LinearRow]) -> String {
    let names = |j: usize| model.variables[j].name.clone();
    let mut out = format!("{CUTS_MAGIC} 1\ncount {}\n", rows.len());
    for row in rows {
        out.push_str(&format_row(row, &names));
        out.push('\n');
    }
    out
}
