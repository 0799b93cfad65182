//! CPLEX-LP text export of the pairwise spanner model.
//!
//! Emission order is fully determined by the model, so identical inputs
//! produce byte-identical files.

use crate::oracle::model::{ConstraintSense, IlpModel};
use crate::weight::{format_weight, to_f64, Weight};
use num_traits::Signed;
use std::fmt::Write;

/// Renders a coefficient for the LP file: exact when the rational terminates
/// in decimal, shortest round-trip float otherwise.
fn coeff(w: &Weight) -> String {
    let s = format_weight(w);
    if s.contains('/') {
        format!("{}", to_f64(w))
    } else {
        s
    }
}

fn push_terms(out: &mut String, terms: &[(Weight, usize)], names: &[String]) {
    let mut first = true;
    for (c, var) in terms {
        let mag = c.abs();
        if first {
            if c.is_negative() {
                let _ = write!(out, "- ");
            }
            first = false;
        } else if c.is_negative() {
            let _ = write!(out, " - ");
        } else {
            let _ = write!(out, " + ");
        }
        let _ = write!(out, "{} {}", coeff(&mag), names[*var]);
    }
}

pub fn lp_string(model: &IlpModel) -> String {
    let mut out = String::new();
    out.push_str("Minimize\n obj: ");
    push_terms(&mut out, &model.objective, &model.variable_names);
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}: ", c.name);
        push_terms(&mut out, &c.terms, &model.variable_names);
        let op = match c.sense {
            ConstraintSense::Le => "<=",
            ConstraintSense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", coeff(&c.rhs));
    }
    out.push_str("Binary\n");
    for name in &model.variable_names {
        let _ = writeln!(out, " {name}");
    }
    out.push_str("End\n");
    out
}

/// Writes the model atomically: to a temp file in the target directory, then
/// renamed into place.
pub fn export_lp(model: &IlpModel, path: &std::path::Path) -> std::io::Result<()> {
    let text = lp_string(model);
    crate::util::atomic_write(path, text.as_bytes())
}
