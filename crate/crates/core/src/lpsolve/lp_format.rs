//! CPLEX-style LP text export.

use std::fmt::Write;

use super::LpModel;
use crate::exact::fmt_decimal15;

fn push_terms(out: &mut String, coeffs: &[f64]) {
    let mut first = true;
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let sign = if c < 0.0 { "-" } else { "+" };
        if first {
            if c < 0.0 {
                out.push_str("- ");
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        let _ = write!(out, "{} x{j}", fmt_decimal15(c.abs()));
        first = false;
    }
    if first {
        out.push_str("0 x0");
    }
}

fn bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        fmt_decimal15(v)
    }
}

impl LpModel {
    /// Renders the model with `Maximize`, `Subject To`, `Bounds` and `End`
    /// sections. Two-sided rows become a `_lo`/`_hi` pair; rows with equal
    /// bounds become one equality. The objective constant is kept as a
    /// comment since the format has no slot for it.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "\\ objective constant: {}",
            fmt_decimal15(self.objective_constant)
        );
        out.push_str("Maximize\n obj: ");
        push_terms(&mut out, &self.objective);
        out.push_str("\nSubject To\n");
        for (r, row) in self.rows.iter().enumerate() {
            let lo = row.lower.is_finite();
            let hi = row.upper.is_finite();
            if lo && hi && row.lower == row.upper {
                let _ = write!(out, " r{r}: ");
                push_terms(&mut out, &row.coeffs);
                let _ = writeln!(out, " = {}", fmt_decimal15(row.lower));
                continue;
            }
            if lo {
                let _ = write!(out, " r{r}_lo: ");
                push_terms(&mut out, &row.coeffs);
                let _ = writeln!(out, " >= {}", fmt_decimal15(row.lower));
            }
            if hi {
                let _ = write!(out, " r{r}_hi: ");
                push_terms(&mut out, &row.coeffs);
                let _ = writeln!(out, " <= {}", fmt_decimal15(row.upper));
            }
        }
        out.push_str("Bounds\n");
        for (j, &(lo, hi)) in self.var_bounds.iter().enumerate() {
            if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
                let _ = writeln!(out, " x{j} free");
            } else {
                let _ = writeln!(out, " {} <= x{j} <= {}", bound(lo), bound(hi));
            }
        }
        out.push_str("End\n");
        out
    }
}
