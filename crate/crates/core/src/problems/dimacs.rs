//! DIMACS edge and CNF formats (1-based on disk, 0-based in memory).

use std::fmt::Write;

use super::{CnfFormula, Graph, Literal};
use crate::error::{Error, Result};

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(line, format!("missing or bad {what}")))
}

fn is_comment(line: &str) -> bool {
    line.is_empty() || line.starts_with('c')
}

/// Reads `p edge n m` followed by `e u v` lines.
pub fn parse_dimacs_graph(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if is_comment(line) {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(Error::parse(lineno, "second problem line"));
                }
                match toks.next() {
                    Some("edge") | Some("col") => {}
                    _ => return Err(Error::parse(lineno, "expected `p edge <n> <m>`")),
                }
                let n = parse_usize(toks.next(), lineno, "vertex count")?;
                let m = parse_usize(toks.next(), lineno, "edge count")?;
                header = Some((n, m));
            }
            Some("e") => {
                let Some((n, _)) = header else {
                    return Err(Error::parse(lineno, "edge before problem line"));
                };
                let u = parse_usize(toks.next(), lineno, "endpoint")?;
                let v = parse_usize(toks.next(), lineno, "endpoint")?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(Error::parse(lineno, format!("endpoint outside 1..={n}")));
                }
                if u == v {
                    return Err(Error::parse(lineno, "self-loop"));
                }
                edges.push((u - 1, v - 1));
            }
            _ => return Err(Error::parse(lineno, format!("unrecognized line {line:?}"))),
        }
    }
    let (n, m) = header.ok_or_else(|| Error::parse(0, "missing `p edge` line"))?;
    if edges.len() != m {
        return Err(Error::parse(
            0,
            format!("header announces {m} edges, found {}", edges.len()),
        ));
    }
    Graph::new(n, edges)
}

pub fn write_dimacs_graph(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.n(), g.num_edges());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}

/// Reads `p cnf n m` followed by zero-terminated clauses, which may span
/// lines. A `%` line ends the clause section.
pub fn parse_dimacs_cnf(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if is_comment(line) {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        last_line = lineno;
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(Error::parse(lineno, "second problem line"));
            }
            let mut toks = rest.split_whitespace();
            if toks.next() != Some("cnf") {
                return Err(Error::parse(lineno, "expected `p cnf <n> <m>`"));
            }
            let n = parse_usize(toks.next(), lineno, "variable count")?;
            let m = parse_usize(toks.next(), lineno, "clause count")?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::parse(lineno, "clause before problem line"));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let var = lit.unsigned_abs() as usize;
            if var > n {
                return Err(Error::parse(
                    lineno,
                    format!("literal {lit} outside 1..={n}"),
                ));
            }
            if current.iter().any(|l| l.var == var - 1) {
                return Err(Error::parse(
                    lineno,
                    format!("variable {var} repeated in a clause"),
                ));
            }
            current.push(Literal {
                var: var - 1,
                negated: lit < 0,
            });
        }
    }
    let (n, m) = header.ok_or_else(|| Error::parse(0, "missing `p cnf` line"))?;
    if !current.is_empty() {
        return Err(Error::parse(
            last_line,
            "last clause is not terminated by 0",
        ));
    }
    if clauses.len() != m {
        return Err(Error::parse(
            0,
            format!("header announces {m} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::new(n, clauses)
}

/// [`parse_dimacs_cnf`] that also requires every clause to have width `k`.
pub fn parse_dimacs_cnf_uniform(text: &str, k: usize) -> Result<CnfFormula> {
    let f = parse_dimacs_cnf(text)?;
    if let Some(pos) = f.clauses().iter().position(|c| c.len() != k) {
        return Err(Error::InvalidParameter(format!(
            "clause {} has width {}, expected {k}",
            pos + 1,
            f.clauses()[pos].len()
        )));
    }
    Ok(f)
}

pub fn write_dimacs_cnf(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.n(), f.num_clauses());
    for clause in f.clauses() {
        for lit in clause {
            let v = lit.var as i64 + 1;
            let _ = write!(out, "{} ", if lit.negated { -v } else { v });
        }
        out.push_str("0\n");
    }
    out
}
