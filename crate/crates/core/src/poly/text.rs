//! Line-oriented text form: one monomial per line as `num/den i1 i2 ...`
//! (the constant term has no indices). A leading `# n <n> d <d>` header
//! records the variable count and declared degree; other `#` lines are
//! comments.

use super::Polynomial;
use crate::error::{Error, Result};
use crate::exact::{fmt_fraction, parse_rational};

impl Polynomial {
    pub fn to_text(&self) -> String {
        let mut out = format!("# n {} d {}\n", self.n, self.degree);
        for (vars, c) in self.terms() {
            out.push_str(&fmt_fraction(c));
            for v in vars {
                out.push(' ');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`Polynomial::to_text`] output. Without a header, `n` is one
    /// past the largest index seen.
    pub fn from_text(text: &str) -> Result<Polynomial> {
        let mut header: Option<(usize, usize)> = None;
        let mut terms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if let ["n", n, "d", d] = toks.as_slice() {
                    let n = n
                        .parse()
                        .map_err(|_| Error::parse(lineno + 1, "bad variable count"))?;
                    let d = d
                        .parse()
                        .map_err(|_| Error::parse(lineno + 1, "bad degree"))?;
                    header = Some((n, d));
                }
                continue;
            }
            let mut toks = line.split_whitespace();
            let coeff_tok = toks.next().expect("non-empty line");
            let coeff = parse_rational(coeff_tok).ok_or_else(|| {
                Error::parse(lineno + 1, format!("bad coefficient {coeff_tok:?}"))
            })?;
            let vars = toks
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::parse(lineno + 1, format!("bad index {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            terms.push((vars, coeff));
        }
        let inferred_n = terms
            .iter()
            .flat_map(|(v, _)| v.iter())
            .max()
            .map_or(0, |m| m + 1);
        let (n, d) = header.unwrap_or((inferred_n, 0));
        let p = Polynomial::from_terms(n, terms)?;
        let actual = p.actual_degree();
        p.with_degree(d.max(actual))
    }
}
