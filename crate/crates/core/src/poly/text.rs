//! Plain-text polynomial format.
//!
//! ```text
//! # comment
//! n 2 deg 4
//! 1 4 0
//! 1 0 4
//! ```
//!
//! The header declares the variable count and maximal degree; each further
//! nonempty line is `coeff e1 … en`. Repeated exponent vectors are summed.

use super::{MultiIndex, Polynomial};
use crate::error::{Error, Result};

pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

/// Parses a document holding several polynomials separated by `---` lines.
pub fn parse_polynomial_sections(text: &str) -> Result<Vec<Polynomial>> {
    let mut sections: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
    for (i, line) in text.lines().enumerate() {
        if line.trim() == "---" {
            sections.push(Vec::new());
        } else {
            sections.last_mut().unwrap().push((i + 1, line));
        }
    }
    sections.into_iter().filter(|s| s.iter().any(|(_, l)| is_content(l))).map(|s| parse_lines(s.into_iter())).collect()
}

fn is_content(line: &str) -> bool {
    let t = line.trim();
    !t.is_empty() && !t.starts_with('#')
}

fn parse_lines<'a, I>(lines: I) -> Result<Polynomial>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let mut header: Option<(usize, u32)> = None;
    let mut poly: Option<Polynomial> = None;
    let mut last_line = 0;
    for (lineno, raw) in lines {
        last_line = lineno;
        if !is_content(raw) {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match header {
            None => {
                let (n, deg) = parse_header(&toks).map_err(|msg| Error::Parse { line: lineno, msg })?;
                header = Some((n, deg));
                poly = Some(Polynomial::zero(n));
            }
            Some((n, deg)) => {
                if toks.len() != n + 1 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected a coefficient and {n} exponents, found {} fields", toks.len()),
                    });
                }
                let c: f64 = toks[0]
                    .parse()
                    .map_err(|_| Error::Parse { line: lineno, msg: format!("bad coefficient {:?}", toks[0]) })?;
                if !c.is_finite() {
                    return Err(Error::Parse { line: lineno, msg: "coefficient is not finite".into() });
                }
                let mut e = Vec::with_capacity(n);
                for t in &toks[1..] {
                    e.push(
                        t.parse::<u32>()
                            .map_err(|_| Error::Parse { line: lineno, msg: format!("bad exponent {t:?}") })?,
                    );
                }
                let alpha = MultiIndex::new(e);
                if alpha.degree() > deg {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("term of degree {} exceeds declared degree {deg}", alpha.degree()),
                    });
                }
                poly.as_mut().unwrap().add_term(alpha, c);
            }
        }
    }
    poly.ok_or(Error::Parse { line: last_line, msg: "missing `n <vars> deg <maxdeg>` header".into() })
}

fn parse_header(toks: &[&str]) -> std::result::Result<(usize, u32), String> {
    if toks.len() != 4 || toks[0] != "n" || toks[2] != "deg" {
        return Err("expected header `n <vars> deg <maxdeg>`".into());
    }
    let n: usize = toks[1].parse().map_err(|_| format!("bad variable count {:?}", toks[1]))?;
    if n == 0 {
        return Err("variable count must be positive".into());
    }
    let deg: u32 = toks[3].parse().map_err(|_| format!("bad degree {:?}", toks[3]))?;
    Ok((n, deg))
}

/// Writes a polynomial in the text format, terms in graded order.
pub fn format_polynomial(p: &Polynomial) -> String {
    let mut out = format!("n {} deg {}\n", p.nvars(), p.degree());
    for (a, c) in p.terms() {
        out.push_str(&format!("{c:?}"));
        for e in a.exponents() {
            out.push_str(&format!(" {e}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_repeats() {
        let p = parse_polynomial("# quartic\nn 2 deg 4\n\n1 4 0\n0.5 0 4\n0.5 0 4\n").unwrap();
        assert_eq!(p.nvars(), 2);
        assert_eq!(p.coeff(&MultiIndex::new(vec![0, 4])), 1.0);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_polynomial("1 2 3"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_polynomial("n 2 deg 2\n1 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_polynomial("n 2 deg 2\n1 3 0"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_polynomial("n 2 deg 2\nx 1 0"), Err(Error::Parse { .. })));
        assert!(parse_polynomial("# nothing\n").is_err());
    }

    #[test]
    fn format_then_parse_is_identity() {
        let p = parse_polynomial("n 3 deg 3\n-1.25 1 1 1\n3 0 0 0\n0.1 2 0 1\n").unwrap();
        let q = parse_polynomial(&format_polynomial(&p)).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn sections() {
        let doc = "n 2 deg 2\n1 0 0\n-1 2 0\n---\nn 2 deg 2\n1 0 0\n-1 0 2\n";
        let ps = parse_polynomial_sections(doc).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[1].coeff(&MultiIndex::new(vec![0, 2])), -1.0);
    }
}
