//! Polynomial text format: `3.5 x0^2 x1 - 1 x2`.
//!
//! Terms are a coefficient followed by space-separated factors `x<j>` or
//! `x<j>^<p>`, with 0-based variable indices. Terms are joined by
//! standalone `+` / `-` tokens. A term without a leading number has
//! coefficient 1.

use std::fmt;

use super::{MultiIndex, MultiPolynomial};
use crate::error::{Error, Result};

pub(super) fn parse_polynomial(s: &str, dim: Option<usize>) -> Result<MultiPolynomial> {
    let mut raw: Vec<(f64, Vec<(usize, u32)>)> = Vec::new();
    let mut sign = 1.0;
    let mut current: Option<(f64, Vec<(usize, u32)>)> = None;
    let mut op_pending = false;

    for tok in s.split_whitespace() {
        match tok {
            "+" | "-" => {
                if op_pending {
                    return Err(Error::Parse(format!("dangling operator '{tok}'")));
                }
                if let Some(t) = current.take() {
                    raw.push(t);
                }
                sign = if tok == "-" { -1.0 } else { 1.0 };
                op_pending = true;
            }
            t if t.starts_with('x') => {
                let factor = parse_factor(t)?;
                match current.as_mut() {
                    Some((_, factors)) => factors.push(factor),
                    None => current = Some((sign, vec![factor])),
                }
                sign = 1.0;
                op_pending = false;
            }
            t => {
                let c: f64 = t
                    .parse()
                    .map_err(|_| Error::Parse(format!("unexpected token '{t}'")))?;
                if !c.is_finite() {
                    return Err(Error::Parse(format!("non-finite coefficient '{t}'")));
                }
                // a number always opens a new term
                if let Some(done) = current.take() {
                    raw.push(done);
                }
                current = Some((sign * c, Vec::new()));
                sign = 1.0;
                op_pending = false;
            }
        }
    }
    if op_pending {
        return Err(Error::Parse("trailing operator".into()));
    }
    if let Some(t) = current {
        raw.push(t);
    }
    if raw.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }

    let needed = raw
        .iter()
        .flat_map(|(_, f)| f.iter().map(|(j, _)| j + 1))
        .max()
        .unwrap_or(0);
    let dim = match dim {
        Some(d) if needed > d => {
            return Err(Error::Parse(format!(
                "variable x{} out of range for dimension {d}",
                needed - 1
            )))
        }
        Some(d) => d,
        None => needed.max(1),
    };

    let mut p = MultiPolynomial::zero(dim);
    for (c, factors) in raw {
        let mut e = vec![0u32; dim];
        for (j, pw) in factors {
            e[j] += pw;
        }
        p.add_term(MultiIndex::new(e), c);
    }
    Ok(p)
}

fn parse_factor(tok: &str) -> Result<(usize, u32)> {
    let body = &tok[1..];
    let (var, pow) = match body.split_once('^') {
        Some((v, p)) => (v, p),
        None => (body, "1"),
    };
    let j: usize = var
        .parse()
        .map_err(|_| Error::Parse(format!("bad variable in '{tok}'")))?;
    let p: u32 = pow
        .parse()
        .map_err(|_| Error::Parse(format!("bad exponent in '{tok}'")))?;
    Ok((j, p))
}

pub(super) fn format_polynomial(p: &MultiPolynomial, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let origin = p.to_origin();
    if origin.is_zero() {
        return write!(f, "0");
    }
    let mut terms: Vec<_> = origin.terms().collect();
    // highest degree first, then lexicographically descending exponents
    terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| b.cmp(a)));
    for (i, (idx, c)) in terms.into_iter().enumerate() {
        if i == 0 {
            write!(f, "{c}")?;
        } else if c < 0.0 {
            write!(f, " - {}", -c)?;
        } else {
            write!(f, " + {c}")?;
        }
        for (j, &e) in idx.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => write!(f, " x{j}")?,
                _ => write!(f, " x{j}^{e}")?,
            }
        }
    }
    Ok(())
}
