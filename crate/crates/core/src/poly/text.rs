//! Text form `coef*a0^i*...*x0^j*...`, terms joined by ` + ` / ` - `.
//! Quadratic coefficients are written `((c0)+(c1)t)`.

use num_traits::One;

use super::{Monomial, SparsePoly, Var};
use crate::arith::{parse_rational, FieldScalar};
use crate::error::{Error, Result};
use crate::FieldSpec;

fn format_monomial(m: &Monomial) -> Vec<String> {
    let mut parts = Vec::new();
    for (name, exps) in [("a", m.a_exp()), ("x", m.x_exp())] {
        for (i, &e) in exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("{name}{i}")),
                _ => parts.push(format!("{name}{i}^{e}")),
            }
        }
    }
    parts
}

fn format_term(m: &Monomial, c: &FieldScalar) -> String {
    let vars = format_monomial(m);
    let mut out = String::new();
    if !c.is_rational() {
        out.push_str(&format!("({c})"));
    } else {
        let r = c.c0();
        if vars.is_empty() {
            out.push_str(&r.to_string());
        } else if r.is_one() {
        } else if (-r).is_one() {
            out.push('-');
        } else {
            out.push_str(&r.to_string());
        }
    }
    for (k, v) in vars.iter().enumerate() {
        if k > 0 || (!out.is_empty() && out != "-") {
            out.push('*');
        }
        out.push_str(v);
    }
    out
}

pub(super) fn format_poly(p: &SparsePoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let t = format_term(m, c);
        if k == 0 {
            out.push_str(&t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&t);
        }
    }
    out
}

/// Splits at top-level `sep` characters, keeping start offsets.
fn split_top(src: &[(usize, char)], is_sep: impl Fn(char) -> bool) -> Vec<(char, &[(usize, char)])> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut lead = '+';
    for (k, &(_, ch)) in src.iter().enumerate() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if depth == 0 && is_sep(c) => {
                out.push((lead, &src[start..k]));
                lead = c;
                start = k + 1;
            }
            _ => {}
        }
    }
    out.push((lead, &src[start..]));
    out
}

fn text(chunk: &[(usize, char)]) -> String {
    chunk.iter().map(|&(_, c)| c).collect()
}

fn column(chunk: &[(usize, char)], fallback: usize) -> usize {
    chunk.first().map(|&(i, _)| i + 1).unwrap_or(fallback + 1)
}

pub(super) fn parse_poly(n: usize, field: &FieldSpec, s: &str) -> Result<SparsePoly> {
    let chars: Vec<(usize, char)> = s.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(Error::parse(1, 1, "empty polynomial"));
    }
    let mut out = SparsePoly::zero(n, field);
    let mut sign = 1i64;
    for (lead, term) in split_top(&chars, |c| c == '+' || c == '-') {
        if lead == '-' {
            sign = -sign;
        }
        if term.is_empty() {
            // Consecutive or leading signs accumulate onto the next term.
            continue;
        }
        let (m, c) = parse_term(n, field, term)?;
        let c = if sign < 0 { -c } else { c };
        out.add_term(m, c);
        sign = 1;
    }
    if sign < 0 {
        return Err(Error::parse(1, s.len(), "dangling sign"));
    }
    Ok(out)
}

fn parse_term(n: usize, field: &FieldSpec, term: &[(usize, char)]) -> Result<(Monomial, FieldScalar)> {
    let mut exps = vec![0u16; 2 * (n + 1)];
    let mut coef = FieldScalar::one(field);
    let fallback = term.first().map(|&(i, _)| i).unwrap_or(0);
    for (_, factor) in split_top(term, |c| c == '*') {
        let col = column(factor, fallback);
        let body = text(factor);
        let first = factor.first().map(|&(_, c)| c).ok_or_else(|| Error::parse(1, col, "empty factor"))?;
        match first {
            '(' => {
                if !body.ends_with(')') {
                    return Err(Error::parse(1, col, "unbalanced parenthesis"));
                }
                let inner = &body[1..body.len() - 1];
                let v = FieldScalar::parse(field, inner).map_err(|e| Error::parse(1, col, e))?;
                coef = &coef * &v;
            }
            c if c.is_ascii_digit() => {
                let r = parse_rational(&body).map_err(|e| Error::parse(1, col, e))?;
                coef = coef.scale(&r);
            }
            't' if body == "t" => {
                let g = FieldScalar::generator(field).map_err(|e| Error::parse(1, col, e.to_string()))?;
                coef = &coef * &g;
            }
            'a' | 'x' => {
                let (name, e) = match body.split_once('^') {
                    Some((v, e)) => {
                        let e: u16 = e.parse().map_err(|_| Error::parse(1, col, format!("bad exponent in {body:?}")))?;
                        (v, e)
                    }
                    None => (body.as_str(), 1),
                };
                let idx: usize = name[1..]
                    .parse()
                    .map_err(|_| Error::parse(1, col, format!("bad variable {name:?}")))?;
                if idx > n {
                    return Err(Error::parse(1, col, format!("variable {name} out of range for n = {n}")));
                }
                let v = if first == 'a' { Var::a(idx) } else { Var::x(idx) };
                exps[v.slot(n)] += e;
            }
            _ => return Err(Error::parse(1, col, format!("unexpected factor {body:?}"))),
        }
    }
    Ok((Monomial::from_raw(exps), coef))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_rational() {
        let q = FieldSpec::rationals();
        for s in ["0", "3", "-1/2", "x0", "-x0^2*x1 + 3/4*a1*x2 - 7", "a0^3*x1^2 - a2"] {
            let p = SparsePoly::parse(2, &q, s).unwrap();
            let back = SparsePoly::parse(2, &q, &p.to_string()).unwrap();
            assert_eq!(p, back, "{s}");
        }
        assert_eq!(SparsePoly::parse(2, &q, "x0 - x0").unwrap().to_string(), "0");
    }

    #[test]
    fn round_trip_quadratic() {
        let f = FieldSpec::golden();
        let p = SparsePoly::parse(1, &f, "((1)+(2)t)*a0*x1 - t*x0 + 1/3").unwrap();
        assert_eq!(p.num_terms(), 3);
        let back = SparsePoly::parse(1, &f, &p.to_string()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn parse_errors_have_columns() {
        let q = FieldSpec::rationals();
        match SparsePoly::parse(1, &q, "x0 + y1") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("{other:?}"),
        }
        assert!(SparsePoly::parse(1, &q, "x5").is_err());
        assert!(SparsePoly::parse(1, &q, "x0 + t").is_err());
        assert!(SparsePoly::parse(1, &q, "").is_err());
        assert!(SparsePoly::parse(1, &q, "x0 -").is_err());
    }
}
