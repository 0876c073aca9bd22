//! Multivariate gcd: monomial content first, then subresultant PRS in the
//! last active variable with coefficient gcds computed recursively.

use super::{Monomial, SparsePoly};

fn deg_in(p: &SparsePoly, slot: usize) -> u16 {
    p.terms.keys().map(|m| m.raw()[slot]).max().unwrap_or(0)
}

fn coefficients_in(p: &SparsePoly, slot: usize) -> Vec<SparsePoly> {
    let d = deg_in(p, slot) as usize;
    let mut out = vec![SparsePoly::zero(p.n, &p.field); d + 1];
    for (m, c) in &p.terms {
        let mut e = m.raw().to_vec();
        let k = e[slot] as usize;
        e[slot] = 0;
        out[k].add_term(Monomial::from_raw(e), c.clone());
    }
    out
}

fn lc_in(p: &SparsePoly, slot: usize) -> SparsePoly {
    coefficients_in(p, slot).pop().expect("nonempty")
}

fn var_power(p: &SparsePoly, slot: usize, e: u16) -> Monomial {
    let mut exps = vec![0u16; 2 * (p.n + 1)];
    exps[slot] = e;
    Monomial::from_raw(exps)
}

/// Pseudo-remainder of `a` by `b` in the variable at `slot`.
fn prem(a: &SparsePoly, b: &SparsePoly, slot: usize) -> SparsePoly {
    let db = deg_in(b, slot);
    let lcb = lc_in(b, slot);
    let mut r = a.clone();
    let mut e = deg_in(a, slot) as i32 - db as i32 + 1;
    while !r.is_zero() && deg_in(&r, slot) >= db {
        let dr = deg_in(&r, slot);
        let s = lc_in(&r, slot).mul_monomial(&var_power(a, slot, dr - db));
        r = &(&lcb * &r) - &(&s * b);
        e -= 1;
    }
    if e > 0 {
        r = &lcb.pow(e as u32) * &r;
    }
    r
}

fn monomial_content(p: &SparsePoly) -> Monomial {
    let mut it = p.terms.keys();
    let first = it.next().expect("nonzero").raw().to_vec();
    let mins = it.fold(first, |acc, m| {
        acc.iter().zip(m.raw()).map(|(a, b)| *a.min(b)).collect()
    });
    Monomial::from_raw(mins)
}

fn div_monomial(p: &SparsePoly, m: &Monomial) -> SparsePoly {
    let mut out = SparsePoly::zero(p.n, &p.field);
    for (t, c) in &p.terms {
        out.terms.insert(m.quotient_of(t), c.clone());
    }
    out
}

fn content_in(p: &SparsePoly, slot: usize) -> SparsePoly {
    let mut g = SparsePoly::zero(p.n, &p.field);
    for c in coefficients_in(p, slot) {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, &c);
        if g.is_constant() {
            break;
        }
    }
    g
}

fn exact(p: &SparsePoly, d: &SparsePoly) -> SparsePoly {
    p.div_exact(d).expect("exact division in gcd")
}

/// Monic greatest common divisor. `gcd(0, 0) = 0`.
pub fn gcd(f: &SparsePoly, g: &SparsePoly) -> SparsePoly {
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    let mf = monomial_content(f);
    let mg = monomial_content(g);
    let common: Vec<u16> = mf.raw().iter().zip(mg.raw()).map(|(a, b)| *a.min(b)).collect();
    let mono = SparsePoly::monomial(
        f.n,
        &f.field,
        Monomial::from_raw(common),
        crate::arith::FieldScalar::one(&f.field),
    );
    let f = div_monomial(f, &mf);
    let g = div_monomial(g, &mg);
    if f.is_constant() || g.is_constant() {
        return mono;
    }
    let active = |p: &SparsePoly| {
        (0..2 * (p.n + 1))
            .rev()
            .find(|&s| p.terms.keys().any(|m| m.raw()[s] > 0))
    };
    let slot = active(&f).max(active(&g)).expect("non-constant");
    let (df, dg) = (deg_in(&f, slot), deg_in(&g, slot));
    if df == 0 {
        return &mono * &gcd(&f, &content_in(&g, slot));
    }
    if dg == 0 {
        return &mono * &gcd(&content_in(&f, slot), &g);
    }
    let cf = content_in(&f, slot);
    let cg = content_in(&g, slot);
    let c = gcd(&cf, &cg);
    let (mut a, mut b) = (exact(&f, &cf), exact(&g, &cg));
    if deg_in(&a, slot) < deg_in(&b, slot) {
        std::mem::swap(&mut a, &mut b);
    }
    let one = SparsePoly::one(f.n, &f.field);
    let mut gg = one.clone();
    let mut h = one.clone();
    loop {
        let delta = (deg_in(&a, slot) - deg_in(&b, slot)) as u32;
        let r = prem(&a, &b, slot);
        if r.is_zero() {
            break;
        }
        if deg_in(&r, slot) == 0 {
            b = one.clone();
            break;
        }
        a = b;
        b = exact(&r, &(&gg * &h.pow(delta)));
        gg = lc_in(&a, slot);
        h = if delta == 0 {
            h
        } else {
            exact(&gg.pow(delta), &h.pow(delta - 1))
        };
    }
    let pp = if b.is_constant() { one } else { exact(&b, &content_in(&b, slot)) };
    (&(&mono * &c) * &pp).monic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FieldSpec;

    fn p(n: usize, s: &str) -> SparsePoly {
        SparsePoly::parse(n, &FieldSpec::rationals(), s).unwrap()
    }

    #[test]
    fn univariate() {
        let g = gcd(&p(1, "x0^2 - 1"), &p(1, "x0^2 + 2*x0 + 1"));
        assert_eq!(g, p(1, "x0 + 1"));
        assert_eq!(gcd(&p(1, "x0^2 + 1"), &p(1, "x0 + 1")), p(1, "1"));
    }

    #[test]
    fn multivariate_common_factor() {
        let c = p(2, "a0*x1 - a1*x0 + 3*a2");
        let f = &c * &p(2, "x0^2 + a1*a2");
        let g = &c * &p(2, "a0 - x2^2 + 1");
        assert_eq!(gcd(&f, &g), c.monic());
    }

    #[test]
    fn monomial_parts() {
        assert_eq!(gcd(&p(1, "a0^2*x0"), &p(1, "a0*x0^3")), p(1, "a0*x0"));
        assert_eq!(gcd(&p(1, "a0*x0 + a0"), &p(1, "a0*x0")), p(1, "a0"));
    }

    #[test]
    fn quadratic_field() {
        let f = FieldSpec::golden();
        let c = SparsePoly::parse(1, &f, "x0 - t*x1").unwrap();
        let u = SparsePoly::parse(1, &f, "x0 + x1").unwrap();
        let v = SparsePoly::parse(1, &f, "x0^2 - 2*x1^2").unwrap();
        assert_eq!(gcd(&(&c * &u), &(&c * &v)), c.monic());
    }
}
