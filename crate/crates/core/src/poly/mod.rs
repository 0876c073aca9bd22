//! Sparse bi-graded polynomials in two variable blocks `a_0..a_n` and
//! `x_0..x_n` over a [`FieldSpec`].
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is the
//! canonical term order (leading term first): graded lex on the x-block,
//! ties broken by graded lex on the a-block, with `x_0 > x_1 > ...` and
//! `a_0 > a_1 > ...`.

mod gcd;
mod text;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::arith::FieldScalar;
use crate::error::{Error, Result};
use crate::FieldSpec;

pub use gcd::gcd;

/// All exponent vectors of length `nvars` and total degree `d`, in
/// descending lex order (`x0^d` first).
pub fn exponent_vectors(nvars: usize, d: u32) -> Vec<Vec<u16>> {
    fn rec(i: usize, rem: u32, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if i + 1 == cur.len() {
            cur[i] = rem as u16;
            out.push(cur.clone());
            return;
        }
        for e in (0..=rem).rev() {
            cur[i] = e as u16;
            rec(i + 1, rem - e, cur, out);
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, d, &mut vec![0; nvars], &mut out);
    out
}

/// Which variable block a variable belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    A,
    X,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub block: Block,
    pub index: usize,
}

impl Var {
    pub fn a(index: usize) -> Self {
        Var { block: Block::A, index }
    }

    pub fn x(index: usize) -> Self {
        Var { block: Block::X, index }
    }

    fn slot(&self, n: usize) -> usize {
        match self.block {
            Block::X => self.index,
            Block::A => n + 1 + self.index,
        }
    }
}

/// Exponents of one term: `x_0..x_n` followed by `a_0..a_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Box<[u16]>,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial {
            exps: vec![0; 2 * (n + 1)].into_boxed_slice(),
        }
    }

    pub fn from_blocks(a_exp: &[u16], x_exp: &[u16]) -> Self {
        assert_eq!(a_exp.len(), x_exp.len(), "blocks must have equal length");
        let mut exps = Vec::with_capacity(2 * x_exp.len());
        exps.extend_from_slice(x_exp);
        exps.extend_from_slice(a_exp);
        Monomial {
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn n(&self) -> usize {
        self.exps.len() / 2 - 1
    }

    pub fn x_exp(&self) -> &[u16] {
        &self.exps[..self.exps.len() / 2]
    }

    pub fn a_exp(&self) -> &[u16] {
        &self.exps[self.exps.len() / 2..]
    }

    pub(crate) fn raw(&self) -> &[u16] {
        &self.exps
    }

    pub(crate) fn from_raw(exps: Vec<u16>) -> Self {
        Monomial {
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.exps[v.slot(self.n())]
    }

    /// (a-degree, x-degree).
    pub fn bidegree(&self) -> (u32, u32) {
        let s = |e: &[u16]| e.iter().map(|&v| v as u32).sum();
        (s(self.a_exp()), s(self.x_exp()))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// other / self, assuming `self.divides(other)`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: other
                .exps
                .iter()
                .zip(self.exps.iter())
                .map(|(b, a)| b - a)
                .collect(),
        }
    }

    pub fn swapped(&self) -> Monomial {
        Monomial::from_blocks(self.x_exp(), self.a_exp())
    }
}

fn cmp_graded_lex(u: &[u16], v: &[u16]) -> Ordering {
    let du: u32 = u.iter().map(|&e| e as u32).sum();
    let dv: u32 = v.iter().map(|&e| e as u32).sum();
    // Larger degree and larger leading exponents sort first.
    dv.cmp(&du).then_with(|| v.cmp(u))
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_graded_lex(self.x_exp(), other.x_exp())
            .then_with(|| cmp_graded_lex(self.a_exp(), other.a_exp()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `a_0..a_n, x_0..x_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    n: usize,
    field: FieldSpec,
    terms: BTreeMap<Monomial, FieldScalar>,
}

impl SparsePoly {
    pub fn zero(n: usize, field: &FieldSpec) -> Self {
        SparsePoly {
            n,
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: FieldScalar) -> Self {
        let field = c.field().clone();
        let mut p = SparsePoly::zero(n, &field);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(n), c);
        }
        p
    }

    pub fn one(n: usize, field: &FieldSpec) -> Self {
        Self::constant(n, FieldScalar::one(field))
    }

    pub fn var(n: usize, field: &FieldSpec, v: Var) -> Self {
        let mut m = vec![0u16; 2 * (n + 1)];
        m[v.slot(n)] = 1;
        Self::monomial(n, field, Monomial::from_raw(m), FieldScalar::one(field))
    }

    pub fn monomial(n: usize, field: &FieldSpec, m: Monomial, c: FieldScalar) -> Self {
        assert_eq!(m.n(), n, "monomial has the wrong number of variables");
        let mut p = SparsePoly::zero(n, field);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds from terms, merging repeats and dropping zeros.
    pub fn from_terms(
        n: usize,
        field: &FieldSpec,
        terms: impl IntoIterator<Item = (Monomial, FieldScalar)>,
    ) -> Self {
        let mut p = SparsePoly::zero(n, field);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.raw().iter().all(|&e| e == 0))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical order, leading term first.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&FieldScalar> {
        self.terms.get(m)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &FieldScalar)> {
        self.terms.iter().next()
    }

    pub fn leading_coefficient(&self) -> Option<&FieldScalar> {
        self.leading_term().map(|(_, c)| c)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: FieldScalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = SparsePoly::zero(self.n, &self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &FieldScalar) -> Self {
        if c.is_zero() {
            return SparsePoly::zero(self.n, &self.field);
        }
        SparsePoly {
            n: self.n,
            field: self.field.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        SparsePoly {
            n: self.n,
            field: self.field.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = SparsePoly::one(self.n, &self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// (a-degree, x-degree) of the leading term; `None` for zero.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        self.leading_term().map(|(m, _)| m.bidegree())
    }

    pub fn is_bihomogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|m| m.bidegree());
        match it.next() {
            None => true,
            Some(b) => it.all(|o| o == b),
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| {
            let (a, x) = m.bidegree();
            a + x
        }).max()
    }

    /// Largest exponent of `v` over all terms.
    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    /// Largest a-block degree over all terms.
    pub fn a_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.bidegree().0).max().unwrap_or(0)
    }

    /// Scales so the canonically first coefficient is 1.
    pub fn monic(&self) -> Self {
        match self.leading_coefficient() {
            None => self.clone(),
            Some(c) => self.scale(&c.inv().expect("leading coefficient is nonzero")),
        }
    }

    /// Formal partial derivative.
    pub fn partial_derivative(&self, v: Var) -> Self {
        let slot = v.slot(self.n);
        let mut out = SparsePoly::zero(self.n, &self.field);
        for (m, c) in &self.terms {
            let e = m.raw()[slot];
            if e == 0 {
                continue;
            }
            let mut exps = m.raw().to_vec();
            exps[slot] -= 1;
            out.add_term(Monomial::from_raw(exps), c.scale(&crate::arith::rat(e as i64)));
        }
        out
    }

    /// Repeated differentiation by the exponent pattern of `m` (the action
    /// of the monomial `m` as a differential operator).
    pub fn differentiate_by(&self, m: &Monomial) -> Self {
        let mut out = SparsePoly::zero(self.n, &self.field);
        for (t, c) in &self.terms {
            if !m.divides(t) {
                continue;
            }
            let mut factor: i64 = 1;
            let mut overflow = false;
            for (&te, &me) in t.raw().iter().zip(m.raw().iter()) {
                for k in 0..me {
                    match factor.checked_mul((te - k) as i64) {
                        Some(f) => factor = f,
                        None => overflow = true,
                    }
                }
            }
            assert!(!overflow, "derivative coefficient overflow");
            out.add_term(m.quotient_of(t), c.scale(&crate::arith::rat(factor)));
        }
        out
    }

    /// The action `op · self`: each monomial of `op` acts as the matching
    /// partial derivative.
    pub fn apply_operator(&self, op: &SparsePoly) -> Result<Self> {
        self.check(op)?;
        let mut out = SparsePoly::zero(self.n, &self.field);
        for (m, c) in &op.terms {
            out = &out + &self.differentiate_by(m).scale(c);
        }
        Ok(out)
    }

    /// Substitutes scalars for some variables.
    pub fn evaluate(&self, assignment: &[(Var, FieldScalar)]) -> Self {
        let slots: Vec<(usize, &FieldScalar)> =
            assignment.iter().map(|(v, c)| (v.slot(self.n), c)).collect();
        let mut out = SparsePoly::zero(self.n, &self.field);
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut exps = m.raw().to_vec();
            for &(slot, val) in &slots {
                let e = exps[slot];
                if e > 0 {
                    coef = &coef * &val.pow(e as u32);
                    exps[slot] = 0;
                }
            }
            out.add_term(Monomial::from_raw(exps), coef);
        }
        out
    }

    /// Value of a polynomial in which every variable is assigned.
    pub fn evaluate_fully(&self, a: &[FieldScalar], x: &[FieldScalar]) -> FieldScalar {
        let mut acc = FieldScalar::zero(&self.field);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (e, v) in m.a_exp().iter().zip(a).chain(m.x_exp().iter().zip(x)) {
                if *e > 0 {
                    t = &t * &v.pow(*e as u32);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Replaces variable `v` by an arbitrary polynomial.
    pub fn substitute(&self, v: Var, replacement: &SparsePoly) -> Result<Self> {
        self.check(replacement)?;
        let slot = v.slot(self.n);
        let max_e = self.terms.keys().map(|m| m.raw()[slot]).max().unwrap_or(0);
        let mut powers = vec![SparsePoly::one(self.n, &self.field)];
        for k in 1..=max_e as usize {
            powers.push(&powers[k - 1] * replacement);
        }
        let mut out = SparsePoly::zero(self.n, &self.field);
        for (m, c) in &self.terms {
            let mut exps = m.raw().to_vec();
            let e = exps[slot];
            exps[slot] = 0;
            let rest = SparsePoly::monomial(self.n, &self.field, Monomial::from_raw(exps), c.clone());
            out = &out + &(&rest * &powers[e as usize]);
        }
        Ok(out)
    }

    /// Exchanges the a- and x-exponents of every term.
    pub fn swap_blocks(&self) -> Self {
        SparsePoly {
            n: self.n,
            field: self.field.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.swapped(), c.clone())).collect(),
        }
    }

    /// Groups terms by x-monomial: `self = Σ coeff(a) · x^β`.
    pub fn x_coefficients(&self) -> BTreeMap<Vec<u16>, SparsePoly> {
        let mut out: BTreeMap<Vec<u16>, SparsePoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let a_only = Monomial::from_blocks(m.a_exp(), &vec![0; self.n + 1]);
            out.entry(m.x_exp().to_vec())
                .or_insert_with(|| SparsePoly::zero(self.n, &self.field))
                .add_term(a_only, c.clone());
        }
        out
    }

    /// Groups terms by a-monomial: `self = Σ C_α(x) · a^α`.
    pub fn a_coefficients(&self) -> BTreeMap<Vec<u16>, SparsePoly> {
        let mut out: BTreeMap<Vec<u16>, SparsePoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let x_only = Monomial::from_blocks(&vec![0; self.n + 1], m.x_exp());
            out.entry(m.a_exp().to_vec())
                .or_insert_with(|| SparsePoly::zero(self.n, &self.field))
                .add_term(x_only, c.clone());
        }
        out
    }

    /// gcd over K[a] of the coefficients of `self` viewed as a polynomial in
    /// the x-block, normalized monic.
    pub fn content_in_a(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut g = SparsePoly::zero(self.n, &self.field);
        for c in self.x_coefficients().into_values() {
            g = gcd(&g, &c);
            if g.is_constant() {
                break;
            }
        }
        Ok(g.monic())
    }

    /// The bi-homogeneous representative with all pure-a content removed,
    /// scaled so its leading coefficient is 1.
    pub fn star(&self) -> Result<Self> {
        let content = self.content_in_a()?;
        let q = self
            .div_exact(&content)
            .expect("content divides every coefficient");
        Ok(q.monic())
    }

    /// Substitutes `a_i -> x_i + e_i`; the result stores `e` in the a-block.
    pub fn diagonal_shift(&self) -> Self {
        let n = self.n;
        let mut out = SparsePoly::zero(n, &self.field);
        for (m, c) in &self.terms {
            let x_part = Monomial::from_blocks(&vec![0; n + 1], m.x_exp());
            let mut term = SparsePoly::monomial(n, &self.field, x_part, c.clone());
            for (i, &e) in m.a_exp().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let shifted = &SparsePoly::var(n, &self.field, Var::x(i))
                    + &SparsePoly::var(n, &self.field, Var::a(i));
                term = &term * &shifted.pow(e as u32);
            }
            out = &out + &term;
        }
        out
    }

    /// Smallest a-block degree among nonzero terms.
    pub fn min_a_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.bidegree().0).min()
    }

    /// The part of `self` whose a-block degree equals `k`.
    pub fn a_homogeneous_part(&self, k: u32) -> Self {
        SparsePoly {
            n: self.n,
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.bidegree().0 == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide.
    pub fn div_exact(&self, d: &SparsePoly) -> Option<Self> {
        let (dm, dc) = d.leading_term()?;
        let dc_inv = dc.inv().ok()?;
        let mut rem = self.clone();
        let mut quot = SparsePoly::zero(self.n, &self.field);
        while let Some((rm, rc)) = rem.leading_term() {
            if !dm.divides(rm) {
                return None;
            }
            let qm = dm.quotient_of(rm);
            let qc = rc * &dc_inv;
            let t = SparsePoly::monomial(self.n, &self.field, qm.clone(), qc.clone());
            rem = &rem - &(d * &t);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// True if `self == c * other` for some nonzero scalar `c`; returns it.
    pub fn proportionality(&self, other: &SparsePoly) -> Option<FieldScalar> {
        if self.is_zero() || other.is_zero() || self.terms.len() != other.terms.len() {
            return None;
        }
        let (m1, c1) = self.leading_term()?;
        let c2 = other.terms.get(m1)?;
        let ratio = c1.checked_div(c2).ok()?;
        for (m, c) in &other.terms {
            let mine = self.terms.get(m)?;
            if *mine != c * &ratio {
                return None;
            }
        }
        Some(ratio)
    }

    pub fn is_pure_x(&self) -> bool {
        self.terms.keys().all(|m| m.a_exp().iter().all(|&e| e == 0))
    }

    pub fn is_pure_a(&self) -> bool {
        self.terms.keys().all(|m| m.x_exp().iter().all(|&e| e == 0))
    }

    pub fn has_rational_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.c1().is_zero())
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::format_poly(self))
    }
}

impl SparsePoly {
    /// Parses the format written by `Display`.
    pub fn parse(n: usize, field: &FieldSpec, s: &str) -> Result<Self> {
        text::parse_poly(n, field, s)
    }
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a SparsePoly> for &'a SparsePoly {
            type Output = SparsePoly;
            /// Panics on dimension or field mismatch.
            fn $method(self, rhs: &'a SparsePoly) -> SparsePoly {
                self.$checked(rhs).expect("incompatible polynomials")
            }
        }
        impl $tr<SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: SparsePoly) -> SparsePoly {
                (&self).$method(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly {
            n: self.n,
            field: self.field.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        -&self
    }
}

impl Zero for SparsePoly {
    fn zero() -> Self {
        SparsePoly::zero(0, &FieldSpec::Rationals)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn p(n: usize, s: &str) -> SparsePoly {
        SparsePoly::parse(n, &q(), s).unwrap()
    }

    fn s(v: i64) -> FieldScalar {
        FieldScalar::from_int(&q(), v)
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(p(1, "x0 + x1") * p(1, "x0 - x1"), p(1, "x0^2 - x1^2"));
    }

    #[test]
    fn multiplicative_identity() {
        let f = p(2, "3*a0*x1 - 1/2*x2^2 + a2");
        assert_eq!(&f * &SparsePoly::one(2, &q()), f);
    }

    #[test]
    fn square_of_bilinear_form() {
        let l = p(1, "a0*x1 - a1*x0");
        assert_eq!(l.pow(2), p(1, "a0^2*x1^2 - 2*a0*a1*x0*x1 + a1^2*x0^2"));
    }

    #[test]
    fn mismatch_errors() {
        let f = p(1, "x0");
        let g = p(2, "x0");
        assert!(matches!(f.checked_add(&g), Err(Error::DimensionMismatch { .. })));
        let h = SparsePoly::parse(1, &FieldSpec::golden(), "x0").unwrap();
        assert_eq!(f.checked_mul(&h), Err(Error::FieldMismatch));
    }

    #[test]
    fn derivatives() {
        let f = p(3, "x0^3*x1^2*x3");
        assert_eq!(f.partial_derivative(Var::x(0)), p(3, "3*x0^2*x1^2*x3"));
        assert!(p(3, "x0^2").partial_derivative(Var::a(0)).is_zero());
        let op = p(3, "2*x0^2*x1 + x3");
        assert_eq!(f.apply_operator(&op).unwrap(), p(3, "24*x0*x1*x3 + x0^3*x1^2"));
    }

    #[test]
    fn evaluation() {
        let l = p(1, "a0*x1 - a1*x0");
        let at = l.evaluate(&[(Var::a(0), s(1)), (Var::a(1), s(2))]);
        assert_eq!(at, p(1, "x1 - 2*x0"));
        let c = p(1, "x0^2 + x1^2").evaluate(&[(Var::x(0), s(3)), (Var::x(1), s(4))]);
        assert_eq!(c, SparsePoly::constant(1, s(25)));
    }

    #[test]
    fn content_and_star() {
        assert_eq!(p(1, "a0^2*x0 + a0*a1*x1").content_in_a().unwrap(), p(1, "a0"));
        assert_eq!(p(1, "x0 + x1").content_in_a().unwrap(), SparsePoly::one(1, &q()));
        assert_eq!(p(1, "a0*a1*x0^2").content_in_a().unwrap(), p(1, "a0*a1"));
        assert_eq!(
            p(1, "a0^2*x1 - a0*a1*x0").star().unwrap(),
            p(1, "a0*x1 - a1*x0").monic()
        );
        let f = p(1, "x0 - 2*x1");
        assert_eq!(f.star().unwrap(), f);
        assert_eq!(SparsePoly::zero(1, &q()).content_in_a(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn non_monomial_content() {
        // (a0 + a1)(a0 - 2 a2) x0 + (a0 + a1) a2 x1
        let f = p(2, "a0^2*x0 + a0*a1*x0 - 2*a0*a2*x0 - 2*a1*a2*x0 + a0*a2*x1 + a1*a2*x1");
        assert_eq!(f.content_in_a().unwrap(), p(2, "a0 + a1"));
    }

    #[test]
    fn diagonal_shift_multiplicity() {
        let l = p(1, "a0*x1 - a1*x0");
        let sh = l.diagonal_shift();
        assert_eq!(sh, p(1, "a0*x1 - a1*x0"));
        assert_eq!(sh.min_a_degree(), Some(1));
        assert_eq!(p(1, "x0^2 + x1").diagonal_shift().min_a_degree(), Some(0));
    }

    #[test]
    fn swapping() {
        let f = p(1, "a0*x1");
        assert_eq!(f.swap_blocks(), p(1, "a1*x0"));
        let g = p(2, "a0^2*x1 - 3*a2*x0*x1 + x2");
        assert_eq!(g.swap_blocks().swap_blocks(), g);
    }

    #[test]
    fn canonical_order_leads_with_x_block() {
        let f = p(2, "a0^5*x2 + x0");
        let (m, _) = f.leading_term().unwrap();
        assert_eq!(m.x_exp(), &[1, 0, 0]);
        let g = p(2, "a2*x0^2 + a0*x0*x1");
        assert_eq!(g.leading_term().unwrap().0.a_exp(), &[0, 0, 1]);
    }

    #[test]
    fn substitution_of_variables() {
        let f = p(1, "a0*x1 - a1*x0");
        let g = f.substitute(Var::x(1), &p(1, "a1")).unwrap();
        assert_eq!(g, p(1, "a0*a1 - a1*x0"));
    }

    #[test]
    fn exponent_vector_counts() {
        assert_eq!(exponent_vectors(3, 4).len(), 15);
        assert_eq!(exponent_vectors(3, 2)[0], vec![2, 0, 0]);
        assert_eq!(exponent_vectors(3, 2)[5], vec![0, 0, 2]);
        assert_eq!(exponent_vectors(4, 0), vec![vec![0; 4]]);
    }

    #[test]
    fn exact_division() {
        let a = p(2, "a0 + a1");
        let b = p(2, "a0*x1 - 3*a2*x0 + 2");
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&p(2, "a2 + 1")), None);
    }
}
