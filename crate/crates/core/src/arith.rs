//! Exact scalars over Q and over quadratic extensions Q[t]/(t^2 - p t - q).
//!
//! A [`FieldScalar`] is `c0 + c1 t` with both components kept as reduced
//! big rationals. Products reduce `t^2` to `p t + q`; inverses go through the
//! conjugate and the rational norm.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default bound for random evaluation points.
pub const DEFAULT_SAMPLE_BOUND: u64 = 1 << 31;

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct QuadraticModulus {
    pub p: BigRational,
    pub q: BigRational,
}

/// The coefficient field: Q, or Q(t) with t^2 = p t + q irreducible.
#[derive(Clone, Debug)]
pub enum FieldSpec {
    Rationals,
    Quadratic(Arc<QuadraticModulus>),
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (FieldSpec::Rationals, FieldSpec::Rationals) => true,
            (FieldSpec::Quadratic(a), FieldSpec::Quadratic(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

impl Eq for FieldSpec {}

impl Hash for FieldSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            FieldSpec::Rationals => 0u8.hash(state),
            FieldSpec::Quadratic(m) => {
                1u8.hash(state);
                m.hash(state);
            }
        }
    }
}

fn is_rational_square(r: &BigRational) -> bool {
    if r.is_negative() {
        return false;
    }
    let is_sq = |v: &BigInt| {
        let s = v.sqrt();
        &s * &s == *v
    };
    is_sq(r.numer()) && is_sq(r.denom())
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec::Rationals
    }

    /// Q[t]/(t^2 - p t - q). Rejects reducible moduli.
    pub fn quadratic(p: BigRational, q: BigRational) -> Result<Self> {
        let disc = &p * &p + BigRational::from_integer(4.into()) * &q;
        if is_rational_square(&disc) {
            return Err(Error::ReducibleModulus {
                p: p.to_string(),
                q: q.to_string(),
            });
        }
        Ok(FieldSpec::Quadratic(Arc::new(QuadraticModulus { p, q })))
    }

    /// t^2 = 5, used for H3.
    pub fn sqrt5() -> Self {
        Self::quadratic(BigRational::zero(), rat(5)).expect("t^2 - 5 is irreducible")
    }

    /// t^2 = t + 1, the golden ratio, used for H4.
    pub fn golden() -> Self {
        Self::quadratic(rat(1), rat(1)).expect("t^2 - t - 1 is irreducible")
    }

    /// t^2 = -t - 1, a primitive cube root of unity.
    pub fn eisenstein() -> Self {
        Self::quadratic(rat(-1), rat(-1)).expect("t^2 + t + 1 is irreducible")
    }

    pub fn is_rationals(&self) -> bool {
        matches!(self, FieldSpec::Rationals)
    }

    pub fn modulus(&self) -> Option<&QuadraticModulus> {
        match self {
            FieldSpec::Rationals => None,
            FieldSpec::Quadratic(m) => Some(m),
        }
    }
}

fn rational_wire(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Serialize, Deserialize)]
struct FieldSpecWire {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    q: Option<String>,
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = match self {
            FieldSpec::Rationals => FieldSpecWire {
                kind: "rationals".into(),
                p: None,
                q: None,
            },
            FieldSpec::Quadratic(m) => FieldSpecWire {
                kind: "quadratic".into(),
                p: Some(rational_wire(&m.p)),
                q: Some(rational_wire(&m.q)),
            },
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = FieldSpecWire::deserialize(deserializer)?;
        match wire.kind.as_str() {
            "rationals" => Ok(FieldSpec::Rationals),
            "quadratic" => {
                let p = wire.p.ok_or_else(|| D::Error::missing_field("p"))?;
                let q = wire.q.ok_or_else(|| D::Error::missing_field("q"))?;
                let p = parse_rational(&p).map_err(D::Error::custom)?;
                let q = parse_rational(&q).map_err(D::Error::custom)?;
                FieldSpec::quadratic(p, q).map_err(D::Error::custom)
            }
            other => Err(D::Error::custom(format!("unknown field kind {other:?}"))),
        }
    }
}

pub(crate) fn rat(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Parses `n` or `n/d` into a reduced rational.
pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| format!("bad rational {s:?}"))?;
    let den = BigInt::from_str(den).map_err(|_| format!("bad rational {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

/// An exact element `c0 + c1 t` of a [`FieldSpec`].
#[derive(Clone, Debug)]
pub struct FieldScalar {
    c0: BigRational,
    c1: BigRational,
    field: FieldSpec,
}

impl PartialEq for FieldScalar {
    fn eq(&self, other: &Self) -> bool {
        self.c0 == other.c0 && self.c1 == other.c1 && self.field == other.field
    }
}

impl Eq for FieldScalar {}

impl Hash for FieldScalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.c0.hash(state);
        self.c1.hash(state);
    }
}

impl FieldScalar {
    pub fn new(field: &FieldSpec, c0: BigRational, c1: BigRational) -> Self {
        assert!(
            !field.is_rationals() || c1.is_zero(),
            "rational field element with a t component"
        );
        FieldScalar {
            c0,
            c1,
            field: field.clone(),
        }
    }

    pub fn zero(field: &FieldSpec) -> Self {
        Self::new(field, BigRational::zero(), BigRational::zero())
    }

    pub fn one(field: &FieldSpec) -> Self {
        Self::from_int(field, 1)
    }

    pub fn from_int(field: &FieldSpec, v: i64) -> Self {
        Self::new(field, rat(v), BigRational::zero())
    }

    pub fn from_bigint(field: &FieldSpec, v: BigInt) -> Self {
        Self::new(field, BigRational::from_integer(v), BigRational::zero())
    }

    pub fn from_rational(field: &FieldSpec, v: BigRational) -> Self {
        Self::new(field, v, BigRational::zero())
    }

    /// The generator `t` of a quadratic field.
    pub fn generator(field: &FieldSpec) -> Result<Self> {
        match field {
            FieldSpec::Rationals => Err(Error::Domain("Q has no generator t".into())),
            FieldSpec::Quadratic(_) => Ok(Self::new(field, BigRational::zero(), rat(1))),
        }
    }

    pub fn c0(&self) -> &BigRational {
        &self.c0
    }

    pub fn c1(&self) -> &BigRational {
        &self.c1
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.c0.is_one() && self.c1.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.c1.is_zero()
    }

    /// Small integers print as themselves; used to keep text output compact.
    pub fn as_i64(&self) -> Option<i64> {
        if self.c1.is_zero() && self.c0.is_integer() {
            self.c0.numer().to_i64()
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(FieldScalar {
            c0: &self.c0 + &other.c0,
            c1: &self.c1 + &other.c1,
            field: self.field.clone(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(FieldScalar {
            c0: &self.c0 - &other.c0,
            c1: &self.c1 - &other.c1,
            field: self.field.clone(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let (c0, c1) = match &self.field {
            FieldSpec::Rationals => (&self.c0 * &other.c0, BigRational::zero()),
            FieldSpec::Quadratic(m) => {
                // (a + b t)(c + d t) = (ac + bd q) + (ad + bc + bd p) t
                let bd = &self.c1 * &other.c1;
                let c0 = &self.c0 * &other.c0 + &bd * &m.q;
                let c1 = &self.c0 * &other.c1 + &self.c1 * &other.c0 + &bd * &m.p;
                (c0, c1)
            }
        };
        Ok(FieldScalar {
            c0,
            c1,
            field: self.field.clone(),
        })
    }

    /// Galois conjugate: t maps to the other root p - t.
    pub fn conj(&self) -> Self {
        match &self.field {
            FieldSpec::Rationals => self.clone(),
            FieldSpec::Quadratic(m) => FieldScalar {
                c0: &self.c0 + &self.c1 * &m.p,
                c1: -&self.c1,
                field: self.field.clone(),
            },
        }
    }

    /// x * conj(x), a rational.
    pub fn norm(&self) -> BigRational {
        match &self.field {
            FieldSpec::Rationals => self.c0.clone(),
            FieldSpec::Quadratic(m) => {
                // (c0 + c1 t)(c0 + c1 p - c1 t) = c0^2 + c0 c1 p - c1^2 q
                &self.c0 * &self.c0 + &self.c0 * &self.c1 * &m.p - &self.c1 * &self.c1 * &m.q
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match &self.field {
            FieldSpec::Rationals => Ok(FieldScalar {
                c0: self.c0.recip(),
                c1: BigRational::zero(),
                field: self.field.clone(),
            }),
            FieldSpec::Quadratic(_) => {
                let n = self.norm();
                let c = self.conj();
                Ok(FieldScalar {
                    c0: &c.c0 / &n,
                    c1: &c.c1 / &n,
                    field: self.field.clone(),
                })
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = FieldScalar::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Scales by a rational without going through a full product.
    pub fn scale(&self, r: &BigRational) -> Self {
        FieldScalar {
            c0: &self.c0 * r,
            c1: &self.c1 * r,
            field: self.field.clone(),
        }
    }

    /// Least common multiple of the two component denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        num_integer::Integer::lcm(self.c0.denom(), self.c1.denom())
    }

    /// Parses the textual forms produced by `Display` (`n`, `n/d`,
    /// `(c0)+(c1)t`) and simple sums such as `t+3`, `-2*t-4`, `1/2t`.
    pub fn parse(field: &FieldSpec, s: &str) -> std::result::Result<Self, String> {
        let src = s.trim();
        if src.is_empty() {
            return Err("empty scalar".into());
        }
        let mut c0 = BigRational::zero();
        let mut c1 = BigRational::zero();
        let bytes: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1i64;
            while i < bytes.len() && (bytes[i] == '+' || bytes[i] == '-') {
                if bytes[i] == '-' {
                    sign = -sign;
                }
                i += 1;
            }
            let mut coef = rat(1);
            let mut have_coef = false;
            if i < bytes.len() && bytes[i] == '(' {
                let close = bytes[i..]
                    .iter()
                    .position(|&c| c == ')')
                    .ok_or_else(|| format!("unbalanced parenthesis in {src:?}"))?;
                let inner: String = bytes[i + 1..i + close].iter().collect();
                coef = parse_rational(&inner)?;
                have_coef = true;
                i += close + 1;
            } else {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '/') {
                    i += 1;
                }
                if i > start {
                    let txt: String = bytes[start..i].iter().collect();
                    coef = parse_rational(&txt)?;
                    have_coef = true;
                }
            }
            if i < bytes.len() && bytes[i] == '*' {
                i += 1;
            }
            let is_t = i < bytes.len() && bytes[i] == 't';
            if is_t {
                i += 1;
            } else if !have_coef {
                return Err(format!("cannot parse scalar {src:?}"));
            }
            let term = coef * rat(sign);
            if is_t {
                c1 += term;
            } else {
                c0 += term;
            }
            if i < bytes.len() && bytes[i] != '+' && bytes[i] != '-' {
                return Err(format!("unexpected {:?} in scalar {src:?}", bytes[i]));
            }
        }
        if field.is_rationals() && !c1.is_zero() {
            return Err(format!("{src:?} uses t but the field is Q"));
        }
        Ok(FieldScalar::new(field, c0, c1))
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c1.is_zero() {
            write!(f, "{}", self.c0)
        } else {
            write!(f, "({})+({})t", self.c0, self.c1)
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a FieldScalar> for &'a FieldScalar {
            type Output = FieldScalar;
            /// Panics on mixed fields; use the `checked_*` form to get an error.
            fn $method(self, rhs: &'a FieldScalar) -> FieldScalar {
                self.$checked(rhs).expect("field mismatch in scalar arithmetic")
            }
        }
        impl $tr<FieldScalar> for FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: FieldScalar) -> FieldScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        FieldScalar {
            c0: -&self.c0,
            c1: -&self.c1,
            field: self.field.clone(),
        }
    }
}

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        -&self
    }
}

/// A deterministic generator for one task of a seeded run. Distinct task
/// indices get independent ChaCha streams, so parallel and serial runs draw
/// identical values.
pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// A pseudo-random integer in `[1, bound]`, embedded in `field` with c1 = 0.
pub fn sample_nonzero(field: &FieldSpec, seed: u64, bound: u64) -> FieldScalar {
    assert!(bound >= 2, "sampling bound must be at least 2");
    let mut rng = task_rng(seed, 0);
    FieldScalar::from_int(field, rng.gen_range(1..=bound) as i64)
}

/// Draws `count` values in `[1, bound]` from an existing generator.
pub fn sample_integers(rng: &mut impl Rng, count: usize, bound: u64) -> Vec<u64> {
    (0..count).map(|_| rng.gen_range(1..=bound)).collect()
}
