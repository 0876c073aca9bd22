//! Prime-field arithmetic used as an accelerator for exact linear algebra.
//!
//! Everything here works in Z/pZ for 31-bit primes p, so products fit in a
//! u64. Field elements of Q or Q(t) are mapped through an [`Embedding`]; a
//! rank computed mod p is a lower bound for the rank over the source field,
//! which is the only direction the callers rely on without further checks.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{FieldScalar, FieldSpec};

/// Primes are drawn downward from this bound.
const PRIME_CEILING: u64 = (1 << 31) - 1;

/// Matrices with at least this many cells eliminate rows in parallel.
const PARALLEL_CELLS: usize = 1 << 18;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // Deterministic for n < 3.3e24 with these bases.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Square root mod an odd prime by Tonelli-Shanks, if one exists.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = tt * tt % p;
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    Some(r)
}

/// Reduces an integer mod p.
pub fn bigint_mod(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

/// Reduces a rational mod p; `None` when p divides the denominator.
pub fn rational_mod(v: &BigRational, p: u64) -> Option<u64> {
    let den = bigint_mod(v.denom(), p);
    if den == 0 {
        return None;
    }
    Some(mul_mod(bigint_mod(v.numer(), p), inv_mod(den, p), p))
}

/// A ring map from the coefficient field to Z/pZ (t goes to a root of its
/// minimal polynomial).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub p: u64,
    pub root: u64,
}

impl Embedding {
    pub fn map(&self, x: &FieldScalar) -> Option<u64> {
        let c0 = rational_mod(x.c0(), self.p)?;
        if x.c1().is_zero() {
            return Some(c0);
        }
        let c1 = rational_mod(x.c1(), self.p)?;
        Some((c0 + mul_mod(c1, self.root, self.p)) % self.p)
    }
}

/// One prime together with every embedding of the field into it: a single
/// map for Q, both roots for a quadratic field.
#[derive(Clone, Debug)]
pub struct PrimeImage {
    pub p: u64,
    pub embeddings: Vec<Embedding>,
}

/// Iterator over usable 31-bit primes for a field: the modulus must split
/// into distinct roots and its coefficients must reduce.
pub struct PrimeStream {
    field: FieldSpec,
    next: u64,
}

impl PrimeStream {
    pub fn new(field: &FieldSpec) -> Self {
        PrimeStream {
            field: field.clone(),
            next: PRIME_CEILING,
        }
    }

    /// Starts the stream at a different offset so independent checks use
    /// disjoint primes.
    pub fn with_offset(field: &FieldSpec, offset: u64) -> Self {
        PrimeStream {
            field: field.clone(),
            next: PRIME_CEILING - offset,
        }
    }
}

impl Iterator for PrimeStream {
    type Item = PrimeImage;

    fn next(&mut self) -> Option<PrimeImage> {
        loop {
            let p = self.next;
            if p < 1 << 20 {
                return None;
            }
            self.next -= 2;
            if !is_prime(p) {
                continue;
            }
            match &self.field {
                FieldSpec::Rationals => {
                    return Some(PrimeImage {
                        p,
                        embeddings: vec![Embedding { p, root: 0 }],
                    })
                }
                FieldSpec::Quadratic(m) => {
                    let (Some(pp), Some(qq)) = (rational_mod(&m.p, p), rational_mod(&m.q, p)) else {
                        continue;
                    };
                    // t = (pp +- sqrt(pp^2 + 4 qq)) / 2
                    let disc = (pp * pp + 4 * qq) % p;
                    if disc == 0 {
                        continue;
                    }
                    let Some(s) = sqrt_mod(disc, p) else { continue };
                    let half = inv_mod(2, p);
                    let r1 = (pp + s) % p * half % p;
                    let r2 = (pp + p - s) % p * half % p;
                    return Some(PrimeImage {
                        p,
                        embeddings: vec![Embedding { p, root: r1 }, Embedding { p, root: r2 }],
                    });
                }
            }
        }
    }
}

/// Dense row-major matrix over Z/pZ.
#[derive(Clone, Debug)]
pub struct ModMatrix {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl ModMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        ModMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c] as u64
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = (v % self.p) as u32;
    }

    #[inline]
    pub fn add_to(&mut self, r: usize, c: usize, v: u64) {
        let i = r * self.cols + c;
        self.data[i] = ((self.data[i] as u64 + v % self.p) % self.p) as u32;
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in c..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = inv_mod(self.data[r * cols + c] as u64, p);
            for j in c..cols {
                let v = self.data[r * cols + j] as u64;
                self.data[r * cols + j] = (v * inv % p) as u32;
            }
            let (before, rest) = self.data.split_at_mut(r * cols);
            let (pivot_row, after) = rest.split_at_mut(cols);
            let pivot_row = &pivot_row[c..];
            let eliminate = |row: &mut [u32]| {
                let f = row[c] as u64;
                if f == 0 {
                    return;
                }
                let nf = p - f;
                for (x, &y) in row[c..].iter_mut().zip(pivot_row) {
                    if y != 0 {
                        *x = ((*x as u64 + nf * y as u64) % p) as u32;
                    }
                }
            };
            if self.rows * cols >= PARALLEL_CELLS {
                before.par_chunks_exact_mut(cols).for_each(eliminate);
                after.par_chunks_exact_mut(cols).for_each(eliminate);
            } else {
                before.chunks_exact_mut(cols).for_each(eliminate);
                after.chunks_exact_mut(cols).for_each(eliminate);
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Rank by forward elimination only (cheaper than `rref`).
    pub fn rank(mut self) -> usize {
        let p = self.p;
        let cols = self.cols;
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in c..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = inv_mod(self.data[r * cols + c] as u64, p);
            let (head, after) = self.data.split_at_mut((r + 1) * cols);
            let pivot_row = &head[r * cols + c..];
            let eliminate = |row: &mut [u32]| {
                let f = row[c] as u64;
                if f == 0 {
                    return;
                }
                let nf = p - f * inv % p;
                for (x, &y) in row[c..].iter_mut().zip(pivot_row) {
                    if y != 0 {
                        *x = ((*x as u64 + nf * y as u64) % p) as u32;
                    }
                }
            };
            if self.rows * cols >= PARALLEL_CELLS {
                after.par_chunks_exact_mut(cols).for_each(eliminate);
            } else {
                after.chunks_exact_mut(cols).for_each(eliminate);
            }
            r += 1;
        }
        r
    }

    /// Basis of the right nullspace from an RREF: one vector per free column,
    /// with a 1 in that column.
    pub fn nullspace_from_rref(&self, pivots: &[usize]) -> Vec<(usize, Vec<u64>)> {
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![0u64; self.cols];
                v[f] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    let e = self.get(i, f);
                    v[pc] = (p - e) % p;
                }
                (f, v)
            })
            .collect()
    }
}

/// Rank of a list of vectors mod p.
pub fn rank_of_rows(p: u64, rows: &[Vec<u64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m = ModMatrix::zeros(p, rows.len(), cols);
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m.rank()
}

/// Chinese remaindering of residues modulo pairwise coprime moduli, kept
/// incrementally as (value, modulus).
#[derive(Clone, Debug)]
pub struct Crt {
    pub value: BigInt,
    pub modulus: BigInt,
}

impl Default for Crt {
    fn default() -> Self {
        Crt {
            value: BigInt::zero(),
            modulus: BigInt::one(),
        }
    }
}

impl Crt {
    pub fn push(&mut self, residue: u64, p: u64) {
        let pb = BigInt::from(p);
        let cur = bigint_mod(&self.value, p);
        let m_inv = inv_mod(bigint_mod(&self.modulus, p), p);
        let delta = ((residue + p - cur) % p) * m_inv % p;
        self.value += &self.modulus * BigInt::from(delta);
        self.modulus *= pb;
    }
}

/// Rational reconstruction: finds n/d with |n|, d <= sqrt(M/2) and
/// n ≡ u d (mod M), if one exists.
pub fn rational_reconstruct(u: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if r1.clone().gcd(&t1) != BigInt::one() {
        return None;
    }
    let (n, d) = if t1.sign() == Sign::Minus { (-r1, -t1) } else { (r1, t1) };
    Some(BigRational::new(n, d))
}
