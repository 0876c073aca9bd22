//! Nullspaces of scalar systems by multi-modular RREF, Chinese remaindering
//! and rational reconstruction. Every reconstructed vector is checked
//! against the exact system before it is returned.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::exact::{nullspace_from_exact_rref, rref_exact};
use super::ScalarMatrix;
use crate::arith::FieldScalar;
use crate::modp::{inv_mod, mul_mod, rational_reconstruct, Crt, ModMatrix, PrimeImage, PrimeStream};
use crate::FieldSpec;

/// Sparse coefficient matrix over the field.
#[derive(Clone, Debug)]
pub(crate) struct SparseSystem {
    pub rows: usize,
    pub cols: usize,
    pub field: FieldSpec,
    pub entries: Vec<(u32, u32, FieldScalar)>,
}

impl SparseSystem {
    pub fn from_scalar(m: &ScalarMatrix) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let v = m.get(r, c);
                if !v.is_zero() {
                    entries.push((r as u32, c as u32, v.clone()));
                }
            }
        }
        SparseSystem {
            rows: m.rows(),
            cols: m.cols(),
            field: m.field().clone(),
            entries,
        }
    }

    pub fn to_mod(&self, emb: &crate::modp::Embedding) -> Option<ModMatrix> {
        let mut m = ModMatrix::zeros(emb.p, self.rows, self.cols);
        for (r, c, v) in &self.entries {
            m.add_to(*r as usize, *c as usize, emb.map(v)?);
        }
        Some(m)
    }

    /// Exact check that `v` lies in the nullspace.
    pub fn annihilates(&self, v: &[FieldScalar]) -> bool {
        let mut acc = vec![FieldScalar::zero(&self.field); self.rows];
        for (r, c, a) in &self.entries {
            let x = &v[*c as usize];
            if !x.is_zero() {
                let cur = &acc[*r as usize];
                acc[*r as usize] = cur + &(a * x);
            }
        }
        acc.iter().all(FieldScalar::is_zero)
    }
}

/// RREF images of a system at one prime, one per embedding.
pub(crate) struct Reference {
    pub img: PrimeImage,
    pub pivots: Vec<usize>,
    pub rrefs: Vec<ModMatrix>,
}

impl Reference {
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.rrefs[0].cols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..is_pivot.len()).filter(|&c| !is_pivot[c]).collect()
    }

    /// Nullspace vector for a free column, under the first embedding.
    pub fn basis_vector(&self, free: usize) -> Vec<u64> {
        let r = &self.rrefs[0];
        let p = r.p;
        let mut v = vec![0u64; r.cols];
        v[free] = 1;
        for (i, &pc) in self.pivots.iter().enumerate() {
            v[pc] = (p - r.get(i, free)) % p;
        }
        v
    }
}

/// Reduces the system at the next usable prime. Primes where the
/// embeddings disagree on the pivot pattern are skipped.
pub(crate) fn next_image(sys: &SparseSystem, stream: &mut PrimeStream) -> Option<Reference> {
    for img in stream.by_ref().take(64) {
        let mut rrefs = Vec::new();
        let mut pivots: Option<Vec<usize>> = None;
        let mut ok = true;
        for e in &img.embeddings {
            let Some(mut m) = sys.to_mod(e) else {
                ok = false;
                break;
            };
            let pv = m.rref();
            if pivots.as_ref().is_some_and(|q| *q != pv) {
                ok = false;
                break;
            }
            pivots = Some(pv);
            rrefs.push(m);
        }
        if ok {
            return Some(Reference {
                img,
                pivots: pivots.unwrap_or_default(),
                rrefs,
            });
        }
    }
    None
}

fn better(a: &[usize], b: &[usize]) -> bool {
    a.len() > b.len() || (a.len() == b.len() && a < b)
}

pub(crate) enum Reconstruction {
    /// Verified vectors and the number of primes used.
    Done(Vec<Vec<FieldScalar>>, usize),
    /// A later prime exposed a larger pivot set; selection must be redone.
    Restart(Reference),
    Exhausted,
}

/// Residues of the selected vectors' pivot entries: per vector, per pivot,
/// the (c0, c1) components.
fn residues(r: &Reference, free: &[usize]) -> Vec<Vec<(u64, u64)>> {
    let p = r.img.p;
    free.iter()
        .map(|&f| {
            (0..r.pivots.len())
                .map(|i| {
                    let vals: Vec<u64> = r.rrefs.iter().map(|m| (p - m.get(i, f)) % p).collect();
                    if vals.len() == 1 {
                        (vals[0], 0)
                    } else {
                        let (r1, r2) = (r.img.embeddings[0].root, r.img.embeddings[1].root);
                        let c1 = mul_mod((vals[0] + p - vals[1]) % p, inv_mod((r1 + p - r2) % p, p), p);
                        let c0 = (vals[0] + p - mul_mod(c1, r1, p)) % p;
                        (c0, c1)
                    }
                })
                .collect()
        })
        .collect()
}

/// Lifts the reference nullspace vectors for the `free` columns to the
/// field, verifying each candidate exactly.
pub(crate) fn reconstruct(
    sys: &SparseSystem,
    reference: &Reference,
    free: &[usize],
    stream: &mut PrimeStream,
    max_primes: usize,
) -> Reconstruction {
    let quadratic = !sys.field.is_rationals();
    let npiv = reference.pivots.len();
    let mut c0 = vec![vec![Crt::default(); npiv]; free.len()];
    let mut c1 = vec![vec![Crt::default(); if quadratic { npiv } else { 0 }]; free.len()];
    fn push(r: &Reference, free: &[usize], c0: &mut [Vec<Crt>], c1: &mut [Vec<Crt>]) {
        for (k, row) in residues(r, free).into_iter().enumerate() {
            for (i, (a, b)) in row.into_iter().enumerate() {
                c0[k][i].push(a, r.img.p);
                if !c1[k].is_empty() {
                    c1[k][i].push(b, r.img.p);
                }
            }
        }
    }
    push(reference, free, &mut c0, &mut c1);
    let mut previous: Option<Vec<Vec<FieldScalar>>> = None;
    let mut used = 1;
    while used < max_primes {
        let Some(next) = next_image(sys, stream) else {
            return Reconstruction::Exhausted;
        };
        if next.pivots != reference.pivots {
            if better(&next.pivots, &reference.pivots) {
                return Reconstruction::Restart(next);
            }
            continue;
        }
        push(&next, free, &mut c0, &mut c1);
        used += 1;
        let Some(candidate) = attempt(&sys.field, reference, free, &c0, &c1) else {
            continue;
        };
        if previous.as_ref() == Some(&candidate)
            && candidate.iter().all(|v| sys.annihilates(v)) {
                return Reconstruction::Done(candidate, used);
            }
        previous = Some(candidate);
    }
    Reconstruction::Exhausted
}

fn attempt(
    field: &FieldSpec,
    reference: &Reference,
    free: &[usize],
    c0: &[Vec<Crt>],
    c1: &[Vec<Crt>],
) -> Option<Vec<Vec<FieldScalar>>> {
    let cols = reference.rrefs[0].cols;
    let lift = |c: &Crt| -> Option<BigRational> {
        if c.value == BigInt::from(0) {
            return Some(BigRational::from_integer(0.into()));
        }
        rational_reconstruct(&c.value, &c.modulus)
    };
    let mut out = Vec::with_capacity(free.len());
    for (k, &f) in free.iter().enumerate() {
        let mut v = vec![FieldScalar::zero(field); cols];
        v[f] = FieldScalar::one(field);
        for (i, &pc) in reference.pivots.iter().enumerate() {
            let a = lift(&c0[k][i])?;
            let b = if c1.is_empty() || c1[k].is_empty() {
                BigRational::from_integer(0.into())
            } else {
                lift(&c1[k][i])?
            };
            v[pc] = FieldScalar::new(field, a, b);
        }
        out.push(v);
    }
    Some(out)
}

/// Nullspace basis of a scalar matrix, one vector per free column of its
/// reduced echelon form (so the basis is the RREF kernel basis).
pub fn nullspace_exact(m: &ScalarMatrix) -> Vec<Vec<FieldScalar>> {
    if m.cols() == 0 {
        return Vec::new();
    }
    let sys = SparseSystem::from_scalar(m);
    let mut stream = PrimeStream::new(m.field());
    let mut reference = next_image(&sys, &mut stream);
    for _ in 0..4 {
        let Some(r) = reference.take() else { break };
        let free = r.free_columns();
        if free.is_empty() {
            return Vec::new();
        }
        match reconstruct(&sys, &r, &free, &mut stream, 200) {
            Reconstruction::Done(vs, _) => return vs,
            Reconstruction::Restart(next) => reference = Some(next),
            Reconstruction::Exhausted => break,
        }
    }
    let (piv, r) = rref_exact(m);
    nullspace_from_exact_rref(&piv, &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn rational_nullspace_matches_exact_rref() {
        let q = FieldSpec::rationals();
        let m = ScalarMatrix::from_ints(
            &q,
            &[vec![3, 1, 4, 1, 5], vec![9, 2, 6, 5, 3], vec![12, 3, 10, 6, 8]],
        );
        let fast = nullspace_exact(&m);
        let (piv, r) = rref_exact(&m);
        assert_eq!(fast, nullspace_from_exact_rref(&piv, &r));
        assert_eq!(fast.len(), 3);
    }

    #[test]
    fn quadratic_nullspace() {
        let g = FieldSpec::golden();
        let t = FieldScalar::generator(&g).unwrap();
        let one = FieldScalar::one(&g);
        let half = FieldScalar::new(&g, BigRational::new(1.into(), 2.into()), BigRational::zero());
        let m = ScalarMatrix::from_rows(
            &g,
            vec![
                vec![one.clone(), t.clone(), &t * &t],
                vec![t.clone(), &t * &t, &(&t * &t) * &t],
                vec![half.clone(), &t + &one, half],
            ],
        )
        .unwrap();
        let fast = nullspace_exact(&m);
        let (piv, r) = rref_exact(&m);
        assert_eq!(fast, nullspace_from_exact_rref(&piv, &r));
        assert_eq!(fast.len(), 1);
    }

    #[test]
    fn full_rank_has_trivial_nullspace() {
        let q = FieldSpec::rationals();
        assert!(nullspace_exact(&ScalarMatrix::identity(&q, 4)).is_empty());
    }
}
