//! Kernel vectors of polynomial matrices by degree-bounded lifting.
//!
//! For s = 0, 1, ... the equation M(a)·w(a) = 0 with w of a-degree s is a
//! linear system over K in the coefficients of w. It is solved modulo
//! primes, a subset of the solutions that stays independent over K(a) is
//! chosen at a random point, and those solutions are lifted by Chinese
//! remaindering and rational reconstruction and then verified exactly.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::bareiss::bareiss_kernel;
use super::modular::{next_image, reconstruct, Reconstruction, Reference, SparseSystem};
use super::{eval_poly_mod, rank_at_point_mod, trial_point, PolyMatrix};
use crate::arith::{FieldScalar, DEFAULT_SAMPLE_BOUND};
use crate::error::{Error, Result};
use crate::modp::{inv_mod, mul_mod, pow_mod, ModMatrix, PrimeStream};
use crate::poly::{exponent_vectors, Monomial, SparsePoly};

#[derive(Clone, Debug)]
pub struct KernelOptions {
    /// First ansatz degree tried.
    pub min_degree: u32,
    pub max_degree: u32,
    /// Largest linear system (in unknowns) the lifting will build.
    pub max_unknowns: usize,
    /// Matrices with at most this many entries go through Bareiss instead.
    pub bareiss_max_cells: usize,
    pub seed: u64,
    pub max_primes: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            min_degree: 0,
            max_degree: 64,
            max_unknowns: 4000,
            bareiss_max_cells: 400,
            seed: 0,
            max_primes: 400,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum KernelMethod {
    Bareiss,
    Lifting { degree: u32, unknowns: usize, primes: usize },
}

#[derive(Clone, Debug)]
pub struct KernelResult {
    pub vectors: Vec<Vec<SparsePoly>>,
    pub method: KernelMethod,
    /// Coordinates whose k×k minor is nonzero at `witness_point` mod
    /// `witness_prime`, proving independence over K(a).
    pub witness_rows: Vec<usize>,
    pub witness_point: Vec<u64>,
    pub witness_prime: u64,
}

/// `k` kernel vectors, independent over K(a), verified exactly.
pub fn symbolic_kernel(m: &PolyMatrix, k: usize) -> Result<Vec<Vec<SparsePoly>>> {
    symbolic_kernel_with(m, k, &KernelOptions::default()).map(|r| r.vectors)
}

pub fn symbolic_kernel_with(m: &PolyMatrix, k: usize, opts: &KernelOptions) -> Result<KernelResult> {
    if k == 0 {
        return Err(Error::Domain("kernel size must be at least 1".into()));
    }
    let (vectors, method) = if m.rows() * m.cols() <= opts.bareiss_max_cells {
        let mut all = bareiss_kernel(m);
        if all.len() < k {
            return Err(Error::KernelDeficient {
                wanted: k,
                found: all.len(),
            });
        }
        all.truncate(k);
        (all, KernelMethod::Bareiss)
    } else {
        lift(m, k, opts)?
    };
    for v in &vectors {
        if !m.mul_vec(v)?.iter().all(SparsePoly::is_zero) {
            return Err(Error::Domain("kernel vector failed exact verification".into()));
        }
    }
    let (witness_rows, witness_point, witness_prime) = independence_witness(m, &vectors, opts.seed)?;
    Ok(KernelResult {
        vectors,
        method,
        witness_rows,
        witness_point,
        witness_prime,
    })
}

/// Finds coordinates with a nonzero k×k minor at a random point mod p.
fn independence_witness(m: &PolyMatrix, vs: &[Vec<SparsePoly>], seed: u64) -> Result<(Vec<usize>, Vec<u64>, u64)> {
    for trial in 0..6u64 {
        let pt = trial_point(m.n(), seed ^ 0x5eed, trial, DEFAULT_SAMPLE_BOUND);
        let Some(img) = PrimeStream::with_offset(m.field(), 1000 + 2 * trial).next() else {
            break;
        };
        let emb = img.embeddings[0];
        let mut mm = ModMatrix::zeros(emb.p, vs.len(), m.cols());
        let mut ok = true;
        for (i, v) in vs.iter().enumerate() {
            for (j, e) in v.iter().enumerate() {
                match eval_poly_mod(e, &emb, &pt) {
                    Some(x) => mm.set(i, j, x),
                    None => ok = false,
                }
            }
        }
        if !ok {
            continue;
        }
        let piv = mm.rref();
        if piv.len() == vs.len() {
            return Ok((piv, pt, emb.p));
        }
    }
    Err(Error::KernelDeficient {
        wanted: vs.len(),
        found: 0,
    })
}

/// Degree of every term in each row if the row is homogeneous.
fn row_degrees(m: &PolyMatrix) -> Option<Vec<u32>> {
    (0..m.rows())
        .map(|r| {
            let mut deg = None;
            for e in m.row(r) {
                for (mono, _) in e.terms() {
                    let d = mono.bidegree().0;
                    if *deg.get_or_insert(d) != d {
                        return None;
                    }
                }
            }
            Some(deg.unwrap_or(0))
        })
        .collect()
}

fn ansatz(nvars: usize, s: u32, homogeneous: bool) -> Vec<Vec<u16>> {
    if homogeneous {
        exponent_vectors(nvars, s)
    } else {
        (0..=s).flat_map(|d| exponent_vectors(nvars, d)).collect()
    }
}

fn build_system(m: &PolyMatrix, monos: &[Vec<u16>]) -> SparseSystem {
    let na = monos.len();
    let mut entries = Vec::new();
    let mut eq_count = 0u32;
    for r in 0..m.rows() {
        let mut eqs: HashMap<Vec<u16>, u32> = HashMap::new();
        for (j, e) in m.row(r).iter().enumerate() {
            for (beta, c) in e.terms() {
                for (ai, alpha) in monos.iter().enumerate() {
                    let gamma: Vec<u16> = alpha.iter().zip(beta.a_exp()).map(|(x, y)| x + y).collect();
                    let eq = *eqs.entry(gamma).or_insert_with(|| {
                        eq_count += 1;
                        eq_count - 1
                    });
                    entries.push((eq, (j * na + ai) as u32, c.clone()));
                }
            }
        }
    }
    SparseSystem {
        rows: eq_count as usize,
        cols: m.cols() * na,
        field: m.field().clone(),
        entries,
    }
}

/// Greedily picks free columns whose solutions are independent at `pt`.
fn select(reference: &Reference, monos: &[Vec<u16>], cols: usize, pt: &[u64], k: usize) -> Vec<usize> {
    let p = reference.img.p;
    let mono_vals: Vec<u64> = monos
        .iter()
        .map(|al| {
            al.iter()
                .zip(pt)
                .fold(1u64, |acc, (&e, &v)| mul_mod(acc, pow_mod(v % p, e as u64, p), p))
        })
        .collect();
    let na = monos.len();
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for f in reference.free_columns() {
        let sol = reference.basis_vector(f);
        let mut w: Vec<u64> = (0..cols)
            .map(|j| {
                (0..na).fold(0u64, |acc, ai| (acc + mul_mod(sol[j * na + ai], mono_vals[ai], p)) % p)
            })
            .collect();
        for (pc, b) in &basis {
            let f = w[*pc];
            if f != 0 {
                for (x, y) in w.iter_mut().zip(b) {
                    *x = (*x + p - mul_mod(f, *y, p)) % p;
                }
            }
        }
        if let Some(pc) = w.iter().position(|&x| x != 0) {
            let inv = inv_mod(w[pc], p);
            for x in w.iter_mut() {
                *x = mul_mod(*x, inv, p);
            }
            basis.push((pc, w));
            chosen.push(f);
            if chosen.len() == k {
                break;
            }
        }
    }
    chosen
}

fn to_vectors(m: &PolyMatrix, monos: &[Vec<u16>], sols: Vec<Vec<FieldScalar>>) -> Vec<Vec<SparsePoly>> {
    let na = monos.len();
    let zero_x = vec![0u16; m.n() + 1];
    sols.into_iter()
        .map(|sol| {
            (0..m.cols())
                .map(|j| {
                    SparsePoly::from_terms(
                        m.n(),
                        m.field(),
                        (0..na).map(|ai| (Monomial::from_blocks(&monos[ai], &zero_x), sol[j * na + ai].clone())),
                    )
                })
                .collect()
        })
        .collect()
}

fn lift(m: &PolyMatrix, k: usize, opts: &KernelOptions) -> Result<(Vec<Vec<SparsePoly>>, KernelMethod)> {
    let nvars = m.n() + 1;
    let pt0 = trial_point(m.n(), opts.seed, 0, DEFAULT_SAMPLE_BOUND);
    let nullity_bound = m.cols() - rank_at_point_mod(m, &pt0, 0);
    if nullity_bound < k {
        return Err(Error::KernelDeficient {
            wanted: k,
            found: nullity_bound,
        });
    }
    let homogeneous = row_degrees(m).is_some();
    let pt = trial_point(m.n(), opts.seed, 1, DEFAULT_SAMPLE_BOUND);
    let mut best = 0;
    for s in opts.min_degree..=opts.max_degree {
        let monos = ansatz(nvars, s, homogeneous);
        let unknowns = m.cols() * monos.len();
        if unknowns > opts.max_unknowns {
            return Err(Error::Budget(format!(
                "kernel ansatz of degree {s} needs {unknowns} unknowns (cap {}); {best} of {k} vectors found below it",
                opts.max_unknowns
            )));
        }
        let sys = build_system(m, &monos);
        let mut stream = PrimeStream::new(m.field());
        let mut reference = next_image(&sys, &mut stream);
        for _ in 0..4 {
            let Some(r) = reference.take() else { break };
            let chosen = select(&r, &monos, m.cols(), &pt, k);
            best = best.max(chosen.len());
            if chosen.len() < k {
                break;
            }
            match reconstruct(&sys, &r, &chosen, &mut stream, opts.max_primes) {
                Reconstruction::Done(sols, primes) => {
                    return Ok((
                        to_vectors(m, &monos, sols),
                        KernelMethod::Lifting {
                            degree: s,
                            unknowns,
                            primes,
                        },
                    ));
                }
                Reconstruction::Restart(next) => reference = Some(next),
                Reconstruction::Exhausted => {
                    return Err(Error::Budget(format!(
                        "rational reconstruction did not stabilize within {} primes",
                        opts.max_primes
                    )))
                }
            }
        }
    }
    Err(Error::KernelDeficient { wanted: k, found: best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FieldSpec;

    fn forced_lifting() -> KernelOptions {
        KernelOptions {
            bareiss_max_cells: 0,
            ..KernelOptions::default()
        }
    }

    #[test]
    fn row_kernel_by_lifting() {
        let q = FieldSpec::rationals();
        let m = PolyMatrix::parse(1, &q, &[&["a0", "a1"]]).unwrap();
        let r = symbolic_kernel_with(&m, 1, &forced_lifting()).unwrap();
        assert!(matches!(r.method, KernelMethod::Lifting { degree: 1, unknowns: 4, .. }));
        let v = &r.vectors[0];
        let a0 = SparsePoly::parse(1, &q, "a0").unwrap();
        let a1 = SparsePoly::parse(1, &q, "a1").unwrap();
        let c = v[0].proportionality(&a1).unwrap();
        assert_eq!(v[1], (-&a0).scale(&c));
    }

    #[test]
    fn identity_is_kernel_deficient() {
        let q = FieldSpec::rationals();
        let m = PolyMatrix::parse(1, &q, &[&["1", "0"], &["0", "1"]]).unwrap();
        assert!(matches!(symbolic_kernel(&m, 1), Err(Error::KernelDeficient { .. })));
        assert!(matches!(
            symbolic_kernel_with(&m, 1, &forced_lifting()),
            Err(Error::KernelDeficient { .. })
        ));
    }

    #[test]
    fn lifting_agrees_with_bareiss_on_span() {
        let f = FieldSpec::golden();
        let m = PolyMatrix::parse(
            2,
            &f,
            &[
                &["a0", "a1", "t*a2", "a0 + a1", "0"],
                &["a1", "a2", "a0", "0", "((2)+(1)t)*a1"],
                &["a0 + a1", "a1 + a2", "a0 + t*a2", "a0 + a1", "((2)+(1)t)*a1"],
            ],
        )
        .unwrap();
        let lifted = symbolic_kernel_with(&m, 3, &forced_lifting()).unwrap();
        assert_eq!(lifted.witness_rows.len(), 3);
        let exact = bareiss_kernel(&m);
        assert_eq!(exact.len(), 3);
        for v in lifted.vectors.iter().chain(&exact) {
            assert!(m.mul_vec(v).unwrap().iter().all(SparsePoly::is_zero));
        }
        assert!(symbolic_kernel_with(&m, 4, &forced_lifting()).is_err());
    }
}
