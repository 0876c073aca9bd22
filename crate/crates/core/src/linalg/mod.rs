//! Exact rank and kernel computations for scalar matrices and for matrices
//! of polynomials in the a-block.

mod bareiss;
mod exact;
mod lift;
mod modular;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{sample_integers, task_rng, FieldScalar, DEFAULT_SAMPLE_BOUND};
use crate::error::{Error, Result};
use crate::modp::{mul_mod, pow_mod, Embedding, ModMatrix, PrimeStream};
use crate::poly::SparsePoly;
use crate::FieldSpec;

pub use bareiss::{bareiss_kernel, generic_rank_bareiss};
pub use exact::rref_exact;
pub use lift::{symbolic_kernel, symbolic_kernel_with, KernelMethod, KernelOptions, KernelResult};
pub use modular::nullspace_exact;

/// Default number of random specializations in probabilistic mode.
pub const DEFAULT_TRIALS: u32 = 3;

/// A dense matrix of field scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarMatrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    entries: Vec<FieldScalar>,
}

impl ScalarMatrix {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        ScalarMatrix {
            rows,
            cols,
            field: field.clone(),
            entries: vec![FieldScalar::zero(field); rows * cols],
        }
    }

    pub fn identity(field: &FieldSpec, size: usize) -> Self {
        let mut m = Self::zeros(field, size, size);
        for i in 0..size {
            m.set(i, i, FieldScalar::one(field));
        }
        m
    }

    pub fn from_rows(field: &FieldSpec, rows: Vec<Vec<FieldScalar>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Shape(format!("ragged row of length {} (expected {cols})", r.len())));
            }
            for v in r {
                if v.field() != field {
                    return Err(Error::FieldMismatch);
                }
                entries.push(v);
            }
        }
        Ok(ScalarMatrix {
            rows: nrows,
            cols,
            field: field.clone(),
            entries,
        })
    }

    pub fn from_ints(field: &FieldSpec, rows: &[Vec<i64>]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| FieldScalar::from_int(field, v)).collect())
            .collect();
        Self::from_rows(field, rows).expect("rectangular integer rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldScalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldScalar) {
        assert_eq!(v.field(), &self.field, "entry from another field");
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldScalar] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[FieldScalar]) -> Result<Vec<FieldScalar>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = FieldScalar::zero(&self.field);
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                acc
            })
            .collect())
    }

    /// Image under an embedding, or `None` if some denominator vanishes mod p.
    pub fn to_mod(&self, emb: &Embedding) -> Option<ModMatrix> {
        let mut m = ModMatrix::zeros(emb.p, self.rows, self.cols);
        for (i, v) in self.entries.iter().enumerate() {
            if !v.is_zero() {
                m.data[i] = emb.map(v)? as u32;
            }
        }
        Some(m)
    }
}

/// A matrix of polynomials in the a-block only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    n: usize,
    field: FieldSpec,
    entries: Vec<SparsePoly>,
}

impl PolyMatrix {
    pub fn from_rows(n: usize, field: &FieldSpec, rows: Vec<Vec<SparsePoly>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Shape(format!("ragged row of length {} (expected {cols})", r.len())));
            }
            for v in r {
                if v.n() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: v.n() });
                }
                if v.field() != field {
                    return Err(Error::FieldMismatch);
                }
                if !v.is_pure_a() {
                    return Err(Error::Domain("matrix entry involves x-variables".into()));
                }
                entries.push(v);
            }
        }
        Ok(PolyMatrix {
            rows: nrows,
            cols,
            n,
            field: field.clone(),
            entries,
        })
    }

    /// Parses entries from the polynomial text format, row by row.
    pub fn parse(n: usize, field: &FieldSpec, rows: &[&[&str]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| SparsePoly::parse(n, field, s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(n, field, rows)
    }

    pub fn from_scalar(n: usize, m: &ScalarMatrix) -> Self {
        PolyMatrix {
            rows: m.rows,
            cols: m.cols,
            n,
            field: m.field.clone(),
            entries: m.entries.iter().map(|c| SparsePoly::constant(n, c.clone())).collect(),
        }
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &PolyMatrix) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Shape(format!("cannot stack {} and {} columns", self.cols, other.cols)));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(PolyMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            n: self.n,
            field: self.field.clone(),
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn get(&self, r: usize, c: usize) -> &SparsePoly {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[SparsePoly] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub(crate) fn to_rows(&self) -> Vec<Vec<SparsePoly>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Largest total degree of an entry.
    pub fn max_degree(&self) -> u32 {
        self.entries.iter().filter_map(|e| e.total_degree()).max().unwrap_or(0)
    }

    pub fn evaluate(&self, point: &[FieldScalar]) -> Result<ScalarMatrix> {
        if point.len() != self.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                got: point.len(),
            });
        }
        let x0 = vec![FieldScalar::zero(&self.field); self.n + 1];
        Ok(ScalarMatrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field.clone(),
            entries: self.entries.iter().map(|e| e.evaluate_fully(point, &x0)).collect(),
        })
    }

    /// Specialization at an integer point, reduced through an embedding.
    pub fn eval_mod(&self, emb: &Embedding, point: &[u64]) -> Option<ModMatrix> {
        let mut m = ModMatrix::zeros(emb.p, self.rows, self.cols);
        for (i, e) in self.entries.iter().enumerate() {
            if !e.is_zero() {
                m.data[i] = eval_poly_mod(e, emb, point)? as u32;
            }
        }
        Some(m)
    }

    /// `self · v` computed exactly.
    pub fn mul_vec(&self, v: &[SparsePoly]) -> Result<Vec<SparsePoly>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        (0..self.rows)
            .into_par_iter()
            .map(|r| {
                let mut acc = SparsePoly::zero(self.n, &self.field);
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.checked_add(&a.checked_mul(b)?)?;
                    }
                }
                Ok(acc)
            })
            .collect()
    }
}

/// Value of an a-block polynomial at an integer point under an embedding.
pub fn eval_poly_mod(f: &SparsePoly, emb: &Embedding, point: &[u64]) -> Option<u64> {
    let p = emb.p;
    let mut acc = 0u64;
    for (m, c) in f.terms() {
        let mut t = emb.map(c)?;
        for (&e, &v) in m.a_exp().iter().zip(point) {
            if e > 0 {
                t = mul_mod(t, pow_mod(v % p, e as u64, p), p);
            }
        }
        acc = (acc + t) % p;
    }
    Some(acc)
}

/// How a rank was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankMode {
    ExactSymbolic,
    Probabilistic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub rank: usize,
    pub mode: RankMode,
    pub trials: u32,
    pub seed: Option<u64>,
    /// Pivot positions, or the evaluation points and primes used.
    pub witness: String,
    /// Schwartz-Zippel lower bound on the probability that `rank` is the
    /// generic rank; `None` for exact certificates.
    pub confidence: Option<f64>,
}

/// Rank over the field of a scalar matrix.
pub fn rank_scalar(m: &ScalarMatrix) -> usize {
    let full = m.rows.min(m.cols);
    if full == 0 {
        return 0;
    }
    if let Some(r) = modular_rank(m) {
        if r == full {
            return r;
        }
    }
    m.cols - nullspace_exact(m).len()
}

/// Largest rank over the embeddings of the first prime that maps `m`;
/// a lower bound for the exact rank.
pub(crate) fn modular_rank(m: &ScalarMatrix) -> Option<usize> {
    for img in PrimeStream::new(&m.field).take(8) {
        let ranks: Option<Vec<usize>> =
            img.embeddings.iter().map(|e| m.to_mod(e).map(ModMatrix::rank)).collect();
        if let Some(r) = ranks {
            return r.into_iter().max();
        }
    }
    None
}

/// Exact rank of the specialization of `m` at `point`.
pub fn rank_at_point(m: &PolyMatrix, point: &[FieldScalar]) -> Result<usize> {
    Ok(rank_scalar(&m.evaluate(point)?))
}

/// Rank mod p of the specialization at an integer point: a lower bound for
/// the rank at that point, hence for the generic rank.
pub fn rank_at_point_mod(m: &PolyMatrix, point: &[u64], prime_offset: u64) -> usize {
    for img in PrimeStream::with_offset(&m.field, prime_offset).take(8) {
        let ranks: Option<Vec<usize>> = img
            .embeddings
            .iter()
            .map(|e| m.eval_mod(e, point).map(ModMatrix::rank))
            .collect();
        if let Some(r) = ranks {
            return r.into_iter().max().unwrap_or(0);
        }
    }
    0
}

/// Random integer point for trial `trial` of a seeded run.
pub fn trial_point(n: usize, seed: u64, trial: u64, bound: u64) -> Vec<u64> {
    sample_integers(&mut task_rng(seed, trial), n + 1, bound)
}

/// Maximum specialization rank over `trials` random points mod p.
pub fn generic_rank_probabilistic(m: &PolyMatrix, seed: u64, trials: u32) -> Result<RankCertificate> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let runs: Vec<(usize, Vec<u64>)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let pt = trial_point(m.n, seed, t, DEFAULT_SAMPLE_BOUND);
            (rank_at_point_mod(m, &pt, 2 * t), pt)
        })
        .collect();
    let rank = runs.iter().map(|(r, _)| *r).max().unwrap_or(0);
    let witness = runs
        .iter()
        .enumerate()
        .map(|(t, (r, pt))| format!("trial {t}: rank {r} at a = {pt:?}"))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(RankCertificate {
        rank,
        mode: RankMode::Probabilistic,
        trials,
        seed: Some(seed),
        witness,
        confidence: Some(schwartz_zippel_confidence(rank, m.max_degree(), trials)),
    })
}

/// 1 - (r·δ / S)^trials for a pivot minor of degree at most r·δ sampled
/// from a set of size S ≈ 2^31.
pub fn schwartz_zippel_confidence(rank: usize, degree: u32, trials: u32) -> f64 {
    let miss = (rank as f64 * degree as f64) / DEFAULT_SAMPLE_BOUND as f64;
    1.0 - miss.min(1.0).powi(trials as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    #[test]
    fn scalar_ranks() {
        assert_eq!(rank_scalar(&ScalarMatrix::identity(&q(), 3)), 3);
        assert_eq!(rank_scalar(&ScalarMatrix::zeros(&q(), 3, 4)), 0);
        let m = ScalarMatrix::from_ints(&q(), &[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(rank_scalar(&m), 2);
    }

    #[test]
    fn point_ranks() {
        let m = PolyMatrix::parse(1, &q(), &[&["a0"]]).unwrap();
        let z = FieldScalar::zero(&q());
        let one = FieldScalar::one(&q());
        assert_eq!(rank_at_point(&m, &[z.clone(), z.clone()]).unwrap(), 0);
        assert_eq!(rank_at_point(&m, &[one, z]).unwrap(), 1);
    }

    #[test]
    fn probabilistic_ranks() {
        let d = PolyMatrix::parse(1, &q(), &[&["a0", "0"], &["0", "a1"]]).unwrap();
        let c = generic_rank_probabilistic(&d, 7, DEFAULT_TRIALS).unwrap();
        assert_eq!(c.rank, 2);
        assert_eq!(c.mode, RankMode::Probabilistic);
        assert!(c.confidence.unwrap() > 0.999999);
        let z = PolyMatrix::parse(1, &q(), &[&["0", "0"]]).unwrap();
        assert_eq!(generic_rank_probabilistic(&z, 7, 1).unwrap().rank, 0);
        assert!(generic_rank_probabilistic(&z, 7, 0).is_err());
    }

    #[test]
    fn x_entries_rejected() {
        assert!(PolyMatrix::parse(1, &q(), &[&["x0"]]).is_err());
    }
}
