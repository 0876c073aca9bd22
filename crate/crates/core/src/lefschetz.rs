//! Lefschetz properties of R/(L_1^d, ..., L_r^d) for linear forms L_i, and
//! the correspondence between failures of maximal rank and unexpected
//! hypersurfaces for the dual points.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::arith::{task_rng, FieldScalar};
use crate::detector::{detect, DetectMode, DetectOptions};
use crate::error::{Error, Result};
use crate::linalg::{rank_scalar, ScalarMatrix};
use crate::pointsets::PointSet;
use crate::poly::exponent_vectors;
use crate::FieldSpec;

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Linear forms given by coefficient vectors, all raised to one exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerIdealSpec {
    n: usize,
    field: FieldSpec,
    forms: Vec<Vec<FieldScalar>>,
    exponent: u32,
}

fn proportional(u: &[FieldScalar], v: &[FieldScalar]) -> bool {
    (0..u.len()).all(|i| (i..u.len()).all(|j| &u[i] * &v[j] == &u[j] * &v[i]))
}

impl PowerIdealSpec {
    pub fn new(n: usize, field: &FieldSpec, forms: Vec<Vec<FieldScalar>>, exponent: u32) -> Result<Self> {
        for f in &forms {
            if f.len() != n + 1 {
                return Err(Error::DimensionMismatch {
                    expected: n + 1,
                    got: f.len().saturating_sub(1),
                });
            }
            if f.iter().all(FieldScalar::is_zero) {
                return Err(Error::Domain("zero linear form".into()));
            }
        }
        for (i, f) in forms.iter().enumerate() {
            if forms[..i].iter().any(|g| proportional(f, g)) {
                return Err(Error::Domain(format!("form {i} is proportional to an earlier one")));
            }
        }
        Ok(PowerIdealSpec {
            n,
            field: field.clone(),
            forms,
            exponent,
        })
    }

    /// The forms dual to the points of Z.
    pub fn dual_to(z: &PointSet, exponent: u32) -> Result<Self> {
        let forms = z.points().iter().map(|p| p.coords().to_vec()).collect();
        Self::new(z.n(), z.field(), forms, exponent)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn forms(&self) -> &[Vec<FieldScalar>] {
        &self.forms
    }
}

/// Coefficients of L^e, keyed by exponent vector.
fn power_of_form(l: &[FieldScalar], e: u32, field: &FieldSpec) -> Vec<(Vec<u16>, FieldScalar)> {
    exponent_vectors(l.len(), e)
        .into_iter()
        .filter_map(|alpha| {
            // multinomial e! / prod alpha_i!
            let mut coef = FieldScalar::one(field);
            let mut rest = e as u64;
            for (&a, c) in alpha.iter().zip(l) {
                if a > 0 {
                    if c.is_zero() {
                        return None;
                    }
                    coef = &coef * &c.pow(a as u32);
                    coef = &coef * &FieldScalar::from_int(field, binomial(rest, a as u64) as i64);
                }
                rest -= a as u64;
            }
            Some((alpha, coef))
        })
        .collect()
}

/// Rows `μ·L^e` over all monomials μ of degree `j - e`, in the degree-j
/// monomial basis.
fn multiples(
    forms: &[Vec<(Vec<u16>, FieldScalar)>],
    e: u32,
    j: u32,
    nvars: usize,
    field: &FieldSpec,
) -> Vec<Vec<FieldScalar>> {
    if j < e {
        return Vec::new();
    }
    let basis = exponent_vectors(nvars, j);
    let index: HashMap<&[u16], usize> = basis.iter().enumerate().map(|(i, b)| (b.as_slice(), i)).collect();
    let mut rows = Vec::new();
    for mu in exponent_vectors(nvars, j - e) {
        for f in forms {
            let mut row = vec![FieldScalar::zero(field); basis.len()];
            for (alpha, c) in f {
                let sum: Vec<u16> = alpha.iter().zip(&mu).map(|(a, b)| a + b).collect();
                row[index[sum.as_slice()]] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

fn rank_of(rows: Vec<Vec<FieldScalar>>, field: &FieldSpec) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rank_scalar(&ScalarMatrix::from_rows(field, rows).expect("rectangular"))
}

fn ideal_rows(spec: &PowerIdealSpec, j: u32) -> Vec<Vec<FieldScalar>> {
    let powers: Vec<_> = spec
        .forms
        .iter()
        .map(|l| power_of_form(l, spec.exponent, &spec.field))
        .collect();
    multiples(&powers, spec.exponent, j, spec.n + 1, &spec.field)
}

/// Dimension of the degree-j part of the ideal.
pub fn power_ideal_dim(spec: &PowerIdealSpec, j: u32) -> usize {
    rank_of(ideal_rows(spec, j), &spec.field)
}

/// Maximal-rank data for ×L^k : [R/I]_i → [R/I]_{i+k}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LefschetzVerdict {
    pub degree: u32,
    pub range: u32,
    pub dim_source: usize,
    pub dim_target: usize,
    pub map_rank: usize,
    pub fails: bool,
}

pub fn multiplication_map_rank(spec: &PowerIdealSpec, l: &[FieldScalar], e: u32, i: u32) -> Result<LefschetzVerdict> {
    if e == 0 {
        return Err(Error::Domain("range must be at least 1".into()));
    }
    if l.len() != spec.n + 1 {
        return Err(Error::DimensionMismatch {
            expected: spec.n + 1,
            got: l.len().saturating_sub(1),
        });
    }
    let nvars = spec.n + 1;
    let field = &spec.field;
    let src_ideal = power_ideal_dim(spec, i);
    let target_rows = ideal_rows(spec, i + e);
    let target_ideal = rank_of(target_rows.clone(), field);
    let dim_source = binomial((spec.n as u32 + i) as u64, spec.n as u64) as usize - src_ideal;
    let dim_target = binomial((spec.n as u32 + i + e) as u64, spec.n as u64) as usize - target_ideal;
    let mut rows = target_rows;
    rows.extend(multiples(&[power_of_form(l, e, field)], e, i + e, nvars, field));
    let map_rank = rank_of(rows, field) - target_ideal;
    Ok(LefschetzVerdict {
        degree: i,
        range: e,
        dim_source,
        dim_target,
        map_rank,
        fails: map_rank < dim_source.min(dim_target),
    })
}

const SMALL_PRIMES: [i64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// A linear form with distinct prime coefficients, chosen from the seed.
pub fn general_form(n: usize, field: &FieldSpec, seed: u64) -> Vec<FieldScalar> {
    let mut primes = SMALL_PRIMES.to_vec();
    let mut rng = task_rng(seed, 0x4c);
    primes.shuffle(&mut rng);
    let mut out: Vec<FieldScalar> = primes
        .iter()
        .take(n + 1)
        .map(|&p| FieldScalar::from_int(field, p))
        .collect();
    // Past 25 variables, fall back to larger distinct integers.
    for k in out.len()..=n {
        out.push(FieldScalar::from_int(field, 101 + 2 * k as i64));
    }
    out
}

/// Maximal-rank test with two independent general forms; disagreement is
/// reported rather than guessed.
pub fn lefschetz_check(spec: &PowerIdealSpec, e: u32, i: u32, seed: u64) -> Result<LefschetzVerdict> {
    let first = multiplication_map_rank(spec, &general_form(spec.n, &spec.field, seed), e, i)?;
    let second = multiplication_map_rank(
        spec,
        &general_form(spec.n, &spec.field, seed.wrapping_add(0x9e37_79b9)),
        e,
        i,
    )?;
    if first.fails != second.fails {
        return Err(Error::UnreliableSample(format!(
            "ranks {} and {} for ×L^{e} in degree {i}",
            first.map_rank, second.map_rank
        )));
    }
    // Maximal rank is generic, so the larger rank is the right one.
    Ok(if first.map_rank >= second.map_rank { first } else { second })
}

/// ×L^(d-m+1) from degree m-1 to degree d on R/(L_1^d, ..., L_r^d) with L_i
/// dual to Z.
pub fn slp_check(z: &PointSet, d: u32, m: u32, seed: u64) -> Result<LefschetzVerdict> {
    if m < 2 || d < m {
        return Err(Error::InvalidDegrees(format!("need d >= m >= 2, got d = {d}, m = {m}")));
    }
    let spec = PowerIdealSpec::dual_to(z, d)?;
    lefschetz_check(&spec, d - m + 1, m - 1, seed)
}

/// The shared verdict of the SLP test and the detector; an error if they
/// disagree.
pub fn equivalence_test(z: &PointSet, d: u32, m: u32, seed: u64, opts: &DetectOptions) -> Result<bool> {
    let slp = slp_check(z, d, m, seed)?;
    let cell = detect(z, d, m, DetectMode::Hybrid, opts)?;
    if slp.fails != cell.unexpected {
        return Err(Error::EquivalenceViolation {
            d,
            m,
            slp_fails: slp.fails,
            unexpected: cell.unexpected,
        });
    }
    Ok(cell.unexpected)
}

/// Number of points needed on a degree-k codimension-two variety in P^n
/// for the WLP failure construction.
pub fn expected_count_f(n: u32, k: u32) -> Result<i64> {
    if n < 4 || k < 3 {
        return Err(Error::Domain(format!("need n >= 4 and k >= 3, got n = {n}, k = {k}")));
    }
    let b = |a: u32, c: u32| binomial(a as u64, c as u64) as i64;
    Ok(if k.is_multiple_of(2) {
        b(n + k, n) - b(n + k - 2, n) - b(n + k / 2, n) + b(n - 2 + k / 2, n)
    } else {
        b(n + k, n) - b(n + k - 2, n) - 2 * b(n + (k - 1) / 2, n) + 2 * b(n + (k - 3) / 2, n - 1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::root_system;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn forms(rows: &[&[i64]]) -> Vec<Vec<FieldScalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&c| FieldScalar::from_int(&q(), c)).collect())
            .collect()
    }

    #[test]
    fn ideal_dimensions() {
        let one = PowerIdealSpec::new(1, &q(), forms(&[&[1, 0]]), 2).unwrap();
        assert_eq!(power_ideal_dim(&one, 1), 0);
        assert_eq!(power_ideal_dim(&one, 2), 1);
        let two = PowerIdealSpec::new(1, &q(), forms(&[&[1, 0], &[0, 1]]), 1).unwrap();
        assert_eq!(power_ideal_dim(&two, 1), 2);
        assert!(PowerIdealSpec::new(1, &q(), forms(&[&[1, 2], &[2, 4]]), 1).is_err());
    }

    #[test]
    fn empty_ideal_is_full_rank() {
        let spec = PowerIdealSpec::new(2, &q(), Vec::new(), 3).unwrap();
        let l = general_form(2, &q(), 1);
        for (e, i) in [(1, 0), (1, 2), (2, 1), (3, 3)] {
            let v = multiplication_map_rank(&spec, &l, e, i).unwrap();
            assert_eq!(v.map_rank, v.dim_source);
            assert!(!v.fails);
        }
    }

    #[test]
    fn f_values() {
        assert_eq!(expected_count_f(4, 4).unwrap(), 41);
        assert_eq!(expected_count_f(4, 3).unwrap(), 28);
        assert!(expected_count_f(3, 4).is_err());
        assert!(expected_count_f(4, 2).is_err());
    }

    #[test]
    fn b3_slp_failure() {
        let z = root_system("B", 3).unwrap();
        assert!(slp_check(&z, 4, 3, 7).unwrap().fails);
        assert!(equivalence_test(&z, 4, 3, 7, &DetectOptions::default()).unwrap());
        assert!(!equivalence_test(&z, 4, 4, 7, &DetectOptions::default()).unwrap());
    }

    #[test]
    fn macaulay_duality() {
        let z = root_system("D", 4).unwrap();
        for d in 2..=4 {
            let spec = PowerIdealSpec::dual_to(&z, d).unwrap();
            let q1 = crate::detector::build_condition_matrix(&z, d, 1).unwrap().q1;
            assert_eq!(power_ideal_dim(&spec, d), rank_scalar(&q1));
        }
    }
}
