//! Structure of unexpected forms: multiplicity along the diagonal, the
//! a/x swap symmetry, tangent cones at a point and base loci in x.

use rand::Rng;
use serde::Serialize;

use crate::arith::{task_rng, FieldScalar};
use crate::detector::{detect, extract_form, DetectMode, DetectOptions, UnexpectedForm};
use crate::error::{Error, Result};
use crate::pointsets::{PointSet, ProjectivePoint};
use crate::poly::{exponent_vectors, Block, Monomial, SparsePoly, Var};
use crate::FieldSpec;

/// Multiplicity of F along the diagonal, measured in the chosen block.
pub fn diagonal_multiplicity(f: &SparsePoly, block: Block) -> u32 {
    let g = match block {
        Block::A => f.clone(),
        Block::X => f.swap_blocks(),
    };
    g.diagonal_shift().min_a_degree().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwapRelation {
    Symmetric,
    Antisymmetric,
    Neither,
}

/// Compares F(a,x) with F(x,a). A scalar c with F(x,a) = c·F(a,x) must
/// satisfy c² = 1, so only the sign is reported.
pub fn swap_relation(f: &SparsePoly) -> SwapRelation {
    let Some(c) = f.swap_blocks().proportionality(f) else {
        return SwapRelation::Neither;
    };
    if c.is_one() {
        SwapRelation::Symmetric
    } else if (-&c).is_one() {
        SwapRelation::Antisymmetric
    } else {
        SwapRelation::Neither
    }
}

fn point_values(p: &[FieldScalar], block: fn(usize) -> Var) -> Vec<(Var, FieldScalar)> {
    p.iter().enumerate().map(|(i, c)| (block(i), c.clone())).collect()
}

/// Degree-m tangent cone of the hypersurface H = 0 (H a form in x) at P:
/// the sum over degree-m monomials μ of (μ·H)(P) μ / (μ·μ).
pub fn tangent_cone(h: &SparsePoly, p: &[FieldScalar], m: u32) -> Result<SparsePoly> {
    let n = h.n();
    let field = h.field();
    if !h.is_pure_x() {
        return Err(Error::Domain("tangent cones need a form in x only".into()));
    }
    if p.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            got: p.len(),
        });
    }
    let zero = vec![0u16; n + 1];
    let at = point_values(p, Var::x);
    if m > 0 {
        for mu in exponent_vectors(n + 1, m - 1) {
            let op = Monomial::from_blocks(&zero, &mu);
            if !h.differentiate_by(&op).evaluate(&at).is_zero() {
                return Err(Error::MultiplicityMismatch(format!(
                    "a partial derivative of order {} is nonzero at the point",
                    m - 1
                )));
            }
        }
    }
    let mut cone = SparsePoly::zero(n, field);
    for mu in exponent_vectors(n + 1, m) {
        let op = Monomial::from_blocks(&zero, &mu);
        let value = h.differentiate_by(&op).evaluate(&at);
        if value.is_zero() {
            continue;
        }
        let c = value.leading_coefficient().expect("nonzero constant").clone();
        let factorial: i64 = mu.iter().map(|&e| (1..=e as i64).product::<i64>()).product();
        let c = c.checked_div(&FieldScalar::from_int(field, factorial))?;
        cone = &cone + &SparsePoly::monomial(n, field, op, c);
    }
    if cone.is_zero() {
        return Err(Error::MultiplicityMismatch(format!(
            "every partial derivative of order {m} vanishes at the point"
        )));
    }
    Ok(cone)
}

/// Lowest-order part of H(P + x), with its order. Computed through the
/// diagonal shift, independently of the differential formula.
pub fn taylor_cone(h: &SparsePoly, p: &[FieldScalar]) -> Result<(u32, SparsePoly)> {
    if h.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    // h(x + e) with e in the a-block, then x := P.
    let shifted = h.swap_blocks().diagonal_shift().evaluate(&point_values(p, Var::x));
    let order = shifted.min_a_degree().expect("shift of a nonzero form");
    Ok((order, shifted.a_homogeneous_part(order).swap_blocks()))
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleCheck {
    pub point: Vec<String>,
    /// Tangent cone of F(P, x) = 0 at P is proportional to F(x, P).
    pub matches: bool,
    /// The scalar c with cone = c·F(x, P), when proportional.
    pub ratio: Option<String>,
    /// c equals (-1)^m exactly.
    pub sign_matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub bidegree: (u32, u32),
    pub diag_mult_in_a: u32,
    pub diag_mult_in_x: u32,
    pub swap_relation: SwapRelation,
    pub tangent_cone_match: Option<bool>,
    pub samples: Vec<SampleCheck>,
    pub form: String,
}

pub fn duality_report(f: &UnexpectedForm) -> DualityReport {
    DualityReport {
        bidegree: f.bidegree,
        diag_mult_in_a: diagonal_multiplicity(&f.poly, Block::A),
        diag_mult_in_x: diagonal_multiplicity(&f.poly, Block::X),
        swap_relation: swap_relation(&f.poly),
        tangent_cone_match: None,
        samples: Vec::new(),
        form: f.poly.to_string(),
    }
}

/// `count` seed-derived points with every coordinate a nonzero integer.
pub fn sample_points(n: usize, field: &FieldSpec, seed: u64, count: usize) -> Vec<Vec<FieldScalar>> {
    (0..count as u64)
        .map(|k| {
            let mut rng = task_rng(seed, k);
            (0..=n)
                .map(|_| {
                    let v: i64 = rng.gen_range(1..=12);
                    let v = if rng.gen_bool(0.5) { v } else { -v };
                    FieldScalar::from_int(field, v)
                })
                .collect()
        })
        .collect()
}

/// Checks one specialization a = P of the identity F_P(a,x) = (-1)^m F(x,a).
pub fn check_sample(f: &SparsePoly, p: &[FieldScalar], m: u32) -> Result<SampleCheck> {
    let h = f.evaluate(&point_values(p, Var::a));
    let cone = tangent_cone(&h, p, m)?;
    let dual = f.swap_blocks().evaluate(&point_values(p, Var::a));
    let ratio = cone.proportionality(&dual);
    let sign = FieldScalar::from_int(f.field(), if m.is_multiple_of(2) { 1 } else { -1 });
    Ok(SampleCheck {
        point: p.iter().map(|c| c.to_string()).collect(),
        matches: ratio.is_some(),
        sign_matches: ratio.as_ref() == Some(&sign),
        ratio: ratio.map(|c| c.to_string()),
    })
}

/// Extracts the unique unexpected form for (d, m) and checks the tangent
/// cone identity at each sample point.
pub fn bmss_check(
    z: &PointSet,
    d: u32,
    m: u32,
    samples: &[Vec<FieldScalar>],
    opts: &DetectOptions,
) -> Result<DualityReport> {
    let cell = detect(z, d, m, DetectMode::Hybrid, opts)?;
    if !cell.unexpected {
        return Err(Error::NotUnexpected { d, m });
    }
    if cell.adim != 1 {
        return Err(Error::NonUniqueForm(cell.adim.max(0) as usize));
    }
    let form = extract_form(z, d, m, 1, opts)?.remove(0);
    let mut report = duality_report(&form);
    report.samples = samples
        .iter()
        .map(|p| check_sample(&form.poly, p, m))
        .collect::<Result<Vec<_>>>()?;
    report.tangent_cone_match = Some(report.samples.iter().all(|s| s.matches));
    Ok(report)
}

/// Candidates at which every a-coefficient of F vanishes, so every member
/// of the family F(a, x) passes through them.
pub fn base_locus_check(f: &SparsePoly, candidates: &PointSet) -> Vec<ProjectivePoint> {
    let coefficients: Vec<SparsePoly> = f.a_coefficients().into_values().collect();
    candidates
        .points()
        .iter()
        .filter(|p| {
            let at = point_values(p.coords(), Var::x);
            coefficients.iter().all(|c| c.evaluate(&at).is_zero())
        })
        .cloned()
        .collect()
}
