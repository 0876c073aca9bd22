//! Unexpected hypersurface detection: condition matrices for a point set and
//! a general fat point, expected and actual dimensions, certification, form
//! extraction and grid searches.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{FieldScalar, DEFAULT_SAMPLE_BOUND};
use crate::error::{Error, Result};
use crate::linalg::{
    generic_rank_bareiss, nullspace_exact, rank_at_point_mod, rank_scalar,
    schwartz_zippel_confidence, symbolic_kernel_with, trial_point, KernelMethod, KernelOptions,
    PolyMatrix, ScalarMatrix, DEFAULT_TRIALS,
};
use crate::modp::{ModMatrix, PrimeStream};
use crate::pointsets::PointSet;
use crate::poly::{exponent_vectors, Monomial, SparsePoly, Var};

/// Degree-d monomials in x_0..x_n, largest first in graded lex.
pub fn monomial_basis(n: usize, d: u32) -> Vec<Monomial> {
    let zero = vec![0u16; n + 1];
    exponent_vectors(n + 1, d)
        .into_iter()
        .map(|e| Monomial::from_blocks(&zero, &e))
        .collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// The two blocks of the condition matrix N: point evaluations on top of
/// the order-(m-1) differential conditions at the general point a.
#[derive(Clone, Debug)]
pub struct ConditionMatrix {
    pub n: usize,
    pub d: u32,
    pub m: u32,
    pub md: Vec<Monomial>,
    pub q1: ScalarMatrix,
    pub q2: PolyMatrix,
}

impl ConditionMatrix {
    pub fn n_matrix(&self) -> PolyMatrix {
        PolyMatrix::from_scalar(self.n, &self.q1)
            .vstack(&self.q2)
            .expect("blocks share the basis")
    }

    /// Rank of N specialized at an integer point, reduced mod a prime.
    fn rank_mod(&self, point: &[u64], prime_offset: u64) -> usize {
        for img in PrimeStream::with_offset(self.q1.field(), prime_offset).take(8) {
            let mut best: Option<usize> = None;
            for emb in &img.embeddings {
                let Some(top) = self.q1.to_mod(emb) else {
                    best = None;
                    break;
                };
                let Some(bottom) = self.q2.eval_mod(emb, point) else {
                    best = None;
                    break;
                };
                let mut m = ModMatrix::zeros(emb.p, top.rows + bottom.rows, self.md.len());
                m.data[..top.data.len()].copy_from_slice(&top.data);
                m.data[top.data.len()..].copy_from_slice(&bottom.data);
                let r = m.rank();
                best = Some(best.map_or(r, |b: usize| b.max(r)));
            }
            if let Some(r) = best {
                return r;
            }
        }
        0
    }
}

pub fn build_condition_matrix(z: &PointSet, d: u32, m: u32) -> Result<ConditionMatrix> {
    if m < 1 {
        return Err(Error::InvalidDegrees(format!("multiplicity must be at least 1, got {m}")));
    }
    if d < m {
        return Err(Error::InvalidDegrees(format!("need d >= m, got d = {d}, m = {m}")));
    }
    let n = z.n();
    let field = z.field();
    let md = monomial_basis(n, d);
    let q1_rows = z
        .points()
        .iter()
        .map(|p| {
            md.iter()
                .map(|mono| {
                    let mut acc = FieldScalar::one(field);
                    for (c, &e) in p.coords().iter().zip(mono.x_exp()) {
                        if e > 0 {
                            acc = &acc * &c.pow(e as u32);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let q1 = if z.is_empty() {
        ScalarMatrix::zeros(field, 0, md.len())
    } else {
        ScalarMatrix::from_rows(field, q1_rows)?
    };
    let zero = vec![0u16; n + 1];
    let q2_rows = exponent_vectors(n + 1, m - 1)
        .into_iter()
        .map(|mu| {
            md.iter()
                .map(|b| {
                    let x = b.x_exp();
                    if mu.iter().zip(x).any(|(u, v)| u > v) {
                        return SparsePoly::zero(n, field);
                    }
                    let mut c = 1i64;
                    let mut rest = Vec::with_capacity(n + 1);
                    for (&u, &v) in mu.iter().zip(x) {
                        for k in 0..u {
                            c *= (v - k) as i64;
                        }
                        rest.push(v - u);
                    }
                    SparsePoly::monomial(
                        n,
                        field,
                        Monomial::from_blocks(&rest, &zero),
                        FieldScalar::from_int(field, c),
                    )
                })
                .collect()
        })
        .collect();
    let q2 = PolyMatrix::from_rows(n, field, q2_rows)?;
    Ok(ConditionMatrix { n, d, m, md, q1, q2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectMode {
    Symbolic,
    Probabilistic,
    Hybrid,
}

impl DetectMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "symbolic" => Ok(DetectMode::Symbolic),
            "probabilistic" => Ok(DetectMode::Probabilistic),
            "hybrid" => Ok(DetectMode::Hybrid),
            _ => Err(Error::Domain(format!("unknown mode `{s}`"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DetectMode::Symbolic => "symbolic",
            DetectMode::Probabilistic => "probabilistic",
            DetectMode::Hybrid => "hybrid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    Certified,
    Probabilistic,
}

#[derive(Clone, Debug)]
pub struct DetectOptions {
    pub seed: u64,
    pub trials: u32,
    /// Budget for the kernel lifting used to certify unexpected cells.
    pub max_unknowns: usize,
    /// In symbolic mode, N is also reduced by fraction-free elimination
    /// when it has at most this many entries.
    pub bareiss_max_cells: usize,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            seed: 0,
            trials: DEFAULT_TRIALS,
            max_unknowns: KernelOptions::default().max_unknowns,
            bareiss_max_cells: 600,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionCell {
    pub n: usize,
    pub d: u32,
    pub m: u32,
    pub edim: i64,
    pub adim: i64,
    pub unexpected: bool,
    pub certificate: Certificate,
    pub kernel_dim_claimed: usize,
    pub runtime_ms: f64,
    pub rank_q1: usize,
    pub rank_q2: usize,
    pub rank_n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_method: Option<KernelMethod>,
    /// Lower bound on the probability that a probabilistic verdict is right.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
}

/// Seed used for the random points of one cell.
fn cell_seed(seed: u64, d: u32, m: u32) -> u64 {
    seed ^ ((d as u64) << 40) ^ ((m as u64) << 20)
}

struct Analysis {
    cell: DetectionCell,
    /// Kernel vectors of N in the Md basis, when the cell was certified
    /// unexpected.
    kernel: Option<Vec<Vec<SparsePoly>>>,
}

/// Product Q2·K1 where K1 is given by columns.
fn restrict(q2: &PolyMatrix, k1: &[Vec<FieldScalar>]) -> Result<PolyMatrix> {
    let rows = (0..q2.rows())
        .map(|s| {
            k1.iter()
                .map(|v| {
                    let mut acc = SparsePoly::zero(q2.n(), q2.field());
                    for (e, c) in q2.row(s).iter().zip(v) {
                        if !e.is_zero() && !c.is_zero() {
                            acc = &acc + &e.scale(c);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    PolyMatrix::from_rows(q2.n(), q2.field(), rows)
}

fn analyze(z: &PointSet, d: u32, m: u32, mode: DetectMode, opts: &DetectOptions) -> Result<Analysis> {
    let start = Instant::now();
    if opts.trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let cm = build_condition_matrix(z, d, m)?;
    let n = cm.n;
    let width = cm.md.len();
    let rank_q1 = rank_scalar(&cm.q1);
    let rank_q2 = {
        let rows = cm.q2.rows();
        let pt = trial_point(n, opts.seed, 0, DEFAULT_SAMPLE_BOUND);
        let r = rank_at_point_mod(&cm.q2, &pt, 0);
        if r == rows.min(width) {
            r
        } else {
            generic_rank_bareiss(&cm.q2).rank
        }
    };
    let edim = width as i64 - rank_q1 as i64 - rank_q2 as i64;
    let floor = edim.max(0);

    let seed = cell_seed(opts.seed, d, m);
    let rank_n_lb = (0..opts.trials as u64)
        .into_par_iter()
        .map(|t| cm.rank_mod(&trial_point(n, seed, t, DEFAULT_SAMPLE_BOUND), 2 * t))
        .max()
        .unwrap_or(0);
    let adim_ub = width as i64 - rank_n_lb as i64;

    let mut cell = DetectionCell {
        n,
        d,
        m,
        edim,
        adim: adim_ub,
        unexpected: adim_ub > edim && adim_ub > 0,
        certificate: Certificate::Certified,
        kernel_dim_claimed: adim_ub as usize,
        runtime_ms: 0.0,
        rank_q1,
        rank_q2,
        rank_n: rank_n_lb,
        kernel_method: None,
        confidence: None,
        note: None,
        form: None,
    };
    let mut kernel = None;

    // adim >= max(edim, 0) always holds, so a specialization reaching that
    // value pins the generic rank.
    if adim_ub > floor {
        let degree = d - m + 1;
        cell.confidence = Some(schwartz_zippel_confidence(rank_n_lb, degree, opts.trials));
        cell.certificate = Certificate::Probabilistic;
        if mode != DetectMode::Probabilistic {
            match certify(&cm, rank_q1, adim_ub as usize, opts, seed) {
                Ok((vs, method)) => {
                    cell.certificate = Certificate::Certified;
                    cell.confidence = None;
                    cell.kernel_method = Some(method);
                    kernel = Some(vs);
                }
                Err(Error::Budget(msg)) => cell.note = Some(msg),
                Err(Error::KernelDeficient { wanted, found }) => {
                    cell.note = Some(format!("kernel lifting found {found} of {wanted} vectors"))
                }
                Err(e) => return Err(e),
            }
        }
    }
    if mode == DetectMode::Symbolic {
        let full = cm.n_matrix();
        if full.rows() * full.cols() <= opts.bareiss_max_cells {
            let r = generic_rank_bareiss(&full).rank;
            let exact = width as i64 - r as i64;
            if exact != cell.adim {
                cell.note = Some(format!(
                    "specialization rank {} below generic rank {r}",
                    cell.rank_n
                ));
            }
            cell.adim = exact;
            cell.rank_n = r;
            cell.kernel_dim_claimed = exact.max(0) as usize;
            cell.unexpected = exact > edim && exact > 0;
            cell.certificate = Certificate::Certified;
            cell.confidence = None;
        }
    }
    if cell.certificate == Certificate::Certified && kernel.is_none() {
        cell.rank_n = (width as i64 - cell.adim) as usize;
    }
    cell.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(Analysis { cell, kernel })
}

/// Finds `k` independent kernel vectors of N as K1·w with w in the kernel
/// of Q2·K1, where K1 spans the kernel of Q1.
fn certify(
    cm: &ConditionMatrix,
    rank_q1: usize,
    k: usize,
    opts: &DetectOptions,
    seed: u64,
) -> Result<(Vec<Vec<SparsePoly>>, KernelMethod)> {
    let width = cm.md.len();
    let nullity = width - rank_q1;
    // Kernel vectors of N yield forms whose a-degree is at least m.
    let ansatz = binomial(cm.n as u64 + cm.m as u64, cm.n as u64) as usize;
    if nullity.saturating_mul(ansatz) > opts.max_unknowns {
        return Err(Error::Budget(format!(
            "lifting needs at least {} unknowns (limit {})",
            nullity * ansatz,
            opts.max_unknowns
        )));
    }
    let k1 = if rank_q1 == 0 {
        (0..width)
            .map(|j| {
                let mut v = vec![FieldScalar::zero(cm.q1.field()); width];
                v[j] = FieldScalar::one(cm.q1.field());
                v
            })
            .collect()
    } else {
        nullspace_exact(&cm.q1)
    };
    let p = restrict(&cm.q2, &k1)?;
    let kopts = KernelOptions {
        min_degree: cm.m,
        max_unknowns: opts.max_unknowns,
        bareiss_max_cells: 0,
        seed,
        ..KernelOptions::default()
    };
    let res = symbolic_kernel_with(&p, k, &kopts)?;
    let n = cm.n;
    let field = cm.q1.field();
    let vectors = res
        .vectors
        .iter()
        .map(|w| {
            (0..width)
                .map(|j| {
                    let mut acc = SparsePoly::zero(n, field);
                    for (wi, col) in w.iter().zip(&k1) {
                        let c = &col[j];
                        if !wi.is_zero() && !c.is_zero() {
                            acc = &acc + &wi.scale(c);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok((vectors, res.method))
}

pub fn detect(z: &PointSet, d: u32, m: u32, mode: DetectMode, opts: &DetectOptions) -> Result<DetectionCell> {
    analyze(z, d, m, mode, opts).map(|a| a.cell)
}

/// Degree pairs (d, m) with m <= d, ascending.
pub fn grid(d_range: (u32, u32), m_range: (u32, u32)) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for d in d_range.0..=d_range.1 {
        for m in m_range.0..=m_range.1.min(d) {
            out.push((d, m));
        }
    }
    out
}

/// One cell per (d, m) in the inclusive ranges with m <= d, in ascending
/// order. Cells found in `store` are reused and new ones are appended.
pub fn search(
    z: &PointSet,
    d_range: (u32, u32),
    m_range: (u32, u32),
    mode: DetectMode,
    opts: &DetectOptions,
    store: Option<&ResultStore>,
) -> Result<Vec<DetectionCell>> {
    grid(d_range, m_range)
        .into_par_iter()
        .map(|(d, m)| {
            let key = StoreKey {
                label: z.label().to_string(),
                d,
                m,
                mode,
                seed: opts.seed,
            };
            if let Some(cell) = store.and_then(|s| s.get(&key)) {
                return Ok(cell);
            }
            let cell = detect(z, d, m, mode, opts)?;
            if let Some(s) = store {
                s.put(key, &cell)?;
            }
            Ok(cell)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnexpectedForm {
    pub poly: SparsePoly,
    /// (a-degree, x-degree).
    pub bidegree: (u32, u32),
}

/// `count` independent unexpected forms for the cell, each star-normalized
/// and checked exactly against Z and the fat point.
pub fn extract_form(
    z: &PointSet,
    d: u32,
    m: u32,
    count: usize,
    opts: &DetectOptions,
) -> Result<Vec<UnexpectedForm>> {
    let a = analyze(z, d, m, DetectMode::Hybrid, opts)?;
    if !a.cell.unexpected {
        return Err(Error::NotUnexpected { d, m });
    }
    let available = a.cell.kernel_dim_claimed;
    if count > available {
        return Err(Error::KernelDeficient {
            wanted: count,
            found: available,
        });
    }
    let Some(kernel) = a.kernel else {
        return Err(Error::Budget(
            a.cell.note.unwrap_or_else(|| "kernel certification unavailable".into()),
        ));
    };
    let md = build_condition_matrix(z, d, m)?.md;
    kernel
        .iter()
        .take(count)
        .map(|v| {
            let mut f = SparsePoly::zero(z.n(), z.field());
            for (c, mono) in v.iter().zip(&md) {
                if !c.is_zero() {
                    f = &f + &c.mul_monomial(mono);
                }
            }
            let poly = f.star()?;
            verify_form(z, &poly, m)?;
            let bidegree = poly.bidegree().expect("nonzero form");
            Ok(UnexpectedForm { poly, bidegree })
        })
        .collect()
}

/// Exact checks that F vanishes on Z and has multiplicity at least m in x
/// at x = a.
pub fn verify_form(z: &PointSet, f: &SparsePoly, m: u32) -> Result<()> {
    for p in z.points() {
        let at: Vec<(Var, FieldScalar)> = p
            .coords()
            .iter()
            .enumerate()
            .map(|(i, c)| (Var::x(i), c.clone()))
            .collect();
        if !f.evaluate(&at).is_zero() {
            return Err(Error::Domain(format!("form does not vanish at {p}")));
        }
    }
    let mult = f.swap_blocks().diagonal_shift().min_a_degree().unwrap_or(u32::MAX);
    if mult < m {
        return Err(Error::Domain(format!("form has multiplicity {mult} < {m} at the general point")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StoreKey {
    pub label: String,
    pub d: u32,
    pub m: u32,
    pub mode: DetectMode,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct StoreLine {
    key: StoreKey,
    cell: DetectionCell,
}

/// Append-only JSON-lines cache of finished cells.
pub struct ResultStore {
    path: PathBuf,
    cells: Mutex<HashMap<StoreKey, DetectionCell>>,
    writer: Mutex<File>,
}

impl ResultStore {
    pub fn open(path: &Path) -> Result<Self> {
        let mut cells = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: StoreLine = serde_json::from_str(&line)
                    .map_err(|e| Error::parse(i + 1, e.column(), e.to_string()))?;
                cells.insert(entry.key, entry.cell);
            }
        }
        let writer = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(ResultStore {
            path: path.to_path_buf(),
            cells: Mutex::new(cells),
            writer: Mutex::new(writer),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.cells.lock().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &StoreKey) -> Option<DetectionCell> {
        self.cells.lock().expect("store lock").get(key).cloned()
    }

    pub fn put(&self, key: StoreKey, cell: &DetectionCell) -> Result<()> {
        let line = serde_json::to_string(&StoreLine {
            key: key.clone(),
            cell: cell.clone(),
        })
        .expect("cells serialize");
        {
            let mut w = self.writer.lock().expect("store lock");
            writeln!(w, "{line}")?;
            w.flush()?;
        }
        self.cells.lock().expect("store lock").insert(key, cell.clone());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::{root_system, ProjectivePoint};
    use crate::FieldSpec;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    #[test]
    fn bases() {
        let b = monomial_basis(1, 2);
        let exps: Vec<&[u16]> = b.iter().map(|m| m.x_exp()).collect();
        assert_eq!(exps, vec![&[2, 0][..], &[1, 1], &[0, 2]]);
        assert_eq!(monomial_basis(2, 1).len(), 3);
        assert_eq!(monomial_basis(3, 4).len(), 35);
    }

    #[test]
    fn matrix_shapes() {
        let b3 = root_system("B", 3).unwrap();
        let c = build_condition_matrix(&b3, 4, 3).unwrap();
        assert_eq!((c.q1.rows(), c.q1.cols()), (9, 15));
        assert_eq!((c.q2.rows(), c.q2.cols()), (6, 15));
        let b4 = root_system("B", 4).unwrap();
        let c = build_condition_matrix(&b4, 4, 4).unwrap();
        assert_eq!((c.q1.rows(), c.q1.cols()), (16, 35));
        assert_eq!((c.q2.rows(), c.q2.cols()), (20, 35));
        assert!(build_condition_matrix(&b4, 2, 3).is_err());
    }

    #[test]
    fn single_point_linear() {
        let p = ProjectivePoint::from_ints(&q(), &[1, 0, 0]).unwrap();
        let z = PointSet::new(2, &q(), vec![p], "pt").unwrap();
        let c = build_condition_matrix(&z, 1, 1).unwrap();
        assert_eq!(c.q1.row(0).iter().map(|v| v.as_i64().unwrap()).collect::<Vec<_>>(), vec![1, 0, 0]);
        assert_eq!(c.q2.rows(), 1);
        let row: Vec<String> = c.q2.row(0).iter().map(|e| e.to_string()).collect();
        assert_eq!(row, vec!["a0", "a1", "a2"]);
    }

    #[test]
    fn b3_quartic() {
        let z = root_system("B", 3).unwrap();
        let c = detect(&z, 4, 3, DetectMode::Hybrid, &DetectOptions::default()).unwrap();
        assert_eq!((c.edim, c.adim, c.unexpected), (0, 1, true));
        assert_eq!(c.certificate, Certificate::Certified);
        let forms = extract_form(&z, 4, 3, 1, &DetectOptions::default()).unwrap();
        assert_eq!(forms[0].bidegree.1, 4);
        assert!(matches!(
            extract_form(&z, 4, 3, 2, &DetectOptions::default()),
            Err(Error::KernelDeficient { .. })
        ));
        assert!(matches!(
            extract_form(&z, 3, 3, 1, &DetectOptions::default()),
            Err(Error::NotUnexpected { .. })
        ));
    }

    #[test]
    fn empty_ranges() {
        assert!(grid((2, 6), (3, 2)).is_empty());
        assert_eq!(grid((2, 3), (2, 6)), vec![(2, 2), (3, 2), (3, 3)]);
    }

    #[test]
    fn store_round_trip() {
        let dir = std::env::temp_dir().join(format!("uhyp-store-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cells.jsonl");
        let _ = std::fs::remove_file(&path);
        let z = root_system("B", 3).unwrap();
        let opts = DetectOptions::default();
        {
            let store = ResultStore::open(&path).unwrap();
            search(&z, (2, 4), (2, 4), DetectMode::Hybrid, &opts, Some(&store)).unwrap();
            assert_eq!(store.len(), 6);
        }
        let store = ResultStore::open(&path).unwrap();
        assert_eq!(store.len(), 6);
        let key = StoreKey {
            label: z.label().into(),
            d: 4,
            m: 3,
            mode: DetectMode::Hybrid,
            seed: 0,
        };
        assert!(store.get(&key).unwrap().unexpected);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
