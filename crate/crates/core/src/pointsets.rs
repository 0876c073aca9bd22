//! Point configurations: projectivized root systems, the dual points of a
//! Fermat-type arrangement, points on a twisted cubic, and file I/O.

use std::fmt;
use std::path::Path;

use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{task_rng, FieldScalar};
use crate::error::{Error, Result};
use crate::poly::{SparsePoly, Var};
use crate::FieldSpec;

const E8: &str = include_str!("../data/e8.txt");
const F4: &str = include_str!("../data/f4.txt");
const H3: &str = include_str!("../data/h3.txt");
const H4: &str = include_str!("../data/h4.txt");

/// A point of projective space, stored scaled so its first nonzero
/// coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    coords: Vec<FieldScalar>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<FieldScalar>) -> Result<Self> {
        let lead = coords
            .iter()
            .find(|c| !c.is_zero())
            .ok_or_else(|| Error::Domain("projective point with all coordinates zero".into()))?;
        let field = lead.field().clone();
        if coords.iter().any(|c| c.field() != &field) {
            return Err(Error::FieldMismatch);
        }
        let inv = lead.inv()?;
        Ok(ProjectivePoint {
            coords: coords.iter().map(|c| c * &inv).collect(),
        })
    }

    pub fn from_ints(field: &FieldSpec, coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| FieldScalar::from_int(field, c)).collect())
    }

    pub fn coords(&self) -> &[FieldScalar] {
        &self.coords
    }

    /// Projective dimension.
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn field(&self) -> &FieldSpec {
        self.coords[0].field()
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

/// A finite set of distinct points in P^n over one field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    n: usize,
    field: FieldSpec,
    points: Vec<ProjectivePoint>,
    label: String,
}

impl PointSet {
    /// Builds a set, dropping repeated points (first occurrence wins).
    pub fn new(n: usize, field: &FieldSpec, points: Vec<ProjectivePoint>, label: impl Into<String>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut kept = Vec::with_capacity(points.len());
        for p in points {
            if p.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.n() });
            }
            if p.field() != field {
                return Err(Error::FieldMismatch);
            }
            if seen.insert(p.clone()) {
                kept.push(p);
            }
        }
        Ok(PointSet {
            n,
            field: field.clone(),
            points: kept,
            label: label.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, p: &ProjectivePoint) -> bool {
        self.points.contains(p)
    }
}

/// Evaluates the coordinate syntax of the transcribed point lists:
/// integers, `t`, `+ - * ^` and parentheses.
fn eval_coordinate(field: &FieldSpec, s: &str) -> std::result::Result<FieldScalar, String> {
    struct P<'a> {
        s: &'a [u8],
        i: usize,
        f: &'a FieldSpec,
    }
    impl P<'_> {
        fn peek(&self) -> Option<u8> {
            self.s.get(self.i).copied()
        }
        fn expr(&mut self) -> std::result::Result<FieldScalar, String> {
            let mut acc = self.term()?;
            while let Some(c @ (b'+' | b'-')) = self.peek() {
                self.i += 1;
                let rhs = self.term()?;
                acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
            }
            Ok(acc)
        }
        fn term(&mut self) -> std::result::Result<FieldScalar, String> {
            let mut acc = self.factor()?;
            while self.peek() == Some(b'*') {
                self.i += 1;
                acc = &acc * &self.factor()?;
            }
            Ok(acc)
        }
        fn factor(&mut self) -> std::result::Result<FieldScalar, String> {
            match self.peek() {
                Some(b'-') => {
                    self.i += 1;
                    Ok(-self.factor()?)
                }
                Some(b'+') => {
                    self.i += 1;
                    self.factor()
                }
                _ => {
                    let base = self.primary()?;
                    if self.peek() == Some(b'^') {
                        self.i += 1;
                        let start = self.i;
                        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                            self.i += 1;
                        }
                        let e: u32 = std::str::from_utf8(&self.s[start..self.i])
                            .unwrap()
                            .parse()
                            .map_err(|_| "bad exponent".to_string())?;
                        Ok(base.pow(e))
                    } else {
                        Ok(base)
                    }
                }
            }
        }
        fn primary(&mut self) -> std::result::Result<FieldScalar, String> {
            match self.peek() {
                Some(b'(') => {
                    self.i += 1;
                    let v = self.expr()?;
                    if self.peek() != Some(b')') {
                        return Err("missing ')'".into());
                    }
                    self.i += 1;
                    Ok(v)
                }
                Some(b't') => {
                    self.i += 1;
                    FieldScalar::generator(self.f).map_err(|e| e.to_string())
                }
                Some(c) if c.is_ascii_digit() => {
                    let start = self.i;
                    while self.peek().is_some_and(|c| c.is_ascii_digit() || c == b'/') {
                        self.i += 1;
                    }
                    let txt = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                    Ok(FieldScalar::from_rational(self.f, crate::arith::parse_rational(txt)?))
                }
                other => Err(format!("unexpected {:?}", other.map(|c| c as char))),
            }
        }
    }
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = P {
        s: compact.as_bytes(),
        i: 0,
        f: field,
    };
    let v = p.expr()?;
    if p.i != compact.len() {
        return Err(format!("trailing input in {s:?}"));
    }
    Ok(v)
}

fn parse_list(field: &FieldSpec, text: &str) -> Vec<Vec<FieldScalar>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(',')
                .map(|c| eval_coordinate(field, c).expect("embedded point list is well formed"))
                .collect()
        })
        .collect()
}

fn from_vectors(field: &FieldSpec, vecs: Vec<Vec<FieldScalar>>, label: &str) -> PointSet {
    let n = vecs[0].len() - 1;
    let pts = vecs
        .into_iter()
        .map(|v| ProjectivePoint::new(v).expect("root vectors are nonzero"))
        .collect();
    PointSet::new(n, field, pts, label).expect("consistent root vectors")
}

fn unit(len: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; len];
    v[i] = 1;
    v
}

fn integer_roots(len: usize, singles: bool) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    if singles {
        out.extend((0..len).map(|i| unit(len, i)));
    }
    for i in 0..len {
        for j in i + 1..len {
            for s in [1, -1] {
                let mut v = unit(len, i);
                v[j] = s;
                out.push(v);
            }
        }
    }
    out
}

fn ints(field: &FieldSpec, vecs: Vec<Vec<i64>>) -> Vec<Vec<FieldScalar>> {
    vecs.into_iter()
        .map(|v| v.into_iter().map(|c| FieldScalar::from_int(field, c)).collect())
        .collect()
}

/// Keeps vectors whose first two coordinates agree, then drops the first.
fn restrict_e(vecs: Vec<Vec<FieldScalar>>) -> Vec<Vec<FieldScalar>> {
    vecs.into_iter().filter(|v| v[0] == v[1]).map(|v| v[1..].to_vec()).collect()
}

/// The projectivized root system `name` of the given rank, as points of
/// P^(rank-1). `C` is accepted and gives the same points as `B`.
pub fn root_system(name: &str, rank: u32) -> Result<PointSet> {
    let q = FieldSpec::rationals();
    let unknown = || Error::UnknownSystem {
        name: name.to_string(),
        rank,
    };
    let r = rank as usize;
    let label = format!("{}{}", name.to_ascii_uppercase(), rank);
    let set = match name.to_ascii_uppercase().as_str() {
        "A" if r >= 2 => {
            // Roots e_i - e_j of R^(r+1), last coordinate dropped.
            let mut vecs = Vec::new();
            for i in 0..=r {
                for j in 0..=r {
                    if i != j {
                        let mut v = vec![0i64; r + 1];
                        v[i] = 1;
                        v[j] = -1;
                        v.pop();
                        vecs.push(v);
                    }
                }
            }
            from_vectors(&q, ints(&q, vecs), &label)
        }
        "B" | "C" if r >= 2 => from_vectors(&q, ints(&q, integer_roots(r, true)), &label),
        "D" if r >= 2 => from_vectors(&q, ints(&q, integer_roots(r, false)), &label),
        "E" if r == 8 => from_vectors(&q, parse_list(&q, E8), &label),
        "E" if r == 7 => from_vectors(&q, restrict_e(parse_list(&q, E8)), &label),
        "E" if r == 6 => from_vectors(&q, restrict_e(restrict_e(parse_list(&q, E8))), &label),
        "F" if r == 4 => from_vectors(&q, parse_list(&q, F4), &label),
        "H" if r == 3 => {
            let f = FieldSpec::sqrt5();
            from_vectors(&f, parse_list(&f, H3), &label)
        }
        "H" if r == 4 => {
            let f = FieldSpec::golden();
            from_vectors(&f, parse_list(&f, H4), &label)
        }
        _ => return Err(unknown()),
    };
    Ok(set)
}

/// Splits names like `B4`, `E8` or `h3` into letter and rank.
pub fn parse_system_name(s: &str) -> Result<(String, u32)> {
    let s = s.trim();
    let (letter, digits) = s.split_at(s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len()));
    let rank = digits.parse().map_err(|_| Error::UnknownSystem {
        name: s.to_string(),
        rank: 0,
    })?;
    Ok((letter.to_ascii_uppercase(), rank))
}

/// The 12 points of P^2 over Q(ω), ω² + ω + 1 = 0, dual to the linear
/// factors of xyz(x³-y³)(x³-z³)(y³-z³).
pub fn fermat_supersolvable_duals() -> PointSet {
    let f = FieldSpec::eisenstein();
    let one = FieldScalar::one(&f);
    let zero = FieldScalar::zero(&f);
    let w = FieldScalar::generator(&f).expect("quadratic field");
    let roots = [one.clone(), w.clone(), &w * &w];
    let mut vecs = vec![
        vec![one.clone(), zero.clone(), zero.clone()],
        vec![zero.clone(), one.clone(), zero.clone()],
        vec![zero.clone(), zero.clone(), one.clone()],
    ];
    for r in &roots {
        vecs.push(vec![one.clone(), -r, zero.clone()]);
        vecs.push(vec![one.clone(), zero.clone(), -r]);
        vecs.push(vec![zero.clone(), one.clone(), -r]);
    }
    from_vectors(&f, vecs, "Fermat3-duals")
}

/// Points [1 : t : t² : t³] on the twisted cubic. Without a seed t runs
/// over 1, 2, ..., count; with a seed t is a distinct pseudo-random rational.
pub fn twisted_cubic_points(count: usize, seed: Option<u64>) -> Result<PointSet> {
    if count == 0 {
        return Err(Error::Domain("twisted cubic needs at least one point".into()));
    }
    let q = FieldSpec::rationals();
    let params: Vec<BigRational> = match seed {
        None => (1..=count as i64).map(|t| BigRational::from_integer(t.into())).collect(),
        Some(seed) => {
            let mut rng = task_rng(seed, 0);
            let mut out: Vec<BigRational> = Vec::new();
            while out.len() < count {
                let num: i64 = rng.gen_range(-1000..=1000);
                let den: i64 = rng.gen_range(1..=97);
                let t = BigRational::new(num.into(), den.into());
                if !out.contains(&t) {
                    out.push(t);
                }
            }
            out
        }
    };
    let vecs = params
        .into_iter()
        .map(|t| {
            let t = FieldScalar::from_rational(&q, t);
            vec![FieldScalar::one(&q), t.clone(), t.pow(2), t.pow(3)]
        })
        .collect();
    Ok(from_vectors(&q, vecs, &format!("twisted-cubic-{count}")))
}

/// The linear form c₀x₀ + ... + c_nx_n of each point.
pub fn dualize(z: &PointSet) -> Vec<SparsePoly> {
    z.points
        .iter()
        .map(|p| {
            p.coords.iter().enumerate().fold(SparsePoly::zero(z.n, &z.field), |acc, (i, c)| {
                &acc + &SparsePoly::var(z.n, &z.field, Var::x(i)).scale(c)
            })
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct PointSetWire {
    n: usize,
    field: FieldSpec,
    points: Vec<Vec<String>>,
    label: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointFormat {
    Json,
    Csv,
}

impl PointFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(PointFormat::Json),
            "csv" => Some(PointFormat::Csv),
            _ => None,
        }
    }
}

impl PointSet {
    pub fn to_json(&self) -> String {
        let wire = PointSetWire {
            n: self.n,
            field: self.field.clone(),
            points: self
                .points
                .iter()
                .map(|p| p.coords.iter().map(|c| c.to_string()).collect())
                .collect(),
            label: self.label.clone(),
        };
        serde_json::to_string_pretty(&wire).expect("point sets serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: PointSetWire =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
        let mut pts = Vec::with_capacity(wire.points.len());
        for (row, coords) in wire.points.iter().enumerate() {
            pts.push(parse_point(&wire.field, wire.n, coords.iter().map(String::as_str), row + 1)?);
        }
        PointSet::new(wire.n, &wire.field, pts, wire.label)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        for p in &self.points {
            w.write_record(p.coords.iter().map(|c| c.to_string())).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Reads one point per row; the dimension comes from the first row.
    pub fn from_csv(text: &str, field: &FieldSpec, label: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut pts = Vec::new();
        let mut n = None;
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| Error::parse(i + 1, 1, e.to_string()))?;
            if rec.iter().all(|c| c.is_empty()) {
                continue;
            }
            let line = rec.position().map_or(i + 1, |p| p.line() as usize);
            let want = *n.get_or_insert(rec.len().saturating_sub(1));
            pts.push(parse_point(field, want, rec.iter(), line)?);
        }
        let n = n.ok_or_else(|| Error::parse(1, 1, "no points"))?;
        PointSet::new(n, field, pts, label)
    }

    pub fn save(&self, path: &Path, format: PointFormat) -> Result<()> {
        let text = match format {
            PointFormat::Json => self.to_json(),
            PointFormat::Csv => self.to_csv(),
        };
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Loads a point set; CSV files take their field from `field`.
    pub fn load(path: &Path, format: PointFormat, field: &FieldSpec) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match format {
            PointFormat::Json => {
                let set = Self::from_json(&text)?;
                Ok(set)
            }
            PointFormat::Csv => {
                let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("points");
                Self::from_csv(&text, field, label)
            }
        }
    }
}

fn parse_point<'a>(
    field: &FieldSpec,
    n: usize,
    coords: impl Iterator<Item = &'a str>,
    row: usize,
) -> Result<ProjectivePoint> {
    let mut v = Vec::new();
    for (col, c) in coords.enumerate() {
        let s = FieldScalar::parse(field, c)
            .or_else(|_| eval_coordinate(field, c))
            .map_err(|e| Error::parse(row, col + 1, format!("row {row}: {e}")))?;
        v.push(s);
    }
    if v.len() != n + 1 {
        return Err(Error::parse(
            row,
            1,
            format!("row {row}: expected {} coordinates, found {}", n + 1, v.len()),
        ));
    }
    ProjectivePoint::new(v).map_err(|e| Error::parse(row, 1, format!("row {row}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinalities() {
        for r in 2..=7u32 {
            let r2 = (r * r) as usize;
            assert_eq!(root_system("B", r).unwrap().len(), r2);
            assert_eq!(root_system("C", r).unwrap().len(), r2);
            assert_eq!(root_system("D", r).unwrap().len(), (r * (r - 1)) as usize);
            assert_eq!(root_system("A", r).unwrap().len(), ((r + 1) * r / 2) as usize);
        }
        assert_eq!(root_system("B", 3).unwrap().n(), 2);
        assert_eq!(root_system("E", 8).unwrap().len(), 120);
        assert_eq!(root_system("E", 7).unwrap().len(), 63);
        assert_eq!(root_system("E", 6).unwrap().len(), 36);
        assert_eq!(root_system("E", 6).unwrap().n(), 5);
        assert_eq!(root_system("F", 4).unwrap().len(), 24);
        assert_eq!(root_system("H", 3).unwrap().len(), 15);
        assert_eq!(root_system("H", 4).unwrap().len(), 60);
        assert_eq!(root_system("H", 4).unwrap().field(), &FieldSpec::golden());
    }

    #[test]
    fn unknown_systems() {
        assert!(matches!(root_system("F", 5), Err(Error::UnknownSystem { .. })));
        assert!(root_system("G", 2).is_err());
        assert!(root_system("E", 5).is_err());
        assert_eq!(parse_system_name("b4").unwrap(), ("B".to_string(), 4));
    }

    #[test]
    fn canonical_form_identifies_multiples() {
        let q = FieldSpec::rationals();
        let a = ProjectivePoint::from_ints(&q, &[0, -2, 4]).unwrap();
        let b = ProjectivePoint::from_ints(&q, &[0, 1, -2]).unwrap();
        assert_eq!(a, b);
        assert!(ProjectivePoint::from_ints(&q, &[0, 0]).is_err());
    }

    #[test]
    fn h3_coordinates_lie_in_the_field() {
        let f = FieldSpec::sqrt5();
        let v = eval_coordinate(&f, "-(2*t+4)").unwrap();
        assert_eq!(v, FieldScalar::parse(&f, "-2*t-4").unwrap());
        let g = FieldSpec::golden();
        assert_eq!(eval_coordinate(&g, "-t^2").unwrap(), FieldScalar::parse(&g, "-t-1").unwrap());
    }

    #[test]
    fn fermat_duals() {
        let z = fermat_supersolvable_duals();
        assert_eq!(z.len(), 12);
        let f = z.field().clone();
        assert!(z.contains(&ProjectivePoint::from_ints(&f, &[1, 0, 0]).unwrap()));
        let w = FieldScalar::generator(&f).unwrap();
        let p = ProjectivePoint::new(vec![FieldScalar::one(&f), -&w, FieldScalar::zero(&f)]).unwrap();
        assert!(z.contains(&p));
    }

    #[test]
    fn twisted_cubic() {
        let z = twisted_cubic_points(31, None).unwrap();
        assert_eq!(z.len(), 31);
        let z = twisted_cubic_points(10, Some(4)).unwrap();
        assert_eq!(z.len(), 10);
        for p in z.points() {
            let c = p.coords();
            assert_eq!(&c[0] * &c[2], &c[1] * &c[1]);
            assert_eq!(&c[0] * &c[3], &c[1] * &c[2]);
            assert_eq!(&c[1] * &c[3], &c[2] * &c[2]);
        }
    }

    #[test]
    fn dual_forms() {
        let q = FieldSpec::rationals();
        let z = PointSet::new(
            2,
            &q,
            vec![
                ProjectivePoint::from_ints(&q, &[1, 0, 0]).unwrap(),
                ProjectivePoint::from_ints(&q, &[1, 1, 1]).unwrap(),
            ],
            "t",
        )
        .unwrap();
        let forms = dualize(&z);
        assert_eq!(forms[0], SparsePoly::parse(2, &q, "x0").unwrap());
        assert_eq!(forms[1], SparsePoly::parse(2, &q, "x0 + x1 + x2").unwrap());
        let b3: Vec<String> = dualize(&root_system("B", 3).unwrap()).iter().map(|f| f.to_string()).collect();
        for s in ["x0", "x1", "x2", "x0 + x1", "x0 - x1", "x0 + x2", "x0 - x2", "x1 + x2", "x1 - x2"] {
            assert!(b3.contains(&s.to_string()), "{s}");
        }
    }

    #[test]
    fn json_and_csv_round_trip() {
        for z in [root_system("F", 4).unwrap(), root_system("H", 3).unwrap()] {
            assert_eq!(PointSet::from_json(&z.to_json()).unwrap(), z);
            let back = PointSet::from_csv(&z.to_csv(), z.field(), z.label()).unwrap();
            assert_eq!(back, z);
        }
    }

    #[test]
    fn malformed_rows_are_named() {
        let q = FieldSpec::rationals();
        let err = PointSet::from_csv("1,0,0\n0,1\n", &q, "x").unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("row 2"));
            }
            other => panic!("{other:?}"),
        }
        let err = PointSet::from_csv("1,0,0\n0,zz,1\n", &q, "x").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 2, .. }));
    }
}
