//! Fraction-free elimination over K[a]. Each updated row is divided by the
//! gcd of its entries, which keeps degrees near the Bareiss bound without
//! needing the exact Bareiss divisor.

use rayon::prelude::*;

use super::{PolyMatrix, RankCertificate, RankMode};
use crate::poly::{gcd, SparsePoly};

fn make_primitive(row: &mut [SparsePoly]) {
    let mut g: Option<SparsePoly> = None;
    for e in row.iter().filter(|e| !e.is_zero()) {
        let next = match &g {
            None => e.clone(),
            Some(h) => gcd(h, e),
        };
        let done = next.is_constant();
        g = Some(next);
        if done {
            break;
        }
    }
    match g {
        Some(g) if !g.is_constant() => {
            for e in row.iter_mut().filter(|e| !e.is_zero()) {
                *e = e.div_exact(&g).expect("content divides the row");
            }
        }
        _ => {}
    }
}

/// Returns the (row, column) pivot positions; `full` also clears entries
/// above each pivot.
fn eliminate(rows: &mut [Vec<SparsePoly>], cols: usize, full: bool) -> Vec<(usize, usize)> {
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let pick = (r..nrows)
            .filter(|&i| !rows[i][c].is_zero())
            .min_by(|&i, &j| {
                let (a, b) = (&rows[i][c], &rows[j][c]);
                a.num_terms()
                    .cmp(&b.num_terms())
                    .then_with(|| a.leading_term().map(|t| t.0).cmp(&b.leading_term().map(|t| t.0)))
                    .then(i.cmp(&j))
            });
        let Some(pick) = pick else { continue };
        rows.swap(r, pick);
        let pivot_row = rows[r].clone();
        let piv = &pivot_row[c];
        let targets: Vec<usize> = (0..nrows)
            .filter(|&i| i != r && (full || i > r) && !rows[i][c].is_zero())
            .collect();
        let updated: Vec<(usize, Vec<SparsePoly>)> = targets
            .par_iter()
            .map(|&i| {
                let f = &rows[i][c];
                let g = gcd(piv, f);
                let a = piv.div_exact(&g).expect("gcd divides pivot");
                let b = f.div_exact(&g).expect("gcd divides entry");
                let mut row: Vec<SparsePoly> = rows[i]
                    .iter()
                    .zip(&pivot_row)
                    .map(|(x, y)| {
                        let mut out = if x.is_zero() { x.clone() } else { &a * x };
                        if !y.is_zero() {
                            out = &out - &(&b * y);
                        }
                        out
                    })
                    .collect();
                make_primitive(&mut row);
                (i, row)
            })
            .collect();
        for (i, row) in updated {
            rows[i] = row;
        }
        pivots.push((r, c));
        r += 1;
    }
    pivots
}

/// Exact rank over the fraction field K(a).
pub fn generic_rank_bareiss(m: &PolyMatrix) -> RankCertificate {
    let mut rows = m.to_rows();
    let pivots = eliminate(&mut rows, m.cols(), false);
    RankCertificate {
        rank: pivots.len(),
        mode: RankMode::ExactSymbolic,
        trials: 0,
        seed: None,
        witness: format!(
            "pivot columns {:?}",
            pivots.iter().map(|&(_, c)| c).collect::<Vec<_>>()
        ),
        confidence: None,
    }
}

/// A K(a)-basis of the kernel with polynomial entries, one vector per free
/// column of the reduced echelon form; each vector is primitive.
pub fn bareiss_kernel(m: &PolyMatrix) -> Vec<Vec<SparsePoly>> {
    let mut rows = m.to_rows();
    let cols = m.cols();
    let pivots = eliminate(&mut rows, cols, true);
    let mut is_pivot = vec![false; cols];
    for &(_, c) in &pivots {
        is_pivot[c] = true;
    }
    let zero = SparsePoly::zero(m.n(), m.field());
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let involved: Vec<&(usize, usize)> =
                pivots.iter().filter(|&&(r, _)| !rows[r][f].is_zero()).collect();
            let mut l = SparsePoly::one(m.n(), m.field());
            for &&(r, c) in &involved {
                let p = &rows[r][c];
                let g = gcd(&l, p);
                l = &l * &p.div_exact(&g).expect("gcd divides");
            }
            let mut v = vec![zero.clone(); cols];
            v[f] = l.clone();
            for &&(r, c) in &involved {
                let scale = l.div_exact(&rows[r][c]).expect("lcm is a multiple");
                v[c] = -(&rows[r][f] * &scale);
            }
            make_primitive(&mut v);
            v
        })
        .collect()
}
