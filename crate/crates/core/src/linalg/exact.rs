use super::ScalarMatrix;
use crate::arith::FieldScalar;

/// Reduced row echelon form over the field, with its pivot columns.
pub fn rref_exact(m: &ScalarMatrix) -> (Vec<usize>, ScalarMatrix) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                a.entries.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = a.get(r, c).inv().expect("nonzero pivot");
        for j in c..cols {
            let v = a.get(r, j);
            if !v.is_zero() {
                let s = v * &inv;
                a.entries[r * cols + j] = s;
            }
        }
        let pivot_row: Vec<(usize, FieldScalar)> = (c..cols)
            .filter(|&j| !a.get(r, j).is_zero())
            .map(|j| (j, a.get(r, j).clone()))
            .collect();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a.get(i, c).clone();
            if f.is_zero() {
                continue;
            }
            for (j, v) in &pivot_row {
                let cur = &a.entries[i * cols + j];
                a.entries[i * cols + j] = cur - &(&f * v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (pivots, a)
}

/// Nullspace basis read off an RREF: one vector per free column.
pub(crate) fn nullspace_from_exact_rref(pivots: &[usize], a: &ScalarMatrix) -> Vec<Vec<FieldScalar>> {
    let mut is_pivot = vec![false; a.cols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    (0..a.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![FieldScalar::zero(&a.field); a.cols];
            v[f] = FieldScalar::one(&a.field);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a.get(i, f);
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FieldSpec;

    #[test]
    fn echelon_of_small_matrix() {
        let q = FieldSpec::rationals();
        let m = ScalarMatrix::from_ints(&q, &[vec![2, 4, 2], vec![1, 2, 3]]);
        let (piv, r) = rref_exact(&m);
        assert_eq!(piv, vec![0, 2]);
        assert_eq!(r.row(0), ScalarMatrix::from_ints(&q, &[vec![1, 2, 0]]).row(0));
        let ns = nullspace_from_exact_rref(&piv, &r);
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).unwrap().iter().all(|v| v.is_zero()));
    }
}
