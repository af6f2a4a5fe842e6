//! Exact dense linear algebra over a [`Field`].

use super::field::Field;

/// Reduce `rows` in place to reduced row echelon form over the first
/// `ncols` columns; returns the pivot columns. Zero rows are dropped.
pub fn rref<F: Field>(rows: &mut Vec<Vec<F>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inv().expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = x.mul(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = x.sub(&f.mul(y));
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank<F: Field>(rows: &[Vec<F>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : A·x = 0}`, one vector per free column, in increasing
/// order of the free column.
pub fn nullspace<F: Field>(rows: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![F::zero(); ncols];
            v[free] = F::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = m[r][free].neg();
            }
            v
        })
        .collect()
}

/// Canonical basis (RREF rows) of the span of `vectors`.
pub fn span_basis<F: Field>(vectors: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m = vectors.to_vec();
    rref(&mut m, ncols);
    m
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span<F: Field>(basis: &[Vec<F>], v: &[F], ncols: usize) -> bool {
    let r = rank(basis, ncols);
    let mut m = basis.to_vec();
    m.push(v.to_vec());
    rank(&m, ncols) == r
}

/// Whether span(`a`) ⊆ span(`b`).
pub fn span_contains<F: Field>(b: &[Vec<F>], a: &[Vec<F>], ncols: usize) -> bool {
    let r = rank(b, ncols);
    let mut m = b.to_vec();
    m.extend(a.iter().cloned());
    rank(&m, ncols) == r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::cyclo::CycloScalar;
    use crate::lattice::point::rat;
    use num::BigRational;

    fn q(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
            .collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a, 3), 2);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        for row in &a {
            let dot: BigRational = row.iter().zip(&ns[0]).map(|(x, y)| x * y).sum();
            assert_eq!(dot, rat(0, 1));
        }
        assert!(in_span(&a, &[rat(3, 1), rat(2, 1), rat(5, 1)], 3));
        assert!(!in_span(&a, &[rat(0, 1), rat(0, 1), rat(1, 1)], 3));
    }

    #[test]
    fn vandermonde_over_cyclotomics() {
        let n = 4u64;
        let rows: Vec<Vec<CycloScalar>> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| CycloScalar::root_of_unity((k * j) as i64, n))
                    .collect()
            })
            .collect();
        assert_eq!(rank(&rows, n as usize), n as usize);
    }
}
