//! Integer matrix normal forms.
//!
//! Matrices are dense `Vec<Vec<i64>>` in row-major order. Lattices are
//! spanned by the *rows* of a matrix.

pub type IntMatrix = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            debug_assert_eq!(row.len(), inner);
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(a: &IntMatrix, cols: usize) -> IntMatrix {
    (0..cols)
        .map(|j| a.iter().map(|row| row[j]).collect())
        .collect()
}

fn row_axpy(m: &mut IntMatrix, target: usize, source: usize, factor: i64) {
    if factor == 0 {
        return;
    }
    let src = m[source].clone();
    for (t, s) in m[target].iter_mut().zip(src) {
        *t -= factor * s;
    }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// The result is upper echelon with positive pivots, every entry above a
/// pivot reduced into `[0, pivot)`, and no zero rows. Two generating sets
/// span the same lattice iff their Hermite forms are identical.
pub fn hermite_rows(rows: &[Vec<i64>], ncols: usize) -> IntMatrix {
    let mut m: IntMatrix = rows
        .iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .cloned()
        .collect();
    let mut r = 0;
    for col in 0..ncols {
        if r >= m.len() {
            break;
        }
        loop {
            let pivot = (r..m.len())
                .filter(|&i| m[i][col] != 0)
                .min_by_key(|&i| m[i][col].abs());
            let Some(p) = pivot else { break };
            m.swap(r, p);
            let mut clean = true;
            for i in r + 1..m.len() {
                if m[i][col] != 0 {
                    let q = m[i][col].div_euclid(m[r][col]);
                    row_axpy(&mut m, i, r, q);
                    if m[i][col] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if m[r][col] == 0 {
            continue;
        }
        if m[r][col] < 0 {
            for x in m[r].iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..r {
            let q = m[i][col].div_euclid(m[r][col]);
            row_axpy(&mut m, i, r, q);
        }
        r += 1;
    }
    m.retain(|row| row.iter().any(|&x| x != 0));
    m
}

/// Smith normal form `U·A·V = D` with unimodular `U`, `V`, together with
/// `V⁻¹`. The diagonal of `D` is nonnegative and satisfies `d₁ | d₂ | …`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub d: IntMatrix,
    pub rank: usize,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.rank).map(|i| self.d[i][i]).collect()
    }
}

pub fn smith(a: &IntMatrix, nrows: usize, ncols: usize) -> Smith {
    let mut d = a.clone();
    let mut u = identity(nrows);
    let mut v = identity(ncols);
    let mut v_inv = identity(ncols);

    // column op helpers keep v and v_inv in sync: v <- v·E, v_inv <- E⁻¹·v_inv
    fn col_axpy(m: &mut IntMatrix, target: usize, source: usize, factor: i64) {
        for row in m.iter_mut() {
            row[target] -= factor * row[source];
        }
    }
    fn col_swap(m: &mut IntMatrix, a: usize, b: usize) {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }

    let mut t = 0;
    while t < nrows.min(ncols) {
        let pivot = (t..nrows)
            .flat_map(|i| (t..ncols).map(move |j| (i, j)))
            .filter(|&(i, j)| d[i][j] != 0)
            .min_by_key(|&(i, j)| d[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        col_swap(&mut d, t, pj);
        col_swap(&mut v, t, pj);
        v_inv.swap(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..nrows {
                if d[i][t] != 0 {
                    let q = d[i][t].div_euclid(d[t][t]);
                    row_axpy(&mut d, i, t, q);
                    row_axpy(&mut u, i, t, q);
                    if d[i][t] != 0 {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..ncols {
                if d[t][j] != 0 {
                    let q = d[t][j].div_euclid(d[t][t]);
                    col_axpy(&mut d, j, t, q);
                    col_axpy(&mut v, j, t, q);
                    // E = I - q·e_t e_jᵀ, E⁻¹ = I + q·e_t e_jᵀ: row t of v_inv += q·row j
                    row_axpy(&mut v_inv, t, j, -q);
                    if d[t][j] != 0 {
                        dirty = true;
                    }
                }
            }
            if !dirty {
                // divisibility: every remaining entry must be a multiple of the pivot
                let bad = (t + 1..nrows)
                    .flat_map(|i| (t + 1..ncols).map(move |j| (i, j)))
                    .find(|&(i, j)| d[i][j] % d[t][t] != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        row_axpy(&mut d, t, i, -1);
                        row_axpy(&mut u, t, i, -1);
                        continue;
                    }
                }
            }
            // move the smallest nonzero entry of row/column t to the pivot
            let best = (t..nrows)
                .map(|i| (i, t))
                .chain((t + 1..ncols).map(|j| (t, j)))
                .filter(|&(i, j)| d[i][j] != 0)
                .min_by_key(|&(i, j)| d[i][j].abs())
                .expect("pivot row or column is nonzero");
            if best.0 != t {
                d.swap(t, best.0);
                u.swap(t, best.0);
            } else if best.1 != t {
                col_swap(&mut d, t, best.1);
                col_swap(&mut v, t, best.1);
                v_inv.swap(t, best.1);
            }
        }
        if d[t][t] < 0 {
            for x in d[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
        t += 1;
    }
    Smith {
        u,
        v,
        v_inv,
        d,
        rank: t,
    }
}

/// Basis (as rows) of the integer kernel `{x ∈ Zⁿ : A·x = 0}`.
pub fn integer_kernel(a: &IntMatrix, ncols: usize) -> IntMatrix {
    if a.is_empty() {
        return identity(ncols);
    }
    let s = smith(a, a.len(), ncols);
    (s.rank..ncols)
        .map(|j| s.v.iter().map(|row| row[j]).collect())
        .collect()
}

/// Saturation `(span_Q rows) ∩ Zⁿ` of the lattice spanned by `rows`.
pub fn saturation(rows: &[Vec<i64>], ncols: usize) -> IntMatrix {
    let nonzero: IntMatrix = rows
        .iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .cloned()
        .collect();
    if nonzero.is_empty() {
        return Vec::new();
    }
    let kernel = integer_kernel(&nonzero, ncols);
    let sat = integer_kernel(&kernel, ncols);
    hermite_rows(&sat, ncols)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    num::integer::gcd(a, b)
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        num::integer::lcm(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_smith(a: &IntMatrix, rows: usize, cols: usize) -> Smith {
        let s = smith(a, rows, cols);
        assert_eq!(mat_mul(&mat_mul(&s.u, a), &s.v), s.d);
        assert_eq!(mat_mul(&s.v, &s.v_inv), identity(cols));
        for i in 0..rows {
            for j in 0..cols {
                if i != j {
                    assert_eq!(s.d[i][j], 0);
                }
            }
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert_eq!(w[1] % w[0], 0, "divisibility chain {diag:?}");
        }
        s
    }

    #[test]
    fn smith_of_diag_2_3() {
        let a = vec![vec![2, 0], vec![0, 3]];
        let s = check_smith(&a, 2, 2);
        assert_eq!(s.diagonal(), vec![1, 6]);
    }

    #[test]
    fn smith_rectangular() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = check_smith(&a, 3, 3);
        assert_eq!(s.diagonal(), vec![2, 6, 12]);
        let b = vec![vec![3, 6, 9, 12]];
        assert_eq!(check_smith(&b, 1, 4).diagonal(), vec![3]);
    }

    #[test]
    fn hermite_is_canonical() {
        let a = hermite_rows(&[vec![2, 0], vec![0, 3]], 2);
        let b = hermite_rows(&[vec![2, 3], vec![4, 3], vec![0, 6]], 2);
        assert_eq!(a, vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(b, a);
    }

    #[test]
    fn kernel_and_saturation() {
        let k = integer_kernel(&vec![vec![1, -1]], 2);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0], k[0][1]);
        assert_eq!(saturation(&[vec![2, 0]], 2), vec![vec![1, 0]]);
        assert_eq!(saturation(&[vec![2, 2], vec![0, 4]], 2), identity(2));
    }
}
