//! Smith normal form over arbitrary-precision integers.
//!
//! Pivoting always picks a nonzero entry of minimal absolute value in the
//! remaining submatrix, which keeps coefficients small on the sparse
//! exponent-sum matrices this crate produces. In debug builds every call
//! re-multiplies the recorded unimodular transforms and compares exactly.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    /// Nonzero diagonal entries d₁ | d₂ | …, each positive (1s included).
    pub divisors: Vec<BigInt>,
    pub rows: usize,
    pub cols: usize,
}

impl SmithForm {
    /// Rank deficit of the column space: free rank of coker(M) = cols − #divisors.
    pub fn free_rank(&self) -> usize {
        self.cols - self.divisors.len()
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::from(1) } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let m = if b.is_empty() { 0 } else { b[0].len() };
    let k = b.len();
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                let add = &a[i][t] * &b[t][j];
                out[i][j] += add;
            }
        }
    }
    out
}

/// Computes the Smith normal form of `m`, an rows×cols matrix (either
/// dimension may be 0, so the width is passed explicitly).
pub fn smith_normal_form(m: &[Vec<BigInt>], cols: usize) -> SmithForm {
    let rows = m.len();
    assert!(m.iter().all(|r| r.len() == cols), "ragged matrix");
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let mut k = 0usize;
    while k < rows && k < cols {
        // find the minimal-absolute-value nonzero entry in the submatrix
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                match pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if a[i][j].abs() < a[pi][pj].abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(k, pi);
        u.swap(k, pi);
        if pj != k {
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            for row in v.iter_mut() {
                row.swap(k, pj);
            }
        }

        // clear row and column k; restart whenever a remainder appears,
        // since it is smaller than the pivot and becomes the next pivot
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in (k + 1)..rows {
                if a[i][k].is_zero() {
                    continue;
                }
                let q = div_round(&a[i][k], &a[k][k]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let sub = &q * &a[k][j];
                        a[i][j] -= sub;
                    }
                    for j in 0..rows {
                        let sub = &q * &u[k][j];
                        u[i][j] -= sub;
                    }
                }
                if !a[i][k].is_zero() {
                    a.swap(k, i);
                    u.swap(k, i);
                    dirty = true;
                }
            }
            for j in (k + 1)..cols {
                if a[k][j].is_zero() {
                    continue;
                }
                let q = div_round(&a[k][j], &a[k][k]);
                if !q.is_zero() {
                    for i in 0..rows {
                        let sub = &q * &a[i][k];
                        a[i][j] -= sub;
                    }
                    for i in 0..cols {
                        let sub = &q * &v[i][k];
                        v[i][j] -= sub;
                    }
                }
                if !a[k][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(k, j);
                    }
                    for row in v.iter_mut() {
                        row.swap(k, j);
                    }
                    dirty = true;
                }
            }
        }

        // enforce divisibility into the rest of the submatrix
        let mut fixed = false;
        'check: for i in (k + 1)..rows {
            for j in (k + 1)..cols {
                if (&a[i][j] % &a[k][k]).is_zero() {
                    continue;
                }
                for t in 0..cols {
                    let add = a[i][t].clone();
                    a[k][t] += add;
                }
                for t in 0..rows {
                    let add = u[i][t].clone();
                    u[k][t] += add;
                }
                fixed = true;
                break 'check;
            }
        }
        if fixed {
            continue;
        }

        if a[k][k].is_negative() {
            for j in 0..cols {
                a[k][j] = -a[k][j].clone();
            }
            for j in 0..rows {
                u[k][j] = -u[k][j].clone();
            }
        }
        k += 1;
    }

    let divisors: Vec<BigInt> = (0..k).map(|i| a[i][i].clone()).collect();

    #[cfg(debug_assertions)]
    {
        let product = mat_mul(&mat_mul(&u, m), &v);
        for (i, row) in product.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                let expected = if i == j && i < divisors.len() {
                    divisors[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(*entry, expected, "U·M·V mismatch at ({i},{j})");
            }
        }
        for w in divisors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "divisor chain broken");
        }
    }
    let _ = &mat_mul; // used only under debug_assertions otherwise

    SmithForm {
        divisors,
        rows,
        cols,
    }
}

/// Rounded division: minimizes |a − q·b| so remainders shrink fast.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let q = a / b;
    let r = a - &q * b;
    if r.is_zero() {
        return q;
    }
    let twice = &r.abs() * BigInt::from(2);
    if twice > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn divs(rows: &[&[i64]]) -> Vec<i64> {
        let mat = m(rows);
        let cols = mat[0].len();
        smith_normal_form(&mat, cols)
            .divisors
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect()
    }

    #[test]
    fn diagonal_merging() {
        assert_eq!(divs(&[&[2, 0], &[0, 3]]), vec![1, 6]);
        assert_eq!(divs(&[&[2, 0], &[0, 4]]), vec![2, 4]);
        assert_eq!(divs(&[&[5]]), vec![5]);
        assert_eq!(divs(&[&[0]]), Vec::<i64>::new());
    }

    #[test]
    fn free_rank_counting() {
        let f = smith_normal_form(&m(&[&[1, 0, 0]]), 3);
        assert_eq!(f.divisors, vec![BigInt::from(1)]);
        assert_eq!(f.free_rank(), 2);
        let empty = smith_normal_form(&[], 0);
        assert_eq!(empty.free_rank(), 0);
    }

    #[test]
    fn circulant_shift_pattern() {
        // circulant with first row (−1,−1,0,0): eigenvalues −1−ω over the
        // fourth roots of unity, one of which (ω=−1) vanishes, so rank 3
        let rows = m(&[
            &[-1, -1, 0, 0],
            &[0, -1, -1, 0],
            &[0, 0, -1, -1],
            &[-1, 0, 0, -1],
        ]);
        let f = smith_normal_form(&rows, 4);
        assert_eq!(f.divisors.len(), 3);
    }

    #[test]
    fn random_small_matrices_validate_in_debug() {
        // debug assertions inside smith_normal_form re-check U·M·V = D exactly
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 11) as i64 - 5
        };
        for _ in 0..200 {
            let r = 1 + (next().unsigned_abs() as usize % 4);
            let c = 1 + (next().unsigned_abs() as usize % 4);
            let mat: Vec<Vec<BigInt>> = (0..r)
                .map(|_| (0..c).map(|_| BigInt::from(next())).collect())
                .collect();
            let f = smith_normal_form(&mat, c);
            assert!(f.divisors.len() <= r.min(c));
            for w in f.divisors.windows(2) {
                assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }
}
