use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntMatrix, Vector};

/// Row Hermite normal form.
///
/// Returns `(h, u)` with `h = u · m`, `u` unimodular, `h` in row echelon form with
/// positive pivots and every entry above a pivot reduced into `[0, pivot)`.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut r = 0;
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        loop {
            // smallest nonzero magnitude at or below row r moves to the pivot position
            let best = (r..h.rows())
                .filter(|&i| !h.get(i, c).is_zero())
                .min_by(|&a, &b| h.get(a, c).abs().cmp(&h.get(b, c).abs()));
            let Some(best) = best else { break };
            h.swap_rows(r, best);
            u.swap_rows(r, best);
            let mut done = true;
            for i in r + 1..h.rows() {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let q = -h.get(i, c).div_floor(h.get(r, c));
                h.add_row_multiple(i, r, &q);
                u.add_row_multiple(i, r, &q);
                if !h.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h.get(i, c).div_floor(h.get(r, c));
            h.add_row_multiple(i, r, &q);
            u.add_row_multiple(i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// Smith normal form.
///
/// Returns `(s, left, right)` with `s = left · m · right` diagonal, nonnegative,
/// `s[i][i] | s[i+1][i+1]`, and both transforms unimodular.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut s = m.clone();
    let mut left = IntMatrix::identity(m.rows());
    let mut right = IntMatrix::identity(m.cols());
    let diag = m.rows().min(m.cols());
    let mut t = 0;
    while t < diag {
        // pivot: smallest nonzero magnitude in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..s.rows() {
            for j in t..s.cols() {
                let v = s.get(i, j);
                if v.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| v.abs() < s.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        left.swap_rows(t, pi);
        s.swap_cols(t, pj);
        right.swap_cols(t, pj);

        let mut clean = true;
        for i in t + 1..s.rows() {
            if s.get(i, t).is_zero() {
                continue;
            }
            let q = -s.get(i, t).div_floor(s.get(t, t));
            s.add_row_multiple(i, t, &q);
            left.add_row_multiple(i, t, &q);
            if !s.get(i, t).is_zero() {
                clean = false;
            }
        }
        for j in t + 1..s.cols() {
            if s.get(t, j).is_zero() {
                continue;
            }
            let q = -s.get(t, j).div_floor(s.get(t, t));
            s.add_col_multiple(j, t, &q);
            right.add_col_multiple(j, t, &q);
            if !s.get(t, j).is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility: fold an offending row into row t and retry
        let pivot = s.get(t, t).clone();
        let offending = (t + 1..s.rows())
            .find(|&i| (t + 1..s.cols()).any(|j| !s.get(i, j).is_multiple_of(&pivot)));
        if let Some(i) = offending {
            s.add_row_multiple(t, i, &BigInt::one());
            left.add_row_multiple(t, i, &BigInt::one());
            continue;
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            left.negate_row(t);
        }
        t += 1;
    }
    (s, left, right)
}

/// Nonzero diagonal entries of the Smith form, in order.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let (s, _, _) = snf(m);
    (0..s.rows().min(s.cols()))
        .map(|i| s.get(i, i).clone())
        .filter(|d| !d.is_zero())
        .collect()
}

/// Some integer solution of `a · x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vector> {
    assert_eq!(a.rows(), b.len());
    let (s, left, right) = snf(a);
    let lb = left.apply(b);
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, v) in lb.iter().enumerate() {
        let d = if i < a.cols() { s.get(i, i) } else { &BigInt::ZERO };
        if d.is_zero() {
            if !v.is_zero() {
                return None;
            }
        } else {
            let (q, r) = v.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(right.apply(&y))
}

/// Some rational solution of `a · x = b`, if one exists.
pub fn solve_rational(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    assert_eq!(a.rows(), b.len());
    let (s, left, right) = snf(a);
    let lb = left.apply(b);
    let mut y = vec![BigRational::zero(); a.cols()];
    for (i, v) in lb.iter().enumerate() {
        let d = if i < a.cols() { s.get(i, i) } else { &BigInt::ZERO };
        if d.is_zero() {
            if !v.is_zero() {
                return None;
            }
        } else {
            y[i] = BigRational::new(v.clone(), d.clone());
        }
    }
    Some(
        (0..a.cols())
            .map(|i| {
                (0..a.cols())
                    .map(|j| BigRational::from_integer(right.get(i, j).clone()) * &y[j])
                    .sum()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::matrix::vector;

    fn is_hnf(h: &IntMatrix) -> bool {
        let mut last_pivot: Option<usize> = None;
        let mut seen_zero = false;
        for i in 0..h.rows() {
            let pivot = (0..h.cols()).find(|&j| !h.get(i, j).is_zero());
            match pivot {
                None => seen_zero = true,
                Some(p) => {
                    if seen_zero || last_pivot.is_some_and(|lp| p <= lp) {
                        return false;
                    }
                    if !h.get(i, p).is_positive() {
                        return false;
                    }
                    for k in 0..i {
                        let v = h.get(k, p);
                        if v.is_negative() || v >= h.get(i, p) {
                            return false;
                        }
                    }
                    last_pivot = Some(p);
                }
            }
        }
        true
    }

    #[test]
    fn hnf_identity() {
        let id = IntMatrix::identity(2);
        let (h, u) = hnf(&id);
        assert_eq!(h, id);
        assert_eq!(u, id);
    }

    #[test]
    fn hnf_zero_row() {
        let z = IntMatrix::from_i64(1, 2, &[0, 0]);
        let (h, u) = hnf(&z);
        assert_eq!(h, z);
        assert_eq!(u, IntMatrix::identity(1));
    }

    /// Fraction-free Gaussian elimination determinant, independent of the HNF path.
    fn oracle_det(m: &IntMatrix) -> BigInt {
        m.determinant()
    }

    #[test]
    fn hnf_two_by_two() {
        let m = IntMatrix::from_i64(2, 2, &[2, 6, 0, 4]);
        let (h, u) = hnf(&m);
        assert!(is_hnf(&h));
        assert!(u.is_unimodular());
        assert_eq!(u.mul(&m), h);
        assert_eq!(oracle_det(&h).abs(), BigInt::from(8));
        // echelon with positive pivots: [[2, 2], [0, 4]]
        assert_eq!(h, IntMatrix::from_i64(2, 2, &[2, 2, 0, 4]));
    }

    #[test]
    fn snf_examples() {
        let (s, l, r) = snf(&IntMatrix::identity(2));
        assert_eq!(s, IntMatrix::identity(2));
        assert!(l.is_unimodular() && r.is_unimodular());

        // gcd/lcm oracle: diag(2,3) ~ diag(gcd, lcm) = diag(1, 6)
        let m = IntMatrix::from_i64(2, 2, &[2, 0, 0, 3]);
        let (s, l, r) = snf(&m);
        assert_eq!(s, IntMatrix::from_i64(2, 2, &[1, 0, 0, 6]));
        assert_eq!(l.mul(&m).mul(&r), s);

        let row = IntMatrix::from_i64(1, 2, &[2, 4]);
        let (s, l, r) = snf(&row);
        assert_eq!(s, IntMatrix::from_i64(1, 2, &[2, 0]));
        assert_eq!(l.mul(&row).mul(&r), s);
    }

    #[test]
    fn solve_integer_detects_divisibility() {
        let a = IntMatrix::from_i64(1, 1, &[2]);
        assert_eq!(solve_integer(&a, &vector(&[4])), Some(vector(&[2])));
        assert_eq!(solve_integer(&a, &vector(&[3])), None);
        assert!(solve_rational(&a, &vector(&[3])).is_some());
        let b = IntMatrix::from_i64(2, 1, &[1, 1]);
        assert_eq!(solve_integer(&b, &vector(&[1, 2])), None);
        assert!(solve_rational(&b, &vector(&[1, 2])).is_none());
    }
}
