//! Hermite and Smith normal forms over ℤ with exact big-integer arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix, rows first.
pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn to_big(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "matrix shapes do not match");
            (0..cols)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() {
                            acc += x * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `x · M` for a row vector `x`.
pub fn vec_mat(x: &[BigInt], m: &IntMatrix) -> Vec<BigInt> {
    let cols = m.first().map_or(0, Vec::len);
    let mut out = vec![BigInt::zero(); cols];
    for (xi, row) in x.iter().zip(m) {
        if xi.is_zero() {
            continue;
        }
        for (o, v) in out.iter_mut().zip(row) {
            *o += xi * v;
        }
    }
    out
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn row_sub(m: &mut IntMatrix, target: usize, source: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (t, s) = if target < source {
        let (lo, hi) = m.split_at_mut(source);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(target);
        (&mut hi[0], &lo[source])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

fn row_add(m: &mut IntMatrix, target: usize, source: usize) {
    row_sub(m, target, source, &-BigInt::one());
}

fn negate_row(m: &mut IntMatrix, r: usize) {
    for x in &mut m[r] {
        *x = -&*x;
    }
}

fn col_sub(m: &mut IntMatrix, target: usize, source: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let s = row[source].clone();
        row[target] -= q * s;
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Row-style Hermite normal form.
///
/// Returns `(H, U)` with `U` unimodular and `U·M = H`. Pivots are placed from
/// the bottom row upwards while columns are scanned from right to left, so a
/// square nonsingular input yields a lower-triangular `H` with positive
/// diagonal and every entry below a pivot reduced into `[0, pivot)`. Zero
/// rows collect at the top.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut h = m.clone();
    let mut u = identity(rows);
    let mut next = rows;
    for c in (0..cols).rev() {
        if next == 0 {
            break;
        }
        let target = next - 1;
        loop {
            let best = (0..=target)
                .filter(|&i| !h[i][c].is_zero())
                .min_by(|&i, &j| h[i][c].abs().cmp(&h[j][c].abs()));
            let Some(best) = best else { break };
            h.swap(best, target);
            u.swap(best, target);
            let mut cleared = true;
            for i in 0..target {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[target][c]);
                row_sub(&mut h, i, target, &q);
                row_sub(&mut u, i, target, &q);
                cleared &= h[i][c].is_zero();
            }
            if cleared {
                break;
            }
        }
        if h[target][c].is_zero() {
            continue;
        }
        if h[target][c].is_negative() {
            negate_row(&mut h, target);
            negate_row(&mut u, target);
        }
        for i in target + 1..rows {
            let q = h[i][c].div_floor(&h[target][c]);
            row_sub(&mut h, i, target, &q);
            row_sub(&mut u, i, target, &q);
        }
        next = target;
    }
    (h, u)
}

/// Smith normal form `(S, U, V)` with `U·M·V = S`, `S` diagonal, nonnegative
/// diagonal entries forming a divisibility chain.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut s = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if s[i][j].is_zero() {
                        continue;
                    }
                    if pivot.is_none_or(|(pi, pj)| s[i][j].abs() < s[pi][pj].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return (s, u, v);
            };
            s.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut s, t, pj);
            swap_cols(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                let q = s[i][t].div_floor(&s[t][t]);
                row_sub(&mut s, i, t, &q);
                row_sub(&mut u, i, t, &q);
                clean &= s[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = s[t][j].div_floor(&s[t][t]);
                col_sub(&mut s, j, t, &q);
                col_sub(&mut v, j, t, &q);
                clean &= s[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !s[i][j].is_multiple_of(&s[t][t])));
            match offender {
                Some(i) => {
                    row_add(&mut s, t, i);
                    row_add(&mut u, t, i);
                }
                None => break,
            }
        }
        if s[t][t].is_negative() {
            negate_row(&mut s, t);
            negate_row(&mut u, t);
        }
    }
    (s, u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        to_big(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn is_unimodular(u: &IntMatrix) -> bool {
        determinant(u).abs().is_one()
    }

    #[test]
    fn hnf_of_identity_and_diagonal() {
        let (h, u) = hermite_normal_form(&identity(3));
        assert_eq!(h, identity(3));
        assert_eq!(u, identity(3));
        let d = m(&[&[3, 0], &[0, 3]]);
        let (h, _) = hermite_normal_form(&d);
        assert_eq!(h, d);
    }

    #[test]
    fn hnf_shape_lower_triangular() {
        let a = m(&[&[2, 3, 1], &[4, -1, 5], &[0, 7, 3]]);
        let (h, u) = hermite_normal_form(&a);
        assert_eq!(mat_mul(&u, &a), h);
        assert!(is_unimodular(&u));
        for i in 0..3 {
            assert!(h[i][i].is_positive());
            for j in i + 1..3 {
                assert!(h[i][j].is_zero());
            }
            for r in i + 1..3 {
                assert!(!h[r][i].is_negative() && h[r][i] < h[i][i]);
            }
        }
        assert_eq!(determinant(&a).abs(), h.iter().enumerate().map(|(i, r)| r[i].clone()).product());
    }

    #[test]
    fn hnf_of_column_vector_is_gcd_at_bottom() {
        let c = m(&[&[6], &[-10], &[15]]);
        let (h, u) = hermite_normal_form(&c);
        assert_eq!(h, m(&[&[0], &[0], &[1]]));
        assert_eq!(mat_mul(&u, &c), h);
    }

    #[test]
    fn hnf_rank_deficient_puts_zero_rows_on_top() {
        let a = m(&[&[1, 2], &[2, 4], &[3, 6]]);
        let (h, u) = hermite_normal_form(&a);
        assert_eq!(mat_mul(&u, &a), h);
        assert!(h[0].iter().all(Zero::is_zero));
        assert!(h[1].iter().all(Zero::is_zero));
        assert_eq!(h[2], vec![BigInt::from(1), BigInt::from(2)]);
    }

    #[test]
    fn snf_examples() {
        let (s, u, v) = smith_normal_form(&m(&[&[2, 4], &[0, 0]]));
        assert_eq!(s, m(&[&[2, 0], &[0, 0]]));
        assert_eq!(mat_mul(&mat_mul(&u, &m(&[&[2, 4], &[0, 0]])), &v), s);

        assert_eq!(smith_normal_form(&m(&[&[2, 0], &[0, 4]])).0, m(&[&[2, 0], &[0, 4]]));

        let a = m(&[&[2, 1], &[0, 2]]);
        let (s, u, v) = smith_normal_form(&a);
        assert_eq!(s, m(&[&[1, 0], &[0, 4]]));
        assert_eq!(mat_mul(&mat_mul(&u, &a), &v), s);
        assert!(is_unimodular(&u) && is_unimodular(&v));
    }

    #[test]
    fn snf_fixes_divisibility() {
        let a = m(&[&[2, 0], &[0, 3]]);
        let (s, _, _) = smith_normal_form(&a);
        assert_eq!(s, m(&[&[1, 0], &[0, 6]]));
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(determinant(&m(&[&[2, 3, 1], &[4, -1, 5], &[0, 7, 3]])), BigInt::from(-84));
        assert_eq!(determinant(&m(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
        proptest::collection::vec(proptest::collection::vec(-9i64..=9, cols), rows)
            .prop_map(|r| to_big(&r))
    }

    proptest! {
        #[test]
        fn hnf_is_self_verifying(a in small_matrix(3, 3)) {
            let (h, u) = hermite_normal_form(&a);
            prop_assert_eq!(&mat_mul(&u, &a), &h);
            prop_assert!(is_unimodular(&u));
            prop_assert_eq!(determinant(&h).abs(), determinant(&a).abs());
        }

        #[test]
        fn snf_is_self_verifying(a in small_matrix(3, 4)) {
            let (s, u, v) = smith_normal_form(&a);
            prop_assert_eq!(&mat_mul(&mat_mul(&u, &a), &v), &s);
            prop_assert!(is_unimodular(&u) && is_unimodular(&v));
            let diag: Vec<BigInt> = (0..3).map(|i| s[i][i].clone()).collect();
            for i in 0..3 {
                for j in 0..4 {
                    if i != j { prop_assert!(s[i][j].is_zero()); }
                }
                prop_assert!(!diag[i].is_negative());
            }
            for w in diag.windows(2) {
                if !w[0].is_zero() { prop_assert!(w[1].is_multiple_of(&w[0])); }
                else { prop_assert!(w[1].is_zero()); }
            }
        }

        #[test]
        fn snf_diagonal_product_is_det(a in small_matrix(3, 3)) {
            let (s, _, _) = smith_normal_form(&a);
            let prod: BigInt = (0..3).map(|i| s[i][i].clone()).product();
            prop_assert_eq!(prod, determinant(&a).abs());
        }
    }
}
