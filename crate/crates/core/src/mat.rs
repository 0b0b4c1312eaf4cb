//! Dense exact linear algebra over Z and Q, sized for the small matrices
//! (rank <= 5) this crate works with.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IMat = Vec<Vec<BigInt>>;
pub type QMat = Vec<Vec<BigRational>>;

pub fn is_symmetric(m: &IMat) -> bool {
    let n = m.len();
    m.iter().all(|row| row.len() == n)
        && (0..n).all(|i| (0..n).all(|j| m[i][j] == m[j][i]))
}

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Determinant by Laplace expansion; fine for the tiny sizes used here.
pub fn det(m: &IMat) -> BigInt {
    let n = m.len();
    match n {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut acc = BigInt::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: IMat = (1..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&k| k != j)
                            .map(|k| m[i][k].clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][j] * det(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    (0..r)
        .map(|i| {
            (0..c)
                .map(|j| (0..k).map(|t| &a[i][t] * &b[t][j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(a: &IMat) -> IMat {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j].clone()).collect()).collect()
}

/// Smith normal form: returns (d, v) with u * m * v = diag(d) for some
/// unimodular u (not returned) and unimodular v.  Diagonal entries are
/// nonnegative, each divides the next, and d[i] stays paired with column i
/// of v (sign fixes are absorbed into the untracked left transform).
pub fn smith_normal_form(m: &IMat) -> (Vec<BigInt>, IMat) {
    let n = m.len();
    let mut a = m.clone();
    let mut v = identity(n);

    let add_col = |a: &mut IMat, v: &mut IMat, from: usize, to: usize, q: &BigInt| {
        for row in a.iter_mut() {
            let t = &row[from] * q;
            row[to] += t;
        }
        for row in v.iter_mut() {
            let t = &row[from] * q;
            row[to] += t;
        }
    };
    let swap_col = |a: &mut IMat, v: &mut IMat, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    };
    let add_row = |a: &mut IMat, from: usize, to: usize, q: &BigInt| {
        for j in 0..a[0].len() {
            let t = &a[from][j] * q;
            a[to][j] += t;
        }
    };

    let mut k = 0;
    while k < n {
        // pivot: entry of smallest absolute value in the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..n {
            for j in k..n {
                if !a[i][j].is_zero()
                    && pivot
                        .map(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(k, pi);
        swap_col(&mut a, &mut v, k, pj);

        let mut clean = true;
        for i in k + 1..n {
            if !a[i][k].is_zero() {
                let q = -(&a[i][k] / &a[k][k]);
                add_row(&mut a, k, i, &q);
                if !a[i][k].is_zero() {
                    clean = false;
                }
            }
        }
        for j in k + 1..n {
            if !a[k][j].is_zero() {
                let q = -(&a[k][j] / &a[k][k]);
                add_col(&mut a, &mut v, k, j, &q);
                if !a[k][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue; // smaller remainders appeared; reselect pivot
        }
        // divisibility fixup: pivot must divide the rest of the block
        let mut fixed = true;
        'outer: for i in k + 1..n {
            for j in k + 1..n {
                if !(&a[i][j] % &a[k][k]).is_zero() {
                    add_row(&mut a, i, k, &BigInt::one());
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if fixed {
            k += 1;
        }
    }

    let d: Vec<BigInt> = (0..n).map(|i| a[i][i].abs()).collect();
    (d, v)
}

/// Row-style Hermite normal form of the lattice spanned by the rows of `m`.
/// Returns a full-rank basis (as rows) of that lattice; panics if the row
/// span has rank < ncols.
pub fn row_basis_hnf(m: &IMat) -> IMat {
    let rows = m.len();
    let cols = m[0].len();
    let mut a = m.clone();
    let mut r = 0;
    for c in 0..cols {
        loop {
            let mut piv: Option<usize> = None;
            for i in r..rows {
                if !a[i][c].is_zero()
                    && piv.map(|p| a[i][c].abs() < a[p][c].abs()).unwrap_or(true)
                {
                    piv = Some(i);
                }
            }
            let Some(p) = piv else { break };
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..rows {
                if !a[i][c].is_zero() {
                    let q = div_round(&a[i][c], &a[r][c]);
                    for j in 0..cols {
                        let t = &a[r][j] * &q;
                        a[i][j] -= t;
                    }
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < rows && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                for j in 0..cols {
                    let neg = -a[r][j].clone();
                    a[r][j] = neg;
                }
            }
            r += 1;
        }
    }
    assert_eq!(r, cols, "row span does not have full rank");
    a.truncate(cols);
    // reduce entries above each pivot for a canonical form
    for c in (0..cols).rev() {
        for i in 0..c {
            if !a[i][c].is_zero() {
                let q = a[i][c].div_floor(&a[c][c]);
                for j in 0..cols {
                    let t = &a[c][j] * &q;
                    a[i][j] -= t;
                }
            }
        }
    }
    a
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest-integer quotient keeps entries small during reduction
    let (q, r) = a.div_rem(b);
    let two_r: BigInt = &r * 2;
    if two_r.abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

pub fn to_rational(m: &IMat) -> QMat {
    m.iter()
        .map(|row| row.iter().map(|x| BigRational::from(x.clone())).collect())
        .collect()
}

/// Congruence diagonalization of a symmetric rational matrix: returns the
/// diagonal entries of b * m * b^T for some invertible rational b.  Zero
/// diagonal entries are returned only if the form is degenerate.
pub fn symmetric_diagonalize(m: &QMat) -> Vec<BigRational> {
    let n = m.len();
    let mut a = m.to_vec();
    for i in 0..n {
        if a[i][i].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(i, j);
                for row in a.iter_mut() {
                    row.swap(i, j);
                }
            } else if let Some(j) = (i + 1..n).find(|&j| !a[i][j].is_zero()) {
                // e_i += e_j makes the diagonal entry 2*a[i][j] != 0
                for k in 0..n {
                    let t = a[j][k].clone();
                    a[i][k] += t;
                }
                for k in 0..n {
                    let t = a[k][j].clone();
                    a[k][i] += t;
                }
            } else {
                continue; // row and diagonal all zero: degenerate direction
            }
        }
        let p = a[i][i].clone();
        for j in i + 1..n {
            if a[i][j].is_zero() {
                continue;
            }
            let f = &a[i][j] / &p;
            for k in 0..n {
                let t = &a[i][k] * &f;
                a[j][k] -= t;
            }
            for k in 0..n {
                let t = &a[k][i] * &f;
                a[k][j] -= t;
            }
        }
    }
    (0..n).map(|i| a[i][i].clone()).collect()
}

/// Solve m x = y for a square invertible rational matrix.
pub fn solve(m: &QMat, y: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut b = y.to_vec();
    for i in 0..n {
        let p = (i..n).find(|&r| !a[r][i].is_zero())?;
        a.swap(i, p);
        b.swap(i, p);
        let piv = a[i][i].clone();
        for j in i..n {
            a[i][j] = &a[i][j] / &piv;
        }
        b[i] = &b[i] / &piv;
        for r in 0..n {
            if r != i && !a[r][i].is_zero() {
                let f = a[r][i].clone();
                for j in i..n {
                    let t = &a[i][j] * &f;
                    a[r][j] -= t;
                }
                let t = &b[i] * &f;
                b[r] -= t;
            }
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IMat {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn det_small() {
        assert_eq!(det(&im(&[&[2]])), BigInt::from(2));
        assert_eq!(det(&im(&[&[1, 2], &[3, 4]])), BigInt::from(-2));
        assert_eq!(det(&identity(4)), BigInt::one());
        let g = im(&[&[-7, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert_eq!(det(&g), BigInt::from(-7));
    }

    #[test]
    fn snf_diagonal_order() {
        let g = im(&[&[-7, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        let (d, v) = smith_normal_form(&g);
        assert_eq!(d, vec![1, 1, 1, 7].into_iter().map(BigInt::from).collect::<Vec<_>>());
        assert_eq!(det(&v).abs(), BigInt::one());
    }

    #[test]
    fn snf_divisibility_chain() {
        let g = im(&[&[2, 0, -1, -1], &[0, 2, 0, 0], &[-1, 0, 2, -4], &[-1, 0, -4, 2]]);
        let (d, _) = smith_normal_form(&g);
        assert_eq!(
            d,
            vec![1, 1, 6, 12].into_iter().map(BigInt::from).collect::<Vec<_>>()
        );
        for w in d.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn snf_transform_consistency() {
        // d produced by snf must equal invariant factors of m, and v must be
        // unimodular; verified via |det m| = prod d and det v = +-1.
        let g = im(&[&[1, 0, -1, 0], &[0, 2, -1, -1], &[-1, -1, 2, -7], &[0, -1, -7, 2]]);
        let (d, v) = smith_normal_form(&g);
        let prod: BigInt = d.iter().product();
        assert_eq!(prod, det(&g).abs());
        assert_eq!(det(&v).abs(), BigInt::one());
    }

    #[test]
    fn hnf_recovers_sublattice_basis() {
        // rows: 2*I4 plus one half-sum row scaled by 2 -> index-2 overlattice of Z^4 scaled
        let m = im(&[
            &[2, 0, 0, 0],
            &[0, 2, 0, 0],
            &[0, 0, 2, 0],
            &[0, 0, 0, 2],
            &[1, 1, 1, 1],
        ]);
        let b = row_basis_hnf(&m);
        let d = det(&b).abs();
        assert_eq!(d, BigInt::from(8)); // covolume 2^4 / 2
    }

    #[test]
    fn diagonalize_one_step() {
        let g = to_rational(&im(&[&[2, -1], &[-1, 2]]));
        let d = symmetric_diagonalize(&g);
        assert_eq!(d[0], BigRational::from(BigInt::from(2)));
        assert_eq!(
            d[1],
            BigRational::new(BigInt::from(3), BigInt::from(2))
        );
    }

    #[test]
    fn diagonalize_zero_diagonal() {
        let g = to_rational(&im(&[&[0, 1], &[1, 0]]));
        let d = symmetric_diagonalize(&g);
        assert!(d.iter().all(|x| !x.is_zero()));
        assert!(d.iter().filter(|x| x.is_negative()).count() == 1);
    }

    #[test]
    fn solve_identity() {
        let g = to_rational(&im(&[&[2, 1], &[1, 2]]));
        let y = vec![
            BigRational::from(BigInt::from(3)),
            BigRational::from(BigInt::from(3)),
        ];
        let x = solve(&g, &y).unwrap();
        assert_eq!(x[0], BigRational::one());
        assert_eq!(x[1], BigRational::one());
    }
}
