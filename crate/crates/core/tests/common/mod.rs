//! Independent oracles used by the property and acceptance suites.  These
//! deliberately avoid the library's own closed-form code paths.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

use vinberg_lab_core::lattice::QuadraticLattice;

/// Hilbert symbol by brute force: reduce square factors of p, then decide
/// isotropy of a x^2 + b y^2 - z^2 over Z_p by exhaustive lifting of
/// primitive solution classes with a Hensel certificate.
pub fn hilbert_oracle(a: i64, b: i64, p: Option<u64>) -> i8 {
    assert!(a != 0 && b != 0);
    let Some(p) = p else {
        return if a < 0 && b < 0 { -1 } else { 1 };
    };
    let p = p as i128;
    let strip = |mut v: i128| -> i128 {
        while v % (p * p) == 0 {
            v /= p * p;
        }
        v
    };
    let a = strip(a as i128);
    let b = strip(b as i128);
    if ternary_isotropic_zp(a, b, p) {
        1
    } else {
        -1
    }
}

fn vp(mut x: i128, p: i128, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while x % p == 0 && v < cap {
        x /= p;
        v += 1;
    }
    v
}

fn inv_mod(a: i128, m: i128) -> i128 {
    // extended euclid; a must be a unit mod m
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert!(r0 == 1);
    t0.rem_euclid(m)
}

fn ternary_isotropic_zp(a: i128, b: i128, p: i128) -> bool {
    let coeffs = [a, b, -1i128];
    let f = |x: &[i128; 3], m: i128| -> i128 {
        let mut acc = 0i128;
        for (c, v) in coeffs.iter().zip(x) {
            acc = (acc + c * ((v * v).rem_euclid(m))).rem_euclid(m);
        }
        acc
    };
    let k_cap = 9u32;
    let canonical = |x: [i128; 3], m: i128| -> [i128; 3] {
        // scale by the inverse of the first unit coordinate
        let i = (0..3)
            .find(|&i| x[i].rem_euclid(p) != 0)
            .expect("primitive class");
        let inv = inv_mod(x[i], m);
        [
            (x[0] * inv).rem_euclid(m),
            (x[1] * inv).rem_euclid(m),
            (x[2] * inv).rem_euclid(m),
        ]
    };
    let mut classes: BTreeSet<[i128; 3]> = BTreeSet::new();
    // level 1, with a table of square roots mod p
    let mut sqrt_table: Vec<Vec<i128>> = vec![Vec::new(); p as usize];
    for z in 0..p {
        sqrt_table[((z * z) % p) as usize].push(z);
    }
    for x in 0..p {
        for y in 0..p {
            let w = (a * x * x + b * y * y).rem_euclid(p);
            for &z in &sqrt_table[w as usize] {
                let s = [x, y, z];
                if s.iter().all(|&v| v % p == 0) {
                    continue;
                }
                debug_assert_eq!(f(&s, p), 0);
                classes.insert(canonical(s, p));
            }
        }
    }
    let mut modulus = p;
    for k in 1..=k_cap {
        if classes.is_empty() {
            return false;
        }
        for s in &classes {
            // Hensel certificate: 2 * min v_p(grad) < k
            let m = (0..3)
                .map(|i| vp(2 * coeffs[i] * s[i], p, k))
                .min()
                .unwrap();
            if 2 * m < k {
                return true;
            }
        }
        assert!(k < k_cap, "oracle undecided at cap for a={a} b={b} p={p}");
        assert!(classes.len() < 100_000, "oracle class explosion");
        let next_modulus = modulus * p;
        let mut next: BTreeSet<[i128; 3]> = BTreeSet::new();
        for s in &classes {
            for t0 in 0..p {
                for t1 in 0..p {
                    for t2 in 0..p {
                        let cand = [
                            s[0] + modulus * t0,
                            s[1] + modulus * t1,
                            s[2] + modulus * t2,
                        ];
                        if f(&cand, next_modulus) == 0 {
                            next.insert(canonical(cand, next_modulus));
                        }
                    }
                }
            }
        }
        classes = next;
        modulus = next_modulus;
    }
    unreachable!()
}

/// Primes up to the bounds used by the acceptance suite.
pub fn primes_to_50() -> Vec<u64> {
    vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
}

/// Exhaustive isotropy search: a nonzero integer vector with coordinates
/// bounded by `bound` and zero norm, if one exists.
pub fn isotropic_vector(l: &QuadraticLattice, bound: i64) -> Option<Vec<i64>> {
    assert_eq!(l.rank(), 4);
    let g: Vec<Vec<i64>> = l
        .gram()
        .iter()
        .map(|row| row.iter().map(|x| i64::try_from(x).unwrap()).collect())
        .collect();
    let q3 = |x: &[i64; 3]| -> i64 {
        let mut acc = 0;
        for i in 0..3 {
            for j in 0..3 {
                acc += x[i] * g[i][j] * x[j];
            }
        }
        acc
    };
    for x0 in 0..=bound {
        for x1 in -bound..=bound {
            for x2 in -bound..=bound {
                let head = [x0, x1, x2];
                // solve g33 t^2 + 2 u t + c = 0 exactly
                let a = g[3][3];
                let u: i64 = (0..3).map(|j| g[3][j] * head[j]).sum();
                let c = q3(&head);
                let disc = u * u - a * c;
                if disc < 0 {
                    continue;
                }
                let r = (disc as f64).sqrt() as i64;
                for rr in [r - 1, r, r + 1] {
                    if rr >= 0 && rr * rr == disc {
                        for num in [-u + rr, -u - rr] {
                            if num.rem_euclid(a.abs()) == 0 {
                                let x3 = num / a;
                                let x = vec![x0, x1, x2, x3];
                                if x.iter().any(|&v| v != 0)
                                    && x.iter().all(|&v| v.abs() <= bound)
                                {
                                    return Some(x);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

/// Fraction-free Bareiss determinant: an independent route from the
/// library's Laplace expansion.
pub fn bareiss_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Brute-force glue search: does any proper integral overlattice of prime
/// index exist?  Enumerates all cosets of (1/p) L directly.
pub fn has_integral_glue(l: &QuadraticLattice) -> bool {
    let det = l.discriminant().abs();
    let primes: Vec<u64> = vinberg_lab_core::local::prime_factors(&det)
        .iter()
        .map(|p| u64::try_from(p).unwrap())
        .collect();
    let n = l.rank();
    for p in primes {
        let pi = p as i64;
        let mut counter = vec![0i64; n];
        loop {
            let mut carry = true;
            for c in counter.iter_mut() {
                *c += 1;
                if *c == pi {
                    *c = 0;
                } else {
                    carry = false;
                    break;
                }
            }
            if carry {
                break;
            }
            // candidate x = counter / p; needs x not in L, x in L*, (x,x) in Z
            if counter.iter().all(|&c| c % pi == 0) {
                continue;
            }
            let m: Vec<BigInt> = counter.iter().map(|&c| BigInt::from(c)).collect();
            let p_big = BigInt::from(p);
            let p2 = &p_big * &p_big;
            // x in L*: (m/p, e_i) in Z for all i
            let in_dual = (0..n).all(|i| {
                let mut acc = BigInt::zero();
                for (j, mj) in m.iter().enumerate() {
                    acc += l.gram_entry(i, j) * mj;
                }
                (acc % &p_big).is_zero()
            });
            if !in_dual {
                continue;
            }
            let norm = l.form(&m, &m);
            if (norm % p2).is_zero() {
                return true;
            }
        }
    }
    false
}
