//! Integral quadratic lattices: invariants, dualization, overlattices and
//! genus-based isomorphism testing.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::local::{self, Prime};
use crate::mat::{self, IMat};

/// A free abelian group of finite rank with a nondegenerate integral
/// symmetric bilinear form, given by the Gram matrix of a basis.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadraticLattice {
    gram: IMat,
    rank: usize,
}

impl fmt::Debug for QuadraticLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticLattice{:?}", self.gram)
    }
}

/// Invariant factors E_1 | E_2 | ... | E_n of the Gram matrix; their product
/// equals |d(L)|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantFactors(pub Vec<BigInt>);

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(", "))
    }
}

/// Inertia of the real quadratic space spanned by the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub positives: usize,
    pub negatives: usize,
}

impl Signature {
    pub fn is_definite(&self) -> bool {
        self.positives == 0 || self.negatives == 0
    }

    /// Hyperbolic means signature (n, 1).
    pub fn is_hyperbolic(&self) -> bool {
        self.negatives == 1 && self.positives >= 1
    }
}

impl QuadraticLattice {
    pub fn new(gram: IMat) -> Result<Self> {
        if gram.is_empty() {
            return Err(Error::EmptyLattice);
        }
        if !mat::is_symmetric(&gram) {
            return Err(Error::NotSymmetric);
        }
        if mat::det(&gram).is_zero() {
            return Err(Error::Singular);
        }
        let rank = gram.len();
        Ok(QuadraticLattice { gram, rank })
    }

    pub fn from_rows(rows: &[&[i64]]) -> Result<Self> {
        let gram = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::new(gram)
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let gram = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigInt::from(entries[i]) } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        QuadraticLattice::new(gram).expect("diagonal entries must be nonzero")
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &IMat {
        &self.gram
    }

    pub fn gram_entry(&self, i: usize, j: usize) -> &BigInt {
        &self.gram[i][j]
    }

    /// det of the Gram matrix.
    pub fn discriminant(&self) -> BigInt {
        mat::det(&self.gram)
    }

    /// Smith-normal-form invariant factors, in divisibility order.
    pub fn invariant_factors(&self) -> InvariantFactors {
        let (d, _) = mat::smith_normal_form(&self.gram);
        InvariantFactors(d)
    }

    /// Exact signature via rational congruence diagonalization.
    pub fn signature(&self) -> Signature {
        let diag = self.rational_diagonalize();
        let positives = diag.iter().filter(|x| x.is_positive()).count();
        let negatives = diag.iter().filter(|x| x.is_negative()).count();
        debug_assert_eq!(positives + negatives, self.rank);
        Signature { positives, negatives }
    }

    /// Diagonal entries of a congruence-diagonalized form over Q.
    pub fn rational_diagonalize(&self) -> Vec<BigRational> {
        mat::symmetric_diagonalize(&mat::to_rational(&self.gram))
    }

    /// Cyclic decomposition of the discriminant group L*/L: the nontrivial
    /// invariant factors.
    pub fn dual_quotient(&self) -> Vec<BigInt> {
        self.invariant_factors()
            .0
            .into_iter()
            .filter(|e| !e.is_one())
            .collect()
    }

    /// Bilinear form on coordinate vectors, x^T G y.
    pub fn form(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                acc += &x[i] * &self.gram[i][j] * &y[j];
            }
        }
        acc
    }

    /// All glue vectors of prime order p in L*/L on which the extended form
    /// stays integral, as coordinate vectors in (1/p) Z^n.  Each is returned
    /// as the numerator vector m with glue = m / p.
    fn integral_glue_numerators(&self) -> Vec<(BigInt, Vec<BigInt>)> {
        let (d, v) = mat::smith_normal_form(&self.gram);
        let n = self.rank;
        // generators of L*/L: column i of v divided by d[i], of order d[i]
        let mut out = Vec::new();
        let mut primes: Vec<BigInt> = Vec::new();
        for e in &d {
            for p in local::prime_factors(e) {
                if !primes.contains(&p) {
                    primes.push(p.clone());
                }
            }
        }
        primes.sort();
        let gram_q = mat::to_rational(&self.gram);
        for p in primes {
            // indices whose cyclic order is divisible by p
            let idx: Vec<usize> = (0..n).filter(|&i| (&d[i] % &p).is_zero()).collect();
            // p-torsion elements: sum of t_i * (d_i/p) * gen_i = (1/p) * sum t_i * v_col_i
            let p_u64 = p
                .to_string()
                .parse::<u64>()
                .expect("glue prime fits in u64");
            let mut t = vec![0u64; idx.len()];
            loop {
                // advance odometer
                let mut carry = true;
                for slot in t.iter_mut() {
                    *slot += 1;
                    if *slot == p_u64 {
                        *slot = 0;
                    } else {
                        carry = false;
                        break;
                    }
                }
                if carry {
                    break;
                }
                let mut m = vec![BigInt::zero(); n];
                for (pos, &i) in idx.iter().enumerate() {
                    if t[pos] == 0 {
                        continue;
                    }
                    let c = BigInt::from(t[pos]);
                    for (row, mrow) in m.iter_mut().enumerate() {
                        *mrow += &c * &v[row][i];
                    }
                }
                if m.iter().all(|x| (x % &p).is_zero()) {
                    continue; // lies in L already
                }
                // glue x = m/p must satisfy (x, x) in Z
                let mq: Vec<BigRational> = m
                    .iter()
                    .map(|x| BigRational::new(x.clone(), p.clone()))
                    .collect();
                let mut norm = BigRational::zero();
                for i in 0..n {
                    for j in 0..n {
                        norm += &mq[i] * &gram_q[i][j] * &mq[j];
                    }
                }
                if norm.is_integer() {
                    out.push((p.clone(), m));
                }
            }
        }
        out
    }

    /// Whether no proper integral overlattice of finite index exists.
    pub fn is_maximal(&self) -> bool {
        self.integral_glue_numerators().is_empty()
    }

    /// Index-p overlattice generated by this lattice and the glue vector
    /// m/p, rewritten on a basis of its own (Gram matrix stays integral).
    fn glue_extension(&self, p: &BigInt, m: &[BigInt]) -> QuadraticLattice {
        let n = self.rank;
        // rows of p * M: p * e_i and m
        let mut rows: IMat = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { p.clone() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        rows.push(m.to_vec());
        let basis_p = mat::row_basis_hnf(&rows); // basis of p*M in old coords
        // gram of M: (1/p^2) * B G B^T
        let bg = mat::mat_mul(&basis_p, &self.gram);
        let bgbt = mat::mat_mul(&bg, &mat::transpose(&basis_p));
        let p2 = p * p;
        let gram: IMat = bgbt
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        let (q, r) = x.div_rem(&p2);
                        debug_assert!(r.is_zero(), "extension form must stay integral");
                        q
                    })
                    .collect()
            })
            .collect();
        QuadraticLattice::new(gram).expect("overlattice form is nondegenerate")
    }

    /// All maximal integral overlattices of finite index, deduplicated by
    /// the genus test where it applies and by Gram equality otherwise.
    pub fn maximal_overlattices(&self) -> Vec<QuadraticLattice> {
        let mut leaves: Vec<QuadraticLattice> = Vec::new();
        let mut stack = vec![self.clone()];
        let mut seen_grams: Vec<IMat> = Vec::new();
        while let Some(l) = stack.pop() {
            let glues = l.integral_glue_numerators();
            if glues.is_empty() {
                if !leaves.iter().any(|m| same_class(m, &l)) {
                    leaves.push(l);
                }
                continue;
            }
            for (p, m) in glues {
                let ext = l.glue_extension(&p, &m);
                if !seen_grams.contains(ext.gram()) {
                    seen_grams.push(ext.gram().clone());
                    stack.push(ext);
                }
            }
        }
        leaves.sort_by(|a, b| a.gram().cmp(b.gram()));
        leaves
    }

    /// Genus-based isomorphism test for indefinite rank-4 lattices whose
    /// invariant factors have, at every prime p, at least two entries with
    /// the same p-adic valuation (each Jordan block of rank >= 2).
    pub fn is_isomorphic(&self, other: &QuadraticLattice) -> Result<bool> {
        for l in [self, other] {
            if l.rank() != 4 {
                return Err(Error::ConditionsNotMet(format!(
                    "rank {} lattice; the genus argument is stated for rank 4",
                    l.rank()
                )));
            }
            if l.signature().is_definite() {
                return Err(Error::ConditionsNotMet(
                    "definite lattice".to_string(),
                ));
            }
            if !valuation_repetition_holds(l) {
                return Err(Error::ConditionsNotMet(
                    "some prime has four distinct invariant-factor valuations".to_string(),
                ));
            }
        }
        if self.signature() != other.signature() {
            return Ok(false);
        }
        if self.invariant_factors() != other.invariant_factors() {
            return Ok(false);
        }
        let da = self.discriminant();
        let db = other.discriminant();
        if da.sign() != db.sign() || local::squarefree_part(&da) != local::squarefree_part(&db) {
            return Ok(false);
        }
        let fa = local::DiagonalForm::new(self.rational_diagonalize())?;
        let fb = local::DiagonalForm::new(other.rational_diagonalize())?;
        let mut primes = vec![BigInt::from(2)];
        for d in [&da, &db] {
            for p in local::prime_factors(d) {
                if !primes.contains(&p) {
                    primes.push(p);
                }
            }
        }
        primes.sort();
        for p in primes {
            let place = Prime::finite(p)?;
            if local::hasse_invariant(&fa, &place) != local::hasse_invariant(&fb, &place) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Equality used when collecting maximal overlattices: the genus test when
/// both sides are in its domain, Gram equality otherwise.
fn same_class(a: &QuadraticLattice, b: &QuadraticLattice) -> bool {
    match a.is_isomorphic(b) {
        Ok(ans) => ans,
        Err(_) => a.gram() == b.gram(),
    }
}

/// For every prime p dividing the discriminant, two invariant factors must
/// share the same p-adic valuation.
fn valuation_repetition_holds(l: &QuadraticLattice) -> bool {
    let factors = l.invariant_factors().0;
    if factors.len() < 2 {
        return false;
    }
    for p in local::prime_factors(&l.discriminant()) {
        let mut vals: Vec<u32> = factors.iter().map(|e| local::valuation(e, &p)).collect();
        vals.sort_unstable();
        if vals.windows(2).all(|w| w[0] != w[1]) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(rows: &[&[i64]]) -> QuadraticLattice {
        QuadraticLattice::from_rows(rows).unwrap()
    }

    #[test]
    fn rejects_bad_grams() {
        assert_eq!(
            QuadraticLattice::from_rows(&[&[1, 2], &[3, 4]]).unwrap_err(),
            Error::NotSymmetric
        );
        assert_eq!(
            QuadraticLattice::from_rows(&[&[1, 1], &[1, 1]]).unwrap_err(),
            Error::Singular
        );
        assert_eq!(QuadraticLattice::new(vec![]).unwrap_err(), Error::EmptyLattice);
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(
            QuadraticLattice::diagonal(&[-7, 1, 1, 1]).discriminant(),
            BigInt::from(-7)
        );
        assert_eq!(
            QuadraticLattice::diagonal(&[-15, 1, 1, 1]).discriminant(),
            BigInt::from(-15)
        );
        assert_eq!(
            QuadraticLattice::diagonal(&[1, 1, 1, 1]).discriminant(),
            BigInt::one()
        );
    }

    #[test]
    fn invariant_factor_examples() {
        let fx = |l: &QuadraticLattice| -> Vec<i64> {
            l.invariant_factors()
                .0
                .iter()
                .map(|x| x.to_string().parse().unwrap())
                .collect()
        };
        assert_eq!(fx(&QuadraticLattice::diagonal(&[-7, 1, 1, 1])), vec![1, 1, 1, 7]);
        assert_eq!(fx(&QuadraticLattice::diagonal(&[1, 1, 1, 1])), vec![1, 1, 1, 1]);
        // frame 24 of the reference catalog
        let g24 = lat(&[
            &[2, 0, -1, -1],
            &[0, 2, 0, 0],
            &[-1, 0, 2, -4],
            &[-1, 0, -4, 2],
        ]);
        assert_eq!(fx(&g24), vec![1, 1, 6, 12]);
    }

    #[test]
    fn invariant_factor_product_is_abs_discriminant() {
        let l = lat(&[
            &[1, 0, -1, 0],
            &[0, 2, -1, -1],
            &[-1, -1, 2, -7],
            &[0, -1, -7, 2],
        ]);
        let prod: BigInt = l.invariant_factors().0.iter().product();
        assert_eq!(prod, l.discriminant().abs());
    }

    #[test]
    fn signature_examples() {
        let sig = QuadraticLattice::diagonal(&[-7, 1, 1, 1]).signature();
        assert_eq!(sig, Signature { positives: 3, negatives: 1 });
        assert!(sig.is_hyperbolic());
        let sig = QuadraticLattice::diagonal(&[1, 1, 1, 1]).signature();
        assert_eq!(sig, Signature { positives: 4, negatives: 0 });
        assert!(sig.is_definite());
        // frame 1 of the reference catalog
        let g1 = lat(&[
            &[1, 0, -1, -1],
            &[0, 1, 0, 0],
            &[-1, 0, 2, -3],
            &[-1, 0, -3, 2],
        ]);
        assert_eq!(g1.signature(), Signature { positives: 3, negatives: 1 });
    }

    #[test]
    fn dual_quotient_examples() {
        assert_eq!(
            QuadraticLattice::diagonal(&[-7, 1, 1, 1]).dual_quotient(),
            vec![BigInt::from(7)]
        );
        assert!(QuadraticLattice::diagonal(&[1, 1, 1, 1]).dual_quotient().is_empty());
        let g24 = lat(&[
            &[2, 0, -1, -1],
            &[0, 2, 0, 0],
            &[-1, 0, 2, -4],
            &[-1, 0, -4, 2],
        ]);
        assert_eq!(g24.dual_quotient(), vec![BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn rational_diagonalize_square_class() {
        // already diagonal is returned as-is
        let d = QuadraticLattice::diagonal(&[-7, 1, 1, 1]).rational_diagonalize();
        let expect: Vec<BigRational> = [-7i64, 1, 1, 1]
            .iter()
            .map(|&x| BigRational::from(BigInt::from(x)))
            .collect();
        assert_eq!(d, expect);
        // frame 2: product of the diagonal lies in the square class of -7
        let g2 = lat(&[
            &[1, 0, 0, 0],
            &[0, 2, -1, 0],
            &[0, -1, 1, -2],
            &[0, 0, -2, 1],
        ]);
        let prod: BigRational = g2.rational_diagonalize().iter().product();
        let sq = local::squarefree_part(&(prod.numer() * prod.denom()));
        assert_eq!(sq, BigInt::from(-7));
    }

    #[test]
    fn maximal_overlattice_of_g24_is_l10() {
        let g24 = lat(&[
            &[2, 0, -1, -1],
            &[0, 2, 0, 0],
            &[-1, 0, 2, -4],
            &[-1, 0, -4, 2],
        ]);
        let maxes = g24.maximal_overlattices();
        assert_eq!(maxes.len(), 1);
        let l10 = QuadraticLattice::diagonal(&[-1, 3, 3, 2]);
        assert!(maxes[0].is_isomorphic(&l10).unwrap());
        assert_eq!(maxes[0].discriminant(), BigInt::from(-18));
    }

    #[test]
    fn maximal_overlattice_of_g23_is_l2() {
        let g23 = lat(&[
            &[2, 0, -1, 0],
            &[0, 2, -1, 0],
            &[-1, -1, 2, -3],
            &[0, 0, -3, 2],
        ]);
        assert_eq!(g23.discriminant(), BigInt::from(-28));
        let maxes = g23.maximal_overlattices();
        assert_eq!(maxes.len(), 1);
        let l2 = QuadraticLattice::diagonal(&[-7, 1, 1, 1]);
        assert!(maxes[0].is_isomorphic(&l2).unwrap());
    }

    #[test]
    fn already_maximal_lattice_returns_itself() {
        let l2 = QuadraticLattice::diagonal(&[-7, 1, 1, 1]);
        assert!(l2.is_maximal());
        let maxes = l2.maximal_overlattices();
        assert_eq!(maxes.len(), 1);
        assert_eq!(maxes[0].gram(), l2.gram());
    }

    #[test]
    fn overlattice_index_squares() {
        // k^2 * |d(M)| = |d(L)| for every maximal overlattice
        let g25 = lat(&[
            &[2, 0, -1, -1],
            &[0, 2, -1, -1],
            &[-1, -1, 2, -3],
            &[-1, -1, -3, 2],
        ]);
        let dl = g25.discriminant().abs();
        for m in g25.maximal_overlattices() {
            let dm = m.discriminant().abs();
            let ratio = &dl / &dm;
            assert!((&dl % &dm).is_zero());
            let k = num_integer::sqrt(ratio.clone());
            assert_eq!(&k * &k, ratio);
        }
    }

    #[test]
    fn maximal_lattices_have_squarefree_factors() {
        let g24 = lat(&[
            &[2, 0, -1, -1],
            &[0, 2, 0, 0],
            &[-1, 0, 2, -4],
            &[-1, 0, -4, 2],
        ]);
        for m in g24.maximal_overlattices() {
            for e in m.invariant_factors().0 {
                for p in local::prime_factors(&e) {
                    assert!(local::valuation(&e, &p) <= 1);
                }
            }
        }
    }

    #[test]
    fn genus_test_accepts_frame7_vs_l4() {
        let g7 = lat(&[
            &[1, 0, -1, 0],
            &[0, 2, -1, 0],
            &[-1, -1, 2, -4],
            &[0, 0, -4, 1],
        ]);
        assert_eq!(g7.discriminant(), BigInt::from(-31));
        let l4 = QuadraticLattice::diagonal(&[-31, 1, 1, 1]);
        assert!(g7.is_isomorphic(&l4).unwrap());
    }

    #[test]
    fn genus_test_separates_same_discriminant_lattices() {
        let l1 = QuadraticLattice::diagonal(&[-15, 1, 1, 1]);
        let l5 = QuadraticLattice::diagonal(&[-3, 5, 1, 1]);
        assert_eq!(l1.discriminant(), l5.discriminant());
        assert_eq!(l1.invariant_factors(), l5.invariant_factors());
        assert!(!l1.is_isomorphic(&l5).unwrap());
    }

    #[test]
    fn genus_test_is_reflexive_on_catalog_style_lattices() {
        for entries in [[-15, 1, 1, 1], [-3, 5, 1, 1], [-1, 3, 3, 2]] {
            let l = QuadraticLattice::diagonal(&entries);
            assert!(l.is_isomorphic(&l).unwrap());
        }
    }

    #[test]
    fn genus_test_rejects_definite_input() {
        let a = QuadraticLattice::diagonal(&[1, 1, 1, 1]);
        let b = QuadraticLattice::diagonal(&[-7, 1, 1, 1]);
        assert!(matches!(
            a.is_isomorphic(&b),
            Err(Error::ConditionsNotMet(_))
        ));
    }
}
