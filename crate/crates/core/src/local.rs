//! p-adic invariants of rational quadratic forms: Hilbert symbols, Hasse
//! invariants and the rank-4 anisotropy decision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::QuadraticLattice;

/// A place of Q: a finite prime or the real place.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Prime {
    Finite(BigInt),
    Infinity,
}

impl Prime {
    pub fn finite(p: BigInt) -> Result<Self> {
        if is_prime(&p) {
            Ok(Prime::Finite(p))
        } else {
            Err(Error::NotPrime(p.to_string()))
        }
    }

    pub fn finite_u64(p: u64) -> Result<Self> {
        Self::finite(BigInt::from(p))
    }
}

impl std::fmt::Display for Prime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Prime::Finite(p) => write!(f, "{p}"),
            Prime::Infinity => write!(f, "infinity"),
        }
    }
}

/// Nonzero coefficients of a diagonalized quadratic form over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalForm {
    coefficients: Vec<BigRational>,
}

impl DiagonalForm {
    pub fn new(coefficients: Vec<BigRational>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Invalid("diagonal form must be nonempty".into()));
        }
        if coefficients.iter().any(|c| c.is_zero()) {
            return Err(Error::Invalid("diagonal form has a zero coefficient".into()));
        }
        Ok(DiagonalForm { coefficients })
    }

    pub fn from_integers(entries: &[i64]) -> Self {
        Self::new(
            entries
                .iter()
                .map(|&x| BigRational::from(BigInt::from(x)))
                .collect(),
        )
        .expect("nonzero entries")
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    /// Product of the coefficients: the determinant of the diagonal form.
    pub fn determinant(&self) -> BigRational {
        self.coefficients.iter().product()
    }
}

pub fn is_prime(n: &BigInt) -> bool {
    if n <= &BigInt::one() {
        return false;
    }
    let two = BigInt::from(2);
    if n == &two {
        return true;
    }
    if (n % &two).is_zero() {
        return false;
    }
    let mut d = BigInt::from(3);
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors of |n| by trial division; empty for 0 and units.
pub fn prime_factors(n: &BigInt) -> Vec<BigInt> {
    let mut m = n.abs();
    let mut out = Vec::new();
    if m <= BigInt::one() {
        return out;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= m {
        if (&m % &d).is_zero() {
            out.push(d.clone());
            while (&m % &d).is_zero() {
                m /= &d;
            }
        }
        d += 1u32;
    }
    if m > BigInt::one() {
        out.push(m);
    }
    out
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let mut m = n.abs();
    let mut v = 0;
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    v
}

/// Squarefree part with sign: the canonical representative of the square
/// class of a nonzero integer.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    assert!(!n.is_zero());
    let mut out = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    for p in prime_factors(n) {
        if valuation(n, &p) % 2 == 1 {
            out *= p;
        }
    }
    out
}

/// Legendre symbol (a|p) for an odd prime p and a coprime to p.
fn legendre(a: &BigInt, p: &BigInt) -> i8 {
    let a = a.mod_floor(p);
    debug_assert!(!a.is_zero());
    let e = (p - 1u32) / 2u32;
    let r = a.modpow(&e, p);
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// Valuation and unit part of a nonzero rational at a finite prime.
fn split_at(x: &BigRational, p: &BigInt) -> (i64, BigInt, BigInt) {
    let vn = valuation(x.numer(), p) as i64;
    let vd = valuation(x.denom(), p) as i64;
    let pn = p.pow(vn as u32);
    let pd = p.pow(vd as u32);
    (vn - vd, x.numer() / pn, x.denom() / pd)
}

/// Residue of the unit part of x modulo m (m = p or 8), for num/den coprime
/// to m's prime.
fn unit_residue(num: &BigInt, den: &BigInt, m: &BigInt) -> BigInt {
    let num = num.mod_floor(m);
    let den = den.mod_floor(m);
    let inv = mod_inverse(&den, m);
    (num * inv).mod_floor(m)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let egcd = a.extended_gcd(m);
    debug_assert!(egcd.gcd.is_one());
    egcd.x.mod_floor(m)
}

/// Hilbert symbol (a, b)_p: +1 iff a x^2 + b y^2 = 1 is solvable over Q_p
/// (over R when p is the real place).  Computed by the valuation/residue
/// closed form.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, p: &Prime) -> i8 {
    assert!(!a.is_zero() && !b.is_zero(), "hilbert symbol needs nonzero arguments");
    match p {
        Prime::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Prime::Finite(p) if p == &BigInt::from(2) => {
            let (va, na, da) = split_at(a, p);
            let (vb, nb, db) = split_at(b, p);
            let eight = BigInt::from(8);
            let u = unit_residue(&na, &da, &eight);
            let v = unit_residue(&nb, &db, &eight);
            let eps = |x: &BigInt| ((x.mod_floor(&BigInt::from(4))) == BigInt::from(3)) as i64;
            let omega = |x: &BigInt| {
                let r = x.mod_floor(&eight);
                (r == BigInt::from(3) || r == BigInt::from(5)) as i64
            };
            let e = eps(&u) * eps(&v) + va * omega(&v) + vb * omega(&u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Prime::Finite(p) => {
            let (va, na, da) = split_at(a, p);
            let (vb, nb, db) = split_at(b, p);
            let u = unit_residue(&na, &da, p);
            let v = unit_residue(&nb, &db, p);
            let mut s = 1i8;
            if (va * vb) % 2 != 0 && legendre(&-BigInt::one(), p) == -1 {
                s = -s;
            }
            if vb % 2 != 0 && legendre(&u, p) == -1 {
                s = -s;
            }
            if va % 2 != 0 && legendre(&v, p) == -1 {
                s = -s;
            }
            s
        }
    }
}

/// Hasse invariant: product of the pairwise Hilbert symbols over i < j.
pub fn hasse_invariant(f: &DiagonalForm, p: &Prime) -> i8 {
    let c = f.coefficients();
    let mut s = 1i8;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            s *= hilbert_symbol(&c[i], &c[j], p);
        }
    }
    s
}

/// Whether a nonzero rational is a square in Q_p (in R for the real place).
pub fn is_square_in_qp(x: &BigRational, p: &Prime) -> bool {
    match p {
        Prime::Infinity => x.is_positive(),
        Prime::Finite(p) if p == &BigInt::from(2) => {
            let (v, n, d) = split_at(x, p);
            let u = unit_residue(&n, &d, &BigInt::from(8));
            v % 2 == 0 && u.is_one()
        }
        Prime::Finite(p) => {
            let (v, n, d) = split_at(x, p);
            let u = unit_residue(&n, &d, p);
            v % 2 == 0 && legendre(&u, p) == 1
        }
    }
}

/// Local anisotropy of a rank-4 lattice: for finite p the form is
/// anisotropic iff its determinant is a p-adic square and the Hasse
/// invariant equals -(-1,-1)_p; at the real place iff the form is definite.
pub fn is_anisotropic_local(l: &QuadraticLattice, p: &Prime) -> Result<bool> {
    if l.rank() != 4 {
        return Err(Error::RankNotFour(l.rank()));
    }
    match p {
        Prime::Infinity => Ok(l.signature().is_definite()),
        _ => {
            let f = DiagonalForm::new(l.rational_diagonalize())?;
            let d = f.determinant();
            if !is_square_in_qp(&d, p) {
                return Ok(false);
            }
            let minus_one = BigRational::from(-BigInt::one());
            let target = -hilbert_symbol(&minus_one, &minus_one, p);
            Ok(hasse_invariant(&f, p) == target)
        }
    }
}

/// Global anisotropy of a rank-4 lattice.  A rank-4 form over Q has a
/// nontrivial rational zero iff it has one over every completion, and it is
/// automatically isotropic at every odd prime not dividing the discriminant;
/// so it suffices to look for one anisotropic place among the real place,
/// 2, and the primes of d(L).
pub fn is_anisotropic_global(l: &QuadraticLattice) -> Result<bool> {
    if l.rank() != 4 {
        return Err(Error::RankNotFour(l.rank()));
    }
    if l.signature().is_definite() {
        return Ok(true);
    }
    let mut primes = vec![BigInt::from(2)];
    for p in prime_factors(&l.discriminant()) {
        if !primes.contains(&p) {
            primes.push(p);
        }
    }
    for p in primes {
        if is_anisotropic_local(l, &Prime::Finite(p))? {
            return Ok(true);
        }
    }
    Ok(false)
}
