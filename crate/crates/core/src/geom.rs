//! Vector-model geometry over a hyperbolic lattice: roots, reflections,
//! distances and facet relations.  All quantities are exact rationals;
//! distances are carried as squared hyperbolic sines or squared cosines.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::QuadraticLattice;
use crate::mat;

/// A point of L (x) Q in the coordinates of the lattice basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeVector {
    lattice: Arc<QuadraticLattice>,
    coords: Vec<BigRational>,
}

impl LatticeVector {
    pub fn new(lattice: Arc<QuadraticLattice>, coords: Vec<BigRational>) -> Result<Self> {
        if coords.len() != lattice.rank() {
            return Err(Error::Invalid(format!(
                "vector has {} coordinates in a rank-{} lattice",
                coords.len(),
                lattice.rank()
            )));
        }
        Ok(LatticeVector { lattice, coords })
    }

    pub fn from_integers(lattice: Arc<QuadraticLattice>, coords: &[i64]) -> Result<Self> {
        Self::new(
            lattice,
            coords
                .iter()
                .map(|&x| BigRational::from(BigInt::from(x)))
                .collect(),
        )
    }

    pub fn lattice(&self) -> &Arc<QuadraticLattice> {
        &self.lattice
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn integer_coords(&self) -> Option<Vec<BigInt>> {
        self.coords
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    fn same_lattice(&self, other: &LatticeVector) -> bool {
        Arc::ptr_eq(&self.lattice, &other.lattice) || self.lattice == other.lattice
    }
}

/// Exact bilinear form x^T G y of two vectors over the same lattice.
pub fn inner(x: &LatticeVector, y: &LatticeVector) -> Result<BigRational> {
    if !x.same_lattice(y) {
        return Err(Error::LatticeMismatch);
    }
    let g = x.lattice.gram();
    let n = x.coords.len();
    let mut acc = BigRational::zero();
    for i in 0..n {
        if x.coords[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if y.coords[j].is_zero() {
                continue;
            }
            acc += &x.coords[i] * BigRational::from(g[i][j].clone()) * &y.coords[j];
        }
    }
    Ok(acc)
}

/// A primitive lattice vector e with (e,e) = k > 0 satisfying the
/// crystallographic condition 2(e, x) = 0 mod k for all x in the lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    vector: LatticeVector,
    coords: Vec<BigInt>,
    norm: BigInt,
}

impl Root {
    pub fn new(lattice: Arc<QuadraticLattice>, coords: Vec<BigInt>) -> Result<Self> {
        if !is_root_coords(&lattice, &coords) {
            return Err(Error::Invalid(format!(
                "{coords:?} is not a root of the lattice"
            )));
        }
        let norm = lattice.form(&coords, &coords);
        let vector = LatticeVector::new(
            lattice,
            coords.iter().map(|c| BigRational::from(c.clone())).collect(),
        )?;
        Ok(Root { vector, coords, norm })
    }

    pub fn from_integers(lattice: Arc<QuadraticLattice>, coords: &[i64]) -> Result<Self> {
        Self::new(lattice, coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn vector(&self) -> &LatticeVector {
        &self.vector
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn norm(&self) -> &BigInt {
        &self.norm
    }

    pub fn lattice(&self) -> &Arc<QuadraticLattice> {
        self.vector.lattice()
    }
}

/// Root test on raw integer coordinates: primitive, positive norm k, and
/// 2(e, b_i) divisible by k for every basis vector b_i.
pub fn is_root_coords(lattice: &QuadraticLattice, coords: &[BigInt]) -> bool {
    if coords.len() != lattice.rank() {
        return false;
    }
    let gcd = coords
        .iter()
        .fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !gcd.is_one() {
        return false;
    }
    let k = lattice.form(coords, coords);
    if !k.is_positive() {
        return false;
    }
    // 2 * (G e)_i = 0 mod k for all i
    let g = lattice.gram();
    for row in g {
        let mut ge = BigInt::zero();
        for (j, c) in coords.iter().enumerate() {
            ge += &row[j] * c;
        }
        if !(BigInt::from(2) * ge % &k).is_zero() {
            return false;
        }
    }
    true
}

/// Root test matching the spec surface: e must carry integer coordinates
/// and satisfy the conditions above with (e,e) = k.
pub fn is_root(e: &LatticeVector, k: &BigInt) -> bool {
    match e.integer_coords() {
        Some(coords) => {
            is_root_coords(e.lattice(), &coords) && &e.lattice().form(&coords, &coords) == k
        }
        None => false,
    }
}

/// Image of x under the reflection in the mirror of e.
pub fn reflect(x: &LatticeVector, e: &Root) -> Result<LatticeVector> {
    let xe = inner(x, e.vector())?;
    let factor = BigRational::from(BigInt::from(2)) * xe
        / BigRational::from(e.norm().clone());
    let coords = x
        .coords()
        .iter()
        .zip(e.coords())
        .map(|(xi, ei)| xi - &factor * BigRational::from(ei.clone()))
        .collect();
    LatticeVector::new(x.lattice().clone(), coords)
}

/// Squared hyperbolic sine of the distance from a negative-norm point to
/// the plane orthogonal to the given normals.  The point is normalized
/// internally, so any negative-norm scaling may be passed.
pub fn sinh_sq_distance(e0: &LatticeVector, normals: &[Root]) -> Result<BigRational> {
    let vectors: Vec<LatticeVector> = normals.iter().map(|r| r.vector().clone()).collect();
    sinh_sq_distance_to_span(e0, &vectors)
}

/// Same distance computed from an arbitrary basis of the normal span; the
/// value depends only on the subspace the normals generate.
pub fn sinh_sq_distance_to_span(
    e0: &LatticeVector,
    normals: &[LatticeVector],
) -> Result<BigRational> {
    if normals.is_empty() {
        return Err(Error::DegenerateFrame);
    }
    let norm0 = inner(e0, e0)?;
    if !norm0.is_negative() {
        return Err(Error::Invalid("base point must have negative norm".into()));
    }
    let k = normals.len();
    let mut gram = vec![vec![BigRational::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = inner(&normals[i], &normals[j])?;
        }
    }
    // positive definiteness via leading principal minors
    for s in 1..=k {
        let sub: Vec<Vec<BigRational>> =
            (0..s).map(|i| (0..s).map(|j| gram[i][j].clone()).collect()).collect();
        if !rational_det(&sub).is_positive() {
            return Err(Error::DegenerateFrame);
        }
    }
    let y: Vec<BigRational> = normals
        .iter()
        .map(|a| inner(e0, a).map(|v| -v))
        .collect::<Result<_>>()?;
    let sol = mat::solve(&gram, &y).ok_or(Error::DegenerateFrame)?;
    let mut quad = BigRational::zero();
    for i in 0..k {
        quad += &y[i] * &sol[i];
    }
    Ok(quad / -norm0)
}

fn rational_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    match n {
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut acc = BigRational::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigRational>> = (1..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| m[i][c].clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][j] * rational_det(&minor);
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

/// How two mirror hyperplanes meet, classified by the exact rational
/// (u,v)^2 / ((u,u)(v,v)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FacetRelation {
    /// Dihedral angle pi/m for m in {2, 3, 4, 6}.
    Angle(u32),
    /// Intersecting at an angle whose squared cosine is not one of the
    /// crystallographic values above.
    AngleGeneral(BigRational),
    Parallel,
    /// Divergent mirrors; the value is the squared hyperbolic cosine of
    /// their distance.
    Divergent(BigRational),
}

impl FacetRelation {
    pub fn cos_squared(&self) -> BigRational {
        match self {
            FacetRelation::Angle(2) => BigRational::zero(),
            FacetRelation::Angle(3) => BigRational::new(BigInt::one(), BigInt::from(4)),
            FacetRelation::Angle(4) => BigRational::new(BigInt::one(), BigInt::from(2)),
            FacetRelation::Angle(6) => BigRational::new(BigInt::from(3), BigInt::from(4)),
            FacetRelation::Angle(_) => unreachable!("only m in {{2,3,4,6}} is constructed"),
            FacetRelation::AngleGeneral(q) => q.clone(),
            FacetRelation::Parallel => BigRational::one(),
            FacetRelation::Divergent(q) => q.clone(),
        }
    }

    pub fn is_edge(&self) -> bool {
        !matches!(self, FacetRelation::Angle(2))
    }
}

/// Classify the relation of the mirrors of two roots.
pub fn facet_relation(u: &Root, v: &Root) -> Result<FacetRelation> {
    let uv = inner(u.vector(), v.vector())?;
    let q = &uv * &uv
        / (BigRational::from(u.norm().clone()) * BigRational::from(v.norm().clone()));
    let one = BigRational::one();
    Ok(if q < one {
        if q.is_zero() {
            FacetRelation::Angle(2)
        } else if q == BigRational::new(BigInt::one(), BigInt::from(4)) {
            FacetRelation::Angle(3)
        } else if q == BigRational::new(BigInt::one(), BigInt::from(2)) {
            FacetRelation::Angle(4)
        } else if q == BigRational::new(BigInt::from(3), BigInt::from(4)) {
            FacetRelation::Angle(6)
        } else {
            FacetRelation::AngleGeneral(q)
        }
    } else if q == one {
        FacetRelation::Parallel
    } else {
        FacetRelation::Divergent(q)
    })
}
