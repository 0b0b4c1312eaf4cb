//! Coxeter-diagram construction, subdiagram classification, exact
//! finite-volume testing via extreme-ray enumeration, and the test for
//! finiteness of the group generated by reflections of norm outside {1,2}.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::{facet_relation, FacetRelation, Root};
use crate::lattice::QuadraticLattice;
use crate::mat;

/// Weighted graph over a root set; every unordered pair carries its exact
/// facet relation (right angles are kept as explicit non-edges).
#[derive(Clone, Debug)]
pub struct CoxeterDiagram {
    pub nodes: Vec<(usize, BigInt)>,
    pub edges: BTreeMap<(usize, usize), FacetRelation>,
}

/// A vertex of the polyhedron: a defining facet triple, the full active
/// facet set, the primitive ray vector and whether it is at infinity.
#[derive(Clone, Debug)]
pub struct Vertex {
    pub triple: [usize; 3],
    pub active: Vec<usize>,
    pub vector: Vec<BigInt>,
    pub ideal: bool,
}

#[derive(Clone, Debug)]
pub struct PolyhedronCombinatorics {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
}

/// Finite-volume verdict with a witness on failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VolumeVerdict {
    FiniteVolume,
    InfiniteVolume(VolumeWitness),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VolumeWitness {
    /// A nonzero direction orthogonal to every mirror: the half-space
    /// intersection contains a line.
    NotPointed(Vec<BigInt>),
    /// An extreme ray leaving the light cone: an edge of the polyhedron
    /// that does not end in a vertex.
    SpacelikeRay(Vec<BigInt>),
    /// The half-space intersection has no extreme ray at all.
    NoVertex,
}

impl VolumeVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, VolumeVerdict::FiniteVolume)
    }
}

pub fn build_diagram(roots: &[Root]) -> Result<CoxeterDiagram> {
    let nodes = roots
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.norm().clone()))
        .collect();
    let mut edges = BTreeMap::new();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            edges.insert((i, j), facet_relation(&roots[i], &roots[j])?);
        }
    }
    Ok(CoxeterDiagram { nodes, edges })
}

fn subset_gram(roots: &[Root]) -> Result<mat::IMat> {
    let m = roots.len();
    let mut g = vec![vec![BigInt::zero(); m]; m];
    for i in 0..m {
        for j in 0..m {
            let v = crate::geom::inner(roots[i].vector(), roots[j].vector())?;
            debug_assert!(v.is_integer());
            g[i][j] = v.to_integer();
        }
    }
    Ok(g)
}

/// Positive definiteness of the subset Gram matrix, by leading principal
/// minors.
pub fn is_elliptic(roots: &[Root]) -> Result<bool> {
    if roots.is_empty() {
        return Err(Error::Invalid("empty root subset".into()));
    }
    let g = subset_gram(roots)?;
    for s in 1..=roots.len() {
        let sub: mat::IMat = (0..s).map(|i| g[i][..s].to_vec()).collect();
        if !mat::det(&sub).is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Positive semidefinite, singular, and singular on every connected
/// component of the subset diagram.
pub fn is_parabolic(roots: &[Root]) -> Result<bool> {
    if roots.is_empty() {
        return Err(Error::Invalid("empty root subset".into()));
    }
    let m = roots.len();
    let g = subset_gram(roots)?;
    // PSD: every principal minor is nonnegative
    for mask in 1u32..(1 << m) {
        let idx: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        let sub: mat::IMat = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| g[i][j].clone()).collect())
            .collect();
        if mat::det(&sub).is_negative() {
            return Ok(false);
        }
    }
    if !mat::det(&g).is_zero() {
        return Ok(false);
    }
    // every connected component must itself be singular
    let mut seen = vec![false; m];
    for start in 0..m {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut cursor = 0;
        while cursor < comp.len() {
            let i = comp[cursor];
            cursor += 1;
            for j in 0..m {
                if !seen[j] && !g[i][j].is_zero() {
                    seen[j] = true;
                    comp.push(j);
                }
            }
        }
        let sub: mat::IMat = comp
            .iter()
            .map(|&i| comp.iter().map(|&j| g[i][j].clone()).collect())
            .collect();
        if !mat::det(&sub).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Selects the roots of norm outside {1,2} and reports whether the group
/// generated by their reflections is finite (equivalently, whether their
/// Gram matrix is positive definite).
pub fn bad_reflections_finite(roots: &[Root]) -> Result<bool> {
    let bad: Vec<Root> = roots
        .iter()
        .filter(|r| *r.norm() != BigInt::one() && *r.norm() != BigInt::from(2))
        .cloned()
        .collect();
    if bad.is_empty() {
        return Ok(true);
    }
    is_elliptic(&bad)
}

// ---------------------------------------------------------------------------
// Extreme-ray enumeration for the cone {x : (x, a_i) <= 0}.
// ---------------------------------------------------------------------------

trait RayInt: Clone + Ord + Signed + Integer + std::fmt::Debug {}
impl<T: Clone + Ord + Signed + Integer + std::fmt::Debug> RayInt for T {}

struct RayData<T> {
    /// reduced ray vector, its active facet set, and the sign of (v, v)
    rays: Vec<(Vec<T>, Vec<usize>, std::cmp::Ordering)>,
    pointed: bool,
    kernel_witness: Option<Vec<T>>,
}

fn det3<T: RayInt>(m: &[[T; 3]; 3]) -> T {
    let a = m[0][0].clone() * (m[1][1].clone() * m[2][2].clone() - m[1][2].clone() * m[2][1].clone());
    let b = m[0][1].clone() * (m[1][0].clone() * m[2][2].clone() - m[1][2].clone() * m[2][0].clone());
    let c = m[0][2].clone() * (m[1][0].clone() * m[2][1].clone() - m[1][1].clone() * m[2][0].clone());
    a - b + c
}

/// Generalized cross product: a vector orthogonal to the three given rows
/// of a 3x4 matrix, zero iff they are dependent.
fn cross4<T: RayInt>(rows: &[&[T]; 3]) -> Vec<T> {
    let mut v = Vec::with_capacity(4);
    for drop in 0..4usize {
        let cols: Vec<usize> = (0..4).filter(|&c| c != drop).collect();
        let m = [
            [rows[0][cols[0]].clone(), rows[0][cols[1]].clone(), rows[0][cols[2]].clone()],
            [rows[1][cols[0]].clone(), rows[1][cols[1]].clone(), rows[1][cols[2]].clone()],
            [rows[2][cols[0]].clone(), rows[2][cols[1]].clone(), rows[2][cols[2]].clone()],
        ];
        let d = det3(&m);
        v.push(if drop % 2 == 0 { d } else { -d });
    }
    v
}

fn gcd_reduce<T: RayInt>(v: &mut [T]) {
    let mut g = T::zero();
    for x in v.iter() {
        g = g.gcd(x);
    }
    if g > T::one() {
        for x in v.iter_mut() {
            *x = x.clone() / g.clone();
        }
    }
}

fn dot<T: RayInt>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.clone() * y.clone();
    }
    acc
}

fn gram_norm<T: RayInt>(gram: &[Vec<T>], v: &[T]) -> T {
    let mut acc = T::zero();
    for i in 0..v.len() {
        if v[i].is_zero() {
            continue;
        }
        for j in 0..v.len() {
            acc = acc + v[i].clone() * gram[i][j].clone() * v[j].clone();
        }
    }
    acc
}

/// All extreme rays of {x in R^4 : w_l . x <= 0}, where w_l are the rows of
/// the (root x basis) inner-product matrix.
fn extreme_rays<T: RayInt>(gram: &[Vec<T>], w: &[Vec<T>]) -> RayData<T> {
    let m = w.len();
    // pointedness: the w_l must span rank 4
    if let Some(kernel) = row_space_kernel(w) {
        return RayData { rays: Vec::new(), pointed: false, kernel_witness: Some(kernel) };
    }
    let mut seen: BTreeSet<Vec<T>> = BTreeSet::new();
    let mut rays = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let rows = [&w[i][..], &w[j][..], &w[k][..]];
                let mut v = cross4(&rows);
                if v.iter().all(|x| x.is_zero()) {
                    continue; // dependent triple
                }
                gcd_reduce(&mut v);
                // try both orientations against all constraints
                let mut valid: Option<Vec<T>> = None;
                'sign: for flip in [false, true] {
                    let cand: Vec<T> = if flip {
                        v.iter().map(|x| -x.clone()).collect()
                    } else {
                        v.clone()
                    };
                    for row in w {
                        if dot(row, &cand).is_positive() {
                            continue 'sign;
                        }
                    }
                    valid = Some(cand);
                    break;
                }
                let Some(ray) = valid else { continue };
                if seen.contains(&ray) {
                    continue;
                }
                seen.insert(ray.clone());
                let active: Vec<usize> =
                    (0..m).filter(|&l| dot(&w[l], &ray).is_zero()).collect();
                let norm_sign = gram_norm(gram, &ray).cmp(&T::zero());
                rays.push((ray, active, norm_sign));
            }
        }
    }
    RayData { rays, pointed: true, kernel_witness: None }
}

/// A nonzero kernel vector of the row space, if the rows do not span R^4.
fn row_space_kernel<T: RayInt>(w: &[Vec<T>]) -> Option<Vec<T>> {
    // gather an independent subset by greedy rank computation
    let mut basis: Vec<Vec<T>> = Vec::new();
    for row in w {
        if row.iter().all(|x| x.is_zero()) {
            continue;
        }
        let mut trial = basis.clone();
        trial.push(row.clone());
        if rank(&trial) > basis.len() {
            basis.push(row.clone());
            if basis.len() == 4 {
                return None;
            }
        }
    }
    match basis.len() {
        3 => {
            let rows = [&basis[0][..], &basis[1][..], &basis[2][..]];
            let mut v = cross4(&rows);
            gcd_reduce(&mut v);
            Some(v)
        }
        _ => {
            // rank <= 2: complete with unit vectors until rank 3, then cross
            for axis in 0..4 {
                let mut unit = vec![T::zero(); 4];
                unit[axis] = T::one();
                let mut trial = basis.clone();
                trial.push(unit.clone());
                if rank(&trial) > basis.len() {
                    basis.push(unit);
                    if basis.len() == 3 {
                        let rows = [&basis[0][..], &basis[1][..], &basis[2][..]];
                        let mut v = cross4(&rows);
                        gcd_reduce(&mut v);
                        return Some(v);
                    }
                }
            }
            // rank 0: anything is orthogonal
            Some(vec![T::one(), T::zero(), T::zero(), T::zero()])
        }
    }
}

fn rank<T: RayInt>(rows: &[Vec<T>]) -> usize {
    // fraction-free elimination on a copy
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let ncols = 4;
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let (pa, pb) = (a[r][c].clone(), a[i][c].clone());
            for j in 0..ncols {
                a[i][j] = a[i][j].clone() * pa.clone() - a[r][j].clone() * pb.clone();
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

// Magnitude caps under which the i128 instantiation provably cannot
// overflow: |w entries| <= 2^40 keeps 3x3 minors under 2^123, and reduced
// ray entries <= 2^80 keep the constraint dots under 2^123.
const W_CAP: i128 = 1 << 40;
const RAY_CAP: i128 = 1 << 80;

struct Converted {
    gram_i: Option<Vec<Vec<i128>>>,
    w_i: Option<Vec<Vec<i128>>>,
    gram_b: Vec<Vec<BigInt>>,
    w_b: Vec<Vec<BigInt>>,
}

fn prepare(lattice: &QuadraticLattice, roots: &[Root]) -> Result<Converted> {
    if lattice.rank() != 4 {
        return Err(Error::RankNotFour(lattice.rank()));
    }
    for r in roots {
        if r.lattice().as_ref() != lattice {
            return Err(Error::LatticeMismatch);
        }
    }
    let gram_b: Vec<Vec<BigInt>> = lattice.gram().clone();
    let mut w_b = Vec::with_capacity(roots.len());
    for r in roots {
        let mut row = Vec::with_capacity(4);
        for j in 0..4 {
            let mut acc = BigInt::zero();
            for (i, c) in r.coords().iter().enumerate() {
                acc += c * &gram_b[i][j];
            }
            row.push(acc);
        }
        w_b.push(row);
    }
    let to_i128 = |m: &Vec<Vec<BigInt>>, cap: i128| -> Option<Vec<Vec<i128>>> {
        m.iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        let v: i128 = x.try_into().ok()?;
                        (v.abs() <= cap).then_some(v)
                    })
                    .collect()
            })
            .collect()
    };
    let gram_i = to_i128(&gram_b, W_CAP);
    let w_i = to_i128(&w_b, W_CAP);
    Ok(Converted { gram_i, w_i, gram_b, w_b })
}

fn rays_for(lattice: &QuadraticLattice, roots: &[Root]) -> Result<RayData<BigInt>> {
    let conv = prepare(lattice, roots)?;
    if let (Some(g), Some(w)) = (&conv.gram_i, &conv.w_i) {
        let data = extreme_rays::<i128>(g, w);
        let within = data
            .rays
            .iter()
            .all(|(v, _, _)| v.iter().all(|x| x.abs() <= RAY_CAP));
        if within {
            return Ok(RayData {
                rays: data
                    .rays
                    .into_iter()
                    .map(|(v, a, s)| (v.into_iter().map(BigInt::from).collect(), a, s))
                    .collect(),
                pointed: data.pointed,
                kernel_witness: data
                    .kernel_witness
                    .map(|v| v.into_iter().map(BigInt::from).collect()),
            });
        }
    }
    Ok(extreme_rays::<BigInt>(&conv.gram_b, &conv.w_b))
}

/// Exact finite-volume test: the polyhedron has finite volume iff the
/// half-space cone is pointed, has at least one extreme ray, and every
/// extreme ray stays inside the closed light cone.
pub fn finite_volume_check(
    lattice: &Arc<QuadraticLattice>,
    roots: &[Root],
) -> Result<VolumeVerdict> {
    if !lattice.signature().is_hyperbolic() {
        return Err(Error::NotHyperbolic);
    }
    let data = rays_for(lattice, roots)?;
    if !data.pointed {
        return Ok(VolumeVerdict::InfiniteVolume(VolumeWitness::NotPointed(
            data.kernel_witness.unwrap_or_default(),
        )));
    }
    if data.rays.is_empty() {
        return Ok(VolumeVerdict::InfiniteVolume(VolumeWitness::NoVertex));
    }
    for (v, _, sign) in &data.rays {
        if *sign == std::cmp::Ordering::Greater {
            return Ok(VolumeVerdict::InfiniteVolume(VolumeWitness::SpacelikeRay(
                v.clone(),
            )));
        }
    }
    Ok(VolumeVerdict::FiniteVolume)
}

/// Vertices and polyhedron edges computed exactly from the facet data.
pub fn polyhedron_combinatorics(
    lattice: &Arc<QuadraticLattice>,
    roots: &[Root],
) -> Result<PolyhedronCombinatorics> {
    if !lattice.signature().is_hyperbolic() {
        return Err(Error::NotHyperbolic);
    }
    let data = rays_for(lattice, roots)?;
    let mut vertices = Vec::new();
    for (v, active, sign) in &data.rays {
        if *sign == std::cmp::Ordering::Greater {
            continue; // outside the light cone: not a vertex of the polyhedron
        }
        let triple = defining_triple(lattice, roots, active);
        vertices.push(Vertex {
            triple,
            active: active.clone(),
            vector: v.clone(),
            ideal: *sign == std::cmp::Ordering::Equal,
        });
    }
    // polyhedron edges: facet pairs active on at least two extreme rays
    let mut pair_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (_, active, _) in &data.rays {
        for x in 0..active.len() {
            for y in x + 1..active.len() {
                *pair_count.entry((active[x], active[y])).or_insert(0) += 1;
            }
        }
    }
    let edges = pair_count
        .into_iter()
        .filter(|&(_, c)| c >= 2)
        .map(|(p, _)| p)
        .collect();
    Ok(PolyhedronCombinatorics { vertices, edges })
}

/// First facet triple of the active set whose normals are independent.
fn defining_triple(
    lattice: &Arc<QuadraticLattice>,
    roots: &[Root],
    active: &[usize],
) -> [usize; 3] {
    let gram = lattice.gram();
    let w_row = |idx: usize| -> Vec<BigInt> {
        (0..4)
            .map(|j| {
                let mut acc = BigInt::zero();
                for (i, c) in roots[idx].coords().iter().enumerate() {
                    acc += c * &gram[i][j];
                }
                acc
            })
            .collect()
    };
    for x in 0..active.len() {
        for y in x + 1..active.len() {
            for z in y + 1..active.len() {
                let rows =
                    vec![w_row(active[x]), w_row(active[y]), w_row(active[z])];
                if rank(&rows) == 3 {
                    return [active[x], active[y], active[z]];
                }
            }
        }
    }
    unreachable!("extreme ray must have three independent active facets")
}

/// Graphviz DOT rendering of a Coxeter diagram.  Edge styles: plain for
/// pi/3, penwidth 2 for pi/4, penwidth 3 for pi/6, bold for parallel,
/// dashed with a cosh^2 label for divergent pairs, and a cos^2 label for
/// non-crystallographic angles.  Right angles draw no edge.
pub fn emit_dot(diagram: &CoxeterDiagram) -> String {
    let mut out = String::new();
    out.push_str("graph coxeter {\n");
    out.push_str("  node [shape=circle];\n");
    for (i, norm) in &diagram.nodes {
        let _ = writeln!(out, "  r{} [label=\"{}\"];", i + 1, norm);
    }
    for ((i, j), rel) in &diagram.edges {
        let line = match rel {
            FacetRelation::Angle(2) => continue,
            FacetRelation::Angle(3) => format!("  r{} -- r{};", i + 1, j + 1),
            FacetRelation::Angle(4) => {
                format!("  r{} -- r{} [penwidth=2];", i + 1, j + 1)
            }
            FacetRelation::Angle(6) => {
                format!("  r{} -- r{} [penwidth=3];", i + 1, j + 1)
            }
            FacetRelation::Angle(_) => unreachable!(),
            FacetRelation::AngleGeneral(q) => {
                format!("  r{} -- r{} [label=\"cos2={}\"];", i + 1, j + 1, q)
            }
            FacetRelation::Parallel => {
                format!("  r{} -- r{} [style=bold];", i + 1, j + 1)
            }
            FacetRelation::Divergent(q) => {
                format!("  r{} -- r{} [style=dashed, label=\"cosh2={}\"];", i + 1, j + 1, q)
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("}\n");
    out
}
