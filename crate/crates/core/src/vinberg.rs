//! Vinberg's algorithm: build the fundamental polyhedron of the reflection
//! subgroup generated by roots of prescribed norms, root by root in order of
//! distance from a basic point, under a configurable budget.
//!
//! The search works on i128 coordinates with checked arithmetic; lattice
//! data that does not fit the caps is rejected with `Error::Overflow`.

use std::collections::{BinaryHeap, BTreeSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coxeter;
use crate::error::{Error, Result};
use crate::geom::Root;
use crate::lattice::QuadraticLattice;

/// Search configuration.  `basic_point` and `allowed_norms` default to the
/// shortest negative-norm vector and to all divisors of twice the largest
/// invariant factor, respectively.
#[derive(Clone, Debug)]
pub struct VinbergConfig {
    pub basic_point: Option<Vec<BigInt>>,
    pub allowed_norms: Option<BTreeSet<u64>>,
    pub max_roots: usize,
    pub max_height: u64,
}

impl Default for VinbergConfig {
    fn default() -> Self {
        VinbergConfig {
            basic_point: None,
            allowed_norms: None,
            max_roots: 64,
            max_height: 10_000,
        }
    }
}

impl VinbergConfig {
    pub fn with_norms<I: IntoIterator<Item = u64>>(mut self, norms: I) -> Self {
        self.allowed_norms = Some(norms.into_iter().collect());
        self
    }

    pub fn with_basic_point(mut self, v0: &[i64]) -> Self {
        self.basic_point = Some(v0.iter().map(|&x| BigInt::from(x)).collect());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    FiniteVolume,
    BudgetExhausted,
}

/// Result of a run: the mirrors found (fundamental-cone roots first, then
/// distance-ordered roots), the verdict and the work counter.
#[derive(Clone, Debug)]
pub struct VinbergRun {
    pub lattice: Arc<QuadraticLattice>,
    pub basic_point: Vec<BigInt>,
    pub roots: Vec<Root>,
    pub cone_size: usize,
    pub status: RunStatus,
    pub steps: u64,
}

impl VinbergRun {
    /// Exact priority (a, v0)^2 / (a, a) of each root; zero for cone roots.
    pub fn priorities(&self) -> Vec<BigRational> {
        self.roots
            .iter()
            .map(|r| {
                let av = self.lattice.form(r.coords(), &self.basic_point);
                BigRational::new(&av * &av, r.norm().clone())
            })
            .collect()
    }
}

/// All norms k for which the lattice can have k-roots: the positive
/// divisors of twice the largest invariant factor.
pub fn admissible_root_norms(l: &QuadraticLattice) -> Result<BTreeSet<u64>> {
    let factors = l.invariant_factors().0;
    let e_max = factors.last().expect("nonempty factor list");
    let doubled: u64 = (e_max * 2u32)
        .try_into()
        .map_err(|_| Error::Overflow)?;
    Ok((1..=doubled).filter(|k| doubled % k == 0).collect())
}

// ---------------------------------------------------------------------------
// checked i128 helpers
// ---------------------------------------------------------------------------

fn cm(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

fn ca(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn cs(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

fn isqrt(n: i128) -> i128 {
    debug_assert!(n >= 0);
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128 + 2;
    while x.checked_mul(x).map(|s| s > n).unwrap_or(true) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map(|s| s <= n).unwrap_or(false) {
        x += 1;
    }
    x
}

fn floor_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    a.div_euclid(b)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    -((-a).div_euclid(b))
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a >= 0 {
            (a, 1, 0)
        } else {
            (-a, -1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

fn gcd4(v: &[i128; 4]) -> i128 {
    let mut g = 0i128;
    for &x in v {
        g = num_integer::gcd(g, x.abs());
    }
    g
}

// ---------------------------------------------------------------------------
// integer quadratic solver: all t in Z^n with t^T M t + 2 l.t + c = 0
// for a positive definite M, n <= 3
// ---------------------------------------------------------------------------

fn solve_dim1(m: i128, l: i128, c: i128) -> Result<Vec<i128>> {
    let d = cs(cm(l, l)?, cm(m, c)?)?;
    if d < 0 {
        return Ok(Vec::new());
    }
    let r = isqrt(d);
    if cm(r, r)? != d {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for num in [-l + r, -l - r] {
        if num.rem_euclid(m) == 0 {
            let t = num / m;
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    Ok(out)
}

fn solve_dim2(m: &[[i128; 2]; 2], l: &[i128; 2], c: i128) -> Result<Vec<[i128; 2]>> {
    let det = cs(cm(m[0][0], m[1][1])?, cm(m[0][1], m[0][1])?)?;
    debug_assert!(det > 0 && m[0][0] > 0);
    // l^T adj l with adj = [[m11, -m01], [-m01, m00]]
    let lal = ca(
        cs(cm(cm(m[1][1], l[0])?, l[0])?, cm(2, cm(cm(m[0][1], l[0])?, l[1])?)?)?,
        cm(cm(m[0][0], l[1])?, l[1])?,
    )?;
    let num_qz = cs(cm(c, det)?, lal)?;
    if num_qz > 0 {
        return Ok(Vec::new());
    }
    let bound = cm(-num_qz, m[0][0])?;
    let r = isqrt(bound);
    // z1 * det = -(adj l)[1] = m01*l0 - m00*l1
    let zc = cs(cm(m[0][1], l[0])?, cm(m[0][0], l[1])?)?;
    let lo = ceil_div(zc - r, det);
    let hi = floor_div(zc + r, det);
    let mut out = Vec::new();
    for t1 in lo..=hi {
        let l0 = ca(l[0], cm(m[0][1], t1)?)?;
        let c0 = ca(ca(c, cm(2, cm(l[1], t1)?)?)?, cm(cm(m[1][1], t1)?, t1)?)?;
        for t0 in solve_dim1(m[0][0], l0, c0)? {
            out.push([t0, t1]);
        }
    }
    Ok(out)
}

fn solve_dim3(m: &[[i128; 3]; 3], l: &[i128; 3], c: i128) -> Result<Vec<[i128; 3]>> {
    // adjugate of m (symmetric)
    let a00 = cs(cm(m[1][1], m[2][2])?, cm(m[1][2], m[1][2])?)?;
    let a01 = cs(cm(m[0][2], m[1][2])?, cm(m[0][1], m[2][2])?)?;
    let a02 = cs(cm(m[0][1], m[1][2])?, cm(m[0][2], m[1][1])?)?;
    let a11 = cs(cm(m[0][0], m[2][2])?, cm(m[0][2], m[0][2])?)?;
    let a12 = cs(cm(m[0][1], m[0][2])?, cm(m[0][0], m[1][2])?)?;
    let a22 = cs(cm(m[0][0], m[1][1])?, cm(m[0][1], m[0][1])?)?;
    let det = ca(
        ca(cm(m[0][0], a00)?, cm(m[0][1], a01)?)?,
        cm(m[0][2], a02)?,
    )?;
    debug_assert!(det > 0, "shell matrix must be positive definite");
    // l^T adj l
    let adj_l = [
        ca(ca(cm(a00, l[0])?, cm(a01, l[1])?)?, cm(a02, l[2])?)?,
        ca(ca(cm(a01, l[0])?, cm(a11, l[1])?)?, cm(a12, l[2])?)?,
        ca(ca(cm(a02, l[0])?, cm(a12, l[1])?)?, cm(a22, l[2])?)?,
    ];
    let lal = ca(
        ca(cm(l[0], adj_l[0])?, cm(l[1], adj_l[1])?)?,
        cm(l[2], adj_l[2])?,
    )?;
    let num_qz = cs(cm(c, det)?, lal)?;
    if num_qz > 0 {
        return Ok(Vec::new());
    }
    let bound = cm(-num_qz, a22)?;
    let r = isqrt(bound);
    let zc = -adj_l[2];
    let lo = ceil_div(zc - r, det);
    let hi = floor_div(zc + r, det);
    let m2 = [[m[0][0], m[0][1]], [m[0][1], m[1][1]]];
    let mut out = Vec::new();
    for t2 in lo..=hi {
        let l2 = [
            ca(l[0], cm(m[0][2], t2)?)?,
            ca(l[1], cm(m[1][2], t2)?)?,
        ];
        let c2 = ca(ca(c, cm(2, cm(l[2], t2)?)?)?, cm(cm(m[2][2], t2)?, t2)?)?;
        for [t0, t1] in solve_dim2(&m2, &l2, c2)? {
            out.push([t0, t1, t2]);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// engine
// ---------------------------------------------------------------------------

const GRAM_CAP: i128 = 1 << 20;
const POINT_CAP: i128 = 1 << 24;

/// A shell of candidates with fixed norm k and height h = |(a, v0)|,
/// ordered by increasing priority h^2 / k, ties by (k, h).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Shell {
    k: i128,
    h: i128,
}

impl Ord for Shell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // reversed for a min-heap on (h^2/k, k, h)
        let lhs = self.h * self.h * other.k;
        let rhs = other.h * other.h * self.k;
        rhs.cmp(&lhs)
            .then(other.k.cmp(&self.k))
            .then(other.h.cmp(&self.h))
    }
}

impl PartialOrd for Shell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Incremental root search; `next_root` yields accepted mirrors one at a
/// time in priority order.
pub struct VinbergSearch {
    lattice: Arc<QuadraticLattice>,
    gram: [[i128; 4]; 4],
    v0: [i128; 4],
    w: [i128; 4],
    content: i128,
    part: [i128; 4],
    basis: [[i128; 4]; 3],
    shell_m: [[i128; 3]; 3],
    bw: [i128; 3],
    uu: i128,
    norms: Vec<i128>,
    max_height: i128,
    heap: BinaryHeap<Shell>,
    accepted: Vec<[i128; 4]>,
    accepted_w: Vec<[i128; 4]>,
    pending: VecDeque<[i128; 4]>,
    pub steps: u64,
}

fn to_i128_vec4(v: &[BigInt], cap: i128) -> Result<[i128; 4]> {
    if v.len() != 4 {
        return Err(Error::RankNotFour(v.len()));
    }
    let mut out = [0i128; 4];
    for (i, x) in v.iter().enumerate() {
        let y: i128 = x.try_into().map_err(|_| Error::Overflow)?;
        if y.abs() > cap {
            return Err(Error::Overflow);
        }
        out[i] = y;
    }
    Ok(out)
}

impl VinbergSearch {
    fn new(
        lattice: Arc<QuadraticLattice>,
        v0: [i128; 4],
        norms: Vec<i128>,
        max_height: i128,
    ) -> Result<Self> {
        let mut gram = [[0i128; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let x: i128 = lattice
                    .gram_entry(i, j)
                    .try_into()
                    .map_err(|_| Error::Overflow)?;
                if x.abs() > GRAM_CAP {
                    return Err(Error::Overflow);
                }
                gram[i][j] = x;
            }
        }
        let mut w = [0i128; 4];
        for j in 0..4 {
            let mut acc = 0i128;
            for i in 0..4 {
                acc = ca(acc, cm(gram[i][j], v0[i])?)?;
            }
            w[j] = acc;
        }
        // unimodular u with w . u = (g, 0, 0, 0); columns 1..3 span ker w
        let mut u = [[0i128; 4]; 4];
        for (i, row) in u.iter_mut().enumerate() {
            row[i] = 1;
        }
        let mut t = w;
        for i in 1..4 {
            if t[i] == 0 {
                continue;
            }
            let (d, x, y) = ext_gcd(t[0], t[i]);
            let (q0, qi) = (t[0] / d, t[i] / d);
            for row in u.iter_mut() {
                let (c0, ci) = (row[0], row[i]);
                row[0] = ca(cm(x, c0)?, cm(y, ci)?)?;
                row[i] = cs(cm(q0, ci)?, cm(qi, c0)?)?;
            }
            t[0] = d;
            t[i] = 0;
        }
        if t[0] < 0 {
            for row in u.iter_mut() {
                row[0] = -row[0];
            }
            t[0] = -t[0];
        }
        let content = t[0];
        debug_assert!(content > 0);
        let part: [i128; 4] = [u[0][0], u[1][0], u[2][0], u[3][0]];
        let basis: [[i128; 4]; 3] = [
            [u[0][1], u[1][1], u[2][1], u[3][1]],
            [u[0][2], u[1][2], u[2][2], u[3][2]],
            [u[0][3], u[1][3], u[2][3], u[3][3]],
        ];
        let form = |a: &[i128; 4], b: &[i128; 4]| -> Result<i128> {
            let mut acc = 0i128;
            for i in 0..4 {
                for j in 0..4 {
                    acc = ca(acc, cm(cm(a[i], gram[i][j])?, b[j])?)?;
                }
            }
            Ok(acc)
        };
        let mut shell_m = [[0i128; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                shell_m[i][j] = form(&basis[i], &basis[j])?;
            }
        }
        let mut bw = [0i128; 3];
        for i in 0..3 {
            bw[i] = form(&basis[i], &part)?;
        }
        let uu = form(&part, &part)?;
        let mut heap = BinaryHeap::new();
        for &k in &norms {
            if content <= max_height {
                heap.push(Shell { k, h: content });
            }
        }
        Ok(VinbergSearch {
            lattice,
            gram,
            v0,
            w,
            content,
            part,
            basis,
            shell_m,
            bw,
            uu,
            norms,
            max_height,
            heap,
            accepted: Vec::new(),
            accepted_w: Vec::new(),
            pending: VecDeque::new(),
            steps: 0,
        })
    }

    fn gram_vec(&self, a: &[i128; 4]) -> Result<[i128; 4]> {
        let mut out = [0i128; 4];
        for j in 0..4 {
            let mut acc = 0i128;
            for i in 0..4 {
                acc = ca(acc, cm(self.gram[i][j], a[i])?)?;
            }
            out[j] = acc;
        }
        Ok(out)
    }

    fn form(&self, a: &[i128; 4], b: &[i128; 4]) -> Result<i128> {
        let ga = self.gram_vec(a)?;
        let mut acc = 0i128;
        for i in 0..4 {
            acc = ca(acc, cm(ga[i], b[i])?)?;
        }
        Ok(acc)
    }

    /// Roots on a shell that satisfy the crystallographic condition,
    /// primitivity and the sign constraints, in lexicographic order.
    fn shell_candidates(&self, k: i128, h: i128) -> Result<Vec<[i128; 4]>> {
        debug_assert_eq!(h % self.content, 0);
        let f = -(h / self.content);
        let l = [
            cm(self.bw[0], f)?,
            cm(self.bw[1], f)?,
            cm(self.bw[2], f)?,
        ];
        let c = cs(cm(cm(self.uu, f)?, f)?, k)?;
        let mut sols = solve_dim3(&self.shell_m, &l, c)?;
        sols.sort_unstable();
        let mut out = Vec::new();
        'next: for t in sols {
            let mut a = [0i128; 4];
            for i in 0..4 {
                a[i] = ca(
                    cm(self.part[i], f)?,
                    ca(
                        ca(cm(self.basis[0][i], t[0])?, cm(self.basis[1][i], t[1])?)?,
                        cm(self.basis[2][i], t[2])?,
                    )?,
                )?;
            }
            if h == 0 && a == [0, 0, 0, 0] {
                continue;
            }
            debug_assert_eq!(
                (0..4).map(|i| a[i] * self.w[i]).sum::<i128>(),
                -h,
                "shell solver height"
            );
            if gcd4(&a) != 1 {
                continue;
            }
            let ga = self.gram_vec(&a)?;
            debug_assert_eq!(
                (0..4).map(|i| a[i] * ga[i]).sum::<i128>(),
                k,
                "shell solver norm"
            );
            for &gi in &ga {
                if (2 * gi).rem_euclid(k) != 0 {
                    continue 'next;
                }
            }
            for r in &self.accepted_w {
                let mut dot = 0i128;
                for i in 0..4 {
                    dot = ca(dot, cm(r[i], a[i])?)?;
                }
                if dot > 0 {
                    continue 'next;
                }
            }
            out.push(a);
        }
        // lexicographic tie-break on the coordinate tuple
        out.sort_unstable();
        Ok(out)
    }

    fn push_accepted(&mut self, a: [i128; 4]) -> Result<Root> {
        let ga = self.gram_vec(&a)?;
        self.accepted.push(a);
        self.accepted_w.push(ga);
        Root::new(
            self.lattice.clone(),
            a.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    /// Next accepted mirror in priority order, or None when the height
    /// budget is exhausted.
    pub fn next_root(&mut self) -> Result<Option<Root>> {
        loop {
            if let Some(a) = self.pending.pop_front() {
                // revalidate against roots accepted after enumeration
                let mut ok = true;
                'rows: for r in &self.accepted_w {
                    let mut dot = 0i128;
                    for i in 0..4 {
                        dot = ca(dot, cm(r[i], a[i])?)?;
                    }
                    if dot > 0 {
                        ok = false;
                        break 'rows;
                    }
                }
                if !ok {
                    continue;
                }
                return Ok(Some(self.push_accepted(a)?));
            }
            let Some(shell) = self.heap.pop() else {
                return Ok(None);
            };
            self.steps += 1;
            if shell.h + self.content <= self.max_height {
                self.heap.push(Shell { k: shell.k, h: shell.h + self.content });
            }
            for a in self.shell_candidates(shell.k, shell.h)? {
                self.pending.push_back(a);
            }
        }
    }
}

/// All roots orthogonal to the basic point, i.e. the finite root system of
/// the elliptic sublattice v0-perp.
fn roots_orthogonal_to_v0(search: &VinbergSearch) -> Result<Vec<[i128; 4]>> {
    let mut all = Vec::new();
    for &k in &search.norms {
        // shell h = 0 with no sign constraints: temporarily ignore accepted
        debug_assert!(search.accepted.is_empty());
        all.extend(search.shell_candidates(k, 0)?);
    }
    Ok(all)
}

/// Simple roots of the chamber of the finite reflection group on v0-perp
/// singled out by lexicographic positivity in the kernel basis.
pub fn fundamental_cone(
    lattice: &Arc<QuadraticLattice>,
    v0: &[BigInt],
    allowed_norms: Option<&BTreeSet<u64>>,
) -> Result<Vec<Root>> {
    let search = build_search(lattice, v0, allowed_norms, 0)?;
    let cone = cone_of(&search)?;
    cone.into_iter()
        .map(|a| {
            Root::new(
                lattice.clone(),
                a.iter().map(|&x| BigInt::from(x)).collect(),
            )
        })
        .collect()
}

fn cone_of(search: &VinbergSearch) -> Result<Vec<[i128; 4]>> {
    let all = roots_orthogonal_to_v0(search)?;
    // coordinates of a in the kernel basis recover the solver variable; use
    // lexicographic negativity of the inner products with the basis instead,
    // which is equivalent to a generic linear functional on v0-perp.
    let key = |a: &[i128; 4]| -> Result<[i128; 3]> {
        let ga = search.gram_vec(a)?;
        let mut k = [0i128; 3];
        for i in 0..3 {
            let mut acc = 0i128;
            for j in 0..4 {
                acc = ca(acc, cm(ga[j], search.basis[i][j])?)?;
            }
            k[i] = acc;
        }
        Ok(k)
    };
    let mut positive = Vec::new();
    for a in &all {
        let k = key(a)?;
        let first = k.iter().find(|&&x| x != 0).copied().unwrap_or(0);
        debug_assert!(first != 0, "root orthogonal to all of v0-perp");
        if first < 0 {
            positive.push(*a);
        }
    }
    let set: BTreeSet<[i128; 4]> = positive.iter().copied().collect();
    let mut simple: Vec<[i128; 4]> = positive
        .iter()
        .copied()
        .filter(|a| {
            // indecomposable: a != b + c for positive roots b, c
            !positive.iter().any(|b| {
                if b == a {
                    return false;
                }
                let diff = [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]];
                set.contains(&diff)
            })
        })
        .collect();
    simple.sort_by_key(|a| {
        let norm = (0..4)
            .map(|i| (0..4).map(|j| a[i] * search.gram[i][j] * a[j]).sum::<i128>())
            .sum::<i128>();
        (norm, *a)
    });
    // chamber walls of an acute-angled chamber: pairwise products <= 0
    for (i, a) in simple.iter().enumerate() {
        for b in simple.iter().skip(i + 1) {
            debug_assert!(search.form(a, b).unwrap_or(1) <= 0);
        }
    }
    Ok(simple)
}

fn build_search(
    lattice: &Arc<QuadraticLattice>,
    v0: &[BigInt],
    allowed_norms: Option<&BTreeSet<u64>>,
    max_height: i128,
) -> Result<VinbergSearch> {
    let v0 = to_i128_vec4(v0, POINT_CAP)?;
    let auto = admissible_root_norms(lattice)?;
    let norms: Vec<i128> = match allowed_norms {
        Some(set) if !set.is_empty() => {
            auto.iter().filter(|k| set.contains(k)).map(|&k| k as i128).collect()
        }
        _ => auto.iter().map(|&k| k as i128).collect(),
    };
    if norms.is_empty() {
        return Err(Error::Invalid("no admissible root norms selected".into()));
    }
    let search = VinbergSearch::new(lattice.clone(), v0, norms, max_height.min(POINT_CAP))?;
    let v0_norm = search.form(&search.v0, &search.v0)?;
    if v0_norm >= 0 {
        return Err(Error::Invalid(
            "basic point must have negative norm".into(),
        ));
    }
    Ok(search)
}

/// Deterministic default basic point: among integer vectors with
/// coordinates bounded by 6, a negative-norm vector of minimal |norm|,
/// ties broken lexicographically.
pub fn default_basic_point(lattice: &QuadraticLattice) -> Result<Vec<BigInt>> {
    if lattice.rank() != 4 {
        return Err(Error::RankNotFour(lattice.rank()));
    }
    let mut gram = [[0i128; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            gram[i][j] = lattice
                .gram_entry(i, j)
                .try_into()
                .map_err(|_| Error::Overflow)?;
        }
    }
    let mut best: Option<(i128, [i128; 4])> = None;
    const B: i128 = 6;
    for x0 in -B..=B {
        for x1 in -B..=B {
            for x2 in -B..=B {
                for x3 in -B..=B {
                    let a = [x0, x1, x2, x3];
                    let mut q = 0i128;
                    for i in 0..4 {
                        for j in 0..4 {
                            q += a[i] * gram[i][j] * a[j];
                        }
                    }
                    if q >= 0 {
                        continue;
                    }
                    let cand = (-q, a);
                    if best.map(|b| cand < b).unwrap_or(true) {
                        best = Some(cand);
                    }
                }
            }
        }
    }
    let (_, a) = best.ok_or(Error::NotHyperbolic)?;
    Ok(a.iter().map(|&x| BigInt::from(x)).collect())
}

/// Full run: fundamental cone, then distance-ordered roots, stopping when
/// the polyhedron reaches finite volume or the budget is exhausted.
pub fn run(lattice: &Arc<QuadraticLattice>, config: &VinbergConfig) -> Result<VinbergRun> {
    let sig = lattice.signature();
    if lattice.rank() != 4 || !sig.is_hyperbolic() {
        return Err(Error::NotHyperbolic);
    }
    let v0 = match &config.basic_point {
        Some(v) => v.clone(),
        None => default_basic_point(lattice)?,
    };
    let mut search = build_search(
        lattice,
        &v0,
        config.allowed_norms.as_ref(),
        config.max_height as i128,
    )?;
    let cone = cone_of(&search)?;
    let mut roots = Vec::new();
    for a in cone {
        roots.push(search.push_accepted(a)?);
    }
    let cone_size = roots.len();
    let mut status = RunStatus::BudgetExhausted;
    while roots.len() < config.max_roots {
        match search.next_root()? {
            Some(root) => {
                roots.push(root);
                if roots.len() >= 4
                    && coxeter::finite_volume_check(lattice, &roots)?.is_finite()
                {
                    status = RunStatus::FiniteVolume;
                    break;
                }
            }
            None => break,
        }
    }
    Ok(VinbergRun {
        lattice: lattice.clone(),
        basic_point: v0,
        roots,
        cone_size,
        status,
        steps: search.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn coords(roots: &[Root]) -> Vec<Vec<i64>> {
        roots
            .iter()
            .map(|r| {
                r.coords()
                    .iter()
                    .map(|x| x.try_into().unwrap())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn admissible_norms_examples() {
        let l5 = QuadraticLattice::diagonal(&[-3, 5, 1, 1]);
        let norms: Vec<u64> = admissible_root_norms(&l5).unwrap().into_iter().collect();
        assert_eq!(norms, vec![1, 2, 3, 5, 6, 10, 15, 30]);
        let l10 = QuadraticLattice::diagonal(&[-1, 3, 3, 2]);
        let norms: Vec<u64> = admissible_root_norms(&l10).unwrap().into_iter().collect();
        assert_eq!(norms, vec![1, 2, 3, 4, 6, 12]);
        let uni = QuadraticLattice::diagonal(&[-1, 1, 1, 1]);
        let norms: Vec<u64> = admissible_root_norms(&uni).unwrap().into_iter().collect();
        assert_eq!(norms, vec![1, 2]);
    }

    #[test]
    fn default_basic_point_prefers_smallest_negative_norm() {
        let l10 = QuadraticLattice::diagonal(&[-1, 3, 3, 2]);
        let v0 = default_basic_point(&l10).unwrap();
        let q = l10.form(&v0, &v0);
        assert_eq!(q, BigInt::from(-1));
    }

    #[test]
    fn cone_of_l5_matches_known_chamber() {
        let l = QuadraticLattice::diagonal(&[-3, 5, 1, 1]).shared();
        let v0: Vec<BigInt> = [1, 0, 0, 0].iter().map(|&x| BigInt::from(x)).collect();
        let cone = fundamental_cone(&l, &v0, None).unwrap();
        assert_eq!(
            coords(&cone),
            vec![
                vec![0, 0, 0, -1],
                vec![0, 0, -1, 1],
                vec![0, -1, 0, 0],
            ]
        );
    }

    #[test]
    fn cone_of_l10_matches_known_chamber() {
        let l = QuadraticLattice::diagonal(&[-1, 3, 3, 2]).shared();
        let v0: Vec<BigInt> = [1, 0, 0, 0].iter().map(|&x| BigInt::from(x)).collect();
        let cone = fundamental_cone(&l, &v0, None).unwrap();
        assert_eq!(
            coords(&cone),
            vec![
                vec![0, 0, 0, -1],
                vec![0, 0, -1, 0],
                vec![0, -1, 1, 0],
            ]
        );
    }

    #[test]
    fn cone_with_no_orthogonal_roots_is_empty() {
        // v0 = (2,1,1,1) in the unimodular lattice has norm -1 and no
        // orthogonal roots of norm 1 or 2... verify emptiness or smallness
        let l = QuadraticLattice::diagonal(&[-3, 7, 11, 13]).shared();
        let v0: Vec<BigInt> = [1, 0, 0, 0].iter().map(|&x| BigInt::from(x)).collect();
        let cone = fundamental_cone(&l, &v0, Some(&[1u64].into_iter().collect()));
        // norm-1 roots orthogonal to v0 need 7a^2+11b^2+13c^2 = 1: none
        assert_eq!(cone.unwrap().len(), 0);
    }

    #[test]
    fn l5_run_reproduces_reference_mirrors() {
        let l = QuadraticLattice::diagonal(&[-3, 5, 1, 1]).shared();
        let config = VinbergConfig::default().with_basic_point(&[1, 0, 0, 0]);
        let run = run(&l, &config).unwrap();
        assert_eq!(run.status, RunStatus::FiniteVolume);
        assert_eq!(run.cone_size, 3);
        assert_eq!(
            coords(&run.roots),
            vec![
                vec![0, 0, 0, -1],
                vec![0, 0, -1, 1],
                vec![0, -1, 0, 0],
                vec![1, 0, 3, 0],
                vec![1, 1, 0, 0],
                vec![2, 1, 2, 2],
                vec![10, 6, 10, 5],
            ]
        );
    }

    #[test]
    fn l10_run_reproduces_reference_mirrors() {
        let l = QuadraticLattice::diagonal(&[-1, 3, 3, 2]).shared();
        let config = VinbergConfig::default().with_basic_point(&[1, 0, 0, 0]);
        let run = run(&l, &config).unwrap();
        assert_eq!(run.status, RunStatus::FiniteVolume);
        assert_eq!(
            coords(&run.roots),
            vec![
                vec![0, 0, 0, -1],
                vec![0, 0, -1, 0],
                vec![0, -1, 1, 0],
                vec![1, 1, 0, 0],
                vec![1, 0, 0, 1],
                vec![6, 2, 2, 3],
            ]
        );
    }

    #[test]
    fn priorities_are_monotone() {
        let l = QuadraticLattice::diagonal(&[-3, 5, 1, 1]).shared();
        let config = VinbergConfig::default().with_basic_point(&[1, 0, 0, 0]);
        let run = run(&l, &config).unwrap();
        let p = run.priorities();
        for w in p[run.cone_size..].windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn budget_exhaustion_is_deterministic() {
        let l = QuadraticLattice::diagonal(&[-23, 1, 1, 1]).shared();
        let config = VinbergConfig {
            basic_point: Some([1, 0, 0, 0].iter().map(|&x| BigInt::from(x)).collect()),
            allowed_norms: None,
            max_roots: 12,
            max_height: 500,
        };
        let a = run(&l, &config).unwrap();
        let b = run(&l, &config).unwrap();
        assert_eq!(a.status, RunStatus::BudgetExhausted);
        assert_eq!(coords(&a.roots), coords(&b.roots));
        assert_eq!(a.steps, b.steps);
    }

    #[test]
    fn non_hyperbolic_is_rejected() {
        let l = QuadraticLattice::diagonal(&[1, 1, 1, 1]).shared();
        assert!(matches!(
            run(&l, &VinbergConfig::default()),
            Err(Error::NotHyperbolic)
        ));
    }

    #[test]
    fn pairwise_products_stay_nonpositive() {
        let l = QuadraticLattice::diagonal(&[-1, 3, 3, 2]).shared();
        let config = VinbergConfig::default().with_basic_point(&[1, 0, 0, 0]);
        let run = run(&l, &config).unwrap();
        for i in 0..run.roots.len() {
            for j in i + 1..run.roots.len() {
                let prod = l.form(run.roots[i].coords(), run.roots[j].coords());
                assert!(!prod.is_positive(), "roots {i} and {j}");
            }
        }
        // every root is a valid root and lies on the v0 side
        for r in &run.roots {
            let av = l.form(r.coords(), &run.basic_point);
            assert!(!av.is_positive());
        }
    }
}
