//! Exact-rational simplex geometry.

use std::fmt;

use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{self, Matrix};
use crate::surd::SurdSum;
use crate::Rational;

pub type Point = Vec<Rational>;

/// An ordered list of `k + 1` points; the order is the orientation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    vertices: Vec<Point>,
}

fn factorial(k: usize) -> Rational {
    Rational::from_integer((1..=k as u64).product::<u64>().into())
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Sign of the permutation that sorts `items`, or 0 if two items are equal.
fn sort_parity<T: Ord>(items: &[T]) -> i8 {
    let n = items.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| items[a].cmp(&items[b]));
    if idx.windows(2).any(|w| items[w[0]] == items[w[1]]) {
        return 0;
    }
    let mut seen = vec![false; n];
    let mut sign = 1i8;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = idx[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

impl Simplex {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(dim_mismatch("geometry", "a simplex needs at least one vertex"));
        };
        let d = first.len();
        if d == 0 || vertices.iter().any(|v| v.len() != d) {
            return Err(dim_mismatch(
                "geometry",
                "vertices must share a positive ambient dimension",
            ));
        }
        if vertices.len() > d + 1 {
            return Err(dim_mismatch(
                "geometry",
                format!("{} vertices cannot span a simplex in R^{d}", vertices.len()),
            ));
        }
        Ok(Self { vertices })
    }

    pub(crate) fn from_vertices_unchecked(vertices: Vec<Point>) -> Self {
        Self { vertices }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edge_vectors(&self) -> Vec<Vec<Rational>> {
        let base = &self.vertices[0];
        self.vertices[1..].iter().map(|v| sub(v, base)).collect()
    }

    /// Exact squared volume `det(Gram) / (k!)²`.
    pub fn squared_volume(&self) -> Rational {
        let k = self.dim();
        if k == 0 {
            return Rational::one();
        }
        let g = linalg::gram(&self.edge_vectors());
        let det = linalg::determinant(&g);
        let f = factorial(k);
        det / (&f * &f)
    }

    pub fn volume(&self) -> f64 {
        self.squared_volume().to_f64().unwrap_or(f64::NAN).sqrt()
    }

    pub fn volume_surd(&self) -> SurdSum {
        SurdSum::sqrt_of(&self.squared_volume())
    }

    pub fn is_degenerate(&self) -> bool {
        linalg::rank(&self.edge_vectors()) < self.dim()
    }

    /// Sorted-vertex representative together with the orientation sign
    /// relating it to `self` (0 when a vertex repeats).
    pub fn canonical(&self) -> (Simplex, i8) {
        let sign = sort_parity(&self.vertices);
        let mut v = self.vertices.clone();
        v.sort();
        (Simplex { vertices: v }, sign)
    }

    /// Face opposite vertex `i`.
    pub fn face(&self, i: usize) -> Simplex {
        let mut v = self.vertices.clone();
        v.remove(i);
        Simplex { vertices: v }
    }

    /// Whether `v` is parallel to the affine hull of the simplex.
    pub fn is_tangent(&self, v: &[Rational]) -> bool {
        let mut edges = self.edge_vectors();
        let r = linalg::rank(&edges);
        edges.push(v.to_vec());
        linalg::rank(&edges) == r
    }

    /// Barycentric coordinates of `x` if it lies in the affine hull.
    pub fn barycentric(&self, x: &[Rational]) -> Option<Vec<Rational>> {
        let edges = self.edge_vectors();
        let rhs = sub(x, &self.vertices[0]);
        if edges.is_empty() {
            return rhs.iter().all(Zero::is_zero).then(|| vec![Rational::one()]);
        }
        let a = linalg::transpose(&edges);
        let (sol, _) = linalg::solve_affine(&a, &rhs)?;
        let rest = Rational::one() - sol.iter().fold(Rational::zero(), |s, v| s + v);
        let mut out = vec![rest];
        out.extend(sol);
        Some(out)
    }

    /// Closed-simplex membership.
    pub fn contains_point(&self, x: &[Rational]) -> bool {
        self.barycentric(x)
            .is_some_and(|b| b.iter().all(|c| !c.is_negative()))
    }

    /// Open-simplex membership (all barycentric coordinates positive).
    pub fn contains_point_strictly(&self, x: &[Rational]) -> bool {
        self.barycentric(x)
            .is_some_and(|b| b.iter().all(|c| c.is_positive()))
    }

    /// Orientation of a full-dimensional simplex relative to the standard
    /// orientation of `R^d`; 0 if it is not full-dimensional or degenerate.
    pub fn orientation_sign(&self) -> i8 {
        if self.dim() != self.ambient_dim() {
            return 0;
        }
        linalg::sign(&linalg::determinant(&self.edge_vectors()))
    }

    pub fn map(&self, f: &AffineMap) -> Simplex {
        Simplex {
            vertices: self.vertices.iter().map(|v| f.apply(v)).collect(),
        }
    }

    pub fn bbox(&self) -> (Point, Point) {
        let d = self.ambient_dim();
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for i in 0..d {
                if v[i] < lo[i] {
                    lo[i] = v[i].clone();
                }
                if v[i] > hi[i] {
                    hi[i] = v[i].clone();
                }
            }
        }
        (lo, hi)
    }

    pub fn barycenter(&self) -> Point {
        let n = Rational::from_integer((self.vertices.len() as i64).into());
        let d = self.ambient_dim();
        (0..d)
            .map(|i| self.vertices.iter().fold(Rational::zero(), |s, v| s + &v[i]) / &n)
            .collect()
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, c) in v.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "]")
    }
}

/// `x ↦ A x + b` with rational entries.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub linear: Matrix,
    pub offset: Point,
}

impl AffineMap {
    pub fn identity(d: usize) -> Self {
        let linear = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        Self {
            linear,
            offset: vec![Rational::zero(); d],
        }
    }

    /// `x ↦ p + λ (x - p)`.
    pub fn homothety(center: &[Rational], ratio: &Rational) -> Self {
        let d = center.len();
        let mut m = Self::identity(d);
        for i in 0..d {
            m.linear[i][i] = ratio.clone();
            m.offset[i] = &center[i] - ratio * &center[i];
        }
        m
    }

    pub fn translation(w: &[Rational]) -> Self {
        let mut m = Self::identity(w.len());
        m.offset = w.to_vec();
        m
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn apply(&self, x: &[Rational]) -> Point {
        self.linear
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| linalg::dot(row, x) + b)
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        let d = self.dim();
        let linear = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        (0..d).fold(Rational::zero(), |s, l| {
                            s + &self.linear[i][l] * &inner.linear[l][j]
                        })
                    })
                    .collect()
            })
            .collect();
        let offset = self.apply(&inner.offset);
        AffineMap { linear, offset }
    }
}

/// Dimension of the intersection of two closed simplices (-1 if disjoint).
pub fn overlap_dim(a: &Simplex, b: &Simplex) -> i64 {
    let d = a.ambient_dim();
    let (alo, ahi) = a.bbox();
    let (blo, bhi) = b.bbox();
    if (0..d).any(|i| ahi[i] < blo[i] || bhi[i] < alo[i]) {
        return -1;
    }
    let ea = a.edge_vectors();
    let eb = b.edge_vectors();
    let (ka, kb) = (ea.len(), eb.len());
    let n = ka + kb;
    // unknowns (λ, μ): a0 + Ea λ = b0 + Eb μ
    let rows: Matrix = (0..d)
        .map(|i| {
            ea.iter()
                .map(|e| e[i].clone())
                .chain(eb.iter().map(|e| -e[i].clone()))
                .collect()
        })
        .collect();
    let rhs = sub(&b.vertices[0], &a.vertices[0]);
    let solved = if n == 0 {
        rhs.iter().all(Zero::is_zero).then(|| (vec![], vec![]))
    } else {
        linalg::solve_affine(&rows, &rhs)
    };
    let Some((x0, null)) = solved else {
        return -1;
    };
    let m = null.len();
    // inequalities c·z + c0 >= 0
    let mut ineqs: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let coord = |idx: usize| -> (Vec<Rational>, Rational) {
        (null.iter().map(|v| v[idx].clone()).collect(), x0[idx].clone())
    };
    for (range_start, len) in [(0usize, ka), (ka, kb)] {
        let mut sum_c = vec![Rational::zero(); m];
        let mut sum_0 = Rational::zero();
        for idx in range_start..range_start + len {
            let (c, c0) = coord(idx);
            for (s, x) in sum_c.iter_mut().zip(&c) {
                *s += x;
            }
            sum_0 += &c0;
            ineqs.push((c, c0));
        }
        ineqs.push((sum_c.into_iter().map(|x| -x).collect(), Rational::one() - sum_0));
    }
    let feasible = |z: &[Rational]| {
        ineqs
            .iter()
            .all(|(c, c0)| !(linalg::dot(c, z) + c0).is_negative())
    };
    let to_point = |z: &[Rational]| -> Point {
        let lam: Vec<Rational> = (0..ka)
            .map(|i| {
                x0[i].clone()
                    + null
                        .iter()
                        .zip(z)
                        .fold(Rational::zero(), |s, (v, zi)| s + &v[i] * zi)
            })
            .collect();
        let mut p = a.vertices[0].clone();
        for (l, e) in lam.iter().zip(&ea) {
            for i in 0..d {
                p[i] += l * &e[i];
            }
        }
        p
    };
    let mut verts: Vec<Point> = Vec::new();
    if m == 0 {
        if feasible(&[]) {
            verts.push(to_point(&[]));
        }
    } else {
        let mut choice = Vec::with_capacity(m);
        enumerate_subsets(ineqs.len(), m, 0, &mut choice, &mut |sel| {
            let a: Matrix = sel.iter().map(|&i| ineqs[i].0.clone()).collect();
            let b: Vec<Rational> = sel.iter().map(|&i| -ineqs[i].1.clone()).collect();
            if let Some(z) = linalg::solve_square(&a, &b) {
                if feasible(&z) {
                    let p = to_point(&z);
                    if !verts.contains(&p) {
                        verts.push(p);
                    }
                }
            }
        });
    }
    if verts.is_empty() {
        return -1;
    }
    let diffs: Matrix = verts[1..].iter().map(|v| sub(v, &verts[0])).collect();
    linalg::rank(&diffs) as i64
}

fn enumerate_subsets(n: usize, m: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == m {
        f(cur);
        return;
    }
    for i in start..n {
        if n - i < m - cur.len() {
            break;
        }
        cur.push(i);
        enumerate_subsets(n, m, i + 1, cur, f);
        cur.pop();
    }
}

/// Deterministic rational unit vectors on `S^{d-1}` from inverse
/// stereographic projection of rational points `y ∈ Q^{d-1}` whose
/// coordinates have numerators and denominators bounded by `height`.
pub fn sphere_lattice(d: usize, height: i64) -> Vec<Point> {
    if d == 1 {
        return vec![vec![Rational::one()], vec![-Rational::one()]];
    }
    let mut params: Vec<Rational> = Vec::new();
    for q in 1..=height {
        for p in -height..=height {
            let r = Rational::new(p.into(), q.into());
            if !params.contains(&r) {
                params.push(r);
            }
        }
    }
    let mut out: Vec<Point> = Vec::new();
    let mut idx = vec![0usize; d - 1];
    loop {
        let y: Vec<&Rational> = idx.iter().map(|&i| &params[i]).collect();
        let norm2 = y.iter().fold(Rational::zero(), |s, v| s + *v * *v);
        let den = &norm2 + Rational::one();
        let mut x: Point = y
            .iter()
            .map(|v| Rational::from_integer(2.into()) * *v / &den)
            .collect();
        x.push((&norm2 - Rational::one()) / &den);
        if !out.contains(&x) {
            out.push(x);
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == d - 1 {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < params.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

pub(crate) fn check_bounds(what: &str, value: usize, lo: usize, hi: usize) -> Result<()> {
    if value < lo || value > hi {
        return Err(Error::OutOfBounds(format!(
            "{what} = {value} outside [{lo}, {hi}]"
        )));
    }
    Ok(())
}
