//! Polyhedral chains: finite formal sums of oriented simplices with
//! coefficients in one of the groups of [`crate::groups`].
//!
//! Chains are kept in a normal form. Every simplex is stored with its
//! vertices sorted lexicographically, the permutation sign is folded into the
//! coefficient, and zero coefficients are dropped. Two chains are equal as
//! chains exactly when their term maps are equal.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use num::{One, ToPrimitive, Zero};

use crate::error::{dim_mismatch, precondition, Error, Result};
use crate::geometry::{AffineMap, Point, Simplex};
use crate::grid::{GridComplex, GridSpec};
use crate::groups::GroupTag;
use crate::linalg;
use crate::surd::SurdSum;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyChain {
    group: GroupTag,
    ambient_dim: usize,
    dim: usize,
    grid: Option<GridSpec>,
    terms: BTreeMap<Simplex, Rational>,
}

/// Per-term mass weights `‖g‖·H^k(σ)`.
#[derive(Clone, Debug)]
pub struct MassMeasure {
    pub entries: Vec<(Simplex, SurdSum)>,
    pub total: SurdSum,
}

impl MassMeasure {
    /// Mass carried by the terms selected by `keep`.
    pub fn measure_of(&self, keep: impl Fn(&Simplex) -> bool) -> SurdSum {
        self.entries
            .iter()
            .filter(|(s, _)| keep(s))
            .map(|(_, w)| w.clone())
            .sum()
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.entries.iter().map(|(s, _)| s)
    }
}

impl PolyChain {
    pub fn zero(group: GroupTag, ambient_dim: usize, dim: usize) -> Self {
        Self {
            group,
            ambient_dim,
            dim,
            grid: None,
            terms: BTreeMap::new(),
        }
    }

    /// Build a chain from oriented simplices and raw coefficient values.
    pub fn from_terms<I>(group: GroupTag, ambient_dim: usize, dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Simplex, Rational)>,
    {
        let mut c = Self::zero(group, ambient_dim, dim);
        for (s, g) in terms {
            c.push(s, g)?;
        }
        Ok(c)
    }

    /// Add `g·⟦s⟧` in place.
    pub fn push(&mut self, s: Simplex, g: Rational) -> Result<()> {
        if s.ambient_dim() != self.ambient_dim || s.dim() != self.dim {
            return Err(dim_mismatch(
                "chains",
                format!(
                    "simplex of dim {} in R^{} added to a {}-chain in R^{}",
                    s.dim(),
                    s.ambient_dim(),
                    self.dim,
                    self.ambient_dim
                ),
            ));
        }
        let g = self.group.reduce(&g)?;
        let (canon, sign) = s.canonical();
        if sign == 0 || g.is_zero() {
            return Ok(());
        }
        let g = self.group.times(&g, sign as i64);
        self.add_canonical(canon, &g);
        Ok(())
    }

    fn add_canonical(&mut self, s: Simplex, g: &Rational) {
        match self.terms.entry(s) {
            Entry::Occupied(mut e) => {
                let v = self.group.add(e.get(), g);
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                if !g.is_zero() {
                    e.insert(g.clone());
                }
            }
        }
    }

    pub fn group(&self) -> GroupTag {
        self.group
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> Option<GridSpec> {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in normal form (sorted simplices, nonzero canonical values).
    pub fn terms(&self) -> impl Iterator<Item = (&Simplex, &Rational)> {
        self.terms.iter()
    }

    /// Coefficient of `s` taken with the orientation of `s`.
    pub fn coefficient(&self, s: &Simplex) -> Rational {
        let (canon, sign) = s.canonical();
        match self.terms.get(&canon) {
            Some(g) if sign != 0 => self.group.times(g, sign as i64),
            _ => Rational::zero(),
        }
    }

    /// Mark the chain as living on `complex`, checking every simplex.
    pub fn on_grid(mut self, complex: &GridComplex) -> Result<Self> {
        if self.ambient_dim != complex.dim() {
            return Err(dim_mismatch(
                "chains",
                "chain and complex have different ambient dimensions",
            ));
        }
        for s in self.terms.keys() {
            if complex.lookup(s).is_none() {
                return Err(Error::NotOnGrid {
                    module: "chains",
                    detail: format!("{s} is not a simplex of {}", complex.spec()),
                });
            }
        }
        self.grid = Some(complex.spec());
        Ok(self)
    }

    /// Forget the complex.
    pub fn into_soup(mut self) -> Self {
        self.grid = None;
        self
    }

    pub(crate) fn with_grid_unchecked(mut self, spec: Option<GridSpec>) -> Self {
        self.grid = spec;
        self
    }

    /// Build a grid chain from `(cell id, value)` pairs.
    pub fn from_cells<I>(complex: &GridComplex, group: GroupTag, k: usize, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut c = Self::zero(group, complex.dim(), k);
        for (id, g) in cells {
            if id >= complex.count(k) {
                return Err(Error::UnknownCell { module: "chains", id });
            }
            c.push(complex.simplex(k, id), g)?;
        }
        c.grid = Some(complex.spec());
        Ok(c)
    }

    /// Coefficient vector over the `k`-simplices of `complex`. Simplices that
    /// are unions of grid simplices are decomposed first.
    pub fn to_cell_vector(&self, complex: &GridComplex) -> Result<Vec<Rational>> {
        if self.ambient_dim != complex.dim() {
            return Err(dim_mismatch(
                "chains",
                "chain and complex have different ambient dimensions",
            ));
        }
        let mut v = vec![Rational::zero(); complex.count(self.dim)];
        for (s, g) in &self.terms {
            for (id, sign) in complex.decompose(s)? {
                v[id] = self.group.add(&v[id], &self.group.times(g, sign as i64));
            }
        }
        Ok(v)
    }

    /// The same chain written on the simplices of `complex`.
    pub fn refine_onto(&self, complex: &GridComplex) -> Result<Self> {
        let v = self.to_cell_vector(complex)?;
        Self::from_cells(complex, self.group, self.dim, v.into_iter().enumerate())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch(
                self.group.to_string(),
                other.group.to_string(),
            ));
        }
        if self.ambient_dim != other.ambient_dim || self.dim != other.dim {
            return Err(dim_mismatch(
                "chains",
                format!(
                    "({}, {}) vs ({}, {})",
                    self.ambient_dim, self.dim, other.ambient_dim, other.dim
                ),
            ));
        }
        if let (Some(a), Some(b)) = (self.grid, other.grid) {
            if a != b {
                return Err(Error::ComplexMismatch(a.to_string(), b.to_string()));
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (s, g) in &other.terms {
            out.add_canonical(s.clone(), g);
        }
        out.grid = if self.grid == other.grid { self.grid } else { None };
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for g in out.terms.values_mut() {
            *g = self.group.neg(g);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Multiply every coefficient by an integer.
    pub fn times(&self, n: i64) -> Self {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(s, g)| (s.clone(), self.group.times(g, n)))
            .filter(|(_, g)| !g.is_zero())
            .collect();
        out
    }

    /// Multiply a real chain by a rational scalar.
    pub fn scale(&self, c: &Rational) -> Result<Self> {
        if self.group != GroupTag::Real {
            return Err(Error::GroupMismatch("real".into(), self.group.to_string()));
        }
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(s, g)| (s.clone(), g * c))
            .filter(|(_, g)| !g.is_zero())
            .collect();
        Ok(out)
    }

    /// Apply a coefficient map, producing a chain over `group`.
    pub fn map_coefficients(&self, group: GroupTag, f: impl Fn(&Rational) -> Rational) -> Result<Self> {
        let mut out = Self::zero(group, self.ambient_dim, self.dim);
        out.grid = self.grid;
        for (s, g) in &self.terms {
            let v = group.reduce(&f(g))?;
            if !v.is_zero() {
                out.terms.insert(s.clone(), v);
            }
        }
        Ok(out)
    }

    /// Alternating sum of vertex-deletion faces.
    pub fn boundary(&self) -> Result<Self> {
        if self.dim == 0 {
            return Err(precondition("chains", "the boundary of a 0-chain is undefined"));
        }
        let mut out = Self::zero(self.group, self.ambient_dim, self.dim - 1);
        out.grid = self.grid;
        for (s, g) in &self.terms {
            for i in 0..=self.dim {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                let (canon, parity) = s.face(i).canonical();
                out.add_canonical(canon, &self.group.times(g, sign * parity as i64));
            }
        }
        Ok(out)
    }

    /// Boundary, or the zero chain for `k = 0`.
    pub fn boundary_or_zero(&self) -> Self {
        self.boundary()
            .unwrap_or_else(|_| Self::zero(self.group, self.ambient_dim, 0).with_grid_unchecked(self.grid))
    }

    pub fn is_cycle(&self) -> bool {
        self.dim == 0 || self.boundary().map(|b| b.is_zero()).unwrap_or(false)
    }

    /// Exact mass `Σ ‖g‖ H^k(σ)`.
    pub fn mass_exact(&self) -> SurdSum {
        self.terms
            .iter()
            .map(|(s, g)| s.volume_surd().scale(&self.group.norm(g)))
            .sum()
    }

    /// Floating-point mass, summed without exact surd arithmetic.
    pub fn mass(&self) -> f64 {
        self.terms
            .iter()
            .map(|(s, g)| self.group.norm(g).to_f64().unwrap_or(f64::NAN) * s.volume())
            .sum()
    }

    pub fn mass_measure(&self) -> MassMeasure {
        let entries: Vec<(Simplex, SurdSum)> = self
            .terms
            .iter()
            .map(|(s, g)| (s.clone(), s.volume_surd().scale(&self.group.norm(g))))
            .collect();
        let total = entries.iter().map(|(_, w)| w.clone()).sum();
        MassMeasure { entries, total }
    }

    /// Keep the terms carried by the listed `k`-simplices of `complex`.
    pub fn restrict(&self, complex: &GridComplex, cells: &[usize]) -> Result<Self> {
        if self.grid != Some(complex.spec()) {
            return Err(precondition(
                "chains",
                "restriction needs a chain on the given complex",
            ));
        }
        let mut keep = BTreeSet::new();
        for &id in cells {
            if id >= complex.count(self.dim) {
                return Err(Error::UnknownCell { module: "chains", id });
            }
            keep.insert(complex.simplex(self.dim, id));
        }
        Ok(self.filter(|s| keep.contains(s)))
    }

    /// Keep the terms whose simplex satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Simplex) -> bool) -> Self {
        let mut out = self.clone();
        out.terms.retain(|s, _| keep(s));
        out
    }

    /// One round of edgewise subdivision: every `k`-simplex becomes `2^k`
    /// congruent pieces with inherited coefficients.
    pub fn subdivide(&self) -> Result<Self> {
        if self.grid.is_some() {
            return Err(precondition(
                "chains",
                "grid chains are refined by moving to a finer complex, not by subdivision",
            ));
        }
        let pieces = edgewise_pieces(self.dim);
        let mut out = Self::zero(self.group, self.ambient_dim, self.dim);
        for (s, g) in &self.terms {
            for (lambdas, sign) in &pieces {
                let verts: Vec<Point> = lambdas.iter().map(|l| affine_combination(s, l)).collect();
                let piece = Simplex::from_vertices_unchecked(verts);
                let (canon, parity) = piece.canonical();
                out.add_canonical(canon, &self.group.times(g, (*sign * parity) as i64));
            }
        }
        Ok(out)
    }

    /// Push every simplex through an affine map of `R^d`.
    pub fn pushforward(&self, f: &AffineMap) -> Result<Self> {
        if f.dim() != self.ambient_dim {
            return Err(dim_mismatch(
                "geometry",
                "affine map and chain have different ambient dimensions",
            ));
        }
        let mut out = Self::zero(self.group, self.ambient_dim, self.dim);
        for (s, g) in &self.terms {
            let (canon, parity) = s.map(f).canonical();
            if parity != 0 {
                out.add_canonical(canon, &self.group.times(g, parity as i64));
            }
        }
        Ok(out)
    }

    /// Change the coefficient group without touching values; the values must
    /// already be valid in the target group.
    pub fn regroup(&self, group: GroupTag) -> Result<Self> {
        self.map_coefficients(group, Clone::clone)
    }

    /// All vertices appearing in the chain.
    pub fn vertex_set(&self) -> BTreeSet<Point> {
        self.terms
            .keys()
            .flat_map(|s| s.vertices().iter().cloned())
            .collect()
    }
}

/// Barycentric combination `Σ λ_i v_i`.
fn affine_combination(s: &Simplex, lambda: &[Rational]) -> Point {
    let d = s.ambient_dim();
    (0..d)
        .map(|i| {
            s.vertices()
                .iter()
                .zip(lambda)
                .fold(Rational::zero(), |acc, (v, l)| acc + &v[i] * l)
        })
        .collect()
}

/// Pieces of the edgewise subdivision of a `k`-simplex, as barycentric
/// vertex lists with their orientation sign.
///
/// The standard simplex `1 ≥ x_1 ≥ … ≥ x_k ≥ 0` is cut by the Kuhn
/// triangulation of the cube of side 1/2; `x` has barycentric coordinates
/// `λ_0 = 1 - x_1`, `λ_j = x_j - x_{j+1}`.
fn edgewise_pieces(k: usize) -> Vec<(Vec<Vec<Rational>>, i8)> {
    if k == 0 {
        return vec![(vec![vec![Rational::one()]], 1)];
    }
    let half = Rational::new(1.into(), 2.into());
    let mut out = Vec::new();
    for base in 0..(1usize << k) {
        let corner: Vec<usize> = (0..k).map(|i| (base >> (k - 1 - i)) & 1).collect();
        for perm in permutations(k) {
            let mut cur = corner.clone();
            let mut path = vec![cur.clone()];
            for &axis in &perm {
                cur[axis] += 1;
                path.push(cur.clone());
            }
            let inside = path
                .iter()
                .all(|p| p[0] <= 2 && p.windows(2).all(|w| w[0] >= w[1]));
            if !inside {
                continue;
            }
            let lambdas = path
                .iter()
                .map(|p| {
                    let x: Vec<Rational> = p
                        .iter()
                        .map(|&c| Rational::from_integer(c.into()) * &half)
                        .collect();
                    let mut l = vec![Rational::one() - &x[0]];
                    for j in 0..k {
                        let next = if j + 1 < k {
                            x[j + 1].clone()
                        } else {
                            Rational::zero()
                        };
                        l.push(&x[j] - next);
                    }
                    l
                })
                .collect();
            let frame: Vec<Vec<Rational>> = path[1..]
                .iter()
                .map(|p| {
                    p.iter()
                        .zip(&path[0])
                        .map(|(&a, &b)| Rational::from_integer((a as i64 - b as i64).into()))
                        .collect()
                })
                .collect();
            out.push((lambdas, linalg::sign(&linalg::determinant(&frame))));
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Join every simplex to `apex`. Simplices whose cone would be degenerate
/// are dropped; the second value counts them.
pub fn cone(apex: &[Rational], c: &PolyChain) -> Result<(PolyChain, usize)> {
    if apex.len() != c.ambient_dim() {
        return Err(dim_mismatch(
            "geometry",
            "apex and chain have different ambient dimensions",
        ));
    }
    if c.dim() >= c.ambient_dim() {
        return Err(dim_mismatch("geometry", "cannot cone a top-dimensional chain"));
    }
    let mut out = PolyChain::zero(c.group(), c.ambient_dim(), c.dim() + 1);
    let mut dropped = 0;
    for (s, g) in c.terms() {
        let mut verts = vec![apex.to_vec()];
        verts.extend(s.vertices().iter().cloned());
        let joined = Simplex::from_vertices_unchecked(verts);
        if joined.is_degenerate() {
            dropped += 1;
            continue;
        }
        let (canon, parity) = joined.canonical();
        out.add_canonical(canon, &c.group().times(g, parity as i64));
    }
    Ok((out, dropped))
}

/// `A♯c` for an affine map `A`.
pub fn affine_pushforward(c: &PolyChain, a: &AffineMap) -> Result<PolyChain> {
    c.pushforward(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::kuhn_complex;
    use crate::rat;
    use proptest::prelude::*;

    fn s(pts: &[&[i64]]) -> Simplex {
        Simplex::new(
            pts.iter()
                .map(|p| p.iter().map(|&x| rat(x, 1)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn real(terms: Vec<(Simplex, Rational)>) -> PolyChain {
        let d = terms[0].0.ambient_dim();
        let k = terms[0].0.dim();
        PolyChain::from_terms(GroupTag::Real, d, k, terms).unwrap()
    }

    #[test]
    fn opposite_coefficients_cancel_and_like_terms_merge() {
        let t = s(&[&[0, 0], &[1, 0], &[0, 1]]);
        let c = real(vec![(t.clone(), rat(2, 3))]);
        assert!(c.add(&c.neg()).unwrap().is_zero());
        let merged = real(vec![(t.clone(), rat(1, 3)), (t.clone(), rat(1, 2))]);
        assert_eq!(merged.coefficient(&t), rat(5, 6));
        let flipped = s(&[&[1, 0], &[0, 0], &[0, 1]]);
        let with_flip = real(vec![(t.clone(), rat(1, 1)), (flipped, rat(1, 1))]);
        assert!(with_flip.is_zero());
    }

    #[test]
    fn triangle_boundary_signs() {
        let t = s(&[&[0, 0], &[1, 0], &[0, 1]]);
        let b = real(vec![(t, rat(1, 1))]).boundary().unwrap();
        assert_eq!(b.coefficient(&s(&[&[1, 0], &[0, 1]])), rat(1, 1));
        assert_eq!(b.coefficient(&s(&[&[0, 0], &[0, 1]])), rat(-1, 1));
        assert_eq!(b.coefficient(&s(&[&[0, 0], &[1, 0]])), rat(1, 1));
        assert!(b.boundary().unwrap().is_zero());
        assert!(b.boundary().unwrap().boundary().is_err());
    }

    #[test]
    fn square_boundary_drops_the_diagonal() {
        let g = kuhn_complex(2, 1).unwrap();
        let sq = PolyChain::from_cells(
            &g,
            GroupTag::Real,
            2,
            (0..2).map(|i| (i, rat(g.orientation(i) as i64, 1))),
        )
        .unwrap();
        let b = sq.boundary().unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.mass_exact().as_rational(), Some(rat(4, 1)));
    }

    #[test]
    fn circle_masses() {
        let seg = s(&[&[0, 0], &[1, 0]]);
        let c = PolyChain::from_terms(GroupTag::Circle, 2, 1, vec![(seg, rat(1, 2))]).unwrap();
        assert_eq!(c.mass_exact().as_rational(), Some(rat(1, 2)));
        let g = kuhn_complex(2, 2).unwrap();
        let sq = |cube: usize, v: Rational| {
            g.simplices_in_cube(2, cube)
                .into_iter()
                .map(move |id| (id, v.clone()))
        };
        let terms: Vec<_> = sq(0, rat(1, 10)).chain(sq(1, rat(9, 10))).collect();
        let p = PolyChain::from_cells(&g, GroupTag::Circle, 2, terms).unwrap();
        // two cells of area 1/4 with norms 0.1 each
        assert_eq!(p.mass_exact().as_rational(), Some(rat(1, 20)));
        assert!(PolyChain::zero(GroupTag::Real, 2, 1).mass_exact().is_zero());
    }

    #[test]
    fn refinement_commutes_with_boundary() {
        let coarse = kuhn_complex(3, 1).unwrap();
        let fine = kuhn_complex(3, 2).unwrap();
        for k in 1..=3 {
            for id in 0..coarse.count(k) {
                let c = PolyChain::from_cells(&coarse, GroupTag::Real, k, [(id, rat(1, 1))]).unwrap();
                let r = c.refine_onto(&fine).unwrap();
                assert_eq!(r.mass_exact(), c.mass_exact());
                assert_eq!(
                    r.boundary().unwrap(),
                    c.boundary().unwrap().refine_onto(&fine).unwrap()
                );
            }
        }
    }

    #[test]
    fn restriction_splits_mass() {
        let g = kuhn_complex(2, 2).unwrap();
        let c = PolyChain::from_cells(
            &g,
            GroupTag::Real,
            2,
            (0..g.count(2)).map(|i| (i, rat(i as i64 + 1, 3))),
        )
        .unwrap();
        let left: Vec<usize> = (0..g.count(2))
            .filter(|&i| g.lattice_coords(g.vertex_ids(2, i)[2])[0] <= 1)
            .collect();
        let right: Vec<usize> = (0..g.count(2)).filter(|i| !left.contains(i)).collect();
        let a = c.restrict(&g, &left).unwrap();
        let b = c.restrict(&g, &right).unwrap();
        assert_eq!(a.add(&b).unwrap(), c);
        let mm = c.mass_measure();
        let left_set: BTreeSet<Simplex> = left.iter().map(|&i| g.simplex(2, i)).collect();
        assert_eq!(mm.measure_of(|s| left_set.contains(s)), a.mass_exact());
        assert_eq!(c.restrict(&g, &(0..g.count(2)).collect::<Vec<_>>()).unwrap(), c);
        assert!(c.restrict(&g, &[]).unwrap().is_zero());
        assert!(c.restrict(&g, &[999]).is_err());
    }

    #[test]
    fn subdivision_preserves_mass_and_boundary() {
        let seg = real(vec![(s(&[&[0, 0], &[2, 1]]), rat(3, 1))]);
        let sub = seg.subdivide().unwrap();
        assert_eq!(sub.len(), 2);
        assert_eq!(sub.mass_exact(), seg.mass_exact());
        let tri = real(vec![(s(&[&[0, 0, 0], &[2, 1, 0], &[1, 3, 1]]), rat(1, 2))]);
        let sub = tri.subdivide().unwrap();
        assert_eq!(sub.len(), 4);
        assert_eq!(sub.mass_exact(), tri.mass_exact());
        assert_eq!(
            sub.boundary().unwrap(),
            tri.boundary().unwrap().subdivide().unwrap()
        );
        let tet = real(vec![(
            s(&[&[0, 0, 0], &[1, 0, 0], &[1, 1, 0], &[0, 1, 3]]),
            rat(1, 1),
        )]);
        let sub = tet.subdivide().unwrap();
        assert_eq!(sub.len(), 8);
        assert_eq!(sub.mass_exact(), tet.mass_exact());
        assert_eq!(
            sub.boundary().unwrap(),
            tet.boundary().unwrap().subdivide().unwrap()
        );
        assert!(PolyChain::zero(GroupTag::Real, 2, 1)
            .subdivide()
            .unwrap()
            .is_zero());
    }

    #[test]
    fn homothety_scales_mass_by_power() {
        let half = rat(1, 2);
        let origin = vec![rat(0, 1), rat(0, 1)];
        let h = AffineMap::homothety(&origin, &half);
        let seg = real(vec![(s(&[&[0, 0], &[1, 0]]), rat(1, 1))]);
        assert_eq!(
            seg.pushforward(&h).unwrap().mass_exact().as_rational(),
            Some(rat(1, 2))
        );
        let tri = real(vec![(s(&[&[0, 0], &[1, 0], &[0, 1]]), rat(1, 1))]);
        assert_eq!(
            tri.pushforward(&h).unwrap().mass_exact().as_rational(),
            Some(rat(1, 8))
        );
        assert_eq!(tri.pushforward(&AffineMap::identity(2)).unwrap(), tri);
    }

    #[test]
    fn cone_over_square_loop() {
        let g = kuhn_complex(2, 1).unwrap();
        let sq = PolyChain::from_cells(
            &g,
            GroupTag::Real,
            2,
            (0..2).map(|i| (i, rat(g.orientation(i) as i64, 1))),
        )
        .unwrap();
        let loop_ = sq.boundary().unwrap().into_soup();
        let (c, dropped) = cone(&[rat(1, 2), rat(1, 2)], &loop_).unwrap();
        assert_eq!((c.len(), dropped), (4, 0));
        assert_eq!(c.boundary().unwrap(), loop_);
        let (z, _) = cone(&[rat(1, 2), rat(1, 2)], &PolyChain::zero(GroupTag::Real, 2, 1)).unwrap();
        assert!(z.is_zero());
        let seg = real(vec![(s(&[&[1, 0], &[1, 1]]), rat(3, 1))]);
        let origin = [rat(0, 1), rat(0, 1)];
        let (c, _) = cone(&origin, &seg).unwrap();
        let (cb, _) = cone(&origin, &seg.boundary().unwrap()).unwrap();
        assert_eq!(c.boundary().unwrap(), seg.sub(&cb).unwrap());
        let (_, dropped) = cone(&[rat(1, 1), rat(5, 1)], &seg).unwrap();
        assert_eq!(dropped, 1);
    }

    proptest! {
        #[test]
        fn boundary_squared_vanishes(coeffs in proptest::collection::vec(-20i64..20, 48)) {
            let g = kuhn_complex(3, 2).unwrap();
            let c = PolyChain::from_cells(&g, GroupTag::Real, 3,
                coeffs.iter().enumerate().map(|(i, &v)| (i, rat(v, 7)))).unwrap();
            prop_assert!(c.boundary().unwrap().boundary().unwrap().is_zero());
        }

        #[test]
        fn mass_is_subadditive(a in proptest::collection::vec(-5i64..5, 8), b in proptest::collection::vec(-5i64..5, 8)) {
            let g = kuhn_complex(2, 2).unwrap();
            let ca = PolyChain::from_cells(&g, GroupTag::Real, 2, a.iter().enumerate().map(|(i, &v)| (i, rat(v, 2)))).unwrap();
            let cb = PolyChain::from_cells(&g, GroupTag::Real, 2, b.iter().enumerate().map(|(i, &v)| (i, rat(v, 3)))).unwrap();
            prop_assert!(crate::surd::le(&ca.add(&cb).unwrap().mass_exact(), &(ca.mass_exact() + cb.mass_exact())));
        }
    }
}
