//! The Kuhn (Freudenthal) triangulation of `[0,1]^d`.
//!
//! Each of the `n^d` cubes of side `1/n` is split into `d!` simplices, one
//! per coordinate ordering, which fit together across cube faces. Vertex ids
//! follow the lexicographic order of the lattice points, so a simplex stored
//! with increasing vertex ids is also stored with sorted coordinates, which
//! is the orientation convention used by [`crate::chains::PolyChain`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num::{BigInt, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_bounds, Point, Simplex};
use crate::linalg;
use crate::surd::SurdSum;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    pub n: usize,
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kuhn(d={}, n={})", self.d, self.n)
    }
}

/// Size guard for complexes built on a desk.
#[derive(Clone, Copy, Debug)]
pub struct GridLimits {
    pub max_dim: usize,
    pub max_resolution: usize,
}

impl Default for GridLimits {
    fn default() -> Self {
        Self {
            max_dim: 3,
            max_resolution: 32,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridComplex {
    spec: GridSpec,
    lattice: Vec<Vec<usize>>,
    points: Vec<Point>,
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    incidence: Vec<Vec<Vec<(usize, i8)>>>,
    top_cube: Vec<usize>,
}

pub fn kuhn_complex(d: usize, n: usize) -> Result<GridComplex> {
    GridComplex::kuhn_with_limits(d, n, GridLimits::default())
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, d - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

impl GridComplex {
    pub fn kuhn(d: usize, n: usize) -> Result<Self> {
        Self::kuhn_with_limits(d, n, GridLimits::default())
    }

    pub fn kuhn_with_limits(d: usize, n: usize, limits: GridLimits) -> Result<Self> {
        check_bounds("dimension d", d, 1, limits.max_dim)?;
        check_bounds("resolution n", n, 1, limits.max_resolution)?;
        let side = n + 1;
        let nverts = side.pow(d as u32);
        let lattice: Vec<Vec<usize>> = (0..nverts)
            .map(|mut id| {
                let mut c = vec![0; d];
                for i in (0..d).rev() {
                    c[i] = id % side;
                    id /= side;
                }
                c
            })
            .collect();
        let points = lattice
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&x| Rational::new((x as i64).into(), (n as i64).into()))
                    .collect()
            })
            .collect();
        let vid = |c: &[usize]| c.iter().fold(0, |acc, &x| acc * side + x);

        let perms = permutations(d);
        let mut tops: Vec<(Vec<usize>, usize)> = Vec::new();
        for cube in 0..n.pow(d as u32) {
            let mut base = vec![0; d];
            let mut rem = cube;
            for i in (0..d).rev() {
                base[i] = rem % n;
                rem /= n;
            }
            for p in &perms {
                let mut cur = base.clone();
                let mut path = vec![vid(&cur)];
                for &axis in p {
                    cur[axis] += 1;
                    path.push(vid(&cur));
                }
                tops.push((path, cube));
            }
        }
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); d + 1];
        for (path, _) in &tops {
            for mask in 1u32..(1 << (d + 1)) {
                let face: Vec<usize> = (0..=d)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| path[i])
                    .collect();
                by_dim[face.len() - 1].insert(face);
            }
        }
        let simplices: Vec<Vec<Vec<usize>>> = by_dim.into_iter().map(|s| s.into_iter().collect()).collect();
        let index: Vec<HashMap<Vec<usize>, usize>> = simplices
            .iter()
            .map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let mut incidence = vec![Vec::new()];
        for k in 1..=d {
            let faces = simplices[k]
                .iter()
                .map(|s| {
                    (0..s.len())
                        .map(|i| {
                            let mut f = s.clone();
                            f.remove(i);
                            (index[k - 1][&f], if i % 2 == 0 { 1 } else { -1 })
                        })
                        .collect()
                })
                .collect();
            incidence.push(faces);
        }
        let mut top_cube = vec![0; simplices[d].len()];
        for (path, cube) in &tops {
            top_cube[index[d][path]] = *cube;
        }
        Ok(Self {
            spec: GridSpec { d, n },
            lattice,
            points,
            simplices,
            index,
            incidence,
            top_cube,
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.d
    }

    pub fn resolution(&self) -> usize {
        self.spec.n
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    pub fn vertex_ids(&self, k: usize, id: usize) -> &[usize] {
        &self.simplices[k][id]
    }

    pub fn point(&self, vertex: usize) -> &Point {
        &self.points[vertex]
    }

    pub fn lattice_coords(&self, vertex: usize) -> &[usize] {
        &self.lattice[vertex]
    }

    /// The `k`-simplex with id `id`, vertices in canonical order.
    pub fn simplex(&self, k: usize, id: usize) -> Simplex {
        Simplex::from_vertices_unchecked(
            self.simplices[k][id]
                .iter()
                .map(|&v| self.points[v].clone())
                .collect(),
        )
    }

    /// Signed faces of a `k`-simplex (`k ≥ 1`).
    pub fn faces(&self, k: usize, id: usize) -> &[(usize, i8)] {
        &self.incidence[k][id]
    }

    /// Orientation of a top simplex against the standard orientation of `R^d`.
    pub fn orientation(&self, top_id: usize) -> i8 {
        self.simplex(self.spec.d, top_id).orientation_sign()
    }

    /// Cube (row-major over cube corners) containing a top simplex.
    pub fn cube_of(&self, top_id: usize) -> usize {
        self.top_cube[top_id]
    }

    pub fn cube_count(&self) -> usize {
        self.spec.n.pow(self.spec.d as u32)
    }

    fn vertex_of_point(&self, p: &[Rational]) -> Option<usize> {
        let n = BigInt::from(self.spec.n);
        let side = self.spec.n + 1;
        let mut id = 0usize;
        for x in p {
            let scaled = x * Rational::from_integer(n.clone());
            if !scaled.is_integer() || scaled.is_negative() {
                return None;
            }
            let c = scaled.to_integer().to_usize()?;
            if c > self.spec.n {
                return None;
            }
            id = id * side + c;
        }
        Some(id)
    }

    /// Id of a simplex of the complex with the same vertex set.
    pub fn lookup(&self, s: &Simplex) -> Option<usize> {
        if s.ambient_dim() != self.spec.d {
            return None;
        }
        let mut ids = s
            .vertices()
            .iter()
            .map(|p| self.vertex_of_point(p))
            .collect::<Option<Vec<_>>>()?;
        ids.sort_unstable();
        self.index.get(s.dim())?.get(&ids).copied()
    }

    /// Express an arbitrary `k`-simplex as a signed sum of grid `k`-simplices.
    ///
    /// Fails unless the simplex is exactly a union of grid simplices.
    pub fn decompose(&self, s: &Simplex) -> Result<Vec<(usize, i8)>> {
        let k = s.dim();
        if s.ambient_dim() != self.spec.d || k > self.spec.d {
            return Err(Error::NotOnGrid {
                module: "grid",
                detail: format!("simplex {s} has the wrong dimensions for {}", self.spec),
            });
        }
        if let Some(id) = self.lookup(s) {
            return Ok(vec![(id, s.canonical().1)]);
        }
        if s.is_degenerate() {
            return Err(Error::NotOnGrid {
                module: "grid",
                detail: format!("degenerate simplex {s}"),
            });
        }
        let inside: BTreeSet<usize> = (0..self.points.len())
            .filter(|&v| s.contains_point(&self.points[v]))
            .collect();
        let base_bary =
            |p: &Point| -> Vec<Rational> { s.barycentric(p).expect("point inside simplex")[1..].to_vec() };
        let mut out = Vec::new();
        let mut total = SurdSum::zero();
        for (id, verts) in self.simplices[k].iter().enumerate() {
            if !verts.iter().all(|v| inside.contains(v)) {
                continue;
            }
            let coords: Vec<Vec<Rational>> = verts.iter().map(|&v| base_bary(&self.points[v])).collect();
            let m: Vec<Vec<Rational>> = coords[1..]
                .iter()
                .map(|c| c.iter().zip(&coords[0]).map(|(a, b)| a - b).collect())
                .collect();
            let sign = linalg::sign(&linalg::determinant(&m));
            if sign == 0 {
                continue;
            }
            total += self.simplex(k, id).volume_surd();
            out.push((id, sign));
        }
        if total != s.volume_surd() {
            return Err(Error::NotOnGrid {
                module: "grid",
                detail: format!("{s} is not a union of simplices of {}", self.spec),
            });
        }
        Ok(out)
    }

    /// Ids of `k`-simplices contained in the closed cube `cube`.
    pub fn simplices_in_cube(&self, k: usize, cube: usize) -> Vec<usize> {
        let n = self.spec.n;
        let d = self.spec.d;
        let mut base = vec![0; d];
        let mut rem = cube;
        for i in (0..d).rev() {
            base[i] = rem % n;
            rem /= n;
        }
        self.simplices[k]
            .iter()
            .enumerate()
            .filter(|(_, verts)| {
                verts.iter().all(|&v| {
                    self.lattice[v]
                        .iter()
                        .zip(&base)
                        .all(|(&c, &b)| c == b || c == b + 1)
                })
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Exact `k`-volume of a grid simplex.
    pub fn volume_surd(&self, k: usize, id: usize) -> SurdSum {
        self.simplex(k, id).volume_surd()
    }

    /// Grid spacing.
    pub fn spacing(&self) -> Rational {
        Rational::new(1.into(), (self.spec.n as i64).into())
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() || self.points[0].iter().all(Zero::is_zero) && self.points.len() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_counts() {
        let g = kuhn_complex(2, 1).unwrap();
        assert_eq!((g.count(0), g.count(1), g.count(2)), (4, 5, 2));
        let g = kuhn_complex(1, 3).unwrap();
        assert_eq!((g.count(0), g.count(1)), (4, 3));
        let g = kuhn_complex(3, 1).unwrap();
        assert_eq!(g.count(3), 6);
        assert_eq!((g.count(0), g.count(1), g.count(2)), (8, 19, 18));
        let g = kuhn_complex(2, 3).unwrap();
        assert_eq!(g.count(2), 2 * 9);
        assert_eq!(g.count(1), 3 * 4 * 2 + 9);
        assert!(kuhn_complex(4, 1).is_err());
        assert!(kuhn_complex(2, 0).is_err());
    }

    #[test]
    fn permutation_count_matches_factorial() {
        for d in 1..=4 {
            let perms = permutations(d);
            let fact: usize = (1..=d).product();
            assert_eq!(perms.len(), fact);
            let distinct: BTreeSet<_> = perms.into_iter().collect();
            assert_eq!(distinct.len(), fact);
        }
    }

    #[test]
    fn composed_incidence_vanishes() {
        for (d, n) in [(2, 2), (3, 2)] {
            let g = kuhn_complex(d, n).unwrap();
            for k in 2..=d {
                for id in 0..g.count(k) {
                    let mut acc: HashMap<usize, i64> = HashMap::new();
                    for &(f, s1) in g.faces(k, id) {
                        for &(e, s2) in g.faces(k - 1, f) {
                            *acc.entry(e).or_default() += (s1 * s2) as i64;
                        }
                    }
                    assert!(acc.values().all(|&v| v == 0));
                }
            }
        }
    }

    #[test]
    fn tops_have_equal_volume() {
        let g = kuhn_complex(3, 2).unwrap();
        let v0 = g.simplex(3, 0).squared_volume();
        for id in 0..g.count(3) {
            assert_eq!(g.simplex(3, id).squared_volume(), v0);
        }
    }

    #[test]
    fn decompose_coarse_simplex_into_fine_grid() {
        let coarse = kuhn_complex(2, 1).unwrap();
        let fine = kuhn_complex(2, 2).unwrap();
        for k in 0..=2 {
            for id in 0..coarse.count(k) {
                let s = coarse.simplex(k, id);
                let parts = fine.decompose(&s).unwrap();
                assert_eq!(parts.len(), 1 << k);
                if k == 2 {
                    for &(f, sign) in &parts {
                        assert_eq!(sign, fine.orientation(f) * coarse.orientation(id));
                    }
                }
            }
        }
        let odd = Simplex::new(vec![
            vec![Rational::zero(), Rational::zero()],
            vec![Rational::new(1.into(), 3.into()), Rational::zero()],
        ])
        .unwrap();
        assert!(fine.decompose(&odd).is_err());
    }
}
