//! Seeded random instances for tests, benches and the `gen` command.
//!
//! Every generator takes an explicit [`ChaCha8Rng`], so identical seeds give
//! identical instances on every platform.

use num::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chains::PolyChain;
use crate::coarea::GridFunction;
use crate::error::Result;
use crate::geometry::{Point, Simplex};
use crate::grid::GridComplex;
use crate::groups::GroupTag;
use crate::lifting::Decomposition;
use crate::surd::le;
use crate::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random nonzero-ish coefficient in `group` with small denominators.
pub fn coefficient(rng: &mut ChaCha8Rng, group: GroupTag) -> Rational {
    match group {
        GroupTag::Real => {
            let q: i64 = rng.gen_range(1..=6);
            Rational::new(rng.gen_range(-12..=12).into(), q.into())
        }
        GroupTag::Integer => Rational::from_integer(rng.gen_range(-3i64..=3).into()),
        GroupTag::ModP(p) => Rational::from_integer(rng.gen_range(0..p).into()),
        GroupTag::Circle => {
            let q: i64 = rng.gen_range(2..=12);
            Rational::new(rng.gen_range(0..q).into(), q.into())
        }
    }
}

/// A `k`-chain on `complex` supported on a random fraction `density` of the cells.
pub fn grid_chain(
    rng: &mut ChaCha8Rng,
    complex: &GridComplex,
    group: GroupTag,
    k: usize,
    density: f64,
) -> Result<PolyChain> {
    let mut cells = Vec::new();
    for id in 0..complex.count(k) {
        if rng.gen_bool(density) {
            cells.push((id, coefficient(rng, group)));
        }
    }
    PolyChain::from_cells(complex, group, k, cells)
}

/// A top-dimensional chain constant on each cube: `Σ v_c ⟦c⟧` with the
/// standard orientation.
pub fn cube_chain(
    rng: &mut ChaCha8Rng,
    complex: &GridComplex,
    group: GroupTag,
    density: f64,
) -> Result<PolyChain> {
    let d = complex.dim();
    let values: Vec<Option<Rational>> = (0..complex.cube_count())
        .map(|_| rng.gen_bool(density).then(|| coefficient(rng, group)))
        .collect();
    let cells = (0..complex.count(d)).filter_map(|id| {
        values[complex.cube_of(id)]
            .as_ref()
            .map(|v| (id, v * Rational::from_integer(complex.orientation(id).into())))
    });
    PolyChain::from_cells(complex, group, d, cells)
}

/// Random circle top chain; half the instances are cubewise constant.
pub fn circle_top_chain(rng: &mut ChaCha8Rng, complex: &GridComplex) -> Result<PolyChain> {
    let density = rng.gen_range(0.2..0.9);
    if rng.gen_bool(0.5) {
        cube_chain(rng, complex, GroupTag::Circle, density)
    } else {
        grid_chain(rng, complex, GroupTag::Circle, complex.dim(), density)
    }
}

/// A real `k`-chain `Q` with integral boundary multiplicities: the boundary
/// of a fractional `(k+1)`-chain plus a sparse integer `k`-chain.
pub fn integral_boundary_chain(rng: &mut ChaCha8Rng, complex: &GridComplex, k: usize) -> Result<PolyChain> {
    let filling = if k + 1 == complex.dim() && rng.gen_bool(0.5) {
        {
            let density = rng.gen_range(0.2..0.7);
            cube_chain(rng, complex, GroupTag::Real, density)?
        }
    } else {
        {
            let density = rng.gen_range(0.1..0.5);
            grid_chain(rng, complex, GroupTag::Real, k + 1, density)?
        }
    };
    let integer = grid_chain(rng, complex, GroupTag::Integer, k, 0.08)?;
    filling.boundary()?.add(&integer.regroup(GroupTag::Real)?)
}

/// A circle `k`-chain with a decomposition `T = Z + ∂S` meeting the
/// hypotheses `M(Z) ≤ (1+ε)M(T)` and `M(∂S) ≤ (2+2ε)M(T)`. Falls back to the
/// trivial decomposition when no sample qualifies.
pub fn lift_instance(
    rng: &mut ChaCha8Rng,
    complex: &GridComplex,
    k: usize,
    epsilon: &Rational,
) -> Result<(PolyChain, Decomposition)> {
    let one_eps = Rational::from_integer(1.into()) + epsilon;
    let two_eps = &one_eps * Rational::from_integer(2.into());
    for _ in 0..64 {
        let s = if k + 1 == complex.dim() {
            {
                let density = rng.gen_range(0.1..0.6);
                cube_chain(rng, complex, GroupTag::Circle, density)?
            }
        } else {
            {
                let density = rng.gen_range(0.05..0.3);
                grid_chain(rng, complex, GroupTag::Circle, k + 1, density)?
            }
        };
        let z = grid_chain(rng, complex, GroupTag::Circle, k, 0.1)?;
        let ds = s.boundary()?;
        let t = z.add(&ds)?;
        if t.is_zero() {
            continue;
        }
        let mt = t.mass_exact();
        if le(&z.mass_exact(), &mt.scale(&one_eps)) && le(&ds.mass_exact(), &mt.scale(&two_eps)) {
            return Ok((t, Decomposition { z, s }));
        }
    }
    let t = grid_chain(rng, complex, GroupTag::Circle, k, 0.3)?;
    let dec = Decomposition::trivial(&t);
    Ok((t, dec))
}

fn random_point(rng: &mut ChaCha8Rng, d: usize, den: i64) -> Point {
    (0..d)
        .map(|_| Rational::new(rng.gen_range(1..den).into(), den.into()))
        .collect()
}

/// A real chain of a few random nondegenerate `k`-simplices in the open cube.
pub fn soup_chain(rng: &mut ChaCha8Rng, d: usize, k: usize, terms: usize) -> Result<PolyChain> {
    let mut c = PolyChain::zero(GroupTag::Real, d, k);
    while c.len() < terms {
        let verts: Vec<Point> = (0..=k).map(|_| random_point(rng, d, 16)).collect();
        let s = Simplex::new(verts)?;
        if s.is_degenerate() {
            continue;
        }
        let mut g = coefficient(rng, GroupTag::Real);
        if g.is_zero() {
            g = Rational::from_integer(1.into());
        }
        c.push(s, g.abs())?;
    }
    Ok(c)
}

/// A polygonal loop through `vertices` random points (a cycle), or an open
/// path when `closed` is false.
pub fn polygon_chain(rng: &mut ChaCha8Rng, d: usize, vertices: usize, closed: bool) -> Result<PolyChain> {
    let pts: Vec<Point> = (0..vertices).map(|_| random_point(rng, d, 16)).collect();
    let g = Rational::new(rng.gen_range(1..=4).into(), rng.gen_range(1..=3).into());
    let mut c = PolyChain::zero(GroupTag::Real, d, 1);
    let edges = if closed { vertices } else { vertices - 1 };
    for i in 0..edges {
        let (a, b) = (pts[i].clone(), pts[(i + 1) % vertices].clone());
        if a != b {
            c.push(Simplex::new(vec![a, b])?, g.clone())?;
        }
    }
    Ok(c)
}

/// Piecewise-constant grid function with integer or rational values.
pub fn grid_function(rng: &mut ChaCha8Rng, d: usize, n: usize, integer: bool) -> Result<GridFunction> {
    let palette: Vec<Rational> = (0..rng.gen_range(1..=5))
        .map(|_| {
            if integer {
                Rational::from_integer(rng.gen_range(-4i64..=6).into())
            } else {
                Rational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=7).into())
            }
        })
        .collect();
    let values = (0..n.pow(d as u32))
        .map(|_| palette.choose(rng).expect("palette is nonempty").clone())
        .collect();
    GridFunction::new(d, n, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::kuhn_complex;

    #[test]
    fn seeds_are_reproducible() {
        let g = kuhn_complex(2, 3).unwrap();
        let a = grid_chain(&mut rng(7), &g, GroupTag::Real, 1, 0.4).unwrap();
        let b = grid_chain(&mut rng(7), &g, GroupTag::Real, 1, 0.4).unwrap();
        assert_eq!(a, b);
        let c = grid_chain(&mut rng(8), &g, GroupTag::Real, 1, 0.4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn integral_boundary_instances_qualify() {
        let g = kuhn_complex(2, 3).unwrap();
        let mut r = rng(1);
        for _ in 0..10 {
            let q = integral_boundary_chain(&mut r, &g, 1).unwrap();
            assert!(q.boundary().unwrap().terms().all(|(_, c)| c.is_integer()));
        }
    }

    #[test]
    fn lift_instances_meet_hypotheses() {
        let g = kuhn_complex(2, 3).unwrap();
        let eps = Rational::new(1.into(), 10.into());
        let mut r = rng(3);
        for _ in 0..5 {
            let (t, dec) = lift_instance(&mut r, &g, 1, &eps).unwrap();
            assert_eq!(dec.z.add(&dec.s.boundary().unwrap()).unwrap(), t);
        }
    }
}
