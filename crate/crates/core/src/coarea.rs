//! Level-set decomposition of piecewise-constant grid functions.
//!
//! For `u` constant on the cubes of an `n^d` grid and zero outside, the
//! codimension-one chain `T = ∂(u·⟦grid⟧)` is the finite weighted sum of the
//! multiplicity-one chains `R_t = ∂⟦{u > t}⟧` (for `t ≥ 0`) and
//! `R_t = −∂⟦{u ≤ t}⟧` (for `t < 0`), and the masses add up exactly.

use num::{Signed, Zero};

use crate::chains::PolyChain;
use crate::error::{dim_mismatch, Result};
use crate::geometry::check_bounds;
use crate::grid::{GridComplex, GridLimits};
use crate::groups::GroupTag;
use crate::surd::SurdSum;
use crate::Rational;

/// One rational value per cube of the `n^d` grid, row-major with the first
/// coordinate most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridFunction {
    d: usize,
    n: usize,
    values: Vec<Rational>,
}

impl GridFunction {
    pub fn new(d: usize, n: usize, values: Vec<Rational>) -> Result<Self> {
        let limits = GridLimits::default();
        check_bounds("d", d, 1, limits.max_dim)?;
        check_bounds("n", n, 1, limits.max_resolution)?;
        let cells = n.pow(d as u32);
        if values.len() != cells {
            return Err(dim_mismatch(
                "coarea",
                format!(
                    "expected {cells} values for d = {d}, n = {n}, got {}",
                    values.len()
                ),
            ));
        }
        Ok(Self { d, n, values })
    }

    pub fn constant(d: usize, n: usize, c: Rational) -> Result<Self> {
        Self::new(d, n, vec![c; n.pow(d as u32)])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, cube: usize) -> &Rational {
        &self.values[cube]
    }

    pub fn complex(&self) -> Result<GridComplex> {
        GridComplex::kuhn(self.d, self.n)
    }

    /// `u·⟦grid⟧` as a real top-dimensional chain.
    pub fn top_chain(&self, complex: &GridComplex) -> Result<PolyChain> {
        self.check_complex(complex)?;
        weighted_cells(complex, GroupTag::Real, |cube| self.values[cube].clone())
    }

    fn check_complex(&self, complex: &GridComplex) -> Result<()> {
        if complex.dim() != self.d || complex.resolution() != self.n {
            return Err(dim_mismatch(
                "coarea",
                format!(
                    "function on ({}, {}) used with {}",
                    self.d,
                    self.n,
                    complex.spec()
                ),
            ));
        }
        Ok(())
    }

    /// Distinct values together with 0, sorted.
    fn thresholds(&self) -> Vec<Rational> {
        let mut t: Vec<Rational> = self.values.clone();
        t.push(Rational::zero());
        t.sort();
        t.dedup();
        t
    }
}

fn weighted_cells(
    complex: &GridComplex,
    group: GroupTag,
    value: impl Fn(usize) -> Rational,
) -> Result<PolyChain> {
    let d = complex.dim();
    let cells = (0..complex.count(d)).filter_map(|id| {
        let v = value(complex.cube_of(id));
        (!v.is_zero()).then(|| (id, v * Rational::from_integer(complex.orientation(id).into())))
    });
    PolyChain::from_cells(complex, group, d, cells)
}

/// `∂(u·⟦grid⟧)`: interior faces carry the jump, outer faces the value.
pub fn function_boundary(u: &GridFunction) -> Result<PolyChain> {
    function_boundary_on(u, &u.complex()?)
}

pub fn function_boundary_on(u: &GridFunction, complex: &GridComplex) -> Result<PolyChain> {
    u.top_chain(complex)?.boundary()
}

/// `R_t` on the threshold interval `(t_low, t_high]`.
#[derive(Clone, Debug)]
pub struct LevelSlice {
    pub t_low: Rational,
    pub t_high: Rational,
    /// Integer chain with coefficients in `{−1, 0, 1}`.
    pub r: PolyChain,
}

impl LevelSlice {
    pub fn width(&self) -> Rational {
        &self.t_high - &self.t_low
    }
}

pub fn level_slices(u: &GridFunction) -> Result<Vec<LevelSlice>> {
    level_slices_on(u, &u.complex()?)
}

pub fn level_slices_on(u: &GridFunction, complex: &GridComplex) -> Result<Vec<LevelSlice>> {
    u.check_complex(complex)?;
    let t = u.thresholds();
    let one = Rational::from_integer(1.into());
    let mut out = Vec::with_capacity(t.len().saturating_sub(1));
    for w in t.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let r = if !hi.is_positive() {
            // t ∈ (lo, hi] with hi ≤ 0: −∂⟦{u ≤ t}⟧ = −∂⟦{u ≤ lo}⟧
            weighted_cells(complex, GroupTag::Integer, |c| {
                if u.values[c] <= *lo {
                    -one.clone()
                } else {
                    Rational::zero()
                }
            })?
        } else {
            // t ∈ (lo, hi] with lo ≥ 0: ∂⟦{u > t}⟧ = ∂⟦{u ≥ hi}⟧
            weighted_cells(complex, GroupTag::Integer, |c| {
                if u.values[c] >= *hi {
                    one.clone()
                } else {
                    Rational::zero()
                }
            })?
        };
        out.push(LevelSlice {
            t_low: lo.clone(),
            t_high: hi.clone(),
            r: r.boundary()?,
        });
    }
    Ok(out)
}

/// Both sides of the mass identity and the chain identity check.
#[derive(Clone, Debug)]
pub struct CoareaReport {
    pub mass_boundary: SurdSum,
    pub slice_integral: SurdSum,
    pub gap: SurdSum,
    pub slices: usize,
    /// `Σ width·R_t = ∂(u·⟦grid⟧)` as chains.
    pub chain_identity: bool,
    /// Every slice has coefficients in `{−1, 0, 1}`.
    pub multiplicity_one: bool,
}

impl CoareaReport {
    pub fn holds(&self) -> bool {
        self.gap.is_zero() && self.chain_identity && self.multiplicity_one
    }

    pub fn lines(&self) -> Vec<(String, String)> {
        vec![
            ("mass_boundary".into(), self.mass_boundary.to_string()),
            ("slice_integral".into(), self.slice_integral.to_string()),
            ("gap".into(), self.gap.to_string()),
            ("slices".into(), self.slices.to_string()),
            ("chain_identity".into(), self.chain_identity.to_string()),
            ("multiplicity_one".into(), self.multiplicity_one.to_string()),
        ]
    }
}

pub fn verify_coarea(u: &GridFunction) -> Result<CoareaReport> {
    verify_coarea_on(u, &u.complex()?)
}

pub fn verify_coarea_on(u: &GridFunction, complex: &GridComplex) -> Result<CoareaReport> {
    let t = function_boundary_on(u, complex)?;
    let slices = level_slices_on(u, complex)?;
    let mut sum = PolyChain::zero(GroupTag::Real, u.d, u.d - 1);
    let mut slice_integral = SurdSum::zero();
    let mut multiplicity_one = true;
    for s in &slices {
        multiplicity_one &=
            s.r.terms()
                .all(|(_, g)| g.abs() <= Rational::from_integer(1.into()));
        slice_integral += s.r.mass_exact().scale(&s.width());
        sum = sum.add(&s.r.regroup(GroupTag::Real)?.scale(&s.width())?)?;
    }
    let chain_identity = sum.into_soup().sub(&t.clone().into_soup())?.is_zero();
    let mass_boundary = t.mass_exact();
    Ok(CoareaReport {
        gap: mass_boundary.clone() - slice_integral.clone(),
        mass_boundary,
        slice_integral,
        slices: slices.len(),
        chain_identity,
        multiplicity_one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn constant_function_has_only_outer_faces() {
        let u = GridFunction::constant(2, 3, rat(2, 1)).unwrap();
        let t = function_boundary(&u).unwrap();
        assert_eq!(t.mass_exact(), SurdSum::rational(rat(8, 1)));
        let slices = level_slices(&u).unwrap();
        assert_eq!(slices.len(), 1);
        assert!(verify_coarea(&u).unwrap().holds());
    }

    #[test]
    fn one_cell_indicator() {
        let u = GridFunction::new(2, 2, ints(&[0, 1, 0, 0])).unwrap();
        let t = function_boundary(&u).unwrap();
        assert_eq!(t.mass_exact(), SurdSum::rational(rat(2, 1)));
        let report = verify_coarea(&u).unwrap();
        assert_eq!(report.slice_integral, SurdSum::rational(rat(2, 1)));
        assert!(report.holds());
    }

    #[test]
    fn checkerboard_jumps() {
        let u = GridFunction::new(2, 2, ints(&[0, 1, 1, 0])).unwrap();
        let t = function_boundary(&u).unwrap();
        // 4 interior half-faces and 4 outer half-faces, each of length 1/2
        assert_eq!(t.mass_exact(), SurdSum::rational(rat(4, 1)));
        assert!(verify_coarea(&u).unwrap().holds());
    }

    #[test]
    fn two_slices_with_weights_one_and_two() {
        let u = GridFunction::new(2, 2, ints(&[0, 1, 3, 0])).unwrap();
        let slices = level_slices(&u).unwrap();
        let widths: Vec<Rational> = slices.iter().map(LevelSlice::width).collect();
        assert_eq!(widths, ints(&[1, 2]));
        assert!(verify_coarea(&u).unwrap().holds());
    }

    #[test]
    fn negative_values_use_sublevel_sets() {
        let u = GridFunction::new(2, 2, vec![rat(-3, 2), rat(1, 2), rat(0, 1), rat(-1, 3)]).unwrap();
        let report = verify_coarea(&u).unwrap();
        assert!(report.holds(), "{report:?}");
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(GridFunction::new(2, 2, ints(&[1, 2, 3])).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn interior_jumps_are_shift_invariant(vals in prop::collection::vec(-4i64..5, 9), c in -3i64..4) {
            let u = GridFunction::new(2, 3, ints(&vals)).unwrap();
            let v = GridFunction::new(2, 3, vals.iter().map(|x| rat(x + c, 1)).collect()).unwrap();
            let tu = function_boundary(&u).unwrap();
            let tv = function_boundary(&v).unwrap();
            // drop faces lying in the boundary of the unit square
            let outer_free = |t: PolyChain| t.filter(|s| {
                (0..2).all(|i| !s.vertices().iter().all(|p| p[i].is_zero() || p[i] == rat(1, 1)))
            });
            prop_assert_eq!(outer_free(tu), outer_free(tv));
            prop_assert!(verify_coarea(&v).unwrap().holds());
        }
    }
}
