//! Approximation by shrunk and translated copies.
//!
//! The basic move takes a chain `X` and an affine map `g` that shrinks
//! toward an interior point and then translates by a short vector. The
//! straight-line homotopy from the identity to `g` gives a prism operator
//! `H` with `∂H + H∂ = g♯ − id`, hence the exact identity
//!
//! ```text
//! X = g♯X + R + ∂S,    R = −H(∂X),    S = −H(X)
//! ```
//!
//! with `M(R)` and `M(S)` proportional to the displacement. Iterating on the
//! remainder produces a representative of `T` whose mass measure avoids the
//! mass measure of `T` up to a final remainder of explicitly bounded mass.

use num::{One, Signed, Zero};

use crate::chains::{MassMeasure, PolyChain};
use crate::error::{dim_mismatch, precondition, Error, Result};
use crate::flatnorm::{flat_norm, FlatWitness};
use crate::geometry::{overlap_dim, sphere_lattice, AffineMap, Point, Simplex};
use crate::grid::GridComplex;
use crate::surd::{le, SurdSum};
use crate::Rational;

/// Mass budgets for the iterative constructions.
#[derive(Clone, Debug)]
pub struct ApproxBudget {
    pub epsilon: Rational,
    /// Number of stages `N`; the final remainder is held below `ε_N`.
    pub max_stages: usize,
    /// Number of times the displacement may be halved within one stage.
    pub max_halvings: usize,
    /// Relative slack allowed between LP witnesses and LP values.
    pub lp_slack: f64,
}

impl Default for ApproxBudget {
    fn default() -> Self {
        Self {
            epsilon: Rational::new(1.into(), 10.into()),
            max_stages: 8,
            max_halvings: 80,
            lp_slack: 1e-6,
        }
    }
}

impl ApproxBudget {
    pub fn with_epsilon(epsilon: Rational) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(precondition(
                "approx",
                format!("epsilon must be positive, got {epsilon}"),
            ));
        }
        Ok(Self {
            epsilon,
            ..Self::default()
        })
    }

    /// `ε·2^(−n−2)`, the fraction of `M(T)` granted to stage `n`.
    pub fn stage_fraction(&self, n: usize) -> Rational {
        &self.epsilon / Rational::from_integer(num::BigInt::one() << (n + 2))
    }

    /// `ε_n = ε·2^(−n−2)·M(T)`.
    pub fn stage_budget(&self, n: usize, mass_t: &SurdSum) -> SurdSum {
        mass_t.scale(&self.stage_fraction(n))
    }

    /// `ε_N`, the bound on the final remainder.
    pub fn final_budget(&self, mass_t: &SurdSum) -> SurdSum {
        self.stage_budget(self.max_stages, mass_t)
    }
}

/// The prism `H(X)` of the straight-line homotopy from the identity to `g`:
/// `[a_0..a_k] ↦ Σ (−1)^i [a_0..a_i, g(a_i)..g(a_k)]`.
pub fn prism(x: &PolyChain, g: &AffineMap) -> Result<PolyChain> {
    let k = x.dim();
    if k >= x.ambient_dim() {
        return Err(dim_mismatch(
            "approx",
            "the prism of a top-dimensional chain does not fit",
        ));
    }
    let group = x.group();
    let mut out = PolyChain::zero(group, x.ambient_dim(), k + 1);
    for (s, c) in x.terms() {
        let a = s.vertices();
        let b: Vec<Point> = a.iter().map(|v| g.apply(v)).collect();
        for i in 0..=k {
            let mut verts: Vec<Point> = a[..=i].to_vec();
            verts.extend(b[i..].iter().cloned());
            let sign = if i % 2 == 0 { 1 } else { -1 };
            out.push(Simplex::from_vertices_unchecked(verts), group.times(c, sign))?;
        }
    }
    Ok(out)
}

/// Result of [`shrink_toward`].
#[derive(Clone, Debug)]
pub struct Shrink {
    pub image: PolyChain,
    /// `2(1−λ)·diam(K)·(M(P) + M(∂P))` with `diam(K) = √d`.
    pub bound: SurdSum,
}

/// Push `P` through `x ↦ c + λ(x − c)`.
pub fn shrink_toward(p: &PolyChain, center: &[Rational], lambda: &Rational) -> Result<Shrink> {
    let d = p.ambient_dim();
    if center.len() != d {
        return Err(dim_mismatch(
            "approx",
            "center and chain have different ambient dimensions",
        ));
    }
    if !lambda.is_positive() || *lambda > Rational::one() {
        return Err(precondition(
            "approx",
            format!("lambda = {lambda} is outside (0, 1]"),
        ));
    }
    if center.iter().any(|c| !c.is_positive() || *c >= Rational::one()) {
        return Err(precondition(
            "approx",
            "the center must lie in the open unit cube",
        ));
    }
    let image = p.pushforward(&AffineMap::homothety(center, lambda))?;
    let masses = p.mass_exact() + p.boundary_or_zero().mass_exact();
    let factor = (Rational::one() - lambda) * Rational::from_integer(2.into());
    let diam = SurdSum::sqrt_of(&Rational::from_integer((d as i64).into()));
    Ok(Shrink {
        image,
        bound: diam.mul(&masses).scale(&factor),
    })
}

fn nondegenerate(s: &Simplex) -> bool {
    !s.is_degenerate()
}

/// Whether every nondegenerate simplex of `p` meets every reference simplex
/// in a set of dimension below `k`.
pub fn is_singular_to(p: &PolyChain, reference: &[Simplex]) -> bool {
    let k = p.dim() as i64;
    p.terms()
        .map(|(s, _)| s)
        .filter(|s| nondegenerate(s))
        .all(|s| reference.iter().all(|r| overlap_dim(s, r) < k))
}

/// First direction of the sphere lattice not tangent to any simplex.
pub fn transversal_direction(simplices: &[&Simplex], d: usize) -> Result<Point> {
    for height in 1..=6 {
        for v in sphere_lattice(d, height) {
            if simplices.iter().all(|s| !s.is_tangent(&v)) {
                return Ok(v);
            }
        }
    }
    Err(Error::BudgetExhausted(
        "no transversal direction in the sphere lattice".into(),
    ))
}

/// Result of [`singular_translate`].
#[derive(Clone, Debug)]
pub struct Translation {
    pub chain: PolyChain,
    pub direction: Point,
    pub t: Rational,
}

/// Translate `P` by `t·v` with `0 < t ≤ t_max` so that it becomes singular
/// to the reference measure.
pub fn singular_translate(p: &PolyChain, reference: &MassMeasure, t_max: &Rational) -> Result<Translation> {
    let d = p.ambient_dim();
    if !t_max.is_positive() {
        return Err(precondition("approx", "t_max must be positive"));
    }
    let hi = Rational::one() - t_max;
    for v in p.vertex_set() {
        if v.iter().any(|c| c < t_max || *c > hi) {
            return Err(precondition(
                "approx",
                format!("support is not {t_max}-interior to the unit cube"),
            ));
        }
    }
    let refs: Vec<Simplex> = reference.simplices().cloned().collect();
    if refs.is_empty() || p.is_zero() {
        return Ok(Translation {
            chain: p.clone(),
            direction: vec![Rational::zero(); d],
            t: Rational::zero(),
        });
    }
    let simplices: Vec<&Simplex> = p.terms().map(|(s, _)| s).collect();
    let v = transversal_direction(&simplices, d)?;
    let shrink = Rational::new(2.into(), 3.into());
    let mut t = t_max.clone();
    for _ in 0..40 {
        let shift: Point = v.iter().map(|c| c * &t).collect();
        let moved = p.pushforward(&AffineMap::translation(&shift))?;
        if is_singular_to(&moved, &refs) {
            return Ok(Translation {
                chain: moved,
                direction: v,
                t,
            });
        }
        t *= &shrink;
    }
    Err(Error::BudgetExhausted("no singular translation found".into()))
}

/// One stage of the iteration: `X_n = P_n + R_n + ∂S_n`.
#[derive(Clone, Debug)]
pub struct Stage {
    pub index: usize,
    pub lambda: Rational,
    pub center: Point,
    pub shift: Point,
    pub p: PolyChain,
    pub r: PolyChain,
    pub s: PolyChain,
    pub mass_p: f64,
    pub mass_r: SurdSum,
    pub mass_s: f64,
    /// The mass target the remainder had to meet.
    pub target: SurdSum,
}

#[derive(Clone, Debug)]
pub struct StageReport {
    pub stages: Vec<Stage>,
    pub mass_t: SurdSum,
    pub final_budget: SurdSum,
}

impl StageReport {
    fn empty(t: &PolyChain, budget: &ApproxBudget) -> Self {
        let mass_t = t.mass_exact();
        Self {
            final_budget: budget.final_budget(&mass_t),
            mass_t,
            stages: Vec::new(),
        }
    }

    /// Check `T = Σ_{j≤n} P_j + R_n + ∂(Σ_{j≤n} S_j)` at every stage.
    pub fn verify_identity(&self, t: &PolyChain) -> Result<bool> {
        let t = t.clone().into_soup();
        let mut p_sum = PolyChain::zero(t.group(), t.ambient_dim(), t.dim());
        let mut s_sum = PolyChain::zero(t.group(), t.ambient_dim(), t.dim() + 1);
        for st in &self.stages {
            p_sum = p_sum.add(&st.p)?;
            s_sum = s_sum.add(&st.s)?;
            let rebuilt = p_sum.add(&st.r)?.add(&s_sum.boundary()?)?;
            if rebuilt != t {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The final remainder `R_N` (zero when there were no stages).
    pub fn last_remainder(&self) -> Option<&PolyChain> {
        self.stages.last().map(|s| &s.r)
    }

    /// Largest flat-norm bound `M(R_n) + M(Σ S_j)` over the stages.
    pub fn residual_flat_bounds(&self) -> Vec<f64> {
        let mut s_mass = 0.0;
        self.stages
            .iter()
            .map(|st| {
                s_mass += st.mass_s;
                st.mass_r.to_f64() + s_mass
            })
            .collect()
    }
}

fn stage_map(center: &[Rational], lambda: &Rational, shift: &[Rational]) -> AffineMap {
    AffineMap::translation(shift).compose(&AffineMap::homothety(center, lambda))
}

fn perturbed_center(d: usize, attempt: usize) -> Point {
    const OFFSETS: [i64; 3] = [97, 89, 83];
    (0..d)
        .map(|i| {
            Rational::new(1.into(), 2.into())
                + Rational::new(1.into(), (OFFSETS[i % 3] + 2 * attempt as i64).into())
        })
        .collect()
}

/// A representative `R` with `∂R = ∂T`, `M(R) ≤ (1+ε)M(T)` and mass
/// measure singular to that of `T` apart from the final remainder `R_N`.
pub fn disjoint_representative(t: &PolyChain, budget: &ApproxBudget) -> Result<(PolyChain, StageReport)> {
    let d = t.ambient_dim();
    let k = t.dim();
    if k >= d {
        return Err(precondition(
            "approx",
            format!("need k < d, got k = {k}, d = {d}"),
        ));
    }
    let mut report = StageReport::empty(t, budget);
    let reference: Vec<Simplex> = t.terms().map(|(s, _)| s.clone()).filter(nondegenerate).collect();
    let mut x = t.clone().into_soup();
    let mut r_total = PolyChain::zero(t.group(), d, k);
    // targets halve from stage to stage, so each stage starts from the
    // displacement that satisfied the previous one
    let mut start = Rational::new(1.into(), 8.into());
    for n in 0..budget.max_stages {
        if x.is_zero() {
            break;
        }
        let target = if n + 1 == budget.max_stages {
            report.final_budget.clone()
        } else {
            budget.stage_budget(n, &report.mass_t)
        };
        let stage = run_stage(&x, &reference, n, &target, &start, budget)?;
        start = Rational::one() - &stage.lambda;
        r_total = r_total.add(&stage.p)?;
        x = stage.r.clone();
        let done = le(&stage.mass_r, &report.final_budget);
        report.stages.push(stage);
        if done {
            break;
        }
    }
    if !le(&x.mass_exact(), &report.final_budget) {
        return Err(Error::BudgetExhausted(format!(
            "remainder mass {:.3e} above the final budget {:.3e} after {} stages",
            x.mass(),
            report.final_budget.to_f64(),
            budget.max_stages
        )));
    }
    Ok((r_total.add(&x)?, report))
}

fn run_stage(
    x: &PolyChain,
    reference: &[Simplex],
    n: usize,
    target: &SurdSum,
    start: &Rational,
    budget: &ApproxBudget,
) -> Result<Stage> {
    let d = x.ambient_dim();
    let k = x.dim();
    let simplices: Vec<&Simplex> = x.terms().map(|(s, _)| s).filter(|s| nondegenerate(s)).collect();
    let v = transversal_direction(&simplices, d)?;
    let boundary = x.boundary_or_zero();
    let mut s_param = start.clone();
    let target_f = target.to_f64();
    let half = Rational::new(1.into(), 2.into());
    for _ in 0..budget.max_halvings {
        let lambda = Rational::one() - &s_param;
        let mut found = None;
        'search: for attempt in 0..4 {
            let center = perturbed_center(d, attempt);
            let mut t = &s_param / Rational::from_integer(4.into());
            for _ in 0..6 {
                let shift: Point = v.iter().map(|c| c * &t).collect();
                let g = stage_map(&center, &lambda, &shift);
                let p = x.pushforward(&g)?;
                if is_singular_to(&p, reference) {
                    found = Some((center, shift, g, p));
                    break 'search;
                }
                t *= Rational::new(2.into(), 3.into());
            }
        }
        let Some((center, shift, g, p)) = found else {
            s_param *= &half;
            continue;
        };
        let r = if k == 0 {
            PolyChain::zero(x.group(), d, 0)
        } else {
            prism(&boundary, &g)?.neg()
        };
        if r.mass() > target_f * (1.0 + 1e-9) {
            s_param *= &half;
            continue;
        }
        let mass_r = r.mass_exact();
        if !le(&mass_r, target) {
            s_param *= &half;
            continue;
        }
        let s = prism(x, &g)?.neg();
        return Ok(Stage {
            index: n,
            lambda,
            center,
            shift,
            mass_p: p.mass(),
            mass_s: s.mass(),
            p,
            r,
            s,
            mass_r,
            target: target.clone(),
        });
    }
    Err(Error::BudgetExhausted(format!(
        "stage {n}: remainder stayed above {:.3e} after {} halvings",
        target.to_f64(),
        budget.max_halvings
    )))
}

/// Output of [`cycle_extension`].
#[derive(Clone, Debug)]
pub struct CycleExtension {
    /// `T' = T − R`, a cycle.
    pub t_prime: PolyChain,
    /// The simplices carrying `T`; their union is `E`.
    pub carrier: Vec<Simplex>,
    /// Upper bound for `M(T − T'⌊E)`: mass of the terms of `R` that overlap
    /// `E` in a `k`-dimensional set.
    pub defect: SurdSum,
    pub final_budget: SurdSum,
    pub representative: PolyChain,
    pub report: StageReport,
}

pub fn cycle_extension(t: &PolyChain, budget: &ApproxBudget) -> Result<CycleExtension> {
    let (r, report) = disjoint_representative(t, budget)?;
    let t_prime = t.clone().into_soup().sub(&r)?;
    let carrier: Vec<Simplex> = t.terms().map(|(s, _)| s.clone()).collect();
    let k = t.dim() as i64;
    let defect: SurdSum = r
        .mass_measure()
        .entries
        .into_iter()
        .filter(|(s, _)| carrier.iter().any(|e| overlap_dim(s, e) == k))
        .map(|(_, w)| w)
        .sum();
    Ok(CycleExtension {
        t_prime,
        carrier,
        defect,
        final_budget: report.final_budget.clone(),
        representative: r,
        report,
    })
}

/// Output of [`telescope`].
#[derive(Clone, Debug)]
pub struct Telescope {
    pub r: PolyChain,
    pub s: PolyChain,
    /// `Z_n = P_1 + Σ_{h≤n} R_h`.
    pub partials: Vec<PolyChain>,
    pub partial_masses: Vec<f64>,
    pub witnesses: Vec<FlatWitness>,
}

/// Decompose the last chain of a flat-Cauchy list as `R + ∂S` with
/// `R = P_1 + Σ R_h`, `S = Σ S_h`, where `P_{h+1} − P_h = R_h + ∂S_h`
/// are LP witnesses. Requires `𝔽(P_{h+1} − P_h) ≤ 2^(−h−1)` for `h ≥ 1`
/// up to the LP slack.
pub fn telescope(list: &[PolyChain], complex: &GridComplex, budget: &ApproxBudget) -> Result<Telescope> {
    let Some(first) = list.first() else {
        return Err(precondition("approx", "telescope needs at least one chain"));
    };
    let first = first.refine_onto(complex)?;
    let mut r = first.clone();
    let mut s = PolyChain::from_cells(complex, first.group(), first.dim() + 1, std::iter::empty())?;
    let mut partials = vec![r.clone()];
    let mut witnesses = Vec::new();
    for (h, pair) in list.windows(2).enumerate() {
        let diff = pair[1]
            .refine_onto(complex)?
            .sub(&pair[0].refine_onto(complex)?)?;
        let w = flat_norm(&diff, complex)?;
        let allowed = 0.5f64.powi(h as i32 + 1) * (1.0 + budget.lp_slack);
        if w.value > allowed {
            return Err(precondition(
                "approx",
                format!(
                    "flat distance {:.6e} between chains {} and {} exceeds 2^-{}",
                    w.value,
                    h + 1,
                    h + 2,
                    h + 1
                ),
            ));
        }
        r = r.add(&w.r)?;
        s = s.add(&w.q)?;
        partials.push(r.clone());
        witnesses.push(w);
    }
    let partial_masses = partials.iter().map(PolyChain::mass).collect();
    Ok(Telescope {
        r,
        s,
        partials,
        partial_masses,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::kuhn_complex;
    use crate::groups::GroupTag;
    use crate::rat;

    fn pt(c: &[(i64, i64)]) -> Point {
        c.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    fn segment(a: Point, b: Point) -> PolyChain {
        PolyChain::from_terms(
            GroupTag::Real,
            a.len(),
            1,
            [(Simplex::new(vec![a, b]).unwrap(), rat(1, 1))],
        )
        .unwrap()
    }

    #[test]
    fn prism_identity() {
        let g = stage_map(&pt(&[(1, 2), (1, 2)]), &rat(7, 8), &pt(&[(1, 50), (1, 70)]));
        let x = segment(pt(&[(0, 1), (0, 1)]), pt(&[(1, 1), (1, 3)]))
            .add(&segment(pt(&[(1, 1), (1, 3)]), pt(&[(1, 4), (1, 1)])))
            .unwrap();
        let h = prism(&x, &g).unwrap();
        let hb = prism(&x.boundary().unwrap(), &g).unwrap();
        let lhs = h.boundary().unwrap().add(&hb).unwrap();
        assert_eq!(lhs, x.pushforward(&g).unwrap().sub(&x).unwrap());
    }

    #[test]
    fn shrink_examples() {
        let seg = segment(pt(&[(0, 1), (0, 1)]), pt(&[(1, 1), (0, 1)]));
        let center = pt(&[(1, 2), (1, 2)]);
        let out = shrink_toward(&seg, &center, &rat(1, 2)).unwrap();
        assert_eq!(out.image.mass_exact().as_rational(), Some(rat(1, 2)));
        // 2 · 1/2 · √2 · (1 + 2) = 3√2
        assert_eq!(out.bound, SurdSum::scaled_sqrt(rat(3, 1), &rat(2, 1)));
        let same = shrink_toward(&seg, &center, &rat(1, 1)).unwrap();
        assert_eq!(same.image, seg);
        assert!(same.bound.is_zero());
        assert!(shrink_toward(&seg, &center, &rat(3, 2)).is_err());
        assert!(shrink_toward(&seg, &pt(&[(0, 1), (1, 2)]), &rat(1, 2)).is_err());
    }

    #[test]
    fn translation_avoids_reference() {
        let seg = segment(pt(&[(1, 4), (1, 2)]), pt(&[(3, 4), (1, 2)]));
        let tr = singular_translate(&seg, &seg.mass_measure(), &rat(1, 8)).unwrap();
        assert!(!tr.direction[1].is_zero());
        assert!(tr.t.is_positive());
        assert_eq!(tr.chain.mass_exact(), seg.mass_exact());
        let cross = seg
            .add(&segment(pt(&[(1, 2), (1, 4)]), pt(&[(1, 2), (3, 4)])))
            .unwrap();
        let tr = singular_translate(&cross, &cross.mass_measure(), &rat(1, 8)).unwrap();
        assert!(tr.direction.iter().all(|c| !c.is_zero()));
        let empty = PolyChain::zero(GroupTag::Real, 2, 1).mass_measure();
        assert!(singular_translate(&seg, &empty, &rat(1, 8)).unwrap().t.is_zero());
    }

    #[test]
    fn representative_of_a_segment() {
        let seg = segment(pt(&[(1, 4), (1, 4)]), pt(&[(3, 4), (1, 4)]));
        let budget = ApproxBudget::with_epsilon(rat(1, 1)).unwrap();
        let (r, report) = disjoint_representative(&seg, &budget).unwrap();
        assert_eq!(r.boundary().unwrap(), seg.boundary().unwrap());
        assert!(report.verify_identity(&seg).unwrap());
        let bound = seg.mass_exact().scale(&rat(2, 1)) + report.final_budget.clone();
        assert!(le(&r.mass_exact(), &bound));
    }

    #[test]
    fn cycle_extension_of_square_loop_and_zero() {
        let g = kuhn_complex(2, 2).unwrap();
        let e = (0..g.count(1))
            .find(|&i| g.simplex(1, i).volume() == 0.5)
            .unwrap();
        let seg = PolyChain::from_cells(&g, GroupTag::Real, 1, [(e, rat(1, 1))]).unwrap();
        let ext = cycle_extension(&seg, &ApproxBudget::default()).unwrap();
        assert!(ext.t_prime.boundary().unwrap().is_zero());
        assert!(le(&ext.defect, &ext.final_budget));
        assert_eq!(ext.carrier.len(), 1);
        let z = PolyChain::zero(GroupTag::Real, 2, 1);
        let ext = cycle_extension(&z, &ApproxBudget::default()).unwrap();
        assert!(ext.t_prime.is_zero() && ext.carrier.is_empty() && ext.defect.is_zero());
    }

    #[test]
    fn points_are_moved_off_themselves() {
        let p = PolyChain::from_terms(
            GroupTag::Real,
            2,
            0,
            [(Simplex::new(vec![pt(&[(1, 3), (1, 5)])]).unwrap(), rat(2, 1))],
        )
        .unwrap();
        let ext = cycle_extension(&p, &ApproxBudget::default()).unwrap();
        assert_eq!(ext.report.stages.len(), 1);
        assert!(ext.defect.is_zero());
        assert_eq!(ext.t_prime.len(), 2);
    }

    #[test]
    fn telescope_constant_and_shrinking_lists() {
        let g = kuhn_complex(1, 32).unwrap();
        let point = |x: Rational| {
            PolyChain::from_terms(
                GroupTag::Real,
                1,
                0,
                [(Simplex::new(vec![vec![x]]).unwrap(), rat(1, 1))],
            )
            .unwrap()
        };
        let p0 = point(rat(0, 1));
        let tel = telescope(&[p0.clone(), p0.clone()], &g, &ApproxBudget::default()).unwrap();
        assert_eq!(tel.r.into_soup(), p0);
        assert!(tel.s.is_zero());
        // P_n = shrink(P, 1 − 2^−n) toward 1/2 puts the point at 2^(−n−1)
        let list: Vec<PolyChain> = (1..=4).map(|n| point(rat(1, 1 << (n + 1)))).collect();
        let tel = telescope(&list, &g, &ApproxBudget::default()).unwrap();
        let last = list.last().unwrap().refine_onto(&g).unwrap();
        assert_eq!(tel.r.add(&tel.s.boundary().unwrap()).unwrap(), last);
        let s_mass: f64 = tel.witnesses.iter().map(|w| w.q.mass()).sum();
        assert!(s_mass <= 1.0);
    }
}
