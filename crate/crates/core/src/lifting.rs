//! Lifting circle-valued chains to real chains.
//!
//! The projection `π` reduces real coefficients mod 1. A lift of a circle
//! chain `T` is a real chain `T̃` with `π(T̃) = T`; the interesting question
//! is how much mass the lift needs. This module implements
//!
//! * coefficient-wise lifts through the minimal-norm section,
//! * the threshold lift of top-dimensional chains with its scan over `θ`,
//! * two boundary-preserving corrections that kill `π(Q)` for chains whose
//!   projected boundary vanishes: loop cancellation for 1-chains and cone
//!   filling for codimension-one chains,
//! * the pipeline assembling a lift from a decomposition `T = Z + ∂S`.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};

use crate::chains::{cone, PolyChain};
use crate::error::{precondition, Error, Result};
use crate::geometry::{Point, Simplex};
use crate::grid::GridComplex;
use crate::groups::{frac, section_value, GroupTag};
use crate::surd::{le, SurdSum};
use crate::Rational;

fn require_group(c: &PolyChain, g: GroupTag) -> Result<()> {
    if c.group() != g {
        return Err(Error::GroupMismatch(g.to_string(), c.group().to_string()));
    }
    Ok(())
}

fn quarter() -> Rational {
    Rational::new(1.into(), 4.into())
}

fn three_quarters() -> Rational {
    Rational::new(3.into(), 4.into())
}

/// Measured masses of a lift or correction, with the bounds they must meet.
#[derive(Clone, Debug)]
pub struct LiftReport {
    pub operation: &'static str,
    pub mass_in: SurdSum,
    pub mass_out: SurdSum,
    pub boundary_mass_in: SurdSum,
    pub boundary_mass_out: SurdSum,
    /// `M(out) ≤ mass_factor · M(in)` is asserted.
    pub mass_factor: Rational,
    /// `M(∂out) ≤ boundary_factor · M(∂in)` is asserted when present.
    pub boundary_factor: Option<Rational>,
    pub theta: Option<Rational>,
    pub passes: usize,
    pub d_used: Option<u32>,
}

impl LiftReport {
    fn new(operation: &'static str, input: &PolyChain, output: &PolyChain, mass_factor: Rational) -> Self {
        Self {
            operation,
            mass_in: input.mass_exact(),
            mass_out: output.mass_exact(),
            boundary_mass_in: input.boundary_or_zero().mass_exact(),
            boundary_mass_out: output.boundary_or_zero().mass_exact(),
            mass_factor,
            boundary_factor: None,
            theta: None,
            passes: 0,
            d_used: None,
        }
    }

    fn ratio(num: &SurdSum, den: &SurdSum) -> f64 {
        if den.is_zero() {
            if num.is_zero() {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            num.to_f64() / den.to_f64()
        }
    }

    pub fn mass_ratio(&self) -> f64 {
        Self::ratio(&self.mass_out, &self.mass_in)
    }

    pub fn boundary_ratio(&self) -> f64 {
        Self::ratio(&self.boundary_mass_out, &self.boundary_mass_in)
    }

    /// Exact check of the asserted bounds.
    pub fn within_bounds(&self) -> bool {
        let mass_ok = le(&self.mass_out, &self.mass_in.scale(&self.mass_factor));
        let boundary_ok = match &self.boundary_factor {
            Some(f) => le(&self.boundary_mass_out, &self.boundary_mass_in.scale(f)),
            None => true,
        };
        mass_ok && boundary_ok
    }

    /// `key = value` lines for reports.
    pub fn lines(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("operation".into(), self.operation.to_string()),
            ("mass_in".into(), format!("{:.12}", self.mass_in.to_f64())),
            ("mass_out".into(), format!("{:.12}", self.mass_out.to_f64())),
            ("mass_ratio".into(), format!("{:.12}", self.mass_ratio())),
            ("mass_bound".into(), self.mass_factor.to_string()),
            (
                "boundary_mass_in".into(),
                format!("{:.12}", self.boundary_mass_in.to_f64()),
            ),
            (
                "boundary_mass_out".into(),
                format!("{:.12}", self.boundary_mass_out.to_f64()),
            ),
            ("boundary_ratio".into(), format!("{:.12}", self.boundary_ratio())),
        ];
        if let Some(f) = &self.boundary_factor {
            out.push(("boundary_bound".into(), f.to_string()));
        }
        if let Some(t) = &self.theta {
            out.push(("theta".into(), t.to_string()));
        }
        if let Some(d) = self.d_used {
            out.push(("d_used".into(), d.to_string()));
        }
        out.push(("passes".into(), self.passes.to_string()));
        out
    }
}

/// `π(P)`: reduce every coefficient mod 1.
pub fn project_chain(p: &PolyChain) -> Result<PolyChain> {
    require_group(p, GroupTag::Real)?;
    p.map_coefficients(GroupTag::Circle, Clone::clone)
}

/// Replace every circle coefficient by its minimal-norm real preimage.
pub fn lift_coefficientwise(p: &PolyChain) -> Result<PolyChain> {
    require_group(p, GroupTag::Circle)?;
    p.map_coefficients(GroupTag::Real, section_value)
}

fn require_top(p: &PolyChain) -> Result<()> {
    if p.dim() != p.ambient_dim() {
        return Err(Error::UnsupportedDimension {
            k: p.dim(),
            d: p.ambient_dim(),
        });
    }
    Ok(())
}

/// Coefficient on the positively oriented copy of each simplex.
fn positive_coefficients(p: &PolyChain) -> Vec<(Simplex, i8, Rational)> {
    p.terms()
        .map(|(s, g)| {
            let o = s.orientation_sign();
            let gp = if o < 0 { GroupTag::Circle.neg(g) } else { g.clone() };
            (s.clone(), o, gp)
        })
        .collect()
}

fn threshold_value(g: &Rational, theta: &Rational) -> Rational {
    if g <= theta {
        g.clone()
    } else {
        g - Rational::one()
    }
}

fn threshold_lift_unchecked(p: &PolyChain, theta: &Rational) -> Result<PolyChain> {
    let mut out = PolyChain::zero(GroupTag::Real, p.ambient_dim(), p.dim());
    for (s, o, gp) in positive_coefficients(p) {
        let v = if o == 0 {
            section_value(&gp)
        } else {
            threshold_value(&gp, theta) * Rational::from_integer(o.into())
        };
        out.push(s, v)?;
    }
    Ok(out.with_grid_unchecked(p.grid()))
}

/// Threshold lift of a top-dimensional circle chain: on positively
/// oriented simplices `g ↦ g` if `g ≤ θ`, else `g − 1`.
pub fn lift_top_threshold(p: &PolyChain, theta: &Rational) -> Result<PolyChain> {
    require_group(p, GroupTag::Circle)?;
    require_top(p)?;
    if *theta <= quarter() || *theta >= three_quarters() {
        return Err(precondition(
            "lifting",
            format!("theta = {theta} is outside (1/4, 3/4)"),
        ));
    }
    if positive_coefficients(p).iter().any(|(_, _, g)| g == theta) {
        return Err(precondition(
            "lifting",
            format!("theta = {theta} coincides with a coefficient"),
        ));
    }
    threshold_lift_unchecked(p, theta)
}

/// `θ ↦ M(∂P̃_θ)` on `(1/4, 3/4)`: constant between consecutive breakpoints.
#[derive(Clone, Debug)]
pub struct ThresholdProfile {
    /// Distinct positively oriented coefficients inside `(1/4, 3/4)`.
    pub breakpoints: Vec<Rational>,
    /// `(low, high, M(∂P̃_θ))` for each open interval.
    pub intervals: Vec<(Rational, Rational, SurdSum)>,
    /// `∫_{1/4}^{3/4} M(∂P̃_θ) dθ`.
    pub integral: SurdSum,
}

impl ThresholdProfile {
    pub fn build(p: &PolyChain) -> Result<Self> {
        require_group(p, GroupTag::Circle)?;
        require_top(p)?;
        let breakpoints: Vec<Rational> = positive_coefficients(p)
            .into_iter()
            .map(|(_, _, g)| g)
            .filter(|g| *g > quarter() && *g < three_quarters())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut cuts = vec![quarter()];
        cuts.extend(breakpoints.iter().cloned());
        cuts.push(three_quarters());
        let mut intervals = Vec::with_capacity(cuts.len() - 1);
        let mut integral = SurdSum::zero();
        for w in cuts.windows(2) {
            let mid = (&w[0] + &w[1]) / Rational::from_integer(2.into());
            let value = threshold_lift_unchecked(p, &mid)?.boundary()?.mass_exact();
            integral += value.scale(&(&w[1] - &w[0]));
            intervals.push((w[0].clone(), w[1].clone(), value));
        }
        Ok(Self {
            breakpoints,
            intervals,
            integral,
        })
    }

    /// Midpoint of the first interval attaining the minimum.
    pub fn best_theta(&self) -> Rational {
        let mut best = 0;
        for (i, iv) in self.intervals.iter().enumerate() {
            if iv.2 < self.intervals[best].2 {
                best = i;
            }
        }
        let (lo, hi, _) = &self.intervals[best];
        (lo + hi) / Rational::from_integer(2.into())
    }

    pub fn min_value(&self) -> SurdSum {
        self.intervals
            .iter()
            .map(|iv| iv.2.clone())
            .min()
            .unwrap_or_else(SurdSum::zero)
    }
}

/// Threshold lift at the best `θ` of the profile scan.
pub fn lift_top_optimal(p: &PolyChain) -> Result<(Rational, PolyChain, ThresholdProfile, LiftReport)> {
    let profile = ThresholdProfile::build(p)?;
    let theta = profile.best_theta();
    let lifted = threshold_lift_unchecked(p, &theta)?;
    let mut report = LiftReport::new("lift-top", p, &lifted, Rational::from_integer(3.into()));
    report.boundary_factor = Some(Rational::from_integer(5.into()));
    report.theta = Some(theta.clone());
    Ok((theta, lifted, profile, report))
}

fn check_integer_boundary(q: &PolyChain) -> Result<()> {
    require_group(q, GroupTag::Real)?;
    if q.dim() == 0 {
        return Ok(());
    }
    let b = q.boundary()?;
    if let Some((s, g)) = b.terms().find(|(_, g)| !g.is_integer()) {
        return Err(precondition(
            "lifting",
            format!("pi(dQ) != 0: boundary multiplicity {g} at {s} is not an integer"),
        ));
    }
    Ok(())
}

/// A cycle in the support graph of the non-integer terms, as a list of
/// `(simplex, traversal sign)`.
fn find_loop(frac_terms: &BTreeMap<Simplex, Rational>) -> Option<Vec<(Simplex, i64)>> {
    let mut adj: BTreeMap<&Point, Vec<(&Point, &Simplex, i64)>> = BTreeMap::new();
    for s in frac_terms.keys() {
        let (a, b) = (&s.vertices()[0], &s.vertices()[1]);
        adj.entry(a).or_default().push((b, s, 1));
        adj.entry(b).or_default().push((a, s, -1));
    }
    let start = *adj.keys().next()?;
    // iterative DFS keeping the current path
    let mut on_path: BTreeMap<&Point, usize> = BTreeMap::new();
    let mut visited: BTreeSet<&Point> = BTreeSet::new();
    let mut path: Vec<(&Point, Option<(&Simplex, i64)>)> = vec![(start, None)];
    let mut cursor: Vec<usize> = vec![0];
    on_path.insert(start, 0);
    visited.insert(start);
    while let Some(&(v, via)) = path.last() {
        let depth = path.len() - 1;
        let neighbours = &adj[v];
        if cursor[depth] >= neighbours.len() {
            on_path.remove(v);
            path.pop();
            cursor.pop();
            continue;
        }
        let (w, s, sign) = neighbours[cursor[depth]];
        cursor[depth] += 1;
        if via.is_some_and(|(e, _)| e == s) {
            continue;
        }
        if let Some(&pos) = on_path.get(w) {
            let mut cycle: Vec<(Simplex, i64)> = path[pos + 1..]
                .iter()
                .map(|(_, e)| {
                    let (e, sg) = e.expect("non-root path entries have an edge");
                    (e.clone(), sg)
                })
                .collect();
            cycle.push((s.clone(), sign));
            return Some(cycle);
        }
        if visited.insert(w) {
            on_path.insert(w, path.len());
            path.push((w, Some((s, sign))));
            cursor.push(0);
        }
    }
    None
}

/// Boundary-preserving correction of a real 1-chain with integral
/// boundary multiplicities to a chain with integer coefficients, without
/// increasing mass.
pub fn loop_cancel(q: &PolyChain) -> Result<(PolyChain, LiftReport)> {
    if q.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            k: q.dim(),
            d: q.ambient_dim(),
        });
    }
    check_integer_boundary(q)?;
    let mut cur = q.clone();
    let mut passes = 0;
    loop {
        let frac_terms: BTreeMap<Simplex, Rational> = cur
            .terms()
            .filter(|(_, g)| !g.is_integer())
            .map(|(s, g)| (s.clone(), g.clone()))
            .collect();
        if frac_terms.is_empty() {
            break;
        }
        if passes >= q.len() {
            return Err(precondition(
                "lifting",
                "loop cancellation did not terminate within #terms passes",
            ));
        }
        let cycle = find_loop(&frac_terms)
            .ok_or_else(|| precondition("lifting", "no loop among the fractional terms"))?;
        let along: Vec<Rational> = cycle
            .iter()
            .map(|(s, sign)| &frac_terms[s] * Rational::from_integer((*sign).into()))
            .collect();
        let theta_plus = along.iter().map(frac).min().expect("nonempty loop");
        let theta_minus = along.iter().map(|g| g.ceil() - g).min().expect("nonempty loop");
        let weight: SurdSum = cycle
            .iter()
            .zip(&along)
            .map(|((s, _), g)| {
                s.volume_surd().scale(&Rational::from_integer(
                    if g.is_positive() { 1 } else { -1 }.into(),
                ))
            })
            .sum();
        let shift = if weight.signum() >= 0 {
            theta_plus
        } else {
            -theta_minus
        };
        let mut z = PolyChain::zero(GroupTag::Real, q.ambient_dim(), 1);
        for (s, sign) in &cycle {
            z.push(s.clone(), &shift * Rational::from_integer((*sign).into()))?;
        }
        cur = cur.sub(&z)?;
        passes += 1;
    }
    // the support only shrinks, so grid membership is kept
    let cur = cur.with_grid_unchecked(q.grid());
    let mut report = LiftReport::new("cancel-loops", q, &cur, Rational::one());
    report.passes = passes;
    report.d_used = Some(1);
    Ok((cur, report))
}

/// How to kill `π(Q)` while keeping `∂Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BrRoute {
    /// Loop cancellation; 1-chains only, mass does not grow.
    Loops,
    /// Cone filling of `π(Q)` lifted by the threshold scan; `(d−1)`-chains.
    Cone,
}

impl BrRoute {
    /// Mass constant of the route.
    pub fn constant(self) -> u32 {
        match self {
            BrRoute::Loops => 1,
            BrRoute::Cone => 6,
        }
    }

    pub fn default_for(k: usize) -> Self {
        if k == 1 {
            BrRoute::Loops
        } else {
            BrRoute::Cone
        }
    }
}

impl std::str::FromStr for BrRoute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loops" => Ok(BrRoute::Loops),
            "cone" => Ok(BrRoute::Cone),
            _ => Err(Error::Parse(format!(
                "unknown route {s:?} (expected loops or cone)"
            ))),
        }
    }
}

impl std::fmt::Display for BrRoute {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BrRoute::Loops => "loops",
            BrRoute::Cone => "cone",
        })
    }
}

const APEX_ATTEMPTS: i64 = 32;
const SAMPLE_ATTEMPTS: i64 = 32;

fn perturbed_point(base: &[Rational], attempt: i64, scale: &Rational) -> Point {
    base.iter()
        .enumerate()
        .map(|(i, x)| {
            if attempt == 0 {
                x.clone()
            } else {
                let den = (2 * i as i64 + 3) * (attempt + 7);
                x + scale * Rational::new(((attempt % 3) + 1).into(), den.into())
            }
        })
        .collect()
}

/// Cone over the cycle `c` from an apex near the cube centre, moved until
/// no simplex degenerates so that `∂ cone = c`.
fn cone_filling(c: &PolyChain) -> Result<PolyChain> {
    let center = vec![Rational::new(1.into(), 2.into()); c.ambient_dim()];
    let scale = Rational::new(1.into(), 5.into());
    for attempt in 0..APEX_ATTEMPTS {
        let apex = perturbed_point(&center, attempt, &scale);
        let (s, dropped) = cone(&apex, c)?;
        if dropped == 0 {
            return Ok(s);
        }
    }
    Err(precondition("lifting", "no admissible cone apex found"))
}

fn in_box(x: &[Rational], (lo, hi): &(Point, Point)) -> bool {
    x.iter()
        .zip(lo.iter().zip(hi))
        .all(|(v, (l, h))| l <= v && v <= h)
}

/// Write a top-dimensional chain on the cells of `complex` by sampling its
/// density at an interior point of each cell. Exact when the chain is
/// constant on every open cell.
fn rasterize_top(s: &PolyChain, complex: &GridComplex) -> Result<PolyChain> {
    let d = complex.dim();
    let group = s.group();
    let pieces: Vec<(&Simplex, &Rational, i8, (Point, Point))> = s
        .terms()
        .map(|(t, g)| (t, g, t.orientation_sign(), t.bbox()))
        .collect();
    let scale = complex.spacing() / Rational::from_integer((((d + 1) * 4) as i64).into());
    let mut cells = Vec::new();
    for id in 0..complex.count(d) {
        let cell = complex.simplex(d, id);
        let centre = cell.barycenter();
        let mut sample = None;
        for attempt in 0..SAMPLE_ATTEMPTS {
            let x = perturbed_point(&centre, attempt, &scale);
            if !cell.contains_point_strictly(&x) {
                continue;
            }
            let on_edge = pieces.iter().any(|(t, _, _, bb)| {
                in_box(&x, bb) && t.contains_point(&x) && !t.contains_point_strictly(&x)
            });
            if !on_edge {
                sample = Some(x);
                break;
            }
        }
        let x =
            sample.ok_or_else(|| precondition("lifting", format!("no generic sample point in cell {id}")))?;
        let mut density = Rational::zero();
        for (t, g, o, bb) in &pieces {
            if in_box(&x, bb) && t.contains_point_strictly(&x) {
                density = group.add(&density, &group.times(g, *o as i64));
            }
        }
        cells.push((id, group.times(&density, complex.orientation(id) as i64)));
    }
    PolyChain::from_cells(complex, group, d, cells)
}

/// Chains equal as currents: syntactically, or after writing both on the grid.
fn same_current(a: &PolyChain, b: &PolyChain, complex: &GridComplex) -> Result<bool> {
    let diff = a.clone().into_soup().sub(&b.clone().into_soup())?;
    if diff.is_zero() {
        return Ok(true);
    }
    Ok(diff.to_cell_vector(complex)?.iter().all(Zero::is_zero))
}

fn cone_correct(q: &PolyChain, complex: &GridComplex) -> Result<(PolyChain, LiftReport)> {
    let qg = q.refine_onto(complex)?;
    let pq = project_chain(&qg)?;
    let corrected = if pq.is_zero() {
        qg.clone()
    } else {
        let filling = cone_filling(&pq.clone().into_soup())?;
        let s_grid = rasterize_top(&filling, complex)?;
        if !same_current(&s_grid.boundary()?, &pq, complex)? {
            return Err(precondition("lifting", "rasterized cone does not fill pi(Q)"));
        }
        let (_, s_lift, _, _) = lift_top_optimal(&s_grid)?;
        qg.sub(&s_lift.boundary()?)?
    };
    let mut report = LiftReport::new("br-correct", q, &corrected, Rational::from_integer(6.into()));
    report.boundary_factor = Some(Rational::one());
    report.d_used = Some(BrRoute::Cone.constant());
    Ok((corrected, report))
}

/// Given a real chain `Q` with `π(∂Q) = 0`, return `Y` with `π(Y) = 0`,
/// `∂Y = ∂Q` and `M(Y) ≤ D·M(Q)` for the route constant `D`.
pub fn br_correct(
    q: &PolyChain,
    complex: &GridComplex,
    route: Option<BrRoute>,
) -> Result<(PolyChain, LiftReport)> {
    let k = q.dim();
    let d = q.ambient_dim();
    let route = route.unwrap_or(BrRoute::default_for(k));
    let supported = match route {
        BrRoute::Loops => k == 1,
        BrRoute::Cone => k >= 1 && k + 1 == d,
    };
    if !supported {
        return Err(Error::UnsupportedDimension { k, d });
    }
    check_integer_boundary(q)?;
    let (y, mut report) = match route {
        BrRoute::Loops => loop_cancel(q)?,
        BrRoute::Cone => cone_correct(q, complex)?,
    };
    report.operation = "br-correct";
    report.boundary_factor = Some(Rational::one());
    Ok((y, report))
}

/// A splitting `T = Z + ∂S` of a circle chain.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub z: PolyChain,
    pub s: PolyChain,
}

impl Decomposition {
    /// `Z = T`, `S = 0`.
    pub fn trivial(t: &PolyChain) -> Self {
        Self {
            z: t.clone(),
            s: PolyChain::zero(t.group(), t.ambient_dim(), t.dim() + 1).with_grid_unchecked(t.grid()),
        }
    }
}

/// A lift of a circle chain together with its pieces.
#[derive(Clone, Debug)]
pub struct FlatLift {
    pub lift: PolyChain,
    /// Coefficient-wise lift of `Z`.
    pub z_lift: PolyChain,
    /// Coefficient-wise lift of `∂S`.
    pub x_lift: PolyChain,
    /// Correction of `x_lift` with vanishing projection.
    pub y: PolyChain,
    pub route: Option<BrRoute>,
    /// `(2 + 2D)(1 + ε)`, the constant asserted for the lift.
    pub stated_bound: Rational,
    /// `(3 + 2D)(1 + ε)`, the constant the construction guarantees.
    pub proven_bound: Rational,
    pub report: LiftReport,
}

/// Lift with the trivial decomposition.
pub fn lift_flat(
    t: &PolyChain,
    complex: &GridComplex,
    epsilon: &Rational,
    route: Option<BrRoute>,
) -> Result<FlatLift> {
    lift_flat_with(t, &Decomposition::trivial(t), complex, epsilon, route)
}

/// Lift `T` through a decomposition `T = Z + ∂S` with
/// `M(Z) ≤ (1+ε)M(T)` and `M(∂S) ≤ (2+2ε)M(T)`.
pub fn lift_flat_with(
    t: &PolyChain,
    dec: &Decomposition,
    complex: &GridComplex,
    epsilon: &Rational,
    route: Option<BrRoute>,
) -> Result<FlatLift> {
    require_group(t, GroupTag::Circle)?;
    if epsilon.is_negative() {
        return Err(precondition("lifting", "epsilon must be nonnegative"));
    }
    let k = t.dim();
    let d = t.ambient_dim();
    let one_eps = Rational::one() + epsilon;
    if k == 0 || k == d {
        let lift = lift_coefficientwise(t)?;
        let report = LiftReport::new("lift", t, &lift, one_eps.clone());
        let zero = PolyChain::zero(GroupTag::Real, d, k);
        return Ok(FlatLift {
            z_lift: lift.clone(),
            lift,
            x_lift: zero.clone(),
            y: zero,
            route: None,
            stated_bound: one_eps.clone(),
            proven_bound: one_eps,
            report,
        });
    }
    if k != 1 && k + 1 != d {
        return Err(Error::UnsupportedDimension { k, d });
    }
    require_group(&dec.z, GroupTag::Circle)?;
    require_group(&dec.s, GroupTag::Circle)?;
    if dec.z.dim() != k || dec.s.dim() != k + 1 {
        return Err(crate::error::dim_mismatch(
            "lifting",
            "decomposition has the wrong dimensions",
        ));
    }
    let ds = dec.s.boundary()?;
    if !same_current(&dec.z.add(&ds)?, t, complex)? {
        return Err(precondition("lifting", "Z + dS != T"));
    }
    let mt = t.mass_exact();
    if !le(&dec.z.mass_exact(), &mt.scale(&one_eps)) {
        return Err(precondition("lifting", "M(Z) > (1+eps) M(T)"));
    }
    let two = Rational::from_integer(2.into());
    if !le(&ds.mass_exact(), &mt.scale(&(&two * &one_eps))) {
        return Err(precondition("lifting", "M(dS) > (2+2eps) M(T)"));
    }
    let route = route.unwrap_or(BrRoute::default_for(k));
    let dconst = Rational::from_integer(route.constant().into());
    let z_lift = lift_coefficientwise(&dec.z)?;
    let x_lift = lift_coefficientwise(&ds)?;
    let (y, _) = br_correct(&x_lift, complex, Some(route))?;
    let w = x_lift.clone().into_soup().sub(&y.clone().into_soup())?;
    let lift = z_lift.clone().into_soup().add(&w)?;
    if !same_current(&project_chain(&lift)?, t, complex)? {
        return Err(precondition("lifting", "lift does not project onto T"));
    }
    let stated_bound = (&two + &two * &dconst) * &one_eps;
    let proven_bound = (Rational::from_integer(3.into()) + &two * &dconst) * &one_eps;
    let mut report = LiftReport::new("lift", t, &lift, stated_bound.clone());
    report.d_used = Some(route.constant());
    Ok(FlatLift {
        lift,
        z_lift,
        x_lift,
        y,
        route: Some(route),
        stated_bound,
        proven_bound,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::kuhn_complex;
    use crate::rat;
    use proptest::prelude::*;

    fn pt(c: &[(i64, i64)]) -> Point {
        c.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    fn edge(a: Point, b: Point) -> Simplex {
        Simplex::new(vec![a, b]).unwrap()
    }

    /// `value · ⟦cube⟧` with the standard orientation, as a top chain.
    fn cube_chain(g: &GridComplex, group: GroupTag, values: &[(usize, Rational)]) -> PolyChain {
        let d = g.dim();
        let cells = values.iter().flat_map(|(cube, v)| {
            g.simplices_in_cube(d, *cube)
                .into_iter()
                .map(move |id| (id, v * Rational::from_integer(g.orientation(id).into())))
        });
        PolyChain::from_cells(g, group, d, cells).unwrap()
    }

    #[test]
    fn projection_and_section_invert() {
        let g = kuhn_complex(2, 2).unwrap();
        let p = cube_chain(&g, GroupTag::Real, &[(0, rat(7, 4)), (3, rat(-1, 3))]);
        let pi = project_chain(&p).unwrap();
        let back = lift_coefficientwise(&pi).unwrap();
        assert_eq!(project_chain(&back).unwrap(), pi);
        assert!(le(&back.mass_exact(), &p.mass_exact()));
        assert!(project_chain(&pi).is_err());
    }

    #[test]
    fn two_squares_keep_boundary_mass() {
        let g = kuhn_complex(2, 2).unwrap();
        let p = cube_chain(&g, GroupTag::Circle, &[(0, rat(1, 10)), (1, rat(9, 10))]);
        let (theta, lifted, _, report) = lift_top_optimal(&p).unwrap();
        assert_eq!(project_chain(&lifted).unwrap(), p);
        assert_eq!(report.boundary_mass_out, report.boundary_mass_in);
        assert!(report.within_bounds());
        assert!(theta > quarter() && theta < three_quarters());
    }

    #[test]
    fn half_square_profile_has_two_intervals() {
        let g = kuhn_complex(2, 1).unwrap();
        let p = cube_chain(&g, GroupTag::Circle, &[(0, rat(1, 2))]);
        let profile = ThresholdProfile::build(&p).unwrap();
        assert_eq!(profile.breakpoints, vec![rat(1, 2)]);
        assert_eq!(profile.intervals.len(), 2);
        // both sides give boundary mass 4 · 1/2
        assert_eq!(profile.intervals[0].2, SurdSum::rational(rat(2, 1)));
        assert_eq!(profile.intervals[1].2, SurdSum::rational(rat(2, 1)));
        assert_eq!(profile.best_theta(), rat(3, 8));
        assert!(lift_top_threshold(&p, &rat(1, 2)).is_err());
        assert!(lift_top_threshold(&p, &rat(1, 5)).is_err());
        let zero = PolyChain::zero(GroupTag::Circle, 2, 2);
        assert_eq!(ThresholdProfile::build(&zero).unwrap().best_theta(), rat(1, 2));
    }

    #[test]
    fn profile_integral_bound() {
        let g = kuhn_complex(2, 3).unwrap();
        let p = cube_chain(
            &g,
            GroupTag::Circle,
            &[(0, rat(2, 7)), (1, rat(5, 7)), (4, rat(1, 3)), (8, rat(3, 5))],
        );
        let profile = ThresholdProfile::build(&p).unwrap();
        let bm = p.boundary().unwrap().mass_exact();
        assert!(le(&profile.integral, &bm.scale(&rat(5, 2))));
        let (_, _, _, report) = lift_top_optimal(&p).unwrap();
        assert!(report.within_bounds());
    }

    #[test]
    fn triangle_loop_cancels_to_zero() {
        let (a, b, c) = (
            pt(&[(0, 1), (0, 1)]),
            pt(&[(1, 1), (0, 1)]),
            pt(&[(0, 1), (1, 1)]),
        );
        let q = PolyChain::from_terms(
            GroupTag::Real,
            2,
            1,
            [
                (edge(a.clone(), b.clone()), rat(1, 2)),
                (edge(b, c.clone()), rat(1, 2)),
                (edge(c, a), rat(1, 2)),
            ],
        )
        .unwrap();
        let (y, report) = loop_cancel(&q).unwrap();
        assert!(y.is_zero());
        assert_eq!(report.passes, 1);
    }

    #[test]
    fn square_loop_mass_drops_from_six_to_four() {
        let corners = [
            pt(&[(0, 1), (0, 1)]),
            pt(&[(1, 1), (0, 1)]),
            pt(&[(1, 1), (1, 1)]),
            pt(&[(0, 1), (1, 1)]),
        ];
        let q = PolyChain::from_terms(
            GroupTag::Real,
            2,
            1,
            (0..4).map(|i| (edge(corners[i].clone(), corners[(i + 1) % 4].clone()), rat(3, 2))),
        )
        .unwrap();
        assert_eq!(q.mass_exact(), SurdSum::rational(rat(6, 1)));
        let (y, report) = loop_cancel(&q).unwrap();
        assert_eq!(y.mass_exact(), SurdSum::rational(rat(4, 1)));
        assert_eq!(y.boundary().unwrap(), q.boundary().unwrap());
        assert!(y.terms().all(|(_, g)| g.is_integer()));
        assert!(report.within_bounds());
    }

    #[test]
    fn loop_cancel_rejects_fractional_boundary() {
        let q = PolyChain::from_terms(
            GroupTag::Real,
            2,
            1,
            [(edge(pt(&[(0, 1), (0, 1)]), pt(&[(1, 1), (0, 1)])), rat(1, 2))],
        )
        .unwrap();
        assert!(matches!(loop_cancel(&q), Err(Error::Precondition { .. })));
    }

    #[test]
    fn cone_route_fills_square_boundaries() {
        let g = kuhn_complex(2, 2).unwrap();
        for (v, expect_zero) in [(rat(3, 10), true), (rat(7, 10), false)] {
            let s = cube_chain(&g, GroupTag::Real, &[(1, v)]);
            let q = s.boundary().unwrap();
            let (y, report) = br_correct(&q, &g, Some(BrRoute::Cone)).unwrap();
            assert!(project_chain(&y).unwrap().is_zero());
            assert_eq!(y.boundary().unwrap(), q.boundary().unwrap());
            assert_eq!(y.is_zero(), expect_zero);
            assert!(report.within_bounds());
        }
    }

    #[test]
    fn cone_route_in_three_dimensions() {
        let g = kuhn_complex(3, 2).unwrap();
        let s = cube_chain(&g, GroupTag::Real, &[(0, rat(2, 5)), (5, rat(4, 5))]);
        let q = s.boundary().unwrap();
        let (y, report) = br_correct(&q, &g, None).unwrap();
        assert!(project_chain(&y).unwrap().is_zero());
        assert_eq!(y.boundary().unwrap(), q.boundary().unwrap());
        assert!(report.within_bounds());
        assert_eq!(report.d_used, Some(6));
    }

    #[test]
    fn lift_through_a_decomposition() {
        let g = kuhn_complex(2, 2).unwrap();
        let s = cube_chain(&g, GroupTag::Circle, &[(2, rat(2, 5))]);
        let t = s.boundary().unwrap();
        let dec = Decomposition {
            z: PolyChain::zero(GroupTag::Circle, 2, 1),
            s,
        };
        for route in [BrRoute::Loops, BrRoute::Cone] {
            let fl = lift_flat_with(&t, &dec, &g, &rat(1, 10), Some(route)).unwrap();
            assert_eq!(project_chain(&fl.lift).unwrap().refine_onto(&g).unwrap(), t);
            assert!(fl.report.within_bounds());
        }
        let trivial = lift_flat(&t, &g, &rat(1, 10), None).unwrap();
        assert_eq!(trivial.report.mass_out, trivial.report.mass_in);
        let bad = Decomposition {
            z: t.clone(),
            s: dec.s.clone(),
        };
        assert!(lift_flat_with(&t, &bad, &g, &rat(1, 10), None).is_err());
    }

    #[test]
    fn unsupported_dimensions_are_rejected() {
        let g = kuhn_complex(3, 1).unwrap();
        let q = PolyChain::zero(GroupTag::Real, 3, 2);
        assert!(matches!(
            br_correct(&q, &g, Some(BrRoute::Loops)),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            br_correct(&PolyChain::zero(GroupTag::Real, 3, 1), &g, Some(BrRoute::Cone)),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn loop_cancel_preserves_boundary_and_mass(vals in prop::collection::vec(-8i64..8, 4)) {
            let g = kuhn_complex(2, 2).unwrap();
            let s = cube_chain(
                &g,
                GroupTag::Real,
                &vals.iter().enumerate().map(|(c, v)| (c, rat(*v, 5))).collect::<Vec<_>>(),
            );
            let q = s.boundary().unwrap();
            let (y, _) = loop_cancel(&q).unwrap();
            prop_assert_eq!(y.boundary().unwrap(), q.boundary().unwrap());
            prop_assert!(y.terms().all(|(_, c)| c.is_integer()));
            prop_assert!(le(&y.mass_exact(), &q.mass_exact()));
        }

        #[test]
        fn threshold_lift_projects_back(vals in prop::collection::vec(0i64..12, 9)) {
            let g = kuhn_complex(2, 3).unwrap();
            let p = cube_chain(
                &g,
                GroupTag::Circle,
                &vals.iter().enumerate().map(|(c, v)| (c, rat(*v, 12))).collect::<Vec<_>>(),
            );
            let (_, lifted, _, report) = lift_top_optimal(&p).unwrap();
            prop_assert_eq!(project_chain(&lifted).unwrap(), p);
            prop_assert!(report.within_bounds());
        }
    }
}
