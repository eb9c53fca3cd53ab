//! Flat norm relative to a Kuhn complex.
//!
//! For a real `k`-chain `P` with coefficient vector `p` on the complex, the
//! flat norm is `min Σ vol(τ_j)|q_j| + Σ vol(σ_i)|r_i|` over `(k+1)`-chains
//! `q`, with `r = p − Bq` and `B` the signed incidence matrix. The LP is
//! solved in double precision, then the filling is snapped to nearby
//! rationals and the remainder recomputed exactly, so `R + ∂Q = P` always
//! holds as an identity of chains.

use num::{BigInt, Signed, ToPrimitive, Zero};

use crate::chains::PolyChain;
use crate::error::{precondition, Error, Result};
use crate::grid::GridComplex;
use crate::groups::GroupTag;
use crate::lp::{LpProblem, DEFAULT_PIVOT_CAP};
use crate::surd::SurdSum;
use crate::Rational;

/// Largest number of `(k+1)`-simplices the exact oracle accepts.
pub const ORACLE_MAX_FILLINGS: usize = 12;
/// Largest number of candidate vertices the exact oracle enumerates.
pub const ORACLE_MAX_CANDIDATES: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct FlatOptions {
    pub pivot_cap: usize,
    /// Denominator bound used when snapping the LP filling to rationals.
    pub max_denominator: i64,
}

impl Default for FlatOptions {
    fn default() -> Self {
        Self {
            pivot_cap: DEFAULT_PIVOT_CAP,
            max_denominator: 1_000_000,
        }
    }
}

/// A decomposition `P = R + ∂Q` certifying an upper bound for the flat norm.
#[derive(Clone, Debug)]
pub struct FlatWitness {
    /// LP optimum.
    pub value: f64,
    pub q: PolyChain,
    pub r: PolyChain,
    pub pivots: usize,
}

impl FlatWitness {
    /// Exact `M(Q) + M(R)` of the rationalized witness.
    pub fn certified_value(&self) -> SurdSum {
        self.q.mass_exact() + self.r.mass_exact()
    }

    /// Whether `R + ∂Q = P` holds exactly.
    pub fn replays(&self, p: &PolyChain) -> bool {
        let Ok(bq) = self.q.boundary() else {
            return false;
        };
        match self.r.add(&bq) {
            Ok(sum) => sum.into_soup() == p.clone().into_soup(),
            Err(_) => false,
        }
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`.
pub fn snap_rational(x: f64, max_den: i64) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let neg = x < 0.0;
    let mut y = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let max_den = max_den as i128;
    for _ in 0..64 {
        let a = y.floor();
        if a > 1e15 {
            break;
        }
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > max_den {
            // best semiconvergent within the bound
            let t = (max_den - q0) / q1;
            let (ps, qs) = (t * p1 + p0, t * q1 + q0);
            let err_s = (ps as f64 / qs as f64 - x.abs()).abs();
            let err_c = (p1 as f64 / q1 as f64 - x.abs()).abs();
            if qs > 0 && err_s < err_c {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let f = y - a;
        if f < 1e-15 {
            break;
        }
        y = 1.0 / f;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

fn check_input(p: &PolyChain, complex: &GridComplex) -> Result<Vec<Rational>> {
    if p.group() != GroupTag::Real {
        return Err(Error::GroupMismatch("real".into(), p.group().to_string()));
    }
    if p.ambient_dim() != complex.dim() || p.dim() >= complex.dim() {
        return Err(precondition(
            "flatnorm",
            format!(
                "need a k-chain with k < d = {} on the complex, got k = {}",
                complex.dim(),
                p.dim()
            ),
        ));
    }
    p.to_cell_vector(complex)
}

/// Volumes of all `k`-simplices of the complex.
pub fn cell_volumes(complex: &GridComplex, k: usize) -> Vec<SurdSum> {
    (0..complex.count(k)).map(|i| complex.volume_surd(k, i)).collect()
}

pub fn flat_norm(p: &PolyChain, complex: &GridComplex) -> Result<FlatWitness> {
    flat_norm_with(p, complex, &FlatOptions::default())
}

pub fn flat_norm_with(p: &PolyChain, complex: &GridComplex, opts: &FlatOptions) -> Result<FlatWitness> {
    let pv = check_input(p, complex)?;
    let k = p.dim();
    let m = complex.count(k);
    let nq = complex.count(k + 1);
    let zero_q = PolyChain::from_cells(complex, GroupTag::Real, k + 1, std::iter::empty())?;
    if pv.iter().all(Zero::is_zero) {
        let r = PolyChain::from_cells(complex, GroupTag::Real, k, std::iter::empty())?;
        return Ok(FlatWitness {
            value: 0.0,
            q: zero_q,
            r,
            pivots: 0,
        });
    }
    let vol_k: Vec<f64> = cell_volumes(complex, k).iter().map(SurdSum::to_f64).collect();
    let vol_q: Vec<f64> = cell_volumes(complex, k + 1).iter().map(SurdSum::to_f64).collect();
    // columns: q+ (nq), q- (nq), r+ (m), r- (m)
    let n = 2 * nq + 2 * m;
    let mut a = vec![vec![0.0; n]; m];
    for j in 0..nq {
        for &(i, s) in complex.faces(k + 1, j) {
            a[i][j] = s as f64;
            a[i][nq + j] = -(s as f64);
        }
    }
    let mut b = vec![0.0; m];
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        a[i][2 * nq + i] = 1.0;
        a[i][2 * nq + m + i] = -1.0;
        let pi = pv[i].to_f64().unwrap_or(0.0);
        if pi < 0.0 {
            for x in a[i].iter_mut() {
                *x = -*x;
            }
            b[i] = -pi;
            basis.push(2 * nq + m + i);
        } else {
            b[i] = pi;
            basis.push(2 * nq + i);
        }
    }
    let mut c = Vec::with_capacity(n);
    c.extend(vol_q.iter().copied());
    c.extend(vol_q.iter().copied());
    c.extend(vol_k.iter().copied());
    c.extend(vol_k.iter().copied());
    let sol = LpProblem { a, b, c }.solve(&basis, opts.pivot_cap)?;
    let q: Vec<Rational> = (0..nq)
        .map(|j| snap_rational(sol.x[j] - sol.x[nq + j], opts.max_denominator))
        .collect();
    let q_chain = PolyChain::from_cells(complex, GroupTag::Real, k + 1, q.into_iter().enumerate())?;
    let r_chain = p
        .clone()
        .with_grid_unchecked(Some(complex.spec()))
        .sub(&q_chain.boundary()?)?;
    let r_chain = r_chain.refine_onto(complex)?;
    Ok(FlatWitness {
        value: sol.objective,
        q: q_chain,
        r: r_chain,
        pivots: sol.pivots,
    })
}

/// `𝔽(A − B)` on a common complex.
pub fn flat_distance(a: &PolyChain, b: &PolyChain, complex: &GridComplex) -> Result<f64> {
    Ok(flat_norm(&a.sub(b)?, complex)?.value)
}

/// Exact optimum and an optimal filling, found by enumerating the vertices of
/// the hyperplane arrangement `{q_j = 0} ∪ {(Bq)_i = p_i}` in filling space.
///
/// The objective is convex, piecewise linear and coercive, and every linear
/// piece is pointed because the coordinate hyperplanes have full rank, so
/// some arrangement vertex is optimal.
pub fn flat_norm_oracle(p: &PolyChain, complex: &GridComplex) -> Result<(SurdSum, PolyChain)> {
    let pv = check_input(p, complex)?;
    let k = p.dim();
    let m = complex.count(k);
    let nq = complex.count(k + 1);
    if nq > ORACLE_MAX_FILLINGS {
        return Err(Error::SizeGuard(format!(
            "{nq} simplices of dimension {} exceed the limit {ORACLE_MAX_FILLINGS}",
            k + 1
        )));
    }
    let total = nq + m;
    let candidates = binomial(total as u64, nq as u64);
    if candidates > ORACLE_MAX_CANDIDATES {
        return Err(Error::SizeGuard(format!(
            "{candidates} candidate vertices exceed the limit {ORACLE_MAX_CANDIDATES}"
        )));
    }
    let vol_k = cell_volumes(complex, k);
    let vol_q = cell_volumes(complex, k + 1);
    let vol_k_f: Vec<f64> = vol_k.iter().map(SurdSum::to_f64).collect();
    let vol_q_f: Vec<f64> = vol_q.iter().map(SurdSum::to_f64).collect();
    let mut bmat = vec![vec![Rational::zero(); nq]; m];
    for j in 0..nq {
        for &(i, s) in complex.faces(k + 1, j) {
            bmat[i][j] = Rational::from_integer(s.into());
        }
    }
    // hyperplane h: normal · q = rhs
    let hyperplanes: Vec<(Vec<Rational>, Rational)> = (0..nq)
        .map(|j| {
            let mut e = vec![Rational::zero(); nq];
            e[j] = Rational::from_integer(1.into());
            (e, Rational::zero())
        })
        .chain((0..m).map(|i| (bmat[i].clone(), pv[i].clone())))
        .collect();
    let residual = |q: &[Rational]| -> Vec<Rational> {
        (0..m).map(|i| &pv[i] - crate::linalg::dot(&bmat[i], q)).collect()
    };
    let eval_exact = |q: &[Rational], r: &[Rational]| -> SurdSum {
        let a: SurdSum = q.iter().zip(&vol_q).map(|(x, v)| v.scale(&x.abs())).sum();
        let b: SurdSum = r.iter().zip(&vol_k).map(|(x, v)| v.scale(&x.abs())).sum();
        a + b
    };
    let zero_q = vec![Rational::zero(); nq];
    let r0 = residual(&zero_q);
    let mut best_q = zero_q.clone();
    let mut best_exact = eval_exact(&zero_q, &r0);
    let mut best_f = best_exact.to_f64();
    let mut chosen = Vec::with_capacity(nq);
    let planes_f: Vec<(Vec<f64>, f64)> = hyperplanes
        .iter()
        .map(|(a, b)| {
            (
                a.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect(),
                b.to_f64().unwrap_or(0.0),
            )
        })
        .collect();
    let bmat_f: Vec<Vec<f64>> = bmat
        .iter()
        .map(|row| row.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect())
        .collect();
    let pv_f: Vec<f64> = pv.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect();
    let mut visit = |sel: &[usize]| {
        // cheap floating-point screen; exact arithmetic only for contenders
        let Some(qf) = solve_f64(sel.iter().map(|&h| &planes_f[h])) else {
            return;
        };
        let f: f64 = qf.iter().zip(&vol_q_f).map(|(x, v)| x.abs() * v).sum::<f64>()
            + (0..m)
                .map(|i| {
                    (pv_f[i] - bmat_f[i].iter().zip(&qf).map(|(a, b)| a * b).sum::<f64>()).abs() * vol_k_f[i]
                })
                .sum::<f64>();
        if f > best_f + 1e-7 * (1.0 + best_f) {
            return;
        }
        let a: Vec<Vec<Rational>> = sel.iter().map(|&h| hyperplanes[h].0.clone()).collect();
        let b: Vec<Rational> = sel.iter().map(|&h| hyperplanes[h].1.clone()).collect();
        let Some(q) = crate::linalg::solve_square(&a, &b) else {
            return;
        };
        let r = residual(&q);
        let exact = eval_exact(&q, &r);
        if exact < best_exact {
            best_f = exact.to_f64();
            best_exact = exact;
            best_q = q;
        }
    };
    if nq > 0 {
        choose(total, nq, 0, &mut chosen, &mut visit);
    }
    let q_chain = PolyChain::from_cells(complex, GroupTag::Real, k + 1, best_q.into_iter().enumerate())?;
    Ok((best_exact, q_chain))
}

/// Gaussian elimination with partial pivoting; `None` when (numerically) singular.
fn solve_f64<'a>(rows: impl Iterator<Item = &'a (Vec<f64>, f64)>) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = rows
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(*b);
            row
        })
        .collect();
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        for i in 0..n {
            if i != col {
                let f = a[i][col] / a[col][col];
                if f != 0.0 {
                    for j in col..=n {
                        a[i][j] -= f * a[col][j];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn choose(n: usize, m: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == m {
        f(cur);
        return;
    }
    for i in start..n {
        if n - i < m - cur.len() {
            break;
        }
        cur.push(i);
        choose(n, m, i + 1, cur, f);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::kuhn_complex;
    use crate::rat;

    fn unit_square_loop(g: &GridComplex, cells: impl Fn(&[usize]) -> bool) -> PolyChain {
        let d = g.dim();
        let tops: Vec<(usize, Rational)> = (0..g.count(d))
            .filter(|&t| cells(g.lattice_coords(g.vertex_ids(d, t)[0])))
            .map(|t| (t, rat(g.orientation(t) as i64, 1)))
            .collect();
        PolyChain::from_cells(g, GroupTag::Real, d, tops)
            .unwrap()
            .boundary()
            .unwrap()
    }

    #[test]
    fn snapping_recovers_simple_fractions() {
        assert_eq!(snap_rational(0.333_333_333_3, 1_000_000), rat(1, 3));
        assert_eq!(snap_rational(-2.5, 1_000_000), rat(-5, 2));
        assert_eq!(snap_rational(0.0, 10), rat(0, 1));
        assert_eq!(snap_rational(std::f64::consts::PI, 1000), rat(355, 113));
    }

    #[test]
    fn zero_chain_has_zero_norm() {
        let g = kuhn_complex(2, 2).unwrap();
        let z = PolyChain::from_cells(&g, GroupTag::Real, 1, std::iter::empty()).unwrap();
        let w = flat_norm(&z, &g).unwrap();
        assert_eq!(w.value, 0.0);
        assert!(w.q.is_zero() && w.r.is_zero());
        assert!(flat_norm_oracle(&z, &kuhn_complex(2, 1).unwrap())
            .unwrap()
            .0
            .is_zero());
    }

    #[test]
    fn unit_square_boundary_is_filled() {
        let g = kuhn_complex(2, 1).unwrap();
        let p = unit_square_loop(&g, |_| true);
        let w = flat_norm(&p, &g).unwrap();
        assert!((w.value - 1.0).abs() < 1e-9);
        assert!(w.replays(&p));
        let (exact, q) = flat_norm_oracle(&p, &g).unwrap();
        assert_eq!(exact.as_rational(), Some(rat(1, 1)));
        assert_eq!(q.boundary().unwrap().into_soup(), p.into_soup());
    }

    #[test]
    fn half_square_is_filled_not_traced() {
        let g = kuhn_complex(2, 8).unwrap();
        let p = unit_square_loop(&g, |c| c[0] < 4 && c[1] < 4);
        let w = flat_norm(&p, &g).unwrap();
        // area 1/4 against perimeter 2
        assert!((w.value - 0.25).abs() < 1e-9);
        assert_eq!(w.certified_value().as_rational(), Some(rat(1, 4)));
        assert!(w.replays(&p));
    }

    #[test]
    fn single_edge_matches_oracle() {
        let g = kuhn_complex(2, 1).unwrap();
        for e in 0..g.count(1) {
            let p = PolyChain::from_cells(&g, GroupTag::Real, 1, [(e, rat(1, 1))]).unwrap();
            let w = flat_norm(&p, &g).unwrap();
            let (exact, _) = flat_norm_oracle(&p, &g).unwrap();
            assert!((w.value - exact.to_f64()).abs() < 1e-9, "edge {e}");
            assert!(w.replays(&p));
        }
    }

    #[test]
    fn oracle_refuses_large_complexes() {
        let g = kuhn_complex(2, 3).unwrap();
        let p = PolyChain::from_cells(&g, GroupTag::Real, 1, [(0, rat(1, 1))]).unwrap();
        assert!(matches!(flat_norm_oracle(&p, &g), Err(Error::SizeGuard(_))));
    }
}
