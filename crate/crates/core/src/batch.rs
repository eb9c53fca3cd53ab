//! Data-parallel evaluation of independent instances.
//!
//! Every computation in the crate is pure, so a batch of instances can be
//! fanned out with rayon. Results come back in input order either way, which
//! keeps reports byte-identical between the two executors. Without the
//! `parallel` feature [`Exec::Parallel`] runs sequentially.

use crate::chains::PolyChain;
use crate::coarea::{verify_coarea, CoareaReport, GridFunction};
use crate::error::Result;
use crate::flatnorm::{flat_norm, FlatWitness};
use crate::grid::GridComplex;
use crate::lifting::{lift_top_optimal, LiftReport};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether [`Exec::Parallel`] actually uses threads in this build.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// `items.map(f)` in input order.
pub fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Exec::Sequential => items.iter().map(f).collect(),
        Exec::Parallel => par_map(items, f),
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Like [`map`], stopping at the first error in input order.
pub fn try_map<T, R, F>(exec: Exec, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    map(exec, items, f).into_iter().collect()
}

pub fn flat_norms(exec: Exec, chains: &[PolyChain], complex: &GridComplex) -> Result<Vec<FlatWitness>> {
    try_map(exec, chains, |c| flat_norm(c, complex))
}

pub fn top_lifts(exec: Exec, chains: &[PolyChain]) -> Result<Vec<LiftReport>> {
    try_map(exec, chains, |c| lift_top_optimal(c).map(|(_, _, _, r)| r))
}

pub fn coarea_reports(exec: Exec, functions: &[GridFunction]) -> Result<Vec<CoareaReport>> {
    try_map(exec, functions, verify_coarea)
}
