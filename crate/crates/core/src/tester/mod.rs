//! Adaptive one-sided search for length-`k` increasing subsequences.
//!
//! [`find_monotone`] first tries the non-adaptive suffix sampler, then
//! repeatedly samples an anchor `x`, probes one position per dyadic scale to
//! its right, and depending on how far the best probe `y` lands either
//! recurses into overshoot intervals between `x` and `y`
//! ([`find_within_interval`]) or searches windows around `x` for a good
//! left/right split ([`find_good_split`]). Every recursive call asks for a
//! strictly shorter pattern on a restricted view.
//!
//! Output is one-sided: a `Found` outcome always carries a witness that
//! verifies against the invoked view, and a view without a length-`k`
//! increasing subsequence can only yield `Fail`.

mod budget;
mod constants;
mod rng;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{verify_witness, PatternWitness};
use crate::view::{IndexInterval, SequenceView, ViewError};

pub use budget::{query_budget, suffix_budget};
pub use constants::{AlgorithmConstants, SplitEpsilon};
pub use rng::TrialRng;

use search::{increasing_among, Hit, Search};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TesterError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("overshoot intervals must be disjoint, ordered and inside [x, y]")]
    MalformedIntervals,
    #[error("anchors must satisfy x < y and f(x) < f(y) with both unmasked")]
    InvalidAnchors,
    #[error("recursion depth {depth} exceeds limit {limit}")]
    DepthExceeded { depth: usize, limit: usize },
    #[error("{queries} queries exceed the worst-case budget {budget}")]
    BudgetExceeded { queries: u64, budget: f64 },
    #[error("witness {0:?} does not verify against the view")]
    InvalidWitness(Vec<usize>),
    #[error("constants: {0}")]
    Config(String),
    #[error(transparent)]
    View(#[from] ViewError),
}

/// Outcome of one search: a verified witness or `Fail`, plus the queries spent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub found: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PatternWitness>,
    pub queries: u64,
}

impl RunOutcome {
    pub fn is_found(&self) -> bool {
        self.found
    }
}

fn check_params(k: usize, eps: f64, delta: f64) -> Result<(), TesterError> {
    if k == 0 {
        return Err(TesterError::InvalidParameter("k must be at least 1".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(TesterError::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(TesterError::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

fn finish(view: &SequenceView<'_>, before: u64, hit: Option<Hit>) -> Result<RunOutcome, TesterError> {
    let queries = view.query_count() - before;
    let witness = hit.map(|h| PatternWitness::new(h.into_iter().map(|(i, _)| i).collect()));
    if let Some(w) = &witness {
        if !verify_witness(view.base(), w, view.interval(), &view.range()) {
            return Err(TesterError::InvalidWitness(w.indices.clone()));
        }
    }
    Ok(RunOutcome { found: witness.is_some(), witness, queries })
}

fn within_budget(outcome: RunOutcome, budget: f64) -> Result<RunOutcome, TesterError> {
    if outcome.queries as f64 > budget {
        return Err(TesterError::BudgetExceeded { queries: outcome.queries, budget });
    }
    Ok(outcome)
}

/// A length-`k` increasing subsequence among `points` (distinct indices),
/// if there is one.
pub fn extract_increasing(points: &[(usize, f64)], k: usize) -> Option<PatternWitness> {
    increasing_among(points, k).map(|h| PatternWitness::new(h.into_iter().map(|(i, _)| i).collect()))
}

/// Searches `view` for a length-`k` increasing subsequence.
///
/// If the view holds `eps * |I|` disjoint such subsequences this finds one
/// with probability at least `1 - delta` (given generous enough constants).
pub fn find_monotone(
    view: &SequenceView<'_>,
    k: usize,
    eps: f64,
    delta: f64,
    consts: &AlgorithmConstants,
    rng: &mut TrialRng,
) -> Result<RunOutcome, TesterError> {
    check_params(k, eps, delta)?;
    let before = view.query_count();
    let hit = Search::new(consts, rng, k).monotone(view, k, eps, delta, 1)?;
    let outcome = finish(view, before, hit)?;
    within_budget(outcome, query_budget(consts, k, eps, delta, view.len()))
}

/// Non-adaptive sampler: random starts, a few random points in every
/// dyadic scale after each start, for geometrically decreasing density
/// guesses.
pub fn sample_suffix(
    view: &SequenceView<'_>,
    k: usize,
    eps: f64,
    delta: f64,
    consts: &AlgorithmConstants,
    rng: &mut TrialRng,
) -> Result<RunOutcome, TesterError> {
    check_params(k, eps, delta)?;
    let before = view.query_count();
    let hit = Search::new(consts, rng, k).suffix(view, k, eps, delta)?;
    let outcome = finish(view, before, hit)?;
    within_budget(outcome, suffix_budget(consts, eps, delta, view.len()))
}

/// Overshoot handler: splits each `J_kappa` at `f(y)` and looks for a
/// `(kappa + 1)`-pattern below and a `(k - kappa)`-pattern at or above it,
/// then assembles a `k`-pattern from everything found plus `x` and `y`.
#[allow(clippy::too_many_arguments)]
pub fn find_within_interval(
    view: &SequenceView<'_>,
    k: usize,
    eps: f64,
    delta: f64,
    x: usize,
    y: usize,
    intervals: &[IndexInterval],
    consts: &AlgorithmConstants,
    rng: &mut TrialRng,
) -> Result<RunOutcome, TesterError> {
    check_params(k, eps, delta)?;
    if k < 2 {
        return Err(TesterError::InvalidParameter("k must be at least 2".into()));
    }
    let ordered = intervals.windows(2).all(|p| p[0].hi < p[1].lo);
    let inside = intervals.iter().all(|j| x <= j.lo && j.hi <= y);
    if intervals.len() != k - 2 || !ordered || !inside {
        return Err(TesterError::MalformedIntervals);
    }
    if x >= y {
        return Err(TesterError::InvalidAnchors);
    }
    let before = view.query_count();
    let (Some(fx), Some(fy)) = (view.query(x)?.value(), view.query(y)?.value()) else {
        return Err(TesterError::InvalidAnchors);
    };
    if fx >= fy {
        return Err(TesterError::InvalidAnchors);
    }
    let hit = Search::new(consts, rng, k).within(view, k, eps, delta, (x, fx), (y, fy), intervals, 1)?;
    let outcome = finish(view, before, hit)?;
    within_budget(outcome, 2.0 + budget::within_budget(consts, k, eps, delta, view.len()))
}

/// Fitting-case handler: samples a split position `z` and a split value
/// `f(w)`, then looks for a `c`-pattern left of `z` below `f(w)` and a
/// `(k - c)`-pattern from `z` on at or above `f(w)`.
#[allow(clippy::too_many_arguments)]
pub fn find_good_split(
    view: &SequenceView<'_>,
    k: usize,
    eps: f64,
    delta: f64,
    c: usize,
    xi: f64,
    consts: &AlgorithmConstants,
    rng: &mut TrialRng,
) -> Result<RunOutcome, TesterError> {
    check_params(k, eps, delta)?;
    if c == 0 || c >= k {
        return Err(TesterError::InvalidParameter(format!("split index must lie in [1, {}], got {c}", k - 1)));
    }
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(TesterError::InvalidParameter(format!("xi must lie in (0, 1], got {xi}")));
    }
    let before = view.query_count();
    let hit = Search::new(consts, rng, k).good_split(view, k, eps, delta, c, xi, 1, false)?;
    let outcome = finish(view, before, hit)?;
    within_budget(outcome, budget::split_budget(consts, k, eps, delta, c, xi, view.len()))
}
