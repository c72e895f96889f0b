//! The recursive search. All four routines share one random stream and
//! return the hit as `(index, value)` pairs so that callers can assemble
//! longer patterns without re-querying.

use crate::exact::longest_increasing_positions;
use crate::structure::scales_within;
use crate::view::{IndexInterval, MaskedValue, SequenceView, ValueRange, ViewError};

use std::collections::HashMap;

use super::budget::Bounds;
use super::{AlgorithmConstants, TesterError, TrialRng};

pub(crate) type Hit = Vec<(usize, f64)>;

/// Smallest `t` with `2^t >= len`, at least 1.
pub(crate) fn scale_count(len: usize) -> u32 {
    (usize::BITS - (len.max(2) - 1).leading_zeros()).max(1)
}

/// A length-`k` increasing run among `points` (any order, duplicates allowed).
pub(crate) fn increasing_among(points: &[(usize, f64)], k: usize) -> Option<Hit> {
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.0);
    pts.dedup_by_key(|p| p.0);
    let values: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let lis = longest_increasing_positions(&values);
    (lis.len() >= k).then(|| lis[..k].iter().map(|&i| pts[i]).collect())
}

/// Overshoot intervals `J_1..J_{k-2}` between `x` and `y` for scale `t_star`.
/// `None` if any of them holds no index.
pub(crate) fn overshoot_intervals(
    x: usize,
    y: usize,
    t_star: u32,
    k: usize,
    spacing: f64,
) -> Option<Vec<IndexInterval>> {
    let base = (2f64).powi(t_star as i32) / (12.0 * k as f64);
    let mut out = Vec::with_capacity(k.saturating_sub(2));
    for i in 1..=k - 2 {
        let a = x as f64 + base * spacing.powi(-((k - 1 - i) as i32));
        let b = x as f64 + base * spacing.powi(-((k - 2 - i) as i32));
        // [a, b) over integers, strictly between x and y
        let lo = (a.ceil() as usize).max(x + 1);
        let hi = ((b.ceil() as usize).saturating_sub(1)).min(y - 1);
        if lo > hi {
            return None;
        }
        out.push(IndexInterval { lo, hi });
    }
    Some(out)
}

pub(crate) struct Search<'r> {
    consts: &'r AlgorithmConstants,
    rng: &'r mut TrialRng,
    /// Recursive calls may nest at most this deep.
    max_depth: usize,
    bounds: HashMap<usize, Bounds<'r>>,
}

impl<'r> Search<'r> {
    pub fn new(consts: &'r AlgorithmConstants, rng: &'r mut TrialRng, max_depth: usize) -> Self {
        Search { consts, rng, max_depth, bounds: HashMap::new() }
    }

    /// Whether reading all of a nested view costs no more than the
    /// worst case of the routine about to run on it.
    fn cheaper_to_scan(&mut self, len: usize, bound: impl FnOnce(&mut Bounds<'r>) -> f64) -> bool {
        if len <= self.consts.exact_scan_below {
            return true;
        }
        if !self.consts.scan_when_cheaper {
            return false;
        }
        let consts = self.consts;
        let b = self.bounds.entry(len).or_insert_with(|| Bounds::new(consts, len));
        bound(b) >= len as f64
    }

    fn read(view: &SequenceView<'_>, i: usize) -> Result<Option<f64>, TesterError> {
        Ok(view.query(i)?.value())
    }

    fn child<'a>(
        view: &SequenceView<'a>,
        iv: IndexInterval,
        range: &ValueRange,
    ) -> Result<Option<SequenceView<'a>>, TesterError> {
        match view.restrict(iv, range) {
            Ok(v) => Ok(Some(v)),
            Err(ViewError::EmptyRestriction) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// Reads every position of a small view and solves it exactly.
    fn scan(view: &SequenceView<'_>, k: usize) -> Result<Option<Hit>, TesterError> {
        let mut pts = Vec::with_capacity(view.len());
        for i in view.interval().iter() {
            if let MaskedValue::Value(v) = view.query(i)? {
                pts.push((i, v));
            }
        }
        Ok(increasing_among(&pts, k))
    }

    pub fn monotone(
        &mut self,
        view: &SequenceView<'_>,
        k: usize,
        eps: f64,
        delta: f64,
        depth: usize,
    ) -> Result<Option<Hit>, TesterError> {
        if depth > self.max_depth {
            return Err(TesterError::DepthExceeded { depth, limit: self.max_depth });
        }
        let nested = depth > 1;
        if view.len() <= self.consts.exact_scan_below
            || (nested && self.cheaper_to_scan(view.len(), |b| b.monotone(k, eps, delta)))
        {
            return Self::scan(view, k);
        }
        let p = self.consts.p(k, eps);
        if let Some(hit) = self.suffix(view, k, eps / p, delta)? {
            return Ok(Some(hit));
        }
        let iv = view.interval();
        let scales = scale_count(iv.len());
        let spacing = self.consts.spacing(k, eps);
        for _ in 0..self.consts.main_iterations(k, eps, delta) {
            let x = self.rng.uniform(iv);
            let Some(fx) = Self::read(view, x)? else { continue };
            if k == 1 {
                return Ok(Some(vec![(x, fx)]));
            }

            // rightmost sampled position above f(x); later scale wins a tie
            let mut best: Option<(usize, f64, u32)> = None;
            for t in 1..=scales {
                let reach = 1usize << t;
                let near = ((reach as f64) / (12.0 * k as f64)).ceil().max(1.0) as usize;
                let Some(window) =
                    IndexInterval::clipped((x + near) as i64, (x + reach) as i64, iv)
                else {
                    continue;
                };
                let yt = self.rng.uniform(window);
                if let Some(fy) = Self::read(view, yt)? {
                    if fy > fx && best.is_none_or(|(y, _, _)| yt >= y) {
                        best = Some((yt, fy, t));
                    }
                }
            }
            let Some((y, fy, t_star)) = best else { continue };
            if k == 2 {
                return Ok(Some(vec![(x, fx), (y, fy)]));
            }

            if let Some(js) = overshoot_intervals(x, y, t_star, k, spacing) {
                let hit =
                    self.within(view, k, eps / (2.0 * p), delta / 2.0, (x, fx), (y, fy), &js, depth)?;
                if hit.is_some() {
                    return Ok(hit);
                }
            }

            let span = (3.0 * k as f64 * spacing.log2()).ceil().max(0.0) as u32;
            let split_eps = self.consts.split_eps(k, eps);
            for tp in t_star.saturating_sub(span)..=t_star {
                let r = 1i64 << tp;
                let Some(j) = IndexInterval::clipped(x as i64 - r, x as i64 + r, iv) else {
                    continue;
                };
                let g = view.restrict(j, &ValueRange::full())?;
                for c0 in 1..k {
                    let hit = self.good_split(&g, k, split_eps, delta / 2.0, c0, 0.25, depth, true)?;
                    if hit.is_some() {
                        return Ok(hit);
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn suffix(
        &mut self,
        view: &SequenceView<'_>,
        k: usize,
        eps: f64,
        delta: f64,
    ) -> Result<Option<Hit>, TesterError> {
        let iv = view.interval();
        let mut pts: Vec<(usize, f64)> = Vec::new();
        for j in 0..self.consts.suffix_guesses(eps) {
            let alpha_hat = (0.5f64).powi(j as i32);
            let per_scale = self.consts.suffix_points_per_scale(alpha_hat);
            for _ in 0..self.consts.suffix_starts(eps, delta, alpha_hat) {
                pts.clear();
                let start = self.rng.uniform(iv);
                if let Some(v) = Self::read(view, start)? {
                    pts.push((start, v));
                }
                for scale in scales_within(start, iv.hi) {
                    if per_scale >= scale.len() as u64 {
                        for i in scale.iter() {
                            if let Some(v) = Self::read(view, i)? {
                                pts.push((i, v));
                            }
                        }
                    } else {
                        for _ in 0..per_scale {
                            let i = self.rng.uniform(scale);
                            if let Some(v) = Self::read(view, i)? {
                                pts.push((i, v));
                            }
                        }
                    }
                }
                if let Some(hit) = increasing_among(&pts, k) {
                    return Ok(Some(hit));
                }
            }
        }
        Ok(None)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn within(
        &mut self,
        view: &SequenceView<'_>,
        k: usize,
        eps: f64,
        delta: f64,
        x: (usize, f64),
        y: (usize, f64),
        js: &[IndexInterval],
        depth: usize,
    ) -> Result<Option<Hit>, TesterError> {
        let mut pts = vec![x, y];
        let sub_delta = delta / (2.0 * k as f64);
        for (idx, &j) in js.iter().enumerate() {
            let kappa = idx + 1;
            if let Some(low) = Self::child(view, j, &ValueRange::below(y.1))? {
                if let Some(hit) = self.monotone(&low, kappa + 1, eps / 2.0, sub_delta, depth + 1)? {
                    pts.extend(hit);
                }
            }
            if let Some(high) = Self::child(view, j, &ValueRange::at_least(y.1))? {
                if let Some(hit) = self.monotone(&high, k - kappa, eps / 2.0, sub_delta, depth + 1)? {
                    pts.extend(hit);
                }
            }
        }
        Ok(increasing_among(&pts, k))
    }

    #[allow(clippy::too_many_arguments)]
    pub fn good_split(
        &mut self,
        view: &SequenceView<'_>,
        k: usize,
        eps: f64,
        delta: f64,
        c: usize,
        xi: f64,
        depth: usize,
        nested: bool,
    ) -> Result<Option<Hit>, TesterError> {
        if view.len() <= self.consts.exact_scan_below
            || (nested && self.cheaper_to_scan(view.len(), |b| b.split(k, eps, delta, c, xi)))
        {
            return Self::scan(view, k);
        }
        let iv = view.interval();
        let sub_eps = eps * xi / 3.0;
        let sub_delta = delta / 3.0;
        for _ in 0..self.consts.split_iterations(k, eps, delta, xi) {
            let w = self.rng.uniform(iv);
            let z = self.rng.uniform(iv);
            let Some(fw) = Self::read(view, w)? else { continue };
            if z == iv.lo {
                continue;
            }
            let left_iv = IndexInterval { lo: iv.lo, hi: z - 1 };
            let right_iv = IndexInterval { lo: z, hi: iv.hi };
            let Some(left) = Self::child(view, left_iv, &ValueRange::below(fw))? else { continue };
            let Some(prefix) = self.monotone(&left, c, sub_eps, sub_delta, depth + 1)? else {
                continue;
            };
            let Some(right) = Self::child(view, right_iv, &ValueRange::at_least(fw))? else {
                continue;
            };
            if let Some(suffix) = self.monotone(&right, k - c, sub_eps, sub_delta, depth + 1)? {
                let mut hit = prefix;
                hit.extend(suffix);
                return Ok(Some(hit));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_count_covers_the_interval() {
        assert_eq!(scale_count(1), 1);
        assert_eq!(scale_count(2), 1);
        assert_eq!(scale_count(3), 2);
        assert_eq!(scale_count(1024), 10);
        assert_eq!(scale_count(1025), 11);
    }

    #[test]
    fn overshoot_geometry() {
        // k = 3, t* = 10: base = 1024/36 ~ 28.4; spacing 4 -> J_1 = [x + 7.1, x + 28.4)
        let js = overshoot_intervals(100, 1000, 10, 3, 4.0).unwrap();
        assert_eq!(js, vec![IndexInterval { lo: 108, hi: 128 }]);
        // tiny scale collapses
        assert_eq!(overshoot_intervals(100, 102, 1, 3, 4.0), None);
        // k = 4: two adjacent, ordered intervals
        let js = overshoot_intervals(0, 5000, 14, 4, 8.0).unwrap();
        assert_eq!(js.len(), 2);
        assert_eq!(js[0].hi + 1, js[1].lo);
    }

    #[test]
    fn increasing_among_handles_duplicates() {
        let pts = [(3, 1.0), (1, 0.0), (3, 1.0), (7, 5.0)];
        assert_eq!(increasing_among(&pts, 3), Some(vec![(1, 0.0), (3, 1.0), (7, 5.0)]));
        assert_eq!(increasing_among(&pts, 4), None);
    }
}
