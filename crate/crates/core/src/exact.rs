//! Exact (linear-or-worse) oracles over whole sequences.
//!
//! These read every value and serve as ground truth: instance certification,
//! the harness's witness re-check, and the reference side of tests.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::view::{IndexInterval, ValueRange};

/// Indices `i_1 < ... < i_k` with strictly increasing values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternWitness {
    pub indices: Vec<usize>,
}

impl PatternWitness {
    pub fn new(indices: Vec<usize>) -> Self {
        PatternWitness { indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Pairwise index-disjoint witnesses of one common length.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DisjointFamily {
    pub tuples: Vec<PatternWitness>,
}

impl DisjointFamily {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Every tuple is a length-`k` pattern of `seq` and no index is shared.
    pub fn is_valid(&self, seq: &[f64], k: usize) -> bool {
        let Ok(full) = IndexInterval::full(seq.len()) else {
            return self.tuples.is_empty();
        };
        let mut seen = HashSet::new();
        self.tuples.iter().all(|w| {
            w.len() == k
                && verify_witness(seq, w, full, &ValueRange::full())
                && w.indices.iter().all(|&i| seen.insert(i))
        })
    }
}

/// Positions (into the iteration order) of one longest strictly increasing
/// subsequence of `values`.
pub(crate) fn longest_increasing_positions(values: &[f64]) -> Vec<usize> {
    // tails[len-1] = position of the smallest tail of an increasing run of length len
    let mut tails: Vec<usize> = Vec::new();
    let mut prev: Vec<Option<usize>> = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        let pos = tails.partition_point(|&t| values[t] < v);
        prev.push(if pos > 0 { Some(tails[pos - 1]) } else { None });
        if pos == tails.len() {
            tails.push(i);
        } else {
            tails[pos] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = tails.last().copied();
    while let Some(i) = cur {
        out.push(i);
        cur = prev[i];
    }
    out.reverse();
    out
}

/// Length of the longest strictly increasing subsequence (patience sorting).
pub fn lis_length(seq: &[f64]) -> usize {
    let mut tails: Vec<f64> = Vec::new();
    for &v in seq {
        let pos = tails.partition_point(|&t| t < v);
        if pos == tails.len() {
            tails.push(v);
        } else {
            tails[pos] = v;
        }
    }
    tails.len()
}

/// A length-`k` increasing subsequence if one exists.
pub fn find_pattern_exact(seq: &[f64], k: usize) -> Option<PatternWitness> {
    assert!(k >= 1, "pattern length must be positive");
    let mut lis = longest_increasing_positions(seq);
    if lis.len() < k {
        return None;
    }
    lis.truncate(k);
    Some(PatternWitness::new(lis))
}

/// Cover of all indices by `lis_length(seq)` non-increasing subsequences
/// (the patience piles), i.e. a minimum Dilworth decomposition.
pub fn nonincreasing_cover(seq: &[f64]) -> Vec<Vec<usize>> {
    let mut tops: Vec<f64> = Vec::new();
    let mut piles: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in seq.iter().enumerate() {
        let pos = tops.partition_point(|&t| t < v);
        if pos == tops.len() {
            tops.push(v);
            piles.push(vec![i]);
        } else {
            tops[pos] = v;
            piles[pos].push(i);
        }
    }
    piles
}

/// Repeatedly removes the lexicographically first length-`k` increasing
/// subsequence among the remaining indices until none is left.
pub fn greedy_disjoint_family(seq: &[f64], k: usize) -> DisjointFamily {
    assert!(k >= 1, "pattern length must be positive");
    let n = seq.len();
    let mut alive = vec![true; n];
    let mut family = DisjointFamily::default();
    // longest increasing run starting at each live index
    let mut reach = vec![0usize; n];
    loop {
        let mut tails: Vec<f64> = Vec::new();
        for i in (0..n).rev() {
            if !alive[i] {
                continue;
            }
            // increasing-from-i == decreasing-into-i when read right to left
            let v = -seq[i];
            let pos = tails.partition_point(|&t| t < v);
            if pos == tails.len() {
                tails.push(v);
            } else {
                tails[pos] = v;
            }
            reach[i] = pos + 1;
        }
        if tails.len() < k {
            break;
        }
        let mut picked = Vec::with_capacity(k);
        let mut last: Option<f64> = None;
        for i in 0..n {
            if picked.len() == k {
                break;
            }
            let need = k - picked.len();
            if alive[i] && reach[i] >= need && last.is_none_or(|l| seq[i] > l) {
                picked.push(i);
                last = Some(seq[i]);
            }
        }
        debug_assert_eq!(picked.len(), k);
        for &i in &picked {
            alive[i] = false;
        }
        family.tuples.push(PatternWitness::new(picked));
    }
    family
}

/// Minimum number of deletions leaving a sequence with no length-`k`
/// increasing subsequence.
///
/// Equals `n` minus the largest union of `k - 1` non-increasing
/// subsequences, which by Greene's theorem is `sum_i min(lambda_i, k - 1)`
/// over the RSK shape `lambda`. Ties are standardized so that equal values
/// read as decreasing, matching strict increase.
pub fn distance_to_free(seq: &[f64], k: usize) -> usize {
    assert!(k >= 2, "distance to (12..k)-freeness needs k >= 2");
    let n = seq.len();
    let mut order: Vec<usize> = (0..n).collect();
    // equal values: later position gets the smaller rank
    order.sort_by(|&a, &b| seq[a].total_cmp(&seq[b]).then(b.cmp(&a)));
    let mut rank = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let mut rows: Vec<Vec<usize>> = Vec::new();
    for &x in &rank {
        let mut x = x;
        let mut placed = false;
        for row in rows.iter_mut() {
            let pos = row.partition_point(|&e| e < x);
            if pos == row.len() {
                row.push(x);
                placed = true;
                break;
            }
            std::mem::swap(&mut row[pos], &mut x);
        }
        if !placed {
            rows.push(vec![x]);
        }
    }
    let kept: usize = rows.iter().map(|r| r.len().min(k - 1)).sum();
    n - kept
}

/// Checks that `w` is an increasing pattern of `seq` with every index in
/// `interval` and every value in `range`.
pub fn verify_witness(
    seq: &[f64],
    w: &PatternWitness,
    interval: IndexInterval,
    range: &ValueRange,
) -> bool {
    if w.indices.is_empty() {
        return false;
    }
    let in_bounds = w
        .indices
        .iter()
        .all(|&i| i < seq.len() && interval.contains(i) && range.contains(seq[i]));
    in_bounds
        && w.indices.windows(2).all(|p| p[0] < p[1] && seq[p[0]] < seq[p[1]])
}
