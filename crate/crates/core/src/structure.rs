//! Checkable forms of the growing-suffix and splittable-interval structures,
//! plus the exact interval robustification procedure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{verify_witness, DisjointFamily};
use crate::view::{IndexInterval, ValueRange};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("no suffix after index {start} in a sequence of length {len}")]
    DegenerateSuffix { start: usize, len: usize },
    #[error("interval mass {mass} is below alpha * |I| = {required}")]
    PreconditionMassTooLow { mass: usize, required: f64 },
    #[error("intervals must be pairwise disjoint and inside the outer interval")]
    InvalidIntervals,
}

/// Dyadic scales `S_t = [start + 2^(t-1), start + 2^t)` for `t = 1, 2, ...`,
/// clipped at `len - 1`. Together they partition `(start, len - 1]`.
pub fn suffix_scales(start: usize, len: usize) -> Result<Vec<IndexInterval>, StructureError> {
    if len == 0 || start >= len - 1 {
        return Err(StructureError::DegenerateSuffix { start, len });
    }
    Ok(scales_within(start, len - 1))
}

/// Scales after `start` up to and including `last`. Empty when `start >= last`.
pub(crate) fn scales_within(start: usize, last: usize) -> Vec<IndexInterval> {
    let mut out = Vec::new();
    let mut t = 1u32;
    loop {
        let lo = start + (1usize << (t - 1));
        if lo > last {
            break;
        }
        let hi = (start + (1usize << t) - 1).min(last);
        out.push(IndexInterval { lo, hi });
        t += 1;
    }
    out
}

/// Witness that `start` begins an `(alpha, beta)`-growing suffix.
/// `scale_sets[t - 1]` is the subset chosen from scale `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowingSuffixCert {
    pub start: usize,
    pub scale_sets: Vec<Vec<usize>>,
    pub alpha: f64,
    pub beta: f64,
}

/// Both density conditions and the cross-scale ordering condition.
/// A certificate whose sets do not match the scales of `seq` is rejected.
pub fn check_growing_suffix(seq: &[f64], cert: &GrowingSuffixCert) -> bool {
    let Ok(scales) = suffix_scales(cert.start, seq.len()) else {
        return false;
    };
    if scales.len() != cert.scale_sets.len() {
        return false;
    }
    let mut density_sum = 0.0;
    let mut prev_max = f64::NEG_INFINITY;
    for (scale, set) in scales.iter().zip(&cert.scale_sets) {
        if !set.iter().all(|&i| scale.contains(i)) {
            return false;
        }
        let mut distinct = set.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let density = distinct.len() as f64 / scale.len() as f64;
        if density > cert.alpha {
            return false;
        }
        density_sum += density;
        if distinct.is_empty() {
            continue;
        }
        let (lo, hi) = distinct.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            (lo.min(seq[i]), hi.max(seq[i]))
        });
        // every earlier-scale value must be below every value here
        if prev_max >= lo {
            return false;
        }
        prev_max = prev_max.max(hi);
    }
    density_sum >= cert.beta
}

/// An interval-tuple pair claimed to be `(split, alpha, beta)`-splittable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittableCert {
    pub interval: IndexInterval,
    pub tuples: DisjointFamily,
    pub split: usize,
    pub left: IndexInterval,
    pub middle: IndexInterval,
    pub right: IndexInterval,
    pub alpha: f64,
    pub beta: f64,
}

pub fn check_splittable(seq: &[f64], cert: &SplittableCert) -> bool {
    let i = cert.interval;
    let Some(k) = cert.tuples.tuples.first().map(|w| w.len()) else {
        // no tuples: only the density clause can fail
        return partition_ok(cert) && 0.0 >= cert.beta;
    };
    let c = cert.split;
    if c == 0 || c >= k || !partition_ok(cert) || !cert.tuples.is_valid(seq, k) {
        return false;
    }
    let all_inside = cert
        .tuples
        .tuples
        .iter()
        .all(|w| verify_witness(seq, w, i, &ValueRange::full()));
    if !all_inside {
        return false;
    }
    if (cert.tuples.len() as f64 / i.len() as f64) < cert.beta {
        return false;
    }
    let mut prefix_top = f64::NEG_INFINITY;
    let mut suffix_bottom = f64::INFINITY;
    for w in &cert.tuples.tuples {
        let (pre, suf) = w.indices.split_at(c);
        if !pre.iter().all(|&x| cert.left.contains(x)) || !suf.iter().all(|&x| cert.right.contains(x)) {
            return false;
        }
        prefix_top = prefix_top.max(seq[pre[c - 1]]);
        suffix_bottom = suffix_bottom.min(seq[suf[0]]);
    }
    prefix_top < suffix_bottom
}

fn partition_ok(cert: &SplittableCert) -> bool {
    let (i, l, m, r) = (cert.interval, cert.left, cert.middle, cert.right);
    let adjacent = l.lo == i.lo && l.hi + 1 == m.lo && m.hi + 1 == r.lo && r.hi == i.hi;
    let min_size = cert.alpha * i.len() as f64;
    adjacent && [l, m, r].iter().all(|p| p.len() as f64 >= min_size)
}

/// Sorted, disjoint intervals with prefix sums of their lengths, for
/// O(log s) "mass contained in J" lookups.
struct IntervalMass {
    sorted: Vec<IndexInterval>,
    prefix: Vec<usize>,
}

impl IntervalMass {
    fn new(outer: IndexInterval, intervals: &[IndexInterval]) -> Result<Self, StructureError> {
        let mut sorted = intervals.to_vec();
        sorted.sort_by_key(|iv| iv.lo);
        let disjoint = sorted.windows(2).all(|p| p[0].hi < p[1].lo);
        if !disjoint || !sorted.iter().all(|iv| iv.is_subset_of(&outer)) {
            return Err(StructureError::InvalidIntervals);
        }
        let mut prefix = vec![0];
        for iv in &sorted {
            prefix.push(prefix.last().unwrap() + iv.len());
        }
        Ok(IntervalMass { sorted, prefix })
    }

    fn total(&self) -> usize {
        *self.prefix.last().unwrap()
    }

    /// Total length of the intervals lying entirely inside `[a, b]`.
    fn inside(&self, a: usize, b: usize) -> usize {
        let first = self.sorted.partition_point(|iv| iv.lo < a);
        let end = self.sorted.partition_point(|iv| iv.hi <= b);
        if end > first {
            self.prefix[end] - self.prefix[first]
        } else {
            0
        }
    }
}

/// Some `J` with `intervals[h] ⊆ J ⊆ outer` whose contained mass is below
/// `(alpha / 4) |J|`, scanning `J = [a, b]` by ascending `a` then `b`.
pub fn find_bad_witness(
    outer: IndexInterval,
    intervals: &[IndexInterval],
    h: usize,
    alpha: f64,
) -> Result<Option<IndexInterval>, StructureError> {
    let mass = IntervalMass::new(outer, intervals)?;
    let target = *intervals.get(h).ok_or(StructureError::InvalidIntervals)?;
    Ok(bad_witness_with(outer, &mass, target, alpha / 4.0))
}

fn bad_witness_with(
    outer: IndexInterval,
    mass: &IntervalMass,
    target: IndexInterval,
    threshold: f64,
) -> Option<IndexInterval> {
    for a in outer.lo..=target.lo {
        for b in target.hi..=outer.hi {
            let len = (b - a + 1) as f64;
            if (mass.inside(a, b) as f64) < threshold * len {
                return Some(IndexInterval { lo: a, hi: b });
            }
        }
    }
    None
}

/// Indices `h` of every interval with no bad containing `J`.
///
/// Requires `sum |I_h| >= alpha |outer|`; the returned set then carries
/// mass at least `(alpha / 4) |outer|`.
pub fn robustify_intervals(
    outer: IndexInterval,
    intervals: &[IndexInterval],
    alpha: f64,
) -> Result<Vec<usize>, StructureError> {
    robustify_with_threshold(outer, intervals, alpha, alpha / 4.0)
}

pub(crate) fn robustify_with_threshold(
    outer: IndexInterval,
    intervals: &[IndexInterval],
    alpha: f64,
    threshold: f64,
) -> Result<Vec<usize>, StructureError> {
    let mass = IntervalMass::new(outer, intervals)?;
    let required = alpha * outer.len() as f64;
    if (mass.total() as f64) < required {
        return Err(StructureError::PreconditionMassTooLow { mass: mass.total(), required });
    }
    Ok((0..intervals.len())
        .filter(|&h| bad_witness_with(outer, &mass, intervals[h], threshold).is_none())
        .collect())
}
