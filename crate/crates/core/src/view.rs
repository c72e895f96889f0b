//! Query access to a sequence through an index interval and a value range.
//!
//! A [`SequenceView`] never rewrites values: positions whose value falls
//! outside the view's [`ValueRange`] read back as [`MaskedValue::Masked`].
//! Restricting a view is O(1) and yields a child whose queries are also
//! tallied by every ancestor, so one number per top-level invocation
//! captures the whole recursion tree.

use std::cell::{Cell, RefCell};
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error("index {index} outside view interval {interval}")]
    IndexOutsideInterval { index: usize, interval: IndexInterval },
    #[error("restriction is empty")]
    EmptyRestriction,
    #[error("interval {inner} is not contained in {outer}")]
    IntervalNotContained { inner: IndexInterval, outer: IndexInterval },
    #[error("sequence is empty")]
    EmptySequence,
    #[error("value at index {0} is NaN")]
    NotANumber(usize),
}

/// Result of reading one position through a view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaskedValue {
    Value(f64),
    Masked,
}

impl MaskedValue {
    pub fn value(self) -> Option<f64> {
        match self {
            MaskedValue::Value(v) => Some(v),
            MaskedValue::Masked => None,
        }
    }

    pub fn is_masked(self) -> bool {
        matches!(self, MaskedValue::Masked)
    }
}

/// Closed index interval `[lo, hi]`, never empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexInterval {
    pub lo: usize,
    pub hi: usize,
}

impl IndexInterval {
    pub fn new(lo: usize, hi: usize) -> Result<Self, ViewError> {
        if lo > hi {
            return Err(ViewError::EmptyRestriction);
        }
        Ok(IndexInterval { lo, hi })
    }

    /// Interval covering a sequence of length `len`.
    pub fn full(len: usize) -> Result<Self, ViewError> {
        if len == 0 {
            return Err(ViewError::EmptySequence);
        }
        Ok(IndexInterval { lo: 0, hi: len - 1 })
    }

    /// `[lo, hi]` (signed, possibly out of bounds) intersected with `within`;
    /// `None` when the intersection is empty.
    pub fn clipped(lo: i64, hi: i64, within: IndexInterval) -> Option<Self> {
        let lo = lo.max(within.lo as i64);
        let hi = hi.min(within.hi as i64);
        (lo <= hi).then_some(IndexInterval { lo: lo as usize, hi: hi as usize })
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn is_subset_of(&self, other: &IndexInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl fmt::Display for IndexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// One end of a [`ValueRange`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub inclusive: bool,
}

/// A (possibly unbounded) interval of values. `None` means unbounded on that side.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ValueRange {
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
}

impl ValueRange {
    pub fn full() -> Self {
        ValueRange::default()
    }

    /// `[v, +inf)`.
    pub fn at_least(v: f64) -> Self {
        ValueRange { lower: Some(Bound { value: v, inclusive: true }), upper: None }
    }

    /// `(-inf, v)`.
    pub fn below(v: f64) -> Self {
        ValueRange { lower: None, upper: Some(Bound { value: v, inclusive: false }) }
    }

    /// `[lo, hi)`.
    pub fn between(lo: f64, hi: f64) -> Self {
        ValueRange {
            lower: Some(Bound { value: lo, inclusive: true }),
            upper: Some(Bound { value: hi, inclusive: false }),
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        let above = match self.lower {
            None => true,
            Some(b) if b.inclusive => v >= b.value,
            Some(b) => v > b.value,
        };
        let under = match self.upper {
            None => true,
            Some(b) if b.inclusive => v <= b.value,
            Some(b) => v < b.value,
        };
        above && under
    }

    pub fn is_empty(&self) -> bool {
        match (self.lower, self.upper) {
            (Some(l), Some(u)) => {
                l.value > u.value || (l.value == u.value && !(l.inclusive && u.inclusive))
            }
            _ => false,
        }
    }

    /// Intersection of two ranges; `None` when it is empty.
    pub fn intersect(&self, other: &ValueRange) -> Option<ValueRange> {
        let lower = match (self.lower, other.lower) {
            (None, b) | (b, None) => b,
            (Some(a), Some(b)) => Some(if a.value > b.value {
                a
            } else if b.value > a.value {
                b
            } else {
                Bound { value: a.value, inclusive: a.inclusive && b.inclusive }
            }),
        };
        let upper = match (self.upper, other.upper) {
            (None, b) | (b, None) => b,
            (Some(a), Some(b)) => Some(if a.value < b.value {
                a
            } else if b.value < a.value {
                b
            } else {
                Bound { value: a.value, inclusive: a.inclusive && b.inclusive }
            }),
        };
        let r = ValueRange { lower, upper };
        (!r.is_empty()).then_some(r)
    }
}

#[derive(Debug)]
struct Tally {
    count: Cell<u64>,
    parent: Option<Rc<Tally>>,
}

impl Tally {
    fn bump(&self) {
        let mut node = Some(self);
        while let Some(t) = node {
            t.count.set(t.count.get() + 1);
            node = t.parent.as_deref();
        }
    }
}

/// Shared log of every queried index, in order. Used to audit the tallies.
pub type QueryTrace = Rc<RefCell<Vec<usize>>>;

/// Read-only, counted access to `base` restricted to an interval and a value range.
///
/// Views are single-threaded (`!Send`); independent trials build independent
/// view trees over the same `&[f64]`.
#[derive(Debug)]
pub struct SequenceView<'a> {
    base: &'a [f64],
    interval: IndexInterval,
    range: ValueRange,
    tally: Rc<Tally>,
    trace: Option<QueryTrace>,
}

impl<'a> SequenceView<'a> {
    /// View over the whole of `base` with an unbounded value range.
    pub fn new(base: &'a [f64]) -> Result<Self, ViewError> {
        let interval = IndexInterval::full(base.len())?;
        if let Some(i) = base.iter().position(|v| v.is_nan()) {
            return Err(ViewError::NotANumber(i));
        }
        Ok(SequenceView {
            base,
            interval,
            range: ValueRange::full(),
            tally: Rc::new(Tally { count: Cell::new(0), parent: None }),
            trace: None,
        })
    }

    /// Top-level view that additionally records every query into `trace`.
    pub fn with_trace(base: &'a [f64], trace: QueryTrace) -> Result<Self, ViewError> {
        let mut view = Self::new(base)?;
        view.trace = Some(trace);
        Ok(view)
    }

    pub fn base(&self) -> &'a [f64] {
        self.base
    }

    pub fn interval(&self) -> IndexInterval {
        self.interval
    }

    pub fn range(&self) -> ValueRange {
        self.range
    }

    pub fn len(&self) -> usize {
        self.interval.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn query(&self, i: usize) -> Result<MaskedValue, ViewError> {
        if !self.interval.contains(i) {
            return Err(ViewError::IndexOutsideInterval { index: i, interval: self.interval });
        }
        self.tally.bump();
        if let Some(trace) = &self.trace {
            trace.borrow_mut().push(i);
        }
        let v = self.base[i];
        Ok(if self.range.contains(v) { MaskedValue::Value(v) } else { MaskedValue::Masked })
    }

    /// Child view over `interval` with the range narrowed by `range`.
    /// The child starts its own count at zero; its queries also count here.
    pub fn restrict(
        &self,
        interval: IndexInterval,
        range: &ValueRange,
    ) -> Result<SequenceView<'a>, ViewError> {
        if !interval.is_subset_of(&self.interval) {
            return Err(ViewError::IntervalNotContained { inner: interval, outer: self.interval });
        }
        let range = self.range.intersect(range).ok_or(ViewError::EmptyRestriction)?;
        Ok(SequenceView {
            base: self.base,
            interval,
            range,
            tally: Rc::new(Tally { count: Cell::new(0), parent: Some(Rc::clone(&self.tally)) }),
            trace: self.trace.clone(),
        })
    }

    /// Queries issued through this view and every view derived from it.
    pub fn query_count(&self) -> u64 {
        self.tally.count.get()
    }
}
