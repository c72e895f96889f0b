//! Worst-case query counts obtained by running every loop of the search to
//! its bound. The only length-dependent factor is the number of scales, so
//! for fixed parameters the result grows like `log2(len)`.

use std::collections::HashMap;

use super::search::scale_count;
use super::AlgorithmConstants;

#[derive(Hash, PartialEq, Eq)]
enum Node {
    Monotone,
    Within,
    Split(usize),
}

/// Memoized bounds for views of one length.
pub(crate) struct Bounds<'c> {
    consts: &'c AlgorithmConstants,
    len: usize,
    memo: HashMap<(Node, usize, u64, u64), f64>,
}

impl<'c> Bounds<'c> {
    pub(crate) fn new(consts: &'c AlgorithmConstants, len: usize) -> Self {
        Bounds { consts, len, memo: HashMap::new() }
    }

    fn cached(&mut self, node: Node, k: usize, eps: f64, delta: f64, f: impl FnOnce(&mut Self) -> f64) -> f64 {
        let key = (node, k, eps.to_bits(), delta.to_bits());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = f(self);
        self.memo.insert(key, v);
        v
    }

    fn suffix(&self, eps: f64, delta: f64) -> f64 {
        let c = self.consts;
        let scales = scale_count(self.len) as f64;
        (0..c.suffix_guesses(eps))
            .map(|j| {
                let alpha_hat = 0.5f64.powi(j as i32);
                let per_start =
                    1.0 + (c.suffix_points_per_scale(alpha_hat) as f64 * scales).min(self.len as f64);
                c.suffix_starts(eps, delta, alpha_hat) as f64 * per_start
            })
            .sum()
    }

    pub(crate) fn monotone(&mut self, k: usize, eps: f64, delta: f64) -> f64 {
        if self.len <= self.consts.exact_scan_below {
            return self.len as f64;
        }
        self.cached(Node::Monotone, k, eps, delta, |b| {
            let c = b.consts;
            let p = c.p(k, eps);
            let scales = scale_count(b.len);
            let mut per_iter = 1.0 + scales as f64;
            if k >= 3 {
                let spacing = c.spacing(k, eps);
                let span = (3.0 * k as f64 * spacing.log2()).ceil().max(0.0) as u32;
                let fits = (span.min(scales) + 1) as f64;
                let split_eps = c.split_eps(k, eps);
                per_iter += b.within(k, eps / (2.0 * p), delta / 2.0);
                let splits: f64 = (1..k).map(|c0| b.split(k, split_eps, delta / 2.0, c0, 0.25)).sum();
                per_iter += fits * splits;
            }
            let full = b.suffix(eps / p, delta) + c.main_iterations(k, eps, delta) as f64 * per_iter;
            // a smaller sub-view may be read in full instead
            full.max(c.exact_scan_below as f64)
        })
    }

    fn within(&mut self, k: usize, eps: f64, delta: f64) -> f64 {
        self.cached(Node::Within, k, eps, delta, |b| {
            let sub_delta = delta / (2.0 * k as f64);
            (1..=k.saturating_sub(2))
                .map(|kappa| {
                    b.monotone(kappa + 1, eps / 2.0, sub_delta) + b.monotone(k - kappa, eps / 2.0, sub_delta)
                })
                .sum()
        })
    }

    pub(crate) fn split(&mut self, k: usize, eps: f64, delta: f64, c: usize, xi: f64) -> f64 {
        if self.len <= self.consts.exact_scan_below {
            return self.len as f64;
        }
        self.cached(Node::Split(c), k, eps, delta, |b| {
            let sub = eps * xi / 3.0;
            let per = 1.0 + b.monotone(c, sub, delta / 3.0) + b.monotone(k - c, sub, delta / 3.0);
            let full = b.consts.split_iterations(k, eps, delta, xi) as f64 * per;
            full.max(b.consts.exact_scan_below as f64)
        })
    }
}

/// Upper bound on the queries of one full search over a view of `len` positions.
pub fn query_budget(consts: &AlgorithmConstants, k: usize, eps: f64, delta: f64, len: usize) -> f64 {
    Bounds::new(consts, len).monotone(k, eps, delta)
}

/// Upper bound on the queries of one Sample-Suffix call.
pub fn suffix_budget(consts: &AlgorithmConstants, eps: f64, delta: f64, len: usize) -> f64 {
    Bounds::new(consts, len).suffix(eps, delta)
}

pub(crate) fn split_budget(
    consts: &AlgorithmConstants,
    k: usize,
    eps: f64,
    delta: f64,
    c: usize,
    xi: f64,
    len: usize,
) -> f64 {
    Bounds::new(consts, len).split(k, eps, delta, c, xi)
}

pub(crate) fn within_budget(consts: &AlgorithmConstants, k: usize, eps: f64, delta: f64, len: usize) -> f64 {
    Bounds::new(consts, len).within(k, eps, delta)
}
