//! Deterministic instance families with certificates built alongside the
//! values: far styles carry an explicit disjoint family of increasing
//! `k`-tuples, free styles carry a cover by `k - 1` non-increasing pieces.
//!
//! All values are distinct integers stored as `f64`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{lis_length, DisjointFamily, PatternWitness};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("{needed} disjoint {k}-patterns need {} positions, only {n} available", needed * k)]
    InfeasibleDensity { needed: usize, k: usize, n: usize },
    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),
    #[error("certificate check failed: {0}")]
    CertificationFailed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Style {
    /// Runs of `k` increasing values, each run below the previous one.
    Blocks,
    /// Ascending levels of decreasing runs; patterns take one element from
    /// each of `k` consecutive runs.
    Staircase,
    /// Cells split recursively into a low left part holding pattern prefixes
    /// and a high right part holding the suffixes.
    Splittable,
    /// Increasing pattern positions spread evenly over a low decreasing background.
    Suffix,
    /// `k - 1` decreasing sequences on randomly interleaved positions.
    FreeInterleave,
    /// `k - 1` decreasing runs placed one after another.
    FreeConcat,
}

impl Style {
    pub const ALL: [Style; 6] = [
        Style::Blocks,
        Style::Staircase,
        Style::Splittable,
        Style::Suffix,
        Style::FreeInterleave,
        Style::FreeConcat,
    ];

    pub fn is_free(self) -> bool {
        matches!(self, Style::FreeInterleave | Style::FreeConcat)
    }

    pub fn name(self) -> &'static str {
        match self {
            Style::Blocks => "blocks",
            Style::Staircase => "staircase",
            Style::Splittable => "splittable",
            Style::Suffix => "suffix",
            Style::FreeInterleave => "free-interleave",
            Style::FreeConcat => "free-concat",
        }
    }
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Style {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Style::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| GenError::InvalidSpec(format!("unknown style `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub style: Style,
    pub n: usize,
    pub k: usize,
    /// Density of the certified family; ignored by free styles.
    pub eps: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Family(DisjointFamily),
    /// Index lists, each with non-increasing values, partitioning all positions.
    FreeProof(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedInstance {
    #[serde(flatten)]
    pub spec: InstanceSpec,
    #[serde(skip)]
    pub values: Vec<f64>,
    #[serde(flatten)]
    pub certificate: Certificate,
}

impl CertifiedInstance {
    /// Re-checks the certificate against the values.
    pub fn check(&self) -> Result<(), GenError> {
        let InstanceSpec { n, k, eps, .. } = self.spec;
        if self.values.len() != n {
            return Err(GenError::CertificationFailed(format!("{} values for n = {n}", self.values.len())));
        }
        match &self.certificate {
            Certificate::Family(fam) => {
                let needed = required_patterns(n, eps);
                if !fam.is_valid(&self.values, k) {
                    return Err(GenError::CertificationFailed("family is not a disjoint set of k-patterns".into()));
                }
                if fam.len() < needed {
                    return Err(GenError::CertificationFailed(format!("{} patterns, need {needed}", fam.len())));
                }
            }
            Certificate::FreeProof(pieces) => {
                if pieces.len() > k - 1 {
                    return Err(GenError::CertificationFailed(format!("{} pieces for k = {k}", pieces.len())));
                }
                let mut seen = vec![false; n];
                for piece in pieces {
                    if !piece.windows(2).all(|p| p[0] < p[1] && self.values[p[0]] >= self.values[p[1]]) {
                        return Err(GenError::CertificationFailed("piece is not non-increasing".into()));
                    }
                    for &i in piece {
                        if i >= n || std::mem::replace(&mut seen[i], true) {
                            return Err(GenError::CertificationFailed(format!("index {i} repeated or out of range")));
                        }
                    }
                }
                if !seen.iter().all(|&s| s) {
                    return Err(GenError::CertificationFailed("pieces do not cover every index".into()));
                }
                if lis_length(&self.values) >= k {
                    return Err(GenError::CertificationFailed("free instance has a k-pattern".into()));
                }
            }
        }
        Ok(())
    }
}

/// `ceil(eps * n)`, computed so that exact products such as `n / 4` are not
/// pushed up by rounding.
pub fn required_patterns(n: usize, eps: f64) -> usize {
    let x = eps * n as f64;
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// `count` items spread as evenly as possible over `slots` slots.
fn spread(count: usize, slots: usize, slot: usize) -> usize {
    (slot + 1) * count / slots - slot * count / slots
}

pub fn gen_far_instance(spec: &InstanceSpec) -> Result<CertifiedInstance, GenError> {
    let InstanceSpec { style, n, k, eps, .. } = *spec;
    if style.is_free() {
        return Err(GenError::InvalidSpec(format!("{style} is a free style")));
    }
    if k == 0 || n < k {
        return Err(GenError::InvalidSpec(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(GenError::InvalidSpec(format!("eps must lie in (0, 1], got {eps}")));
    }
    let m = required_patterns(n, eps);
    if m * k > n {
        return Err(GenError::InfeasibleDensity { needed: m, k, n });
    }
    let (values, tuples) = match style {
        Style::Blocks => blocks(n, k, m),
        Style::Staircase => staircase(n, k, m),
        Style::Splittable => splittable(n, k, m),
        Style::Suffix => suffix(n, k, m),
        Style::FreeInterleave | Style::FreeConcat => unreachable!(),
    };
    let inst = CertifiedInstance {
        spec: *spec,
        values,
        certificate: Certificate::Family(DisjointFamily {
            tuples: tuples.into_iter().map(PatternWitness::new).collect(),
        }),
    };
    inst.check()?;
    Ok(inst)
}

pub fn gen_free_instance(spec: &InstanceSpec) -> Result<CertifiedInstance, GenError> {
    let InstanceSpec { style, n, k, seed, .. } = *spec;
    if !style.is_free() {
        return Err(GenError::InvalidSpec(format!("{style} is not a free style")));
    }
    if k < 2 || n == 0 {
        return Err(GenError::InvalidSpec(format!("free instances need k >= 2 and n >= 1, got k = {k}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pieces = k - 1;
    let mut owner: Vec<usize> = match style {
        Style::FreeInterleave => (0..n).map(|_| rng.gen_range(0..pieces)).collect(),
        _ => {
            let mut cuts: Vec<usize> = (0..pieces - 1).map(|_| rng.gen_range(0..=n)).collect();
            cuts.sort_unstable();
            (0..n).map(|i| cuts.partition_point(|&c| c <= i)).collect()
        }
    };
    if pieces == 1 {
        owner.fill(0);
    }
    let mut pool: Vec<usize> = (0..n).collect();
    pool.shuffle(&mut rng);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); pieces];
    for (i, &o) in owner.iter().enumerate() {
        members[o].push(i);
    }
    let mut values = vec![0.0; n];
    let mut next = 0;
    for piece in &members {
        let mut vals: Vec<usize> = pool[next..next + piece.len()].to_vec();
        next += piece.len();
        vals.sort_unstable_by(|a, b| b.cmp(a));
        for (&i, &v) in piece.iter().zip(&vals) {
            values[i] = v as f64;
        }
    }
    members.retain(|p| !p.is_empty());
    let inst = CertifiedInstance { spec: *spec, values, certificate: Certificate::FreeProof(members) };
    inst.check()?;
    Ok(inst)
}

/// Dispatches on the style.
pub fn generate(spec: &InstanceSpec) -> Result<CertifiedInstance, GenError> {
    if spec.style.is_free() {
        gen_free_instance(spec)
    } else {
        gen_far_instance(spec)
    }
}

type Built = (Vec<f64>, Vec<Vec<usize>>);

/// Lays out units (lists of relative values) left to right, each unit's
/// values above everything in later units.
fn descending_units(units: &[Vec<usize>]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut above: usize = units.iter().map(|u| u.len()).sum();
    for unit in units {
        above -= unit.len();
        out.extend(unit.iter().map(|&v| (above + v) as f64));
    }
    out
}

fn blocks(n: usize, k: usize, m: usize) -> Built {
    let filler = n - m * k;
    let mut units = Vec::new();
    let mut tuples = Vec::with_capacity(m);
    let mut pos = 0;
    for b in 0..m {
        units.push((0..k).collect());
        tuples.push((pos..pos + k).collect());
        pos += k;
        for _ in 0..spread(filler, m, b) {
            units.push(vec![0]);
            pos += 1;
        }
    }
    (descending_units(&units), tuples)
}

fn staircase(n: usize, k: usize, m: usize) -> Built {
    // w patterns per group of k runs; w a power of two near sqrt(n)
    let mut w = 1usize << ((usize::BITS - n.leading_zeros()).saturating_sub(1) / 2);
    while w > 1 && m.div_ceil(w) * k * w > n {
        w /= 2;
    }
    let groups = m.div_ceil(w);
    let runs = groups * k;
    let mut values = Vec::with_capacity(n);
    let mut starts = Vec::with_capacity(runs);
    for r in 0..runs {
        let size = spread(n, runs, r);
        let base = values.len();
        starts.push(base);
        values.extend((0..size).map(|j| (base + size - 1 - j) as f64));
    }
    let mut tuples = Vec::with_capacity(m);
    'outer: for g in 0..groups {
        for i in 0..w {
            if tuples.len() == m {
                break 'outer;
            }
            tuples.push((0..k).map(|r| starts[g * k + r] + i).collect());
        }
    }
    (values, tuples)
}

/// One cell: `q` patterns of length `k`, plus `filler` decreasing
/// middle-band values between the halves. Returns local ranks and tuples.
fn split_cell(q: usize, k: usize, filler: usize) -> (Vec<usize>, Vec<Vec<usize>>) {
    if k == 1 {
        let ranks: Vec<usize> = (0..q + filler).rev().collect();
        return (ranks, (0..q).map(|i| vec![i]).collect());
    }
    let c = k / 2;
    let (left, lt) = split_cell(q, c, 0);
    let (right, rt) = split_cell(q, k - c, 0);
    let (l, r) = (left.len(), right.len());
    let mut ranks = left;
    ranks.extend((0..filler).rev().map(|j| l + j));
    ranks.extend(right.iter().map(|&v| l + filler + v));
    let offset = l + filler;
    let tuples = lt
        .into_iter()
        .zip(rt)
        .map(|(mut a, b)| {
            a.extend(b.into_iter().map(|i| i + offset));
            a
        })
        .collect();
    debug_assert_eq!(ranks.len(), l + filler + r);
    (ranks, tuples)
}

fn splittable(n: usize, k: usize, m: usize) -> Built {
    let half_log = (usize::BITS - n.leading_zeros()).saturating_sub(1) / 2;
    let cells = ((1usize << half_log) / 4).clamp(1, m);
    let filler = n - m * k;
    let mut units = Vec::with_capacity(cells);
    let mut tuples = Vec::with_capacity(m);
    let mut pos = 0;
    for c in 0..cells {
        let (ranks, local) = split_cell(spread(m, cells, c), k, spread(filler, cells, c));
        tuples.extend(local.into_iter().map(|t| t.into_iter().map(|i| i + pos).collect::<Vec<_>>()));
        pos += ranks.len();
        units.push(ranks);
    }
    (descending_units(&units), tuples)
}

fn suffix(n: usize, k: usize, m: usize) -> Built {
    let used = m * k;
    let filler = n - used;
    let mut values = vec![0.0; n];
    let mut pattern_pos = Vec::with_capacity(used);
    let mut filler_seen = 0;
    let mut pos = 0;
    for j in 0..used {
        pattern_pos.push(pos);
        values[pos] = (filler + j) as f64;
        pos += 1;
        for _ in 0..spread(filler, used, j) {
            values[pos] = (filler - 1 - filler_seen) as f64;
            filler_seen += 1;
            pos += 1;
        }
    }
    let tuples = pattern_pos.chunks(k).map(|c| c.to_vec()).collect();
    (values, tuples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::greedy_disjoint_family;

    fn far(style: Style, n: usize, k: usize, eps: f64) -> CertifiedInstance {
        gen_far_instance(&InstanceSpec { style, n, k, eps, seed: 1 }).unwrap()
    }

    #[test]
    fn blocks_example() {
        let inst = far(Style::Blocks, 12, 3, 1.0 / 3.0);
        assert_eq!(inst.values, [9., 10., 11., 6., 7., 8., 3., 4., 5., 0., 1., 2.]);
        let Certificate::Family(fam) = &inst.certificate else { panic!() };
        assert_eq!(fam.len(), 4);
        assert_eq!(lis_length(&inst.values), 3);
    }

    #[test]
    fn infeasible_density() {
        let e = gen_far_instance(&InstanceSpec { style: Style::Blocks, n: 10, k: 3, eps: 0.35, seed: 0 });
        assert_eq!(e.unwrap_err(), GenError::InfeasibleDensity { needed: 4, k: 3, n: 10 });
        assert!(gen_far_instance(&InstanceSpec { style: Style::FreeConcat, n: 10, k: 3, eps: 0.1, seed: 0 }).is_err());
        assert!(gen_far_instance(&InstanceSpec { style: Style::Blocks, n: 2, k: 3, eps: 0.1, seed: 0 }).is_err());
    }

    #[test]
    fn required_patterns_is_a_ceiling() {
        assert_eq!(required_patterns(1024, 0.25), 256);
        assert_eq!(required_patterns(1024, 0.1), 103);
        assert_eq!(required_patterns(12, 1.0 / 3.0), 4);
    }

    #[test]
    fn every_far_style_certifies() {
        for style in [Style::Blocks, Style::Staircase, Style::Splittable, Style::Suffix] {
            for k in 1..=5 {
                for &n in &[5usize, 17, 64, 1000, 4096] {
                    for &eps in &[0.01, 0.1, 0.2] {
                        if required_patterns(n, eps) * k > n || n < k {
                            continue;
                        }
                        let inst = far(style, n, k, eps);
                        inst.check().unwrap();
                        let Certificate::Family(fam) = &inst.certificate else { panic!() };
                        assert!(fam.len() >= required_patterns(n, eps));
                        let mut sorted = inst.values.clone();
                        sorted.sort_by(f64::total_cmp);
                        assert_eq!(sorted, (0..n).map(|v| v as f64).collect::<Vec<_>>());
                    }
                }
            }
        }
    }

    #[test]
    fn full_density_styles() {
        for style in [Style::Blocks, Style::Staircase, Style::Splittable, Style::Suffix] {
            for k in 2..=4 {
                let n = 1usize << 10;
                let inst = far(style, n, k, (n / k) as f64 / n as f64);
                inst.check().unwrap();
            }
        }
        far(Style::Splittable, 1 << 12, 4, 0.25).check().unwrap();
    }

    #[test]
    fn greedy_matches_certified_density() {
        for style in [Style::Blocks, Style::Staircase, Style::Splittable, Style::Suffix] {
            for &(n, k, eps) in &[(1usize << 12, 3usize, 0.25), (1 << 10, 2, 0.1), (1 << 11, 4, 0.2)] {
                let inst = far(style, n, k, eps);
                let greedy = greedy_disjoint_family(&inst.values, k);
                assert!(
                    greedy.len() >= required_patterns(n, eps),
                    "{style}: greedy {} < {}",
                    greedy.len(),
                    required_patterns(n, eps)
                );
            }
        }
    }

    #[test]
    fn free_styles() {
        for style in [Style::FreeInterleave, Style::FreeConcat] {
            for k in 2..=5 {
                for seed in 0..20 {
                    let n = 1 + (seed as usize * 37) % 300;
                    let inst = gen_free_instance(&InstanceSpec { style, n, k, eps: 0.0, seed }).unwrap();
                    assert!(lis_length(&inst.values) < k);
                }
            }
        }
        let d = gen_free_instance(&InstanceSpec { style: Style::FreeConcat, n: 50, k: 2, eps: 0.0, seed: 3 }).unwrap();
        assert!(d.values.windows(2).all(|w| w[0] > w[1]));
        let c = gen_free_instance(&InstanceSpec { style: Style::FreeConcat, n: 200, k: 3, eps: 0.0, seed: 9 }).unwrap();
        assert_eq!(lis_length(&c.values), 2);
        assert!(gen_free_instance(&InstanceSpec { style: Style::Blocks, n: 10, k: 3, eps: 0.1, seed: 0 }).is_err());
        assert!(gen_free_instance(&InstanceSpec { style: Style::FreeConcat, n: 10, k: 1, eps: 0.1, seed: 0 }).is_err());
    }

    #[test]
    fn deterministic() {
        for style in Style::ALL {
            let spec = InstanceSpec { style, n: 500, k: 3, eps: 0.1, seed: 42 };
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        }
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let mut inst = far(Style::Blocks, 12, 3, 1.0 / 3.0);
        inst.values.swap(0, 2);
        assert!(inst.check().is_err());
        let mut free = gen_free_instance(&InstanceSpec { style: Style::FreeInterleave, n: 30, k: 3, eps: 0.0, seed: 1 }).unwrap();
        if let Certificate::FreeProof(p) = &mut free.certificate {
            p[0].pop();
        }
        assert!(free.check().is_err());
    }

    #[test]
    fn style_names_round_trip() {
        for style in Style::ALL {
            assert_eq!(style.name().parse::<Style>().unwrap(), style);
            assert_eq!(serde_json::to_string(&style).unwrap(), format!("\"{}\"", style.name()));
        }
        assert!("zigzag".parse::<Style>().is_err());
    }
}
