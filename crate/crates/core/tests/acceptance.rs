//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use monofind::exact::{distance_to_free, greedy_disjoint_family, lis_length, verify_witness};
use monofind::generators::{generate, InstanceSpec, Style};
use monofind::harness::{
    estimate_success, fit_log_slope, scaling_experiment, write_jsonl, ScalingConfig, SuccessConfig, TesterParams,
};
use monofind::structure::robustify_intervals;
use monofind::tester::{find_monotone, sample_suffix, AlgorithmConstants, TrialRng};
use monofind::{IndexInterval, SequenceView, ValueRange};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const FUZZ_RUNS: usize = 10_000;
const FREE_INSTANCES_PER_K: usize = 500;
const FREE_SEEDS: u64 = 50;
const SUCCESS_TRIALS: usize = 200;
const SUCCESS_MIN_RATE: f64 = 0.85;
const SCALING_TRIALS: usize = 50;
const SCALING_MIN_R2: f64 = 0.9;
const SCALING_GROWTH_FACTOR: f64 = 2.2;
const GREEDY_SEQUENCES: usize = 1_000;
const ROBUST_FAMILIES: usize = 1_000;
const SUFFIX_TRIALS: u64 = 100;
const SUFFIX_MIN_R2: f64 = 0.9;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn fuzz_instance(rng: &mut ChaCha8Rng) -> (usize, Vec<f64>) {
    let k = rng.gen_range(1..=5);
    let n = rng.gen_range(k.max(2)..=400);
    let pick = rng.gen_range(0..8);
    let values = if pick < 6 {
        let style = Style::ALL[pick];
        let max_eps = (n / k) as f64 / n as f64;
        let eps = rng.gen_range(0.01..=max_eps.max(0.01));
        let spec = InstanceSpec { style, n, k: if style.is_free() { k.max(2) } else { k }, eps, seed: rng.gen() };
        match generate(&spec) {
            Ok(inst) => inst.values,
            Err(_) => (0..n).map(|_| rng.gen_range(0..n) as f64).collect(),
        }
    } else if pick == 6 {
        let mut v: Vec<f64> = (0..n).map(|i| i as f64).collect();
        v.shuffle(rng);
        v
    } else {
        (0..n).map(|_| rng.gen_range(0..6) as f64).collect()
    };
    (k, values)
}

fn one_sided() -> Verdict {
    let consts = AlgorithmConstants::default();
    let bad: Vec<String> = (0..FUZZ_RUNS as u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0xF0_0000 + i);
            let (k, values) = fuzz_instance(&mut rng);
            let n = values.len();
            let root = SequenceView::new(&values).unwrap();
            let (iv, range) = if rng.gen_bool(0.5) {
                let lo = rng.gen_range(0..n);
                let hi = rng.gen_range(lo..n);
                let mut ends = [rng.gen_range(-1.0..n as f64), rng.gen_range(-1.0..n as f64)];
                ends.sort_by(f64::total_cmp);
                (IndexInterval::new(lo, hi).unwrap(), ValueRange::between(ends[0], ends[1] + 1.0))
            } else {
                (root.interval(), ValueRange::full())
            };
            let view = root.restrict(iv, &range).unwrap();
            let eps = rng.gen_range(0.05..0.5);
            let delta = rng.gen_range(0.05..0.5);
            match find_monotone(&view, k, eps, delta, &consts, &mut TrialRng::seeded(rng.gen())) {
                Ok(out) => match out.witness {
                    Some(w) if w.len() != k || !verify_witness(&values, &w, iv, &range) => {
                        Some(format!("run {i}: witness {:?}", w.indices))
                    }
                    _ => None,
                },
                Err(e) => Some(format!("run {i}: {e}")),
            }
        })
        .collect();
    verdict(
        bad.is_empty(),
        format!("{FUZZ_RUNS} fuzzed runs, {} violations{}", bad.len(), bad.first().map(|b| format!(" ({b})")).unwrap_or_default()),
    )
}

fn free_soundness() -> Verdict {
    let consts = AlgorithmConstants::default();
    let mut failures = Vec::new();
    let mut runs = 0u64;
    for k in 2..=4usize {
        let found: Vec<String> = (0..FREE_INSTANCES_PER_K as u64)
            .into_par_iter()
            .flat_map_iter(|i| {
                let style = if i % 2 == 0 { Style::FreeInterleave } else { Style::FreeConcat };
                let n = 32 + (i as usize * 97) % 225;
                let inst = generate(&InstanceSpec { style, n, k, eps: 0.0, seed: 1000 * k as u64 + i }).unwrap();
                let mut bad = Vec::new();
                if lis_length(&inst.values) >= k {
                    bad.push(format!("k={k} instance {i}: not free"));
                }
                let view = SequenceView::new(&inst.values).unwrap();
                for seed in 0..FREE_SEEDS {
                    match find_monotone(&view, k, 0.1, 0.1, &consts, &mut TrialRng::seeded(seed)) {
                        Ok(out) if !out.found => {}
                        Ok(_) => bad.push(format!("k={k} instance {i} seed {seed}: Found")),
                        Err(e) => bad.push(format!("k={k} instance {i} seed {seed}: {e}")),
                    }
                }
                bad
            })
            .collect();
        runs += FREE_INSTANCES_PER_K as u64 * FREE_SEEDS;
        failures.extend(found);
    }
    verdict(
        failures.is_empty(),
        format!("{runs} runs on free instances, {} not Fail{}", failures.len(), failures.first().map(|b| format!(" ({b})")).unwrap_or_default()),
    )
}

fn success_probability() -> Verdict {
    let mut worst = (f64::INFINITY, String::new());
    let mut cells = 0;
    let mut failed = 0;
    for k in 2..=4usize {
        for style in [Style::Blocks, Style::Staircase, Style::Splittable] {
            for n in [1usize << 10, 1 << 14] {
                for eps in [0.1, 0.25] {
                    let cfg = SuccessConfig {
                        instance: InstanceSpec { style, n, k, eps, seed: 7 },
                        params: TesterParams { k, eps, delta: 0.1 },
                        trials: SUCCESS_TRIALS,
                        base_seed: 0,
                        constants: AlgorithmConstants::default(),
                    };
                    let rate = match estimate_success(&cfg) {
                        Ok(r) => r.success_rate,
                        Err(e) => {
                            println!("  k={k} {style} n={n} eps={eps}: {e}");
                            0.0
                        }
                    };
                    cells += 1;
                    if rate < SUCCESS_MIN_RATE {
                        failed += 1;
                    }
                    if rate < worst.0 {
                        worst = (rate, format!("k={k} {style} n={n} eps={eps}"));
                    }
                }
            }
        }
    }
    verdict(
        failed == 0,
        format!("{cells} cells x {SUCCESS_TRIALS} trials, {failed} below {SUCCESS_MIN_RATE}; minimum {:.3} at {}", worst.0, worst.1),
    )
}

fn query_scaling() -> Verdict {
    let cfg = ScalingConfig {
        ns: (10..=22).step_by(2).map(|e| 1usize << e).collect(),
        style: Style::Blocks,
        params: TesterParams { k: 3, eps: 0.25, delta: 1.0 / 3.0 },
        trials: SCALING_TRIALS,
        base_seed: 0,
        instance_seed: 0,
        constants: AlgorithmConstants::default(),
    };
    let report = match scaling_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let first = report.rows.first().unwrap().mean_queries;
    let last = report.rows.last().unwrap().mean_queries;
    let cap = SCALING_GROWTH_FACTOR * (22.0 / 10.0) * first;
    let means: Vec<String> = report.rows.iter().map(|r| format!("{:.1}", r.mean_queries)).collect();
    verdict(
        report.fit.r2 >= SCALING_MIN_R2 && last <= cap,
        format!(
            "means [{}], fit a={:.2} b={:.2} r2={:.4} (>= {SCALING_MIN_R2}); mean(2^22)={last:.1} <= {cap:.1}",
            means.join(", "),
            report.fit.a,
            report.fit.b,
            report.fit.r2
        ),
    )
}

/// All strictly increasing subsequences, enumerated one by one.
fn brute_lis(seq: &[f64]) -> usize {
    fn extend(seq: &[f64], last: usize, len: usize, best: &mut usize) {
        *best = (*best).max(len);
        for j in last + 1..seq.len() {
            if seq[j] > seq[last] {
                extend(seq, j, len + 1, best);
            }
        }
    }
    let mut best = 0;
    for i in 0..seq.len() {
        extend(seq, i, 1, &mut best);
    }
    best
}

/// Fewest deletions leaving no increasing subsequence of length `k`.
fn brute_distance(seq: &[f64], k: usize) -> usize {
    let n = seq.len();
    let mut keep = 0;
    let mut sub = Vec::with_capacity(n);
    for mask in 0u32..1 << n {
        let size = mask.count_ones() as usize;
        if size <= keep {
            continue;
        }
        sub.clear();
        sub.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| seq[i]));
        if brute_lis(&sub) < k {
            keep = size;
        }
    }
    n - keep
}

fn permutations(n: usize) -> Vec<Vec<f64>> {
    fn rec(cur: &mut Vec<f64>, used: &mut [bool], out: &mut Vec<Vec<f64>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v as f64);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn oracle_equivalence() -> Verdict {
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for n in 1..=8 {
        let perms = permutations(n);
        for k in 2..=3 {
            let bad: Vec<String> = perms
                .par_iter()
                .filter(|p| distance_to_free(p, k) != brute_distance(p, k))
                .map(|p| format!("distance k={k} {p:?}"))
                .collect();
            checked += perms.len();
            mismatches.extend(bad);
        }
    }
    for n in 0..=10u32 {
        let bad: Vec<String> = (0..4u64.pow(n))
            .into_par_iter()
            .filter_map(|code| {
                let seq: Vec<f64> = (0..n).map(|i| ((code >> (2 * i)) & 3) as f64).collect();
                (lis_length(&seq) != brute_lis(&seq)).then(|| format!("lis {seq:?}"))
            })
            .collect();
        checked += 4usize.pow(n);
        mismatches.extend(bad);
    }
    verdict(
        mismatches.is_empty(),
        format!("{checked} exhaustive comparisons, {} mismatches{}", mismatches.len(), mismatches.first().map(|m| format!(" ({m})")).unwrap_or_default()),
    )
}

fn greedy_bound() -> Verdict {
    let bad: Vec<String> = (0..GREEDY_SEQUENCES as u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x6A_0000 + i);
            let n = rng.gen_range(1..=64);
            let k = rng.gen_range(2..=5);
            let alphabet = if rng.gen_bool(0.5) { n } else { rng.gen_range(1..=8) };
            let seq: Vec<f64> = (0..n).map(|_| rng.gen_range(0..alphabet) as f64).collect();
            let d = distance_to_free(&seq, k);
            let fam = greedy_disjoint_family(&seq, k);
            let ok = fam.is_valid(&seq, k) && fam.len() >= d.div_ceil(k);
            (!ok).then(|| format!("seq {i}: |greedy| = {}, distance = {d}, k = {k}", fam.len()))
        })
        .collect();
    verdict(
        bad.is_empty(),
        format!("{GREEDY_SEQUENCES} sequences, {} below ceil(distance / k){}", bad.len(), bad.first().map(|b| format!(" ({b})")).unwrap_or_default()),
    )
}

/// Smallest `(contained mass) / |J|` over all `J` with `target ⊆ J ⊆ outer`.
fn min_density_around(outer: IndexInterval, ivs: &[IndexInterval], target: IndexInterval) -> f64 {
    let mut best = f64::INFINITY;
    for a in outer.lo..=target.lo {
        // intervals lying right of `a`, ordered by end
        let mut ends: Vec<(usize, usize)> = ivs.iter().filter(|iv| iv.lo >= a).map(|iv| (iv.hi, iv.len())).collect();
        ends.sort_unstable();
        let mut mass = 0;
        let mut next = 0;
        for b in target.hi..=outer.hi {
            while next < ends.len() && ends[next].0 <= b {
                mass += ends[next].1;
                next += 1;
            }
            best = best.min(mass as f64 / (b - a + 1) as f64);
        }
    }
    best
}

fn robustification() -> Verdict {
    let bad: Vec<String> = (0..ROBUST_FAMILIES as u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x80_0000 + i);
            let len = rng.gen_range(1..=200);
            let outer = IndexInterval::new(0, len - 1).unwrap();
            let mut ivs = Vec::new();
            let mut pos = rng.gen_range(0..len);
            while pos < len && ivs.len() < 40 {
                let hi = (pos + rng.gen_range(0..12)).min(len - 1);
                ivs.push(IndexInterval::new(pos, hi).unwrap());
                pos = hi + 1 + rng.gen_range(0..30);
            }
            if ivs.is_empty() {
                ivs.push(IndexInterval::new(0, 0).unwrap());
            }
            let mass: usize = ivs.iter().map(|iv| iv.len()).sum();
            let alpha = rng.gen_range(0.0..=1.0) * mass as f64 / len as f64;
            let alpha = alpha.max(1e-6);
            let g = match robustify_intervals(outer, &ivs, alpha) {
                Ok(g) => g,
                Err(e) => return Some(format!("family {i}: {e}")),
            };
            let kept: usize = g.iter().map(|&h| ivs[h].len()).sum();
            if (kept as f64) < alpha / 4.0 * len as f64 {
                return Some(format!("family {i}: kept mass {kept} < {}", alpha / 4.0 * len as f64));
            }
            for &h in &g {
                if min_density_around(outer, &ivs, ivs[h]) < alpha / 4.0 {
                    return Some(format!("family {i}: h = {h} has a bad witness"));
                }
            }
            None
        })
        .collect();
    verdict(
        bad.is_empty(),
        format!("{ROBUST_FAMILIES} families, {} violations{}", bad.len(), bad.first().map(|b| format!(" ({b})")).unwrap_or_default()),
    )
}

fn determinism() -> Verdict {
    let dump = |threads: usize| -> Vec<u8> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let mut buf = Vec::new();
            for (style, k) in [(Style::Blocks, 3), (Style::Splittable, 4), (Style::FreeInterleave, 3)] {
                let cfg = SuccessConfig {
                    instance: InstanceSpec { style, n: 3000, k, eps: 0.1, seed: 11 },
                    params: TesterParams { k, eps: 0.1, delta: 0.1 },
                    trials: 40,
                    base_seed: 500,
                    constants: AlgorithmConstants::default(),
                };
                write_jsonl(&mut buf, &estimate_success(&cfg).unwrap().records, false).unwrap();
            }
            let scaling = ScalingConfig {
                ns: vec![512, 2048, 8192],
                style: Style::Staircase,
                params: TesterParams { k: 3, eps: 0.2, delta: 0.2 },
                trials: 10,
                base_seed: 9,
                instance_seed: 3,
                constants: AlgorithmConstants::default(),
            };
            write_jsonl(&mut buf, &scaling_experiment(&scaling).unwrap().records, false).unwrap();
            buf
        })
    };
    let a = dump(1);
    let b = dump(1);
    let c = dump(4);
    verdict(
        a == b && a == c && !a.is_empty(),
        format!("{} bytes of JSON Lines compared across 3 runs (1 and 4 worker threads)", a.len()),
    )
}

fn suffix_budget_scaling() -> Verdict {
    let consts = AlgorithmConstants::default();
    let mut rows = Vec::new();
    for e in 10..=22u32 {
        let n = 1usize << e;
        let id: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let total: u64 = (0..SUFFIX_TRIALS)
            .into_par_iter()
            .map(|s| {
                let view = SequenceView::new(&id).unwrap();
                sample_suffix(&view, 3, 0.1, 0.1, &consts, &mut TrialRng::seeded(s)).unwrap().queries
            })
            .sum();
        rows.push((n, total as f64 / SUFFIX_TRIALS as f64));
    }
    match fit_log_slope(&rows) {
        Ok(fit) => verdict(
            fit.r2 >= SUFFIX_MIN_R2,
            format!(
                "mean queries {:.1} (2^10) .. {:.1} (2^22), fit a={:.2} b={:.2} r2={:.4} (>= {SUFFIX_MIN_R2})",
                rows[0].1,
                rows[rows.len() - 1].1,
                fit.a,
                fit.b,
                fit.r2
            ),
        ),
        Err(e) => verdict(false, e.to_string()),
    }
}

fn main() -> ExitCode {
    type Check = fn() -> Verdict;
    let criteria: [(&str, Check); 9] = [
        ("one-sided error", one_sided),
        ("soundness on free inputs", free_soundness),
        ("success probability", success_probability),
        ("query scaling", query_scaling),
        ("oracle equivalence", oracle_equivalence),
        ("greedy bound", greedy_bound),
        ("robustification", robustification),
        ("determinism", determinism),
        ("sample-suffix budget", suffix_budget_scaling),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.iter().any(|f| f == &id || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        all &= v.pass;
        println!(
            "{} [{id}] {name}: {} ({:.1}s)",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
