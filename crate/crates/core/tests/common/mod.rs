//! Independent reference implementations shared by the integration tests.
//!
//! Everything here is deliberately naive: direct summation instead of prefix
//! sums, exhaustive enumeration instead of dynamic programming, grids instead
//! of closed forms.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use shapemine::learner::{Dfa, DfaState};
use shapemine::lse::Constraint;
use shapemine::matcher::WitnessSegment;
use shapemine::regexgen::Regex;
use shapemine::{load_traces, Interval, LineAtom, Lse, Signal, TraceFormat};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fish() -> Vec<Signal> {
    load_traces(&fixture("fish_class1.tsv"), TraceFormat::UcrTsv, 1.0).expect("fish fixture")
}

/// Class-1 Wine training traces, if a copy is available locally.
///
/// Looked up in `$SHAPEMINE_WINE`, then `tests/fixtures/Wine_TRAIN.tsv`.
pub fn wine() -> Option<Vec<Signal>> {
    let path = std::env::var_os("SHAPEMINE_WINE")
        .map(PathBuf::from)
        .unwrap_or_else(|| fixture("Wine_TRAIN.tsv"));
    if !path.exists() {
        return None;
    }
    let all = load_traces(&path, TraceFormat::UcrTsv, 1.0).expect("readable Wine file");
    Some(
        all.into_iter()
            .filter(|s| s.label().map(|l| l.parse::<f64>().ok() == Some(1.0)).unwrap_or(false))
            .collect(),
    )
}

/// Strictly increasing times with random gaps and values in `[-scale, scale]`.
pub fn random_signal(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Signal {
    let mut t = rng.gen_range(-5.0..5.0);
    let mut times = Vec::with_capacity(n);
    for _ in 0..n {
        times.push(t);
        t += rng.gen_range(0.2..2.0);
    }
    let values = (0..n).map(|_| rng.gen_range(-scale..scale)).collect();
    Signal::new("random", times, values).unwrap()
}

/// Least-squares line through `(t - t0, v)` by direct two-pass summation:
/// `(slope, value at t0, mse)`.
pub fn direct_fit(t: &[f64], v: &[f64], t0: f64) -> (f64, f64, f64) {
    let n = t.len() as f64;
    if t.len() == 1 {
        return (0.0, v[0], 0.0);
    }
    let tm = t.iter().map(|x| x - t0).sum::<f64>() / n;
    let vm = v.iter().sum::<f64>() / n;
    let mut stt = 0.0;
    let mut stv = 0.0;
    for (x, y) in t.iter().zip(v) {
        stt += (x - t0 - tm).powi(2);
        stv += (x - t0 - tm) * (y - vm);
    }
    let a = stv / stt;
    let b = vm - a * tm;
    (a, b, direct_mse(t, v, t0, a, b))
}

pub fn direct_mse(t: &[f64], v: &[f64], t0: f64, a: f64, b: f64) -> f64 {
    let sse: f64 = t
        .iter()
        .zip(v)
        .map(|(x, y)| (a * (x - t0) + b - y).powi(2))
        .sum();
    sse / t.len() as f64
}

pub fn segment_mse(s: &Signal, i: usize, j: usize) -> f64 {
    let t = &s.times()[i..=j];
    direct_fit(t, &s.values()[i..=j], t[0]).2
}

/// Every way to choose `0 = c_0 < c_1 < … < c_m = n - 1`, as cut lists.
pub fn all_cut_lists(n: usize) -> Vec<Vec<usize>> {
    let interior = n.saturating_sub(2);
    (0u32..1 << interior)
        .map(|mask| {
            let mut cuts = vec![0];
            cuts.extend((0..interior).filter(|k| mask >> k & 1 == 1).map(|k| k + 1));
            cuts.push(n - 1);
            cuts
        })
        .collect()
}

/// Exhaustive minimum segment count with every segment MSE at most `eps`.
pub fn brute_min_count(s: &Signal, eps: f64) -> usize {
    all_cut_lists(s.len())
        .into_iter()
        .filter(|cuts| cuts.windows(2).all(|w| segment_mse(s, w[0], w[1]) <= eps))
        .map(|cuts| cuts.len() - 1)
        .min()
        .expect("two-sample segments always fit")
}

/// Exhaustive minimum over `m`-segment splits of the largest segment MSE.
pub fn brute_min_max(s: &Signal, m: usize) -> f64 {
    all_cut_lists(s.len())
        .into_iter()
        .filter(|cuts| cuts.len() == m + 1)
        .map(|cuts| {
            cuts.windows(2)
                .map(|w| segment_mse(s, w[0], w[1]))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Bit set of end positions reachable after reading `r` from any start in
/// `starts`; bit `i` means "consumed `word[..i]`".
pub fn ends<S: PartialEq>(r: &Regex<S>, word: &[S], starts: u32) -> u32 {
    match r {
        Regex::Empty => 0,
        Regex::Epsilon => starts,
        Regex::Symbol(x) => (0..word.len())
            .filter(|&i| starts >> i & 1 == 1 && word[i] == *x)
            .fold(0, |acc, i| acc | 1 << (i + 1)),
        Regex::Union(l, r) => ends(l, word, starts) | ends(r, word, starts),
        Regex::Concat(l, r) => ends(r, word, ends(l, word, starts)),
        Regex::Star(e) => {
            let mut reach = starts;
            loop {
                let next = reach | ends(e, word, reach);
                if next == reach {
                    return reach;
                }
                reach = next;
            }
        }
    }
}

pub fn regex_accepts<S: PartialEq>(r: &Regex<S>, word: &[S]) -> bool {
    assert!(word.len() < 31);
    ends(r, word, 1) >> word.len() & 1 == 1
}

/// All words over `letters` symbols of length at most `max_len`.
pub fn all_words(letters: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for x in 0..letters {
                let mut w2: Vec<usize> = w.clone();
                w2.push(x);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Random partial DFA; every transition is present with probability 2/3.
pub fn random_dfa(rng: &mut ChaCha8Rng, states: usize, letters: usize) -> Dfa {
    let states = (0..states)
        .map(|_| DfaState {
            accepting: rng.gen_bool(0.4),
            transitions: (0..letters)
                .filter(|_| rng.gen_bool(2.0 / 3.0))
                .collect::<Vec<_>>()
                .into_iter()
                .map(|x| (x, rng.gen_range(0..states)))
                .collect::<BTreeMap<_, _>>(),
        })
        .collect();
    Dfa { initial: 0, states }
}

/// Random non-empty word set over `letters` symbols.
pub fn random_words(rng: &mut ChaCha8Rng, letters: usize) -> Vec<Vec<usize>> {
    let count = rng.gen_range(1..=8);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=6);
            (0..len).map(|_| rng.gen_range(0..letters)).collect()
        })
        .collect()
}

/// Minimum of the MSE of `a·(t - t0) + b` over a finite box, by a dense grid
/// refined around the best node until the cell is below `1e-9` of the box.
pub fn grid_fit(t: &[f64], v: &[f64], a_box: (f64, f64), b_box: (f64, f64)) -> f64 {
    const NODES: usize = 101;
    let t0 = t[0];
    let (mut alo, mut ahi) = a_box;
    let (mut blo, mut bhi) = b_box;
    let mut best = f64::INFINITY;
    let mut arg = (alo, blo);
    for _ in 0..40 {
        let da = (ahi - alo) / (NODES - 1) as f64;
        let db = (bhi - blo) / (NODES - 1) as f64;
        for p in 0..NODES {
            for q in 0..NODES {
                let a = alo + da * p as f64;
                let b = blo + db * q as f64;
                let m = direct_mse(t, v, t0, a, b);
                if m < best {
                    best = m;
                    arg = (a, b);
                }
            }
        }
        if da <= 1e-9 * (a_box.1 - a_box.0) && db <= 1e-9 * (b_box.1 - b_box.0) {
            break;
        }
        // zoom on the 4×4 cells around the best node, staying in the box
        alo = (arg.0 - 4.0 * da).max(a_box.0);
        ahi = (arg.0 + 4.0 * da).min(a_box.1);
        blo = (arg.1 - 4.0 * db).max(b_box.0);
        bhi = (arg.1 + 4.0 * db).min(b_box.1);
    }
    best
}

/// Optimal k-means WCSS by enumerating every assignment into `k` labels.
pub fn brute_kmeans(points: &[[f64; 3]], k: usize) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    let mut labels = vec![0usize; n];
    loop {
        let mut sum = vec![[0.0; 3]; k];
        let mut count = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            count[l] += 1;
            for c in 0..3 {
                sum[l][c] += p[c];
            }
        }
        let wcss: f64 = points
            .iter()
            .zip(&labels)
            .map(|(p, &l)| {
                (0..3)
                    .map(|c| (p[c] - sum[l][c] / count[l] as f64).powi(2))
                    .sum::<f64>()
            })
            .sum();
        best = best.min(wcss);
        // next assignment in base k
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            labels[pos] += 1;
            if labels[pos] < k {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
    }
}

/// A randomized matching problem.
#[derive(Debug, Clone)]
pub struct MatchCase {
    pub signal: Signal,
    pub lse: Lse,
    pub nu: f64,
}

fn random_shape(rng: &mut ChaCha8Rng, atoms: &[LineAtom], depth: u32) -> Regex<LineAtom> {
    if depth == 0 || rng.gen_bool(0.35) {
        return Regex::Symbol(atoms[rng.gen_range(0..atoms.len())].clone());
    }
    let l = random_shape(rng, atoms, depth - 1);
    match rng.gen_range(0..5) {
        0 => l.union(random_shape(rng, atoms, depth - 1)),
        1 => l.star(),
        _ => l.concat(random_shape(rng, atoms, depth - 1)),
    }
}

fn random_interval(rng: &mut ChaCha8Rng, center: f64, spread: f64) -> Interval {
    let c = center + rng.gen_range(-spread..spread);
    let w = if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.0..spread) };
    Interval::new(c - w, c + w)
}

/// Random expression over up to three atoms and a piecewise-linear noisy
/// signal drawn from the same parameter ranges, so both outcomes occur.
///
/// With `positive_durations` every atom's duration is bounded away from 0.
pub fn random_match_case(
    rng: &mut ChaCha8Rng,
    max_len: usize,
    positive_durations: bool,
) -> MatchCase {
    let k = rng.gen_range(1..=3);
    let atoms: Vec<LineAtom> = (0..k)
        .map(|i| LineAtom {
            a: format!("a{i}"),
            b: format!("b{i}"),
            d: format!("d{i}"),
        })
        .collect();
    let shape = random_shape(rng, &atoms, 3);
    let mut constraints = Vec::new();
    for atom in &atoms {
        if rng.gen_bool(0.8) {
            constraints.push(Constraint {
                param: atom.a.clone(),
                interval: random_interval(rng, 0.0, 1.5),
            });
        }
        if rng.gen_bool(0.6) {
            constraints.push(Constraint {
                param: atom.b.clone(),
                interval: random_interval(rng, 0.0, 2.0),
            });
        }
        if positive_durations || rng.gen_bool(0.5) {
            let lo = if positive_durations {
                rng.gen_range(0.1..2.0)
            } else {
                rng.gen_range(0.0..2.0)
            };
            let hi = if rng.gen_bool(0.3) {
                f64::INFINITY
            } else {
                lo + rng.gen_range(0.0..12.0)
            };
            constraints.push(Constraint {
                param: atom.d.clone(),
                interval: Interval::new(lo, hi),
            });
        }
    }

    let n = rng.gen_range(2..=max_len);
    let uniform = rng.gen_bool(0.5);
    let mut times = Vec::with_capacity(n);
    let mut t = 0.0;
    for _ in 0..n {
        times.push(t);
        t += if uniform { 1.0 } else { rng.gen_range(0.2..2.0) };
    }
    let noise = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..0.4) };
    let mut values = Vec::with_capacity(n);
    let mut level = rng.gen_range(-2.0..2.0);
    let mut slope = rng.gen_range(-1.5..1.5);
    for i in 0..n {
        if i > 0 {
            if rng.gen_bool(0.25) {
                slope = rng.gen_range(-1.5..1.5);
            }
            level += slope * (times[i] - times[i - 1]);
        }
        values.push(level + rng.gen_range(-1.0..=1.0) * noise);
    }
    MatchCase {
        signal: Signal::new("case", times, values).unwrap(),
        lse: Lse { shape, constraints },
        nu: if rng.gen_bool(0.7) {
            rng.gen_range(0.0..0.3)
        } else {
            rng.gen_range(0.3..3.0)
        },
    }
}

/// Independently re-checks a witness: contiguous cover with shared
/// boundaries, a word of the shape, parameters in their boxes, durations
/// equal to the segment spans and direct MSE within `nu`.
pub fn verify_witness(case: &MatchCase, witness: &[WitnessSegment]) -> Result<(), String> {
    let s = &case.signal;
    let n = s.len();
    let lse = &case.lse;
    if witness.is_empty() {
        return if n <= 1 && lse.shape.is_nullable() {
            Ok(())
        } else {
            Err("empty witness for a non-trivial signal".into())
        };
    }
    if witness[0].start != 0 || witness.last().unwrap().end != n - 1 {
        return Err("witness does not cover the signal".into());
    }
    for pair in witness.windows(2) {
        if pair[0].end != pair[1].start {
            return Err(format!("segments {:?} and {:?} do not share a sample", pair[0], pair[1]));
        }
    }
    let word: Vec<String> = witness.iter().map(|w| w.atom.clone()).collect();
    let named = lse.shape.map(&mut |a: &LineAtom| a.to_string());
    if !regex_accepts(&named, &word) {
        return Err(format!("{word:?} is not a word of the shape"));
    }
    let by_text = |text: &str| -> LineAtom {
        lse.shape
            .symbols()
            .into_iter()
            .find(|a| a.to_string() == text)
            .cloned()
            .expect("atom of the shape")
    };
    for w in witness {
        if w.start > w.end {
            return Err(format!("reversed segment {w:?}"));
        }
        let atom = by_text(&w.atom);
        let boxed = |param: &str, x: f64| {
            lse.interval(param).map(|iv| iv.contains(x)).unwrap_or(false)
        };
        let span = s.times()[w.end] - s.times()[w.start];
        if w.d != span {
            return Err(format!("duration {} differs from span {span}", w.d));
        }
        if !boxed(&atom.a, w.a) || !boxed(&atom.b, w.b) || !boxed(&atom.d, w.d) {
            return Err(format!("parameters of {w:?} leave the box"));
        }
        let t = &s.times()[w.start..=w.end];
        let v = &s.values()[w.start..=w.end];
        let mse = direct_mse(t, v, t[0], w.a, w.b);
        let scale = v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
        if mse > case.nu + 1e-9 * (1.0 + scale) {
            return Err(format!("mse {mse} of {w:?} exceeds nu = {}", case.nu));
        }
    }
    Ok(())
}

/// Smooth spectrum-like traces: a fixed sum of Gaussian bumps with per-trace
/// amplitude jitter and white noise, z-normalized per trace like the UCR data.
pub fn spectrum_like(rng: &mut ChaCha8Rng, traces: usize, len: usize) -> Vec<Signal> {
    const BUMPS: [(f64, f64, f64); 5] = [
        (0.12, 0.05, 1.0),
        (0.30, 0.08, 2.2),
        (0.48, 0.04, -0.8),
        (0.66, 0.10, 1.6),
        (0.85, 0.05, 0.9),
    ];
    (0..traces)
        .map(|k| {
            let jitter: Vec<f64> = BUMPS.iter().map(|_| rng.gen_range(0.95..1.05)).collect();
            let raw: Vec<f64> = (0..len)
                .map(|i| {
                    let x = i as f64 / (len - 1) as f64;
                    BUMPS
                        .iter()
                        .zip(&jitter)
                        .map(|((c, w, h), j)| h * j * (-((x - c) / w).powi(2) / 2.0).exp())
                        .sum::<f64>()
                        + rng.gen_range(-0.01..0.01)
                })
                .collect();
            let mean = raw.iter().sum::<f64>() / len as f64;
            let std = (raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / len as f64).sqrt();
            let values = raw.iter().map(|v| (v - mean) / std).collect();
            Signal::uniform(format!("synthetic:{k}"), values, 1.0).unwrap()
        })
        .collect()
}
