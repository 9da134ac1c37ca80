//! Abstraction of line segments into a finite alphabet.
//!
//! Every segment becomes a point `(a, b, d)`. Points are z-normalized over the
//! whole population before clustering so that no single parameter dominates
//! the Euclidean distance; the bounding cubes attached to letters are always
//! reported in raw units.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lse::Interval;
use crate::segmentation::Segmentation;

pub const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePoint {
    /// Index of the trace the segment belongs to.
    pub trace: usize,
    /// Index of the segment within its trace.
    pub segment: usize,
    /// `(a, b, d)` in raw units.
    pub raw: [f64; 3],
    /// `(a, b, d)` z-normalized over the pooled population.
    pub normalized: [f64; 3],
}

/// Turns every segment of every trace into a feature point.
pub fn featurize(segmentations: &[Segmentation]) -> Result<Vec<FeaturePoint>> {
    let mut points: Vec<FeaturePoint> = segmentations
        .iter()
        .enumerate()
        .flat_map(|(trace, seg)| {
            seg.fits.iter().enumerate().map(move |(segment, fit)| FeaturePoint {
                trace,
                segment,
                raw: [fit.a, fit.b, fit.d],
                normalized: [0.0; 3],
            })
        })
        .collect();
    if points.is_empty() {
        return Err(Error::InvalidArgument("no segments to abstract".into()));
    }
    let count = points.len() as f64;
    for axis in 0..3 {
        let mean = points.iter().map(|p| p.raw[axis]).sum::<f64>() / count;
        let var = points
            .iter()
            .map(|p| (p.raw[axis] - mean).powi(2))
            .sum::<f64>()
            / count;
        let std = var.sqrt();
        for p in &mut points {
            p.normalized[axis] = if std > 0.0 {
                (p.raw[axis] - mean) / std
            } else {
                0.0
            };
        }
    }
    Ok(points)
}

fn dist2(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    (0..3).map(|k| (x[k] - y[k]).powi(2)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub assignment: Vec<usize>,
    pub centroids: Vec<[f64; 3]>,
    pub wcss: f64,
    /// WCSS after each Lloyd iteration.
    pub history: Vec<f64>,
}

/// Lloyd's algorithm with k-means++ seeding.
///
/// Stops at an assignment fixpoint or after [`MAX_ITERATIONS`] iterations.
/// Panics unless `1 <= k <= points.len()`.
pub fn kmeans(points: &[[f64; 3]], k: usize, seed: u64) -> Clustering {
    assert!(
        k >= 1 && k <= points.len(),
        "k = {k} out of range for {} points",
        points.len()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centroids = kmeanspp(points, k, &mut rng);
    lloyd(points, centroids)
}

fn kmeanspp(points: &[[f64; 3]], k: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    let mut centroids = vec![points[rng.gen_range(0..points.len())]];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = d2.iter().rposition(|&w| w > 0.0).unwrap_or(0);
            for (idx, &w) in d2.iter().enumerate() {
                if w > 0.0 && target < w {
                    pick = idx;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            rng.gen_range(0..points.len())
        };
        let c = points[next];
        for (w, p) in d2.iter_mut().zip(points) {
            *w = w.min(dist2(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn nearest(p: &[f64; 3], centroids: &[[f64; 3]]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = dist2(p, centroid);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

fn means(points: &[[f64; 3]], assignment: &[usize], k: usize) -> Vec<[f64; 3]> {
    let mut sums = vec![[0.0; 3]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assignment) {
        counts[c] += 1;
        for axis in 0..3 {
            sums[c][axis] += p[axis];
        }
    }
    sums.iter()
        .zip(&counts)
        .map(|(s, &n)| s.map(|x| x / n.max(1) as f64))
        .collect()
}

fn wcss(points: &[[f64; 3]], assignment: &[usize], centroids: &[[f64; 3]]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| dist2(p, &centroids[c]))
        .sum()
}

/// Gives every empty cluster the point farthest from its current centroid,
/// taken from a cluster that keeps at least one member.
fn repair_empty(points: &[[f64; 3]], assignment: &mut [usize], centroids: &[[f64; 3]]) {
    let k = centroids.len();
    let mut counts = vec![0usize; k];
    for &c in assignment.iter() {
        counts[c] += 1;
    }
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let victim = (0..points.len())
            .filter(|&i| counts[assignment[i]] > 1)
            .max_by(|&x, &y| {
                let dx = dist2(&points[x], &centroids[assignment[x]]);
                let dy = dist2(&points[y], &centroids[assignment[y]]);
                dx.total_cmp(&dy).then(y.cmp(&x))
            })
            .expect("k <= number of points");
        counts[assignment[victim]] -= 1;
        assignment[victim] = empty;
        counts[empty] = 1;
    }
}

fn lloyd(points: &[[f64; 3]], mut centroids: Vec<[f64; 3]>) -> Clustering {
    let k = centroids.len();
    let mut assignment: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    for _ in 0..MAX_ITERATIONS {
        let mut next: Vec<usize> = points.iter().map(|p| nearest(p, &centroids)).collect();
        repair_empty(points, &mut next, &centroids);
        let changed = next != assignment;
        assignment = next;
        centroids = means(points, &assignment, k);
        history.push(wcss(points, &assignment, &centroids));
        if !changed {
            break;
        }
    }
    Clustering {
        wcss: *history.last().expect("at least one iteration"),
        assignment,
        centroids,
        history,
    }
}

/// Result of the elbow search over `k = 1..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElbowChoice {
    pub k: usize,
    /// `wcss[k - 1]` is the WCSS of the clustering with `k` clusters.
    pub wcss: Vec<f64>,
    /// Clustering for the chosen `k`.
    pub clustering: Clustering,
}

/// Picks the number of clusters from the decrease of WCSS between
/// consecutive `k`.
///
/// The chosen `k` is the last one before the decrease `WCSS(k) - WCSS(k+1)`
/// first drops strictly below `threshold`; `k_max` if it never does. The WCSS
/// sequence is kept non-increasing: when a fresh k-means++ run for `k` ends
/// worse than the solution for `k - 1`, Lloyd is restarted from that solution
/// plus its worst-fitted point as a new centroid.
pub fn choose_k(points: &[[f64; 3]], threshold: f64, k_max: usize, seed: u64) -> ElbowChoice {
    assert!(
        k_max >= 1 && k_max <= points.len(),
        "k_max = {k_max} out of range for {} points",
        points.len()
    );
    let mut runs: Vec<Clustering> = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut run = kmeans(points, k, seed);
        if let Some(prev) = runs.last() {
            if run.wcss > prev.wcss {
                let warm = lloyd(points, split_worst(points, prev));
                if warm.wcss < run.wcss {
                    run = warm;
                }
            }
        }
        runs.push(run);
    }
    let wcss: Vec<f64> = runs.iter().map(|r| r.wcss).collect();
    let k = (2..=k_max)
        .find(|&k| wcss[k - 2] - wcss[k - 1] < threshold)
        .map_or(k_max, |k| k - 1);
    ElbowChoice {
        k,
        wcss,
        clustering: runs.swap_remove(k - 1),
    }
}

fn split_worst(points: &[[f64; 3]], run: &Clustering) -> Vec<[f64; 3]> {
    let worst = (0..points.len())
        .max_by(|&x, &y| {
            let dx = dist2(&points[x], &run.centroids[run.assignment[x]]);
            let dy = dist2(&points[y], &run.centroids[run.assignment[y]]);
            dx.total_cmp(&dy).then(y.cmp(&x))
        })
        .expect("non-empty point set");
    let mut centroids = run.centroids.clone();
    centroids.push(points[worst]);
    centroids
}

/// Axis-aligned bounding box over `(a, b, d)` in raw units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub a: Interval,
    pub b: Interval,
    pub d: Interval,
}

impl Cube {
    pub fn contains(&self, raw: &[f64; 3]) -> bool {
        self.a.contains(raw[0]) && self.b.contains(raw[1]) && self.d.contains(raw[2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Letter {
    pub name: String,
    pub cube: Cube,
    pub members: usize,
}

/// One trace spelled over the alphabet; letters are indices into it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    pub trace: String,
    pub letters: Vec<usize>,
}

/// Letter names `A`, `B`, …, `Z`, `AA`, `AB`, …
pub fn letter_name(index: usize) -> String {
    let mut name = Vec::new();
    let mut i = index + 1;
    while i > 0 {
        i -= 1;
        name.push(b'A' + (i % 26) as u8);
        i /= 26;
    }
    name.reverse();
    String::from_utf8(name).expect("ascii")
}

/// Builds letters and words from a clustering of `points`.
///
/// Clusters are renamed in order of first appearance, scanning traces in
/// order and segments left to right. `trace_ids[t]` names trace `t`.
pub fn build_alphabet(
    points: &[FeaturePoint],
    assignment: &[usize],
    trace_ids: &[String],
) -> (Vec<Letter>, Vec<Word>) {
    assert_eq!(points.len(), assignment.len(), "assignment must cover every point");
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by_key(|&i| (points[i].trace, points[i].segment));

    let mut rename: Vec<Option<usize>> = Vec::new();
    let mut letters: Vec<Letter> = Vec::new();
    let mut words: Vec<Word> = trace_ids
        .iter()
        .map(|id| Word {
            trace: id.clone(),
            letters: Vec::new(),
        })
        .collect();
    for &i in &order {
        let p = &points[i];
        let cluster = assignment[i];
        if rename.len() <= cluster {
            rename.resize(cluster + 1, None);
        }
        let letter = *rename[cluster].get_or_insert_with(|| {
            letters.push(Letter {
                name: letter_name(letters.len()),
                cube: Cube {
                    a: Interval::point(p.raw[0]),
                    b: Interval::point(p.raw[1]),
                    d: Interval::point(p.raw[2]),
                },
                members: 0,
            });
            letters.len() - 1
        });
        let entry = &mut letters[letter];
        entry.members += 1;
        entry.cube.a = entry.cube.a.hull(p.raw[0]);
        entry.cube.b = entry.cube.b.hull(p.raw[1]);
        entry.cube.d = entry.cube.d.hull(p.raw[2]);
        words[p.trace].letters.push(letter);
    }
    (letters, words)
}
