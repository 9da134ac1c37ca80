//! Optimal piecewise-linear approximation of a signal.
//!
//! Consecutive segments share their boundary sample: segment `k` covers
//! samples `cuts[k]..=cuts[k + 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{linefit, LineFit, PrefixSums};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    /// Boundary sample indices, starting at 0 and ending at the last sample.
    pub cuts: Vec<usize>,
    /// One fit per segment.
    pub fits: Vec<LineFit>,
}

impl Segmentation {
    fn from_cuts(ps: &PrefixSums, cuts: Vec<usize>) -> Self {
        let fits = if cuts.len() == 1 {
            vec![linefit(ps, cuts[0], cuts[0])]
        } else {
            cuts.windows(2).map(|w| linefit(ps, w[0], w[1])).collect()
        };
        Self { cuts, fits }
    }

    /// Number of segments.
    pub fn len(&self) -> usize {
        self.fits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fits.is_empty()
    }

    /// `(start, end, fit)` for each segment, with inclusive sample bounds.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize, &LineFit)> + '_ {
        self.fits.iter().enumerate().map(move |(k, fit)| {
            let start = self.cuts[k];
            let end = self.cuts.get(k + 1).copied().unwrap_or(start);
            (start, end, fit)
        })
    }

    pub fn max_mse(&self) -> f64 {
        self.fits.iter().map(|f| f.mse).fold(0.0, f64::max)
    }

    pub fn total_mse(&self) -> f64 {
        self.fits.iter().map(|f| f.mse).sum()
    }
}

/// Fewest segments such that every segment's least-squares MSE is at most
/// `eps_max`; ties are broken by the smallest total MSE.
///
/// Runs in O(n²). A one-sample signal yields a single degenerate segment and
/// an empty signal yields an empty segmentation.
pub fn segment_min_count(ps: &PrefixSums, eps_max: f64) -> Segmentation {
    assert!(eps_max >= 0.0, "eps_max must be non-negative, got {eps_max}");
    let n = ps.len();
    match n {
        0 => {
            return Segmentation {
                cuts: Vec::new(),
                fits: Vec::new(),
            }
        }
        1 => return Segmentation::from_cuts(ps, vec![0]),
        _ => {}
    }

    // best[j] = (segments, total mse) of the best segmentation of 0..=j
    let mut best = vec![(usize::MAX, f64::INFINITY); n];
    let mut prev = vec![0usize; n];
    best[0] = (0, 0.0);
    for j in 1..n {
        for i in 0..j {
            let mse = linefit(ps, i, j).mse;
            if mse > eps_max {
                continue;
            }
            let cand = (best[i].0 + 1, best[i].1 + mse);
            if cand.0 < best[j].0 || (cand.0 == best[j].0 && cand.1 < best[j].1) {
                best[j] = cand;
                prev[j] = i;
            }
        }
    }
    Segmentation::from_cuts(ps, backtrack(&prev, n - 1))
}

/// Exactly `m` segments minimizing the largest per-segment MSE, in O(n²·m).
#[allow(clippy::needless_range_loop)]
pub fn segment_fixed_count(ps: &PrefixSums, m: usize) -> Result<Segmentation> {
    let n = ps.len();
    if m == 0 || m + 1 > n {
        return Err(Error::InvalidArgument(format!(
            "cannot split {n} samples into {m} segments of at least two samples"
        )));
    }
    // cost[c][j]: min over segmentations of 0..=j into c+1 segments
    let mut cost = vec![vec![f64::INFINITY; n]; m];
    let mut prev = vec![vec![0usize; n]; m];
    for j in 1..n {
        cost[0][j] = linefit(ps, 0, j).mse;
    }
    for c in 1..m {
        for j in (c + 1)..n {
            for i in c..j {
                let cand = cost[c - 1][i].max(linefit(ps, i, j).mse);
                if cand < cost[c][j] {
                    cost[c][j] = cand;
                    prev[c][j] = i;
                }
            }
        }
    }
    let mut cuts = vec![n - 1];
    let mut j = n - 1;
    for c in (1..m).rev() {
        j = prev[c][j];
        cuts.push(j);
    }
    cuts.push(0);
    cuts.reverse();
    Ok(Segmentation::from_cuts(ps, cuts))
}

fn backtrack(prev: &[usize], last: usize) -> Vec<usize> {
    let mut cuts = vec![last];
    let mut j = last;
    while j > 0 {
        j = prev[j];
        cuts.push(j);
    }
    cuts.reverse();
    cuts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Signal;

    fn ps(values: &[f64]) -> PrefixSums {
        PrefixSums::new(&Signal::uniform("s", values.to_vec(), 1.0).unwrap())
    }

    #[test]
    fn collinear_signal_is_one_segment() {
        let p = ps(&[1.0, 1.5, 2.0, 2.5, 3.0, 3.5]);
        let seg = segment_min_count(&p, 1e-9);
        assert_eq!(seg.cuts, vec![0, 5]);
        assert_eq!(seg.fits[0].mse, 0.0);
        let fixed = segment_fixed_count(&p, 1).unwrap();
        assert_eq!(fixed.cuts, vec![0, 5]);
        assert_eq!(fixed.max_mse(), 0.0);
    }

    #[test]
    fn triangle_wave_needs_a_segment_per_leg() {
        let p = ps(&[0.0, 1.0, 0.0, 1.0, 0.0]);
        let seg = segment_min_count(&p, 1e-6);
        assert_eq!(seg.cuts, vec![0, 1, 2, 3, 4]);
        assert!(seg.fits.iter().all(|f| f.mse <= 1e-6));
    }

    #[test]
    fn triangle_wave_two_segments_matches_enumeration() {
        let p = ps(&[0.0, 1.0, 0.0, 1.0, 0.0]);
        let seg = segment_fixed_count(&p, 2).unwrap();
        let brute = (1..4)
            .map(|c| linefit(&p, 0, c).mse.max(linefit(&p, c, 4).mse))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(seg.len(), 2);
        assert!((seg.max_mse() - brute).abs() < 1e-12);
    }

    #[test]
    fn degenerate_lengths() {
        assert!(segment_min_count(&ps(&[]), 0.1).is_empty());
        let one = segment_min_count(&ps(&[4.0]), 0.1);
        assert_eq!(one.cuts, vec![0]);
        assert_eq!(one.len(), 1);
        assert_eq!(one.segments().next().unwrap().1, 0);
        let two = segment_min_count(&ps(&[4.0, -1.0]), 0.0);
        assert_eq!(two.cuts, vec![0, 1]);
    }

    #[test]
    fn fixed_count_rejects_too_many_segments() {
        let p = ps(&[0.0, 1.0, 2.0]);
        assert!(segment_fixed_count(&p, 3).is_err());
        assert!(segment_fixed_count(&p, 0).is_err());
        assert_eq!(segment_fixed_count(&p, 2).unwrap().cuts, vec![0, 1, 2]);
    }

    #[test]
    fn ties_prefer_lower_total_error() {
        // both {0..2, 2..4} and {0..1, 1..4}-style splits use two segments;
        // the chosen one must have the smallest summed error
        let p = ps(&[0.0, 0.1, 1.0, 2.1, 2.9]);
        let seg = segment_min_count(&p, 0.05);
        for c in 1..4 {
            let a = linefit(&p, 0, c).mse;
            let b = linefit(&p, c, 4).mse;
            if a <= 0.05 && b <= 0.05 && seg.len() == 2 {
                assert!(seg.total_mse() <= a + b + 1e-15);
            }
        }
    }
}
