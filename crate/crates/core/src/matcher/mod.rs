//! Parsing of shape expressions and the ν-noisy match between a signal and
//! an expression.
//!
//! A signal matches when it splits into consecutive segments (neighbors share
//! one boundary sample) that spell a word of the shape's regular expression,
//! where each segment admits a line with `a`, `b` inside its atom's box, its
//! duration inside the atom's `d` interval and a constrained MSE of at most ν.
//!
//! The search is a reachability sweep over `(sample index, position)` pairs
//! of the Glushkov automaton. Feasibility of a segment only depends on the
//! atom's box, so it is computed once per distinct box and start sample.
//! The cost is O(n² · boxes) constrained fits plus O(n² · positions) edge
//! visits.

mod fit;
mod glushkov;
mod parser;

use serde::{Deserialize, Serialize};

pub use self::fit::{constrained_linefit, ConstrainedFit};
pub use self::glushkov::Glushkov;
pub use self::parser::parse_lse;
use crate::lse::{Interval, LineAtom, Lse};
use crate::signal::{PrefixSums, Signal};

/// One matched segment of a witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSegment {
    pub start: usize,
    pub end: usize,
    pub atom: String,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchOutcome {
    pub matched: bool,
    /// Segments of one accepting split when `matched` is true.
    pub witness: Option<Vec<WitnessSegment>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct AtomBox {
    a: Interval,
    b: Interval,
    d: Interval,
}

impl AtomBox {
    /// `None` when a parameter carries contradictory constraints.
    fn of(lse: &Lse, atom: &LineAtom) -> Option<Self> {
        Some(Self {
            a: lse.interval(&atom.a)?,
            b: lse.interval(&atom.b)?,
            d: lse.interval(&atom.d)?,
        })
    }
}

/// Decides whether `signal` is a ν-noisy match of `lse`.
pub fn noisy_match(signal: &Signal, lse: &Lse, nu: f64) -> MatchOutcome {
    assert!(nu >= 0.0, "noise tolerance must be non-negative, got {nu}");
    let ps = PrefixSums::new(signal);
    noisy_match_with(&ps, lse, nu)
}

/// [`noisy_match`] on precomputed prefix sums.
pub fn noisy_match_with(ps: &PrefixSums, lse: &Lse, nu: f64) -> MatchOutcome {
    let no = MatchOutcome {
        matched: false,
        witness: None,
    };
    let g = Glushkov::new(&lse.shape);
    let n = ps.len();
    if n <= 1 && g.nullable {
        // a signal of null duration is the empty word
        return MatchOutcome {
            matched: true,
            witness: Some(Vec::new()),
        };
    }
    if n == 0 {
        return no;
    }

    // distinct boxes and the box of each position
    let mut boxes: Vec<Option<AtomBox>> = Vec::new();
    let mut box_of = Vec::with_capacity(g.positions.len());
    for atom in &g.positions {
        let b = AtomBox::of(lse, atom);
        let idx = boxes.iter().position(|x| *x == b).unwrap_or_else(|| {
            boxes.push(b);
            boxes.len() - 1
        });
        box_of.push(idx);
    }

    // state 0 is the initial state, state p + 1 is position p
    let states = g.positions.len() + 1;
    let mut pred: Vec<Vec<Option<(usize, usize)>>> = vec![vec![None; states]; n];
    let mut reached: Vec<Vec<bool>> = vec![vec![false; states]; n];
    reached[0][0] = true;
    let mut feasible: Vec<Option<Vec<usize>>> = vec![None; boxes.len()];

    for i in 0..n {
        feasible.iter_mut().for_each(|f| *f = None);
        let mut stack: Vec<usize> = (0..states).filter(|&s| reached[i][s]).collect();
        while let Some(s) = stack.pop() {
            let from = if s == 0 { None } else { Some(s - 1) };
            for &p in g.next(from) {
                let bx = box_of[p];
                let ends = feasible[bx].get_or_insert_with(|| feasible_ends(ps, i, boxes[bx], nu));
                for &j in ends.iter() {
                    if !reached[j][p + 1] {
                        reached[j][p + 1] = true;
                        pred[j][p + 1] = Some((i, s));
                        if j == i {
                            stack.push(p + 1);
                        }
                    }
                }
            }
        }
    }

    let Some(end_state) = (1..states).find(|&s| reached[n - 1][s] && g.is_last[s - 1]) else {
        return no;
    };

    let mut segments = Vec::new();
    let (mut j, mut s) = (n - 1, end_state);
    while s != 0 {
        let (i, prev) = pred[j][s].expect("reached states have a predecessor");
        let atom = g.positions[s - 1];
        let bx = boxes[box_of[s - 1]].expect("feasible box");
        let fit = constrained_linefit(ps, i, j, bx.a, bx.b);
        segments.push(WitnessSegment {
            start: i,
            end: j,
            atom: atom.to_string(),
            a: fit.a,
            b: fit.b,
            d: ps.time(j) - ps.time(i),
            mse: fit.mse,
        });
        j = i;
        s = prev;
    }
    segments.reverse();
    MatchOutcome {
        matched: true,
        witness: Some(segments),
    }
}

/// End samples `j >= i` such that `i..=j` is a ν-noisy match of the box.
fn feasible_ends(ps: &PrefixSums, i: usize, bx: Option<AtomBox>, nu: f64) -> Vec<usize> {
    let Some(bx) = bx else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for j in i..ps.len() {
        let d = ps.time(j) - ps.time(i);
        if d > bx.d.hi {
            break;
        }
        if d < bx.d.lo {
            continue;
        }
        if constrained_linefit(ps, i, j, bx.a, bx.b).mse <= nu {
            out.push(j);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> Signal {
        let t: Vec<f64> = (0..=10).map(f64::from).collect();
        let v = t.iter().map(|t| 2.0 * t).collect();
        Signal::new("ramp", t, v).unwrap()
    }

    #[test]
    fn exact_line_matches_exact_language() {
        let lse = parse_lse("line(a,b,d): a in [2,2] and b in [0,0] and d in [10,10]").unwrap();
        let out = noisy_match(&ramp(), &lse, 0.0);
        assert!(out.matched);
        let w = out.witness.unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!((w[0].start, w[0].end, w[0].d), (0, 10, 10.0));
    }

    #[test]
    fn wrong_slope_does_not_match() {
        let lse = parse_lse("line(a,b,d): a in [3,4] and b in [0,0] and d in [10,10]").unwrap();
        assert!(!noisy_match(&ramp(), &lse, 0.0).matched);
    }

    #[test]
    fn up_then_down() {
        let t: Vec<f64> = (0..=8).map(f64::from).collect();
        let v = vec![0.0, 1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0, 0.0];
        let sig = Signal::new("tri", t, v).unwrap();
        let lse = parse_lse(
            "line(au,bu,du) . line(ad,bd,dd) : au in [0.9, 1.1] and ad in [-1.1, -0.9]",
        )
        .unwrap();
        let out = noisy_match(&sig, &lse, 1e-9);
        let w = out.witness.expect("matches");
        assert_eq!((w[0].start, w[0].end, w[1].start, w[1].end), (0, 4, 4, 8));
        // the reverse order is not in the language
        let lse = parse_lse("line(ad,bd,dd) . line(au,bu,du) : au in [0.9, 1.1] and ad in [-1.1, -0.9]")
            .unwrap();
        assert!(!noisy_match(&sig, &lse, 1e-9).matched);
    }

    #[test]
    fn repetition_through_star() {
        let t: Vec<f64> = (0..=6).map(f64::from).collect();
        let v = vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        let sig = Signal::new("zigzag", t, v).unwrap();
        let lse = parse_lse(
            "(line(a1,b1,d1) . line(a2,b2,d2))* : a1 in [1,1] and a2 in [-1,-1] and d1 in [1,1] and d2 in [1,1]",
        )
        .unwrap();
        let out = noisy_match(&sig, &lse, 0.0);
        assert_eq!(out.witness.expect("matches").len(), 6);
    }

    #[test]
    fn zero_duration_atoms() {
        let sig = Signal::new("one", vec![0.0, 1.0], vec![5.0, 5.0]).unwrap();
        // a point atom consumes a single sample, then the flat line follows
        let lse = parse_lse("line(a,b,d) . line(e,f,g) : d in [0, 0] and b in [5, 5] and e in [0, 0]")
            .unwrap();
        let w = noisy_match(&sig, &lse, 0.0).witness.expect("matches");
        assert_eq!((w[0].start, w[0].end), (0, 0));
        assert_eq!((w[1].start, w[1].end), (0, 1));
        // without d = 0 allowed, two atoms cannot fit two samples
        let lse = parse_lse("line(a,b,d) . line(e,f,g) : d in [0.5, 2] and g in [0.5, 2]").unwrap();
        assert!(!noisy_match(&sig, &lse, 0.0).matched);
        let lse = parse_lse("line(a,b,d) . line(e,f,g) : d in [0.5, 2]").unwrap();
        assert!(noisy_match(&sig, &lse, 0.0).matched);
    }

    #[test]
    fn contradictory_constraints_never_match() {
        let lse = parse_lse("line(a,b,d) : a in [0, 1] and a in [2, 3]").unwrap();
        assert!(!noisy_match(&ramp(), &lse, 100.0).matched);
    }
}
