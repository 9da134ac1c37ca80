use serde::{Deserialize, Serialize};

use crate::lse::Interval;
use crate::signal::{floor_sse, ols, PrefixSums};

/// Least-squares line restricted to a box on `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedFit {
    pub a: f64,
    pub b: f64,
    pub mse: f64,
}

/// Minimizes the MSE of samples `i..=j` over slopes in `a_box` and offsets
/// (value at `t_i`) in `b_box`.
///
/// The objective is a convex quadratic in `(a, b)`: if the unconstrained
/// optimum lies in the box it is returned, otherwise the minimum sits on an
/// edge and each finite edge is minimized in closed form, clamped to the box.
pub fn constrained_linefit(
    ps: &PrefixSums,
    i: usize,
    j: usize,
    a_box: Interval,
    b_box: Interval,
) -> ConstrainedFit {
    let (a_opt, b_opt, mse_opt) = ols(ps, i, j);
    if a_box.contains(a_opt) && b_box.contains(b_opt) {
        return ConstrainedFit {
            a: a_opt,
            b: b_opt,
            mse: mse_opt,
        };
    }

    let s = ps.range(i, j);
    let sse_opt = mse_opt * s.n;
    // SSE(a, b) = SSE* + Σ (Δa·τ + Δb)²  around the unconstrained optimum
    let sse = |a: f64, b: f64| {
        let da = a - a_opt;
        let db = b - b_opt;
        let extra = da * da * s.tt + 2.0 * da * db * s.t + s.n * db * db;
        floor_sse((sse_opt + extra).max(0.0), s.vv)
    };
    let best_b = |a: f64| b_box.clamp((s.v - a * s.t) / s.n);
    let best_a = |b: f64| {
        if s.tt > 0.0 {
            a_box.clamp((s.tv - b * s.t) / s.tt)
        } else {
            a_box.clamp(a_opt)
        }
    };

    let mut candidates: Vec<(f64, f64)> = Vec::with_capacity(4);
    for a in [a_box.lo, a_box.hi] {
        if a.is_finite() {
            candidates.push((a, best_b(a)));
        }
    }
    for b in [b_box.lo, b_box.hi] {
        if b.is_finite() {
            candidates.push((best_a(b), b));
        }
    }
    let mut best = ConstrainedFit {
        a: f64::NAN,
        b: f64::NAN,
        mse: f64::INFINITY,
    };
    for (a, b) in candidates {
        let mse = sse(a, b) / s.n;
        if mse < best.mse {
            best = ConstrainedFit { a, b, mse };
        }
    }
    best
}
