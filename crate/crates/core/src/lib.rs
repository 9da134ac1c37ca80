//! Mining of linear shape expressions from real-valued time series.
//!
//! The pipeline approximates every trace by the fewest line segments within
//! an MSE budget, clusters the segments' `(slope, offset, duration)` into an
//! alphabet, learns an automaton over the resulting words and turns it into a
//! regular expression whose letters carry the clusters' parameter boxes.
//! [`matcher::noisy_match`] checks signals against such expressions.

pub mod abstraction;
pub mod error;
pub mod learner;
pub mod lse;
pub mod matcher;
pub mod pipeline;
pub mod regexgen;
pub mod segmentation;
pub mod signal;

pub use error::{Error, Result};
pub use lse::{render_lse, Interval, LineAtom, Lse};
pub use matcher::{noisy_match, parse_lse, MatchOutcome};
pub use pipeline::{mine, MineConfig, MineReport};
pub use segmentation::{segment_fixed_count, segment_min_count, Segmentation};
pub use signal::{linefit, load_traces, LineFit, PrefixSums, Signal, TraceFormat};
