//! End-to-end mining: segmentation, abstraction, learning and translation.

use std::fmt::Write as _;
use std::time::Instant;

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::abstraction::{build_alphabet, choose_k, featurize, Cube, Letter};
use crate::error::{Error, Result};
use crate::learner::{build_pta, rpni_merge, Dfa};
use crate::lse::{attach_constraints, render_lse, Lse};
use crate::regexgen::{eliminate_states, simplify, Regex};
use crate::segmentation::{segment_min_count, Segmentation};
use crate::signal::{PrefixSums, Signal};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_WCSS_THRESHOLD: f64 = 10.0;
pub const DEFAULT_K_MAX: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MineConfig {
    /// Largest MSE allowed for any segment.
    pub eps_max: f64,
    /// Threshold on the decrease of WCSS between consecutive cluster counts.
    pub wcss_threshold: f64,
    /// Upper bound on the number of clusters; capped by the number of segments.
    pub k_max: usize,
    pub seed: u64,
}

impl MineConfig {
    pub fn new(eps_max: f64) -> Self {
        Self {
            eps_max,
            wcss_threshold: DEFAULT_WCSS_THRESHOLD,
            k_max: DEFAULT_K_MAX,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_max > 0.0 && self.eps_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "max MSE must be positive, got {}",
                self.eps_max
            )));
        }
        if self.wcss_threshold.is_nan() || self.wcss_threshold <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "WCSS threshold must be positive, got {}",
                self.wcss_threshold
            )));
        }
        if self.k_max == 0 {
            return Err(Error::InvalidArgument("k_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// Wall-clock seconds spent in each phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    /// Segmentation.
    pub t_s: f64,
    /// Abstraction and clustering.
    pub t_c: f64,
    /// Automaton learning and translation to an expression.
    pub t_l: f64,
    pub t_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterRow {
    pub name: String,
    pub members: usize,
    pub cube: Cube,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordRow {
    pub trace: String,
    pub letters: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WcssRow {
    pub k: usize,
    pub wcss: f64,
}

/// Everything produced by one mining run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MineReport {
    pub schema: u32,
    pub config: MineConfig,
    /// Concrete syntax of the mined expression.
    pub lse: String,
    pub regex: Regex<String>,
    pub alphabet: Vec<LetterRow>,
    pub words: Vec<WordRow>,
    pub wcss: Vec<WcssRow>,
    pub k: usize,
    pub dfa: Dfa,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

/// Report together with intermediate artifacts that are not serialized.
#[derive(Debug, Clone)]
pub struct MineRun {
    pub report: MineReport,
    pub lse: Lse,
    pub letters: Vec<Letter>,
    pub segmentations: Vec<Segmentation>,
    pub timings: Timings,
}

/// Mines a linear shape expression from `signals`.
///
/// The returned report carries timings; drop them before writing when
/// byte-identical output across runs is needed.
pub fn mine(signals: &[Signal], config: &MineConfig) -> Result<MineRun> {
    config.validate()?;
    if signals.is_empty() {
        return Err(Error::InvalidArgument("no traces to mine".into()));
    }
    if let Some(short) = signals.iter().find(|s| s.len() < 2) {
        return Err(Error::InvalidSignal {
            id: short.id().to_owned(),
            reason: "mining needs at least two samples per trace".into(),
        });
    }
    let start = Instant::now();

    let segmentations: Vec<Segmentation> = signals
        .iter()
        .map(|s| segment_min_count(&PrefixSums::new(s), config.eps_max))
        .collect();
    let t_s = start.elapsed().as_secs_f64();
    debug!(
        "segmented {} traces into {} segments",
        signals.len(),
        segmentations.iter().map(Segmentation::len).sum::<usize>()
    );

    let phase = Instant::now();
    let points = featurize(&segmentations)?;
    let normalized: Vec<[f64; 3]> = points.iter().map(|p| p.normalized).collect();
    let k_max = config.k_max.min(points.len());
    let elbow = choose_k(&normalized, config.wcss_threshold, k_max, config.seed);
    let trace_ids: Vec<String> = signals.iter().map(|s| s.id().to_owned()).collect();
    let (letters, words) = build_alphabet(&points, &elbow.clustering.assignment, &trace_ids);
    let t_c = phase.elapsed().as_secs_f64();
    debug!("chose k = {} from WCSS {:?}", elbow.k, elbow.wcss);

    let phase = Instant::now();
    let sample: Vec<Vec<usize>> = words.iter().map(|w| w.letters.clone()).collect();
    let dfa = rpni_merge(&build_pta(&sample));
    let names: Vec<String> = letters.iter().map(|l| l.name.clone()).collect();
    let regex = simplify(&eliminate_states(&dfa)).map(&mut |&x: &usize| names[x].clone());
    let lse = attach_constraints(&regex, &letters)?;
    let text = render_lse(&lse);
    let t_l = phase.elapsed().as_secs_f64();
    let timings = Timings {
        t_s,
        t_c,
        t_l,
        t_total: start.elapsed().as_secs_f64(),
    };
    info!(
        "mined {} letters, {}-state DFA in {:.3}s",
        letters.len(),
        dfa.len(),
        timings.t_total
    );

    let report = MineReport {
        schema: SCHEMA_VERSION,
        config: config.clone(),
        lse: text,
        regex,
        alphabet: letters
            .iter()
            .map(|l| LetterRow {
                name: l.name.clone(),
                members: l.members,
                cube: l.cube,
            })
            .collect(),
        words: words
            .iter()
            .map(|w| WordRow {
                trace: w.trace.clone(),
                letters: w.letters.iter().map(|&x| names[x].clone()).collect(),
            })
            .collect(),
        wcss: elbow
            .wcss
            .iter()
            .enumerate()
            .map(|(i, &wcss)| WcssRow { k: i + 1, wcss })
            .collect(),
        k: elbow.k,
        dfa,
        timings: Some(timings),
    };
    Ok(MineRun {
        report,
        lse,
        letters,
        segmentations,
        timings,
    })
}

/// Plot data as CSV rows `trace,index,t,v,fitted,segment`.
pub fn plot_data_csv(signals: &[Signal], segmentations: &[Segmentation]) -> String {
    let mut out = String::from("trace,index,t,v,fitted,segment\n");
    for (signal, seg) in signals.iter().zip(segmentations) {
        for (k, (start, end, fit)) in seg.segments().enumerate() {
            // shared boundary samples are written once, by the earlier segment
            let first = if k == 0 { start } else { start + 1 };
            for i in first..=end {
                let t = signal.times()[i];
                let fitted = fit.a * (t - signal.times()[start]) + fit.b;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    signal.id(),
                    i,
                    t,
                    signal.values()[i],
                    fitted,
                    k
                );
            }
        }
    }
    out
}
