//! DFA to regular expression translation by state elimination.

mod regex;

use std::collections::BTreeMap;

pub use self::regex::{simplify, Regex};
use crate::learner::Dfa;

/// Regular expression with the same language as `dfa`.
///
/// A fresh source and sink are attached with ε-edges, then interior states
/// are removed one at a time, always picking the state with the smallest
/// `in-degree × out-degree` (self-loops excluded, ties by lowest id). Returns
/// [`Regex::Empty`] when no accepting state exists.
pub fn eliminate_states(dfa: &Dfa) -> Regex<usize> {
    let n = dfa.len();
    let source = n;
    let sink = n + 1;
    if n == 0 {
        return Regex::Empty;
    }
    // edges[p][q] = label of the edge p -> q
    let mut edges: Vec<Edges> = vec![BTreeMap::new(); n + 2];
    add(&mut edges, source, dfa.initial, Regex::Epsilon);
    for (q, state) in dfa.states.iter().enumerate() {
        for (&x, &target) in &state.transitions {
            add(&mut edges, q, target, Regex::Symbol(x));
        }
        if state.accepting {
            add(&mut edges, q, sink, Regex::Epsilon);
        }
    }

    let mut alive: Vec<bool> = (0..n).map(|_| true).collect();
    for _ in 0..n {
        let victim = (0..n)
            .filter(|&k| alive[k])
            .min_by_key(|&k| {
                let incoming = (0..n + 2)
                    .filter(|&p| p != k && edges[p].contains_key(&k))
                    .count();
                let outgoing = edges[k].keys().filter(|&&q| q != k).count();
                (incoming * outgoing, k)
            })
            .expect("an interior state remains");
        alive[victim] = false;

        let out = std::mem::take(&mut edges[victim]);
        let loop_label = out
            .get(&victim)
            .cloned()
            .map_or(Regex::Epsilon, Regex::star);
        let preds: Vec<usize> = (0..n + 2)
            .filter(|&p| p != victim && edges[p].contains_key(&victim))
            .collect();
        for p in preds {
            let into = edges[p].remove(&victim).expect("predecessor edge");
            for (&q, label) in out.iter().filter(|(&q, _)| q != victim) {
                let path = into.clone().concat(loop_label.clone()).concat(label.clone());
                add(&mut edges, p, q, path);
            }
        }
    }
    edges[source].remove(&sink).unwrap_or(Regex::Empty)
}

type Edges = BTreeMap<usize, Regex<usize>>;

fn add(edges: &mut [Edges], p: usize, q: usize, r: Regex<usize>) {
    let label = match edges[p].remove(&q) {
        Some(existing) => existing.union(r),
        None => r,
    };
    edges[p].insert(q, label);
}
