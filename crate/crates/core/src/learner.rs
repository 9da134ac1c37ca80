//! Passive automaton learning from positive words.
//!
//! Words are first stored in a prefix tree acceptor (PTA) and then generalized
//! by blue-fringe state merging. Positive-only data gives no counterexamples,
//! so the sample is closed under a length bound: every word not longer than
//! the longest training word that is not itself a training word counts as
//! negative. A merge is kept only if the folded automaton still accepts exactly
//! the training words among all words of at most that length. Loops survive
//! when the shortcuts they create were themselves observed (`A`, `AA`, `AAA`
//! generalizes to `A·A*`) and identical words stay a single chain.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// A deterministic finite automaton over letter indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dfa {
    pub initial: usize,
    pub states: Vec<DfaState>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaState {
    pub accepting: bool,
    /// Letter index to target state.
    pub transitions: BTreeMap<usize, usize>,
}

impl Dfa {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn step(&self, state: usize, letter: usize) -> Option<usize> {
        self.states[state].transitions.get(&letter).copied()
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut q = self.initial;
        for &x in word {
            match self.step(q, x) {
                Some(next) => q = next,
                None => return false,
            }
        }
        self.states[q].accepting
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&q| self.states[q].accepting)
    }

    /// Graphviz rendering; `names[x]` labels letter `x`.
    pub fn to_dot(&self, names: &[String]) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  start [shape=point];\n");
        for (q, state) in self.states.iter().enumerate() {
            let shape = if state.accepting {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(out, "  q{q} [shape={shape}];");
        }
        let _ = writeln!(out, "  start -> q{};", self.initial);
        for (q, state) in self.states.iter().enumerate() {
            for (&x, &target) in &state.transitions {
                let label = names.get(x).cloned().unwrap_or_else(|| x.to_string());
                let _ = writeln!(out, "  q{q} -> q{target} [label=\"{label}\"];");
            }
        }
        out.push_str("}\n");
        out
    }

    /// Renumbers reachable states in breadth-first order, letters ascending,
    /// dropping unreachable ones.
    pub fn canonical(&self) -> Dfa {
        let mut index = vec![usize::MAX; self.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        index[self.initial] = 0;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for &target in self.states[q].transitions.values() {
                if index[target] == usize::MAX {
                    index[target] = order.len() + queue.len();
                    queue.push_back(target);
                }
            }
        }
        let states = order
            .iter()
            .map(|&q| DfaState {
                accepting: self.states[q].accepting,
                transitions: self.states[q]
                    .transitions
                    .iter()
                    .map(|(&x, &t)| (x, index[t]))
                    .collect(),
            })
            .collect();
        Dfa { initial: 0, states }
    }
}

/// Prefix tree acceptor of `words`; states are numbered in breadth-first
/// order with letters ascending, so state ids follow the shortlex order of
/// their access words.
pub fn build_pta(words: &[Vec<usize>]) -> Dfa {
    let mut trie = Dfa {
        initial: 0,
        states: vec![DfaState::default()],
    };
    for word in words {
        let mut q = 0;
        for &x in word {
            q = match trie.step(q, x) {
                Some(next) => next,
                None => {
                    trie.states.push(DfaState::default());
                    let next = trie.states.len() - 1;
                    trie.states[q].transitions.insert(x, next);
                    next
                }
            };
        }
        trie.states[q].accepting = true;
    }
    trie.canonical()
}

/// Working copy of the automaton during merging. States are PTA node ids;
/// a node that was folded away points at its class representative.
#[derive(Clone)]
struct Quotient {
    parent: Vec<usize>,
    accepting: Vec<bool>,
    transitions: Vec<BTreeMap<usize, usize>>,
}

impl Quotient {
    fn find(&self, mut q: usize) -> usize {
        while self.parent[q] != q {
            q = self.parent[q];
        }
        q
    }

    /// Folds the (still tree-shaped) subtree rooted at `blue` into `red`.
    /// Fails as soon as an accepting and a non-accepting class would meet.
    fn fold(&mut self, red: usize, blue: usize) -> bool {
        let red = self.find(red);
        if self.accepting[red] != self.accepting[blue] {
            return false;
        }
        self.parent[blue] = red;
        let children = std::mem::take(&mut self.transitions[blue]);
        for (x, child) in children {
            match self.transitions[red].get(&x).copied() {
                Some(target) => {
                    if !self.fold(target, child) {
                        return false;
                    }
                }
                None => {
                    self.transitions[red].insert(x, child);
                }
            }
        }
        true
    }
}

/// Blue-fringe state merging on a PTA.
///
/// Blue states are taken in PTA (shortlex) order and merged into the first
/// red state, in discovery order, for which the result stays consistent with
/// the length-bounded sample; otherwise they are promoted to red.
pub fn rpni_merge(pta: &Dfa) -> Dfa {
    let n = pta.len();
    let mut depth = vec![0usize; n];
    let mut incoming = vec![None; n];
    for (q, state) in pta.states.iter().enumerate() {
        for (&x, &child) in &state.transitions {
            depth[child] = depth[q] + 1;
            incoming[child] = Some((q, x));
        }
    }
    let bound = pta
        .accepting_states()
        .map(|q| depth[q])
        .max()
        .unwrap_or(0);

    let mut current = Quotient {
        parent: (0..n).collect(),
        accepting: pta.states.iter().map(|s| s.accepting).collect(),
        transitions: pta.states.iter().map(|s| s.transitions.clone()).collect(),
    };
    let mut red = vec![pta.initial];
    let mut is_red = vec![false; n];
    is_red[pta.initial] = true;

    while let Some(blue) = red
        .iter()
        .flat_map(|&r| current.transitions[r].values().copied())
        .filter(|&q| !is_red[q])
        .min()
    {
        let (from, letter) = incoming[blue].expect("blue states have a PTA parent");
        let mut merged = None;
        for &r in &red {
            let mut trial = current.clone();
            let source = trial.find(from);
            trial.transitions[source].insert(letter, r);
            if trial.fold(r, blue) && consistent(pta, &trial, &depth, bound) {
                merged = Some(trial);
                break;
            }
        }
        match merged {
            Some(trial) => current = trial,
            None => {
                is_red[blue] = true;
                red.push(blue);
            }
        }
    }

    let dfa = Dfa {
        initial: pta.initial,
        states: (0..n)
            .map(|q| DfaState {
                accepting: current.accepting[q],
                transitions: current.transitions[q].clone(),
            })
            .collect(),
    };
    dfa.canonical()
}

/// True iff the quotient accepts no word of length `<= bound` outside the
/// training set. Labels are already known to be class-pure, so a violation
/// can only leave the PTA through a transition the PTA lacks.
#[allow(clippy::needless_range_loop)]
fn consistent(pta: &Dfa, quotient: &Quotient, depth: &[usize], bound: usize) -> bool {
    let n = pta.len();
    // shortest distance from every class representative to acceptance
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for q in 0..n {
        if quotient.parent[q] != q {
            continue;
        }
        for &target in quotient.transitions[q].values() {
            reverse[quotient.find(target)].push(q);
        }
        if quotient.accepting[q] {
            dist[q] = 0;
            queue.push_back(q);
        }
    }
    while let Some(q) = queue.pop_front() {
        for &p in &reverse[q] {
            if dist[p] == usize::MAX {
                dist[p] = dist[q] + 1;
                queue.push_back(p);
            }
        }
    }

    for (p, state) in pta.states.iter().enumerate() {
        let q = quotient.find(p);
        for (x, &target) in &quotient.transitions[q] {
            if state.transitions.contains_key(x) {
                continue;
            }
            let rest = dist[quotient.find(target)];
            if rest != usize::MAX && depth[p] + 1 + rest <= bound {
                return false;
            }
        }
    }
    true
}
