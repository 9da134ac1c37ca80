use crate::regexgen::Regex;

/// Position automaton of a regular expression: one state per symbol
/// occurrence plus an initial state, no ε-transitions.
#[derive(Debug, Clone)]
pub struct Glushkov<'a, S> {
    /// Symbol at each position.
    pub positions: Vec<&'a S>,
    /// Positions reachable from the initial state.
    pub first: Vec<usize>,
    /// `follow[p]`: positions that may come right after `p`.
    pub follow: Vec<Vec<usize>>,
    /// `is_last[p]`: the expression may end at `p`.
    pub is_last: Vec<bool>,
    pub nullable: bool,
}

struct Info {
    nullable: bool,
    first: Vec<usize>,
    last: Vec<usize>,
}

impl<'a, S> Glushkov<'a, S> {
    pub fn new(r: &'a Regex<S>) -> Self {
        let mut g = Glushkov {
            positions: Vec::new(),
            first: Vec::new(),
            follow: Vec::new(),
            is_last: Vec::new(),
            nullable: false,
        };
        let info = g.visit(r);
        g.is_last = vec![false; g.positions.len()];
        for &p in &info.last {
            g.is_last[p] = true;
        }
        g.first = info.first;
        g.nullable = info.nullable;
        for f in &mut g.follow {
            f.sort_unstable();
            f.dedup();
        }
        g
    }

    fn visit(&mut self, r: &'a Regex<S>) -> Info {
        match r {
            Regex::Empty => Info {
                nullable: false,
                first: vec![],
                last: vec![],
            },
            Regex::Epsilon => Info {
                nullable: true,
                first: vec![],
                last: vec![],
            },
            Regex::Symbol(s) => {
                let p = self.positions.len();
                self.positions.push(s);
                self.follow.push(Vec::new());
                Info {
                    nullable: false,
                    first: vec![p],
                    last: vec![p],
                }
            }
            Regex::Union(l, r) => {
                let mut l = self.visit(l);
                let r = self.visit(r);
                l.nullable |= r.nullable;
                l.first.extend(r.first);
                l.last.extend(r.last);
                l
            }
            Regex::Concat(l, r) => {
                let l = self.visit(l);
                let r = self.visit(r);
                for &p in &l.last {
                    self.follow[p].extend(&r.first);
                }
                let mut first = l.first;
                if l.nullable {
                    first.extend(&r.first);
                }
                let mut last = r.last;
                if r.nullable {
                    last.extend(&l.last);
                }
                Info {
                    nullable: l.nullable && r.nullable,
                    first,
                    last,
                }
            }
            Regex::Star(e) => {
                let e = self.visit(e);
                for &p in &e.last {
                    self.follow[p].extend(&e.first);
                }
                Info {
                    nullable: true,
                    first: e.first,
                    last: e.last,
                }
            }
        }
    }

    /// Successor positions of `state`, where `None` is the initial state.
    pub fn next(&self, state: Option<usize>) -> &[usize] {
        match state {
            None => &self.first,
            Some(p) => &self.follow[p],
        }
    }

    /// Membership of a word given as a sequence of symbols.
    pub fn accepts(&self, word: &[S]) -> bool
    where
        S: PartialEq,
    {
        let mut current: Vec<Option<usize>> = vec![None];
        for x in word {
            let mut next: Vec<Option<usize>> = current
                .iter()
                .flat_map(|&q| self.next(q).iter())
                .filter(|&&p| self.positions[p] == x)
                .map(|&p| Some(p))
                .collect();
            next.sort_unstable();
            next.dedup();
            current = next;
        }
        current.iter().any(|q| match q {
            None => self.nullable,
            Some(p) => self.is_last[*p],
        })
    }
}
