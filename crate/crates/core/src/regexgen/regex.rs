use serde::{Deserialize, Serialize};

/// Regular expression over symbols of type `S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regex<S> {
    Empty,
    Epsilon,
    Symbol(S),
    Union(Box<Regex<S>>, Box<Regex<S>>),
    Concat(Box<Regex<S>>, Box<Regex<S>>),
    Star(Box<Regex<S>>),
}

impl<S: Clone + PartialEq> Regex<S> {
    pub fn symbol(s: S) -> Self {
        Self::Symbol(s)
    }

    /// Union with the trivial identities applied.
    pub fn union(self, other: Self) -> Self {
        match (self, other) {
            (Self::Empty, r) | (r, Self::Empty) => r,
            (l, r) if l == r => l,
            (l, r) => Self::Union(Box::new(l), Box::new(r)),
        }
    }

    /// Concatenation with the trivial identities applied.
    pub fn concat(self, other: Self) -> Self {
        match (self, other) {
            (Self::Empty, _) | (_, Self::Empty) => Self::Empty,
            (Self::Epsilon, r) | (r, Self::Epsilon) => r,
            (l, r) => Self::Concat(Box::new(l), Box::new(r)),
        }
    }

    /// Kleene star with the trivial identities applied.
    pub fn star(self) -> Self {
        match self {
            Self::Empty | Self::Epsilon => Self::Epsilon,
            s @ Self::Star(_) => s,
            r => Self::Star(Box::new(r)),
        }
    }

    pub fn is_nullable(&self) -> bool {
        match self {
            Self::Empty | Self::Symbol(_) => false,
            Self::Epsilon | Self::Star(_) => true,
            Self::Union(l, r) => l.is_nullable() || r.is_nullable(),
            Self::Concat(l, r) => l.is_nullable() && r.is_nullable(),
        }
    }

    /// Symbols in left-to-right order of occurrence, with repetitions.
    pub fn symbols(&self) -> Vec<&S> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols<'a>(&'a self, out: &mut Vec<&'a S>) {
        match self {
            Self::Empty | Self::Epsilon => {}
            Self::Symbol(s) => out.push(s),
            Self::Union(l, r) | Self::Concat(l, r) => {
                l.collect_symbols(out);
                r.collect_symbols(out);
            }
            Self::Star(e) => e.collect_symbols(out),
        }
    }

    pub fn map<T, F: FnMut(&S) -> T>(&self, f: &mut F) -> Regex<T> {
        match self {
            Self::Empty => Regex::Empty,
            Self::Epsilon => Regex::Epsilon,
            Self::Symbol(s) => Regex::Symbol(f(s)),
            Self::Union(l, r) => Regex::Union(Box::new(l.map(f)), Box::new(r.map(f))),
            Self::Concat(l, r) => Regex::Concat(Box::new(l.map(f)), Box::new(r.map(f))),
            Self::Star(e) => Regex::Star(Box::new(e.map(f))),
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Self::Empty | Self::Epsilon | Self::Symbol(_) => 1,
            Self::Union(l, r) | Self::Concat(l, r) => 1 + l.size() + r.size(),
            Self::Star(e) => 1 + e.size(),
        }
    }
}

/// Applies language-preserving rewrites until nothing changes.
///
/// Unions and concatenations come out left-associated, duplicate alternatives
/// are dropped (first occurrence kept) and `ε + X·X*`, `ε + X*·X`, `ε + X*`
/// collapse to `X*`.
pub fn simplify<S: Clone + PartialEq>(r: &Regex<S>) -> Regex<S> {
    let mut current = r.clone();
    loop {
        let next = rewrite(&current);
        if next == current {
            return next;
        }
        current = next;
    }
}

fn rewrite<S: Clone + PartialEq>(r: &Regex<S>) -> Regex<S> {
    match r {
        Regex::Empty | Regex::Epsilon | Regex::Symbol(_) => r.clone(),
        Regex::Star(inner) => {
            let inner = rewrite(inner);
            match inner {
                Regex::Star(_) => inner,
                // (ε + X)* = X*
                Regex::Union(..) => {
                    let alts: Vec<Regex<S>> = flatten_union(&inner)
                        .into_iter()
                        .filter(|a| *a != Regex::Epsilon)
                        .collect();
                    build_union(alts).star()
                }
                other => other.star(),
            }
        }
        Regex::Concat(..) => {
            let mut parts = Vec::new();
            for p in flatten_concat(r) {
                match rewrite(&p) {
                    Regex::Empty => return Regex::Empty,
                    Regex::Epsilon => {}
                    other => parts.extend(flatten_concat(&other)),
                }
            }
            parts
                .into_iter()
                .reduce(|l, r| Regex::Concat(Box::new(l), Box::new(r)))
                .unwrap_or(Regex::Epsilon)
        }
        Regex::Union(..) => {
            let mut alts: Vec<Regex<S>> = Vec::new();
            for a in flatten_union(r) {
                for a in flatten_union(&rewrite(&a)) {
                    if a != Regex::Empty && !alts.contains(&a) {
                        alts.push(a);
                    }
                }
            }
            absorb_epsilon(&mut alts);
            build_union(alts)
        }
    }
}

fn flatten_union<S: Clone>(r: &Regex<S>) -> Vec<Regex<S>> {
    match r {
        Regex::Union(l, r) => {
            let mut out = flatten_union(l);
            out.extend(flatten_union(r));
            out
        }
        other => vec![other.clone()],
    }
}

fn flatten_concat<S: Clone>(r: &Regex<S>) -> Vec<Regex<S>> {
    match r {
        Regex::Concat(l, r) => {
            let mut out = flatten_concat(l);
            out.extend(flatten_concat(r));
            out
        }
        other => vec![other.clone()],
    }
}

fn build_union<S: Clone + PartialEq>(alts: Vec<Regex<S>>) -> Regex<S> {
    alts.into_iter()
        .reduce(|l, r| Regex::Union(Box::new(l), Box::new(r)))
        .unwrap_or(Regex::Empty)
}

/// Removes an `ε` alternative when another alternative can be rewritten to a
/// star that already accepts the empty word.
fn absorb_epsilon<S: Clone + PartialEq>(alts: &mut Vec<Regex<S>>) {
    let Some(eps) = alts.iter().position(|a| *a == Regex::Epsilon) else {
        return;
    };
    for k in 0..alts.len() {
        if k == eps {
            continue;
        }
        if let Some(star) = plus_to_star(&alts[k]) {
            alts[k] = star;
            alts.remove(eps);
            return;
        }
        if alts[k].is_nullable() {
            alts.remove(eps);
            return;
        }
    }
}

/// `X·X*` or `X*·X` (with `X` possibly a concatenation) as `X*`.
fn plus_to_star<S: Clone + PartialEq>(r: &Regex<S>) -> Option<Regex<S>> {
    let parts = flatten_concat(r);
    let (first, last) = (parts.first()?, parts.last()?);
    if let Regex::Star(body) = last {
        let head = &parts[..parts.len() - 1];
        if !head.is_empty() && flatten_concat(body) == head {
            return Some(last.clone());
        }
    }
    if let Regex::Star(body) = first {
        let tail = &parts[1..];
        if !tail.is_empty() && flatten_concat(body) == tail {
            return Some(first.clone());
        }
    }
    None
}
