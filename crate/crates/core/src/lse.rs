//! Linear shape expressions: a regular expression over parameterized line
//! atoms together with interval constraints on the atoms' parameters.
//!
//! Concrete syntax:
//!
//! ```text
//! shape := line(a, b, d) | shape + shape | shape . shape | (shape)*
//! cst   := x in [c1, c2] | cst and cst
//! SE    := shape : cst
//! ```
//!
//! `*` binds tighter than `.`, which binds tighter than `+`.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::abstraction::Letter;
use crate::error::{Error, Result};
use crate::regexgen::Regex;

/// Closed interval; either bound may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const UNBOUNDED: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Panics if `lo > hi` or either bound is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }

    /// Smallest interval containing `self` and `x`.
    pub fn hull(&self, x: f64) -> Self {
        Self {
            lo: self.lo.min(x),
            hi: self.hi.max(x),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

/// `line(a, b, d)` with the names of its slope, offset and duration parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LineAtom {
    pub a: String,
    pub b: String,
    pub d: String,
}

impl LineAtom {
    /// Atom whose parameters are `a_X`, `b_X`, `d_X` for letter `X`.
    pub fn for_letter(letter: &str) -> Self {
        Self {
            a: format!("a_{letter}"),
            b: format!("b_{letter}"),
            d: format!("d_{letter}"),
        }
    }
}

impl fmt::Display for LineAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line({}, {}, {})", self.a, self.b, self.d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub param: String,
    pub interval: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lse {
    pub shape: Regex<LineAtom>,
    pub constraints: Vec<Constraint>,
}

impl Lse {
    /// Feasible interval of `param`: the intersection of all constraints on
    /// it, unbounded when unconstrained and `None` when contradictory.
    pub fn interval(&self, param: &str) -> Option<Interval> {
        self.constraints
            .iter()
            .filter(|c| c.param == param)
            .try_fold(Interval::UNBOUNDED, |acc, c| acc.intersect(&c.interval))
    }
}

/// Pairs a regex over letter names with the bounding cubes of those letters.
pub fn attach_constraints(shape: &Regex<String>, alphabet: &[Letter]) -> Result<Lse> {
    let mut used = vec![false; alphabet.len()];
    for name in shape.symbols() {
        let idx = alphabet
            .iter()
            .position(|l| &l.name == name)
            .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
        used[idx] = true;
    }
    let mut constraints = Vec::new();
    for letter in alphabet.iter().zip(&used).filter(|(_, &u)| u).map(|(l, _)| l) {
        let atom = LineAtom::for_letter(&letter.name);
        for (param, interval) in [
            (atom.a, letter.cube.a),
            (atom.b, letter.cube.b),
            (atom.d, letter.cube.d),
        ] {
            constraints.push(Constraint { param, interval });
        }
    }
    Ok(Lse {
        shape: shape.map(&mut |name: &String| LineAtom::for_letter(name)),
        constraints,
    })
}

const UNION: u8 = 0;
const CONCAT: u8 = 1;
const ATOM: u8 = 3;

/// Concrete syntax of `lse`.
///
/// Interval bounds are printed with six significant digits, rounding lower
/// bounds down and upper bounds up so the printed interval always contains
/// the exact one.
pub fn render_lse(lse: &Lse) -> String {
    let mut out = render_shape(&lse.shape);
    if !lse.constraints.is_empty() {
        out.push_str(" : ");
        for (k, c) in lse.constraints.iter().enumerate() {
            if k > 0 {
                out.push_str(" and ");
            }
            let _ = write!(
                out,
                "{} in [{}, {}]",
                c.param,
                format_bound(c.interval.lo, Rounding::Down),
                format_bound(c.interval.hi, Rounding::Up)
            );
        }
    }
    out
}

pub fn render_shape(shape: &Regex<LineAtom>) -> String {
    let mut out = String::new();
    write_shape(&mut out, shape, UNION);
    out
}

fn precedence<S>(r: &Regex<S>) -> u8 {
    match r {
        Regex::Union(..) => UNION,
        Regex::Concat(..) => CONCAT,
        _ => ATOM,
    }
}

fn write_shape(out: &mut String, r: &Regex<LineAtom>, min_prec: u8) {
    let prec = precedence(r);
    let wrap = prec < min_prec;
    if wrap {
        out.push('(');
    }
    match r {
        Regex::Empty => out.push_str("empty"),
        Regex::Epsilon => out.push_str("eps"),
        Regex::Symbol(atom) => {
            let _ = write!(out, "{atom}");
        }
        Regex::Union(l, r) => {
            write_shape(out, l, UNION);
            out.push_str(" + ");
            // right operand of the same operator is parenthesized so that the
            // left-associative parse reproduces the tree
            write_shape(out, r, CONCAT);
        }
        Regex::Concat(l, r) => {
            write_shape(out, l, CONCAT);
            out.push_str(" . ");
            write_shape(out, r, ATOM);
        }
        Regex::Star(e) => {
            out.push('(');
            write_shape(out, e, UNION);
            out.push_str(")*");
        }
    }
    if wrap {
        out.push(')');
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
}

/// Rounds `x` to six significant digits in the given direction.
pub fn round_sig6(x: f64, dir: Rounding) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x + 0.0;
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let mut digits: i64 = mantissa.replace('.', "").parse().expect("mantissa");
    let nearest: f64 = sci.parse().expect("round trip");
    match dir {
        Rounding::Down if nearest > x => digits -= 1,
        Rounding::Up if nearest < x => digits += 1,
        _ => {}
    }
    let mut exp = exp - 5;
    if digits.abs() < 100_000 {
        // stepped down from 1.00000eN; keep six digits
        digits = digits * 10 + digits.signum() * 9;
        exp -= 1;
    }
    let rounded: f64 = format!("{digits}e{exp}").parse().expect("decimal");
    rounded + 0.0
}

/// Decimal text of a rounded bound; infinite bounds print as `inf`/`-inf`.
pub fn format_bound(x: f64, dir: Rounding) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{}", round_sig6(x, dir))
}
