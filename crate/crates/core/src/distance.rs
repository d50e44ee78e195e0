//! The tree ultrametric on finite terms and atoms.
//!
//! Distances live in `{0} ∪ {1/m : m >= 1}` and are kept symbolic: a
//! distance is either [`Distance::Zero`] or [`Distance::Recip`] of a positive
//! integer. Two trees that coincide exactly down to depth `d` (root at depth
//! 1) and differ somewhere at depth `d + 1` are at distance `1/(d+1)`.

use std::cmp::Ordering;
use std::fmt;
use std::num::NonZeroU64;
use std::str::FromStr;

use crate::term::{Atom, Term};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distance {
    Zero,
    /// `1/m`.
    Recip(NonZeroU64),
}

impl Distance {
    pub const ONE: Distance = Distance::Recip(NonZeroU64::MIN);

    /// `1/m`. Panics on `m == 0`.
    pub fn recip(m: u64) -> Distance {
        Distance::Recip(NonZeroU64::new(m).expect("1/0 is not a distance"))
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Distance::Zero)
    }

    /// The denominator `m` of `1/m`, or `None` for zero.
    pub fn denominator(self) -> Option<u64> {
        match self {
            Distance::Zero => None,
            Distance::Recip(m) => Some(m.get()),
        }
    }

    /// `D / (D + 1)`: zero stays zero, `1/m` becomes `1/(m+1)`.
    pub fn wrap(self) -> Distance {
        match self {
            Distance::Zero => Distance::Zero,
            Distance::Recip(m) => Distance::Recip(m.saturating_add(1)),
        }
    }

    /// Wrap `n` times.
    pub fn wrap_n(self, n: u64) -> Distance {
        match self {
            Distance::Zero => Distance::Zero,
            Distance::Recip(m) => Distance::Recip(m.saturating_add(n)),
        }
    }

    /// `self < 1/m`.
    pub fn below(self, m: u64) -> bool {
        match self {
            Distance::Zero => true,
            Distance::Recip(d) => d.get() > m,
        }
    }

    /// `self <= 1/m`.
    pub fn at_most(self, m: u64) -> bool {
        match self {
            Distance::Zero => true,
            Distance::Recip(d) => d.get() >= m,
        }
    }

    /// Exact value as a rational pair `(num, den)`.
    pub fn as_fraction(self) -> (u64, u64) {
        match self {
            Distance::Zero => (0, 1),
            Distance::Recip(m) => (1, m.get()),
        }
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Distance::Zero, Distance::Zero) => Ordering::Equal,
            (Distance::Zero, _) => Ordering::Less,
            (_, Distance::Zero) => Ordering::Greater,
            // larger denominator, smaller distance
            (Distance::Recip(a), Distance::Recip(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => f.write_str("0"),
            Distance::Recip(m) => write!(f, "1/{m}"),
        }
    }
}

impl fmt::Debug for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a distance: `{0}` (expected `0` or `1/m` with m >= 1)")]
pub struct ParseDistanceError(String);

impl FromStr for Distance {
    type Err = ParseDistanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(Distance::Zero);
        }
        s.strip_prefix("1/")
            .and_then(|m| m.parse::<NonZeroU64>().ok())
            .map(Distance::Recip)
            .ok_or_else(|| ParseDistanceError(s.to_string()))
    }
}

/// Distance between two finite terms.
///
/// Different root labels (symbol, arity, or distinct variables, or a variable
/// against an application) are at distance 1. Equal roots take the maximum
/// child distance `D` and return `D/(D+1)`.
pub fn distance(s: &Term, t: &Term) -> Distance {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) if x == y => Distance::Zero,
        (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
            args_distance(xs, ys).wrap()
        }
        _ => Distance::ONE,
    }
}

fn args_distance(xs: &[Term], ys: &[Term]) -> Distance {
    xs.iter()
        .zip(ys)
        .map(|(x, y)| distance(x, y))
        .max()
        .unwrap_or(Distance::Zero)
}

/// Atoms are compared as trees rooted at their predicate symbol.
pub fn atom_distance(p: &Atom, q: &Atom) -> Distance {
    if p.pred != q.pred || p.args.len() != q.args.len() {
        return Distance::ONE;
    }
    args_distance(&p.args, &q.args).wrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_atom, parse_term};

    fn d(s: &str, t: &str) -> Distance {
        distance(&parse_term(s).unwrap(), &parse_term(t).unwrap())
    }

    #[test]
    fn distance_examples() {
        assert_eq!(d("f(a)", "f(a)"), Distance::Zero);
        assert_eq!(d("f(a)", "g(a,b)"), Distance::recip(1));
        assert_eq!(d("f(a)", "f(b)"), Distance::recip(2));
        assert_eq!(d("f(f(a))", "f(f(b))"), Distance::recip(3));
    }

    #[test]
    fn variables_are_distinct_heads() {
        assert_eq!(d("X", "X"), Distance::Zero);
        assert_eq!(d("X", "Y"), Distance::ONE);
        assert_eq!(d("X", "a"), Distance::ONE);
        assert_eq!(d("f(X)", "f(Y)"), Distance::recip(2));
    }

    #[test]
    fn arity_mismatch_is_a_different_head() {
        assert_eq!(
            distance(
                &Term::app("f", vec![Term::constant("a")]),
                &Term::app("f", vec![Term::constant("a"), Term::constant("a")])
            ),
            Distance::ONE
        );
    }

    #[test]
    fn atom_distance_examples() {
        let a = |s: &str| parse_atom(s).unwrap();
        assert_eq!(atom_distance(&a("p(a)"), &a("p(a)")), Distance::Zero);
        assert_eq!(atom_distance(&a("p(a)"), &a("q(a)")), Distance::ONE);
        assert_eq!(
            atom_distance(&a("p(f(a))"), &a("p(f(f(a)))")),
            Distance::recip(3)
        );
        assert_eq!(atom_distance(&a("p(a)"), &a("p(a,a)")), Distance::ONE);
    }

    #[test]
    fn ordering_is_by_value() {
        assert!(Distance::Zero < Distance::recip(100));
        assert!(Distance::recip(3) < Distance::recip(2));
        assert_eq!(
            Distance::recip(2).max(Distance::recip(5)),
            Distance::recip(2)
        );
        assert!(Distance::recip(5).below(4));
        assert!(!Distance::recip(4).below(4));
        assert!(Distance::recip(4).at_most(4));
    }

    #[test]
    fn render_and_parse() {
        assert_eq!(Distance::Zero.to_string(), "0");
        assert_eq!(Distance::recip(7).to_string(), "1/7");
        assert_eq!("1/7".parse::<Distance>().unwrap(), Distance::recip(7));
        assert_eq!("0".parse::<Distance>().unwrap(), Distance::Zero);
        assert!("1/0".parse::<Distance>().is_err());
        assert!("2/3".parse::<Distance>().is_err());
    }
}
