use std::collections::BTreeMap;
use std::fmt;

use crate::term::{Atom, Symbol, Term};

/// A finite simultaneous substitution `{X1/t1, ..., Xn/tn}`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    bindings: BTreeMap<Symbol, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `x` to `t`. Self-bindings `X/X` are dropped.
    pub fn bind(&mut self, x: Symbol, t: Term) {
        if matches!(&t, Term::Var(v) if *v == x) {
            self.bindings.remove(&x);
        } else {
            self.bindings.insert(x, t);
        }
    }

    pub fn with(mut self, x: &str, t: Term) -> Self {
        self.bind(Symbol::new(x), t);
        self
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.bindings.get(x)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Term)> {
        self.bindings.iter()
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(x) => self.bindings.get(x).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|t| self.apply(t)).collect(),
        }
    }

    /// One-way matching of `pattern` against a ground `target`, extending the
    /// current bindings. On failure the bindings may be partially extended.
    pub fn match_term(&mut self, pattern: &Term, target: &Term) -> bool {
        match pattern {
            Term::Var(x) => match self.bindings.get(x) {
                Some(bound) => bound == target,
                None => {
                    self.bindings.insert(x.clone(), target.clone());
                    true
                }
            },
            Term::App(f, ps) => match target {
                Term::App(g, ts) if f == g && ps.len() == ts.len() => {
                    ps.iter().zip(ts).all(|(p, t)| self.match_term(p, t))
                }
                _ => false,
            },
        }
    }

    pub fn match_atom(&mut self, pattern: &Atom, target: &Atom) -> bool {
        pattern.pred == target.pred
            && pattern.args.len() == target.args.len()
            && pattern
                .args
                .iter()
                .zip(&target.args)
                .all(|(p, t)| self.match_term(p, t))
    }
}

impl FromIterator<(Symbol, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Symbol, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (x, t) in iter {
            s.bind(x, t);
        }
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}/{t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Applies `theta` to `t` simultaneously.
pub fn apply_substitution(t: &Term, theta: &Substitution) -> Term {
    theta.apply(t)
}
