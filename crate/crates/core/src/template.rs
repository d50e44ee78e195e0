//! Index-parameterised term, atom and clause templates.
//!
//! A template may contain `iter(f, count, t)` nodes whose count refers to the
//! family index `@k`. Instantiating at `k` expands every `iter` node.

use std::fmt;

use num_integer::Integer;

use crate::horn::Clause;
use crate::term::{Atom, Symbol, Term};

/// The repetition count of an `iter` node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CountExpr {
    Lit(u64),
    /// `@k`, `@k + c`, `@k mod n` or `@k mod n + c`.
    Index { modulus: Option<u64>, offset: u64 },
}

impl CountExpr {
    pub fn eval(&self, k: u64) -> u64 {
        match *self {
            CountExpr::Lit(n) => n,
            CountExpr::Index { modulus, offset } => modulus.map_or(k, |n| k % n) + offset,
        }
    }
}

impl fmt::Display for CountExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountExpr::Lit(n) => write!(f, "{n}"),
            CountExpr::Index { modulus, offset } => {
                f.write_str("@k")?;
                if let Some(n) = modulus {
                    write!(f, " mod {n}")?;
                }
                if *offset > 0 {
                    write!(f, "+{offset}")?;
                }
                Ok(())
            }
        }
    }
}

/// How a template's instances vary with the index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexDependence {
    /// Same instance for every `k`.
    Free,
    /// Instances repeat with the given period.
    Periodic(u64),
    /// Distinct `k` give distinct instances.
    Injective,
}

impl IndexDependence {
    fn join(self, other: IndexDependence) -> IndexDependence {
        use IndexDependence::*;
        match (self, other) {
            (Injective, _) | (_, Injective) => Injective,
            (Periodic(a), Periodic(b)) => Periodic(a.lcm(&b)),
            (Periodic(p), Free) | (Free, Periodic(p)) => Periodic(p),
            (Free, Free) => Free,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermTemplate {
    Var(Symbol),
    App(Symbol, Vec<TermTemplate>),
    Iter {
        f: Symbol,
        count: CountExpr,
        body: Box<TermTemplate>,
    },
}

impl TermTemplate {
    pub fn instantiate(&self, k: u64) -> Term {
        match self {
            TermTemplate::Var(x) => Term::Var(x.clone()),
            TermTemplate::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.instantiate(k)).collect())
            }
            TermTemplate::Iter { f, count, body } => {
                Term::iterate(f, count.eval(k) as usize, body.instantiate(k))
            }
        }
    }

    pub fn dependence(&self) -> IndexDependence {
        match self {
            TermTemplate::Var(_) => IndexDependence::Free,
            TermTemplate::App(_, args) => args
                .iter()
                .fold(IndexDependence::Free, |d, a| d.join(a.dependence())),
            TermTemplate::Iter { count, body, .. } => {
                let own = match count {
                    CountExpr::Lit(_) => IndexDependence::Free,
                    CountExpr::Index { modulus: None, .. } => IndexDependence::Injective,
                    CountExpr::Index {
                        modulus: Some(n), ..
                    } => IndexDependence::Periodic(*n),
                };
                own.join(body.dependence())
            }
        }
    }
}

impl fmt::Display for TermTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermTemplate::Var(x) => write!(f, "{x}"),
            TermTemplate::App(h, args) => {
                write!(f, "{h}")?;
                write_args(f, args)
            }
            TermTemplate::Iter { f: g, count, body } => write!(f, "iter({g}, {count}, {body})"),
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[TermTemplate]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomTemplate {
    pub pred: Symbol,
    pub args: Vec<TermTemplate>,
}

impl AtomTemplate {
    pub fn instantiate(&self, k: u64) -> Atom {
        Atom {
            pred: self.pred.clone(),
            args: self.args.iter().map(|a| a.instantiate(k)).collect(),
        }
    }

    pub fn dependence(&self) -> IndexDependence {
        self.args
            .iter()
            .fold(IndexDependence::Free, |d, a| d.join(a.dependence()))
    }
}

impl fmt::Display for AtomTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        write_args(f, &self.args)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClauseTemplate {
    pub head: AtomTemplate,
    pub body: Vec<AtomTemplate>,
    /// 1-based source line, for diagnostics.
    pub line: usize,
}

impl ClauseTemplate {
    pub fn instantiate(&self, k: u64) -> Clause {
        Clause {
            head: self.head.instantiate(k),
            body: self.body.iter().map(|a| a.instantiate(k)).collect(),
        }
    }

    pub fn dependence(&self) -> IndexDependence {
        self.body
            .iter()
            .fold(self.head.dependence(), |d, a| d.join(a.dependence()))
    }

    pub fn is_index_free(&self) -> bool {
        self.dependence() == IndexDependence::Free
    }
}

impl fmt::Display for ClauseTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, b) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{b}")?;
        }
        f.write_str(".")
    }
}
