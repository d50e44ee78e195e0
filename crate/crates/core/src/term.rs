//! Finite first-order terms and atoms as labeled ordered trees.

use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// An interned-by-value name. Cloning is a reference-count bump.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Variables start with an uppercase letter or `_`.
    pub fn is_variable_name(&self) -> bool {
        self.0
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_uppercase() || c == '_')
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl Borrow<str> for Symbol {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite term. Constants are applications with no arguments.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Symbol),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Symbol::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(Symbol::new(name), Vec::new())
    }

    pub fn app(head: &str, args: Vec<Term>) -> Term {
        Term::App(Symbol::new(head), args)
    }

    /// `f` applied `n` times around `seed`.
    pub fn iterate(f: &Symbol, n: usize, seed: Term) -> Term {
        (0..n).fold(seed, |t, _| Term::App(f.clone(), vec![t]))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    /// Leaves have depth 1; an application is one deeper than its deepest argument.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Root label equality: same variable, or same symbol with the same arity.
    pub fn same_root(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Var(x), Term::Var(y)) => x == y,
            (Term::App(f, xs), Term::App(g, ys)) => f == g && xs.len() == ys.len(),
            _ => false,
        }
    }

    /// True iff the two trees coincide on every node at depth `<= m` (root at depth 1).
    pub fn same_to_depth(&self, other: &Term, m: usize) -> bool {
        if m == 0 {
            return true;
        }
        if !self.same_root(other) {
            return false;
        }
        m == 1
            || self
                .args()
                .iter()
                .zip(other.args())
                .all(|(s, t)| s.same_to_depth(t, m - 1))
    }

    /// Number of edges from the root to the shallowest occurrence of `x`.
    pub fn least_var_depth(&self, x: &str) -> Option<usize> {
        match self {
            Term::Var(v) => (v.as_str() == x).then_some(0),
            Term::App(_, args) => args
                .iter()
                .filter_map(|a| a.least_var_depth(x))
                .min()
                .map(|d| d + 1),
        }
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Every subterm, the term itself included, in pre-order.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            stack.extend(t.args().iter().rev());
        }
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(h, args) => write_app(f, h, args),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn write_app(f: &mut fmt::Formatter<'_>, head: &Symbol, args: &[Term]) -> fmt::Result {
    write!(f, "{head}")?;
    if !args.is_empty() {
        f.write_str("(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")?;
    }
    Ok(())
}

/// An atomic formula `p(t1,...,tn)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom {
            pred: Symbol::new(pred),
            args,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    /// Depth of the deepest argument; `0` for a propositional atom.
    pub fn depth(&self) -> usize {
        self.args.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn variables(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.args.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }

    /// The atom viewed as a term whose root is the predicate symbol.
    pub fn as_term(&self) -> Term {
        Term::App(self.pred.clone(), self.args.clone())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_app(f, &self.pred, &self.args)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Symbol/arity table shared by function symbols and predicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub functions: BTreeMap<Symbol, usize>,
    pub predicates: BTreeMap<Symbol, usize>,
}

/// Why a symbol could not be registered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignatureConflict {
    Arity { expected: usize, found: usize },
    /// Used both as a predicate and as a function symbol.
    Kind,
}

impl Signature {
    pub fn add_function(&mut self, f: &Symbol, arity: usize) -> Result<(), SignatureConflict> {
        if self.predicates.contains_key(f) {
            return Err(SignatureConflict::Kind);
        }
        register(&mut self.functions, f, arity)
    }

    pub fn add_predicate(&mut self, p: &Symbol, arity: usize) -> Result<(), SignatureConflict> {
        if self.functions.contains_key(p) {
            return Err(SignatureConflict::Kind);
        }
        register(&mut self.predicates, p, arity)
    }

    pub fn add_term(&mut self, t: &Term) -> Result<(), (Symbol, SignatureConflict)> {
        if let Term::App(f, args) = t {
            self.add_function(f, args.len()).map_err(|e| (f.clone(), e))?;
            for a in args {
                self.add_term(a)?;
            }
        }
        Ok(())
    }

    pub fn add_atom(&mut self, a: &Atom) -> Result<(), (Symbol, SignatureConflict)> {
        self.add_predicate(&a.pred, a.args.len())
            .map_err(|e| (a.pred.clone(), e))?;
        a.args.iter().try_for_each(|t| self.add_term(t))
    }

    pub fn constants(&self) -> impl Iterator<Item = &Symbol> {
        self.functions
            .iter()
            .filter(|(_, &n)| n == 0)
            .map(|(s, _)| s)
    }
}

fn register(
    table: &mut BTreeMap<Symbol, usize>,
    s: &Symbol,
    arity: usize,
) -> Result<(), SignatureConflict> {
    match table.get(s) {
        Some(&expected) if expected != arity => Err(SignatureConflict::Arity {
            expected,
            found: arity,
        }),
        Some(_) => Ok(()),
        None => {
            table.insert(s.clone(), arity);
            Ok(())
        }
    }
}
