//! Independent oracles shared by the integration and acceptance tests.
//!
//! Nothing here calls the library's matching, substitution, or fixpoint code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use herbrand_limits::{Atom, Clause, Program, Term};
use num_bigint::BigInt;
use num_rational::BigRational;

/// All ground terms over `{a/0, b/0, f/1, g/2}` with depth at most `depth` (leaves have depth 1).
pub fn all_terms(depth: usize) -> Vec<Term> {
    let mut levels: Vec<Vec<Term>> = Vec::new();
    let mut all: Vec<Term> = Vec::new();
    for d in 1..=depth {
        let level: Vec<Term> = if d == 1 {
            vec![Term::constant("a"), Term::constant("b")]
        } else {
            let below = all.clone();
            let prev = &levels[d - 2];
            let mut out = Vec::new();
            for t in prev {
                out.push(Term::app("f", vec![t.clone()]));
            }
            for s in &below {
                for t in &below {
                    if prev.contains(s) || prev.contains(t) {
                        out.push(Term::app("g", vec![s.clone(), t.clone()]));
                    }
                }
            }
            out
        };
        all.extend(level.iter().cloned());
        levels.push(level);
    }
    all
}

/// Tree depth, leaves counted as 1.
pub fn tree_depth(t: &Term) -> usize {
    match t {
        Term::Var(_) => 1,
        Term::App(_, args) => 1 + args.iter().map(tree_depth).max().unwrap_or(0),
    }
}

/// Greatest depth to which two trees coincide; `None` when equal.
pub fn coincide_depth(s: &Term, t: &Term) -> Option<usize> {
    if s == t {
        return None;
    }
    match (s, t) {
        (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
            let d = xs
                .iter()
                .zip(ys)
                .filter_map(|(x, y)| coincide_depth(x, y))
                .min()
                .expect("unequal trees with equal roots differ below");
            Some(d + 1)
        }
        _ => Some(0),
    }
}

/// Replaces variables by the given ground terms.
pub fn ground(t: &Term, env: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(x) => env[x.as_str()].clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| ground(a, env)).collect()),
    }
}

pub fn ground_atom(a: &Atom, env: &BTreeMap<String, Term>) -> Atom {
    Atom {
        pred: a.pred.clone(),
        args: a.args.iter().map(|t| ground(t, env)).collect(),
    }
}

fn collect_names(t: &Term, out: &mut Vec<String>, consts: &mut Vec<String>, unary: &mut bool) {
    match t {
        Term::Var(x) => {
            if !out.contains(&x.as_str().to_string()) {
                out.push(x.as_str().to_string());
            }
        }
        Term::App(f, args) if args.is_empty() => {
            if !consts.contains(&f.as_str().to_string()) {
                consts.push(f.as_str().to_string());
            }
        }
        Term::App(_, args) => {
            *unary = true;
            for a in args {
                collect_names(a, out, consts, unary);
            }
        }
    }
}

/// Brute-force least model of a program over unary predicates `p, q, r`,
/// constants, and unary `f`, at depth bound 2.
///
/// Returns the ground base and the least model as a bitmask over it.
pub struct BruteForce {
    pub base: Vec<Atom>,
    /// `(head, body)` as indices into `base`.
    pub rules: Vec<(usize, Vec<usize>)>,
}

impl BruteForce {
    pub fn new(program: &Program) -> Self {
        let mut consts = Vec::new();
        let mut has_f = false;
        let mut dummy = Vec::new();
        for c in program.clauses() {
            for a in std::iter::once(&c.head).chain(&c.body) {
                for t in &a.args {
                    collect_names(t, &mut dummy, &mut consts, &mut has_f);
                }
            }
        }
        consts.sort();
        let mut universe: Vec<Term> = consts.iter().map(|c| Term::constant(c)).collect();
        if has_f {
            let base: Vec<Term> = universe.clone();
            universe.extend(base.into_iter().map(|t| Term::app("f", vec![t])));
        }
        let base: Vec<Atom> = ["p", "q", "r"]
            .iter()
            .flat_map(|p| universe.iter().map(move |t| Atom::new(p, vec![t.clone()])))
            .collect();
        let index = |a: &Atom| base.iter().position(|b| b == a);

        let mut rules = Vec::new();
        for c in program.clauses() {
            let mut vars = Vec::new();
            let mut sink = Vec::new();
            let mut f = false;
            for a in std::iter::once(&c.head).chain(&c.body) {
                for t in &a.args {
                    collect_names(t, &mut vars, &mut sink, &mut f);
                }
            }
            for env in assignments(&vars, &universe) {
                let Some(h) = index(&ground_atom(&c.head, &env)) else {
                    continue;
                };
                let body: Option<Vec<usize>> =
                    c.body.iter().map(|b| index(&ground_atom(b, &env))).collect();
                if let Some(body) = body {
                    rules.push((h, body));
                }
            }
        }
        BruteForce { base, rules }
    }

    pub fn is_model(&self, mask: u32) -> bool {
        self.rules.iter().all(|(h, body)| {
            !body.iter().all(|&b| mask & (1 << b) != 0) || mask & (1 << h) != 0
        })
    }

    /// Intersection of every model among all subsets of the base.
    pub fn least(&self) -> u32 {
        assert!(self.base.len() <= 12);
        let full = (1u32 << self.base.len()) - 1;
        (0..=full).filter(|&m| self.is_model(m)).fold(full, |acc, m| acc & m)
    }

    pub fn atoms(&self, mask: u32) -> Vec<Atom> {
        (0..self.base.len())
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| self.base[i].clone())
            .collect()
    }
}

fn assignments(vars: &[String], universe: &[Term]) -> Vec<BTreeMap<String, Term>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|env| {
                universe.iter().map(move |t| {
                    let mut e = env.clone();
                    e.insert(v.clone(), t.clone());
                    e
                })
            })
            .collect();
    }
    out
}

/// `Σ_{i=0..n} x^i / i!`, each term obtained from the previous by `· x / i`.
pub fn exp_series(x: &BigRational, n: usize) -> BigRational {
    let mut term = BigRational::from_integer(BigInt::from(1));
    let mut sum = term.clone();
    for i in 1..=n {
        term = term * x / BigRational::from_integer(BigInt::from(i));
        sum += term.clone();
    }
    sum
}

pub fn clause_vars(c: &Clause) -> Vec<String> {
    c.variables().iter().map(|s| s.as_str().to_string()).collect()
}

pub mod strategies {
    use herbrand_limits::Term;
    use proptest::prelude::*;

    /// Ground terms over `{a, b, f/1, g/2}`.
    pub fn ground_term(depth: u32) -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![Just(Term::constant("a")), Just(Term::constant("b"))];
        leaf.prop_recursive(depth, 64, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| Term::app("f", vec![t])),
                (inner.clone(), inner).prop_map(|(s, t)| Term::app("g", vec![s, t])),
            ]
        })
    }

    /// Terms over `{a, b, f/1, g/2}` and variables `X, Y`.
    pub fn open_term(depth: u32) -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::constant("a")),
            Just(Term::var("X")),
            Just(Term::var("Y")),
        ];
        leaf.prop_recursive(depth, 64, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| Term::app("f", vec![t])),
                (inner.clone(), inner).prop_map(|(s, t)| Term::app("g", vec![s, t])),
            ]
        })
    }
}
