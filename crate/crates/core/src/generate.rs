//! Seeded random generators for clauses, small programs, and program families.
//!
//! All generators draw from a caller-supplied RNG so runs are reproducible.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::horn::{body_subterm_violations, Clause, Program};
use crate::limits::ProgramFamily;
use crate::subst::Substitution;
use crate::syntax::parse_family;
use crate::term::{Atom, Symbol, Term};

/// Random ground term over `{a/0, b/0, f/1, g/2}` of depth at most `max_depth`.
pub fn ground_term<R: Rng>(rng: &mut R, max_depth: usize) -> Term {
    if max_depth <= 1 || rng.gen_bool(0.3) {
        return Term::constant(["a", "b"][rng.gen_range(0..2)]);
    }
    if rng.gen_bool(0.6) {
        Term::app("f", vec![ground_term(rng, max_depth - 1)])
    } else {
        Term::app(
            "g",
            vec![ground_term(rng, max_depth - 1), ground_term(rng, max_depth - 1)],
        )
    }
}

/// Random term over `{a, b, f/1, g/2}` and the given variables.
pub fn open_term<R: Rng>(rng: &mut R, vars: &[&str], max_depth: usize) -> Term {
    if max_depth <= 1 || rng.gen_bool(0.35) {
        return if rng.gen_bool(0.75) {
            Term::var(vars.choose(rng).expect("at least one variable"))
        } else {
            Term::constant(["a", "b"][rng.gen_range(0..2)])
        };
    }
    if rng.gen_bool(0.6) {
        Term::app("f", vec![open_term(rng, vars, max_depth - 1)])
    } else {
        Term::app(
            "g",
            vec![
                open_term(rng, vars, max_depth - 1),
                open_term(rng, vars, max_depth - 1),
            ],
        )
    }
}

/// A range-restricted clause whose body terms all occur in its head.
///
/// The head is drawn first; body arguments are subterms of the head.
pub fn body_subterm_clause<R: Rng>(rng: &mut R) -> Clause {
    loop {
        let vars = ["X", "Y"];
        let head_arity = rng.gen_range(1..=2);
        let head = Atom::new(
            "r",
            (0..head_arity).map(|_| open_term(rng, &vars, 3)).collect(),
        );
        let pool: Vec<Term> = head
            .args
            .iter()
            .flat_map(|t| t.subterms().into_iter().cloned())
            .collect();
        let body: Vec<Atom> = (0..rng.gen_range(1..=2))
            .map(|i| {
                let arity = rng.gen_range(1..=2);
                Atom::new(
                    ["q", "s"][i],
                    (0..arity).map(|_| pool.choose(rng).unwrap().clone()).collect(),
                )
            })
            .collect();
        let clause = Clause::rule(head, body);
        let body_vars: Vec<Symbol> = clause.body.iter().flat_map(Atom::variables).collect();
        let range_restricted = clause.head.variables().iter().all(|x| body_vars.contains(x));
        if range_restricted && body_subterm_violations(&Program::new(vec![clause.clone()])).is_empty() {
            return clause;
        }
    }
}

/// Two independent ground substitutions for the variables of `clause`.
pub fn substitution_pair<R: Rng>(rng: &mut R, clause: &Clause, max_depth: usize) -> (Substitution, Substitution) {
    let mut draw = || {
        clause
            .variables()
            .into_iter()
            .map(|x| (x, ground_term(rng, max_depth)))
            .collect::<Substitution>()
    };
    let s1 = draw();
    let s2 = draw();
    (s1, s2)
}

/// A small program over constants `a, b`, unary `f`, and unary predicates `p, q, r`.
///
/// At depth bound 2 its ground base has exactly 12 atoms.
pub fn small_program<R: Rng>(rng: &mut R) -> Program {
    let preds = ["p", "q", "r"];
    let simple = |rng: &mut R, allow_var: bool| -> Term {
        let base = if allow_var && rng.gen_bool(0.7) {
            Term::var("X")
        } else {
            Term::constant(["a", "b"][rng.gen_range(0..2)])
        };
        if rng.gen_bool(0.3) {
            Term::app("f", vec![base])
        } else {
            base
        }
    };
    let mut clauses = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let head = Atom::new(preds.choose(rng).unwrap(), vec![simple(rng, false)]);
        clauses.push(Clause::fact(head));
    }
    for _ in 0..rng.gen_range(1..=4) {
        let body = (0..rng.gen_range(1..=2))
            .map(|_| Atom::new(preds.choose(rng).unwrap(), vec![simple(rng, true)]))
            .collect();
        // head-only variables are allowed and range over the universe
        let head = Atom::new(preds.choose(rng).unwrap(), vec![simple(rng, true)]);
        clauses.push(Clause::rule(head, body));
    }
    Program::new(clauses)
}

/// Source text of a family made of a fixed index-free rule set and one fact stream.
///
/// The stream is `p(iter(f, @k, s))` for a seed constant `s`. The rule set may
/// contain `p(f(X)) :- p(X).` and defines one to three derived predicates
/// layered over `p`. Each derived rule reads one or two earlier predicates,
/// with arguments that are variables or `f(var)`, and builds a head whose
/// arguments contain every body argument, so each body term occurs in the head.
/// A unary derived predicate whose rule heads are all `q(X)` or `q(f(X))` may
/// also carry `q(f(X)) :- q(X).` Recursion over other head shapes is left
/// out: atoms such as `q(f^j(g(f^k(a), a)))` grow in two independent
/// directions, and the depth bound cuts consecutive models unevenly.
///
/// Every argument position tracks an offset `o`: in `M_k` its shallowest
/// stream-carrying value has depth `k + o` (the stream argument has `o = 1`).
/// Rules whose heads would exceed `growth_budget + 1` are redrawn. Sampling
/// `Γ_1..Γ_H` at depth bound `d` needs `growth_budget <= d - H - 1`: otherwise
/// atoms derived from the shallowest stream atom fit under the bound at one
/// index and not the next, and truncation alone separates consecutive models.
pub fn family_source<R: Rng>(rng: &mut R, growth_budget: i64) -> String {
    let seed = ["a", "b"][rng.gen_range(0..2)];
    let mut lines = vec![format!("p(iter(f, @k, {seed})).")];
    if rng.gen_bool(0.6) {
        lines.push("p(f(X)) :- p(X).".to_string());
    }
    let mut preds: Vec<Pred> = vec![Pred {
        name: "p".into(),
        offsets: vec![Some(1)],
        chain: true,
    }];
    for i in 1..=rng.gen_range(1..=3) {
        let name = format!("q{i}");
        let arity = rng.gen_range(1..=2);
        let mut offsets: Vec<Option<i64>> = vec![None; arity];
        let mut chain_heads = arity == 1;
        for _ in 0..rng.gen_range(1..=2) {
            let (clause, rule_offsets) = loop {
                let clause = derived_rule(rng, &name, arity, &preds);
                let o = head_offsets(&clause, &preds);
                if o.iter().flatten().all(|&o| o <= growth_budget + 1) {
                    break (clause, o);
                }
            };
            chain_heads &= is_chain_rule(&clause, &preds);
            for (acc, o) in offsets.iter_mut().zip(rule_offsets) {
                *acc = (*acc).max(o);
            }
            lines.push(clause.to_string());
        }
        if chain_heads && rng.gen_bool(0.4) {
            lines.push(format!("{name}(f(X)) :- {name}(X)."));
        }
        preds.push(Pred {
            name,
            offsets,
            chain: chain_heads,
        });
    }
    lines.join("\n") + "\n"
}

struct Pred {
    name: String,
    /// Per argument; `None` when the argument never carries the stream.
    offsets: Vec<Option<i64>>,
    /// Unary, with every value an `f`-chain over the stream.
    chain: bool,
}

fn is_chain_over_var(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(f, args) => f.as_str() == "f" && matches!(args.as_slice(), [Term::Var(_)]),
    }
}

/// `q(X)` or `q(f(X))` with `X` read only from `f`-chain predicates.
fn is_chain_rule(clause: &Clause, preds: &[Pred]) -> bool {
    let [head_arg] = clause.head.args.as_slice() else {
        return false;
    };
    if !is_chain_over_var(head_arg) {
        return false;
    }
    let x = &head_arg.variables()[0];
    clause
        .body
        .iter()
        .filter(|a| a.variables().contains(x))
        .all(|a| preds.iter().any(|p| p.name == a.pred.as_str() && p.chain))
}

/// Deepest position of `x` in `t`, counting `t` itself as depth 0.
fn max_var_depth(t: &Term, x: &Symbol) -> Option<usize> {
    match t {
        Term::Var(y) => (y == x).then_some(0),
        Term::App(_, args) => args.iter().filter_map(|a| max_var_depth(a, x)).max().map(|d| d + 1),
    }
}

fn head_offsets(clause: &Clause, preds: &[Pred]) -> Vec<Option<i64>> {
    // a variable's binding is at least as deep as every occurrence forces
    let mut var_offset: std::collections::BTreeMap<Symbol, i64> = Default::default();
    for atom in &clause.body {
        let pred = preds
            .iter()
            .find(|p| p.name == atom.pred.as_str())
            .expect("body predicates are defined earlier");
        for (arg, off) in atom.args.iter().zip(&pred.offsets) {
            let Some(o) = off else { continue };
            for x in arg.variables() {
                let b = max_var_depth(arg, &x).unwrap_or(0) as i64;
                let e = var_offset.entry(x).or_insert(i64::MIN);
                *e = (*e).max(o - b);
            }
        }
    }
    clause
        .head
        .args
        .iter()
        .map(|arg| {
            arg.variables()
                .iter()
                .filter_map(|x| {
                    let o = *var_offset.get(x)?;
                    Some(max_var_depth(arg, x).unwrap_or(0) as i64 + o)
                })
                .max()
        })
        .collect()
}

fn derived_rule<R: Rng>(rng: &mut R, name: &str, arity: usize, preds: &[Pred]) -> Clause {
    let vars = ["X", "Y", "Z"];
    let mut body_args: Vec<Term> = Vec::new();
    let mut body = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let pred = preds.choose(rng).unwrap();
        let args: Vec<Term> = (0..pred.offsets.len())
            .map(|_| {
                let v = Term::var(vars.choose(rng).unwrap());
                if rng.gen_bool(0.25) {
                    Term::app("f", vec![v])
                } else {
                    v
                }
            })
            .collect();
        body_args.extend(args.iter().cloned());
        body.push(Atom::new(&pred.name, args));
    }
    body_args.sort();
    body_args.dedup();
    // distribute the body arguments over the head arguments
    let mut slots: Vec<Vec<Term>> = vec![Vec::new(); arity];
    for a in body_args {
        slots[rng.gen_range(0..arity)].push(a);
    }
    let constant = |rng: &mut R| Term::constant(["a", "b"][rng.gen_range(0..2)]);
    let head_args: Vec<Term> = slots
        .into_iter()
        .map(|mut s| {
            s.shuffle(rng);
            let mut t = s.pop().unwrap_or_else(|| constant(rng));
            while let Some(u) = s.pop() {
                t = Term::app("g", vec![t, u]);
            }
            match rng.gen_range(0..4) {
                0 => Term::app("f", vec![t]),
                1 => Term::app("g", vec![t, Term::constant("a")]),
                _ => t,
            }
        })
        .collect();
    Clause::rule(Atom::new(name, head_args), body)
}

/// A parsed family from [`family_source`].
pub fn family<R: Rng>(rng: &mut R, growth_budget: i64) -> (String, ProgramFamily) {
    let src = family_source(rng, growth_budget);
    let fam = parse_family(&src).expect("generated families parse");
    (src, fam)
}
