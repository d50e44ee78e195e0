//! Horn programs evaluated bottom-up over a depth-bounded Herbrand universe.
//!
//! Ground instances are produced by matching clause bodies against the
//! current interpretation. Head variables that do not occur in the body range
//! over every universe term of depth `<= depth_bound`. Both routes produce
//! exactly the instances `head θ` with `body θ ⊆ I` for θ ranging over the
//! bounded universe.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::subst::Substitution;
use crate::term::{Atom, Signature, Symbol, Term};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl Clause {
    pub fn fact(head: Atom) -> Self {
        Clause {
            head,
            body: Vec::new(),
        }
    }

    pub fn rule(head: Atom, body: Vec<Atom>) -> Self {
        Clause { head, body }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn variables(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        for a in std::iter::once(&self.head).chain(&self.body) {
            a.args.iter().for_each(|t| t.collect_vars(&mut out));
        }
        out
    }

    /// Head variables that never occur in the body.
    fn free_head_vars(&self) -> Vec<Symbol> {
        let mut body_vars = Vec::new();
        for a in &self.body {
            a.args.iter().for_each(|t| t.collect_vars(&mut body_vars));
        }
        self.head
            .variables()
            .into_iter()
            .filter(|v| !body_vars.contains(v))
            .collect()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, b) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{b}")?;
        }
        f.write_str(".")
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite Horn program with its symbol table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    clauses: Vec<Clause>,
    signature: Signature,
}

impl Program {
    /// Builds a program, deriving the signature from the clauses.
    ///
    /// Panics if a symbol is used with two arities; programs built from
    /// parsed text are always consistent.
    pub fn new(clauses: Vec<Clause>) -> Self {
        let mut signature = Signature::default();
        for c in &clauses {
            for a in std::iter::once(&c.head).chain(&c.body) {
                if let Err((s, e)) = signature.add_atom(a) {
                    panic!("inconsistent use of `{s}`: {e:?}");
                }
            }
        }
        Program { clauses, signature }
    }

    pub(crate) fn with_signature(clauses: Vec<Clause>, signature: Signature) -> Self {
        Program { clauses, signature }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn contains(&self, c: &Clause) -> bool {
        self.clauses.contains(c)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A finite set of ground atoms, each of depth at most `depth_bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    atoms: BTreeSet<Atom>,
    depth_bound: usize,
}

impl Interpretation {
    pub fn empty(depth_bound: usize) -> Self {
        Interpretation {
            atoms: BTreeSet::new(),
            depth_bound,
        }
    }

    /// Collects the ground atoms within the bound; the rest are dropped.
    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>, depth_bound: usize) -> Self {
        Interpretation {
            atoms: atoms
                .into_iter()
                .filter(|a| a.is_ground() && a.depth() <= depth_bound)
                .collect(),
            depth_bound,
        }
    }

    pub fn depth_bound(&self) -> usize {
        self.depth_bound
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.atoms.contains(a)
    }

    pub fn is_subset(&self, other: &Interpretation) -> bool {
        self.atoms.is_subset(&other.atoms)
    }

    /// Inserts a ground atom; returns false if it was present or exceeds the bound.
    pub fn insert(&mut self, a: Atom) -> bool {
        a.is_ground() && a.depth() <= self.depth_bound && self.atoms.insert(a)
    }

    /// Atoms rendered and sorted lexicographically.
    pub fn sorted_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self.atoms.iter().map(Atom::to_string).collect();
        lines.sort();
        lines
    }

    fn index(&self) -> HashMap<(&Symbol, usize), Vec<&Atom>> {
        let mut idx: HashMap<(&Symbol, usize), Vec<&Atom>> = HashMap::new();
        for a in &self.atoms {
            idx.entry((&a.pred, a.args.len())).or_default().push(a);
        }
        idx
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.sorted_lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Every ground term of depth `<= depth_bound` over the function symbols of `sig`,
/// shallowest first.
pub fn herbrand_universe(sig: &Signature, depth_bound: usize) -> Vec<Term> {
    let mut all: Vec<Term> = Vec::new();
    if depth_bound == 0 {
        return all;
    }
    all.extend(sig.constants().map(|c| Term::App(c.clone(), Vec::new())));
    let mut prev_len = 0;
    for _ in 1..depth_bound {
        // terms with at least one argument from the previous level are new
        let prev = all.clone();
        let mut next = Vec::new();
        for (f, &n) in &sig.functions {
            if n == 0 {
                continue;
            }
            for args in tuples(&prev, n) {
                if args.iter().any(|a| prev[prev_len..].contains(a)) {
                    next.push(Term::App(f.clone(), args));
                }
            }
        }
        prev_len = all.len();
        if next.is_empty() {
            break;
        }
        all.extend(next);
    }
    all
}

fn tuples(pool: &[Term], n: usize) -> Vec<Vec<Term>> {
    let mut acc: Vec<Vec<Term>> = vec![Vec::new()];
    for _ in 0..n {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                pool.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect();
    }
    acc
}

/// Lazily built universe shared across clauses of one pass.
struct Universe<'a> {
    program: &'a Program,
    interp: &'a Interpretation,
    terms: Option<Vec<Term>>,
}

impl<'a> Universe<'a> {
    fn new(program: &'a Program, interp: &'a Interpretation) -> Self {
        Universe {
            program,
            interp,
            terms: None,
        }
    }

    fn terms(&mut self) -> &[Term] {
        if self.terms.is_none() {
            let mut sig = self.program.signature.clone();
            for a in &self.interp.atoms {
                for t in &a.args {
                    // interpretations only hold ground atoms of a consistent signature
                    let _ = sig.add_term(t);
                }
            }
            self.terms = Some(herbrand_universe(&sig, self.interp.depth_bound));
        }
        self.terms.as_deref().unwrap_or(&[])
    }
}

/// Every ground substitution (over the bounded universe) making the clause body true in `interp`.
fn instances(
    clause: &Clause,
    index: &HashMap<(&Symbol, usize), Vec<&Atom>>,
    universe: &mut Universe<'_>,
) -> Vec<Substitution> {
    let mut partial = vec![Substitution::new()];
    for b in &clause.body {
        let candidates = match index.get(&(&b.pred, b.args.len())) {
            Some(c) => c,
            None => return Vec::new(),
        };
        let mut next = Vec::new();
        for theta in &partial {
            for cand in candidates {
                let mut ext = theta.clone();
                if ext.match_atom(b, cand) {
                    next.push(ext);
                }
            }
        }
        partial = next;
        if partial.is_empty() {
            return partial;
        }
    }
    let free = clause.free_head_vars();
    if free.is_empty() {
        return partial;
    }
    let terms = universe.terms();
    for x in free {
        partial = partial
            .into_iter()
            .flat_map(|theta| {
                let x = x.clone();
                terms.iter().map(move |t| {
                    let mut ext = theta.clone();
                    ext.bind(x.clone(), t.clone());
                    ext
                })
            })
            .collect();
    }
    partial
}

/// One application of the immediate consequence operator, with the number
/// of derivable heads dropped for exceeding the depth bound.
pub fn tp_step_counted(program: &Program, interp: &Interpretation) -> (Interpretation, usize) {
    let index = interp.index();
    let mut universe = Universe::new(program, interp);
    let mut out = Interpretation::empty(interp.depth_bound);
    let mut overflow = BTreeSet::new();
    for clause in &program.clauses {
        for theta in instances(clause, &index, &mut universe) {
            let head = theta.apply_atom(&clause.head);
            if head.depth() > interp.depth_bound {
                overflow.insert(head);
            } else {
                out.atoms.insert(head);
            }
        }
    }
    (out, overflow.len())
}

/// `{head θ | body θ ⊆ I}`, truncated at the interpretation's depth bound.
pub fn tp_step(program: &Program, interp: &Interpretation) -> Interpretation {
    tp_step_counted(program, interp).0
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeastModel {
    pub interpretation: Interpretation,
    /// `true` when the iteration reached a fixpoint within the step bound.
    pub fixpoint: bool,
    /// Number of steps taken to reach the returned interpretation.
    pub steps: usize,
    /// Heads dropped by the depth bound in the final step.
    pub overflow: usize,
}

/// Iterates the consequence operator from the empty set.
pub fn least_model(program: &Program, depth_bound: usize, step_bound: usize) -> LeastModel {
    let mut current = Interpretation::empty(depth_bound);
    let mut steps = 0;
    loop {
        let (next, overflow) = tp_step_counted(program, &current);
        if next == current {
            return LeastModel {
                interpretation: current,
                fixpoint: true,
                steps,
                overflow,
            };
        }
        if steps == step_bound {
            return LeastModel {
                interpretation: current,
                fixpoint: false,
                steps,
                overflow,
            };
        }
        current = next;
        steps += 1;
    }
}

/// A clause instance whose body holds but whose head is missing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub clause: Clause,
    pub substitution: Substitution,
    pub missing_head: Atom,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "`{}` under {}: body holds, `{}` missing",
            self.clause, self.substitution, self.missing_head
        )
    }
}

/// Checks that `interp` is a model of `program`. Instances whose head lies
/// beyond the depth bound are exempt.
#[allow(clippy::result_large_err)]
pub fn satisfies(interp: &Interpretation, program: &Program) -> Result<(), Counterexample> {
    let index = interp.index();
    let mut universe = Universe::new(program, interp);
    for clause in &program.clauses {
        for theta in instances(clause, &index, &mut universe) {
            let head = theta.apply_atom(&clause.head);
            if head.depth() <= interp.depth_bound && !interp.contains(&head) {
                return Err(Counterexample {
                    clause: clause.clone(),
                    substitution: theta,
                    missing_head: head,
                });
            }
        }
    }
    Ok(())
}

/// A body term that does not occur as a subterm of the clause head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtermViolation {
    pub clause_index: usize,
    pub clause: Clause,
    pub term: Term,
}

impl fmt::Display for SubtermViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "clause {} `{}`: body term `{}` does not occur in the head",
            self.clause_index + 1,
            self.clause,
            self.term
        )
    }
}

/// Returns every clause whose body mentions a term absent from its head.
pub fn body_subterm_violations(program: &Program) -> Vec<SubtermViolation> {
    let mut out = Vec::new();
    for (i, c) in program.clauses.iter().enumerate() {
        let head_terms: BTreeSet<&Term> = c.head.args.iter().flat_map(Term::subterms).collect();
        let offending = c
            .body
            .iter()
            .flat_map(|b| b.args.iter().flat_map(Term::subterms))
            .find(|t| !head_terms.contains(t));
        if let Some(t) = offending {
            out.push(SubtermViolation {
                clause_index: i,
                clause: c.clone(),
                term: t.clone(),
            });
        }
    }
    out
}

/// `true` iff every term in every body atom occurs in the head.
pub fn validate_body_subterm_property(program: &Program) -> (bool, Vec<SubtermViolation>) {
    let v = body_subterm_violations(program);
    (v.is_empty(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_atom, parse_program};

    fn prog(s: &str) -> Program {
        parse_program(s).unwrap()
    }

    fn interp(atoms: &[&str], bound: usize) -> Interpretation {
        Interpretation::from_atoms(atoms.iter().map(|a| parse_atom(a).unwrap()), bound)
    }

    const GAMMA1: &str = "p(f(X)) :- p(X).\np(f(a)).";

    #[test]
    fn tp_step_examples() {
        let g = prog(GAMMA1);
        let i1 = tp_step(&g, &Interpretation::empty(6));
        assert_eq!(i1, interp(&["p(f(a))"], 6));
        let i2 = tp_step(&g, &i1);
        assert_eq!(i2, interp(&["p(f(a))", "p(f(f(a)))"], 6));
        let rules_only = prog("p(f(X)) :- p(X).");
        assert!(tp_step(&rules_only, &Interpretation::empty(6)).is_empty());
    }

    #[test]
    fn least_model_of_gamma_k() {
        let m = least_model(&prog(GAMMA1), 6, 10);
        assert!(m.fixpoint);
        let expected: Vec<String> = (1..=5)
            .map(|i| format!("p({})", Term::iterate(&Symbol::new("f"), i, Term::constant("a"))))
            .collect();
        let mut expected_sorted = expected.clone();
        expected_sorted.sort();
        assert_eq!(m.interpretation.sorted_lines(), expected_sorted);
        assert_eq!(m.overflow, 1);

        for k in 1..=5 {
            let src = format!("p(f(X)) :- p(X).\np(iter(f,{k},a)).");
            let m = least_model(&prog(&src), 6, 10);
            assert!(m.fixpoint);
            assert_eq!(m.interpretation.len(), 6 - k);
            assert!(m
                .interpretation
                .atoms()
                .iter()
                .all(|a| a.args[0].depth() > k));
        }
    }

    #[test]
    fn facts_only_reach_fixpoint_after_one_step() {
        let m = least_model(&prog("p(a). q(b)."), 4, 1);
        assert!(m.fixpoint);
        assert_eq!(m.steps, 1);
        assert_eq!(m.interpretation, interp(&["p(a)", "q(b)"], 4));
    }

    #[test]
    fn step_bound_exhaustion_is_flagged() {
        let m = least_model(&prog(GAMMA1), 6, 2);
        assert!(!m.fixpoint);
        assert_eq!(m.interpretation.len(), 2);
    }

    #[test]
    fn satisfies_examples() {
        let g = prog(GAMMA1);
        let m = least_model(&g, 6, 10).interpretation;
        assert!(satisfies(&m, &g).is_ok());
        let cex = satisfies(&interp(&["p(a)"], 3), &prog("q(a) :- p(a).")).unwrap_err();
        assert_eq!(cex.missing_head.to_string(), "q(a)");
        assert!(satisfies(&Interpretation::empty(3), &prog("p(f(X)) :- p(X).")).is_ok());
    }

    #[test]
    fn satisfies_exempts_heads_past_the_bound() {
        let g = prog("p(f(X)) :- p(X).");
        assert!(satisfies(&interp(&["p(f(f(a)))"], 3), &g).is_ok());
        assert!(satisfies(&interp(&["p(f(a))"], 3), &g).is_err());
    }

    #[test]
    fn head_only_variables_range_over_the_universe() {
        let g = prog("p(X). q(a). r(f(b)).");
        let m = least_model(&g, 2, 5).interpretation;
        let ps = m.atoms().iter().filter(|a| a.pred.as_str() == "p").count();
        // a, b, f(a), f(b)
        assert_eq!(ps, 4);
        assert!(satisfies(&m, &g).is_ok());
    }

    #[test]
    fn universe_enumeration() {
        let sig = prog("p(g(a,f(b))).").signature().clone();
        assert_eq!(herbrand_universe(&sig, 1).len(), 2);
        // level 2: f(a), f(b), g over {a,b}^2
        assert_eq!(herbrand_universe(&sig, 2).len(), 2 + 2 + 4);
        let u3 = herbrand_universe(&sig, 3);
        assert!(u3.iter().all(|t| t.depth() <= 3));
        let distinct: BTreeSet<_> = u3.iter().collect();
        assert_eq!(distinct.len(), u3.len());
        // level 3 adds f over the 6 new terms and g pairs with a new component: 6 + (64 - 4)
        assert_eq!(u3.len(), 8 + 6 + 60);
    }

    #[test]
    fn body_subterm_property() {
        assert!(validate_body_subterm_property(&prog("p(f(X)) :- p(X).")).0);
        let (ok, off) = validate_body_subterm_property(&prog("p(a) :- q(b)."));
        assert!(!ok);
        assert_eq!(off.len(), 1);
        assert_eq!(off[0].term.to_string(), "b");
        assert!(validate_body_subterm_property(&Program::default()).0);
        assert!(!validate_body_subterm_property(&prog("p(X) :- q(f(X)).")).0);
        assert!(validate_body_subterm_property(&prog("p(g(X,Y)) :- q(X), r(Y).")).0);
    }
}
