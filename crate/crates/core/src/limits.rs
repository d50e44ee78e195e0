//! Limits of program sequences and of their least models.
//!
//! A [`ProgramFamily`] is a program template indexed by `k >= 1`. Its
//! set-theoretic lower and upper limits are computed symbolically from the
//! templates and cross-checked against a finite window of instances. Least
//! models of the instances form a [`ModelSequence`], compared under the
//! Hausdorff lift of the atom ultrametric.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::distance::{atom_distance, Distance};
use crate::horn::{
    body_subterm_violations, least_model, satisfies, Clause, Counterexample, Interpretation,
    Program, SubtermViolation,
};
use crate::template::{ClauseTemplate, IndexDependence};
use crate::term::{Atom, Signature};
use crate::verdict::{settle, PairSampling, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitError {
    #[error("horizon must be at least {min}, got {got}")]
    HorizonTooShort { min: usize, got: usize },
    #[error("precision {precision} is finer than depth bound {depth_bound} allows (need m <= depth - 2)")]
    PrecisionTooFine { precision: u64, depth_bound: usize },
    #[error("{0} must be at least 1")]
    ZeroBound(&'static str),
}

/// A sequence of programs `Γ_1, Γ_2, ...` given by clause templates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramFamily {
    clauses: Vec<ClauseTemplate>,
    signature: Signature,
}

impl ProgramFamily {
    pub fn new(clauses: Vec<ClauseTemplate>, signature: Signature) -> Self {
        ProgramFamily { clauses, signature }
    }

    pub fn clauses(&self) -> &[ClauseTemplate] {
        &self.clauses
    }

    /// `Γ_k`: every `@k` replaced by `k` and `iter` expanded. Duplicate clauses are merged.
    pub fn instantiate(&self, k: u64) -> Program {
        let mut seen = BTreeSet::new();
        let clauses = self
            .clauses
            .iter()
            .map(|c| c.instantiate(k))
            .filter(|c| seen.insert(c.clone()))
            .collect();
        Program::with_signature(clauses, self.signature.clone())
    }

    pub fn is_index_free(&self) -> bool {
        self.clauses.iter().all(ClauseTemplate::is_index_free)
    }
}

impl fmt::Display for ProgramFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitVerdict {
    /// Lower and upper limits coincide; both computations agree on the window.
    ConvergedUpTo { horizon: usize },
    /// Lower limit strictly below the upper limit.
    Diverged,
    /// Symbolic and windowed computations disagree.
    Unknown,
}

impl fmt::Display for LimitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitVerdict::ConvergedUpTo { horizon } => write!(f, "ConvergedUpTo(H={horizon})"),
            LimitVerdict::Diverged => f.write_str("Diverged"),
            LimitVerdict::Unknown => f.write_str("Unknown"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProgramLimit {
    pub liminf: Program,
    pub limsup: Program,
    pub verdict: LimitVerdict,
    pub diagnostics: Vec<String>,
}

impl ProgramLimit {
    /// The limit program, when it exists.
    pub fn limit(&self) -> Option<&Program> {
        matches!(self.verdict, LimitVerdict::ConvergedUpTo { .. }).then_some(&self.liminf)
    }
}

/// Lower and upper set-theoretic limits of the family.
///
/// Index-free templates belong to both limits. Injective templates (a bare
/// `@k` count) give each instance once and belong to neither. Periodic
/// templates (`@k mod n`) give instances that recur forever, so they are in
/// the upper limit; an instance is in the lower limit when the periodic
/// templates together produce it at every residue.
pub fn program_limit(family: &ProgramFamily, horizon: usize) -> Result<ProgramLimit, LimitError> {
    if horizon < 4 {
        return Err(LimitError::HorizonTooShort {
            min: 4,
            got: horizon,
        });
    }
    let (sym_inf, sym_sup) = symbolic_limits(family);
    let (win_inf, win_sup) = windowed_limits(family, horizon);

    let set = |v: &[Clause]| v.iter().cloned().collect::<BTreeSet<_>>();
    let mut diagnostics = Vec::new();
    for (name, sym, win) in [
        ("liminf", set(&sym_inf), win_inf),
        ("limsup", set(&sym_sup), win_sup),
    ] {
        for c in sym.difference(&win) {
            diagnostics.push(format!("{name}: `{c}` expected symbolically, absent on window 1..={horizon}"));
        }
        for c in win.difference(&sym) {
            diagnostics.push(format!("{name}: `{c}` present on window 1..={horizon}, not expected symbolically"));
        }
    }
    let verdict = if !diagnostics.is_empty() {
        LimitVerdict::Unknown
    } else if sym_inf.len() == sym_sup.len() {
        LimitVerdict::ConvergedUpTo { horizon }
    } else {
        LimitVerdict::Diverged
    };
    Ok(ProgramLimit {
        liminf: Program::with_signature(sym_inf, family.signature.clone()),
        limsup: Program::with_signature(sym_sup, family.signature.clone()),
        verdict,
        diagnostics,
    })
}

fn symbolic_limits(family: &ProgramFamily) -> (Vec<Clause>, Vec<Clause>) {
    let period = family
        .clauses
        .iter()
        .filter_map(|c| match c.dependence() {
            IndexDependence::Periodic(p) => Some(p),
            _ => None,
        })
        .fold(1u64, num_integer::lcm);

    // residues at which each recurring clause appears
    let mut residues: BTreeMap<Clause, BTreeSet<u64>> = BTreeMap::new();
    let mut order: Vec<Clause> = Vec::new();
    for t in &family.clauses {
        match t.dependence() {
            IndexDependence::Injective => {}
            IndexDependence::Free => {
                let c = t.instantiate(1);
                if !residues.contains_key(&c) {
                    order.push(c.clone());
                }
                residues.entry(c).or_default().extend(0..period);
            }
            IndexDependence::Periodic(_) => {
                for r in 0..period {
                    let c = t.instantiate(period + r);
                    if !residues.contains_key(&c) {
                        order.push(c.clone());
                    }
                    residues.entry(c).or_default().insert(r);
                }
            }
        }
    }
    let liminf = order
        .iter()
        .filter(|c| residues[*c].len() as u64 == period)
        .cloned()
        .collect();
    (liminf, order)
}

/// `∪_{i<=H/2} ∩_{i<=j<=H} Γ_j`, and the clauses of `Γ_{H/2..=H}` seen at
/// least twice in `Γ_1..=Γ_H`.
fn windowed_limits(family: &ProgramFamily, horizon: usize) -> (BTreeSet<Clause>, BTreeSet<Clause>) {
    let programs: Vec<BTreeSet<Clause>> = (1..=horizon as u64)
        .map(|k| family.instantiate(k).clauses().iter().cloned().collect())
        .collect();
    let at = |j: usize| &programs[j - 1];

    let mut liminf = BTreeSet::new();
    for i in 1..=horizon / 2 {
        let mut meet = at(i).clone();
        for j in i + 1..=horizon {
            meet = meet.intersection(at(j)).cloned().collect();
        }
        liminf.extend(meet);
    }

    let mut counts: BTreeMap<&Clause, usize> = BTreeMap::new();
    for p in &programs {
        for c in p {
            *counts.entry(c).or_default() += 1;
        }
    }
    let limsup = (horizon.div_ceil(2)..=horizon)
        .flat_map(|j| at(j.max(1)).iter())
        .filter(|c| counts[c] >= 2)
        .cloned()
        .collect();
    (liminf, limsup)
}

/// Largest directed gap `max_{a∈A} min_{b∈B} ρ(a,b)`. Shared atoms contribute 0.
fn directed(a: &Interpretation, b: &Interpretation) -> Distance {
    a.atoms()
        .iter()
        .filter(|x| !b.contains(x))
        .map(|x| {
            b.atoms()
                .iter()
                .map(|y| atom_distance(x, y))
                .min()
                .unwrap_or(Distance::ONE)
        })
        .max()
        .unwrap_or(Distance::Zero)
}

/// Hausdorff distance between finite atom sets. `ρ(∅,∅) = 0`, `ρ(∅,B) = 1` for `B ≠ ∅`.
pub fn model_distance(a: &Interpretation, b: &Interpretation) -> Distance {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Distance::Zero,
        (true, false) | (false, true) => Distance::ONE,
        _ => directed(a, b).max(directed(b, a)),
    }
}

#[derive(Debug, Clone)]
pub struct ModelEntry {
    pub k: usize,
    pub model: Interpretation,
    pub fixpoint: bool,
    pub warnings: Vec<String>,
}

/// Least models `M_1..=M_H` of a family, all at one depth bound.
#[derive(Debug, Clone)]
pub struct ModelSequence {
    pub entries: Vec<ModelEntry>,
    pub depth_bound: usize,
    pub step_bound: usize,
}

impl ModelSequence {
    pub fn horizon(&self) -> usize {
        self.entries.len()
    }

    /// `M_k`, 1-based.
    pub fn model(&self, k: usize) -> &Interpretation {
        &self.entries[k - 1].model
    }

    pub fn warnings(&self) -> impl Iterator<Item = (usize, &str)> {
        self.entries
            .iter()
            .flat_map(|e| e.warnings.iter().map(move |w| (e.k, w.as_str())))
    }
}

pub fn model_sequence(
    family: &ProgramFamily,
    horizon: usize,
    depth_bound: usize,
    step_bound: usize,
) -> Result<ModelSequence, LimitError> {
    if horizon == 0 {
        return Err(LimitError::ZeroBound("horizon"));
    }
    if depth_bound == 0 {
        return Err(LimitError::ZeroBound("depth bound"));
    }
    // instances are independent; threads keep results in index order
    let entries = std::thread::scope(|scope| {
        let handles: Vec<_> = (1..=horizon)
            .map(|k| scope.spawn(move || model_entry(family, k, depth_bound, step_bound)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("model computation panicked"))
            .collect()
    });
    Ok(ModelSequence {
        entries,
        depth_bound,
        step_bound,
    })
}

fn model_entry(family: &ProgramFamily, k: usize, depth_bound: usize, step_bound: usize) -> ModelEntry {
    let program = family.instantiate(k as u64);
    let lm = least_model(&program, depth_bound, step_bound);
    let mut warnings = Vec::new();
    if !lm.fixpoint {
        warnings.push(format!("step bound {step_bound} reached before a fixpoint"));
    }
    for v in body_subterm_violations(&program) {
        warnings.push(format!("body-subterm hypothesis fails: {v}"));
    }
    ModelEntry {
        k,
        model: lm.interpretation,
        fixpoint: lm.fixpoint,
        warnings,
    }
}

/// Cauchy check on `M_1..=M_H` under [`model_distance`].
pub fn check_model_cauchy(seq: &ModelSequence, m: u64) -> Verdict<Distance> {
    let h = seq.horizon();
    if h == 0 {
        return Verdict::Unknown { horizon: 0 };
    }
    settle(
        1,
        h,
        m,
        PairSampling::Ultrametric,
        |k, j| model_distance(seq.model(k), seq.model(j)),
        |d| d.below(m),
    )
}

/// Atoms `p_k ∈ M_k` for `k = start..=H`, built backwards from `M_H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub start: usize,
    pub atoms: Vec<Atom>,
}

impl Chain {
    pub fn last(&self) -> &Atom {
        self.atoms.last().expect("chains are non-empty")
    }

    /// `p_k`, if the chain reaches index `k`.
    pub fn at(&self, k: usize) -> Option<&Atom> {
        k.checked_sub(self.start).and_then(|i| self.atoms.get(i))
    }
}

/// Stable chains whose endpoints are closer than `1/m`: one limit atom at this precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainClass {
    /// Deepest endpoint; ties go to the lexicographically smallest rendering.
    pub representative: Atom,
    pub chains: Vec<Chain>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitModelApprox {
    pub precision: u64,
    pub witness: Option<usize>,
    pub classes: Vec<ChainClass>,
    pub diagnostics: Vec<String>,
}

impl LimitModelApprox {
    pub fn representatives(&self) -> Vec<Atom> {
        self.classes.iter().map(|c| c.representative.clone()).collect()
    }

    /// Endpoints in `M_H` of every stable chain.
    pub fn endpoints(&self) -> Vec<Atom> {
        self.classes
            .iter()
            .flat_map(|c| c.chains.iter().map(|ch| ch.last().clone()))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Nearest atom of `pool`; ties go to the lexicographically smallest rendering.
fn nearest<'a>(target: &Atom, pool: &'a Interpretation) -> Option<&'a Atom> {
    if let Some(same) = pool.atoms().get(target) {
        return Some(same);
    }
    let best = pool.atoms().iter().map(|a| atom_distance(target, a)).min()?;
    pool.atoms()
        .iter()
        .filter(|a| atom_distance(target, a) == best)
        .min_by_key(|a| a.to_string())
}

/// Finite-precision approximation of `lim M_k`.
///
/// Chains start at each atom of `M_H` and extend backwards by nearest-atom
/// choice. A chain is stable when it reaches the Cauchy witness `K` and its
/// adjacent distances on `K..=H` are below `1/m`. Stable chains whose
/// endpoints are within `1/m` of each other are grouped into one class.
pub fn limit_model(seq: &ModelSequence, m: u64) -> LimitModelApprox {
    let mut out = LimitModelApprox {
        precision: m,
        witness: None,
        classes: Vec::new(),
        diagnostics: Vec::new(),
    };
    let witness = match check_model_cauchy(seq, m) {
        Verdict::ConvergedUpTo { witness, .. } => witness,
        v => {
            out.diagnostics
                .push(format!("model sequence not settled at precision {m}: {v}"));
            return out;
        }
    };
    out.witness = Some(witness);
    let h = seq.horizon();

    let mut stable: Vec<Chain> = Vec::new();
    for top in seq.model(h).atoms() {
        let mut rev = vec![top.clone()];
        let mut k = h;
        while k > 1 {
            match nearest(rev.last().unwrap(), seq.model(k - 1)) {
                Some(a) => rev.push(a.clone()),
                None => break,
            }
            k -= 1;
        }
        rev.reverse();
        let chain = Chain {
            start: k,
            atoms: rev,
        };
        let settled = chain.start <= witness
            && (witness..h).all(|i| {
                let (a, b) = (chain.at(i).unwrap(), chain.at(i + 1).unwrap());
                atom_distance(a, b).below(m)
            });
        if settled {
            stable.push(chain);
        } else {
            out.diagnostics
                .push(format!("chain ending at `{}` is not stable from K={witness}", top));
        }
    }

    for chain in stable {
        let end = chain.last().clone();
        match out
            .classes
            .iter_mut()
            .find(|c| atom_distance(&c.chains[0].last().clone(), &end).below(m))
        {
            Some(class) => class.chains.push(chain),
            None => out.classes.push(ChainClass {
                representative: end,
                chains: vec![chain],
            }),
        }
    }
    for class in &mut out.classes {
        class.representative = class
            .chains
            .iter()
            .map(|c| c.last())
            .min_by(|a, b| {
                b.depth()
                    .cmp(&a.depth())
                    .then_with(|| a.to_string().cmp(&b.to_string()))
            })
            .cloned()
            .expect("classes are non-empty");
    }
    if out.classes.is_empty() {
        out.diagnostics.push("no stable chain found".into());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckItem {
    pub label: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReportStatus {
    Pass,
    /// Some instance violates the body-subterm hypothesis.
    HypothesisFailure,
    Failed { culprit: &'static str },
}

/// Outcome of checking that the limit of least models is a model of the limit program.
#[derive(Debug, Clone)]
pub struct LimitModelReport {
    pub horizon: usize,
    pub depth_bound: usize,
    pub step_bound: usize,
    pub precision: u64,
    pub hypothesis_violations: Vec<(usize, SubtermViolation)>,
    pub program_limit: ProgramLimit,
    pub models: ModelSequence,
    pub model_verdict: Verdict<Distance>,
    pub limit: LimitModelApprox,
    /// `ρ(M_k, representatives)` for `k = 1..=H`.
    pub limit_trace: Vec<Distance>,
    pub satisfaction: Result<(), Counterexample>,
    pub items: Vec<CheckItem>,
}

impl LimitModelReport {
    pub fn status(&self) -> ReportStatus {
        if !self.hypothesis_violations.is_empty() {
            return ReportStatus::HypothesisFailure;
        }
        match self.items.iter().find(|i| !i.passed) {
            Some(item) => ReportStatus::Failed {
                culprit: item.label,
            },
            None => ReportStatus::Pass,
        }
    }

    pub fn passed(&self) -> bool {
        self.status() == ReportStatus::Pass
    }

    /// CSV rows `(k, ρ(M_k, M_{k+1}), ρ(M_k, limit))`; the last `ρ(M_k, M_{k+1})` is blank.
    pub fn csv_rows(&self) -> Vec<[String; 3]> {
        let h = self.models.horizon();
        (1..=h)
            .map(|k| {
                let next = if k < h {
                    model_distance(self.models.model(k), self.models.model(k + 1)).to_string()
                } else {
                    String::new()
                };
                [k.to_string(), next, self.limit_trace[k - 1].to_string()]
            })
            .collect()
    }
}

impl fmt::Display for LimitModelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "limit-model check: horizon={} depth={} steps={} precision={}",
            self.horizon, self.depth_bound, self.step_bound, self.precision
        )?;
        if self.hypothesis_violations.is_empty() {
            writeln!(f, "hypothesis: body terms occur in heads for k=1..={}", self.horizon)?;
        } else {
            for (k, v) in &self.hypothesis_violations {
                writeln!(f, "hypothesis FAILED at k={k}: {v}")?;
            }
        }
        for item in &self.items {
            let tag = if item.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{tag}] {}: {}", item.label, item.detail)?;
        }
        let status = match self.status() {
            ReportStatus::Pass => "PASS".to_string(),
            ReportStatus::HypothesisFailure => "HYPOTHESIS FAILURE".to_string(),
            ReportStatus::Failed { culprit } => format!("FAILED ({culprit})"),
        };
        writeln!(f, "result: {status}")
    }
}

/// Builds the four-part report for a family.
///
/// (a) the program limit exists; (b) the least models form a Cauchy sequence;
/// (c) from the Cauchy witness on, `ρ(M_k, limit)` is non-increasing and
/// below `1/m`; (d) the stable
/// chain endpoints form a model of the limit program, with heads beyond the
/// depth bound exempt.
pub fn verify_limit_model(
    family: &ProgramFamily,
    horizon: usize,
    depth_bound: usize,
    step_bound: usize,
    m: u64,
) -> Result<LimitModelReport, LimitError> {
    if m == 0 {
        return Err(LimitError::ZeroBound("precision"));
    }
    if depth_bound < 2 || m > (depth_bound - 2) as u64 {
        return Err(LimitError::PrecisionTooFine {
            precision: m,
            depth_bound,
        });
    }
    let program_limit = program_limit(family, horizon)?;
    let models = model_sequence(family, horizon, depth_bound, step_bound)?;

    let mut hypothesis_violations = Vec::new();
    for k in 1..=horizon {
        for v in body_subterm_violations(&family.instantiate(k as u64)) {
            hypothesis_violations.push((k, v));
        }
    }

    let mut items = Vec::new();
    let limit_ok = program_limit.limit().is_some();
    items.push(CheckItem {
        label: "(a) program limit",
        passed: limit_ok,
        detail: if limit_ok {
            format!(
                "{}; LIM = {{{}}}",
                program_limit.verdict,
                program_limit
                    .liminf
                    .clauses()
                    .iter()
                    .map(Clause::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            )
        } else {
            format!("{} {}", program_limit.verdict, program_limit.diagnostics.join("; "))
        },
    });

    let model_verdict = check_model_cauchy(&models, m);
    let mut detail = model_verdict.to_string();
    let non_fixpoints: Vec<usize> = models.entries.iter().filter(|e| !e.fixpoint).map(|e| e.k).collect();
    if !non_fixpoints.is_empty() {
        detail.push_str(&format!("; no fixpoint within step bound at k={non_fixpoints:?}"));
    }
    items.push(CheckItem {
        label: "(b) least models Cauchy",
        passed: model_verdict.is_converged() && non_fixpoints.is_empty(),
        detail,
    });

    let limit = limit_model(&models, m);
    let reps = Interpretation::from_atoms(limit.representatives(), depth_bound);
    let limit_trace: Vec<Distance> = (1..=horizon)
        .map(|k| model_distance(models.model(k), &reps))
        .collect();
    // transients before the witness do not bear on the limit
    let tail = &limit_trace[limit.witness.unwrap_or(1).min(horizon) - 1..];
    let non_increasing = tail.windows(2).all(|w| w[1] <= w[0]);
    let ends_below = tail.iter().all(|d| d.below(m));
    items.push(CheckItem {
        label: "(c) distance to limit",
        passed: !limit.is_empty() && non_increasing && ends_below,
        detail: format!(
            "[{}] representatives {{{}}}{}{}",
            limit_trace.iter().map(Distance::to_string).collect::<Vec<_>>().join(", "),
            limit.representatives().iter().map(Atom::to_string).collect::<Vec<_>>().join(", "),
            if non_increasing { "" } else { "; increases after the witness" },
            if ends_below { "" } else { "; not below 1/m after the witness" },
        ),
    });

    let support = Interpretation::from_atoms(limit.endpoints(), depth_bound);
    let satisfaction = satisfies(&support, &program_limit.liminf);
    items.push(CheckItem {
        label: "(d) limit model satisfies LIM",
        passed: satisfaction.is_ok() && (limit_ok || program_limit.liminf.is_empty()),
        detail: match &satisfaction {
            Ok(()) => format!("{} atom(s) checked", support.len()),
            Err(cex) => cex.to_string(),
        },
    });

    Ok(LimitModelReport {
        horizon,
        depth_bound,
        step_bound,
        precision: m,
        hypothesis_violations,
        program_limit,
        models,
        model_verdict,
        limit,
        limit_trace,
        satisfaction,
        items,
    })
}
