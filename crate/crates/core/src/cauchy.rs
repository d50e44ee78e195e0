//! Infinitary terms as streams of finite approximants.
//!
//! An [`InfTerm`] is never materialised: it is a generator `k -> t_k`,
//! optionally paired with a modulus of convergence `m -> K` such that
//! `distance(t_k, t_j) < 1/m` for all `k, j >= K`. Questions about limits are
//! answered at an explicit precision `m` and horizon `H`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::distance::{distance, Distance};
use crate::subst::Substitution;
use crate::syntax::{parse_family, parse_term, SyntaxError};
use crate::term::{Symbol, Term};
use crate::verdict::{settle, PairSampling, Verdict};

type Generator = Arc<dyn Fn(usize) -> Term + Send + Sync>;
type Modulus = Arc<dyn Fn(u64) -> usize + Send + Sync>;

/// A Cauchy term sequence given intensionally.
#[derive(Clone)]
pub struct InfTerm {
    gen: Generator,
    modulus: Option<Modulus>,
    verified: bool,
}

impl InfTerm {
    /// A stream with no declared modulus. Continuity is treated as verified
    /// because nothing was mapped over it.
    pub fn new(gen: impl Fn(usize) -> Term + Send + Sync + 'static) -> Self {
        InfTerm {
            gen: Arc::new(gen),
            modulus: None,
            verified: true,
        }
    }

    pub fn with_modulus(mut self, modulus: impl Fn(u64) -> usize + Send + Sync + 'static) -> Self {
        self.modulus = Some(Arc::new(modulus));
        self
    }

    pub fn constant(t: Term) -> Self {
        InfTerm::new(move |_| t.clone()).with_modulus(|_| 0)
    }

    /// Finite list of approximants; the last one repeats forever.
    pub fn from_approximants(terms: Vec<Term>) -> Self {
        assert!(!terms.is_empty(), "an approximant stream needs at least one term");
        let n = terms.len();
        let terms = Arc::new(terms);
        InfTerm::new(move |k| terms[k.min(n - 1)].clone())
    }

    pub fn approximant(&self, k: usize) -> Term {
        (self.gen)(k)
    }

    /// The declared witness index for precision `m`, if any.
    pub fn modulus(&self, m: u64) -> Option<usize> {
        self.modulus.as_ref().map(|f| f(m))
    }

    pub fn has_modulus(&self) -> bool {
        self.modulus.is_some()
    }

    /// `false` once an unchecked user map has been applied.
    pub fn continuity_verified(&self) -> bool {
        self.verified
    }

    /// Drops the first `n` approximants.
    pub fn shifted(&self, n: usize) -> InfTerm {
        let gen = self.gen.clone();
        let modulus = self.modulus.clone();
        InfTerm {
            gen: Arc::new(move |k| gen(k + n)),
            modulus: modulus.map(|f| -> Modulus { Arc::new(move |m| f(m).saturating_sub(n)) }),
            verified: self.verified,
        }
    }

    fn window(&self, horizon: usize) -> Vec<Term> {
        (0..=horizon).map(|k| self.approximant(k)).collect()
    }
}

impl fmt::Debug for InfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InfTerm")
            .field("t0", &self.approximant(0))
            .field("t1", &self.approximant(1))
            .field("modulus", &self.modulus.is_some())
            .finish()
    }
}

/// The stream `f^1(seed), f^2(seed), ...` whose limit `t` satisfies `f(t) ≡ t`.
pub fn make_fix(f: &Symbol, seed: Term) -> InfTerm {
    let f = f.clone();
    InfTerm::new(move |k| Term::iterate(&f, k + 1, seed.clone())).with_modulus(|m| m as usize)
}

/// Checks the Cauchy condition at precision `m` on indices `0..=horizon`.
pub fn check_cauchy(t: &InfTerm, m: u64, horizon: usize) -> Verdict<Distance> {
    let w = t.window(horizon);
    settle(
        0,
        horizon,
        m,
        PairSampling::Ultrametric,
        |k, j| distance(&w[k], &w[j]),
        |d| d.below(m),
    )
}

/// Which argument of a binary check failed to settle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{side:?} stream did not settle: {verdict}")]
pub struct NotSettled {
    pub side: Side,
    pub verdict: Verdict<Distance>,
}

/// A finite-precision estimate of the distance between two limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InfDistance {
    /// `distance(s_K, t_K)` at the larger of the two witnesses.
    pub approximant: Distance,
    pub witness: usize,
}

/// Distance between limits, estimated at the common witness index.
///
/// In an ultrametric the approximant and the true limit distance agree
/// whenever either is `>= 1/m`; both are `< 1/m` otherwise.
pub fn inf_distance(
    s: &InfTerm,
    t: &InfTerm,
    m: u64,
    horizon: usize,
) -> Result<InfDistance, NotSettled> {
    let ks = settled(s, m, horizon, Side::Left)?;
    let kt = settled(t, m, horizon, Side::Right)?;
    let k = ks.max(kt);
    Ok(InfDistance {
        approximant: distance(&s.approximant(k), &t.approximant(k)),
        witness: k,
    })
}

fn settled(t: &InfTerm, m: u64, horizon: usize, side: Side) -> Result<usize, NotSettled> {
    match check_cauchy(t, m, horizon) {
        Verdict::ConvergedUpTo { witness, .. } => Ok(witness),
        verdict => Err(NotSettled { side, verdict }),
    }
}

/// Equivalence up to precision `m`: converged iff the limits are closer than `1/m`.
pub fn equivalent(s: &InfTerm, t: &InfTerm, m: u64, horizon: usize) -> Verdict<Distance> {
    match inf_distance(s, t, m, horizon) {
        Err(e) => e.verdict,
        Ok(InfDistance {
            approximant,
            witness,
        }) => {
            if approximant.below(m) {
                Verdict::ConvergedUpTo {
                    precision: m,
                    witness,
                }
            } else {
                Verdict::RefutedAt {
                    k: witness,
                    j: witness,
                    observed: approximant,
                }
            }
        }
    }
}

/// A map on finite terms applied pointwise to approximants.
#[derive(Clone)]
pub enum ContinuousMap {
    /// `s ↦ f(s)` for a unary symbol `f`.
    Wrap(Symbol),
    /// `s ↦ template[var := s]`.
    Template { template: Term, var: Symbol },
    /// Any other map. Its continuity cannot be checked.
    Unchecked {
        name: String,
        map: Arc<dyn Fn(&Term) -> Term + Send + Sync>,
    },
}

impl ContinuousMap {
    pub fn wrap(f: &str) -> Self {
        ContinuousMap::Wrap(Symbol::new(f))
    }

    pub fn template(template: Term, var: &str) -> Self {
        ContinuousMap::Template {
            template,
            var: Symbol::new(var),
        }
    }

    pub fn unchecked(
        name: &str,
        map: impl Fn(&Term) -> Term + Send + Sync + 'static,
    ) -> Self {
        ContinuousMap::Unchecked {
            name: name.to_string(),
            map: Arc::new(map),
        }
    }

    pub fn apply(&self, t: &Term) -> Term {
        match self {
            ContinuousMap::Wrap(f) => Term::App(f.clone(), vec![t.clone()]),
            ContinuousMap::Template { template, var } => {
                Substitution::new().with(var.as_str(), t.clone()).apply(template)
            }
            ContinuousMap::Unchecked { map, .. } => map(t),
        }
    }

    /// For built-in maps: `distance(φ s, φ t)` is `distance(s, t)` wrapped this
    /// many times. `None` for unchecked maps; `Some(None)` for maps that ignore
    /// their argument.
    fn shift(&self) -> Option<Option<u64>> {
        match self {
            ContinuousMap::Wrap(_) => Some(Some(1)),
            ContinuousMap::Template { template, var } => {
                Some(template.least_var_depth(var.as_str()).map(|d| d as u64))
            }
            ContinuousMap::Unchecked { .. } => None,
        }
    }
}

impl fmt::Debug for ContinuousMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContinuousMap::Wrap(s) => write!(f, "Wrap({s})"),
            ContinuousMap::Template { template, var } => write!(f, "Template({template}, {var})"),
            ContinuousMap::Unchecked { name, .. } => write!(f, "Unchecked({name})"),
        }
    }
}

/// Witness for precision `p` after shifting distances by `shift` wraps.
fn shifted_witness(inner: &Modulus, shift: u64, p: u64) -> usize {
    if p <= shift {
        0
    } else {
        inner(p - shift)
    }
}

/// Applies `map` pointwise. The result carries a modulus only when the map is
/// built in and the argument has one.
pub fn map_continuous(map: &ContinuousMap, t: &InfTerm) -> InfTerm {
    let gen = t.gen.clone();
    let map_c = map.clone();
    let modulus: Option<Modulus> = match (map.shift(), &t.modulus) {
        (Some(None), _) => Some(Arc::new(|_| 0)),
        (Some(Some(s)), Some(inner)) => {
            let inner = inner.clone();
            Some(Arc::new(move |p| shifted_witness(&inner, s, p)))
        }
        _ => None,
    };
    InfTerm {
        gen: Arc::new(move |k| map_c.apply(&gen(k))),
        modulus,
        verified: t.verified && map.shift().is_some(),
    }
}

/// `k ↦ template θ_k` where `θ_k` binds each variable to the k-th approximant
/// of its stream. When every stream declares a modulus, so does the result.
pub fn subst_sequence(template: &Term, bindings: &[(Symbol, InfTerm)]) -> InfTerm {
    let tpl = template.clone();
    let streams: Vec<(Symbol, InfTerm)> = bindings.to_vec();
    let gen_streams = streams.clone();
    let gen = move |k: usize| {
        let theta: Substitution = gen_streams
            .iter()
            .map(|(x, s)| (x.clone(), s.approximant(k)))
            .collect();
        theta.apply(&tpl)
    };
    let mut moduli: Vec<(u64, Modulus)> = Vec::new();
    let mut complete = true;
    for (x, s) in &streams {
        let Some(depth) = template.least_var_depth(x.as_str()) else {
            continue;
        };
        match &s.modulus {
            Some(f) => moduli.push((depth as u64, f.clone())),
            None => complete = false,
        }
    }
    let out = InfTerm {
        gen: Arc::new(gen),
        modulus: None,
        verified: streams.iter().all(|(_, s)| s.verified),
    };
    if complete {
        out.with_modulus(move |p| {
            moduli
                .iter()
                .map(|(d, f)| shifted_witness(f, *d, p))
                .max()
                .unwrap_or(0)
        })
    } else {
        out
    }
}

/// `k ↦ template θ_k` for an arbitrary substitution sequence; no modulus.
pub fn subst_sequence_with(
    template: &Term,
    thetas: impl Fn(usize) -> Substitution + Send + Sync + 'static,
) -> InfTerm {
    let tpl = template.clone();
    InfTerm::new(move |k| thetas(k).apply(&tpl))
}

/// Textual stream descriptors accepted on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StreamDescriptor {
    /// `fix(f,seed)`.
    Fix { f: Symbol, seed: Term },
    /// `file:<path>`: one approximant per line.
    File(PathBuf),
    /// `family-atom:<path>[#n]`: the n-th index-dependent fact of a family,
    /// instantiated at `k + 1`, read as a term rooted at its predicate.
    FamilyAtom { path: PathBuf, fact: usize },
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("bad stream descriptor `{0}`; expected fix(f,a), file:<path> or family-atom:<path>[#n]")]
    Descriptor(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Syntax { path: String, source: SyntaxError },
    #[error("{0}")]
    Invalid(String),
}

impl StreamDescriptor {
    pub fn parse(text: &str) -> Result<Self, StreamError> {
        let text = text.trim();
        let bad = || StreamError::Descriptor(text.to_string());
        if let Some(path) = text.strip_prefix("file:") {
            return Ok(StreamDescriptor::File(PathBuf::from(path)));
        }
        if let Some(rest) = text.strip_prefix("family-atom:") {
            let (path, fact) = match rest.rsplit_once('#') {
                Some((p, n)) => (p, n.parse::<usize>().map_err(|_| bad())?),
                None => (rest, 1),
            };
            if fact == 0 {
                return Err(bad());
            }
            return Ok(StreamDescriptor::FamilyAtom {
                path: PathBuf::from(path),
                fact,
            });
        }
        let inner = text
            .strip_prefix("fix(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (f, seed) = inner.split_once(',').ok_or_else(bad)?;
        let f = f.trim();
        if !f.chars().next().is_some_and(|c| c.is_ascii_lowercase()) {
            return Err(bad());
        }
        let seed = parse_term(seed).map_err(|_| bad())?;
        Ok(StreamDescriptor::Fix {
            f: Symbol::new(f),
            seed,
        })
    }

    pub fn resolve(&self) -> Result<InfTerm, StreamError> {
        match self {
            StreamDescriptor::Fix { f, seed } => Ok(make_fix(f, seed.clone())),
            StreamDescriptor::File(path) => {
                let text = read(path)?;
                let mut terms = Vec::new();
                for line in text.lines() {
                    let line = line.split('%').next().unwrap_or("").trim();
                    if line.is_empty() {
                        continue;
                    }
                    terms.push(parse_term(line).map_err(|source| StreamError::Syntax {
                        path: path.display().to_string(),
                        source,
                    })?);
                }
                if terms.is_empty() {
                    return Err(StreamError::Invalid(format!(
                        "{}: no approximants",
                        path.display()
                    )));
                }
                Ok(InfTerm::from_approximants(terms))
            }
            StreamDescriptor::FamilyAtom { path, fact } => {
                let text = read(path)?;
                let family = parse_family(&text).map_err(|source| StreamError::Syntax {
                    path: path.display().to_string(),
                    source,
                })?;
                let template = family
                    .clauses()
                    .iter()
                    .filter(|c| c.body.is_empty() && !c.is_index_free())
                    .nth(fact - 1)
                    .cloned()
                    .ok_or_else(|| {
                        StreamError::Invalid(format!(
                            "{}: no index-dependent fact #{fact}",
                            path.display()
                        ))
                    })?;
                Ok(InfTerm::new(move |k| {
                    template.head.instantiate(k as u64 + 1).as_term()
                }))
            }
        }
    }
}

fn read(path: &Path) -> Result<String, StreamError> {
    std::fs::read_to_string(path).map_err(|source| StreamError::Io {
        path: path.display().to_string(),
        source,
    })
}
