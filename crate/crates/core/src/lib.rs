//! Metric Herbrand terms, depth-bounded least models of Horn programs, and
//! limits of program sequences.
//!
//! Finite terms carry the ultrametric `ρ(s,t) = 1/(d+1)`, where `d` is the
//! depth to which `s` and `t` coincide. Infinite terms are Cauchy streams of
//! finite approximants, and every convergence question is answered at a
//! finite precision `1/m` within a finite horizon as a [`Verdict`].

pub mod cauchy;
pub mod cli;
pub mod distance;
pub mod generate;
pub mod horn;
pub mod limits;
pub mod ring;
pub mod subst;
pub mod syntax;
pub mod template;
pub mod term;
pub mod verdict;

pub use cauchy::{check_cauchy, equivalent, inf_distance, make_fix, map_continuous, InfTerm};
pub use distance::{atom_distance, distance, Distance};
pub use horn::{least_model, satisfies, tp_step, Clause, Interpretation, Program};
pub use limits::{
    check_model_cauchy, limit_model, model_distance, model_sequence, program_limit,
    verify_limit_model, ProgramFamily,
};
pub use ring::{exp_partial, exp_real, CauchySeq, Scalar};
pub use subst::{apply_substitution, Substitution};
pub use syntax::{parse_atom, parse_family, parse_program, parse_term, SyntaxError};
pub use term::{Atom, Signature, Symbol, Term};
pub use verdict::Verdict;

/// Exact rationals with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;

/// A real number presented as a rational Cauchy sequence.
pub type CauchyReal = ring::CauchySeq<Rational>;
