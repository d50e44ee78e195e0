//! Cauchy sequences over an ordered field and maps computed by diagonalisation.
//!
//! Everything is generic over [`Scalar`]; exact computation uses
//! [`crate::Rational`], and `f64` works for quick experiments.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, Zero};
use thiserror::Error;

use crate::verdict::{settle, PairSampling, Verdict};

/// Scalars the ring operations run over.
pub trait Scalar:
    Clone + num_traits::Num + Signed + PartialOrd + FromPrimitive + fmt::Display + fmt::Debug + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Clone
        + num_traits::Num
        + Signed
        + PartialOrd
        + FromPrimitive
        + fmt::Display
        + fmt::Debug
        + Send
        + Sync
        + 'static
{
}

type Gen<T> = Arc<dyn Fn(usize) -> T + Send + Sync>;
type Modulus = Arc<dyn Fn(u64) -> usize + Send + Sync>;

/// A sequence `x_0, x_1, ...` presented by its generator, with an optional modulus.
#[derive(Clone)]
pub struct CauchySeq<T> {
    gen: Gen<T>,
    modulus: Option<Modulus>,
}

impl<T: Scalar> CauchySeq<T> {
    pub fn new(gen: impl Fn(usize) -> T + Send + Sync + 'static) -> Self {
        CauchySeq {
            gen: Arc::new(gen),
            modulus: None,
        }
    }

    pub fn with_modulus(mut self, modulus: impl Fn(u64) -> usize + Send + Sync + 'static) -> Self {
        self.modulus = Some(Arc::new(modulus));
        self
    }

    pub fn constant(x: T) -> Self {
        CauchySeq::new(move |_| x.clone()).with_modulus(|_| 0)
    }

    pub fn term(&self, k: usize) -> T {
        (self.gen)(k)
    }

    pub fn modulus(&self, m: u64) -> Option<usize> {
        self.modulus.as_ref().map(|f| f(m))
    }
}

impl<T> fmt::Debug for CauchySeq<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CauchySeq")
            .field("modulus", &self.modulus.is_some())
            .finish_non_exhaustive()
    }
}

/// `|a - b| < 1/m`.
pub fn closer_than<T: Scalar>(a: &T, b: &T, m: u64) -> bool {
    let m = T::from_u64(m).expect("precision fits the scalar type");
    (a.clone() - b.clone()).abs() * m < T::one()
}

/// Finite-horizon Cauchy check on `x_0..=x_H` under `|x - y|`, all pairs inspected.
pub fn check_cauchy_seq<T: Scalar>(x: &CauchySeq<T>, m: u64, horizon: usize) -> Verdict<T> {
    let terms: Vec<T> = (0..=horizon).map(|k| x.term(k)).collect();
    let one = T::one();
    let m_t = T::from_u64(m).expect("precision fits the scalar type");
    settle(
        0,
        horizon,
        m,
        PairSampling::Exhaustive,
        |k, j| (terms[k].clone() - terms[j].clone()).abs(),
        |d| d.clone() * m_t.clone() < one,
    )
}

/// Approximant at the witness index together with the verdict that produced it.
///
/// When the check does not settle, the approximant is `x_H`.
pub fn eval<T: Scalar>(x: &CauchySeq<T>, m: u64, horizon: usize) -> (T, Verdict<T>) {
    let v = check_cauchy_seq(x, m, horizon);
    let k = v.witness().unwrap_or(horizon);
    (x.term(k), v)
}

/// Continuous map with an optional modulus of continuity `m ↦ m'`:
/// `|x - y| < 1/m'` implies `|f(x) - f(y)| < 1/m` on the domain of interest.
#[derive(Clone)]
pub struct RingMap<T> {
    map: Arc<dyn Fn(&T) -> T + Send + Sync>,
    continuity: Option<Modulus>,
}

impl<T: Scalar> RingMap<T> {
    pub fn new(map: impl Fn(&T) -> T + Send + Sync + 'static) -> Self {
        RingMap {
            map: Arc::new(map),
            continuity: None,
        }
    }

    pub fn with_continuity(mut self, modulus: impl Fn(u64) -> usize + Send + Sync + 'static) -> Self {
        self.continuity = Some(Arc::new(modulus));
        self
    }

    pub fn apply(&self, x: &T) -> T {
        (self.map)(x)
    }
}

/// `(f(x_k))_k`. A modulus is kept only when both `x` and `f` carry one.
pub fn lift<T: Scalar>(f: &RingMap<T>, x: &CauchySeq<T>) -> CauchySeq<T> {
    let (f2, x2) = (f.clone(), x.clone());
    let out = CauchySeq::new(move |k| f2.apply(&x2.term(k)));
    match (&f.continuity, &x.modulus) {
        (Some(c), Some(mx)) => {
            let (c, mx) = (c.clone(), mx.clone());
            out.with_modulus(move |m| mx(c(m) as u64))
        }
        _ => out,
    }
}

/// `y_n = ψ(n, x_n)`: the `n`-th approximation of a map evaluated on the `n`-th approximant.
pub fn diagonal<T: Scalar>(
    psi: impl Fn(usize, &T) -> T + Send + Sync + 'static,
    x: &CauchySeq<T>,
) -> CauchySeq<T> {
    let x = x.clone();
    CauchySeq::new(move |n| psi(n, &x.term(n)))
}

/// `φ(0,x) = 1`, `φ(n,x) = φ(n-1,x) + x^n/n!`.
pub fn exp_partial<T: Scalar>(n: usize, x: &T) -> T {
    let mut sum = T::one();
    let mut term = T::one();
    for i in 1..=n {
        term = term * x.clone() / T::from_usize(i).expect("index fits the scalar type");
        sum = sum + term.clone();
    }
    sum
}

/// `exp` on a Cauchy sequence: `y_n = φ(n, x_n)`.
pub fn exp_real<T: Scalar>(x: &CauchySeq<T>) -> CauchySeq<T> {
    diagonal(|n, v| exp_partial(n, v), x)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot read `{0}` as a rational number")]
pub struct ParseRationalError(String);

/// Reads `p/q`, an integer, or a finite decimal such as `-1.25`, exactly.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(err());
    }
    let digits = format!("{int}{frac}");
    let numer = BigInt::from_str(&digits).map_err(|_| err())?;
    let denom = num_traits::pow(BigInt::from(10u32), frac.len());
    let r = BigRational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Always `p/q` in lowest terms, so `1` renders as `1/1`.
pub fn render_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal expansion truncated toward zero at `places` digits.
pub fn render_decimal(r: &BigRational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), places);
    let scaled = (r.abs() * BigRational::from_integer(scale.clone())).to_integer();
    let int = &scaled / &scale;
    let frac = (&scaled % &scale).to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac:0>places$}")
    }
}

/// The sequence `1, 1, 1, ...` as a rational Cauchy sequence; handy for `exp 1`.
pub fn rational_constant(r: BigRational) -> CauchySeq<BigRational> {
    CauchySeq::constant(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::new(p.into(), r.into())
    }

    #[test]
    fn exp_partial_small_cases() {
        assert_eq!(exp_partial(0, &q(1, 1)), q(1, 1));
        assert_eq!(exp_partial(1, &q(1, 1)), q(2, 1));
        assert_eq!(exp_partial(3, &q(1, 1)), q(8, 3));
        assert_eq!(exp_partial(5, &BigRational::zero()), q(1, 1));
        assert_eq!(exp_partial(2, &q(-2, 1)), q(1, 1));
        assert_eq!(exp_partial(2, &q(1, 1)), q(5, 2));
        assert_eq!(exp_partial(3, &q(1, 2)), q(79, 48));
    }

    #[test]
    fn exp_of_one_settles_at_nine() {
        let x = rational_constant(q(1, 1));
        let (y, v) = eval(&exp_real(&x), 1_000_000, 30);
        assert_eq!(v.witness(), Some(9));
        assert_eq!(y, exp_partial(9, &q(1, 1)));
        assert_eq!(render_decimal(&y, 6), "2.718281");
    }

    #[test]
    fn exp_of_zero_is_one() {
        let (y, v) = eval(&exp_real(&rational_constant(BigRational::zero())), 1000, 30);
        assert!(v.is_converged());
        assert_eq!(render_rational(&y), "1/1");
    }

    #[test]
    fn lift_keeps_modulus_only_with_continuity() {
        let x = CauchySeq::new(|k| q(1, k as i64 + 1)).with_modulus(|m| m as usize);
        let double = RingMap::new(|v: &BigRational| v * q(2, 1));
        assert!(lift(&double, &x).modulus(4).is_none());
        let double = double.with_continuity(|m| 2 * m as usize);
        let y = lift(&double, &x);
        assert_eq!(y.modulus(4), Some(8));
        assert_eq!(y.term(3), q(1, 2));
    }

    #[test]
    fn divergent_sequence_is_refuted() {
        let x = CauchySeq::new(|k| BigRational::from_integer(((k % 2) as i64).into()));
        assert!(matches!(check_cauchy_seq(&x, 2, 10), Verdict::RefutedAt { .. }));
    }

    #[test]
    fn parse_and_render() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        for bad in ["", "1/0", "abc", "1.2.3", "-", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(render_rational(&q(4, 2)), "2/1");
        assert_eq!(render_decimal(&q(-1, 3), 3), "-0.333");
        assert_eq!(render_decimal(&q(5, 2), 0), "2");
    }

    #[test]
    fn works_over_floats() {
        let x = CauchySeq::constant(1.0f64);
        let (y, v) = eval(&exp_real(&x), 1000, 20);
        assert!(v.is_converged());
        assert!((y - std::f64::consts::E).abs() < 1e-3);
    }
}
