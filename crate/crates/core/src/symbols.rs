//! Power residue symbols on `F_q[t]`, the general reciprocity law, and the
//! quadratic local (Hilbert) symbols of `F_q(t)` with their product formula.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::thread;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};
use crate::places::{self, power_character, Place};
use crate::poly::{enumerate_polys, Factorization, Poly};
use crate::ratfunc::RatFunc;

/// Value of a residue symbol: an `n`-th root of unity, or zero when the prime
/// divides the numerator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum SymbolValue {
    Zero,
    Root(FieldElem),
}

impl SymbolValue {
    pub fn is_zero(&self) -> bool {
        matches!(self, SymbolValue::Zero)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, SymbolValue::Root(x) if x.is_one())
    }

    /// `Some(0 | 1 | -1)` when the value is one of those, `None` otherwise.
    pub fn as_sign(&self) -> Option<i8> {
        match self {
            SymbolValue::Zero => Some(0),
            SymbolValue::Root(x) if x.is_one() => Some(1),
            SymbolValue::Root(x) if x.is_minus_one() => Some(-1),
            SymbolValue::Root(_) => None,
        }
    }

    fn mul(&self, other: &SymbolValue) -> SymbolValue {
        match (self, other) {
            (SymbolValue::Root(a), SymbolValue::Root(b)) => SymbolValue::Root(a * b),
            _ => SymbolValue::Zero,
        }
    }
}

impl fmt::Display for SymbolValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.as_sign(), self) {
            (Some(s), _) => write!(f, "{s}"),
            (None, SymbolValue::Root(x)) => write!(f, "{x}"),
            (None, SymbolValue::Zero) => unreachable!(),
        }
    }
}

impl Serialize for SymbolValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.as_sign() {
            Some(v) => s.serialize_i8(v),
            None => s.collect_str(self),
        }
    }
}

fn check_exponent(field: &Field, n: u64) -> Result<()> {
    let q = field.order();
    if n.is_multiple_of(2) {
        field.ensure_odd()?;
    }
    if n < 2 || !(q - 1).is_multiple_of(n) {
        return Err(Error::BadExponent { n, q });
    }
    Ok(())
}

/// `(alpha / P)_n`: zero if `P | alpha`, otherwise the constant
/// `alpha^((q^deg P - 1)/n) mod P`.
pub fn residue_symbol(alpha: &Poly, p: &Poly, n: u64) -> Result<SymbolValue> {
    check_exponent(p.field(), n)?;
    if alpha.field() != p.field() {
        return Err(Error::FieldMismatch);
    }
    Place::finite(p.clone())?;
    Ok(residue_symbol_at_prime(alpha, p, n))
}

/// [`residue_symbol`] without validating `p` or `n`.
pub(crate) fn residue_symbol_at_prime(alpha: &Poly, p: &Poly, n: u64) -> SymbolValue {
    let r = alpha.rem(p).expect("nonzero prime");
    if r.is_zero() {
        return SymbolValue::Zero;
    }
    SymbolValue::Root(p.field().elem(power_character(&r, p, n)))
}

/// `(alpha / beta)_n = prod (alpha / P_i)_n^(d_i)` over the monic prime
/// factorization of `beta`; the leading coefficient of `beta` plays no part.
pub fn residue_symbol_general(alpha: &Poly, beta: &Poly, n: u64) -> Result<SymbolValue> {
    check_exponent(beta.field(), n)?;
    if alpha.field() != beta.field() {
        return Err(Error::FieldMismatch);
    }
    if beta.is_zero() {
        return Err(Error::ZeroInput("residue_symbol_general: beta"));
    }
    Ok(symbol_over_factors(alpha, &beta.factor_default()?, n))
}

fn symbol_over_factors(alpha: &Poly, beta: &Factorization, n: u64) -> SymbolValue {
    beta.factors.iter().fold(SymbolValue::Root(alpha.field().one_elem()), |acc, (p, d)| {
        let s = residue_symbol_at_prime(alpha, p, n);
        let s = match s {
            SymbolValue::Root(x) => SymbolValue::Root(x.pow(*d as u128)),
            zero => zero,
        };
        acc.mul(&s)
    })
}

/// `sign_n(f) = lead(f)^((q-1)/n)`.
pub fn sign_n(f: &Poly, n: u64) -> Result<FieldElem> {
    check_exponent(f.field(), n)?;
    if f.is_zero() {
        return Err(Error::ZeroInput("sign_n"));
    }
    Ok(sign_unchecked(f, n))
}

fn sign_unchecked(f: &Poly, n: u64) -> FieldElem {
    let q = f.field().order();
    f.lead_elem().pow(((q - 1) / n) as u128)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReciprocityCheck {
    #[serde(serialize_with = "ser_display")]
    pub lhs: FieldElem,
    #[serde(serialize_with = "ser_display")]
    pub rhs: FieldElem,
    pub pass: bool,
}

pub(crate) fn ser_display<T: fmt::Display, S: Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

/// Evaluates both sides of
/// `(a/b)_n (b/a)_n^-1 = (-1)^(((q-1)/n) deg a deg b) sign_n(a)^deg b sign_n(b)^-deg a`
/// for coprime nonzero `a`, `b`.
pub fn check_general_reciprocity(alpha: &Poly, beta: &Poly, n: u64) -> Result<ReciprocityCheck> {
    check_exponent(alpha.field(), n)?;
    if alpha.field() != beta.field() {
        return Err(Error::FieldMismatch);
    }
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::ZeroInput("check_general_reciprocity"));
    }
    if !alpha.gcd(beta).is_one() {
        return Err(Error::NotCoprime);
    }
    let fa = alpha.factor_default()?;
    let fb = beta.factor_default()?;
    Ok(reciprocity_from_factors(alpha, &fa, beta, &fb, n))
}

fn reciprocity_from_factors(
    alpha: &Poly,
    fa: &Factorization,
    beta: &Poly,
    fb: &Factorization,
    n: u64,
) -> ReciprocityCheck {
    let ab = symbol_over_factors(alpha, fb, n);
    let ba = symbol_over_factors(beta, fa, n);
    reciprocity_sides(alpha, beta, &ab, &ba, n)
}

fn reciprocity_sides(alpha: &Poly, beta: &Poly, ab: &SymbolValue, ba: &SymbolValue, n: u64) -> ReciprocityCheck {
    let field = alpha.field();
    let (SymbolValue::Root(ab), SymbolValue::Root(ba)) = (ab, ba) else {
        unreachable!("coprime inputs give unit symbols")
    };
    let lhs = ab * &ba.inv().expect("root of unity");
    let q = field.order();
    let (da, db) = (alpha.degree().unwrap() as u128, beta.degree().unwrap() as u128);
    let sign_exp = ((q - 1) / n) as u128 * da * db;
    let mut rhs = if sign_exp.is_multiple_of(2) { field.one_elem() } else { -&field.one_elem() };
    rhs = &rhs * &sign_unchecked(alpha, n).pow(db);
    rhs = &rhs * &sign_unchecked(beta, n).inv().expect("unit").pow(da);
    let pass = lhs == rhs;
    ReciprocityCheck { lhs, rhs, pass }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReciprocityViolation {
    #[serde(serialize_with = "ser_display")]
    pub alpha: Poly,
    #[serde(serialize_with = "ser_display")]
    pub beta: Poly,
    pub check: ReciprocityCheck,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub max_degree: usize,
    pub n: u64,
    pub pairs_checked: u64,
    pub violations: Vec<ReciprocityViolation>,
}

/// Checks the general reciprocity law on every coprime ordered pair of
/// nonzero polynomials of degree `<= max_degree`. Work is split into `jobs`
/// contiguous shards of `alpha`; the report does not depend on `jobs`.
pub fn reciprocity_sweep(field: &Field, max_degree: usize, n: u64, jobs: usize) -> Result<SweepReport> {
    check_exponent(field, n)?;
    let polys: Vec<Poly> = enumerate_polys(field, max_degree).filter(|p| !p.is_zero()).collect();
    let factors: Vec<Factorization> = polys.iter().map(|p| p.factor_default()).collect::<Result<_>>()?;
    // Every prime that occurs, and each polynomial's symbol against it.
    let primes: Vec<Poly> = factors
        .iter()
        .flat_map(|f| f.factors.iter().map(|(p, _)| p.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let prime_index: BTreeMap<&Poly, usize> = primes.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let table: Vec<Vec<SymbolValue>> = polys
        .iter()
        .map(|a| primes.iter().map(|p| residue_symbol_at_prime(a, p, n)).collect())
        .collect();
    let general = |a: usize, b: usize| {
        factors[b].factors.iter().fold(SymbolValue::Root(field.one_elem()), |acc, (p, d)| {
            let s = match &table[a][prime_index[p]] {
                SymbolValue::Root(x) => SymbolValue::Root(x.pow(*d as u128)),
                zero => zero.clone(),
            };
            acc.mul(&s)
        })
    };
    let coprime = |a: usize, b: usize| {
        let pb: BTreeSet<&Poly> = factors[b].factors.iter().map(|(p, _)| p).collect();
        factors[a].factors.iter().all(|(p, _)| !pb.contains(p))
    };
    let run = |range: std::ops::Range<usize>| {
        let mut checked = 0u64;
        let mut bad = Vec::new();
        for a in range {
            for b in 0..polys.len() {
                if !coprime(a, b) {
                    continue;
                }
                checked += 1;
                let check = reciprocity_sides(&polys[a], &polys[b], &general(a, b), &general(b, a), n);
                if !check.pass {
                    bad.push(ReciprocityViolation { alpha: polys[a].clone(), beta: polys[b].clone(), check });
                }
            }
        }
        (checked, bad)
    };
    let jobs = jobs.max(1);
    let chunk = polys.len().div_ceil(jobs);
    let results: Vec<(u64, Vec<ReciprocityViolation>)> = if jobs == 1 {
        vec![run(0..polys.len())]
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    let lo = (j * chunk).min(polys.len());
                    let hi = ((j + 1) * chunk).min(polys.len());
                    let run = &run;
                    s.spawn(move || run(lo..hi))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("sweep shard panicked")).collect()
        })
    };
    let mut report = SweepReport { max_degree, n, pairs_checked: 0, violations: Vec::new() };
    for (checked, bad) in results {
        report.pairs_checked += checked;
        report.violations.extend(bad);
    }
    Ok(report)
}

/// The quadratic local symbol
/// `(a, b)_v = ((-1)^(v(a)v(b)) red_v(a^v(b) / b^v(a)))^((q^h - 1)/2)`, as `+1` or `-1`.
pub fn local_symbol(alpha: &RatFunc, beta: &RatFunc, v: &Place) -> Result<i8> {
    if alpha.field() != beta.field() {
        return Err(Error::FieldMismatch);
    }
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::ZeroInput("local_symbol"));
    }
    let field = alpha.field();
    field.ensure_odd()?;
    let va = places::valuation(alpha, v)?;
    let vb = places::valuation(beta, v)?;
    let mut gamma = alpha.pow(vb)?.try_div(&beta.pow(va)?)?;
    if (va * vb) % 2 != 0 {
        gamma = -&gamma;
    }
    if places::valuation(&gamma, v)? != 0 {
        return Err(Error::Verification(format!("local symbol argument {gamma} is not a unit at {v}")));
    }
    let value = match v {
        Place::Finite(p) => power_character(&places::residue(&gamma, v)?, p, 2),
        Place::Infinity => field.pow(gamma.lead_ratio(), ((field.order() - 1) / 2) as u128),
    };
    if value == 1 {
        Ok(1)
    } else {
        debug_assert_eq!(value, field.minus_one());
        Ok(-1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertReport {
    pub per_place: BTreeMap<Place, i8>,
    pub product: i8,
}

/// Local symbols at every place where `alpha` or `beta` has nonzero valuation,
/// plus infinity, and their product. Any other place has both valuations zero,
/// so its argument `gamma = 1` and the symbol is trivially 1.
pub fn hilbert_product(alpha: &RatFunc, beta: &RatFunc) -> Result<HilbertReport> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::ZeroInput("hilbert_product"));
    }
    alpha.field().ensure_odd()?;
    let mut candidates: BTreeSet<Place> = places::support(alpha)?.into_keys().collect();
    candidates.extend(places::support(beta)?.into_keys());
    candidates.insert(Place::Infinity);
    let mut per_place = BTreeMap::new();
    let mut product = 1;
    for v in candidates {
        let s = local_symbol(alpha, beta, &v)?;
        product *= s;
        per_place.insert(v, s);
    }
    Ok(HilbertReport { per_place, product })
}
