//! Squares at infinity, the pair condition `gamma` and the set `D`, witness
//! pairs ramified exactly at `{P, inf}`, and a checker for the identity
//! `A u A_inf = intersection over (a, b) in D of R~_{a,b}`, where `A = F_q[t]`
//! and `A_inf` is the valuation ring at infinity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::dirichlet::find_prime_in_ap;
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};
use crate::places::{self, Place};
use crate::poly::{enumerate_monic, Poly};
use crate::quaternion::{delta, RamificationSet};
use crate::ratfunc::RatFunc;

/// Degree-class searches for a witness prime stop after this many extra degrees.
pub const WITNESS_DEGREE_SLACK: usize = 6;

/// Below this many candidates a degree class is swept in order.
const SWEEP_LIMIT: u64 = 1 << 16;
const PROBE_LIMIT: usize = 1 << 12;

/// The smallest nonsquare of the field in code order.
pub fn default_epsilon(field: &Field) -> Result<FieldElem> {
    Ok(field.elem(field.smallest_nonsquare()?))
}

fn ensure_nonsquare(eps: &FieldElem) -> Result<()> {
    eps.field().ensure_odd()?;
    if eps.is_zero() || eps.is_square()? {
        return Err(Error::NotANonsquare(eps.to_string()));
    }
    Ok(())
}

fn v_inf(x: &RatFunc) -> i64 {
    places::valuation(x, &Place::Infinity).expect("nonzero argument")
}

/// Whether `c` is a square in `K_inf`: square leading ratio and even `v_inf`.
pub fn phi_inf(c: &RatFunc) -> Result<bool> {
    if c.is_zero() {
        return Err(Error::ZeroInput("phi_inf"));
    }
    let field = c.field();
    field.ensure_odd()?;
    Ok(v_inf(c) % 2 == 0 && field.is_square(c.lead_ratio())?)
}

/// Square class of a nonzero element of `K_inf`, with `h` a nonsquare constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfSquareClass {
    Square,
    OverT,
    Nonsquare,
    NonsquareOverT,
}

impl fmt::Display for InfSquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfSquareClass::Square => "sq",
            InfSquareClass::OverT => "(1/t)*sq",
            InfSquareClass::Nonsquare => "h*sq",
            InfSquareClass::NonsquareOverT => "(h/t)*sq",
        })
    }
}

pub fn inf_square_class(c: &RatFunc) -> Result<InfSquareClass> {
    if c.is_zero() {
        return Err(Error::ZeroInput("inf_square_class"));
    }
    let field = c.field();
    field.ensure_odd()?;
    let odd = v_inf(c) % 2 != 0;
    let square = field.is_square(c.lead_ratio())?;
    Ok(match (odd, square) {
        (false, true) => InfSquareClass::Square,
        (true, true) => InfSquareClass::OverT,
        (false, false) => InfSquareClass::Nonsquare,
        (true, false) => InfSquareClass::NonsquareOverT,
    })
}

/// Parity of `-v_inf(x)`, which is the degree parity for polynomials.
fn degree_parity(x: &RatFunc) -> i64 {
    (-v_inf(x)).rem_euclid(2)
}

/// The pair condition defining `D`: one of `a/eps`, `b/eps` is a square at
/// infinity and the other entry has the opposite degree parity.
pub fn gamma_check(a: &RatFunc, b: &RatFunc, eps: &FieldElem) -> Result<bool> {
    if a.field() != b.field() || a.field() != eps.field() {
        return Err(Error::FieldMismatch);
    }
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput("gamma_check"));
    }
    ensure_nonsquare(eps)?;
    let inv = eps.inv().expect("nonsquare is nonzero").code();
    let branch = |c: &RatFunc, d: &RatFunc| -> Result<bool> {
        let c = c.scale(inv);
        Ok(phi_inf(&c)? && degree_parity(&c) != degree_parity(d))
    };
    Ok(branch(a, b)? || branch(b, a)?)
}

/// A pair `(eps P, eps Q)` in `D` whose quaternion algebra ramifies exactly
/// at `P` and infinity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessPair {
    pub a: RatFunc,
    pub b: RatFunc,
    pub p: Place,
    pub q: Place,
    pub epsilon: FieldElem,
}

pub fn witness_pair<R: Rng + ?Sized>(p: &Place, eps: &FieldElem, rng: &mut R) -> Result<WitnessPair> {
    witness_pair_with_cap(p, eps, p.residue_degree() + WITNESS_DEGREE_SLACK, rng)
}

/// Builds a witness pair for the finite place `p`, trying partner degrees up to `cap`.
///
/// For odd `deg P` the partner is an even-degree prime `Q = 1 mod P`. For even
/// `deg P` it is the first odd-degree prime (smallest degree, then enumeration
/// order) that is a nonsquare mod `P`. Either way the ramification set and the
/// pair condition are verified before returning.
pub fn witness_pair_with_cap<R: Rng + ?Sized>(
    p: &Place,
    eps: &FieldElem,
    cap: usize,
    rng: &mut R,
) -> Result<WitnessPair> {
    let prime = p.prime().ok_or_else(|| Error::Precondition("witness pairs need a finite place".into()))?;
    if prime.field() != eps.field() {
        return Err(Error::FieldMismatch);
    }
    ensure_nonsquare(eps)?;
    let field = prime.field();
    let deg_p = p.residue_degree();
    let partner = if deg_p % 2 == 1 {
        let one = Poly::one(field);
        let mut found = None;
        for k in (2..=cap).step_by(2) {
            if let Some(q) = find_prime_in_ap(prime, &one, k, rng)? {
                found = Some(q);
                break;
            }
        }
        found
    } else {
        (1..=cap).step_by(2).find_map(|k| nonsquare_prime(prime, k, rng).transpose()).transpose()?
    };
    let q = partner.ok_or_else(|| {
        Error::SearchExhausted(format!("no partner prime for {prime} up to degree {cap}"))
    })?;
    let a = RatFunc::from(prime.scale(eps.code()));
    let b = RatFunc::from(q.scale(eps.code()));
    let pair = WitnessPair { a, b, p: p.clone(), q: Place::Finite(q), epsilon: eps.clone() };
    verify_witness(&pair)?;
    Ok(pair)
}

/// Some monic prime of degree `k` whose residue mod `p` is a nonsquare.
fn nonsquare_prime<R: Rng + ?Sized>(p: &Poly, k: usize, rng: &mut R) -> Result<Option<Poly>> {
    let field = p.field();
    let accept = |q: &Poly| -> Result<bool> { Ok(q != p && !places::is_square_mod(q, p)? && q.is_irreducible()?) };
    let space = u32::try_from(k).ok().and_then(|k| field.order().checked_pow(k));
    match space {
        Some(n) if n <= SWEEP_LIMIT => {
            for q in enumerate_monic(field, k) {
                if accept(&q)? {
                    return Ok(Some(q));
                }
            }
        }
        _ => {
            for _ in 0..PROBE_LIMIT {
                let q = Poly::random_monic(field, k, rng);
                if accept(&q)? {
                    return Ok(Some(q));
                }
            }
        }
    }
    Ok(None)
}

fn verify_witness(pair: &WitnessPair) -> Result<()> {
    let ram = delta(&pair.a, &pair.b)?;
    let expected: BTreeSet<Place> = [pair.p.clone(), Place::Infinity].into();
    if ram.places != expected {
        let got: Vec<String> = ram.places.iter().map(Place::to_string).collect();
        return Err(Error::Verification(format!("ramification of ({}, {}) is {{{}}}", pair.a, pair.b, got.join(", "))));
    }
    if !gamma_check(&pair.a, &pair.b, &pair.epsilon)? {
        return Err(Error::Verification(format!("({}, {}) fails the pair condition", pair.a, pair.b)));
    }
    Ok(())
}

/// `x in A u A_inf`: polynomial, or integral at infinity.
pub fn member_a_union_ainf_semantic(x: &RatFunc) -> bool {
    x.is_zero() || x.is_polynomial() || v_inf(x) >= 0
}

/// Whether `x` reduces to a constant.
pub fn is_constant_semantic(x: &RatFunc) -> bool {
    x.is_constant()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSource {
    Witness,
    Sampled,
}

/// A pair in `D` together with its ramification set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DPair {
    pub source: PairSource,
    pub ramification: RamificationSet,
}

/// Draws pairs from `D`, alternating witness pairs at random places with
/// random pairs that pass [`gamma_check`]. Witness pairs are cached per place.
pub struct DPairSampler {
    field: Field,
    epsilon: FieldElem,
    max_prime_degree: usize,
    witnesses: BTreeMap<Place, WitnessPair>,
    drawn: usize,
}

impl DPairSampler {
    pub fn new(epsilon: &FieldElem) -> Result<DPairSampler> {
        ensure_nonsquare(epsilon)?;
        Ok(DPairSampler {
            field: epsilon.field().clone(),
            epsilon: epsilon.clone(),
            max_prime_degree: 3,
            witnesses: BTreeMap::new(),
            drawn: 0,
        })
    }

    pub fn epsilon(&self) -> &FieldElem {
        &self.epsilon
    }

    pub fn witness<R: Rng + ?Sized>(&mut self, p: &Place, rng: &mut R) -> Result<WitnessPair> {
        if let Some(w) = self.witnesses.get(p) {
            return Ok(w.clone());
        }
        let w = witness_pair(p, &self.epsilon, rng)?;
        self.witnesses.insert(p.clone(), w.clone());
        Ok(w)
    }

    fn random_place<R: Rng + ?Sized>(&self, rng: &mut R) -> Place {
        let d = rng.gen_range(1..=self.max_prime_degree);
        loop {
            let p = Poly::random_monic(&self.field, d, rng);
            if p.is_irreducible().expect("same field") {
                return Place::Finite(p);
            }
        }
    }

    pub fn random_witness<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<DPair> {
        let p = self.random_place(rng);
        let w = self.witness(&p, rng)?;
        Ok(DPair { source: PairSource::Witness, ramification: delta(&w.a, &w.b)? })
    }

    pub fn random_gamma_pair<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<DPair> {
        loop {
            let a = RatFunc::random_nonzero(&self.field, 3, 2, rng);
            let b = RatFunc::random_nonzero(&self.field, 3, 2, rng);
            if gamma_check(&a, &b, &self.epsilon)? {
                let ramification = delta(&a, &b)?;
                if !ramification.contains(&Place::Infinity) {
                    return Err(Error::Verification(format!("({a}, {b}) is in D but unramified at infinity")));
                }
                return Ok(DPair { source: PairSource::Sampled, ramification });
            }
        }
    }

    /// The next pair: witness and sampled pairs alternate.
    pub fn next<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<DPair> {
        self.drawn += 1;
        if self.drawn % 2 == 1 {
            self.random_witness(rng)
        } else {
            self.random_gamma_pair(rng)
        }
    }
}

/// One pair tested against `x`, with the valuations of `x` on its ramification set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairEvidence {
    pub source: PairSource,
    pub a: RatFunc,
    pub b: RatFunc,
    pub delta: Vec<Place>,
    pub valuations: BTreeMap<Place, Option<i64>>,
    pub r_tilde: bool,
}

impl PairEvidence {
    fn new(pair: &DPair, x: &RatFunc) -> Result<PairEvidence> {
        let ram = &pair.ramification;
        Ok(PairEvidence {
            source: pair.source,
            a: ram.a.clone(),
            b: ram.b.clone(),
            delta: ram.places.iter().cloned().collect(),
            valuations: ram.valuations(x)?,
            r_tilde: ram.contains_r_tilde(x)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremVerdict {
    pub x: RatFunc,
    /// Direct test: polynomial or integral at infinity.
    pub semantic: bool,
    /// Membership in every tested `R~_{a,b}`.
    pub theorem: bool,
    pub agree: bool,
    pub evidence: Vec<PairEvidence>,
}

/// Compares the direct description of `A u A_inf` with membership in `R~_{a,b}`
/// over pairs from `D`. Members are tested against `sample_size` pairs; a
/// non-member is tested against the witness pair at a pole of `x`.
pub fn member_a_union_ainf_theorem<R: Rng + ?Sized>(
    x: &RatFunc,
    eps: &FieldElem,
    sample_size: usize,
    rng: &mut R,
) -> Result<TheoremVerdict> {
    let mut sampler = DPairSampler::new(eps)?;
    member_a_union_ainf_theorem_with(&mut sampler, x, sample_size, rng)
}

pub fn member_a_union_ainf_theorem_with<R: Rng + ?Sized>(
    sampler: &mut DPairSampler,
    x: &RatFunc,
    sample_size: usize,
    rng: &mut R,
) -> Result<TheoremVerdict> {
    if x.field() != &sampler.field {
        return Err(Error::FieldMismatch);
    }
    let semantic = member_a_union_ainf_semantic(x);
    let mut evidence = Vec::new();
    if semantic {
        for _ in 0..sample_size {
            evidence.push(PairEvidence::new(&sampler.next(rng)?, x)?);
        }
    } else {
        let pole = x.den().factor_default()?.factors.into_iter().next().expect("nonconstant denominator").0;
        let w = sampler.witness(&Place::Finite(pole), rng)?;
        let pair = DPair { source: PairSource::Witness, ramification: delta(&w.a, &w.b)? };
        evidence.push(PairEvidence::new(&pair, x)?);
    }
    let theorem = evidence.iter().all(|e| e.r_tilde);
    Ok(TheoremVerdict { x: x.clone(), semantic, theorem, agree: semantic == theorem, evidence })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemberAVerdict {
    pub union: TheoremVerdict,
    /// `v_inf(x) < 0` or `x` constant.
    pub degree_clause: bool,
    pub verdict: bool,
    /// Direct test: the denominator is constant.
    pub expected: bool,
    pub agree: bool,
}

/// Membership in `A = F_q[t]`: in `A u A_inf` and either of positive degree or constant.
pub fn member_a<R: Rng + ?Sized>(x: &RatFunc, eps: &FieldElem, sample_size: usize, rng: &mut R) -> Result<MemberAVerdict> {
    let mut sampler = DPairSampler::new(eps)?;
    member_a_with(&mut sampler, x, sample_size, rng)
}

pub fn member_a_with<R: Rng + ?Sized>(
    sampler: &mut DPairSampler,
    x: &RatFunc,
    sample_size: usize,
    rng: &mut R,
) -> Result<MemberAVerdict> {
    let union = member_a_union_ainf_theorem_with(sampler, x, sample_size, rng)?;
    let degree_clause = is_constant_semantic(x) || v_inf(x) < 0;
    let verdict = union.theorem && degree_clause;
    let expected = x.is_polynomial();
    Ok(MemberAVerdict { union, degree_clause, verdict, expected, agree: verdict == expected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::monic_irreducibles;
    use crate::symbols::local_symbol;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn r(field: &Field, num: &[i64], den: &[i64]) -> RatFunc {
        RatFunc::new(Poly::from_ints(field, num), Poly::from_ints(field, den)).unwrap()
    }

    fn place(field: &Field, ints: &[i64]) -> Place {
        Place::finite(Poly::from_ints(field, ints)).unwrap()
    }

    #[test]
    fn phi_and_classes() {
        let k = f(3);
        assert!(phi_inf(&r(&k, &[0, 0, 1], &[1])).unwrap());
        assert!(!phi_inf(&r(&k, &[0, 0, 2], &[1])).unwrap());
        assert!(phi_inf(&r(&k, &[1, 1], &[0, 1])).unwrap());
        assert!(phi_inf(&RatFunc::zero(&k)).is_err());
        assert_eq!(inf_square_class(&r(&k, &[2], &[0, 1])).unwrap(), InfSquareClass::NonsquareOverT);
        assert_eq!(inf_square_class(&RatFunc::t(&k)).unwrap(), InfSquareClass::OverT);
        assert_eq!(inf_square_class(&RatFunc::constant(&k, 2)).unwrap(), InfSquareClass::Nonsquare);
        assert_eq!(inf_square_class(&RatFunc::one(&k)).unwrap(), InfSquareClass::Square);
        assert_eq!(default_epsilon(&k).unwrap().code(), 2);
    }

    #[test]
    fn square_classes_match_local_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for field in [f(3), f(5), Field::new(3, 2).unwrap()] {
            for _ in 0..200 {
                let x = RatFunc::random_nonzero(&field, 3, 3, &mut rng);
                let sq = places::is_square_local(&x, &Place::Infinity).unwrap();
                assert_eq!(phi_inf(&x).unwrap(), sq);
                assert_eq!(inf_square_class(&x).unwrap() == InfSquareClass::Square, sq);
                assert!(phi_inf(&(&x * &x)).unwrap());
            }
        }
    }

    #[test]
    fn gamma_examples() {
        let k = f(3);
        let eps = k.elem(2);
        let a = r(&k, &[0, 2], &[1]);
        let b = r(&k, &[2, 0, 2], &[1]);
        assert!(gamma_check(&a, &b, &eps).unwrap());
        let one = RatFunc::one(&k);
        assert!(!gamma_check(&one, &one, &eps).unwrap());
        assert!(!gamma_check(&a, &a, &eps).unwrap());
        assert!(matches!(gamma_check(&a, &b, &k.elem(1)), Err(Error::NotANonsquare(_))));
        assert!(gamma_check(&RatFunc::zero(&k), &b, &eps).is_err());
    }

    #[test]
    fn witness_examples() {
        let k = f(3);
        let eps = k.elem(2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let w = witness_pair(&place(&k, &[0, 1]), &eps, &mut rng).unwrap();
        assert_eq!(w.b, r(&k, &[2, 0, 2], &[1]));
        assert_eq!(w.a, r(&k, &[0, 2], &[1]));
        let w = witness_pair(&place(&k, &[1, 0, 1]), &eps, &mut rng).unwrap();
        assert_eq!(w.a, r(&k, &[2, 0, 2], &[1]));
        assert_eq!(w.b, r(&k, &[2, 2], &[1]));
        assert!(witness_pair(&Place::Infinity, &eps, &mut rng).is_err());
        let k9 = Field::new(3, 2).unwrap();
        let eps9 = default_epsilon(&k9).unwrap();
        let w = witness_pair(&Place::Finite(Poly::t(&k9)), &eps9, &mut rng).unwrap();
        assert_eq!(w.q.residue_degree() % 2, 0);
    }

    #[test]
    fn witnesses_exhaustive_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for field in [f(3), f(5)] {
            let eps = default_epsilon(&field).unwrap();
            for d in 1..=3 {
                for p in monic_irreducibles(&field, d) {
                    let v = Place::Finite(p.clone());
                    let w = witness_pair(&v, &eps, &mut rng).unwrap();
                    assert_ne!(w.p.residue_degree() % 2, w.q.residue_degree() % 2);
                    assert!(gamma_check(&w.a, &w.b, &eps).unwrap());
                    assert_eq!(local_symbol(&w.a, &w.b, &v).unwrap(), -1);
                    assert_eq!(local_symbol(&w.a, &w.b, &Place::Infinity).unwrap(), -1);
                    assert_eq!(local_symbol(&w.a, &w.b, &w.q).unwrap(), 1);
                }
            }
        }
    }

    #[test]
    fn semantic_examples() {
        let k = f(3);
        assert!(member_a_union_ainf_semantic(&r(&k, &[0, 0, 1], &[1])));
        assert!(member_a_union_ainf_semantic(&r(&k, &[1], &[1, 1])));
        assert!(!member_a_union_ainf_semantic(&r(&k, &[1, 0, 1], &[0, 1])));
        assert!(is_constant_semantic(&RatFunc::constant(&k, 2)));
        assert!(!is_constant_semantic(&RatFunc::t(&k)));
        assert!(is_constant_semantic(&r(&k, &[2, 2], &[1, 1])));
    }

    #[test]
    fn theorem_examples() {
        let k = f(3);
        let eps = k.elem(2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = member_a_union_ainf_theorem(&r(&k, &[0, 0, 1], &[1]), &eps, 20, &mut rng).unwrap();
        assert!(v.semantic && v.theorem && v.agree);
        assert_eq!(v.evidence.len(), 20);
        assert!(v.evidence.iter().any(|e| e.source == PairSource::Sampled));

        let v = member_a_union_ainf_theorem(&r(&k, &[0, 0, 1], &[1, 1]), &eps, 20, &mut rng).unwrap();
        assert!(!v.semantic && !v.theorem && v.agree);
        assert_eq!(v.evidence[0].delta, vec![place(&k, &[1, 1]), Place::Infinity]);

        let v = member_a_union_ainf_theorem(&r(&k, &[1], &[0, 1]), &eps, 10, &mut rng).unwrap();
        assert!(v.semantic && v.theorem);

        let m = member_a(&r(&k, &[0, 2, 0, 1], &[1]), &eps, 10, &mut rng).unwrap();
        assert!(m.verdict && m.agree);
        let m = member_a(&r(&k, &[1], &[1, 1]), &eps, 10, &mut rng).unwrap();
        assert!(!m.verdict && m.agree);
        let m = member_a(&RatFunc::constant(&k, 2), &eps, 10, &mut rng).unwrap();
        assert!(m.verdict && m.agree);
    }

    #[test]
    fn theorem_agrees_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for field in [f(3), f(5)] {
            let eps = default_epsilon(&field).unwrap();
            let mut sampler = DPairSampler::new(&eps).unwrap();
            let (mut members, mut others) = (0, 0);
            for _ in 0..60 {
                let x = RatFunc::random(&field, 3, 2, &mut rng);
                let m = member_a_with(&mut sampler, &x, 6, &mut rng).unwrap();
                assert!(m.union.agree && m.agree, "{x}");
                if m.union.semantic {
                    members += 1;
                } else {
                    others += 1;
                }
            }
            assert!(members > 0 && others > 0);
        }
    }
}
