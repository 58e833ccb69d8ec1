//! Places of `K = F_q(t)`: valuations, residue maps and local square tests.
//!
//! Completions are never materialized. Every local question reduces to a
//! valuation plus arithmetic in the residue field `F_q[t]/(P)` (or `F_q` at
//! infinity, whose uniformizer is `1/t`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

/// A place of `K`. Finite places sort before infinity, and among themselves
/// by degree and then coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Finite(Poly),
    Infinity,
}

impl Place {
    /// Validates that `p` is monic and irreducible.
    pub fn finite(p: Poly) -> Result<Place> {
        if !p.is_monic() || p.is_constant() || !p.is_irreducible()? {
            return Err(Error::NotAPrime(p.to_string()));
        }
        Ok(Place::Finite(p))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    pub fn prime(&self) -> Option<&Poly> {
        match self {
            Place::Finite(p) => Some(p),
            Place::Infinity => None,
        }
    }

    /// `deg P` for finite places, 1 at infinity.
    pub fn residue_degree(&self) -> usize {
        match self {
            Place::Finite(p) => p.degree().expect("prime is nonzero"),
            Place::Infinity => 1,
        }
    }

    /// Order of the residue field, `q^h`, if it fits in 64 bits.
    pub fn residue_field_order(&self, field: &Field) -> Option<u64> {
        field.order().checked_pow(self.residue_degree() as u32)
    }

    /// The residue field as a standalone [`Field`] (isomorphic copy).
    pub fn residue_field(&self, field: &Field) -> Result<Field> {
        Field::new(field.characteristic(), field.degree() * self.residue_degree() as u32)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Place({self})")
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Multiplicity of the monic irreducible `p` in the nonzero polynomial `f`.
pub(crate) fn multiplicity(f: &Poly, p: &Poly) -> (i64, Poly) {
    let mut k = 0;
    let mut g = f.clone();
    loop {
        let (quot, rem) = g.divmod(p).expect("nonzero prime");
        if !rem.is_zero() {
            return (k, g);
        }
        g = quot;
        k += 1;
    }
}

/// `v_P(x)`, or `deg den - deg num` at infinity. Undefined for zero.
pub fn valuation(x: &RatFunc, v: &Place) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroInput("valuation"));
    }
    Ok(match v {
        Place::Finite(p) => multiplicity(x.num(), p).0 - multiplicity(x.den(), p).0,
        Place::Infinity => degree_of(x.den()) - degree_of(x.num()),
    })
}

fn degree_of(p: &Poly) -> i64 {
    p.degree().expect("nonzero") as i64
}

/// Membership in the valuation ring at `v`; zero belongs to every ring.
pub fn in_valuation_ring(x: &RatFunc, v: &Place) -> bool {
    x.is_zero() || valuation(x, v).expect("nonzero") >= 0
}

/// `red_P(x)` as a polynomial of degree `< deg P`.
pub fn residue(x: &RatFunc, v: &Place) -> Result<Poly> {
    let p = v
        .prime()
        .ok_or_else(|| Error::Precondition("residue needs a finite place; use residue_inf".into()))?;
    if x.is_zero() {
        return Ok(Poly::zero(x.field()));
    }
    let val = valuation(x, v)?;
    if val < 0 {
        return Err(Error::NegativeValuation { valuation: val, place: v.to_string() });
    }
    if val > 0 {
        return Ok(Poly::zero(x.field()));
    }
    let den_inv = x.den().inv_mod(p).expect("denominator is a unit at P");
    Ok(x.num().mul_mod(&den_inv, p))
}

/// `red_inf(x)`: 0 if `v_inf(x) > 0`, the leading-coefficient ratio if it is 0.
pub fn residue_inf(x: &RatFunc) -> Result<FieldElem> {
    let field = x.field();
    if x.is_zero() {
        return Ok(field.zero_elem());
    }
    let val = valuation(x, &Place::Infinity)?;
    if val < 0 {
        return Err(Error::NegativeValuation { valuation: val, place: "inf".into() });
    }
    Ok(if val > 0 { field.zero_elem() } else { field.elem(x.lead_ratio()) })
}

/// Every place with nonzero valuation, with that valuation.
pub fn support(x: &RatFunc) -> Result<BTreeMap<Place, i64>> {
    if x.is_zero() {
        return Err(Error::ZeroInput("support"));
    }
    let mut out = BTreeMap::new();
    for (p, m) in x.num().factor_default()?.factors {
        out.insert(Place::Finite(p), m as i64);
    }
    for (p, m) in x.den().factor_default()?.factors {
        out.insert(Place::Finite(p), -(m as i64));
    }
    let v_inf = valuation(x, &Place::Infinity)?;
    if v_inf != 0 {
        out.insert(Place::Infinity, v_inf);
    }
    Ok(out)
}

/// Places where `x` has odd valuation.
pub fn odd_support(x: &RatFunc) -> Result<BTreeSet<Place>> {
    Ok(support(x)?.into_iter().filter(|(_, v)| v % 2 != 0).map(|(p, _)| p).collect())
}

/// Norm of a residue class down to `F_q`: `r^((q^h - 1)/(q - 1)) mod P`, a constant.
pub(crate) fn residue_norm(r: &Poly, p: &Poly) -> u64 {
    let h = p.degree().expect("nonzero prime");
    let n = r.norm_power_mod(h, p);
    debug_assert!(n.is_constant(), "norm of {r} mod {p} is {n}");
    n.coeff(0)
}

/// `r^((q^h - 1)/n) mod P` for `n | q - 1`, computed as `N(r)^((q - 1)/n)`.
pub(crate) fn power_character(r: &Poly, p: &Poly, n: u64) -> u64 {
    let field = p.field();
    debug_assert_eq!((field.order() - 1) % n, 0);
    field.pow(residue_norm(r, p), ((field.order() - 1) / n) as u128)
}

/// Square test in `F_q[t]/(P)` via the exponent `(q^h - 1)/2`.
pub fn is_square_mod(r: &Poly, p: &Poly) -> Result<bool> {
    let field = p.field();
    field.ensure_odd()?;
    let r = r.rem(p)?;
    if r.is_zero() {
        return Ok(true);
    }
    Ok(power_character(&r, p, 2) == 1)
}

/// Whether `x` is a square in the completion `K_v`: even valuation and a
/// square residue of the unit part `x / pi^v(x)`.
pub fn is_square_local(x: &RatFunc, v: &Place) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::ZeroInput("is_square_local"));
    }
    x.field().ensure_odd()?;
    match v {
        Place::Infinity => {
            let val = valuation(x, v)?;
            Ok(val % 2 == 0 && x.field().is_square(x.lead_ratio())?)
        }
        Place::Finite(p) => {
            let (kn, num_unit) = multiplicity(x.num(), p);
            let (kd, den_unit) = multiplicity(x.den(), p);
            if (kn - kd) % 2 != 0 {
                return Ok(false);
            }
            let den_inv = den_unit.inv_mod(p).expect("unit at P");
            is_square_mod(&num_unit.mul_mod(&den_inv, p), p)
        }
    }
}
