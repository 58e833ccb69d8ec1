//! Ramification sets of quaternion algebras `(a, b)` over `K` and the subsets
//! of `K` they cut out: `S`, `T`, `T^x`, the parity class, `I^c`, the Jacobson
//! radical `J` and `R~`.
//!
//! All of these are local conditions at the places of `Delta_{a,b}`, so
//! membership is a finite valuation check. `S` is decided place by place.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};
use crate::places::{self, Place};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::symbols::local_symbol;

/// `Delta_{a,b}`: the places where `(a, b)_v = -1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamificationSet {
    pub a: RatFunc,
    pub b: RatFunc,
    pub places: BTreeSet<Place>,
}

/// Computes `Delta_{a,b}`. Only places in the odd support of `a` or `b` can
/// ramify, so those are the only candidates tested.
pub fn delta(a: &RatFunc, b: &RatFunc) -> Result<RamificationSet> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput("delta"));
    }
    a.field().ensure_odd()?;
    let mut candidates = places::odd_support(a)?;
    candidates.extend(places::odd_support(b)?);
    let mut ramified = BTreeSet::new();
    for v in candidates {
        if local_symbol(a, b, &v)? == -1 {
            ramified.insert(v);
        }
    }
    Ok(RamificationSet { a: a.clone(), b: b.clone(), places: ramified })
}

fn val(x: &RatFunc, v: &Place) -> i64 {
    places::valuation(x, v).expect("nonzero argument")
}

fn ensure_nonzero(x: &RatFunc, what: &'static str) -> Result<()> {
    if x.is_zero() {
        Err(Error::ZeroInput(what))
    } else {
        Ok(())
    }
}

impl RamificationSet {
    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn contains(&self, v: &Place) -> bool {
        self.places.contains(v)
    }

    pub fn field(&self) -> &Field {
        self.a.field()
    }

    fn nonempty(&self) -> Result<&BTreeSet<Place>> {
        if self.places.is_empty() {
            Err(Error::EmptyRamification)
        } else {
            Ok(&self.places)
        }
    }

    fn same_field(&self, x: &RatFunc) -> Result<()> {
        if x.field() == self.field() {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// `v(x)` at every place of the set; `None` stands for `v(0) = +inf`.
    pub fn valuations(&self, x: &RatFunc) -> Result<BTreeMap<Place, Option<i64>>> {
        self.same_field(x)?;
        Ok(self
            .places
            .iter()
            .map(|v| (v.clone(), (!x.is_zero()).then(|| val(x, v))))
            .collect())
    }

    /// Whether `eps` is the trace of a norm-one element of the algebra over
    /// the completion at `v`. Off `Delta` every element qualifies. On `Delta`
    /// the traces are `+-2` and the integral `eps` whose `x^2 - eps x + 1`
    /// stays irreducible, i.e. `eps^2 - 4` is a local nonsquare.
    pub fn contains_s_local(&self, eps: &RatFunc, v: &Place) -> Result<bool> {
        self.same_field(eps)?;
        if !self.contains(v) {
            return Ok(true);
        }
        let field = self.field();
        let two = RatFunc::constant(field, field.from_int(2));
        if *eps == two || *eps == -&two {
            return Ok(true);
        }
        if !places::in_valuation_ring(eps, v) {
            return Ok(false);
        }
        let disc = &(eps * eps) - &RatFunc::constant(field, field.from_int(4));
        Ok(!disc.is_zero() && !places::is_square_local(&disc, v)?)
    }

    /// `S_{a,b}`: local membership at every place of `Delta`.
    pub fn contains_s(&self, eps: &RatFunc) -> Result<bool> {
        for v in &self.places {
            if !self.contains_s_local(eps, v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `T_{a,b}`, the intersection of the valuation rings at `Delta`.
    pub fn contains_t(&self, x: &RatFunc) -> Result<bool> {
        self.same_field(x)?;
        Ok(self.nonempty()?.iter().all(|v| places::in_valuation_ring(x, v)))
    }

    /// Units of `T_{a,b}`: valuation zero at every place of `Delta`. Checked
    /// against the equivalent condition `(x^2 + 1)/x in T`.
    pub fn contains_t_unit(&self, x: &RatFunc) -> Result<bool> {
        self.same_field(x)?;
        let ps = self.nonempty()?;
        if x.is_zero() {
            return Ok(false);
        }
        let direct = ps.iter().all(|v| val(x, v) == 0);
        let via_t = self.contains_t(&(x + &x.inv()?))?;
        if direct != via_t {
            return Err(Error::Verification(format!("unit test for {x} disagrees with (x^2+1)/x in T")));
        }
        Ok(direct)
    }

    /// `K^2 T^x`: even valuation at every place of `Delta`.
    pub fn contains_parity(&self, x: &RatFunc) -> Result<bool> {
        self.same_field(x)?;
        let ps = self.nonempty()?;
        ensure_nonzero(x, "parity class")?;
        Ok(ps.iter().all(|v| val(x, v) % 2 == 0))
    }

    /// `I^c`: odd positive valuation on `Delta` inside the odd support of `c`;
    /// elsewhere on `Delta` both `x` and `1 - x` have even valuation. For
    /// `x = 1` the second clause fails.
    pub fn contains_i_c(&self, x: &RatFunc, c: &RatFunc) -> Result<bool> {
        self.same_field(x)?;
        self.same_field(c)?;
        let ps = self.nonempty()?;
        ensure_nonzero(x, "I^c element")?;
        ensure_nonzero(c, "I^c parameter")?;
        let odd_c = places::odd_support(c)?;
        let one_minus = &RatFunc::one(x.field()) - x;
        for v in ps {
            if odd_c.contains(v) {
                let k = val(x, v);
                if k <= 0 || k % 2 == 0 {
                    return Ok(false);
                }
            } else if val(x, v) % 2 != 0 || one_minus.is_zero() || val(&one_minus, v) % 2 != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `J(T_{a,b})`: positive valuation at every place of `Delta`.
    pub fn contains_jacobson(&self, x: &RatFunc) -> Result<bool> {
        self.same_field(x)?;
        let ps = self.nonempty()?;
        Ok(x.is_zero() || ps.iter().all(|v| val(x, v) >= 1))
    }

    /// `R~_{a,b}`: integral at some place of `Delta`.
    pub fn contains_r_tilde(&self, x: &RatFunc) -> Result<bool> {
        self.same_field(x)?;
        let ps = self.nonempty()?;
        Ok(x.is_zero() || ps.iter().any(|v| val(x, v) >= 0))
    }
}

pub fn s_local_member(eps: &RatFunc, a: &RatFunc, b: &RatFunc, v: &Place) -> Result<bool> {
    delta(a, b)?.contains_s_local(eps, v)
}

pub fn s_global_member(eps: &RatFunc, a: &RatFunc, b: &RatFunc) -> Result<bool> {
    delta(a, b)?.contains_s(eps)
}

pub fn t_member(x: &RatFunc, a: &RatFunc, b: &RatFunc) -> Result<bool> {
    delta(a, b)?.contains_t(x)
}

pub fn t_unit_member(x: &RatFunc, a: &RatFunc, b: &RatFunc) -> Result<bool> {
    delta(a, b)?.contains_t_unit(x)
}

pub fn parity_class_member(x: &RatFunc, a: &RatFunc, b: &RatFunc) -> Result<bool> {
    delta(a, b)?.contains_parity(x)
}

pub fn i_c_member(x: &RatFunc, a: &RatFunc, b: &RatFunc, c: &RatFunc) -> Result<bool> {
    delta(a, b)?.contains_i_c(x, c)
}

pub fn jacobson_member(x: &RatFunc, a: &RatFunc, b: &RatFunc) -> Result<bool> {
    delta(a, b)?.contains_jacobson(x)
}

pub fn r_tilde_member(x: &RatFunc, a: &RatFunc, b: &RatFunc) -> Result<bool> {
    delta(a, b)?.contains_r_tilde(x)
}

/// The elements `s` of a finite field for which `x^2 - s x + 1` is irreducible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct USet {
    pub q: u64,
    pub members: Vec<FieldElem>,
    /// Whether `U + U` is the whole field.
    pub covers: bool,
}

pub fn u_set(field: &Field) -> Result<USet> {
    field.ensure_odd()?;
    let four = field.from_int(4);
    let mut codes = Vec::new();
    for s in field.codes() {
        let disc = field.sub(field.mul(s, s), four);
        if disc != 0 && !field.is_square(disc)? {
            codes.push(s);
        }
    }
    let mut hit = vec![false; field.order() as usize];
    for &u in &codes {
        for &w in &codes {
            hit[field.add(u, w) as usize] = true;
        }
    }
    Ok(USet {
        q: field.order(),
        members: codes.iter().map(|&c| field.elem(c)).collect(),
        covers: hit.iter().all(|&h| h),
    })
}

/// Random candidates tried per denominator degree.
const DECOMPOSE_ATTEMPTS: usize = 256;

/// Writes `x in T_{a,b}` as `s1 + s2` with both parts in `S_{a,b}`.
///
/// Tries `2 + (x - 2)` and `-2 + (x + 2)`, then constant `s1`, then random
/// `s1 = A/B` with `deg A <= deg B <= bound`. `None` means the search gave up,
/// not that no decomposition exists.
pub fn decompose_t_element<R: Rng + ?Sized>(
    x: &RatFunc,
    a: &RatFunc,
    b: &RatFunc,
    bound: usize,
    rng: &mut R,
) -> Result<Option<(RatFunc, RatFunc)>> {
    let set = delta(a, b)?;
    if !set.contains_t(x)? {
        return Err(Error::Precondition(format!("{x} is not in T")));
    }
    let field = x.field();
    for v in &set.places {
        if v.residue_field_order(field).is_some_and(|n| n <= 11) {
            return Err(Error::Precondition(format!("residue field at {v} has at most 11 elements")));
        }
    }
    let try_split = |s1: RatFunc| -> Result<Option<(RatFunc, RatFunc)>> {
        let s2 = x - &s1;
        Ok((set.contains_s(&s1)? && set.contains_s(&s2)?).then_some((s1, s2)))
    };
    let two = field.from_int(2);
    for c in [two, field.neg(two)].into_iter().chain(field.codes()) {
        if let Some(pair) = try_split(RatFunc::constant(field, c))? {
            return Ok(Some(pair));
        }
    }
    for d in 1..=bound {
        for _ in 0..DECOMPOSE_ATTEMPTS {
            let num = Poly::random(field, d, rng);
            let den = Poly::random_monic(field, d, rng);
            if let Some(pair) = try_split(RatFunc::new(num, den)?)? {
                return Ok(Some(pair));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
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

    /// `(t, t+1)` over `F_3`, whose ramification set is `{t+1, inf}`.
    fn pair3() -> (Field, RatFunc, RatFunc) {
        let k = f(3);
        let a = r(&k, &[0, 1], &[1]);
        let b = r(&k, &[1, 1], &[1]);
        (k.clone(), a, b)
    }

    #[test]
    fn delta_examples() {
        let (k, a, b) = pair3();
        let d = delta(&a, &b).unwrap();
        let expect: BTreeSet<Place> = [place(&k, &[1, 1]), Place::Infinity].into();
        assert_eq!(d.places, expect);
        let one = RatFunc::one(&k);
        assert!(delta(&one, &one).unwrap().is_empty());
        assert_eq!(delta(&RatFunc::zero(&k), &one), Err(Error::ZeroInput("delta")));
        let f2 = f(2);
        assert!(matches!(delta(&RatFunc::t(&f2), &RatFunc::one(&f2)), Err(Error::EvenCharacteristic(2))));
    }

    #[test]
    fn s_examples() {
        let (k, a, b) = pair3();
        let tp1 = place(&k, &[1, 1]);
        let two = RatFunc::constant(&k, 2);
        assert!(s_local_member(&two, &a, &b, &tp1).unwrap());
        assert!(s_local_member(&RatFunc::zero(&k), &a, &b, &tp1).unwrap());
        let bad = r(&k, &[1], &[1, 1]);
        assert!(!s_local_member(&bad, &a, &b, &tp1).unwrap());
        assert!(s_local_member(&bad, &a, &b, &place(&k, &[0, 1])).unwrap());
        assert!(s_global_member(&-&two, &a, &b).unwrap());
        assert!(s_global_member(&RatFunc::zero(&k), &a, &b).unwrap());
        assert!(!s_global_member(&bad, &a, &b).unwrap());
        // 1 = -2 in F_3.
        assert!(s_global_member(&RatFunc::one(&k), &a, &b).unwrap());
    }

    #[test]
    fn valuation_set_examples() {
        let (k, a, b) = pair3();
        let d = delta(&a, &b).unwrap();
        assert!(d.contains_t(&r(&k, &[1], &[2, 1])).unwrap());
        assert!(!d.contains_t(&RatFunc::t(&k)).unwrap());
        assert!(d.contains_t(&RatFunc::constant(&k, 2)).unwrap());

        assert!(d.contains_t_unit(&RatFunc::constant(&k, 2)).unwrap());
        assert!(d.contains_t_unit(&r(&k, &[2, 1], &[0, 1])).unwrap());
        assert!(!d.contains_t_unit(&r(&k, &[1], &[2, 1])).unwrap());

        assert!(d.contains_parity(&RatFunc::one(&k)).unwrap());
        assert!(d.contains_parity(&r(&k, &[0, 0, 1], &[1])).unwrap());
        assert!(!d.contains_parity(&r(&k, &[1, 1], &[1])).unwrap());

        let c = r(&k, &[1, 1], &[1]);
        let x = r(&k, &[1, 1], &[0, 0, 1]);
        assert!(d.contains_i_c(&x, &c).unwrap());
        assert!(!d.contains_i_c(&RatFunc::one(&k), &c).unwrap());
        assert!(!d.contains_i_c(&r(&k, &[0, 0, 1], &[1]), &RatFunc::one(&k)).unwrap());
        assert!(!d.contains_i_c(&RatFunc::one(&k), &RatFunc::one(&k)).unwrap());

        assert!(d.contains_jacobson(&RatFunc::zero(&k)).unwrap());
        assert!(d.contains_jacobson(&x).unwrap());
        assert!(!d.contains_jacobson(&RatFunc::one(&k)).unwrap());

        assert!(d.contains_r_tilde(&RatFunc::zero(&k)).unwrap());
        assert!(d.contains_r_tilde(&RatFunc::t(&k)).unwrap());
        assert!(!d.contains_r_tilde(&r(&k, &[0, 0, 1], &[1, 1])).unwrap());
    }

    #[test]
    fn empty_delta_is_an_error() {
        let k = f(3);
        let one = RatFunc::one(&k);
        let t = RatFunc::t(&k);
        assert_eq!(t_member(&t, &one, &one), Err(Error::EmptyRamification));
        assert_eq!(jacobson_member(&t, &one, &one), Err(Error::EmptyRamification));
        assert_eq!(r_tilde_member(&t, &one, &one), Err(Error::EmptyRamification));
        assert_eq!(parity_class_member(&t, &one, &one), Err(Error::EmptyRamification));
        assert!(s_global_member(&t, &one, &one).unwrap());
    }

    #[test]
    fn u_set_examples() {
        let u3 = u_set(&f(3)).unwrap();
        assert_eq!(u3.members, vec![f(3).elem(0)]);
        assert!(!u3.covers);
        let u5 = u_set(&f(5)).unwrap();
        assert_eq!(u5.members.iter().map(|e| e.code()).collect::<Vec<_>>(), vec![1, 4]);
        let u13 = u_set(&f(13)).unwrap();
        assert_eq!(u13.members.len(), 6);
        assert!(u13.covers);
        assert!(u_set(&f(2)).is_err());
    }

    #[test]
    fn u_set_matches_irreducibility() {
        for field in [f(3), f(5), f(7), f(11), Field::new(3, 2).unwrap()] {
            let u = u_set(&field).unwrap();
            for s in field.codes() {
                let quad = Poly::from_codes(&field, vec![1, field.neg(s), 1]);
                let irreducible = quad.is_irreducible().unwrap();
                assert_eq!(u.members.iter().any(|e| e.code() == s), irreducible, "s = {s} over {field}");
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let k = f(13);
        let a = RatFunc::t(&k).scale(2);
        let b = r(&k, &[1, 0, 1], &[1]).scale(2);
        let d = delta(&a, &b).unwrap();
        assert!(d.contains(&Place::Infinity));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (s1, s2) = decompose_t_element(&RatFunc::zero(&k), &a, &b, 2, &mut rng).unwrap().unwrap();
        assert_eq!((s1, s2), (RatFunc::constant(&k, 2), RatFunc::constant(&k, 11)));
        let (s1, s2) = decompose_t_element(&RatFunc::constant(&k, 4), &a, &b, 2, &mut rng).unwrap().unwrap();
        assert_eq!((s1, s2), (RatFunc::constant(&k, 2), RatFunc::constant(&k, 2)));
        let x = r(&k, &[3, 5, 7], &[1, 2, 1]);
        assert!(d.contains_t(&x).unwrap());
        let (s1, s2) = decompose_t_element(&x, &a, &b, 3, &mut rng).unwrap().unwrap();
        assert_eq!(&s1 + &s2, x);
        assert!(d.contains_s(&s1).unwrap() && d.contains_s(&s2).unwrap());
        assert!(decompose_t_element(&RatFunc::t(&k), &a, &b, 2, &mut rng).is_err());
        let (k3, a3, b3) = pair3();
        assert!(decompose_t_element(&RatFunc::zero(&k3), &a3, &b3, 2, &mut rng).is_err());
    }

    #[test]
    fn sampled_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for field in [f(3), f(5), f(7)] {
            for _ in 0..150 {
                let a = RatFunc::random_nonzero(&field, 3, 2, &mut rng);
                let b = RatFunc::random_nonzero(&field, 3, 2, &mut rng);
                let d = delta(&a, &b).unwrap();
                assert_eq!(d.len() % 2, 0, "({a}, {b})");

                let s = RatFunc::random_nonzero(&field, 2, 2, &mut rng);
                let u = RatFunc::random_nonzero(&field, 2, 2, &mut rng);
                let scaled = delta(&(&a * &(&s * &s)), &(&b * &(&u * &u))).unwrap();
                assert_eq!(scaled.places, d.places);

                if d.is_empty() {
                    continue;
                }
                let x = RatFunc::random(&field, 3, 3, &mut rng);
                let dual = x.is_zero() || !d.contains_jacobson(&x.inv().unwrap()).unwrap();
                assert_eq!(d.contains_r_tilde(&x).unwrap(), dual);

                let k = RatFunc::random_nonzero(&field, 2, 2, &mut rng);
                let w = RatFunc::random_nonzero(&field, 2, 2, &mut rng);
                if d.contains_t_unit(&w).unwrap() {
                    assert!(d.contains_parity(&(&(&k * &k) * &w)).unwrap());
                }

                let s1 = RatFunc::random(&field, 2, 2, &mut rng);
                let s2 = RatFunc::random(&field, 2, 2, &mut rng);
                if d.contains_s(&s1).unwrap() && d.contains_s(&s2).unwrap() {
                    assert!(d.contains_t(&(&s1 + &s2)).unwrap());
                }
            }
        }
    }

    #[test]
    fn even_valuation_places_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let field = f(5);
        for _ in 0..50 {
            let a = RatFunc::random_nonzero(&field, 3, 2, &mut rng);
            let b = RatFunc::random_nonzero(&field, 3, 2, &mut rng);
            let mut all: BTreeSet<Place> = places::support(&a).unwrap().into_keys().collect();
            all.extend(places::support(&b).unwrap().into_keys());
            all.insert(Place::Infinity);
            let odd: BTreeSet<Place> =
                places::odd_support(&a).unwrap().union(&places::odd_support(&b).unwrap()).cloned().collect();
            for v in all.difference(&odd) {
                assert_eq!(local_symbol(&a, &b, v).unwrap(), 1);
            }
        }
    }
}
