//! Finite fields `F_{p^e}`.
//!
//! A [`Field`] is a cheap, shareable handle. Elements are addressed by a `u64`
//! code: the base-`p` digits of the code are the coordinates of the element in
//! the power basis of the modulus (constant coordinate least significant).
//! Constants `0..p` therefore have the same code in every extension.
//!
//! Hot loops work on raw codes through the `Field` methods; [`FieldElem`] is
//! the checked value type used at API boundaries.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::arith;
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Extension fields up to this order get discrete log tables.
const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

struct Inner {
    p: u64,
    e: u32,
    q: u64,
    /// Monic modulus over `F_p`, constant term first, length `e + 1`.
    modulus: Option<Vec<u64>>,
    tables: Option<LogTables>,
}

struct LogTables {
    /// `exp[i] = g^i` for `i < 2(q - 1)`, so sums of two logs index directly.
    exp: Vec<u64>,
    /// `log[x]` for `x != 0`; `log[0]` is unused.
    log: Vec<u32>,
}

impl Field {
    /// Builds `F_{p^e}`. The modulus is the smallest monic irreducible of
    /// degree `e` over `F_p`, ordering candidates by their coefficient tuple
    /// `(c_0, c_1, ..., c_{e-1})`.
    pub fn new(p: u64, e: u32) -> Result<Field> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::ZeroExtensionDegree);
        }
        let q = p.checked_pow(e).ok_or(Error::FieldTooLarge { p, e })?;
        if e == 1 {
            return Ok(Field::from_inner(Inner { p, e, q, modulus: None, tables: None }));
        }
        let modulus = smallest_irreducible(p, e);
        let mut inner = Inner { p, e, q, modulus: Some(modulus), tables: None };
        if q <= TABLE_LIMIT {
            inner.tables = Some(LogTables::build(&inner));
        }
        Ok(Field::from_inner(inner))
    }

    pub fn prime(p: u64) -> Result<Field> {
        Field::new(p, 1)
    }

    fn from_inner(inner: Inner) -> Field {
        Field { inner: Arc::new(inner) }
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.e
    }

    pub fn order(&self) -> u64 {
        self.inner.q
    }

    pub fn is_odd(&self) -> bool {
        self.inner.p != 2
    }

    /// The modulus as a polynomial over the prime field, if `e > 1`.
    pub fn modulus(&self) -> Option<Poly> {
        let m = self.inner.modulus.as_ref()?;
        let fp = Field::prime(self.inner.p).expect("characteristic is prime");
        Some(Poly::from_codes(&fp, m.clone()))
    }

    pub fn ensure_odd(&self) -> Result<()> {
        if self.is_odd() {
            Ok(())
        } else {
            Err(Error::EvenCharacteristic(self.inner.q))
        }
    }

    pub fn elem(&self, code: u64) -> FieldElem {
        assert!(code < self.inner.q, "element code {code} out of range for {self}");
        FieldElem { field: self.clone(), code }
    }

    pub fn zero_elem(&self) -> FieldElem {
        self.elem(0)
    }

    pub fn one_elem(&self) -> FieldElem {
        self.elem(1)
    }

    /// All element codes in enumeration order.
    pub fn codes(&self) -> std::ops::Range<u64> {
        0..self.inner.q
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        self.codes().map(move |c| self.elem(c))
    }

    /// Embeds an integer as a prime-field constant.
    pub fn from_int(&self, n: i64) -> u64 {
        let p = self.inner.p as i128;
        (n as i128).rem_euclid(p) as u64
    }

    pub fn digits(&self, mut code: u64) -> Vec<u64> {
        let p = self.inner.p;
        (0..self.inner.e)
            .map(|_| {
                let d = code % p;
                code /= p;
                d
            })
            .collect()
    }

    /// Encodes a coordinate vector; entries are reduced mod `p`, missing
    /// trailing coordinates are zero.
    pub fn from_digits(&self, digits: &[u64]) -> Result<u64> {
        if digits.len() > self.inner.e as usize {
            return Err(Error::Parse(format!(
                "{} coordinates given for a degree-{} field",
                digits.len(),
                self.inner.e
            )));
        }
        let p = self.inner.p;
        Ok(digits.iter().rev().fold(0u64, |acc, &d| acc * p + d % p))
    }

    // --- raw arithmetic on codes ---

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let p = self.inner.p;
        if self.inner.e == 1 {
            return add_mod(a, b, p);
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.inner.e {
            out += add_mod(a % p, b % p, p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        let p = self.inner.p;
        if self.inner.e == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        let mut a = a;
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.inner.e {
            let d = a % p;
            out += if d == 0 { 0 } else { p - d } * place;
            a /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let inner = &*self.inner;
        if inner.e == 1 {
            return mul_mod(a, b, inner.p);
        }
        if let Some(t) = &inner.tables {
            return t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize];
        }
        slow_ext_mul(inner, a, b)
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let inner = &*self.inner;
        if let Some(t) = &inner.tables {
            let l = t.log[a as usize] as u64;
            let idx = if l == 0 { 0 } else { inner.q - 1 - l };
            return Some(t.exp[idx as usize]);
        }
        Some(self.pow(a, (inner.q - 2) as u128))
    }

    pub fn div(&self, a: u64, b: u64) -> Option<u64> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `a^k` by square-and-multiply; nonzero bases have their exponent
    /// reduced mod `q - 1` first. `0^0 = 1`.
    pub fn pow(&self, a: u64, k: u128) -> u64 {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let mut k = k % (self.inner.q - 1) as u128;
        if let Some(t) = &self.inner.tables {
            let l = (t.log[a as usize] as u128 * k) % (self.inner.q - 1) as u128;
            return t.exp[l as usize];
        }
        let (mut base, mut acc) = (a, 1u64);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Euler's criterion: `0` or `a^((q-1)/2) = 1`.
    pub fn is_square(&self, a: u64) -> Result<bool> {
        if a == 0 {
            return Ok(true);
        }
        self.ensure_odd()?;
        Ok(self.pow(a, ((self.inner.q - 1) / 2) as u128) == 1)
    }

    /// The first nonsquare in enumeration order.
    pub fn smallest_nonsquare(&self) -> Result<u64> {
        self.ensure_odd()?;
        Ok(self
            .codes()
            .find(|&c| !self.is_square(c).expect("odd field"))
            .expect("odd fields have nonsquares"))
    }

    /// A square root of `a`, if one exists. Exponentiation when
    /// `q = 3 mod 4`, bounded enumeration otherwise.
    pub fn sqrt(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return Some(0);
        }
        if !self.is_square(a).ok()? {
            return None;
        }
        let q = self.inner.q;
        if q % 4 == 3 {
            return Some(self.pow(a, ((q + 1) / 4) as u128));
        }
        self.codes().find(|&x| self.mul(x, x) == a)
    }

    pub fn minus_one(&self) -> u64 {
        self.neg(1)
    }

    pub fn format_code(&self, code: u64) -> String {
        if self.inner.e == 1 {
            code.to_string()
        } else {
            let parts: Vec<String> = self.digits(code).iter().map(u64::to_string).collect();
            format!("[{}]", parts.join(","))
        }
    }
}

impl LogTables {
    fn build(inner: &Inner) -> LogTables {
        let q = inner.q;
        let order = q - 1;
        let factors = arith::prime_divisors(order);
        let pow = |mut base: u64, mut k: u64| {
            let mut acc = 1u64;
            while k > 0 {
                if k & 1 == 1 {
                    acc = slow_ext_mul(inner, acc, base);
                }
                base = slow_ext_mul(inner, base, base);
                k >>= 1;
            }
            acc
        };
        let generator = (2..q)
            .find(|&g| factors.iter().all(|&r| pow(g, order / r) != 1))
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u64; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u64;
        for i in 0..order as usize {
            exp[i] = x;
            exp[i + order as usize] = x;
            log[x as usize] = i as u32;
            x = slow_ext_mul(inner, x, generator);
        }
        LogTables { exp, log }
    }
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= p {
        s.wrapping_sub(p)
    } else {
        s
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    if p <= u32::MAX as u64 {
        (a * b) % p
    } else {
        ((a as u128 * b as u128) % p as u128) as u64
    }
}

/// Schoolbook product of coordinate vectors reduced by the monic modulus.
fn slow_ext_mul(inner: &Inner, a: u64, b: u64) -> u64 {
    let p = inner.p;
    let e = inner.e as usize;
    let modulus = inner.modulus.as_ref().expect("extension field");
    let split = |mut c: u64| {
        (0..e)
            .map(|_| {
                let d = c % p;
                c /= p;
                d
            })
            .collect::<Vec<u64>>()
    };
    let (da, db) = (split(a), split(b));
    let mut prod = vec![0u64; 2 * e - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = add_mod(prod[i + j], mul_mod(x, y, p), p);
        }
    }
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for (i, &m) in modulus[..e].iter().enumerate() {
            let sub = mul_mod(c, m, p);
            let idx = k - e + i;
            prod[idx] = add_mod(prod[idx], p - sub, p) % p;
        }
        prod[k] = 0;
    }
    prod[..e].iter().rev().fold(0u64, |acc, &d| acc * p + d)
}

fn smallest_irreducible(p: u64, e: u32) -> Vec<u64> {
    let fp = Field::prime(p).expect("prime");
    let e = e as usize;
    // Tuple (c_0, ..., c_{e-1}) with c_0 most significant.
    let mut tuple = vec![0u64; e];
    loop {
        let mut coeffs = tuple.clone();
        coeffs.push(1);
        let candidate = Poly::from_codes(&fp, coeffs.clone());
        if candidate.is_irreducible().expect("positive degree") {
            return coeffs;
        }
        let mut i = e;
        loop {
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < p {
                break;
            }
            tuple[i] = 0;
            assert!(i > 0, "irreducible polynomials exist in every degree");
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.e == other.inner.e)
    }
}

impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.inner.p.hash(state);
        self.inner.e.hash(state);
    }
}

impl PartialOrd for Field {
    fn partial_cmp(&self, other: &Field) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Field {
    fn cmp(&self, other: &Field) -> std::cmp::Ordering {
        (self.inner.p, self.inner.e).cmp(&(other.inner.p, other.inner.e))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.inner.p, self.inner.e)
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.inner.q)
    }
}

/// An element of a [`Field`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    field: Field,
    code: u64,
}

impl FieldElem {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    /// Coordinates in the power basis of the modulus, length `e`.
    pub fn coefficients(&self) -> Vec<u64> {
        self.field.digits(self.code)
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    pub fn is_one(&self) -> bool {
        self.code == 1
    }

    pub fn is_minus_one(&self) -> bool {
        self.code == self.field.minus_one()
    }

    fn check(&self, other: &FieldElem) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn with(&self, code: u64) -> FieldElem {
        FieldElem { field: self.field.clone(), code }
    }

    pub fn try_add(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        Ok(self.with(self.field.add(self.code, other.code)))
    }

    pub fn try_sub(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        Ok(self.with(self.field.sub(self.code, other.code)))
    }

    pub fn try_mul(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        Ok(self.with(self.field.mul(self.code, other.code)))
    }

    pub fn try_div(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        let inv = self.field.inv(other.code).ok_or(Error::DivisionByZero)?;
        Ok(self.with(self.field.mul(self.code, inv)))
    }

    pub fn inv(&self) -> Result<FieldElem> {
        self.field.inv(self.code).map(|c| self.with(c)).ok_or(Error::DivisionByZero)
    }

    pub fn pow(&self, k: u128) -> FieldElem {
        self.with(self.field.pow(self.code, k))
    }

    pub fn is_square(&self) -> Result<bool> {
        self.field.is_square(self.code)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_code(self.code))
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self, self.field)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &FieldElem {
            type Output = FieldElem;
            /// Panics if the operands live in different fields.
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.$checked(rhs).expect("field element arithmetic")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        self.with(self.field.neg(self.code))
    }
}

impl serde::Serialize for FieldElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields() -> Vec<Field> {
        [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2), (3, 3), (7, 2), (2, 3)]
            .iter()
            .map(|&(p, e)| Field::new(p, e).unwrap())
            .collect()
    }

    #[test]
    fn construction_examples() {
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.order(), 3);
        assert!(f3.modulus().is_none());

        let f9 = Field::new(3, 2).unwrap();
        // y^2 + 1
        assert_eq!(f9.modulus().unwrap().codes(), &[1, 0, 1]);

        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(f2.order(), 2);
        assert!(f2.is_square(1).is_err());

        assert_eq!(Field::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(Field::new(3, 0).unwrap_err(), Error::ZeroExtensionDegree);
        assert!(matches!(Field::new(3, 60), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn modulus_is_deterministic_and_minimal() {
        for &(p, e) in &[(2u64, 4u32), (3, 2), (3, 3), (5, 2), (7, 3)] {
            let a = Field::new(p, e).unwrap().modulus().unwrap();
            let b = Field::new(p, e).unwrap().modulus().unwrap();
            assert_eq!(a, b);
            assert!(a.is_irreducible().unwrap());
            // No smaller tuple (c_0 most significant) is irreducible.
            let fp = Field::prime(p).unwrap();
            let rank = |codes: &[u64]| codes[..e as usize].iter().fold(0u64, |acc, &c| acc * p + c);
            let target = rank(a.codes());
            for r in 0..target {
                let mut tuple: Vec<u64> = (0..e).rev().map(|i| (r / p.pow(i)) % p).collect();
                tuple.push(1);
                assert!(!Poly::from_codes(&fp, tuple).is_irreducible().unwrap());
            }
        }
    }

    #[test]
    fn arithmetic_examples() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(&f3.elem(2) + &f3.elem(2), f3.elem(1));
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.elem(2).inv().unwrap(), f5.elem(3));
        let f13 = Field::prime(13).unwrap();
        assert_eq!(f13.elem(2).pow(6), f13.elem(12));
        assert!(f13.elem(2).pow(6).is_minus_one());
        assert_eq!(f5.elem(0).inv(), Err(Error::DivisionByZero));
        assert_eq!(f5.elem(1).try_div(&f5.elem(0)), Err(Error::DivisionByZero));
        assert_eq!(f5.elem(1).try_add(&f3.elem(1)), Err(Error::FieldMismatch));
        assert_eq!(f5.elem(3).pow(0), f5.one_elem());
        assert_eq!(f5.elem(0).pow(0), f5.one_elem());
        assert_eq!(f5.elem(0).pow(7), f5.zero_elem());
    }

    #[test]
    fn square_examples() {
        assert!(Field::prime(5).unwrap().elem(4).is_square().unwrap());
        assert!(!Field::prime(3).unwrap().elem(2).is_square().unwrap());
        for f in fields() {
            assert!(f.zero_elem().is_square().unwrap());
        }
    }

    #[test]
    fn large_prime_field() {
        let p = 18446744073709551557u64;
        let f = Field::prime(p).unwrap();
        let a = p - 3;
        let inv = f.inv(a).unwrap();
        assert_eq!(f.mul(a, inv), 1);
        assert_eq!(f.add(p - 1, p - 1), p - 2);
        assert_eq!(f.pow(a, (p - 1) as u128), 1);
    }

    #[test]
    fn group_laws_exhaustive() {
        for f in fields() {
            let q = f.order();
            let mut nonzero_squares = 0;
            for x in 1..q {
                assert_eq!(f.pow(x, (q - 1) as u128), 1, "{f:?} x={x}");
                assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
                if f.is_odd() && f.is_square(x).unwrap() {
                    nonzero_squares += 1;
                }
            }
            if f.is_odd() {
                assert_eq!(nonzero_squares, (q - 1) / 2);
                for x in 1..q {
                    for y in 1..q {
                        let lhs = f.is_square(f.mul(x, y)).unwrap();
                        let rhs = f.is_square(x).unwrap() == f.is_square(y).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn tables_agree_with_schoolbook() {
        for (p, e) in [(3u64, 2u32), (5, 2), (3, 3), (2, 4)] {
            let f = Field::new(p, e).unwrap();
            for a in f.codes() {
                for b in f.codes() {
                    assert_eq!(f.mul(a, b), if a == 0 || b == 0 { 0 } else { slow_ext_mul(&f.inner, a, b) });
                }
            }
        }
    }

    #[test]
    fn distributivity_and_sqrt() {
        for f in fields() {
            let q = f.order();
            for a in 0..q.min(30) {
                for b in 0..q.min(30) {
                    for c in [0, 1, q - 1] {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                    assert_eq!(f.sub(f.add(a, b), b), a);
                }
                if f.is_odd() {
                    match f.sqrt(a) {
                        Some(r) => assert_eq!(f.mul(r, r), a),
                        None => assert!(!f.is_square(a).unwrap()),
                    }
                }
            }
        }
    }

    #[test]
    fn element_display() {
        let f9 = Field::new(3, 2).unwrap();
        assert_eq!(f9.elem(5).to_string(), "[2,1]");
        assert_eq!(f9.from_digits(&[2, 1]).unwrap(), 5);
        assert_eq!(f9.elem(5).coefficients(), vec![2, 1]);
        assert_eq!(Field::prime(7).unwrap().elem(6).to_string(), "6");
    }
}
