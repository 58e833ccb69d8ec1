//! Dense univariate polynomials over a [`Field`]: the ring `F_q[t]`.
//!
//! Coefficients are stored constant term first with no trailing zeros, so the
//! zero polynomial is the empty vector and has degree `None` (standing in for
//! `-inf`).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Field,
    coeffs: Vec<u64>,
}

/// Sum of two degrees where `None` is `-inf` and absorbs.
pub fn add_degrees(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    Some(a? + b?)
}

impl Poly {
    pub fn zero(field: &Field) -> Poly {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, 1)
    }

    pub fn constant(field: &Field, code: u64) -> Poly {
        Poly::from_codes(field, vec![code])
    }

    /// The indeterminate `t`.
    pub fn t(field: &Field) -> Poly {
        Poly::monomial(field, 1, 1)
    }

    pub fn monomial(field: &Field, code: u64, k: usize) -> Poly {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = code;
        Poly::from_codes(field, coeffs)
    }

    /// Builds a polynomial from element codes, constant term first.
    pub fn from_codes(field: &Field, mut coeffs: Vec<u64>) -> Poly {
        debug_assert!(coeffs.iter().all(|&c| c < field.order()));
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    /// Integer coefficients, constant term first, embedded in the prime field.
    pub fn from_ints(field: &Field, ints: &[i64]) -> Poly {
        Poly::from_codes(field, ints.iter().map(|&n| field.from_int(n)).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn codes(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// True for the zero polynomial and nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Leading coefficient code (the sign of the polynomial); 0 for zero.
    pub fn lead(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn lead_elem(&self) -> FieldElem {
        self.field.elem(self.lead())
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }

    fn same_field(&self, other: &Poly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn with(&self, coeffs: Vec<u64>) -> Poly {
        Poly::from_codes(&self.field, coeffs)
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Ok(self.with((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect()))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Ok(self.with((0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect()))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.field));
        }
        let f = &self.field;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Ok(self.with(out))
    }

    pub fn scale(&self, code: u64) -> Poly {
        self.with(self.coeffs.iter().map(|&c| self.field.mul(c, code)).collect())
    }

    /// Divides by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.field.inv(self.lead()) {
            Some(inv) if self.lead() != 1 => self.scale(inv),
            _ => self.clone(),
        }
    }

    pub fn divmod(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.same_field(divisor)?;
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let f = &self.field;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let inv_lead = f.inv(divisor.lead()).expect("nonzero lead");
        let mut quot = vec![0u64; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k];
            if c == 0 {
                continue;
            }
            let factor = f.mul(c, inv_lead);
            quot[k - dd] = factor;
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                rem[idx] = f.sub(rem[idx], f.mul(factor, d));
            }
        }
        rem.truncate(dd);
        Ok((self.with(quot), self.with(rem)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.divmod(divisor)?.1)
    }

    /// Exact quotient; panics if `divisor` does not divide `self`.
    pub(crate) fn div_exact(&self, divisor: &Poly) -> Poly {
        let (q, r) = self.divmod(divisor).expect("nonzero divisor");
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, u)` with `s*self + u*other = g` and `g` monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut u0, mut u1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let u = &u0 - &(&q * &u1);
            u0 = std::mem::replace(&mut u1, u);
        }
        match f.inv(r0.lead()) {
            Some(inv) => (r0.scale(inv), s0.scale(inv), u0.scale(inv)),
            None => (r0, s0, u0),
        }
    }

    /// Inverse modulo `m`, if `gcd(self, m) = 1`.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        let (g, s, _) = self.ext_gcd(m);
        if g.is_one() {
            Some(s.rem(m).expect("nonzero modulus"))
        } else {
            None
        }
    }

    pub fn mul_mod(&self, other: &Poly, m: &Poly) -> Poly {
        (self * other).rem(m).expect("nonzero modulus")
    }

    pub fn pow(&self, mut k: u32) -> Poly {
        let mut acc = Poly::one(&self.field);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self^k mod m` by square-and-multiply.
    pub fn pow_mod(&self, mut k: u128, m: &Poly) -> Poly {
        let mut acc = Poly::one(&self.field).rem(m).expect("nonzero modulus");
        let mut base = self.rem(m).expect("nonzero modulus");
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_mod(&base, m);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_mod(&base, m);
            }
        }
        acc
    }

    /// `self^q mod m`.
    pub fn frobenius_mod(&self, m: &Poly) -> Poly {
        self.pow_mod(self.field.order() as u128, m)
    }

    /// `self^(1 + q + ... + q^(d-1)) mod m`; for `m` irreducible of degree
    /// `d` this is the norm down to `F_q`.
    pub fn norm_power_mod(&self, d: usize, m: &Poly) -> Poly {
        let mut conj = self.rem(m).expect("nonzero modulus");
        let mut acc = conj.clone();
        for _ in 1..d {
            conj = conj.frobenius_mod(m);
            acc = acc.mul_mod(&conj, m);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        self.with(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, f.from_int((i as u64 % f.characteristic()) as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: u64) -> u64 {
        let f = &self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Rabin's test: `t^(q^m) = t mod f` and `gcd(t^(q^(m/l)) - t, f) = 1`
    /// for every prime `l | m`, where `m = deg f`.
    pub fn is_irreducible(&self) -> Result<bool> {
        let m = match self.degree() {
            None | Some(0) => return Err(Error::ConstantPolynomial),
            Some(1) => return Ok(true),
            Some(m) => m,
        };
        let f = self.monic();
        let t = Poly::t(&self.field);
        let mut powers = Vec::with_capacity(m + 1);
        powers.push(t.clone());
        for i in 1..=m {
            let next = powers[i - 1].frobenius_mod(&f);
            powers.push(next);
        }
        if powers[m] != t {
            return Ok(false);
        }
        for l in arith::prime_divisors(m as u64) {
            let h = &powers[m / l as usize] - &t;
            if !h.gcd(&f).is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Complete factorization: squarefree decomposition, distinct-degree
    /// splitting, then randomized equal-degree splitting driven by `rng`.
    /// The returned factor list is sorted and independent of the seed.
    pub fn factor<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Factorization> {
        if self.is_zero() {
            return Err(Error::ZeroInput("factor"));
        }
        let lead = self.lead_elem();
        let mut merged: BTreeMap<Poly, u32> = BTreeMap::new();
        for (part, mult) in squarefree(&self.monic()) {
            for (block, d) in distinct_degree(&part) {
                for irreducible in equal_degree(&block, d, rng) {
                    *merged.entry(irreducible).or_default() += mult;
                }
            }
        }
        Ok(Factorization { lead, factors: merged.into_iter().collect() })
    }

    /// [`Poly::factor`] with a fixed internal seed.
    pub fn factor_default(&self) -> Result<Factorization> {
        self.factor(&mut ChaCha8Rng::seed_from_u64(0x5eed_f00d))
    }

    /// Inverse of the `p`-power map, for a polynomial in `t^p`.
    fn pth_root(&self) -> Poly {
        let f = &self.field;
        let p = f.characteristic() as usize;
        let root_exp = (f.order() / f.characteristic()) as u128;
        self.with(self.coeffs.iter().step_by(p).map(|&c| f.pow(c, root_exp)).collect())
    }

    /// Uniform over polynomials of degree `<= max_degree` (zero included).
    pub fn random<R: Rng + ?Sized>(field: &Field, max_degree: usize, rng: &mut R) -> Poly {
        let q = field.order();
        Poly::from_codes(field, (0..=max_degree).map(|_| rng.gen_range(0..q)).collect())
    }

    pub fn random_monic<R: Rng + ?Sized>(field: &Field, degree: usize, rng: &mut R) -> Poly {
        let q = field.order();
        let mut coeffs: Vec<u64> = (0..degree).map(|_| rng.gen_range(0..q)).collect();
        coeffs.push(1);
        Poly::from_codes(field, coeffs)
    }

    /// Polynomial whose base-`q` digits (constant term least significant)
    /// spell `index`.
    pub fn from_index(field: &Field, mut index: u64, len: usize) -> Poly {
        let q = field.order();
        let coeffs = (0..len)
            .map(|_| {
                let d = index % q;
                index /= q;
                d
            })
            .collect();
        Poly::from_codes(field, coeffs)
    }
}

fn squarefree(f: &Poly) -> Vec<(Poly, u32)> {
    let p = f.field.characteristic() as u32;
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        for (g, m) in squarefree(&f.pth_root()) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_exact(&c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div_exact(&y);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(&w);
        i += 1;
    }
    if !c.is_one() {
        for (g, m) in squarefree(&c.pth_root()) {
            out.push((g, m * p));
        }
    }
    out
}

/// Splits a monic squarefree polynomial into products of irreducibles of a
/// common degree.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let t = Poly::t(&f.field);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = t.rem(&rest).expect("nonzero");
    let mut i = 1;
    while rest.degree().unwrap_or(0) >= 2 * i {
        h = h.frobenius_mod(&rest);
        let g = rest.gcd(&(&h - &t));
        if !g.is_one() {
            rest = rest.div_exact(&g);
            h = h.rem(&rest).expect("nonzero");
            out.push((g, i));
        }
        i += 1;
    }
    if let Some(d) = rest.degree().filter(|&d| d > 0) {
        out.push((rest, d));
    }
    out
}

/// Cantor-Zassenhaus splitting of a product of distinct monic irreducibles of
/// degree `d`. Even characteristic uses the trace map.
fn equal_degree<R: Rng + ?Sized>(f: &Poly, d: usize, rng: &mut R) -> Vec<Poly> {
    let n = f.degree().expect("nonzero");
    if n == d {
        return vec![f.clone()];
    }
    let field = &f.field;
    loop {
        let a = Poly::random(field, n - 1, rng);
        if a.is_constant() {
            continue;
        }
        let g = a.gcd(f);
        let candidate = if !g.is_one() {
            g
        } else if field.is_odd() {
            let half = ((field.order() - 1) / 2) as u128;
            let b = a.norm_power_mod(d, f).pow_mod(half, f);
            (&b - &Poly::one(field)).gcd(f)
        } else {
            let bits = d * field.degree() as usize;
            let mut term = a.rem(f).expect("nonzero");
            let mut trace = term.clone();
            for _ in 1..bits {
                term = term.mul_mod(&term, f);
                trace = &trace + &term;
            }
            trace.gcd(f)
        };
        let dg = candidate.degree().unwrap_or(0);
        if dg > 0 && dg < n {
            let other = f.div_exact(&candidate);
            let mut out = equal_degree(&candidate, d, rng);
            out.extend(equal_degree(&other, d, rng));
            return out;
        }
    }
}

/// `lead * prod(factor^mult)` with monic irreducible factors in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub lead: FieldElem,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self) -> Poly {
        let field = self.lead.field();
        self.factors
            .iter()
            .fold(Poly::constant(field, self.lead.code()), |acc, (p, m)| &acc * &p.pow(*m))
    }

    pub fn multiplicity(&self, p: &Poly) -> u32 {
        self.factors.iter().find(|(f, _)| f == p).map_or(0, |(_, m)| *m)
    }
}

/// All monic polynomials of a fixed degree, in lexicographic order of the
/// coefficient vector read from the top.
#[derive(Clone, Debug)]
pub struct MonicPolys {
    field: Field,
    degree: usize,
    next: u64,
    total: u64,
}

pub fn enumerate_monic(field: &Field, degree: usize) -> MonicPolys {
    let total = field.order().checked_pow(degree as u32).expect("enumeration size overflows u64");
    MonicPolys { field: field.clone(), degree, next: 0, total }
}

impl Iterator for MonicPolys {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        if self.next >= self.total {
            return None;
        }
        let mut p = Poly::from_index(&self.field, self.next, self.degree);
        p.coeffs.resize(self.degree, 0);
        p.coeffs.push(1);
        self.next += 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for MonicPolys {}

/// Every polynomial of degree `<= max_degree`, zero included.
pub fn enumerate_polys(field: &Field, max_degree: usize) -> impl Iterator<Item = Poly> + '_ {
    let total = field.order().checked_pow(max_degree as u32 + 1).expect("enumeration size overflows u64");
    (0..total).map(move |i| Poly::from_index(field, i, max_degree + 1))
}

/// Monic irreducibles of the given degree, in enumeration order.
pub fn monic_irreducibles(field: &Field, degree: usize) -> impl Iterator<Item = Poly> {
    enumerate_monic(field, degree).filter(|p| p.is_irreducible().unwrap_or(false))
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Poly) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Field, then degree, then coefficients from the top down.
impl Ord for Poly {
    fn cmp(&self, other: &Poly) -> Ordering {
        self.field
            .cmp(&other.field)
            .then(self.coeffs.len().cmp(&other.coeffs.len()))
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            let coeff = self.field.format_code(c);
            match (k, c == 1) {
                (0, _) => f.write_str(&coeff)?,
                (1, true) => f.write_str("t")?,
                (1, false) => write!(f, "{coeff}*t")?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{coeff}*t^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self}):{:?}", self.field)
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &Poly {
            type Output = Poly;
            /// Panics if the operands live over different fields.
            fn $method(self, rhs: &Poly) -> Poly {
                self.$checked(rhs).expect("polynomial arithmetic")
            }
        }
    };
}

poly_binop!(Add, add, try_add);
poly_binop!(Sub, sub, try_sub);
poly_binop!(Mul, mul, try_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.with(self.coeffs.iter().map(|&c| self.field.neg(c)).collect())
    }
}

impl serde::Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
