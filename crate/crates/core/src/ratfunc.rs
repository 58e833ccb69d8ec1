//! Elements of `K = F_q(t)` as reduced fractions with monic denominator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::poly::Poly;

/// A reduced fraction `num/den`: `gcd(num, den) = 1`, `den` monic, zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if num.field() != den.field() {
            return Err(Error::FieldMismatch);
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero(num.field());
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() { (num, den) } else { (num.div_exact(&g), den.div_exact(&g)) };
        let inv = num.field().inv(den.lead()).expect("nonzero denominator");
        RatFunc { num: num.scale(inv), den: den.scale(inv) }
    }

    pub fn zero(field: &Field) -> RatFunc {
        RatFunc { num: Poly::zero(field), den: Poly::one(field) }
    }

    pub fn one(field: &Field) -> RatFunc {
        RatFunc::constant(field, 1)
    }

    pub fn constant(field: &Field, code: u64) -> RatFunc {
        RatFunc { num: Poly::constant(field, code), den: Poly::one(field) }
    }

    pub fn t(field: &Field) -> RatFunc {
        RatFunc::from(Poly::t(field))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn field(&self) -> &Field {
        self.num.field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the reduced numerator and denominator are both constant.
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// `lead(num) / lead(den)`; 0 for zero.
    pub fn lead_ratio(&self) -> u64 {
        self.num.lead()
    }

    pub fn try_add(&self, other: &RatFunc) -> Result<RatFunc> {
        let num = (&self.num * &other.den).try_add(&(&other.num * &self.den))?;
        Ok(RatFunc::reduce(num, &self.den * &other.den))
    }

    pub fn try_sub(&self, other: &RatFunc) -> Result<RatFunc> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &RatFunc) -> Result<RatFunc> {
        Ok(RatFunc::reduce(self.num.try_mul(&other.num)?, self.den.try_mul(&other.den)?))
    }

    pub fn try_div(&self, other: &RatFunc) -> Result<RatFunc> {
        self.try_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc::reduce(self.den.clone(), self.num.clone()))
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn pow(&self, k: i64) -> Result<RatFunc> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let e = u32::try_from(k.unsigned_abs()).map_err(|_| Error::Precondition("exponent too large".into()))?;
        // Powers of a reduced fraction stay reduced.
        Ok(RatFunc { num: base.num.pow(e), den: base.den.pow(e) })
    }

    pub fn scale(&self, code: u64) -> RatFunc {
        RatFunc::reduce(self.num.scale(code), self.den.clone())
    }

    /// Random element with `deg num <= max_num`, `deg den <= max_den`, denominator
    /// monic. May be zero.
    pub fn random<R: Rng + ?Sized>(field: &Field, max_num: usize, max_den: usize, rng: &mut R) -> RatFunc {
        let num = Poly::random(field, max_num, rng);
        let den_deg = rng.gen_range(0..=max_den);
        let den = Poly::random_monic(field, den_deg, rng);
        RatFunc::reduce(num, den)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(field: &Field, max_num: usize, max_den: usize, rng: &mut R) -> RatFunc {
        loop {
            let x = RatFunc::random(field, max_num, max_den, rng);
            if !x.is_zero() {
                return x;
            }
        }
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> RatFunc {
        let one = Poly::one(p.field());
        RatFunc::reduce(p, one)
    }
}

fn needs_parens(p: &Poly) -> bool {
    p.codes().iter().filter(|&&c| c != 0).count() > 1
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let side = |p: &Poly| if needs_parens(p) { format!("({p})") } else { p.to_string() };
        write!(f, "{}/{}", side(&self.num), side(&self.den))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self, self.field())
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &RatFunc {
            type Output = RatFunc;
            /// Panics if the operands live over different fields.
            fn $method(self, rhs: &RatFunc) -> RatFunc {
                self.$checked(rhs).expect("rational function arithmetic")
            }
        }
    };
}

rat_binop!(Add, add, try_add);
rat_binop!(Sub, sub, try_sub);
rat_binop!(Mul, mul, try_mul);

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl serde::Serialize for RatFunc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Field {
        Field::prime(3).unwrap()
    }

    #[test]
    fn canonical_form() {
        let f = f3();
        // (2t+2)/(t+1) = 2
        let x = RatFunc::new(Poly::from_ints(&f, &[2, 2]), Poly::from_ints(&f, &[1, 1])).unwrap();
        assert_eq!(x, RatFunc::constant(&f, 2));
        assert!(x.is_constant());
        // t / (2t^2) = 2/t  (den made monic)
        let y = RatFunc::new(Poly::t(&f), Poly::from_ints(&f, &[0, 0, 2])).unwrap();
        assert_eq!(y.num(), &Poly::constant(&f, 2));
        assert_eq!(y.den(), &Poly::t(&f));
        assert_eq!(y.to_string(), "2/t");
        assert_eq!(RatFunc::new(Poly::t(&f), Poly::zero(&f)), Err(Error::DivisionByZero));
        let z = RatFunc::new(Poly::zero(&f), Poly::t(&f)).unwrap();
        assert_eq!(z, RatFunc::zero(&f));
        assert!(z.den().is_one());
    }

    #[test]
    fn field_axioms_sampled() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let f = Field::prime(5).unwrap();
        for _ in 0..200 {
            let a = RatFunc::random(&f, 3, 3, &mut rng);
            let b = RatFunc::random(&f, 3, 3, &mut rng);
            let c = RatFunc::random_nonzero(&f, 3, 3, &mut rng);
            assert_eq!(&(&a + &b) - &b, a);
            assert_eq!(&(&a * &c) * &c.inv().unwrap(), a);
            assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            assert_eq!(c.pow(-2).unwrap(), (&c * &c).inv().unwrap());
        }
        assert_eq!(RatFunc::zero(&f).pow(-1), Err(Error::DivisionByZero));
        assert_eq!(RatFunc::zero(&f).pow(0).unwrap(), RatFunc::one(&f));
    }
}
