//! Counting monic primes in `F_q[t]`, globally and in residue classes.

use rand::Rng;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::poly::{enumerate_monic, Poly};

/// Largest relative deviation from the mean accepted by [`UniformityReport::within`].
pub const UNIFORMITY_TOLERANCE: f64 = 0.5;

/// Random candidates tried by [`find_prime_in_ap`] before sweeping.
const AP_PROBES: usize = 64;

/// `Phi_q(f)`, the number of units of `F_q[t]/(f)`, from the factorization of `f`.
pub fn euler_phi(f: &Poly) -> Result<u128> {
    if f.is_zero() {
        return Err(Error::ZeroInput("euler_phi"));
    }
    let q = f.field().order() as u128;
    let mut phi = 1u128;
    for (p, m) in f.factor_default()?.factors {
        let norm = checked_pow(q, p.degree().expect("nonconstant factor"))?;
        phi = phi
            .checked_mul(checked_pow(norm, m as usize - 1)?)
            .and_then(|x| x.checked_mul(norm - 1))
            .ok_or_else(|| overflow("euler_phi"))?;
    }
    Ok(phi)
}

/// Counts residues `r` with `deg r < deg f` and `gcd(r, f) = 1` one by one.
pub fn count_units(f: &Poly) -> Result<u128> {
    let d = f.degree().ok_or(Error::ZeroInput("count_units"))?;
    let total = checked_pow(f.field().order() as u128, d)?;
    let total = u64::try_from(total).map_err(|_| overflow("count_units"))?;
    Ok((0..total).filter(|&i| Poly::from_index(f.field(), i, d).gcd(f).is_one()).count() as u128)
}

fn checked_pow(base: u128, exp: usize) -> Result<u128> {
    u32::try_from(exp).ok().and_then(|e| base.checked_pow(e)).ok_or_else(|| overflow("power"))
}

fn overflow(what: &str) -> Error {
    Error::Precondition(format!("{what}: count exceeds 128 bits"))
}

/// `pi_q(k)`, the number of monic irreducibles of degree `k`:
/// `(1/k) sum_{d | k} mu(d) q^(k/d)`.
pub fn pi_q(q: u64, k: u32) -> Result<u128> {
    if k < 1 {
        return Err(Error::Precondition("pi_q needs k >= 1".into()));
    }
    let mut sum: i128 = 0;
    for d in arith::divisors(k as u64) {
        let term = (q as i128).checked_pow(k / d as u32).ok_or_else(|| overflow("pi_q"))?;
        sum += arith::moebius(d) as i128 * term;
    }
    Ok((sum / k as i128) as u128)
}

/// Counts monic irreducibles of degree `k` by testing every monic polynomial.
pub fn pi_q_by_enumeration(field: &Field, k: usize) -> Result<u64> {
    let mut n = 0;
    for f in enumerate_monic(field, k) {
        if f.is_irreducible()? {
            n += 1;
        }
    }
    Ok(n)
}

/// The progression `{Q = c + f g : Q monic of degree k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct APQuery {
    pub f: Poly,
    pub c: Poly,
    pub k: usize,
}

impl APQuery {
    pub fn new(f: Poly, c: Poly, k: usize) -> Result<APQuery> {
        if f.field() != c.field() {
            return Err(Error::FieldMismatch);
        }
        if f.is_zero() {
            return Err(Error::ZeroInput("modulus"));
        }
        if !c.gcd(&f).is_one() {
            return Err(Error::NotCoprime);
        }
        Ok(APQuery { f, c, k })
    }

    /// Enumerates the monic degree-`k` members of the class by index.
    fn space(&self) -> Result<Candidates> {
        let field = self.f.field().clone();
        let base = self.c.rem(&self.f)?;
        let df = self.f.degree().expect("nonzero modulus");
        if self.k < df || self.k == 0 {
            let hit = base.degree() == Some(self.k) && base.is_monic();
            return Ok(Candidates { field, base, f: self.f.clone(), free: None, size: hit as u64 });
        }
        let free = self.k - df;
        let size = checked_pow(field.order() as u128, free)?;
        let size = u64::try_from(size).map_err(|_| overflow("progression"))?;
        Ok(Candidates { field, base, f: self.f.clone(), free: Some(free), size })
    }
}

struct Candidates {
    field: Field,
    base: Poly,
    f: Poly,
    /// Degree of the cofactor `g`, or `None` when the class holds at most `base`.
    free: Option<usize>,
    size: u64,
}

impl Candidates {
    fn get(&self, i: u64) -> Poly {
        let Some(d) = self.free else {
            return self.base.clone();
        };
        let lead = self.field.inv(self.f.lead()).expect("nonzero lead");
        let g = &Poly::from_index(&self.field, i, d) + &Poly::monomial(&self.field, lead, d);
        &self.base + &(&self.f * &g)
    }
}

/// `pi_q(k; f, c)`, by exhaustive enumeration of the class.
pub fn pi_ap(query: &APQuery) -> Result<u64> {
    let space = query.space()?;
    let mut n = 0;
    for i in 0..space.size {
        let cand = space.get(i);
        if cand.degree() >= Some(1) && cand.is_irreducible()? {
            n += 1;
        }
    }
    Ok(n)
}

/// A monic irreducible `Q` of degree `k` with `Q = c mod f`. Probes random
/// members of the class first, then sweeps all of them in order.
pub fn find_prime_in_ap<R: Rng + ?Sized>(f: &Poly, c: &Poly, k: usize, rng: &mut R) -> Result<Option<Poly>> {
    let query = APQuery::new(f.clone(), c.clone(), k)?;
    let space = query.space()?;
    if space.size == 0 || k == 0 {
        return Ok(None);
    }
    let is_prime = |p: &Poly| p.is_irreducible();
    for _ in 0..AP_PROBES.min(space.size as usize) {
        let cand = space.get(rng.gen_range(0..space.size));
        if is_prime(&cand)? {
            return Ok(Some(cand));
        }
    }
    for i in 0..space.size {
        let cand = space.get(i);
        if is_prime(&cand)? {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityRow {
    pub c: Poly,
    pub count: u64,
    pub deviation: f64,
}

/// Distribution of degree-`k` monic primes over the unit classes mod `f`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityReport {
    pub q: u64,
    pub k: usize,
    pub f: Poly,
    pub pi_q: u128,
    pub phi: u128,
    pub expected: f64,
    pub rows: Vec<UniformityRow>,
    pub max_deviation: f64,
    /// Degree-`k` primes dividing `f`, which fall in no unit class.
    pub excluded: u64,
    /// Whether `|f| <= q^(k-4)`, the range where uniformity is guaranteed.
    pub in_range: bool,
    pub warning: Option<String>,
}

impl UniformityReport {
    pub fn within(&self, tolerance: f64) -> bool {
        self.max_deviation <= tolerance
    }
}

pub fn uniformity_report(f: &Poly, k: usize) -> Result<UniformityReport> {
    let field = f.field();
    let df = f.degree().ok_or(Error::ZeroInput("uniformity modulus"))?;
    if k < 1 {
        return Err(Error::Precondition("uniformity needs k >= 1".into()));
    }
    let f = f.monic();
    let q = field.order();
    let classes = u64::try_from(checked_pow(q as u128, df)?).map_err(|_| overflow("residues"))?;
    let mut counts = vec![0u64; classes as usize];
    let mut excluded = 0;
    for cand in enumerate_monic(field, k) {
        if !cand.is_irreducible()? {
            continue;
        }
        let r = cand.rem(&f)?;
        if r.gcd(&f).is_one() {
            counts[index_of(&r, q) as usize] += 1;
        } else {
            excluded += 1;
        }
    }
    let pi = pi_q(q, k as u32)?;
    let phi = euler_phi(&f)?;
    let expected = pi as f64 / phi as f64;
    let mut rows = Vec::new();
    let mut total = 0u128;
    for i in 0..classes {
        let c = Poly::from_index(field, i, df);
        if !c.gcd(&f).is_one() {
            continue;
        }
        let count = counts[i as usize];
        total += count as u128;
        rows.push(UniformityRow { c, count, deviation: (count as f64 / expected - 1.0).abs() });
    }
    if total + excluded as u128 != pi {
        return Err(Error::Verification(format!("class counts sum to {} but pi_q({k}) = {pi}", total + excluded as u128)));
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let in_range = k >= 4 && df <= k - 4;
    let warning = (!in_range).then(|| format!("|f| = {q}^{df} exceeds q^(k-4) = {q}^{}", k as i64 - 4));
    Ok(UniformityReport { q, k, f, pi_q: pi, phi, expected, rows, max_deviation, excluded, in_range, warning })
}

/// Inverse of [`Poly::from_index`].
fn index_of(p: &Poly, q: u64) -> u64 {
    p.codes().iter().rev().fold(0, |acc, &c| acc * q + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn poly(field: &Field, ints: &[i64]) -> Poly {
        Poly::from_ints(field, ints)
    }

    #[test]
    fn phi_examples() {
        let k = f(3);
        assert_eq!(euler_phi(&poly(&k, &[0, 0, 1])).unwrap(), 6);
        assert_eq!(euler_phi(&poly(&k, &[1, 0, 1])).unwrap(), 8);
        assert_eq!(euler_phi(&poly(&k, &[0, 1, 1])).unwrap(), 4);
        assert_eq!(euler_phi(&Poly::one(&k)).unwrap(), 1);
        assert!(euler_phi(&Poly::zero(&k)).is_err());
    }

    #[test]
    fn phi_matches_unit_count() {
        for field in [f(3), f(5), Field::new(3, 2).unwrap()] {
            let q = field.order() as usize;
            let max = if q <= 5 { 4 } else { 3 };
            for d in 1..=max {
                for g in crate::poly::enumerate_polys(&field, d).filter(|g| g.degree() == Some(d)) {
                    assert_eq!(euler_phi(&g).unwrap(), count_units(&g).unwrap(), "{g}");
                }
                if q.pow(d as u32) > 2000 {
                    break;
                }
            }
        }
    }

    #[test]
    fn pi_q_examples() {
        assert_eq!(pi_q(7, 1).unwrap(), 7);
        assert_eq!(pi_q(3, 2).unwrap(), 3);
        assert_eq!(pi_q(3, 4).unwrap(), 18);
        assert!(pi_q(3, 0).is_err());
        for (p, kmax) in [(3u64, 6usize), (5, 5), (7, 4)] {
            for k in 1..=kmax {
                assert_eq!(pi_q(p, k as u32).unwrap(), pi_q_by_enumeration(&f(p), k).unwrap() as u128);
            }
        }
        assert_eq!(pi_q(9, 3).unwrap(), pi_q_by_enumeration(&Field::new(3, 2).unwrap(), 3).unwrap() as u128);
    }

    #[test]
    fn ap_examples() {
        let k = f(3);
        let t = Poly::t(&k);
        let q = |c: i64, deg| pi_ap(&APQuery::new(t.clone(), poly(&k, &[c]), deg).unwrap()).unwrap();
        assert_eq!(q(1, 2), 1);
        assert_eq!(q(2, 2), 2);
        assert_eq!(APQuery::new(t.clone(), Poly::zero(&k), 2), Err(Error::NotCoprime));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let one = Poly::one(&k);
        assert_eq!(find_prime_in_ap(&t, &one, 2, &mut rng).unwrap(), Some(poly(&k, &[1, 0, 1])));
        assert_eq!(find_prime_in_ap(&poly(&k, &[1, 1]), &one, 1, &mut rng).unwrap(), Some(poly(&k, &[2, 1])));
        assert_eq!(find_prime_in_ap(&poly(&k, &[0, 0, 1]), &one, 1, &mut rng).unwrap(), None);
        assert!(find_prime_in_ap(&t, &Poly::zero(&k), 2, &mut rng).is_err());
    }

    #[test]
    fn class_counts_partition_primes() {
        for field in [f(3), f(5)] {
            let t = Poly::t(&field);
            let mods = [t.clone(), &t + &Poly::one(&field), &t * &t];
            for m in &mods {
                for k in 1..=4 {
                    let df = m.degree().unwrap();
                    let mut total = 0;
                    for i in 0..field.order().pow(df as u32) {
                        let c = Poly::from_index(&field, i, df);
                        if c.gcd(m).is_one() {
                            total += pi_ap(&APQuery::new(m.clone(), c, k).unwrap()).unwrap();
                        }
                    }
                    let dividing = crate::poly::monic_irreducibles(&field, k)
                        .filter(|p| m.rem(p).unwrap().is_zero())
                        .count() as u64;
                    assert_eq!(total as u128, pi_q(field.order(), k as u32).unwrap() - dividing as u128);
                }
            }
        }
    }

    #[test]
    fn found_primes_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let field = f(13);
        for k in 3..=6 {
            for shift in 0..13 {
                let m = &Poly::t(&field) + &Poly::constant(&field, shift);
                for c in 1..13 {
                    let c = Poly::constant(&field, c);
                    let found = find_prime_in_ap(&m, &c, k, &mut rng).unwrap().expect("prime exists");
                    assert!(found.is_monic() && found.is_irreducible().unwrap());
                    assert_eq!(found.degree(), Some(k));
                    assert_eq!(found.rem(&m).unwrap(), c);
                }
            }
        }
    }

    #[test]
    fn uniformity_examples() {
        let k13 = f(13);
        let rep = uniformity_report(&Poly::t(&k13), 3).unwrap();
        assert_eq!(rep.pi_q, 728);
        assert_eq!(rep.phi, 12);
        assert!((rep.expected - 728.0 / 12.0).abs() < 1e-9);
        assert!(rep.within(UNIFORMITY_TOLERANCE), "{}", rep.max_deviation);
        assert!(!rep.in_range && rep.warning.is_some());

        let k3 = f(3);
        let rep = uniformity_report(&Poly::t(&k3), 2).unwrap();
        let counts: Vec<_> = rep.rows.iter().map(|r| (r.c.to_string(), r.count)).collect();
        assert_eq!(counts, vec![("1".to_string(), 1), ("2".to_string(), 2)]);
        assert!((rep.expected - 1.5).abs() < 1e-12);
        assert!(uniformity_report(&Poly::t(&k3), 6).unwrap().in_range);
    }
}
