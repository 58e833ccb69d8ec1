//! The acceptance suite: twelve end-to-end checks of the library against its
//! defining identities, each driven by a fixed seed and a time budget.
//!
//! Where a check has an obvious brute-force counterpart (square enumeration,
//! root search, class counts) the counterpart is computed here directly rather
//! than through the code path under test.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::definability::{self, member_a_union_ainf_semantic, DPairSampler};
use crate::dirichlet::{self, APQuery, UNIFORMITY_TOLERANCE};
use crate::error::Result;
use crate::gf::Field;
use crate::places::{self, Place};
use crate::poly::{enumerate_polys, monic_irreducibles, Poly};
use crate::quaternion::{self, delta};
use crate::ratfunc::RatFunc;
use crate::symbols::{self, SymbolValue};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
    pub time_limit: Option<f64>,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {:>2}. {}: {} ({:.2}s", self.id, self.name, self.detail, self.seconds)?;
        match self.time_limit {
            Some(limit) => write!(f, ", limit {limit:.0}s)"),
            None => f.write_str(")"),
        }
    }
}

pub const CRITERIA: [(u8, &str, Option<f64>); 12] = [
    (1, "general reciprocity", Some(60.0)),
    (2, "Hilbert product formula", Some(60.0)),
    (3, "ramification at infinity", None),
    (4, "witness pairs", Some(120.0)),
    (5, "U-set sumsets", None),
    (6, "residue symbol vs square enumeration", None),
    (7, "even ramification", None),
    (8, "R~ dual characterization", None),
    (9, "A u A_inf membership", Some(120.0)),
    (10, "prime counts", None),
    (11, "uniformity in progressions", Some(10.0)),
    (12, "T = S + S decompositions", None),
];

/// Outcome of a single check: pass flag and a one-line summary.
type Outcome = (bool, String);

fn field(p: u64, e: u32) -> Field {
    Field::new(p, e).expect("valid field")
}

pub fn run_criterion(id: u8, seed: u64) -> Option<CriterionResult> {
    let &(_, name, time_limit) = CRITERIA.iter().find(|c| c.0 == id)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let start = Instant::now();
    let outcome = match id {
        1 => c01_reciprocity(),
        2 => c02_hilbert(&mut rng),
        3 => c03_infinity(),
        4 => c04_witnesses(&mut rng),
        5 => c05_u_sets(),
        6 => c06_symbol_oracle(),
        7 => c07_even_delta(&mut rng),
        8 => c08_r_tilde_dual(&mut rng),
        9 => c09_main_theorem(&mut rng),
        10 => c10_prime_counts(),
        11 => c11_uniformity(),
        12 => c12_decomposition(&mut rng),
        _ => unreachable!(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (ok, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    let in_time = time_limit.is_none_or(|limit| seconds < limit);
    if !in_time {
        detail.push_str("; over time limit");
    }
    Some(CriterionResult { id, name, pass: ok && in_time, detail, seconds, time_limit })
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0, seed)).collect()
}

fn c01_reciprocity() -> Result<Outcome> {
    let mut total = 0;
    let mut violations = 0;
    for (f, deg) in [(field(3, 1), 3), (field(5, 1), 3), (field(7, 1), 2), (field(3, 2), 2)] {
        let report = symbols::reciprocity_sweep(&f, deg, 2, 1)?;
        total += report.pairs_checked;
        violations += report.violations.len();
        // The sweep uses cached symbol tables; recheck a slice through the direct path.
        let polys: Vec<Poly> = enumerate_polys(&f, deg.min(2)).filter(|p| !p.is_zero()).take(40).collect();
        for a in &polys {
            for b in &polys {
                if a.gcd(b).is_one() && !symbols::check_general_reciprocity(a, b, 2)?.pass {
                    violations += 1;
                }
            }
        }
    }
    Ok((violations == 0, format!("{total} coprime pairs, {violations} violations")))
}

fn c02_hilbert(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut bad = 0;
    for p in [3, 5, 7, 13] {
        let f = field(p, 1);
        for _ in 0..1000 {
            let a = RatFunc::random_nonzero(&f, 5, 5, rng);
            let b = RatFunc::random_nonzero(&f, 5, 5, rng);
            if symbols::hilbert_product(&a, &b)?.product != 1 {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("4000 random pairs, {bad} with product -1")))
}

fn c03_infinity() -> Result<Outcome> {
    let mut checked = 0;
    let mut bad = 0;
    for p in [3, 5, 7, 11, 13] {
        let f = field(p, 1);
        let t = RatFunc::t(&f);
        for g in 1..p {
            if f.pow(g, ((p - 1) / 2) as u128) == 1 {
                continue;
            }
            for h in 1..p {
                let h_over_t = RatFunc::constant(&f, h).try_div(&t)?;
                checked += 1;
                if symbols::local_symbol(&RatFunc::constant(&f, g), &h_over_t, &Place::Infinity)? != -1 {
                    bad += 1;
                }
            }
        }
    }
    Ok((bad == 0, format!("{checked} (g, h/t) pairs, {bad} split at infinity")))
}

/// Places with symbol -1, read off the full Hilbert product report.
fn ramified_by_product(a: &RatFunc, b: &RatFunc) -> Result<BTreeSet<Place>> {
    Ok(symbols::hilbert_product(a, b)?.per_place.into_iter().filter(|(_, s)| *s == -1).map(|(v, _)| v).collect())
}

fn c04_witnesses(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut count = 0;
    let mut bad = Vec::new();
    for (p, max_deg) in [(3, 4), (5, 3)] {
        let f = field(p, 1);
        let eps = definability::default_epsilon(&f)?;
        for d in 1..=max_deg {
            for prime in monic_irreducibles(&f, d) {
                count += 1;
                let v = Place::Finite(prime.clone());
                let w = definability::witness_pair(&v, &eps, rng)?;
                let expected: BTreeSet<Place> = [v.clone(), Place::Infinity].into();
                let ok = ramified_by_product(&w.a, &w.b)? == expected
                    && definability::gamma_check(&w.a, &w.b, &eps)?
                    && w.p.residue_degree() % 2 != w.q.residue_degree() % 2;
                if !ok {
                    bad.push(format!("{prime} over F_{p}"));
                }
            }
        }
    }
    let detail = if bad.is_empty() { format!("{count} primes, all verified") } else { format!("{count} primes, failures: {}", bad.join(", ")) };
    Ok((bad.is_empty(), detail))
}

/// `U_q` by root search: `x^2 - s x + 1` has no root in `F_q`.
fn u_by_roots(f: &Field) -> Vec<u64> {
    f.codes()
        .filter(|&s| f.codes().all(|x| f.add(f.sub(f.mul(x, x), f.mul(s, x)), 1) != 0))
        .collect()
}

fn c05_u_sets() -> Result<Outcome> {
    let mut notes = Vec::new();
    let mut ok = true;
    for (p, e) in [(13, 1), (17, 1), (19, 1), (23, 1), (5, 2), (3, 3), (29, 1), (3, 1)] {
        let f = field(p, e);
        let u = quaternion::u_set(&f)?;
        let roots = u_by_roots(&f);
        let codes: Vec<u64> = u.members.iter().map(|m| m.code()).collect();
        let sums: BTreeSet<u64> = roots.iter().flat_map(|&a| roots.iter().map(move |&b| (a, b))).map(|(a, b)| f.add(a, b)).collect();
        let covers = sums.len() as u64 == f.order();
        let want_cover = f.order() > 3;
        ok &= codes == roots && u.covers == covers && covers == want_cover;
        notes.push(format!("U_{}:{}{}", f.order(), codes.len(), if covers { "+" } else { "-" }));
    }
    Ok((ok, notes.join(" ")))
}

fn c06_symbol_oracle() -> Result<Outcome> {
    let mut checked = 0;
    let mut bad = 0;
    for p in [3, 5, 7] {
        let f = field(p, 1);
        for d in 1..=2 {
            let size = p.pow(d as u32);
            for prime in monic_irreducibles(&f, d) {
                let squares: BTreeSet<Poly> =
                    (0..size).map(|i| Poly::from_index(&f, i, d)).map(|x| x.mul_mod(&x, &prime)).collect();
                for i in 0..size {
                    let alpha = Poly::from_index(&f, i, d);
                    let expected = if alpha.is_zero() {
                        None
                    } else {
                        Some(if squares.contains(&alpha) { 1 } else { -1 })
                    };
                    let got = match symbols::residue_symbol(&alpha, &prime, 2)? {
                        SymbolValue::Zero => None,
                        v => v.as_sign().map(i32::from),
                    };
                    checked += 1;
                    if got != expected {
                        bad += 1;
                    }
                }
            }
        }
    }
    Ok((bad == 0, format!("{checked} (alpha, P) cases, {bad} mismatches")))
}

fn c07_even_delta(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut bad = 0;
    let mut nonempty = 0;
    for p in [3, 5, 7] {
        let f = field(p, 1);
        for _ in 0..500 {
            let a = RatFunc::random_nonzero(&f, 4, 3, rng);
            let b = RatFunc::random_nonzero(&f, 4, 3, rng);
            let d = delta(&a, &b)?;
            nonempty += !d.is_empty() as usize;
            if d.len() % 2 != 0 || symbols::hilbert_product(&a, &b)?.product != 1 || ramified_by_product(&a, &b)? != d.places {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("1500 pairs ({nonempty} ramified), {bad} odd or inconsistent")))
}

fn random_prime(f: &Field, max_deg: usize, rng: &mut ChaCha8Rng) -> Poly {
    let d = rng.gen_range(1..=max_deg);
    loop {
        let p = Poly::random_monic(f, d, rng);
        if p.is_irreducible().expect("same field") {
            return p;
        }
    }
}

fn c08_r_tilde_dual(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut bad = 0;
    for p in [3, 5, 7] {
        let f = field(p, 1);
        let eps = definability::default_epsilon(&f)?;
        for _ in 0..10 {
            let prime = random_prime(&f, 3, rng);
            let w = definability::witness_pair(&Place::Finite(prime.clone()), &eps, rng)?;
            let d = delta(&w.a, &w.b)?;
            for _ in 0..500 {
                let x = RatFunc::random(&f, 4, 4, rng);
                let by_val = d.contains_r_tilde(&x)?;
                let by_jacobson = x.is_zero() || !d.contains_jacobson(&x.inv()?)?;
                // Integral at P or at infinity.
                let direct = x.is_zero()
                    || places::valuation(&x, &Place::Finite(prime.clone()))? >= 0
                    || places::valuation(&x, &Place::Infinity)? >= 0;
                if by_val != by_jacobson || by_val != direct {
                    bad += 1;
                }
            }
        }
    }
    Ok((bad == 0, format!("15000 elements over 30 witness pairs, {bad} disagreements")))
}

fn random_member(f: &Field, rng: &mut ChaCha8Rng) -> RatFunc {
    if rng.gen_bool(0.5) {
        RatFunc::from(Poly::random(f, 4, rng))
    } else {
        let den = Poly::random_monic(f, rng.gen_range(0..=3), rng);
        let num = Poly::random(f, den.degree().unwrap_or(0), rng);
        RatFunc::new(num, den).expect("monic denominator")
    }
}

fn random_non_member(f: &Field, rng: &mut ChaCha8Rng) -> RatFunc {
    loop {
        let x = RatFunc::random_nonzero(f, 5, 3, rng);
        if !member_a_union_ainf_semantic(&x) {
            return x;
        }
    }
}

fn c09_main_theorem(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut bad = 0;
    let mut pairs = 0;
    for p in [3, 5] {
        let f = field(p, 1);
        let eps = definability::default_epsilon(&f)?;
        let mut sampler = DPairSampler::new(&eps)?;
        for _ in 0..200 {
            let x = random_member(&f, rng);
            let v = definability::member_a_union_ainf_theorem_with(&mut sampler, &x, 20, rng)?;
            pairs += v.evidence.len();
            if !(v.semantic && v.theorem && v.agree && v.evidence.len() == 20) {
                bad += 1;
            }
        }
        for _ in 0..200 {
            let x = random_non_member(&f, rng);
            let v = definability::member_a_union_ainf_theorem_with(&mut sampler, &x, 20, rng)?;
            let e = &v.evidence[0];
            let gamma = definability::gamma_check(&e.a, &e.b, &eps)?;
            let pole = e.delta.iter().any(|pl| !pl.is_infinite() && places::valuation(&x, pl).is_ok_and(|k| k < 0));
            if v.semantic || v.theorem || !v.agree || !gamma || !pole || e.delta.len() != 2 {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("800 elements, {pairs} member tests, {bad} disagreements")))
}

fn c10_prime_counts() -> Result<Outcome> {
    let mut bad = Vec::new();
    for p in [3, 5] {
        let f = field(p, 1);
        for k in 1..=6 {
            let formula = dirichlet::pi_q(p, k as u32)?;
            let counted = dirichlet::pi_q_by_enumeration(&f, k)? as u128;
            if formula != counted {
                bad.push(format!("pi_{p}({k}) = {formula} vs {counted}"));
            }
        }
    }
    for q in [3u64, 5, 7, 9, 13] {
        for k in 1..=6u32 {
            let pi = dirichlet::pi_q(q, k)? as f64;
            let main = (q as f64).powi(k as i32) / k as f64;
            let bound = 2.0 * (q as f64).powf(k as f64 / 2.0) / k as f64;
            if (pi - main).abs() > bound {
                bad.push(format!("bound fails at q={q}, k={k}"));
            }
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "12 counts and 30 bounds hold".into() } else { bad.join("; ") }))
}

fn c11_uniformity() -> Result<Outcome> {
    let f = field(13, 1);
    let t = Poly::t(&f);
    let report = dirichlet::uniformity_report(&t, 3)?;
    let mut consistent = report.rows.len() == 12;
    for row in &report.rows {
        consistent &= dirichlet::pi_ap(&APQuery::new(t.clone(), row.c.clone(), 3)?)? == row.count;
    }
    let ok = consistent && report.within(UNIFORMITY_TOLERANCE);
    Ok((ok, format!("expected {:.2}, max deviation {:.4}", report.expected, report.max_deviation)))
}

fn c12_decomposition(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let f = field(13, 1);
    let eps = definability::default_epsilon(&f)?;
    let w = definability::witness_pair(&Place::Finite(Poly::t(&f)), &eps, rng)?;
    let d = delta(&w.a, &w.b)?;
    let mut found = 0;
    let mut unsound = 0;
    for _ in 0..50 {
        let x = loop {
            let den = Poly::random_monic(&f, rng.gen_range(0..=3), rng);
            if den.coeff(0) != 0 {
                let num = Poly::random(&f, den.degree().unwrap_or(0), rng);
                break RatFunc::new(num, den)?;
            }
        };
        debug_assert!(d.contains_t(&x)?);
        if let Some((s1, s2)) = quaternion::decompose_t_element(&x, &w.a, &w.b, 3, rng)? {
            found += 1;
            let sound = &s1 + &s2 == x
                && quaternion::s_global_member(&s1, &w.a, &w.b)?
                && quaternion::s_global_member(&s2, &w.a, &w.b)?;
            unsound += !sound as usize;
        }
    }
    Ok((unsound == 0, format!("found {found}/50 ({}%), {unsound} unsound", found * 2)))
}
