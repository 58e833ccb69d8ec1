//! Worked examples across the public API, written with the text grammar.

use std::collections::BTreeSet;

use fqdef::definability::{self, InfSquareClass};
use fqdef::dirichlet::{self, APQuery};
use fqdef::places::{self, Place};
use fqdef::quaternion;
use fqdef::symbols::{self, SymbolValue};
use fqdef::text::{parse_field, parse_place, parse_poly, parse_ratfunc};
use fqdef::{Field, Poly, RatFunc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn f(q: &str) -> Field {
    parse_field(q).unwrap()
}

fn p(field: &Field, s: &str) -> Poly {
    parse_poly(field, s).unwrap()
}

fn x(field: &Field, s: &str) -> RatFunc {
    parse_ratfunc(field, s).unwrap()
}

fn pl(field: &Field, s: &str) -> Place {
    parse_place(field, s).unwrap()
}

fn set(field: &Field, items: &[&str]) -> BTreeSet<Place> {
    items.iter().map(|s| pl(field, s)).collect()
}

#[test]
fn fields_and_polynomials() {
    let f9 = f("3^2");
    assert_eq!(f9.modulus().unwrap().to_string(), "t^2+1");
    let f5 = f("5");
    assert_eq!(f5.inv(2), Some(3));
    assert_eq!(f("13").pow(2, 6), 12);

    let f3 = f("3");
    assert_eq!(&p(&f3, "t+1") * &p(&f3, "t^2+2*t+1"), p(&f3, "t^3+1"));
    let (quot, rem) = p(&f3, "t^3").divmod(&p(&f3, "t+1")).unwrap();
    assert_eq!((quot, rem), (p(&f3, "t^2+2*t+1"), p(&f3, "2")));
    assert_eq!(p(&f5, "t^2+4").gcd(&p(&f5, "t+4")), p(&f5, "t+4"));
    assert!(p(&f3, "t^2+1").is_irreducible().unwrap());
    assert!(!p(&f5, "t^2+1").is_irreducible().unwrap());
    let fac = p(&f3, "2*t+2").factor_default().unwrap();
    assert_eq!(fac.lead.code(), 2);
    assert_eq!(fac.factors, vec![(p(&f3, "t+1"), 1)]);
    let fac = p(&f3, "t^3+t").factor_default().unwrap();
    assert_eq!(fac.factors, vec![(p(&f3, "t"), 1), (p(&f3, "t^2+1"), 1)]);
}

#[test]
fn valuations_and_residues() {
    let f3 = f("3");
    assert_eq!(places::valuation(&x(&f3, "t^2/(t+1)"), &pl(&f3, "t")).unwrap(), 2);
    assert_eq!(places::valuation(&x(&f3, "(t^2+1)/t"), &Place::Infinity).unwrap(), -1);
    assert_eq!(places::residue(&RatFunc::t(&f3), &pl(&f3, "t+1")).unwrap(), p(&f3, "2"));
    assert_eq!(places::residue(&x(&f3, "1/(t+1)"), &pl(&f3, "t")).unwrap(), p(&f3, "1"));
    assert_eq!(places::residue_inf(&x(&f3, "(2*t+1)/(t+2)")).unwrap().code(), 2);
    assert_eq!(places::odd_support(&x(&f3, "t^3+2*t^2+t")).unwrap(), set(&f3, &["t", "inf"]));
    assert_eq!(places::odd_support(&x(&f3, "t/(t+1)")).unwrap(), set(&f3, &["t", "t+1"]));
    assert!(!places::is_square_local(&x(&f3, "2*t^2"), &Place::Infinity).unwrap());
}

#[test]
fn symbols_and_reciprocity() {
    let f3 = f("3");
    let sym = |a: &str, b: &str| symbols::residue_symbol(&p(&f3, a), &p(&f3, b), 2).unwrap();
    assert_eq!(sym("t", "t+1").as_sign(), Some(-1));
    assert_eq!(sym("t+1", "t+1"), SymbolValue::Zero);
    assert_eq!(sym("2", "t^2+1").as_sign(), Some(1));
    let gen = |a: &str, b: &str| symbols::residue_symbol_general(&p(&f3, a), &p(&f3, b), 2).unwrap();
    assert_eq!(gen("t", "t^2+2*t+1").as_sign(), Some(1));
    assert_eq!(gen("t", "2*t+2").as_sign(), Some(-1));
    assert_eq!(symbols::sign_n(&p(&f("5"), "2*t^3+t"), 2).unwrap().code(), 4);
    let check = symbols::check_general_reciprocity(&p(&f3, "t"), &p(&f3, "t+1"), 2).unwrap();
    assert!(check.pass && check.lhs.is_minus_one());

    assert_eq!(symbols::local_symbol(&RatFunc::t(&f3), &RatFunc::t(&f3), &pl(&f3, "t")).unwrap(), -1);
    assert_eq!(symbols::local_symbol(&x(&f3, "2"), &x(&f3, "1/t"), &Place::Infinity).unwrap(), -1);
    let h = symbols::hilbert_product(&RatFunc::t(&f3), &x(&f3, "t+1")).unwrap();
    let got: Vec<(String, i8)> = h.per_place.iter().map(|(v, s)| (v.to_string(), *s)).collect();
    assert_eq!(got, vec![("t".into(), 1), ("t+1".into(), -1), ("inf".into(), -1)]);
    assert_eq!(h.product, 1);
}

#[test]
fn quaternion_sets() {
    let f3 = f("3");
    let (a, b) = (RatFunc::t(&f3), x(&f3, "t+1"));
    assert_eq!(quaternion::delta(&a, &b).unwrap().places, set(&f3, &["t+1", "inf"]));
    assert!(quaternion::t_member(&x(&f3, "1/(t+2)"), &a, &b).unwrap());
    assert!(quaternion::t_unit_member(&x(&f3, "(t+2)/t"), &a, &b).unwrap());
    assert!(quaternion::parity_class_member(&x(&f3, "t^2"), &a, &b).unwrap());
    assert!(quaternion::jacobson_member(&x(&f3, "(t+1)/t^2"), &a, &b).unwrap());
    assert!(!quaternion::r_tilde_member(&x(&f3, "t^2/(t+1)"), &a, &b).unwrap());
    assert!(!quaternion::s_global_member(&x(&f3, "1/(t+1)"), &a, &b).unwrap());
    let u5 = quaternion::u_set(&f("5")).unwrap();
    assert_eq!(u5.members.iter().map(|e| e.code()).collect::<Vec<_>>(), vec![1, 4]);
}

#[test]
fn definability_layer() {
    let f3 = f("3");
    let eps = f3.elem(2);
    assert!(definability::phi_inf(&x(&f3, "(t+1)/t")).unwrap());
    assert_eq!(definability::inf_square_class(&x(&f3, "2/t")).unwrap(), InfSquareClass::NonsquareOverT);
    assert!(definability::gamma_check(&x(&f3, "2*t"), &x(&f3, "2*t^2+2"), &eps).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let w = definability::witness_pair(&pl(&f3, "t^2+1"), &eps, &mut rng).unwrap();
    assert_eq!((w.a.to_string(), w.b.to_string()), ("2*t^2+2".into(), "2*t+2".into()));
    assert!(definability::witness_pair(&pl(&f3, "t"), &f3.elem(1), &mut rng).is_err());
    let v = definability::member_a_union_ainf_theorem(&x(&f3, "t^2/(t+1)"), &eps, 5, &mut rng).unwrap();
    assert!(v.agree && !v.theorem);
    assert_eq!(v.evidence[0].delta, vec![pl(&f3, "t+1"), Place::Infinity]);
    let m = definability::member_a(&x(&f3, "t^3+2*t"), &eps, 5, &mut rng).unwrap();
    assert!(m.verdict && m.agree);
}

#[test]
fn prime_counting() {
    let f3 = f("3");
    assert_eq!(dirichlet::euler_phi(&p(&f3, "t^2")).unwrap(), 6);
    assert_eq!(dirichlet::pi_q(3, 4).unwrap(), 18);
    let q = APQuery::new(p(&f3, "t"), p(&f3, "2"), 2).unwrap();
    assert_eq!(dirichlet::pi_ap(&q).unwrap(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert_eq!(
        dirichlet::find_prime_in_ap(&p(&f3, "t+1"), &p(&f3, "1"), 1, &mut rng).unwrap(),
        Some(p(&f3, "t+2"))
    );
    let rep = dirichlet::uniformity_report(&p(&f("13"), "t"), 3).unwrap();
    assert!(rep.max_deviation <= dirichlet::UNIFORMITY_TOLERANCE);
}
