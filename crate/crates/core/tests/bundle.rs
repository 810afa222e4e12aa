use std::collections::HashMap;
use std::sync::Arc;

use qinduce::algebra::Element;
use qinduce::bundle::*;
use qinduce::coalgebra::{Coalgebra, Label};
use qinduce::comodule::Comodule;
use qinduce::fixtures::load_fixture;
use qinduce::subgroup::Side;
use qinduce::tensor::{Factor, Slot, Tensor};
use qinduce::{Error, Scalar, Status};

fn ok(rep: qinduce::Report) {
    assert!(rep.is_ok(), "{}", rep.to_text());
}

fn section(fx: &str, sub: &str, r: Option<i64>) -> Section {
    let f = load_fixture(fx).unwrap();
    let fixed: HashMap<String, i64> = r.map(|r| ("r".to_string(), r)).into_iter().collect();
    Section::from_fixture(&f, sub, &fixed).unwrap()
}

fn character(s: &Section, sym: &str, p: i64) -> Comodule {
    let c = s.sub.carrier().clone();
    let b = c.indexed(sym, p).unwrap();
    Comodule::character(c, b, Side::Right)
}

#[test]
fn kappa_section_trivializes() {
    let s = section("e_kappa_2", "rotations", None);
    ok(verify_section(&s, 3));
    ok(check_trivialization(&s, 3));
    for n in -2..=2 {
        ok(check_section_isomorphisms(&s, &character(&s, "c", n), 3));
    }
}

#[test]
fn hyperboloid_section_with_r_zero() {
    let s = section("e_q_2", "hyperboloid", Some(0));
    ok(verify_section(&s, 3));
    ok(check_trivialization(&s, 3));
    for m in -1..=1 {
        ok(check_section_isomorphisms(&s, &character(&s, "c", m), 3));
    }
}

#[test]
fn shifted_hyperboloid_section_is_not_unital() {
    let s = section("e_q_2", "hyperboloid", Some(1));
    let rep = verify_section(&s, 2);
    assert_eq!(rep.status("unit"), Some(Status::Fail));
    // T_φ(1) = v^(m-r) is then not induced.
    let rep = check_section_isomorphisms(&s, &character(&s, "c", 1), 2);
    assert_eq!(rep.status("T.membership"), Some(Status::Fail));
}

#[test]
fn diagonal_section_is_multiplicative() {
    let s = section("e_q_2", "diagonal", None);
    let rep = verify_section(&s, 2);
    assert_eq!(rep.status("multiplicative"), Some(Status::Pass));
    ok(rep);
    ok(check_trivialization(&s, 2));
    let c = s.sub.carrier().clone();
    let k = *c.parse_vec("k", &HashMap::new()).unwrap().keys().next().unwrap();
    let rho = Comodule::character(c.clone(), k, Side::Right);
    ok(check_section_isomorphisms(&s, &rho, 2));
}

#[test]
fn multiplication_by_the_quotient_only_on_one_side() {
    let s = section("e_q_2", "hyperboloid", Some(0));
    let rep = check_module_sides(&s.sub, &character(&s, "c", 1), 3);
    assert_eq!(rep.status("module.left"), Some(Status::Pass), "{}", rep.to_text());
    assert_eq!(rep.status("module.right"), Some(Status::Fail));
    // For a quantum subgroup both sides are fine.
    let s = section("e_q_2", "diagonal", None);
    let c = s.sub.carrier().clone();
    let rho = Comodule::character(c.clone(), 0, Side::Right);
    ok(check_module_sides(&s.sub, &rho, 2));
}

#[test]
fn trivialized_kappa_coaction_on_a1() {
    let s = section("e_kappa_2", "rotations", None);
    let alg = &s.source().alg;
    for n in -2i64..=2 {
        let rho = character(&s, "c", n);
        let t = space_tensor(Side::Right, 0, &alg.parse("a1").unwrap());
        let got = trivialized_coaction(&s, &rho, &t).unwrap();
        let mut want = Tensor::zero(&[Slot::Space, Slot::Alg, Slot::Alg]);
        for (b, x) in [
            ("a1", format!("(v + v^-1)/2*v^({n})")),
            ("a2", format!("-i*(v - v^-1)/2*v^({n})")),
            ("1", format!("a1*v^({n})")),
        ] {
            let b = alg.parse(b).unwrap();
            let x = alg.parse(&x).unwrap();
            for (w1, c1) in b.terms() {
                for (w2, c2) in x.terms() {
                    want.add_term(vec![Factor::B(0), Factor::W(w1.clone()), Factor::W(w2.clone())], c1 * c2);
                }
            }
        }
        assert_eq!(got, want, "n={n}");
    }
}

#[test]
fn inverses_need_grouplike_monomials() {
    let f = load_fixture("e_kappa_2").unwrap();
    let h = f.hopf().unwrap().clone();
    let c = f.subgroup("rotations").unwrap().carrier().clone();
    let mut table = vec![Element::one(); c.dim()];
    table[0] = h.alg.parse("1 + v").unwrap();
    let m = LinearMapCtoA::new(c, table).unwrap();
    assert!(matches!(convolution_inverse_grouplike(&h, &m), Err(Error::NonInvertibleImage(_))));

    let labels = vec![Label::Indexed("g".into(), 0), Label::Indexed("x".into(), 0)];
    let cc = [Slot::Carrier, Slot::Carrier];
    let mut dx = Tensor::pure(&cc, vec![Factor::B(0), Factor::B(1)], Scalar::one());
    dx.add_term(vec![Factor::B(1), Factor::B(0)], Scalar::one());
    let delta = vec![Tensor::pure(&cc, vec![Factor::B(0), Factor::B(0)], Scalar::one()), dx];
    let path = Arc::new(Coalgebra::new("path", labels, delta, vec![Scalar::one(), Scalar::zero()]).unwrap());
    let m = LinearMapCtoA::new(path, vec![Element::one(), Element::zero()]).unwrap();
    assert!(matches!(convolution_inverse_grouplike(&h, &m), Err(Error::NotGrouplikeBasis(_))));
}

#[test]
fn convolution_with_the_unit() {
    let s = section("e_kappa_2", "rotations", None);
    let h = s.source();
    let e = convolution_unit(s.sub.carrier().clone());
    let l = convolve(h, &e, &s.phi).unwrap();
    let r = convolve(h, &s.phi, &e).unwrap();
    for b in 0..s.sub.carrier().dim() as u32 {
        assert_eq!(l.image(b), s.phi.image(b));
        assert_eq!(r.image(b), s.phi.image(b));
    }
}
