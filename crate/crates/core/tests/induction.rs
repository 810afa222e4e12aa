use qinduce::algebra::Element;
use qinduce::comodule::{direct_sum, equivalence, Comodule};
use qinduce::fixtures::load_fixture;
use qinduce::induction::*;
use qinduce::linalg::IndexedMatrix;
use qinduce::subgroup::Side;
use qinduce::tensor::{Factor, Slot, Tensor};
use qinduce::{Error, Scalar};

fn ok(rep: qinduce::Report) {
    assert!(rep.is_ok(), "{}", rep.to_text());
}

fn character(sub: &dyn Projection, sym: &str, p: i64) -> Comodule {
    Comodule::character(sub.carrier().clone(), sub.carrier().indexed(sym, p).unwrap(), Side::Right)
}

fn one_tensor(e: &Element) -> Tensor {
    let mut t = Tensor::zero(&[Slot::Space, Slot::Alg]);
    for (w, c) in e.terms() {
        t.add_term(vec![Factor::B(0), Factor::W(w.clone())], c.clone());
    }
    t
}

#[test]
fn n_zero_is_the_kappa_plane() {
    let f = load_fixture("e_kappa_2").unwrap();
    let sub = f.subgroup("rotations").unwrap();
    for d in 1..=3 {
        let ind = monomial_rep(sub.as_ref(), sub.carrier().indexed("c", 0).unwrap(), d).unwrap();
        let co = sub.coinvariants(d).unwrap();
        assert_eq!(ind.dim(), co.dim(), "degree {d}");
        for e in ind.elements() {
            assert!(co.contains(&e));
        }
    }
}

#[test]
fn kappa_induced_spaces_contain_dressed_generators() {
    let f = load_fixture("e_kappa_2").unwrap();
    let sub = f.subgroup("rotations").unwrap();
    let alg = &sub.source().alg;
    for n in -2i64..=2 {
        let rho = character(sub.as_ref(), "c", n);
        let ind = induced_space(sub.as_ref(), &rho, 3).unwrap();
        for b in ["1", "a1", "a2", "a1*a2"].into_iter().filter(|b| b.len() / 2 + n.unsigned_abs() as usize <= 3) {
            let e = alg.parse(&format!("({b})*v^({n})")).unwrap();
            assert!(ind.contains(&one_tensor(&e)), "n={n} b={b}");
        }
        // The wrong-side dressing v^n*a1 is not induced for n != 0.
        let e = alg.parse(&format!("v^({n})*a1")).unwrap();
        assert_eq!(ind.contains(&one_tensor(&e)), n == 0, "n={n}");
        ok(check_restriction(&ind));
    }
}

#[test]
fn induced_dimension_is_independent_of_the_character() {
    let f = load_fixture("e_kappa_2").unwrap();
    let sub = f.subgroup("rotations").unwrap();
    let d = 2;
    let dims: Vec<usize> =
        (-1..=1).map(|n| induced_space(sub.as_ref(), &character(sub.as_ref(), "c", n), d).unwrap().dim()).collect();
    // Degree-2 normal words b*v^n with b in the kappa plane and |n| + deg b <= 2.
    assert_eq!(dims[0], dims[2]);
    assert!(dims[1] > dims[0]);
}

#[test]
fn canonical_coactions_and_multiplicativity() {
    for (fx, name) in [("e_kappa_2", "rotations"), ("e_q_2", "hyperboloid"), ("e_q_2", "diagonal")] {
        let f = load_fixture(fx).unwrap();
        let sub = f.subgroup(name).unwrap();
        ok(check_canonical_coactions(sub.as_ref(), 2));
        ok(check_multiplicativity(sub, 2));
    }
}

#[test]
fn transport_and_direct_sums() {
    let f = load_fixture("e_kappa_2").unwrap();
    let sub = f.subgroup("rotations").unwrap();
    let (a, b) = (character(sub.as_ref(), "c", 1), character(sub.as_ref(), "c", -1));
    let ab = direct_sum(&a, &b).unwrap();
    let ba = direct_sum(&b, &a).unwrap();
    let swap = equivalence(&ab, &ba).unwrap().unwrap();
    ok(check_equivalence_transport(sub.as_ref(), &ab, &ba, &swap, 2));
    ok(check_direct_sum(sub.as_ref(), &a, &b, 2));
    ok(check_direct_sum(sub.as_ref(), &a, &a, 2));
    // The identity is not an intertwiner between these two.
    let bad = IndexedMatrix::identity(2);
    assert!(!check_equivalence_transport(sub.as_ref(), &ab, &ba, &bad, 1).is_ok());
}

#[test]
fn double_induction_on_the_toy_chain() {
    let f = load_fixture("e_q_2").unwrap();
    let gk = f.subgroup("diagonal").unwrap();
    let kh = f.subgroup("parity").unwrap();
    for p in [0, 1] {
        let rho = character(kh.as_ref(), "u", p);
        ok(check_double_induction(gk, kh, &rho, 2));
    }
}

#[test]
fn double_induction_needs_a_quantum_middle() {
    let f = load_fixture("e_q_2").unwrap();
    let gk = f.subgroup("hyperboloid").unwrap();
    let kh = f.subgroup("parity").unwrap();
    let rho = character(kh.as_ref(), "u", 0);
    assert!(!check_double_induction(gk, kh, &rho, 1).is_ok());
}

#[test]
fn automorphism_twists() {
    let f = load_fixture("e_q_2").unwrap();
    let h = f.hopf().unwrap().clone();
    let diag = f.subgroup("diagonal").unwrap();
    let rho = Comodule::character(diag.carrier().clone(), 1, Side::Right);
    ok(check_automorphism_twist(diag, &HopfMap::identity(h.clone()), &rho, 2).unwrap());
    let scale = HopfMap::from_images(h.clone(), &[("n", "t*n"), ("nb", "s*nb")]).unwrap();
    ok(check_automorphism_twist(diag, &scale, &rho, 2).unwrap());
    // On the hyperboloid the rescaling moves pi(n) off the pi-image of n.
    let hyp = f.subgroup("hyperboloid").unwrap();
    let rho = character(hyp.as_ref(), "c", 0);
    assert!(matches!(check_automorphism_twist(hyp, &scale, &rho, 2), Err(Error::TwistNotWellDefined(_))));
    ok(check_automorphism_twist(hyp, &HopfMap::identity(h), &rho, 2).unwrap());
}

#[test]
fn kappa_rescaling_is_not_an_automorphism() {
    let f = load_fixture("e_kappa_2").unwrap();
    let h = f.hopf().unwrap().clone();
    let scale = HopfMap::from_images(h, &[("a1", "t*a1"), ("a2", "t*a2")]).unwrap();
    let rep = scale.verify(2);
    assert_eq!(rep.status("algebra_map"), Some(qinduce::Status::Fail));
}

#[test]
fn trivial_subgroup_induces_everything() {
    let f = load_fixture("e_kappa_2").unwrap();
    let triv = CounitProjection::new(f.hopf().unwrap().clone());
    let ind = monomial_rep(&triv, 0, 2).unwrap();
    assert_eq!(ind.dim(), ind.words().len());
}

#[test]
fn distinct_characters_intersect_trivially() {
    let f = load_fixture("e_kappa_2").unwrap();
    let sub = f.subgroup("rotations").unwrap();
    let a = monomial_rep(sub.as_ref(), sub.carrier().indexed("c", 1).unwrap(), 2).unwrap();
    let b = monomial_rep(sub.as_ref(), sub.carrier().indexed("c", 2).unwrap(), 2).unwrap();
    assert!(a.dim() > 0 && b.dim() > 0);
    assert_eq!(a.space.intersection(&b.space).dim(), 0);
}

#[test]
fn induced_spaces_grow_with_degree() {
    let f = load_fixture("e_q_2").unwrap();
    let sub = f.subgroup("hyperboloid").unwrap();
    for m in -1..=1 {
        ok(check_monotonicity(sub.as_ref(), &character(sub.as_ref(), "c", m), 2));
    }
}

#[test]
fn left_comodules_induce_into_a_tensor_v() {
    let f = load_fixture("e_kappa_2").unwrap();
    let sub = f.subgroup("rotations").unwrap();
    let b = sub.carrier().indexed("c", 1).unwrap();
    let rho = Comodule::character(sub.carrier().clone(), b, Side::Left);
    let ind = induced_space(sub.as_ref(), &rho, 2).unwrap();
    let alg = &sub.source().alg;
    let mut t = Tensor::zero(&[Slot::Alg, Slot::Space]);
    t.add_term(vec![Factor::W(alg.gen_word("v").unwrap()), Factor::B(0)], Scalar::one());
    // R(v) = v⊗c_1.
    assert!(ind.contains(&t));
    ok(check_restriction(&ind));
}
