use std::collections::{BTreeMap, HashMap};

use proptest::prelude::*;
use qinduce::linalg::{kernel, rank, IndexedMatrix};
use qinduce::scalars::{GaussRat, Poly, Var};
use qinduce::Scalar;

fn gauss() -> impl Strategy<Value = GaussRat> {
    (-6i64..=6, 1i64..=5, -3i64..=3)
        .prop_map(|(n, d, im)| &GaussRat::from_ratio(n, d) + &(&GaussRat::i() * &GaussRat::from_ratio(im, 2)))
}

/// Polynomials of degree at most two in `q` and `t`.
fn poly() -> impl Strategy<Value = Poly> {
    proptest::collection::vec((gauss(), 0u8..6), 1..4).prop_map(|terms| {
        let monos = ["1", "q", "t", "q*q", "q*t", "t*t"];
        terms.into_iter().fold(Poly::zero(), |acc, (c, m)| {
            let mono =
                monos[m as usize].split('*').fold(Poly::one(), |p, v| if v == "1" { p } else { p.mul(&Poly::var(v)) });
            acc.add(&mono.scale(&c))
        })
    })
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (poly(), poly())
        .prop_map(|(n, d)| if d.is_zero() { Scalar::from_poly(n) } else { Scalar::from_fraction(n, d).unwrap() })
}

fn point() -> HashMap<Var, GaussRat> {
    HashMap::from([(Var::from("q"), GaussRat::from_ratio(5, 3)), (Var::from("t"), GaussRat::from_ratio(-2, 7))])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonical_forms_cancel(a in scalar(), b in scalar()) {
        prop_assert!((&a - &a).is_zero());
        if !b.is_zero() {
            prop_assert_eq!(&a.checked_div(&b).unwrap() * &b, a.clone());
        }
    }

    #[test]
    fn field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn specialization_is_a_homomorphism(a in scalar(), b in scalar()) {
        let p = point();
        if let (Ok(x), Ok(y)) = (a.specialize(&p), b.specialize(&p)) {
            prop_assert_eq!((&a * &b).specialize(&p).unwrap(), &x * &y);
            prop_assert_eq!((&a + &b).specialize(&p).unwrap(), &x + &y);
        }
    }

    #[test]
    fn rank_nullity(entries in proptest::collection::vec(proptest::option::weighted(0.5, poly().prop_map(Scalar::from_poly)), 12), cols in 2usize..5) {
        let rows = entries.len() / cols;
        let mut m = IndexedMatrix::zeros(rows, cols);
        for (k, e) in entries.iter().enumerate().take(rows * cols) {
            if let Some(x) = e {
                m.set(k / cols, k % cols, x.clone());
            }
        }
        let ker = kernel(&m);
        prop_assert_eq!(rank(&m) + ker.dim(), cols);
        for v in ker.basis() {
            prop_assert!(m.apply(v).values().all(Scalar::is_zero));
        }
    }

    #[test]
    fn kernels_survive_generic_specialization(entries in proptest::collection::vec(poly(), 9)) {
        // A rank-deficient matrix: the third column is a combination of the others.
        let mut m = IndexedMatrix::zeros(3, 3);
        for r in 0..3 {
            let (x, y) = (Scalar::from_poly(entries[3 * r].clone()), Scalar::from_poly(entries[3 * r + 1].clone()));
            let z = Scalar::from_poly(entries[3 * r + 2].clone());
            m.set(r, 0, x.clone());
            m.set(r, 1, y.clone());
            m.set(r, 2, &(&x * &z) + &y);
        }
        let generic = kernel(&m).dim();
        let p = point();
        let ms = m.map_entries(&|c| c.specialize(&p)).unwrap();
        let special = kernel(&ms);
        prop_assert!(special.dim() >= generic);
        for v in kernel(&m).basis() {
            let sv: BTreeMap<usize, Scalar> = v.iter().filter_map(|(k, c)| c.specialize(&p).ok().map(|c| (*k, c))).collect();
            if sv.len() == v.len() {
                prop_assert!(special.contains(&sv));
            }
        }
    }
}
