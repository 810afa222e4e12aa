//! Truncated checks of sections and the isomorphisms built from them.

use std::collections::BTreeMap;

use super::*;
use crate::induction::{induced_space, InducedSpace};
use crate::report::Report;

fn run(title: String, f: impl FnOnce(&mut Report) -> Result<()>) -> Report {
    let mut rep = Report::new(title);
    if let Err(e) = f(&mut rep) {
        rep.fail("evaluation", e.to_string());
    }
    rep
}

fn tensor_degree(t: &Tensor) -> u32 {
    t.terms()
        .flat_map(|(k, _)| k.iter().filter(|f| matches!(f, Factor::W(_))).map(|f| f.word().degree()))
        .max()
        .unwrap_or(0)
}

/// Multiply algebra slot `at` by `u` on the right (`after`) or the left.
fn mul_slot(h: &HopfStructure, t: &Tensor, at: usize, u: &Word, after: bool) -> Result<Tensor> {
    t.map_alg_slot(at, &|w| if after { mul_words(h, w, u) } else { mul_words(h, u, w) })
}

/// The section conditions on normal words `v`, `u` with
/// `deg v + deg u ≤ d`:
/// - `unit`: `φ(π(1)) = 1`;
/// - `convolution`: `φ*φ⁻¹ = φ⁻¹*φ = ε1` on the carrier basis;
/// - `covariance`: `Σ π(φ(c)_1u)⊗φ(c)_2 = Σ π(v_1u)⊗φ(π(v_2))`, `c = π(v)`;
/// - `inverse_covariance`: `Σ π(φ⁻¹(c)_1u)⊗φ⁻¹(c)_2 = Σ π(S(v_2)u)⊗φ⁻¹(π(v_1))`,
///   for the canonical preimage `v` of a carrier basis element only (the
///   right side depends on the choice of `v`);
/// - `multiplicative` for quantum subgroups.
///
/// Left subgroups use the mirrored identities.
pub fn verify_section(s: &Section, d: u32) -> Report {
    run(format!("section {}", s.name), |rep| {
        let h = s.source();
        let sub = &s.sub;
        let c = sub.carrier();
        let one = s.phi.apply(&sub.unit_image());
        rep.check("unit", one == Element::one(), || h.alg.fmt_element(&one));
        let unit = convolution_unit(c.clone());
        let (l, r) = (convolve(h, &s.phi, &s.phi_inv)?, convolve(h, &s.phi_inv, &s.phi)?);
        for b in 0..c.dim() as u32 {
            let ok = l.image(b) == unit.image(b) && r.image(b) == unit.image(b);
            rep.check("convolution", ok, || c.label_name(b));
        }
        let right = s.side() == Side::Right;
        let (pa, ka) = if right { (0, 1) } else { (1, 0) };
        let words = h.alg.basis_up_to(d);
        let canonical: std::collections::HashSet<&Word> = (0..c.dim() as u32).filter_map(|b| sub.preimage(b)).collect();
        for v in &words {
            let cv = sub.project_word(v)?.clone();
            let dv = h.coproduct_word(v)?;
            for u in words.iter().filter(|u| v.degree() + u.degree() <= d) {
                let name = || format!("v = {}, u = {}", h.alg.fmt_word(v), h.alg.fmt_word(u));
                let img = Tensor::from_element(&s.phi.apply(&cv));
                let lhs = sub.project_at(&mul_slot(h, &h.delta_at(&img, 0)?, pa, u, right)?, pa)?;
                let rhs = sub.project_at(&mul_slot(h, &dv, pa, u, right)?, pa)?;
                let rhs = s.phi.apply_at(&sub.project_at(&rhs, ka)?, ka)?;
                rep.check("covariance", lhs == rhs, name);
                if !canonical.contains(v) {
                    continue;
                }
                let img = Tensor::from_element(&s.phi_inv.apply(&cv));
                let lhs = sub.project_at(&mul_slot(h, &h.delta_at(&img, 0)?, pa, u, right)?, pa)?;
                let swapped = dv.permute(&[1, 0]).map_alg_slot(pa, &|w| h.antipode_word(w))?;
                let rhs = sub.project_at(&mul_slot(h, &swapped, pa, u, right)?, pa)?;
                let rhs = s.phi_inv.apply_at(&sub.project_at(&rhs, ka)?, ka)?;
                rep.check("inverse_covariance", lhs == rhs, name);
            }
        }
        if sub.quantum {
            for a in 0..c.dim() as u32 {
                for b in 0..c.dim() as u32 {
                    let (Some(x), Some(y)) = (sub.preimage(a), sub.preimage(b)) else { continue };
                    if x.degree() + y.degree() > sub.degree() {
                        continue;
                    }
                    let prod = sub.carrier_mul(&CVec::from([(a, Scalar::one())]), &CVec::from([(b, Scalar::one())]))?;
                    let ok = s.phi.apply(&prod) == h.alg.multiply(s.phi.image(a), s.phi.image(b))?;
                    rep.check("multiplicative", ok, || format!("{} * {}", c.label_name(a), c.label_name(b)));
                }
            }
        }
        Ok(())
    })
}

/// `A ≅ B⊗C` (right) or `C⊗B` (left) through `A_φ`: the `B` legs of
/// `A_φ⁻¹` are coinvariant and both composites are the identity, on words
/// of degree `≤ d` and on `k⊗b` with `deg φ(k) + deg b ≤ d`.
pub fn check_trivialization(s: &Section, d: u32) -> Report {
    run(format!("trivialization by {}", s.name), |rep| {
        let h = s.source();
        let sub = &s.sub;
        let (ca, ba) = if s.side() == Side::Right { (1, 0) } else { (0, 1) };
        for w in h.alg.basis_up_to(d) {
            let name = || h.alg.fmt_word(&w);
            let f = Element::word(w.clone());
            let t = a_phi_inv(s, &f)?;
            let mut legs: BTreeMap<u32, Element> = BTreeMap::new();
            for (k, c) in t.terms() {
                legs.entry(k[ca].index()).or_insert_with(Element::zero).add_term(k[ba].word().clone(), c.clone());
            }
            let mut ok = true;
            for b in legs.values() {
                ok &= is_coinvariant(sub, b)?;
            }
            rep.check("A.coinvariant_leg", ok, name);
            rep.check("A.right_inverse", a_phi(s, &t)? == f, name);
        }
        let co = sub.coinvariants(d)?;
        for k in 0..sub.carrier().dim() as u32 {
            let pk = s.phi.image(k).degree();
            if pk > d {
                continue;
            }
            for b in co.elements().into_iter().filter(|b| b.degree() + pk <= d) {
                let mut t =
                    Tensor::zero(&if ca == 0 { [Slot::Carrier, Slot::Alg] } else { [Slot::Alg, Slot::Carrier] });
                for (w, c) in b.terms() {
                    let key = if ca == 0 {
                        vec![Factor::B(k), Factor::W(w.clone())]
                    } else {
                        vec![Factor::W(w.clone()), Factor::B(k)]
                    };
                    t.add_term(key, c.clone());
                }
                let back = a_phi_inv(s, &a_phi(s, &t)?)?;
                rep.check("A.left_inverse", back == t, || {
                    format!("{} ⊗ {}", sub.carrier().label_name(k), h.alg.fmt_element(&b))
                });
            }
        }
        Ok(())
    })
}

/// `v⊗b` (right) or `b⊗v` (left) for a basis vector and an element of `B`.
pub fn space_tensor(side: Side, j: u32, b: &Element) -> Tensor {
    let mut t = Tensor::zero(&if side == Side::Right { [Slot::Space, Slot::Alg] } else { [Slot::Alg, Slot::Space] });
    for (w, c) in b.terms() {
        let key = if side == Side::Right {
            vec![Factor::B(j), Factor::W(w.clone())]
        } else {
            vec![Factor::W(w.clone()), Factor::B(j)]
        };
        t.add_term(key, c.clone());
    }
    t
}

/// Split a tensor in `V⊗A` (or `A⊗V`) into its algebra legs per basis vector.
fn legs(side: Side, t: &Tensor) -> BTreeMap<u32, Element> {
    let (sp, al) = if side == Side::Right { (0, 1) } else { (1, 0) };
    let mut out: BTreeMap<u32, Element> = BTreeMap::new();
    for (k, c) in t.terms() {
        out.entry(k[sp].index()).or_insert_with(Element::zero).add_term(k[al].word().clone(), c.clone());
    }
    out
}

/// `T_φ`, `I_φ` and `I_φ⁻¹` on `ind(ρ)` truncated at `d`:
/// - `T.membership`: `T_φ(v) ∈ ind(ρ)`;
/// - `I.membership`, `I.round_trip`: on `v⊗b` with `deg b + deg T_φ(v) ≤ d`;
/// - `I_inv.coinvariant_leg`, `I_inv.round_trip`: on the basis of `ind(ρ)`;
/// - `trivialized`: the coaction of `ind(ρ)` carried by `I_φ⁻¹` equals
///   [`trivialized_coaction`].
pub fn check_section_isomorphisms(s: &Section, rho: &Comodule, d: u32) -> Report {
    run(format!("isomorphisms of {} for {}", s.name, rho.name), |rep| {
        let h = s.source();
        let ind = induced_space(s.sub.as_ref(), rho, d)?;
        rep.note(format!("dim ind = {} at degree {d}", ind.dim()));
        for j in 0..rho.dim() {
            let t = t_phi(s, rho, j)?;
            rep.check("T.membership", ind.contains(&t), || ind.fmt(&t));
        }
        let tdeg: Vec<u32> =
            (0..rho.dim()).map(|j| t_phi(s, rho, j).map(|t| tensor_degree(&t))).collect::<Result<_>>()?;
        let co = s.sub.coinvariants(d)?;
        for b in co.elements() {
            for j in (0..rho.dim()).filter(|&j| b.degree() + tdeg[j] <= d) {
                let t = space_tensor(rho.side, j as u32, &b);
                let f = i_phi(s, rho, &t)?;
                rep.check("I.membership", ind.contains(&f), || ind.fmt(&f));
                rep.check("I.round_trip", i_phi_inv(s, rho, &f)? == t, || ind.fmt(&t));
            }
        }
        let alg = if rho.side == Side::Right { 1 } else { 0 };
        for f in ind.basis() {
            let g = i_phi_inv(s, rho, &f)?;
            let mut ok = true;
            for b in legs(rho.side, &g).values() {
                ok &= is_coinvariant(&s.sub, b)?;
            }
            rep.check("I_inv.coinvariant_leg", ok, || ind.fmt(&f));
            rep.check("I_inv.round_trip", i_phi(s, rho, &g)? == f, || ind.fmt(&f));
            let full = h.delta_at(&f, alg)?;
            let carried = match rho.side {
                Side::Right => dress(s, rho, &s.phi_inv, &full, (0, 1), true)?,
                Side::Left => dress(s, rho, &s.phi_inv, &full, (2, 1), false)?,
            };
            rep.check("trivialized", carried == trivialized_coaction(s, rho, &g)?, || ind.fmt(&f));
        }
        Ok(())
    })
}

/// Which products of `B` with `ind(ρ)` stay inside `ind(ρ)`: `module.left`
/// for `b·F`, `module.right` for `F·b`, over basis pairs of total degree
/// `≤ d`. A right subgroup acts from the left and vice versa; the other
/// side is reported with a witness and is expected to fail.
pub fn check_module_sides(sub: &CoisotropicSubgroup, rho: &Comodule, d: u32) -> Report {
    run(format!("B-module structure of ind({})", rho.name), |rep| {
        let h = sub.source();
        let ind: InducedSpace = induced_space(sub, rho, d)?;
        let al = if rho.side == Side::Right { 1 } else { 0 };
        let co = sub.coinvariants(d)?;
        for f in ind.basis() {
            let fd = tensor_degree(&f);
            for b in co.elements().into_iter().filter(|b| b.degree() + fd <= d) {
                let prod = |after: bool| -> Result<Tensor> {
                    let mut out = Tensor::zero(f.slots());
                    for (w, c) in b.terms() {
                        out.add_scaled(&mul_slot(h, &f, al, w, after)?, c);
                    }
                    Ok(out)
                };
                let (left, right) = (prod(false)?, prod(true)?);
                let name = |t: &Tensor| format!("{} from {} and {}", ind.fmt(t), ind.fmt(&f), h.alg.fmt_element(&b));
                rep.check("module.left", ind.contains(&left), || name(&left));
                rep.check("module.right", ind.contains(&right), || name(&right));
            }
        }
        Ok(())
    })
}
