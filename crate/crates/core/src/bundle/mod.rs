//! Linear maps from the carrier into the algebra, sections, and the
//! trivializations they induce.

mod checks;
pub use checks::*;

use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::{Element, Word};
use crate::coalgebra::{CVec, Coalgebra};
use crate::comodule::Comodule;
use crate::error::{Error, Result};
use crate::fixtures::Fixture;
use crate::hopf::HopfStructure;
use crate::scalars::Scalar;
use crate::subgroup::{CoisotropicSubgroup, Side};
use crate::tensor::{Factor, Key, Slot, Tensor};

/// A linear map `C → A`, given on the carrier basis.
#[derive(Clone, Debug)]
pub struct LinearMapCtoA {
    carrier: Arc<Coalgebra>,
    table: Vec<Element>,
}

impl LinearMapCtoA {
    pub fn new(carrier: Arc<Coalgebra>, table: Vec<Element>) -> Result<Self> {
        if table.len() != carrier.dim() {
            return Err(Error::CarrierMismatch(format!(
                "{} images for a carrier of dimension {}",
                table.len(),
                carrier.dim()
            )));
        }
        Ok(LinearMapCtoA { carrier, table })
    }

    pub fn carrier(&self) -> &Arc<Coalgebra> {
        &self.carrier
    }

    pub fn image(&self, b: u32) -> &Element {
        &self.table[b as usize]
    }

    pub fn apply(&self, v: &CVec) -> Element {
        let mut out = Element::zero();
        for (b, c) in v {
            out.add_scaled(self.image(*b), c);
        }
        out
    }

    /// Replace carrier slot `at` by an algebra slot.
    pub fn apply_at(&self, t: &Tensor, at: usize) -> Result<Tensor> {
        let f = |x: &Factor| -> Result<Vec<(Key, Scalar)>> {
            Ok(self.image(x.index()).terms().map(|(w, c)| (vec![Factor::W(w.clone())], c.clone())).collect())
        };
        t.map_slot(at, &[Slot::Alg], &f)
    }
}

/// `(f*g)(c) = Σ f(c_1) g(c_2)`.
pub fn convolve(h: &HopfStructure, f: &LinearMapCtoA, g: &LinearMapCtoA) -> Result<LinearMapCtoA> {
    if !Arc::ptr_eq(f.carrier(), g.carrier()) {
        return Err(Error::CarrierMismatch("convolution of maps on different carriers".into()));
    }
    let c = f.carrier();
    let mut table = Vec::with_capacity(c.dim());
    for b in 0..c.dim() as u32 {
        let mut out = Element::zero();
        for (k, x) in c.delta(b).terms() {
            let p = h.alg.multiply(f.image(k[0].index()), g.image(k[1].index()))?;
            out.add_scaled(&p, x);
        }
        table.push(out);
    }
    LinearMapCtoA::new(c.clone(), table)
}

/// The convolution unit `c ↦ ε(c)1`.
pub fn convolution_unit(carrier: Arc<Coalgebra>) -> LinearMapCtoA {
    let table = (0..carrier.dim() as u32).map(|b| Element::scalar(carrier.counit(b).clone())).collect();
    LinearMapCtoA { carrier, table }
}

fn invert_monomial(h: &HopfStructure, e: &Element) -> Option<Element> {
    let (w, c) = match e.terms().collect::<Vec<_>>()[..] {
        [(w, c)] => (w, c),
        _ => return None,
    };
    let gens = h.alg.generators();
    let mut letters = Vec::with_capacity(w.len());
    for g in w.letters().iter().rev() {
        letters.push(gens[*g as usize].inverse?);
    }
    let inv = h.alg.normal_form_word(&h.alg.word_of(&letters)).ok()?;
    Some(inv.scale(&c.inv().ok()?))
}

/// Convolution inverse on a group-like basis: `f⁻¹(c) = f(c)⁻¹`, for
/// images that are scalar multiples of words in invertible generators.
pub fn convolution_inverse_grouplike(h: &HopfStructure, f: &LinearMapCtoA) -> Result<LinearMapCtoA> {
    let c = f.carrier();
    let mut table = Vec::with_capacity(c.dim());
    for b in 0..c.dim() as u32 {
        if !c.is_grouplike(b) {
            return Err(Error::NotGrouplikeBasis(c.label_name(b)));
        }
        let inv =
            invert_monomial(h, f.image(b)).ok_or_else(|| Error::NonInvertibleImage(h.alg.fmt_element(f.image(b))))?;
        table.push(inv);
    }
    LinearMapCtoA::new(c.clone(), table)
}

/// A section `φ: C → A` of a coisotropic subgroup together with its
/// convolution inverse.
#[derive(Clone, Debug)]
pub struct Section {
    pub name: String,
    pub sub: Arc<CoisotropicSubgroup>,
    pub phi: LinearMapCtoA,
    pub phi_inv: LinearMapCtoA,
}

impl Section {
    /// Without an explicit inverse, the group-like inverse is used.
    pub fn new(
        name: &str,
        sub: Arc<CoisotropicSubgroup>,
        phi: LinearMapCtoA,
        phi_inv: Option<LinearMapCtoA>,
    ) -> Result<Self> {
        if !Arc::ptr_eq(phi.carrier(), sub.carrier()) {
            return Err(Error::CarrierMismatch(format!("section {name} is not on the carrier of {}", sub.name)));
        }
        let phi_inv = match phi_inv {
            Some(m) => m,
            None => convolution_inverse_grouplike(sub.source(), &phi)?,
        };
        Ok(Section { name: name.into(), sub, phi, phi_inv })
    }

    /// Build from the `[section NAME]` template of a fixture; `fixed`
    /// overrides template defaults such as `$r`.
    pub fn from_fixture(fx: &Fixture, subgroup: &str, fixed: &HashMap<String, i64>) -> Result<Self> {
        let sub = fx.subgroup(subgroup)?.clone();
        let (t, inv) = fx
            .section_template(subgroup)
            .ok_or_else(|| Error::Fixture(format!("{}: no section for {subgroup}", fx.name)))?;
        let phi = table_from_template(fx, &sub, t, fixed)?;
        let phi_inv = inv.as_ref().map(|t| table_from_template(fx, &sub, t, fixed)).transpose()?;
        let mut env = t.defaults().clone();
        env.extend(fixed.iter().map(|(k, v)| (k.clone(), *v)));
        let mut args: Vec<String> = env.iter().map(|(k, v)| format!("{k}={v}")).collect();
        args.sort();
        let name = if args.is_empty() { subgroup.to_string() } else { format!("{subgroup}[{}]", args.join(",")) };
        Section::new(&name, sub, phi, phi_inv)
    }

    pub fn side(&self) -> Side {
        self.sub.side
    }

    pub fn source(&self) -> &Arc<HopfStructure> {
        self.sub.source()
    }
}

fn table_from_template(
    fx: &Fixture,
    sub: &CoisotropicSubgroup,
    t: &crate::fixtures::Template,
    fixed: &HashMap<String, i64>,
) -> Result<LinearMapCtoA> {
    let c = sub.carrier();
    let mut table: Vec<Option<Element>> = vec![None; c.dim()];
    for (env, key, value) in t.expand(fx.window, fixed) {
        let v = c.parse_vec(&key, &env)?;
        let b = match v.iter().collect::<Vec<_>>()[..] {
            [(b, x)] if x.is_one() => *b,
            _ => return Err(Error::Fixture(format!("section key `{key}` is not a carrier basis element"))),
        };
        let value = value.ok_or_else(|| Error::Fixture(format!("section key `{key}` has no image")))?;
        table[b as usize] = Some(sub.source().alg.parse_with(&value, &env)?);
    }
    let table = table
        .into_iter()
        .enumerate()
        .map(|(b, e)| e.ok_or_else(|| Error::Fixture(format!("section has no image for {}", c.label_name(b as u32)))))
        .collect::<Result<Vec<_>>>()?;
    LinearMapCtoA::new(c.clone(), table)
}

fn mul_words(h: &HopfStructure, a: &Word, b: &Word) -> Result<Element> {
    h.alg.normal_form_word(&a.concat(b))
}

/// For a right subgroup `f` is coinvariant when `(π⊗id)Δf = π(1)⊗f`; for
/// a left one when `(id⊗π)Δf = f⊗π(1)`.
pub fn is_coinvariant(sub: &CoisotropicSubgroup, f: &Element) -> Result<bool> {
    let unit = crate::coalgebra::cvec_tensor(&sub.unit_image());
    let e = Tensor::from_element(f);
    Ok(match sub.side {
        Side::Right => sub.coaction_l(f)? == unit.outer(&e),
        Side::Left => sub.coaction_r(f)? == e.outer(&unit),
    })
}

/// `A_φ`: `b⊗k ↦ bφ(k)` on `B⊗C` (right), `k⊗b ↦ φ(k)b` on `C⊗B` (left).
pub fn a_phi(s: &Section, t: &Tensor) -> Result<Element> {
    let h = s.source();
    let k = usize::from(s.side() == Side::Right);
    let mut out = Element::zero();
    for (key, c) in t.terms() {
        let b = key[1 - k].word();
        for (w, x) in s.phi.image(key[k].index()).terms() {
            let p = if k == 1 { mul_words(h, b, w)? } else { mul_words(h, w, b)? };
            out.add_scaled(&p, &(c * x));
        }
    }
    Ok(out)
}

/// `A_φ⁻¹(f) = Σ f_3φ⁻¹(π(f_2))⊗π(f_1)` (right), `Σ π(f_3)⊗φ⁻¹(π(f_2))f_1` (left).
pub fn a_phi_inv(s: &Section, f: &Element) -> Result<Tensor> {
    let h = s.source();
    let t = s.phi_inv.apply_at(&s.sub.project_at(&h.sweedler_expand(f, 3)?, 1)?, 1)?;
    match s.side() {
        Side::Right => {
            let t = s.sub.project_at(&t.permute(&[0, 2, 1]).contract(&h.alg, 1, 2)?, 0)?;
            Ok(t.permute(&[1, 0]))
        }
        Side::Left => {
            let t = s.sub.project_at(&t.permute(&[1, 0, 2]).contract(&h.alg, 0, 1)?, 1)?;
            Ok(t.permute(&[1, 0]))
        }
    }
}

/// `T_φ(v) = Σ v_0⊗φ(v_1)` (right), `Σ φ(v_{-1})⊗v_0` (left).
pub fn t_phi(s: &Section, rho: &Comodule, j: usize) -> Result<Tensor> {
    let at = usize::from(rho.side == Side::Right);
    s.phi.apply_at(rho.coaction(j as u32), at)
}

/// Dress the algebra slot `alg_at` by the coaction on the space slot:
/// `e_j⊗f ↦ Σ_k e_k⊗f·m(c_kj)` when `after`, `m(c_kj)·f` otherwise.
fn dress(
    s: &Section,
    rho: &Comodule,
    m: &LinearMapCtoA,
    t: &Tensor,
    at: (usize, usize),
    after: bool,
) -> Result<Tensor> {
    let alg = &s.source().alg;
    let (space_at, alg_at) = at;
    let (sp, cp) = if rho.side == Side::Right { (0, 1) } else { (1, 0) };
    let mut out = Tensor::zero(t.slots());
    for (key, c) in t.terms() {
        let f = key[alg_at].word();
        for (k2, x) in rho.coaction(key[space_at].index()).terms() {
            for (w, y) in m.image(k2[cp].index()).terms() {
                let p = if after { alg.normal_form_word(&f.concat(w))? } else { alg.normal_form_word(&w.concat(f))? };
                for (u, z) in p.terms() {
                    let mut nk = key.clone();
                    nk[space_at] = k2[sp].clone();
                    nk[alg_at] = Factor::W(u.clone());
                    out.add_term(nk, &(&(c * x) * y) * z);
                }
            }
        }
    }
    Ok(out)
}

fn positions(rho: &Comodule) -> (usize, usize) {
    if rho.side == Side::Right {
        (0, 1)
    } else {
        (1, 0)
    }
}

/// `I_φ: V⊗B → ind(ρ)`, `v⊗b ↦ Σ v_0⊗b·φ(v_1)` for a right comodule and
/// `b⊗v ↦ Σ φ(v_{-1})b⊗v_0` for a left one.
pub fn i_phi(s: &Section, rho: &Comodule, t: &Tensor) -> Result<Tensor> {
    dress(s, rho, &s.phi, t, positions(rho), rho.side == Side::Right)
}

/// `I_φ⁻¹`, `v⊗f ↦ Σ v_0⊗f·φ⁻¹(v_1)` (right), mirrored on the left.
pub fn i_phi_inv(s: &Section, rho: &Comodule, t: &Tensor) -> Result<Tensor> {
    dress(s, rho, &s.phi_inv, t, positions(rho), rho.side == Side::Right)
}

/// Coaction of `ind(ρ)` carried to `V⊗B`: `v⊗b ↦ Σ v_0⊗b_1⊗b_2φ(v_1)`
/// in `V⊗B⊗A` (right), `b⊗v ↦ Σ φ(v_{-1})b_1⊗b_2⊗v_0` in `A⊗B⊗V` (left).
pub fn trivialized_coaction(s: &Section, rho: &Comodule, t: &Tensor) -> Result<Tensor> {
    let h = s.source();
    match rho.side {
        Side::Right => dress(s, rho, &s.phi, &h.delta_at(t, 1)?, (0, 2), true),
        Side::Left => dress(s, rho, &s.phi, &h.delta_at(t, 0)?, (2, 0), false),
    }
}
