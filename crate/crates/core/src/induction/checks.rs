//! Functorial properties of induction, verified on truncated spaces.

use std::collections::HashMap;
use std::sync::Arc;

use super::{induced_space, Composite, InducedSpace, Projection};
use crate::algebra::{Element, Word};
use crate::coalgebra::{cvec_tensor, CVec};
use crate::comodule::{direct_sum, Comodule};
use crate::error::{Error, Result};
use crate::hopf::HopfStructure;
use crate::linalg::{rank, IndexedMatrix, Subspace, Vector};
use crate::report::Report;
use crate::scalars::Scalar;
use crate::subgroup::{CoisotropicSubgroup, Side};
use crate::tensor::{Factor, Key, Slot, Tensor};

fn run(title: String, f: impl FnOnce(&mut Report) -> Result<()>) -> Report {
    let mut rep = Report::new(title);
    if let Err(e) = f(&mut rep) {
        rep.fail("evaluation", e.to_string());
    }
    rep
}

fn alg_tensor(e: &Element) -> Tensor {
    Tensor::from_element(e)
}

/// Comodule axioms for `R` and `L` (on the carrier) and the
/// compatibilities `(Δ⊗id)R = (id⊗R)Δ`, `(id⊗Δ)L = (L⊗id)Δ`, on every
/// normal word of degree at most `d`.
pub fn check_canonical_coactions(sub: &dyn Projection, d: u32) -> Report {
    run(format!("canonical coactions of {}", sub.name()), |rep| {
        let h = sub.source();
        let c = sub.carrier();
        for w in h.alg.basis_up_to(d) {
            let name = h.alg.fmt_word(&w);
            let e = Element::word(w.clone());
            let r = sub.right_coaction(&e)?;
            let l = sub.left_coaction(&e)?;
            let id = alg_tensor(&e);
            rep.check("R.counit", c.counit_at(&r, 1)? == id, || name.clone());
            let ok = c.delta_at(&r, 1)? == sub.project_slot(&h.delta_at(&r, 0)?, 1)?;
            rep.check("R.coassociativity", ok, || name.clone());
            rep.check("L.counit", c.counit_at(&l, 0)? == id, || name.clone());
            let ok = c.delta_at(&l, 0)? == sub.project_slot(&h.delta_at(&l, 1)?, 1)?;
            rep.check("L.coassociativity", ok, || name.clone());
            let delta = h.coproduct(&e)?;
            let ok = h.delta_at(&r, 0)? == sub.project_slot(&h.delta_at(&delta, 1)?, 2)?;
            rep.check("R.compatibility", ok, || name.clone());
            let ok = h.delta_at(&l, 1)? == sub.project_slot(&h.delta_at(&delta, 0)?, 0)?;
            rep.check("L.compatibility", ok, || name.clone());
        }
        Ok(())
    })
}

/// Slotwise product where a carrier factor meets an algebra factor through
/// the module structure of the subgroup.
fn module_product(sub: &CoisotropicSubgroup, x: &Tensor, y: &Tensor) -> Result<Tensor> {
    let alg = &sub.source().alg;
    let mut out = Tensor::zero(x.slots());
    for (k1, c1) in x.terms() {
        for (k2, c2) in y.terms() {
            let mut acc = Tensor::pure(&[], Vec::new(), c1 * c2);
            for (a, b) in k1.iter().zip(k2) {
                let t = match (a, b) {
                    (Factor::W(p), Factor::W(q)) => alg_tensor(&alg.normal_form_word(&p.concat(q))?),
                    (Factor::B(c), Factor::W(g)) | (Factor::W(g), Factor::B(c)) => {
                        cvec_tensor(&sub.act(&CVec::from([(*c, Scalar::one())]), &Element::word(g.clone()))?)
                    }
                    _ => return Err(Error::CarrierMismatch("two carrier factors cannot be multiplied".into())),
                };
                acc = acc.outer(&t);
            }
            out.add_scaled(&acc, &Scalar::one());
        }
    }
    Ok(out)
}

/// Multiplicativity of `L` and `R` on pairs of words with total degree at
/// most `d`; which identities hold depends on the side of the subgroup.
pub fn check_multiplicativity(sub: &CoisotropicSubgroup, d: u32) -> Report {
    run(format!("multiplicativity of {}", sub.name), |rep| {
        let h = sub.source();
        let words = h.alg.basis_up_to(d);
        for f in &words {
            for g in words.iter().filter(|g| f.degree() + g.degree() <= d) {
                let name = format!("{} | {}", h.alg.fmt_word(f), h.alg.fmt_word(g));
                let (fe, ge) = (Element::word(f.clone()), Element::word(g.clone()));
                let fg = h.alg.multiply(&fe, &ge)?;
                let (lhs_l, lhs_r) = (sub.left_coaction(&fg)?, sub.right_coaction(&fg)?);
                let (rhs_l, rhs_r) = match sub.side {
                    Side::Right => {
                        let dg = h.coproduct(&ge)?;
                        (
                            module_product(sub, &sub.left_coaction(&fe)?, &dg)?,
                            module_product(sub, &sub.right_coaction(&fe)?, &dg)?,
                        )
                    }
                    Side::Left => {
                        let df = h.coproduct(&fe)?;
                        (
                            module_product(sub, &df, &sub.left_coaction(&ge)?)?,
                            module_product(sub, &df, &sub.right_coaction(&ge)?)?,
                        )
                    }
                };
                rep.check("L.product", lhs_l == rhs_l, || name.clone());
                rep.check("R.product", lhs_r == rhs_r, || name.clone());
            }
        }
        Ok(())
    })
}

/// Check that the coaction of every basis element splits back into the space.
pub fn check_restriction(ind: &InducedSpace) -> Report {
    let mut rep = Report::new("restricted coaction");
    for t in ind.basis() {
        let ok = match ind.coaction_components(&t) {
            Ok(parts) => parts.values().all(|g| ind.contains(g)),
            Err(_) => false,
        };
        rep.check("restriction", ok, || ind.fmt(&t));
    }
    rep
}

/// Apply a matrix to the space slot: `e_k ↦ Σ_j m[j][k] e'_j`.
fn apply_space(t: &Tensor, at: usize, m: &IndexedMatrix) -> Result<Tensor> {
    let f = |x: &Factor| -> Result<Vec<(Key, Scalar)>> {
        let k = x.index() as usize;
        Ok((0..m.nrows).map(|j| (vec![Factor::B(j as u32)], m.get(j, k))).filter(|(_, c)| !c.is_zero()).collect())
    };
    t.map_slot(at, &[Slot::Space], &f)
}

fn space_pos(side: Side) -> usize {
    if side == Side::Right {
        0
    } else {
        1
    }
}

/// Whether `map` sends `from` bijectively onto `to`, with images inside it.
fn check_bijection(
    rep: &mut Report,
    id: &str,
    from: &InducedSpace,
    to: &InducedSpace,
    map: &dyn Fn(&Tensor) -> Result<Tensor>,
) -> Result<Vec<Tensor>> {
    let images: Vec<Tensor> = from.basis().iter().map(map).collect::<Result<_>>()?;
    for (src, img) in from.basis().iter().zip(&images) {
        rep.check(&format!("{id}.membership"), to.contains(img), || from.fmt(src));
    }
    let vecs: Vec<Vector> = images.iter().filter_map(|t| to.to_vector(t).ok()).collect();
    let span = Subspace::from_vectors(to.space.ambient(), &vecs);
    rep.check(&format!("{id}.dimension"), from.dim() == to.dim(), || format!("{} vs {}", from.dim(), to.dim()));
    rep.check(&format!("{id}.bijective"), span.dim() == from.dim() && span.dim() == to.dim(), || {
        format!("image has dimension {}", span.dim())
    });
    Ok(images)
}

/// `F⊗id` carries `ind(ρ)` onto `ind(ρ')` and intertwines the coactions.
pub fn check_equivalence_transport(
    sub: &dyn Projection,
    rho: &Comodule,
    rho2: &Comodule,
    f: &IndexedMatrix,
    d: u32,
) -> Report {
    run(format!("transport {} -> {}", rho.name, rho2.name), |rep| {
        let a = induced_space(sub, rho, d)?;
        let b = induced_space(sub, rho2, d)?;
        let sp = space_pos(rho.side);
        let map = |t: &Tensor| apply_space(t, sp, f);
        let images = check_bijection(rep, "transport", &a, &b, &map)?;
        for (src, img) in a.basis().iter().zip(&images) {
            let lhs = b.coaction(img)?;
            let rhs = apply_space(&a.coaction(src)?, sp, f)?;
            rep.check("transport.intertwines", lhs == rhs, || a.fmt(src));
        }
        Ok(())
    })
}

/// `p_V⊗id + p_W⊗id` identifies `ind(ρ1⊕ρ2)` with `ind(ρ1)⊕ind(ρ2)`, in
/// every degree up to `d`.
pub fn check_direct_sum(sub: &dyn Projection, rho1: &Comodule, rho2: &Comodule, d: u32) -> Report {
    run(format!("direct sum {} + {}", rho1.name, rho2.name), |rep| {
        let sum = direct_sum(rho1, rho2)?;
        let (n1, n2) = (rho1.dim(), rho2.dim());
        let sp = space_pos(rho1.side);
        let mut p1 = IndexedMatrix::zeros(n1, n1 + n2);
        let mut p2 = IndexedMatrix::zeros(n2, n1 + n2);
        for k in 0..n1 {
            p1.set(k, k, Scalar::one());
        }
        for k in 0..n2 {
            p2.set(k, n1 + k, Scalar::one());
        }
        for e in 0..=d {
            let s = induced_space(sub, &sum, e)?;
            let a = induced_space(sub, rho1, e)?;
            let b = induced_space(sub, rho2, e)?;
            rep.check("direct_sum.dimension", s.dim() == a.dim() + b.dim(), || {
                format!("degree {e}: {} != {} + {}", s.dim(), a.dim(), b.dim())
            });
            if e < d {
                continue;
            }
            let mut joint = Vec::new();
            for t in s.basis() {
                let (x, y) = (apply_space(&t, sp, &p1)?, apply_space(&t, sp, &p2)?);
                rep.check("direct_sum.membership", a.contains(&x) && b.contains(&y), || s.fmt(&t));
                let mut v = a.to_vector(&x)?;
                let off = a.space.ambient();
                v.extend(b.to_vector(&y)?.into_iter().map(|(k, c)| (k + off, c)));
                joint.push(v);
                let ok = apply_space(&s.coaction(&t)?, sp, &p1)? == a.coaction(&x)?
                    && apply_space(&s.coaction(&t)?, sp, &p2)? == b.coaction(&y)?;
                rep.check("direct_sum.intertwines", ok, || s.fmt(&t));
            }
            let span = Subspace::from_vectors(a.space.ambient() + b.space.ambient(), &joint);
            rep.check("direct_sum.bijective", span.dim() == a.dim() + b.dim(), || format!("rank {}", span.dim()));
        }
        Ok(())
    })
}

/// `id⊗L_GK: ind_H^G(ρ) → ind_K^G(ind_H^K(ρ))` with inverse
/// `v⊗g⊗f ↦ ε(g) v⊗f`; the middle subgroup must be a quantum subgroup.
pub fn check_double_induction(
    gk: &Arc<CoisotropicSubgroup>,
    kh: &Arc<CoisotropicSubgroup>,
    rho: &Comodule,
    d: u32,
) -> Report {
    run(format!("double induction {} / {}", gk.name, kh.name), |rep| {
        rep.check("double.quantum_middle", gk.quantum, || format!("{} is only coisotropic", gk.name));
        if rho.side != Side::Right {
            return Err(Error::SideMismatch("double induction is checked for right comodules".into()));
        }
        let gh = Composite::new(gk.clone(), kh.clone())?;
        let direct = induced_space(&gh, rho, d)?;
        let inner = induced_space(kh.as_ref(), rho, d)?;
        let w = inner.to_comodule("ind_H^K", gk.carrier().clone())?;
        let outer = induced_space(gk.as_ref(), &w, d)?;
        let k_hopf = kh.source();
        let inner_basis = inner.basis();
        // Φ(e_j⊗f) = Σ e_j⊗π(f_1)⊗f_2, regrouped by the last leg.
        let phi = |t: &Tensor| -> Result<Tensor> {
            let l = gk.project_slot(&gk.source().delta_at(t, 1)?, 1)?;
            let mut parts: HashMap<Word, Tensor> = HashMap::new();
            for (k, c) in l.terms() {
                let u = gk.carrier().labels()[k[1].index() as usize].clone();
                let crate::coalgebra::Label::Word(u) = u else {
                    return Err(Error::CarrierMismatch("K carrier without word labels".into()));
                };
                let g = parts.entry(k[2].word().clone()).or_insert_with(|| Tensor::zero(&[Slot::Space, Slot::Alg]));
                g.add_term(vec![k[0].clone(), Factor::W(u)], c.clone());
            }
            let mut out = Tensor::zero(&[Slot::Space, Slot::Alg]);
            for (f, g) in parts {
                for (m, x) in inner.coordinates(&g)?.into_iter().enumerate() {
                    out.add_term(vec![Factor::B(m as u32), Factor::W(f.clone())], x);
                }
            }
            Ok(out)
        };
        let psi = |t: &Tensor| -> Result<Tensor> {
            let mut out = Tensor::zero(&[Slot::Space, Slot::Alg]);
            for (k, c) in t.terms() {
                let contracted = k_hopf.counit_at(&inner_basis[k[0].index() as usize], 1)?;
                for (j, e) in contracted.terms() {
                    out.add_term(vec![j[0].clone(), k[1].clone()], c * e);
                }
            }
            Ok(out)
        };
        let fwd = check_bijection(rep, "double.phi", &direct, &outer, &phi)?;
        let back = check_bijection(rep, "double.psi", &outer, &direct, &psi)?;
        for (t, img) in direct.basis().iter().zip(&fwd) {
            rep.check("double.psi_phi", psi(img)? == *t, || direct.fmt(t));
            let lhs = outer.coaction(img)?;
            let mut rhs = Tensor::zero(&[Slot::Space, Slot::Alg, Slot::Alg]);
            for (u, g) in direct.coaction_components(t)? {
                rhs.add_scaled(
                    &phi(&g)?.outer(&Tensor::pure(&[Slot::Alg], vec![Factor::W(u)], Scalar::one())),
                    &Scalar::one(),
                );
            }
            rep.check("double.intertwines", lhs == rhs, || direct.fmt(t));
        }
        for (t, img) in outer.basis().iter().zip(&back) {
            rep.check("double.phi_psi", phi(img)? == *t, || outer.fmt(t));
        }
        Ok(())
    })
}

/// A Hopf algebra map given on generators and extended multiplicatively.
#[derive(Clone, Debug)]
pub struct HopfMap {
    hopf: Arc<HopfStructure>,
    images: Vec<Element>,
}

impl HopfMap {
    pub fn identity(hopf: Arc<HopfStructure>) -> Self {
        let images = hopf.alg.generators().iter().map(|g| hopf.alg.parse(&g.name).expect("generator")).collect();
        HopfMap { hopf, images }
    }

    /// Override generator images, e.g. `[("n", "t*n")]`; others stay fixed.
    /// Symbols that are neither generators nor declared parameters become
    /// fresh parameters.
    pub fn from_images(hopf: Arc<HopfStructure>, images: &[(&str, &str)]) -> Result<Self> {
        let mut m = HopfMap::identity(hopf);
        for (g, src) in images {
            let k = m.hopf.alg.gen_id(g)? as usize;
            m.images[k] = m.hopf.alg.parse_fresh(src)?;
        }
        Ok(m)
    }

    pub fn apply_word(&self, w: &Word) -> Result<Element> {
        let factors: Vec<&Element> = w.letters().iter().map(|g| &self.images[*g as usize]).collect();
        self.hopf.alg.multiply_all(&factors)
    }

    pub fn apply(&self, a: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (w, c) in a.terms() {
            out.add_scaled(&self.apply_word(w)?, c);
        }
        Ok(out)
    }

    pub fn apply_at(&self, t: &Tensor, at: usize) -> Result<Tensor> {
        t.map_alg_slot(at, &|w| self.apply_word(w))
    }

    /// Algebra, coalgebra and injectivity checks up to degree `d`.
    pub fn verify(&self, d: u32) -> Report {
        run("Hopf automorphism".into(), |rep| {
            let alg = &self.hopf.alg;
            let words = alg.basis_up_to(d);
            for x in &words {
                for y in words.iter().filter(|y| x.degree() + y.degree() <= d) {
                    let lhs = self.apply(&alg.normal_form_word(&x.concat(y))?)?;
                    let rhs = alg.multiply(&self.apply_word(x)?, &self.apply_word(y)?)?;
                    rep.check("algebra_map", lhs == rhs, || format!("{} | {}", alg.fmt_word(x), alg.fmt_word(y)));
                }
            }
            for (k, g) in alg.generators().iter().enumerate() {
                let w = alg.gen_word(&g.name)?;
                let lhs = self.hopf.coproduct(&self.images[k])?;
                let rhs = self.apply_at(&self.apply_at(&self.hopf.coproduct_word(&w)?, 0)?, 1)?;
                rep.check("coalgebra_map.coproduct", lhs == rhs, || g.name.clone());
                let ok = self.hopf.counit(&self.images[k]) == self.hopf.counit_word(&w);
                rep.check("coalgebra_map.counit", ok, || g.name.clone());
            }
            let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(k, w)| (w, k)).collect();
            let mut cols = Vec::new();
            for w in &words {
                let img = self.apply_word(w)?;
                let v: Option<Vector> = img.terms().map(|(u, c)| index.get(u).map(|k| (*k, c.clone()))).collect();
                cols.extend(v);
            }
            let ok = cols.len() == words.len() && Subspace::from_vectors(words.len(), &cols).dim() == words.len();
            rep.check("injective", ok, || format!("degree {d}"));
            Ok(())
        })
    }
}

/// `α̃` on the carrier basis with `α̃∘π = π∘α`; `TwistNotWellDefined`
/// names a word where `π∘α` does not factor through `π`.
pub fn derive_twist(sub: &CoisotropicSubgroup, alpha: &HopfMap, d: u32) -> Result<Vec<CVec>> {
    let c = sub.carrier();
    let mut table = Vec::new();
    for b in 0..c.dim() as u32 {
        let pre = sub
            .preimage(b)
            .ok_or_else(|| Error::TwistNotWellDefined(format!("{} has no preimage", c.label_name(b))))?;
        table.push(sub.project(&alpha.apply_word(pre)?)?);
    }
    let twisted = |x: &CVec| {
        let mut out = CVec::new();
        for (b, s) in x {
            crate::coalgebra::cvec_add(&mut out, &table[*b as usize], s);
        }
        out
    };
    for w in sub.source().alg.basis_up_to(d) {
        if sub.project(&alpha.apply_word(&w)?)? != twisted(sub.project_word(&w)?) {
            return Err(Error::TwistNotWellDefined(sub.source().alg.fmt_word(&w)));
        }
    }
    Ok(table)
}

/// `ind((id⊗α̃)ρ) = (id⊗α) ind(ρ)` for a right comodule `ρ`.
pub fn check_automorphism_twist(sub: &CoisotropicSubgroup, alpha: &HopfMap, rho: &Comodule, d: u32) -> Result<Report> {
    let table = derive_twist(sub, alpha, d)?;
    let mut rep = alpha.verify(d);
    let twisted = {
        let sp = space_pos(rho.side);
        let coaction = (0..rho.dim() as u32)
            .map(|k| {
                let f = |x: &Factor| -> Result<Vec<(Key, Scalar)>> {
                    Ok(table[x.index() as usize].iter().map(|(b, c)| (vec![Factor::B(*b)], c.clone())).collect())
                };
                rho.coaction(k).map_slot(1 - sp, &[Slot::Carrier], &f)
            })
            .collect::<Result<Vec<_>>>()?;
        Comodule::new(
            &format!("twisted {}", rho.name),
            rho.side,
            rho.carrier().clone(),
            rho.labels().to_vec(),
            coaction,
        )?
    };
    let inner = run("twist".into(), |rep| {
        let a = induced_space(sub, rho, d)?;
        let b = induced_space(sub, &twisted, d)?;
        let at = 1 - space_pos(rho.side);
        let images = check_bijection(rep, "twist", &a, &b, &|t| alpha.apply_at(t, at))?;
        for (src, img) in a.basis().iter().zip(&images) {
            let lhs = b.coaction(img)?;
            let rhs = alpha.apply_at(&alpha.apply_at(&a.coaction(src)?, at)?, at + 1)?;
            rep.check("twist.intertwines", lhs == rhs, || a.fmt(src));
        }
        Ok(())
    });
    rep.merge("", inner);
    Ok(rep)
}

/// `ind` at degree `d` sits inside `ind` at degree `d + 1`.
pub fn check_monotonicity(sub: &dyn Projection, rho: &Comodule, d: u32) -> Report {
    run(format!("monotonicity of ind({})", rho.name), |rep| {
        let a = induced_space(sub, rho, d)?;
        let b = induced_space(sub, rho, d + 1)?;
        for t in a.basis() {
            rep.check("monotone", b.contains(&t), || a.fmt(&t));
        }
        Ok(())
    })
}

/// Generic rank of a square matrix, for callers holding an intertwiner.
pub fn is_invertible(m: &IndexedMatrix) -> bool {
    m.nrows == m.ncols && rank(m) == m.nrows
}
