//! Coisotropic quantum subgroups: surjections of a Hopf algebra onto a
//! finite carrier coalgebra, computed modulo a one-sided ideal.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, Word};
use crate::coalgebra::{cvec_add, cvec_tensor, CVec, Coalgebra, Label};
use crate::error::{Error, Result};
use crate::hopf::HopfStructure;
use crate::linalg::{kernel, IndexedMatrix, Subspace, Vector};
use crate::report::Report;
use crate::scalars::Scalar;
use crate::tensor::{Factor, Key, Slot, Tensor};

/// Which side the projection is a module map on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Side> {
        match s.trim() {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::Fixture(format!("unknown side `{other}`"))),
        }
    }
}

/// Input for [`CoisotropicSubgroup::new`].
#[derive(Clone, Debug)]
pub struct SubgroupData {
    pub name: String,
    pub side: Side,
    /// Also a Hopf algebra map (a quantum subgroup in the strict sense).
    pub quantum: bool,
    /// Words mapped onto single carrier basis elements.
    pub complement: Vec<(Word, u32)>,
    /// Generators of the kernel as a one-sided ideal on `side`.
    pub kernel: Vec<Element>,
    /// Degree up to which the projection is tabulated.
    pub degree: u32,
}

#[derive(Debug)]
pub struct CoisotropicSubgroup {
    pub name: String,
    pub side: Side,
    pub quantum: bool,
    source: Arc<HopfStructure>,
    carrier: Arc<Coalgebra>,
    degree: u32,
    table: HashMap<Word, CVec>,
    preimage: Vec<Option<Word>>,
    kernel_gens: Vec<Element>,
}

/// One-sided ideal generated by `gens`, truncated at degree `d`, as a
/// subspace of the span of `words`.
fn truncated_ideal(
    h: &HopfStructure,
    gens: &[Element],
    side: Side,
    words: &[Word],
    col: &HashMap<Word, usize>,
    d: u32,
) -> Result<Subspace> {
    let mut vecs = Vec::new();
    for g in gens {
        for w in words.iter().filter(|w| w.degree() + g.degree() <= d) {
            let x = Element::word(w.clone());
            let prod = match side {
                Side::Right => h.alg.multiply(g, &x)?,
                Side::Left => h.alg.multiply(&x, g)?,
            };
            // Products leaving the enumerated words (the window) are skipped.
            let v: Option<Vector> = prod.terms().map(|(u, c)| col.get(u).map(|k| (*k, c.clone()))).collect();
            vecs.extend(v);
        }
    }
    Ok(Subspace::from_vectors(words.len(), &vecs))
}

/// Column order for echelon forms: words above degree `d` first, then the
/// remaining words with `last` ones at the end, each block descending.
/// Pivots then land on leading words, and rows pivoting below `d` live there.
fn column_order(words: &[Word], d: u32, last: &dyn Fn(&Word) -> bool) -> Vec<Word> {
    let mut high: Vec<Word> = words.iter().filter(|w| w.degree() > d).cloned().collect();
    let mut a: Vec<Word> = words.iter().filter(|w| w.degree() <= d && !last(w)).cloned().collect();
    let mut b: Vec<Word> = words.iter().filter(|w| w.degree() <= d && last(w)).cloned().collect();
    high.reverse();
    a.reverse();
    b.reverse();
    high.extend(a);
    high.extend(b);
    high
}

/// Degree at which to generate an ideal so that its part below `d` is
/// complete enough: products can drop in degree.
fn ideal_degree(gens: &[Element], d: u32) -> u32 {
    d + gens.iter().map(|g| g.degree()).max().unwrap_or(0)
}

impl CoisotropicSubgroup {
    pub fn new(source: Arc<HopfStructure>, carrier: Arc<Coalgebra>, data: SubgroupData) -> Result<Self> {
        let d = data.degree;
        let complement: HashMap<Word, u32> = data.complement.iter().filter(|(w, _)| w.degree() <= d).cloned().collect();
        let top = ideal_degree(&data.kernel, d);
        let words = column_order(&source.alg.basis_up_to(top), d, &|w| complement.contains_key(w));
        let col: HashMap<Word, usize> = words.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
        let ideal = truncated_ideal(&source, &data.kernel, data.side, &words, &col, top)?;
        if let Some(&p) = ideal.pivots().iter().find(|&&p| complement.contains_key(&words[p])) {
            return Err(Error::Fixture(format!(
                "{}: kernel meets the complement at {}",
                data.name,
                source.alg.fmt_word(&words[p])
            )));
        }
        let mut table = HashMap::new();
        for (k, w) in words.iter().enumerate().filter(|(_, w)| w.degree() <= d) {
            let r = ideal.reduce(&Vector::from([(k, Scalar::one())]));
            let mut img = CVec::new();
            let mut ok = true;
            for (j, c) in &r {
                match complement.get(&words[*j]) {
                    Some(b) => cvec_add(&mut img, &CVec::from([(*b, Scalar::one())]), c),
                    None => ok = false,
                }
            }
            if ok {
                table.insert(w.clone(), img);
            }
        }
        let mut preimage = vec![None; carrier.dim()];
        for (w, b) in &data.complement {
            if w.degree() <= d {
                preimage[*b as usize] = Some(w.clone());
            }
        }
        Ok(CoisotropicSubgroup {
            name: data.name,
            side: data.side,
            quantum: data.quantum,
            source,
            carrier,
            degree: d,
            table,
            preimage,
            kernel_gens: data.kernel,
        })
    }

    /// Replace the image of one word; for negative controls.
    pub fn with_override(mut self, w: Word, img: CVec) -> Self {
        self.table.insert(w, img);
        self
    }

    pub fn source(&self) -> &Arc<HopfStructure> {
        &self.source
    }

    pub fn carrier(&self) -> &Arc<Coalgebra> {
        &self.carrier
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn preimage(&self, b: u32) -> Option<&Word> {
        self.preimage[b as usize].as_ref()
    }

    pub fn project_word(&self, w: &Word) -> Result<&CVec> {
        self.table.get(w).ok_or_else(|| Error::UnmappedWord(self.source.alg.fmt_word(w)))
    }

    pub fn project(&self, a: &Element) -> Result<CVec> {
        let mut out = CVec::new();
        for (w, c) in a.terms() {
            cvec_add(&mut out, self.project_word(w)?, c);
        }
        Ok(out)
    }

    /// Project algebra slot `at` onto the carrier.
    pub fn project_at(&self, t: &Tensor, at: usize) -> Result<Tensor> {
        let f = |x: &Factor| -> Result<Vec<(Key, Scalar)>> {
            Ok(self.project_word(x.word())?.iter().map(|(b, c)| (vec![Factor::B(*b)], c.clone())).collect())
        };
        t.map_slot(at, &[Slot::Carrier], &f)
    }

    /// `(id⊗π)Δ`, valued in `A⊗C`.
    pub fn coaction_r(&self, a: &Element) -> Result<Tensor> {
        self.project_at(&self.source.coproduct(a)?, 1)
    }

    /// `(π⊗id)Δ`, valued in `C⊗A`.
    pub fn coaction_l(&self, a: &Element) -> Result<Tensor> {
        self.project_at(&self.source.coproduct(a)?, 0)
    }

    pub fn unit_image(&self) -> CVec {
        self.table[&Word::unit()].clone()
    }

    fn preimage_elem(&self, b: u32) -> Result<Element> {
        self.preimage(b)
            .map(|w| Element::word(w.clone()))
            .ok_or_else(|| Error::CarrierMismatch(format!("{} has no preimage", self.carrier.label_name(b))))
    }

    /// Carrier action `c·g` (right) or `g·c` (left) via the preimage of `c`.
    pub fn act(&self, c: &CVec, g: &Element) -> Result<CVec> {
        let mut out = CVec::new();
        for (b, x) in c {
            let pre = self.preimage_elem(*b)?;
            let prod = match self.side {
                Side::Right => self.source.alg.multiply(&pre, g)?,
                Side::Left => self.source.alg.multiply(g, &pre)?,
            };
            cvec_add(&mut out, &self.project(&prod)?, x);
        }
        Ok(out)
    }

    /// Carrier product through preimages; meaningful for quantum subgroups.
    pub fn carrier_mul(&self, x: &CVec, y: &CVec) -> Result<CVec> {
        let mut out = CVec::new();
        for (a, s) in x {
            for (b, t) in y {
                let prod = self.source.alg.multiply(&self.preimage_elem(*a)?, &self.preimage_elem(*b)?)?;
                cvec_add(&mut out, &self.project(&prod)?, &(s * t));
            }
        }
        Ok(out)
    }

    pub fn carrier_antipode(&self, x: &CVec) -> Result<CVec> {
        let mut out = CVec::new();
        for (a, s) in x {
            let img = self.source.antipode(&self.preimage_elem(*a)?)?;
            cvec_add(&mut out, &self.project(&img)?, s);
        }
        Ok(out)
    }

    /// Coalgebra-map, module-map and kernel checks on words of degree at most `d`.
    pub fn verify_coisotropic(&self, d: u32) -> Report {
        let mut rep = Report::new(format!("coisotropic {}", self.name));
        let d = d.min(self.degree);
        if let Err(e) = self.verify_into(&mut rep, d) {
            rep.fail("evaluation", e.to_string());
        }
        rep
    }

    fn verify_into(&self, rep: &mut Report, d: u32) -> Result<()> {
        let alg = &self.source.alg;
        let words = alg.basis_up_to(d);
        for w in &words {
            let name = alg.fmt_word(w);
            let img = self.project_word(w)?;
            let lhs = self.carrier.delta_at(&cvec_tensor(img), 0)?;
            let rhs = self.project_at(&self.project_at(&self.source.coproduct_word(w)?, 0)?, 1)?;
            rep.check("coalgebra_map.coproduct", lhs == rhs, || name.clone());
            let e_ok = self.carrier.counit_vec(img) == self.source.counit_word(w);
            rep.check("coalgebra_map.counit", e_ok, || name.clone());
        }
        for g in &self.kernel_gens {
            if g.degree() <= d {
                let ok = self.project(g)?.is_empty();
                rep.check("kernel", ok, || alg.fmt_element(g));
            }
        }
        for w in &words {
            for g in words.iter().filter(|g| w.degree() + g.degree() <= d) {
                let (x, y) = (Element::word(w.clone()), Element::word(g.clone()));
                let name = format!("{} | {}", alg.fmt_word(w), alg.fmt_word(g));
                let right = self.project(&alg.multiply(&x, &y)?)?;
                let left = self.project(&alg.multiply(&y, &x)?)?;
                let ok = match self.side {
                    Side::Right => right == self.act(self.project_word(w)?, &y)?,
                    Side::Left => left == self.act(self.project_word(w)?, &y)?,
                };
                rep.check("module_map", ok, || name.clone());
                if self.quantum {
                    let prod = self.carrier_mul(self.project_word(w)?, self.project_word(g)?)?;
                    rep.check("hopf_map.product", right == prod, || name.clone());
                }
            }
            let sw = self.source.antipode_word(w)?;
            if self.quantum && sw.degree() <= self.degree {
                let s = self.project(&sw)?;
                let ok = s == self.carrier_antipode(self.project_word(w)?)?;
                rep.check("hopf_map.antipode", ok, || alg.fmt_word(w));
            }
        }
        Ok(())
    }

    /// Coinvariants up to degree `d`: `(π⊗id)Δf = π(1)⊗f` for a right
    /// coisotropic subgroup, `(id⊗π)Δf = f⊗π(1)` for a left one.
    pub fn coinvariants(&self, d: u32) -> Result<Coinvariants> {
        let words = self.source.alg.basis_up_to(d);
        let unit = cvec_tensor(&self.unit_image());
        let mut cols: Vec<BTreeMap<Key, Scalar>> = Vec::new();
        for w in &words {
            let f = Tensor::from_element(&Element::word(w.clone()));
            let t = match self.side {
                Side::Right => self.coaction_l(&Element::word(w.clone()))?.sub(&unit.outer(&f)),
                Side::Left => self.coaction_r(&Element::word(w.clone()))?.sub(&f.outer(&unit)),
            };
            cols.push(t.terms().map(|(k, c)| (k.clone(), c.clone())).collect());
        }
        let (m, _) = IndexedMatrix::from_columns(&cols);
        Ok(Coinvariants { words, space: kernel(&m) })
    }
}

/// A subspace of the algebra spanned by normal words.
#[derive(Clone, Debug)]
pub struct Coinvariants {
    pub words: Vec<Word>,
    pub space: Subspace,
}

impl Coinvariants {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn elements(&self) -> Vec<Element> {
        self.space
            .basis()
            .iter()
            .map(|v| {
                let mut e = Element::zero();
                for (k, c) in v {
                    e.add_term(self.words[*k].clone(), c.clone());
                }
                e
            })
            .collect()
    }

    pub fn contains(&self, e: &Element) -> bool {
        let index: HashMap<&Word, usize> = self.words.iter().enumerate().map(|(k, w)| (w, k)).collect();
        let mut v = Vector::new();
        for (w, c) in e.terms() {
            match index.get(w) {
                Some(k) => {
                    v.insert(*k, c.clone());
                }
                None => return false,
            }
        }
        self.space.contains(&v)
    }
}

/// Recover a coisotropic subgroup from a coideal subalgebra `b` (spanned by
/// the given elements, truncated at degree `d`). The carrier is the quotient
/// by the ideal generated by `b⁺`, with the leftover normal words as basis.
pub fn subgroup_from_homogeneous_space(
    source: Arc<HopfStructure>,
    b: &[Element],
    side: Side,
    d: u32,
) -> Result<CoisotropicSubgroup> {
    let alg = &source.alg;
    let words = alg.basis_up_to(d);
    let col: HashMap<Word, usize> = words.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
    let to_vec = |e: &Element| -> Vector { e.terms().map(|(w, c)| (col[w], c.clone())).collect() };
    let mut span: Vec<Vector> = b.iter().map(to_vec).collect();
    span.push(to_vec(&Element::one()));
    let span = Subspace::from_vectors(words.len(), &span);
    for (i, x) in b.iter().enumerate() {
        for y in &b[i..] {
            if x.degree() + y.degree() > d {
                continue;
            }
            for p in [alg.multiply(x, y)?, alg.multiply(y, x)?] {
                if !span.contains(&to_vec(&p)) {
                    return Err(Error::NotSubalgebra(alg.fmt_element(&p)));
                }
            }
        }
    }
    // Coideal: Δb ∈ B⊗A (right) or A⊗B (left), leg by leg on the other side.
    let keep = match side {
        Side::Right => 0,
        Side::Left => 1,
    };
    for x in b {
        let t = source.coproduct(x)?;
        let mut legs: BTreeMap<Word, Element> = BTreeMap::new();
        for (k, c) in t.terms() {
            legs.entry(k[1 - keep].word().clone())
                .or_insert_with(Element::zero)
                .add_term(k[keep].word().clone(), c.clone());
        }
        for e in legs.values() {
            if !span.contains(&to_vec(e)) {
                return Err(Error::NotCoideal(alg.fmt_element(x)));
            }
        }
    }
    let plus: Vec<Element> =
        b.iter().map(|x| x.sub(&Element::scalar(source.counit(x)))).filter(|x| !x.is_zero()).collect();
    let top = ideal_degree(&plus, d);
    let order = column_order(&alg.basis_up_to(top), d, &|_| false);
    let ocol: HashMap<Word, usize> = order.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
    let ideal = truncated_ideal(&source, &plus, side, &order, &ocol, top)?;
    let pivots: std::collections::HashSet<usize> = ideal.pivots().iter().copied().collect();
    let mut quotient: Vec<Word> =
        (0..order.len()).filter(|k| !pivots.contains(k) && order[*k].degree() <= d).map(|k| order[k].clone()).collect();
    quotient.sort();
    let qindex: HashMap<Word, u32> = quotient.iter().cloned().enumerate().map(|(k, w)| (w, k as u32)).collect();
    let project = |w: &Word| -> Result<CVec> {
        let r = ideal.reduce(&Vector::from([(ocol[w], Scalar::one())]));
        r.iter()
            .map(|(j, c)| {
                qindex.get(&order[*j]).map(|b| (*b, c.clone())).ok_or_else(|| Error::UnmappedWord(alg.fmt_word(w)))
            })
            .collect()
    };
    let mut delta = Vec::new();
    let mut eps = Vec::new();
    for w in &quotient {
        let mut t = Tensor::zero(&[Slot::Carrier, Slot::Carrier]);
        for (k, c) in source.coproduct_word(w)?.terms() {
            for (x, s) in project(k[0].word())? {
                for (y, u) in project(k[1].word())? {
                    t.add_term(vec![Factor::B(x), Factor::B(y)], &(c * &s) * &u);
                }
            }
        }
        delta.push(t);
        eps.push(source.counit_word(w));
    }
    let labels: Vec<Label> = quotient.iter().cloned().map(Label::Word).collect();
    let carrier = Coalgebra::new("quotient", labels, delta, eps)?.with_backing(source.clone());
    let data = SubgroupData {
        name: "quotient".into(),
        side,
        quantum: false,
        complement: quotient.iter().cloned().zip(0..).collect(),
        kernel: plus,
        degree: d,
    };
    CoisotropicSubgroup::new(source, Arc::new(carrier), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::laurent;

    fn parity() -> CoisotropicSubgroup {
        let h = Arc::new(laurent());
        let labels = vec![Label::Indexed("u".into(), 0), Label::Indexed("u".into(), 1)];
        let c2 = Arc::new(Coalgebra::grouplike("Z2", labels));
        let data = SubgroupData {
            name: "parity".into(),
            side: Side::Right,
            quantum: true,
            complement: vec![(Word::unit(), 0), (h.alg.gen_word("v").unwrap(), 1)],
            kernel: vec![h.alg.parse("v^2 - 1").unwrap()],
            degree: 4,
        };
        CoisotropicSubgroup::new(h, c2, data).unwrap()
    }

    #[test]
    fn parity_quotient_of_laurent() {
        let s = parity();
        let alg = &s.source().alg;
        for (src, b) in [("v^3", 1), ("vi", 1), ("v^-2", 0), ("1", 0)] {
            let img = s.project(&alg.parse(src).unwrap()).unwrap();
            assert_eq!(img, CVec::from([(b, Scalar::one())]), "{src}");
        }
        let rep = s.verify_coisotropic(4);
        assert!(rep.is_ok(), "{}", rep.to_text());
        let co = s.coinvariants(3).unwrap();
        assert_eq!(co.dim(), 3);
        assert!(co.contains(&alg.parse("v^2").unwrap()));
    }

    #[test]
    fn override_breaks_coalgebra_map() {
        let s = parity();
        let w = s.source().alg.gen_word("v").unwrap();
        let bad = s.with_override(w, CVec::from([(0, Scalar::one()), (1, Scalar::one())]));
        let rep = bad.verify_coisotropic(2);
        assert!(!rep.is_ok());
    }

    #[test]
    fn quotient_from_even_powers() {
        let h = Arc::new(laurent());
        let b: Vec<Element> = ["v^2", "v^-2", "v^4", "v^-4"].iter().map(|s| h.alg.parse(s).unwrap()).collect();
        let s = subgroup_from_homogeneous_space(h.clone(), &b, Side::Right, 4).unwrap();
        assert_eq!(s.carrier().dim(), 2);
        assert!(s.verify_coisotropic(4).is_ok());
        let odd = h.alg.parse("v + v^3").unwrap();
        assert!(matches!(
            subgroup_from_homogeneous_space(h, &[odd], Side::Right, 4),
            Err(Error::NotSubalgebra(_)) | Err(Error::NotCoideal(_))
        ));
    }
}
