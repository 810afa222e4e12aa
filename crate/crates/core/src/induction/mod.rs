//! Induced corepresentations as exact kernels on truncated tensor spaces.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::algebra::{Element, Word};
use crate::coalgebra::{cvec_add, CVec, Coalgebra, Label};
use crate::comodule::Comodule;
use crate::error::{Error, Result};
use crate::hopf::HopfStructure;
use crate::linalg::{kernel, IndexedMatrix, Subspace, Vector};
use crate::scalars::Scalar;
use crate::subgroup::{CoisotropicSubgroup, Side};
use crate::tensor::{Factor, Key, Slot, Tensor};

mod checks;

pub use checks::*;

/// A surjection of a Hopf algebra onto a carrier coalgebra.
pub trait Projection: Send + Sync {
    fn name(&self) -> String;
    fn source(&self) -> &Arc<HopfStructure>;
    fn carrier(&self) -> &Arc<Coalgebra>;
    fn side(&self) -> Side;
    fn project_word_vec(&self, w: &Word) -> Result<CVec>;

    fn project_elem(&self, a: &Element) -> Result<CVec> {
        let mut out = CVec::new();
        for (w, c) in a.terms() {
            cvec_add(&mut out, &self.project_word_vec(w)?, c);
        }
        Ok(out)
    }

    /// Project algebra slot `at`.
    fn project_slot(&self, t: &Tensor, at: usize) -> Result<Tensor> {
        let f = |x: &Factor| -> Result<Vec<(Key, Scalar)>> {
            Ok(self.project_word_vec(x.word())?.into_iter().map(|(b, c)| (vec![Factor::B(b)], c)).collect())
        };
        t.map_slot(at, &[Slot::Carrier], &f)
    }

    /// `L = (π⊗id)Δ`.
    fn left_coaction(&self, a: &Element) -> Result<Tensor> {
        self.project_slot(&self.source().coproduct(a)?, 0)
    }

    /// `R = (id⊗π)Δ`.
    fn right_coaction(&self, a: &Element) -> Result<Tensor> {
        self.project_slot(&self.source().coproduct(a)?, 1)
    }
}

impl Projection for CoisotropicSubgroup {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn source(&self) -> &Arc<HopfStructure> {
        CoisotropicSubgroup::source(self)
    }
    fn carrier(&self) -> &Arc<Coalgebra> {
        CoisotropicSubgroup::carrier(self)
    }
    fn side(&self) -> Side {
        self.side
    }
    fn project_word_vec(&self, w: &Word) -> Result<CVec> {
        self.project_word(w).cloned()
    }
}

/// `π_KH∘π_GK` for a quantum subgroup `K` of `G` and a coisotropic
/// subgroup `H` of `K`.
pub struct Composite {
    pub outer: Arc<CoisotropicSubgroup>,
    pub inner: Arc<CoisotropicSubgroup>,
}

impl Composite {
    pub fn new(outer: Arc<CoisotropicSubgroup>, inner: Arc<CoisotropicSubgroup>) -> Result<Self> {
        let ok = outer.carrier().backing().is_some_and(|h| Arc::ptr_eq(h, inner.source()));
        if !ok {
            return Err(Error::CarrierMismatch(format!(
                "{} does not land in the source of {}",
                outer.name, inner.name
            )));
        }
        Ok(Composite { outer, inner })
    }
}

impl Projection for Composite {
    fn name(&self) -> String {
        format!("{}∘{}", self.inner.name, self.outer.name)
    }
    fn source(&self) -> &Arc<HopfStructure> {
        self.outer.source()
    }
    fn carrier(&self) -> &Arc<Coalgebra> {
        self.inner.carrier()
    }
    fn side(&self) -> Side {
        self.inner.side
    }
    fn project_word_vec(&self, w: &Word) -> Result<CVec> {
        let mut out = CVec::new();
        for (b, x) in self.outer.project_word(w)? {
            let Label::Word(u) = &self.outer.carrier().labels()[*b as usize] else {
                return Err(Error::CarrierMismatch(format!("{} has no word labels", self.outer.carrier().name)));
            };
            cvec_add(&mut out, self.inner.project_word(u)?, x);
        }
        Ok(out)
    }
}

/// The trivial subgroup: the counit onto the one-dimensional coalgebra.
pub struct CounitProjection {
    source: Arc<HopfStructure>,
    carrier: Arc<Coalgebra>,
}

impl CounitProjection {
    pub fn new(source: Arc<HopfStructure>) -> Self {
        let carrier = Arc::new(Coalgebra::grouplike("base field", vec![Label::Indexed("e".into(), 0)]));
        CounitProjection { source, carrier }
    }
}

impl Projection for CounitProjection {
    fn name(&self) -> String {
        "counit".into()
    }
    fn source(&self) -> &Arc<HopfStructure> {
        &self.source
    }
    fn carrier(&self) -> &Arc<Coalgebra> {
        &self.carrier
    }
    fn side(&self) -> Side {
        Side::Right
    }
    fn project_word_vec(&self, w: &Word) -> Result<CVec> {
        let e = self.source.counit_word(w);
        Ok(if e.is_zero() { CVec::new() } else { CVec::from([(0, e)]) })
    }
}

/// Coaction of one basis vector: `(word, coordinates)` per algebra word.
pub type CoactionRow = Vec<(Word, Vec<Scalar>)>;

/// `ind(ρ)` truncated at degree `d`: a subspace of `V⊗A_{≤d}` for a right
/// comodule, of `A_{≤d}⊗V` for a left one. Coordinates are `j·N + w` for
/// basis vector `j` and word index `w`.
#[derive(Clone, Debug)]
pub struct InducedSpace {
    pub side: Side,
    pub degree: u32,
    source: Arc<HopfStructure>,
    labels: Vec<String>,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    pub space: Subspace,
}

impl InducedSpace {
    pub fn slots(&self) -> [Slot; 2] {
        match self.side {
            Side::Right => [Slot::Space, Slot::Alg],
            Side::Left => [Slot::Alg, Slot::Space],
        }
    }

    fn alg_pos(&self) -> usize {
        if self.side == Side::Right {
            1
        } else {
            0
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn source(&self) -> &Arc<HopfStructure> {
        &self.source
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn space_labels(&self) -> &[String] {
        &self.labels
    }

    pub fn to_tensor(&self, v: &Vector) -> Tensor {
        let n = self.words.len();
        let mut t = Tensor::zero(&self.slots());
        for (k, c) in v {
            let (j, w) = (Factor::B((k / n) as u32), Factor::W(self.words[k % n].clone()));
            let key = if self.side == Side::Right { vec![j, w] } else { vec![w, j] };
            t.add_term(key, c.clone());
        }
        t
    }

    /// Coordinates of a tensor in `V⊗A_{≤d}`.
    pub fn to_vector(&self, t: &Tensor) -> Result<Vector> {
        let n = self.words.len();
        let a = self.alg_pos();
        let mut v = Vector::new();
        for (k, c) in t.terms() {
            let w = k[a].word();
            let col = self.index.get(w).ok_or(Error::DegreeOverflow { degree: w.degree(), bound: self.degree })?;
            v.insert(k[1 - a].index() as usize * n + col, c.clone());
        }
        Ok(v)
    }

    pub fn contains(&self, t: &Tensor) -> bool {
        self.to_vector(t).is_ok_and(|v| self.space.contains(&v))
    }

    /// Coordinates with respect to [`InducedSpace::basis`].
    pub fn coordinates(&self, t: &Tensor) -> Result<Vec<Scalar>> {
        let v = self.to_vector(t)?;
        self.space.coordinates(&v).ok_or_else(|| Error::NotInInducedSpace(self.fmt(t)))
    }

    pub fn basis(&self) -> Vec<Tensor> {
        self.space.basis().iter().map(|v| self.to_tensor(v)).collect()
    }

    /// The one-dimensional case with the `V` factor elided.
    pub fn elements(&self) -> Vec<Element> {
        self.basis()
            .iter()
            .map(|t| {
                let mut e = Element::zero();
                for (k, c) in t.terms() {
                    e.add_term(k[self.alg_pos()].word().clone(), c.clone());
                }
                e
            })
            .collect()
    }

    /// `(id⊗Δ)` on `V⊗A`, `(Δ⊗id)` on `A⊗V`.
    pub fn coaction(&self, t: &Tensor) -> Result<Tensor> {
        self.source.delta_at(t, self.alg_pos())
    }

    /// Split the coaction of `t` into `Σ_u G_u⊗u` (right) or `Σ_u u⊗G_u`
    /// (left), keyed by the word `u` of the new leg.
    pub fn coaction_components(&self, t: &Tensor) -> Result<BTreeMap<Word, Tensor>> {
        let full = self.coaction(t)?;
        let (leg, keep) = match self.side {
            Side::Right => (2, [0, 1]),
            Side::Left => (0, [1, 2]),
        };
        let mut out: BTreeMap<Word, Tensor> = BTreeMap::new();
        for (k, c) in full.terms() {
            let g = out.entry(k[leg].word().clone()).or_insert_with(|| Tensor::zero(&self.slots()));
            g.add_term(keep.iter().map(|&i| k[i].clone()).collect(), c.clone());
        }
        Ok(out)
    }

    /// Coaction on the basis: entry `k` lists `(u, coordinates of G_u)`.
    /// Fails with `NotInInducedSpace` if some component leaves the space.
    pub fn coaction_table(&self) -> Result<Vec<CoactionRow>> {
        self.basis()
            .iter()
            .map(|t| self.coaction_components(t)?.into_iter().map(|(u, g)| Ok((u, self.coordinates(&g)?))).collect())
            .collect()
    }

    /// The truncated space as a comodule over `carrier`, whose labels must
    /// be the words of the source (a right induced space over a Hopf carrier).
    pub fn to_comodule(&self, name: &str, carrier: Arc<Coalgebra>) -> Result<Comodule> {
        if self.side != Side::Right {
            return Err(Error::SideMismatch("only right induced spaces become comodules".into()));
        }
        let mut coaction = Vec::new();
        for row in self.coaction_table()? {
            let mut t = Tensor::zero(&[Slot::Space, Slot::Carrier]);
            for (u, coords) in row {
                let b = carrier.index_of(&Label::Word(u.clone())).ok_or_else(|| {
                    Error::CarrierMismatch(format!("{} is outside {}", self.source.alg.fmt_word(&u), carrier.name))
                })?;
                for (m, c) in coords.into_iter().enumerate() {
                    if !c.is_zero() {
                        t.add_term(vec![Factor::B(m as u32), Factor::B(b)], c);
                    }
                }
            }
            coaction.push(t);
        }
        let labels = (0..self.dim()).map(|k| format!("f[{k}]")).collect();
        Comodule::new(name, Side::Right, carrier, labels, coaction)
    }

    pub fn fmt(&self, t: &Tensor) -> String {
        let sp = |f: &Factor| self.labels[f.index() as usize].clone();
        let w = |f: &Factor| self.source.alg.fmt_word(f.word());
        match self.side {
            Side::Right => t.fmt_with(&[&sp, &w]),
            Side::Left => t.fmt_with(&[&w, &sp]),
        }
    }
}

fn space_vec(j: u32) -> Tensor {
    Tensor::pure(&[Slot::Space], vec![Factor::B(j)], Scalar::one())
}

fn word_vec(w: &Word) -> Tensor {
    Tensor::pure(&[Slot::Alg], vec![Factor::W(w.clone())], Scalar::one())
}

/// Solve `(id⊗L)F = (ρ⊗id)F` on `V⊗A_{≤d}` for a right comodule, or
/// `(R⊗id)F = (id⊗ρ)F` on `A_{≤d}⊗V` for a left one.
pub fn induced_space(sub: &dyn Projection, rho: &Comodule, d: u32) -> Result<InducedSpace> {
    if !Arc::ptr_eq(rho.carrier(), sub.carrier()) {
        return Err(Error::CarrierMismatch(format!("{} is not over {}", rho.name, sub.carrier().name)));
    }
    let h = sub.source().clone();
    let words = h.alg.basis_up_to(d);
    let index = words.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
    let mut cols: Vec<BTreeMap<Key, Scalar>> = Vec::new();
    let mut lr: HashMap<&Word, Tensor> = HashMap::new();
    for w in &words {
        let e = Element::word(w.clone());
        let t = match rho.side {
            Side::Right => sub.left_coaction(&e)?,
            Side::Left => sub.right_coaction(&e)?,
        };
        lr.insert(w, t);
    }
    for j in 0..rho.dim() as u32 {
        for w in &words {
            let col = match rho.side {
                Side::Right => space_vec(j).outer(&lr[w]).sub(&rho.coaction(j).outer(&word_vec(w))),
                // A⊗C⊗V
                Side::Left => lr[w].outer(&space_vec(j)).sub(&word_vec(w).outer(rho.coaction(j))),
            };
            cols.push(col.terms().map(|(k, c)| (k.clone(), c.clone())).collect());
        }
    }
    let (m, _) = IndexedMatrix::from_columns(&cols);
    let space = kernel(&m);
    Ok(InducedSpace { side: rho.side, degree: d, source: h, labels: rho.labels().to_vec(), words, index, space })
}

/// Induction from the character `1 ↦ 1⊗c_b`; use [`InducedSpace::elements`]
/// for the subspace of the algebra itself.
pub fn monomial_rep(sub: &dyn Projection, b: u32, d: u32) -> Result<InducedSpace> {
    let rho = Comodule::character(sub.carrier().clone(), b, Side::Right);
    induced_space(sub, &rho, d)
}
