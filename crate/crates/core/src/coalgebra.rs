//! Finite coalgebras with a labeled basis: quotient carriers of subgroups.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::algebra::Word;
use crate::error::{Error, Result};
use crate::expr::{self, Atom, Context, SymKind};
use crate::hopf::HopfStructure;
use crate::report::Report;
use crate::scalars::{format_combination, Scalar};
use crate::tensor::{Factor, Key, Slot, Tensor};

pub type CVec = BTreeMap<u32, Scalar>;

/// Basis label: an indexed symbol like `c[3]`, or a word of a backing Hopf algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Indexed(String, i64),
    Word(Word),
}

#[derive(Debug)]
pub struct Coalgebra {
    pub name: String,
    labels: Vec<Label>,
    lookup: HashMap<Label, u32>,
    delta: Vec<Tensor>,
    eps: Vec<Scalar>,
    backing: Option<Arc<HopfStructure>>,
}

pub fn cvec_add(acc: &mut CVec, other: &CVec, c: &Scalar) {
    for (k, x) in other {
        let v = acc.get(k).map(|y| y + &(x * c)).unwrap_or_else(|| x * c);
        if v.is_zero() {
            acc.remove(k);
        } else {
            acc.insert(*k, v);
        }
    }
}

/// Single-slot carrier tensor of a vector.
pub fn cvec_tensor(v: &CVec) -> Tensor {
    let mut t = Tensor::zero(&[Slot::Carrier]);
    for (b, c) in v {
        t.add_term(vec![Factor::B(*b)], c.clone());
    }
    t
}

impl Coalgebra {
    /// Coalgebra from explicit tables. `delta[k]` and `eps[k]` describe `labels[k]`.
    pub fn new(name: &str, labels: Vec<Label>, delta: Vec<Tensor>, eps: Vec<Scalar>) -> Result<Self> {
        let mut lookup = HashMap::new();
        for (k, l) in labels.iter().enumerate() {
            if lookup.insert(l.clone(), k as u32).is_some() {
                return Err(Error::Fixture(format!("duplicate carrier label {l:?}")));
            }
        }
        if delta.len() != labels.len() || eps.len() != labels.len() {
            return Err(Error::Fixture("carrier tables do not cover the basis".into()));
        }
        Ok(Coalgebra { name: name.into(), labels, lookup, delta, eps, backing: None })
    }

    /// Group-like family `sym[p]`, `p` in `[-window, window]`.
    pub fn grouplike_family(name: &str, sym: &str, window: i64) -> Self {
        let labels: Vec<Label> = (-window..=window).map(|p| Label::Indexed(sym.into(), p)).collect();
        Coalgebra::grouplike(name, labels)
    }

    pub fn grouplike(name: &str, labels: Vec<Label>) -> Self {
        let n = labels.len();
        let delta = (0..n as u32)
            .map(|k| Tensor::pure(&[Slot::Carrier, Slot::Carrier], vec![Factor::B(k), Factor::B(k)], Scalar::one()))
            .collect();
        Coalgebra::new(name, labels, delta, vec![Scalar::one(); n]).expect("labels are distinct")
    }

    /// The span of the normal words of `hopf` of degree at most `d`, which
    /// must be closed under the coproduct.
    pub fn from_hopf(name: &str, hopf: Arc<HopfStructure>, d: u32) -> Result<Self> {
        let words = hopf.alg.basis_up_to(d);
        let labels: Vec<Label> = words.iter().cloned().map(Label::Word).collect();
        let lookup: HashMap<Label, u32> = labels.iter().cloned().enumerate().map(|(k, l)| (l, k as u32)).collect();
        let mut delta = Vec::new();
        let mut eps = Vec::new();
        for w in &words {
            let t = hopf.coproduct_word(w)?;
            let f = |x: &Factor| -> Result<Vec<(Key, Scalar)>> {
                let l = Label::Word(x.word().clone());
                let k =
                    lookup.get(&l).ok_or_else(|| Error::Fixture(format!("coproduct leaves the degree-{d} span")))?;
                Ok(vec![(vec![Factor::B(*k)], Scalar::one())])
            };
            let t = t.map_slot(0, &[Slot::Carrier], &f)?.map_slot(1, &[Slot::Carrier], &f)?;
            delta.push(t);
            eps.push(hopf.counit_word(w));
        }
        Ok(Coalgebra { name: name.into(), labels, lookup, delta, eps, backing: Some(hopf) })
    }

    /// Print word labels through `hopf`.
    pub fn with_backing(mut self, hopf: Arc<HopfStructure>) -> Self {
        self.backing = Some(hopf);
        self
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn backing(&self) -> Option<&Arc<HopfStructure>> {
        self.backing.as_ref()
    }

    pub fn index_of(&self, l: &Label) -> Option<u32> {
        self.lookup.get(l).copied()
    }

    pub fn indexed(&self, sym: &str, p: i64) -> Result<u32> {
        self.index_of(&Label::Indexed(sym.into(), p))
            .ok_or_else(|| Error::CarrierMismatch(format!("{sym}[{p}] is outside the carrier window")))
    }

    pub fn label_name(&self, k: u32) -> String {
        match &self.labels[k as usize] {
            Label::Indexed(s, p) => format!("{s}[{p}]"),
            Label::Word(w) => self.backing.as_ref().expect("word labels have a backing").alg.fmt_word(w),
        }
    }

    pub fn delta(&self, k: u32) -> &Tensor {
        &self.delta[k as usize]
    }

    pub fn counit(&self, k: u32) -> &Scalar {
        &self.eps[k as usize]
    }

    pub fn counit_vec(&self, v: &CVec) -> Scalar {
        let mut acc = Scalar::zero();
        for (k, c) in v {
            acc = &acc + &(c * self.counit(*k));
        }
        acc
    }

    pub fn is_grouplike(&self, k: u32) -> bool {
        let expect = Tensor::pure(&[Slot::Carrier, Slot::Carrier], vec![Factor::B(k), Factor::B(k)], Scalar::one());
        self.delta[k as usize] == expect && self.eps[k as usize].is_one()
    }

    pub fn fmt_vec(&self, v: &CVec) -> String {
        format_combination(v.iter().map(|(k, c)| (self.label_name(*k), c)))
    }

    /// Apply the coproduct to carrier slot `at`.
    pub fn delta_at(&self, t: &Tensor, at: usize) -> Result<Tensor> {
        let f = |x: &Factor| -> Result<Vec<(Key, Scalar)>> {
            Ok(self.delta(x.index()).terms().map(|(k, c)| (k.clone(), c.clone())).collect())
        };
        t.map_slot(at, &[Slot::Carrier, Slot::Carrier], &f)
    }

    pub fn counit_at(&self, t: &Tensor, at: usize) -> Result<Tensor> {
        let f = |x: &Factor| -> Result<Vec<(Key, Scalar)>> { Ok(vec![(Vec::new(), self.counit(x.index()).clone())]) };
        t.map_slot(at, &[], &f)
    }

    /// Parse a carrier expression (rank one or two) in labels or, for a
    /// backed carrier, in the backing generators.
    pub fn parse(&self, src: &str, env: &HashMap<String, i64>) -> Result<Tensor> {
        let classify = |s: &str| self.classify(s);
        let cx = Context { classify: &classify, env: env.clone() };
        let raw = expr::parse(src)?.eval(&cx)?;
        let rank = raw.rank().unwrap_or(1);
        let mut out = Tensor::zero(&vec![Slot::Carrier; rank]);
        for (k, c) in &raw.terms {
            let mut acc = Tensor::pure(&[], Vec::new(), c.clone());
            for raw_word in k {
                acc = acc.outer(&self.raw_to_tensor(raw_word)?);
            }
            out.add_scaled(&acc, &Scalar::one());
        }
        Ok(out)
    }

    pub(crate) fn classify(&self, s: &str) -> SymKind {
        let is_label = self.labels.iter().any(|l| matches!(l, Label::Indexed(x, _) if x == s));
        if is_label {
            SymKind::Label
        } else if self.backing.as_ref().is_some_and(|h| h.alg.has_generator(s)) {
            SymKind::Generator
        } else {
            SymKind::Parameter
        }
    }

    pub(crate) fn raw_to_tensor(&self, raw: &[Atom]) -> Result<Tensor> {
        let mut t = Tensor::zero(&[Slot::Carrier]);
        if let [Atom::Label(s, p)] = raw {
            t.add_term(vec![Factor::B(self.indexed(s, *p)?)], Scalar::one());
            return Ok(t);
        }
        let h =
            self.backing.as_ref().ok_or_else(|| Error::Fixture("carrier expression must be a single label".into()))?;
        let e = h.alg.normal_form_word(&h.alg.raw_word(&raw.to_vec())?)?;
        for (w, c) in e.terms() {
            let k = self
                .index_of(&Label::Word(w.clone()))
                .ok_or_else(|| Error::CarrierMismatch(format!("{} is outside the carrier", h.alg.fmt_word(w))))?;
            t.add_term(vec![Factor::B(k)], c.clone());
        }
        Ok(t)
    }

    pub fn parse_vec(&self, src: &str, env: &HashMap<String, i64>) -> Result<CVec> {
        let t = self.parse(src, env)?;
        if t.rank() != 1 {
            return Err(Error::Fixture(format!("`{src}` is not a carrier element")));
        }
        Ok(t.terms().map(|(k, c)| (k[0].index(), c.clone())).collect())
    }

    /// Coassociativity and counit laws on every basis element whose
    /// coproduct stays inside the basis.
    pub fn verify(&self) -> Report {
        let mut rep = Report::new(format!("coalgebra {}", self.name));
        for k in 0..self.dim() as u32 {
            let single = Tensor::pure(&[Slot::Carrier], vec![Factor::B(k)], Scalar::one());
            let d = self.delta(k).clone();
            let (l, r) = match (self.delta_at(&d, 0), self.delta_at(&d, 1)) {
                (Ok(l), Ok(r)) => (l, r),
                _ => continue,
            };
            rep.check("coassociativity", l == r, || self.label_name(k));
            let e1 = self.counit_at(&d, 0).expect("counit is total");
            let e2 = self.counit_at(&d, 1).expect("counit is total");
            rep.check("counit", e1 == single && e2 == single, || self.label_name(k));
        }
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouplike_family_is_a_coalgebra() {
        let c = Coalgebra::grouplike_family("C", "c", 3);
        assert_eq!(c.dim(), 7);
        assert!(c.verify().is_ok());
        let v = c.parse_vec("c[1] - 2*c[-3]", &HashMap::new()).unwrap();
        assert_eq!(c.fmt_vec(&v), "-2*c[-3] + c[1]");
        assert!(c.parse_vec("c[4]", &HashMap::new()).is_err());
    }

    #[test]
    fn hopf_backed_carrier() {
        let h = Arc::new(crate::hopf::laurent());
        let c = Coalgebra::from_hopf("K", h, 2).unwrap();
        assert_eq!(c.dim(), 5);
        assert!(c.verify().is_ok());
        let v = c.parse_vec("v^2 + vi", &HashMap::new()).unwrap();
        assert_eq!(v.len(), 2);
        assert!((0..5).all(|k| c.is_grouplike(k)));
    }
}
