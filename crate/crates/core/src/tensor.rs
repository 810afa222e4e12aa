//! Tensors of algebra words and finite basis elements.

use std::collections::BTreeMap;

use crate::algebra::{Element, Presentation, Word};
use crate::error::{Error, Result};
use crate::scalars::{format_combination, Scalar};

/// What a tensor slot holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    /// Words of a presented algebra.
    Alg,
    /// Basis of a finite quotient coalgebra.
    Carrier,
    /// Basis of a comodule.
    Space,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    W(Word),
    B(u32),
}

impl Factor {
    pub fn word(&self) -> &Word {
        match self {
            Factor::W(w) => w,
            Factor::B(_) => panic!("expected an algebra word"),
        }
    }

    pub fn index(&self) -> u32 {
        match self {
            Factor::B(k) => *k,
            Factor::W(_) => panic!("expected a basis index"),
        }
    }
}

pub type Key = Vec<Factor>;

/// A linear map applied to one slot, returning the replacement factors.
pub type SlotMap<'a> = dyn Fn(&Factor) -> Result<Vec<(Key, Scalar)>> + 'a;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    slots: Vec<Slot>,
    terms: BTreeMap<Key, Scalar>,
}

impl Tensor {
    pub fn zero(slots: &[Slot]) -> Self {
        Tensor { slots: slots.to_vec(), terms: BTreeMap::new() }
    }

    pub fn pure(slots: &[Slot], key: Key, c: Scalar) -> Self {
        assert_eq!(slots.len(), key.len());
        let mut t = Tensor::zero(slots);
        t.add_term(key, c);
        t
    }

    pub fn from_element(e: &Element) -> Self {
        let mut t = Tensor::zero(&[Slot::Alg]);
        for (w, c) in e.terms() {
            t.add_term(vec![Factor::W(w.clone())], c.clone());
        }
        t
    }

    /// The algebra element held by a rank-one algebra tensor.
    pub fn to_element(&self) -> Element {
        assert_eq!(self.slots, [Slot::Alg]);
        let mut e = Element::zero();
        for (k, c) in &self.terms {
            e.add_term(k[0].word().clone(), c.clone());
        }
        e
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &Key) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, key: Key, c: Scalar) {
        debug_assert_eq!(key.len(), self.slots.len());
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(x) => {
                let s = &*x + &c;
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Tensor, c: &Scalar) {
        assert_eq!(self.slots, other.slots, "adding tensors over different slots");
        for (k, d) in &other.terms {
            self.add_term(k.clone(), d * c);
        }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_int(-1));
        out
    }

    pub fn scale(&self, c: &Scalar) -> Tensor {
        let mut out = Tensor::zero(&self.slots);
        out.add_scaled(self, c);
        out
    }

    /// Outer product `self ⊗ other`.
    pub fn outer(&self, other: &Tensor) -> Tensor {
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&other.slots);
        let mut out = Tensor::zero(&slots);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let mut k = k1.clone();
                k.extend(k2.iter().cloned());
                out.add_term(k, c1 * c2);
            }
        }
        out
    }

    /// Apply a linear map to slot `at`, which becomes the slots `new`.
    pub fn map_slot(&self, at: usize, new: &[Slot], f: &SlotMap<'_>) -> Result<Tensor> {
        let mut slots = self.slots[..at].to_vec();
        slots.extend_from_slice(new);
        slots.extend_from_slice(&self.slots[at + 1..]);
        let mut out = Tensor::zero(&slots);
        let mut memo: BTreeMap<&Factor, Vec<(Key, Scalar)>> = BTreeMap::new();
        for (k, c) in &self.terms {
            if !memo.contains_key(&k[at]) {
                memo.insert(&k[at], f(&k[at])?);
            }
            for (img, d) in &memo[&k[at]] {
                if img.len() != new.len() {
                    return Err(Error::CarrierMismatch(format!(
                        "slot map returned rank {} instead of {}",
                        img.len(),
                        new.len()
                    )));
                }
                let mut key = k[..at].to_vec();
                key.extend(img.iter().cloned());
                key.extend(k[at + 1..].iter().cloned());
                out.add_term(key, c * d);
            }
        }
        Ok(out)
    }

    /// Apply an element-valued map to an algebra slot.
    pub fn map_alg_slot(&self, at: usize, f: &dyn Fn(&Word) -> Result<Element>) -> Result<Tensor> {
        let g = |x: &Factor| -> Result<Vec<(Key, Scalar)>> {
            Ok(f(x.word())?.terms().map(|(w, c)| (vec![Factor::W(w.clone())], c.clone())).collect())
        };
        self.map_slot(at, &[Slot::Alg], &g)
    }

    /// Multiply slots `i` and `j` (`i < j`, both algebra slots) into slot `i`.
    pub fn contract(&self, p: &Presentation, i: usize, j: usize) -> Result<Tensor> {
        assert!(i < j);
        let mut slots = self.slots.clone();
        slots.remove(j);
        let mut out = Tensor::zero(&slots);
        for (k, c) in &self.terms {
            let prod = p.normal_form_word(&k[i].word().concat(k[j].word()))?;
            for (w, d) in prod.terms() {
                let mut key = k.clone();
                key.remove(j);
                key[i] = Factor::W(w.clone());
                out.add_term(key, c * d);
            }
        }
        Ok(out)
    }

    /// Reorder slots: slot `k` of the result is slot `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Tensor {
        let slots: Vec<Slot> = perm.iter().map(|&k| self.slots[k]).collect();
        let mut out = Tensor::zero(&slots);
        for (k, c) in &self.terms {
            out.add_term(perm.iter().map(|&j| k[j].clone()).collect(), c.clone());
        }
        out
    }

    /// Slotwise product in the tensor power of an algebra (no braiding).
    pub fn mul(&self, other: &Tensor, p: &Presentation) -> Result<Tensor> {
        assert_eq!(self.slots, other.slots);
        let mut out = Tensor::zero(&self.slots);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let mut acc = Tensor::pure(&[], Vec::new(), c1 * c2);
                for (s, (a, b)) in k1.iter().zip(k2).enumerate() {
                    let e = match (a, b) {
                        (Factor::W(x), Factor::W(y)) => p.normal_form_word(&x.concat(y))?,
                        _ => return Err(Error::CarrierMismatch(format!("slot {s} is not an algebra slot"))),
                    };
                    acc = acc.outer(&Tensor::from_element(&e));
                }
                out.add_scaled(&acc, &Scalar::one());
            }
        }
        Ok(out)
    }

    pub fn map_coeffs(&self, f: &dyn Fn(&Scalar) -> Result<Scalar>) -> Result<Tensor> {
        let mut out = Tensor::zero(&self.slots);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Print with one formatter per slot.
    pub fn fmt_with(&self, fmts: &[&dyn Fn(&Factor) -> String]) -> String {
        let items: Vec<(String, &Scalar)> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let body: Vec<String> = k.iter().zip(fmts).map(|(f, fmt)| fmt(f)).collect();
                (body.join("⊗"), c)
            })
            .collect();
        format_combination(items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GeneratorSpec;

    #[test]
    fn slotwise_product_has_no_braiding() {
        let p = Presentation::new("free", &[GeneratorSpec::new("x"), GeneratorSpec::new("y")], &[], &[], 6, 6).unwrap();
        let x = Tensor::from_element(&p.parse("x").unwrap());
        let y = Tensor::from_element(&p.parse("y").unwrap());
        let xy = x.outer(&y);
        let yx = y.outer(&x);
        let prod = xy.mul(&yx, &p).unwrap();
        let fw = |f: &Factor| p.fmt_word(f.word());
        assert_eq!(prod.fmt_with(&[&fw, &fw]), "x*y⊗y*x");
        assert_eq!(xy.permute(&[1, 0]), yx);
    }
}
