//! Hopf structure given by generator images, extended (anti)multiplicatively.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::algebra::{Element, Presentation, Word};
use crate::error::{Error, Result};
use crate::expr::{self, Context};
use crate::report::Report;
use crate::scalars::Scalar;
use crate::tensor::{Factor, Slot, Tensor};

/// Parse a tensor expression whose slots are all words of `p`.
pub fn parse_alg_tensor(p: &Presentation, src: &str, env: &HashMap<String, i64>) -> Result<Tensor> {
    let classify = |s: &str| p.classify(s);
    let cx = Context { classify: &classify, env: env.clone() };
    let raw = expr::parse(src)?.eval(&cx)?;
    let rank = raw.rank().unwrap_or(1);
    let slots = vec![Slot::Alg; rank];
    let mut out = Tensor::zero(&slots);
    for (k, c) in &raw.terms {
        let mut acc = Tensor::pure(&[], Vec::new(), c.clone());
        for w in k {
            let e = p.normal_form_word(&p.raw_word(w)?)?;
            acc = acc.outer(&Tensor::from_element(&e));
        }
        out.add_scaled(&acc, &Scalar::one());
    }
    for (_, c) in out.terms() {
        for v in c.variables() {
            if !p.params().contains(&*v) {
                return Err(Error::UnknownGenerator(v.to_string()));
            }
        }
    }
    Ok(out)
}

#[derive(Debug)]
pub struct HopfStructure {
    pub alg: Presentation,
    delta: Vec<Tensor>,
    eps: Vec<Scalar>,
    s: Vec<Element>,
    s_inv: Vec<Element>,
    delta_cache: RwLock<HashMap<Word, Tensor>>,
    s_cache: RwLock<HashMap<(bool, Word), Element>>,
}

type Images<'a> = &'a [(&'a str, &'a str)];

fn image_table<T>(
    p: &Presentation,
    what: &str,
    images: Images<'_>,
    parse: impl Fn(&str) -> Result<T>,
) -> Result<Vec<T>> {
    let mut out: Vec<Option<T>> = (0..p.generators().len()).map(|_| None).collect();
    for (g, src) in images {
        let id = p.gen_id(g)? as usize;
        out[id] = Some(parse(src)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(k, x)| {
            x.ok_or_else(|| Error::Fixture(format!("no {what} image for generator `{}`", p.generators()[k].name)))
        })
        .collect()
}

impl HopfStructure {
    pub fn new(
        alg: Presentation,
        coproduct: Images<'_>,
        counit: Images<'_>,
        antipode: Images<'_>,
        antipode_inv: Images<'_>,
    ) -> Result<HopfStructure> {
        let none = HashMap::new();
        let delta = image_table(&alg, "coproduct", coproduct, |s| {
            let t = parse_alg_tensor(&alg, s, &none)?;
            if t.rank() != 2 && !t.is_zero() {
                return Err(Error::Fixture(format!("coproduct `{s}` is not a rank-2 tensor")));
            }
            Ok(t)
        })?;
        let eps = image_table(&alg, "counit", counit, |s| {
            alg.parse(s)?
                .terms()
                .find(|(w, _)| !w.is_unit())
                .map_or(Ok(()), |_| Err(Error::Fixture(format!("counit `{s}` is not a scalar"))))?;
            Ok(alg.parse(s)?.coeff(&Word::unit()))
        })?;
        let s = image_table(&alg, "antipode", antipode, |s| alg.parse(s))?;
        let s_inv = image_table(&alg, "inverse antipode", antipode_inv, |s| alg.parse(s))?;
        Ok(HopfStructure {
            alg,
            delta,
            eps,
            s,
            s_inv,
            delta_cache: RwLock::new(HashMap::new()),
            s_cache: RwLock::new(HashMap::new()),
        })
    }

    /// Replace the coproduct image of one generator (used to build negative controls).
    pub fn with_coproduct(mut self, gen: &str, src: &str) -> Result<HopfStructure> {
        let id = self.alg.gen_id(gen)? as usize;
        self.delta[id] = parse_alg_tensor(&self.alg, src, &HashMap::new())?;
        self.delta_cache.write().unwrap().clear();
        Ok(self)
    }

    pub fn counit_word(&self, w: &Word) -> Scalar {
        let mut acc = Scalar::one();
        for g in w.letters() {
            acc = &acc * &self.eps[*g as usize];
        }
        acc
    }

    pub fn counit(&self, a: &Element) -> Scalar {
        let mut acc = Scalar::zero();
        for (w, c) in a.terms() {
            acc = &acc + &(c * &self.counit_word(w));
        }
        acc
    }

    /// Coproduct of a word as the product of its letters' images; the word
    /// need not be normal.
    pub fn coproduct_word(&self, w: &Word) -> Result<Tensor> {
        if let Some(t) = self.delta_cache.read().unwrap().get(w) {
            return Ok(t.clone());
        }
        let out = match w.letters().split_last() {
            None => Tensor::pure(
                &[Slot::Alg, Slot::Alg],
                vec![Factor::W(Word::unit()), Factor::W(Word::unit())],
                Scalar::one(),
            ),
            Some((last, init)) => {
                let head = self.coproduct_word(&self.alg.word_of(init))?;
                head.mul(&self.delta[*last as usize], &self.alg)?
            }
        };
        self.delta_cache.write().unwrap().insert(w.clone(), out.clone());
        Ok(out)
    }

    pub fn coproduct(&self, a: &Element) -> Result<Tensor> {
        let mut out = Tensor::zero(&[Slot::Alg, Slot::Alg]);
        for (w, c) in a.terms() {
            out.add_scaled(&self.coproduct_word(w)?, c);
        }
        Ok(out)
    }

    /// Apply the coproduct to algebra slot `at`.
    pub fn delta_at(&self, t: &Tensor, at: usize) -> Result<Tensor> {
        let f = |x: &Factor| -> Result<Vec<(Vec<Factor>, Scalar)>> {
            Ok(self.coproduct_word(x.word())?.terms().map(|(k, c)| (k.clone(), c.clone())).collect())
        };
        t.map_slot(at, &[Slot::Alg, Slot::Alg], &f)
    }

    /// Apply the counit to algebra slot `at`, removing it.
    pub fn counit_at(&self, t: &Tensor, at: usize) -> Result<Tensor> {
        let f =
            |x: &Factor| -> Result<Vec<(Vec<Factor>, Scalar)>> { Ok(vec![(Vec::new(), self.counit_word(x.word()))]) };
        t.map_slot(at, &[], &f)
    }

    /// Iterated coproduct into `n` legs, expanding the first leg each time.
    pub fn sweedler_expand(&self, a: &Element, n: usize) -> Result<Tensor> {
        if n < 2 {
            return Err(Error::Fixture("sweedler_expand needs rank at least 2".into()));
        }
        let mut t = self.coproduct(a)?;
        for _ in 2..n {
            t = self.delta_at(&t, 0)?;
        }
        Ok(t)
    }

    fn anti_word(&self, w: &Word, inverse: bool) -> Result<Element> {
        let key = (inverse, w.clone());
        if let Some(e) = self.s_cache.read().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let table = if inverse { &self.s_inv } else { &self.s };
        let out = match w.letters().split_first() {
            None => Element::one(),
            Some((first, rest)) => {
                let tail = self.anti_word(&self.alg.word_of(rest), inverse)?;
                self.alg.multiply(&tail, &table[*first as usize])?
            }
        };
        self.s_cache.write().unwrap().insert(key, out.clone());
        Ok(out)
    }

    pub fn antipode_word(&self, w: &Word) -> Result<Element> {
        self.anti_word(w, false)
    }

    pub fn antipode(&self, a: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (w, c) in a.terms() {
            out.add_scaled(&self.anti_word(w, false)?, c);
        }
        Ok(out)
    }

    pub fn antipode_inv(&self, a: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (w, c) in a.terms() {
            out.add_scaled(&self.anti_word(w, true)?, c);
        }
        Ok(out)
    }

    pub fn fmt_tensor(&self, t: &Tensor) -> String {
        let fw = |f: &Factor| self.alg.fmt_word(f.word());
        let fmts: Vec<&dyn Fn(&Factor) -> String> = (0..t.rank()).map(|_| &fw as _).collect();
        t.fmt_with(&fmts)
    }

    fn check_word(&self, rep: &mut Report, w: &Word) -> Result<()> {
        let a = Element::word(w.clone());
        let name = self.alg.fmt_word(w);
        let d = self.coproduct_word(w)?;
        let left = self.delta_at(&d, 0)?;
        let right = self.delta_at(&d, 1)?;
        rep.check("coassociativity", left == right, || format!("{name}: {}", self.fmt_tensor(&left.sub(&right))));
        let e1 = self.counit_at(&d, 0)?.to_element();
        let e2 = self.counit_at(&d, 1)?.to_element();
        rep.check("counit.left", e1 == a, || format!("{name}: (ε⊗id)Δ = {}", self.alg.fmt_element(&e1)));
        rep.check("counit.right", e2 == a, || format!("{name}: (id⊗ε)Δ = {}", self.alg.fmt_element(&e2)));
        let unit = Element::scalar(self.counit_word(w));
        let sl = d.map_alg_slot(0, &|x| self.antipode_word(x))?.contract(&self.alg, 0, 1)?.to_element();
        let sr = d.map_alg_slot(1, &|x| self.antipode_word(x))?.contract(&self.alg, 0, 1)?.to_element();
        rep.check("antipode.left", sl == unit, || format!("{name}: m(S⊗id)Δ = {}", self.alg.fmt_element(&sl)));
        rep.check("antipode.right", sr == unit, || format!("{name}: m(id⊗S)Δ = {}", self.alg.fmt_element(&sr)));
        let ss = self.antipode(&self.antipode_inv(&a)?)?;
        let ss2 = self.antipode_inv(&self.antipode(&a)?)?;
        rep.check("antipode.invertible", ss == a && ss2 == a, || {
            format!("{name}: S(S⁻¹) = {}, S⁻¹(S) = {}", self.alg.fmt_element(&ss), self.alg.fmt_element(&ss2))
        });
        Ok(())
    }

    fn check_rules(&self, rep: &mut Report) -> Result<()> {
        for rule in self.alg.rules() {
            let label = format!("{} = {}", self.alg.fmt_word(&rule.lhs), self.alg.fmt_element(&rule.rhs));
            let dl = self.coproduct_word(&rule.lhs)?;
            let dr = self.coproduct(&rule.rhs)?;
            rep.check("relations.coproduct", dl == dr, || {
                format!("{label}: Δ(lhs) - Δ(rhs) = {}", self.fmt_tensor(&dl.sub(&dr)))
            });
            let el = self.counit_word(&rule.lhs);
            let er = self.counit(&rule.rhs);
            rep.check("relations.counit", el == er, || format!("{label}: ε gives {el} vs {er}"));
            for (id, inverse) in [("relations.antipode", false), ("relations.antipode_inverse", true)] {
                let sl = self.anti_word(&rule.lhs, inverse)?;
                let mut sr = Element::zero();
                for (w, c) in rule.rhs.terms() {
                    sr.add_scaled(&self.anti_word(w, inverse)?, c);
                }
                rep.check(id, sl == sr, || format!("{label}: difference {}", self.alg.fmt_element(&sl.sub(&sr))));
            }
        }
        Ok(())
    }

    /// Hopf axioms on every normal word of degree at most `d`, plus
    /// compatibility of the structure maps with every rewrite rule.
    pub fn verify_hopf_axioms(&self, d: u32) -> Report {
        let mut rep = Report::new(format!("hopf axioms of {} up to degree {d}", self.alg.name));
        if let Err(e) = self.check_rules(&mut rep) {
            rep.fail("evaluation", e.to_string());
        }
        for w in self.alg.basis_up_to(d) {
            if let Err(e) = self.check_word(&mut rep, &w) {
                rep.fail("evaluation", format!("{}: {e}", self.alg.fmt_word(&w)));
            }
        }
        rep
    }
}

/// A Hopf algebra with a single group-like generator pair, handy in tests.
#[cfg(test)]
pub(crate) fn laurent() -> HopfStructure {
    use crate::algebra::GeneratorSpec;
    let p =
        Presentation::new("laurent", &[GeneratorSpec::new("v"), GeneratorSpec::inverse_of("vi", "v")], &[], &[], 12, 6)
            .unwrap();
    HopfStructure::new(
        p,
        &[("v", "v@v"), ("vi", "vi@vi")],
        &[("v", "1"), ("vi", "1")],
        &[("v", "vi"), ("vi", "v")],
        &[("v", "vi"), ("vi", "v")],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouplike_powers() {
        let h = laurent();
        let v3 = h.alg.parse("v^3").unwrap();
        let t = h.coproduct(&v3).unwrap();
        assert_eq!(h.fmt_tensor(&t), "v^3⊗v^3");
        assert_eq!(h.fmt_tensor(&h.sweedler_expand(&Element::one(), 3).unwrap()), "1⊗1⊗1");
        assert_eq!(h.antipode(&v3).unwrap(), h.alg.parse("v^-3").unwrap());
        assert!(h.verify_hopf_axioms(3).is_ok());
    }

    #[test]
    fn corrupted_coproduct_is_caught() {
        let h = laurent().with_coproduct("vi", "vi@v").unwrap();
        let rep = h.verify_hopf_axioms(2);
        assert!(!rep.is_ok());
        assert!(rep.failures().any(|c| c.id == "relations.coproduct"));
    }
}
