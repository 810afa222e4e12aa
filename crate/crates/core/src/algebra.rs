//! Finitely presented algebras: words, rewrite rules, normal forms.
//!
//! Words are ordered degree-lexicographically, with generator ids assigned
//! in declared precedence order. Normal forms use the leftmost redex and the
//! first matching rule in declaration order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::expr::{self, Atom, Context, RawTensor, RawWord, SymKind};
use crate::scalars::{format_combination, Scalar};

pub type GenId = u16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    pub inverse: Option<GenId>,
    /// True for the second member of an inverse pair (printed as a negative power).
    pub is_inverse: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word {
    deg: u32,
    letters: Vec<GenId>,
}

impl Word {
    pub fn unit() -> Self {
        Word::default()
    }

    pub fn letters(&self) -> &[GenId] {
        &self.letters
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn is_unit(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { deg: self.deg + other.deg, letters }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Finite linear combination of normal words.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Element {
    terms: BTreeMap<Word, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn one() -> Self {
        Element::word(Word::unit())
    }

    pub fn word(w: Word) -> Self {
        Element::term(w, Scalar::one())
    }

    pub fn term(w: Word, c: Scalar) -> Self {
        let mut e = Element::zero();
        e.add_term(w, c);
        e
    }

    pub fn scalar(c: Scalar) -> Self {
        Element::term(Word::unit(), c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                let s = &*x + &c;
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Element, c: &Scalar) {
        for (w, d) in &other.terms {
            self.add_term(w.clone(), d * c);
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_int(-1));
        out
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        let mut out = Element::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<Element> {
        let mut out = Element::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c)?);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Element,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPair {
    pub word: String,
    pub left: String,
    pub right: String,
}

#[derive(Debug)]
pub struct Presentation {
    pub name: String,
    generators: Vec<Generator>,
    by_name: HashMap<String, GenId>,
    params: BTreeSet<String>,
    rules: Vec<Rule>,
    pub dmax: u32,
    pub window: u32,
    cache: RwLock<HashMap<Word, Element>>,
}

impl Clone for Presentation {
    fn clone(&self) -> Self {
        Presentation {
            name: self.name.clone(),
            generators: self.generators.clone(),
            by_name: self.by_name.clone(),
            params: self.params.clone(),
            rules: self.rules.clone(),
            dmax: self.dmax,
            window: self.window,
            cache: RwLock::new(HashMap::new()),
        }
    }
}

/// Generator declaration: name, degree and optional inverse partner name.
#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: u32,
    pub inverse_of: Option<String>,
}

impl GeneratorSpec {
    pub fn new(name: &str) -> Self {
        GeneratorSpec { name: name.into(), degree: 1, inverse_of: None }
    }

    pub fn inverse_of(name: &str, base: &str) -> Self {
        GeneratorSpec { name: name.into(), degree: 1, inverse_of: Some(base.into()) }
    }
}

impl Presentation {
    /// Generators must be listed in precedence order (smallest first).
    /// Relations are `(lhs, rhs)` expression pairs.
    pub fn new(
        name: &str,
        gens: &[GeneratorSpec],
        params: &[&str],
        relations: &[(&str, &str)],
        dmax: u32,
        window: u32,
    ) -> Result<Presentation> {
        let mut generators = Vec::new();
        let mut by_name = HashMap::new();
        for (k, g) in gens.iter().enumerate() {
            if by_name.insert(g.name.clone(), k as GenId).is_some() {
                return Err(Error::Fixture(format!("duplicate generator `{}`", g.name)));
            }
            if g.degree == 0 {
                return Err(Error::Fixture(format!("generator `{}` has degree 0", g.name)));
            }
            generators.push(Generator { name: g.name.clone(), degree: g.degree, inverse: None, is_inverse: false });
        }
        let mut pairs = Vec::new();
        for (k, g) in gens.iter().enumerate() {
            if let Some(base) = &g.inverse_of {
                let b = *by_name.get(base).ok_or_else(|| Error::UnknownGenerator(base.clone()))?;
                generators[k].inverse = Some(b);
                generators[k].is_inverse = true;
                generators[b as usize].inverse = Some(k as GenId);
                pairs.push((b, k as GenId));
            }
        }
        let mut p = Presentation {
            name: name.into(),
            generators,
            by_name,
            params: params.iter().map(|s| s.to_string()).collect(),
            rules: Vec::new(),
            dmax,
            window,
            cache: RwLock::new(HashMap::new()),
        };
        for (b, k) in pairs {
            p.rules.push(Rule { lhs: p.word_of(&[b, k]), rhs: Element::one() });
            p.rules.push(Rule { lhs: p.word_of(&[k, b]), rhs: Element::one() });
        }
        for (lhs, rhs) in relations {
            let l = p.parse_raw(lhs)?;
            let lw = match l.terms.iter().next() {
                Some((k, c)) if l.terms.len() == 1 && c.is_one() && k.len() == 1 => p.raw_word(&k[0])?,
                _ => return Err(Error::Fixture(format!("relation lhs `{lhs}` must be a single word"))),
            };
            let r = p.parse_raw(rhs)?;
            let mut re = Element::zero();
            for (k, c) in &r.terms {
                if k.len() != 1 {
                    return Err(Error::Fixture(format!("relation rhs `{rhs}` is a tensor")));
                }
                let w = p.raw_word(&k[0])?;
                if w >= lw {
                    return Err(Error::Fixture(format!(
                        "relation `{lhs} = {rhs}` is not decreasing: {} >= {}",
                        p.fmt_word(&w),
                        p.fmt_word(&lw)
                    )));
                }
                re.add_term(w, c.clone());
            }
            p.rules.push(Rule { lhs: lw, rhs: re });
        }
        // Right-hand sides are stored in normal form.
        for k in 0..p.rules.len() {
            let rhs = p.rules[k].rhs.clone();
            let nf = p.normalize(&rhs)?;
            p.rules[k].rhs = nf;
        }
        p.cache.write().unwrap().clear();
        Ok(p)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn params(&self) -> &BTreeSet<String> {
        &self.params
    }

    pub fn gen_id(&self, name: &str) -> Result<GenId> {
        self.by_name.get(name).copied().ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn has_generator(&self, name: &str) -> bool {
        self.by_name.contains_key(name)
    }

    pub fn word_of(&self, letters: &[GenId]) -> Word {
        let deg = letters.iter().map(|g| self.generators[*g as usize].degree).sum();
        Word { deg, letters: letters.to_vec() }
    }

    pub fn gen_word(&self, name: &str) -> Result<Word> {
        Ok(self.word_of(&[self.gen_id(name)?]))
    }

    /// `g^e`, using the inverse partner for negative exponents.
    pub fn power(&self, g: GenId, e: i64) -> Result<Word> {
        let letter = if e >= 0 {
            g
        } else {
            self.generators[g as usize].inverse.ok_or_else(|| {
                Error::Fixture(format!("generator `{}` has no inverse", self.generators[g as usize].name))
            })?
        };
        Ok(self.word_of(&vec![letter; e.unsigned_abs() as usize]))
    }

    pub fn classify(&self, name: &str) -> SymKind {
        if self.by_name.contains_key(name) {
            SymKind::Generator
        } else {
            SymKind::Parameter
        }
    }

    fn check_params(&self, t: &RawTensor) -> Result<()> {
        for c in t.terms.values() {
            for v in c.variables() {
                if !self.params.contains(&*v) {
                    return Err(Error::UnknownGenerator(v.to_string()));
                }
            }
        }
        Ok(())
    }

    fn parse_raw(&self, src: &str) -> Result<RawTensor> {
        let classify = |s: &str| self.classify(s);
        let cx = Context { classify: &classify, env: HashMap::new() };
        let t = expr::parse(src)?.eval(&cx)?;
        self.check_params(&t)?;
        Ok(t)
    }

    /// Convert a raw word to a (not necessarily normal) word.
    pub fn raw_word(&self, raw: &RawWord) -> Result<Word> {
        let mut letters = Vec::new();
        for a in raw {
            match a {
                Atom::Gen(name, e) => {
                    let w = self.power(self.gen_id(name)?, *e)?;
                    letters.extend(w.letters);
                }
                Atom::Label(name, _) => return Err(Error::UnknownGenerator(name.clone())),
            }
        }
        Ok(self.word_of(&letters))
    }

    /// Parse and normalize an element expression.
    pub fn parse(&self, src: &str) -> Result<Element> {
        self.parse_with(src, &HashMap::new())
    }

    pub fn parse_with(&self, src: &str, env: &HashMap<String, i64>) -> Result<Element> {
        let classify = |s: &str| self.classify(s);
        let cx = Context { classify: &classify, env: env.clone() };
        let t = expr::parse(src)?.eval(&cx)?;
        self.check_params(&t)?;
        self.from_raw(&t)
    }

    /// Like [`Presentation::parse`] but accepts parameters the presentation
    /// does not declare.
    pub fn parse_fresh(&self, src: &str) -> Result<Element> {
        let classify = |s: &str| self.classify(s);
        let cx = Context { classify: &classify, env: HashMap::new() };
        self.from_raw(&expr::parse(src)?.eval(&cx)?)
    }

    pub fn from_raw(&self, t: &RawTensor) -> Result<Element> {
        let mut out = Element::zero();
        for (k, c) in &t.terms {
            if k.len() != 1 {
                return Err(Error::parse(0, "expected an algebra element, found a tensor"));
            }
            let w = self.raw_word(&k[0])?;
            out.add_scaled(&self.normal_form_word(&w)?, c);
        }
        Ok(out)
    }

    fn find_redex(&self, letters: &[GenId]) -> Option<(usize, usize)> {
        for i in 0..letters.len() {
            for (r, rule) in self.rules.iter().enumerate() {
                let l = &rule.lhs.letters;
                if letters.len() - i >= l.len() && &letters[i..i + l.len()] == l.as_slice() {
                    return Some((i, r));
                }
            }
        }
        None
    }

    pub fn is_normal(&self, w: &Word) -> bool {
        self.find_redex(&w.letters).is_none()
    }

    fn check_degree(&self, w: &Word) -> Result<()> {
        if w.deg > self.dmax {
            return Err(Error::DegreeOverflow { degree: w.deg, bound: self.dmax });
        }
        Ok(())
    }

    fn rewrite_at(&self, w: &Word, i: usize, r: usize) -> Element {
        let rule = &self.rules[r];
        let prefix = self.word_of(&w.letters[..i]);
        let suffix = self.word_of(&w.letters[i + rule.lhs.letters.len()..]);
        let mut out = Element::zero();
        for (m, c) in &rule.rhs.terms {
            out.add_term(prefix.concat(m).concat(&suffix), c.clone());
        }
        out
    }

    pub fn normal_form_word(&self, w: &Word) -> Result<Element> {
        self.check_degree(w)?;
        if let Some(e) = self.cache.read().unwrap().get(w) {
            return Ok(e.clone());
        }
        let out = match self.find_redex(&w.letters) {
            None => Element::word(w.clone()),
            Some((i, r)) => self.normalize(&self.rewrite_at(w, i, r))?,
        };
        self.cache.write().unwrap().insert(w.clone(), out.clone());
        Ok(out)
    }

    /// Normal form of a combination of arbitrary words.
    pub fn normalize(&self, x: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (w, c) in &x.terms {
            out.add_scaled(&self.normal_form_word(w)?, c);
        }
        Ok(out)
    }

    /// Exhaustive rewriting with a caller-chosen redex at each step.
    /// `pick(n)` selects one of the `n` available redexes.
    pub fn reduce_with(&self, x: &Element, pick: &mut dyn FnMut(usize) -> usize) -> Result<Element> {
        let mut current = x.clone();
        loop {
            let mut todo = None;
            for (w, _) in current.terms() {
                let mut redexes = Vec::new();
                for i in 0..w.letters.len() {
                    for (r, rule) in self.rules.iter().enumerate() {
                        let l = &rule.lhs.letters;
                        if w.letters.len() - i >= l.len() && &w.letters[i..i + l.len()] == l.as_slice() {
                            redexes.push((i, r));
                        }
                    }
                }
                if !redexes.is_empty() {
                    let (i, r) = redexes[pick(redexes.len()) % redexes.len()];
                    todo = Some((w.clone(), i, r));
                    break;
                }
            }
            let Some((w, i, r)) = todo else { return Ok(current) };
            self.check_degree(&w)?;
            let c = current.terms.remove(&w).unwrap();
            current.add_scaled(&self.rewrite_at(&w, i, r), &c);
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (w1, c1) in &a.terms {
            for (w2, c2) in &b.terms {
                out.add_scaled(&self.normal_form_word(&w1.concat(w2))?, &(c1 * c2));
            }
        }
        Ok(out)
    }

    pub fn multiply_all(&self, factors: &[&Element]) -> Result<Element> {
        let mut acc = Element::one();
        for f in factors {
            acc = self.multiply(&acc, f)?;
        }
        Ok(acc)
    }

    fn within_window(&self, letters: &[GenId]) -> bool {
        let mut counts: HashMap<GenId, u32> = HashMap::new();
        for g in letters {
            if self.generators[*g as usize].inverse.is_some() {
                let c = counts.entry(*g).or_default();
                *c += 1;
                if *c > self.window {
                    return false;
                }
            }
        }
        true
    }

    /// Normal words of degree at most `d`, in word order.
    pub fn basis_up_to(&self, d: u32) -> Vec<Word> {
        let mut out = vec![Word::unit()];
        let mut frontier = vec![Word::unit()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for w in &frontier {
                for (g, gen) in self.generators.iter().enumerate() {
                    if w.deg + gen.degree > d {
                        continue;
                    }
                    let mut letters = w.letters.clone();
                    letters.push(g as GenId);
                    let ends_in_redex = self.rules.iter().any(|r| letters.ends_with(&r.lhs.letters));
                    if !ends_in_redex && self.within_window(&letters) {
                        next.push(self.word_of(&letters));
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out.sort();
        out
    }

    /// Overlap and inclusion ambiguities of degree at most `d` whose two
    /// one-step reducts have different normal forms.
    pub fn check_confluence(&self, d: u32) -> Vec<CriticalPair> {
        let mut bad = Vec::new();
        let mut seen = BTreeSet::new();
        for (i, r1) in self.rules.iter().enumerate() {
            for (j, r2) in self.rules.iter().enumerate() {
                let (a, b) = (&r1.lhs.letters, &r2.lhs.letters);
                let mut ambiguities = Vec::new();
                for k in 1..a.len().min(b.len() + 1) {
                    if a[a.len() - k..] == b[..k] && k < b.len() {
                        let mut w = a.clone();
                        w.extend_from_slice(&b[k..]);
                        ambiguities.push((w, 0, a.len() - k));
                    }
                }
                if i != j && b.len() <= a.len() {
                    for s in 0..=a.len() - b.len() {
                        if a[s..s + b.len()] == b[..] {
                            ambiguities.push((a.clone(), 0, s));
                        }
                    }
                }
                for (letters, p1, p2) in ambiguities {
                    let w = self.word_of(&letters);
                    if w.deg > d || !seen.insert((letters.clone(), i, j, p2)) {
                        continue;
                    }
                    let left = self.normalize(&self.rewrite_at(&w, p1, i));
                    let right = self.normalize(&self.rewrite_at(&w, p2, j));
                    let same = matches!((&left, &right), (Ok(l), Ok(r)) if l == r);
                    if !same {
                        let show = |x: &Result<Element>| match x {
                            Ok(e) => self.fmt_element(e),
                            Err(err) => err.to_string(),
                        };
                        bad.push(CriticalPair { word: self.fmt_word(&w), left: show(&left), right: show(&right) });
                    }
                }
            }
        }
        bad
    }

    /// Word printed in the shared grammar, with runs compressed to powers.
    pub fn fmt_word(&self, w: &Word) -> String {
        if w.is_unit() {
            return "1".into();
        }
        let mut parts = Vec::new();
        let mut k = 0;
        while k < w.letters.len() {
            let g = w.letters[k];
            let mut run = 1;
            while k + run < w.letters.len() && w.letters[k + run] == g {
                run += 1;
            }
            let gen = &self.generators[g as usize];
            let part = match (gen.is_inverse, gen.inverse) {
                (true, Some(base)) => format!("{}^-{run}", self.generators[base as usize].name),
                _ if run == 1 => gen.name.clone(),
                _ => format!("{}^{run}", gen.name),
            };
            parts.push(part);
            k += run;
        }
        parts.join("*")
    }

    pub fn fmt_element(&self, e: &Element) -> String {
        let mut sorted: Vec<(&Word, &Scalar)> = e.terms.iter().collect();
        sorted.sort_by(|a, b| b.0.deg.cmp(&a.0.deg).then_with(|| a.0.letters.cmp(&b.0.letters)));
        let items: Vec<(String, &Scalar)> =
            sorted.into_iter().map(|(w, c)| (if w.is_unit() { String::new() } else { self.fmt_word(w) }, c)).collect();
        format_combination(items)
    }
}

/// Element paired with its presentation for printing.
pub struct Show<'a>(pub &'a Presentation, pub &'a Element);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.fmt_element(self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kappa_plane() -> Presentation {
        Presentation::new(
            "kappa_plane",
            &[GeneratorSpec::new("a1"), GeneratorSpec::new("a2")],
            &["kappa"],
            &[("a2*a1", "a1*a2 - kappa*a1 + kappa*a2")],
            6,
            6,
        )
        .unwrap()
    }

    #[test]
    fn kappa_plane_reorders() {
        let p = kappa_plane();
        let x = p.parse("a2*a1").unwrap();
        assert_eq!(x, p.parse("a1*a2 - kappa*a1 + kappa*a2").unwrap());
        assert_eq!(p.fmt_element(&x), "a1*a2 - kappa*a1 + kappa*a2");
    }

    #[test]
    fn kappa_plane_basis() {
        let p = kappa_plane();
        let b: Vec<String> = p.basis_up_to(2).iter().map(|w| p.fmt_word(w)).collect();
        assert_eq!(b, ["1", "a1", "a2", "a1^2", "a1*a2", "a2^2"]);
        assert!(p.check_confluence(6).is_empty());
    }

    #[test]
    fn inverse_pairs_cancel() {
        let p = Presentation::new(
            "laurent",
            &[GeneratorSpec::new("v"), GeneratorSpec::inverse_of("vi", "v")],
            &[],
            &[],
            6,
            2,
        )
        .unwrap();
        assert_eq!(p.parse("v^3*v^-1").unwrap(), p.parse("v^2").unwrap());
        assert_eq!(p.fmt_element(&p.parse("v^-2").unwrap()), "v^-2");
        assert_eq!(p.basis_up_to(3).len(), 5);
    }

    #[test]
    fn overflow_is_reported() {
        let p = kappa_plane();
        let a = p.parse("a1^3").unwrap();
        assert!(matches!(
            p.multiply(&a, &a.clone()).and_then(|x| p.multiply(&x, &a)),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    fn two_rules(rules: &[(&str, &str)]) -> Presentation {
        Presentation::new("demo", &[GeneratorSpec::new("a"), GeneratorSpec::new("b")], &[], rules, 6, 6).unwrap()
    }

    #[test]
    fn broken_rules_are_not_confluent() {
        let p = two_rules(&[("a*b", "b"), ("b*a", "a")]);
        let bad = p.check_confluence(3);
        assert!(bad.iter().any(|c| c.word == "a*b*a"), "{bad:?}");
    }

    #[test]
    fn commuting_inverse_rules_are_confluent() {
        // ab = ba = 1 presents the free group on one generator.
        let p = two_rules(&[("b*a", "a*b"), ("a*b", "1")]);
        assert!(p.check_confluence(3).is_empty());
    }
}
