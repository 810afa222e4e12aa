//! Fixture files: presentations, Hopf data, subgroups, sections and
//! comodules in a small sectioned text format, validated on load.
//!
//! ```text
//! [presentation]            # or [presentation K] for a second one
//! name = e_q_2
//! generators = v, vi = v^-1, n, nb
//! order = v < vi < n < nb
//! parameters = q
//! [relations]               # lhs = rhs, lhs a single word
//! [coproduct] [counit] [antipode] [antipode_inverse]
//! [subgroup NAME]           # side, quantum, degree, source, carrier
//! [quotient_basis NAME] [quotient_coproduct NAME] [quotient_counit NAME]
//! [projection NAME]         # word = carrier expression
//! [section NAME] [section_inverse NAME]
//! [comodule SUBGROUP NAME]  # e[k] = coaction
//! [gates]                   # degree, confluence
//! ```
//!
//! A line mentioning `$p` is repeated for `p` in `[-window, window]`;
//! `$x = 3` inside a section sets a default for `$x` instead.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::algebra::{Element, GeneratorSpec, Presentation};
use crate::bundle::{verify_section, Section};
use crate::coalgebra::{CVec, Coalgebra, Label};
use crate::comodule::{verify_comodule, Comodule};
use crate::error::{Error, Result};
use crate::hopf::HopfStructure;
use crate::report::Report;
use crate::scalars::Scalar;
use crate::subgroup::{CoisotropicSubgroup, Side, SubgroupData};
use crate::tensor::{Slot, Tensor};

#[derive(Clone, Debug)]
struct Line {
    no: usize,
    key: String,
    value: Option<String>,
}

#[derive(Clone, Debug)]
struct RawSection {
    kind: String,
    names: Vec<String>,
    lines: Vec<Line>,
}

impl RawSection {
    fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|l| l.key == key).and_then(|l| l.value.as_deref())
    }

    fn get_u32(&self, key: &str) -> Result<Option<u32>> {
        self.get(key)
            .map(|v| {
                v.trim().parse().map_err(|_| Error::Fixture(format!("[{}] {key}: expected an integer", self.kind)))
            })
            .transpose()
    }
}

fn parse_sections(src: &str) -> Result<Vec<RawSection>> {
    let mut out: Vec<RawSection> = Vec::new();
    for (k, raw) in src.lines().enumerate() {
        let no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(head) = line.strip_prefix('[') {
            let head = head.strip_suffix(']').ok_or_else(|| Error::parse(no, "unterminated section header"))?;
            let mut parts = head.split_whitespace().map(str::to_string);
            let kind = parts.next().ok_or_else(|| Error::parse(no, "empty section header"))?;
            out.push(RawSection { kind, names: parts.collect(), lines: Vec::new() });
            continue;
        }
        let sec = out.last_mut().ok_or_else(|| Error::parse(no, "line outside any section"))?;
        let (key, value) = match line.split_once('=') {
            Some((a, b)) => (a.trim().to_string(), Some(b.trim().to_string())),
            None => (line.to_string(), None),
        };
        sec.lines.push(Line { no, key, value });
    }
    Ok(out)
}

fn template_vars(s: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut chars = s.char_indices().peekable();
    while let Some((_, c)) = chars.next() {
        if c == '$' {
            let mut name = String::new();
            while let Some((_, d)) = chars.peek() {
                if d.is_alphanumeric() || *d == '_' {
                    name.push(*d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.insert(name);
        }
    }
    out
}

/// Template lines of a section: defaults (`$x = 3`) and the expanded
/// `(env, key, value)` triples, with free variables over `[-window, window]`.
#[derive(Clone, Debug, Default)]
pub struct Template {
    defaults: HashMap<String, i64>,
    lines: Vec<(usize, String, Option<String>)>,
}

impl Template {
    fn from_section(sec: &RawSection) -> Result<Template> {
        let mut t = Template::default();
        for l in &sec.lines {
            if let Some(var) = l.key.strip_prefix('$') {
                let v = l.value.as_deref().unwrap_or("");
                let n: i64 = v.parse().map_err(|_| Error::parse(l.no, format!("bad default for ${var}")))?;
                t.defaults.insert(var.to_string(), n);
            } else {
                t.lines.push((l.no, l.key.clone(), l.value.clone()));
            }
        }
        Ok(t)
    }

    pub fn defaults(&self) -> &HashMap<String, i64> {
        &self.defaults
    }

    pub fn expand(
        &self,
        window: i64,
        fixed: &HashMap<String, i64>,
    ) -> Vec<(HashMap<String, i64>, String, Option<String>)> {
        let mut out = Vec::new();
        for (_, key, value) in &self.lines {
            let mut vars = template_vars(key);
            if let Some(v) = value {
                vars.extend(template_vars(v));
            }
            let mut env = self.defaults.clone();
            env.extend(fixed.iter().map(|(k, v)| (k.clone(), *v)));
            let free: Vec<String> = vars.into_iter().filter(|v| !env.contains_key(v)).collect();
            let mut envs = vec![env];
            for var in &free {
                envs = envs
                    .into_iter()
                    .flat_map(|e| {
                        (-window..=window).map(move |p| {
                            let mut e = e.clone();
                            e.insert(var.clone(), p);
                            e
                        })
                    })
                    .collect();
            }
            for e in envs {
                out.push((e, key.clone(), value.clone()));
            }
        }
        out
    }
}

type Finder<'a> = dyn Fn(&str, &[&str]) -> Option<&'a RawSection> + 'a;

#[derive(Clone, Debug, Default)]
pub struct LoadOptions {
    /// Check degree for gates; the fixture's own value otherwise.
    pub degree: Option<u32>,
    /// Template window; the presentation's own value otherwise.
    pub window: Option<u32>,
    /// Build without running gates (the report is still attached).
    pub skip_gates: bool,
}

#[derive(Debug)]
pub struct Fixture {
    pub name: String,
    main: String,
    algebras: BTreeMap<String, Arc<Presentation>>,
    hopf: BTreeMap<String, Arc<HopfStructure>>,
    subgroups: BTreeMap<String, Arc<CoisotropicSubgroup>>,
    sections: BTreeMap<String, (Template, Option<Template>)>,
    comodules: BTreeMap<String, (String, Template)>,
    pub window: i64,
    pub gate_degree: u32,
    pub confluence_degree: u32,
    pub gates: Report,
}

const SHIPPED: &[(&str, &str)] = &[
    ("e_kappa_2", include_str!("../fixtures/e_kappa_2.fixture")),
    ("e_q_2", include_str!("../fixtures/e_q_2.fixture")),
    ("kappa_plane", include_str!("../fixtures/kappa_plane.fixture")),
    ("hyperboloid", include_str!("../fixtures/hyperboloid.fixture")),
    ("broken_confluence_demo", include_str!("../fixtures/broken_confluence_demo.fixture")),
];

pub fn shipped_fixtures() -> Vec<&'static str> {
    SHIPPED.iter().map(|(n, _)| *n).collect()
}

/// Load a shipped fixture by name, or a file by path. Shipped fixtures
/// are validated once per process and shared.
pub fn load_fixture(name: &str) -> Result<Arc<Fixture>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<Fixture>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().unwrap().get(name) {
        return Ok(f.clone());
    }
    let f = Arc::new(load_fixture_with(name, &LoadOptions::default())?);
    cache.lock().unwrap().insert(name.to_string(), f.clone());
    Ok(f)
}

pub fn load_fixture_with(name: &str, opts: &LoadOptions) -> Result<Fixture> {
    if let Some((n, src)) = SHIPPED.iter().find(|(n, _)| *n == name) {
        return Fixture::from_str_with(n, src, opts);
    }
    let path = std::path::Path::new(name);
    if path.exists() {
        let src = std::fs::read_to_string(path)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(name);
        return Fixture::from_str_with(stem, &src, opts);
    }
    Err(Error::FixtureNotFound(name.to_string()))
}

fn parse_generators(sec: &RawSection) -> Result<Vec<GeneratorSpec>> {
    let list = sec.get("generators").ok_or_else(|| Error::Fixture("presentation without generators".into()))?;
    let mut gens = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('=') {
            Some((name, inv)) => {
                let base = inv
                    .trim()
                    .strip_suffix("^-1")
                    .ok_or_else(|| Error::Fixture(format!("`{item}`: expected `name = base^-1`")))?;
                gens.push(GeneratorSpec::inverse_of(name.trim(), base.trim()));
            }
            None => gens.push(GeneratorSpec::new(item)),
        }
    }
    if let Some(order) = sec.get("order") {
        let names: Vec<&str> = order.split('<').map(str::trim).collect();
        let mut sorted = Vec::new();
        for n in &names {
            let g = gens.iter().find(|g| g.name == *n).ok_or_else(|| Error::UnknownGenerator(n.to_string()))?;
            sorted.push(g.clone());
        }
        if sorted.len() != gens.len() {
            return Err(Error::Fixture("order must list every generator once".into()));
        }
        gens = sorted;
    }
    Ok(gens)
}

fn pairs(sec: &RawSection) -> Result<Vec<(String, String)>> {
    sec.lines
        .iter()
        .map(|l| match &l.value {
            Some(v) => Ok((l.key.clone(), v.clone())),
            None => Err(Error::parse(l.no, format!("[{}] expects `key = value`", sec.kind))),
        })
        .collect()
}

fn as_refs(v: &[(String, String)]) -> Vec<(&str, &str)> {
    v.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

impl Fixture {
    pub fn from_str_with(name: &str, src: &str, opts: &LoadOptions) -> Result<Fixture> {
        let secs = parse_sections(src)?;
        let find = |kind: &str, q: &[&str]| -> Option<&RawSection> {
            secs.iter().find(|s| s.kind == kind && s.names.iter().map(String::as_str).eq(q.iter().copied()))
        };
        let mut main = String::new();
        let mut window = 0i64;
        let mut algebras = BTreeMap::new();
        let mut hopf = BTreeMap::new();
        for sec in secs.iter().filter(|s| s.kind == "presentation") {
            let q: Vec<&str> = sec.names.iter().map(String::as_str).collect();
            let pname = sec.get("name").unwrap_or(name).to_string();
            let key = if q.is_empty() { pname.clone() } else { q.join(" ") };
            let params: Vec<&str> = sec
                .get("parameters")
                .map(|p| p.split(',').map(str::trim).filter(|s| !s.is_empty()).collect())
                .unwrap_or_default();
            let dmax = sec.get_u32("dmax")?.unwrap_or(12);
            let w = opts.window.or(sec.get_u32("window")?).unwrap_or(6);
            let rels = find("relations", &q).map(pairs).transpose()?.unwrap_or_default();
            let p = Presentation::new(&pname, &parse_generators(sec)?, &params, &as_refs(&rels), dmax, w)?;
            if q.is_empty() {
                main = key.clone();
                window = w as i64;
            }
            match find("coproduct", &q) {
                Some(cop) => {
                    let table = |kind: &str| -> Result<Vec<(String, String)>> {
                        find(kind, &q)
                            .map(pairs)
                            .transpose()?
                            .ok_or_else(|| Error::Fixture(format!("{key}: missing [{kind}]")))
                    };
                    let h = HopfStructure::new(
                        p,
                        &as_refs(&pairs(cop)?),
                        &as_refs(&table("counit")?),
                        &as_refs(&table("antipode")?),
                        &as_refs(&table("antipode_inverse")?),
                    )?;
                    hopf.insert(key, Arc::new(h));
                }
                None => {
                    algebras.insert(key, Arc::new(p));
                }
            }
        }
        if main.is_empty() {
            return Err(Error::Fixture(format!("{name}: no [presentation] section")));
        }
        let gates = secs.iter().find(|s| s.kind == "gates");
        let gate_degree = match opts.degree {
            Some(d) => d,
            None => gates.map(|g| g.get_u32("degree")).transpose()?.flatten().unwrap_or(3),
        };
        let confluence_degree = gates.map(|g| g.get_u32("confluence")).transpose()?.flatten().unwrap_or(6);
        let mut fx = Fixture {
            name: name.to_string(),
            main,
            algebras,
            hopf,
            subgroups: BTreeMap::new(),
            sections: BTreeMap::new(),
            comodules: BTreeMap::new(),
            window,
            gate_degree,
            confluence_degree,
            gates: Report::new(format!("gates {name}")),
        };
        for sec in secs.iter().filter(|s| s.kind == "subgroup") {
            let sg = fx.build_subgroup(sec, &find)?;
            let sname = sec.names.join(" ");
            if let Some(t) = find("section", &[&sname]) {
                let inv = find("section_inverse", &[&sname]).map(Template::from_section).transpose()?;
                fx.sections.insert(sname.clone(), (Template::from_section(t)?, inv));
            }
            fx.subgroups.insert(sname, Arc::new(sg));
        }
        for sec in secs.iter().filter(|s| s.kind == "comodule") {
            let [sub, cname] = sec.names.as_slice() else {
                return Err(Error::Fixture("comodule header is `[comodule SUBGROUP NAME]`".into()));
            };
            if !fx.subgroups.contains_key(sub) {
                return Err(Error::Fixture(format!("comodule {cname}: unknown subgroup {sub}")));
            }
            fx.comodules.insert(cname.clone(), (sub.clone(), Template::from_section(sec)?));
        }
        fx.gates = fx.run_gates();
        if !opts.skip_gates && !fx.gates.is_ok() {
            return Err(Error::GateFailure { name: name.to_string(), report: Box::new(fx.gates.clone()) });
        }
        Ok(fx)
    }

    fn build_subgroup(&self, sec: &RawSection, find: &Finder<'_>) -> Result<CoisotropicSubgroup> {
        let sname = sec.names.join(" ");
        let q = [sname.as_str()];
        let source = self.hopf_named(sec.get("source").unwrap_or(&self.main))?.clone();
        let side: Side = sec.get("side").unwrap_or("right").parse()?;
        let quantum = matches!(sec.get("quantum"), Some("true"));
        let degree = sec.get_u32("degree")?.unwrap_or(source.alg.dmax / 2);
        let carrier = match sec.get("carrier") {
            Some(h) => Coalgebra::from_hopf(h, self.hopf_named(h)?.clone(), self.window as u32)?,
            None => self.build_carrier(&sname, find)?,
        };
        let env = HashMap::new();
        let proj = find("projection", &q).ok_or_else(|| Error::Fixture(format!("{sname}: missing [projection]")))?;
        let mut entries: Vec<(Element, CVec)> = Vec::new();
        for (e, key, value) in Template::from_section(proj)?.expand(self.window, &env) {
            let value = value.ok_or_else(|| Error::Fixture(format!("{sname}: projection `{key}` has no image")))?;
            let lhs = source.alg.parse_with(&key, &e)?;
            entries.push((lhs, carrier.parse_vec(&value, &e)?));
        }
        let mut complement = Vec::new();
        let mut pre: HashMap<u32, Element> = HashMap::new();
        let mut rest = Vec::new();
        for (lhs, img) in entries {
            let single_word = lhs.len() == 1 && lhs.terms().next().is_some_and(|(_, c)| c.is_one());
            let single_img = img.len() == 1 && img.values().next().is_some_and(Scalar::is_one);
            let b = img.keys().next().copied();
            match (single_word, single_img, b) {
                (true, true, Some(b)) if !pre.contains_key(&b) => {
                    complement.push((lhs.terms().next().unwrap().0.clone(), b));
                    pre.insert(b, lhs);
                }
                _ => rest.push((lhs, img)),
            }
        }
        let mut kernel = Vec::new();
        for (lhs, img) in rest {
            let mut g = lhs.clone();
            for (b, c) in &img {
                let p = pre.get(b).ok_or_else(|| {
                    Error::Fixture(format!("{sname}: {} has no declared preimage", carrier.label_name(*b)))
                })?;
                g = g.sub(&p.scale(c));
            }
            if !g.is_zero() {
                kernel.push(g);
            }
        }
        let data = SubgroupData { name: sname, side, quantum, complement, kernel, degree };
        CoisotropicSubgroup::new(source, Arc::new(carrier), data)
    }

    fn build_carrier(&self, sname: &str, find: &Finder<'_>) -> Result<Coalgebra> {
        let q = [sname];
        let need = |kind: &str| find(kind, &q).ok_or_else(|| Error::Fixture(format!("{sname}: missing [{kind}]")));
        let env = HashMap::new();
        let mut labels = Vec::new();
        for (e, key, _) in Template::from_section(need("quotient_basis")?)?.expand(self.window, &env) {
            labels.push(parse_label(&key, &e)?);
        }
        let n = labels.len();
        let probe = Coalgebra::new(sname, labels.clone(), vec![Tensor::zero(&[]); n], vec![Scalar::zero(); n])?;
        let mut delta = vec![None; n];
        let mut eps = vec![None; n];
        for (kind, slot) in [("quotient_coproduct", 0), ("quotient_counit", 1)] {
            for (e, key, value) in Template::from_section(need(kind)?)?.expand(self.window, &env) {
                let Some(k) = probe.index_of(&parse_label(&key, &e)?) else { continue };
                let value = value.ok_or_else(|| Error::Fixture(format!("{sname}: `{key}` has no value")))?;
                if slot == 0 {
                    delta[k as usize] = Some(probe.parse(&value, &e)?);
                } else {
                    eps[k as usize] = Some(crate::expr::parse_scalar(&value)?);
                }
            }
        }
        let missing =
            |k: usize| Error::Fixture(format!("{sname}: no coproduct or counit for {}", probe.label_name(k as u32)));
        let delta: Vec<Tensor> =
            delta.into_iter().enumerate().map(|(k, t)| t.ok_or_else(|| missing(k))).collect::<Result<_>>()?;
        let eps: Vec<Scalar> =
            eps.into_iter().enumerate().map(|(k, t)| t.ok_or_else(|| missing(k))).collect::<Result<_>>()?;
        for t in &delta {
            if t.slots() != [Slot::Carrier, Slot::Carrier] {
                return Err(Error::Fixture(format!("{sname}: quotient coproduct must have rank two")));
            }
        }
        Coalgebra::new(sname, labels, delta, eps)
    }

    fn run_gates(&self) -> Report {
        let mut rep = Report::new(format!("gates {}", self.name));
        let d = self.gate_degree;
        for (n, p) in self.presentations() {
            let bad = p.check_confluence(self.confluence_degree);
            let witness = || bad.first().map(|cp| cp.word.clone()).unwrap_or_default();
            rep.check(&format!("confluence.{n}"), bad.is_empty(), witness);
            for cp in bad.iter().take(4) {
                rep.note(format!("{n}: {} reduces to {} and to {}", cp.word, cp.left, cp.right));
            }
        }
        for (n, h) in &self.hopf {
            rep.merge(&format!("hopf.{n}"), h.verify_hopf_axioms(d));
        }
        for (n, s) in &self.subgroups {
            rep.merge(&format!("carrier.{n}"), s.carrier().verify());
            rep.merge(&format!("subgroup.{n}"), s.verify_coisotropic(d));
        }
        for n in self.sections.keys() {
            match Section::from_fixture(self, n, &HashMap::new()) {
                Ok(s) => rep.merge(&format!("section.{n}"), verify_section(&s, d)),
                Err(e) => rep.fail(&format!("section.{n}"), e.to_string()),
            }
        }
        for n in self.comodules.keys() {
            match self.comodule(n) {
                Ok(m) => rep.merge(&format!("comodule.{n}"), verify_comodule(&m)),
                Err(e) => rep.fail(&format!("comodule.{n}"), e.to_string()),
            }
        }
        rep
    }

    pub fn presentations(&self) -> Vec<(&str, &Presentation)> {
        let mut out: Vec<(&str, &Presentation)> = self.algebras.iter().map(|(k, p)| (k.as_str(), &**p)).collect();
        out.extend(self.hopf.iter().map(|(k, h)| (k.as_str(), &h.alg)));
        out.sort_by_key(|(k, _)| *k);
        out
    }

    /// The main presentation.
    pub fn algebra(&self) -> &Presentation {
        match self.hopf.get(&self.main) {
            Some(h) => &h.alg,
            None => &self.algebras[&self.main],
        }
    }

    pub fn hopf(&self) -> Result<&Arc<HopfStructure>> {
        self.hopf_named(&self.main)
    }

    pub fn hopf_named(&self, name: &str) -> Result<&Arc<HopfStructure>> {
        self.hopf.get(name).ok_or_else(|| Error::Fixture(format!("{}: no Hopf structure `{name}`", self.name)))
    }

    pub fn subgroup(&self, name: &str) -> Result<&Arc<CoisotropicSubgroup>> {
        self.subgroups.get(name).ok_or_else(|| Error::Fixture(format!("{}: no subgroup `{name}`", self.name)))
    }

    pub fn subgroups(&self) -> impl Iterator<Item = (&String, &Arc<CoisotropicSubgroup>)> {
        self.subgroups.iter()
    }

    pub fn section_template(&self, subgroup: &str) -> Option<&(Template, Option<Template>)> {
        self.sections.get(subgroup)
    }

    pub fn comodule_template(&self, name: &str) -> Option<&(String, Template)> {
        self.comodules.get(name)
    }

    pub fn section_names(&self) -> Vec<&str> {
        self.sections.keys().map(String::as_str).collect()
    }

    pub fn comodule_names(&self) -> Vec<&str> {
        self.comodules.keys().map(String::as_str).collect()
    }

    /// Build a declared comodule over its subgroup's carrier.
    pub fn comodule(&self, name: &str) -> Result<Comodule> {
        let (sub, t) = self
            .comodule_template(name)
            .ok_or_else(|| Error::Fixture(format!("{}: no comodule `{name}`", self.name)))?;
        let sub = self.subgroup(sub)?;
        let mut lines = Vec::new();
        for (env, key, value) in t.expand(self.window, &HashMap::new()) {
            let value = value.ok_or_else(|| Error::Fixture(format!("comodule {name}: `{key}` has no coaction")))?;
            lines.push((env, key, value));
        }
        Comodule::parse(name, sub.side, sub.carrier().clone(), &lines)
    }
}

/// Parse a basis label `sym[index]` with template variables from `env`.
pub fn parse_label(src: &str, env: &HashMap<String, i64>) -> Result<Label> {
    let cx = crate::expr::Context { classify: &|_| crate::expr::SymKind::Label, env: env.clone() };
    let raw = crate::expr::parse(src)?.eval(&cx)?;
    match raw.terms.iter().next() {
        Some((k, c)) if raw.terms.len() == 1 && c.is_one() && k.len() == 1 && k[0].len() == 1 => match &k[0][0] {
            crate::expr::Atom::Label(s, p) => Ok(Label::Indexed(s.clone(), *p)),
            _ => Err(Error::Fixture(format!("`{src}` is not a basis label"))),
        },
        _ => Err(Error::Fixture(format!("`{src}` is not a basis label"))),
    }
}
