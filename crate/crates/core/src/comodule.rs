//! Finite-dimensional comodules over a carrier coalgebra.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::coalgebra::Coalgebra;
use crate::error::{Error, Result};
use crate::expr::{self, Atom, Context, SymKind};
use crate::linalg::{matmul, rank, IndexedMatrix, Subspace, Vector};
use crate::report::Report;
use crate::scalars::Scalar;
use crate::subgroup::Side;
use crate::tensor::{Factor, Key, Slot, Tensor};

/// Largest dimension accepted by [`invariant_subcomodules`].
pub const INVARIANT_SEARCH_BOUND: usize = 4;

/// A comodule with basis `labels`: right coactions live in `V⊗C`, left
/// ones in `C⊗V`.
#[derive(Clone, Debug)]
pub struct Comodule {
    pub name: String,
    pub side: Side,
    carrier: Arc<Coalgebra>,
    labels: Vec<String>,
    coaction: Vec<Tensor>,
}

fn space_slots(side: Side) -> [Slot; 2] {
    match side {
        Side::Right => [Slot::Space, Slot::Carrier],
        Side::Left => [Slot::Carrier, Slot::Space],
    }
}

impl Comodule {
    pub fn new(
        name: &str,
        side: Side,
        carrier: Arc<Coalgebra>,
        labels: Vec<String>,
        coaction: Vec<Tensor>,
    ) -> Result<Self> {
        if labels.len() != coaction.len() {
            return Err(Error::Fixture(format!("comodule {name}: coaction does not cover the basis")));
        }
        let n = labels.len() as u32;
        for t in &coaction {
            if t.slots() != space_slots(side) {
                return Err(Error::SideMismatch(format!("comodule {name}: coaction has slots {:?}", t.slots())));
            }
            let sp = if side == Side::Right { 0 } else { 1 };
            if t.terms().any(|(k, _)| k[sp].index() >= n || k[1 - sp].index() as usize >= carrier.dim()) {
                return Err(Error::CarrierMismatch(format!("comodule {name}: index out of range")));
            }
        }
        Ok(Comodule { name: name.into(), side, carrier, labels, coaction })
    }

    /// One-dimensional `1 ↦ 1⊗c` (or `c⊗1`).
    pub fn character(carrier: Arc<Coalgebra>, b: u32, side: Side) -> Self {
        let key = match side {
            Side::Right => vec![Factor::B(0), Factor::B(b)],
            Side::Left => vec![Factor::B(b), Factor::B(0)],
        };
        let name = format!("rho[{}]", carrier.label_name(b));
        let t = Tensor::pure(&space_slots(side), key, Scalar::one());
        Comodule { name, side, carrier, labels: vec!["1".into()], coaction: vec![t] }
    }

    /// The carrier as a right comodule over itself.
    pub fn regular(carrier: Arc<Coalgebra>) -> Self {
        let labels = (0..carrier.dim() as u32).map(|k| carrier.label_name(k)).collect();
        let coaction = (0..carrier.dim() as u32)
            .map(|k| {
                let mut t = Tensor::zero(&[Slot::Space, Slot::Carrier]);
                for (key, c) in carrier.delta(k).terms() {
                    t.add_term(vec![Factor::B(key[0].index()), key[1].clone()], c.clone());
                }
                t
            })
            .collect();
        Comodule { name: format!("regular {}", carrier.name), side: Side::Right, carrier, labels, coaction }
    }

    /// Parse `label = coaction` lines, e.g. `e[0] = e[0]@c[1]`.
    pub fn parse(
        name: &str,
        side: Side,
        carrier: Arc<Coalgebra>,
        lines: &[(HashMap<String, i64>, String, String)],
    ) -> Result<Self> {
        let mut labels: Vec<(String, i64)> = Vec::new();
        for (env, key, _) in lines {
            match crate::fixtures::parse_label(key, env)? {
                crate::coalgebra::Label::Indexed(s, p) => labels.push((s, p)),
                other => return Err(Error::Fixture(format!("bad comodule label {other:?}"))),
            }
        }
        let sym = labels.first().map(|l| l.0.clone()).unwrap_or_default();
        let index: HashMap<(String, i64), u32> = labels.iter().cloned().zip(0..).collect();
        let classify = |s: &str| if s == sym { SymKind::Label } else { carrier.classify(s) };
        let mut coaction = Vec::new();
        for (env, _, value) in lines {
            let cx = Context { classify: &classify, env: env.clone() };
            let raw = expr::parse(value)?.eval(&cx)?;
            let mut t = Tensor::zero(&space_slots(side));
            for (key, c) in &raw.terms {
                let [a, b] = key.as_slice() else {
                    return Err(Error::Fixture(format!("comodule {name}: `{value}` is not a rank-two tensor")));
                };
                let (sp, car) = if side == Side::Right { (a, b) } else { (b, a) };
                let e = match sp.as_slice() {
                    [Atom::Label(s, p)] => *index
                        .get(&(s.clone(), *p))
                        .ok_or_else(|| Error::Fixture(format!("comodule {name}: unknown basis vector {s}[{p}]")))?,
                    _ => return Err(Error::SideMismatch(format!("comodule {name}: `{value}`"))),
                };
                for (ck, x) in carrier.raw_to_tensor(car)?.terms() {
                    let k = match side {
                        Side::Right => vec![Factor::B(e), ck[0].clone()],
                        Side::Left => vec![ck[0].clone(), Factor::B(e)],
                    };
                    t.add_term(k, c * x);
                }
            }
            coaction.push(t);
        }
        let labels = labels.iter().map(|(s, p)| format!("{s}[{p}]")).collect();
        Comodule::new(name, side, carrier, labels, coaction)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn carrier(&self) -> &Arc<Coalgebra> {
        &self.carrier
    }

    pub fn coaction(&self, k: u32) -> &Tensor {
        &self.coaction[k as usize]
    }

    fn space_pos(&self) -> usize {
        if self.side == Side::Right {
            0
        } else {
            1
        }
    }

    /// `M_b`: entry `(j, k)` is the coefficient of `e_j` against `b` in `ρ(e_k)`.
    pub fn matrix(&self, b: u32) -> IndexedMatrix {
        let n = self.dim();
        let sp = self.space_pos();
        let mut m = IndexedMatrix::zeros(n, n);
        for (k, t) in self.coaction.iter().enumerate() {
            for (key, c) in t.terms() {
                if key[1 - sp].index() == b {
                    m.set(key[sp].index() as usize, k, c.clone());
                }
            }
        }
        m
    }

    /// Carrier basis elements appearing in the coaction.
    pub fn support(&self) -> BTreeSet<u32> {
        let sp = self.space_pos();
        self.coaction.iter().flat_map(|t| t.terms().map(move |(k, _)| k[1 - sp].index())).collect()
    }

    /// Apply the coaction to the space slot `at`.
    pub fn apply_at(&self, t: &Tensor, at: usize) -> Result<Tensor> {
        let f = |x: &Factor| -> Result<Vec<(Key, Scalar)>> {
            Ok(self.coaction(x.index()).terms().map(|(k, c)| (k.clone(), c.clone())).collect())
        };
        t.map_slot(at, &space_slots(self.side), &f)
    }

    pub fn fmt_coaction(&self, k: u32) -> String {
        let sp = |f: &Factor| self.labels[f.index() as usize].clone();
        let car = |f: &Factor| self.carrier.label_name(f.index());
        match self.side {
            Side::Right => self.coaction(k).fmt_with(&[&sp, &car]),
            Side::Left => self.coaction(k).fmt_with(&[&car, &sp]),
        }
    }
}

fn basis_vec(k: u32) -> Tensor {
    Tensor::pure(&[Slot::Space], vec![Factor::B(k)], Scalar::one())
}

/// Counit and coassociativity on every basis vector.
pub fn verify_comodule(m: &Comodule) -> Report {
    let mut rep = Report::new(format!("comodule {}", m.name));
    let c = &m.carrier;
    let sp = m.space_pos();
    for k in 0..m.dim() as u32 {
        let rho = m.coaction(k);
        let name = m.labels[k as usize].clone();
        let counit = c.counit_at(rho, 1 - sp).expect("counit is total");
        rep.check("counit", counit == basis_vec(k), || name.clone());
        let (lhs, rhs) = match m.side {
            // (id⊗Δ)ρ = (ρ⊗id)ρ
            Side::Right => (c.delta_at(rho, 1), m.apply_at(rho, 0)),
            // (Δ⊗id)ρ = (id⊗ρ)ρ
            Side::Left => (c.delta_at(rho, 0), m.apply_at(rho, 1)),
        };
        let ok = matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b);
        rep.check("coassociativity", ok, || name.clone());
    }
    rep
}

fn same_carrier(a: &Comodule, b: &Comodule) -> Result<()> {
    if !Arc::ptr_eq(&a.carrier, &b.carrier) {
        return Err(Error::CarrierMismatch(format!("{} and {}", a.carrier.name, b.carrier.name)));
    }
    if a.side != b.side {
        return Err(Error::SideMismatch(format!("{} and {}", a.name, b.name)));
    }
    Ok(())
}

/// Block sum: `V` first, then `W` shifted by `dim V`.
pub fn direct_sum(a: &Comodule, b: &Comodule) -> Result<Comodule> {
    same_carrier(a, b)?;
    let shift = a.dim() as u32;
    let sp = a.space_pos();
    let mut coaction = a.coaction.clone();
    for t in &b.coaction {
        let mut u = Tensor::zero(t.slots());
        for (k, c) in t.terms() {
            let mut k = k.clone();
            k[sp] = Factor::B(k[sp].index() + shift);
            u.add_term(k, c.clone());
        }
        coaction.push(u);
    }
    let mut labels = a.labels.clone();
    labels.extend(b.labels.iter().map(|l| format!("{l}'")));
    Comodule::new(&format!("{} + {}", a.name, b.name), a.side, a.carrier.clone(), labels, coaction)
}

/// Whether `f: V → W` intertwines: `M'_b F = F M_b` for every carrier `b`.
pub fn is_intertwiner(a: &Comodule, b: &Comodule, f: &IndexedMatrix) -> bool {
    let sup: BTreeSet<u32> = a.support().union(&b.support()).copied().collect();
    sup.into_iter().all(|c| matmul(&b.matrix(c), f) == matmul(f, &a.matrix(c)))
}

/// An invertible intertwiner `V → W`, or `None` if there is none over the
/// generic parameter field.
pub fn equivalence(a: &Comodule, b: &Comodule) -> Result<Option<IndexedMatrix>> {
    same_carrier(a, b)?;
    let n = a.dim();
    if n != b.dim() {
        return Ok(None);
    }
    if n == 0 {
        return Ok(Some(IndexedMatrix::zeros(0, 0)));
    }
    let var = |j: usize, k: usize| j * n + k;
    let sup: BTreeSet<u32> = a.support().union(&b.support()).copied().collect();
    let mut m = IndexedMatrix::zeros(0, n * n);
    for c in sup {
        let (ma, mb) = (a.matrix(c), b.matrix(c));
        for i in 0..n {
            for k in 0..n {
                let mut row = Vector::new();
                let mut add = |v: usize, x: Scalar| {
                    let s = &row.get(&v).cloned().unwrap_or_default() + &x;
                    if s.is_zero() {
                        row.remove(&v);
                    } else {
                        row.insert(v, s);
                    }
                };
                for j in 0..n {
                    add(var(j, k), mb.get(i, j));
                    add(var(i, j), -ma.get(j, k));
                }
                m.rows.push(row);
                m.nrows += 1;
            }
        }
    }
    let ker = crate::linalg::kernel(&m);
    if ker.dim() == 0 {
        return Ok(None);
    }
    let build = |coef: &dyn Fn(usize) -> Scalar| -> IndexedMatrix {
        let mut f = IndexedMatrix::zeros(n, n);
        for (t, basis) in ker.basis().iter().enumerate() {
            let ct = coef(t);
            for (v, x) in basis {
                let cur = f.get(v / n, v % n);
                f.set(v / n, v % n, &cur + &(x * &ct));
            }
        }
        f
    };
    let generic = build(&|t| Scalar::param(&format!("__t{t}")));
    if rank(&generic) < n {
        return Ok(None);
    }
    for attempt in 0..64i64 {
        let f = build(&|t| Scalar::from_int(1 + ((t as i64 + 3) * (attempt + 1)) % 17));
        if rank(&f) == n {
            return Ok(Some(f));
        }
    }
    // Fall back to the generic intertwiner; it is invertible over the field.
    Ok(Some(generic))
}

/// Coaction-stable subspaces by dimension.
#[derive(Clone, Debug, Default)]
pub struct InvariantSubcomodules {
    pub by_dim: BTreeMap<usize, Vec<Subspace>>,
    /// Continuous families that cannot be listed.
    pub families: Vec<String>,
    /// Whether `by_dim` lists every invariant subspace.
    pub complete: bool,
}

fn unit(k: usize) -> Vector {
    Vector::from([(k, Scalar::one())])
}

fn columns(m: &IndexedMatrix) -> Vec<Vector> {
    (0..m.ncols)
        .map(|c| (0..m.nrows).filter_map(|r| Some((r, m.get(r, c))).filter(|(_, x)| !x.is_zero())).collect())
        .collect()
}

/// Proper nonzero invariant subspaces of a comodule of dimension at most
/// [`INVARIANT_SEARCH_BOUND`]. Exact when the coaction only involves
/// group-like carrier elements; otherwise the sublattice generated by the
/// cyclic subcomodules of basis vectors is returned and marked incomplete.
pub fn invariant_subcomodules(m: &Comodule) -> Result<InvariantSubcomodules> {
    let n = m.dim();
    if n > INVARIANT_SEARCH_BOUND {
        return Err(Error::DimensionTooLarge { dim: n, bound: INVARIANT_SEARCH_BOUND });
    }
    let sup = m.support();
    let mut out = InvariantSubcomodules::default();
    let mut found: Vec<Subspace> = Vec::new();
    if sup.iter().all(|b| m.carrier.is_grouplike(*b)) {
        // V splits into the images of the idempotents M_b.
        let comps: Vec<Subspace> = sup.iter().map(|b| Subspace::from_vectors(n, &columns(&m.matrix(*b)))).collect();
        for (b, c) in sup.iter().zip(&comps) {
            if c.dim() > 1 {
                out.families.push(format!(
                    "every subspace of the {}-dimensional {} component",
                    c.dim(),
                    m.carrier.label_name(*b)
                ));
            }
        }
        out.complete = out.families.is_empty();
        for mask in 1u32..(1 << comps.len()) {
            let mut s = Subspace::zero(n);
            for (i, c) in comps.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    s = s.sum(c);
                }
            }
            found.push(s);
        }
    } else {
        let mats: Vec<IndexedMatrix> = sup.iter().map(|b| m.matrix(*b)).collect();
        let closure = |start: Subspace| {
            let mut w = start;
            loop {
                let mut vecs = w.basis().to_vec();
                for a in &mats {
                    vecs.extend(w.basis().iter().map(|v| a.apply(v)));
                }
                let next = Subspace::from_vectors(n, &vecs);
                if next == w {
                    return w;
                }
                w = next;
            }
        };
        let mut lattice: Vec<Subspace> = (0..n).map(|k| closure(Subspace::from_vectors(n, &[unit(k)]))).collect();
        loop {
            let mut grew = false;
            let snapshot = lattice.clone();
            for (i, x) in snapshot.iter().enumerate() {
                for y in &snapshot[i + 1..] {
                    for z in [x.sum(y), x.intersection(y)] {
                        if !lattice.contains(&z) {
                            lattice.push(z);
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        found = lattice;
        out.complete = false;
    }
    for s in found {
        let d = s.dim();
        if d == 0 || d == n {
            continue;
        }
        let list = out.by_dim.entry(d).or_default();
        if !list.contains(&s) {
            list.push(s);
        }
    }
    Ok(out)
}
