//! Sparse multivariate polynomials over `Q(i)` with exact division and GCD.
//!
//! Monomials are ordered lexicographically, variables compared by name with
//! the alphabetically smallest variable most significant. The leading term of
//! a polynomial is its largest monomial.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use super::gauss::GaussRat;

pub type Var = Arc<str>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: &Var, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v.clone(), e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree_in(&self, v: &str) -> u32 {
        self.0.iter().find(|(w, _)| &**w == v).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::new();
        let mut j = 0;
        for (v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v.clone(), e - f)),
                }
            } else {
                out.push((v.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    fn without(&self, v: &str) -> Monomial {
        Monomial(self.0.iter().filter(|(w, _)| &**w != v).cloned().collect())
    }

    fn smallest_var(&self) -> Option<&Var> {
        self.0.first().map(|(v, _)| v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.0.iter();
        let mut b = other.0.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => continue,
                        o => return o,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, GaussRat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: GaussRat) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn one() -> Self {
        Poly::constant(GaussRat::one())
    }

    pub fn var(name: &str) -> Self {
        Poly::monomial(Monomial::var(&Var::from(name), 1), GaussRat::one())
    }

    pub fn monomial(m: Monomial, c: GaussRat) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Monomial::one()))
    }

    pub fn constant_value(&self) -> Option<GaussRat> {
        if self.is_zero() {
            Some(GaussRat::zero())
        } else if self.is_constant() {
            self.terms.get(&Monomial::one()).cloned()
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussRat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<(&Monomial, &GaussRat)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> GaussRat {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(GaussRat::zero)
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| v.clone())).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = &*existing + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    fn mul_term(&self, m: &Monomial, c: &GaussRat) -> Poly {
        Poly { terms: self.terms.iter().map(|(n, d)| (n.mul(m), d * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient, or `None` if `other` does not divide `self`.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        if let Some(c) = other.constant_value() {
            return Some(self.scale(&c.inv()?));
        }
        let (lm, lc) = other.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let t = m.div(&lm)?;
            let tc = &c * &lc_inv;
            rem = rem.sub(&other.mul_term(&t, &tc));
            quot.add_term(t, tc);
        }
        Some(quot)
    }

    pub fn make_monic(&self) -> Poly {
        match self.leading_coeff().inv() {
            Some(inv) => self.scale(&inv),
            None => Poly::zero(),
        }
    }

    pub fn degree_in(&self, v: &str) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    /// Coefficients with respect to `v`: exponent -> polynomial free of `v`.
    pub fn coeffs_in(&self, v: &str) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree_in(v)).or_default().add_term(m.without(v), c.clone());
        }
        out
    }

    fn from_coeffs(v: &Var, coeffs: &BTreeMap<u32, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (e, p) in coeffs {
            let xm = Monomial::var(v, *e);
            for (m, c) in &p.terms {
                out.add_term(m.mul(&xm), c.clone());
            }
        }
        out
    }

    /// Substitute values for some variables.
    pub fn substitute(&self, values: &HashMap<Var, GaussRat>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for (v, e) in &m.0 {
                match values.get(v) {
                    Some(x) => coeff = &coeff * &x.pow(*e),
                    None => rest.push((v.clone(), *e)),
                }
            }
            out.add_term(Monomial(rest), coeff);
        }
        out
    }

    /// Substitute a polynomial for one variable.
    pub fn compose(&self, v: &str, value: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in self.coeffs_in(v) {
            out = out.add(&c.mul(&value.pow(e)));
        }
        out
    }
}

fn smallest_var(a: &Poly, b: &Poly) -> Option<Var> {
    a.terms.keys().chain(b.terms.keys()).filter_map(|m| m.smallest_var()).min().cloned()
}

/// GCD of the coefficients of `p` viewed as a polynomial in `v`.
fn content_in(p: &Poly, v: &str) -> Poly {
    let mut g = Poly::zero();
    for c in p.coeffs_in(v).values() {
        g = gcd(&g, c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g
}

/// Pseudo-remainder of `a` by `b` in variable `v`.
fn prem(a: &Poly, b: &Poly, v: &Var) -> Poly {
    let db = b.degree_in(v);
    let bc = b.coeffs_in(v);
    let lb = bc.get(&db).cloned().unwrap_or_default();
    if let Some(c) = lb.constant_value() {
        let b = b.scale(&c.inv().expect("leading coefficient is nonzero"));
        let mut r = a.clone();
        while !r.is_zero() && r.degree_in(v) >= db {
            let dr = r.degree_in(v);
            let lr = r.coeffs_in(v).remove(&dr).unwrap_or_default();
            let shift = Poly::from_coeffs(v, &BTreeMap::from([(dr - db, lr)]));
            r = r.sub(&b.mul(&shift));
        }
        return r;
    }
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coeffs_in(v).remove(&dr).unwrap_or_default();
        let shift = Poly::from_coeffs(v, &BTreeMap::from([(dr - db, lr)]));
        r = r.mul(&lb).sub(&b.mul(&shift));
    }
    r
}

/// Sufficient test that `a` and `b` share no factor involving `v`: specialize
/// the other variables at a point keeping the leading coefficient of `a` and
/// compare the univariate images.
fn coprime_in(a: &Poly, b: &Poly, v: &Var) -> bool {
    let others: Vec<Var> = a.variables().into_iter().chain(b.variables()).filter(|w| w != v).collect();
    if others.is_empty() {
        return false;
    }
    let lead = a.coeffs_in(v).remove(&a.degree_in(v)).unwrap_or_default();
    for k in 1..8i64 {
        let point: HashMap<Var, GaussRat> = others
            .iter()
            .enumerate()
            .map(|(j, w)| (w.clone(), GaussRat::from_ratio(7 * k + 3 * j as i64 + 2, 3 + k)))
            .collect();
        if lead.substitute(&point).is_zero() {
            continue;
        }
        return gcd(&a.substitute(&point), &b.substitute(&point)).degree_in(v) == 0;
    }
    false
}

/// Monic greatest common divisor.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.make_monic();
    }
    if b.is_zero() {
        return a.make_monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.make_monic();
    }
    if a.len() == 1 || b.len() == 1 {
        let (m, other) = if a.len() == 1 { (a, b) } else { (b, a) };
        let mut g = m.leading().map(|(m, _)| m.clone()).unwrap_or_default();
        for (n, _) in other.terms() {
            g = Monomial(
                g.0.iter()
                    .filter_map(|(v, e)| {
                        let f = n.degree_in(v).min(*e);
                        (f > 0).then(|| (v.clone(), f))
                    })
                    .collect(),
            );
            if g.is_one() {
                break;
            }
        }
        return Poly::monomial(g, GaussRat::one());
    }
    let v = match smallest_var(a, b) {
        Some(v) => v,
        None => return Poly::one(),
    };
    let (da, db) = (a.degree_in(&v), b.degree_in(&v));
    if da == 0 {
        return gcd(a, &content_in(b, &v));
    }
    if db == 0 {
        return gcd(&content_in(a, &v), b);
    }
    let ca = content_in(a, &v);
    let cb = content_in(b, &v);
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(&v) < q.degree_in(&v) {
        std::mem::swap(&mut p, &mut q);
    }
    if coprime_in(&p, &q, &v) {
        return c.make_monic();
    }
    loop {
        let r = prem(&p, &q, &v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(&v) == 0 {
            return c.make_monic();
        }
        let cr = content_in(&r, &v);
        p = q;
        q = r.div_exact(&cr).expect("content divides").make_monic();
    }
    let cq = content_in(&q, &v);
    let pq = q.div_exact(&cq).expect("content divides");
    c.mul(&pq).make_monic()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, mag) = if c.is_negative_real() { (true, -c) } else { (false, c.clone()) };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Poly {
        Poly::var("q")
    }

    #[test]
    fn lex_order_prefers_smaller_variable() {
        let k = Monomial::var(&Var::from("kappa"), 1);
        let q2 = Monomial::var(&Var::from("q"), 5);
        assert!(k > q2);
    }

    #[test]
    fn exact_division_factorises_difference_of_squares() {
        let one = Poly::one();
        let a = one.sub(&q().mul(&q()));
        let b = one.sub(&q());
        assert_eq!(a.div_exact(&b).unwrap(), one.add(&q()));
        assert!(b.div_exact(&a).is_none());
    }

    #[test]
    fn gcd_multivariate_common_factor() {
        let x = Poly::var("x");
        let y = Poly::var("y");
        let f = x.add(&y);
        let a = f.mul(&x.sub(&Poly::one()));
        let b = f.mul(&y.add(&Poly::constant(GaussRat::from_int(3))));
        assert_eq!(gcd(&a, &b), f.make_monic());
    }

    #[test]
    fn gcd_with_a_factor_vanishing_at_the_probe_point() {
        // x - 3/4 y kills the leading coefficient at the first probe point.
        let (x, y, z) = (Poly::var("x"), Poly::var("y"), Poly::var("z"));
        let f = x.mul(&y).sub(&z.scale(&GaussRat::from_ratio(9, 4)));
        let a = f.mul(&x.add(&z));
        let b = f.mul(&y.mul(&y).add(&x));
        assert_eq!(gcd(&a, &b), f.make_monic());
        assert_eq!(gcd(&a, &x.add(&y)), Poly::one());
    }

    #[test]
    fn gcd_coprime_is_one() {
        let x = Poly::var("x");
        let y = Poly::var("y");
        assert_eq!(gcd(&x.add(&Poly::one()), &y), Poly::one());
    }

    #[test]
    fn gcd_over_gaussian_integers() {
        let x = Poly::var("x");
        let i = Poly::constant(GaussRat::i());
        let a = x.mul(&x).add(&Poly::one());
        let b = x.sub(&i);
        assert_eq!(gcd(&a, &b), b);
    }
}
