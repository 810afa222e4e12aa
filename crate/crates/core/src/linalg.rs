//! Exact sparse linear algebra over the scalar field.
//!
//! Elimination clears denominators row by row and runs fraction-free
//! (Bareiss) elimination over the polynomial ring, then a single pass over
//! the field produces the reduced echelon form.

use std::collections::{BTreeMap, BTreeSet};

use crate::scalars::{Poly, Scalar};

pub type Vector = BTreeMap<usize, Scalar>;

/// Sparse matrix with optional row and column labels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IndexedMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<Vector>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl IndexedMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IndexedMatrix { nrows, ncols, rows: vec![Vector::new(); nrows], ..Default::default() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IndexedMatrix::zeros(n, n);
        for k in 0..n {
            m.set(k, k, Scalar::one());
        }
        m
    }

    pub fn set(&mut self, r: usize, c: usize, x: Scalar) {
        if x.is_zero() {
            self.rows[r].remove(&c);
        } else {
            self.rows[r].insert(c, x);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.rows[r].get(&c).cloned().unwrap_or_default()
    }

    /// Matrix whose column `j` is `cols[j]`; rows are the union of keys, sorted.
    pub fn from_columns<K: Ord + Clone>(cols: &[BTreeMap<K, Scalar>]) -> (IndexedMatrix, Vec<K>) {
        let keys: BTreeSet<K> = cols.iter().flat_map(|c| c.keys().cloned()).collect();
        let keys: Vec<K> = keys.into_iter().collect();
        let pos: BTreeMap<&K, usize> = keys.iter().enumerate().map(|(k, x)| (x, k)).collect();
        let mut m = IndexedMatrix::zeros(keys.len(), cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (k, x) in col {
                m.set(pos[k], j, x.clone());
            }
        }
        (m, keys)
    }

    pub fn scale(&self, c: &Scalar) -> IndexedMatrix {
        let mut m = self.clone();
        for row in &mut m.rows {
            for x in row.values_mut() {
                *x = &*x * c;
            }
            row.retain(|_, x| !x.is_zero());
        }
        m
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc = Scalar::zero();
            for (c, x) in row {
                if let Some(y) = v.get(c) {
                    acc = &acc + &(x * y);
                }
            }
            if !acc.is_zero() {
                out.insert(r, acc);
            }
        }
        out
    }

    pub fn map_entries(&self, f: &dyn Fn(&Scalar) -> crate::Result<Scalar>) -> crate::Result<IndexedMatrix> {
        let mut m = self.clone();
        for row in &mut m.rows {
            for x in row.values_mut() {
                *x = f(x)?;
            }
            row.retain(|_, x| !x.is_zero());
        }
        Ok(m)
    }
}

/// Reduced echelon form of a list of rows together with the non-constant
/// pivots met during fraction-free elimination.
struct Echelon {
    rows: Vec<Vector>,
    pivots: Vec<usize>,
    locus: Vec<Poly>,
}

fn lcm_of_denominators(row: &Vector) -> Poly {
    let mut l = Poly::one();
    for x in row.values() {
        let d = x.denom();
        if d.is_constant() {
            continue;
        }
        let g = crate::scalars::gcd(&l, d);
        l = l.mul(&d.div_exact(&g).expect("gcd divides"));
    }
    l
}

fn eliminate(rows: &[Vector], ncols: usize) -> Echelon {
    // Clear denominators.
    let mut m: Vec<BTreeMap<usize, Poly>> = rows
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| {
            let l = Scalar::from_poly(lcm_of_denominators(r));
            r.iter()
                .map(|(c, x)| {
                    let y = x * &l;
                    debug_assert!(y.denom().is_constant());
                    (*c, y.numer().clone())
                })
                .collect()
        })
        .collect();
    let mut prev = Poly::one();
    let mut pivots = Vec::new();
    let mut locus = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| m[i].contains_key(&c)) else { continue };
        m.swap(r, p);
        let piv = m[r][&c].clone();
        let (top, rest) = m.split_at_mut(r + 1);
        let prow = &top[r];
        for row in rest.iter_mut() {
            let a = row.remove(&c);
            let mut new = BTreeMap::new();
            let cols: BTreeSet<usize> = row.keys().chain(prow.keys()).copied().filter(|&j| j > c).collect();
            for j in cols {
                let mut x = row.get(&j).map(|y| piv.mul(y)).unwrap_or_default();
                if let (Some(a), Some(b)) = (&a, prow.get(&j)) {
                    x = x.sub(&a.mul(b));
                }
                if !x.is_zero() {
                    new.insert(j, x.div_exact(&prev).expect("Bareiss division is exact"));
                }
            }
            *row = new;
        }
        if !piv.is_constant() {
            locus.push(piv.make_monic());
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    // Field pass: normalize pivots and clear above.
    let mut out: Vec<Vector> =
        m.into_iter().map(|row| row.into_iter().map(|(c, p)| (c, Scalar::from_poly(p))).collect()).collect();
    for k in (0..out.len()).rev() {
        let pc = pivots[k];
        let inv = out[k][&pc].inv().expect("pivot is nonzero");
        for x in out[k].values_mut() {
            *x = &*x * &inv;
        }
        let prow = out[k].clone();
        for row in out.iter_mut().take(k) {
            if let Some(f) = row.remove(&pc) {
                for (j, y) in prow.iter().filter(|(j, _)| **j != pc) {
                    let v = &row.get(j).cloned().unwrap_or_default() - &(&f * y);
                    if v.is_zero() {
                        row.remove(j);
                    } else {
                        row.insert(*j, v);
                    }
                }
            }
        }
    }
    locus.sort_by_key(|p| p.to_string());
    locus.dedup();
    Echelon { rows: out, pivots, locus }
}

fn axpy(r: &mut Vector, f: &Scalar, row: &Vector) {
    for (j, y) in row {
        let v = &r.get(j).cloned().unwrap_or_default() - &(f * y);
        if v.is_zero() {
            r.remove(j);
        } else {
            r.insert(*j, v);
        }
    }
}

/// Reduced echelon basis by incremental elimination over the field; cheaper
/// than the fraction-free pass for long, nearly triangular lists.
fn field_echelon(vecs: &[Vector]) -> (Vec<Vector>, Vec<usize>) {
    let mut rows: BTreeMap<usize, Vector> = BTreeMap::new();
    for v in vecs {
        let mut r = v.clone();
        r.retain(|_, x| !x.is_zero());
        let mut from = 0;
        while let Some((&c, _)) = r.range(from..).find(|(c, _)| rows.contains_key(c)) {
            let f = r[&c].clone();
            axpy(&mut r, &f, &rows[&c]);
            from = c + 1;
        }
        if let Some((&c, x)) = r.iter().next() {
            let inv = x.inv().expect("nonzero entry");
            for y in r.values_mut() {
                *y = &*y * &inv;
            }
            rows.insert(c, r);
        }
    }
    // Back substitution, last pivot first.
    let pivots: Vec<usize> = rows.keys().copied().collect();
    for (k, &pc) in pivots.iter().enumerate().rev() {
        let prow = rows[&pc].clone();
        for &other in &pivots[..k] {
            let row = rows.get_mut(&other).unwrap();
            if let Some(f) = row.get(&pc).cloned() {
                axpy(row, &f, &prow);
            }
        }
    }
    (rows.into_values().collect(), pivots)
}

/// Product `a·b`.
pub fn matmul(a: &IndexedMatrix, b: &IndexedMatrix) -> IndexedMatrix {
    assert_eq!(a.ncols, b.nrows);
    let mut out = IndexedMatrix::zeros(a.nrows, b.ncols);
    for (r, row) in a.rows.iter().enumerate() {
        let mut acc = Vector::new();
        for (k, x) in row {
            axpy(&mut acc, &-x, &b.rows[*k]);
        }
        out.rows[r] = acc;
    }
    out
}

/// Inverse of a square matrix, or `None` if it is singular.
pub fn inverse(m: &IndexedMatrix) -> Option<IndexedMatrix> {
    let n = m.nrows;
    if m.ncols != n {
        return None;
    }
    let aug: Vec<Vector> = m
        .rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut v = row.clone();
            v.insert(n + r, Scalar::one());
            v
        })
        .collect();
    let (rows, pivots) = field_echelon(&aug);
    if pivots.len() < n || (n > 0 && pivots[n - 1] >= n) {
        return None;
    }
    let mut out = IndexedMatrix::zeros(n, n);
    for (row, pc) in rows.iter().zip(&pivots) {
        out.rows[*pc] = row.range(n..).map(|(c, x)| (c - n, x.clone())).collect();
    }
    Some(out)
}

pub fn rank(m: &IndexedMatrix) -> usize {
    eliminate(&m.rows, m.ncols).pivots.len()
}

/// Kernel together with the non-constant pivot polynomials; the kernel is
/// generic and may grow where one of them vanishes.
pub fn kernel_with_locus(m: &IndexedMatrix) -> (Subspace, Vec<Poly>) {
    let e = eliminate(&m.rows, m.ncols);
    let pivset: BTreeSet<usize> = e.pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for f in (0..m.ncols).filter(|c| !pivset.contains(c)) {
        let mut v = Vector::new();
        v.insert(f, Scalar::one());
        for (row, &pc) in e.rows.iter().zip(&e.pivots) {
            if let Some(x) = row.get(&f) {
                v.insert(pc, -x);
            }
        }
        basis.push(v);
    }
    (Subspace::from_vectors(m.ncols, &basis), e.locus)
}

pub fn kernel(m: &IndexedMatrix) -> Subspace {
    kernel_with_locus(m).0
}

/// A solution of `m x = target`, or `None` if the system is inconsistent.
pub fn solve(m: &IndexedMatrix, target: &Vector) -> Option<Vector> {
    let n = m.ncols;
    let mut rows = m.rows.clone();
    for (r, row) in rows.iter_mut().enumerate() {
        if let Some(t) = target.get(&r) {
            row.insert(n, t.clone());
        }
    }
    for (r, t) in target {
        if *r >= rows.len() {
            if t.is_zero() {
                continue;
            }
            return None;
        }
    }
    let e = eliminate(&rows, n + 1);
    if e.pivots.contains(&n) {
        return None;
    }
    let mut x = Vector::new();
    for (row, &pc) in e.rows.iter().zip(&e.pivots) {
        if let Some(t) = row.get(&n) {
            x.insert(pc, t.clone());
        }
    }
    Some(x)
}

/// Subspace of `K^ambient` stored by its reduced echelon basis, so equality
/// is syntactic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let basis: Vec<Vector> = (0..ambient).map(|k| Vector::from([(k, Scalar::one())])).collect();
        Subspace { ambient, basis, pivots: (0..ambient).collect() }
    }

    pub fn from_vectors(ambient: usize, vecs: &[Vector]) -> Self {
        let (basis, pivots) = field_echelon(vecs);
        Subspace { ambient, basis, pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residual of `v` after reducing by the basis; zero iff `v` is in the span.
    pub fn reduce(&self, v: &Vector) -> Vector {
        let mut r = v.clone();
        for (b, &pc) in self.basis.iter().zip(&self.pivots) {
            if let Some(f) = r.get(&pc).cloned() {
                for (j, y) in b {
                    let val = &r.get(j).cloned().unwrap_or_default() - &(&f * y);
                    if val.is_zero() {
                        r.remove(j);
                    } else {
                        r.insert(*j, val);
                    }
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.reduce(v).is_empty()
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &Vector) -> Option<Vec<Scalar>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|pc| v.get(pc).cloned().unwrap_or_default()).collect())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vecs = self.basis.clone();
        vecs.extend(other.basis.iter().cloned());
        Subspace::from_vectors(self.ambient, &vecs)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        // Solve sum a_i x_i = sum b_j y_j.
        let cols: Vec<Vector> = self
            .basis
            .iter()
            .cloned()
            .chain(other.basis.iter().map(|b| b.iter().map(|(k, x)| (*k, -x)).collect()))
            .collect();
        let (m, _) = IndexedMatrix::from_columns(&cols);
        let ker = kernel(&m);
        let vecs: Vec<Vector> = ker
            .basis
            .iter()
            .map(|coef| {
                let mut v = Vector::new();
                for (i, b) in self.basis.iter().enumerate() {
                    if let Some(a) = coef.get(&i) {
                        for (k, x) in b {
                            let s = &v.get(k).cloned().unwrap_or_default() + &(a * x);
                            if s.is_zero() {
                                v.remove(k);
                            } else {
                                v.insert(*k, s);
                            }
                        }
                    }
                }
                v
            })
            .collect();
        Subspace::from_vectors(self.ambient, &vecs)
    }
}

pub fn subspace_equal(a: &Subspace, b: &Subspace) -> bool {
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Scalar {
        Scalar::param("q")
    }

    #[test]
    fn trivial_kernels() {
        assert_eq!(kernel(&IndexedMatrix::zeros(3, 3)).dim(), 3);
        assert_eq!(kernel(&IndexedMatrix::identity(3)).dim(), 0);
    }

    #[test]
    fn symbolic_kernel_and_locus() {
        // [[q, 1], [q^2, q]] has rank one.
        let mut m = IndexedMatrix::zeros(2, 2);
        m.set(0, 0, q());
        m.set(0, 1, Scalar::one());
        m.set(1, 0, &q() * &q());
        m.set(1, 1, q());
        let (k, locus) = kernel_with_locus(&m);
        assert_eq!(k.dim(), 1);
        assert_eq!(rank(&m), 1);
        assert_eq!(locus.len(), 1);
        let v = Vector::from([(0, Scalar::one()), (1, -q())]);
        assert!(k.contains(&v));
    }

    #[test]
    fn scaling_does_not_change_kernels() {
        let mut m = IndexedMatrix::zeros(1, 3);
        m.set(0, 0, Scalar::one());
        m.set(0, 2, &Scalar::one() - &q());
        let s = m.scale(&(&q() / &(&q() + &Scalar::i())));
        assert!(subspace_equal(&kernel(&m), &kernel(&s)));
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let v = Vector::from([(0, q()), (2, Scalar::from_int(3))]);
        assert_eq!(solve(&IndexedMatrix::identity(3), &v), Some(v.clone()));
        let mut m = IndexedMatrix::zeros(2, 1);
        m.set(0, 0, Scalar::one());
        m.set(1, 0, Scalar::one());
        let t = Vector::from([(0, Scalar::one()), (1, Scalar::from_int(2))]);
        assert_eq!(solve(&m, &t), None);
    }

    #[test]
    fn intersection_of_planes() {
        let e = |k: usize| Vector::from([(k, Scalar::one())]);
        let a = Subspace::from_vectors(3, &[e(0), e(1)]);
        let b = Subspace::from_vectors(3, &[e(1), e(2)]);
        assert_eq!(a.intersection(&b), Subspace::from_vectors(3, &[e(1)]));
        assert_eq!(a.sum(&b), Subspace::full(3));
    }
}
