//! Rational functions in formal parameters, kept in canonical form.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::gauss::GaussRat;
use super::poly::{gcd, Poly, Var};
use crate::error::{Error, Result};

/// `num / den` with `gcd(num, den) = 1` and `den` monic.
/// Zero is stored as `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Scalar::from_poly(Poly::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_gauss(GaussRat::from_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar::from_gauss(GaussRat::from_ratio(n, d))
    }

    pub fn i() -> Self {
        Scalar::from_gauss(GaussRat::i())
    }

    pub fn from_gauss(c: GaussRat) -> Self {
        Scalar::from_poly(Poly::constant(c))
    }

    pub fn from_poly(num: Poly) -> Self {
        Scalar { num, den: Poly::one() }
    }

    pub fn param(name: &str) -> Self {
        Scalar::from_poly(Poly::var(name))
    }

    /// Build `num / den`, reducing to canonical form.
    pub fn from_fraction(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::canonical(num, den))
    }

    fn canonical(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = den.constant_value() {
            let inv = c.inv().expect("nonzero denominator");
            return Scalar { num: num.scale(&inv), den: Poly::one() };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let lc = den.leading_coeff().inv().expect("nonzero denominator");
        Scalar { num: num.scale(&lc), den: den.scale(&lc) }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num == Poly::one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The Gaussian-rational value if the scalar does not depend on parameters.
    pub fn as_gauss(&self) -> Option<GaussRat> {
        if self.den.is_constant() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut v = self.num.variables();
        v.extend(self.den.variables());
        v.sort();
        v.dedup();
        v
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::canonical(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i32) -> Result<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(Scalar { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// Substitute values for parameters. Canonicalization happens first, so
    /// removable singularities are not poles.
    pub fn specialize(&self, assignment: &HashMap<Var, GaussRat>) -> Result<Scalar> {
        let den = self.den.substitute(assignment);
        if den.is_zero() {
            return Err(Error::PoleAtAssignment(self.to_string()));
        }
        Ok(Scalar::canonical(self.num.substitute(assignment), den))
    }

    /// Replace a parameter by another scalar.
    pub fn compose(&self, var: &str, value: &Scalar) -> Result<Scalar> {
        let dn = self.num.degree_in(var);
        let dd = self.den.degree_in(var);
        let d = dn.max(dd);
        let homog = |p: &Poly, deg: u32| -> Poly {
            let mut acc = Poly::zero();
            for (e, c) in p.coeffs_in(var) {
                let t = c.mul(&value.num.pow(e)).mul(&value.den.pow(deg - e));
                acc = acc.add(&t);
            }
            acc
        };
        let num = homog(&self.num, d);
        let den = homog(&self.den, d);
        Scalar::from_fraction(num, den)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap_num = self.num.len() > 1 || self.num.leading_coeff().is_compound();
        if self.den.is_constant() {
            return write!(f, "{}", self.num);
        }
        if wrap_num {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        write!(f, "/({})", self.den)
    }
}

fn add_fractions(a: &Scalar, b: &Scalar, negate: bool) -> Scalar {
    let bn = if negate { b.num.neg() } else { b.num.clone() };
    if a.is_zero() {
        return Scalar { num: bn, den: b.den.clone() };
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.den == b.den {
        let num = a.num.add(&bn);
        if a.den.is_constant() {
            return Scalar { num, den: Poly::one() };
        }
        return Scalar::canonical(num, a.den.clone());
    }
    let g = gcd(&a.den, &b.den);
    let ad = a.den.div_exact(&g).expect("gcd divides");
    let bd = b.den.div_exact(&g).expect("gcd divides");
    let num = a.num.mul(&bd).add(&bn.mul(&ad));
    Scalar::canonical(num, a.den.mul(&bd))
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        add_fractions(self, o, false)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        add_fractions(self, o, true)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_constant() && o.den.is_constant() {
            return Scalar { num: self.num.mul(&o.num), den: Poly::one() };
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = o.den.div_exact(&g1).expect("gcd divides");
        let n2 = o.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        let lc = den.leading_coeff().inv().expect("nonzero denominator");
        Scalar { num: num.scale(&lc), den: den.scale(&lc) }
    }
}

/// Panics on division by zero; use [`Scalar::checked_div`] to get an error.
impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        self.checked_div(o).expect("division by the zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar { (&self).$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Print `sum coeff*body` in the shared grammar. An empty body is the unit.
pub fn format_combination<'a, I>(items: I) -> String
where
    I: IntoIterator<Item = (String, &'a Scalar)>,
{
    let mut out = String::new();
    for (body, c) in items {
        let neg = c.den.is_constant() && c.num.len() == 1 && c.num.leading_coeff().is_negative_real();
        let mag = if neg { -c } else { c.clone() };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let coeff = mag.to_string();
        let atomic = mag.den.is_constant() && mag.num.len() == 1 && !mag.num.leading_coeff().is_compound();
        match (body.is_empty(), mag.is_one()) {
            (true, _) => {
                if atomic || out.is_empty() && !neg {
                    out.push_str(&coeff);
                } else {
                    out.push_str(&format!("({coeff})"));
                }
            }
            (false, true) => out.push_str(&body),
            (false, false) => {
                if atomic {
                    out.push_str(&format!("{coeff}*{body}"));
                } else {
                    out.push_str(&format!("({coeff})*{body}"));
                }
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Scalar {
        Scalar::param("q")
    }

    #[test]
    fn difference_of_squares_divides() {
        let one = Scalar::one();
        let a = &one - &(&q() * &q());
        let b = &one - &q();
        assert_eq!(&a / &b, &one + &q());
    }

    #[test]
    fn unit_squared() {
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::from_int(-1));
    }

    #[test]
    fn division_by_zero_errors() {
        assert!(matches!(q().checked_div(&Scalar::zero()), Err(Error::DivisionByZero)));
    }

    #[test]
    fn removable_singularity_is_not_a_pole() {
        let one = Scalar::one();
        let x = &(&one - &(&q() * &q())) / &(&one - &q());
        let at = HashMap::from([(Var::from("q"), GaussRat::one())]);
        assert_eq!(x.specialize(&at).unwrap(), Scalar::from_int(2));
        let pole = one.checked_div(&(&one - &q())).unwrap();
        assert!(matches!(pole.specialize(&at), Err(Error::PoleAtAssignment(_))));
    }

    #[test]
    fn negative_powers_cancel() {
        let x = q().pow(-2).unwrap();
        assert_eq!(&x * &q().pow(2).unwrap(), Scalar::one());
        assert_eq!(x.to_string(), "1/(q^2)");
    }
}
