//! Commutative polynomials in `J0` (and in `J0, K0`) over [`Scalar`].

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::Scalar;
use crate::error::Result;

/// Univariate polynomial in `J0`; index is the power.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct JPoly {
    coeffs: Vec<Scalar>,
}

impl JPoly {
    pub fn zero() -> Self {
        JPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        JPoly::from_coeffs(vec![c])
    }

    /// The variable `J0` itself.
    pub fn var() -> Self {
        JPoly::from_coeffs(vec![Scalar::zero(), Scalar::one()])
    }

    /// `a*J0 + b`.
    pub fn linear(a: Scalar, b: Scalar) -> Self {
        JPoly::from_coeffs(vec![b, a])
    }

    pub fn from_coeffs(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        JPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &JPoly) -> JPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        JPoly::from_coeffs((0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &JPoly) -> JPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        JPoly::from_coeffs((0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &JPoly) -> JPoly {
        if self.is_zero() || o.is_zero() {
            return JPoly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        JPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &Scalar) -> JPoly {
        JPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// `self(p(J0))`.
    pub fn compose(&self, p: &JPoly) -> JPoly {
        let mut acc = JPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(p).add(&JPoly::constant(c.clone()));
        }
        acc
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<JPoly> {
        Ok(JPoly::from_coeffs(self.coeffs.iter().map(f).collect::<Result<_>>()?))
    }
}

impl fmt::Display for JPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*J0")?,
                _ => write!(f, "({c})*J0^{i}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial in the commuting pair `(J0, K0)`; key is `(deg J0, deg K0)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Scalar>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = BiPoly::zero();
        p.add_term((0, 0), c);
        p
    }

    pub fn one() -> Self {
        BiPoly::constant(Scalar::one())
    }

    /// `a*J0 + b*K0 + c`.
    pub fn linear(a: Scalar, b: Scalar, c: Scalar) -> Self {
        let mut p = BiPoly::zero();
        p.add_term((1, 0), a);
        p.add_term((0, 1), b);
        p.add_term((0, 0), c);
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: (u32, u32), c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add_assign(&mut self, o: &BiPoly) {
        for (k, c) in &o.terms {
            self.add_term(*k, c.clone());
        }
    }

    pub fn scale(&self, c: &Scalar) -> BiPoly {
        let mut p = BiPoly::zero();
        for (k, v) in &self.terms {
            p.add_term(*k, v * c);
        }
        p
    }

    pub fn mul(&self, o: &BiPoly) -> BiPoly {
        let mut p = BiPoly::zero();
        for ((i1, j1), a) in &self.terms {
            for ((i2, j2), b) in &o.terms {
                p.add_term((i1 + i2, j1 + j2), a * b);
            }
        }
        p
    }

    /// Substitute `K0 -> value`, leaving a polynomial in `J0`.
    pub fn subs_k(&self, value: &Scalar) -> JPoly {
        let maxk = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let mut pows = vec![Scalar::one()];
        for i in 1..=maxk as usize {
            let next = &pows[i - 1] * value;
            pows.push(next);
        }
        let maxj = self.terms.keys().map(|k| k.0).max().unwrap_or(0) as usize;
        let mut out = vec![Scalar::zero(); maxj + 1];
        for ((i, j), c) in &self.terms {
            out[*i as usize] += &(c * &pows[*j as usize]);
        }
        JPoly::from_coeffs(out)
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, ((i, j), c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if *i > 0 {
                write!(f, "*J0^{i}")?;
            }
            if *j > 0 {
                write!(f, "*K0^{j}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_eval() {
        let p = JPoly::from_coeffs(vec![Scalar::from_int(1), Scalar::zero(), Scalar::from_int(1)]);
        let q = JPoly::linear(Scalar::from_int(2), Scalar::from_int(1));
        let c = p.compose(&q);
        assert_eq!(c.eval(&Scalar::from_int(3)), p.eval(&q.eval(&Scalar::from_int(3))));
        assert_eq!(c.degree(), Some(2));
    }

    #[test]
    fn k_substitution() {
        let p = BiPoly::linear(Scalar::one(), Scalar::one(), -Scalar::eps().scale(&crate::coeff::rat(1, 2)));
        let q = p.subs_k(&Scalar::rhat());
        assert_eq!(q.coeff(1), Scalar::one());
        assert_eq!(q.coeff(0), "Rh - (1/2)*eps".parse().unwrap());
    }
}
