//! Ket representation on `|k,j>` and the rectangular matrices of each sector.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::coeff::{fmt_half_int, rat, Rational, Scalar};
use crate::error::{Error, Result};
use crate::psi::{rho, ParamPoint, PsiElement};
use crate::weil::{NormalMonomial, WElement};

/// Level `k` (doubled), fixing `Rh = eps (k + 1/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FuzzyLevel {
    pub k2: i32,
}

impl FuzzyLevel {
    pub fn new(k2: i32) -> Result<Self> {
        if k2 < 0 {
            return Err(Error::InvalidPoint(format!("k = {} < 0", fmt_half_int(k2))));
        }
        Ok(FuzzyLevel { k2 })
    }

    /// Parameter point for this level; `eps = None` keeps `eps` symbolic.
    pub fn point(&self, eps: Option<&Rational>) -> Result<ParamPoint> {
        match eps {
            None => Ok(ParamPoint::symbolic_level(self.k2)),
            Some(e) => ParamPoint::at_level(e.clone(), self.k2),
        }
    }

    pub fn dim(&self) -> usize {
        (self.k2 + 1) as usize
    }

    pub fn kets(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        (-self.k2..=self.k2).step_by(2).map(move |j2| (self.k2, j2))
    }
}

/// Sparse combination of kets `|k,j>` (doubled labels), possibly over several levels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KetVector {
    coeffs: BTreeMap<(i32, i32), Scalar>,
}

impl KetVector {
    pub fn zero() -> Self {
        KetVector { coeffs: BTreeMap::new() }
    }

    pub fn ket(k2: i32, j2: i32) -> Result<Self> {
        if k2 < 0 || j2.abs() > k2 || (k2 + j2) % 2 != 0 {
            return Err(Error::InvalidPoint(format!("|{},{}>", fmt_half_int(k2), fmt_half_int(j2))));
        }
        let mut v = KetVector::zero();
        v.add_term((k2, j2), Scalar::one());
        Ok(v)
    }

    pub fn add_term(&mut self, key: (i32, i32), c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(key).or_default();
        *e += &c;
        if e.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn coeff(&self, k2: i32, j2: i32) -> Scalar {
        self.coeffs.get(&(k2, j2)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &Scalar)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The single level of the support, if there is one.
    pub fn level(&self) -> Option<i32> {
        let mut it = self.coeffs.keys().map(|k| k.0);
        let first = it.next()?;
        it.all(|k| k == first).then_some(first)
    }
}

impl fmt::Display for KetVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, ((k2, j2), c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})|{},{}>", fmt_half_int(*k2), fmt_half_int(*j2))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Letter {
    Ap,
    Am,
    Bp,
    Bm,
}

/// One letter on one ket: `(new key, doubled radicand)` or annihilation.
fn letter_on(l: Letter, k2: i32, j2: i32) -> Option<((i32, i32), i32)> {
    let (rad2, nk, nj) = match l {
        Letter::Ap => (k2 + j2 + 2, k2 + 1, j2 + 1),
        Letter::Bp => (k2 - j2 + 2, k2 + 1, j2 - 1),
        Letter::Am => (k2 + j2, k2 - 1, j2 - 1),
        Letter::Bm => (k2 - j2, k2 - 1, j2 + 1),
    };
    (rad2 > 0).then_some(((nk, nj), rad2))
}

fn monomial_on(m: &NormalMonomial, k2: i32, j2: i32) -> Option<((i32, i32), Scalar)> {
    let seq = [(Letter::Bm, m.v), (Letter::Bp, m.u), (Letter::Am, m.t), (Letter::Ap, m.s)];
    let mut key = (k2, j2);
    let mut rad = Rational::from_integer(1.into());
    for (l, e) in seq {
        for _ in 0..e {
            let (nk, r2) = letter_on(l, key.0, key.1)?;
            rad *= rat(r2 as i64, 2);
            key = nk;
        }
    }
    let c = &Scalar::sqrt_rational(&rad).expect("positive") * &Scalar::eps_pow2(m.degree() as i32);
    Some((key, c))
}

/// `w |v>` with coefficients of `w` and the `eps^(1/2)` factors evaluated at `p`.
pub fn apply(w: &WElement, v: &KetVector, p: &ParamPoint) -> Result<KetVector> {
    if p.eps.as_ref().is_some_and(|e| !num_traits::Signed::is_positive(e)) {
        return Err(Error::InvalidPoint("ket action needs eps > 0".into()));
    }
    let mut out = KetVector::zero();
    for ((k2, j2), cv) in &v.coeffs {
        for (m, cw) in w.terms() {
            if let Some((key, c)) = monomial_on(m, *k2, *j2) {
                out.add_term(key, &(&c * cw) * cv);
            }
        }
    }
    let mut spec = KetVector::zero();
    for (key, c) in out.coeffs {
        spec.add_term(key, p.specialize(&c)?);
    }
    Ok(spec)
}

/// `(1/(2k+1)) sum_j <k,j| w |k,j>` at `Rh = eps (k + 1/2)`.
pub fn pi0_trace(w: &WElement, level: FuzzyLevel, eps: Option<&Rational>) -> Result<Scalar> {
    let p = level.point(eps)?;
    let mut acc = Scalar::zero();
    for (k2, j2) in level.kets() {
        let out = apply(w, &KetVector::ket(k2, j2)?, &p)?;
        acc += &out.coeff(k2, j2);
    }
    Ok(acc.scale(&rat(1, level.dim() as i64)))
}

/// Dense matrix over [`Scalar`], row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Scalar>,
}

impl RectMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RectMatrix { rows, cols, entries: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RectMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn mul(&self, o: &RectMatrix) -> Result<RectMatrix> {
        if self.cols != o.rows {
            return Err(Error::SectorMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", o.rows),
            });
        }
        let mut out = RectMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(l, j);
                    if !b.is_zero() {
                        out.entries[i * o.cols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> RectMatrix {
        let mut out = RectMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// `sum |a_ij|^2`.
    pub fn frobenius_sq(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for e in &self.entries {
            acc += &(e * &e.conj());
        }
        acc
    }

    /// Rows of `(mu, nu, value)` with 1-based indices.
    pub fn to_rows(&self) -> Vec<(usize, usize, String)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.push((i + 1, j + 1, self.get(i, j).to_string()));
            }
        }
        out
    }
}

/// `(phi^r_k(x))_{mu nu} = <k+r, mu-k-r-1| x |k, nu-k-1>`.
pub fn phi_matrix(x: &PsiElement, r2: i32, level: FuzzyLevel, eps: Option<&Rational>) -> Result<RectMatrix> {
    if let Some(l) = x.labels().find(|l| l.r2 != r2) {
        return Err(Error::SectorMismatch { expected: format!("r = {}", fmt_half_int(r2)), found: l.to_string() });
    }
    let top = level.k2 + r2;
    if top < 0 {
        return Err(Error::InvalidPoint(format!("k + r = {} < 0", fmt_half_int(top))));
    }
    let p = level.point(eps)?;
    let w = x.lift();
    let rows = (top + 1) as usize;
    let cols = level.dim();
    let mut m = RectMatrix::zeros(rows, cols);
    for nu in 0..cols {
        let j2 = 2 * nu as i32 - level.k2;
        let out = apply(&w, &KetVector::ket(level.k2, j2)?, &p)?;
        for ((k2, jj), c) in out.terms() {
            if *k2 != top {
                return Err(Error::SectorMismatch { expected: format!("level {top}"), found: format!("level {k2}") });
            }
            let mu = ((jj + top) / 2) as usize;
            m.set(mu, nu, c.clone());
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoConsistency {
    pub k2: i32,
    pub kets_checked: usize,
    pub pass: bool,
}

/// Checks `rho(w)|k,j> = w|k,j>` on every ket of the level.
pub fn rho_consistency(w: &WElement, level: FuzzyLevel, eps: Option<&Rational>) -> Result<RhoConsistency> {
    let p = level.point(eps)?;
    let lifted = rho(w, &p)?.lift();
    let mut pass = true;
    let mut n = 0;
    for (k2, j2) in level.kets() {
        let v = KetVector::ket(k2, j2)?;
        pass &= apply(&lifted, &v, &p)? == apply(w, &v, &p)?;
        n += 1;
    }
    Ok(RhoConsistency { k2: level.k2, kets_checked: n, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct NullityReport {
    /// Levels `k <= deg(w) + 2` (doubled bound).
    pub max_k2: i32,
    pub annihilated: bool,
    pub rho_zero: bool,
    pub w_is_zero: bool,
}

/// Randomized separation test: an element annihilating every tested level and
/// with vanishing `rho` at the matching `Rh` must be zero. The level bound
/// `deg + 2` is a chosen cutoff, sound only for the tested degrees.
pub fn nullity_test(w: &WElement, eps: &Rational) -> Result<NullityReport> {
    let deg = w.degree().unwrap_or(0) as i32;
    let max_k2 = 2 * (deg + 2);
    let mut annihilated = true;
    let mut rho_zero = true;
    for k2 in 0..=max_k2 {
        let level = FuzzyLevel::new(k2)?;
        let p = level.point(Some(eps))?;
        for (k, j) in level.kets() {
            if !apply(w, &KetVector::ket(k, j)?, &p)?.is_zero() {
                annihilated = false;
            }
        }
        if !rho(w, &p)?.is_zero() {
            rho_zero = false;
        }
    }
    Ok(NullityReport { max_k2, annihilated, rho_zero, w_is_zero: w.is_zero() })
}

/// Random element with small integer coefficients and degree at most `deg`.
pub fn random_welement<R: Rng>(rng: &mut R, deg: u32, terms: usize) -> WElement {
    let mut w = WElement::zero();
    for _ in 0..terms {
        let d = rng.gen_range(0..=deg);
        let mut e = [0u32; 4];
        for _ in 0..d {
            e[rng.gen_range(0..4)] += 1;
        }
        let c = rng.gen_range(-3i64..=3);
        w.add_term(NormalMonomial::new(e[0], e[1], e[2], e[3]), Scalar::from_int(c));
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::int;
    use crate::psi::{norm_sq, BasisLabel};
    use crate::weil::Generator;

    #[test]
    fn ket_actions() {
        let p = ParamPoint::symbolic();
        let v = KetVector::ket(0, 0).unwrap();
        assert!(apply(&WElement::am(), &v, &p).unwrap().is_zero());
        let k0 = WElement::generator(Generator::K0);
        for k2 in 0..4 {
            for j2 in (-k2..=k2).step_by(2) {
                let v = KetVector::ket(k2, j2).unwrap();
                let mut e = KetVector::zero();
                e.add_term((k2, j2), Scalar::eps().scale(&rat((k2 + 1) as i64, 2)));
                assert_eq!(apply(&k0, &v, &p).unwrap(), e);
            }
        }
        let jp = WElement::generator(Generator::Jp);
        let out = apply(&jp, &KetVector::ket(1, -1).unwrap(), &p).unwrap();
        let mut e = KetVector::zero();
        e.add_term((1, 1), Scalar::eps());
        assert_eq!(out, e);
    }

    #[test]
    fn trace_examples() {
        for k2 in 0..6 {
            let level = FuzzyLevel::new(k2).unwrap();
            let w = WElement::am().mul(&WElement::ap());
            let expect = Scalar::eps().scale(&rat((k2 + 2) as i64, 2));
            assert_eq!(pi0_trace(&w, level, None).unwrap(), expect);
            assert!(pi0_trace(&WElement::generator(Generator::J0), level, None).unwrap().is_zero());
            assert_eq!(pi0_trace(&WElement::one(), level, None).unwrap(), Scalar::one());
        }
    }

    #[test]
    fn matrix_examples() {
        let level = FuzzyLevel::new(2).unwrap();
        let id = phi_matrix(&PsiElement::one(), 0, level, None).unwrap();
        assert_eq!(id, RectMatrix::identity(3));
        let z = PsiElement::basis(BasisLabel::of(6, 2, 0));
        assert!(phi_matrix(&z, 2, FuzzyLevel::new(1).unwrap(), None).unwrap().is_zero());
        let bad = PsiElement::basis(BasisLabel::of(2, 2, 0));
        assert!(matches!(phi_matrix(&bad, 0, level, None), Err(Error::SectorMismatch { .. })));
    }

    #[test]
    fn norm_oracle_small() {
        for k2 in 1..5 {
            let level = FuzzyLevel::new(k2).unwrap();
            for l in BasisLabel::all_up_to(3) {
                if level.k2 + l.r2 < 0 {
                    continue;
                }
                let m = phi_matrix(&PsiElement::basis(l), l.r2, level, None).unwrap();
                let got = m.frobenius_sq().scale(&rat(1, level.dim() as i64));
                let p = level.point(None).unwrap();
                assert_eq!(got, norm_sq(l.n2, l.r2, &p).unwrap(), "{l} k2={k2}");
            }
        }
    }

    #[test]
    fn rho_consistency_examples() {
        let k0 = WElement::generator(Generator::K0);
        let w2 = WElement::ap().mul(&WElement::am()).mul(&WElement::am());
        for k2 in 0..=5 {
            let level = FuzzyLevel::new(k2).unwrap();
            assert!(rho_consistency(&k0, level, Some(&int(1))).unwrap().pass);
            assert!(rho_consistency(&w2, level, None).unwrap().pass);
        }
        let level = FuzzyLevel::new(3).unwrap();
        let p = level.point(None).unwrap();
        let w = k0.sub(&WElement::scalar(p.rhat.clone())).mul(&WElement::am());
        let w_right = WElement::am().mul(&k0.sub(&WElement::scalar(p.rhat.clone())));
        assert!(rho(&w_right, &p).unwrap().is_zero());
        for (k, j) in level.kets() {
            assert!(apply(&w_right, &KetVector::ket(k, j).unwrap(), &p).unwrap().is_zero());
        }
        assert!(rho_consistency(&w, level, None).unwrap().pass);
    }
}
