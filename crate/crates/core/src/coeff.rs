//! Exact coefficients: finite sums of Gaussian rationals times square roots of
//! squarefree integers times half-integer powers of `eps` and integer powers
//! of `Rh`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Key of a single term: `sqrt(surd) * eps^(eps2/2) * Rh^rhat`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermKey {
    pub eps2: i32,
    pub rhat: i32,
    pub surd: BigUint,
}

impl TermKey {
    pub fn unit() -> Self {
        TermKey { eps2: 0, rhat: 0, surd: BigUint::one() }
    }
}

/// Gaussian rational `re + i*im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gauss {
    pub re: Rational,
    pub im: Rational,
}

impl Gauss {
    pub fn real(re: Rational) -> Self {
        Gauss { re, im: Rational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn mul(&self, o: &Gauss) -> Gauss {
        Gauss {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn add_assign(&mut self, o: &Gauss) {
        self.re += &o.re;
        self.im += &o.im;
    }

    pub fn scale(&self, q: &Rational) -> Gauss {
        Gauss { re: &self.re * q, im: &self.im * q }
    }

    pub fn conj(&self) -> Gauss {
        Gauss { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Gauss {
        let n = self.norm_sq();
        Gauss { re: &self.re / &n, im: -&self.im / &n }
    }
}

/// Squarefree decomposition `n = s^2 * d`, returned as `(s, d)`.
pub fn squarefree_split(n: &BigUint) -> (BigUint, BigUint) {
    let mut n = n.clone();
    let mut s = BigUint::one();
    let mut d = BigUint::one();
    let mut p = BigUint::from(2u32);
    while &p * &p <= n {
        let mut e = 0u32;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            s *= p.pow(e / 2);
            if e % 2 == 1 {
                d *= &p;
            }
        }
        p += 1u32;
    }
    d *= n;
    (s, d)
}

fn prime_factors(n: &BigUint) -> Vec<BigUint> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = BigUint::from(2u32);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            out.push(p.clone());
            while (&n % &p).is_zero() {
                n /= &p;
            }
        }
        p += 1u32;
    }
    if n > BigUint::one() {
        out.push(n);
    }
    out
}

/// Product of two squarefree radicands: `sqrt(d1)*sqrt(d2) = g*sqrt(d)`.
fn surd_mul(d1: &BigUint, d2: &BigUint) -> (BigUint, BigUint) {
    let g = d1.gcd(d2);
    let d = (d1 / &g) * (d2 / &g);
    (g, d)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Scalar {
    terms: BTreeMap<TermKey, Gauss>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::monomial(Gauss::real(q), TermKey::unit())
    }

    pub fn from_gauss(g: Gauss) -> Self {
        Self::monomial(g, TermKey::unit())
    }

    pub fn i() -> Self {
        Self::from_gauss(Gauss { re: Rational::zero(), im: Rational::one() })
    }

    pub fn monomial(c: Gauss, key: TermKey) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(key, c);
        }
        Scalar { terms }
    }

    /// `eps^(eps2/2)`.
    pub fn eps_pow2(eps2: i32) -> Self {
        Self::monomial(
            Gauss::real(Rational::one()),
            TermKey { eps2, rhat: 0, surd: BigUint::one() },
        )
    }

    pub fn eps() -> Self {
        Self::eps_pow2(2)
    }

    pub fn rhat_pow(h: i32) -> Self {
        Self::monomial(
            Gauss::real(Rational::one()),
            TermKey { eps2: 0, rhat: h, surd: BigUint::one() },
        )
    }

    pub fn rhat() -> Self {
        Self::rhat_pow(1)
    }

    /// `sqrt(q)` for a nonnegative rational, as a rational multiple of a surd.
    pub fn sqrt_rational(q: &Rational) -> Result<Self> {
        if q.is_negative() {
            return Err(Error::NotRepresentable(format!("sqrt({q})")));
        }
        if q.is_zero() {
            return Ok(Self::zero());
        }
        let num = q.numer().to_biguint().expect("positive");
        let den = q.denom().to_biguint().expect("positive");
        let (s, d) = squarefree_split(&(num * &den));
        let c = BigRational::new(BigInt::from(s), BigInt::from(den));
        Ok(Self::monomial(Gauss::real(c), TermKey { eps2: 0, rhat: 0, surd: d }))
    }

    pub fn sqrt_int(n: u64) -> Self {
        Self::sqrt_rational(&int(n as i64)).expect("nonnegative")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Gauss)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    fn add_term(&mut self, key: TermKey, c: Gauss) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Scalar { terms: self.terms.iter().map(|(k, v)| (k.clone(), v.scale(q))).collect() }
    }

    pub fn scale_gauss(&self, g: &Gauss) -> Self {
        if g.is_zero() {
            return Self::zero();
        }
        Scalar { terms: self.terms.iter().map(|(k, v)| (k.clone(), v.mul(g))).collect() }
    }

    /// Multiply by an integer times `eps^(eps2/2)`.
    pub fn mul_int_eps(&self, c: &BigInt, eps2: i32) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let q = BigRational::from_integer(c.clone());
        Scalar {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| {
                    (TermKey { eps2: k.eps2 + eps2, rhat: k.rhat, surd: k.surd.clone() }, v.scale(&q))
                })
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Scalar { terms: self.terms.iter().map(|(k, v)| (k.clone(), v.conj())).collect() }
    }

    /// Minimum doubled eps exponent; `None` stands for `+inf` (zero).
    pub fn eps_order(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.eps2).min()
    }

    /// `true` when the value is `O(eps)`.
    pub fn is_o_eps(&self) -> bool {
        self.eps_order().map_or(true, |p| p >= 2)
    }

    pub fn max_eps2(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.eps2).max()
    }

    /// Free of `eps` and `Rh`.
    pub fn is_numeric(&self) -> bool {
        self.terms.keys().all(|k| k.eps2 == 0 && k.rhat == 0)
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (k, v) = self.terms.iter().next().unwrap();
                (k == &TermKey::unit() && v.im.is_zero()).then(|| v.re.clone())
            }
            _ => None,
        }
    }

    /// `Some(c)` when the value is a real number `c*sqrt(d)` with `c` rational.
    pub fn as_real_surd(&self) -> Option<(Rational, BigUint)> {
        match self.terms.len() {
            0 => Some((Rational::zero(), BigUint::one())),
            1 => {
                let (k, v) = self.terms.iter().next().unwrap();
                (k.eps2 == 0 && k.rhat == 0 && v.im.is_zero()).then(|| (v.re.clone(), k.surd.clone()))
            }
            _ => None,
        }
    }

    /// Exact quotient by a single-term divisor.
    pub fn div_exact(&self, y: &Scalar) -> Result<Self> {
        if y.is_zero() {
            return Err(Error::NotDivisible("division by zero".into()));
        }
        if !y.is_monomial() {
            if y.is_numeric() {
                return Ok(self * &y.inverse_numeric()?);
            }
            return Err(Error::NotDivisible(format!("({self}) / ({y})")));
        }
        let (k, v) = y.terms.iter().next().unwrap();
        let sd = BigRational::from_integer(BigInt::from(k.surd.clone()));
        let inv_key = TermKey { eps2: -k.eps2, rhat: -k.rhat, surd: k.surd.clone() };
        let inv = Scalar::monomial(v.inv().scale(&sd.recip()), inv_key);
        Ok(self * &inv)
    }

    /// Inverse of a nonzero element free of `eps` and `Rh`.
    pub fn inverse_numeric(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotDivisible("division by zero".into()));
        }
        if !self.is_numeric() {
            return Err(Error::NotDivisible(format!("1 / ({self})")));
        }
        let mut mult = self.conj();
        let mut acc = self * &mult;
        let mut primes: Vec<BigUint> = Vec::new();
        for k in self.terms.keys() {
            for p in prime_factors(&k.surd) {
                if !primes.contains(&p) {
                    primes.push(p);
                }
            }
        }
        for p in primes {
            let flipped = acc.flip_surd(&p);
            mult = &mult * &flipped;
            acc = &acc * &flipped;
        }
        let q = acc
            .as_rational()
            .ok_or_else(|| Error::NotRepresentable(format!("norm of {self} is not rational")))?;
        Ok(mult.scale(&q.recip()))
    }

    fn flip_surd(&self, p: &BigUint) -> Self {
        Scalar {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| {
                    let v = if (&k.surd % p).is_zero() {
                        Gauss { re: -&v.re, im: -&v.im }
                    } else {
                        v.clone()
                    };
                    (k.clone(), v)
                })
                .collect(),
        }
    }

    /// Replace `Rh` by `value`. Negative powers require an invertible value.
    pub fn subs_rhat(&self, value: &Scalar) -> Result<Self> {
        if self.terms.keys().all(|k| k.rhat == 0) {
            return Ok(self.clone());
        }
        let lo = self.terms.keys().map(|k| k.rhat).min().unwrap_or(0);
        let hi = self.terms.keys().map(|k| k.rhat).max().unwrap_or(0);
        let inv = if lo < 0 {
            Some(Scalar::one().div_exact(value)?)
        } else {
            None
        };
        let mut pows: BTreeMap<i32, Scalar> = BTreeMap::new();
        for h in lo..=hi {
            let p = if h >= 0 {
                value.pow(h as u32)
            } else {
                inv.as_ref().unwrap().pow((-h) as u32)
            };
            pows.insert(h, p);
        }
        let mut out = Scalar::zero();
        for (k, v) in &self.terms {
            let base = Scalar::monomial(
                v.clone(),
                TermKey { eps2: k.eps2, rhat: 0, surd: k.surd.clone() },
            );
            out += &(&base * &pows[&k.rhat]);
        }
        Ok(out)
    }

    /// Replace `eps` by a rational value. `eps = 0` keeps only `eps`-free
    /// terms and fails on negative powers.
    pub fn subs_eps(&self, eps: &Rational) -> Result<Self> {
        if eps.is_negative() {
            return Err(Error::InvalidPoint(format!("eps = {eps} < 0")));
        }
        let mut out = Scalar::zero();
        if eps.is_zero() {
            for (k, v) in &self.terms {
                if k.eps2 < 0 {
                    return Err(Error::InvalidPoint(format!("negative eps power in {self} at eps = 0")));
                }
                if k.eps2 == 0 {
                    out.add_term(k.clone(), v.clone());
                }
            }
            return Ok(out);
        }
        let root = Scalar::sqrt_rational(eps)?;
        for (k, v) in &self.terms {
            let half = k.eps2.div_euclid(2);
            let odd = k.eps2.rem_euclid(2) == 1;
            let q = pow_rational(eps, half);
            let base = Scalar::monomial(
                v.scale(&q),
                TermKey { eps2: 0, rhat: k.rhat, surd: k.surd.clone() },
            );
            if odd {
                out += &(&base * &root);
            } else {
                out += &base;
            }
        }
        Ok(out)
    }

    /// Numeric value at positive rational `eps` and `Rh`.
    pub fn evaluate(&self, eps: &Rational, rhat: &Rational) -> Result<Self> {
        if !eps.is_positive() || !rhat.is_positive() {
            return Err(Error::InvalidPoint(format!("eps = {eps}, Rh = {rhat}")));
        }
        self.subs_rhat(&Scalar::from_rational(rhat.clone()))?.subs_eps(eps)
    }

    pub fn evaluate_float(&self, eps: f64, rhat: f64) -> Complex64 {
        let mut out = Complex64::new(0.0, 0.0);
        for (k, v) in &self.terms {
            let c = Complex64::new(v.re.to_f64().unwrap_or(f64::NAN), v.im.to_f64().unwrap_or(f64::NAN));
            let f = k.surd.to_f64().unwrap_or(f64::NAN).sqrt()
                * eps.powf(k.eps2 as f64 / 2.0)
                * rhat.powi(k.rhat);
            out += c * f;
        }
        out
    }

    /// Value of a numeric Scalar as a complex float.
    pub fn to_complex(&self) -> Complex64 {
        self.evaluate_float(1.0, 1.0)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Scalar::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Square root of a single-term Scalar with real positive rational part and
    /// even exponents where needed.
    pub fn sqrt_monomial(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (k, v) = match self.terms.iter().next() {
            Some(t) if self.is_monomial() => t,
            _ => return Err(Error::NotRepresentable(format!("sqrt({self})"))),
        };
        if !v.im.is_zero()
            || k.rhat % 2 != 0
            || k.eps2 % 2 != 0
            || k.surd != BigUint::one()
            || v.re.is_negative()
        {
            return Err(Error::NotRepresentable(format!("sqrt({self})")));
        }
        let r = Scalar::sqrt_rational(&v.re)?;
        let key = TermKey { eps2: k.eps2 / 2, rhat: k.rhat / 2, surd: BigUint::one() };
        Ok(&r * &Scalar::monomial(Gauss::real(Rational::one()), key))
    }

    /// Sign of a real numeric Scalar: `Some(-1|0|1)`, `None` when not decidable
    /// (complex or symbolic values).
    pub fn real_sign(&self) -> Option<i32> {
        if self.is_zero() {
            return Some(0);
        }
        if !self.is_numeric() || self.terms.values().any(|v| !v.im.is_zero()) {
            return None;
        }
        if let Some((c, _)) = self.as_real_surd() {
            return Some(if c.is_positive() { 1 } else { -1 });
        }
        let f = self.to_complex().re;
        if f.abs() > 1e-9 {
            Some(if f > 0.0 { 1 } else { -1 })
        } else {
            None
        }
    }

    /// Floor of a real nonnegative value of the form `c*sqrt(d)`.
    pub fn floor_real_surd(&self) -> Option<BigInt> {
        let (c, d) = self.as_real_surd()?;
        if c.is_negative() {
            return None;
        }
        let sq = &c * &c * BigRational::from_integer(BigInt::from(d));
        let fl = sq.floor().to_integer().to_biguint()?;
        Some(BigInt::from(fl.sqrt()))
    }

    /// Real part of a numeric value only when it is exactly rational.
    pub fn rational_value(&self) -> Option<Rational> {
        self.as_rational()
    }
}

pub fn pow_rational(q: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(q.recip(), (-e) as usize)
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, o: Scalar) -> Scalar {
        self += &o;
        self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        for (k, v) in &o.terms {
            self.add_term(k.clone(), v.clone());
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        for (k, v) in &o.terms {
            self.add_term(k.clone(), Gauss { re: -&v.re, im: -&v.im });
        }
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= o;
        out
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, o: Scalar) -> Scalar {
        self -= &o;
        self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), Gauss { re: -&v.re, im: -&v.im }))
                .collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (k1, v1) in &self.terms {
            for (k2, v2) in &o.terms {
                let (g, d) = surd_mul(&k1.surd, &k2.surd);
                let mut c = v1.mul(v2);
                if g != BigUint::one() {
                    c = c.scale(&BigRational::from_integer(BigInt::from(g)));
                }
                out.add_term(TermKey { eps2: k1.eps2 + k2.eps2, rhat: k1.rhat + k2.rhat, surd: d }, c);
            }
        }
        out
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::from_rational(q)
    }
}

fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("({}/{})", q.numer(), q.denom())
    }
}

fn fmt_half(p2: i32) -> String {
    if p2 % 2 == 0 {
        (p2 / 2).to_string()
    } else {
        format!("({}/2)", p2)
    }
}

fn fmt_term(k: &TermKey, v: &Gauss) -> (bool, String) {
    let mut factors = Vec::new();
    if k.surd != BigUint::one() {
        factors.push(format!("sqrt({})", k.surd));
    }
    match k.eps2 {
        0 => {}
        2 => factors.push("eps".into()),
        p => factors.push(format!("eps^{}", fmt_half(p))),
    }
    match k.rhat {
        0 => {}
        1 => factors.push("Rh".into()),
        h => factors.push(format!("Rh^{h}")),
    }
    let (neg, coeff) = if v.im.is_zero() {
        let a = v.re.abs();
        let c = if a.is_one() && !factors.is_empty() { None } else { Some(fmt_rational(&a)) };
        (v.re.is_negative(), c)
    } else if v.re.is_zero() {
        let a = v.im.abs();
        let c = if a.is_one() { "i".to_string() } else { format!("{}*i", fmt_rational(&a)) };
        (v.im.is_negative(), Some(c))
    } else {
        let sign = if v.im.is_negative() { "-" } else { "+" };
        let im = v.im.abs();
        let im_s = if im.is_one() { "i".to_string() } else { format!("{}*i", fmt_rational(&im)) };
        let re_s = if v.re.is_integer() {
            v.re.numer().to_string()
        } else {
            format!("{}/{}", v.re.numer(), v.re.denom())
        };
        (false, Some(format!("({re_s}{sign}{im_s})")))
    };
    let mut parts = Vec::new();
    if let Some(c) = coeff {
        parts.push(c);
    }
    parts.extend(factors);
    (neg, parts.join("*"))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (k, v)) in self.terms.iter().enumerate() {
            let (neg, body) = fmt_term(k, v);
            match (idx, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Parse(format!("trailing input at {} in {s:?}", p.pos)));
        }
        Ok(v)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{}' at {}", c as char, self.pos)))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            let end = self.pos + kw.len();
            let next_alnum = self.src.get(end).is_some_and(|c| c.is_ascii_alphanumeric());
            if !next_alnum {
                self.pos = end;
                return true;
            }
        }
        false
    }

    fn expr(&mut self) -> Result<Scalar> {
        let mut acc = if self.eat(b'-') { -self.term()? } else { self.term()? };
        loop {
            if self.eat(b'+') {
                acc += &self.term()?;
            } else if self.eat(b'-') {
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.eat(b'/') {
                let d = self.unary()?;
                acc = acc.div_exact(&d)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        self.atom()
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!("expected integer at {start}")));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    /// Exponent: integer, `-integer`, or parenthesized `(p/q)` with `q` in {1,2}.
    fn exponent2(&mut self) -> Result<i32> {
        let neg_outer = self.eat(b'-');
        let (num, den) = if self.eat(b'(') {
            let neg = self.eat(b'-');
            let n = self.integer()?;
            let d = if self.eat(b'/') { self.integer()? } else { BigInt::one() };
            self.expect(b')')?;
            (if neg { -n } else { n }, d)
        } else {
            (self.integer()?, BigInt::one())
        };
        let num = if neg_outer { -num } else { num };
        let two = BigInt::from(2);
        let doubled = if den == BigInt::one() {
            num * &two
        } else if den == two {
            num
        } else {
            return Err(Error::Parse("exponent denominator must be 1 or 2".into()));
        };
        doubled.to_i32().ok_or_else(|| Error::Parse("exponent too large".into()))
    }

    fn atom(&mut self) -> Result<Scalar> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Scalar::from_rational(BigRational::from_integer(n)))
            }
            _ => {
                if self.keyword("sqrt") {
                    self.expect(b'(')?;
                    let v = self.expr()?;
                    self.expect(b')')?;
                    let q = v
                        .as_rational()
                        .ok_or_else(|| Error::Parse("sqrt argument must be rational".into()))?;
                    Scalar::sqrt_rational(&q).map_err(|e| Error::Parse(e.to_string()))
                } else if self.keyword("eps") {
                    let e = if self.eat(b'^') { self.exponent2()? } else { 2 };
                    Ok(Scalar::eps_pow2(e))
                } else if self.keyword("Rh") {
                    let e = if self.eat(b'^') { self.exponent2()? } else { 2 };
                    if e % 2 != 0 {
                        return Err(Error::Parse("Rh exponent must be an integer".into()));
                    }
                    Ok(Scalar::rhat_pow(e / 2))
                } else if self.keyword("i") {
                    Ok(Scalar::i())
                } else {
                    Err(Error::Parse(format!("unexpected input at {}", self.pos)))
                }
            }
        }
    }
}

/// Parse a rational like `3`, `-1/3` or `2.5`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| Error::Parse(s.into()))?;
        let d: BigInt = b.trim().parse().map_err(|_| Error::Parse(s.into()))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((a, b)) = s.split_once('.') {
        let neg = a.starts_with('-');
        let whole: BigInt = if a.is_empty() || a == "-" { BigInt::zero() } else { a.parse().map_err(|_| Error::Parse(s.into()))? };
        let frac: BigInt = b.parse().map_err(|_| Error::Parse(s.into()))?;
        let scale = num_traits::pow(BigInt::from(10), b.len());
        let f = BigRational::new(frac, scale);
        let w = BigRational::from_integer(whole.abs());
        let v = w + f;
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| Error::Parse(s.into()))?;
    Ok(BigRational::from_integer(n))
}

/// Render a doubled half-integer as `3/2`, `-1/2`, `2`.
pub fn fmt_half_int(x2: i32) -> String {
    if x2 % 2 == 0 {
        (x2 / 2).to_string()
    } else {
        format!("{x2}/2")
    }
}

/// Parse `3/2`, `1`, `-1/2` into the doubled integer.
pub fn parse_half_int(s: &str) -> Result<i32> {
    let q = parse_rational(s)?;
    let d = q * int(2);
    if !d.is_integer() {
        return Err(Error::Parse(format!("{s} is not a half-integer")));
    }
    d.to_integer().to_i32().ok_or_else(|| Error::Parse(s.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn like_terms_merge() {
        assert_eq!(s("sqrt(2)*eps") + s("sqrt(2)*eps"), s("2*sqrt(2)*eps"));
        assert_eq!(s("sqrt(2) + sqrt(3)").len(), 2);
        let x = s("3 + i*eps - Rh");
        assert!((&x - &x).is_zero());
    }

    #[test]
    fn surd_products() {
        assert_eq!(s("sqrt(2)") * s("sqrt(2)"), Scalar::from_int(2));
        assert_eq!(s("sqrt(6)") * s("sqrt(10)"), s("2*sqrt(15)"));
        assert_eq!(s("eps^(1/2)") * s("eps^(1/2)") * Scalar::rhat(), s("eps*Rh"));
        assert_eq!(Scalar::sqrt_int(12), s("2*sqrt(3)"));
    }

    #[test]
    fn exact_division() {
        assert_eq!(s("2*sqrt(2)*eps^2").div_exact(&s("sqrt(2)*eps")).unwrap(), s("2*eps"));
        let y = s("2*Rh + eps");
        assert!(matches!(Scalar::one().div_exact(&y), Err(Error::NotDivisible(_))));
        let at = y.evaluate(&int(1), &rat(3, 2)).unwrap();
        assert_eq!(Scalar::one().div_exact(&at).unwrap(), Scalar::from_rational(rat(1, 4)));
    }

    #[test]
    fn numeric_inverse_with_surds() {
        let x = s("1 + sqrt(2) + i*sqrt(3)");
        let inv = x.inverse_numeric().unwrap();
        assert_eq!(&x * &inv, Scalar::one());
    }

    #[test]
    fn conjugation() {
        assert_eq!(s("3 + 2*i").conj(), s("3 - 2*i"));
        assert_eq!(s("sqrt(5)*eps").conj(), s("sqrt(5)*eps"));
    }

    #[test]
    fn evaluation() {
        assert_eq!(s("eps*Rh").evaluate(&int(2), &rat(5, 2)).unwrap(), Scalar::from_int(5));
        assert_eq!(s("eps^(1/2)").subs_eps(&int(2)).unwrap(), s("sqrt(2)"));
        let f = s("sqrt(2)*eps").evaluate_float(1.0 / 3.0, 1.0);
        assert!((f.re - 0.471_404_520_791_031_7).abs() < 1e-12);
    }

    #[test]
    fn eps_orders() {
        assert_eq!(s("eps*sqrt(3) + eps^2").eps_order(), Some(2));
        assert_eq!(s("1 + eps").eps_order(), Some(0));
        assert_eq!(Scalar::zero().eps_order(), None);
    }

    #[test]
    fn text_round_trip() {
        let x = s("(3/2)*sqrt(2)*eps^(1/2)*Rh^-1 + i*eps");
        assert_eq!(x.to_string(), "(3/2)*sqrt(2)*eps^(1/2)*Rh^-1 + i*eps");
        assert_eq!(s(&x.to_string()), x);
        let y = s("-(1/2) + (2-3*i)*Rh^2 - eps");
        assert_eq!(s(&y.to_string()), y);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-1/3").unwrap(), rat(-1, 3));
        assert_eq!(parse_rational("2.5").unwrap(), rat(5, 2));
        assert_eq!(parse_half_int("3/2").unwrap(), 3);
        assert!(parse_half_int("1/3").is_err());
    }
}
