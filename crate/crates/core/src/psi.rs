//! The traceless subspace, its `Xi(n,r,m)` basis, the projections `rho` and
//! `rho*`, the induced products, the sesquilinear form and norms.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::coeff::{fmt_half_int, int, rat, Rational, Scalar};
use crate::error::{Error, Result};
use crate::poly::{BiPoly, JPoly};
use crate::weil::{Generator, WElement};

/// Basis label `(n, r, m)` with doubled storage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisLabel {
    pub n2: i32,
    pub r2: i32,
    pub m2: i32,
}

impl BasisLabel {
    pub fn new(n2: i32, r2: i32, m2: i32) -> Result<Self> {
        let ok = n2 >= 0
            && r2.abs() <= n2
            && m2.abs() <= n2
            && (n2 + r2) % 2 == 0
            && (n2 + m2) % 2 == 0;
        if ok {
            Ok(BasisLabel { n2, r2, m2 })
        } else {
            Err(Error::InvalidLabel { n: n2, r: r2, m: m2 })
        }
    }

    /// Unchecked constructor for labels known to be valid.
    pub const fn of(n2: i32, r2: i32, m2: i32) -> Self {
        BasisLabel { n2, r2, m2 }
    }

    pub fn zero() -> Self {
        BasisLabel { n2: 0, r2: 0, m2: 0 }
    }

    /// All labels with doubled `n` in `0..=n2_max`, in canonical order.
    pub fn all_up_to(n2_max: i32) -> Vec<BasisLabel> {
        let mut out = Vec::new();
        for n2 in 0..=n2_max {
            out.extend(BasisLabel::with_n(n2));
        }
        out
    }

    pub fn with_n(n2: i32) -> Vec<BasisLabel> {
        let mut out = Vec::new();
        for r2 in (-n2..=n2).step_by(2) {
            for m2 in (-n2..=n2).step_by(2) {
                out.push(BasisLabel { n2, r2, m2 });
            }
        }
        out
    }

    /// All labels with fixed doubled `r` and `n <= n2_max / 2`.
    pub fn in_sector(r2: i32, n2_max: i32) -> Vec<BasisLabel> {
        BasisLabel::all_up_to(n2_max).into_iter().filter(|l| l.r2 == r2).collect()
    }

    pub fn is_half_integer(&self) -> bool {
        self.n2 % 2 != 0
    }

    fn index(&self) -> usize {
        let n2 = self.n2 as usize;
        let before: usize = (0..n2).map(|k| (k + 1) * (k + 1)).sum();
        let ri = ((self.r2 + self.n2) / 2) as usize;
        let mi = ((self.m2 + self.n2) / 2) as usize;
        before + ri * (n2 + 1) + mi
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Xi({},{},{})", fmt_half_int(self.n2), fmt_half_int(self.r2), fmt_half_int(self.m2))
    }
}

/// Evaluation point for `eps` and `Rh`. `eps = None` keeps `eps` symbolic;
/// `rhat` may be the symbol itself, an expression in `eps`, or a number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamPoint {
    pub eps: Option<Rational>,
    pub rhat: Scalar,
}

impl ParamPoint {
    pub fn symbolic() -> Self {
        ParamPoint { eps: None, rhat: Scalar::rhat() }
    }

    /// Symbolic `eps` with `Rh = eps (k + 1/2)`.
    pub fn symbolic_level(k2: i32) -> Self {
        ParamPoint { eps: None, rhat: Scalar::eps().scale(&rat((k2 + 1) as i64, 2)) }
    }

    pub fn numeric(eps: Rational, rhat: Rational) -> Result<Self> {
        ParamPoint::numeric_surd(eps, Scalar::from_rational(rhat))
    }

    pub fn numeric_surd(eps: Rational, rhat: Scalar) -> Result<Self> {
        let p = ParamPoint { eps: Some(eps), rhat };
        p.validate()?;
        Ok(p)
    }

    /// `Rh = eps (k + 1/2)`, so `R^2 = eps^2 k (k + 1)`.
    pub fn at_level(eps: Rational, k2: i32) -> Result<Self> {
        if k2 < 0 {
            return Err(Error::InvalidPoint(format!("k = {} < 0", fmt_half_int(k2))));
        }
        let rhat = &eps * rat((k2 + 1) as i64, 2);
        ParamPoint::numeric(eps, rhat)
    }

    /// From `R^2`: `Rh = (R^2 + eps^2 / 4)^(1/2)`.
    pub fn from_radius_sq(eps: Rational, r_sq: Rational) -> Result<Self> {
        let rh2 = &r_sq + &eps * &eps * rat(1, 4);
        ParamPoint::numeric_surd(eps, Scalar::sqrt_rational(&rh2)?)
    }

    pub fn is_numeric(&self) -> bool {
        self.eps.is_some() && self.rhat.is_numeric()
    }

    pub fn is_symbolic(&self) -> bool {
        self.eps.is_none() && self.rhat == Scalar::rhat()
    }

    fn validate(&self) -> Result<()> {
        let Some(eps) = &self.eps else { return Ok(()) };
        if eps.is_negative() {
            return Err(Error::InvalidPoint(format!("eps = {eps} < 0")));
        }
        let (c, _) = self
            .rhat
            .as_real_surd()
            .ok_or_else(|| Error::InvalidPoint(format!("Rh = {} is not a positive real", self.rhat)))?;
        if !c.is_positive() {
            return Err(Error::InvalidPoint(format!("Rh = {} <= 0", self.rhat)));
        }
        let r2 = self.r_squared()?;
        if r2.real_sign() == Some(-1) {
            return Err(Error::InvalidPoint(format!("R^2 = {r2} < 0")));
        }
        Ok(())
    }

    /// Apply the point to a coefficient.
    pub fn specialize(&self, x: &Scalar) -> Result<Scalar> {
        let y = if self.rhat == Scalar::rhat() { x.clone() } else { x.subs_rhat(&self.rhat)? };
        match &self.eps {
            Some(e) => y.subs_eps(e),
            None => Ok(y),
        }
    }

    pub fn rhat_value(&self) -> Result<Scalar> {
        self.specialize(&Scalar::rhat())
    }

    pub fn eps_value(&self) -> Scalar {
        match &self.eps {
            Some(e) => Scalar::from_rational(e.clone()),
            None => Scalar::eps(),
        }
    }

    /// `R^2 = Rh^2 - eps^2 / 4`.
    pub fn r_squared(&self) -> Result<Scalar> {
        let rh = self.rhat_value()?;
        let e = self.eps_value();
        Ok(&(&rh * &rh) - &(&e * &e).scale(&rat(1, 4)))
    }

    pub fn describe(&self) -> String {
        let e = self.eps.as_ref().map_or("eps".to_string(), |e| e.to_string());
        format!("eps={e}, Rh={}", self.rhat)
    }
}

/// Element of the traceless subspace in the `Xi` basis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PsiElement {
    coeffs: BTreeMap<BasisLabel, Scalar>,
}

impl PsiElement {
    pub fn zero() -> Self {
        PsiElement { coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        PsiElement::basis(BasisLabel::zero())
    }

    pub fn basis(l: BasisLabel) -> Self {
        PsiElement::term(l, Scalar::one())
    }

    pub fn term(l: BasisLabel, c: Scalar) -> Self {
        let mut x = PsiElement::zero();
        x.add_term(l, c);
        x
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisLabel, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &BasisLabel> {
        self.coeffs.keys()
    }

    pub fn coeff(&self, l: &BasisLabel) -> Scalar {
        self.coeffs.get(l).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, l: BasisLabel, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(l).or_default();
        *e += &c;
        if e.is_zero() {
            self.coeffs.remove(&l);
        }
    }

    pub fn add(&self, o: &PsiElement) -> PsiElement {
        let mut x = self.clone();
        for (l, c) in &o.coeffs {
            x.add_term(*l, c.clone());
        }
        x
    }

    pub fn sub(&self, o: &PsiElement) -> PsiElement {
        let mut x = self.clone();
        for (l, c) in &o.coeffs {
            x.add_term(*l, -c);
        }
        x
    }

    pub fn scale(&self, c: &Scalar) -> PsiElement {
        let mut x = PsiElement::zero();
        for (l, v) in &self.coeffs {
            x.add_term(*l, v * c);
        }
        x
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<PsiElement> {
        let mut x = PsiElement::zero();
        for (l, c) in &self.coeffs {
            x.add_term(*l, f(c)?);
        }
        Ok(x)
    }

    pub fn specialize(&self, p: &ParamPoint) -> Result<PsiElement> {
        self.map_coeffs(|c| p.specialize(c))
    }

    /// Single doubled `r` of the support, `None` if empty or mixed.
    pub fn sector_r(&self) -> Option<i32> {
        let mut it = self.coeffs.keys().map(|l| l.r2);
        let first = it.next()?;
        it.all(|r| r == first).then_some(first)
    }

    pub fn in_sector(&self, r2: i32) -> bool {
        self.coeffs.keys().all(|l| l.r2 == r2)
    }

    /// Minimum doubled eps order over all coefficients.
    pub fn eps_order(&self) -> Option<i32> {
        self.coeffs.values().filter_map(Scalar::eps_order).min()
    }

    /// Lift to `W` through the cached basis elements.
    pub fn lift(&self) -> WElement {
        let mut w = WElement::zero();
        for (l, c) in &self.coeffs {
            w.add_assign(&xi_entry(*l).w.scale(c));
        }
        w
    }

    /// `pi_n`: the part with doubled label `n2`.
    pub fn pi_n(&self, n2: i32) -> PsiElement {
        let mut x = PsiElement::zero();
        for (l, c) in &self.coeffs {
            if l.n2 == n2 {
                x.add_term(*l, c.clone());
            }
        }
        x
    }

    /// `pi_0`: coefficient of the unit.
    pub fn pi0(&self) -> Scalar {
        self.coeff(&BasisLabel::zero())
    }

    /// `(Xi(n,r,m))^dagger = (-1)^(r+m) Xi(n,-r,-m)`, coefficients conjugated.
    pub fn dagger_label(&self) -> PsiElement {
        let mut x = PsiElement::zero();
        for (l, c) in &self.coeffs {
            let sign = if ((l.r2 + l.m2) / 2) % 2 == 0 { 1 } else { -1 };
            x.add_term(BasisLabel::of(l.n2, -l.r2, -l.m2), c.conj().scale(&int(sign)));
        }
        x
    }

    pub fn ad_j0(&self) -> PsiElement {
        let mut x = PsiElement::zero();
        for (l, c) in &self.coeffs {
            x.add_term(*l, c * &Scalar::eps().scale(&rat(l.m2 as i64, 2)));
        }
        x
    }

    pub fn ad_k0(&self) -> PsiElement {
        let mut x = PsiElement::zero();
        for (l, c) in &self.coeffs {
            x.add_term(*l, c * &Scalar::eps().scale(&rat(l.r2 as i64, 2)));
        }
        x
    }

    /// `Ad J+ Xi(n,r,m) = eps ((n-m)(n+m+1))^(1/2) Xi(n,r,m+1)`.
    pub fn ad_jp(&self) -> PsiElement {
        let mut x = PsiElement::zero();
        for (l, c) in &self.coeffs {
            if l.m2 < l.n2 {
                let f = ladder(l.n2 - l.m2, l.n2 + l.m2 + 2);
                x.add_term(BasisLabel::of(l.n2, l.r2, l.m2 + 2), c * &f);
            }
        }
        x
    }

    /// `Ad J- Xi(n,r,m) = eps ((n+m)(n-m+1))^(1/2) Xi(n,r,m-1)`.
    pub fn ad_jm(&self) -> PsiElement {
        let mut x = PsiElement::zero();
        for (l, c) in &self.coeffs {
            if l.m2 > -l.n2 {
                let f = ladder(l.n2 + l.m2, l.n2 - l.m2 + 2);
                x.add_term(BasisLabel::of(l.n2, l.r2, l.m2 - 2), c * &f);
            }
        }
        x
    }

    /// `Delta Xi(n,r,m) = eps^2 n (n+1) Xi(n,r,m)`.
    pub fn laplacian(&self) -> PsiElement {
        let mut x = PsiElement::zero();
        for (l, c) in &self.coeffs {
            let f = Scalar::eps().pow(2).scale(&rat((l.n2 * (l.n2 + 2)) as i64, 4));
            x.add_term(*l, c * &f);
        }
        x
    }

    /// `Xi(n,r,m) -> n Xi(n,r,m)`.
    pub fn delta_n(&self) -> PsiElement {
        let mut x = PsiElement::zero();
        for (l, c) in &self.coeffs {
            x.add_term(*l, c.scale(&rat(l.n2 as i64, 2)));
        }
        x
    }

    pub fn to_json(&self) -> serde_json::Value {
        let items: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|(l, c)| serde_json::json!({"n2": l.n2, "r2": l.r2, "m2": l.m2, "coeff": c.to_string()}))
            .collect();
        serde_json::Value::Array(items)
    }
}

fn ladder(a2: i32, b2: i32) -> Scalar {
    // eps * sqrt((a2/2) (b2/2))
    &Scalar::sqrt_rational(&rat((a2 * b2) as i64, 4)).expect("nonnegative") * &Scalar::eps()
}

impl fmt::Display for PsiElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (l, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{l}")?;
        }
        Ok(())
    }
}

/// Cached data for one basis element.
#[derive(Debug)]
pub struct XiEntry {
    pub label: BasisLabel,
    pub w: WElement,
    pub reduced: BiPoly,
    /// Reduced polynomial in `J0` with `K0 -> Rh`.
    pub q: JPoly,
    /// Same with `K0 -> Rh - eps r` (left ideal).
    pub q_star: JPoly,
}

/// Default cache size: doubled `n` up to 8.
pub const DEFAULT_CACHE_N2: i32 = 8;

struct XiCache {
    n2_max: i32,
    slots: Vec<OnceLock<Arc<XiEntry>>>,
}

static CACHE: OnceLock<XiCache> = OnceLock::new();

fn cache() -> &'static XiCache {
    CACHE.get_or_init(|| {
        let n2_max = DEFAULT_CACHE_N2;
        let count = BasisLabel::all_up_to(n2_max).len();
        XiCache { n2_max, slots: (0..count).map(|_| OnceLock::new()).collect() }
    })
}

/// Build every cached entry up to doubled `n2_max` (clamped to the cache size).
pub fn warm_up(n2_max: i32) {
    for l in BasisLabel::all_up_to(n2_max.min(cache().n2_max)) {
        xi_entry(l);
    }
}

pub fn xi_entry(l: BasisLabel) -> Arc<XiEntry> {
    let c = cache();
    if l.n2 <= c.n2_max {
        c.slots[l.index()].get_or_init(|| Arc::new(build_entry(l))).clone()
    } else {
        Arc::new(build_entry(l))
    }
}

fn factorial_half(n2: i32) -> BigInt {
    // Argument is a doubled integer label.
    let n = (n2 / 2) as u64;
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

fn xi_prefactor(l: BasisLabel) -> Scalar {
    let num = factorial_half(l.n2 + l.m2);
    let den = factorial_half(2 * l.n2) * factorial_half(l.n2 - l.m2);
    Scalar::sqrt_rational(&Rational::new(num, den)).expect("positive")
}

fn top_word(l: BasisLabel) -> WElement {
    WElement::monomial(((l.n2 + l.r2) / 2) as u32, 0, 0, ((l.n2 - l.r2) / 2) as u32)
}

/// `Xi(n,r,m)` built with the exact commutator and an exact division by `eps`
/// at every step.
pub fn xi_welement(l: BasisLabel) -> Result<WElement> {
    BasisLabel::new(l.n2, l.r2, l.m2)?;
    let jm = WElement::generator(Generator::Jm);
    let mut w = top_word(l);
    for _ in 0..(l.n2 - l.m2) / 2 {
        w = WElement::ad(&jm, &w).div_eps()?;
    }
    Ok(w.scale(&xi_prefactor(l)))
}

/// `Xi(n,r,m)` built with the derivation form of `(1/eps) Ad J-`.
pub fn xi_welement_eps0(l: BasisLabel) -> Result<WElement> {
    BasisLabel::new(l.n2, l.r2, l.m2)?;
    let mut w = top_word(l);
    for _ in 0..(l.n2 - l.m2) / 2 {
        w = WElement::ad_eps0(Generator::Jm, &w)?;
    }
    Ok(w.scale(&xi_prefactor(l)))
}

fn build_entry(l: BasisLabel) -> XiEntry {
    let w = xi_welement(l).expect("valid label");
    let red = w.reduced_form().expect("single sector");
    let k = Scalar::rhat();
    let k_star = &k - &Scalar::eps().scale(&rat(l.r2 as i64, 2));
    let q = red.poly.subs_k(&k);
    let q_star = red.poly.subs_k(&k_star);
    XiEntry { label: l, w, reduced: red.poly, q, q_star }
}

/// Public accessor for the normal-ordered basis element.
pub fn xi(n2: i32, r2: i32, m2: i32) -> Result<WElement> {
    let l = BasisLabel::new(n2, r2, m2)?;
    Ok(xi_entry(l).w.clone())
}

/// `a±^{r+m} b±^{r-m} q(J0)` after `K0` has been evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedSector {
    pub r2: i32,
    pub m2: i32,
    pub q: JPoly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    /// Kernel is the right ideal `W (K0 - Rh)`.
    Rho,
    /// Kernel is the left ideal `(K0 - Rh) W`.
    RhoStar,
}

/// Triangular solve of a reduced sector against the basis polynomials.
pub fn decompose_symbolic(s: &ReducedSector, proj: Projection) -> Result<PsiElement> {
    let mut q = s.q.clone();
    let m_min = s.r2.abs().max(s.m2.abs());
    let mut out = PsiElement::zero();
    while let Some(d) = q.degree() {
        let l = BasisLabel::new(m_min + 2 * d as i32, s.r2, s.m2)?;
        let entry = xi_entry(l);
        let qn = match proj {
            Projection::Rho => &entry.q,
            Projection::RhoStar => &entry.q_star,
        };
        if qn.degree() != Some(d) {
            return Err(Error::NotDivisible(format!("degree of {l} is not {d}")));
        }
        let c = q.lead().unwrap().div_exact(qn.lead().unwrap())?;
        q = q.sub(&qn.scale(&c));
        if q.degree() >= Some(d) {
            return Err(Error::NotDivisible(format!("leading term of {l} did not cancel")));
        }
        out.add_term(l, c);
    }
    Ok(out)
}

pub fn decompose_reduced(s: &ReducedSector, p: &ParamPoint) -> Result<PsiElement> {
    decompose_symbolic(s, Projection::Rho)?.specialize(p)
}

/// Reduced sectors of `w` with `K0` evaluated according to `proj`.
pub fn reduced_sectors(w: &WElement, proj: Projection) -> Result<Vec<ReducedSector>> {
    let mut out = Vec::new();
    for (r2, m2, part) in w.sector_decompose() {
        let red = part.reduced_form()?;
        let k = match proj {
            Projection::Rho => Scalar::rhat(),
            Projection::RhoStar => &Scalar::rhat() - &Scalar::eps().scale(&rat(r2 as i64, 2)),
        };
        out.push(ReducedSector { r2, m2, q: red.poly.subs_k(&k) });
    }
    Ok(out)
}

pub fn project(w: &WElement, proj: Projection, p: &ParamPoint) -> Result<PsiElement> {
    let mut out = PsiElement::zero();
    for s in reduced_sectors(w, proj)? {
        out = out.add(&decompose_symbolic(&s, proj)?);
    }
    if p.is_symbolic() {
        Ok(out)
    } else {
        out.specialize(p)
    }
}

pub fn rho(w: &WElement, p: &ParamPoint) -> Result<PsiElement> {
    project(w, Projection::Rho, p)
}

pub fn rho_star(w: &WElement, p: &ParamPoint) -> Result<PsiElement> {
    project(w, Projection::RhoStar, p)
}

pub fn product_rho(x: &PsiElement, y: &PsiElement, p: &ParamPoint) -> Result<PsiElement> {
    rho(&x.lift().mul(&y.lift()), p)
}

pub fn product_rho_star(x: &PsiElement, y: &PsiElement, p: &ParamPoint) -> Result<PsiElement> {
    rho_star(&x.lift().mul(&y.lift()), p)
}

/// `rho` of a product of several factors, lifted and multiplied once.
pub fn product_many(xs: &[&PsiElement], p: &ParamPoint) -> Result<PsiElement> {
    let mut w = WElement::one();
    for x in xs {
        w = w.mul(&x.lift());
    }
    rho(&w, p)
}

/// `pi_0(rho(w))`, computed from the `(0,0)` sector only.
pub fn pi0_of(w: &WElement, p: &ParamPoint) -> Result<Scalar> {
    let mut part = WElement::zero();
    for (m, c) in w.terms() {
        if m.sector() == (0, 0) {
            part.add_term(*m, c.clone());
        }
    }
    let x = rho(&part, &ParamPoint::symbolic())?;
    p.specialize(&x.pi0())
}

/// `<x, y> = pi_0(rho(x^dagger y))`.
pub fn inner(x: &PsiElement, y: &PsiElement, p: &ParamPoint) -> Result<Scalar> {
    pi0_of(&x.lift().dagger().mul(&y.lift()), p)
}

/// Closed form of `||Xi(n,r,m)||^2` as a polynomial in `eps`, `Rh`.
pub fn norm_sq_symbolic(n2: i32, r2: i32) -> Scalar {
    let nr_plus = ((n2 + r2) / 2) as i64;
    let nr_minus = ((n2 - r2) / 2) as i64;
    let fact = |k: i64| (1..=k).fold(BigInt::one(), |a, i| a * BigInt::from(i));
    let c = Rational::new(fact(nr_plus) * fact(nr_minus), fact(n2 as i64 + 1));
    let two_rh = Scalar::rhat().scale(&int(2));
    let mut out = Scalar::from_rational(c);
    for s in 1..=nr_minus {
        out = &out * &(&two_rh - &Scalar::eps().scale(&int(s)));
    }
    for s in 1..=nr_plus {
        out = &out * &(&two_rh + &Scalar::eps().scale(&int(s)));
    }
    out
}

pub fn norm_sq(n2: i32, r2: i32, p: &ParamPoint) -> Result<Scalar> {
    BasisLabel::new(n2, r2, if n2 % 2 == 0 { 0 } else { 1 })?;
    p.specialize(&norm_sq_symbolic(n2, r2))
}

fn cmp_surd_int(c: &Rational, d: &num_bigint::BigUint, k: i64) -> Ordering {
    // c sqrt(d) vs k, with c >= 0.
    if k < 0 {
        return Ordering::Greater;
    }
    let lhs = c * c * Rational::from_integer(BigInt::from(d.clone()));
    lhs.cmp(&int(k * k))
}

/// Sign of the norm by the three-case rule in `t = 2 Rh / eps`.
pub fn norm_sign(n2: i32, r2: i32, p: &ParamPoint) -> Result<i32> {
    let eps = p.eps.as_ref().ok_or(Error::SymbolicPointUnsupported)?;
    let rh = p.rhat_value()?;
    if !rh.is_numeric() {
        return Err(Error::SymbolicPointUnsupported);
    }
    if eps.is_zero() {
        return Ok(1);
    }
    let k = ((n2 - r2) / 2) as i64;
    let t = rh.scale(&(int(2) / eps));
    let (c, d) = t.as_real_surd().ok_or_else(|| Error::InvalidPoint(format!("Rh = {rh}")))?;
    if cmp_surd_int(&c, &d, k) == Ordering::Greater {
        return Ok(1);
    }
    let is_int = d.is_one() && c.is_integer();
    if is_int {
        let ti = c.to_integer();
        if ti >= BigInt::one() && ti <= BigInt::from(k) {
            return Ok(0);
        }
    }
    let fl = t.floor_real_surd().ok_or_else(|| Error::InvalidPoint(format!("Rh = {rh}")))?;
    let e = BigInt::from(k) - fl;
    Ok(if e.is_even() { 1 } else { -1 })
}

use num_integer::Integer;

#[cfg(test)]
mod tests {
    use super::*;

    fn sym() -> ParamPoint {
        ParamPoint::symbolic()
    }

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn basis_examples() {
        assert_eq!(xi(0, 0, 0).unwrap(), WElement::one());
        assert_eq!(xi(2, 0, 2).unwrap(), WElement::generator(Generator::Jp));
        assert_eq!(
            xi(2, 0, 0).unwrap(),
            WElement::generator(Generator::J0).scale(&-Scalar::sqrt_int(2))
        );
        assert_eq!(xi(1, 1, 1).unwrap(), WElement::ap());
        assert_eq!(xi(1, 1, -1).unwrap(), WElement::bp());
        assert_eq!(xi(1, -1, 1).unwrap(), WElement::bm());
        assert_eq!(xi(1, -1, -1).unwrap(), WElement::am().neg());
        assert_eq!(xi(2, -2, 2).unwrap(), WElement::bm().pow(2));
        assert_eq!(xi(2, -2, 0).unwrap(), WElement::monomial(0, 1, 0, 1).scale(&-Scalar::sqrt_int(2)));
        for n2 in 0..=4 {
            for r2 in (-n2..=n2).step_by(2) {
                // (-1)^(n-r); coincides with (-1)^(n+r) for integer r only.
                let sign = if ((n2 - r2) / 2) % 2 == 0 { 1 } else { -1 };
                let expect = WElement::monomial(0, ((n2 - r2) / 2) as u32, ((n2 + r2) / 2) as u32, 0)
                    .scale(&Scalar::from_int(sign));
                assert_eq!(xi(n2, r2, -n2).unwrap(), expect);
            }
        }
        assert!(matches!(xi(2, 1, 0), Err(Error::InvalidLabel { .. })));
    }

    #[test]
    fn eps_free_and_eps0_route() {
        for l in BasisLabel::all_up_to(4) {
            let w = xi_welement(l).unwrap();
            assert!(w.terms().all(|(_, c)| c.is_numeric()));
            assert_eq!(w, xi_welement_eps0(l).unwrap());
        }
    }

    #[test]
    fn rho_examples() {
        let k0 = WElement::generator(Generator::K0);
        assert!(rho(&k0.sub(&WElement::scalar(Scalar::rhat())), &sym()).unwrap().is_zero());
        let w = WElement::am().mul(&WElement::ap());
        let got = rho(&w, &sym()).unwrap();
        let mut expect = PsiElement::term(BasisLabel::of(2, 0, 0), &s("-1/2") * &Scalar::sqrt_int(2));
        expect.add_term(BasisLabel::zero(), s("Rh + (1/2)*eps"));
        assert_eq!(got, expect);
        let w = WElement::am().mul(&k0);
        let d = rho(&w, &sym()).unwrap().sub(&rho_star(&w, &sym()).unwrap());
        let expect = PsiElement::term(BasisLabel::of(1, -1, -1), s("(1/2)*eps"));
        assert_eq!(d, expect);
    }

    #[test]
    fn decompose_examples() {
        let q = ReducedSector { r2: 0, m2: 0, q: JPoly::var() };
        let got = decompose_reduced(&q, &sym()).unwrap();
        assert_eq!(got, PsiElement::term(BasisLabel::of(2, 0, 0), -Scalar::sqrt_rational(&rat(1, 2)).unwrap()));
        let one = ReducedSector { r2: 2, m2: 2, q: JPoly::constant(Scalar::one()) };
        assert_eq!(decompose_reduced(&one, &sym()).unwrap(), PsiElement::basis(BasisLabel::of(2, 2, 2)));
        for l in BasisLabel::all_up_to(6) {
            let e = xi_entry(l);
            let s = ReducedSector { r2: l.r2, m2: l.m2, q: e.q.clone() };
            assert_eq!(decompose_reduced(&s, &sym()).unwrap(), PsiElement::basis(l));
        }
    }

    #[test]
    fn nonassociativity_witness() {
        let p = sym();
        let ap = PsiElement::basis(BasisLabel::of(1, 1, 1));
        let am = PsiElement::term(BasisLabel::of(1, -1, -1), Scalar::from_int(-1));
        let left = product_rho(&product_rho(&ap, &am, &p).unwrap(), &am, &p).unwrap();
        let right = product_rho(&ap, &product_rho(&am, &am, &p).unwrap(), &p).unwrap();
        let half_eps = Scalar::eps().scale(&rat(1, 2));
        assert_eq!(left.sub(&right), am.scale(&half_eps));
    }

    #[test]
    fn inner_examples() {
        let p = sym();
        assert_eq!(inner(&PsiElement::one(), &PsiElement::one(), &p).unwrap(), Scalar::one());
        for m2 in [-2, 0, 2] {
            let x = PsiElement::basis(BasisLabel::of(2, 0, m2));
            let v = inner(&x, &x, &p).unwrap();
            assert_eq!(v, s("(2/3)*Rh^2 - (1/6)*eps^2"));
        }
        let a = PsiElement::basis(BasisLabel::of(2, 0, 2));
        let b = PsiElement::basis(BasisLabel::of(2, 0, 0));
        assert!(inner(&a, &b, &p).unwrap().is_zero());
    }

    #[test]
    fn norm_examples() {
        let p = sym();
        assert_eq!(norm_sq(0, 0, &p).unwrap(), Scalar::one());
        assert_eq!(norm_sq(2, 2, &p).unwrap(), s("(1/3)*(2*Rh + eps)*(2*Rh + 2*eps)"));
        let deg = ParamPoint::numeric(int(1), int(1)).unwrap();
        assert_eq!(norm_sign(6, 0, &deg).unwrap(), 0);
        assert_eq!(norm_sq(6, 0, &deg).unwrap(), Scalar::zero());
    }

    #[test]
    fn label_actions() {
        let x = PsiElement::basis(BasisLabel::of(2, 0, 2));
        assert!(x.ad_jp().is_zero());
        let y = PsiElement::basis(BasisLabel::of(4, 2, 0));
        assert_eq!(y.laplacian(), y.scale(&Scalar::eps().pow(2).scale(&int(6))));
        let z = PsiElement::basis(BasisLabel::of(2, 0, 0));
        assert_eq!(z.ad_jm().ad_jp(), z.scale(&Scalar::eps().pow(2).scale(&int(2))));
        let jp = PsiElement::basis(BasisLabel::of(2, 0, 2));
        assert_eq!(jp.dagger_label(), PsiElement::term(BasisLabel::of(2, 0, -2), Scalar::from_int(-1)));
        assert_eq!(PsiElement::one().dagger_label(), PsiElement::one());
    }

    #[test]
    fn label_actions_match_lifts() {
        let jp = WElement::generator(Generator::Jp);
        let jm = WElement::generator(Generator::Jm);
        let j0 = WElement::generator(Generator::J0);
        let k0 = WElement::generator(Generator::K0);
        for l in BasisLabel::all_up_to(4) {
            let x = PsiElement::basis(l);
            let w = x.lift();
            assert_eq!(WElement::ad(&jp, &w), x.ad_jp().lift());
            assert_eq!(WElement::ad(&jm, &w), x.ad_jm().lift());
            assert_eq!(WElement::ad(&j0, &w), x.ad_j0().lift());
            assert_eq!(WElement::ad(&k0, &w), x.ad_k0().lift());
            assert_eq!(w.dagger(), x.dagger_label().lift());
        }
    }
}
