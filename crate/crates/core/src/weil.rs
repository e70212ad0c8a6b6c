//! The algebra generated by two commuting Heisenberg-Weyl pairs
//! `[a-, a+] = eps`, `[b-, b+] = eps`, in normal order `a+ a- b+ b-`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::coeff::{rat, Rational, Scalar};
use crate::error::{Error, Result};
use crate::poly::BiPoly;

/// The word `a+^s a-^t b+^u b-^v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalMonomial {
    pub s: u32,
    pub t: u32,
    pub u: u32,
    pub v: u32,
}

impl NormalMonomial {
    pub const ONE: NormalMonomial = NormalMonomial { s: 0, t: 0, u: 0, v: 0 };

    pub fn new(s: u32, t: u32, u: u32, v: u32) -> Self {
        NormalMonomial { s, t, u, v }
    }

    pub fn degree(&self) -> u32 {
        self.s + self.t + self.u + self.v
    }

    /// Doubled `(r, m)` sector labels.
    pub fn sector(&self) -> (i32, i32) {
        let a = self.s as i32 - self.t as i32;
        let b = self.u as i32 - self.v as i32;
        (a + b, a - b)
    }
}

impl fmt::Display for NormalMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("ap", self.s), ("am", self.t), ("bp", self.u), ("bm", self.v)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                e => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// `x^- y^+` reordered: coefficients `C(t,i) C(s,i) i!` with `eps^i`.
fn reorder_coeffs(t: u32, s: u32) -> Vec<(BigInt, u32)> {
    let mut out = Vec::new();
    let mut c = BigInt::from(1);
    for i in 0..=t.min(s) {
        if i > 0 {
            c = c * BigInt::from((t - i + 1) as u64) * BigInt::from((s - i + 1) as u64) / BigInt::from(i as u64);
        }
        out.push((c.clone(), i));
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WElement {
    coeffs: BTreeMap<NormalMonomial, Scalar>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    J0,
    Jp,
    Jm,
    K0,
    Kp,
    Km,
}

impl Generator {
    pub const ALL: [Generator; 6] =
        [Generator::J0, Generator::Jp, Generator::Jm, Generator::K0, Generator::Kp, Generator::Km];

    pub fn name(&self) -> &'static str {
        match self {
            Generator::J0 => "J0",
            Generator::Jp => "Jp",
            Generator::Jm => "Jm",
            Generator::K0 => "K0",
            Generator::Kp => "Kp",
            Generator::Km => "Km",
        }
    }
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown generator {s}")))
    }
}

impl WElement {
    pub fn zero() -> Self {
        WElement { coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        WElement::scalar(Scalar::one())
    }

    pub fn scalar(c: Scalar) -> Self {
        WElement::term(NormalMonomial::ONE, c)
    }

    pub fn term(m: NormalMonomial, c: Scalar) -> Self {
        let mut w = WElement::zero();
        w.add_term(m, c);
        w
    }

    pub fn monomial(s: u32, t: u32, u: u32, v: u32) -> Self {
        WElement::term(NormalMonomial::new(s, t, u, v), Scalar::one())
    }

    pub fn ap() -> Self {
        WElement::monomial(1, 0, 0, 0)
    }

    pub fn am() -> Self {
        WElement::monomial(0, 1, 0, 0)
    }

    pub fn bp() -> Self {
        WElement::monomial(0, 0, 1, 0)
    }

    pub fn bm() -> Self {
        WElement::monomial(0, 0, 0, 1)
    }

    pub fn generator(g: Generator) -> Self {
        let half = Scalar::from_rational(rat(1, 2));
        let nh = -&half;
        let aa = NormalMonomial::new(1, 1, 0, 0);
        let bb = NormalMonomial::new(0, 0, 1, 1);
        match g {
            Generator::J0 => WElement::term(aa, half).add(&WElement::term(bb, nh)),
            Generator::Jp => WElement::monomial(1, 0, 0, 1),
            Generator::Jm => WElement::monomial(0, 1, 1, 0),
            Generator::K0 => WElement::term(aa, half.clone())
                .add(&WElement::term(bb, half))
                .add(&WElement::scalar(Scalar::eps().scale(&rat(1, 2)))),
            Generator::Kp => WElement::monomial(1, 0, 1, 0),
            Generator::Km => WElement::monomial(0, 1, 0, 1),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NormalMonomial, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, m: &NormalMonomial) -> Scalar {
        self.coeffs.get(m).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, m: NormalMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(m).or_default();
        *e += &c;
        if e.is_zero() {
            self.coeffs.remove(&m);
        }
    }

    pub fn add_assign(&mut self, o: &WElement) {
        for (m, c) in &o.coeffs {
            self.add_term(*m, c.clone());
        }
    }

    pub fn add(&self, o: &WElement) -> WElement {
        let mut w = self.clone();
        w.add_assign(o);
        w
    }

    pub fn sub(&self, o: &WElement) -> WElement {
        let mut w = self.clone();
        for (m, c) in &o.coeffs {
            w.add_term(*m, -c);
        }
        w
    }

    pub fn neg(&self) -> WElement {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> WElement {
        let mut w = WElement::zero();
        for (m, v) in &self.coeffs {
            w.add_term(*m, v * c);
        }
        w
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().map(NormalMonomial::degree).max()
    }

    pub fn mul(&self, o: &WElement) -> WElement {
        let mut acc: BTreeMap<NormalMonomial, Scalar> = BTreeMap::new();
        for (m1, c1) in &self.coeffs {
            for (m2, c2) in &o.coeffs {
                let c = c1 * c2;
                let ra = reorder_coeffs(m1.t, m2.s);
                let rb = reorder_coeffs(m1.v, m2.u);
                for (ka, i) in &ra {
                    for (kb, j) in &rb {
                        let m = NormalMonomial {
                            s: m1.s + m2.s - i,
                            t: m1.t - i + m2.t,
                            u: m1.u + m2.u - j,
                            v: m1.v - j + m2.v,
                        };
                        let term = c.mul_int_eps(&(ka * kb), 2 * (*i + *j) as i32);
                        let e = acc.entry(m).or_default();
                        *e += &term;
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        WElement { coeffs: acc }
    }

    pub fn pow(&self, e: u32) -> WElement {
        let mut out = WElement::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Conjugation: reverse words, swap `+`/`-`, conjugate coefficients.
    /// A normal word reverses to another normal word.
    pub fn dagger(&self) -> WElement {
        let mut w = WElement::zero();
        for (m, c) in &self.coeffs {
            w.add_term(NormalMonomial::new(m.t, m.s, m.v, m.u), c.conj());
        }
        w
    }

    pub fn commutator(&self, o: &WElement) -> WElement {
        self.mul(o).sub(&o.mul(self))
    }

    /// `Ad_T(w) = [T, w]`.
    pub fn ad(t: &WElement, w: &WElement) -> WElement {
        t.commutator(w)
    }

    /// `(1/eps) [T, w]` as a derivation, for quadratic `T` in `{J0, J+, J-, K0}`.
    ///
    /// With `T = x+^mu T^{mu nu} x-^nu` the result is
    /// `sum T^{mu nu} (x+^mu dw/dx+^nu - dw/dx-^mu x-^nu)`.
    pub fn ad_eps0(g: Generator, w: &WElement) -> Result<WElement> {
        // (mu, nu, T^{mu nu}) with index 0 = a, 1 = b.
        let half = rat(1, 2);
        let table: Vec<(usize, usize, Rational)> = match g {
            Generator::J0 => vec![(0, 0, half.clone()), (1, 1, -half)],
            Generator::Jp => vec![(0, 1, rat(1, 1))],
            Generator::Jm => vec![(1, 0, rat(1, 1))],
            Generator::K0 => vec![(0, 0, half.clone()), (1, 1, half)],
            _ => return Err(Error::UnsupportedGenerator(g.name().into())),
        };
        let mut out = WElement::zero();
        for (m, c) in &w.coeffs {
            let plus = [m.s, m.u];
            let minus = [m.t, m.v];
            for (mu, nu, tc) in &table {
                // x+^mu dw/dx+^nu
                if plus[*nu] > 0 {
                    let mut e = [m.s, m.t, m.u, m.v];
                    let k = BigInt::from(plus[*nu]);
                    e[2 * nu] -= 1;
                    e[2 * mu] += 1;
                    out.add_term(
                        NormalMonomial::new(e[0], e[1], e[2], e[3]),
                        c.scale(tc).mul_int_eps(&k, 0),
                    );
                }
                // - dw/dx-^mu x-^nu
                if minus[*mu] > 0 {
                    let mut e = [m.s, m.t, m.u, m.v];
                    let k = BigInt::from(minus[*mu]);
                    e[2 * mu + 1] -= 1;
                    e[2 * nu + 1] += 1;
                    out.add_term(
                        NormalMonomial::new(e[0], e[1], e[2], e[3]),
                        -c.scale(tc).mul_int_eps(&k, 0),
                    );
                }
            }
        }
        Ok(out)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<WElement> {
        let mut w = WElement::zero();
        for (m, c) in &self.coeffs {
            w.add_term(*m, f(c)?);
        }
        Ok(w)
    }

    /// Divide every coefficient by `eps`.
    pub fn div_eps(&self) -> Result<WElement> {
        let e = Scalar::eps();
        self.map_coeffs(|c| {
            if !c.is_o_eps() {
                return Err(Error::NotEpsDivisible(c.to_string()));
            }
            c.div_exact(&e)
        })
    }

    /// Minimum doubled eps order over all coefficients.
    pub fn eps_order(&self) -> Option<i32> {
        self.coeffs.values().filter_map(Scalar::eps_order).min()
    }

    /// Split into simultaneous `Ad K0`, `Ad J0` eigenparts, keyed by doubled
    /// `(r, m)`.
    pub fn sector_decompose(&self) -> Vec<(i32, i32, WElement)> {
        let mut parts: BTreeMap<(i32, i32), WElement> = BTreeMap::new();
        for (m, c) in &self.coeffs {
            parts.entry(m.sector()).or_default().add_term(*m, c.clone());
        }
        parts.into_iter().map(|((r, m), w)| (r, m, w)).collect()
    }

    /// Sector of a homogeneous element, `None` if empty or mixed.
    pub fn sector(&self) -> Option<(i32, i32)> {
        let mut it = self.coeffs.keys().map(NormalMonomial::sector);
        let first = it.next()?;
        it.all(|s| s == first).then_some(first)
    }

    /// Sector-`(r, m)` part written as `a±^{r+m} b±^{r-m} p(J0, K0)`.
    pub fn reduced_form(&self) -> Result<Reduced> {
        let (r2, m2) = self.sector().unwrap_or((0, 0));
        let mut poly = BiPoly::zero();
        for (m, c) in &self.coeffs {
            if m.sector() != (r2, m2) {
                return Err(Error::SectorMismatch {
                    expected: format!("({r2},{m2})"),
                    found: format!("{:?}", m.sector()),
                });
            }
            poly.add_assign(&reduce_monomial(m).scale(c));
        }
        Ok(Reduced { r2, m2, poly })
    }

    pub fn to_sym_basis(&self) -> SymElement {
        let mut rest = self.clone();
        let mut out = SymElement::zero();
        while let Some(d) = rest.degree() {
            let top: Vec<(NormalMonomial, Scalar)> = rest
                .coeffs
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect();
            for (m, c) in top {
                let label = (m.t, m.s, m.v, m.u);
                let lead = multinomial(&[m.s, m.t, m.u, m.v]);
                let coeff = c.scale(&Rational::from_integer(lead).recip());
                rest = rest.sub(&sym_basis(label.0, label.1, label.2, label.3).scale(&coeff));
                out.add_term(label, coeff);
            }
        }
        out
    }
}

impl fmt::Display for WElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{m}")?;
        }
        Ok(())
    }
}

fn multinomial(parts: &[u32]) -> BigInt {
    let mut out = BigInt::from(1);
    let mut n = 0u64;
    for &p in parts {
        for k in 1..=p as u64 {
            n += 1;
            out = out * BigInt::from(n) / BigInt::from(k);
        }
    }
    out
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut out = BigInt::from(1);
    for i in 0..k {
        out = out * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    out
}

/// `a+ a- = J0 + K0 - eps/2`, `b+ b- = K0 - J0 - eps/2`.
fn number_op(a_side: bool, shift: i64) -> BiPoly {
    let one = Scalar::one();
    let j = if a_side { one.clone() } else { -&one };
    let c = Scalar::eps().scale(&(rat(-1, 2) - Rational::from_integer(shift.into())));
    BiPoly::linear(j, one, c)
}

/// `x+^p x-^q` with the prefix pulled to the left and the balanced remainder
/// expressed through the number operator.
fn side_factor(p: u32, q: u32, a_side: bool) -> BiPoly {
    let mut out = BiPoly::one();
    if p >= q {
        for i in 0..q {
            out = out.mul(&number_op(a_side, i as i64));
        }
    } else {
        let k = q - p;
        for i in 0..p {
            out = out.mul(&number_op(a_side, (k + i) as i64));
        }
    }
    out
}

fn reduce_monomial(m: &NormalMonomial) -> BiPoly {
    side_factor(m.s, m.t, true).mul(&side_factor(m.u, m.v, false))
}

/// Reduced form `a±^{r+m} b±^{r-m} p(J0, K0)` of a single sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    pub r2: i32,
    pub m2: i32,
    pub poly: BiPoly,
}

/// The prefix word `a±^{r+m} b±^{r-m}` for doubled labels.
pub fn sector_prefix(r2: i32, m2: i32) -> NormalMonomial {
    let a = (r2 + m2) / 2;
    let b = (r2 - m2) / 2;
    NormalMonomial {
        s: a.max(0) as u32,
        t: (-a).max(0) as u32,
        u: b.max(0) as u32,
        v: (-b).max(0) as u32,
    }
}

impl Reduced {
    /// Back to a normal-ordered element.
    pub fn to_welement(&self) -> WElement {
        let j0 = WElement::generator(Generator::J0);
        let k0 = WElement::generator(Generator::K0);
        let mut p = WElement::zero();
        for ((i, j), c) in self.poly.terms() {
            p.add_assign(&j0.pow(*i).mul(&k0.pow(*j)).scale(c));
        }
        WElement::term(sector_prefix(self.r2, self.m2), Scalar::one()).mul(&p)
    }
}

/// Sum of `c * S(s,t,u,v)` with `s = #a-`, `t = #a+`, `u = #b-`, `v = #b+`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymElement {
    coeffs: BTreeMap<(u32, u32, u32, u32), Scalar>,
}

impl SymElement {
    pub fn zero() -> Self {
        SymElement { coeffs: BTreeMap::new() }
    }

    pub fn basis(s: u32, t: u32, u: u32, v: u32) -> Self {
        let mut x = SymElement::zero();
        x.add_term((s, t, u, v), Scalar::one());
        x
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32, u32), &Scalar)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: (u32, u32, u32, u32)) -> Scalar {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, k: (u32, u32, u32, u32), c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(k).or_default();
        *e += &c;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn from_sym_basis(&self) -> WElement {
        let mut w = WElement::zero();
        for ((s, t, u, v), c) in &self.coeffs {
            w.add_assign(&sym_basis(*s, *t, *u, *v).scale(c));
        }
        w
    }

    /// `tr S(s,t,u,v) = 2 S(s-1,t-1,u,v) + 2 S(s,t,u-1,v-1)`.
    pub fn formal_trace(&self) -> SymElement {
        let mut out = SymElement::zero();
        let two = Scalar::from_int(2);
        for ((s, t, u, v), c) in &self.coeffs {
            if *s > 0 && *t > 0 {
                out.add_term((s - 1, t - 1, *u, *v), c * &two);
            }
            if *u > 0 && *v > 0 {
                out.add_term((*s, *t, u - 1, v - 1), c * &two);
            }
        }
        out
    }
}

impl fmt::Display for SymElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, ((s, t, u, v), c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*S({s},{t},{u},{v})")?;
        }
        Ok(())
    }
}

/// Sum of the distinct words with `s` copies of `x-` and `t` copies of `x+`,
/// via `S(s,t) = x- S(s-1,t) + x+ S(s,t-1)`.
fn sym_one_side(s: u32, t: u32, a_side: bool) -> WElement {
    let (minus, plus) = if a_side { (WElement::am(), WElement::ap()) } else { (WElement::bm(), WElement::bp()) };
    let mut row: Vec<WElement> = vec![WElement::one(); (t + 1) as usize];
    for j in 1..=t as usize {
        row[j] = plus.mul(&row[j - 1]);
    }
    for _ in 1..=s {
        let mut next = vec![WElement::zero(); (t + 1) as usize];
        next[0] = minus.mul(&row[0]);
        for j in 1..=t as usize {
            next[j] = minus.mul(&row[j]).add(&plus.mul(&next[j - 1]));
        }
        row = next;
    }
    row[t as usize].clone()
}

pub fn sym_a(s: u32, t: u32) -> WElement {
    sym_one_side(s, t, true)
}

pub fn sym_b(u: u32, v: u32) -> WElement {
    sym_one_side(u, v, false)
}

/// `S(s,t,u,v) = C(s+t+u+v, s+t) S_A(s,t) S_B(u,v)`.
pub fn sym_basis(s: u32, t: u32, u: u32, v: u32) -> WElement {
    let n = (s + t + u + v) as u64;
    let c = binomial(n, (s + t) as u64);
    sym_a(s, t).mul(&sym_b(u, v)).scale(&Scalar::from_rational(Rational::from_integer(c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(x: Generator) -> WElement {
        WElement::generator(x)
    }

    #[test]
    fn commutation_rules() {
        let eps = WElement::scalar(Scalar::eps());
        assert_eq!(WElement::am().mul(&WElement::ap()), WElement::monomial(1, 1, 0, 0).add(&eps));
        let lhs = WElement::am().pow(2).mul(&WElement::ap());
        let rhs = WElement::monomial(1, 2, 0, 0).add(&WElement::am().scale(&Scalar::eps().scale(&rat(2, 1))));
        assert_eq!(lhs, rhs);
        assert_eq!(WElement::ap().mul(&WElement::bm()), WElement::monomial(1, 0, 0, 1));
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(WElement::ap().dagger(), WElement::am());
        let n = WElement::monomial(1, 1, 0, 0);
        assert_eq!(n.dagger(), n);
        assert_eq!(g(Generator::Jp).dagger(), g(Generator::Jm));
        let w = WElement::am().mul(&WElement::ap()).mul(&WElement::bp());
        assert_eq!(w.dagger(), WElement::bm().mul(&WElement::am()).mul(&WElement::ap()));
    }

    #[test]
    fn generator_relations() {
        let k0 = g(Generator::K0);
        let half = Scalar::from_rational(rat(1, 2));
        let expect = WElement::monomial(1, 1, 0, 0)
            .scale(&half)
            .add(&WElement::monomial(0, 0, 1, 1).scale(&half))
            .add(&WElement::scalar(Scalar::eps().scale(&rat(1, 2))));
        assert_eq!(k0, expect);
        let jp = g(Generator::Jp);
        assert_eq!(WElement::ad(&g(Generator::J0), &jp), jp.scale(&Scalar::eps()));
        let j0 = g(Generator::J0);
        let jm = g(Generator::Jm);
        let half = Scalar::from_rational(rat(1, 2));
        let lhs = j0.mul(&j0).add(&jp.mul(&jm).scale(&half)).add(&jm.mul(&jp).scale(&half));
        let rhs = k0.mul(&k0).sub(&WElement::scalar(Scalar::eps().pow(2).scale(&rat(1, 4))));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn adjoint_actions() {
        let half_eps = Scalar::eps().scale(&rat(1, 2));
        assert_eq!(WElement::ad(&g(Generator::J0), &WElement::ap()), WElement::ap().scale(&half_eps));
        assert!(WElement::ad(&g(Generator::K0), &g(Generator::Jp)).is_zero());
        let w = WElement::monomial(1, 0, 0, 1);
        let d = WElement::ad_eps0(Generator::Jm, &w).unwrap();
        assert_eq!(d, g(Generator::J0).scale(&Scalar::from_int(-2)));
        assert_eq!(d, WElement::ad(&g(Generator::Jm), &w).div_eps().unwrap());
        assert!(matches!(WElement::ad_eps0(Generator::Kp, &w), Err(Error::UnsupportedGenerator(_))));
    }

    #[test]
    fn symmetric_basis_examples() {
        let s = sym_basis(1, 1, 0, 0);
        assert_eq!(s, WElement::monomial(1, 1, 0, 0).scale(&Scalar::from_int(2)).add(&WElement::scalar(Scalar::eps())));
        assert_eq!(sym_basis(0, 1, 0, 0), WElement::ap());
        let x = WElement::monomial(1, 1, 0, 0).to_sym_basis();
        let mut expect = SymElement::zero();
        expect.add_term((1, 1, 0, 0), Scalar::from_rational(rat(1, 2)));
        expect.add_term((0, 0, 0, 0), -Scalar::eps().scale(&rat(1, 2)));
        assert_eq!(x, expect);
        assert_eq!(WElement::one().to_sym_basis(), SymElement::basis(0, 0, 0, 0));
    }

    #[test]
    fn trace_examples() {
        let mut two = SymElement::zero();
        two.add_term((0, 0, 0, 0), Scalar::from_int(2));
        assert_eq!(SymElement::basis(1, 1, 0, 0).formal_trace(), two);
        assert!(SymElement::basis(0, 2, 0, 0).formal_trace().is_zero());
        let mut e = SymElement::zero();
        e.add_term((0, 0, 1, 1), Scalar::from_int(2));
        e.add_term((1, 1, 0, 0), Scalar::from_int(2));
        assert_eq!(SymElement::basis(1, 1, 1, 1).formal_trace(), e);
    }

    #[test]
    fn sector_examples() {
        let n = WElement::monomial(1, 1, 0, 0);
        let red = n.reduced_form().unwrap();
        assert_eq!((red.r2, red.m2), (0, 0));
        let expect = BiPoly::linear(Scalar::one(), Scalar::one(), -Scalar::eps().scale(&rat(1, 2)));
        assert_eq!(red.poly, expect);
        let jp = WElement::monomial(1, 0, 0, 1).reduced_form().unwrap();
        assert_eq!((jp.r2, jp.m2), (0, 2));
        assert_eq!(jp.poly, BiPoly::one());
        assert_eq!(WElement::ap().sector(), Some((1, 1)));
    }

    #[test]
    fn reduced_round_trip() {
        let w = WElement::monomial(2, 3, 1, 2).add(&WElement::monomial(0, 1, 2, 3).scale(&Scalar::rhat()));
        for (_, _, part) in w.sector_decompose() {
            assert_eq!(part.reduced_form().unwrap().to_welement(), part);
        }
    }

    #[test]
    fn dimension_count() {
        for n in 0..=3u32 {
            let d = 2 * n;
            let mut tops = std::collections::BTreeSet::new();
            for s in 0..=d {
                for t in 0..=d - s {
                    for u in 0..=d - s - t {
                        let v = d - s - t - u;
                        let w = sym_basis(s, t, u, v);
                        let top: Vec<_> = w.terms().filter(|(m, _)| m.degree() == d).map(|(m, _)| *m).collect();
                        assert_eq!(top, vec![NormalMonomial::new(t, s, v, u)]);
                        tops.insert(top[0]);
                    }
                }
            }
            assert_eq!(tops.len() as u32, (2 * n + 1) * (2 * n + 2) * (2 * n + 3) / 6);
        }
    }
}
