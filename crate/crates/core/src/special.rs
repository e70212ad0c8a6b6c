//! Hypergeometric sums, Hahn and Jacobi polynomials, Clebsch-Gordan and
//! Wigner coefficients, and the closed and classical forms of the basis.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::coeff::{rat, Rational, Scalar};
use crate::error::{Error, Result};
use crate::hilbert::{pi0_trace, FuzzyLevel};
use crate::poly::JPoly;
use crate::psi::{xi, BasisLabel, ParamPoint, ReducedSector};
use crate::weil::{binomial, WElement};

fn factorial_table() -> &'static [BigInt] {
    static T: OnceLock<Vec<BigInt>> = OnceLock::new();
    T.get_or_init(|| {
        let mut v = vec![BigInt::one()];
        for i in 1..=160u32 {
            let next = &v[i as usize - 1] * BigInt::from(i);
            v.push(next);
        }
        v
    })
}

pub fn factorial(n: u32) -> BigInt {
    let t = factorial_table();
    match t.get(n as usize) {
        Some(f) => f.clone(),
        None => (t.len() as u32..=n).fold(t[t.len() - 1].clone(), |acc, i| acc * BigInt::from(i)),
    }
}

fn fact_rat(n: i64) -> Rational {
    Rational::from_integer(factorial(n as u32))
}

/// Rising factorial `(a)_s`.
pub fn poch(a: &Rational, s: u32) -> Rational {
    (0..s).fold(Rational::one(), |acc, i| acc * (a + Rational::from_integer(i.into())))
}

pub fn poch_scalar(a: &Scalar, s: u32) -> Scalar {
    (0..s).fold(Scalar::one(), |acc, i| &acc * &(a + &Scalar::from_int(i as i64)))
}

fn nonpositive_int(a: &Rational) -> Option<u32> {
    (a.is_integer() && !a.is_positive()).then(|| (-a.to_integer()).to_u32().unwrap_or(u32::MAX))
}

/// Terminating `pFq(a; b; z)`, summed literally up to the first vanishing
/// numerator Pochhammer.
pub fn hyp_terminating(a: &[Rational], b: &[Rational], z: &Rational) -> Result<Rational> {
    let s_max = a.iter().filter_map(nonpositive_int).min().ok_or(Error::NonTerminating)?;
    let mut acc = Rational::zero();
    let mut term = Rational::one();
    for s in 0..=s_max {
        acc += &term;
        if s == s_max {
            break;
        }
        let si = Rational::from_integer(s.into());
        let mut den = Rational::from_integer((s + 1).into());
        for bi in b {
            let f = bi + &si;
            if f.is_zero() {
                return Err(Error::DegenerateDenominator);
            }
            den *= f;
        }
        let num = a.iter().fold(z.clone(), |x, ai| x * (ai + &si));
        term = term * num / den;
    }
    Ok(acc)
}

/// `2F1(a, b; c; 1)` terminating.
pub fn hyp2f1_terminating(a: &Rational, b: &Rational, c: &Rational) -> Result<Scalar> {
    hyp_terminating(&[a.clone(), b.clone()], std::slice::from_ref(c), &Rational::one()).map(Scalar::from_rational)
}

/// `3F2(a1, a2, a3; b1, b2; 1)` terminating.
pub fn hyp3f2_terminating(a: [&Rational; 3], b: [&Rational; 2]) -> Result<Scalar> {
    let a: Vec<Rational> = a.iter().map(|x| (*x).clone()).collect();
    let b: Vec<Rational> = b.iter().map(|x| (*x).clone()).collect();
    hyp_terminating(&a, &b, &Rational::one()).map(Scalar::from_rational)
}

/// Steps of the trace computation of `pi0(am^(n+r) ap^(n+r) bp^(n-r) bm^(n-r))`
/// at level `k`.
#[derive(Clone, Debug, Serialize)]
pub struct NormChain {
    pub hypergeometric: Scalar,
    pub chain: Scalar,
    pub closed: Scalar,
}

/// All labels doubled. `eps` as in [`FuzzyLevel::point`].
pub fn norm_chain(n2: i32, r2: i32, k2: i32, eps: Option<&Rational>) -> Result<NormChain> {
    let np = ((n2 + r2) / 2) as i64;
    let nm = ((n2 - r2) / 2) as i64;
    let k2i = k2 as i64;
    let e = match eps {
        Some(x) => Scalar::from_rational(crate::coeff::pow_rational(x, n2)),
        None => Scalar::eps_pow2(2 * n2),
    };
    if k2i - nm < 0 {
        let z = Scalar::zero();
        return Ok(NormChain { hypergeometric: z.clone(), chain: z.clone(), closed: z });
    }
    let f = hyp2f1_terminating(
        &Rational::from_integer((np + 1).into()),
        &Rational::from_integer((nm - k2i).into()),
        &Rational::from_integer((-k2i).into()),
    )?;
    let pre = fact_rat(np) * fact_rat(k2i) / (Rational::from_integer((k2i + 1).into()) * fact_rat(k2i - nm));
    let chain = &(&e * &f) * &Scalar::from_rational(pre);
    let closed = fact_rat(np) * fact_rat(nm) * fact_rat(k2i + 1 + np)
        / (Rational::from_integer((k2i + 1).into()) * fact_rat(n2 as i64 + 1) * fact_rat(k2i - nm));
    Ok(NormChain { hypergeometric: f, chain, closed: &e * &Scalar::from_rational(closed) })
}

/// Direct ket-sum value of the same trace.
pub fn norm_chain_oracle(n2: i32, r2: i32, k2: i32, eps: Option<&Rational>) -> Result<Scalar> {
    let np = ((n2 + r2) / 2) as u32;
    let nm = ((n2 - r2) / 2) as u32;
    let w = WElement::am().pow(np).mul(&WElement::ap().pow(np)).mul(&WElement::bp().pow(nm)).mul(&WElement::bm().pow(nm));
    pi0_trace(&w, FuzzyLevel::new(k2)?, eps)
}

/// Hahn polynomial `h^(alpha,beta)_n(x, N)` in the Nikiforov-Suslov-Uvarov
/// normalization.
#[derive(Clone, Debug)]
pub struct HahnSpec {
    pub n: u32,
    pub alpha: u32,
    pub beta: u32,
    pub x: Scalar,
    pub big_n: Scalar,
}

/// `h_n` as a polynomial in `x` with coefficients polynomial in `N`.
pub fn hahn_poly(n: u32, alpha: u32, beta: u32, big_n: &Scalar) -> JPoly {
    let mut acc = JPoly::zero();
    let minus_n = Rational::from_integer(-BigInt::from(n));
    let top = Rational::from_integer(BigInt::from(n + alpha + beta + 1));
    let b1 = Rational::from_integer(BigInt::from(beta + 1));
    // (-x)_s as a polynomial in x
    let mut minus_x_poch = JPoly::constant(Scalar::one());
    for s in 0..=n {
        let c = poch(&minus_n, s) * poch(&top, s) / (poch(&b1, s) * fact_rat(s as i64));
        let sign = if s % 2 == 0 { 1 } else { -1 };
        let tail = (s + 1..=n).fold(Scalar::from_int(sign), |a, i| &a * &(big_n - &Scalar::from_int(i as i64)));
        acc = acc.add(&minus_x_poch.scale(&tail.scale(&c)));
        minus_x_poch = minus_x_poch.mul(&JPoly::linear(-Scalar::one(), Scalar::from_int(s as i64)));
    }
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let pre = Rational::from_integer(factorial(beta + n) * sign) / (fact_rat(n as i64) * fact_rat(beta as i64));
    acc.scale(&Scalar::from_rational(pre))
}

pub fn hahn(spec: &HahnSpec) -> Scalar {
    hahn_poly(spec.n, spec.alpha, spec.beta, &spec.big_n).eval(&spec.x)
}

/// Coefficients of `h_n` in powers of `x`.
pub fn hahn_coefficients(spec: &HahnSpec) -> Vec<Scalar> {
    hahn_poly(spec.n, spec.alpha, spec.beta, &spec.big_n).coeffs().to_vec()
}

/// The factor `(-1)^n (beta+1)_n / n! (N-n)_n` separating `h_n` from the
/// bare `3F2(-n, n+alpha+beta+1, -x; beta+1, 1-N; 1)`.
pub fn hahn_normalization(n: u32, beta: u32, big_n: &Scalar) -> Scalar {
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let c = poch(&Rational::from_integer((beta + 1).into()), n) / fact_rat(n as i64) * Rational::from_integer(sign.into());
    poch_scalar(&(big_n - &Scalar::from_int(n as i64)), n).scale(&c)
}

/// Weight `(x+beta)! (N-1-x+alpha)! / (x! (N-1-x)!)` on `x = 0..N-1`.
pub fn hahn_weight(x: u32, big_n: u32, alpha: u32, beta: u32) -> Rational {
    assert!(x < big_n);
    Rational::new(factorial(x + beta) * factorial(big_n - 1 - x + alpha), factorial(x) * factorial(big_n - 1 - x))
}

/// `sum_x w(x) h_n1(x) h_n2(x)` over the lattice.
pub fn hahn_lattice_sum(n1: u32, n2: u32, alpha: u32, beta: u32, big_n: u32) -> Rational {
    let nn = Scalar::from_int(big_n as i64);
    let p1 = hahn_poly(n1, alpha, beta, &nn);
    let p2 = hahn_poly(n2, alpha, beta, &nn);
    let mut acc = Rational::zero();
    for x in 0..big_n {
        let xs = Scalar::from_int(x as i64);
        let v = &p1.eval(&xs) * &p2.eval(&xs);
        acc += hahn_weight(x, big_n, alpha, beta) * v.as_rational().expect("rational");
    }
    acc
}

/// Which ordering region of `(-r, r, -m, m)` the label falls in (1 to 4).
pub fn closed_form_case(r2: i32, m2: i32) -> u8 {
    if -r2 <= m2 && m2 <= r2 {
        1
    } else if -m2 <= r2 && r2 <= m2 {
        2
    } else if m2 <= r2 && r2 <= -m2 {
        3
    } else {
        4
    }
}

/// The reduced polynomial of `rho(Xi(n,r,m))` from the Hahn closed form, at symbolic `(eps, Rh)`.
pub fn xi_closed_form(l: BasisLabel) -> Result<ReducedSector> {
    BasisLabel::new(l.n2, l.r2, l.m2)?;
    let (n2, r2, m2) = (l.n2, l.r2, l.m2);
    let h = |x2: i32| x2 / 2;
    let inv_eps = Scalar::eps_pow2(-2);
    // x = (J0 + Rh)/eps - 1/2, N = 2 Rh/eps
    let x = JPoly::linear(inv_eps.clone(), &(&Scalar::rhat() * &inv_eps) - &Scalar::from_rational(rat(1, 2)));
    let big_n = (&Scalar::rhat() * &inv_eps).scale(&rat(2, 1));
    let c_nm = Rational::from_integer(binomial(n2 as u64, h(n2 + m2) as u64));
    let c_nr = Rational::from_integer(binomial(n2 as u64, h(n2 + r2) as u64));
    let sqrt_c = Scalar::sqrt_rational(&c_nm)?;
    let inv_sqrt_c = Scalar::sqrt_rational(&(Rational::one() / &c_nm))?;
    let sgn = |e2: i32| if h(e2) % 2 == 0 { 1 } else { -1 };
    let shift = |k2: i32| Scalar::from_int(h(k2) as i64);
    let (pre, deg, alpha, beta, xs, ns) = match closed_form_case(r2, m2) {
        1 => (
            sqrt_c.scale(&(Rational::from_integer(sgn(n2 - r2).into()) / &c_nr)),
            h(n2 - r2),
            h(r2 - m2),
            h(r2 + m2),
            Scalar::zero(),
            Scalar::zero(),
        ),
        2 => (inv_sqrt_c.scale(&Rational::from_integer(sgn(n2 - m2).into())), h(n2 - m2), h(m2 - r2), h(r2 + m2), Scalar::zero(), shift(r2 - m2)),
        3 => (inv_sqrt_c.scale(&Rational::from_integer(sgn(n2 - r2).into())), h(n2 + m2), h(r2 - m2), h(-r2 - m2), shift(r2 + m2), shift(r2 + m2)),
        _ => (
            sqrt_c.scale(&(Rational::from_integer(sgn(n2 - m2).into()) / &c_nr)),
            h(n2 + r2),
            h(m2 - r2),
            h(-r2 - m2),
            shift(r2 + m2),
            shift(2 * r2),
        ),
    };
    let hp = hahn_poly(deg as u32, alpha as u32, beta as u32, &(&big_n + &ns));
    let arg = x.add(&JPoly::constant(xs));
    let q = hp.compose(&arg).scale(&(&pre * &Scalar::eps_pow2(2 * deg)));
    Ok(ReducedSector { r2, m2, q })
}

/// [`xi_closed_form`] specialized at `p`.
pub fn xi_closed_form_at(l: BasisLabel, p: &ParamPoint) -> Result<ReducedSector> {
    let s = xi_closed_form(l)?;
    Ok(ReducedSector { r2: s.r2, m2: s.m2, q: s.q.map_coeffs(|c| p.specialize(c))? })
}

/// Exact Jacobi polynomial `P^(alpha,beta)_n(z)`.
pub fn jacobi(n: u32, alpha: u32, beta: u32, z: &Scalar) -> Scalar {
    let half = rat(1, 2);
    let zm = (z - &Scalar::one()).scale(&half);
    let zp = (z + &Scalar::one()).scale(&half);
    let mut acc = Scalar::zero();
    for s in 0..=n {
        let c = binomial((n + alpha) as u64, (n - s) as u64) * binomial((n + beta) as u64, s as u64);
        acc += &(&zm.pow(s) * &zp.pow(n - s)).scale(&Rational::from_integer(c));
    }
    acc
}

pub fn jacobi_f64(n: u32, alpha: u32, beta: u32, z: f64) -> f64 {
    let mut acc = 0.0;
    for s in 0..=n {
        let c = binomial((n + alpha) as u64, (n - s) as u64) * binomial((n + beta) as u64, s as u64);
        acc += c.to_f64().unwrap() * ((z - 1.0) / 2.0).powi(s as i32) * ((z + 1.0) / 2.0).powi((n - s) as i32);
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        EulerAngles { alpha, beta, gamma }
    }

    pub fn random<R: Rng>(rng: &mut R) -> Self {
        use std::f64::consts::PI;
        EulerAngles { alpha: rng.gen_range(0.0..2.0 * PI), beta: rng.gen_range(0.0..PI), gamma: rng.gen_range(0.0..2.0 * PI) }
    }
}

/// Values of `(ap, am, bp, bm)` at radius `R`.
pub fn classical_generators(r: f64, e: &EulerAngles) -> [Complex64; 4] {
    let s = (2.0 * r).sqrt();
    let (c, sn) = ((e.beta / 2.0).cos(), (e.beta / 2.0).sin());
    let i = Complex64::i();
    let ph = |x: f64| Complex64::from_polar(1.0, x);
    [
        s * c * ph(-0.5 * (e.alpha + e.gamma)),
        s * c * ph(0.5 * (e.alpha + e.gamma)),
        -i * s * sn * ph(0.5 * (e.alpha - e.gamma)),
        i * s * sn * ph(-0.5 * (e.alpha - e.gamma)),
    ]
}

/// `w` at `eps = 0` with the generators replaced by their classical values.
pub fn eval_classical(w: &WElement, r: f64, e: &EulerAngles) -> Complex64 {
    let g = classical_generators(r, e);
    w.terms()
        .map(|(m, c)| {
            c.evaluate_float(0.0, r) * g[0].powu(m.s) * g[1].powu(m.t) * g[2].powu(m.u) * g[3].powu(m.v)
        })
        .sum()
}

pub fn xi_classical(l: BasisLabel, r: f64, e: &EulerAngles) -> Result<Complex64> {
    Ok(eval_classical(&xi(l.n2, l.r2, l.m2)?, r, e))
}

/// Wigner small `d^j_{m' m}(beta)`, labels doubled.
pub fn wigner_small_d(j2: i32, mp2: i32, m2: i32, beta: f64) -> f64 {
    let f = |x2: i32| factorial((x2 / 2) as u32).to_f64().unwrap();
    let norm = (f(j2 + mp2) * f(j2 - mp2) * f(j2 + m2) * f(j2 - m2)).sqrt();
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let mut acc = 0.0;
    for k in 0..=j2 {
        let a1 = j2 + m2 - 2 * k;
        let a2 = mp2 - m2 + 2 * k;
        let a3 = j2 - mp2 - 2 * k;
        if a1 < 0 || a2 < 0 || a3 < 0 {
            continue;
        }
        let sign = if (a2 / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let pc = j2 + (m2 - mp2) / 2 - 2 * k;
        let ps = (mp2 - m2) / 2 + 2 * k;
        acc += sign * norm / (f(a1) * f(2 * k) * f(a2) * f(a3)) * c.powi(pc) * s.powi(ps);
    }
    acc
}

/// `D^j_{m' m} = e^{-i m' alpha} d^j_{m' m}(beta) e^{-i m gamma}`, labels doubled.
pub fn wigner_d(j2: i32, mp2: i32, m2: i32, e: &EulerAngles) -> Complex64 {
    let mp = mp2 as f64 / 2.0;
    let m = m2 as f64 / 2.0;
    Complex64::from_polar(1.0, -mp * e.alpha - m * e.gamma) * wigner_small_d(j2, mp2, m2, e.beta)
}

/// Binomial index in the rotation-matrix form of the classical basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BinomialIndex {
    /// `C(2n, n+r)`
    NPlusR,
    /// `C(2n, r)`, defined only for integer `r >= 0`
    R,
}

/// `i^{m-r} (-1)^{n-r} (2R)^n C(2n, idx)^{-1/2} D^n_{m r}`; `None` when the index is undefined.
pub fn drm_base(l: BasisLabel, r: f64, e: &EulerAngles, idx: BinomialIndex) -> Option<Complex64> {
    let (n2, r2, m2) = (l.n2, l.r2, l.m2);
    let b = match idx {
        BinomialIndex::NPlusR => binomial(n2 as u64, ((n2 + r2) / 2) as u64),
        BinomialIndex::R => {
            if r2 < 0 || r2 % 2 != 0 {
                return None;
            }
            binomial(n2 as u64, (r2 / 2) as u64)
        }
    };
    let b = b.to_f64()?;
    if b == 0.0 {
        return None;
    }
    let ipow = Complex64::i().powi((m2 - r2) / 2);
    let sign = if ((n2 - r2) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Some(ipow * sign * (2.0 * r).powf(n2 as f64 / 2.0) / b.sqrt() * wigner_d(n2, m2, r2, e))
}

/// Jacobi closed form of the classical basis element.
pub fn xi_jacobi_form(l: BasisLabel, r: f64, e: &EulerAngles) -> Complex64 {
    let (n2, r2, m2) = (l.n2, l.r2, l.m2);
    let big_m2 = r2.abs().max(m2.abs());
    let deg = ((n2 - big_m2) / 2) as u32;
    let g = classical_generators(r, e);
    let a = if r2 + m2 >= 0 { g[0].powi((r2 + m2) / 2) } else { g[1].powi(-(r2 + m2) / 2) };
    let bb = if r2 - m2 >= 0 { g[2].powi((r2 - m2) / 2) } else { g[3].powi((m2 - r2) / 2) };
    let sign = if ((n2 - r2.max(m2)) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let c1 = binomial(n2 as u64, ((n2 + m2) / 2) as u64).to_f64().unwrap();
    let c2 = binomial(n2 as u64, deg as u64).to_f64().unwrap();
    let z = e.beta.cos();
    let p = jacobi_f64(deg, ((r2 - m2).abs() / 2) as u32, ((r2 + m2).abs() / 2) as u32, z);
    a * bb * sign * (2.0 * r).powi(deg as i32) * c1.sqrt() / c2 * p
}

/// Exact Clebsch-Gordan coefficient `<j1 m1; j2 m2 | j m>` (Racah), labels doubled.
pub fn clebsch_gordan(j1: i32, j2: i32, j: i32, m1: i32, m2: i32, m: i32) -> Result<Scalar> {
    let bad = |why: &str| Err(Error::InvalidCoupling(format!("({j1},{j2},{j},{m1},{m2},{m})/2: {why}")));
    if j1 < 0 || j2 < 0 || j < 0 {
        return bad("negative spin");
    }
    if j > j1 + j2 || j < (j1 - j2).abs() || (j1 + j2 + j) % 2 != 0 {
        return bad("triangle");
    }
    for (jj, mm) in [(j1, m1), (j2, m2), (j, m)] {
        if mm.abs() > jj || (jj + mm) % 2 != 0 {
            return bad("projection");
        }
    }
    if m != m1 + m2 {
        return Ok(Scalar::zero());
    }
    let f = |x2: i32| fact_rat((x2 / 2) as i64);
    let tri = Rational::from_integer((j + 1).into()) * f(j + j1 - j2) * f(j - j1 + j2) * f(j1 + j2 - j) / f(j1 + j2 + j + 2);
    let proj = f(j + m) * f(j - m) * f(j1 - m1) * f(j1 + m1) * f(j2 - m2) * f(j2 + m2);
    let mut sum = Rational::zero();
    let mut k = 0;
    loop {
        let args = [2 * k, j1 + j2 - j - 2 * k, j1 - m1 - 2 * k, j2 + m2 - 2 * k, j - j2 + m1 + 2 * k, j - j1 - m2 + 2 * k];
        if args[1] < 0 || args[2] < 0 || args[3] < 0 {
            break;
        }
        if args[4] >= 0 && args[5] >= 0 {
            let den = args.iter().fold(Rational::one(), |a, x| a * f(*x));
            let t = Rational::one() / den;
            if k % 2 == 0 {
                sum += t;
            } else {
                sum -= t;
            }
        }
        k += 1;
    }
    Ok(Scalar::sqrt_rational(&(tri * proj))?.scale(&sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::int;
    use crate::psi::xi_entry;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hypergeometric_examples() {
        let b = rat(3, 2);
        let c = rat(5, 7);
        assert_eq!(hyp2f1_terminating(&int(-1), &b, &c).unwrap(), Scalar::from_rational(int(1) - &b / &c));
        assert_eq!(hyp2f1_terminating(&int(0), &b, &c).unwrap(), Scalar::one());
        assert!(matches!(hyp2f1_terminating(&rat(1, 2), &b, &c), Err(Error::NonTerminating)));
        assert!(matches!(hyp2f1_terminating(&int(-3), &b, &int(-1)), Err(Error::DegenerateDenominator)));
    }

    #[test]
    fn norm_chain_matches() {
        for (n2, r2, k2) in [(2, 0, 2), (2, 2, 3), (3, 1, 4), (4, 0, 5), (4, -2, 2), (1, -1, 1)] {
            let c = norm_chain(n2, r2, k2, None).unwrap();
            assert_eq!(c.chain, c.closed);
            assert_eq!(c.chain, norm_chain_oracle(n2, r2, k2, None).unwrap(), "{n2} {r2} {k2}");
        }
        let c = norm_chain(2, 0, 2, Some(&int(1))).unwrap();
        assert_eq!(c.closed, norm_chain_oracle(2, 0, 2, Some(&int(1))).unwrap());
    }

    #[test]
    fn hahn_examples() {
        let n = Scalar::from_int(5);
        let h0 = hahn(&HahnSpec { n: 0, alpha: 1, beta: 2, x: Scalar::from_int(3), big_n: n.clone() });
        assert_eq!(h0, Scalar::one());
        assert_eq!(hahn_normalization(0, 2, &n), Scalar::one());
        // leading coefficient in J0/eps of h^(0,0)_1 at x = (J0+Rh)/eps - 1/2, N = 2Rh/eps
        let inv_eps = Scalar::eps_pow2(-2);
        let x = JPoly::linear(inv_eps.clone(), &(&Scalar::rhat() * &inv_eps) - &Scalar::from_rational(rat(1, 2)));
        let h1 = hahn_poly(1, 0, 0, &(&Scalar::rhat() * &inv_eps).scale(&int(2))).compose(&x);
        assert_eq!(h1, JPoly::linear(inv_eps.scale(&int(2)), Scalar::zero()));
        for alpha in 0..=3 {
            for beta in 0..=3 {
                for big_n in 1..=9 {
                    for n1 in 0..big_n.min(4) {
                        for n2 in 0..n1 {
                            assert!(hahn_lattice_sum(n1, n2, alpha, beta, big_n).is_zero());
                        }
                        assert!(hahn_lattice_sum(n1, n1, alpha, beta, big_n).is_positive());
                    }
                }
            }
        }
    }

    #[test]
    fn hahn_matches_bare_sum() {
        let big_n = Scalar::from_rational(rat(17, 2));
        for n in 0..4u32 {
            for x in 0..5 {
                let spec = HahnSpec { n, alpha: 1, beta: 2, x: Scalar::from_int(x), big_n: big_n.clone() };
                let nn = big_n.as_rational().unwrap();
                let f = hyp3f2_terminating(
                    [&Rational::from_integer(-BigInt::from(n)), &int((n + 4) as i64), &int(-x)],
                    [&int(3), &(int(1) - nn)],
                )
                .unwrap();
                assert_eq!(hahn(&spec), &f * &hahn_normalization(n, 2, &big_n));
            }
        }
    }

    #[test]
    fn closed_form_matches_pipeline() {
        let mut cases = [0usize; 4];
        for l in BasisLabel::all_up_to(4) {
            let c = xi_closed_form(l).unwrap();
            assert_eq!(c.q, xi_entry(l).q, "{l}");
            cases[closed_form_case(l.r2, l.m2) as usize - 1] += 1;
        }
        assert!(cases.iter().all(|&c| c >= 3));
        let q = xi_closed_form(BasisLabel::of(2, 0, 0)).unwrap().q;
        assert_eq!(q, JPoly::linear(-Scalar::sqrt_int(2), Scalar::zero()));
        let q = xi_closed_form(BasisLabel::of(2, 2, 2)).unwrap().q;
        assert_eq!(q, JPoly::constant(Scalar::one()));
    }

    #[test]
    fn jacobi_examples() {
        let z = Scalar::from_rational(rat(1, 3));
        assert_eq!(jacobi(0, 2, 1, &z), Scalar::one());
        // P_1^(a,b)(z) = (a+1) + (a+b+2)(z-1)/2
        assert_eq!(jacobi(1, 2, 1, &z), Scalar::from_rational(int(3) + int(5) * (rat(1, 3) - int(1)) / int(2)));
        assert!((jacobi_f64(3, 1, 2, 0.3) - jacobi(3, 1, 2, &Scalar::from_rational(rat(3, 10))).to_complex().re).abs() < 1e-12);
    }

    #[test]
    fn classical_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let e = EulerAngles::random(&mut rng);
            assert!((xi_classical(BasisLabel::zero(), 1.0, &e).unwrap() - 1.0).norm() < 1e-12);
            let jp = Complex64::i() * e.beta.sin() * Complex64::from_polar(1.0, -e.alpha);
            assert!((xi_classical(BasisLabel::of(2, 0, 2), 1.0, &e).unwrap() - jp).norm() < 1e-12);
            let row: f64 = (-2..=2).step_by(2).map(|m| wigner_d(2, m, 0, &e).norm_sqr()).sum();
            assert!((row - 1.0).abs() < 1e-12);
            for l in BasisLabel::all_up_to(4) {
                let v = xi_classical(l, 1.0, &e).unwrap();
                let d = drm_base(l, 1.0, &e, BinomialIndex::NPlusR).unwrap();
                assert!((v - d).norm() < 1e-10, "{l}");
                assert!((v - xi_jacobi_form(l, 1.0, &e)).norm() < 1e-10, "{l}");
            }
        }
        assert!((wigner_d(0, 0, 0, &EulerAngles::new(0.3, 0.2, 0.1)) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn clebsch_gordan_examples() {
        assert_eq!(clebsch_gordan(1, 1, 2, 1, 1, 2).unwrap(), Scalar::one());
        assert_eq!(clebsch_gordan(1, 1, 0, 1, -1, 0).unwrap(), Scalar::sqrt_rational(&rat(1, 2)).unwrap());
        assert_eq!(clebsch_gordan(1, 1, 0, -1, 1, 0).unwrap(), -Scalar::sqrt_rational(&rat(1, 2)).unwrap());
        assert!(matches!(clebsch_gordan(1, 1, 4, 1, 1, 2), Err(Error::InvalidCoupling(_))));
        for j1 in 0..=3 {
            for j2 in 0..=3 {
                let js: Vec<i32> = ((j1 - j2).abs()..=j1 + j2).step_by(2).collect();
                for &ja in &js {
                    for &jb in &js {
                        for m in (-ja.min(jb)..=ja.min(jb)).step_by(2) {
                            let mut acc = Scalar::zero();
                            for m1 in (-j1..=j1).step_by(2) {
                                let m2 = m - m1;
                                if m2.abs() > j2 {
                                    continue;
                                }
                                acc += &(&clebsch_gordan(j1, j2, ja, m1, m2, m).unwrap() * &clebsch_gordan(j1, j2, jb, m1, m2, m).unwrap());
                            }
                            let e = if ja == jb { Scalar::one() } else { Scalar::zero() };
                            assert_eq!(acc, e);
                        }
                    }
                }
            }
        }
    }
}
