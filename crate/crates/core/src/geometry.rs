//! Contraction operators, exterior derivative, vector fields, metric and spinors.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coeff::{fmt_half_int, int, Scalar};
use crate::error::{Error, Result};
use crate::psi::{product_rho, rho, xi_entry, BasisLabel, ParamPoint, PsiElement};
use crate::weil::WElement;

/// How the triple product inside `omega` is projected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum OmegaMode {
    /// `rho(A x B)`, one projection of the full product.
    #[default]
    Single,
    /// `rho(A rho(x B))`
    RightNested,
    /// `rho(rho(A x) B)`
    LeftNested,
}

/// An element together with the sector it is supported on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSector {
    pub r2: i32,
    pub element: PsiElement,
}

impl FieldSector {
    pub fn new(r2: i32, element: PsiElement) -> Result<Self> {
        check_sector(&element, r2)?;
        Ok(FieldSector { r2, element })
    }
}

fn check_sector(x: &PsiElement, r2: i32) -> Result<()> {
    match x.labels().find(|l| l.r2 != r2) {
        Some(l) => Err(Error::SectorMismatch { expected: format!("r = {}", fmt_half_int(r2)), found: l.to_string() }),
        None => Ok(()),
    }
}

/// `omega^{r1 r2}_n(x) = sum_m rho(Xi(n,r2,m)^dagger x Xi(n,r1,m))`, labels doubled.
pub fn omega(r1: i32, r2: i32, n2: i32, x: &PsiElement, p: &ParamPoint, mode: OmegaMode) -> Result<PsiElement> {
    let xw = x.lift();
    let mut acc_w = WElement::zero();
    let mut acc = PsiElement::zero();
    for m2 in (-n2..=n2).step_by(2) {
        let (Ok(l1), Ok(l2)) = (BasisLabel::new(n2, r1, m2), BasisLabel::new(n2, r2, m2)) else {
            continue;
        };
        let a = xi_entry(l2).w.dagger();
        let b = &xi_entry(l1).w;
        match mode {
            OmegaMode::Single => acc_w.add_assign(&a.mul(&xw).mul(b)),
            OmegaMode::RightNested => {
                let inner = rho(&xw.mul(b), p)?;
                acc = acc.add(&rho(&a.mul(&inner.lift()), p)?);
            }
            OmegaMode::LeftNested => {
                let inner = rho(&a.mul(&xw), p)?;
                acc = acc.add(&rho(&inner.lift().mul(b), p)?);
            }
        }
    }
    match mode {
        OmegaMode::Single => rho(&acc_w, p),
        _ => Ok(acc),
    }
}

fn require_numeric(p: &ParamPoint) -> Result<()> {
    if p.is_numeric() {
        Ok(())
    } else {
        Err(Error::SymbolicPointUnsupported)
    }
}

/// `2 Rh + eps` at `p`.
fn two_rh_eps(p: &ParamPoint) -> Result<Scalar> {
    p.specialize(&(&Scalar::rhat().scale(&int(2)) + &Scalar::eps()))
}

fn inv_sqrt_two_rh_eps(p: &ParamPoint) -> Result<Scalar> {
    require_numeric(p)?;
    let v = two_rh_eps(p)?;
    let q = v.as_rational().ok_or_else(|| Error::InvalidPoint(format!("2Rh + eps = {v} is not rational")))?;
    if q <= int(0) {
        return Err(Error::InvalidPoint(format!("2Rh + eps = {v}")));
    }
    Scalar::sqrt_rational(&(int(1) / q))
}

fn sign_pow(e: i32) -> Scalar {
    Scalar::from_int(if e.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// `x^m = (2Rh+eps)^{-1/2} Xi(1,0,m)` for `m = -1, 0, 1`.
pub fn coordinates(p: &ParamPoint) -> Result<[PsiElement; 3]> {
    let c = inv_sqrt_two_rh_eps(p)?;
    Ok([-2, 0, 2].map(|m2| PsiElement::term(BasisLabel::of(2, 0, m2), c.clone())))
}

/// `dx^m = (2Rh+eps)^{-1/2} Xi(1,-1,m)`.
pub fn one_forms(p: &ParamPoint) -> Result<[PsiElement; 3]> {
    let c = inv_sqrt_two_rh_eps(p)?;
    Ok([-2, 0, 2].map(|m2| PsiElement::term(BasisLabel::of(2, -2, m2), c.clone())))
}

/// `X_m = (dx^m)^dagger = (-1)^{m+1} (2Rh+eps)^{-1/2} Xi(1,1,-m)`.
pub fn vector_fields(p: &ParamPoint) -> Result<[PsiElement; 3]> {
    let c = inv_sqrt_two_rh_eps(p)?;
    Ok([-1, 0, 1].map(|m| PsiElement::term(BasisLabel::of(2, 2, -2 * m), &sign_pow(m + 1) * &c)))
}

fn div_eps(x: &PsiElement) -> Result<PsiElement> {
    let inv = Scalar::eps_pow2(-2);
    x.map_coeffs(|c| {
        if c.is_o_eps() {
            Ok(c * &inv)
        } else {
            Err(Error::NotEpsDivisible(c.to_string()))
        }
    })
}

/// `omega^{01}_1(f) / eps` at symbolic `(eps, Rh)`; equals `(2Rh+eps) d f`.
pub fn exterior_d_cleared(f: &PsiElement) -> Result<PsiElement> {
    div_eps(&omega(0, 2, 2, f, &ParamPoint::symbolic(), OmegaMode::Single)?)
}

/// `d f = (eps (2Rh+eps))^{-1} omega^{01}_1(f)` on any single sector
/// (the map `Psi^r -> Psi^{r-1}`).
pub fn exterior_d_ext(f: &PsiElement, p: &ParamPoint) -> Result<PsiElement> {
    require_numeric(p)?;
    let inv = two_rh_eps(p)?.inverse_numeric()?;
    Ok(exterior_d_cleared(f)?.specialize(p)?.scale(&inv))
}

/// Exterior derivative on functions (sector 0).
pub fn exterior_d(f: &PsiElement, p: &ParamPoint) -> Result<PsiElement> {
    check_sector(f, 0)?;
    exterior_d_ext(f, p)
}

/// `X(f) = rho((d f) X)`.
pub fn vector_action(x: &PsiElement, f: &PsiElement, p: &ParamPoint) -> Result<PsiElement> {
    check_sector(x, 2)?;
    product_rho(&exterior_d(f, p)?, x, p)
}

/// `g(X, Y) = rho(X^dagger Y)`.
pub fn metric(x: &PsiElement, y: &PsiElement, p: &ParamPoint) -> Result<PsiElement> {
    check_sector(x, 2)?;
    check_sector(y, 2)?;
    rho(&x.lift().dagger().mul(&y.lift()), p)
}

/// `lim_{eps -> 0} (1/(i eps)) rho([x, y])`, from the symbolic pipeline.
pub fn bracket_eps_limit(x: &PsiElement, y: &PsiElement) -> Result<PsiElement> {
    let c = rho(&x.lift().commutator(&y.lift()), &ParamPoint::symbolic())?;
    let minus_i = -Scalar::i();
    div_eps(&c)?.map_coeffs(|v| (v * &minus_i).subs_eps(&int(0)))
}

pub fn delta_n(x: &PsiElement) -> PsiElement {
    x.delta_n()
}

/// `(D(fg) - rho(D(f) g) - rho(f D(g)))` with `D` the cleared derivative.
pub fn leibniz_defect(f: &PsiElement, g: &PsiElement) -> Result<PsiElement> {
    let p = ParamPoint::symbolic();
    let fg = product_rho(f, g, &p)?;
    let lhs = exterior_d_cleared(&fg)?;
    let a = product_rho(&exterior_d_cleared(f)?, g, &p)?;
    let b = product_rho(f, &exterior_d_cleared(g)?, &p)?;
    Ok(lhs.sub(&a).sub(&b))
}

/// `Y(f) = rho(D(f) Xi(1,1,-m))`, the cleared vector field action.
pub fn vector_action_cleared(m2: i32, f: &PsiElement) -> Result<PsiElement> {
    let x = PsiElement::basis(BasisLabel::new(2, 2, -m2)?);
    product_rho(&exterior_d_cleared(f)?, &x, &ParamPoint::symbolic())
}

pub fn derivation_defect(m2: i32, f: &PsiElement, g: &PsiElement) -> Result<PsiElement> {
    let p = ParamPoint::symbolic();
    let fg = product_rho(f, g, &p)?;
    let lhs = vector_action_cleared(m2, &fg)?;
    let a = product_rho(&vector_action_cleared(m2, f)?, g, &p)?;
    let b = product_rho(f, &vector_action_cleared(m2, g)?, &p)?;
    Ok(lhs.sub(&a).sub(&b))
}

/// Outcome of comparing `d Xi(n,0,m) = c_n Xi(n,-1,m)` with the two candidate coefficients.
#[derive(Clone, Debug, Serialize)]
pub struct DCoefficientReport {
    pub n2: i32,
    /// `(2Rh+eps) c_n` from the oracle.
    pub cleared: String,
    pub m_independent: bool,
    /// `2n (Rh + eps n/2) / (Rh + eps)`
    pub rh_plus_eps_matches: bool,
    /// `2n (Rh + eps n/2) / (2Rh + eps)`
    pub two_rh_plus_eps_matches: bool,
}

pub fn d_coefficient_report(n2: i32) -> Result<DCoefficientReport> {
    if n2 % 2 != 0 || n2 < 2 {
        return Err(Error::InvalidLabel { n: n2, r: 0, m: 0 });
    }
    let mut values = Vec::new();
    for m2 in (-n2..=n2).step_by(2) {
        let d = exterior_d_cleared(&PsiElement::basis(BasisLabel::of(n2, 0, m2)))?;
        let l = BasisLabel::of(n2, -2, m2);
        if d.len() != 1 || d.coeff(&l).is_zero() {
            return Err(Error::SectorMismatch { expected: l.to_string(), found: format!("{d}") });
        }
        values.push(d.coeff(&l));
    }
    let v = values[0].clone();
    let n = n2 / 2;
    let rh = Scalar::rhat();
    let e = Scalar::eps();
    // 2n (Rh + eps n/2) = n (2Rh + eps n)
    let num = &(&rh.scale(&int(2)) + &e.scale(&int(n as i64))) * &Scalar::from_int(n as i64);
    let two_rh_e = &rh.scale(&int(2)) + &e;
    Ok(DCoefficientReport {
        n2,
        cleared: v.to_string(),
        m_independent: values.iter().all(|x| *x == v),
        rh_plus_eps_matches: &v * &(&rh + &e) == &num * &two_rh_e,
        two_rh_plus_eps_matches: v == num,
    })
}

/// `d` of every `Xi(n,0,m)` hits `Xi(n,-1,m)` with a nonzero multiple, so
/// the images span sector `-1` up to `n2_max`.
pub fn exact_forms_span(n2_max: i32, p: &ParamPoint) -> Result<bool> {
    for l in BasisLabel::in_sector(-2, n2_max) {
        let f = PsiElement::basis(BasisLabel::new(l.n2, 0, l.m2)?);
        let d = exterior_d(&f, p)?;
        if d.len() != 1 || d.coeff(&l).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A sector-0 `f` with `d(d f) != 0`, using the extended derivative.
pub fn d_squared_witness(p: &ParamPoint, n2_max: i32) -> Result<Option<(BasisLabel, PsiElement)>> {
    for l in BasisLabel::in_sector(0, n2_max) {
        let dd = exterior_d_ext(&exterior_d(&PsiElement::basis(l), p)?, p)?;
        if !dd.is_zero() {
            return Ok(Some((l, dd)));
        }
    }
    Ok(None)
}

/// `(rho(ap f1 + am f2), rho(bp f1 + bm f2))`.
pub fn spinor_column(f1: &PsiElement, f2: &PsiElement, p: &ParamPoint) -> Result<(PsiElement, PsiElement)> {
    check_sector(f1, 0)?;
    check_sector(f2, 0)?;
    let (w1, w2) = (f1.lift(), f2.lift());
    let top = rho(&WElement::ap().mul(&w1).add(&WElement::am().mul(&w2)), p)?;
    let bottom = rho(&WElement::bp().mul(&w1).add(&WElement::bm().mul(&w2)), p)?;
    Ok((top, bottom))
}

/// Whether `col` is a spinor column with `f1, f2` in the span of sector-0
/// basis elements up to `n2_max`. Exact elimination at a numeric point; a
/// negative answer only covers that span.
pub fn is_spinor(col: &(PsiElement, PsiElement), p: &ParamPoint, n2_max: i32) -> Result<bool> {
    require_numeric(p)?;
    let mut gens = Vec::new();
    for l in BasisLabel::in_sector(0, n2_max) {
        let f = PsiElement::basis(l);
        gens.push(spinor_column(&f, &PsiElement::zero(), p)?);
        gens.push(spinor_column(&PsiElement::zero(), &f, p)?);
    }
    let target = (col.0.specialize(p)?, col.1.specialize(p)?);
    let mut keys = BTreeMap::new();
    for (a, b) in gens.iter().chain(std::iter::once(&target)) {
        for l in a.labels() {
            let n = keys.len();
            keys.entry((0u8, *l)).or_insert(n);
        }
        for l in b.labels() {
            let n = keys.len();
            keys.entry((1u8, *l)).or_insert(n);
        }
    }
    let to_vec = |c: &(PsiElement, PsiElement)| {
        let mut v = vec![Scalar::zero(); keys.len()];
        for (l, x) in c.0.terms() {
            v[keys[&(0, *l)]] = x.clone();
        }
        for (l, x) in c.1.terms() {
            v[keys[&(1, *l)]] = x.clone();
        }
        v
    };
    let cols: Vec<Vec<Scalar>> = gens.iter().map(to_vec).collect();
    in_span(&cols, &to_vec(&target))
}

/// Exact test of `target` in the column span, by row reduction.
pub fn in_span(cols: &[Vec<Scalar>], target: &[Scalar]) -> Result<bool> {
    let rows = target.len();
    let ncols = cols.len();
    let mut m: Vec<Vec<Scalar>> =
        (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).chain(std::iter::once(target[i].clone())).collect()).collect();
    let mut pivot_row = 0;
    for c in 0..ncols {
        let Some(pr) = (pivot_row..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, pr);
        let inv = m[pivot_row][c].inverse_numeric()?;
        for x in m[pivot_row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in c..=ncols {
                    let sub = &f * &m[pivot_row][k];
                    m[r][k] -= &sub;
                }
            }
        }
        pivot_row += 1;
    }
    Ok(m[pivot_row..].iter().all(|row| row[ncols].is_zero()))
}

/// Sign picked up under a `2 pi` rotation: `e^{2 pi i m} = (-1)^{2n}` on every support label.
pub fn two_pi_rotation_sign(x: &PsiElement) -> Result<i32> {
    let mut sign = None;
    for l in x.labels() {
        let s = if l.n2 % 2 == 0 { 1 } else { -1 };
        let from_m = if l.m2 % 2 == 0 { 1 } else { -1 };
        debug_assert_eq!(s, from_m);
        match sign {
            None => sign = Some(s),
            Some(t) if t != s => return Err(Error::MixedParity),
            _ => {}
        }
    }
    Ok(sign.unwrap_or(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;
    use crate::psi::{inner, norm_sq};

    fn points() -> Vec<ParamPoint> {
        vec![
            ParamPoint::numeric(int(1), int(3)).unwrap(),
            ParamPoint::numeric(rat(1, 3), rat(7, 4)).unwrap(),
            ParamPoint::at_level(rat(1, 2), 4).unwrap(),
        ]
    }

    #[test]
    fn omega_of_one() {
        let p = ParamPoint::symbolic();
        for l in BasisLabel::all_up_to(3) {
            if l.m2 != l.n2 {
                continue;
            }
            let got = omega(l.r2, l.r2, l.n2, &PsiElement::one(), &p, OmegaMode::Single).unwrap();
            let e = norm_sq(l.n2, l.r2, &p).unwrap().scale(&int((l.n2 + 1) as i64));
            assert_eq!(got, PsiElement::term(BasisLabel::zero(), e), "{l}");
        }
        let got = omega(0, 0, 2, &PsiElement::one(), &p, OmegaMode::Single).unwrap();
        let e: Scalar = "2*Rh^2 - (1/2)*eps^2".parse().unwrap();
        assert_eq!(got.pi0(), e);
        assert!(omega(0, 2, 2, &PsiElement::one(), &p, OmegaMode::Single).unwrap().is_zero());
    }

    #[test]
    fn omega_shifts_sector() {
        let p = ParamPoint::numeric(int(1), rat(5, 2)).unwrap();
        for l in BasisLabel::in_sector(0, 4) {
            let out = omega(0, 2, 2, &PsiElement::basis(l), &p, OmegaMode::Single).unwrap();
            if l.n2 == 0 {
                assert!(out.is_zero());
            } else {
                assert_eq!(out.labels().copied().collect::<Vec<_>>(), vec![BasisLabel::of(l.n2, -2, l.m2)]);
            }
        }
    }

    #[test]
    fn coordinates_and_forms() {
        for p in points() {
            let xs = coordinates(&p).unwrap();
            let dxs = one_forms(&p).unwrap();
            let mut acc = Scalar::zero();
            for x in &xs {
                acc += &inner(x, x, &p).unwrap();
            }
            let r_sq = p.r_squared().unwrap();
            assert_eq!(acc, &r_sq.scale(&int(2)) * &two_rh_eps(&p).unwrap().inverse_numeric().unwrap());
            for (m, x) in [-1, 0, 1].iter().zip(&xs) {
                assert_eq!(x.ad_j0(), x.scale(&Scalar::eps().scale(&int(*m))));
            }
            for dx in &dxs {
                assert!(dx.in_sector(-2));
            }
            assert!(exterior_d(&PsiElement::one(), &p).unwrap().is_zero());
            for (x, dx) in xs.iter().zip(&dxs) {
                assert_eq!(&exterior_d(x, &p).unwrap(), dx);
            }
        }
        assert!(matches!(coordinates(&ParamPoint::symbolic()), Err(Error::SymbolicPointUnsupported)));
        let bad = PsiElement::basis(BasisLabel::of(2, 2, 0));
        assert!(matches!(exterior_d(&bad, &points()[0]), Err(Error::SectorMismatch { .. })));
    }

    #[test]
    fn vector_fields_sum() {
        for p in points() {
            let xs = coordinates(&p).unwrap();
            let vs = vector_fields(&p).unwrap();
            let mut left = WElement::zero();
            let mut right = WElement::zero();
            for (x, v) in xs.iter().zip(&vs) {
                assert!(v.in_sector(2));
                left.add_assign(&x.lift().mul(&v.lift()));
                right.add_assign(&v.lift().mul(&x.lift()));
            }
            assert!(rho(&left, &p).unwrap().is_zero());
            assert!(rho(&right, &p).unwrap().is_zero());
            let f = PsiElement::basis(BasisLabel::of(4, 0, 2));
            assert!(vector_action(&vs[0], &f, &p).unwrap().in_sector(0));
        }
    }

    #[test]
    fn d_coefficient_candidates() {
        for n2 in [2, 4, 6] {
            let r = d_coefficient_report(n2).unwrap();
            assert!(r.m_independent);
            assert!(r.two_rh_plus_eps_matches, "{r:?}");
            assert!(!r.rh_plus_eps_matches);
        }
    }

    #[test]
    fn defects_are_o_eps() {
        let fs = [BasisLabel::of(2, 0, 0), BasisLabel::of(2, 0, 2), BasisLabel::of(4, 0, -2)];
        for a in fs {
            for b in fs {
                let (f, g) = (PsiElement::basis(a), PsiElement::basis(b));
                let d = leibniz_defect(&f, &g).unwrap();
                assert!(d.eps_order().map_or(true, |o| o >= 2), "{a} {b}");
                for m2 in [-2, 0, 2] {
                    let d = derivation_defect(m2, &f, &g).unwrap();
                    assert!(d.eps_order().map_or(true, |o| o >= 2));
                }
            }
        }
    }

    #[test]
    fn metric_examples() {
        let p = points()[0].clone();
        let vs = vector_fields(&p).unwrap();
        let expect = p.specialize(&(&Scalar::rhat() + &Scalar::eps()).scale(&rat(2, 3))).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let g = metric(&vs[i], &vs[j], &p).unwrap();
                assert!(g.in_sector(0));
                assert!(!g.is_zero());
                assert_eq!(g.dagger_label(), metric(&vs[j], &vs[i], &p).unwrap());
                if i == j {
                    assert_eq!(g.pi0(), expect);
                } else {
                    assert!(g.pi0().is_zero());
                }
            }
        }
    }

    #[test]
    fn bracket_examples() {
        let a = PsiElement::basis(BasisLabel::of(2, 0, 0));
        let b = PsiElement::basis(BasisLabel::of(2, 0, 2));
        let e = PsiElement::term(BasisLabel::of(2, 0, 2), &Scalar::i() * &Scalar::sqrt_int(2));
        assert_eq!(bracket_eps_limit(&a, &b).unwrap(), e);
        assert!(bracket_eps_limit(&b, &b).unwrap().is_zero());
        assert!(delta_n(&PsiElement::one()).is_zero());
    }

    #[test]
    fn spinors_and_signs() {
        let p = ParamPoint::numeric(int(1), rat(7, 3)).unwrap();
        let col = spinor_column(&PsiElement::one(), &PsiElement::zero(), &p).unwrap();
        assert!(is_spinor(&col, &p, 4).unwrap());
        let ap_only = (rho(&WElement::ap(), &p).unwrap(), PsiElement::zero());
        assert!(!is_spinor(&ap_only, &p, 4).unwrap());
        assert_eq!(two_pi_rotation_sign(&PsiElement::basis(BasisLabel::of(2, 0, 0))).unwrap(), 1);
        assert_eq!(two_pi_rotation_sign(&PsiElement::basis(BasisLabel::of(1, 1, 1))).unwrap(), -1);
        let mixed = PsiElement::basis(BasisLabel::of(1, 1, 1)).add(&PsiElement::one());
        assert!(matches!(two_pi_rotation_sign(&mixed), Err(Error::MixedParity)));
    }

    #[test]
    fn exactness_and_d_squared() {
        let p = ParamPoint::numeric(int(1), rat(9, 2)).unwrap();
        assert!(exact_forms_span(4, &p).unwrap());
        assert!(d_squared_witness(&p, 4).unwrap().is_some());
    }
}
