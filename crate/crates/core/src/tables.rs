//! Table generators: structure constants, reduced matrix elements, norms,
//! Hahn and Clebsch-Gordan values, classical-limit residuals.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeff::{fmt_half_int, Scalar};
use crate::error::{Error, Result};
use crate::psi::{norm_sign, norm_sq, product_rho, warm_up, BasisLabel, ParamPoint, PsiElement, DEFAULT_CACHE_N2};
use crate::special::{clebsch_gordan, drm_base, hahn_poly, xi_classical, xi_jacobi_form, BinomialIndex, EulerAngles};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TableKind {
    Structure,
    Reduced,
    Norms,
    Hahn,
    Cg,
    Classical,
}

impl TableKind {
    pub fn needs_points(&self) -> bool {
        matches!(self, TableKind::Structure | TableKind::Reduced | TableKind::Norms)
    }
}

/// Default doubled cap on `n_max`.
pub const DEFAULT_CAP_N2: i32 = 8;

#[derive(Clone, Debug)]
pub struct TableRequest {
    pub kind: TableKind,
    pub n2_max: i32,
    pub points: Vec<ParamPoint>,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
    pub seed: u64,
    pub cap_n2: i32,
}

impl TableRequest {
    pub fn new(kind: TableKind, n2_max: i32, points: Vec<ParamPoint>) -> Self {
        TableRequest { kind, n2_max, points, jobs: None, seed: 0, cap_n2: DEFAULT_CAP_N2 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n2_max > self.cap_n2 {
            return Err(Error::CapExceeded { requested: self.n2_max, cap: self.cap_n2 });
        }
        if self.n2_max < 0 {
            return Err(Error::InvalidPoint(format!("n_max = {}", fmt_half_int(self.n2_max))));
        }
        if self.kind.needs_points() && self.points.is_empty() {
            return Err(Error::InvalidPoint("no parameter point given".into()));
        }
        Ok(())
    }
}

/// Header plus string rows; CSV and JSON output mirror each other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    /// Array of objects keyed by the header.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, serde_json::Value> =
                    self.header.iter().cloned().zip(r.iter().map(|v| serde_json::Value::String(v.clone()))).collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

fn float_cols(c: &Scalar) -> [String; 2] {
    if c.is_numeric() {
        let z = c.to_complex();
        [format!("{:.15e}", z.re), format!("{:.15e}", z.im)]
    } else {
        [String::new(), String::new()]
    }
}

fn h(x2: i32) -> String {
    fmt_half_int(x2)
}

/// Runs `f` on a pool with `jobs` threads.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidPoint(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// One product coefficient `Xi(l1) Xi(l2) -> c Xi(l)` at point `point`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureEntry {
    pub point: usize,
    pub l1: BasisLabel,
    pub l2: BasisLabel,
    pub l: BasisLabel,
    pub coeff: Scalar,
}

fn check_selection(l1: &BasisLabel, l2: &BasisLabel, l: &BasisLabel) -> Result<()> {
    let ok = l.m2 == l1.m2 + l2.m2 && l.r2 == l1.r2 + l2.r2 && (l1.n2 - l2.n2).abs() <= l.n2 && l.n2 <= l1.n2 + l2.n2;
    if ok {
        Ok(())
    } else {
        Err(Error::SelectionRule(format!("{l1} * {l2} -> {l}")))
    }
}

/// The product of two basis elements, decomposed.
pub fn structure_product(l1: BasisLabel, l2: BasisLabel, p: &ParamPoint) -> Result<PsiElement> {
    let out = product_rho(&PsiElement::basis(l1), &PsiElement::basis(l2), p)?;
    for l in out.labels() {
        check_selection(&l1, &l2, l)?;
    }
    Ok(out)
}

/// All structure constants for labels up to `n2_max`, in a fixed order.
pub fn structure_entries(req: &TableRequest) -> Result<Vec<StructureEntry>> {
    req.validate()?;
    let labels = BasisLabel::all_up_to(req.n2_max);
    warm_up((2 * req.n2_max).min(DEFAULT_CACHE_N2));
    let mut tasks = Vec::new();
    for pi in 0..req.points.len() {
        for a in &labels {
            for b in &labels {
                tasks.push((pi, *a, *b));
            }
        }
    }
    let run = || {
        tasks
            .par_iter()
            .map(|(pi, l1, l2)| {
                let out = structure_product(*l1, *l2, &req.points[*pi])?;
                Ok(out
                    .terms()
                    .map(|(l, c)| StructureEntry { point: *pi, l1: *l1, l2: *l2, l: *l, coeff: c.clone() })
                    .collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>>>()
    };
    Ok(with_jobs(req.jobs, run)??.into_iter().flatten().collect())
}

fn label_cols(l: &BasisLabel) -> [String; 3] {
    [h(l.n2), h(l.r2), h(l.m2)]
}

pub fn structure_table(req: &TableRequest) -> Result<Table> {
    let entries = structure_entries(req)?;
    let mut t = Table::new(&["point", "n1", "r1", "m1", "n2", "r2", "m2", "n", "r", "m", "coefficient", "re", "im"]);
    for e in &entries {
        let mut row = vec![req.points[e.point].describe()];
        row.extend(label_cols(&e.l1));
        row.extend(label_cols(&e.l2));
        row.extend(label_cols(&e.l));
        row.push(e.coeff.to_string());
        row.extend(float_cols(&e.coeff));
        t.rows.push(row);
    }
    Ok(t)
}

/// Reduced element `R^{n1 n2 n}_{r1 r2 r}` at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedEntry {
    pub point: usize,
    pub n1: i32,
    pub n2: i32,
    pub n: i32,
    pub r1: i32,
    pub r2: i32,
    pub value: Scalar,
    /// Number of `(m1, m2)` pairs with nonzero Clebsch-Gordan coefficient.
    pub m_pairs: usize,
}

/// Divides structure constants by Clebsch-Gordan coefficients and checks
/// that the quotient does not depend on `(m1, m2)`.
pub fn reduce_structure_rows(rows: &[StructureEntry]) -> Result<Vec<ReducedEntry>> {
    let mut coeffs: BTreeMap<(usize, BasisLabel, BasisLabel, BasisLabel), &Scalar> = BTreeMap::new();
    let mut groups: BTreeMap<(usize, i32, i32, i32, i32, i32), ()> = BTreeMap::new();
    for e in rows {
        coeffs.insert((e.point, e.l1, e.l2, e.l), &e.coeff);
        groups.insert((e.point, e.l1.n2, e.l2.n2, e.l.n2, e.l1.r2, e.l2.r2), ());
    }
    let mut out = Vec::new();
    for &(point, n1, n2, n, r1, r2) in groups.keys() {
        let mut value: Option<(Scalar, BasisLabel, BasisLabel)> = None;
        let mut m_pairs = 0;
        for m1 in (-n1..=n1).step_by(2) {
            for m2 in (-n2..=n2).step_by(2) {
                let m = m1 + m2;
                if m.abs() > n {
                    continue;
                }
                let cg = clebsch_gordan(n1, n2, n, m1, m2, m)?;
                let (l1, l2, l) = (BasisLabel::of(n1, r1, m1), BasisLabel::of(n2, r2, m2), BasisLabel::of(n, r1 + r2, m));
                let c = coeffs.get(&(point, l1, l2, l)).map(|c| (*c).clone()).unwrap_or_default();
                if cg.is_zero() {
                    if !c.is_zero() {
                        return Err(Error::InconsistentReduction(format!("{l1} * {l2} -> {l}: coefficient {c} with zero CG")));
                    }
                    continue;
                }
                m_pairs += 1;
                let ratio = c.div_exact(&cg)?;
                match &value {
                    None => value = Some((ratio, l1, l2)),
                    Some((v, a, b)) if *v != ratio => {
                        return Err(Error::InconsistentReduction(format!(
                            "R({}, {}, {}; r1 = {}, r2 = {}): {v} from {a} * {b}, {ratio} from {l1} * {l2}",
                            h(n1),
                            h(n2),
                            h(n),
                            h(r1),
                            h(r2)
                        )))
                    }
                    _ => {}
                }
            }
        }
        if let Some((v, _, _)) = value {
            out.push(ReducedEntry { point, n1, n2, n, r1, r2, value: v, m_pairs });
        }
    }
    Ok(out)
}

pub fn reduced_table(req: &TableRequest) -> Result<Table> {
    let entries = reduce_structure_rows(&structure_entries(req)?)?;
    let mut t = Table::new(&["point", "n1", "n2", "n", "r1", "r2", "r", "value", "re", "im", "m_pairs"]);
    for e in &entries {
        let mut row = vec![req.points[e.point].describe(), h(e.n1), h(e.n2), h(e.n), h(e.r1), h(e.r2), h(e.r1 + e.r2)];
        row.push(e.value.to_string());
        row.extend(float_cols(&e.value));
        row.push(e.m_pairs.to_string());
        t.rows.push(row);
    }
    Ok(t)
}

pub fn norms_table(req: &TableRequest) -> Result<Table> {
    req.validate()?;
    let mut t = Table::new(&["point", "n", "r", "norm_sq", "re", "sign"]);
    for p in &req.points {
        for n2 in 0..=req.n2_max {
            for r2 in (-n2..=n2).step_by(2) {
                let v = norm_sq(n2, r2, p)?;
                let sign = match norm_sign(n2, r2, p) {
                    Ok(s) => s.to_string(),
                    Err(Error::SymbolicPointUnsupported) => String::new(),
                    Err(e) => return Err(e),
                };
                let [re, _] = float_cols(&v);
                t.rows.push(vec![p.describe(), h(n2), h(r2), v.to_string(), re, sign]);
            }
        }
    }
    Ok(t)
}

/// `h^(alpha,beta)_n(x, N)` on the lattice for `n, alpha, beta <= floor(n_max)`
/// and `N` from `n + 1` to `n + 3`.
pub fn hahn_table(req: &TableRequest) -> Result<Table> {
    req.validate()?;
    let top = (req.n2_max / 2) as u32;
    let mut t = Table::new(&["n", "alpha", "beta", "N", "x", "value", "re"]);
    for n in 0..=top {
        for alpha in 0..=top {
            for beta in 0..=top {
                for big_n in n + 1..=n + 3 {
                    let poly = hahn_poly(n, alpha, beta, &Scalar::from_int(big_n as i64));
                    for x in 0..big_n {
                        let v = poly.eval(&Scalar::from_int(x as i64));
                        let [re, _] = float_cols(&v);
                        t.rows.push(vec![
                            n.to_string(),
                            alpha.to_string(),
                            beta.to_string(),
                            big_n.to_string(),
                            x.to_string(),
                            v.to_string(),
                            re,
                        ]);
                    }
                }
            }
        }
    }
    Ok(t)
}

/// Every coupling `<j1 m1; j2 m2 | j m>` with `j1, j2 <= n_max`.
pub fn cg_table(req: &TableRequest) -> Result<Table> {
    req.validate()?;
    let mut t = Table::new(&["j1", "j2", "j", "m1", "m2", "m", "value", "re"]);
    for j1 in 0..=req.n2_max {
        for j2 in 0..=req.n2_max {
            for j in ((j1 - j2).abs()..=j1 + j2).step_by(2) {
                for m1 in (-j1..=j1).step_by(2) {
                    for m2 in (-j2..=j2).step_by(2) {
                        let m = m1 + m2;
                        if m.abs() > j {
                            continue;
                        }
                        let v = clebsch_gordan(j1, j2, j, m1, m2, m)?;
                        let [re, _] = float_cols(&v);
                        t.rows.push(vec![h(j1), h(j2), h(j), h(m1), h(m2), h(m), v.to_string(), re]);
                    }
                }
            }
        }
    }
    Ok(t)
}

/// Classical residuals at `R = 1` for `samples` random angle triples.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalResidual {
    pub label: BasisLabel,
    pub sample: usize,
    pub angles: EulerAngles,
    /// `|xi - D-form|` with index `n + r`.
    pub n_plus_r: f64,
    /// Same with index `r`; `None` where that binomial is undefined.
    pub r_index: Option<f64>,
    pub jacobi: f64,
}

pub fn classical_residuals(n2_max: i32, samples: usize, seed: u64) -> Result<Vec<ClassicalResidual>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles: Vec<EulerAngles> = (0..samples).map(|_| EulerAngles::random(&mut rng)).collect();
    let mut out = Vec::new();
    for (i, e) in angles.iter().enumerate() {
        for l in BasisLabel::all_up_to(n2_max) {
            let v = xi_classical(l, 1.0, e)?;
            let a = drm_base(l, 1.0, e, BinomialIndex::NPlusR).map_or(f64::NAN, |d| (v - d).norm());
            let b = drm_base(l, 1.0, e, BinomialIndex::R).map(|d| (v - d).norm());
            let j = (v - xi_jacobi_form(l, 1.0, e)).norm();
            out.push(ClassicalResidual { label: l, sample: i, angles: *e, n_plus_r: a, r_index: b, jacobi: j });
        }
    }
    Ok(out)
}

pub const CLASSICAL_SAMPLES: usize = 20;

pub fn classical_table(req: &TableRequest) -> Result<Table> {
    req.validate()?;
    let res = classical_residuals(req.n2_max, CLASSICAL_SAMPLES, req.seed)?;
    let mut t =
        Table::new(&["n", "r", "m", "sample", "alpha", "beta", "gamma", "residual_n_plus_r", "residual_r", "residual_jacobi"]);
    for c in &res {
        let mut row: Vec<String> = label_cols(&c.label).into();
        row.push(c.sample.to_string());
        row.extend([c.angles.alpha, c.angles.beta, c.angles.gamma].map(|x| format!("{x:.15e}")));
        row.push(format!("{:.3e}", c.n_plus_r));
        row.push(c.r_index.map_or(String::new(), |x| format!("{x:.3e}")));
        row.push(format!("{:.3e}", c.jacobi));
        t.rows.push(row);
    }
    Ok(t)
}

pub fn build_table(req: &TableRequest) -> Result<Table> {
    match req.kind {
        TableKind::Structure => structure_table(req),
        TableKind::Reduced => reduced_table(req),
        TableKind::Norms => norms_table(req),
        TableKind::Hahn => hahn_table(req),
        TableKind::Cg => cg_table(req),
        TableKind::Classical => classical_table(req),
    }
}
