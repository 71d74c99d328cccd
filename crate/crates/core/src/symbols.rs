//! Symbols of operator families: per-level multipliers, the two-term jet
//! `σ_p + ħ σ_s`, the subprincipal variants and the algebra `Σ`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{hamiltonian_field, laplacian, poisson_bracket, CoeffTable, FsFunction, TwoForm, VectorField};
use crate::linalg::{least_squares, solve_exact};
use crate::metaplectic::{curvature, q_d_complex, CurvatureData, MetaDerivative};
use crate::poly::Poly;
use crate::scalar::{binomial, q_to_f64, Coeff, Cq, Q};
use crate::sections::gram;
use crate::toeplitz::{commutator_family, OperatorFamily, OperatorMatrix, Provenance};
use crate::{Error, Result};

pub const DEFAULT_BAND: u32 = 8;
pub const DEFAULT_FIT_ORDER: usize = 3;
/// Per-level residual above which a family is flagged as not a Toeplitz operator of the band.
pub const RESIDUAL_GATE: f64 = 1e-9;
pub const CONDITION_GATE: f64 = 1e8;

/// Levels used for exact extraction: enough points to pin down the
/// coefficients as rational functions of `k`.
pub fn extraction_grid() -> Vec<u32> {
    (8..=20).collect()
}

/// `g = Σ c[a][b] z^a z̄^b / ρ^band` with `Π_k g ≈ M`.
#[derive(Clone, Debug)]
pub struct Multiplier {
    pub band: u32,
    pub coeffs: BTreeMap<(u32, u32), Cq>,
    pub residual: f64,
    pub condition: f64,
    pub exact: bool,
}

impl Multiplier {
    pub fn to_fs(&self) -> FsFunction {
        FsFunction::new(Poly::from_terms(self.coeffs.iter().map(|(k, v)| (*k, v.clone()))), self.band).canonical()
    }
}

/// Inverse of `Π_k` on band-limited functions, solved diagonal by diagonal.
///
/// With `N = band + d`, the image of `z^{b+s} z̄^b / ρ^band` has entries
/// `E[q+s][q] = (d+1) C(d, q+s) / ((N+1) C(N, q+b+s))`; rows of each
/// diagonal form a positive Hankel moment system.
pub fn extract_multiplier(m: &OperatorMatrix, band: u32) -> Result<Multiplier> {
    let d = m.spec.degree() as i64;
    let l = band as i64;
    if l > d {
        return Err(Error::Fit(format!("band {band} exceeds degree {d}")));
    }
    let n_tot = (l + d) as u64;
    let big_n: Vec<BigInt> = (0..=n_tot).map(|j| binomial(n_tot, j)).collect();
    let big_d: Vec<BigInt> = (0..=d as u64).map(|j| binomial(d as u64, j)).collect();
    let g = gram(&m.spec);
    let sq = |p: usize, qq: usize| q_to_f64(&(&g.norms[p] / &g.norms[qq])).sqrt();
    let mut coeffs = BTreeMap::new();
    let mut resid_sq = 0.0;
    let mut condition = 1.0f64;
    for s in -l..=l {
        let b0 = 0.max(-s);
        let b1 = l.min(l - s);
        let q0 = 0.max(-s);
        let q1 = d.min(d - s);
        let cols: Vec<i64> = (b0..=b1).collect();
        let rows: Vec<i64> = (q0..=q1).collect();
        // design[q][b] = 1/C(N, q+b+s); rescale[q] = (d+1) C(d,p) / (N+1)
        let design = |q: i64, b: i64| Q::new(BigInt::from(1), big_n[(q + b + s) as usize].clone());
        let rescale = |q: i64| Q::new(BigInt::from(d + 1) * &big_d[(q + s) as usize], BigInt::from(n_tot + 1));
        // condition number of the map coefficients → orthonormal entries
        let a_f = DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            let (q, b) = (rows[i], cols[j]);
            q_to_f64(&(design(q, b) * rescale(q))) * sq((q + s) as usize, q as usize)
        });
        let col_norms: Vec<f64> = (0..cols.len()).map(|j| a_f.column(j).norm()).collect();
        let a_scaled = DMatrix::from_fn(rows.len(), cols.len(), |i, j| a_f[(i, j)] / col_norms[j]);
        let sv = a_scaled.clone().singular_values();
        let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(x, y), v| (x.max(*v), y.min(*v)));
        condition = condition.max(smax / smin);

        let sol: Vec<Cq> = match &m.exact {
            Some(e) => {
                let n = cols.len();
                let a: Vec<Vec<Cq>> = rows[..n]
                    .iter()
                    .map(|&q| cols.iter().map(|&b| Cq::real(design(q, b))).collect())
                    .collect();
                let rhs: Vec<Cq> = rows[..n]
                    .iter()
                    .map(|&q| e.get((q + s) as usize, q as usize).div_q(&rescale(q)))
                    .collect();
                let x = solve_exact(a, rhs).ok_or_else(|| Error::Fit("singular moment system".into()))?;
                for &q in &rows {
                    let mut pred = Cq::zero();
                    for (j, &b) in cols.iter().enumerate() {
                        pred = pred + x[j].scale_q(&design(q, b));
                    }
                    let diff = e.get((q + s) as usize, q as usize) - pred.scale_q(&rescale(q));
                    if !diff.is_zero() {
                        resid_sq += (diff.to_c64() * sq((q + s) as usize, q as usize)).norm_sqr();
                    }
                }
                x
            }
            None => {
                let y: Vec<Complex64> = rows.iter().map(|&q| m.entries[((q + s) as usize, q as usize)]).collect();
                let (xr, _) = least_squares(&a_scaled, &DVector::from_iterator(y.len(), y.iter().map(|v| v.re)));
                let (xi, _) = least_squares(&a_scaled, &DVector::from_iterator(y.len(), y.iter().map(|v| v.im)));
                let pred = &a_scaled * &xr;
                let predi = &a_scaled * &xi;
                for i in 0..y.len() {
                    resid_sq += (y[i] - Complex64::new(pred[i], predi[i])).norm_sqr();
                }
                (0..cols.len())
                    .map(|j| {
                        let v = Complex64::new(xr[j], xi[j]) / col_norms[j];
                        Cq::new(Q::from_float(v.re).unwrap(), Q::from_float(v.im).unwrap())
                    })
                    .collect()
            }
        };
        for (j, &b) in cols.iter().enumerate() {
            if !sol[j].is_zero() {
                coeffs.insert(((b + s) as u32, b as u32), sol[j].clone());
            }
        }
    }
    Ok(Multiplier { band, coeffs, residual: resid_sq.sqrt(), condition, exact: m.exact.is_some() })
}

/// `c(k) = P(k)/Q(k)` fitted exactly through the points, expanded at infinity:
/// returns `(c_∞, c_1)` with `c(k) = c_∞ + c_1/k + O(k⁻²)`.
pub fn rational_limit(points: &[(u32, Cq)]) -> Option<(Cq, Cq)> {
    let first = &points[0].1;
    if points.iter().all(|(_, c)| c == first) {
        return Some((first.clone(), Cq::zero()));
    }
    let npts = points.len();
    let mut n = 1;
    while 2 * n + 1 + 2 <= npts {
        let unknowns = 2 * n + 1;
        let row = |k: u32, c: &Cq| {
            let kq = Cq::int(k as i64);
            let mut pw = vec![Cq::one()];
            for j in 1..=n {
                pw.push(&pw[j - 1] * &kq);
            }
            let mut r: Vec<Cq> = pw.clone();
            for item in pw.iter().take(n) {
                r.push(-(c * item));
            }
            (r, c * &pw[n])
        };
        let (a, b): (Vec<_>, Vec<_>) = points[..unknowns].iter().map(|(k, c)| row(*k, c)).unzip();
        if let Some(x) = solve_exact(a, b) {
            let ok = points[unknowns..].iter().all(|(k, c)| {
                let (r, rhs) = row(*k, c);
                let lhs = r.iter().zip(&x).fold(Cq::zero(), |acc, (u, v)| acc + u * v);
                lhs == rhs
            });
            if ok {
                let p_n = x[n].clone();
                let p_prev = x[n - 1].clone();
                let q_prev = x[2 * n].clone();
                return Some((p_n.clone(), p_prev - &p_n * &q_prev));
            }
        }
        n += 1;
    }
    None
}

/// Least-squares fit of `c(k) ≈ Σ_{j ≤ order} a_j k^{-j}`: `(a_0, a_1, rms residual)`.
pub fn fit_inverse_k(points: &[(u32, Complex64)], order: usize) -> Result<(Complex64, Complex64, f64)> {
    if points.len() < order + 2 {
        return Err(Error::Fit(format!("need at least {} levels for order {order}", order + 2)));
    }
    let a = DMatrix::from_fn(points.len(), order + 1, |i, j| (points[i].0 as f64).powi(-(j as i32)));
    let yr = DVector::from_iterator(points.len(), points.iter().map(|p| p.1.re));
    let yi = DVector::from_iterator(points.len(), points.iter().map(|p| p.1.im));
    let (xr, _) = least_squares(&a, &yr);
    let (xi, _) = least_squares(&a, &yi);
    let rr = &a * &xr - yr;
    let ri = &a * &xi - yi;
    let rms = ((rr.norm_squared() + ri.norm_squared()) / points.len() as f64).sqrt();
    Ok((Complex64::new(xr[0], xi[0]), Complex64::new(xr[1], xi[1]), rms))
}

/// `f₀ + ħ f₁` in `Σ = C^∞(M) ⊕ ħ C^∞(M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolJet {
    pub f0: FsFunction,
    pub f1: FsFunction,
}

impl SymbolJet {
    pub fn new(f0: FsFunction, f1: FsFunction) -> Self {
        SymbolJet { f0: f0.canonical(), f1: f1.canonical() }
    }

    pub fn principal(f0: FsFunction) -> Self {
        SymbolJet::new(f0, FsFunction::zero())
    }

    pub fn identity() -> Self {
        SymbolJet::principal(FsFunction::one())
    }

    pub fn conj(&self) -> Self {
        SymbolJet::new(self.f0.conj(), self.f1.conj())
    }

    pub fn is_real(&self) -> bool {
        self.f0.is_real() && self.f1.is_real()
    }

    pub fn add(&self, o: &SymbolJet) -> Self {
        SymbolJet::new(&self.f0 + &o.f0, &self.f1 + &o.f1)
    }

    pub fn sub(&self, o: &SymbolJet) -> Self {
        SymbolJet::new(&self.f0 - &o.f0, &self.f1 - &o.f1)
    }

    pub fn scale(&self, c: &Cq) -> Self {
        SymbolJet::new(self.f0.scale(c), self.f1.scale(c))
    }

    pub fn to_tables(&self) -> JetTables {
        JetTables { f0: self.f0.to_table(), f1: self.f1.to_table() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct JetTables {
    pub f0: CoeffTable<Cq>,
    pub f1: CoeffTable<Cq>,
}

/// `(f₀ + ħf₁) ⋆ (g₀ + ħg₁) = f₀g₀ + ħ(f₀g₁ + f₁g₀ + (1/2i){f₀, g₀})`.
pub fn star_jet(a: &SymbolJet, b: &SymbolJet) -> SymbolJet {
    let half_over_i = Cq::imag(crate::scalar::q(-1, 2));
    let f1 = &(&(&a.f0 * &b.f1) + &(&a.f1 * &b.f0)) + &poisson_bracket(&a.f0, &b.f0).scale(&half_over_i);
    SymbolJet::new(&a.f0 * &b.f0, f1)
}

/// Data entering the bracket of `Σ`: the closed 2-form `R` (the connection on
/// `Herm A` is the exterior derivative for line bundles).
#[derive(Clone, Debug, PartialEq)]
pub struct BracketConstants {
    pub r: TwoForm,
}

impl From<CurvatureData> for BracketConstants {
    fn from(c: CurvatureData) -> Self {
        BracketConstants { r: c.r }
    }
}

/// `[a, b]_σ = {f₀, g₀} + ħ(R(X, Y) - X.g₁ + Y.f₁)` with `X, Y` the Hamiltonian fields of `f₀, g₀`.
pub fn bracket_sigma(a: &SymbolJet, b: &SymbolJet, c: &BracketConstants) -> SymbolJet {
    let (x, y) = (hamiltonian_field(&a.f0), hamiltonian_field(&b.f0));
    let f1 = &(&c.r.eval(&x, &y) - &x.apply(&b.f1)) + &y.apply(&a.f1);
    SymbolJet::new(poisson_bracket(&a.f0, &b.f0), f1)
}

/// `B(f, g) = -ρ² ∂f ∂̄g`, the first-order term of the contravariant product.
pub fn b_kahler(f: &FsFunction, g: &FsFunction) -> FsFunction {
    (&f.dz() * &g.dzb()).mul_rho_pow(2).scale(&Cq::int(-1)).canonical()
}

/// `B^s(f,g) - (f Q(g) + Q(f) g - Q(fg))` with `Q = ½Δ` and `B^s` the symmetric part of `B`.
pub fn hochschild_defect(f: &FsFunction, g: &FsFunction) -> FsFunction {
    let half = Cq::ratio(1, 2);
    let q = |h: &FsFunction| laplacian(h).scale(&half);
    let bs = (&b_kahler(f, g) + &b_kahler(g, f)).scale(&half);
    let cob = &(&(f * &q(g)) + &(&q(f) * g)) - &q(&(f * g));
    (&bs - &cob).canonical()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    /// Coefficients reconstructed exactly as rational functions of `k`.
    ExactRational,
    /// Least-squares polynomial fit in `1/k`.
    InverseK,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractOptions {
    pub band: u32,
    pub order: usize,
    /// Use exact reconstruction when every member carries exact entries.
    pub prefer_exact: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { band: DEFAULT_BAND, order: DEFAULT_FIT_ORDER, prefer_exact: true }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelReport {
    pub k: u32,
    pub residual: f64,
    pub condition: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PassFlags {
    pub toeplitz: bool,
    pub well_conditioned: bool,
}

#[derive(Clone, Debug)]
pub struct ExtractionReport {
    pub family_id: String,
    pub method: FitMethod,
    pub jet: SymbolJet,
    pub levels: Vec<LevelReport>,
    pub fit_residual: f64,
    pub flags: PassFlags,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    family_id: &'a str,
    variant: &'a str,
    method: FitMethod,
    jet: JetTables,
    residuals: Vec<(u32, f64)>,
    condition_numbers: Vec<(u32, f64)>,
    fit_residual: f64,
    pass_flags: &'a PassFlags,
}

impl ExtractionReport {
    pub fn to_json(&self, variant: &str, jet: &SymbolJet) -> Result<String> {
        let r = ReportJson {
            family_id: &self.family_id,
            variant,
            method: self.method,
            jet: jet.to_tables(),
            residuals: self.levels.iter().map(|l| (l.k, l.residual)).collect(),
            condition_numbers: self.levels.iter().map(|l| (l.k, l.condition)).collect(),
            fit_residual: self.fit_residual,
            pass_flags: &self.flags,
        };
        Ok(serde_json::to_string_pretty(&r)?)
    }
}

/// Contravariant jet of a family: per-level multipliers, then `k → ∞` expansion.
pub fn extract_jet(fam: &OperatorFamily, opts: &ExtractOptions) -> Result<ExtractionReport> {
    let mults: Vec<(u32, Multiplier)> = fam
        .members
        .par_iter()
        .map(|(k, m)| extract_multiplier(m, opts.band).map(|x| (*k, x)))
        .collect::<Result<Vec<_>>>()?;
    let keys: BTreeSet<(u32, u32)> = mults.iter().flat_map(|(_, m)| m.coeffs.keys().copied()).collect();
    let all_exact = mults.iter().all(|(_, m)| m.exact);
    let band = opts.band;
    let series = |key: &(u32, u32)| -> Vec<(u32, Cq)> {
        mults.iter().map(|(k, m)| (*k, m.coeffs.get(key).cloned().unwrap_or_else(Cq::zero))).collect()
    };
    let mut method = FitMethod::InverseK;
    let mut lead = Vec::new();
    let mut sub = Vec::new();
    let mut fit_residual = 0.0f64;
    if all_exact && opts.prefer_exact {
        let limits: Option<Vec<_>> = keys.par_iter().map(|key| rational_limit(&series(key)).map(|l| (*key, l))).collect();
        if let Some(limits) = limits {
            method = FitMethod::ExactRational;
            for (key, (c0, c1)) in limits {
                lead.push((key, c0));
                sub.push((key, c1));
            }
        } else {
            log::warn!("exact reconstruction failed for {}; falling back to 1/k fit", fam.provenance);
        }
    }
    if method == FitMethod::InverseK {
        for key in &keys {
            let pts: Vec<(u32, Complex64)> = series(key).into_iter().map(|(k, c)| (k, c.to_c64())).collect();
            let (c0, c1, rms) = fit_inverse_k(&pts, opts.order)?;
            fit_residual = fit_residual.max(rms);
            let to_q = |v: Complex64| Cq::new(Q::from_float(v.re).unwrap(), Q::from_float(v.im).unwrap());
            lead.push((*key, to_q(c0)));
            sub.push((*key, to_q(c1)));
        }
    }
    let build = |v: Vec<((u32, u32), Cq)>| FsFunction::new(Poly::from_terms(v), band).canonical();
    let levels: Vec<LevelReport> =
        mults.iter().map(|(k, m)| LevelReport { k: *k, residual: m.residual, condition: m.condition }).collect();
    let flags = PassFlags {
        toeplitz: levels.iter().all(|l| l.residual <= RESIDUAL_GATE),
        well_conditioned: levels.iter().all(|l| l.condition <= CONDITION_GATE),
    };
    Ok(ExtractionReport {
        family_id: fam.provenance.to_string(),
        method,
        jet: SymbolJet::new(build(lead), build(sub)),
        levels,
        fit_residual,
        flags,
    })
}

/// Which subprincipal symbol map to evaluate.
#[derive(Clone, Debug, PartialEq)]
pub enum Variant {
    Contravariant,
    Kahler,
    Metaplectic(MetaDerivative),
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Contravariant => "contravariant",
            Variant::Kahler => "kahler",
            Variant::Metaplectic(_) => "metaplectic",
        }
    }
}

/// `k ↦ Q_k^D(f)` over the family's grid.
pub fn quantized_family(f: &FsFunction, like: &OperatorFamily, d: &MetaDerivative) -> Result<OperatorFamily> {
    OperatorFamily::build(&like.grid(), like.m, like.half_form, Provenance::Quantized(f.to_string()), |spec| {
        q_d_complex(f, spec, d)
    })
}

/// `(σ_p, σ_s)` of a family under the chosen subprincipal map.
pub fn sigma_s_variant(fam: &OperatorFamily, variant: &Variant, opts: &ExtractOptions) -> Result<SymbolJet> {
    let rep = extract_jet(fam, opts)?;
    let jet = rep.jet;
    match variant {
        Variant::Contravariant => Ok(jet),
        Variant::Kahler => {
            let f1 = &jet.f1 + &laplacian(&jet.f0).scale(&Cq::ratio(1, 2));
            Ok(SymbolJet::new(jet.f0, f1))
        }
        Variant::Metaplectic(d) => {
            // σ_s^D(T) = σ_p(k(T - Q^D(σ_p T)))
            let q = quantized_family(&jet.f0, fam, d)?;
            let diff = extract_jet(&fam.difference(&q)?, opts)?;
            if sup_distance(&diff.jet.f0, &FsFunction::zero()) > 1e-6 {
                return Err(Error::Fit("principal symbol of T - Q(σ_p T) does not vanish".into()));
            }
            Ok(SymbolJet::new(jet.f0, diff.jet.f1))
        }
    }
}

/// Sample points on the sphere (chart coordinates) plus the point at infinity.
fn sphere_samples() -> Vec<Option<Complex64>> {
    let mut pts = vec![None];
    let (nt, np) = (24, 48);
    for i in 0..nt {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / nt as f64;
        for j in 0..np {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / np as f64;
            pts.push(Some(Complex64::from_polar((theta / 2.0).tan(), phi)));
        }
    }
    pts
}

/// `sup |f - g|` over a sphere sample (exactly zero when the functions are equal).
pub fn sup_distance(f: &FsFunction, g: &FsFunction) -> f64 {
    let diff = (f - g).canonical();
    if diff.is_zero() {
        return 0.0;
    }
    let df = diff.to_c64();
    let smooth = diff.is_globally_smooth();
    sphere_samples()
        .into_iter()
        .map(|p| match p {
            Some(z) => df.eval(z).norm(),
            None if smooth => df.eval_at_infinity().norm(),
            None => 0.0,
        })
        .fold(0.0, f64::max)
}

pub fn jet_distance(a: &SymbolJet, b: &SymbolJet) -> f64 {
    sup_distance(&a.f0, &b.f0).max(sup_distance(&a.f1, &b.f1))
}

/// The five-function catalog.
pub fn catalog() -> Vec<(&'static str, FsFunction)> {
    let (x1, x2, x3) = (FsFunction::x1(), FsFunction::x2(), FsFunction::x3());
    vec![
        ("x1", x1.clone()),
        ("x2", x2.clone()),
        ("x3", x3.clone()),
        ("x3^2", (&x3 * &x3).canonical()),
        ("x1*x2", (&x1 * &x2).canonical()),
    ]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub family: String,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomsReport {
    pub variant: String,
    pub tolerance: f64,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomsReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Axioms (i)–(iii) of a subprincipal symbol map on Toeplitz families of the catalog.
pub fn axioms_suite(variant: &Variant, grid: &[u32], m: i32, opts: &ExtractOptions, tol: f64) -> Result<AxiomsReport> {
    let cat = catalog();
    let fams: Vec<OperatorFamily> =
        cat.iter().map(|(n, f)| OperatorFamily::toeplitz(f, n, grid, m, true)).collect::<Result<_>>()?;
    let jets: Vec<SymbolJet> = fams.iter().map(|f| sigma_s_variant(f, variant, opts)).collect::<Result<_>>()?;
    let mut checks = Vec::new();
    let mut push = |axiom: &str, family: String, deviation: f64| {
        checks.push(AxiomCheck { axiom: axiom.into(), family, deviation, pass: deviation <= tol });
    };
    for (i, fam) in fams.iter().enumerate() {
        // (i) σ_s(k⁻¹ T) = σ_p(T)
        let scaled = sigma_s_variant(&fam.scale_inv_k(1), variant, opts)?;
        push("i", fam.provenance.to_string(), sup_distance(&scaled.f1, &jets[i].f0).max(sup_distance(&scaled.f0, &FsFunction::zero())));
    }
    for i in 0..fams.len() {
        for j in i + 1..fams.len() {
            let prod = fams[i].product(&fams[j])?;
            let js = sigma_s_variant(&prod, variant, opts)?;
            // (iii) σ_s(TS) = σ_p(T)σ_s(S) + σ_s(T)σ_p(S) + (1/2i){σ_p T, σ_p S}
            let expected = star_jet(&jets[i], &jets[j]);
            push("iii", prod.provenance.to_string(), jet_distance(&js, &expected));
            // (ii) σ_s(T*) = σ_s(T)*
            let adj = sigma_s_variant(&prod.adjoint(), variant, opts)?;
            push("ii", prod.provenance.to_string(), jet_distance(&adj, &js.conj()));
        }
    }
    Ok(AxiomsReport { variant: variant.name().into(), tolerance: tol, checks })
}

/// Comparison of the curvature forms attached to `σ_s` and `σ_s' = σ_s + V.σ_p`.
#[derive(Clone, Debug)]
pub struct GaugeReport {
    /// `R' - R` evaluated on Hamiltonian pairs, minus `d(ι_V ω)` on the same pairs.
    pub defect_plus: f64,
    /// Same with `+ d(ι_V ω)`.
    pub defect_minus: f64,
    pub integral_shift: Cq,
}

/// `R'(X,Y) - R(X,Y) = V.{f,g} + X.(V.g) - Y.(V.f)` from the bracket of `Σ`,
/// compared against `± d(ι_V ω)(X, Y)` on catalog pairs.
pub fn gauge_compare(v: &VectorField) -> Result<GaugeReport> {
    let alpha = crate::geometry::kahler_form().contract(v);
    let dalpha = alpha.d();
    let cat = catalog();
    let (mut plus, mut minus) = (0.0f64, 0.0f64);
    for (i, (_, f)) in cat.iter().enumerate() {
        for (_, g) in cat.iter().skip(i + 1) {
            let (x, y) = (hamiltonian_field(f), hamiltonian_field(g));
            let shift = &(&v.apply(&poisson_bracket(f, g)) + &x.apply(&v.apply(g))) - &y.apply(&v.apply(f));
            let dv = dalpha.eval(&x, &y);
            plus = plus.max(sup_distance(&shift, &dv));
            minus = minus.max(sup_distance(&shift, &dv.scale(&Cq::int(-1))));
        }
    }
    Ok(GaugeReport { defect_plus: plus, defect_minus: minus, integral_shift: dalpha.integrate()? })
}

/// Metaplectic jets of `T`, `S` and `ik[T, S]`, and the deviation of the
/// latter from `[σ(T), σ(S)]_σ` with the curvature of `D`.
pub fn commutator_jet_check(t: &OperatorFamily, s: &OperatorFamily, d: &MetaDerivative, opts: &ExtractOptions) -> Result<f64> {
    let variant = Variant::Metaplectic(d.clone());
    let jt = sigma_s_variant(t, &variant, opts)?;
    let js = sigma_s_variant(s, &variant, opts)?;
    let jc = sigma_s_variant(&commutator_family(t, s)?, &variant, opts)?;
    let consts = BracketConstants::from(curvature(d)?);
    Ok(jet_distance(&jc, &bracket_sigma(&jt, &js, &consts)))
}
