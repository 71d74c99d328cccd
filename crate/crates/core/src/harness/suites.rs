//! Named verification suites. Each returns measured values with their gates;
//! `run_suites` writes the residual tables and a JSON summary.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::formal::{star_formal, verify_fourfold_product, FieldJet, FrozenFrame, JetPolynomial};
use crate::geometry::{
    b_j, canonical_commutator_defect, hamiltonian_field, kahler_form, poisson_bracket, CanonicalSection, FsFunction,
    VectorField,
};
use crate::metaplectic::{curvature, gauge_shift, hermitian_defect, leibniz_defect, q_d, scaling_defect, verify_commutator_identity, MetaDerivative};
use crate::poly::Poly;
use crate::rates::{fit_rate, RateReport, RateWindow, Verdict};
use crate::scalar::{q, Coeff, Cq};
use crate::sections::{BundleSpec, HoloSection};
use crate::symbols::{
    axioms_suite, b_kahler, bracket_sigma, catalog, commutator_jet_check, extract_jet, gauge_compare, hochschild_defect,
    jet_distance, sigma_s_variant, star_jet, sup_distance, BracketConstants, ExtractOptions, SymbolJet, Variant,
};
use crate::toeplitz::{commutator_family, exact_diagonal_norm, norm_asymptotics, norm_table, toeplitz, OperatorFamily, Provenance};
use crate::{Error, Result};

use super::config::RunConfig;
use super::write_atomic;

pub const SUITES: [&str; 10] = [
    "exact-identities",
    "norm-asymptotics",
    "commutator-rates",
    "product-rates",
    "curvature-rates",
    "chern-class",
    "spectrum",
    "subprincipal",
    "b-operator",
    "commutator-jets",
];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub threshold: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualTable {
    pub name: String,
    pub rows: Vec<(u32, f64)>,
    pub rate: Option<RateReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub checks: Vec<Check>,
    pub tables: Vec<ResidualTable>,
    pub notes: Vec<String>,
}

impl SuiteOutcome {
    fn new(suite: &str) -> Self {
        SuiteOutcome { suite: suite.into(), checks: Vec::new(), tables: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, label: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.label == label)
    }

    fn exact(&mut self, label: &str, failures: usize, total: usize) {
        self.checks.push(Check {
            label: label.into(),
            measured: failures as f64,
            threshold: format!("0 failures of {total}"),
            pass: failures == 0 && total > 0,
        });
    }

    fn at_most(&mut self, label: &str, measured: f64, tol: f64) {
        self.checks.push(Check { label: label.into(), measured, threshold: format!("<= {tol:e}"), pass: measured <= tol });
    }

    fn slope(&mut self, label: &str, name: &str, rows: Vec<(u32, f64)>, window: RateWindow) -> Result<RateReport> {
        let rate = fit_rate(&rows, window)?;
        let threshold = match window.min_slope {
            Some(lo) => format!("slope in [{lo}, {}], R2 >= {}", window.max_slope, window.min_r2),
            None => format!("slope <= {}, R2 >= {}", window.max_slope, window.min_r2),
        };
        self.checks.push(Check { label: label.into(), measured: rate.slope, threshold, pass: rate.passed() });
        self.tables.push(ResidualTable { name: name.into(), rows, rate: Some(rate.clone()) });
        Ok(rate)
    }
}

/// `Σ c_ab z^a z̄^b / ρ^band` with Hermitian coefficients.
pub fn random_real_function<R: Rng>(rng: &mut R, band: u32) -> FsFunction {
    let mut terms = Vec::new();
    for a in 0..=band {
        for b in a..=band {
            if rng.gen_bool(0.4) {
                continue;
            }
            let re = q(rng.gen_range(-4..=4), rng.gen_range(1..=3));
            if a == b {
                terms.push(((a, a), Cq::real(re)));
            } else {
                let c = Cq::new(re, q(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
                terms.push(((b, a), c.conj()));
                terms.push(((a, b), c));
            }
        }
    }
    FsFunction::new(Poly::from_terms(terms), band).canonical()
}

pub fn random_complex_function<R: Rng>(rng: &mut R, band: u32) -> FsFunction {
    let a = random_real_function(rng, band);
    let b = random_real_function(rng, band);
    (&a + &b.scale(&Cq::i())).canonical()
}

fn random_jet<R: Rng>(rng: &mut R) -> SymbolJet {
    SymbolJet::new(random_real_function(rng, 2), random_complex_function(rng, 2))
}

fn residual_rows(fam: &OperatorFamily) -> Vec<(u32, f64)> {
    norm_table(fam)
}

fn rate_window(cfg: &RunConfig, max_slope: f64) -> RateWindow {
    let mut w = RateWindow::at_most(max_slope).from_k(cfg.tolerances.rate_k_min);
    w.min_r2 = cfg.tolerances.min_r2;
    w
}

fn quantized(f: &FsFunction, label: &str, cfg: &RunConfig, d: &MetaDerivative) -> Result<OperatorFamily> {
    OperatorFamily::build(&cfg.k_grid, cfg.m, true, Provenance::Quantized(label.into()), |s| q_d(f, s, d))
}

fn rate_pairs() -> Vec<(&'static str, FsFunction, FsFunction)> {
    vec![
        ("x1,x2", FsFunction::x1(), FsFunction::x2()),
        ("x3,x1*x2", FsFunction::x3(), (&FsFunction::x1() * &FsFunction::x2()).canonical()),
    ]
}

fn exact_identities(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("exact-identities");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = MetaDerivative::chern(cfg.m);
    let (x1, x2, x3) = (FsFunction::x1(), FsFunction::x2(), FsFunction::x3());
    let x3sq = (&x3 * &x3).canonical();

    let (mut fails, mut total) = (0, 0);
    for (f, g) in [(&x1, &x2), (&x3, &x1), (&x3sq, &x2)] {
        for k in [3u32, 4, 6] {
            let spec = BundleSpec::new(k, cfg.m, true)?;
            for _ in 0..5 {
                let s = HoloSection::random(spec, &mut rng);
                total += 1;
                fails += usize::from(!verify_commutator_identity(f, g, &spec, &d, &s)?.is_zero());
            }
        }
    }
    out.exact("commutator identity of the corrected derivatives", fails, total);

    let (mut fails, mut der) = (0, [0usize; 3]);
    for i in 0..20 {
        let x = hamiltonian_field(&random_real_function(&mut rng, 2));
        let y = hamiltonian_field(&random_real_function(&mut rng, 2));
        let f = random_complex_function(&mut rng, 2);
        let s = random_complex_function(&mut rng, 2);
        let t = random_complex_function(&mut rng, 1);
        fails += usize::from(!canonical_commutator_defect(&x, &y, &CanonicalSection::new(s.clone())).is_zero());
        let dd = if i % 2 == 0 { d.clone() } else { MetaDerivative::direct(cfg.m) };
        der[0] += usize::from(!leibniz_defect(&dd, &x, &f, &s).is_zero());
        der[1] += usize::from(!scaling_defect(&dd, &x, &f, &s).is_zero());
        der[2] += usize::from(!hermitian_defect(&dd, &x, &s, &t).is_zero());
    }
    out.exact("canonical-bundle commutator defect equals B_j", fails, 20);
    out.exact("Leibniz rule", der[0], 20);
    out.exact("half-form scaling law", der[1], 20);
    out.exact("Hermiticity for Hamiltonian fields", der[2], 20);

    let consts = BracketConstants::from(curvature(&d)?);
    let (mut jac, mut deriv, mut real) = (0, 0, 0);
    for _ in 0..8 {
        let (a, b, c) = (random_jet(&mut rng), random_jet(&mut rng), random_jet(&mut rng));
        let br = |u: &SymbolJet, v: &SymbolJet| bracket_sigma(u, v, &consts);
        let cyc = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).add(&br(&c, &br(&a, &b)));
        jac += usize::from(cyc != SymbolJet::new(FsFunction::zero(), FsFunction::zero()));
        let lhs = br(&star_jet(&a, &b), &c);
        let rhs = star_jet(&a, &br(&b, &c)).add(&star_jet(&br(&a, &c), &b));
        deriv += usize::from(lhs != rhs);
        real += usize::from(br(&a.conj(), &b.conj()) != br(&a, &b).conj());
    }
    out.exact("Jacobi identity of the symbol bracket", jac, 8);
    out.exact("derivation rule of the symbol bracket", deriv, 8);
    out.exact("reality of the symbol bracket", real, 8);

    let mut fails = 0;
    let polys: Vec<JetPolynomial> = (0..50).map(|i| JetPolynomial::random(1 + i % 2, 4, 1, 4, &mut rng)).collect();
    let mut triples = 0;
    for i in 0..46 {
        let (a, b, c) = (&polys[i], &polys[i + 2], &polys[i + 4]);
        let l = star_formal(&star_formal(a, b)?, c)?;
        let r = star_formal(a, &star_formal(b, c)?)?;
        fails += usize::from(l != r);
        triples += 1;
    }
    out.exact("associativity of the symbol product", fails, triples);

    let (mut fails, mut n) = (0, 0);
    let mut ratios = Vec::new();
    let x1x3 = (&x1 * &x3).canonical();
    let (fx, fy) = (hamiltonian_field(&x3sq), hamiltonian_field(&x1x3));
    for z0 in [Cq::zero(), Cq::ratio(1, 2), Cq::gaussian(1, -2)] {
        let rep = verify_fourfold_product(&FrozenFrame::orthonormal(1), &FieldJet::on_sphere(&fx, &z0), &FieldJet::on_sphere(&fy, &z0))?;
        fails += usize::from(!rep.identity_holds() || rep.b_j != b_j(&fx, &fy).eval_exact(&z0));
        n += 1;
        ratios.extend(rep.ratio);
    }
    for _ in 0..3 {
        // Hamiltonian fields have symmetric bracket data (second derivatives of f)
        let mut jet = || {
            let e: Vec<Cq> = (0..3).map(|_| Cq::gaussian(rng.gen_range(-3..=3), rng.gen_range(-3..=3))).collect();
            FieldJet { brackets: vec![vec![e[0].clone(), e[1].clone()], vec![e[1].clone(), e[2].clone()]] }
        };
        let (jx, jy) = (jet(), jet());
        let rep = verify_fourfold_product(&FrozenFrame::orthonormal(2), &jx, &jy)?;
        fails += usize::from(!rep.identity_holds());
        n += 1;
        ratios.extend(rep.ratio);
    }
    out.exact("fourfold product identity for projector commutators", fails, n);
    let ratio_text: Vec<String> = ratios.iter().map(|r| r.to_string()).collect();
    out.notes.push(format!(
        "antisymmetrized fourfold product divided by (hbar^2/2) B_j: [{}]",
        ratio_text.join(", ")
    ));
    Ok(out)
}

fn norm_asymptotics_suite(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("norm-asymptotics");
    let mut fails = 0;
    let mut total = 0;
    for k in 1..=40u32 {
        if (k as i64 + cfg.m as i64) < 0 {
            continue;
        }
        let spec = BundleSpec::new(k, cfg.m, true)?;
        let d = spec.degree() as i64;
        let t = toeplitz(&FsFunction::x3(), &spec)?;
        total += 1;
        fails += usize::from(exact_diagonal_norm(&t) != Some(q(d, d + 2)));
    }
    out.exact("exact norm of T(x3) equals d/(d+2), k <= 40", fails, total);

    let f = crate::harness::expr::parse("x1 + 3/10*x2^2")?.lower();
    let fam = OperatorFamily::toeplitz(&f, "x1 + 3/10*x2^2", &cfg.k_grid, cfg.m, true)?;
    let (lo, hi) = cfg.tolerances.norm_slope;
    let mut w = RateWindow::between(lo, hi).from_k(cfg.tolerances.rate_k_min);
    w.min_r2 = cfg.tolerances.min_r2;
    let rep = norm_asymptotics(&fam, &f, w)?;
    out.notes.push(format!("sup |f| = {:.15}", rep.sup));
    out.checks.push(Check {
        label: "norm defect slope".into(),
        measured: rep.rate.slope,
        threshold: format!("slope in [{lo}, {hi}]"),
        pass: rep.rate.passed(),
    });
    out.tables.push(ResidualTable { name: "norm_defect".into(), rows: rep.rate.table.clone(), rate: Some(rep.rate) });
    Ok(out)
}

fn commutator_rates(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("commutator-rates");
    let (f, g) = (FsFunction::x1(), FsFunction::x2());
    let tf = OperatorFamily::toeplitz(&f, "x1", &cfg.k_grid, cfg.m, true)?;
    let tg = OperatorFamily::toeplitz(&g, "x2", &cfg.k_grid, cfg.m, true)?;
    let tb = OperatorFamily::toeplitz(&poisson_bracket(&f, &g), "{x1,x2}", &cfg.k_grid, cfg.m, true)?;
    let res = commutator_family(&tf, &tg)?.difference(&tb)?;
    out.slope("commutator residual slope", "commutator_x1_x2", residual_rows(&res), rate_window(cfg, cfg.tolerances.commutator_slope))?;
    Ok(out)
}

fn product_rates(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("product-rates");
    let d = MetaDerivative::chern(cfg.m);
    let minus_half_i = Cq::imag(q(-1, 2));
    for (label, f, g) in rate_pairs() {
        let fg = (&f * &g).canonical();
        let prod = quantized(&f, "f", cfg, &d)?.product(&quantized(&g, "g", cfg, &d)?)?;
        let tb = OperatorFamily::toeplitz(&poisson_bracket(&f, &g), "{f,g}", &cfg.k_grid, cfg.m, true)?;
        // (1/2ik) T({f,g}) = (-i/2) k⁻¹ T({f,g})
        let res = prod.difference(&quantized(&fg, "fg", cfg, &d)?)?.difference(&tb.scale_inv_k(1).scale(&minus_half_i))?;
        out.slope(
            &format!("product residual slope ({label})"),
            &format!("product_{}", label.replace([',', '*'], "_")),
            residual_rows(&res),
            rate_window(cfg, cfg.tolerances.product_slope),
        )?;
    }
    Ok(out)
}

fn curvature_rates(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("curvature-rates");
    let d = MetaDerivative::chern(cfg.m);
    let curv = curvature(&d)?;
    for (label, f, g) in rate_pairs() {
        let tag = label.replace([',', '*'], "_");
        let comm = commutator_family(&quantized(&f, "f", cfg, &d)?, &quantized(&g, "g", cfg, &d)?)?;
        let base = comm.difference(&quantized(&poisson_bracket(&f, &g), "{f,g}", cfg, &d)?)?;
        let rxy = curv.r.eval(&hamiltonian_field(&f), &hamiltonian_field(&g));
        let tr = OperatorFamily::toeplitz(&rxy, "R(X,Y)", &cfg.k_grid, cfg.m, true)?;
        let corrected = base.difference(&tr.scale_inv_k(1))?;
        out.slope(
            &format!("curvature-corrected residual slope ({label})"),
            &format!("curvature_{tag}"),
            residual_rows(&corrected),
            rate_window(cfg, cfg.tolerances.curvature_slope),
        )?;
        let rows = residual_rows(&base);
        let mut w = rate_window(cfg, f64::INFINITY);
        w.min_r2 = 0.0;
        let rate = fit_rate(&rows, w)?;
        let pass = rate.verdict != Verdict::Exact && rate.slope >= cfg.tolerances.uncorrected_slope;
        out.checks.push(Check {
            label: format!("uncorrected residual slope ({label})"),
            measured: rate.slope,
            threshold: format!("slope >= {}", cfg.tolerances.uncorrected_slope),
            pass,
        });
        out.tables.push(ResidualTable { name: format!("uncorrected_{tag}"), rows, rate: Some(rate) });
    }
    Ok(out)
}

/// Real one-forms used as gauge shifts: `ω(V, ·)` for three fields `V`.
pub fn gauge_fields() -> Vec<(&'static str, VectorField)> {
    let (x1, x2, x3) = (FsFunction::x1(), FsFunction::x2(), FsFunction::x3());
    vec![
        ("x1 X_x3", hamiltonian_field(&x3).scale_fn(&x1)),
        ("x2^2 X_x1", hamiltonian_field(&x1).scale_fn(&(&x2 * &x2))),
        ("x3 X_x2 + X_(x1 x3)", hamiltonian_field(&x2).scale_fn(&x3).add(&hamiltonian_field(&(&x1 * &x3)))),
    ]
}

fn chern_class(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("chern-class");
    for m in 0..=2 {
        let n = curvature(&MetaDerivative::chern(m))?.chern_number()?;
        let expected = Cq::int(m as i64 + 1);
        out.checks.push(Check {
            label: format!("(1/2pi) int R = m + 1 (m = {m})"),
            measured: n.to_c64().re,
            threshold: format!("exactly {expected}"),
            pass: n == expected,
        });
    }
    let d = MetaDerivative::chern(cfg.m);
    let base = curvature(&d)?;
    let base_int = base.chern_number()?;
    let (mut int_fail, mut plus_fail, mut minus_fail) = (0, 0, 0);
    let omega = kahler_form();
    for (_, v) in gauge_fields() {
        let alpha = omega.contract(&v);
        let shifted = curvature(&gauge_shift(&d, &alpha)?)?;
        int_fail += usize::from(shifted.chern_number()? != base_int);
        let diff = shifted.r.sub(&base.r);
        plus_fail += usize::from(!diff.sub(&alpha.d()).is_zero());
        minus_fail += usize::from(!diff.add(&alpha.d()).is_zero());
    }
    out.exact("integral unchanged by gauge shifts", int_fail, 3);
    out.exact("R' - R = d alpha", plus_fail, 3);
    out.notes.push(format!(
        "(1/2pi) int R = {base_int} for m = {}; R' - R = -d alpha holds in {} of 3 shifts",
        cfg.m,
        3 - minus_fail
    ));
    for (label, v) in gauge_fields().into_iter().take(1) {
        let g = gauge_compare(&v)?;
        out.notes.push(format!(
            "bracket-level shift for V = {label}: |R' - R - d(i_V w)| = {:e}, |R' - R + d(i_V w)| = {:e}",
            g.defect_plus, g.defect_minus
        ));
        let dd = gauge_shift(&d, &omega.contract(&v))?;
        let opts = extract_options(cfg);
        let grid = &cfg.extraction_grid;
        let t = OperatorFamily::toeplitz(&FsFunction::x1(), "x1", grid, cfg.m, true)?;
        let s = OperatorFamily::toeplitz(&FsFunction::x3(), "x3", grid, cfg.m, true)?;
        let dev = commutator_jet_check(&t, &s, &dd, &opts)?;
        out.at_most(&format!("commutator jet after gauge shift by {label}"), dev, cfg.tolerances.commutator_jet);
    }
    Ok(out)
}

fn spectrum(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("spectrum");
    let d = MetaDerivative::chern(cfg.m);
    let (mut pairing, mut oracle, mut toeplitz_pairing) = (0.0f64, 0.0f64, 0.0f64);
    for k in [8u32, 16, 32] {
        let spec = BundleSpec::new(k, cfg.m, true)?;
        let ev = q_d(&FsFunction::x3(), &spec, &d)?.eigenvalues();
        let n = ev.len();
        for i in 0..n {
            pairing = pairing.max((ev[i] + ev[n - 1 - i]).abs());
        }
        let tv = toeplitz(&FsFunction::x3(), &spec)?.eigenvalues();
        let deg = spec.degree() as f64;
        let mut expected: Vec<f64> = (0..n).map(|a| (deg - 2.0 * a as f64) / (deg + 2.0)).collect();
        expected.sort_by(f64::total_cmp);
        for i in 0..n {
            oracle = oracle.max((tv[i] - expected[i]).abs());
            toeplitz_pairing = toeplitz_pairing.max((tv[i] + tv[n - 1 - i]).abs());
        }
    }
    out.at_most("metaplectic spectrum pairing defect", pairing, cfg.tolerances.spectrum_pairing);
    out.at_most("Toeplitz spectrum against (d-2a)/(d+2)", oracle, cfg.tolerances.spectrum_oracle);
    out.notes.push(format!("Toeplitz spectrum pairing defect {toeplitz_pairing:e}"));
    Ok(out)
}

fn extract_options(cfg: &RunConfig) -> ExtractOptions {
    ExtractOptions { band: cfg.band, order: cfg.fit_order, prefer_exact: cfg.exact }
}

fn catalog_families(cfg: &RunConfig) -> Result<Vec<(String, FsFunction, OperatorFamily)>> {
    catalog()
        .into_iter()
        .map(|(n, f)| {
            let fam = OperatorFamily::toeplitz(&f, n, &cfg.extraction_grid, cfg.m, true)?;
            Ok((n.to_string(), f, fam))
        })
        .collect()
}

fn subprincipal(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("subprincipal");
    let opts = extract_options(cfg);
    let tol = cfg.tolerances.jet;
    let meta = Variant::Metaplectic(MetaDerivative::chern(cfg.m));
    for v in [Variant::Kahler, meta.clone()] {
        let rep = axioms_suite(&v, &cfg.extraction_grid, cfg.m, &opts, tol)?;
        for ax in ["i", "ii", "iii"] {
            let worst = rep.checks.iter().filter(|c| c.axiom == ax).map(|c| c.deviation).fold(0.0, f64::max);
            out.at_most(&format!("axiom ({ax}), {} variant", v.name()), worst, tol);
        }
    }
    let fams = catalog_families(cfg)?;
    let mut worst = 0.0f64;
    for i in 0..fams.len() {
        for j in i + 1..fams.len() {
            let p = fams[i].2.product(&fams[j].2)?;
            worst = worst.max(jet_distance(&sigma_s_variant(&p, &Variant::Kahler, &opts)?, &sigma_s_variant(&p, &meta, &opts)?));
        }
    }
    out.at_most("Kahler and metaplectic variants agree on products", worst, tol);
    let (mut worst, mut gates) = (0.0f64, true);
    for (_, f, fam) in &fams {
        let rep = extract_jet(fam, &opts)?;
        gates &= rep.flags.toeplitz;
        worst = worst.max(jet_distance(&rep.jet, &SymbolJet::principal(f.clone())));
    }
    out.at_most("jet of Toeplitz families is (f, 0)", worst, cfg.tolerances.toeplitz_jet);
    out.exact("per-level residual gate", usize::from(!gates), 1);
    let kernel = extract_jet(&fams[3].2.scale_inv_k(2), &opts)?;
    out.at_most("k^-2 family has zero jet", jet_distance(&kernel.jet, &SymbolJet::principal(FsFunction::zero())), tol);
    Ok(out)
}

fn b_operator(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("b-operator");
    let opts = extract_options(cfg);
    let fams = catalog_families(cfg)?;
    let (mut worst, mut anti, mut hoch, mut n) = (0.0f64, 0, 0, 0);
    for i in 0..fams.len() {
        for j in i + 1..fams.len() {
            let (f, g) = (&fams[i].1, &fams[j].1);
            let jet = extract_jet(&fams[i].2.product(&fams[j].2)?, &opts)?.jet;
            worst = worst.max(sup_distance(&jet.f1, &b_kahler(f, g))).max(sup_distance(&jet.f0, &(f * g)));
            anti += usize::from(&b_kahler(f, g) - &b_kahler(g, f) != poisson_bracket(f, g).scale(&-Cq::i()));
            hoch += usize::from(!hochschild_defect(f, g).is_zero());
            n += 1;
        }
    }
    out.at_most("measured B against the Kahler formula (10 products)", worst, cfg.tolerances.jet);
    out.exact("antisymmetric part of B equals (1/i){f,g}", anti, n);
    out.exact("symmetric part of B is the coboundary of Laplacian/2", hoch, n);
    Ok(out)
}

fn commutator_jets(cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("commutator-jets");
    let opts = extract_options(cfg);
    let d = MetaDerivative::chern(cfg.m);
    let fams = catalog_families(cfg)?;
    let mut worst = 0.0f64;
    for i in 0..fams.len() {
        for j in i + 1..fams.len() {
            worst = worst.max(commutator_jet_check(&fams[i].2, &fams[j].2, &d, &opts)?);
        }
    }
    out.at_most("jet of ik[T,S] against the symbol bracket", worst, cfg.tolerances.commutator_jet);
    Ok(out)
}

pub fn run_named(name: &str, cfg: &RunConfig) -> Result<SuiteOutcome> {
    let start = Instant::now();
    let out = match name {
        "exact-identities" => exact_identities(cfg),
        "norm-asymptotics" => norm_asymptotics_suite(cfg),
        "commutator-rates" => commutator_rates(cfg),
        "product-rates" => product_rates(cfg),
        "curvature-rates" => curvature_rates(cfg),
        "chern-class" => chern_class(cfg),
        "spectrum" => spectrum(cfg),
        "subprincipal" => subprincipal(cfg),
        "b-operator" => b_operator(cfg),
        "commutator-jets" => commutator_jets(cfg),
        other => Err(Error::UnknownSuite(other.into())),
    }?;
    log::info!("suite {name} finished in {:.1}s", start.elapsed().as_secs_f64());
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub passed: bool,
    pub suites: Vec<SuiteOutcome>,
}

/// `k,residual` with 17 significant digits.
pub fn table_csv(rows: &[(u32, f64)]) -> String {
    let mut s = String::from("k,residual\n");
    for (k, r) in rows {
        s.push_str(&format!("{k},{r:.16e}\n"));
    }
    s
}

/// Run the configured suites, writing `<out>/<suite>/<table>.csv` and `<out>/summary.json`.
pub fn run_suites(cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let mut suites = Vec::new();
    for name in &cfg.suites {
        suites.push(run_named(name, cfg)?);
    }
    let summary = RunSummary { passed: suites.iter().all(SuiteOutcome::passed), suites };
    write_reports(&summary, &cfg.out_dir)?;
    Ok(summary)
}

pub fn write_reports(summary: &RunSummary, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for s in &summary.suites {
        if s.tables.is_empty() {
            continue;
        }
        let sub = dir.join(&s.suite);
        std::fs::create_dir_all(&sub)?;
        for t in &s.tables {
            write_atomic(&sub.join(format!("{}.csv", t.name)), table_csv(&t.rows).as_bytes())?;
        }
    }
    write_atomic(&dir.join("summary.json"), serde_json::to_string_pretty(summary)?.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_functions_are_real_and_smooth() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let f = random_real_function(&mut rng, 3);
            assert!(f.is_real() && f.is_globally_smooth());
        }
    }

    #[test]
    fn csv_has_seventeen_digits() {
        let s = table_csv(&[(8, 1.0 / 3.0)]);
        assert_eq!(s, "k,residual\n8,3.3333333333333331e-1\n");
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(run_named("nope", &RunConfig::default()), Err(Error::UnknownSuite(_))));
    }

}
