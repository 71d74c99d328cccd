//! Operator matrices on `H⁰(O(d))` and families indexed by the level `k`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::FsFunction;
use crate::linalg::{self, CMatrix};
use crate::rates::{fit_rate, RateReport, RateWindow};
use crate::scalar::{q_to_f64, Coeff, Cq, Q};
use crate::sections::{gram, BundleSpec, GramData, HoloSection, Projector};
use crate::{Error, Result};

/// Exact matrix in the monomial basis: `T z^b = Σ_a E[a][b] z^a`. Rows are sparse.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix {
    dim: usize,
    rows: Vec<BTreeMap<usize, Cq>>,
}

impl ExactMatrix {
    pub fn zero(dim: usize) -> Self {
        ExactMatrix { dim, rows: vec![BTreeMap::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for a in 0..dim {
            m.rows[a].insert(a, Cq::one());
        }
        m
    }

    /// Columns are the images of the monomials.
    pub fn from_columns(cols: &[HoloSection]) -> Self {
        let dim = cols.len();
        let mut m = Self::zero(dim);
        for (b, col) in cols.iter().enumerate() {
            for (a, c) in col.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    m.rows[a].insert(b, c.clone());
                }
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> Cq {
        self.rows[a].get(&b).cloned().unwrap_or_else(Cq::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Cq)> {
        self.rows.iter().enumerate().flat_map(|(a, r)| r.iter().map(move |(b, c)| (a, *b, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    fn add_entry(&mut self, a: usize, b: usize, c: Cq) {
        if c.is_zero() {
            return;
        }
        let e = self.rows[a].entry(b).or_insert_with(Cq::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.rows[a].remove(&b);
        }
    }

    pub fn add(&self, o: &ExactMatrix) -> Self {
        let mut m = self.clone();
        for (a, b, c) in o.entries() {
            m.add_entry(a, b, c.clone());
        }
        m
    }

    pub fn sub(&self, o: &ExactMatrix) -> Self {
        self.add(&o.scale(&Cq::int(-1)))
    }

    pub fn scale(&self, s: &Cq) -> Self {
        let mut m = Self::zero(self.dim);
        if s.is_zero() {
            return m;
        }
        for (a, b, c) in self.entries() {
            m.rows[a].insert(b, c * s);
        }
        m
    }

    pub fn mul(&self, o: &ExactMatrix) -> Self {
        let mut m = Self::zero(self.dim);
        for (a, row) in self.rows.iter().enumerate() {
            for (j, c) in row {
                for (b, d) in &o.rows[*j] {
                    m.add_entry(a, *b, c * d);
                }
            }
        }
        m
    }

    /// Adjoint for the Gram inner product: `E*[a][b] = conj(E[b][a]) n_b / n_a`.
    pub fn adjoint(&self, g: &GramData) -> Self {
        let mut m = Self::zero(self.dim);
        for (a, b, c) in self.entries() {
            m.rows[b].insert(a, c.conj().scale_q(&(&g.norms[a] / &g.norms[b])));
        }
        m
    }

    pub fn apply(&self, s: &HoloSection) -> HoloSection {
        let mut out = HoloSection::zero(s.spec);
        for (a, row) in self.rows.iter().enumerate() {
            let mut acc = Cq::zero();
            for (b, c) in row {
                acc = acc + c * &s.coeffs[*b];
            }
            out.coeffs[a] = acc;
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(a, b, _)| a == b)
    }

    pub fn diagonal(&self) -> Vec<Cq> {
        (0..self.dim).map(|a| self.get(a, a)).collect()
    }

    /// Matrix in the orthonormal basis `z^a/√n_a`: `M[a][b] = E[a][b] √(n_a/n_b)`.
    pub fn to_orthonormal(&self, g: &GramData) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (a, b, c) in self.entries() {
            let ratio: Q = &g.norms[a] / &g.norms[b];
            m[(a, b)] = c.to_c64() * q_to_f64(&ratio).sqrt();
        }
        m
    }
}

/// `T_k` on `H⁰(O(d))`: floating entries in the orthonormal basis, plus the
/// exact monomial-basis matrix when it is available.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub spec: BundleSpec,
    pub entries: CMatrix,
    pub exact: Option<ExactMatrix>,
}

impl OperatorMatrix {
    pub fn from_exact(spec: BundleSpec, exact: ExactMatrix) -> Self {
        let entries = exact.to_orthonormal(&gram(&spec));
        OperatorMatrix { spec, entries, exact: Some(exact) }
    }

    pub fn from_float(spec: BundleSpec, entries: CMatrix) -> Self {
        OperatorMatrix { spec, entries, exact: None }
    }

    pub fn identity(spec: BundleSpec) -> Self {
        Self::from_exact(spec, ExactMatrix::identity(spec.dim()))
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn check(&self, o: &OperatorMatrix) -> Result<()> {
        if self.spec != o.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    fn combine(
        &self,
        o: &OperatorMatrix,
        fe: impl Fn(&ExactMatrix, &ExactMatrix) -> ExactMatrix,
        ff: impl Fn(&CMatrix, &CMatrix) -> CMatrix,
    ) -> Result<OperatorMatrix> {
        self.check(o)?;
        let exact = match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Some(fe(a, b)),
            _ => None,
        };
        Ok(OperatorMatrix { spec: self.spec, entries: ff(&self.entries, &o.entries), exact })
    }

    pub fn add(&self, o: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.combine(o, |a, b| a.add(b), |a, b| a + b)
    }

    pub fn sub(&self, o: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.combine(o, |a, b| a.sub(b), |a, b| a - b)
    }

    pub fn mul(&self, o: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.combine(o, |a, b| a.mul(b), |a, b| a * b)
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, o: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    pub fn scale(&self, c: &Cq) -> OperatorMatrix {
        OperatorMatrix {
            spec: self.spec,
            entries: &self.entries * c.to_c64(),
            exact: self.exact.as_ref().map(|e| e.scale(c)),
        }
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix {
            spec: self.spec,
            entries: self.entries.adjoint(),
            exact: self.exact.as_ref().map(|e| e.adjoint(&gram(&self.spec))),
        }
    }

    pub fn drop_exact(mut self) -> Self {
        self.exact = None;
        self
    }

    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.entries)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.entries)
    }

    /// CSV dump: header `re,im`, one entry per line, row-major.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "re,im")?;
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                let z = self.entries[(a, b)];
                writeln!(w, "{:.17e},{:.17e}", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// Spectral norm in the `L²` structure of `H_k`.
pub fn op_norm(m: &OperatorMatrix) -> f64 {
    linalg::spectral_norm(&m.entries)
}

/// Exact norm, available for diagonal exact matrices (the eigenvalues are the entries).
pub fn exact_diagonal_norm(m: &OperatorMatrix) -> Option<Q> {
    let e = m.exact.as_ref()?;
    if !e.is_diagonal() {
        return None;
    }
    let mut best: Option<Q> = None;
    for c in e.diagonal() {
        if !c.is_real() {
            return None;
        }
        let v = if c.re < Q::from_integer(0.into()) { -c.re } else { c.re };
        best = Some(match best {
            Some(b) if b >= v => b,
            _ => v,
        });
    }
    best
}

/// Exact matrix of `Π_k(r_b)` where `column(b)` returns the rational section
/// image of `z^b`.
pub fn compress(spec: BundleSpec, column: impl Fn(usize) -> FsFunction) -> Result<OperatorMatrix> {
    let pr = Projector::new(spec);
    let cols = (0..spec.dim()).map(|b| pr.project(&column(b))).collect::<Result<Vec<_>>>()?;
    Ok(OperatorMatrix::from_exact(spec, ExactMatrix::from_columns(&cols)))
}

fn monomial(b: usize) -> FsFunction {
    FsFunction::new(crate::poly::Poly::monomial(b as u32, 0, Cq::one()), 0)
}

/// `T_k(f) = Π_k f`.
pub fn toeplitz(f: &FsFunction, spec: &BundleSpec) -> Result<OperatorMatrix> {
    if !f.is_globally_smooth() {
        return Err(Error::NotSmooth);
    }
    let f = f.canonical();
    compress(*spec, |b| &f * &monomial(b))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Toeplitz(String),
    Quantized(String),
    Product(Box<Provenance>, Box<Provenance>),
    Commutator(Box<Provenance>, Box<Provenance>),
    Sum(Box<Provenance>, Box<Provenance>),
    Scaled(String, Box<Provenance>),
    Custom(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Toeplitz(s) => write!(f, "T({s})"),
            Provenance::Quantized(s) => write!(f, "Q({s})"),
            Provenance::Product(a, b) => write!(f, "{a}*{b}"),
            Provenance::Commutator(a, b) => write!(f, "ik[{a},{b}]"),
            Provenance::Sum(a, b) => write!(f, "({a}+{b})"),
            Provenance::Scaled(c, a) => write!(f, "{c}*{a}"),
            Provenance::Custom(s) => write!(f, "{s}"),
        }
    }
}

/// `k ↦ T_k` over a grid of levels, for a fixed twist and half-form flag.
#[derive(Clone, Debug)]
pub struct OperatorFamily {
    pub m: i32,
    pub half_form: bool,
    pub provenance: Provenance,
    pub members: BTreeMap<u32, OperatorMatrix>,
}

pub const DEFAULT_K_GRID: [u32; 9] = [8, 12, 16, 24, 32, 48, 64, 96, 128];

impl OperatorFamily {
    /// Build members concurrently, one per level.
    pub fn build(
        grid: &[u32],
        m: i32,
        half_form: bool,
        provenance: Provenance,
        make: impl Fn(&BundleSpec) -> Result<OperatorMatrix> + Sync,
    ) -> Result<Self> {
        let members = grid
            .par_iter()
            .map(|&k| {
                let spec = BundleSpec::new(k, m, half_form)?;
                make(&spec).map(|op| (k, op))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(OperatorFamily { m, half_form, provenance, members })
    }

    pub fn toeplitz(f: &FsFunction, label: &str, grid: &[u32], m: i32, half_form: bool) -> Result<Self> {
        Self::build(grid, m, half_form, Provenance::Toeplitz(label.into()), |s| toeplitz(f, s))
    }

    pub fn grid(&self) -> Vec<u32> {
        self.members.keys().copied().collect()
    }

    fn zip(
        &self,
        o: &OperatorFamily,
        provenance: Provenance,
        op: impl Fn(u32, &OperatorMatrix, &OperatorMatrix) -> Result<OperatorMatrix> + Sync,
    ) -> Result<OperatorFamily> {
        if self.grid() != o.grid() || self.m != o.m || self.half_form != o.half_form {
            return Err(Error::GridMismatch);
        }
        let members = self
            .members
            .par_iter()
            .map(|(k, a)| op(*k, a, &o.members[k]).map(|r| (*k, r)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(OperatorFamily { m: self.m, half_form: self.half_form, provenance, members })
    }

    pub fn map(&self, provenance: Provenance, op: impl Fn(u32, &OperatorMatrix) -> OperatorMatrix + Sync) -> Self {
        let members = self.members.par_iter().map(|(k, a)| (*k, op(*k, a))).collect();
        OperatorFamily { m: self.m, half_form: self.half_form, provenance, members }
    }

    pub fn product(&self, o: &OperatorFamily) -> Result<OperatorFamily> {
        let p = Provenance::Product(Box::new(self.provenance.clone()), Box::new(o.provenance.clone()));
        self.zip(o, p, |_, a, b| a.mul(b))
    }

    pub fn sum(&self, o: &OperatorFamily) -> Result<OperatorFamily> {
        let p = Provenance::Sum(Box::new(self.provenance.clone()), Box::new(o.provenance.clone()));
        self.zip(o, p, |_, a, b| a.add(b))
    }

    pub fn difference(&self, o: &OperatorFamily) -> Result<OperatorFamily> {
        let p = Provenance::Custom(format!("({})-({})", self.provenance, o.provenance));
        self.zip(o, p, |_, a, b| a.sub(b))
    }

    /// `k^{-power} F`.
    pub fn scale_inv_k(&self, power: u32) -> OperatorFamily {
        let p = Provenance::Scaled(format!("k^-{power}"), Box::new(self.provenance.clone()));
        self.map(p, |k, a| a.scale(&Cq::real(Q::new(1.into(), num_bigint::BigInt::from(k).pow(power)))))
    }

    pub fn scale(&self, c: &Cq) -> OperatorFamily {
        let p = Provenance::Scaled(c.to_string(), Box::new(self.provenance.clone()));
        self.map(p, |_, a| a.scale(c))
    }

    pub fn adjoint(&self) -> OperatorFamily {
        let p = Provenance::Custom(format!("({})*", self.provenance));
        self.map(p, |_, a| a.adjoint())
    }

    /// Write `k<k>.csv` per member plus `manifest.json`.
    pub fn dump(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (k, op) in &self.members {
            let mut buf = Vec::new();
            op.write_csv(&mut buf)?;
            crate::harness::write_atomic(&dir.join(format!("k{k}.csv")), &buf)?;
        }
        let manifest = FamilyManifest {
            spec: SpecTemplate { m: self.m, half_form: self.half_form },
            k_grid: self.grid(),
            provenance: self.provenance.to_string(),
        };
        crate::harness::write_atomic(&dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpecTemplate {
    pub m: i32,
    pub half_form: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FamilyManifest {
    pub spec: SpecTemplate,
    pub k_grid: Vec<u32>,
    pub provenance: String,
}

/// `k ↦ ik[F_k, G_k]`.
pub fn commutator_family(f: &OperatorFamily, g: &OperatorFamily) -> Result<OperatorFamily> {
    let p = Provenance::Commutator(Box::new(f.provenance.clone()), Box::new(g.provenance.clone()));
    f.zip(g, p, |k, a, b| Ok(a.commutator(b)?.scale(&Cq::gaussian(0, k as i64))))
}

/// `k ↦ ‖F_k‖`.
pub fn norm_table(f: &OperatorFamily) -> Vec<(u32, f64)> {
    let v: Vec<_> = f.members.par_iter().map(|(k, op)| (*k, op_norm(op))).collect();
    v
}

/// Supremum of `|f|` over the sphere: grid sampling, the point at infinity,
/// then compass-search refinement in spherical coordinates.
pub fn sup_abs(f: &FsFunction) -> f64 {
    let ff = f.to_c64();
    let val = |theta: f64, phi: f64| {
        if theta >= std::f64::consts::PI - 1e-15 {
            return ff.eval_at_infinity().norm();
        }
        let r = (theta / 2.0).tan();
        ff.eval(Complex64::from_polar(r, phi)).norm()
    };
    let (nt, np) = (64, 128);
    let mut cands: Vec<(f64, f64, f64)> = Vec::new();
    for i in 0..=nt {
        let theta = std::f64::consts::PI * i as f64 / nt as f64;
        for j in 0..np {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / np as f64;
            cands.push((val(theta, phi), theta, phi));
        }
    }
    cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut best = cands[0].0;
    for &(v0, t0, p0) in cands.iter().take(8) {
        let (mut v, mut t, mut p) = (v0, t0, p0);
        let mut step = 0.05;
        while step > 1e-12 {
            let mut moved = false;
            for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let nt = (t + dt).clamp(0.0, std::f64::consts::PI);
                let nv = val(nt, p + dp);
                if nv > v {
                    v = nv;
                    t = nt;
                    p += dp;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best = best.max(v);
    }
    best
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormReport {
    pub sup: f64,
    pub rate: RateReport,
}

/// Fit `‖T_k‖ - sup|f|` to `C k^{-α}`.
pub fn norm_asymptotics(f_family: &OperatorFamily, f: &FsFunction, window: RateWindow) -> Result<NormReport> {
    let sup = sup_abs(f);
    let table: Vec<(u32, f64)> = norm_table(f_family).into_iter().map(|(k, n)| (k, (n - sup).abs())).collect();
    let rate = fit_rate(&table, window)?;
    Ok(NormReport { sup, rate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::poisson_bracket;

    #[test]
    fn toeplitz_of_one_and_x3() {
        let spec = BundleSpec::plain(6, 1);
        let id = toeplitz(&FsFunction::one(), &spec).unwrap();
        assert_eq!(id.exact.as_ref().unwrap(), &ExactMatrix::identity(spec.dim()));
        let t = toeplitz(&FsFunction::x3(), &spec).unwrap();
        let e = t.exact.as_ref().unwrap();
        let d = spec.degree() as i64;
        assert!(e.is_diagonal());
        for (a, c) in e.diagonal().iter().enumerate() {
            assert_eq!(c, &Cq::ratio(d - 2 * a as i64, d + 2));
        }
        assert_eq!(exact_diagonal_norm(&t).unwrap(), crate::scalar::q(d, d + 2));
        assert!((op_norm(&t) - d as f64 / (d + 2) as f64).abs() < 1e-14);
    }

    #[test]
    fn toeplitz_of_x1_is_tridiagonal_symmetric() {
        let spec = BundleSpec::plain(5, 0);
        let t = toeplitz(&FsFunction::x1(), &spec).unwrap();
        for a in 0..spec.dim() {
            for b in 0..spec.dim() {
                let v = t.entries[(a, b)];
                assert!(v.im.abs() < 1e-15);
                assert!((v - t.entries[(b, a)]).norm() < 1e-15);
                if (a as i64 - b as i64).abs() != 1 {
                    assert_eq!(v.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn exact_adjoint_matches_float_adjoint() {
        let spec = BundleSpec::plain(4, 0);
        let f = &FsFunction::x1() * &FsFunction::x3() + FsFunction::x2();
        let t = toeplitz(&f, &spec).unwrap();
        let z = toeplitz(&FsFunction::z().div_rho_pow(1), &spec).unwrap();
        assert_eq!(t.adjoint().exact, t.exact);
        let za = z.adjoint();
        let back = OperatorMatrix::from_exact(spec, za.exact.clone().unwrap());
        assert!((back.entries - z.entries.adjoint()).norm() < 1e-14);
    }

    #[test]
    fn commutator_principal_symbol_decays() {
        let grid = [8, 16, 32, 64];
        let t1 = OperatorFamily::toeplitz(&FsFunction::x1(), "x1", &grid, 0, false).unwrap();
        let t2 = OperatorFamily::toeplitz(&FsFunction::x2(), "x2", &grid, 0, false).unwrap();
        let pb = poisson_bracket(&FsFunction::x1(), &FsFunction::x2());
        let tb = OperatorFamily::toeplitz(&pb, "pb", &grid, 0, false).unwrap();
        let c = commutator_family(&t1, &t2).unwrap();
        let r = norm_table(&c.difference(&tb).unwrap());
        assert!(r.windows(2).all(|w| w[1].1 < w[0].1));
        let cff = commutator_family(&t1, &t1).unwrap();
        assert!(cff.members.values().all(|m| m.exact.as_ref().unwrap().is_zero()));
    }

    #[test]
    fn sup_of_coordinate_functions() {
        assert!((sup_abs(&FsFunction::x3()) - 1.0).abs() < 1e-12);
        let f = &FsFunction::x1() + &(&FsFunction::x2() * &FsFunction::x2()).scale(&Cq::ratio(3, 10));
        // max of x1 + 0.3 x2² on the sphere: x2² = 1 - x1² - x3², so maximize x1 + 0.3(1 - x1²) → x1 = 1
        assert!((sup_abs(&f) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn csv_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let fam = OperatorFamily::toeplitz(&FsFunction::x3(), "x3", &[2, 3], 0, false).unwrap();
        fam.dump(dir.path()).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("k2.csv")).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "re,im");
        assert_eq!(csv.lines().count(), 1 + 9);
        let man: FamilyManifest = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(man.k_grid, vec![2, 3]);
    }
}
