//! Half-form corrected derivatives and the quantization `Q_k^D`.
//!
//! Sections of `L^k ⊗ A` are written `p e` with `|e|² = ρ^{-(k+m)}`. With
//! `A = B ⊗ δ`, `B = O(m + 1)` and `δ = O(-1)` the square root of `K`.

use serde::{Deserialize, Serialize};

use crate::geometry::{
    b_j, chern_canonical, d_canonical, d_delta, hamiltonian_field, kahler_form, poisson_bracket, CanonicalSection,
    FsFunction, OneForm, TwoForm, VectorField,
};
use crate::scalar::{Coeff, Cq};
use crate::sections::{BundleSpec, HoloSection};
use crate::toeplitz::{compress, OperatorMatrix};
use crate::{Error, Result};

/// How the base derivative is assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Chern connection of `B` tensored with `D^δ`.
    HalfForm,
    /// `∇^A + ½(D^K - ∇^K)`, no square root of `K` needed.
    Direct,
}

/// `D = D_base + α/i` acting on sections of `A = O(m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetaDerivative {
    pub m: i32,
    pub route: Route,
    pub gauge: OneForm,
}

/// Chern connection coefficient of `O(n)` in the frame with `|e|² = ρ^{-n}`:
/// `∇_X e = -n z̄ X¹ / ρ e`.
pub fn chern_coefficient(n: i64, x: &VectorField) -> FsFunction {
    (&FsFunction::zb().scale_int(-n) * &x.holo).div_rho_pow(1).canonical()
}

impl MetaDerivative {
    pub fn chern(m: i32) -> Self {
        MetaDerivative { m, route: Route::HalfForm, gauge: OneForm::zero() }
    }

    pub fn direct(m: i32) -> Self {
        MetaDerivative { m, route: Route::Direct, gauge: OneForm::zero() }
    }

    /// `c_X` with `D_X (h e) = (X.h + c_X h) e`.
    pub fn coefficient(&self, x: &VectorField) -> FsFunction {
        let base = match self.route {
            Route::HalfForm => {
                let b = chern_coefficient(self.m as i64 + 1, x);
                &b + &d_delta(x, &FsFunction::one())
            }
            Route::Direct => {
                let dz = CanonicalSection::new(FsFunction::one());
                let corr = &d_canonical(x, &dz).coeff - &chern_canonical(x, &dz).coeff;
                &chern_coefficient(self.m as i64, x) + &corr.scale(&Cq::ratio(1, 2))
            }
        };
        let gauge = self.gauge.eval(x).scale(&-Cq::i());
        (&base + &gauge).canonical()
    }

    pub fn apply(&self, x: &VectorField, h: &FsFunction) -> FsFunction {
        (&x.apply(h) + &(&self.coefficient(x) * h)).canonical()
    }
}

/// `D + α/i` for a real 1-form `α`.
pub fn gauge_shift(d: &MetaDerivative, alpha: &OneForm) -> Result<MetaDerivative> {
    if !alpha.is_real() {
        return Err(Error::Config("gauge form must be real".into()));
    }
    Ok(MetaDerivative { m: d.m, route: d.route, gauge: d.gauge.add(alpha).canonical() })
}

/// Leibniz defect `D_X(f s) - X(f) s - f D_X s` (zero for every `D`).
pub fn leibniz_defect(d: &MetaDerivative, x: &VectorField, f: &FsFunction, s: &FsFunction) -> FsFunction {
    let lhs = d.apply(x, &(f * s));
    let rhs = &(&x.apply(f) * s) + &(f * &d.apply(x, s));
    (&lhs - &rhs).canonical()
}

/// Half-form scaling defect `D_{fX} s - f D_X s - ½ df(X^{1,0}) s`.
pub fn scaling_defect(d: &MetaDerivative, x: &VectorField, f: &FsFunction, s: &FsFunction) -> FsFunction {
    let lhs = d.apply(&x.scale_fn(f), s);
    let half = (&x.holo * &f.dz()).scale(&Cq::ratio(1, 2));
    let rhs = &(f * &d.apply(x, s)) + &(&half * s);
    (&lhs - &rhs).canonical()
}

/// Hermiticity defect `X.(s, t) - (D_X s, t) - (s, D_X t)` for the metric `ρ^{-m}` on `A`.
pub fn hermitian_defect(d: &MetaDerivative, x: &VectorField, s: &FsFunction, t: &FsFunction) -> FsFunction {
    let pair = |u: &FsFunction, v: &FsFunction| u * &v.conj();
    let metric = if d.m >= 0 {
        FsFunction::one().div_rho_pow(d.m as u32)
    } else {
        FsFunction::one().mul_rho_pow((-d.m) as u32)
    };
    let lhs = x.apply(&(&metric * &pair(s, t)));
    let rhs = &(&metric * &pair(&d.apply(x, s), t)) + &(&metric * &pair(s, &d.apply(x, t)));
    (&lhs - &rhs).canonical()
}

/// Curvature data of `D`: `[D_X, D_Y] = D_{[X,Y]} + i R(X, Y) + ½ B_j(X, Y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureData {
    pub r: TwoForm,
}

impl CurvatureData {
    /// `(1/2π) ∫ R`.
    pub fn chern_number(&self) -> Result<Cq> {
        self.r.integrate()
    }
}

/// `([D_X, D_Y] - D_{[X,Y]}) 1 - ½ B_j(X, Y)`, which should be `i R(X, Y)`.
fn curvature_defect(d: &MetaDerivative, x: &VectorField, y: &VectorField) -> FsFunction {
    let cx = d.coefficient(x);
    let cy = d.coefficient(y);
    let cxy = d.coefficient(&x.bracket(y));
    let bj = b_j(x, y).scale(&Cq::ratio(1, 2));
    (&(&(&x.apply(&cy) - &y.apply(&cx)) - &cxy) - &bj).canonical()
}

/// Extract `R` from the coordinate fields `∂_z, ∂_z̄`, then confirm it on
/// Hamiltonian field pairs.
pub fn curvature(d: &MetaDerivative) -> Result<CurvatureData> {
    let dz = VectorField::new(FsFunction::one(), FsFunction::zero());
    let dzb = VectorField::new(FsFunction::zero(), FsFunction::one());
    // R(∂, ∂̄) = c, the dz∧dz̄ coefficient
    let r = TwoForm::new(curvature_defect(d, &dz, &dzb).scale(&-Cq::i()).canonical());
    let probes = [FsFunction::x1(), FsFunction::x2(), FsFunction::x3(), &FsFunction::x1() * &FsFunction::x3()];
    for (i, f) in probes.iter().enumerate() {
        for g in probes.iter().skip(i + 1) {
            let (x, y) = (hamiltonian_field(f), hamiltonian_field(g));
            let expected = r.eval(&x, &y).scale(&Cq::i());
            if curvature_defect(d, &x, &y) != expected {
                return Err(Error::CurvatureInconsistent);
            }
        }
    }
    Ok(CurvatureData { r })
}

fn check_spec(spec: &BundleSpec, d: &MetaDerivative) -> Result<()> {
    if spec.m != d.m {
        return Err(Error::InvalidBundle(format!("derivative twist {} does not match bundle twist {}", d.m, spec.m)));
    }
    Ok(())
}

/// `P_{f,k}` on an arbitrary rational section coefficient `p`:
/// `X.p + (-k z̄ X¹/ρ + c_X) p` with `X` the Hamiltonian field of `f`.
pub fn p_fk_fn(f: &FsFunction, k: u32, d: &MetaDerivative, p: &FsFunction) -> FsFunction {
    let x = hamiltonian_field(f);
    let c = &chern_coefficient(k as i64, &x) + &d.coefficient(&x);
    (&x.apply(p) + &(&c * p)).canonical()
}

/// `P_{f,k} s` for a holomorphic section.
pub fn p_fk(f: &FsFunction, spec: &BundleSpec, d: &MetaDerivative, s: &HoloSection) -> Result<FsFunction> {
    check_spec(spec, d)?;
    Ok(p_fk_fn(f, spec.k, d, &s.to_fs()))
}

/// `p ↦ f p + (i/k) P_{f,k} p`.
pub fn corrected_multiplier(f: &FsFunction, k: u32, d: &MetaDerivative, p: &FsFunction) -> FsFunction {
    let ik = Cq::imag(crate::scalar::q(1, k as i64));
    (&(f * p) + &p_fk_fn(f, k, d, p).scale(&ik)).canonical()
}

/// `Q_k^D(f) = Π_k (f + (i/k) P_{f,k})`.
pub fn q_d(f: &FsFunction, spec: &BundleSpec, d: &MetaDerivative) -> Result<OperatorMatrix> {
    check_spec(spec, d)?;
    if !f.is_globally_smooth() {
        return Err(Error::NotSmooth);
    }
    if !f.is_real() {
        return Err(Error::Config("quantized function must be real".into()));
    }
    if !spec.half_form {
        log::warn!("quantizing without the half-form flag; using the derivative family directly");
    }
    let f = f.canonical();
    let x = hamiltonian_field(&f);
    let k = spec.k;
    let c = (&chern_coefficient(k as i64, &x) + &d.coefficient(&x)).canonical();
    let ik = Cq::imag(crate::scalar::q(1, k as i64));
    let fi = (&f + &c.scale(&ik)).canonical();
    let xi = x.holo.scale(&ik).canonical();
    compress(*spec, |b| {
        let zb = FsFunction::new(crate::poly::Poly::monomial(b as u32, 0, Cq::one()), 0);
        let mut col = &fi * &zb;
        if b > 0 {
            let dzb = FsFunction::new(crate::poly::Poly::monomial(b as u32 - 1, 0, Cq::int(b as i64)), 0);
            col = &col + &(&xi * &dzb);
        }
        col
    })
}

/// Complex-linear extension `Q(Re f) + i Q(Im f)`.
pub fn q_d_complex(f: &FsFunction, spec: &BundleSpec, d: &MetaDerivative) -> Result<OperatorMatrix> {
    if f.is_real() {
        return q_d(f, spec, d);
    }
    let half = Cq::ratio(1, 2);
    let re = (f + &f.conj()).scale(&half).canonical();
    let im = (f - &f.conj()).scale(&Cq::imag(crate::scalar::q(-1, 2))).canonical();
    let (qr, qi) = (q_d(&re, spec, d)?, q_d(&im, spec, d)?);
    qr.add(&qi.scale(&Cq::i()))
}

/// Both sides of the commutator identity applied to `s`; returns their difference.
///
/// `[f + (i/k)P_f, g + (i/k)P_g] = (1/ik)({f,g} + (i/k)P_{{f,g}}) - (1/k²)(i R(X,Y) + ½ B_j(X,Y))`.
pub fn verify_commutator_identity(
    f: &FsFunction,
    g: &FsFunction,
    spec: &BundleSpec,
    d: &MetaDerivative,
    s: &HoloSection,
) -> Result<FsFunction> {
    check_spec(spec, d)?;
    let k = spec.k;
    let p = s.to_fs();
    let op_f = |u: &FsFunction| corrected_multiplier(f, k, d, u);
    let op_g = |u: &FsFunction| corrected_multiplier(g, k, d, u);
    let lhs = &op_f(&op_g(&p)) - &op_g(&op_f(&p));
    let fg = poisson_bracket(f, g);
    let inv_ik = Cq::imag(crate::scalar::q(-1, k as i64));
    let first = corrected_multiplier(&fg, k, d, &p).scale(&inv_ik);
    let (x, y) = (hamiltonian_field(f), hamiltonian_field(g));
    let curv = curvature(d)?;
    let defect = &curv.r.eval(&x, &y).scale(&Cq::i()) + &b_j(&x, &y).scale(&Cq::ratio(1, 2));
    let second = (&defect * &p).scale(&Cq::real(crate::scalar::q(-1, (k * k) as i64)));
    Ok((&lhs - &(&first + &second)).canonical())
}

/// `R(X_f, X_g)` as a function.
pub fn curvature_on(curv: &CurvatureData, f: &FsFunction, g: &FsFunction) -> FsFunction {
    curv.r.eval(&hamiltonian_field(f), &hamiltonian_field(g))
}

/// `(m + 1) ω`, the multiple of the Kähler form carried by `c₁(B)`.
pub fn class_form(m: i32) -> TwoForm {
    kahler_form().scale(&Cq::int(m as i64 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_alpha() -> OneForm {
        // α = d(x1 x2) + x3 ι_{X_{x1}} ω, real
        let exact = OneForm::exterior_d(&(&FsFunction::x1() * &FsFunction::x2()));
        let v = hamiltonian_field(&FsFunction::x1()).scale_fn(&FsFunction::x3());
        exact.add(&kahler_form().contract(&v))
    }

    #[test]
    fn routes_agree() {
        for m in [-1, 0, 2] {
            for f in [FsFunction::x1(), &FsFunction::x2() * &FsFunction::x3()] {
                let x = hamiltonian_field(&f);
                assert_eq!(MetaDerivative::chern(m).coefficient(&x), MetaDerivative::direct(m).coefficient(&x));
            }
        }
    }

    #[test]
    fn curvature_of_base_derivative() {
        for m in [0, 1, 2] {
            let c = curvature(&MetaDerivative::chern(m)).unwrap();
            assert_eq!(c.r, class_form(m).scale(&Cq::int(-1)));
            assert_eq!(c.chern_number().unwrap(), Cq::int(-(m as i64 + 1)));
        }
    }

    #[test]
    fn gauge_shift_changes_curvature_by_minus_d_alpha() {
        let d = MetaDerivative::chern(1);
        let a = sample_alpha();
        let d2 = gauge_shift(&d, &a).unwrap();
        let (r, r2) = (curvature(&d).unwrap().r, curvature(&d2).unwrap().r);
        assert_eq!(r2.sub(&r), a.d().scale(&Cq::int(-1)));
        assert_eq!(gauge_shift(&d, &OneForm::zero()).unwrap(), d);
    }

    #[test]
    fn derivative_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = gauge_shift(&MetaDerivative::chern(1), &sample_alpha()).unwrap();
        let x = hamiltonian_field(&(&FsFunction::x1() * &FsFunction::x3()));
        let f = &FsFunction::x2() + &FsFunction::z();
        let s = HoloSection::random(BundleSpec::half(2, 1), &mut rng).to_fs();
        let t = &FsFunction::x3() * &HoloSection::random(BundleSpec::half(2, 1), &mut rng).to_fs();
        assert!(leibniz_defect(&d, &x, &f, &s).is_zero());
        assert!(scaling_defect(&d, &x, &f, &s).is_zero());
        assert!(hermitian_defect(&d, &x, &s, &t).is_zero());
    }

    #[test]
    fn commutator_identity_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = BundleSpec::half(4, 0);
        let s = HoloSection::random(spec, &mut rng);
        let d = MetaDerivative::chern(0);
        let r = verify_commutator_identity(&FsFunction::x1(), &FsFunction::x2(), &spec, &d, &s).unwrap();
        assert!(r.is_zero());
        let spec = BundleSpec::half(3, 1);
        let d = gauge_shift(&MetaDerivative::chern(1), &sample_alpha()).unwrap();
        let s = HoloSection::random(spec, &mut rng);
        let r = verify_commutator_identity(&(&FsFunction::x3() * &FsFunction::x3()), &FsFunction::x2(), &spec, &d, &s).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn quantization_of_constants_and_x3() {
        let spec = BundleSpec::half(8, 0);
        let d = MetaDerivative::chern(0);
        let one = q_d(&FsFunction::one(), &spec, &d).unwrap();
        assert!(one.exact.as_ref().unwrap().sub(&crate::toeplitz::ExactMatrix::identity(spec.dim())).is_zero());
        let q3 = q_d(&FsFunction::x3(), &spec, &d).unwrap();
        assert!(q3.hermitian_defect() < 1e-12);
        let ev = q3.eigenvalues();
        let n = ev.len();
        for a in 0..n {
            assert!((ev[a] + ev[n - 1 - a]).abs() < 1e-12);
        }
    }

    #[test]
    fn quantization_is_hermitian() {
        let d = MetaDerivative::chern(1);
        let spec = BundleSpec::half(6, 1);
        let f = &(&FsFunction::x1() * &FsFunction::x2()) + &FsFunction::x3();
        let q = q_d(&f, &spec, &d).unwrap();
        assert!(q.hermitian_defect() < 1e-12);
        let e = q.exact.as_ref().unwrap();
        assert_eq!(e.adjoint(&crate::sections::gram(&spec)), *e);
    }
}
