use num_bigint::BigInt;
use num_complex::Complex64;

use super::field::VectorField;
use super::function::FsFunction;
use crate::scalar::{factorial, Coeff, Cq, Q};
use crate::Error;

/// `a dz + b dz̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    pub dz: FsFunction,
    pub dzb: FsFunction,
}

/// `c dz∧dz̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm {
    pub coeff: FsFunction,
}

/// A form of degree 1 or 2.
#[derive(Clone, Debug, PartialEq)]
pub enum FsForm {
    One(OneForm),
    Two(TwoForm),
}

impl FsForm {
    pub fn degree(&self) -> u8 {
        match self {
            FsForm::One(_) => 1,
            FsForm::Two(_) => 2,
        }
    }

    pub fn d(&self) -> Result<FsForm, Error> {
        match self {
            FsForm::One(a) => Ok(FsForm::Two(a.d())),
            FsForm::Two(_) => Err(Error::DegreeMismatch { expected: 1, got: 2 }),
        }
    }

    pub fn wedge(&self, o: &FsForm) -> Result<FsForm, Error> {
        match (self, o) {
            (FsForm::One(a), FsForm::One(b)) => Ok(FsForm::Two(a.wedge(b))),
            (FsForm::Two(_), _) => Err(Error::DegreeMismatch { expected: 1, got: 2 }),
            (_, FsForm::Two(_)) => Err(Error::DegreeMismatch { expected: 1, got: 2 }),
        }
    }

    pub fn contract(&self, x: &VectorField) -> Result<FsForm, Error> {
        match self {
            FsForm::Two(c) => Ok(FsForm::One(c.contract(x))),
            FsForm::One(_) => Err(Error::DegreeMismatch { expected: 2, got: 1 }),
        }
    }

    pub fn as_two(&self) -> Result<&TwoForm, Error> {
        match self {
            FsForm::Two(c) => Ok(c),
            FsForm::One(_) => Err(Error::DegreeMismatch { expected: 2, got: 1 }),
        }
    }
}

impl OneForm {
    pub fn new(dz: FsFunction, dzb: FsFunction) -> Self {
        OneForm { dz, dzb }
    }

    pub fn zero() -> Self {
        OneForm::new(FsFunction::zero(), FsFunction::zero())
    }

    /// `df`.
    pub fn exterior_d(f: &FsFunction) -> Self {
        OneForm::new(f.dz().canonical(), f.dzb().canonical())
    }

    /// `d(a dz + b dz̄) = (∂b - ∂̄a) dz∧dz̄`.
    pub fn d(&self) -> TwoForm {
        TwoForm::new((&self.dzb.dz() - &self.dz.dzb()).canonical())
    }

    pub fn wedge(&self, o: &OneForm) -> TwoForm {
        TwoForm::new((&(&self.dz * &o.dzb) - &(&self.dzb * &o.dz)).canonical())
    }

    pub fn eval(&self, x: &VectorField) -> FsFunction {
        (&(&self.dz * &x.holo) + &(&self.dzb * &x.antiholo)).canonical()
    }

    pub fn add(&self, o: &OneForm) -> Self {
        OneForm::new(&self.dz + &o.dz, &self.dzb + &o.dzb)
    }

    pub fn sub(&self, o: &OneForm) -> Self {
        OneForm::new(&self.dz - &o.dz, &self.dzb - &o.dzb)
    }

    pub fn scale(&self, c: &Cq) -> Self {
        OneForm::new(self.dz.scale(c), self.dzb.scale(c))
    }

    pub fn scale_fn(&self, f: &FsFunction) -> Self {
        OneForm::new(f * &self.dz, f * &self.dzb)
    }

    pub fn conj(&self) -> Self {
        OneForm::new(self.dzb.conj(), self.dz.conj())
    }

    pub fn is_real(&self) -> bool {
        self.dzb == self.dz.conj()
    }

    /// `ℒ_X α = ι_X dα + d(ι_X α)`.
    pub fn lie_derivative(&self, x: &VectorField) -> Self {
        self.d().contract(x).add(&OneForm::exterior_d(&self.eval(x)))
    }

    pub fn canonical(&self) -> Self {
        OneForm::new(self.dz.canonical(), self.dzb.canonical())
    }

    /// Coefficients `(a, b)` at a chart point.
    pub fn eval_at(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.dz.eval(z), self.dzb.eval(z))
    }
}

impl TwoForm {
    pub fn new(coeff: FsFunction) -> Self {
        TwoForm { coeff }
    }

    pub fn zero() -> Self {
        TwoForm::new(FsFunction::zero())
    }

    pub fn add(&self, o: &TwoForm) -> Self {
        TwoForm::new((&self.coeff + &o.coeff).canonical())
    }

    pub fn sub(&self, o: &TwoForm) -> Self {
        TwoForm::new((&self.coeff - &o.coeff).canonical())
    }

    pub fn scale(&self, c: &Cq) -> Self {
        TwoForm::new(self.coeff.scale(c))
    }

    pub fn scale_fn(&self, f: &FsFunction) -> Self {
        TwoForm::new((f * &self.coeff).canonical())
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// `ι_X (c dz∧dz̄) = c (X¹ dz̄ - X^{z̄} dz)`.
    pub fn contract(&self, x: &VectorField) -> OneForm {
        OneForm::new(
            -(&self.coeff * &x.antiholo).canonical(),
            (&self.coeff * &x.holo).canonical(),
        )
    }

    /// `η(X, Y) = c (X¹ Y^{z̄} - X^{z̄} Y¹)`.
    pub fn eval(&self, x: &VectorField, y: &VectorField) -> FsFunction {
        let det = &(&x.holo * &y.antiholo) - &(&x.antiholo * &y.holo);
        (&self.coeff * &det).canonical()
    }

    /// The form divided by `ω`, a function on the sphere.
    pub fn density(&self) -> FsFunction {
        // ω = i ρ⁻² dz∧dz̄
        self.coeff.mul_rho_pow(2).scale(&-Cq::i()).canonical()
    }

    /// Smooth on CP¹ iff `η / ω` is globally smooth.
    pub fn is_globally_smooth(&self) -> bool {
        self.density().is_globally_smooth()
    }

    /// `(1/2π) ∫ η`, exact.
    pub fn integrate(&self) -> Result<Cq, Error> {
        let dens = self.density();
        if !dens.is_globally_smooth() {
            return Err(Error::NotSmooth);
        }
        Ok(integrate_function(&dens))
    }
}

/// The Kähler form `ω = i dz∧dz̄ / (1 + |z|²)²`, total area `2π`.
pub fn kahler_form() -> TwoForm {
    TwoForm::new(FsFunction::constant(Cq::i()).div_rho_pow(2))
}

/// Mean of a smooth function against the normalized Liouville measure `ω/2π`.
///
/// `∫ z^a z̄^b ρ^{-w} dμ = δ_ab a!(w-a)!/(w+1)!`.
pub fn integrate_function(f: &FsFunction) -> Cq {
    let c = f.canonical();
    let w = c.weight() as u64;
    let mut acc = Cq::zero();
    for ((a, b), v) in c.num().terms() {
        if a != b {
            continue;
        }
        let a = *a as u64;
        assert!(a <= w, "integrand not integrable");
        let num = factorial(a) * factorial(w - a);
        let den = factorial(w + 1);
        acc = acc + v.scale_q(&Q::new(num, den));
    }
    acc
}

/// Exact monomial integral `∫ z^a z̄^a ρ^{-w} dμ` (zero if off-diagonal).
pub fn monomial_integral(a: u32, b: u32, w: u32) -> Q {
    if a != b {
        return Q::from_integer(BigInt::from(0));
    }
    let (a, w) = (a as u64, w as u64);
    Q::new(factorial(a) * factorial(w - a), factorial(w + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::field::hamiltonian_field;

    fn x(i: u8) -> FsFunction {
        match i {
            1 => FsFunction::x1(),
            2 => FsFunction::x2(),
            _ => FsFunction::x3(),
        }
    }

    #[test]
    fn total_area() {
        assert_eq!(kahler_form().integrate().unwrap(), Cq::one());
        assert!(kahler_form().scale_fn(&x(3)).integrate().unwrap().is_zero());
    }

    #[test]
    fn dd_vanishes_and_stokes() {
        let f = &x(1) * &x(2) + x(3);
        assert!(OneForm::exterior_d(&f).d().is_zero());
        let v = hamiltonian_field(&x(1)).scale_fn(&x(3));
        let beta = kahler_form().contract(&v);
        let db = beta.d();
        assert!(!db.is_zero());
        assert!(db.integrate().unwrap().is_zero());
        // d(ι_X ω) = 0 for Hamiltonian X
        assert!(kahler_form().contract(&hamiltonian_field(&f)).d().is_zero());
    }

    #[test]
    fn d_of_contraction_against_finite_differences() {
        let v = hamiltonian_field(&x(1)).scale_fn(&x(3));
        let beta = kahler_form().contract(&v);
        let db = beta.d();
        let z0 = Complex64::new(0.3, -0.4);
        let h = 1e-5;
        let i = Complex64::i();
        // d(a dz + b dz̄) coefficient = ∂b - ∂̄a, via central differences in x, y
        let a = |z| beta.dz.eval(z);
        let b = |z| beta.dzb.eval(z);
        let dx = |g: &dyn Fn(Complex64) -> Complex64| (g(z0 + h) - g(z0 - h)) / (2.0 * h);
        let dy = |g: &dyn Fn(Complex64) -> Complex64| (g(z0 + i * h) - g(z0 - i * h)) / (2.0 * h);
        let db_dz = (dx(&b) - i * dy(&b)) / 2.0;
        let da_dzb = (dx(&a) + i * dy(&a)) / 2.0;
        assert!((db.coeff.eval(z0) - (db_dz - da_dzb)).norm() < 1e-8);
    }

    #[test]
    fn wedge_and_evaluation_agree() {
        let a = OneForm::exterior_d(&x(1));
        let b = OneForm::exterior_d(&x(2));
        let (u, v) = (hamiltonian_field(&x(3)), hamiltonian_field(&(&x(1) * &x(2))));
        let lhs = a.wedge(&b).eval(&u, &v);
        let rhs = &(&a.eval(&u) * &b.eval(&v)) - &(&a.eval(&v) * &b.eval(&u));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn omega_of_hamiltonian_fields_is_bracket() {
        let (f, g) = (x(1), x(2));
        let w = kahler_form().eval(&hamiltonian_field(&f), &hamiltonian_field(&g));
        assert_eq!(w, crate::geometry::poisson_bracket(&f, &g));
    }

    #[test]
    fn degree_mismatch() {
        let two = FsForm::Two(kahler_form());
        assert!(two.d().is_err());
        assert!(FsForm::One(OneForm::zero()).contract(&VectorField::zero()).is_err());
    }
}
