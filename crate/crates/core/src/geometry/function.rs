use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::scalar::{Coeff, Cq};

/// `N(z, z̄) / (1 + |z|²)^weight` on the affine chart of CP¹.
///
/// Intermediate values (field components, form coefficients) may violate the
/// global-smoothness degree bound; see [`Fs::is_globally_smooth`].
#[derive(Clone, Debug)]
pub struct Fs<C: Coeff> {
    num: Poly<C>,
    weight: u32,
}

/// Exact function on the sphere.
pub type FsFunction = Fs<Cq>;
/// Floating-point counterpart, used for extracted symbols.
pub type FsFunctionF64 = Fs<Complex64>;

impl<C: Coeff> Fs<C> {
    pub fn new(num: Poly<C>, weight: u32) -> Self {
        Fs { num, weight }
    }

    pub fn zero() -> Self {
        Fs::new(Poly::zero(), 0)
    }

    pub fn one() -> Self {
        Fs::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Fs::new(Poly::constant(c), 0)
    }

    /// `(z + z̄) / (1 + |z|²)`.
    pub fn x1() -> Self {
        Fs::new(Poly::from_terms([((1, 0), C::one()), ((0, 1), C::one())]), 1)
    }

    /// `(z - z̄) / (i (1 + |z|²))`.
    pub fn x2() -> Self {
        let mi = -C::i();
        Fs::new(Poly::from_terms([((1, 0), mi.clone()), ((0, 1), -mi)]), 1)
    }

    /// `(1 - |z|²) / (1 + |z|²)`.
    pub fn x3() -> Self {
        Fs::new(Poly::from_terms([((0, 0), C::one()), ((1, 1), -C::one())]), 1)
    }

    /// The chart variable `z` itself (not globally smooth).
    pub fn z() -> Self {
        Fs::new(Poly::monomial(1, 0, C::one()), 0)
    }

    pub fn zb() -> Self {
        Fs::new(Poly::monomial(0, 1, C::one()), 0)
    }

    /// `1 + |z|²` as a function (weight 0).
    pub fn rho() -> Self {
        Fs::new(Poly::rho(), 0)
    }

    pub fn num(&self) -> &Poly<C> {
        &self.num
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Numerator expressed over `(1 + |z|²)^w`, `w ≥ weight`.
    pub fn numerator_at(&self, w: u32) -> Option<Poly<C>> {
        if w < self.weight {
            // only possible after cancelling common factors
            let c = self.canonical();
            if w < c.weight {
                return None;
            }
            return Some(c.num.mul_rho_pow(w - c.weight));
        }
        Some(self.num.mul_rho_pow(w - self.weight))
    }

    /// Multiply by `(1 + |z|²)^n`, lowering the weight where possible.
    pub fn mul_rho_pow(&self, n: u32) -> Self {
        if self.weight >= n {
            Fs::new(self.num.clone(), self.weight - n)
        } else {
            Fs::new(self.num.mul_rho_pow(n - self.weight), 0)
        }
    }

    /// Divide by `(1 + |z|²)^n`.
    pub fn div_rho_pow(&self, n: u32) -> Self {
        Fs::new(self.num.clone(), self.weight + n)
    }

    pub fn scale(&self, c: &C) -> Self {
        Fs::new(self.num.scale(c), self.weight)
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&C::from_int(n))
    }

    pub fn conj(&self) -> Self {
        Fs::new(self.num.conj(), self.weight)
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Fs<D> {
        Fs::new(self.num.map(f), self.weight)
    }

    pub fn to_c64(&self) -> Fs<Complex64> {
        self.map(|c| c.to_c64())
    }

    /// `∂/∂z`.
    pub fn dz(&self) -> Self {
        // ∂(N ρ^-m) = (ρ ∂N - m z̄ N) ρ^-(m+1)
        let m = self.weight;
        let a = self.num.dz().mul_rho_pow(1);
        let b = self.num.shift(0, 1).scale(&C::from_int(m as i64));
        Fs::new(a - b, m + 1)
    }

    /// `∂/∂z̄`.
    pub fn dzb(&self) -> Self {
        let m = self.weight;
        let a = self.num.dzb().mul_rho_pow(1);
        let b = self.num.shift(1, 0).scale(&C::from_int(m as i64));
        Fs::new(a - b, m + 1)
    }

    /// Strip common `(1 + |z|²)` factors from numerator and weight.
    pub fn canonical(&self) -> Self {
        let mut num = self.num.clone();
        let mut w = self.weight;
        if num.is_zero() {
            return Fs::zero();
        }
        while w > 0 {
            match num.div_rho() {
                Some(q) => {
                    num = q;
                    w -= 1;
                }
                None => break,
            }
        }
        Fs::new(num, w)
    }

    /// Smooth on all of CP¹: in canonical form both degrees are ≤ weight.
    pub fn is_globally_smooth(&self) -> bool {
        let c = self.canonical();
        c.num.is_zero() || (c.num.deg_z() <= c.weight && c.num.deg_zb() <= c.weight)
    }

    /// Real-valued iff `c[b][a] = conj(c[a][b])`.
    pub fn is_real(&self) -> bool {
        self.num == self.num.conj()
    }

    /// Smallest band `L` such that the function is `P / ρ^L` with both
    /// degrees of `P` at most `L`. Only meaningful for smooth functions.
    pub fn band(&self) -> u32 {
        let c = self.canonical();
        c.weight.max(c.num.deg_z()).max(c.num.deg_zb())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let rho = 1.0 + z.norm_sqr();
        self.num.eval(z) / rho.powi(self.weight as i32)
    }

    /// Value at the point at infinity (limit along the chart), smooth functions only.
    pub fn eval_at_infinity(&self) -> Complex64 {
        self.chart_swap().eval(Complex64::new(0.0, 0.0))
    }

    /// Re-express in the chart `w = 1/z`. Requires global smoothness.
    pub fn chart_swap(&self) -> Self {
        let c = self.canonical();
        let m = c.weight;
        assert!(c.is_globally_smooth(), "chart swap of a non-smooth function");
        Fs::new(
            Poly::from_terms(c.num.terms().map(|((a, b), v)| ((m - a, m - b), v.clone()))),
            m,
        )
    }

    fn common(&self, o: &Self) -> (Poly<C>, Poly<C>, u32) {
        let w = self.weight.max(o.weight);
        (
            self.num.mul_rho_pow(w - self.weight),
            o.num.mul_rho_pow(w - o.weight),
            w,
        )
    }

    /// Product that keeps the result canonical.
    pub fn mul_canonical(&self, o: &Self) -> Self {
        (self * o).canonical()
    }
}

impl<C: Coeff> PartialEq for Fs<C> {
    fn eq(&self, o: &Self) -> bool {
        let (a, b, _) = self.common(o);
        a == b
    }
}

impl<C: Coeff> Add for Fs<C> {
    type Output = Fs<C>;
    fn add(self, o: Fs<C>) -> Fs<C> {
        &self + &o
    }
}

impl<'a, C: Coeff> Add<&'a Fs<C>> for &'a Fs<C> {
    type Output = Fs<C>;
    fn add(self, o: &Fs<C>) -> Fs<C> {
        let (a, b, w) = self.common(o);
        Fs::new(a + b, w)
    }
}

impl<C: Coeff> Sub for Fs<C> {
    type Output = Fs<C>;
    fn sub(self, o: Fs<C>) -> Fs<C> {
        &self - &o
    }
}

impl<'a, C: Coeff> Sub<&'a Fs<C>> for &'a Fs<C> {
    type Output = Fs<C>;
    fn sub(self, o: &Fs<C>) -> Fs<C> {
        let (a, b, w) = self.common(o);
        Fs::new(a - b, w)
    }
}

impl<C: Coeff> Neg for Fs<C> {
    type Output = Fs<C>;
    fn neg(self) -> Fs<C> {
        Fs::new(-self.num, self.weight)
    }
}

impl<C: Coeff> Mul for Fs<C> {
    type Output = Fs<C>;
    fn mul(self, o: Fs<C>) -> Fs<C> {
        &self * &o
    }
}

impl<'a, C: Coeff> Mul<&'a Fs<C>> for &'a Fs<C> {
    type Output = Fs<C>;
    fn mul(self, o: &Fs<C>) -> Fs<C> {
        Fs::new(&self.num * &o.num, self.weight + o.weight)
    }
}

impl Fs<Cq> {
    /// Exact value at a Gaussian-rational chart point.
    pub fn eval_exact(&self, z: &Cq) -> Cq {
        let zb = z.conj();
        let pow = |x: &Cq, n: u32| (0..n).fold(Cq::one(), |acc, _| &acc * x);
        let num = self.num.terms().fold(Cq::zero(), |acc, ((a, b), c)| acc + &(c * &pow(z, *a)) * &pow(&zb, *b));
        let rho = Cq::one() + (z * &zb);
        num.div(&pow(&rho, self.weight)).expect("rho is positive")
    }
}

impl fmt::Display for Fs<Cq> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonical();
        if c.num.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        write!(f, "[")?;
        for ((a, b), v) in c.num.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", v)?;
            if *a > 0 {
                write!(f, "*z^{}", a)?;
            }
            if *b > 0 {
                write!(f, "*zb^{}", b)?;
            }
        }
        write!(f, "]/(1+|z|^2)^{}", c.weight)
    }
}

/// Serialized coefficient table: `weight` plus `[a, b, coefficient]` rows.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CoeffTable<C> {
    pub weight: u32,
    pub terms: Vec<(u32, u32, C)>,
}

impl<C: Coeff> Fs<C> {
    pub fn to_table(&self) -> CoeffTable<C> {
        CoeffTable {
            weight: self.weight,
            terms: self.num.terms().map(|((a, b), c)| (*a, *b, c.clone())).collect(),
        }
    }

    pub fn from_table(t: &CoeffTable<C>) -> Self {
        Fs::new(
            Poly::from_terms(t.terms.iter().map(|(a, b, c)| ((*a, *b), c.clone()))),
            t.weight,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_points() -> Vec<Complex64> {
        (0..10)
            .map(|j| {
                let t = j as f64 * 0.7 + 0.1;
                Complex64::new(t.cos() * (0.3 + 0.2 * j as f64), t.sin() * 0.9)
            })
            .collect()
    }

    #[test]
    fn unit_sphere_relation() {
        let x1 = FsFunction::x1();
        let x2 = FsFunction::x2();
        let x3 = FsFunction::x3();
        let s = &(&(&x1 * &x1) + &(&x2 * &x2)) + &(&x3 * &x3);
        assert_eq!(s, FsFunction::one());
        let c = s.canonical();
        assert_eq!(c.weight(), 0);
        for z in sample_points() {
            assert!((s.eval(z) - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn x3_squared_expansion() {
        let x3 = FsFunction::x3();
        let sq = &x3 * &x3;
        let expected = Poly::from_terms([((0, 0), Cq::int(1)), ((1, 1), Cq::int(-2)), ((2, 2), Cq::int(1))]);
        assert_eq!(sq.num(), &expected);
        assert_eq!(sq.weight(), 2);
    }

    #[test]
    fn identity_multiplication() {
        let f = &FsFunction::x1() * &FsFunction::x3();
        assert_eq!(&FsFunction::one() * &f, f);
    }

    #[test]
    fn smoothness_and_chart_swap() {
        assert!(FsFunction::x1().is_globally_smooth());
        assert!(!FsFunction::z().is_globally_smooth());
        let f = &FsFunction::x1() * &FsFunction::x2() + FsFunction::x3();
        assert_eq!(f.chart_swap().chart_swap(), f);
        // x3 → -x3 at the antipode chart
        assert_eq!(FsFunction::x3().chart_swap(), -FsFunction::x3());
    }

    #[test]
    fn reality() {
        assert!(FsFunction::x2().is_real());
        assert!(!FsFunction::z().is_real());
        let x2 = FsFunction::x2();
        for z in sample_points() {
            assert!(x2.eval(z).im.abs() < 1e-15);
            assert!((x2.eval(z).re - 2.0 * z.im / (1.0 + z.norm_sqr())).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let f = &FsFunction::x1() * &FsFunction::x3() + FsFunction::x2();
        let z0 = Complex64::new(0.3, -0.7);
        let h = 1e-6;
        // ∂_z = (∂_x - i ∂_y)/2
        let fx = (f.eval(z0 + h) - f.eval(z0 - h)) / (2.0 * h);
        let fy = (f.eval(z0 + Complex64::i() * h) - f.eval(z0 - Complex64::i() * h)) / (2.0 * h);
        let dz = (fx - Complex64::i() * fy) / 2.0;
        let dzb = (fx + Complex64::i() * fy) / 2.0;
        assert!((f.dz().eval(z0) - dz).norm() < 1e-8);
        assert!((f.dzb().eval(z0) - dzb).norm() < 1e-8);
    }
}
