use super::field::VectorField;
use super::forms::OneForm;
use super::function::FsFunction;
use crate::poly::Poly;
use crate::scalar::{Coeff, Cq};

/// `g dz`, a local section of the canonical bundle `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalSection {
    pub coeff: FsFunction,
}

impl CanonicalSection {
    pub fn new(coeff: FsFunction) -> Self {
        CanonicalSection { coeff }
    }

    /// Pointwise squared norm with `|dz|² = (1 + |z|²)²`.
    pub fn norm_sqr(&self) -> FsFunction {
        (&self.coeff * &self.coeff.conj()).mul_rho_pow(2).canonical()
    }

    /// Hermitian pairing `(s, t)`.
    pub fn pair(&self, t: &CanonicalSection) -> FsFunction {
        (&self.coeff * &t.coeff.conj()).mul_rho_pow(2).canonical()
    }

    /// Coefficient in the chart `w = 1/z`: `g(z) dz = -w⁻² g(1/w) dw`.
    ///
    /// `None` when the result has a pole at `w = 0`.
    pub fn chart_swap(&self) -> Option<CanonicalSection> {
        let c = self.coeff.canonical();
        let w = c.weight() as i64;
        let mut out = Poly::zero();
        for ((a, b), v) in c.num().terms() {
            let ea = w - *a as i64 - 2;
            let eb = w - *b as i64;
            if ea < 0 || eb < 0 {
                return None;
            }
            out.add_term(ea as u32, eb as u32, -v.clone());
        }
        Some(CanonicalSection::new(FsFunction::new(out, c.weight())))
    }
}

/// `D^K_X (g dz) = (X.g + g ∂X¹) dz`, the `(1,0)` part of `ℒ_X`.
pub fn d_canonical(x: &VectorField, s: &CanonicalSection) -> CanonicalSection {
    let g = &s.coeff;
    CanonicalSection::new((&x.apply(g) + &(g * &x.holo.dz())).canonical())
}

/// Chern connection of `K`: `∇_X dz = ∂ log|dz|² (X) dz = 2 z̄ X¹/ρ dz`.
pub fn chern_canonical(x: &VectorField, s: &CanonicalSection) -> CanonicalSection {
    let g = &s.coeff;
    let conn = (&FsFunction::zb().scale_int(2) * &x.holo).div_rho_pow(1);
    CanonicalSection::new((&x.apply(g) + &(g * &conn)).canonical())
}

/// `D^δ_X (h dz^{1/2}) = (X.h + ½ h ∂X¹) dz^{1/2}`.
pub fn d_delta(x: &VectorField, h: &FsFunction) -> FsFunction {
    let half = x.holo.dz().scale(&Cq::ratio(1, 2));
    (&x.apply(h) + &(h * &half)).canonical()
}

/// `(1,0)`-frame `c (1 + |z|²)^p ∂_z` with constant `c ≠ 0`.
#[derive(Clone, Debug)]
pub struct HoloFrame {
    pub scale: Cq,
    pub rho_power: i32,
}

impl HoloFrame {
    /// The orthonormal frame `(1 + |z|²) ∂_z`.
    pub fn orthonormal() -> Self {
        HoloFrame { scale: Cq::one(), rho_power: 1 }
    }

    fn rho_pow(p: i32) -> FsFunction {
        if p >= 0 {
            FsFunction::one().mul_rho_pow(p as u32)
        } else {
            FsFunction::one().div_rho_pow((-p) as u32)
        }
    }

    /// Coefficient `h` of the frame `h ∂_z`.
    pub fn coeff(&self) -> FsFunction {
        Self::rho_pow(self.rho_power).scale(&self.scale)
    }

    fn inverse_coeff(&self) -> FsFunction {
        Self::rho_pow(-self.rho_power).scale(&self.scale.inv().expect("zero frame"))
    }

    pub fn field(&self) -> VectorField {
        VectorField::new(self.coeff(), FsFunction::zero())
    }

    pub fn conj_field(&self) -> VectorField {
        VectorField::new(FsFunction::zero(), self.coeff().conj())
    }

    /// Dual coframe `θ = dz / h`.
    pub fn coframe(&self) -> OneForm {
        OneForm::new(self.inverse_coeff(), FsFunction::zero())
    }
}

/// `B_j(X, Y) = (ℒ_X θ)(∂̄)(ℒ_Y θ̄)(∂) - (ℒ_Y θ)(∂̄)(ℒ_X θ̄)(∂)` in the given frame.
pub fn b_j_in_frame(x: &VectorField, y: &VectorField, frame: &HoloFrame) -> FsFunction {
    let theta = frame.coframe();
    let theta_bar = theta.conj();
    let (e, e_bar) = (frame.field(), frame.conj_field());
    let term = |u: &VectorField, v: &VectorField| {
        let l = theta.lie_derivative(u).eval(&e_bar);
        let r = theta_bar.lie_derivative(v).eval(&e);
        &l * &r
    };
    (&term(x, y) - &term(y, x)).canonical()
}

/// `B_j(X, Y)` in the orthonormal frame; in the chart it reduces to
/// `∂̄X¹ ∂Y^{z̄} - ∂̄Y¹ ∂X^{z̄}`.
pub fn b_j(x: &VectorField, y: &VectorField) -> FsFunction {
    b_j_in_frame(x, y, &HoloFrame::orthonormal())
}

/// `[D_X^K, D_Y^K] s - D_{[X,Y]}^K s - B_j(X, Y) s`, identically zero.
pub fn canonical_commutator_defect(x: &VectorField, y: &VectorField, s: &CanonicalSection) -> FsFunction {
    let lhs = &d_canonical(x, &d_canonical(y, s)).coeff - &d_canonical(y, &d_canonical(x, s)).coeff;
    let rhs = &d_canonical(&x.bracket(y), s).coeff + &(&b_j(x, y) * &s.coeff);
    (&lhs - &rhs).canonical()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::field::hamiltonian_field;

    fn fields() -> (VectorField, VectorField) {
        (hamiltonian_field(&FsFunction::x1()), hamiltonian_field(&FsFunction::x2()))
    }

    #[test]
    fn chart_formula_for_b_j() {
        let (x, y) = fields();
        let direct = &(&x.holo.dzb() * &y.antiholo.dz()) - &(&y.holo.dzb() * &x.antiholo.dz());
        assert_eq!(b_j(&x, &y), direct.canonical());
        assert!(b_j(&x, &x).is_zero());
    }

    #[test]
    fn b_j_frame_independent() {
        let (x, y) = (hamiltonian_field(&(&FsFunction::x1() * &FsFunction::x3())), fields().1);
        let reference = b_j(&x, &y);
        for frame in [
            HoloFrame { scale: Cq::ratio(3, 5) + Cq::i().scale_q(&crate::scalar::q(4, 5)), rho_power: 1 },
            HoloFrame { scale: Cq::one(), rho_power: 0 },
            HoloFrame { scale: Cq::gaussian(2, -1), rho_power: -2 },
        ] {
            assert_eq!(b_j_in_frame(&x, &y, &frame), reference);
        }
    }

    #[test]
    fn canonical_commutator_defect() {
        let (x, y) = fields();
        let s = CanonicalSection::new(&FsFunction::x3() * &FsFunction::z() + FsFunction::x1());
        let lhs = &d_canonical(&x, &d_canonical(&y, &s)).coeff - &d_canonical(&y, &d_canonical(&x, &s)).coeff;
        let rhs = &d_canonical(&x.bracket(&y), &s).coeff + &(&b_j(&x, &y) * &s.coeff);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn delta_squares_to_canonical() {
        let x = hamiltonian_field(&(&FsFunction::x2() * &FsFunction::x3()));
        let h = &FsFunction::x1() + &FsFunction::z();
        let lhs = (&h * &d_delta(&x, &h)).scale_int(2);
        let rhs = d_canonical(&x, &CanonicalSection::new(&h * &h)).coeff;
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn chern_connection_preserves_metric() {
        let x = hamiltonian_field(&FsFunction::x1()).add(&hamiltonian_field(&(&FsFunction::x3() * &FsFunction::x2())));
        let s = CanonicalSection::new(FsFunction::x2());
        let t = CanonicalSection::new(&FsFunction::zb() + &FsFunction::one());
        let lhs = x.apply(&s.pair(&t));
        let rhs = &chern_canonical(&x, &s).pair(&t) + &s.pair(&chern_canonical(&x, &t));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn chart_swap_of_global_section_of_k() {
        let s = CanonicalSection::new(FsFunction::one().div_rho_pow(2));
        let back = s.chart_swap().unwrap().chart_swap().unwrap();
        assert_eq!(back, s);
        assert!(CanonicalSection::new(FsFunction::one()).chart_swap().is_none());
    }
}
