use num_complex::Complex64;

use super::function::FsFunction;
use crate::scalar::{Coeff, Cq};

/// `X = X¹ ∂_z + X^{z̄} ∂_z̄` on the chart. For real fields `X^{z̄} = conj(X¹)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub holo: FsFunction,
    pub antiholo: FsFunction,
}

impl VectorField {
    pub fn new(holo: FsFunction, antiholo: FsFunction) -> Self {
        VectorField { holo, antiholo }
    }

    /// Real field with the given `(1,0)` component.
    pub fn real(holo: FsFunction) -> Self {
        let antiholo = holo.conj();
        VectorField { holo, antiholo }
    }

    pub fn zero() -> Self {
        VectorField::new(FsFunction::zero(), FsFunction::zero())
    }

    pub fn is_real(&self) -> bool {
        self.antiholo == self.holo.conj()
    }

    /// `X^{1,0}` as a complex field.
    pub fn holo_part(&self) -> Self {
        VectorField::new(self.holo.clone(), FsFunction::zero())
    }

    pub fn antiholo_part(&self) -> Self {
        VectorField::new(FsFunction::zero(), self.antiholo.clone())
    }

    /// Derivative of a function along the field.
    pub fn apply(&self, f: &FsFunction) -> FsFunction {
        &(&self.holo * &f.dz()) + &(&self.antiholo * &f.dzb())
    }

    /// Multiply by a function (`f X`, complex in general).
    pub fn scale_fn(&self, f: &FsFunction) -> Self {
        VectorField::new(f * &self.holo, f * &self.antiholo)
    }

    pub fn scale(&self, c: &Cq) -> Self {
        VectorField::new(self.holo.scale(c), self.antiholo.scale(c))
    }

    pub fn add(&self, o: &Self) -> Self {
        VectorField::new(&self.holo + &o.holo, &self.antiholo + &o.antiholo)
    }

    pub fn conj(&self) -> Self {
        VectorField::new(self.antiholo.conj(), self.holo.conj())
    }

    /// Lie bracket `[X, Y]`.
    pub fn bracket(&self, o: &Self) -> Self {
        VectorField::new(
            &self.apply(&o.holo) - &o.apply(&self.holo),
            &self.apply(&o.antiholo) - &o.apply(&self.antiholo),
        )
    }

    pub fn canonical(&self) -> Self {
        VectorField::new(self.holo.canonical(), self.antiholo.canonical())
    }

    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.holo.eval(z), self.antiholo.eval(z))
    }
}

/// `X_f` with `df = ω(X_f, ·)`: `X¹ = -i ρ² ∂̄f`, `X^{z̄} = i ρ² ∂f`.
pub fn hamiltonian_field(f: &FsFunction) -> VectorField {
    let i = Cq::i();
    VectorField::new(
        f.dzb().mul_rho_pow(2).scale(&-i.clone()).canonical(),
        f.dz().mul_rho_pow(2).scale(&i).canonical(),
    )
}

/// `{f, g} = ω(X_f, X_g) = i ρ² (∂̄f ∂g - ∂f ∂̄g)`.
pub fn poisson_bracket(f: &FsFunction, g: &FsFunction) -> FsFunction {
    let t = &(&f.dzb() * &g.dz()) - &(&f.dz() * &g.dzb());
    t.mul_rho_pow(2).scale(&Cq::i()).canonical()
}

/// `Δ = ρ² ∂ ∂̄`, the Laplacian of the Kähler metric `G = ρ⁻²`.
pub fn laplacian(f: &FsFunction) -> FsFunction {
    f.dzb().dz().mul_rho_pow(2).canonical()
}
