//! Holomorphic sections of `O(d)` over CP¹ in the monomial frame.
//!
//! A section is `p(z) e` where `e` is the frame of `O(d)` with
//! `|e|² = (1 + |z|²)^{-d}`; the monomials `z^a e` are orthogonal for the
//! normalized Liouville measure.

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::FsFunction;
use crate::poly::Poly;
use crate::scalar::{factorial, q, Coeff, Cq, Q};
use crate::{Error, Result};

/// Quantum space `H⁰(O(d))` for `L^k ⊗ A` (or `L^k ⊗ A ⊗ δ` with `A = B ⊗ δ`).
///
/// `half_form` selects how derivatives are built, not the degree: the
/// quantized bundle is `O(k + m)` in both cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BundleSpec {
    pub k: u32,
    pub m: i32,
    pub half_form: bool,
}

impl BundleSpec {
    pub fn new(k: u32, m: i32, half_form: bool) -> Result<Self> {
        let s = BundleSpec { k, m, half_form };
        if k == 0 {
            return Err(Error::InvalidBundle("level k must be at least 1".into()));
        }
        if (k as i64 + m as i64) < 0 {
            return Err(Error::InvalidBundle(format!("negative degree for k = {k}, m = {m}")));
        }
        Ok(s)
    }

    /// Shorthand for tests and examples; panics on an invalid spec.
    pub fn half(k: u32, m: i32) -> Self {
        Self::new(k, m, true).expect("valid bundle")
    }

    pub fn plain(k: u32, m: i32) -> Self {
        Self::new(k, m, false).expect("valid bundle")
    }

    pub fn degree(&self) -> u32 {
        (self.k as i64 + self.m as i64) as u32
    }

    pub fn dim(&self) -> usize {
        self.degree() as usize + 1
    }

    pub fn with_k(&self, k: u32) -> Result<Self> {
        Self::new(k, self.m, self.half_form)
    }
}

/// Exact diagonal Gram data `n_a = ⟨z^a, z^a⟩ = a!(d-a)!/(d+1)!`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramData {
    pub degree: u32,
    pub norms: Vec<Q>,
}

pub fn gram(spec: &BundleSpec) -> GramData {
    let d = spec.degree() as u64;
    let den = factorial(d + 1);
    let norms = (0..=d).map(|a| Q::new(factorial(a) * factorial(d - a), den.clone())).collect();
    GramData { degree: spec.degree(), norms }
}

/// `p_0 + p_1 z + … + p_d z^d` in the frame of `O(d)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloSection {
    pub spec: BundleSpec,
    pub coeffs: Vec<Cq>,
}

impl HoloSection {
    pub fn zero(spec: BundleSpec) -> Self {
        HoloSection { spec, coeffs: vec![Cq::zero(); spec.dim()] }
    }

    pub fn monomial(spec: BundleSpec, a: usize) -> Self {
        let mut s = Self::zero(spec);
        s.coeffs[a] = Cq::one();
        s
    }

    pub fn from_coeffs(spec: BundleSpec, coeffs: Vec<Cq>) -> Result<Self> {
        if coeffs.len() != spec.dim() {
            return Err(Error::MalformedSection(format!(
                "expected {} coefficients, got {}",
                spec.dim(),
                coeffs.len()
            )));
        }
        Ok(HoloSection { spec, coeffs })
    }

    /// Gaussian-integer coefficients in `[-5, 5] + i[-5, 5]` over a small denominator.
    pub fn random<R: Rng>(spec: BundleSpec, rng: &mut R) -> Self {
        let coeffs = (0..spec.dim())
            .map(|_| {
                let den = rng.gen_range(1..=4);
                Cq::new(q(rng.gen_range(-5..=5), den), q(rng.gen_range(-5..=5), den))
            })
            .collect();
        HoloSection { spec, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The coefficient function `p(z)` (a section of the frame).
    pub fn to_fs(&self) -> FsFunction {
        FsFunction::new(
            Poly::from_terms(self.coeffs.iter().enumerate().map(|(a, c)| ((a as u32, 0), c.clone()))),
            0,
        )
    }

    /// `⟨s, t⟩ = Σ s_a conj(t_a) n_a`.
    pub fn inner(&self, t: &HoloSection, g: &GramData) -> Cq {
        self.coeffs
            .iter()
            .zip(&t.coeffs)
            .zip(&g.norms)
            .fold(Cq::zero(), |acc, ((s, t), n)| acc + (s * &t.conj()).scale_q(n))
    }

    pub fn add(&self, o: &HoloSection) -> Self {
        HoloSection {
            spec: self.spec,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &Cq) -> Self {
        HoloSection { spec: self.spec, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }
}

/// Precomputed factorials for repeated monomial integrals.
#[derive(Clone, Debug)]
pub struct FactorialTable {
    table: Vec<BigInt>,
}

impl FactorialTable {
    pub fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        table.push(BigInt::from(1));
        for i in 1..=n {
            let next = &table[i - 1] * BigInt::from(i);
            table.push(next);
        }
        FactorialTable { table }
    }

    pub fn get(&self, n: usize) -> BigInt {
        if n < self.table.len() {
            self.table[n].clone()
        } else {
            factorial(n as u64)
        }
    }
}

/// Orthogonal projection of rational sections `r e` onto `H⁰(O(d))`.
#[derive(Clone, Debug)]
pub struct Projector {
    pub spec: BundleSpec,
    pub gram: GramData,
    fact: FactorialTable,
}

impl Projector {
    pub fn new(spec: BundleSpec) -> Self {
        let gram = gram(&spec);
        Projector { spec, gram, fact: FactorialTable::new(2 * spec.dim() + 32) }
    }

    /// Coefficients of `Π(r e)` where `r = N / ρ^w` may be any rational function
    /// with `⟨r e, z^a e⟩` finite.
    pub fn project(&self, r: &FsFunction) -> Result<HoloSection> {
        let d = self.spec.degree() as usize;
        let w = r.weight() as usize + d;
        let mut out = vec![Cq::zero(); d + 1];
        for ((p, qq), c) in r.num().terms() {
            let (p, qq) = (*p as usize, *qq as usize);
            if p < qq || p - qq > d {
                continue;
            }
            if p > w {
                return Err(Error::MalformedSection(format!(
                    "term z^{p} zb^{qq} / rho^{} is not square integrable",
                    r.weight()
                )));
            }
            let a = p - qq;
            // ⟨z^p z̄^q ρ^{-w'}, z^a⟩ / n_a
            let num = self.fact.get(p) * self.fact.get(w - p) * self.fact.get(d + 1);
            let den = self.fact.get(w + 1) * self.fact.get(a) * self.fact.get(d - a);
            out[a] = out[a].clone() + c.scale_q(&Q::new(num, den));
        }
        Ok(HoloSection { spec: self.spec, coeffs: out })
    }

    /// `⟨r e, z^a e⟩` without dividing by the norm.
    pub fn pairing(&self, r: &FsFunction, a: usize) -> Result<Cq> {
        let p = self.project(r)?;
        Ok(p.coeffs[a].scale_q(&self.gram.norms[a]))
    }
}

pub fn project(r: &FsFunction, spec: &BundleSpec) -> Result<HoloSection> {
    Projector::new(*spec).project(r)
}

/// `e_a = z^a / √n_a`: the sections are the monomials, the scales come from `norms`.
#[derive(Clone, Debug)]
pub struct OrthonormalBasis {
    pub sections: Vec<HoloSection>,
    pub norms: Vec<Q>,
}

impl OrthonormalBasis {
    pub fn scale(&self, a: usize) -> f64 {
        1.0 / crate::scalar::q_to_f64(&self.norms[a]).sqrt()
    }
}

pub fn orthonormal_basis(spec: &BundleSpec) -> OrthonormalBasis {
    let g = gram(spec);
    OrthonormalBasis {
        sections: (0..spec.dim()).map(|a| HoloSection::monomial(*spec, a)).collect(),
        norms: g.norms,
    }
}

/// Pointwise Hermitian product of two coefficient functions in a frame with
/// `|e|² = ρ^{-d}`.
pub fn pointwise_pair(s: &FsFunction, t: &FsFunction, d: u32) -> FsFunction {
    (s * &t.conj()).div_rho_pow(d).canonical()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::monomial_integral;
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gram_symmetry_and_level_one() {
        let g = gram(&BundleSpec::plain(1, 0));
        assert_eq!(g.norms.len(), 2);
        assert_eq!(g.norms[0], g.norms[1]);
        for d in 0..12 {
            let g = gram(&BundleSpec::plain(d + 1, -1));
            for a in 0..=d as usize {
                assert_eq!(g.norms[a], g.norms[d as usize - a]);
                assert!(g.norms[a] > Q::zero());
                assert_eq!(g.norms[a], monomial_integral(a as u32, a as u32, d));
            }
        }
    }

    #[test]
    fn gram_matches_quadrature() {
        // d = 2: ∫ |z|^{2a} ρ^{-2} dμ, dμ = ρ^{-2} dx dy / π, radial quadrature in t = r²
        let g = gram(&BundleSpec::plain(2, 0));
        for a in 0..=2 {
            // ∫_0^∞ t^a (1+t)^{-4} dt via substitution t = u/(1-u)
            let n = 200_000;
            let mut s = 0.0;
            for j in 0..n {
                let u = (j as f64 + 0.5) / n as f64;
                let t = u / (1.0 - u);
                let jac = 1.0 / (1.0 - u).powi(2);
                s += t.powi(a) * (1.0 + t).powi(-4) * jac;
            }
            s /= n as f64;
            let exact = crate::scalar::q_to_f64(&g.norms[a as usize]);
            assert!((s - exact).abs() / exact < 1e-9, "{s} vs {exact}");
        }
    }

    #[test]
    fn projection_fixes_holomorphic_and_kills_zero() {
        let spec = BundleSpec::half(5, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = HoloSection::random(spec, &mut rng);
        assert_eq!(project(&s.to_fs(), &spec).unwrap(), s);
        assert!(project(&FsFunction::zero(), &spec).unwrap().is_zero());
    }

    #[test]
    fn zbar_lowers_degree() {
        let spec = BundleSpec::plain(4, 0);
        let r = FsFunction::new(Poly::monomial(3, 1, Cq::one()), 0);
        let p = project(&r, &spec).unwrap();
        for (a, c) in p.coeffs.iter().enumerate() {
            assert_eq!(c.is_zero(), a != 2);
        }
    }

    #[test]
    fn projection_is_self_adjoint() {
        let spec = BundleSpec::plain(4, 1);
        let pr = Projector::new(spec);
        let r = &(&FsFunction::x1() * &FsFunction::x3()) * &FsFunction::new(Poly::monomial(2, 0, Cq::gaussian(1, 2)), 0);
        let pi_r = pr.project(&r).unwrap();
        for a in 0..spec.dim() {
            let direct = pr.pairing(&r, a).unwrap();
            let via = pi_r.inner(&HoloSection::monomial(spec, a), &pr.gram);
            assert_eq!(direct, via);
        }
        assert_eq!(pr.project(&pi_r.to_fs()).unwrap(), pi_r);
    }
}
