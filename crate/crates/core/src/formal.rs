//! Graded polynomial symbols along the diagonal and their product
//! `(e ⋆ g)(ħ, z, z̄) = [exp(ħΔ) e(ħ, -u, z̄ + ū) g(ħ, z + u, -ū)]_{u = ū = 0}`.
//!
//! Geometric inputs are frozen at a point: the values of `ω` on a frame
//! `∂_1, …, ∂_n` of `T^{1,0}` and first-order field data in that frame.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::geometry::VectorField;
use crate::scalar::{factorial, q, Coeff, Cq, Q};
use crate::{Error, Result};

/// `ħ^hbar z^alpha z̄^beta`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetMonomial {
    pub hbar: u32,
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
}

impl JetMonomial {
    pub fn degree(&self) -> u32 {
        self.alpha.iter().sum::<u32>() + self.beta.iter().sum::<u32>()
    }

    /// `|α| + |β| + 2ℓ`: the smallest `m` whose class contains the monomial is this value.
    pub fn grade(&self) -> u32 {
        self.degree() + 2 * self.hbar
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JetPolynomial {
    n: usize,
    terms: BTreeMap<JetMonomial, Cq>,
}

fn multi_factorial(a: &[u32]) -> Q {
    a.iter().fold(q(1, 1), |acc, &x| acc * Q::from_integer(factorial(x as u64)))
}

fn multi_binomial(a: &[u32], b: &[u32]) -> Q {
    a.iter().zip(b).fold(q(1, 1), |acc, (&x, &y)| acc * Q::from_integer(crate::scalar::binomial(x as u64, y as u64)))
}

/// All `b ≤ a` componentwise.
fn sub_indices(a: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &x in a {
        out = out.into_iter().flat_map(|p| (0..=x).map(move |y| [p.clone(), vec![y]].concat())).collect();
    }
    out
}

fn sign(exps: &[u32]) -> Q {
    if exps.iter().sum::<u32>() % 2 == 0 {
        q(1, 1)
    } else {
        q(-1, 1)
    }
}

impl JetPolynomial {
    pub fn zero(n: usize) -> Self {
        JetPolynomial { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Cq) -> Self {
        Self::monomial(n, 0, vec![0; n], vec![0; n], c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Cq::one())
    }

    pub fn monomial(n: usize, hbar: u32, alpha: Vec<u32>, beta: Vec<u32>, c: Cq) -> Self {
        assert!(alpha.len() == n && beta.len() == n, "multi-index length must equal the dimension");
        let mut p = Self::zero(n);
        p.add_term(JetMonomial { hbar, alpha, beta }, c);
        p
    }

    pub fn z(n: usize, i: usize) -> Self {
        let mut a = vec![0; n];
        a[i] = 1;
        Self::monomial(n, 0, a, vec![0; n], Cq::one())
    }

    pub fn zb(n: usize, i: usize) -> Self {
        let mut b = vec![0; n];
        b[i] = 1;
        Self::monomial(n, 0, vec![0; n], b, Cq::one())
    }

    pub fn hbar(n: usize) -> Self {
        Self::monomial(n, 1, vec![0; n], vec![0; n], Cq::one())
    }

    /// Random polynomial with at most `nterms` monomials of degree ≤ `max_deg` and ħ-power ≤ `max_hbar`.
    pub fn random<R: Rng>(n: usize, max_deg: u32, max_hbar: u32, nterms: usize, rng: &mut R) -> Self {
        let mut p = Self::zero(n);
        for _ in 0..nterms {
            let mut alpha = vec![0; n];
            let mut beta = vec![0; n];
            let deg = rng.gen_range(0..=max_deg);
            for _ in 0..deg {
                let i = rng.gen_range(0..n);
                if rng.gen_bool(0.5) {
                    alpha[i] += 1;
                } else {
                    beta[i] += 1;
                }
            }
            let c = Cq::new(q(rng.gen_range(-6..=6), rng.gen_range(1..=3)), q(rng.gen_range(-6..=6), rng.gen_range(1..=3)));
            p.add_term(JetMonomial { hbar: rng.gen_range(0..=max_hbar), alpha, beta }, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&JetMonomial, &Cq)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &JetMonomial) -> Cq {
        self.terms.get(m).cloned().unwrap_or_else(Cq::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: JetMonomial, c: Cq) {
        let next = self.coeff(&m) + c;
        if next.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, next);
        }
    }

    fn check_dim(&self, o: &JetPolynomial) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch { left: self.n, right: o.n });
        }
        Ok(())
    }

    pub fn add(&self, o: &JetPolynomial) -> Result<Self> {
        self.check_dim(o)?;
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, o: &JetPolynomial) -> Result<Self> {
        self.add(&o.scale(&Cq::int(-1)))
    }

    pub fn scale(&self, c: &Cq) -> Self {
        let mut r = Self::zero(self.n);
        for (m, v) in &self.terms {
            r.add_term(m.clone(), v * c);
        }
        r
    }

    /// Pointwise (commutative) product.
    pub fn mul(&self, o: &JetPolynomial) -> Result<Self> {
        self.check_dim(o)?;
        let mut r = Self::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = JetMonomial {
                    hbar: m1.hbar + m2.hbar,
                    alpha: m1.alpha.iter().zip(&m2.alpha).map(|(a, b)| a + b).collect(),
                    beta: m1.beta.iter().zip(&m2.beta).map(|(a, b)| a + b).collect(),
                };
                r.add_term(m, c1 * c2);
            }
        }
        Ok(r)
    }

    /// Complex conjugation: swaps `z` and `z̄`, conjugates coefficients (ħ is real).
    pub fn conj(&self) -> Self {
        let mut r = Self::zero(self.n);
        for (m, c) in &self.terms {
            r.add_term(JetMonomial { hbar: m.hbar, alpha: m.beta.clone(), beta: m.alpha.clone() }, c.conj());
        }
        r
    }

    pub fn dz(&self, i: usize) -> Self {
        let mut r = Self::zero(self.n);
        for (m, c) in &self.terms {
            if m.alpha[i] > 0 {
                let mut a = m.alpha.clone();
                a[i] -= 1;
                r.add_term(JetMonomial { hbar: m.hbar, alpha: a, beta: m.beta.clone() }, c * &Cq::int(m.alpha[i] as i64));
            }
        }
        r
    }

    pub fn dzb(&self, i: usize) -> Self {
        self.conj().dz(i).conj()
    }

    /// Smallest grade among the monomials (`None` for zero).
    pub fn min_grade(&self) -> Option<u32> {
        self.terms.keys().map(JetMonomial::grade).min()
    }

    /// Membership in the class `𝒜_m`: `|α| + |β| ≥ m - 2ℓ` for every monomial.
    pub fn in_class(&self, m: u32) -> bool {
        self.terms.keys().all(|t| t.grade() >= m)
    }

    /// Every monomial has grade exactly `m` (the form of a symbol `σ_m`).
    pub fn is_homogeneous(&self, m: u32) -> bool {
        self.terms.keys().all(|t| t.grade() == m)
    }

    /// One line per monomial in sorted order: `h^l a=[..] b=[..] re im`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.terms {
            let _ = writeln!(s, "h^{} a={:?} b={:?} {} {}", m.hbar, m.alpha, m.beta, c.re, c.im);
        }
        s
    }
}

/// The product of symbols. Only monomials `u^γ ū^γ` survive the evaluation
/// at `u = ū = 0`, each contributing `γ! ħ^{|γ|}`.
pub fn star_formal(e: &JetPolynomial, g: &JetPolynomial) -> Result<JetPolynomial> {
    e.check_dim(g)?;
    let n = e.n;
    let mut r = JetPolynomial::zero(n);
    for (m1, c1) in &e.terms {
        // e(-u, z̄ + ū): u^{α1} (-1)^{|α1|} Σ C(β1, β') z̄^{β1-β'} ū^{β'}
        let s1 = sign(&m1.alpha);
        for (m2, c2) in &g.terms {
            // g(z + u, -ū): (-1)^{|β2|} ū^{β2} Σ C(α2, α') z^{α2-α'} u^{α'}
            let s2 = sign(&m2.beta);
            let base = (c1 * c2).scale_q(&(&s1 * &s2));
            for ap in sub_indices(&m2.alpha) {
                let gamma: Vec<u32> = m1.alpha.iter().zip(&ap).map(|(a, b)| a + b).collect();
                // β' = γ - β2 must satisfy 0 ≤ β' ≤ β1
                let bp: Option<Vec<u32>> = gamma
                    .iter()
                    .zip(&m2.beta)
                    .zip(&m1.beta)
                    .map(|((g, b2), b1)| g.checked_sub(*b2).filter(|x| x <= b1))
                    .collect();
                let Some(bp) = bp else { continue };
                let w = multi_binomial(&m1.beta, &bp) * multi_binomial(&m2.alpha, &ap) * multi_factorial(&gamma);
                let mono = JetMonomial {
                    hbar: m1.hbar + m2.hbar + gamma.iter().sum::<u32>(),
                    alpha: m2.alpha.iter().zip(&ap).map(|(a, b)| a - b).collect(),
                    beta: m1.beta.iter().zip(&bp).map(|(a, b)| a - b).collect(),
                };
                r.add_term(mono, base.scale_q(&w));
            }
        }
    }
    Ok(r)
}

/// Values `ω(∂_i, ∂̄_j)` of the symplectic form on a frame of `T^{1,0}` at a point;
/// `ω` vanishes on pairs of the same type.
#[derive(Clone, Debug, PartialEq)]
pub struct FrozenFrame {
    pub omega: Vec<Vec<Cq>>,
}

impl FrozenFrame {
    /// `ω(∂_i, ∂̄_j) = i δ_ij`.
    pub fn orthonormal(n: usize) -> Self {
        FrozenFrame {
            omega: (0..n).map(|i| (0..n).map(|j| if i == j { Cq::i() } else { Cq::zero() }).collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }
}

/// Components of a tangent vector at a point: `X^{1,0} = Σ holo_i ∂_i`, `X^{0,1} = Σ anti_i ∂̄_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrozenVector {
    pub holo: Vec<Cq>,
    pub anti: Vec<Cq>,
}

impl FrozenVector {
    pub fn real(holo: Vec<Cq>) -> Self {
        let anti = holo.iter().map(Coeff::conj).collect();
        FrozenVector { holo, anti }
    }
}

/// `τ_Y = ω(·, Y^{1,0})` as a linear symbol: coefficient of `z̄_i` is `ω(∂̄_i, Y^{1,0})`.
pub fn tau_symbol(frame: &FrozenFrame, y: &FrozenVector) -> JetPolynomial {
    let n = frame.dim();
    let mut p = JetPolynomial::zero(n);
    for i in 0..n {
        let c = (0..n).fold(Cq::zero(), |acc, j| acc - &y.holo[j] * &frame.omega[j][i]);
        p = p.add(&JetPolynomial::zb(n, i).scale(&c)).expect("same dimension");
    }
    p
}

/// `ω(X^{0,1}, Y^{1,0})`.
pub fn omega_anti_holo(frame: &FrozenFrame, x: &FrozenVector, y: &FrozenVector) -> Cq {
    let n = frame.dim();
    let mut s = Cq::zero();
    for i in 0..n {
        for j in 0..n {
            s = s - &(&x.anti[i] * &y.holo[j]) * &frame.omega[j][i];
        }
    }
    s
}

/// First-order data of a real vector field in the frame: `brackets[j][k]` is the
/// `∂̄_k` component of `[∂_j, X]`; the `∂_k` component of `[∂̄_j, X]` is its conjugate.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldJet {
    pub brackets: Vec<Vec<Cq>>,
}

impl FieldJet {
    /// Data of a field on CP¹ at `z0` in the orthonormal frame `ρ∂_z`, where
    /// the relevant component reduces to `∂_z X^{z̄}`.
    pub fn on_sphere(x: &VectorField, z0: &Cq) -> Self {
        FieldJet { brackets: vec![vec![x.antiholo.dz().eval_exact(z0)]] }
    }
}

/// `Σ ω(∂̄_i, [∂̄_j, X]) z̄_i z̄_j - ω(∂_i, [∂_j, X]) z_i z_j`.
pub fn projector_commutator_symbol(frame: &FrozenFrame, x: &FieldJet) -> JetPolynomial {
    let n = frame.dim();
    let mut p = JetPolynomial::zero(n);
    for i in 0..n {
        for j in 0..n {
            let mut holo = Cq::zero();
            let mut anti = Cq::zero();
            for k in 0..n {
                holo = holo + &frame.omega[i][k] * &x.brackets[j][k];
                anti = anti - &frame.omega[k][i] * &x.brackets[j][k].conj();
            }
            let zz = JetPolynomial::z(n, i).mul(&JetPolynomial::z(n, j)).expect("same dimension");
            let zbzb = JetPolynomial::zb(n, i).mul(&JetPolynomial::zb(n, j)).expect("same dimension");
            p = p.add(&zbzb.scale(&anti)).and_then(|p| p.sub(&zz.scale(&holo))).expect("same dimension");
        }
    }
    p
}

/// `q(z) - conj(q)(z̄)` with `q` a holomorphic quadratic form and no ħ.
pub fn has_commutator_shape(p: &JetPolynomial) -> bool {
    let quadratic = p.terms().all(|(m, _)| {
        let (a, b) = (m.alpha.iter().sum::<u32>(), m.beta.iter().sum::<u32>());
        m.hbar == 0 && ((a == 2 && b == 0) || (a == 0 && b == 2))
    });
    quadratic && p.conj() == p.scale(&Cq::int(-1))
}

/// `B_j(X, Y)` from frozen data in an orthonormal frame:
/// `Σ conj(X_{jk}) Y_{jk} - conj(Y_{jk}) X_{jk}` with `X_{jk}` the bracket components.
pub fn b_j_frozen(x: &FieldJet, y: &FieldJet) -> Cq {
    let mut s = Cq::zero();
    for (rx, ry) in x.brackets.iter().zip(&y.brackets) {
        for (a, b) in rx.iter().zip(ry) {
            s = s + &a.conj() * b - &b.conj() * a;
        }
    }
    s
}

/// `(ħ²/2) Σ (∂_i∂_j σ_X)(∂̄_i∂̄_j σ_Y)`.
pub fn second_derivative_pairing(sx: &JetPolynomial, sy: &JetPolynomial) -> Result<JetPolynomial> {
    sx.check_dim(sy)?;
    let n = sx.n;
    let mut r = JetPolynomial::zero(n);
    for i in 0..n {
        for j in 0..n {
            r = r.add(&sx.dz(i).dz(j).mul(&sy.dzb(i).dzb(j))?)?;
        }
    }
    let h2 = JetPolynomial::monomial(n, 2, vec![0; n], vec![0; n], Cq::ratio(1, 2));
    r.mul(&h2)
}

#[derive(Clone, Debug)]
pub struct FourfoldReport {
    /// `1⋆σ_X⋆σ_Y⋆1 - 1⋆σ_Y⋆σ_X⋆1`.
    pub antisymmetrized: JetPolynomial,
    /// Whether `1⋆σ_X⋆σ_Y⋆1` equals the second-derivative pairing, both orders.
    pub pairing_identity: bool,
    pub b_j: Cq,
    /// `antisymmetrized / ((ħ²/2) B_j)` when `B_j ≠ 0` and the left side is a multiple of `ħ²`.
    pub ratio: Option<Cq>,
}

impl FourfoldReport {
    /// The polynomial identity holds and the antisymmetrized product is a constant multiple of `ħ²`.
    pub fn identity_holds(&self) -> bool {
        let n = self.antisymmetrized.dim();
        let shape_ok =
            self.antisymmetrized.terms().all(|(m, _)| m.hbar == 2 && m.degree() == 0) || self.antisymmetrized.is_zero();
        self.pairing_identity && shape_ok && n > 0
    }

    /// Whether the antisymmetrized product equals exactly `(ħ²/2) B_j`.
    pub fn matches_half_b_j(&self) -> bool {
        self.ratio.as_ref().map_or(self.antisymmetrized.is_zero() && self.b_j.is_zero(), |r| *r == Cq::one())
    }
}

pub fn verify_fourfold_product(frame: &FrozenFrame, x: &FieldJet, y: &FieldJet) -> Result<FourfoldReport> {
    let n = frame.dim();
    let (sx, sy) = (projector_commutator_symbol(frame, x), projector_commutator_symbol(frame, y));
    let one = JetPolynomial::one(n);
    let chain = |a: &JetPolynomial, b: &JetPolynomial| -> Result<JetPolynomial> {
        star_formal(&star_formal(&star_formal(&one, a)?, b)?, &one)
    };
    let (xy, yx) = (chain(&sx, &sy)?, chain(&sy, &sx)?);
    let pairing_identity = xy == second_derivative_pairing(&sx, &sy)? && yx == second_derivative_pairing(&sy, &sx)?;
    let antisymmetrized = xy.sub(&yx)?;
    let b_j = b_j_frozen(x, y);
    let h2 = JetMonomial { hbar: 2, alpha: vec![0; n], beta: vec![0; n] };
    let only_h2 = antisymmetrized.terms().all(|(m, _)| *m == h2);
    let ratio = if b_j.is_zero() || !only_h2 {
        None
    } else {
        antisymmetrized.coeff(&h2).div(&b_j.scale_q(&q(1, 2)))
    };
    Ok(FourfoldReport { antisymmetrized, pairing_identity, b_j, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{b_j, hamiltonian_field, FsFunction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_and_holomorphic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = JetPolynomial::random(2, 3, 1, 6, &mut rng);
        let one = JetPolynomial::one(2);
        // 1 acts as a left unit on holomorphic symbols and a right unit on antiholomorphic ones
        let holo = JetPolynomial { n: 2, terms: g.terms.iter().filter(|(m, _)| m.beta == [0, 0]).map(|(m, c)| (m.clone(), c.clone())).collect() };
        assert_eq!(star_formal(&one, &holo).unwrap(), holo);
        assert_eq!(star_formal(&holo.conj(), &one).unwrap(), holo.conj());
        // z̄ from the left unit picks up -ħ ∂_z
        let zbz = JetPolynomial::zb(1, 0).mul(&JetPolynomial::z(1, 0)).unwrap();
        assert_eq!(star_formal(&JetPolynomial::one(1), &zbz).unwrap(), JetPolynomial::hbar(1).scale(&Cq::int(-1)));
    }

    #[test]
    fn associativity_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=2 {
            for _ in 0..8 {
                let (a, b, c) = (
                    JetPolynomial::random(n, 4, 1, 4, &mut rng),
                    JetPolynomial::random(n, 4, 1, 4, &mut rng),
                    JetPolynomial::random(n, 4, 1, 4, &mut rng),
                );
                let l = star_formal(&star_formal(&a, &b).unwrap(), &c).unwrap();
                let r = star_formal(&a, &star_formal(&b, &c).unwrap()).unwrap();
                assert_eq!(l, r);
            }
        }
    }

    #[test]
    fn grading_is_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = JetPolynomial::random(2, 4, 1, 4, &mut rng);
            let b = JetPolynomial::random(2, 4, 1, 4, &mut rng);
            let (Some(p), Some(q)) = (a.min_grade(), b.min_grade()) else { continue };
            assert!(star_formal(&a, &b).unwrap().in_class(p + q));
        }
    }

    #[test]
    fn tau_pair() {
        for n in 1..=2 {
            let frame = FrozenFrame::orthonormal(n);
            let x = FrozenVector::real((0..n).map(|i| Cq::gaussian(1 + i as i64, -2)).collect());
            let y = FrozenVector::real((0..n).map(|i| Cq::gaussian(3, i as i64)).collect());
            let tx = tau_symbol(&frame, &x);
            assert!(tx.is_homogeneous(1));
            let prod = star_formal(&tx.conj(), &tau_symbol(&frame, &y)).unwrap();
            assert!(prod.is_homogeneous(2));
            let expected = JetPolynomial::hbar(n).scale(&(Cq::i() * omega_anti_holo(&frame, &x, &y)));
            assert_eq!(prod, expected);
        }
        let zero = FrozenVector::real(vec![Cq::zero()]);
        assert!(tau_symbol(&FrozenFrame::orthonormal(1), &zero).is_zero());
    }

    #[test]
    fn commutator_symbol_shape_and_fourfold_product() {
        let frame = FrozenFrame::orthonormal(2);
        let x = FieldJet { brackets: vec![vec![Cq::gaussian(1, 2), Cq::int(3)], vec![Cq::gaussian(0, 1), Cq::ratio(1, 2)]] };
        let y = FieldJet { brackets: vec![vec![Cq::gaussian(-2, 1), Cq::zero()], vec![Cq::int(1), Cq::gaussian(1, 1)]] };
        let sx = projector_commutator_symbol(&frame, &x);
        assert!(has_commutator_shape(&sx) && sx.is_homogeneous(2));
        let rep = verify_fourfold_product(&frame, &x, &y).unwrap();
        assert!(rep.identity_holds());
        let same = verify_fourfold_product(&frame, &x, &x).unwrap();
        assert!(same.antisymmetrized.is_zero());
        // symmetric data, as for Hamiltonian fields
        let sym = |a: Cq, b: Cq, c: Cq| FieldJet { brackets: vec![vec![a, b.clone()], vec![b, c]] };
        let x = sym(Cq::gaussian(1, 2), Cq::int(3), Cq::gaussian(0, -1));
        let y = sym(Cq::gaussian(-2, 1), Cq::ratio(1, 2), Cq::gaussian(1, 1));
        assert_eq!(verify_fourfold_product(&frame, &x, &y).unwrap().ratio, Some(Cq::int(4)));
    }

    #[test]
    fn sphere_pairs_against_geometry() {
        let x3sq = &FsFunction::x3() * &FsFunction::x3();
        let x1x3 = &FsFunction::x1() * &FsFunction::x3();
        let pairs = [(FsFunction::x1(), FsFunction::x2()), (x3sq.clone(), x1x3), (x3sq, FsFunction::x1() * FsFunction::x2())];
        let mut checked = 0;
        for (k, (f, g)) in pairs.iter().enumerate() {
            let (fx, fy) = (hamiltonian_field(f), hamiltonian_field(g));
            for z0 in [Cq::zero(), Cq::ratio(1, 2), Cq::gaussian(1, -2), Cq::gaussian(2, 1)] {
                let (jx, jy) = (FieldJet::on_sphere(&fx, &z0), FieldJet::on_sphere(&fy, &z0));
                let bj = b_j(&fx, &fy).eval_exact(&z0);
                assert_eq!(b_j_frozen(&jx, &jy), bj);
                let rep = verify_fourfold_product(&FrozenFrame::orthonormal(1), &jx, &jy).unwrap();
                assert!(rep.identity_holds());
                if k == 0 {
                    // rotations are Killing: both sides vanish
                    assert!(bj.is_zero() && rep.antisymmetrized.is_zero());
                } else if !bj.is_zero() {
                    assert_eq!(rep.ratio, Some(Cq::int(4)));
                    checked += 1;
                }
            }
        }
        assert!(checked >= 4, "{checked}");
    }
}
