//! Sparse polynomials in the chart variables `z` and `z̄`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::scalar::Coeff;

/// `Σ c[a][b] z^a z̄^b`, keyed by `(a, b)`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<C: Coeff> {
    terms: BTreeMap<(u32, u32), C>,
}

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn monomial(a: u32, b: u32, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    /// `1 + z z̄`.
    pub fn rho() -> Self {
        let mut p = Self::one();
        p.add_term(1, 1, C::one());
        p
    }

    pub fn from_terms(it: impl IntoIterator<Item = ((u32, u32), C)>) -> Self {
        let mut p = Self::zero();
        for ((a, b), c) in it {
            p.add_term(a, b, c);
        }
        p
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&(a, b)) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert((a, b), s);
                }
            }
            None => {
                self.terms.insert((a, b), c);
            }
        }
    }

    pub fn coeff(&self, a: u32, b: u32) -> C {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &C)> {
        self.terms.iter()
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest exponent of `z` (0 for the zero polynomial).
    pub fn deg_z(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn deg_zb(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v.clone() * c.clone())))
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::from_terms(self.terms.iter().map(|(k, v)| (*k, f(v))))
    }

    /// Multiply by `z^a z̄^b`.
    pub fn shift(&self, a: u32, b: u32) -> Self {
        Poly {
            terms: self.terms.iter().map(|(k, v)| ((k.0 + a, k.1 + b), v.clone())).collect(),
        }
    }

    /// Complex conjugate as a function: `c[a][b] ↦ conj(c[b][a])`.
    pub fn conj(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(k, v)| ((k.1, k.0), v.conj())).collect(),
        }
    }

    pub fn dz(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(k, _)| k.0 > 0)
                .map(|(k, v)| ((k.0 - 1, k.1), v.clone() * C::from_int(k.0 as i64))),
        )
    }

    pub fn dzb(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(k, _)| k.1 > 0)
                .map(|(k, v)| ((k.0, k.1 - 1), v.clone() * C::from_int(k.1 as i64))),
        )
    }

    /// Multiply by `(1 + z z̄)^n`.
    pub fn mul_rho_pow(&self, n: u32) -> Self {
        let mut p = self.clone();
        for _ in 0..n {
            let shifted = p.shift(1, 1);
            p = p + shifted;
        }
        p
    }

    /// Exact division by `1 + z z̄`, or `None` if it does not divide.
    ///
    /// Terms split by charge `a - b`; within a charge the polynomial is a
    /// polynomial in `t = z z̄` and we run synthetic division by `1 + t`.
    pub fn div_rho(&self) -> Option<Self> {
        let mut by_charge: BTreeMap<i64, BTreeMap<u32, C>> = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            let s = *a as i64 - *b as i64;
            let t = (*a).min(*b);
            by_charge.entry(s).or_default().insert(t, c.clone());
        }
        let mut out = Self::zero();
        for (s, coeffs) in by_charge {
            let top = *coeffs.keys().max().unwrap();
            // P(t) = (1 + t) Q(t); solve from the top degree down.
            let mut quot = vec![C::zero(); top as usize];
            let mut rem: Vec<C> = (0..=top).map(|t| coeffs.get(&t).cloned().unwrap_or_else(C::zero)).collect();
            for deg in (1..=top as usize).rev() {
                let lead = rem[deg].clone();
                quot[deg - 1] = lead.clone();
                rem[deg] = C::zero();
                rem[deg - 1] = rem[deg - 1].clone() - lead;
            }
            if !rem[0].is_zero() {
                return None;
            }
            let (za, zb) = if s >= 0 { (s as u32, 0) } else { (0, (-s) as u32) };
            for (t, c) in quot.into_iter().enumerate() {
                out.add_term(za + t as u32, zb + t as u32, c);
            }
        }
        Some(out)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        self.terms
            .iter()
            .map(|((a, b), c)| c.to_c64() * z.powu(*a) * zb.powu(*b))
            .sum()
    }
}

impl<C: Coeff> Add for Poly<C> {
    type Output = Poly<C>;
    fn add(mut self, o: Poly<C>) -> Poly<C> {
        for ((a, b), c) in o.terms {
            self.add_term(a, b, c);
        }
        self
    }
}

impl<C: Coeff> Sub for Poly<C> {
    type Output = Poly<C>;
    fn sub(mut self, o: Poly<C>) -> Poly<C> {
        for ((a, b), c) in o.terms {
            self.add_term(a, b, -c);
        }
        self
    }
}

impl<C: Coeff> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly {
            terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect(),
        }
    }
}

impl<'a, C: Coeff> Mul<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn mul(self, o: &Poly<C>) -> Poly<C> {
        let mut out = Poly::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                out.add_term(a1 + a2, b1 + b2, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Mul for Poly<C> {
    type Output = Poly<C>;
    fn mul(self, o: Poly<C>) -> Poly<C> {
        &self * &o
    }
}
