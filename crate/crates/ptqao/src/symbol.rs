//! Polynomials in commuting phase-space variables (x, p) with λ-coefficients.
//!
//! These carry Weyl symbols of operators and, once every λ-power is gone,
//! classical Hamiltonians.

use crate::gaussian::GaussianRational;
use crate::lambda::{LambdaCoefficient, LambdaError};
use crate::weyl::Monomial;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PhaseSpacePolynomial {
    terms: BTreeMap<Monomial, LambdaCoefficient>,
}

impl PhaseSpacePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(x_pow: u32, p_pow: u32, coefficient: LambdaCoefficient) -> Self {
        let mut out = Self::zero();
        out.add_term(x_pow, p_pow, coefficient);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, x_pow: u32, p_pow: u32, coefficient: LambdaCoefficient) {
        if coefficient.is_zero() {
            return;
        }
        let key = Monomial::new(x_pow, p_pow);
        let entry = self.terms.entry(key).or_default();
        *entry += &coefficient;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &LambdaCoefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, x_pow: u32, p_pow: u32) -> LambdaCoefficient {
        self.terms
            .get(&Monomial::new(x_pow, p_pow))
            .cloned()
            .unwrap_or_default()
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (*m, c.conj())).collect(),
        }
    }

    pub fn scale(&self, factor: &LambdaCoefficient) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.x_pow, m.p_pow, c * factor);
        }
        out
    }

    pub fn is_even_in_x(&self) -> bool {
        self.terms.keys().all(|m| m.x_pow % 2 == 0)
    }

    pub fn is_odd_in_x(&self) -> bool {
        self.terms.keys().all(|m| m.x_pow % 2 == 1)
    }

    pub fn is_even_in_p(&self) -> bool {
        self.terms.keys().all(|m| m.p_pow % 2 == 0)
    }

    pub fn is_odd_in_p(&self) -> bool {
        self.terms.keys().all(|m| m.p_pow % 2 == 1)
    }

    /// Invariance under the joint reflection (x, p) → (−x, −p).
    pub fn is_even_under_full_reflection(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() % 2 == 0)
    }

    pub fn has_negative_lambda_power(&self) -> bool {
        self.terms.values().any(|c| c.has_negative_power())
    }

    /// λ → 0 limit; `Err` when any term carries a negative λ-power.
    pub fn classical_part(&self) -> Result<Self, LambdaError> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let v = c.classical_part()?;
            out.add_term(m.x_pow, m.p_pow, LambdaCoefficient::constant(v));
        }
        Ok(out)
    }

    pub fn partial_x(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.x_pow > 0 {
                out.add_term(
                    m.x_pow - 1,
                    m.p_pow,
                    c.scale(&GaussianRational::from_integer(m.x_pow as i64)),
                );
            }
        }
        out
    }

    pub fn partial_p(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.p_pow > 0 {
                out.add_term(
                    m.x_pow,
                    m.p_pow - 1,
                    c.scale(&GaussianRational::from_integer(m.p_pow as i64)),
                );
            }
        }
        out
    }

    /// Numeric evaluation; requires all λ-powers to be zero and all
    /// coefficients real.
    pub fn eval(&self, x: f64, p: f64) -> f64 {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let (re, _) = c.coefficient(0).to_f64();
            total += re * x.powi(m.x_pow as i32) * p.powi(m.p_pow as i32);
        }
        total
    }

    /// Inverse Weyl map: the unique normal-ordered operator whose Weyl symbol
    /// equals this polynomial.
    ///
    /// Works by triangular back-substitution: the symbol of X^a P^b is
    /// x^a p^b plus strictly lower-degree corrections, so stripping maximal
    /// terms one at a time terminates.
    pub fn quantize(&self) -> crate::weyl::WeylOperator {
        let mut remaining = self.clone();
        let mut out = crate::weyl::WeylOperator::zero();
        while let Some((&m, c)) = remaining.terms.iter().next_back() {
            let c = c.clone();
            let piece = crate::weyl::WeylOperator::from_term(m, c);
            remaining -= &piece.weyl_symbol();
            out += &piece;
        }
        out
    }

    pub fn canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            for (power, value) in c.iter() {
                parts.push(format!(
                    "({})*l^{}*x^{}*p^{}",
                    value, power, m.x_pow, m.p_pow
                ));
            }
        }
        parts.join(" + ")
    }
}

impl Add for PhaseSpacePolynomial {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += &rhs;
        self
    }
}

impl<'a> AddAssign<&'a PhaseSpacePolynomial> for PhaseSpacePolynomial {
    fn add_assign(&mut self, rhs: &'a PhaseSpacePolynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.x_pow, m.p_pow, c.clone());
        }
    }
}

impl Sub for PhaseSpacePolynomial {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= &rhs;
        self
    }
}

impl<'a> SubAssign<&'a PhaseSpacePolynomial> for PhaseSpacePolynomial {
    fn sub_assign(&mut self, rhs: &'a PhaseSpacePolynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.x_pow, m.p_pow, -c.clone());
        }
    }
}

impl Neg for PhaseSpacePolynomial {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<'a, 'b> Mul<&'b PhaseSpacePolynomial> for &'a PhaseSpacePolynomial {
    type Output = PhaseSpacePolynomial;
    fn mul(self, rhs: &'b PhaseSpacePolynomial) -> PhaseSpacePolynomial {
        let mut out = PhaseSpacePolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.x_pow + mb.x_pow, ma.p_pow + mb.p_pow, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for PhaseSpacePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}
