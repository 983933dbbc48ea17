//! Polynomials in X alone with exact Gaussian-rational coefficients.
//!
//! Used by the λ=1 normal-form bookkeeping: the S_k coefficient functions,
//! their recursion residuals, and the W_k combinations.

use crate::gaussian::GaussianRational;
use crate::lambda::LambdaCoefficient;
use crate::weyl::{Monomial, WeylOperator};
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct XPolynomial {
    coeffs: BTreeMap<u32, GaussianRational>,
}

impl XPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(power: u32, coefficient: GaussianRational) -> Self {
        let mut out = Self::zero();
        out.add_term(power, coefficient);
        out
    }

    pub fn constant(value: GaussianRational) -> Self {
        Self::monomial(0, value)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, power: u32, coefficient: GaussianRational) {
        if coefficient.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(power).or_insert_with(GaussianRational::zero);
        *entry += coefficient;
        if entry.is_zero() {
            self.coeffs.remove(&power);
        }
    }

    pub fn coefficient(&self, power: u32) -> GaussianRational {
        self.coeffs.get(&power).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &GaussianRational)> {
        self.coeffs.iter()
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.keys().all(|p| p % 2 == 0)
    }

    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (&p, c) in &self.coeffs {
            if p > 0 {
                out.add_term(p - 1, c.scale_rational(&BigRational::from_integer(p.into())));
            }
        }
        out
    }

    pub fn nth_derivative(&self, n: u32) -> Self {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.derivative();
        }
        out
    }

    pub fn scale(&self, factor: &GaussianRational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(p, c)| (*p, c * factor)).collect(),
        }
    }

    /// Embed as a P-free operator with constant λ-coefficients.
    pub fn to_operator(&self) -> WeylOperator {
        let mut out = WeylOperator::zero();
        for (&p, c) in &self.coeffs {
            out.add_term(Monomial::new(p, 0), LambdaCoefficient::constant(c.clone()));
        }
        out
    }

    /// Read a P-free, λ⁰-only operator back into a plain polynomial.
    pub fn from_operator(op: &WeylOperator) -> Option<Self> {
        let mut out = Self::zero();
        for (m, c) in op.iter() {
            if m.p_pow != 0 {
                return None;
            }
            if c.iter().any(|(&power, _)| power != 0) {
                return None;
            }
            out.add_term(m.x_pow, c.coefficient(0));
        }
        Some(out)
    }
}

impl Add for XPolynomial {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (p, c) in rhs.coeffs {
            self.add_term(p, c);
        }
        self
    }
}

impl AddAssign for XPolynomial {
    fn add_assign(&mut self, rhs: Self) {
        for (p, c) in rhs.coeffs {
            self.add_term(p, c);
        }
    }
}

impl Sub for XPolynomial {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (p, c) in rhs.coeffs {
            self.add_term(p, -c);
        }
        self
    }
}

impl Neg for XPolynomial {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            coeffs: self.coeffs.into_iter().map(|(p, c)| (p, -c)).collect(),
        }
    }
}

impl Mul for &XPolynomial {
    type Output = XPolynomial;
    fn mul(self, rhs: &XPolynomial) -> XPolynomial {
        let mut out = XPolynomial::zero();
        for (pa, ca) in &self.coeffs {
            for (pb, cb) in &rhs.coeffs {
                out.add_term(pa + pb, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for XPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .rev()
            .map(|(p, c)| format!("({})*X^{}", c, p))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
