//! Laurent polynomials in the commutator parameter λ.
//!
//! λ stands in for ħ: `[X, P] = iλ`. Coefficients of operators and symbols
//! are elements of `Q(i)[λ, λ⁻¹]`, kept sparse over the λ-exponent.

use crate::gaussian::GaussianRational;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LambdaError {
    /// Substituting λ=0 into a term with a negative λ-power: the quantity has
    /// no ħ-free meaning.
    #[error("cannot substitute lambda = 0: term carries lambda^{power}")]
    ZeroWithNegativePower { power: i64 },
}

/// Sparse Laurent polynomial in λ; no zero values are stored and the empty
/// map is the zero element.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LambdaCoefficient {
    terms: BTreeMap<i64, GaussianRational>,
}

impl LambdaCoefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: GaussianRational) -> Self {
        Self::monomial(0, value)
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    /// `value * λ^power`.
    pub fn monomial(power: i64, value: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(power, value);
        }
        Self { terms }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::constant(GaussianRational::from_integer(n))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, power: i64) -> GaussianRational {
        self.terms.get(&power).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn min_power(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_power(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn has_negative_power(&self) -> bool {
        self.min_power().is_some_and(|p| p < 0)
    }

    pub fn add_term(&mut self, power: i64, value: GaussianRational) {
        if value.is_zero() {
            return;
        }
        let entry = self.terms.entry(power).or_insert_with(GaussianRational::zero);
        *entry += value;
        if entry.is_zero() {
            self.terms.remove(&power);
        }
    }

    pub fn conj(&self) -> Self {
        // λ is real: only the Gaussian-rational values conjugate.
        Self {
            terms: self.terms.iter().map(|(p, v)| (*p, v.conj())).collect(),
        }
    }

    pub fn scale(&self, factor: &GaussianRational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(p, v)| (*p, v * factor)).collect(),
        }
    }

    /// Multiply by λ^k.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(p, v)| (p + k, v.clone())).collect(),
        }
    }

    /// Collapse to a single Gaussian rational at λ = value.
    pub fn substitute(&self, value: &BigRational) -> Result<GaussianRational, LambdaError> {
        let mut total = GaussianRational::zero();
        for (&power, coeff) in &self.terms {
            if value.is_zero() {
                if power < 0 {
                    return Err(LambdaError::ZeroWithNegativePower { power });
                }
                if power == 0 {
                    total += coeff.clone();
                }
                continue;
            }
            let mut factor = BigRational::from_integer(1.into());
            for _ in 0..power.unsigned_abs() {
                factor *= value;
            }
            if power < 0 {
                factor = factor.recip();
            }
            total += coeff.scale_rational(&factor);
        }
        Ok(total)
    }

    /// Keep only the λ⁰ part; `Err` when a negative power is present.
    pub fn classical_part(&self) -> Result<GaussianRational, LambdaError> {
        if let Some(power) = self.min_power() {
            if power < 0 {
                return Err(LambdaError::ZeroWithNegativePower { power });
            }
        }
        Ok(self.coefficient(0))
    }
}

impl GaussianRational {
    pub(crate) fn scale_rational(&self, r: &BigRational) -> GaussianRational {
        GaussianRational::new(&self.re * r, &self.im * r)
    }
}

impl Add for LambdaCoefficient {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (p, v) in rhs.terms {
            self.add_term(p, v);
        }
        self
    }
}

impl<'a> AddAssign<&'a LambdaCoefficient> for LambdaCoefficient {
    fn add_assign(&mut self, rhs: &'a LambdaCoefficient) {
        for (p, v) in &rhs.terms {
            self.add_term(*p, v.clone());
        }
    }
}

impl Sub for LambdaCoefficient {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (p, v) in rhs.terms {
            self.add_term(p, -v);
        }
        self
    }
}

impl<'a> SubAssign<&'a LambdaCoefficient> for LambdaCoefficient {
    fn sub_assign(&mut self, rhs: &'a LambdaCoefficient) {
        for (p, v) in &rhs.terms {
            self.add_term(*p, -v.clone());
        }
    }
}

impl Neg for LambdaCoefficient {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(p, v)| (p, -v)).collect(),
        }
    }
}

impl<'a, 'b> Mul<&'b LambdaCoefficient> for &'a LambdaCoefficient {
    type Output = LambdaCoefficient;
    fn mul(self, rhs: &'b LambdaCoefficient) -> LambdaCoefficient {
        let mut out = LambdaCoefficient::zero();
        for (pa, va) in &self.terms {
            for (pb, vb) in &rhs.terms {
                out.add_term(pa + pb, va * vb);
            }
        }
        out
    }
}

impl Mul for LambdaCoefficient {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl fmt::Display for LambdaCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, v) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*l^{}", v, p)?;
        }
        Ok(())
    }
}
