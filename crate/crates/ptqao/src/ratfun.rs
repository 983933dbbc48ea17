//! Rational functions of λ over the Gaussian rationals.
//!
//! The homological solver eliminates over this field; solutions are converted
//! back to Laurent coefficients once the denominators have collapsed to pure
//! λ-powers.

use crate::gaussian::GaussianRational;
use crate::lambda::LambdaCoefficient;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Dense polynomial in λ, ascending exponents, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct LambdaPoly(Vec<GaussianRational>);

impl LambdaPoly {
    fn zero() -> Self {
        Self(Vec::new())
    }

    fn one() -> Self {
        Self(vec![GaussianRational::one()])
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(GaussianRational::is_zero) {
            self.0.pop();
        }
        self
    }

    fn leading(&self) -> &GaussianRational {
        self.0.last().expect("leading coefficient of zero polynomial")
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = vec![GaussianRational::zero(); self.0.len().max(other.0.len())];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c.clone();
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] += c.clone();
        }
        Self(out).trim()
    }

    fn neg(&self) -> Self {
        Self(self.0.iter().map(|c| -c.clone()).collect())
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![GaussianRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self(out).trim()
    }

    fn scale(&self, factor: &GaussianRational) -> Self {
        Self(self.0.iter().map(|c| c * factor).collect()).trim()
    }

    /// Euclidean division remainder.
    fn rem(&self, divisor: &Self) -> Self {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut r = self.clone().trim();
        let d = divisor.degree();
        let lead_inv = divisor.leading().inverse();
        while !r.is_zero() && r.degree() >= d {
            let shift = r.degree() - d;
            let factor = r.leading() * &lead_inv;
            for (j, b) in divisor.0.iter().enumerate() {
                let delta = b * &factor;
                r.0[j + shift] -= delta;
            }
            r = r.trim();
        }
        r
    }

    /// Exact quotient (panics when not divisible; only used after gcd).
    fn div_exact(&self, divisor: &Self) -> Self {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Self::zero();
        }
        let mut r = self.clone();
        let d = divisor.degree();
        let lead_inv = divisor.leading().inverse();
        let mut q = vec![GaussianRational::zero(); self.degree().saturating_sub(d) + 1];
        while !r.is_zero() && r.degree() >= d {
            let shift = r.degree() - d;
            let factor = r.leading() * &lead_inv;
            q[shift] = factor.clone();
            for (j, b) in divisor.0.iter().enumerate() {
                let delta = b * &factor;
                r.0[j + shift] -= delta;
            }
            r = r.trim();
        }
        assert!(r.is_zero(), "polynomial division left a remainder");
        Self(q).trim()
    }

    fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone().trim();
        let mut b = other.clone().trim();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        // monic normalization
        let inv = a.leading().inverse();
        a.scale(&inv)
    }

    /// Number of leading zero coefficients at λ⁰ (the λ^k factor).
    fn low_order(&self) -> usize {
        self.0.iter().take_while(|c| c.is_zero()).count()
    }
}

/// Fraction num/den of polynomials in λ with an extra λ^shift factor, kept in
/// reduced form with a monic denominator whose constant term is nonzero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct RationalFunction {
    num: LambdaPoly,
    den: LambdaPoly,
    shift: i64,
}

impl RationalFunction {
    pub fn zero() -> Self {
        Self {
            num: LambdaPoly::zero(),
            den: LambdaPoly::one(),
            shift: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            num: LambdaPoly::one(),
            den: LambdaPoly::one(),
            shift: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn from_lambda(coefficient: &LambdaCoefficient) -> Self {
        if coefficient.is_zero() {
            return Self::zero();
        }
        let min = coefficient.min_power().unwrap();
        let max = coefficient.max_power().unwrap();
        let mut coeffs = vec![GaussianRational::zero(); (max - min + 1) as usize];
        for (&p, v) in coefficient.iter() {
            coeffs[(p - min) as usize] = v.clone();
        }
        Self {
            num: LambdaPoly(coeffs).trim(),
            den: LambdaPoly::one(),
            shift: min,
        }
        .normalize()
    }

    /// Back to a Laurent coefficient; valid only when the reduced denominator
    /// is trivial.
    pub fn to_lambda(&self) -> Option<LambdaCoefficient> {
        if self.is_zero() {
            return Some(LambdaCoefficient::zero());
        }
        if self.den != LambdaPoly::one() {
            return None;
        }
        let mut out = LambdaCoefficient::zero();
        for (i, c) in self.num.0.iter().enumerate() {
            out.add_term(self.shift + i as i64, c.clone());
        }
        Some(out)
    }

    fn normalize(mut self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        // pull λ^k factors out of both parts
        let nl = self.num.low_order();
        if nl > 0 {
            self.num.0.drain(..nl);
            self.shift += nl as i64;
        }
        let dl = self.den.low_order();
        if dl > 0 {
            self.den.0.drain(..dl);
            self.shift -= dl as i64;
        }
        let g = self.num.gcd(&self.den);
        if !g.is_zero() && g.degree() > 0 {
            self.num = self.num.div_exact(&g);
            self.den = self.den.div_exact(&g);
        }
        // monic denominator
        let lead = self.den.leading().clone();
        if lead != GaussianRational::one() {
            let inv = lead.inverse();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
        self
    }

    pub fn inverse(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero rational function");
        Self {
            num: self.den.clone(),
            den: self.num.clone(),
            shift: -self.shift,
        }
        .normalize()
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        // align the λ^shift factors
        let shift = self.shift.min(rhs.shift);
        let lift = |rf: &RationalFunction| -> LambdaPoly {
            let extra = (rf.shift - shift) as usize;
            let mut coeffs = vec![GaussianRational::zero(); extra];
            coeffs.extend(rf.num.0.iter().cloned());
            LambdaPoly(coeffs)
        };
        let num = lift(self).mul(&rhs.den).add(&lift(rhs).mul(&self.den));
        RationalFunction {
            num,
            den: self.den.mul(&rhs.den),
            shift,
        }
        .normalize()
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &-rhs.clone()
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den,
            shift: self.shift,
        }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction {
            num: self.num.mul(&rhs.num),
            den: self.den.mul(&rhs.den),
            shift: self.shift + rhs.shift,
        }
        .normalize()
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self * &rhs.inverse()
    }
}
