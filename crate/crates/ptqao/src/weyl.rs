//! Normal-ordered noncommutative polynomials in X and P with `[X, P] = iλ`.
//!
//! Every operator is stored in the canonical form Σ c_{a,b}(λ) X^a P^b with
//! all X factors to the left of all P factors, so equality is structural.

use crate::gaussian::GaussianRational;
use crate::lambda::{LambdaCoefficient, LambdaError};
use crate::symbol::PhaseSpacePolynomial;
use num_rational::BigRational;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// The normal-ordered word X^xPow P^pPow.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    pub x_pow: u32,
    pub p_pow: u32,
}

impl Monomial {
    pub const fn new(x_pow: u32, p_pow: u32) -> Self {
        Self { x_pow, p_pow }
    }

    pub const fn unit() -> Self {
        Self::new(0, 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.x_pow + self.p_pow
    }
}

/// Ascending by (total degree, x power); reverse iteration gives the
/// canonical serialization order (total degree desc, x power desc).
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.total_degree(), self.x_pow).cmp(&(other.total_degree(), other.x_pow))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Normal-ordered operator: sparse map from monomial to λ-coefficient.
/// No zero coefficients are stored; the empty map is the zero operator.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct WeylOperator {
    terms: BTreeMap<Monomial, LambdaCoefficient>,
}

/// k! * C(m, k) * C(n, k) as an exact rational.
fn reordering_weight(m: u32, n: u32, k: u32) -> BigRational {
    let mut value = BigRational::from_integer(1.into());
    // k! * C(m,k) * C(n,k) = [m!/(m-k)!] * [n!/(n-k)!] / k!
    for j in 0..k {
        value *= BigRational::from_integer((m - j).into());
        value *= BigRational::from_integer((n - j).into());
        value /= BigRational::from_integer((j + 1).into());
    }
    value
}

/// Normal-ordered expansion of the word P^pPow X^xPow:
/// P^m X^n = Σ_k k!·C(m,k)·C(n,k)·(−iλ)^k · X^{n−k} P^{m−k}.
pub fn reorder(p_pow: u32, x_pow: u32) -> WeylOperator {
    let mut out = WeylOperator::zero();
    for k in 0..=p_pow.min(x_pow) {
        let weight = reordering_weight(p_pow, x_pow, k);
        // (−iλ)^k = (−i)^k λ^k
        let phase = GaussianRational::i_pow(-(k as i64)).scale_rational(&weight);
        out.add_term(
            Monomial::new(x_pow - k, p_pow - k),
            LambdaCoefficient::monomial(k as i64, phase),
        );
    }
    out
}

impl WeylOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_term(Monomial::unit(), LambdaCoefficient::one())
    }

    pub fn x() -> Self {
        Self::x_pow(1)
    }

    pub fn p() -> Self {
        Self::p_pow(1)
    }

    pub fn x_pow(n: u32) -> Self {
        Self::from_term(Monomial::new(n, 0), LambdaCoefficient::one())
    }

    pub fn p_pow(n: u32) -> Self {
        Self::from_term(Monomial::new(0, n), LambdaCoefficient::one())
    }

    pub fn from_term(monomial: Monomial, coefficient: LambdaCoefficient) -> Self {
        let mut op = Self::zero();
        op.add_term(monomial, coefficient);
        op
    }

    pub fn constant(value: GaussianRational) -> Self {
        Self::from_term(Monomial::unit(), LambdaCoefficient::constant(value))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, monomial: Monomial, coefficient: LambdaCoefficient) {
        if coefficient.is_zero() {
            return;
        }
        let entry = self.terms.entry(monomial).or_default();
        *entry += &coefficient;
        if entry.is_zero() {
            self.terms.remove(&monomial);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &LambdaCoefficient)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, x_pow: u32, p_pow: u32) -> LambdaCoefficient {
        self.terms
            .get(&Monomial::new(x_pow, p_pow))
            .cloned()
            .unwrap_or_default()
    }

    pub fn max_p_pow(&self) -> u32 {
        self.terms.keys().map(|m| m.p_pow).max().unwrap_or(0)
    }

    pub fn max_x_pow(&self) -> u32 {
        self.terms.keys().map(|m| m.x_pow).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn has_negative_lambda_power(&self) -> bool {
        self.terms.values().any(|c| c.has_negative_power())
    }

    pub fn scale(&self, factor: &LambdaCoefficient) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, c * factor);
        }
        out
    }

    pub fn scale_gaussian(&self, factor: &GaussianRational) -> Self {
        self.scale(&LambdaCoefficient::constant(factor.clone()))
    }

    pub fn scale_rational(&self, factor: &BigRational) -> Self {
        self.scale_gaussian(&GaussianRational::real(factor.clone()))
    }

    /// Canonical product; normal-orders the crossing P^b X^c factor.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let coeff = ca * cb;
                let crossing = reorder(ma.p_pow, mb.x_pow);
                for (mc, cc) in crossing.iter() {
                    out.add_term(
                        Monomial::new(ma.x_pow + mc.x_pow, mb.p_pow + mc.p_pow),
                        cc * &coeff,
                    );
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.multiply(other) - other.multiply(self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.multiply(other) + other.multiply(self)
    }

    /// Hermitian adjoint: conjugate coefficients (λ stays real), reverse each
    /// word to P^b X^a and renormal-order.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let conj = c.conj();
            for (mr, cr) in reorder(m.p_pow, m.x_pow).iter() {
                out.add_term(*mr, cr * &conj);
            }
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.adjoint() == *self
    }

    /// Combined parity + time reversal: c·X^a P^b ↦ conj(c)·(−1)^a·X^a P^b.
    pub fn pt_transform(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.conj();
            if m.x_pow % 2 == 1 {
                coeff = -coeff;
            }
            out.add_term(*m, coeff);
        }
        out
    }

    pub fn is_pt_symmetric(&self) -> bool {
        self.pt_transform() == *self
    }

    /// Weyl symbol: symbol(X^a P^b) = Σ_k C(a,k)·C(b,k)·k!·(iλ/2)^k x^{a−k} p^{b−k}.
    pub fn weyl_symbol(&self) -> PhaseSpacePolynomial {
        let mut out = PhaseSpacePolynomial::zero();
        for (m, c) in &self.terms {
            for k in 0..=m.x_pow.min(m.p_pow) {
                let weight = reordering_weight(m.x_pow, m.p_pow, k)
                    / BigRational::from_integer(num_bigint::BigInt::from(2).pow(k));
                let phase = GaussianRational::i_pow(k as i64).scale_rational(&weight);
                let factor = LambdaCoefficient::monomial(k as i64, phase);
                out.add_term(m.x_pow - k, m.p_pow - k, c * &factor);
            }
        }
        out
    }

    /// Collapse every λ-coefficient at λ = value.
    pub fn substitute_lambda(&self, value: &BigRational) -> Result<Self, LambdaError> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let v = c.substitute(value)?;
            out.add_term(*m, LambdaCoefficient::constant(v));
        }
        Ok(out)
    }

    /// Canonical text form; terms ordered by (total degree desc, x power desc,
    /// λ-power asc), one λ-power per printed term.
    pub fn canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            for (power, value) in c.iter() {
                parts.push(format!(
                    "({})*l^{}*X^{}*P^{}",
                    value, power, m.x_pow, m.p_pow
                ));
            }
        }
        parts.join(" + ")
    }
}

impl Add for WeylOperator {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<'a> Add<&'a WeylOperator> for WeylOperator {
    type Output = Self;
    fn add(mut self, rhs: &'a WeylOperator) -> Self {
        self += rhs;
        self
    }
}

impl<'a> AddAssign<&'a WeylOperator> for WeylOperator {
    fn add_assign(&mut self, rhs: &'a WeylOperator) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl Sub for WeylOperator {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl<'a> SubAssign<&'a WeylOperator> for WeylOperator {
    fn sub_assign(&mut self, rhs: &'a WeylOperator) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c.clone());
        }
    }
}

impl Neg for WeylOperator {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<'a, 'b> Mul<&'b WeylOperator> for &'a WeylOperator {
    type Output = WeylOperator;
    fn mul(self, rhs: &'b WeylOperator) -> WeylOperator {
        self.multiply(rhs)
    }
}

impl Mul for WeylOperator {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.multiply(&rhs)
    }
}

impl fmt::Display for WeylOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}
