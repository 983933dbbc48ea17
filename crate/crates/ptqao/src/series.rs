//! ε-graded perturbation series of operators, truncated at a fixed order.

use crate::gaussian::GaussianRational;
use crate::weyl::WeylOperator;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Neg;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation-order mismatch: requested order {requested} exceeds truncation {available}")]
    TruncationMismatch { requested: u32, available: u32 },
    #[error("conjugation generator must contain odd ε-powers only (found ε^{power})")]
    EvenGeneratorPower { power: u32 },
}

/// Map from ε-power to operator; powers above `truncation_order` are
/// discarded by all arithmetic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EpsilonSeries {
    orders: BTreeMap<u32, WeylOperator>,
    truncation_order: u32,
}

impl EpsilonSeries {
    pub fn zero(truncation_order: u32) -> Self {
        Self {
            orders: BTreeMap::new(),
            truncation_order,
        }
    }

    pub fn truncation_order(&self) -> u32 {
        self.truncation_order
    }

    pub fn set_order(&mut self, power: u32, op: WeylOperator) {
        if power > self.truncation_order || op.is_zero() {
            self.orders.remove(&power);
        } else {
            self.orders.insert(power, op);
        }
    }

    pub fn add_to_order(&mut self, power: u32, op: &WeylOperator) {
        if power > self.truncation_order || op.is_zero() {
            return;
        }
        let entry = self.orders.entry(power).or_insert_with(WeylOperator::zero);
        *entry += op;
        if entry.is_zero() {
            self.orders.remove(&power);
        }
    }

    pub fn order(&self, power: u32) -> WeylOperator {
        self.orders.get(&power).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &WeylOperator)> {
        self.orders.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn lowest_power(&self) -> Option<u32> {
        self.orders.keys().next().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.truncation_order = self.truncation_order.min(other.truncation_order);
        out.orders.retain(|&k, _| k <= out.truncation_order);
        for (&k, op) in &other.orders {
            out.add_to_order(k, op);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.clone().neg())
    }

    pub fn neg(mut self) -> Self {
        for op in self.orders.values_mut() {
            *op = std::mem::take(op).neg();
        }
        self
    }

    pub fn scale_gaussian(&self, factor: &GaussianRational) -> Self {
        let mut out = Self::zero(self.truncation_order);
        for (&k, op) in &self.orders {
            out.set_order(k, op.scale_gaussian(factor));
        }
        out
    }

    /// Order-by-order Hermitian adjoint.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.truncation_order);
        for (&k, op) in &self.orders {
            out.set_order(k, op.adjoint());
        }
        out
    }

    /// Cauchy product, truncated.
    pub fn multiply(&self, other: &Self) -> Self {
        let trunc = self.truncation_order.min(other.truncation_order);
        let mut out = Self::zero(trunc);
        for (&ka, a) in &self.orders {
            for (&kb, b) in &other.orders {
                if ka + kb > trunc {
                    continue;
                }
                out.add_to_order(ka + kb, &a.multiply(b));
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.multiply(other).sub(&other.multiply(self))
    }

    pub fn substitute_lambda(&self, value: &BigRational) -> Result<Self, crate::lambda::LambdaError> {
        let mut out = Self::zero(self.truncation_order);
        for (&k, op) in &self.orders {
            out.set_order(k, op.substitute_lambda(value)?);
        }
        Ok(out)
    }
}

/// e^{sQ} H e^{−sQ} = Σ_n (s^n/n!)·ad_Q^n(H), truncated at ε^order.
///
/// `q` must contain odd ε-powers only; each application of ad_Q raises the
/// lowest surviving ε-power, so the sum terminates at n = order.
pub fn bch_conjugate(
    h: &EpsilonSeries,
    q: &EpsilonSeries,
    s: &BigRational,
    order: u32,
) -> Result<EpsilonSeries, SeriesError> {
    for (&k, _) in q.iter() {
        if k % 2 == 0 {
            return Err(SeriesError::EvenGeneratorPower { power: k });
        }
    }
    let available = h.truncation_order().min(q.truncation_order());
    if order > available {
        return Err(SeriesError::TruncationMismatch {
            requested: order,
            available,
        });
    }

    let mut result = EpsilonSeries::zero(order);
    let mut nested = h.clone();
    nested.truncation_order = order;
    nested.orders.retain(|&k, _| k <= order);

    let mut prefactor = BigRational::from_integer(1.into());
    for n in 0..=order {
        if n > 0 {
            prefactor *= s / BigRational::from_integer(n.into());
            nested = q.commutator(&nested);
            nested.truncation_order = order;
            nested.orders.retain(|&k, _| k <= order);
        }
        if nested.is_zero() {
            break;
        }
        let term = nested.scale_gaussian(&GaussianRational::real(prefactor.clone()));
        result = result.add(&term);
    }
    Ok(result)
}

impl fmt::Display for EpsilonSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 (truncated at epsilon^{})", self.truncation_order);
        }
        for (k, op) in &self.orders {
            writeln!(f, "epsilon^{}: {}", k, op.canonical_string())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianRational;

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sample_h() -> EpsilonSeries {
        let mut h = EpsilonSeries::zero(4);
        h.set_order(
            0,
            WeylOperator::p_pow(2).scale_gaussian(&GaussianRational::from_ratio(1, 2))
                + WeylOperator::x_pow(2),
        );
        h.set_order(1, WeylOperator::x_pow(3).scale_gaussian(&GaussianRational::i()));
        h.set_order(2, -WeylOperator::x_pow(4));
        h
    }

    fn sample_q() -> EpsilonSeries {
        let mut q = EpsilonSeries::zero(4);
        q.set_order(1, WeylOperator::x() * WeylOperator::p() + WeylOperator::p() * WeylOperator::x());
        q.set_order(3, WeylOperator::p_pow(3));
        q
    }

    #[test]
    fn identity_conjugation_at_s_zero() {
        let h = sample_h();
        let out = bch_conjugate(&h, &sample_q(), &BigRational::from_integer(0.into()), 4).unwrap();
        assert_eq!(out, h);
    }

    #[test]
    fn zero_generator_changes_nothing() {
        let h = sample_h();
        let out = bch_conjugate(&h, &EpsilonSeries::zero(4), &rational(-1, 2), 4).unwrap();
        assert_eq!(out, h);
    }

    #[test]
    fn conjugation_inverts_with_opposite_sign() {
        let h = sample_h();
        let q = sample_q();
        let there = bch_conjugate(&h, &q, &rational(-1, 2), 4).unwrap();
        let back = bch_conjugate(&there, &q, &rational(1, 2), 4).unwrap();
        let mut expected = h;
        expected.truncation_order = 4;
        assert_eq!(back, expected);
    }

    #[test]
    fn even_generator_is_rejected() {
        let mut q = EpsilonSeries::zero(4);
        q.set_order(2, WeylOperator::x());
        assert_eq!(
            bch_conjugate(&sample_h(), &q, &rational(1, 2), 4),
            Err(SeriesError::EvenGeneratorPower { power: 2 })
        );
    }

    #[test]
    fn order_above_truncation_is_rejected() {
        assert!(matches!(
            bch_conjugate(&sample_h(), &sample_q(), &rational(1, 2), 5),
            Err(SeriesError::TruncationMismatch { .. })
        ));
    }
}
