//! Perturbative metric-operator solver.
//!
//! The generators Q₁ and Q₃ of the metric η₊ = e^{−Q} satisfy homological
//! equations [H₀, Q] = R with H₀ = P²/2 + αX². Each is solved here as one
//! exact linear system over rational functions of λ, in the basis of
//! Weyl-quantized monomials whose symbol is even in x and odd in p (the
//! constraint that fixes the kernel of [H₀, ·]).

use crate::gaussian::GaussianRational;
use crate::lambda::LambdaCoefficient;
use crate::ratfun::RationalFunction;
use crate::series::EpsilonSeries;
use crate::weyl::{Monomial, WeylOperator};
use crate::xpoly::XPolynomial;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamsError {
    #[error("alpha must be positive (got {0})")]
    NonPositiveAlpha(String),
    #[error("beta must be nonzero")]
    ZeroBeta,
    #[error("gamma must be nonnegative (got {0})")]
    NegativeGamma(String),
}

/// Dimensionless couplings of the quartic anharmonic problem:
/// H = P²/2 + αX² + ε·iβX³ − ε²·γX⁴.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProblemParams {
    alpha: BigRational,
    beta: BigRational,
    gamma: BigRational,
}

impl ProblemParams {
    pub fn new(alpha: BigRational, beta: BigRational, gamma: BigRational) -> Result<Self, ParamsError> {
        if !alpha.is_positive() {
            return Err(ParamsError::NonPositiveAlpha(alpha.to_string()));
        }
        if beta.is_zero() {
            return Err(ParamsError::ZeroBeta);
        }
        if gamma.is_negative() {
            return Err(ParamsError::NegativeGamma(gamma.to_string()));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn from_integers(alpha: i64, beta: i64, gamma: i64) -> Result<Self, ParamsError> {
        Self::new(
            BigRational::from_integer(alpha.into()),
            BigRational::from_integer(beta.into()),
            BigRational::from_integer(gamma.into()),
        )
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn gamma(&self) -> &BigRational {
        &self.gamma
    }

    /// P²/2 + αX²
    pub fn h0(&self) -> WeylOperator {
        WeylOperator::p_pow(2).scale_gaussian(&GaussianRational::from_ratio(1, 2))
            + WeylOperator::x_pow(2).scale_rational(&self.alpha)
    }

    /// iβX³
    pub fn h1(&self) -> WeylOperator {
        WeylOperator::x_pow(3).scale_gaussian(&GaussianRational::imaginary(self.beta.clone()))
    }

    /// −γX⁴
    pub fn h2(&self) -> WeylOperator {
        -WeylOperator::x_pow(4).scale_rational(&self.gamma)
    }

    /// γX⁴ (the real quartic potential before its sign in H)
    pub fn v2(&self) -> WeylOperator {
        WeylOperator::x_pow(4).scale_rational(&self.gamma)
    }

    /// βX³ as a plain polynomial (the odd potential multiplying i).
    pub fn v_imag_poly(&self) -> XPolynomial {
        XPolynomial::monomial(3, GaussianRational::real(self.beta.clone()))
    }

    /// αX² as a plain polynomial.
    pub fn v1_poly(&self) -> XPolynomial {
        XPolynomial::monomial(2, GaussianRational::real(self.alpha.clone()))
    }
}

/// H = H₀ + ε·iβX³ + ε²·(−γX⁴), truncated at ε⁴.
pub fn build_hamiltonian(params: &ProblemParams) -> EpsilonSeries {
    let mut h = EpsilonSeries::zero(4);
    h.set_order(0, params.h0());
    h.set_order(1, params.h1());
    h.set_order(2, params.h2());
    h
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    /// The right-hand side is not reachable from the constrained sector.
    #[error("inconsistent system: right-hand side is not in the image of the constrained commutator map")]
    InconsistentSystem,
    /// A kernel direction survives the parity constraints.
    #[error("ambiguous solution: nontrivial kernel survives the constraints")]
    AmbiguousSolution,
    /// Elimination produced a coefficient that is not a Laurent polynomial.
    #[error("solution coefficient is not a Laurent polynomial in lambda")]
    NonLaurentSolution,
}

/// One homological equation [H₀, Q] = R.
///
/// The solution is constrained to Hermitian operators whose Weyl symbol is
/// even in x and odd in p; `degree_bound` caps the total degree of the
/// candidate basis.
#[derive(Clone, Debug)]
pub struct HomologicalProblem {
    h0: WeylOperator,
    rhs: WeylOperator,
    degree_bound: u32,
}

impl HomologicalProblem {
    pub fn new(params: &ProblemParams, rhs: WeylOperator, degree_bound: u32) -> Self {
        Self {
            h0: params.h0(),
            rhs,
            degree_bound,
        }
    }

    pub fn rhs(&self) -> &WeylOperator {
        &self.rhs
    }
}

/// Basis of the constrained sector: Weyl quantizations of x^a p^b with
/// a even, b odd, a + b ≤ degree_bound.
fn constrained_basis(degree_bound: u32) -> Vec<(Monomial, WeylOperator)> {
    let mut basis = Vec::new();
    for total in 1..=degree_bound {
        for x_pow in (0..=total).step_by(2) {
            let p_pow = total - x_pow;
            if p_pow % 2 == 1 {
                let symbol = crate::symbol::PhaseSpacePolynomial::monomial(
                    x_pow,
                    p_pow,
                    LambdaCoefficient::one(),
                );
                basis.push((Monomial::new(x_pow, p_pow), symbol.quantize()));
            }
        }
    }
    basis
}

pub fn solve_homological(problem: &HomologicalProblem) -> Result<WeylOperator, SolverError> {
    if problem.rhs.is_zero() {
        return Ok(WeylOperator::zero());
    }

    let basis = constrained_basis(problem.degree_bound);
    let columns: Vec<WeylOperator> = basis
        .iter()
        .map(|(_, w)| problem.h0.commutator(w))
        .collect();

    // Row index: every monomial appearing in any column or in the RHS.
    let mut monomials: BTreeSet<Monomial> = BTreeSet::new();
    for col in &columns {
        monomials.extend(col.iter().map(|(m, _)| *m));
    }
    monomials.extend(problem.rhs.iter().map(|(m, _)| *m));
    let monomials: Vec<Monomial> = monomials.into_iter().collect();

    // Augmented matrix over Q(i)(λ).
    let n_rows = monomials.len();
    let n_cols = columns.len();
    let mut rows: Vec<Vec<RationalFunction>> = Vec::with_capacity(n_rows);
    for m in &monomials {
        let mut row: Vec<RationalFunction> = columns
            .iter()
            .map(|col| RationalFunction::from_lambda(&col.coefficient(m.x_pow, m.p_pow)))
            .collect();
        row.push(RationalFunction::from_lambda(
            &problem.rhs.coefficient(m.x_pow, m.p_pow),
        ));
        rows.push(row);
    }

    // Gauss-Jordan elimination.
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n_cols];
    let mut rank = 0usize;
    for col in 0..n_cols {
        let Some(pivot) = (rank..n_rows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].inverse();
        for entry in rows[rank].iter_mut() {
            *entry = &*entry * &inv;
        }
        for r in 0..n_rows {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..=n_cols {
                    let delta = &factor * &rows[rank][c];
                    rows[r][c] = &rows[r][c] - &delta;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }

    // Any leftover row with a nonzero right-hand side is unreachable.
    for r in rank..n_rows {
        if !rows[r][n_cols].is_zero() {
            return Err(SolverError::InconsistentSystem);
        }
    }
    if pivot_of_col.iter().any(Option::is_none) {
        return Err(SolverError::AmbiguousSolution);
    }

    let mut solution = WeylOperator::zero();
    for (col, (_, w)) in basis.iter().enumerate() {
        let value = rows[pivot_of_col[col].unwrap()][n_cols].clone();
        let coeff = value.to_lambda().ok_or(SolverError::NonLaurentSolution)?;
        if !coeff.is_zero() {
            solution += &w.scale(&coeff);
        }
    }

    // The basis elements are Hermitian, so a Hermitian solution exists only
    // when the solved coefficients are real; a complex-unique solution that
    // fails this had an unreachable Hermitian part in R.
    if !solution.is_hermitian() {
        return Err(SolverError::InconsistentSystem);
    }
    if problem.h0.commutator(&solution) != problem.rhs {
        return Err(SolverError::InconsistentSystem);
    }
    Ok(solution)
}

/// Solve [H₀, Q₁] = −2iβX³ with total degree ≤ 3.
pub fn solve_q1(params: &ProblemParams) -> Result<WeylOperator, SolverError> {
    solve_q1_with_sign(params, false)
}

/// Debug hook: `flip_sign` negates the right-hand side, which must break the
/// downstream golden checks.
pub fn solve_q1_with_sign(params: &ProblemParams, flip_sign: bool) -> Result<WeylOperator, SolverError> {
    let mut factor = GaussianRational::imaginary(-(params.beta.clone() + params.beta.clone()));
    if flip_sign {
        factor = -factor;
    }
    let rhs = WeylOperator::x_pow(3).scale_gaussian(&factor);
    let q1 = solve_homological(&HomologicalProblem::new(params, rhs, 3))?;
    assert!(q1.max_p_pow() <= 3, "Q1 must stop at P^3");
    Ok(q1)
}

/// Solve [H₀, Q₃] = −(1/6)[Q₁, [Q₁, iβX³]] − [Q₁, γX⁴] with total degree ≤ 5.
pub fn solve_q3(params: &ProblemParams, q1: &WeylOperator) -> Result<WeylOperator, SolverError> {
    let h1 = params.h1();
    let double = q1.commutator(&q1.commutator(&h1));
    let rhs = double.scale_gaussian(&GaussianRational::from_ratio(-1, 6))
        - q1.commutator(&params.v2());
    let q3 = solve_homological(&HomologicalProblem::new(params, rhs, 5))?;
    assert!(q3.max_p_pow() <= 5, "Q3 must stop at P^5");
    Ok(q3)
}

/// The metric generator Q = εQ₁ + ε³Q₃ as a series.
pub fn metric_generator(q1: &WeylOperator, q3: &WeylOperator, truncation: u32) -> EpsilonSeries {
    let mut q = EpsilonSeries::zero(truncation);
    q.set_order(1, q1.clone());
    q.set_order(3, q3.clone());
    q
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SDecompositionError {
    #[error("operator contains P^{found}; the normal form stops at P^3")]
    DegreeTooHigh { found: u32 },
    #[error("operator carries symbolic lambda; substitute lambda = 1 first")]
    SymbolicLambda,
}

/// Coefficient functions of the λ=1 normal form
/// Q₁ = −i·[S₀ + S₁ d/dX + S₂ d²/dX² + S₃ d³/dX³] with d/dX ↔ iP.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SDecomposition {
    s: [XPolynomial; 4],
}

impl SDecomposition {
    pub fn s(&self, k: usize) -> &XPolynomial {
        &self.s[k]
    }

    pub fn parts(&self) -> &[XPolynomial; 4] {
        &self.s
    }

    pub fn with_part(mut self, k: usize, value: XPolynomial) -> Self {
        self.s[k] = value;
        self
    }

    /// Reassemble the normal-ordered operator (exact round trip).
    pub fn to_operator(&self) -> WeylOperator {
        let mut out = WeylOperator::zero();
        for (k, s_k) in self.s.iter().enumerate() {
            // −i·(i)^k
            let factor = GaussianRational::i_pow(k as i64 + 3);
            out += &s_k
                .to_operator()
                .multiply(&WeylOperator::p_pow(k as u32))
                .scale_gaussian(&factor);
        }
        out
    }
}

/// Read the S_k off a λ=1 operator with P-degree at most 3.
pub fn s_decomposition(q1: &WeylOperator) -> Result<SDecomposition, SDecompositionError> {
    let max_p = q1.max_p_pow();
    if max_p > 3 {
        return Err(SDecompositionError::DegreeTooHigh { found: max_p });
    }
    let mut s: [XPolynomial; 4] = Default::default();
    for (m, c) in q1.iter() {
        if c.iter().any(|(&power, _)| power != 0) {
            return Err(SDecompositionError::SymbolicLambda);
        }
        // invert the −i·i^b prefactor: multiply by i^(1−b)
        let factor = GaussianRational::i_pow(1 - m.p_pow as i64);
        s[m.p_pow as usize].add_term(m.x_pow, &c.coefficient(0) * &factor);
    }
    Ok(SDecomposition { s })
}

/// Residuals of the coefficient recursion tying the S_k to the potentials:
///
/// k = 0:  ½S₀″ + Σ_{j≥1} S_j V₁^(j) + 2V^(i)
/// k ≥ 1:  ½S_k″ + S′_{k−1} + Σ_{j≥k+1} C(j,k) S_j V₁^(j−k)
///
/// All residuals vanish identically for a valid decomposition (λ=1).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SRecursionReport {
    pub residuals: Vec<XPolynomial>,
}

impl SRecursionReport {
    pub fn all_zero(&self) -> bool {
        self.residuals.iter().all(XPolynomial::is_zero)
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> BigRational {
    let mut value = BigRational::from_integer(1.into());
    for j in 0..k {
        value *= BigRational::from_integer((n - j).into());
        value /= BigRational::from_integer((j + 1).into());
    }
    value
}

pub fn verify_s_recursion(s: &SDecomposition, params: &ProblemParams) -> SRecursionReport {
    let v1 = params.v1_poly();
    let v_imag = params.v_imag_poly();
    let half = GaussianRational::from_ratio(1, 2);
    let two = GaussianRational::from_integer(2);

    let s_at = |k: usize| -> XPolynomial {
        if k < 4 {
            s.s(k).clone()
        } else {
            XPolynomial::zero()
        }
    };

    let mut residuals = Vec::new();
    // k = 0
    let mut r0 = s_at(0).nth_derivative(2).scale(&half);
    for j in 1..=3u32 {
        r0 += (&s_at(j as usize) * &v1.nth_derivative(j)).clone();
    }
    r0 += v_imag.scale(&two);
    residuals.push(r0);

    // k ≥ 1 (through k = 4 so a perturbed S₃ is caught everywhere)
    for k in 1..=4u32 {
        let mut r = s_at(k as usize).nth_derivative(2).scale(&half);
        r += s_at(k as usize - 1).derivative();
        for j in (k + 1)..=3u32 {
            let c = GaussianRational::real(binomial(j, k));
            r += (&s_at(j as usize) * &v1.nth_derivative(j - k)).scale(&c);
        }
        residuals.push(r);
    }
    SRecursionReport { residuals }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: i64, b: i64, g: i64) -> ProblemParams {
        ProblemParams::from_integers(a, b, g).unwrap()
    }

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// i(β/α)X − (β/(λα))X²P − (β/(3λα²))P³
    fn expected_q1(p: &ProblemParams) -> WeylOperator {
        let a = p.alpha();
        let b = p.beta();
        WeylOperator::x().scale_gaussian(&GaussianRational::imaginary(b / a))
            + WeylOperator::from_term(
                Monomial::new(2, 1),
                LambdaCoefficient::monomial(-1, GaussianRational::real(-(b / a))),
            )
            + WeylOperator::p_pow(3).scale(&LambdaCoefficient::monomial(
                -1,
                GaussianRational::real(-(b / (a * a * BigRational::from_integer(3.into())))),
            ))
    }

    #[test]
    fn hamiltonian_orders_match_construction() {
        let h = build_hamiltonian(&params(1, 1, 1));
        assert_eq!(
            h.order(0),
            WeylOperator::p_pow(2).scale_gaussian(&GaussianRational::from_ratio(1, 2))
                + WeylOperator::x_pow(2)
        );
        assert_eq!(h.order(1), WeylOperator::x_pow(3).scale_gaussian(&GaussianRational::i()));
        assert_eq!(h.order(2), -WeylOperator::x_pow(4));
    }

    #[test]
    fn hamiltonian_hermiticity_pattern_and_pt() {
        let h = build_hamiltonian(&params(2, 3, 5));
        assert!(h.order(0).is_hermitian());
        assert_eq!(h.order(1).adjoint(), -h.order(1));
        assert!(h.order(2).is_hermitian());
        for (_, op) in h.iter() {
            assert!(op.is_pt_symmetric());
        }
    }

    #[test]
    fn params_validation() {
        assert!(ProblemParams::from_integers(0, 1, 1).is_err());
        assert!(ProblemParams::from_integers(1, 0, 1).is_err());
        assert!(ProblemParams::new(rational(1, 2), rational(1, 3), rational(-1, 5)).is_err());
        assert!(ProblemParams::new(rational(1, 2), rational(-1, 3), rational(0, 1)).is_ok());
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let p = params(1, 1, 1);
        let problem = HomologicalProblem::new(&p, WeylOperator::zero(), 3);
        assert_eq!(solve_homological(&problem), Ok(WeylOperator::zero()));
    }

    #[test]
    fn q1_matches_closed_form() {
        for (a, b) in [(1, 1), (2, 3), (3, -2), (5, 7)] {
            let p = params(a, b, 1);
            let q1 = solve_q1(&p).unwrap();
            assert_eq!(q1, expected_q1(&p));
            assert!(q1.is_hermitian());
            assert!(q1.max_p_pow() <= 3);
        }
    }

    #[test]
    fn q1_weyl_symbol_parity() {
        let q1 = solve_q1(&params(2, 5, 1)).unwrap();
        let symbol = q1.weyl_symbol();
        assert!(symbol.is_even_in_x());
        assert!(symbol.is_odd_in_p());
    }

    #[test]
    fn wrong_sector_rhs_is_inconsistent() {
        // R = −iλP has symbol even in x, odd in p: unreachable.
        let p = params(1, 1, 1);
        let rhs = WeylOperator::p().scale(&LambdaCoefficient::monomial(1, -GaussianRational::i()));
        let problem = HomologicalProblem::new(&p, rhs, 3);
        assert_eq!(solve_homological(&problem), Err(SolverError::InconsistentSystem));
    }

    #[test]
    fn hermitian_rhs_is_inconsistent() {
        // [H₀, Hermitian] is anti-Hermitian, so a Hermitian R ≠ 0 in the right
        // parity sector still has no constrained solution.
        let p = params(1, 1, 1);
        let problem = HomologicalProblem::new(&p, WeylOperator::x_pow(3), 3);
        assert_eq!(solve_homological(&problem), Err(SolverError::InconsistentSystem));
    }

    #[test]
    fn q3_properties() {
        let p = params(1, 1, 1);
        let q1 = solve_q1(&p).unwrap();
        let q3 = solve_q3(&p, &q1).unwrap();
        assert!(q3.max_p_pow() <= 5);
        assert!(q3.is_hermitian());
        let symbol = q3.weyl_symbol();
        assert!(symbol.is_even_in_x());
        assert!(symbol.is_odd_in_p());
    }

    #[test]
    fn q3_nonzero_without_quartic_coupling() {
        let p = params(1, 1, 0);
        let q1 = solve_q1(&p).unwrap();
        let q3 = solve_q3(&p, &q1).unwrap();
        assert!(!q3.is_zero());
    }

    #[test]
    fn q1_commutator_identity_all_lambda() {
        let p = params(3, 2, 7);
        let q1 = solve_q1(&p).unwrap();
        let rhs = WeylOperator::x_pow(3)
            .scale_gaussian(&GaussianRational::imaginary(-(p.beta() + p.beta())));
        assert_eq!(p.h0().commutator(&q1), rhs);
    }

    #[test]
    fn s_values_match_at_lambda_one() {
        let p = params(1, 1, 1);
        let q1 = solve_q1(&p)
            .unwrap()
            .substitute_lambda(&BigRational::from_integer(1.into()))
            .unwrap();
        let s = s_decomposition(&q1).unwrap();
        assert_eq!(s.s(0), &XPolynomial::monomial(1, GaussianRational::from_integer(-1)));
        assert_eq!(s.s(1), &XPolynomial::monomial(2, GaussianRational::from_integer(-1)));
        assert_eq!(s.s(2), &XPolynomial::zero());
        assert_eq!(s.s(3), &XPolynomial::constant(GaussianRational::from_ratio(1, 3)));
        // round trip
        assert_eq!(s.to_operator(), q1);
    }

    #[test]
    fn s3_at_alpha_two_beta_three() {
        let p = params(2, 3, 0);
        let q1 = solve_q1(&p)
            .unwrap()
            .substitute_lambda(&BigRational::from_integer(1.into()))
            .unwrap();
        let s = s_decomposition(&q1).unwrap();
        // β/(3α²) = 3/12 = 1/4
        assert_eq!(s.s(3), &XPolynomial::constant(GaussianRational::from_ratio(1, 4)));
    }

    #[test]
    fn s_decomposition_rejects_high_degree() {
        let op = WeylOperator::p_pow(4);
        assert_eq!(
            s_decomposition(&op),
            Err(SDecompositionError::DegreeTooHigh { found: 4 })
        );
    }

    #[test]
    fn zero_operator_decomposes_to_zero() {
        let s = s_decomposition(&WeylOperator::zero()).unwrap();
        assert!(s.parts().iter().all(XPolynomial::is_zero));
    }

    #[test]
    fn recursion_residuals_vanish_for_solution() {
        for (a, b, g) in [(1i64, 1i64, 1i64), (2, 3, 1), (3, -1, 2)] {
            let p = params(a, b, g);
            let q1 = solve_q1(&p)
                .unwrap()
                .substitute_lambda(&BigRational::from_integer(1.into()))
                .unwrap();
            let s = s_decomposition(&q1).unwrap();
            let report = verify_s_recursion(&s, &p);
            assert!(report.all_zero(), "residuals: {:?}", report.residuals);
        }
    }

    #[test]
    fn perturbed_s3_breaks_k2_relation() {
        let p = params(1, 1, 1);
        let q1 = solve_q1(&p)
            .unwrap()
            .substitute_lambda(&BigRational::from_integer(1.into()))
            .unwrap();
        let s = s_decomposition(&q1).unwrap();
        let perturbed_s3 = s.s(3).clone() + XPolynomial::constant(GaussianRational::one());
        let perturbed = s.with_part(3, perturbed_s3);
        let report = verify_s_recursion(&perturbed, &p);
        assert!(!report.residuals[2].is_zero());
    }

    #[test]
    fn zero_s_keeps_forcing_term() {
        let p = params(1, 2, 1);
        let zero = SDecomposition::default();
        let report = verify_s_recursion(&zero, &p);
        // k = 0 residual is the forcing term 2βX³ alone.
        assert_eq!(
            report.residuals[0],
            XPolynomial::monomial(3, GaussianRational::from_integer(4))
        );
    }

    #[test]
    fn solver_output_is_reproducible() {
        let p = params(7, 5, 3);
        let q1a = solve_q1(&p).unwrap();
        let q1b = solve_q1(&p).unwrap();
        assert_eq!(q1a, q1b);
        assert_eq!(q1a, expected_q1(&p));
    }
}
