//! Equivalent Hermitian Hamiltonian, PDM decomposition, and physical
//! operators.
//!
//! With ρ = e^{−Q/2} the similarity h = ρHρ⁻¹ leaves only even ε-orders:
//! h⁽²⁾ = H₂ + ¼[H₁,Q₁] and h⁽⁴⁾ = ¼[H₁,Q₃] − (1/192)[[[H₁,Q₁],Q₁],Q₁].
//! Observables transform the other way: O_phys = ρ⁻¹Oρ.

use crate::gaussian::GaussianRational;
use crate::metric::{self, ProblemParams, SDecomposition, SolverError};
use crate::series::{bch_conjugate, EpsilonSeries, SeriesError};
use crate::weyl::WeylOperator;
use crate::xpoly::XPolynomial;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PdmError {
    #[error("operator contains P^{found}; a PDM split needs P-degree at most 2")]
    DegreeError { found: u32 },
    #[error("remainder after removing the kinetic part still contains P^{found}")]
    ResidualError { found: u32 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("physical operators are available through epsilon^3 only (requested {0})")]
    UnsupportedOrder(u32),
    #[error("pseudo-Hermiticity residual is meaningful through epsilon^4 only (requested {0})")]
    ResidualOrderTooHigh(u32),
    #[error("maxOrder must be 2 or 4 (got {0})")]
    BadMaxOrder(u32),
}

/// h⁽²⁾ = H₂ + ¼[H₁, Q₁].
pub fn h_order2(params: &ProblemParams, q1: &WeylOperator) -> WeylOperator {
    let quarter = GaussianRational::from_ratio(1, 4);
    params.h2() + params.h1().commutator(q1).scale_gaussian(&quarter)
}

/// h⁽⁴⁾ = ¼[H₁, Q₃] − (1/192)[[[H₁, Q₁], Q₁], Q₁].
pub fn h_order4(params: &ProblemParams, q1: &WeylOperator, q3: &WeylOperator) -> WeylOperator {
    let h1 = params.h1();
    let lead = h1.commutator(q3).scale_gaussian(&GaussianRational::from_ratio(1, 4));
    let triple = h1
        .commutator(q1)
        .commutator(q1)
        .commutator(q1)
        .scale_gaussian(&GaussianRational::from_ratio(-1, 192));
    lead + triple
}

/// Split of an order-ε² Hermitian correction into ½·P·M⁽²⁾(X)·P + V_eff⁽²⁾(X).
///
/// Both parts keep their λ-dependence; the reassembly is exact.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PdmDecomposition {
    mass_correction: WeylOperator,
    effective_potential: WeylOperator,
}

impl PdmDecomposition {
    pub fn mass_correction(&self) -> &WeylOperator {
        &self.mass_correction
    }

    pub fn effective_potential(&self) -> &WeylOperator {
        &self.effective_potential
    }

    /// A physical mass profile is even in X; an odd part flags an input that
    /// is not a parity-even kinetic correction.
    pub fn mass_is_even(&self) -> bool {
        self.mass_correction.iter().all(|(m, _)| m.x_pow % 2 == 0)
    }

    /// ½·P·M⁽²⁾·P + V_eff⁽²⁾ (must reproduce the input exactly).
    pub fn reassemble(&self) -> WeylOperator {
        kinetic_term(&self.mass_correction) + self.effective_potential.clone()
    }
}

fn kinetic_term(mass_correction: &WeylOperator) -> WeylOperator {
    WeylOperator::p()
        .multiply(mass_correction)
        .multiply(&WeylOperator::p())
        .scale_gaussian(&GaussianRational::from_ratio(1, 2))
}

pub fn extract_pdm(h2: &WeylOperator) -> Result<PdmDecomposition, PdmError> {
    let max_p = h2.max_p_pow();
    if max_p > 2 {
        return Err(PdmError::DegreeError { found: max_p });
    }
    // M⁽²⁾ = 2 × (polynomial coefficient of P²)
    let mut mass_correction = WeylOperator::zero();
    for (m, c) in h2.iter() {
        if m.p_pow == 2 {
            mass_correction.add_term(
                crate::weyl::Monomial::new(m.x_pow, 0),
                c.scale(&GaussianRational::from_integer(2)),
            );
        }
    }
    let effective_potential = h2.clone() - kinetic_term(&mass_correction);
    let leftover_p = effective_potential.max_p_pow();
    if leftover_p > 0 {
        return Err(PdmError::ResidualError { found: leftover_p });
    }
    Ok(PdmDecomposition {
        mass_correction,
        effective_potential,
    })
}

/// W_k = Σ_{j≥k+1} C(j,k)·S_j·d^{j−k}V⁽ⁱ⁾/dX^{j−k} with V⁽ⁱ⁾ = βX³ (λ=1).
pub fn w_functions(s: &SDecomposition, params: &ProblemParams) -> Vec<XPolynomial> {
    let v_imag = params.v_imag_poly();
    let max_k = 4usize;
    let mut out = Vec::with_capacity(max_k + 1);
    for k in 0..=max_k as u32 {
        let mut w = XPolynomial::zero();
        for j in (k + 1)..=3u32 {
            let c = GaussianRational::real(metric::binomial(j, k));
            w += (s.s(j as usize) * &v_imag.nth_derivative(j - k)).scale(&c);
        }
        out.push(w);
    }
    out
}

/// Residuals of the ladder identities tying the W_k to the PDM split at λ=1:
/// W₀ + 4(V_eff⁽²⁾ + V₂), W₁ − 2 dM⁽²⁾/dX, W₂ − 2M⁽²⁾, and W_k for k ≥ 3.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WRelationReport {
    pub residuals: Vec<XPolynomial>,
}

impl WRelationReport {
    pub fn all_zero(&self) -> bool {
        self.residuals.iter().all(XPolynomial::is_zero)
    }
}

pub fn verify_w_relations(params: &ProblemParams) -> Result<WRelationReport, EquivalenceError> {
    let one = BigRational::from_integer(1.into());
    let q1 = metric::solve_q1(params)?;
    let q1_at_one = q1.substitute_lambda(&one).expect("Q1 is regular at lambda = 1");
    let s = metric::s_decomposition(&q1_at_one).expect("Q1 stops at P^3");
    let w = w_functions(&s, params);

    let pdm = extract_pdm(&h_order2(params, &q1)).expect("h2 has P-degree 2");
    let m2 = XPolynomial::from_operator(&pdm.mass_correction().substitute_lambda(&one).unwrap())
        .expect("mass correction is P-free");
    let veff2 =
        XPolynomial::from_operator(&pdm.effective_potential().substitute_lambda(&one).unwrap())
            .expect("effective potential is P-free");
    let v2 = XPolynomial::monomial(4, GaussianRational::real(params.gamma().clone()));

    let four = GaussianRational::from_integer(4);
    let two = GaussianRational::from_integer(2);
    let mut residuals = vec![
        w[0].clone() + (veff2 + v2).scale(&four),
        w[1].clone() - m2.derivative().scale(&two),
        w[2].clone() - m2.scale(&two),
    ];
    for w_k in w.iter().skip(3) {
        residuals.push(w_k.clone());
    }
    Ok(WRelationReport { residuals })
}

/// x_phys = ρ⁻¹ X ρ = e^{Q/2} X e^{−Q/2}, expanded through `order` ≤ 3.
pub fn physical_position(q: &EpsilonSeries, order: u32) -> Result<EpsilonSeries, EquivalenceError> {
    physical_operator(WeylOperator::x(), q, order)
}

/// p_phys = ρ⁻¹ P ρ, expanded through `order` ≤ 3.
pub fn physical_momentum(q: &EpsilonSeries, order: u32) -> Result<EpsilonSeries, EquivalenceError> {
    physical_operator(WeylOperator::p(), q, order)
}

fn physical_operator(
    op: WeylOperator,
    q: &EpsilonSeries,
    order: u32,
) -> Result<EpsilonSeries, EquivalenceError> {
    if order > 3 {
        return Err(EquivalenceError::UnsupportedOrder(order));
    }
    let mut base = EpsilonSeries::zero(q.truncation_order().max(order));
    base.set_order(0, op);
    let half = BigRational::new(1.into(), 2.into());
    Ok(bch_conjugate(&base, q, &half, order)?)
}

/// adjoint(H) − e^{−Q} H e^{Q}, order by order: the defect of
/// H† = η₊ H η₊⁻¹ for η₊ = e^{−Q}. Zero through ε⁴ when Q = εQ₁ + ε³Q₃.
pub fn pseudo_hermiticity_residual(
    h: &EpsilonSeries,
    q: &EpsilonSeries,
    order: u32,
) -> Result<EpsilonSeries, EquivalenceError> {
    if order > 4 {
        return Err(EquivalenceError::ResidualOrderTooHigh(order));
    }
    let minus_q = q.clone().neg();
    let conjugated = bch_conjugate(h, &minus_q, &BigRational::from_integer(1.into()), order)?;
    let mut adj = EpsilonSeries::zero(order);
    for (&k, op) in h.iter() {
        if k <= order {
            adj.set_order(k, op.adjoint());
        }
    }
    Ok(adj.sub(&conjugated))
}

/// Full pipeline: solve the metric generators and conjugate,
/// h = e^{−Q/2} H e^{Q/2}, truncated at `max_order` ∈ {2, 4}.
pub fn assemble_h(params: &ProblemParams, max_order: u32) -> Result<EpsilonSeries, EquivalenceError> {
    if max_order != 2 && max_order != 4 {
        return Err(EquivalenceError::BadMaxOrder(max_order));
    }
    let q1 = metric::solve_q1(params)?;
    let mut q = EpsilonSeries::zero(max_order);
    q.set_order(1, q1.clone());
    if max_order == 4 {
        q.set_order(3, metric::solve_q3(params, &q1)?);
    }
    let h = metric::build_hamiltonian(params);
    let minus_half = BigRational::new((-1).into(), 2.into());
    let result = bch_conjugate(&h, &q, &minus_half, max_order)?;

    for (&k, op) in result.iter() {
        assert!(k % 2 == 0, "odd epsilon order {k} survived the conjugation");
        assert!(op.is_hermitian(), "epsilon^{k} component is not Hermitian");
        assert!(
            !op.has_negative_lambda_power(),
            "epsilon^{k} component carries a negative lambda power"
        );
    }
    Ok(result)
}

/// Sign class of the effective quartic coupling (3β² − 4αγ)/(4α).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QuarticClass {
    Attractive,
    Null,
    Repulsive,
}

impl std::fmt::Display for QuarticClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuarticClass::Attractive => write!(f, "attractive"),
            QuarticClass::Null => write!(f, "null"),
            QuarticClass::Repulsive => write!(f, "repulsive"),
        }
    }
}

/// Trichotomy on the sign of the discriminant 3β² − 4αγ.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuarticClassification {
    pub class: QuarticClass,
    pub discriminant: BigRational,
}

pub fn classify_quartic(params: &ProblemParams) -> QuarticClassification {
    let three = BigRational::from_integer(3.into());
    let four = BigRational::from_integer(4.into());
    let discriminant = three * params.beta() * params.beta() - four * params.alpha() * params.gamma();
    let class = if discriminant.is_positive() {
        QuarticClass::Attractive
    } else if discriminant.is_zero() {
        QuarticClass::Null
    } else {
        QuarticClass::Repulsive
    };
    QuarticClassification { class, discriminant }
}
