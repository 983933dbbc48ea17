//! Classical limit and point-particle dynamics.
//!
//! The classical Hamiltonian is the λ → 0 limit of the Weyl symbol of the
//! equivalent Hermitian series, kept ε-graded until numeric evaluation.
//! Trajectories are integrated with the implicit midpoint rule, which is
//! symplectic and keeps the energy spread bounded.

use crate::equivalence::{classify_quartic, QuarticClassification};
use crate::gaussian::rational_to_f64;
use crate::lambda::LambdaError;
use crate::metric::ProblemParams;
use crate::series::EpsilonSeries;
use crate::symbol::PhaseSpacePolynomial;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassicalError {
    /// A λ⁻¹ survived into the input: no ħ → 0 limit exists.
    #[error("negative lambda power: input has no classical limit (lambda^{power})")]
    NegativeLambda { power: i64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlowError {
    #[error("implicit-midpoint fixed point failed to converge at step {step}")]
    NonConvergence { step: usize },
    #[error("step size must be nonzero")]
    ZeroStep,
    #[error("at least one step is required")]
    NoSteps,
}

/// ε-graded polynomial in commuting (x, p) with every λ-power equal to zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassicalHamiltonian {
    orders: BTreeMap<u32, PhaseSpacePolynomial>,
}

impl ClassicalHamiltonian {
    pub fn from_orders<I: IntoIterator<Item = (u32, PhaseSpacePolynomial)>>(orders: I) -> Self {
        let mut map = BTreeMap::new();
        for (k, poly) in orders {
            assert!(
                !poly.has_negative_lambda_power()
                    && poly.iter().all(|(_, c)| c.iter().all(|(&p, _)| p == 0)),
                "classical order must be free of lambda"
            );
            if !poly.is_zero() {
                map.insert(k, poly);
            }
        }
        Self { orders: map }
    }

    pub fn order(&self, power: u32) -> PhaseSpacePolynomial {
        self.orders.get(&power).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &PhaseSpacePolynomial)> {
        self.orders.iter()
    }

    pub fn is_even_under_full_reflection(&self) -> bool {
        self.orders.values().all(PhaseSpacePolynomial::is_even_under_full_reflection)
    }

    /// Collapse the ε-grading at a numeric ε.
    pub fn at_epsilon(&self, epsilon: f64) -> NumericHamiltonian {
        let mut terms = Vec::new();
        for (&k, poly) in &self.orders {
            let weight = epsilon.powi(k as i32);
            for (m, c) in poly.iter() {
                let coefficient = c.coefficient(0);
                terms.push(NumericTerm {
                    x_pow: m.x_pow as i32,
                    p_pow: m.p_pow as i32,
                    value: rational_to_f64(&coefficient.re) * weight,
                });
            }
        }
        NumericHamiltonian { terms }
    }
}

/// λ → 0 of the Weyl symbol, order by ε-order.
pub fn classical_hamiltonian(h: &EpsilonSeries) -> Result<ClassicalHamiltonian, ClassicalError> {
    let mut orders = BTreeMap::new();
    for (&k, op) in h.iter() {
        for (_, c) in op.iter() {
            if let Some(power) = c.min_power() {
                if power < 0 {
                    return Err(ClassicalError::NegativeLambda { power });
                }
            }
        }
        let symbol = op.weyl_symbol();
        let classical = symbol.classical_part().map_err(|e| match e {
            LambdaError::ZeroWithNegativePower { power } => ClassicalError::NegativeLambda { power },
        })?;
        if !classical.is_zero() {
            orders.insert(k, classical);
        }
    }
    Ok(ClassicalHamiltonian { orders })
}

/// Flattened f64 polynomial with its partial derivatives, for integration.
#[derive(Clone, Debug)]
pub struct NumericHamiltonian {
    terms: Vec<NumericTerm>,
}

#[derive(Clone, Copy, Debug)]
struct NumericTerm {
    x_pow: i32,
    p_pow: i32,
    value: f64,
}

impl NumericHamiltonian {
    pub fn eval(&self, x: f64, p: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.value * x.powi(t.x_pow) * p.powi(t.p_pow))
            .sum()
    }

    fn d_dx(&self, x: f64, p: f64) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.x_pow > 0)
            .map(|t| t.value * t.x_pow as f64 * x.powi(t.x_pow - 1) * p.powi(t.p_pow))
            .sum()
    }

    fn d_dp(&self, x: f64, p: f64) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.p_pow > 0)
            .map(|t| t.value * t.p_pow as f64 * x.powi(t.x_pow) * p.powi(t.p_pow - 1))
            .sum()
    }
}

/// Position-dependent mass profile m(x) = 1/(1 + 3ε²β²x²/(2α²)) with its
/// quadratic approximation and the quartic-strength classification.
#[derive(Clone, Debug)]
pub struct MassProfile {
    curvature: f64,
    pub classification: QuarticClassification,
}

impl MassProfile {
    pub fn mass_at(&self, x: f64) -> f64 {
        1.0 / (1.0 + self.curvature * x * x)
    }

    pub fn quadratic_approx_at(&self, x: f64) -> f64 {
        1.0 - self.curvature * x * x
    }

    /// |m(x) − approx(x)| ≤ C·ε⁴x⁴ with C = (3β²/(2α²))²; this returns the
    /// curvature 3ε²β²/(2α²) from which C·ε⁴ is the square.
    pub fn curvature(&self) -> f64 {
        self.curvature
    }
}

pub fn pdm_mass_profile(params: &ProblemParams, epsilon: f64) -> MassProfile {
    assert!(epsilon >= 0.0, "epsilon must be nonnegative");
    let a = rational_to_f64(params.alpha());
    let b = rational_to_f64(params.beta());
    MassProfile {
        curvature: 1.5 * epsilon * epsilon * b * b / (a * a),
        classification: classify_quartic(params),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub p: f64,
    pub h: f64,
}

/// Integration record: strictly increasing times, energy recomputed from the
/// Hamiltonian at every state.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub points: Vec<TrajectoryPoint>,
    pub step_size: f64,
    pub method: &'static str,
}

impl TrajectoryRecord {
    pub fn last_state(&self) -> (f64, f64) {
        let last = self.points.last().expect("trajectory has at least the initial point");
        (last.x, last.p)
    }

    /// (max H − min H) / max(|H₀|, 1e−300).
    pub fn energy_drift(&self) -> f64 {
        let h0 = self.points[0].h;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for pt in &self.points {
            min = min.min(pt.h);
            max = max.max(pt.h);
        }
        (max - min) / h0.abs().max(1e-300)
    }
}

/// Implicit midpoint: z' = z + dt·f((z + z')/2) with f = (∂H/∂p, −∂H/∂x),
/// solved per step by fixed-point iteration (tolerance 1e−13, 50 iterations).
pub fn hamiltonian_flow(
    hc: &ClassicalHamiltonian,
    epsilon: f64,
    state0: (f64, f64),
    dt: f64,
    steps: usize,
) -> Result<TrajectoryRecord, FlowError> {
    if dt == 0.0 {
        return Err(FlowError::ZeroStep);
    }
    if steps == 0 {
        return Err(FlowError::NoSteps);
    }
    let h = hc.at_epsilon(epsilon);
    let (mut x, mut p) = state0;
    let mut points = Vec::with_capacity(steps + 1);
    points.push(TrajectoryPoint { t: 0.0, x, p, h: h.eval(x, p) });

    const TOLERANCE: f64 = 1e-13;
    const MAX_ITERATIONS: usize = 50;
    const POLISH: usize = 2;

    for step in 0..steps {
        let mut xn = x;
        let mut pn = p;
        let mut converged = false;
        let mut polish_left = POLISH;
        for _ in 0..(MAX_ITERATIONS + POLISH) {
            let mx = 0.5 * (x + xn);
            let mp = 0.5 * (p + pn);
            let x_next = x + dt * h.d_dp(mx, mp);
            let p_next = p - dt * h.d_dx(mx, mp);
            let delta = (x_next - xn).abs().max((p_next - pn).abs());
            xn = x_next;
            pn = p_next;
            if !delta.is_finite() {
                return Err(FlowError::NonConvergence { step });
            }
            if delta <= TOLERANCE {
                if polish_left == 0 {
                    converged = true;
                    break;
                }
                polish_left -= 1;
            }
        }
        if !converged {
            return Err(FlowError::NonConvergence { step });
        }
        x = xn;
        p = pn;
        points.push(TrajectoryPoint {
            t: (step + 1) as f64 * dt,
            x,
            p,
            h: h.eval(x, p),
        });
    }
    Ok(TrajectoryRecord {
        points,
        step_size: dt,
        method: "implicit-midpoint",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{assemble_h, QuarticClass};
    use crate::gaussian::GaussianRational;
    use crate::lambda::LambdaCoefficient;
    use crate::reference;
    use crate::weyl::WeylOperator;

    fn params(a: i64, b: i64, g: i64) -> ProblemParams {
        ProblemParams::from_integers(a, b, g).unwrap()
    }

    #[test]
    fn classical_limit_matches_reference() {
        for (a, b, g) in [(1i64, 1i64, 1i64), (2, 3, 1), (1, 2, 3)] {
            let p = params(a, b, g);
            let h = assemble_h(&p, 4).unwrap();
            let hc = classical_hamiltonian(&h).unwrap();
            assert_eq!(hc, reference::classical_hamiltonian(&p));
            assert!(hc.is_even_under_full_reflection());
        }
    }

    #[test]
    fn lambda_square_constant_present_in_h_absent_in_classical() {
        let p = params(1, 1, 1);
        let h = assemble_h(&p, 4).unwrap();
        // λ²-carrying constant −λ²β²/(2α²) sits in the ε² order of h...
        let constant = h.order(2).coefficient(0, 0);
        assert_eq!(
            constant.coefficient(2),
            GaussianRational::from_ratio(-1, 2)
        );
        // ...and is gone from the classical limit.
        let hc = classical_hamiltonian(&h).unwrap();
        assert!(hc.order(2).coefficient(0, 0).is_zero());
    }

    #[test]
    fn negative_lambda_is_rejected() {
        let mut h = EpsilonSeries::zero(2);
        h.set_order(
            0,
            WeylOperator::x().scale(&LambdaCoefficient::monomial(-1, GaussianRational::one())),
        );
        assert_eq!(
            classical_hamiltonian(&h),
            Err(ClassicalError::NegativeLambda { power: -1 })
        );
    }

    #[test]
    fn mass_profile_values() {
        let p = params(1, 2, 3);
        let profile = pdm_mass_profile(&p, 0.1);
        assert_eq!(profile.mass_at(0.0), 1.0);
        assert_eq!(profile.classification.class, QuarticClass::Null);
        // curvature = 3ε²β²/(2α²) = 3·0.01·4/2 = 0.06
        assert!((profile.curvature() - 0.06).abs() < 1e-15);
    }

    #[test]
    fn mass_profile_quadratic_error_bound() {
        // |m(x) − approx(x)| ≤ C·ε⁴x⁴ with C = (3β²/(2α²))² on |x| ≤ 1.
        let p = params(2, 3, 1);
        let eps = 0.3;
        let profile = pdm_mass_profile(&p, eps);
        let k = 1.5 * 9.0 / 4.0; // 3β²/(2α²)
        let c = k * k;
        let mut x = -1.0;
        while x <= 1.0 {
            let err = (profile.mass_at(x) - profile.quadratic_approx_at(x)).abs();
            assert!(err <= c * eps.powi(4) * x.powi(4) + 1e-15, "x = {x}: {err}");
            x += 0.01;
        }
    }

    #[test]
    fn harmonic_flow_tracks_cosine() {
        // ε = 0, α = 1/2 so ω = 1: x(t) = cos t from (1, 0).
        let p = ProblemParams::new(
            num_rational::BigRational::new(1.into(), 2.into()),
            num_rational::BigRational::from_integer(1.into()),
            num_rational::BigRational::from_integer(1.into()),
        )
        .unwrap();
        let h = assemble_h(&p, 4).unwrap();
        let hc = classical_hamiltonian(&h).unwrap();
        let record = hamiltonian_flow(&hc, 0.0, (1.0, 0.0), 1e-3, 10_000).unwrap();
        let mut max_err: f64 = 0.0;
        for pt in &record.points {
            max_err = max_err.max((pt.x - pt.t.cos()).abs());
        }
        assert!(max_err <= 1e-6, "max error {max_err}");
        assert!(record.energy_drift() <= 1e-10, "drift {}", record.energy_drift());
    }

    #[test]
    fn anharmonic_energy_drift_is_bounded() {
        let p = params(1, 1, 1);
        let hc = classical_hamiltonian(&assemble_h(&p, 4).unwrap()).unwrap();
        let record = hamiltonian_flow(&hc, 0.02, (1.0, 0.0), 1e-3, 10_000).unwrap();
        assert!(record.energy_drift() <= 1e-8, "drift {}", record.energy_drift());
    }

    #[test]
    fn flow_is_time_reversible() {
        let p = params(1, 1, 1);
        let hc = classical_hamiltonian(&assemble_h(&p, 4).unwrap()).unwrap();
        let forward = hamiltonian_flow(&hc, 0.02, (1.0, 0.0), 1e-3, 1000).unwrap();
        let (x1, p1) = forward.last_state();
        let backward = hamiltonian_flow(&hc, 0.02, (x1, p1), -1e-3, 1000).unwrap();
        let (x0, p0) = backward.last_state();
        assert!((x0 - 1.0).abs() <= 1e-10, "x returned to {x0}");
        assert!(p0.abs() <= 1e-10, "p returned to {p0}");
    }

    #[test]
    fn oversized_step_fails_to_converge() {
        // αλ... with α = 3 the fixed-point iteration matrix has spectral
        // radius (dt/2)·√(2α) > 1 at dt = 1: diverges at the first step.
        let p = params(3, 1, 1);
        let hc = classical_hamiltonian(&assemble_h(&p, 4).unwrap()).unwrap();
        let result = hamiltonian_flow(&hc, 0.005, (1.0, 0.0), 1.0, 10);
        assert!(matches!(result, Err(FlowError::NonConvergence { .. })));
    }

    #[test]
    fn pdm_identity_through_order2() {
        // ½(1 − ε²M⁽²⁾)p² + αx² + ε²(quartic) reproduces the ε⁰+ε² classical
        // orders exactly, as a polynomial identity.
        let p = params(2, 3, 1);
        let hc = classical_hamiltonian(&assemble_h(&p, 4).unwrap()).unwrap();

        // mass correction and quartic strength, as exact rationals at λ=1
        let m2 = reference::mass_correction(&p);
        let m2_symbol = m2.weyl_symbol();
        let half = GaussianRational::from_ratio(1, 2);

        // ε⁰: p²/2 + αx²
        let mut expected0 = PhaseSpacePolynomial::monomial(0, 2, LambdaCoefficient::constant(half.clone()));
        expected0.add_term(2, 0, LambdaCoefficient::constant(GaussianRational::real(p.alpha().clone())));
        assert_eq!(hc.order(0), expected0);

        // ε²: ½M⁽²⁾p² + (quartic coefficient)x⁴ — the PDM reading of the
        // inverse-mass expansion 1/m = 1 + ε²M⁽²⁾.
        let quartic = reference::effective_potential2(&p)
            .weyl_symbol()
            .classical_part()
            .unwrap();
        let expected2 = (&m2_symbol * &PhaseSpacePolynomial::monomial(0, 2, LambdaCoefficient::constant(half)))
            .classical_part()
            .unwrap()
            + quartic;
        assert_eq!(hc.order(2), expected2);
    }
}
