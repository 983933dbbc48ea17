//! Independently tabulated closed forms used by the verification suite.
//!
//! Everything here is written out term by term from the published
//! coefficient tables (dimensionless couplings, unit mass and length scale,
//! ħ carried as λ) rather than produced by the solver pipeline, so the two
//! routes cross-check each other.

use crate::classical::ClassicalHamiltonian;
use crate::gaussian::GaussianRational;
use crate::lambda::LambdaCoefficient;
use crate::metric::ProblemParams;
use crate::series::EpsilonSeries;
use crate::symbol::PhaseSpacePolynomial;
use crate::weyl::{Monomial, WeylOperator};
use crate::xpoly::XPolynomial;
use num_rational::BigRational;

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn real(r: BigRational) -> GaussianRational {
    GaussianRational::real(r)
}

fn imag(r: BigRational) -> GaussianRational {
    GaussianRational::imaginary(r)
}

fn anti(a: &WeylOperator, b: &WeylOperator) -> WeylOperator {
    a.anticommutator(b)
}

fn x(n: u32) -> WeylOperator {
    WeylOperator::x_pow(n)
}

fn p(n: u32) -> WeylOperator {
    WeylOperator::p_pow(n)
}

/// λ²·identity
fn lambda_sq() -> WeylOperator {
    WeylOperator::from_term(Monomial::unit(), LambdaCoefficient::monomial(2, GaussianRational::one()))
}

/// Q₁ = i(β/α)X − (β/(λα))X²P − (β/(3λα²))P³.
pub fn q1(params: &ProblemParams) -> WeylOperator {
    let a = params.alpha();
    let b = params.beta();
    x(1).scale_gaussian(&imag(b / a))
        + WeylOperator::from_term(
            Monomial::new(2, 1),
            LambdaCoefficient::monomial(-1, real(-(b / a))),
        )
        + p(3).scale(&LambdaCoefficient::monomial(-1, real(-(b / (a * a * int(3))))))
}

/// S₀ = −(β/α)X, S₁ = −(β/α)X², S₂ = 0, S₃ = β/(3α²) (λ=1 normal form).
pub fn s_values(params: &ProblemParams) -> [XPolynomial; 4] {
    let a = params.alpha();
    let b = params.beta();
    [
        XPolynomial::monomial(1, real(-(b / a))),
        XPolynomial::monomial(2, real(-(b / a))),
        XPolynomial::zero(),
        XPolynomial::constant(real(b / (a * a * int(3)))),
    ]
}

/// M⁽²⁾ = (3β²/(2α²))X².
pub fn mass_correction(params: &ProblemParams) -> WeylOperator {
    let a = params.alpha();
    let b = params.beta();
    x(2).scale_gaussian(&real(int(3) * b * b / (int(2) * a * a)))
}

/// V_eff⁽²⁾ = ((3β² − 4αγ)/(4α))X⁴ − λ²β²/(2α²).
pub fn effective_potential2(params: &ProblemParams) -> WeylOperator {
    let a = params.alpha();
    let b = params.beta();
    let g = params.gamma();
    let quartic = (int(3) * b * b - int(4) * a * g) / (int(4) * a);
    x(4).scale_gaussian(&real(quartic))
        - lambda_sq().scale_gaussian(&real(b * b / (int(2) * a * a)))
}

/// h⁽²⁾ = ½·P·M⁽²⁾·P + V_eff⁽²⁾.
pub fn hermitian_order2(params: &ProblemParams) -> WeylOperator {
    let kinetic = WeylOperator::p()
        .multiply(&mass_correction(params))
        .multiply(&WeylOperator::p())
        .scale_gaussian(&GaussianRational::from_ratio(1, 2));
    kinetic + effective_potential2(params)
}

/// The β⁴ group of h⁽⁴⁾:
/// (β⁴/(32α⁶))·(P⁶ − 18α{X²,P⁴} − (51α²/2){X⁴,P²} − 14α³X⁶
///              − 81λ²αP² − 138λ²α²X²).
pub fn hermitian_order4_beta4_family(params: &ProblemParams) -> WeylOperator {
    let a = params.alpha();
    let b = params.beta();
    let b2 = b * b;
    let prefactor = real(&b2 * &b2 / (int(32) * a * a * a * a * a * a));
    let inner = p(6)
        - anti(&x(2), &p(4)).scale_gaussian(&real(int(18) * a))
        - anti(&x(4), &p(2)).scale_gaussian(&real(int(51) * a * a / int(2)))
        - x(6).scale_gaussian(&real(int(14) * a * a * a))
        - p(2).multiply(&lambda_sq()).scale_gaussian(&real(int(81) * a))
        - x(2).multiply(&lambda_sq()).scale_gaussian(&real(int(138) * a * a));
    inner.scale_gaussian(&prefactor)
}

/// The 3β²γ group of h⁽⁴⁾:
/// (3β²γ/(2α⁴))·(½{X²,P⁴} + (3α/2){X⁴,P²} + α²X⁶ + 2λ²P² + 8λ²αX²).
fn hermitian_order4_cross_family(params: &ProblemParams) -> WeylOperator {
    let a = params.alpha();
    let b = params.beta();
    let g = params.gamma();
    let prefactor = real(int(3) * b * b * g / (int(2) * a * a * a * a));
    let inner = anti(&x(2), &p(4)).scale_gaussian(&GaussianRational::from_ratio(1, 2))
        + anti(&x(4), &p(2)).scale_gaussian(&real(int(3) * a / int(2)))
        + x(6).scale_gaussian(&real(a * a))
        + p(2).multiply(&lambda_sq()).scale_gaussian(&GaussianRational::from_integer(2))
        + x(2).multiply(&lambda_sq()).scale_gaussian(&real(int(8) * a));
    inner.scale_gaussian(&prefactor)
}

/// h⁽⁴⁾ written in terms of anticommutators, expanded to canonical form.
pub fn hermitian_order4(params: &ProblemParams) -> WeylOperator {
    hermitian_order4_beta4_family(params) + hermitian_order4_cross_family(params)
}

/// x_phys through ε³:
/// X + ε·(iβ/(2α²))(P² + αX²) + ε²·(β²/(8α³))({X,P²} − 2αX³)
///   − ε³·(iβ³/(8α⁵))[5P⁴ + 6α{X²,P²} + 5α²X⁴ + 3αλ²]
///   + ε³·(iβγ/(2α⁴))[2P⁴ + 3α{X²,P²} + 2α²X⁴ + 2αλ²].
pub fn physical_position(params: &ProblemParams) -> EpsilonSeries {
    let a = params.alpha();
    let b = params.beta();
    let g = params.gamma();
    let mut out = EpsilonSeries::zero(3);
    out.set_order(0, x(1));
    out.set_order(
        1,
        (p(2) + x(2).scale_gaussian(&real(a.clone())))
            .scale_gaussian(&imag(b / (int(2) * a * a))),
    );
    out.set_order(
        2,
        (anti(&x(1), &p(2)) - x(3).scale_gaussian(&real(int(2) * a)))
            .scale_gaussian(&real(b * b / (int(8) * a * a * a))),
    );
    let b3_group = (p(4).scale_gaussian(&GaussianRational::from_integer(5))
        + anti(&x(2), &p(2)).scale_gaussian(&real(int(6) * a))
        + x(4).scale_gaussian(&real(int(5) * a * a))
        + lambda_sq().scale_gaussian(&real(int(3) * a)))
    .scale_gaussian(&imag(-(b * b * b) / (int(8) * a * a * a * a * a)));
    let bc_group = (p(4).scale_gaussian(&GaussianRational::from_integer(2))
        + anti(&x(2), &p(2)).scale_gaussian(&real(int(3) * a))
        + x(4).scale_gaussian(&real(int(2) * a * a))
        + lambda_sq().scale_gaussian(&real(int(2) * a)))
    .scale_gaussian(&imag(b * g / (int(2) * a * a * a * a)));
    out.set_order(3, b3_group + bc_group);
    out
}

/// p_phys through ε³:
/// P − ε·(iβ/(2α)){X,P} + ε²·(β²/(8α³))(2P³ − α{X²,P})
///   + ε³·(iβ³/(4α⁴))({X,P³} + 4α{X³,P})
///   − ε³·(iβγ/α³)({X,P³} + 2α{X³,P}).
pub fn physical_momentum(params: &ProblemParams) -> EpsilonSeries {
    let a = params.alpha();
    let b = params.beta();
    let g = params.gamma();
    let mut out = EpsilonSeries::zero(3);
    out.set_order(0, p(1));
    out.set_order(
        1,
        anti(&x(1), &p(1)).scale_gaussian(&imag(-b / (int(2) * a))),
    );
    out.set_order(
        2,
        (p(3).scale_gaussian(&GaussianRational::from_integer(2))
            - anti(&x(2), &p(1)).scale_gaussian(&real(a.clone())))
        .scale_gaussian(&real(b * b / (int(8) * a * a * a))),
    );
    let b3_group = (anti(&x(1), &p(3))
        + anti(&x(3), &p(1)).scale_gaussian(&real(int(4) * a)))
    .scale_gaussian(&imag(b * b * b / (int(4) * a * a * a * a)));
    let bc_group = (anti(&x(1), &p(3))
        + anti(&x(3), &p(1)).scale_gaussian(&real(int(2) * a)))
    .scale_gaussian(&imag(-(b * g) / (a * a * a)));
    out.set_order(3, b3_group + bc_group);
    out
}

fn ps(x_pow: u32, p_pow: u32, c: BigRational) -> PhaseSpacePolynomial {
    PhaseSpacePolynomial::monomial(x_pow, p_pow, LambdaCoefficient::constant(real(c)))
}

/// The classical Hamiltonian through ε⁴ (λ → 0 of the equivalent Hermitian
/// form):
/// ε⁰: p²/2 + αx²
/// ε²: (3β²/(4α²))(x²p² + αx⁴) − γx⁴
/// ε⁴: (β⁴/(32α⁶))(p⁶ − 36αx²p⁴ − 51α²x⁴p² − 14α³x⁶)
///     + (3β²γ/(2α⁴))(x²p⁴ + 3αx⁴p² + α²x⁶).
pub fn classical_hamiltonian(params: &ProblemParams) -> ClassicalHamiltonian {
    let a = params.alpha();
    let b = params.beta();
    let g = params.gamma();

    let order0 = ps(0, 2, int(1) / int(2)) + ps(2, 0, a.clone());

    let c2 = int(3) * b * b / (int(4) * a * a);
    let order2 = ps(2, 2, c2.clone()) + ps(4, 0, &c2 * a - g);

    let b4 = b * b * b * b / (int(32) * a * a * a * a * a * a);
    let cross = int(3) * b * b * g / (int(2) * a * a * a * a);
    let order4 = ps(0, 6, b4.clone())
        + ps(2, 4, -(&b4 * (int(36) * a)) + &cross)
        + ps(4, 2, -(&b4 * (int(51) * a * a)) + &cross * (int(3) * a))
        + ps(6, 0, -(&b4 * (int(14) * a * a * a)) + &cross * (a * a));

    ClassicalHamiltonian::from_orders([(0, order0), (2, order2), (4, order4)])
}
