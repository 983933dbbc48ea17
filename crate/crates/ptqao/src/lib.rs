//! PT-symmetric generalized quartic anharmonic oscillator toolkit.
//!
//! Exact noncommutative algebra in X, P with a formal commutator parameter λ
//! ([X, P] = iλ), perturbative metric-operator solver, equivalent Hermitian
//! position-dependent-mass Hamiltonian through fourth order, physical
//! observables, classical limit, and truncated-oscillator-basis spectral
//! verification.

pub mod classical;
pub mod config;
pub mod equivalence;
pub mod gaussian;
pub mod lambda;
pub mod metric;
pub mod reference;
pub mod series;
pub mod spectral;
pub mod symbol;
pub mod verify;
pub mod weyl;
pub mod xpoly;

mod ratfun;

pub use gaussian::GaussianRational;
pub use lambda::LambdaCoefficient;
pub use metric::ProblemParams;
pub use series::EpsilonSeries;
pub use symbol::PhaseSpacePolynomial;
pub use weyl::{Monomial, WeylOperator};
