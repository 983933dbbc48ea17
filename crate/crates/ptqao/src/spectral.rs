//! Numerical verification in a truncated harmonic-oscillator basis.
//!
//! Operators are realized as matrices at dimension N+B (buffer absorbs the
//! band spread of polynomial operators), products are formed at full size,
//! and only then truncated to the leading N×N block, which is then accurate
//! to rounding for interior matrix elements.

use crate::equivalence::{self, EquivalenceError};
use crate::gaussian::rational_to_f64;
use crate::metric::{self, ProblemParams};
use crate::weyl::WeylOperator;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use thiserror::Error;

pub type DenseMatrix = DMatrix<Complex64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpectralError {
    #[error("basis dimension must be at least 8 (got {0})")]
    DimensionTooSmall(usize),
    #[error("buffer must be at least dimension/4 (got {buffer} for N = {dimension})")]
    BufferTooSmall { dimension: usize, buffer: usize },
    #[error("operator carries symbolic lambda; substitute a numeric value first")]
    SymbolicLambda,
    #[error("eigensolver failed to converge")]
    NonConvergence,
    #[error("epsilon {0} outside the validated window [0, 0.1]")]
    EpsilonOutOfRange(String),
    #[error("epsilon grid must be strictly increasing")]
    NonMonotonicGrid,
    #[error("nLevels {levels} exceeds dimension/8 = {max}")]
    TooManyLevels { levels: usize, max: usize },
    #[error(transparent)]
    Equivalence(#[from] EquivalenceError),
}

/// Oscillator basis tuned to H₀ = P²/2 + αX²: with ω = √(2α) the unperturbed
/// matrix is diagonal with entries ω(n + ½). The buffer B is the extra room
/// kept during products before truncating back to N.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisSpec {
    alpha: f64,
    dimension: usize,
    buffer: usize,
}

impl BasisSpec {
    pub fn new(alpha: f64, dimension: usize, buffer: usize) -> Result<Self, SpectralError> {
        if dimension < 8 {
            return Err(SpectralError::DimensionTooSmall(dimension));
        }
        if buffer * 4 < dimension {
            return Err(SpectralError::BufferTooSmall { dimension, buffer });
        }
        assert!(alpha > 0.0, "oscillator frequency needs alpha > 0");
        Ok(Self { alpha, dimension, buffer })
    }

    pub fn for_params(params: &ProblemParams, dimension: usize, buffer: usize) -> Result<Self, SpectralError> {
        Self::new(rational_to_f64(params.alpha()), dimension, buffer)
    }

    /// Same α at a different dimension; the buffer grows as needed to keep
    /// B ≥ N/4.
    pub fn resized(&self, dimension: usize) -> Result<Self, SpectralError> {
        Self::new(self.alpha, dimension, self.buffer.max(dimension.div_ceil(4)))
    }

    pub fn omega(&self) -> f64 {
        (2.0 * self.alpha).sqrt()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn buffer(&self) -> usize {
        self.buffer
    }

    pub fn full_dimension(&self) -> usize {
        self.dimension + self.buffer
    }
}

/// Ladder-operator matrices of X and P at the buffered dimension N+B:
/// X = (2ω)^{-1/2}(a + a†), P = i(ω/2)^{1/2}(a† − a), λ = 1.
pub fn oscillator_matrices(basis: &BasisSpec) -> (DenseMatrix, DenseMatrix) {
    let dim = basis.full_dimension();
    let omega = basis.omega();
    let mut x = DMatrix::zeros(dim, dim);
    let mut p = DMatrix::zeros(dim, dim);
    for n in 0..dim - 1 {
        let root = ((n + 1) as f64).sqrt();
        let xval = root / (2.0 * omega).sqrt();
        let pval = root * (omega / 2.0).sqrt();
        x[(n, n + 1)] = Complex64::new(xval, 0.0);
        x[(n + 1, n)] = Complex64::new(xval, 0.0);
        p[(n, n + 1)] = Complex64::new(0.0, -pval);
        p[(n + 1, n)] = Complex64::new(0.0, pval);
    }
    (x, p)
}

/// Precomputed powers of the ladder matrices, shared by every realization in
/// the same basis.
pub struct MatrixCache {
    basis: BasisSpec,
    x_pows: Vec<DenseMatrix>,
    p_pows: Vec<DenseMatrix>,
}

impl MatrixCache {
    pub fn new(basis: &BasisSpec, max_degree: u32) -> Self {
        let (x, p) = oscillator_matrices(basis);
        let dim = basis.full_dimension();
        let eye = DMatrix::identity(dim, dim);
        let mut x_pows = vec![eye.clone()];
        let mut p_pows = vec![eye];
        for k in 1..=max_degree as usize {
            x_pows.push(&x_pows[k - 1] * &x);
            p_pows.push(&p_pows[k - 1] * &p);
        }
        Self { basis: *basis, x_pows, p_pows }
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    /// X^a P^b at the buffered dimension.
    pub fn monomial_full(&self, x_pow: u32, p_pow: u32) -> DenseMatrix {
        &self.x_pows[x_pow as usize] * &self.p_pows[p_pow as usize]
    }

    /// Realize a λ-numeric operator at the buffered dimension N+B.
    pub fn to_matrix_full(&self, op: &WeylOperator) -> Result<DenseMatrix, SpectralError> {
        let dim = self.basis.full_dimension();
        let mut out = DMatrix::zeros(dim, dim);
        for (m, c) in op.iter() {
            if c.iter().any(|(&power, _)| power != 0) {
                return Err(SpectralError::SymbolicLambda);
            }
            let (re, im) = c.coefficient(0).to_f64();
            out += self.monomial_full(m.x_pow, m.p_pow) * Complex64::new(re, im);
        }
        Ok(out)
    }

    /// Realize and truncate to the leading N×N block.
    pub fn to_matrix(&self, op: &WeylOperator) -> Result<DenseMatrix, SpectralError> {
        let n = self.basis.dimension();
        Ok(truncate(&self.to_matrix_full(op)?, n))
    }
}

/// One-shot realization of an operator (builds its own cache).
pub fn to_matrix(op: &WeylOperator, basis: &BasisSpec) -> Result<DenseMatrix, SpectralError> {
    let degree = op.max_x_pow().max(op.max_p_pow());
    MatrixCache::new(basis, degree).to_matrix(op)
}

pub fn truncate(m: &DenseMatrix, n: usize) -> DenseMatrix {
    m.view((0, 0), (n, n)).into_owned()
}

fn hermitize(m: &DenseMatrix) -> DenseMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// Full real spectrum of a Hermitian matrix, ascending.
pub fn eigen_hermitian(m: &DenseMatrix) -> Result<Vec<f64>, SpectralError> {
    let eig = nalgebra::SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_ITERATIONS)
        .ok_or(SpectralError::NonConvergence)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Full complex spectrum of a general matrix via Schur reduction, sorted by
/// real part, then imaginary part.
pub fn eigen_complex(m: &DenseMatrix) -> Result<Vec<Complex64>, SpectralError> {
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_ITERATIONS)
        .ok_or(SpectralError::NonConvergence)?;
    let (_, t) = schur.unpack();
    let mut values: Vec<Complex64> = t.diagonal().iter().copied().collect();
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values)
}

/// exp(M) for Hermitian M via eigendecomposition; the result is positive
/// definite by construction.
pub fn hermitian_exp(m: &DenseMatrix) -> Result<DenseMatrix, SpectralError> {
    let eig = nalgebra::SymmetricEigen::try_new(hermitize(m), f64::EPSILON, EIGEN_MAX_ITERATIONS)
        .ok_or(SpectralError::NonConvergence)?;
    let exp_diag = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|w| Complex64::new(w.exp(), 0.0)),
    );
    let u = eig.eigenvectors;
    Ok(&u * DMatrix::from_diagonal(&exp_diag) * u.adjoint())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralRow {
    pub epsilon: f64,
    pub max_imag: f64,
    pub dev_order2: f64,
    pub dev_order4: f64,
}

/// Per-ε eigenvalue comparisons with fitted log-log error slopes.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub rows: Vec<SpectralRow>,
    pub slope2: Option<f64>,
    pub slope4: Option<f64>,
}

impl SpectralReport {
    /// Header `epsilon,max_imag,dev_order2,dev_order4`, one row per ε,
    /// shortest round-trip decimals, and a trailing summary comment.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,max_imag,dev_order2,dev_order4\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.epsilon, row.max_imag, row.dev_order2, row.dev_order4
            ));
        }
        let fmt = |s: &Option<f64>| match s {
            Some(v) => format!("{v}"),
            None => "n/a".to_string(),
        };
        out.push_str(&format!(
            "# slope2={} slope4={}\n",
            fmt(&self.slope2),
            fmt(&self.slope4)
        ));
        out
    }
}

/// Least-squares slope of ln(y) against ln(x) over points with x, y > 0.
pub fn fit_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|(x, _)| x).sum();
    let sy: f64 = logs.iter().map(|(_, y)| y).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

fn validate_epsilon(eps: f64) -> Result<(), SpectralError> {
    if !(0.0..=0.1).contains(&eps) {
        return Err(SpectralError::EpsilonOutOfRange(format!("{eps}")));
    }
    Ok(())
}

struct OperatorMatrices {
    h0: DenseMatrix,
    h1: DenseMatrix,
    h2: DenseMatrix,
    h2_corr: DenseMatrix,
    h4_corr: DenseMatrix,
}

fn realize_operators(params: &ProblemParams, cache: &MatrixCache) -> Result<OperatorMatrices, SpectralError> {
    let one = BigRational::from_integer(1.into());
    let h_equiv = equivalence::assemble_h(params, 4)?;
    Ok(OperatorMatrices {
        h0: cache.to_matrix(&params.h0())?,
        h1: cache.to_matrix(&params.h1())?,
        h2: cache.to_matrix(&params.h2())?,
        h2_corr: cache.to_matrix(&h_equiv.order(2).substitute_lambda(&one).unwrap())?,
        h4_corr: cache.to_matrix(&h_equiv.order(4).substitute_lambda(&one).unwrap())?,
    })
}

/// For each ε: the complex spectrum of H(ε), the Hermitian spectra of the
/// equivalent series truncated at ε² and ε⁴, deviations over the lowest
/// levels, and fitted error-order slopes.
pub fn spectrum_comparison(
    params: &ProblemParams,
    eps_grid: &[f64],
    n_levels: usize,
    basis: &BasisSpec,
) -> Result<SpectralReport, SpectralError> {
    for eps in eps_grid {
        validate_epsilon(*eps)?;
    }
    if eps_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpectralError::NonMonotonicGrid);
    }
    let max_levels = basis.dimension() / 8;
    if n_levels > max_levels {
        return Err(SpectralError::TooManyLevels { levels: n_levels, max: max_levels });
    }

    let cache = MatrixCache::new(basis, 6);
    let ops = realize_operators(params, &cache)?;

    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let e1 = Complex64::new(eps, 0.0);
        let e2 = Complex64::new(eps * eps, 0.0);
        let e4 = Complex64::new(eps.powi(4), 0.0);

        let h_full = &ops.h0 + &ops.h1 * e1 + &ops.h2 * e2;
        let spectrum = eigen_complex(&h_full)?;
        let low = &spectrum[..n_levels.min(spectrum.len())];
        let max_imag = low.iter().map(|z| z.im.abs()).fold(0.0, f64::max);

        let h_two = hermitize(&(&ops.h0 + &ops.h2_corr * e2));
        let e_two = eigen_hermitian(&h_two)?;
        let h_four = hermitize(&(&h_two + &ops.h4_corr * e4));
        let e_four = eigen_hermitian(&h_four)?;

        let dev = |herm: &[f64]| -> f64 {
            low.iter()
                .zip(herm)
                .map(|(z, e)| (z.re - e).abs())
                .fold(0.0, f64::max)
        };
        rows.push(SpectralRow {
            epsilon: eps,
            max_imag,
            dev_order2: dev(&e_two),
            dev_order4: dev(&e_four),
        });
    }

    let slope2 = fit_log_slope(&rows.iter().map(|r| (r.epsilon, r.dev_order2)).collect::<Vec<_>>());
    let slope4 = fit_log_slope(&rows.iter().map(|r| (r.epsilon, r.dev_order4)).collect::<Vec<_>>());
    Ok(SpectralReport { rows, slope2, slope4 })
}

/// Truncation-robustness gate: the largest change of the lowest levels when
/// the basis dimension grows (both the complex spectrum of H and the
/// Hermitian spectrum of the ε⁴-truncated equivalent series are compared).
pub fn truncation_shift(
    params: &ProblemParams,
    eps: f64,
    n_levels: usize,
    basis: &BasisSpec,
    larger_dimension: usize,
) -> Result<f64, SpectralError> {
    validate_epsilon(eps)?;
    let big = basis.resized(larger_dimension)?;
    let mut shift: f64 = 0.0;
    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;
    for spec in [basis, &big] {
        let cache = MatrixCache::new(spec, 6);
        let ops = realize_operators(params, &cache)?;
        let e1 = Complex64::new(eps, 0.0);
        let e2 = Complex64::new(eps * eps, 0.0);
        let e4 = Complex64::new(eps.powi(4), 0.0);
        let h_full = &ops.h0 + &ops.h1 * e1 + &ops.h2 * e2;
        let complex_levels: Vec<f64> = eigen_complex(&h_full)?
            .iter()
            .take(n_levels)
            .map(|z| z.re)
            .collect();
        let h_four = hermitize(&(&ops.h0 + &ops.h2_corr * e2 + &ops.h4_corr * e4));
        let herm_levels: Vec<f64> = eigen_hermitian(&h_four)?.into_iter().take(n_levels).collect();
        if let Some((prev_c, prev_h)) = previous.take() {
            for (a, b) in prev_c.iter().zip(&complex_levels) {
                shift = shift.max((a - b).abs());
            }
            for (a, b) in prev_h.iter().zip(&herm_levels) {
                shift = shift.max((a - b).abs());
            }
        } else {
            previous = Some((complex_levels, herm_levels));
        }
    }
    Ok(shift)
}

/// ‖H†η − ηH‖_F with η = exp(−εQ₁ − ε³Q₃) built by Hermitian
/// eigendecomposition. Everything is computed at the buffered dimension and
/// the residual truncated to N×N before taking the norm, keeping the
/// interior block clean of truncation edge effects through ε⁴.
pub fn metric_residual_matrix(
    params: &ProblemParams,
    eps: f64,
    basis: &BasisSpec,
) -> Result<f64, SpectralError> {
    if eps <= 0.0 {
        return Err(SpectralError::EpsilonOutOfRange(format!("{eps}")));
    }
    validate_epsilon(eps)?;
    let one = BigRational::from_integer(1.into());
    let q1 = metric::solve_q1(params).map_err(EquivalenceError::from)?;
    let q3 = metric::solve_q3(params, &q1).map_err(EquivalenceError::from)?;

    let cache = MatrixCache::new(basis, 6);
    let q1m = cache.to_matrix_full(&q1.substitute_lambda(&one).unwrap())?;
    let q3m = cache.to_matrix_full(&q3.substitute_lambda(&one).unwrap())?;
    let qm = hermitize(&(q1m * Complex64::new(eps, 0.0) + q3m * Complex64::new(eps.powi(3), 0.0)));
    let eta = hermitian_exp(&(-qm))?;

    let h_full = cache.to_matrix_full(&params.h0())?
        + cache.to_matrix_full(&params.h1())? * Complex64::new(eps, 0.0)
        + cache.to_matrix_full(&params.h2())? * Complex64::new(eps * eps, 0.0);
    let residual = h_full.adjoint() * &eta - &eta * h_full;
    Ok(truncate(&residual, basis.dimension()).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: i64, b: i64, g: i64) -> ProblemParams {
        ProblemParams::from_integers(a, b, g).unwrap()
    }

    fn basis(alpha: f64, n: usize, b: usize) -> BasisSpec {
        BasisSpec::new(alpha, n, b).unwrap()
    }

    #[test]
    fn basis_validation() {
        assert!(matches!(BasisSpec::new(1.0, 4, 4), Err(SpectralError::DimensionTooSmall(4))));
        assert!(matches!(
            BasisSpec::new(1.0, 40, 8),
            Err(SpectralError::BufferTooSmall { .. })
        ));
        assert!(BasisSpec::new(1.0, 40, 10).is_ok());
    }

    #[test]
    fn ladder_matrix_elements_at_unit_frequency() {
        // α = 1/2 gives ω = 1 and X_{n,n+1} = √((n+1)/2).
        let spec = basis(0.5, 16, 8);
        let (x, _) = oscillator_matrices(&spec);
        for n in 0..10 {
            let expected = ((n + 1) as f64 / 2.0).sqrt();
            assert!((x[(n, n + 1)].re - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn truncated_ccr_holds_on_interior() {
        let spec = basis(1.0, 24, 8);
        let (x, p) = oscillator_matrices(&spec);
        let comm = &x * &p - &p * &x;
        for i in 0..spec.dimension() {
            for j in 0..spec.dimension() {
                let expected = if i == j {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!((comm[(i, j)] - expected).norm() <= 1e-12, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn oscillator_diagonal_is_analytic() {
        for &alpha in &[0.5, 1.0, 2.5] {
            let spec = basis(alpha, 16, 8);
            let (x, p) = oscillator_matrices(&spec);
            let h0 = (&p * &p) * Complex64::new(0.5, 0.0) + (&x * &x) * Complex64::new(alpha, 0.0);
            let omega = (2.0 * alpha).sqrt();
            for n in 0..spec.dimension() {
                let expected = omega * (n as f64 + 0.5);
                assert!((h0[(n, n)].re - expected).abs() <= 1e-12);
                assert!(h0[(n, n)].im.abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn to_matrix_identity_and_linearity() {
        let spec = basis(1.0, 16, 8);
        let cache = MatrixCache::new(&spec, 4);
        let ident = cache.to_matrix(&WeylOperator::identity()).unwrap();
        assert_eq!(ident, DMatrix::identity(16, 16));

        // to_matrix(2A + 3B) = 2·to_matrix(A) + 3·to_matrix(B)
        let a = WeylOperator::x_pow(2).multiply(&WeylOperator::p_pow(1));
        let b = WeylOperator::p_pow(3);
        let lhs = cache
            .to_matrix(
                &(a.scale_gaussian(&crate::gaussian::GaussianRational::from_integer(2))
                    + b.scale_gaussian(&crate::gaussian::GaussianRational::from_integer(3))),
            )
            .unwrap();
        let rhs = cache.to_matrix(&a).unwrap() * Complex64::new(2.0, 0.0)
            + cache.to_matrix(&b).unwrap() * Complex64::new(3.0, 0.0);
        assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn to_matrix_rejects_symbolic_lambda() {
        let spec = basis(1.0, 16, 8);
        let op = WeylOperator::from_term(
            crate::weyl::Monomial::new(1, 0),
            crate::lambda::LambdaCoefficient::monomial(1, crate::gaussian::GaussianRational::one()),
        );
        assert_eq!(to_matrix(&op, &spec), Err(SpectralError::SymbolicLambda));
    }

    #[test]
    fn normal_ordered_product_matches_matrix_product() {
        // The interior-block matrix oracle in miniature: P²X² normal-ordered
        // symbolically vs the direct product of matrix powers.
        let spec = basis(1.0, 24, 12);
        let cache = MatrixCache::new(&spec, 4);
        let symbolic = crate::weyl::reorder(2, 2);
        let one = BigRational::from_integer(1.into());
        let lhs = cache.to_matrix(&symbolic.substitute_lambda(&one).unwrap()).unwrap();
        let rhs = truncate(
            &(cache.monomial_full(0, 2) * cache.monomial_full(2, 0)),
            spec.dimension(),
        );
        let scale = rhs.iter().map(|z| z.norm()).fold(1.0, f64::max);
        assert!((lhs - rhs).norm() / scale <= 1e-12);
    }

    #[test]
    fn eigen_on_diagonal_and_rotation() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        assert_eq!(eigen_hermitian(&d).unwrap(), vec![1.0, 2.0, 3.0]);

        // [[0, 1], [−1, 0]] has eigenvalues ±i.
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let eigs = eigen_complex(&m).unwrap();
        assert!((eigs[0] - Complex64::new(0.0, -1.0)).norm() <= 1e-12);
        assert!((eigs[1] - Complex64::new(0.0, 1.0)).norm() <= 1e-12);
    }

    #[test]
    fn unperturbed_ground_state_is_analytic() {
        // Lowest eigenvalue of H(ε=0) at α=1 is √2/2 in a 60-level basis.
        let p = params(1, 1, 1);
        let spec = basis(1.0, 60, 16);
        let cache = MatrixCache::new(&spec, 2);
        let h0 = cache.to_matrix(&p.h0()).unwrap();
        let eigs = eigen_hermitian(&hermitize(&h0)).unwrap();
        assert!((eigs[0] - std::f64::consts::SQRT_2 / 2.0).abs() <= 1e-10);
    }

    #[test]
    fn hermitian_and_complex_solvers_agree() {
        let p = params(1, 1, 1);
        let spec = basis(1.0, 32, 8);
        let cache = MatrixCache::new(&spec, 6);
        let one = BigRational::from_integer(1.into());
        let h_equiv = equivalence::assemble_h(&p, 2).unwrap();
        let m = hermitize(
            &(cache.to_matrix(&p.h0()).unwrap()
                + cache
                    .to_matrix(&h_equiv.order(2).substitute_lambda(&one).unwrap())
                    .unwrap()
                    * Complex64::new(0.04 * 0.04, 0.0)),
        );
        let herm = eigen_hermitian(&m).unwrap();
        let comp = eigen_complex(&m).unwrap();
        for (a, z) in herm.iter().zip(&comp) {
            assert!((a - z.re).abs() <= 1e-9);
            assert!(z.im.abs() <= 1e-9);
        }
    }

    #[test]
    fn zero_epsilon_row_is_exact() {
        let p = params(1, 1, 1);
        let spec = basis(1.0, 32, 8);
        let report = spectrum_comparison(&p, &[0.0, 0.01], 4, &spec).unwrap();
        let row = report.rows[0];
        assert_eq!(row.max_imag, 0.0);
        assert!(row.dev_order2 <= 1e-12);
        assert!(row.dev_order4 <= 1e-12);
    }

    #[test]
    fn grid_validation() {
        let p = params(1, 1, 1);
        let spec = basis(1.0, 32, 8);
        assert!(matches!(
            spectrum_comparison(&p, &[0.02, 0.01], 4, &spec),
            Err(SpectralError::NonMonotonicGrid)
        ));
        assert!(matches!(
            spectrum_comparison(&p, &[0.5], 4, &spec),
            Err(SpectralError::EpsilonOutOfRange(_))
        ));
        assert!(matches!(
            spectrum_comparison(&p, &[0.01], 8, &spec),
            Err(SpectralError::TooManyLevels { .. })
        ));
    }

    #[test]
    fn metric_eta_is_positive_definite() {
        let p = params(1, 1, 1);
        let spec = basis(1.0, 24, 8);
        let cache = MatrixCache::new(&spec, 6);
        let one = BigRational::from_integer(1.into());
        let q1 = metric::solve_q1(&p).unwrap();
        let q1m = cache.to_matrix_full(&q1.substitute_lambda(&one).unwrap()).unwrap();
        let eta = hermitian_exp(&(-hermitize(&(q1m * Complex64::new(0.02, 0.0))))).unwrap();
        let eigs = eigen_hermitian(&hermitize(&eta)).unwrap();
        assert!(eigs.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn csv_shape() {
        let report = SpectralReport {
            rows: vec![SpectralRow {
                epsilon: 0.01,
                max_imag: 1e-12,
                dev_order2: 2e-8,
                dev_order4: 3e-11,
            }],
            slope2: Some(4.01),
            slope4: None,
        };
        let csv = report.to_csv();
        assert!(csv.starts_with("epsilon,max_imag,dev_order2,dev_order4\n"));
        assert!(csv.contains("0.01,"));
        assert!(csv.trim_end().ends_with("# slope2=4.01 slope4=n/a"));
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let points: Vec<(f64, f64)> = [0.01, 0.02, 0.04]
            .iter()
            .map(|&e: &f64| (e, 3.0 * e.powi(5)))
            .collect();
        let slope = fit_log_slope(&points).unwrap();
        assert!((slope - 5.0).abs() < 1e-9);
        assert_eq!(fit_log_slope(&points[..1]), None);
    }
}
