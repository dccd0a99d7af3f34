//! Gaussian states and two-time spacetime Gaussian states.
//!
//! Phase-space ordering is `(q₁, p₁, …, q_N, p_N)` with `[q, p] = i`, and
//! covariance matrices follow `σᵢⱼ = 2⟨{x̂ᵢ, x̂ⱼ}⟩ − 2⟨x̂ᵢ⟩⟨x̂ⱼ⟩`, so the vacuum
//! has `σ = 𝟙` and actual quadrature variances are `σ/2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator_algebra::{hermitian_eigenvalues, CMatrix};

pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

/// Minimum eigenvalue allowed for `σ + iΩ`.
pub const UNCERTAINTY_TOL: f64 = 1e-9;

/// Resolutions used for the `s → ∞` extrapolation of the measurement cascade.
pub const RESOLUTIONS: [f64; 3] = [1e2, 1e3, 1e4];

/// Mean vector and covariance matrix of an `n_modes` Gaussian state.
///
/// Spacetime states share this representation but need not satisfy the
/// uncertainty relation.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub n_modes: usize,
    pub mean: RVector,
    pub cov: RMatrix,
}

pub type SpacetimeGaussian = GaussianState;

impl GaussianState {
    pub fn new(mean: RVector, cov: RMatrix) -> Result<Self> {
        let n = cov.nrows();
        if !cov.is_square() || !n.is_multiple_of(2) || mean.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "mean length {} with covariance {}x{}",
                mean.len(),
                cov.nrows(),
                cov.ncols()
            )));
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "covariance not symmetric ({asym:.3e})"
            )));
        }
        Ok(Self {
            n_modes: n / 2,
            mean,
            cov,
        })
    }
}

pub fn vacuum(n_modes: usize) -> GaussianState {
    GaussianState {
        n_modes,
        mean: RVector::zeros(2 * n_modes),
        cov: RMatrix::identity(2 * n_modes, 2 * n_modes),
    }
}

/// Single-mode thermal state with mean occupation `nbar`: `σ = (2n̄+1)𝟙`.
pub fn thermal(nbar: f64) -> Result<GaussianState> {
    if nbar < 0.0 || !nbar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "negative occupation {nbar}"
        )));
    }
    Ok(GaussianState {
        n_modes: 1,
        mean: RVector::zeros(2),
        cov: RMatrix::identity(2, 2) * (2.0 * nbar + 1.0),
    })
}

/// Two-mode squeezed vacuum with squeezing `r`.
pub fn two_mode_squeezed(r: f64) -> GaussianState {
    let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    #[rustfmt::skip]
    let cov = RMatrix::from_row_slice(4, 4, &[
        ch, 0.0, sh, 0.0,
        0.0, ch, 0.0, -sh,
        sh, 0.0, ch, 0.0,
        0.0, -sh, 0.0, ch,
    ]);
    GaussianState {
        n_modes: 2,
        mean: RVector::zeros(4),
        cov,
    }
}

/// `Ω = ⊕ [[0, 1], [−1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> RMatrix {
    let mut o = RMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        o[(2 * k, 2 * k + 1)] = 1.0;
        o[(2 * k + 1, 2 * k)] = -1.0;
    }
    o
}

fn check_even_square(s: &RMatrix) -> Result<usize> {
    if !s.is_square() || !s.nrows().is_multiple_of(2) || s.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "covariance must be square with even dimension, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    Ok(s.nrows() / 2)
}

/// Smallest eigenvalue of the Hermitian matrix `σ + iΩ`.
pub fn uncertainty_min_eigenvalue(s: &RMatrix) -> Result<f64> {
    let n = check_even_square(s)?;
    let omega = symplectic_form(n);
    let m = CMatrix::from_fn(s.nrows(), s.ncols(), |i, j| {
        Complex64::new(s[(i, j)], omega[(i, j)])
    });
    Ok(hermitian_eigenvalues(&m)?[0])
}

/// `σ + iΩ ⪰ 0` within [`UNCERTAINTY_TOL`].
pub fn uncertainty_ok(s: &RMatrix) -> Result<bool> {
    Ok(uncertainty_min_eigenvalue(s)? >= -UNCERTAINTY_TOL)
}

/// Quadrature label of a single mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Q,
    P,
}

impl Quadrature {
    pub fn index(self) -> usize {
        match self {
            Quadrature::Q => 0,
            Quadrature::P => 1,
        }
    }

    fn conjugate(self) -> usize {
        1 - self.index()
    }
}

/// Single-mode Gaussian evolution `σ ↦ SσSᵀ + N`, `d ↦ Sd`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStep {
    pub symplectic: RMatrix,
    pub noise: RMatrix,
}

impl GaussianStep {
    /// Validates `SΩSᵀ = Ω` and a symmetric noise term.
    pub fn new(symplectic: RMatrix, noise: Option<RMatrix>) -> Result<Self> {
        if symplectic.shape() != (2, 2) {
            return Err(Error::DimensionMismatch(
                "single-mode step must be 2x2".into(),
            ));
        }
        let omega = symplectic_form(1);
        let defect = (&symplectic * &omega * symplectic.transpose() - &omega).amax();
        if defect > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "step is not symplectic ({defect:.3e})"
            )));
        }
        let noise = noise.unwrap_or_else(|| RMatrix::zeros(2, 2));
        if noise.shape() != (2, 2) || (&noise - noise.transpose()).amax() > 1e-10 {
            return Err(Error::InvalidParameter(
                "noise must be a symmetric 2x2 matrix".into(),
            ));
        }
        Ok(Self { symplectic, noise })
    }

    pub fn identity() -> Self {
        Self {
            symplectic: RMatrix::identity(2, 2),
            noise: RMatrix::zeros(2, 2),
        }
    }

    /// Phase-space rotation by angle `theta` (free harmonic evolution).
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            symplectic: RMatrix::from_row_slice(2, 2, &[c, s, -s, c]),
            noise: RMatrix::zeros(2, 2),
        }
    }
}

/// Cross covariance `Cov(X₁, Y₂)` of the outcomes of a resolution-`s`
/// measurement of `x` at the first time and `y` at the second.
///
/// The measurement `K ∝ exp(−s(x̂ − x)²/2)` reports `x̂` with Gaussian noise
/// of variance `1/(2s)`, conditions the state on the outcome and adds `s/2`
/// to the conjugate variance; the step then maps the conditional mean
/// linearly. Returns the covariance in the `σ` normalization (twice the
/// actual covariance).
pub fn cascade_cross_covariance(
    initial: &GaussianState,
    step: &GaussianStep,
    x: Quadrature,
    y: Quadrature,
    s: f64,
) -> Result<f64> {
    if initial.n_modes != 1 {
        return Err(Error::DimensionMismatch(
            "temporal cascade needs a single mode".into(),
        ));
    }
    if s <= 0.0 {
        return Err(Error::InvalidParameter(
            "resolution must be positive".into(),
        ));
    }
    let v = &initial.cov * 0.5;
    let xi = x.index();
    let outcome_var = v[(xi, xi)] + 0.5 / s;
    // Conditional mean m' = m + gain·(X₁ − m_x); the step sends it to S m'.
    let gain = v.column(xi) / outcome_var;
    let propagated_gain = &step.symplectic * gain;
    let cov_actual = propagated_gain[y.index()] * outcome_var;
    Ok(2.0 * cov_actual)
}

/// Post-measurement actual covariance after a resolution-`s` measurement of `x`.
pub fn conditioned_variances(initial: &GaussianState, x: Quadrature, s: f64) -> RMatrix {
    let v = &initial.cov * 0.5;
    let xi = x.index();
    let denom = v[(xi, xi)] + 0.5 / s;
    let col = v.column(xi).into_owned();
    let mut post = &v - &col * col.transpose() / denom;
    let cj = x.conjugate();
    post[(cj, cj)] += s / 2.0;
    post
}

/// Polynomial extrapolation of `f(s)` to `1/s → 0` through the given samples.
pub fn richardson_to_infinity(samples: &[(f64, f64)]) -> f64 {
    let h: Vec<f64> = samples.iter().map(|(s, _)| 1.0 / s).collect();
    let mut p: Vec<f64> = samples.iter().map(|(_, f)| *f).collect();
    let n = p.len();
    // Neville's scheme evaluated at h = 0.
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (h[i], h[i + level]);
            p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
        }
    }
    p[0]
}

/// Extrapolated `s → ∞` cross entry for first-time quadrature `x` and
/// second-time quadrature `y`.
pub fn temporal_entry(
    initial: &GaussianState,
    step: &GaussianStep,
    x: Quadrature,
    y: Quadrature,
) -> Result<f64> {
    let samples = RESOLUTIONS
        .iter()
        .map(|&s| cascade_cross_covariance(initial, step, x, y, s).map(|v| (s, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(richardson_to_infinity(&samples))
}

/// Two-time spacetime Gaussian `(q₁, p₁, q₂, p₂)`: event blocks are the
/// initial and evolved covariances, the cross block comes from the cascade.
pub fn temporal_gaussian(
    initial: &GaussianState,
    step: &GaussianStep,
) -> Result<SpacetimeGaussian> {
    if initial.n_modes != 1 {
        return Err(Error::DimensionMismatch(
            "temporal cascade needs a single mode".into(),
        ));
    }
    let s = &step.symplectic;
    let later = s * &initial.cov * s.transpose() + &step.noise;
    let mut cov = RMatrix::zeros(4, 4);
    cov.view_mut((0, 0), (2, 2)).copy_from(&initial.cov);
    cov.view_mut((2, 2), (2, 2)).copy_from(&later);
    for x in [Quadrature::Q, Quadrature::P] {
        for y in [Quadrature::Q, Quadrature::P] {
            let v = temporal_entry(initial, step, x, y)?;
            cov[(x.index(), 2 + y.index())] = v;
            cov[(2 + y.index(), x.index())] = v;
        }
    }
    let later_mean = s * &initial.mean;
    let mean = RVector::from_iterator(4, initial.mean.iter().chain(later_mean.iter()).copied());
    Ok(GaussianState {
        n_modes: 2,
        mean,
        cov,
    })
}

/// Flips the sign of mode `mode`'s momentum row and column.
pub fn partial_transpose_gaussian(s: &RMatrix, mode: usize) -> Result<RMatrix> {
    let n = check_even_square(s)?;
    if mode >= n {
        return Err(Error::IndexOutOfRange {
            index: mode,
            count: n,
        });
    }
    let mut flip = RMatrix::identity(2 * n, 2 * n);
    flip[(2 * mode + 1, 2 * mode + 1)] = -1.0;
    Ok(&flip * s * &flip)
}

/// `χ(ξ) = exp[−¼ ξᵀ(ΩσΩᵀ)ξ − i(Ωd)ᵀξ]`.
pub fn characteristic_function(state: &GaussianState, xi: &RVector) -> Result<Complex64> {
    let n = 2 * state.n_modes;
    if xi.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "ξ has length {}, expected {n}",
            xi.len()
        )));
    }
    let omega = symplectic_form(state.n_modes);
    let quad = xi.dot(&(&omega * &state.cov * omega.transpose() * xi));
    let lin = (&omega * &state.mean).dot(xi);
    Ok(Complex64::new(-0.25 * quad, -lin).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_vs() -> RMatrix {
        #[rustfmt::skip]
        let m = RMatrix::from_row_slice(4, 4, &[
            1.0, 0.0, 1.0, 0.0,
            0.0, 1.0, 0.0, 1.0,
            1.0, 0.0, 1.0, 0.0,
            0.0, 1.0, 0.0, 1.0,
        ]);
        m
    }

    #[test]
    fn constructors() {
        let v = vacuum(1);
        assert_eq!(v.cov, RMatrix::identity(2, 2));
        assert!(v.mean.iter().all(|&x| x == 0.0));
        assert_eq!(thermal(1.0).unwrap().cov, RMatrix::identity(2, 2) * 3.0);
        assert!((two_mode_squeezed(0.0).cov.clone() - RMatrix::identity(4, 4)).amax() < 1e-15);
        assert!(thermal(-0.1).is_err());
        for st in [vacuum(2), thermal(0.7).unwrap(), two_mode_squeezed(0.8)] {
            assert!(uncertainty_ok(&st.cov).unwrap());
        }
    }

    #[test]
    fn uncertainty_examples() {
        assert!(!uncertainty_ok(&sigma_vs()).unwrap());
        assert!(!uncertainty_ok(&(RMatrix::identity(2, 2) * 0.5)).unwrap());
        assert!(uncertainty_ok(&RMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn vacuum_identity_gives_sigma_vs() {
        let st = temporal_gaussian(&vacuum(1), &GaussianStep::identity()).unwrap();
        assert!((&st.cov - sigma_vs()).amax() < 1e-9);
        assert!(st.cov[(0, 3)].abs() < 1e-12);
    }

    #[test]
    fn thermal_identity_gives_sigma_omts() {
        let r: f64 = 0.6;
        let st = temporal_gaussian(
            &thermal(r.sinh().powi(2)).unwrap(),
            &GaussianStep::identity(),
        )
        .unwrap();
        let expected = sigma_vs() * (2.0 * r).cosh();
        assert!((&st.cov - expected).amax() < 1e-9);
        assert!(!uncertainty_ok(&st.cov).unwrap());
    }

    #[test]
    fn cascade_converges_in_resolution() {
        let st = thermal(0.4).unwrap();
        let step = GaussianStep::rotation(0.3);
        for x in [Quadrature::Q, Quadrature::P] {
            for y in [Quadrature::Q, Quadrature::P] {
                let a = cascade_cross_covariance(&st, &step, x, y, 1e3).unwrap();
                let b = cascade_cross_covariance(&st, &step, x, y, 1e6).unwrap();
                assert!((a - b).abs() < 1e-4);
            }
        }
        let post = conditioned_variances(&vacuum(1), Quadrature::Q, 1e4);
        assert!(post[(0, 0)] < 1e-4 && post[(1, 1)] > 1e3);
    }

    #[test]
    fn richardson_recovers_polynomial_limit() {
        let f = |s: f64| 2.0 + 3.0 / s - 5.0 / (s * s);
        let samples: Vec<_> = RESOLUTIONS.iter().map(|&s| (s, f(s))).collect();
        assert!((richardson_to_infinity(&samples) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_relations() {
        let tmss = two_mode_squeezed(0.5);
        let pt = partial_transpose_gaussian(&tmss.cov, 1).unwrap();
        assert_eq!(pt[(1, 3)], -tmss.cov[(1, 3)]);
        assert_eq!(pt[(0, 2)], tmss.cov[(0, 2)]);
        assert_eq!(partial_transpose_gaussian(&pt, 1).unwrap(), tmss.cov);
        assert!(partial_transpose_gaussian(&pt, 2).is_err());

        let r: f64 = 3.0;
        let omts = sigma_vs() * (2.0 * r).cosh();
        let pt = partial_transpose_gaussian(&omts, 1).unwrap();
        let gap = (&pt - two_mode_squeezed(r).cov).amax() / (2.0 * r).cosh();
        assert!(gap <= 2e-5, "{gap}");
    }

    #[test]
    fn characteristic_examples() {
        let st = temporal_gaussian(&vacuum(1), &GaussianStep::identity()).unwrap();
        assert!((characteristic_function(&st, &RVector::zeros(4)).unwrap() - 1.0).norm() < 1e-15);
        let chi = characteristic_function(&vacuum(1), &RVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert!((chi.re - (-0.25f64).exp()).abs() < 1e-15 && chi.im == 0.0);
        // Exponent is proportional to −[(q₁+q₂)² + (p₁+p₂)²].
        for xi in [
            [0.3, -0.2, 0.5, 0.1],
            [1.0, 0.0, -1.0, 0.0],
            [0.1, 0.7, 0.2, -0.4],
        ] {
            let v = RVector::from_row_slice(&xi);
            let expo = characteristic_function(&st, &v).unwrap().ln().re;
            let pattern = (xi[0] + xi[2]).powi(2) + (xi[1] + xi[3]).powi(2);
            assert!((expo + 0.25 * pattern).abs() < 1e-12);
        }
        let coh =
            GaussianState::new(RVector::from_vec(vec![1.0, 0.5]), RMatrix::identity(2, 2)).unwrap();
        let chi = characteristic_function(&coh, &RVector::from_vec(vec![0.4, -0.3])).unwrap();
        assert!(chi.norm() <= 1.0);
        assert!(characteristic_function(&coh, &RVector::zeros(3)).is_err());
    }

    #[test]
    fn step_validation() {
        assert!(GaussianStep::new(RMatrix::identity(2, 2) * 2.0, None).is_err());
        let sq = RMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        assert!(GaussianStep::new(sq, None).is_ok());
    }
}
