//! Spacetime Wigner functions from displaced-parity measurements on a
//! truncated Fock space.
//!
//! `T(α) = 2 D(α) (−1)^{a†a} D(α)†` with `D(α) = exp(αa† − α*a)` built from
//! the truncated generator. The generator is anti-Hermitian, so the truncated
//! `D(α)` is exactly unitary and `T(α)` has eigenvalues exactly `±2`.
//!
//! Grid integrals instead use the compression of the untruncated operators
//! onto the first `n_max` levels ([`compressed_displaced_parity`]). The
//! truncated-generator operators wrap displaced amplitude back into the low
//! levels once `|α|²` approaches `n_max`, which ruins integrals over large α.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::operator_algebra::{
    c, ensure_square, hermitian_eigh, unitary_from_hamiltonian, CMatrix, C64,
};

/// Truncated single-mode operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub n_max: usize,
    pub matrix: CMatrix,
}

/// Annihilation operator on `span{|0⟩,…,|n_max−1⟩}`.
pub fn annihilation(n_max: usize) -> CMatrix {
    let mut a = CMatrix::zeros(n_max, n_max);
    for n in 1..n_max {
        a[(n - 1, n)] = c((n as f64).sqrt());
    }
    a
}

/// `exp(αa† − α*a)` on the truncated space.
pub fn displacement(alpha: C64, n_max: usize) -> CMatrix {
    let a = annihilation(n_max);
    let gen = a.adjoint() * alpha - &a * alpha.conj();
    // gen = i·K with K Hermitian, so exp(gen) = exp(−i·(−1)·K).
    let k = gen * Complex64::new(0.0, -1.0);
    unitary_from_hamiltonian(&k, -1.0).expect("generator is anti-Hermitian by construction")
}

/// Coherent state `D(α)|0⟩` as a column vector.
pub fn coherent_state(alpha: C64, n_max: usize) -> CMatrix {
    let d = displacement(alpha, n_max);
    CMatrix::from_fn(n_max, 1, |r, _| d[(r, 0)])
}

/// Fock-space parity `(−1)^{a†a}`.
pub fn parity(n_max: usize) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_fn(n_max, |n, _| {
        if n % 2 == 0 {
            c(1.0)
        } else {
            c(-1.0)
        }
    }))
}

fn check_n_max(n_max: usize) -> Result<()> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "n_max = {n_max} must be at least 2"
        )));
    }
    Ok(())
}

/// `T(α) = 2U(α)`.
pub fn displaced_parity(alpha: C64, n_max: usize) -> Result<FockOperator> {
    check_n_max(n_max)?;
    let d = displacement(alpha, n_max);
    Ok(FockOperator {
        n_max,
        matrix: &d * parity(n_max) * d.adjoint() * c(2.0),
    })
}

/// Exact matrix elements `⟨m|D(ξ)|n⟩`, `m, n < n_max`, of the untruncated
/// displacement.
///
/// Uses `D|n+1⟩ = (a† − ξ*) D|n⟩ / √(n+1)` from the coherent column
/// `D|0⟩`; the raising operator never reads rows at or beyond `n_max`, so
/// the recurrence is exact on the retained block.
pub fn compressed_displacement(xi: C64, n_max: usize) -> CMatrix {
    let mut d = CMatrix::zeros(n_max, n_max);
    if n_max == 0 {
        return d;
    }
    let mut amp = c((-xi.norm_sqr() / 2.0).exp());
    for m in 0..n_max {
        if m > 0 {
            amp = amp * xi / (m as f64).sqrt();
        }
        d[(m, 0)] = amp;
    }
    for n in 0..n_max - 1 {
        let norm = ((n + 1) as f64).sqrt();
        for m in 0..n_max {
            let raised = if m > 0 {
                d[(m - 1, n)] * (m as f64).sqrt()
            } else {
                c(0.0)
            };
            d[(m, n + 1)] = (raised - xi.conj() * d[(m, n)]) / norm;
        }
    }
    d
}

/// Compression of the untruncated `T(α)` onto the first `n_max` levels:
/// `⟨m|T(α)|n⟩ = 2(−1)ⁿ⟨m|D(2α)|n⟩`.
pub fn compressed_displaced_parity(alpha: C64, n_max: usize) -> Result<FockOperator> {
    check_n_max(n_max)?;
    let mut matrix = compressed_displacement(alpha * 2.0, n_max) * c(2.0);
    for n in (1..n_max).step_by(2) {
        matrix.column_mut(n).neg_mut();
    }
    Ok(FockOperator { n_max, matrix })
}

/// Compressions of the untruncated odd and even eigenprojectors,
/// `(𝟙 ∓ T(α)/2)/2`.
fn compressed_parity_projectors(alpha: C64, n_max: usize) -> Result<(CMatrix, CMatrix)> {
    let half_t = compressed_displaced_parity(alpha, n_max)?.matrix * c(0.5);
    let id = CMatrix::identity(n_max, n_max);
    Ok(((&id - &half_t) * c(0.5), (&id + &half_t) * c(0.5)))
}

/// Odd (`Π₁`, eigenvalue −2) and even (`Π₂`, eigenvalue +2) eigenprojectors
/// of `T(α)`, by sign-thresholding the spectrum of `U(α)` at zero.
pub fn parity_projectors(alpha: C64, n_max: usize) -> Result<(CMatrix, CMatrix)> {
    let t = displaced_parity(alpha, n_max)?;
    let (vals, vecs) = hermitian_eigh(&(t.matrix * c(0.5)))?;
    let mut odd = CMatrix::zeros(n_max, n_max);
    let mut even = CMatrix::zeros(n_max, n_max);
    for (k, v) in vals.iter().enumerate() {
        let col = vecs.column(k);
        let proj = col * col.adjoint();
        if *v < 0.0 {
            odd += proj;
        } else {
            even += proj;
        }
    }
    Ok((odd, even))
}

/// Complex-valued `2 Σᵢ (−1)^i Tr{T(β) 𝓔[Πᵢ(α) ρ Πᵢ(α)]}`; the imaginary part
/// is a numerical diagnostic.
pub fn spacetime_wigner_point_complex(
    rho: &CMatrix,
    ch: &KrausChannel,
    alpha: C64,
    beta: C64,
    n_max: usize,
) -> Result<C64> {
    check_inputs(rho, ch, n_max)?;
    let (odd, even) = parity_projectors(alpha, n_max)?;
    let t_beta = displaced_parity(beta, n_max)?.matrix;
    Ok(temporal_sum(rho, ch, &odd, &even, &t_beta))
}

fn temporal_sum(
    rho: &CMatrix,
    ch: &KrausChannel,
    odd: &CMatrix,
    even: &CMatrix,
    t_beta: &CMatrix,
) -> C64 {
    let branch = |p: &CMatrix| (t_beta * ch.apply_unchecked(&(p * rho * p))).trace();
    (branch(even) - branch(odd)) * 2.0
}

fn check_inputs(rho: &CMatrix, ch: &KrausChannel, n_max: usize) -> Result<()> {
    check_n_max(n_max)?;
    ensure_square(rho, n_max, "truncated state")?;
    if ch.in_dim() != n_max || ch.out_dim() != n_max {
        return Err(Error::DimensionMismatch(format!(
            "channel acts on {}→{}, truncation is {n_max}",
            ch.in_dim(),
            ch.out_dim()
        )));
    }
    Ok(())
}

/// Temporal Wigner function `𝒲(α, β)` for measurements at two times.
pub fn spacetime_wigner_point(
    rho: &CMatrix,
    ch: &KrausChannel,
    alpha: C64,
    beta: C64,
    n_max: usize,
) -> Result<f64> {
    spacetime_wigner_point_complex(rho, ch, alpha, beta, n_max).map(|z| z.re)
}

/// `Tr[(A ⊗ B) ρ]` without forming the Kronecker product.
fn trace_tensor_product(a: &CMatrix, b: &CMatrix, rho: &CMatrix) -> C64 {
    let (da, db) = (a.nrows(), b.nrows());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..da {
        for k in 0..da {
            let aik = a[(i, k)];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..db {
                for l in 0..db {
                    acc += aik * b[(j, l)] * rho[(k * db + l, i * db + j)];
                }
            }
        }
    }
    acc
}

/// Two-mode (spatial) Wigner function from the outcome statistics of
/// simultaneous `T(α)`, `T(β)` measurements: `Σ (±2)(±2) Tr[(Πᵢ⊗Πⱼ)ρ]`.
pub fn spatial_wigner_point(rho12: &CMatrix, alpha: C64, beta: C64, n_max: usize) -> Result<f64> {
    check_n_max(n_max)?;
    ensure_square(rho12, n_max * n_max, "two-mode state")?;
    let (odd_a, even_a) = parity_projectors(alpha, n_max)?;
    let (odd_b, even_b) = parity_projectors(beta, n_max)?;
    let mut w = 0.0;
    for (sa, pa) in [(-2.0, &odd_a), (2.0, &even_a)] {
        for (sb, pb) in [(-2.0, &odd_b), (2.0, &even_b)] {
            w += sa * sb * trace_tensor_product(pa, pb, rho12).re;
        }
    }
    Ok(w)
}

/// `Tr[(T(α) ⊗ T(β)) ρ₁₂]`.
pub fn two_mode_wigner(rho12: &CMatrix, alpha: C64, beta: C64, n_max: usize) -> Result<f64> {
    check_n_max(n_max)?;
    ensure_square(rho12, n_max * n_max, "two-mode state")?;
    let ta = displaced_parity(alpha, n_max)?.matrix;
    let tb = displaced_parity(beta, n_max)?.matrix;
    Ok(trace_tensor_product(&ta, &tb, rho12).re)
}

/// Midpoint grid on the square `[−R, R]²` of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub radius: f64,
    pub points_per_axis: usize,
}

impl Grid {
    pub fn nodes(&self) -> Vec<C64> {
        let h = self.spacing();
        let n = self.points_per_axis;
        let coord = |k: usize| -self.radius + (k as f64 + 0.5) * h;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| C64::new(coord(i), coord(j))))
            .collect()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.radius / self.points_per_axis as f64
    }

    /// Area element per node.
    pub fn weight(&self) -> f64 {
        self.spacing().powi(2)
    }
}

/// Midpoint-rule value of `∫∫ 𝒲(α, β) π⁻² d²α d²β`.
///
/// The β integral is carried out first as `M = Σ_β w T(β)/π`, an exact
/// rearrangement of the grid double sum. Operators are the compressed
/// untruncated ones, so only `ρ` and `ch` carry truncation error.
pub fn wigner_normalization_check(
    rho: &CMatrix,
    ch: &KrausChannel,
    grid: Grid,
    n_max: usize,
) -> Result<f64> {
    check_inputs(rho, ch, n_max)?;
    if grid.points_per_axis == 0 || grid.radius <= 0.0 {
        return Err(Error::InvalidParameter(
            "grid needs positive radius and points".into(),
        ));
    }
    let nodes = grid.nodes();
    let w = grid.weight() / std::f64::consts::PI;
    // Fixed chunks summed in order keep the result bitwise reproducible.
    let partials = nodes
        .par_chunks(grid.points_per_axis)
        .map(|chunk| {
            chunk
                .iter()
                .try_fold(CMatrix::zeros(n_max, n_max), |acc, &b| {
                    compressed_displaced_parity(b, n_max).map(|t| acc + t.matrix)
                })
        })
        .collect::<Result<Vec<CMatrix>>>()?;
    let t_sum = partials
        .into_iter()
        .fold(CMatrix::zeros(n_max, n_max), |a, b| a + b);
    let m = t_sum * c(w);
    let values = nodes
        .par_iter()
        .map(|&a| {
            let (odd, even) = compressed_parity_projectors(a, n_max)?;
            Ok(temporal_sum(rho, ch, &odd, &even, &m).re * w)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(crate::operator_algebra::pairwise_sum(&values))
}

/// Monte-Carlo estimate of `𝒲(α, β)` by sampling the projective cascade;
/// returns `(mean, standard error)`.
pub fn wigner_cascade_monte_carlo(
    rho: &CMatrix,
    ch: &KrausChannel,
    alpha: C64,
    beta: C64,
    n_max: usize,
    shots: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_inputs(rho, ch, n_max)?;
    if shots < 2 {
        return Err(Error::InvalidParameter("need at least two shots".into()));
    }
    let (odd_a, even_a) = parity_projectors(alpha, n_max)?;
    let (_, even_b) = parity_projectors(beta, n_max)?;
    let post_even = &even_a * rho * &even_a;
    let p_even = post_even.trace().re;
    let post_odd = &odd_a * rho * &odd_a;
    let second_even = |post: &CMatrix| {
        let evolved = ch.apply_unchecked(post);
        let norm = evolved.trace().re;
        if norm > 0.0 {
            (&even_b * evolved).trace().re / norm
        } else {
            0.0
        }
    };
    let q_after_even = second_even(&post_even);
    let q_after_odd = second_even(&post_odd);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..shots {
        let first_even = rng.random::<f64>() < p_even;
        let q = if first_even {
            q_after_even
        } else {
            q_after_odd
        };
        let second_is_even = rng.random::<f64>() < q;
        let a = if first_even { 2.0 } else { -2.0 };
        let b = if second_is_even { 2.0 } else { -2.0 };
        sum += a * b;
        sum_sq += (a * b) * (a * b);
    }
    let n = shots as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Complete dephasing in the Fock basis, `ρ ↦ Σₙ |n⟩⟨n|ρ|n⟩⟨n|`.
pub fn fock_phase_damping(n_max: usize) -> KrausChannel {
    let ops = (0..n_max)
        .map(|n| crate::operator_algebra::unit(n_max, n, n))
        .collect();
    KrausChannel::new(ops).expect("diagonal projectors are complete")
}
