//! Quantum channels as Kraus families, closed-form qubit noise models and the
//! Choi–Jamiołkowski isomorphism.
//!
//! Choi convention: `M = Σᵢⱼ 𝓜(|i⟩⟨j|) ⊗ |i⟩⟨j|`, output factor first. The
//! inverse is `𝓜(X) = Tr₀[(𝟙 ⊗ Xᵀ) M]` where factor 0 is the input.

use crate::error::{Error, Result};
use crate::operator_algebra::{
    c, ensure_square, haar_with_rng, hermitian_eigh, hermiticity_defect, identity, max_abs_diff,
    partial_trace, pauli, unit, CMatrix, DimensionVector, C64, DEFAULT_TOL, ONE,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Tolerance for Choi-operator validity flags.
pub const CHOI_TOL: f64 = 1e-8;

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    /// Each operator is `out_dim × in_dim`; `Σ K†K = 𝟙_in`.
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    /// Validates shapes and trace preservation.
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty Kraus family".into()))?;
        let (out_dim, in_dim) = first.shape();
        if operators.iter().any(|k| k.shape() != (out_dim, in_dim)) {
            return Err(Error::DimensionMismatch(
                "Kraus operators differ in shape".into(),
            ));
        }
        let completeness = operators
            .iter()
            .fold(CMatrix::zeros(in_dim, in_dim), |acc, k| {
                acc + k.adjoint() * k
            });
        let defect = max_abs_diff(&completeness, &identity(in_dim));
        if defect > DEFAULT_TOL {
            return Err(Error::InvalidParameter(format!(
                "Kraus family not trace preserving (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            in_dim,
            out_dim,
            operators,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            in_dim: d,
            out_dim: d,
            operators: vec![identity(d)],
        }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// `ρ ↦ Σₖ Kₖ ρ Kₖ†`.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        ensure_square(rho, self.in_dim, "channel input")?;
        Ok(self.apply_unchecked(rho))
    }

    pub(crate) fn apply_unchecked(&self, rho: &CMatrix) -> CMatrix {
        self.operators
            .iter()
            .fold(CMatrix::zeros(self.out_dim, self.out_dim), |acc, k| {
                acc + k * rho * k.adjoint()
            })
    }

    /// Heisenberg-picture adjoint `X ↦ Σₖ Kₖ† X Kₖ`.
    pub fn apply_adjoint(&self, x: &CMatrix) -> Result<CMatrix> {
        ensure_square(x, self.out_dim, "adjoint channel input")?;
        Ok(self
            .operators
            .iter()
            .fold(CMatrix::zeros(self.in_dim, self.in_dim), |acc, k| {
                acc + k.adjoint() * x * k
            }))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &KrausChannel) -> Result<KrausChannel> {
        if self.out_dim != other.in_dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}→{} with {}→{}",
                self.in_dim, self.out_dim, other.in_dim, other.out_dim
            )));
        }
        let ops = other
            .operators
            .iter()
            .flat_map(|b| self.operators.iter().map(move |a| b * a))
            .collect();
        Ok(Self {
            in_dim: self.in_dim,
            out_dim: other.out_dim,
            operators: ops,
        })
    }

    /// `self` applied `n` times (identity for `n = 0`), with Kraus operators
    /// merged through the Choi matrix so the family size stays bounded.
    pub fn power(&self, n: usize) -> Result<KrausChannel> {
        if self.in_dim != self.out_dim {
            return Err(Error::DimensionMismatch(
                "power of a non-endomorphic channel".into(),
            ));
        }
        let mut acc = KrausChannel::identity(self.in_dim);
        for _ in 0..n {
            acc = acc.then(self)?;
            if acc.operators.len() > self.in_dim * self.in_dim {
                acc = choi_of_channel(&acc).to_kraus()?;
            }
        }
        Ok(acc)
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let ops = self
            .operators
            .iter()
            .flat_map(|a| other.operators.iter().map(move |b| a.kronecker(b)))
            .collect();
        Self {
            in_dim: self.in_dim * other.in_dim,
            out_dim: self.out_dim * other.out_dim,
            operators: ops,
        }
    }

    /// Largest operator norm among the Kraus operators.
    pub fn max_kraus_norm(&self) -> f64 {
        self.operators
            .iter()
            .map(|k| k.clone().singular_values().max())
            .fold(0.0, f64::max)
    }
}

fn check_probability(p: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "{name} = {p} not in [0, 1]"
        )));
    }
    Ok(())
}

/// `ρ ↦ (1−p)ρ + p·𝟙/2` realized by `{√(1−3p/4)𝟙, √(p/4)X, √(p/4)Y, √(p/4)Z}`.
pub fn depolarizing(p: f64) -> Result<KrausChannel> {
    check_probability(p, "p")?;
    let a = (1.0 - 0.75 * p).sqrt();
    let b = (p / 4.0).sqrt();
    KrausChannel::new(vec![
        pauli(0) * c(a),
        pauli(1) * c(b),
        pauli(2) * c(b),
        pauli(3) * c(b),
    ])
}

/// Bloch action `(r_x, r_y, r_z) ↦ (r_x√(1−λ), r_y√(1−λ), r_z)`.
pub fn dephasing(lambda: f64) -> Result<KrausChannel> {
    check_probability(lambda, "lambda")?;
    phase_flip((1.0 - (1.0 - lambda).sqrt()) / 2.0)
}

/// Applies `Z` with probability `q`.
pub fn phase_flip(q: f64) -> Result<KrausChannel> {
    check_probability(q, "q")?;
    KrausChannel::new(vec![pauli(0) * c((1.0 - q).sqrt()), pauli(3) * c(q.sqrt())])
}

/// Relaxation towards |0⟩ with decay probability `gamma`.
pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    check_probability(gamma, "gamma")?;
    let k0 = CMatrix::from_row_slice(2, 2, &[ONE, c(0.0), c(0.0), c((1.0 - gamma).sqrt())]);
    let k1 = CMatrix::from_row_slice(2, 2, &[c(0.0), c(gamma.sqrt()), c(0.0), c(0.0)]);
    KrausChannel::new(vec![k0, k1])
}

/// Random CPTP map on dimension `d` with `n_kraus` operators, obtained from
/// the first `d` columns of a Haar unitary on `C^{d·n_kraus}`.
pub fn random_channel(d: usize, n_kraus: usize, seed: u64) -> KrausChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar_with_rng(d * n_kraus, &mut rng);
    let ops = (0..n_kraus)
        .map(|k| u.view((k * d, 0), (d, d)).into_owned())
        .collect();
    KrausChannel {
        in_dim: d,
        out_dim: d,
        operators: ops,
    }
}

/// Closed-form solution of `dρ/dt = (iω/2)[Z, ρ] + (γ/2)(ZρZ − ρ)` on a qubit.
pub fn lindblad_dephasing_evolve(rho: &CMatrix, omega: f64, gamma: f64, t: f64) -> Result<CMatrix> {
    ensure_square(rho, 2, "Lindblad dephasing state")?;
    let decay = (-gamma * t).exp();
    let mut out = rho.clone();
    out[(0, 1)] = rho[(0, 1)] * C64::from_polar(decay, -omega * t);
    out[(1, 0)] = rho[(1, 0)] * C64::from_polar(decay, omega * t);
    Ok(out)
}

/// Kraus realization of the Lindblad dephasing map over a time `t`.
pub fn lindblad_dephasing_channel(omega: f64, gamma: f64, t: f64) -> Result<KrausChannel> {
    if gamma < 0.0 || t < 0.0 {
        return Err(Error::InvalidParameter(
            "gamma and t must be nonnegative".into(),
        ));
    }
    let q = (1.0 - (-gamma * t).exp()) / 2.0;
    let u = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::from_polar(1.0, -omega * t / 2.0),
            c(0.0),
            c(0.0),
            C64::from_polar(1.0, omega * t / 2.0),
        ],
    );
    KrausChannel::unitary(u)?.then(&phase_flip(q)?)
}

/// Choi–Jamiołkowski operator on `H₁ ⊗ H₀` (output ⊗ input).
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiOperator {
    pub matrix: CMatrix,
    pub d_out: usize,
    pub d_in: usize,
}

/// Validity flags of a Choi operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChoiCheck {
    pub tp: bool,
    pub hermitian_preserving: bool,
    pub cp: bool,
}

impl ChoiOperator {
    pub fn new(matrix: CMatrix, d_out: usize, d_in: usize) -> Result<Self> {
        ensure_square(&matrix, d_out * d_in, "Choi operator")?;
        Ok(Self {
            matrix,
            d_out,
            d_in,
        })
    }

    fn dims(&self) -> DimensionVector {
        DimensionVector::new(vec![self.d_out, self.d_in]).expect("positive dimensions")
    }

    /// `Tr₀[(𝟙 ⊗ Xᵀ) M]`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        ensure_square(x, self.d_in, "Choi map input")?;
        let lifted = identity(self.d_out).kronecker(&x.transpose());
        partial_trace(&(lifted * &self.matrix), &self.dims(), &[0])
    }

    /// TP: `Tr₁ M = 𝟙₀`; HP: `M = M†`; CP: `M ⪰ 0`; each within [`CHOI_TOL`].
    pub fn check(&self) -> ChoiCheck {
        let reduced = partial_trace(&self.matrix, &self.dims(), &[1]).expect("consistent dims");
        let tp = max_abs_diff(&reduced, &identity(self.d_in)) <= CHOI_TOL;
        let hermitian_preserving = hermiticity_defect(&self.matrix) <= CHOI_TOL;
        let cp = hermitian_preserving
            && hermitian_eigh(&((&self.matrix + self.matrix.adjoint()) * c(0.5)))
                .map(|(v, _)| v.first().copied().unwrap_or(0.0) >= -CHOI_TOL)
                .unwrap_or(false);
        ChoiCheck {
            tp,
            hermitian_preserving,
            cp,
        }
    }

    /// Canonical Kraus family from the spectral decomposition; requires CP and TP.
    pub fn to_kraus(&self) -> Result<KrausChannel> {
        let flags = self.check();
        if !flags.cp || !flags.tp {
            return Err(Error::Precondition(format!(
                "Choi operator is not CPTP: {flags:?}"
            )));
        }
        let (vals, vecs) = hermitian_eigh(&((&self.matrix + self.matrix.adjoint()) * c(0.5)))?;
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ops: Vec<CMatrix> = vals
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 1e-14 * scale.max(1.0))
            .map(|(k, &v)| {
                CMatrix::from_fn(self.d_out, self.d_in, |a, i| {
                    vecs[(a * self.d_in + i, k)] * v.sqrt()
                })
            })
            .collect();
        KrausChannel::new(ops)
    }
}

/// `M = Σᵢⱼ 𝓜(|i⟩⟨j|) ⊗ |i⟩⟨j|`.
pub fn choi_of_channel(ch: &KrausChannel) -> ChoiOperator {
    let (d_in, d_out) = (ch.in_dim, ch.out_dim);
    let mut m = CMatrix::zeros(d_out * d_in, d_out * d_in);
    for i in 0..d_in {
        for j in 0..d_in {
            let image = ch.apply_unchecked(&unit(d_in, i, j));
            for a in 0..d_out {
                for b in 0..d_out {
                    m[(a * d_in + i, b * d_in + j)] += image[(a, b)];
                }
            }
        }
    }
    ChoiOperator {
        matrix: m,
        d_out,
        d_in,
    }
}

/// The linear map encoded by a Choi operator.
pub fn channel_of_choi(choi: &ChoiOperator) -> impl Fn(&CMatrix) -> Result<CMatrix> + '_ {
    move |x| choi.apply(x)
}

pub fn check_choi(choi: &ChoiOperator) -> ChoiCheck {
    choi.check()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_algebra::{
        ket, max_entangled_projector, outer, random_density_matrix, tensor, trace,
    };

    fn bloch(rho: &CMatrix) -> [f64; 3] {
        [1u8, 2, 3].map(|i| trace(&(pauli(i) * rho)).re)
    }

    #[test]
    fn depolarizing_examples() {
        let rho = random_density_matrix(2, 3);
        assert!(max_abs_diff(&depolarizing(0.0).unwrap().apply(&rho).unwrap(), &rho) < 1e-14);
        let zero = outer(&ket(2, 0));
        let out = depolarizing(1.0).unwrap().apply(&zero).unwrap();
        assert!(max_abs_diff(&out, &(identity(2) * c(0.5))) < 1e-14);
        for p in [0.1, 0.37, 0.9] {
            let out = depolarizing(p).unwrap().apply(&rho).unwrap();
            let expected = &rho * c(1.0 - p) + identity(2) * c(p / 2.0);
            assert!(max_abs_diff(&out, &expected) < 1e-12);
            assert!((bloch(&out)[2] - (1.0 - p) * bloch(&rho)[2]).abs() < 1e-12);
        }
        assert!(depolarizing(1.5).is_err());
    }

    #[test]
    fn dephasing_examples() {
        let rho = random_density_matrix(2, 9);
        assert!(max_abs_diff(&dephasing(0.0).unwrap().apply(&rho).unwrap(), &rho) < 1e-14);
        let plus = outer(&((ket(2, 0) + ket(2, 1)) * c(std::f64::consts::FRAC_1_SQRT_2)));
        let out = dephasing(1.0).unwrap().apply(&plus).unwrap();
        assert!(max_abs_diff(&out, &(identity(2) * c(0.5))) < 1e-14);
        let out = dephasing(0.19).unwrap().apply(&plus).unwrap();
        assert!((bloch(&out)[0] - 0.9).abs() < 1e-12);
        let r0 = bloch(&rho);
        let r1 = bloch(&dephasing(0.3).unwrap().apply(&rho).unwrap());
        let s = 0.7f64.sqrt();
        assert!((r1[0] - s * r0[0]).abs() < 1e-12);
        assert!((r1[1] - s * r0[1]).abs() < 1e-12);
        assert!((r1[2] - r0[2]).abs() < 1e-12);
    }

    #[test]
    fn lindblad_examples() {
        let rho = random_density_matrix(2, 1);
        assert_eq!(lindblad_dephasing_evolve(&rho, 1.3, 0.2, 0.0).unwrap(), rho);
        let plus = outer(&((ket(2, 0) + ket(2, 1)) * c(std::f64::consts::FRAC_1_SQRT_2)));
        let out = lindblad_dephasing_evolve(&plus, 0.0, 1.0, std::f64::consts::LN_2).unwrap();
        assert!((out[(0, 1)].re - 0.25).abs() < 1e-15);
        for (w, g, t) in [(0.7, 0.1, 2.0), (2.0, 0.5, 0.3)] {
            let closed = lindblad_dephasing_evolve(&rho, w, g, t).unwrap();
            let kraus = lindblad_dephasing_channel(w, g, t)
                .unwrap()
                .apply(&rho)
                .unwrap();
            assert!(max_abs_diff(&closed, &kraus) < 1e-13);
        }
    }

    #[test]
    fn choi_examples() {
        let id = choi_of_channel(&KrausChannel::identity(2));
        assert!(max_abs_diff(&id.matrix, &max_entangled_projector(2)) < 1e-15);
        let dep = choi_of_channel(&depolarizing(1.0).unwrap());
        assert!(max_abs_diff(&dep.matrix, &(identity(4) * c(0.5))) < 1e-14);

        let f = channel_of_choi(&id);
        for i in [1u8, 3] {
            assert!(max_abs_diff(&f(&pauli(i)).unwrap(), &pauli(i)) < 1e-15);
        }
        let f = channel_of_choi(&dep);
        for i in 0u8..4 {
            let rho = random_density_matrix(2, i as u64);
            assert!(max_abs_diff(&f(&rho).unwrap(), &(identity(2) * c(0.5))) < 1e-14);
        }
        let ch = dephasing(0.3).unwrap();
        let choi = choi_of_channel(&ch);
        for i in 0u8..4 {
            let direct = ch.apply(&pauli(i)).unwrap();
            assert!(max_abs_diff(&choi.apply(&pauli(i)).unwrap(), &direct) < 1e-12);
        }
    }

    #[test]
    fn choi_flags() {
        let ok = ChoiCheck {
            tp: true,
            hermitian_preserving: true,
            cp: true,
        };
        assert_eq!(choi_of_channel(&random_channel(3, 2, 5)).check(), ok);
        let zz = ChoiOperator::new(tensor(&pauli(3), &pauli(3)), 2, 2).unwrap();
        let flags = zz.check();
        assert!(!flags.cp && flags.hermitian_preserving);
        let doubled = ChoiOperator::new(max_entangled_projector(2) * c(2.0), 2, 2).unwrap();
        assert!(!doubled.check().tp && doubled.check().cp);
        let mut skew = max_entangled_projector(2);
        skew[(0, 1)] = C64::new(0.0, 1.0);
        assert!(
            !ChoiOperator::new(skew, 2, 2)
                .unwrap()
                .check()
                .hermitian_preserving
        );
    }

    #[test]
    fn kraus_roundtrip_through_choi() {
        let ch = random_channel(2, 3, 17);
        let back = choi_of_channel(&ch).to_kraus().unwrap();
        let rho = random_density_matrix(2, 4);
        assert!(max_abs_diff(&ch.apply(&rho).unwrap(), &back.apply(&rho).unwrap()) < 1e-12);
    }

    #[test]
    fn power_matches_bloch_contraction() {
        let rho = random_density_matrix(2, 8);
        let n = 7;
        let out = depolarizing(0.2)
            .unwrap()
            .power(n)
            .unwrap()
            .apply(&rho)
            .unwrap();
        assert!((bloch(&out)[0] - 0.8f64.powi(n as i32) * bloch(&rho)[0]).abs() < 1e-12);
    }

    #[test]
    fn invalid_family_rejected() {
        assert!(KrausChannel::new(vec![pauli(0) * c(0.5)]).is_err());
        assert!(KrausChannel::new(vec![]).is_err());
        assert!(depolarizing(0.1).unwrap().apply(&identity(3)).is_err());
    }
}
