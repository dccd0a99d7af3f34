//! Out-of-time-order correlators, the final-state projection model and
//! harmonic-oscillator two-point functions (`ħ = 1`).

use crate::error::{Error, Result};
use crate::operator_algebra::{
    ensure_square, ensure_unitary, identity, max_abs_diff, tensor, CMatrix, C64, DEFAULT_TOL,
};

/// Operators and state of `⟨V W(t) V† W(t)†⟩` with `W(t) = U†WU`.
#[derive(Debug, Clone, PartialEq)]
pub struct OtocSpec {
    pub v: CMatrix,
    pub w: CMatrix,
    pub u: CMatrix,
    pub rho: CMatrix,
}

impl OtocSpec {
    pub fn new(v: CMatrix, w: CMatrix, u: CMatrix, rho: CMatrix) -> Result<Self> {
        let d = rho.nrows();
        for (m, what) in [(&v, "V"), (&w, "W"), (&u, "U"), (&rho, "state")] {
            ensure_square(m, d, what)?;
        }
        ensure_unitary(&u, DEFAULT_TOL)?;
        let trace_defect = (rho.trace() - 1.0).norm();
        if trace_defect > DEFAULT_TOL {
            return Err(Error::InvalidParameter(format!(
                "state trace off by {trace_defect:.3e}"
            )));
        }
        Ok(Self { v, w, u, rho })
    }
}

/// Value together with how many times `U` and `U†` were applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OtocEvaluation {
    pub value: C64,
    pub forward_steps: usize,
    pub backward_steps: usize,
}

/// `Tr[ρ V U†WU V† U†W†U]`, multiplying the eight factors in turn.
pub fn otoc_direct(s: &OtocSpec) -> OtocEvaluation {
    let (ud, wd, vd) = (s.u.adjoint(), s.w.adjoint(), s.v.adjoint());
    let factors: [(&CMatrix, Option<bool>); 8] = [
        (&s.v, None),
        (&ud, Some(false)),
        (&s.w, None),
        (&s.u, Some(true)),
        (&vd, None),
        (&ud, Some(false)),
        (&wd, None),
        (&s.u, Some(true)),
    ];
    let (mut forward, mut backward) = (0, 0);
    let mut acc = s.rho.clone();
    for (m, evolution) in factors {
        acc = &acc * m;
        match evolution {
            Some(true) => forward += 1,
            Some(false) => backward += 1,
            None => {}
        }
    }
    OtocEvaluation {
        value: acc.trace(),
        forward_steps: forward,
        backward_steps: backward,
    }
}

/// `Tr[A U†BU A ρ A† U†B†U A†]` as one branch of a forward-backward
/// three-event process: `A` at the first event, evolve by `U`, `B`, evolve
/// back by `U†`, `A` again.
///
/// Requires `AA† = A` and `ρ = 𝟙/d`, under which it equals the direct OTOC
/// with `V = A`, `W = B`.
pub fn otoc_via_pdm(
    a: &CMatrix,
    b: &CMatrix,
    u: &CMatrix,
    rho: &CMatrix,
) -> Result<OtocEvaluation> {
    let d = rho.nrows();
    for (m, what) in [(a, "A"), (b, "B"), (u, "U"), (rho, "state")] {
        ensure_square(m, d, what)?;
    }
    ensure_unitary(u, DEFAULT_TOL)?;
    let defect = max_abs_diff(&(a * a.adjoint()), a);
    if defect > DEFAULT_TOL {
        return Err(Error::Precondition(format!(
            "AA† ≠ A (defect {defect:.3e})"
        )));
    }
    let mixed = identity(d) * C64::new(1.0 / d as f64, 0.0);
    let defect = max_abs_diff(rho, &mixed);
    if defect > DEFAULT_TOL {
        return Err(Error::Precondition(format!(
            "state is not maximally mixed (defect {defect:.3e})"
        )));
    }
    let conj = |op: &CMatrix, x: &CMatrix| op * x * op.adjoint();
    let ud = u.adjoint();
    let first = conj(a, rho);
    let forward = conj(u, &first);
    let second = conj(b, &forward);
    let backward = conj(&ud, &second);
    let third = conj(a, &backward);
    Ok(OtocEvaluation {
        value: third.trace(),
        forward_steps: 1,
        backward_steps: 1,
    })
}

/// Postselection probability and conditional output of the final-state
/// projection model.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalStateOutcome {
    /// Probability of the normalized projector `|Φ⟩⟨Φ|_{M,in}`; equals `1/N²`.
    pub probability: f64,
    /// Normalized state of the outgoing radiation.
    pub state: CMatrix,
    /// `|⟨out|Sψ⟩|²`.
    pub fidelity: f64,
}

/// `|Φ⟩ = Σᵢ |i⟩|i⟩/√N`.
fn max_entangled_vector(n: usize) -> CMatrix {
    let norm = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n * n, 1, |r, _| {
        if r / n == r % n {
            C64::new(norm, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Matter `|ψ⟩_M` joins the pair `|Φ⟩_{in,out}`, `S` acts on the matter,
/// and `M ⊗ in` is projected onto `|Φ⟩`. The out factor then carries `S|ψ⟩`.
///
/// `out_unitary`, when given, acts on the out factor before the projection.
pub fn final_state_conditional_output(
    psi: &CMatrix,
    s: &CMatrix,
    out_unitary: Option<&CMatrix>,
) -> Result<FinalStateOutcome> {
    let n = psi.nrows();
    if psi.ncols() != 1 || n == 0 {
        return Err(Error::DimensionMismatch(
            "matter state must be a column vector".into(),
        ));
    }
    ensure_square(s, n, "S")?;
    ensure_unitary(s, DEFAULT_TOL)?;
    let norm = psi.norm();
    if (norm - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::InvalidParameter(format!(
            "matter state has norm {norm}"
        )));
    }
    let id = identity(n);
    let out_u = match out_unitary {
        Some(v) => {
            ensure_square(v, n, "out-factor unitary")?;
            ensure_unitary(v, DEFAULT_TOL)?;
            v.clone()
        }
        None => id.clone(),
    };
    let joint = tensor(psi, &max_entangled_vector(n));
    let evolved = tensor(&tensor(s, &id), &out_u) * joint;
    // ⟨Φ|_{M,in} ⊗ 𝟙_out.
    let bra = tensor(&max_entangled_vector(n).adjoint(), &id);
    let out = bra * evolved;
    let probability = out.norm_squared();
    let state = &out / C64::new(probability.sqrt(), 0.0);
    let target = out_u * s * psi;
    let fidelity = (state.adjoint() * target)[(0, 0)].norm_sqr();
    Ok(FinalStateOutcome {
        probability,
        state,
        fidelity,
    })
}

/// Ratio between the quadrature oracle `∫∫ q₁q₂|K|²` (kernel with its own
/// prefactor) and [`harmonic_pdm_correlation`].
pub const HARMONIC_ORACLE_CONSTANT: f64 = 2.0;

fn check_positive(values: &[(f64, &str)]) -> Result<()> {
    for &(v, name) in values {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    Ok(())
}

/// `1/(8mω sinh²ωτ)`.
pub fn harmonic_pdm_correlation(m: f64, omega: f64, tau: f64) -> Result<f64> {
    check_positive(&[(m, "mass"), (omega, "frequency"), (tau, "time")])?;
    Ok(1.0 / (8.0 * m * omega * (omega * tau).sinh().powi(2)))
}

/// `1/(2ω tanh(ωτ/2))`.
pub fn harmonic_pi_correlation(omega: f64, tau: f64) -> Result<f64> {
    check_positive(&[(omega, "frequency"), (tau, "time")])?;
    Ok(1.0 / (2.0 * omega * (omega * tau / 2.0).tanh()))
}

/// Trapezoidal `∫∫ q₁q₂ |K(q₂, q₁; τ)|² dq₁dq₂` with the Euclidean kernel
/// `K = √(mω/(2π sinh ωτ)) exp{−mω[(q₁²+q₂²)cosh ωτ − 2q₁q₂]/(2 sinh ωτ)}`.
///
/// The box extends 12 standard deviations along the widest direction.
pub fn harmonic_quadrature_moment(m: f64, omega: f64, tau: f64, points: usize) -> Result<f64> {
    check_positive(&[(m, "mass"), (omega, "frequency"), (tau, "time")])?;
    if points < 3 {
        return Err(Error::InvalidParameter(
            "quadrature needs at least 3 points per axis".into(),
        ));
    }
    let (sh, ch) = ((omega * tau).sinh(), (omega * tau).cosh());
    let k = m * omega / sh;
    // |K|² = (k/2π) exp(−½ qᵀAq) with A = 2k[[ch, −1], [−1, ch]].
    let widest = 1.0 / (2.0 * k * (ch - 1.0)).sqrt();
    let half = 12.0 * widest;
    let h = 2.0 * half / (points - 1) as f64;
    let weight = |i: usize| if i == 0 || i == points - 1 { 0.5 } else { 1.0 };
    let mut total = 0.0;
    for i in 0..points {
        let q1 = -half + i as f64 * h;
        let row: f64 = (0..points)
            .map(|j| {
                let q2 = -half + j as f64 * h;
                weight(j) * q1 * q2 * (-k * ((q1 * q1 + q2 * q2) * ch - 2.0 * q1 * q2)).exp()
            })
            .sum();
        total += weight(i) * row;
    }
    Ok(total * h * h * k / (2.0 * std::f64::consts::PI))
}
