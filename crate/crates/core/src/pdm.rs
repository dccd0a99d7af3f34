//! Pseudo-density matrices over sequences of qubit events.
//!
//! A [`TemporalProcess`] is an initial state followed by one channel per gap
//! between consecutive events. Correlations are obtained from an ideal
//! projective cascade: at event `k` the observable `Oₖ` (a ±1-valued
//! Hermitian operator) is measured with Lüders projectors `P^± = (𝟙 ± Oₖ)/2`,
//! and the signed product of outcomes is averaged over all branches.

use nalgebra::{Matrix4, Vector4};
use rayon::prelude::*;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::operator_algebra::{
    c, ensure_square, ensure_unitary, hermitian_eigenvalues, hermiticity_defect, identity,
    kron_all, max_entangled_projector, pairwise_sum, partial_trace, pauli, trace_norm, CMatrix,
    DimensionVector, PauliString, DEFAULT_TOL,
};

/// Initial state plus the channels acting between successive events.
#[derive(Debug, Clone)]
pub struct TemporalProcess {
    initial: CMatrix,
    steps: Vec<KrausChannel>,
}

impl TemporalProcess {
    /// Checks that `initial` is a unit-trace PSD matrix and that channel
    /// dimensions chain.
    pub fn new(initial: CMatrix, steps: Vec<KrausChannel>) -> Result<Self> {
        if !initial.is_square() {
            return Err(Error::DimensionMismatch(
                "initial state is not square".into(),
            ));
        }
        let herm = hermiticity_defect(&initial);
        if herm > DEFAULT_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = initial.trace();
        if (tr.re - 1.0).abs() > DEFAULT_TOL || tr.im.abs() > DEFAULT_TOL {
            return Err(Error::InvalidParameter(format!(
                "initial state has trace {tr}"
            )));
        }
        let min_ev = hermitian_eigenvalues(&initial)?[0];
        if min_ev < -DEFAULT_TOL {
            return Err(Error::InvalidParameter(format!(
                "initial state is not PSD (min eigenvalue {min_ev:.3e})"
            )));
        }
        let mut d = initial.nrows();
        for (k, ch) in steps.iter().enumerate() {
            if ch.in_dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "step {k} expects dimension {}, previous event has {d}",
                    ch.in_dim()
                )));
            }
            d = ch.out_dim();
        }
        Ok(Self { initial, steps })
    }

    /// The same channel repeated between every pair of `n_events` events.
    pub fn repeated(initial: CMatrix, step: KrausChannel, n_events: usize) -> Result<Self> {
        Self::new(initial, vec![step; n_events.saturating_sub(1)])
    }

    pub fn initial(&self) -> &CMatrix {
        &self.initial
    }

    pub fn steps(&self) -> &[KrausChannel] {
        &self.steps
    }

    pub fn n_events(&self) -> usize {
        self.steps.len() + 1
    }

    /// Hilbert-space dimension at each event.
    pub fn event_dims(&self) -> Vec<usize> {
        std::iter::once(self.initial.nrows())
            .chain(self.steps.iter().map(KrausChannel::out_dim))
            .collect()
    }

    /// Number of qubits per event, if every event space is the same qubit register.
    pub fn qubits_per_event(&self) -> Result<usize> {
        let dims = self.event_dims();
        let d = dims[0];
        if !d.is_power_of_two() || dims.iter().any(|&x| x != d) {
            return Err(Error::InvalidParameter(format!(
                "event spaces must all be the same qubit register, got dimensions {dims:?}"
            )));
        }
        Ok(d.trailing_zeros() as usize)
    }
}

/// Lüders projectors of a ±1-valued observable, skipping empty ones.
fn sign_projectors(obs: &CMatrix) -> Vec<(f64, CMatrix)> {
    let id = identity(obs.nrows());
    [1.0, -1.0]
        .into_iter()
        .map(|a| (a, (&id + obs * c(a)) * c(0.5)))
        .filter(|(_, p)| p.iter().any(|z| z.norm() > 1e-15))
        .collect()
}

/// Signed outcome products times branch probabilities, one entry per branch.
fn cascade_terms(proc: &TemporalProcess, observables: &[CMatrix]) -> Vec<f64> {
    let projectors: Vec<Vec<(f64, CMatrix)>> = observables.iter().map(sign_projectors).collect();
    let mut terms = Vec::new();
    descend(proc, &projectors, 0, &proc.initial, 1.0, &mut terms);
    terms
}

fn descend(
    proc: &TemporalProcess,
    projectors: &[Vec<(f64, CMatrix)>],
    k: usize,
    state: &CMatrix,
    sign: f64,
    terms: &mut Vec<f64>,
) {
    for (alpha, p) in &projectors[k] {
        let post = p * state * p;
        if k + 1 == projectors.len() {
            terms.push(sign * alpha * post.trace().re);
        } else {
            let next = proc.steps[k].apply_unchecked(&post);
            descend(proc, projectors, k + 1, &next, sign * alpha, terms);
        }
    }
}

fn check_observables(proc: &TemporalProcess, observables: &[CMatrix]) -> Result<()> {
    let dims = proc.event_dims();
    if observables.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} observables for {} events",
            observables.len(),
            dims.len()
        )));
    }
    for (k, (o, &d)) in observables.iter().zip(&dims).enumerate() {
        ensure_square(o, d, &format!("observable at event {k}"))?;
    }
    Ok(())
}

/// `⟨{O₁,…,Oₙ}⟩ = Σ_{α} α₁⋯αₙ · Prob(α₁,…,αₙ)` for ±1-valued observables.
pub fn event_correlation_observables(
    proc: &TemporalProcess,
    observables: &[CMatrix],
) -> Result<f64> {
    check_observables(proc, observables)?;
    Ok(pairwise_sum(&cascade_terms(proc, observables)))
}

/// Splits a Pauli string into one tensor-product observable per event.
fn pauli_observables(proc: &TemporalProcess, paulis: &PauliString) -> Result<Vec<CMatrix>> {
    let q = proc.qubits_per_event()?;
    let n = proc.n_events();
    if paulis.len() != n * q {
        return Err(Error::DimensionMismatch(format!(
            "Pauli string of length {} for {n} events of {q} qubit(s)",
            paulis.len()
        )));
    }
    Ok(paulis
        .indices()
        .chunks(q)
        .map(|chunk| kron_all(chunk.iter().map(|&i| pauli(i))))
        .collect())
}

/// Pauli-string correlation; the string holds `qubits_per_event` labels per event.
pub fn event_correlation(proc: &TemporalProcess, paulis: &PauliString) -> Result<f64> {
    let obs = pauli_observables(proc, paulis)?;
    event_correlation_observables(proc, &obs)
}

/// Hermitian unit-trace operator over `n_events` qubit registers.
#[derive(Debug, Clone, PartialEq)]
pub struct Pdm {
    pub n_events: usize,
    pub qubits_per_event: usize,
    pub matrix: CMatrix,
}

impl Pdm {
    fn dims(&self) -> DimensionVector {
        DimensionVector::new(vec![1 << self.qubits_per_event; self.n_events]).expect("nonempty")
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// `R = 2^{−N} Σ_σ ⟨σ⟩ σ` over all Pauli strings of the `N` event qubits.
pub fn build_pdm(proc: &TemporalProcess) -> Result<Pdm> {
    let q = proc.qubits_per_event()?;
    let n = proc.n_events();
    let total = n * q;
    let strings: Vec<PauliString> = PauliString::all(total).collect();
    let values = strings
        .par_iter()
        .map(|s| event_correlation(proc, s))
        .collect::<Result<Vec<f64>>>()?;
    let dim = 1usize << total;
    let mut m = CMatrix::zeros(dim, dim);
    for (s, v) in strings.iter().zip(&values) {
        if *v != 0.0 {
            m += s.matrix() * c(*v);
        }
    }
    m /= c(dim as f64);
    Ok(Pdm {
        n_events: n,
        qubits_per_event: q,
        matrix: m,
    })
}

/// `Tr[(⊗ᵢ Oᵢ) R]`, one observable per event.
pub fn expectation_from_pdm(r: &Pdm, ops: &[CMatrix]) -> Result<f64> {
    if ops.len() != r.n_events {
        return Err(Error::DimensionMismatch(format!(
            "{} observables for {} events",
            ops.len(),
            r.n_events
        )));
    }
    let d = 1 << r.qubits_per_event;
    for o in ops {
        ensure_square(o, d, "observable")?;
    }
    let big = kron_all(ops.iter().cloned());
    Ok((big * &r.matrix).trace().re)
}

/// Reduced operator of one event.
pub fn marginal(r: &Pdm, event: usize) -> Result<CMatrix> {
    partial_trace(&r.matrix, &r.dims(), &[event])
}

/// `max(‖R‖₁ − 1, 0)`.
pub fn causality_monotone(r: &Pdm) -> f64 {
    causality_monotone_matrix(&r.matrix)
}

pub fn causality_monotone_matrix(m: &CMatrix) -> f64 {
    (trace_norm(m) - 1.0).max(0.0)
}

/// Diagonal two-time correlations `(⟨XX⟩, ⟨YY⟩, ⟨ZZ⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTriple {
    pub t11: f64,
    pub t22: f64,
    pub t33: f64,
}

/// Membership of a correlation triple in the two correlation tetrahedra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TetraMembership {
    pub in_spatial_t: bool,
    pub in_temporal_t: bool,
}

pub const SPATIAL_TETRAHEDRON: [[f64; 3]; 4] = [
    [-1.0, -1.0, -1.0],
    [-1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, -1.0],
];
pub const TEMPORAL_TETRAHEDRON: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [-1.0, -1.0, 1.0],
    [-1.0, 1.0, -1.0],
    [1.0, -1.0, -1.0],
];

/// Slack on barycentric coordinates for hull membership.
pub const TETRA_SLACK: f64 = 1e-9;

/// Barycentric coordinates of `p` with respect to a tetrahedron.
pub fn barycentric(p: [f64; 3], verts: &[[f64; 3]; 4]) -> Option<[f64; 4]> {
    let a = Matrix4::from_fn(|r, col| if r < 3 { verts[col][r] } else { 1.0 });
    let b = Vector4::new(p[0], p[1], p[2], 1.0);
    a.lu().solve(&b).map(|x| [x[0], x[1], x[2], x[3]])
}

fn inside(p: [f64; 3], verts: &[[f64; 3]; 4]) -> bool {
    barycentric(p, verts).is_some_and(|l| l.iter().all(|&x| x >= -TETRA_SLACK))
}

impl CorrelationTriple {
    pub fn as_array(&self) -> [f64; 3] {
        [self.t11, self.t22, self.t33]
    }

    pub fn classify(&self) -> TetraMembership {
        let p = self.as_array();
        TetraMembership {
            in_spatial_t: inside(p, &SPATIAL_TETRAHEDRON),
            in_temporal_t: inside(p, &TEMPORAL_TETRAHEDRON),
        }
    }
}

/// Correlation triple of a single-qubit two-event process.
pub fn tetrahedron_point(proc: &TemporalProcess) -> Result<CorrelationTriple> {
    if proc.n_events() != 2 || proc.qubits_per_event()? != 1 {
        return Err(Error::InvalidParameter(
            "tetrahedron point needs one qubit at two events".into(),
        ));
    }
    let corr = |i: u8| event_correlation_observables(proc, &[pauli(i), pauli(i)]);
    Ok(CorrelationTriple {
        t11: corr(1)?,
        t22: corr(2)?,
        t33: corr(3)?,
    })
}

/// Branch weights `Tr[η P_j^β 𝓔(P_i^α ρ P_i^α) P_j^β]` indexed `[α][β]`
/// with index 0 for `+1` and 1 for `−1`.
fn postselected_branches(
    rho: &CMatrix,
    ch: &KrausChannel,
    i: u8,
    j: u8,
    eta: &CMatrix,
) -> Result<[[f64; 2]; 2]> {
    ensure_square(rho, 2, "postselection initial state")?;
    if ch.in_dim() != 2 || ch.out_dim() != 2 {
        return Err(Error::DimensionMismatch(
            "postselection needs a qubit channel".into(),
        ));
    }
    ensure_square(eta, 2, "postselection projector")?;
    if i > 3 || j > 3 {
        return Err(Error::InvalidParameter("Pauli index not in 0..=3".into()));
    }
    let proj = |k: u8, a: f64| (identity(2) + pauli(k) * c(a)) * c(0.5);
    let mut w = [[0.0; 2]; 2];
    for (ai, a) in [1.0, -1.0].into_iter().enumerate() {
        let pa = proj(i, a);
        let evolved = ch.apply_unchecked(&(&pa * rho * &pa));
        for (bi, b) in [1.0, -1.0].into_iter().enumerate() {
            let pb = proj(j, b);
            w[ai][bi] = (eta * &pb * &evolved * &pb).trace().re;
        }
    }
    Ok(w)
}

/// Postselected two-time correlation `⟨{σᵢ, σⱼ, η}⟩`; identity labels
/// contribute a single `+1` branch.
pub fn postselected_correlation(
    rho: &CMatrix,
    ch: &KrausChannel,
    i: u8,
    j: u8,
    eta: &CMatrix,
) -> Result<f64> {
    let w = postselected_branches(rho, ch, i, j, eta)?;
    // For σ₀ the −1 projector vanishes, so its branches are already zero.
    let total: f64 = w.iter().flatten().sum();
    if total.abs() <= 1e-14 {
        return Err(Error::UndefinedPostselection);
    }
    let signed = w[0][0] - w[0][1] - w[1][0] + w[1][1];
    Ok(signed / total)
}

/// `R = ¼ Σᵢⱼ ⟨{σᵢ, σⱼ, η}⟩ σᵢ ⊗ σⱼ ⊗ η`.
pub fn build_postselected_pdm(rho: &CMatrix, ch: &KrausChannel, eta: &CMatrix) -> Result<CMatrix> {
    let mut r = CMatrix::zeros(8, 8);
    for i in 0..4u8 {
        for j in 0..4u8 {
            let v = postselected_correlation(rho, ch, i, j, eta)?;
            r += kron_all([pauli(i), pauli(j), eta.clone()]) * c(v);
        }
    }
    Ok(r * c(0.25))
}

/// `(1/d²) Tr[C ρ_S C†]` with `C = Tr_A U_SA`.
pub fn ctc_probability(u_sa: &CMatrix, rho_s: &CMatrix, d: usize) -> Result<f64> {
    let ds = rho_s.nrows();
    ensure_square(rho_s, ds, "system state")?;
    ensure_square(u_sa, ds * d, "U_SA")?;
    ensure_unitary(u_sa, DEFAULT_TOL)?;
    let dims = DimensionVector::new(vec![ds, d])?;
    let cmat = partial_trace(u_sa, &dims, &[0])?;
    Ok((&cmat * rho_s * cmat.adjoint()).trace().re / (d * d) as f64)
}

/// The same probability from the explicit construction on `S ⊗ A ⊗ B`:
/// prepare `ρ_S ⊗ |Φ⟩⟨Φ|_AB`, apply `U_SA ⊗ 𝟙_B`, project `AB` onto `|Φ⟩`.
pub fn ctc_probability_explicit(u_sa: &CMatrix, rho_s: &CMatrix, d: usize) -> Result<f64> {
    let ds = rho_s.nrows();
    ensure_square(u_sa, ds * d, "U_SA")?;
    ensure_unitary(u_sa, DEFAULT_TOL)?;
    let phi = max_entangled_projector(d) * c(1.0 / d as f64);
    let state = rho_s.kronecker(&phi);
    let u = u_sa.kronecker(&identity(d));
    let evolved = &u * state * u.adjoint();
    let proj = identity(ds).kronecker(&phi);
    Ok((proj * evolved).trace().re)
}

/// Checks `max |R − R†|` and `|Tr R − 1|` against `tol`.
pub fn pdm_is_well_formed(r: &Pdm, tol: f64) -> bool {
    let tr = r.matrix.trace();
    hermiticity_defect(&r.matrix) <= tol && (tr.re - 1.0).abs() <= tol && tr.im.abs() <= tol
}

/// Correlation computed through the Jordan-product recursion
/// `ρ ↦ ½{O, ρ}` in place of the branch sum; used as an internal cross-check.
pub fn jordan_correlation(proc: &TemporalProcess, observables: &[CMatrix]) -> Result<f64> {
    check_observables(proc, observables)?;
    let mut state = proc.initial.clone();
    for (k, o) in observables.iter().enumerate() {
        state = (o * &state + &state * o) * c(0.5);
        if k < proc.steps.len() {
            state = proc.steps[k].apply_unchecked(&state);
        }
    }
    Ok(state.trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing, random_channel};
    use crate::operator_algebra::{
        haar_random_unitary, hadamard, ket, max_abs_diff, outer, random_density_matrix, swap,
        tensor,
    };

    fn zero() -> CMatrix {
        outer(&ket(2, 0))
    }

    fn two_time(rho: CMatrix, ch: KrausChannel) -> TemporalProcess {
        TemporalProcess::new(rho, vec![ch]).unwrap()
    }

    #[test]
    fn zero_state_correlations() {
        let p = two_time(zero(), KrausChannel::identity(2));
        let corr = |s: &str| event_correlation(&p, &PauliString::parse(s).unwrap()).unwrap();
        assert_eq!(corr("ZZ"), 1.0);
        assert_eq!(corr("ZI"), 1.0);
        assert_eq!(corr("XY"), 0.0);
        assert!((corr("XX") - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hadamard_maps_z_to_x() {
        let p = two_time(
            identity(2) * c(0.5),
            KrausChannel::unitary(hadamard()).unwrap(),
        );
        let v = event_correlation(&p, &PauliString::parse("ZX").unwrap()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_state_pdm_matrix() {
        let r = build_pdm(&two_time(zero(), KrausChannel::identity(2))).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = c(1.0);
        expected[(1, 2)] = c(0.5);
        expected[(2, 1)] = c(0.5);
        assert!(max_abs_diff(&r.matrix, &expected) < 1e-15);
        let ev = r.eigenvalues().unwrap();
        for (a, b) in ev.iter().zip([-0.5, 0.0, 0.5, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((causality_monotone(&r) - 1.0).abs() < 1e-14);
        assert!(max_abs_diff(&marginal(&r, 0).unwrap(), &zero()) < 1e-15);
        assert!((expectation_from_pdm(&r, &[pauli(3), pauli(0)]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_state_pdm_is_half_swap() {
        let r = build_pdm(&two_time(identity(2) * c(0.5), KrausChannel::identity(2))).unwrap();
        assert!(max_abs_diff(&r.matrix, &(swap(2) * c(0.5))) < 1e-15);
        assert!((expectation_from_pdm(&r, &[pauli(1), pauli(1)]).unwrap() - 1.0).abs() < 1e-15);
        for e in 0..2 {
            assert!(max_abs_diff(&marginal(&r, e).unwrap(), &(identity(2) * c(0.5))) < 1e-15);
        }
        assert!(marginal(&r, 2).is_err());
    }

    #[test]
    fn spacelike_product_pdm_is_the_state() {
        let a = random_density_matrix(2, 1);
        let b = random_density_matrix(2, 2);
        let rho = tensor(&a, &b);
        let r = build_pdm(&TemporalProcess::new(rho.clone(), vec![]).unwrap()).unwrap();
        assert!(max_abs_diff(&r.matrix, &rho) < 1e-14);
        assert!(causality_monotone(&r) < 1e-12);
        assert!(r.eigenvalues().unwrap()[0] > -1e-12);
    }

    #[test]
    fn monotone_partial_under_noise() {
        let r = build_pdm(&two_time(identity(2) * c(0.5), depolarizing(0.5).unwrap())).unwrap();
        let f = causality_monotone(&r);
        assert!(f > 0.0 && f < 1.0, "{f}");
    }

    #[test]
    fn jordan_matches_branch_sum() {
        let p = TemporalProcess::new(
            random_density_matrix(2, 4),
            vec![random_channel(2, 2, 1), random_channel(2, 3, 2)],
        )
        .unwrap();
        for s in PauliString::all(3) {
            let obs = pauli_observables(&p, &s).unwrap();
            let a = event_correlation_observables(&p, &obs).unwrap();
            let b = jordan_correlation(&p, &obs).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn tetrahedra() {
        let t =
            tetrahedron_point(&two_time(identity(2) * c(0.5), KrausChannel::identity(2))).unwrap();
        assert!((t.t11 - 1.0).abs() < 1e-14 && (t.t22 - 1.0).abs() < 1e-14);
        let m = t.classify();
        assert!(m.in_temporal_t && !m.in_spatial_t);
        let bell = CorrelationTriple {
            t11: 1.0,
            t22: -1.0,
            t33: 1.0,
        };
        assert!(bell.classify().in_spatial_t && !bell.classify().in_temporal_t);
        let t =
            tetrahedron_point(&two_time(identity(2) * c(0.5), depolarizing(1.0).unwrap())).unwrap();
        let m = t.classify();
        assert!(m.in_spatial_t && m.in_temporal_t);
        for seed in 0..10 {
            let u = haar_random_unitary(2, seed);
            let p = two_time(
                random_density_matrix(2, seed),
                KrausChannel::unitary(u).unwrap(),
            );
            assert!(tetrahedron_point(&p).unwrap().classify().in_temporal_t);
        }
    }

    #[test]
    fn postselection() {
        let id = KrausChannel::identity(2);
        let rho = random_density_matrix(2, 3);
        let p = two_time(rho.clone(), id.clone());
        for i in 1..4u8 {
            for j in 1..4u8 {
                let a = postselected_correlation(&rho, &id, i, j, &identity(2)).unwrap();
                let b = event_correlation_observables(&p, &[pauli(i), pauli(j)]).unwrap();
                assert!((a - b).abs() < 1e-14);
            }
        }
        let v = postselected_correlation(&zero(), &id, 3, 3, &zero()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let one = outer(&ket(2, 1));
        assert_eq!(
            postselected_correlation(&zero(), &id, 3, 3, &one),
            Err(Error::UndefinedPostselection)
        );
        let r = build_postselected_pdm(&rho, &depolarizing(0.2).unwrap(), &zero()).unwrap();
        assert!(hermiticity_defect(&r) < 1e-14);
        assert!((r.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ctc() {
        let rho = random_density_matrix(2, 5);
        assert!((ctc_probability(&identity(4), &rho, 2).unwrap() - 1.0).abs() < 1e-14);
        assert!((ctc_probability(&swap(2), &rho, 2).unwrap() - 0.25).abs() < 1e-14);
        for seed in 0..5 {
            let u = haar_random_unitary(6, seed);
            let rho = random_density_matrix(3, seed);
            let a = ctc_probability(&u, &rho, 2).unwrap();
            let b = ctc_probability_explicit(&u, &rho, 2).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        let mut bad = identity(4);
        bad[(0, 0)] = c(2.0);
        assert!(matches!(
            ctc_probability(&bad, &rho, 2),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn invalid_processes() {
        assert!(TemporalProcess::new(identity(2), vec![]).is_err());
        let p = two_time(zero(), KrausChannel::identity(2));
        assert!(event_correlation(&p, &PauliString::parse("Z").unwrap()).is_err());
        let qutrit = TemporalProcess::new(identity(3) * c(1.0 / 3.0), vec![]).unwrap();
        assert!(build_pdm(&qutrit).is_err());
    }
}
