//! Long-range order in time: two-point temporal correlations under noise,
//! restoration protocols and a driven spin chain.
//!
//! Two-point series are evaluated as the two-event measurement cascade:
//! Lüders branches of the first observable are evolved step by step and the
//! second observable is read off after every step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::channels::{dephasing, depolarizing, phase_flip, KrausChannel};
use crate::error::{Error, Result};
use crate::operator_algebra::{
    c, ensure_square, hadamard, identity, ket, kron_all, max_abs_diff, outer, pauli, swap, tensor,
    unitary_from_hamiltonian, CMatrix, C64,
};

/// Allowed excess of `|value|` over 1.
pub const SERIES_TOL: f64 = 1e-9;

/// Correlation values indexed from `first_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub label: String,
    pub first_index: usize,
    values: Vec<f64>,
}

impl CorrelationSeries {
    pub fn new(label: impl Into<String>, first_index: usize, values: Vec<f64>) -> Result<Self> {
        if let Some((k, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| v.abs() > 1.0 + SERIES_TOL || !v.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "entry {} = {v} is not a correlation",
                k + first_index
            )));
        }
        Ok(Self {
            label: label.into(),
            first_index,
            values,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entry with index `n` (not position).
    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(self.first_index)
            .and_then(|k| self.values.get(k).copied())
    }

    /// `(index, value)` pairs.
    pub fn indexed(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (k + self.first_index, v))
    }
}

/// Lüders branches `(sign, P ρ P)` of a ±1-valued observable.
fn branches(rho: &CMatrix, obs: &CMatrix) -> Vec<(f64, CMatrix)> {
    let id = identity(obs.nrows());
    [1.0, -1.0]
        .into_iter()
        .map(|s| {
            let p = (&id + obs * c(s)) * c(0.5);
            (s, &p * rho * &p)
        })
        .collect()
}

/// `⟨O(t₁), O′(t_N)⟩` for `N = 1..=n_max`, the channel applied `N − 1` times.
fn two_event_series(
    rho: &CMatrix,
    ch: &KrausChannel,
    first: &CMatrix,
    later: &CMatrix,
    n_max: usize,
) -> Vec<f64> {
    let mut br = branches(rho, first);
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n > 1 {
            for (_, b) in br.iter_mut() {
                *b = ch.apply_unchecked(b);
            }
        }
        out.push(br.iter().map(|(s, b)| s * (later * b).trace().re).sum());
    }
    out
}

fn check_qubit_inputs(rho: &CMatrix, ch: &KrausChannel, obs: &CMatrix) -> Result<usize> {
    let d = rho.nrows();
    ensure_square(rho, d, "state")?;
    ensure_square(obs, d, "observable")?;
    if ch.in_dim() != d || ch.out_dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "channel {}→{} on a {d}-dimensional system",
            ch.in_dim(),
            ch.out_dim()
        )));
    }
    Ok(d)
}

/// Entry `N` is the two-point correlation of `obs` between `t₁` and `t_N`.
pub fn channel_decay_series(
    rho: &CMatrix,
    ch: &KrausChannel,
    obs: &CMatrix,
    n_max: usize,
) -> Result<CorrelationSeries> {
    check_qubit_inputs(rho, ch, obs)?;
    CorrelationSeries::new(
        "channel decay",
        1,
        two_event_series(rho, ch, obs, obs, n_max),
    )
}

/// Outcome of the `γ^{2n}` decay bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayBound {
    pub gamma: f64,
    pub correlation: f64,
    pub bound: f64,
}

impl DecayBound {
    pub fn holds(&self) -> bool {
        self.correlation.abs() <= self.bound + 1e-10
    }
}

/// Compares the correlation after `n` rounds with `γ^{2n}`, where `γ` is
/// the largest Kraus operator norm.
pub fn general_decay_bound_check(
    rho: &CMatrix,
    ch: &KrausChannel,
    obs: &CMatrix,
    n: usize,
) -> Result<DecayBound> {
    check_qubit_inputs(rho, ch, obs)?;
    let gamma = ch.max_kraus_norm();
    if gamma >= 1.0 {
        return Err(Error::Precondition(format!(
            "largest Kraus norm {gamma} is not below 1"
        )));
    }
    let series = two_event_series(rho, ch, obs, obs, n + 1);
    Ok(DecayBound {
        gamma,
        correlation: series[n],
        bound: gamma.powi(2 * n as i32),
    })
}

fn check_probability(p: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "{name} = {p} outside [0, 1]"
        )));
    }
    Ok(())
}

fn iterate(n: usize, mut next: impl FnMut(f64) -> f64) -> Vec<f64> {
    let mut a = 1.0;
    (0..n)
        .map(|k| {
            if k > 0 {
                a = next(a);
            }
            a
        })
        .collect()
}

/// `a₁ = 1`, `a_{n+1} = 4aₙ(1−p)/(3 + aₙ²(1−p)²)`: two depolarized copies
/// projected onto their symmetric subspace each round.
pub fn symmetrization_series(p: f64, n: usize) -> Result<CorrelationSeries> {
    check_probability(p, "p")?;
    let s = 1.0 - p;
    CorrelationSeries::new(
        "symmetrization",
        1,
        iterate(n, |a| 4.0 * a * s / (3.0 + a * a * s * s)),
    )
}

/// `b₁ = 1`, `b_{n+1} = 4bₙ√(1−λ)/(3 + bₙ²(1−λ))` for dephased copies.
pub fn dephasing_symmetrization_series(lambda: f64, n: usize) -> Result<CorrelationSeries> {
    check_probability(lambda, "λ")?;
    let s = (1.0 - lambda).sqrt();
    CorrelationSeries::new(
        "dephasing symmetrization",
        1,
        iterate(n, |b| 4.0 * b * s / (3.0 + b * b * s * s)),
    )
}

/// Density-matrix simulation of the symmetrization protocol: starting from
/// `|+⟩`, each round sends two copies through `ch`, conditions on the
/// symmetric subspace `½(𝟙 + SWAP)` and keeps one qubit. Entry `N` is the
/// `X` Bloch component after `N − 1` rounds.
pub fn symmetrization_simulated(ch: &KrausChannel, n: usize) -> Result<CorrelationSeries> {
    if ch.in_dim() != 2 || ch.out_dim() != 2 {
        return Err(Error::DimensionMismatch(
            "symmetrization acts on qubits".into(),
        ));
    }
    let pair = ch.tensor(ch);
    let sym = (identity(4) + swap(2)) * c(0.5);
    let dims = crate::operator_algebra::DimensionVector::new(vec![2, 2])?;
    let x = pauli(1);
    let mut rho = outer(&(hadamard() * ket(2, 0)));
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            let noisy = pair.apply_unchecked(&tensor(&rho, &rho));
            let kept = &sym * noisy * &sym;
            let reduced = crate::operator_algebra::partial_trace(&kept, &dims, &[0])?;
            let norm = reduced.trace().re;
            rho = reduced * c(1.0 / norm);
        }
        out.push((&x * &rho).trace().re);
    }
    CorrelationSeries::new("symmetrization (simulated)", 1, out)
}

/// Logical failure probability per round of the three-qubit phase-flip
/// code with majority decoding, by enumerating all flip patterns.
pub fn phase_flip_logical_error(p: f64) -> Result<f64> {
    check_probability(p, "p")?;
    Ok((0..8u32)
        .filter(|pattern| pattern.count_ones() >= 2)
        .map(|pattern| {
            p.powi(pattern.count_ones() as i32) * (1.0 - p).powi(3 - pattern.count_ones() as i32)
        })
        .sum())
}

/// `(⟨X_L, X_L⟩, ⟨Z_L, Z_L⟩)` for `N = 1..=n`, from the Markov chain of the
/// net logical flip: `f_{k+1} = f_k(1 − q) + (1 − f_k)q`, `zz = 1 − 2f`.
pub fn phase_flip_code_series(p: f64, n: usize) -> Result<(CorrelationSeries, CorrelationSeries)> {
    let q = phase_flip_logical_error(p)?;
    let mut f = 0.0;
    let zz = (0..n)
        .map(|k| {
            if k > 0 {
                f = f * (1.0 - q) + (1.0 - f) * q;
            }
            1.0 - 2.0 * f
        })
        .collect();
    Ok((
        CorrelationSeries::new("phase-flip code XX", 1, vec![1.0; n])?,
        CorrelationSeries::new("phase-flip code ZZ", 1, zz)?,
    ))
}

/// Three-qubit simulation of the phase-flip code: independent phase flips,
/// `XXI`/`IXX` syndrome measurement and correction each round. Logical
/// `X_L = ZZZ` and `Z_L = XXX` on the code `{|+++⟩, |−−−⟩}`.
pub fn phase_flip_code_simulated(
    p: f64,
    n: usize,
) -> Result<(CorrelationSeries, CorrelationSeries)> {
    check_probability(p, "p")?;
    let flip = phase_flip(p)?;
    let noise = flip.tensor(&flip).tensor(&flip);
    let (i, x, z) = (pauli(0), pauli(1), pauli(3));
    let s1 = kron_all([x.clone(), x.clone(), i.clone()]);
    let s2 = kron_all([i.clone(), x.clone(), x.clone()]);
    let id = identity(8);
    let corrections = [
        (1.0, 1.0, id.clone()),
        (-1.0, 1.0, kron_all([z.clone(), i.clone(), i.clone()])),
        (-1.0, -1.0, kron_all([i.clone(), z.clone(), i.clone()])),
        (1.0, -1.0, kron_all([i.clone(), i.clone(), z.clone()])),
    ];
    let recovery_ops = corrections
        .iter()
        .map(|(a, b, corr)| corr * ((&id + &s1 * c(*a)) * c(0.5)) * ((&id + &s2 * c(*b)) * c(0.5)))
        .collect();
    let round = noise.then(&KrausChannel::new(recovery_ops)?)?;
    let plus = hadamard() * ket(2, 0);
    let minus = hadamard() * ket(2, 1);
    let code0 = kron_all([plus.clone(), plus.clone(), plus]);
    let code1 = kron_all([minus.clone(), minus.clone(), minus]);
    let rho = (outer(&code0) + outer(&code1)) * c(0.5);
    let x_l = kron_all([z.clone(), z.clone(), z]);
    let z_l = kron_all([x.clone(), x.clone(), x]);
    Ok((
        CorrelationSeries::new(
            "phase-flip code XX (simulated)",
            1,
            two_event_series(&rho, &round, &x_l, &x_l, n),
        )?,
        CorrelationSeries::new(
            "phase-flip code ZZ (simulated)",
            1,
            two_event_series(&rho, &round, &z_l, &z_l, n),
        )?,
    ))
}

/// Magnitude-level sufficient condition for a period-doubling open system:
/// `Σ_k E_k|s⟩⟨s|E_k† = |−s⟩⟨−s|` for the spin-flipped product state `|−s⟩`.
pub fn flips_basis_state(ch: &KrausChannel, spins: &[u8], tol: f64) -> Result<bool> {
    let l = spins.len();
    if ch.in_dim() != 1 << l || ch.out_dim() != 1 << l {
        return Err(Error::DimensionMismatch(format!(
            "channel does not act on {l} qubits"
        )));
    }
    let index = basis_index(spins)?;
    let flipped = (!index) & ((1 << l) - 1);
    let image = ch.apply_unchecked(&outer(&ket(1 << l, index)));
    Ok(max_abs_diff(&image, &outer(&ket(1 << l, flipped))) <= tol)
}

fn basis_index(spins: &[u8]) -> Result<usize> {
    spins.iter().try_fold(0usize, |acc, &s| match s {
        0 | 1 => Ok(acc << 1 | s as usize),
        _ => Err(Error::InvalidParameter(format!(
            "spin label {s} is not 0 or 1"
        ))),
    })
}

/// Largest chain simulated by dense exact evolution.
pub const MAX_FLOQUET_SITES: usize = 12;

/// Uniform disorder intervals for couplings and longitudinal fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisorderConfig {
    pub coupling_range: (f64, f64),
    pub field_range: (f64, f64),
}

impl Default for DisorderConfig {
    fn default() -> Self {
        Self {
            coupling_range: (0.1, 0.3),
            field_range: (0.0, 1.0),
        }
    }
}

/// Open chain driven by `U_f = exp(−iH₂t₂) exp(−iH₁t₁)` with
/// `H₁ = (g − ε) Σ σˣᵢ` and `H₂ = Σ Jᵢ σᶻᵢσᶻᵢ₊₁ + Σ (hᶻᵢ σᶻᵢ + hˣᵢ σˣᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetChainSpec {
    pub length: usize,
    pub epsilon: f64,
    pub g: f64,
    /// `length − 1` nearest-neighbour couplings.
    pub couplings: Vec<f64>,
    pub fields_z: Vec<f64>,
    pub fields_x: Vec<f64>,
    pub t1: f64,
    pub t2: f64,
    /// Initial `z`-basis product state, `0` for spin up.
    pub initial: Vec<u8>,
}

impl FloquetChainSpec {
    /// Couplings and `z` fields drawn uniformly from `cfg` with `seed`;
    /// uniform transverse field `field_x`, all spins up, `g = π/2`.
    pub fn disordered(
        length: usize,
        epsilon: f64,
        field_x: f64,
        seed: u64,
        cfg: DisorderConfig,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |(lo, hi): (f64, f64), n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| {
                    if hi > lo {
                        rng.random_range(lo..hi)
                    } else {
                        lo
                    }
                })
                .collect()
        };
        let couplings = draw(cfg.coupling_range, length.saturating_sub(1));
        let fields_z = draw(cfg.field_range, length);
        let spec = Self {
            length,
            epsilon,
            g: std::f64::consts::FRAC_PI_2,
            couplings,
            fields_z,
            fields_x: vec![field_x; length],
            t1: 1.0,
            t2: 1.0,
            initial: vec![0; length],
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same disorder with all couplings switched off.
    pub fn without_interactions(mut self) -> Self {
        self.couplings.iter_mut().for_each(|j| *j = 0.0);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.length;
        if l < 2 {
            return Err(Error::InvalidParameter(
                "chain needs at least two sites".into(),
            ));
        }
        if l > MAX_FLOQUET_SITES {
            return Err(Error::InvalidParameter(format!(
                "{l} sites exceeds the dense limit {MAX_FLOQUET_SITES}"
            )));
        }
        if self.couplings.len() != l - 1
            || self.fields_z.len() != l
            || self.fields_x.len() != l
            || self.initial.len() != l
        {
            return Err(Error::DimensionMismatch(format!(
                "parameter vectors do not match {l} sites"
            )));
        }
        let scalars = [self.epsilon, self.g, self.t1, self.t2];
        if scalars
            .iter()
            .chain(&self.couplings)
            .chain(&self.fields_z)
            .chain(&self.fields_x)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidParameter(
                "chain parameters must be finite".into(),
            ));
        }
        basis_index(&self.initial).map(|_| ())
    }
}

/// `σᶻ` eigenvalue of `site` in basis state `index` (site 0 is the leftmost factor).
fn z_value(index: usize, site: usize, l: usize) -> f64 {
    if (index >> (l - 1 - site)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// One-period evolution operator.
pub fn floquet_unitary(spec: &FloquetChainSpec) -> Result<CMatrix> {
    spec.validate()?;
    let l = spec.length;
    let d = 1 << l;
    let angle = (spec.g - spec.epsilon) * spec.t1;
    let kick = identity(2) * c(angle.cos()) - pauli(1) * C64::new(0.0, angle.sin());
    let u1 = kron_all(std::iter::repeat_n(kick, l));
    let diag: Vec<f64> = (0..d)
        .map(|idx| {
            let zz: f64 = (0..l - 1)
                .map(|i| spec.couplings[i] * z_value(idx, i, l) * z_value(idx, i + 1, l))
                .sum();
            let z: f64 = (0..l).map(|i| spec.fields_z[i] * z_value(idx, i, l)).sum();
            zz + z
        })
        .collect();
    let u2 = if spec.fields_x.iter().all(|&h| h == 0.0) {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            d,
            diag.iter().map(|&e| C64::from_polar(1.0, -e * spec.t2)),
        ))
    } else {
        let mut h2 = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            d,
            diag.iter().map(|&e| c(e)),
        ));
        for (i, &hx) in spec.fields_x.iter().enumerate() {
            if hx != 0.0 {
                let ops = (0..l).map(|k| if k == i { pauli(1) } else { identity(2) });
                h2 += kron_all(ops) * c(hx);
            }
        }
        unitary_from_hamiltonian(&h2, spec.t2)?
    };
    Ok(u2 * u1)
}

/// Entry `n` (from 0) is `⟨σᶻ_site(0), σᶻ_site(nT)⟩` for the spec's initial
/// product state, propagating the two Lüders branch vectors one period at
/// a time.
pub fn floquet_correlation_series(
    spec: &FloquetChainSpec,
    site: usize,
    n_periods: usize,
) -> Result<CorrelationSeries> {
    let uf = floquet_unitary(spec)?;
    let l = spec.length;
    if site >= l {
        return Err(Error::IndexOutOfRange {
            index: site,
            count: l,
        });
    }
    let d = 1 << l;
    let psi = ket(d, basis_index(&spec.initial)?);
    let z: Vec<f64> = (0..d).map(|idx| z_value(idx, site, l)).collect();
    let mut br: Vec<(f64, CMatrix)> = [1.0, -1.0]
        .into_iter()
        .map(|s| {
            (
                s,
                CMatrix::from_fn(d, 1, |r, _| if z[r] == s { psi[(r, 0)] } else { c(0.0) }),
            )
        })
        .collect();
    let mut values = Vec::with_capacity(n_periods + 1);
    for n in 0..=n_periods {
        if n > 0 {
            for (_, b) in br.iter_mut() {
                *b = &uf * &*b;
            }
        }
        let v: f64 = br
            .iter()
            .map(|(s, b)| {
                s * b
                    .iter()
                    .zip(&z)
                    .map(|(a, zi)| a.norm_sqr() * zi)
                    .sum::<f64>()
            })
            .sum();
        values.push(v);
    }
    CorrelationSeries::new(format!("floquet sigma_z site {site}"), 0, values)
}

/// Dominant discrete Fourier component of a series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubharmonicPeak {
    /// Cycles per period, folded into `[0, ½]`.
    pub peak_freq: f64,
    /// Fraction of the (mean-removed) spectral power in the peak bin.
    pub peak_weight: f64,
    /// The two strongest bins sit on opposite sides of `½` with power ratio below 2.
    pub split: bool,
}

/// Shortest series accepted by [`subharmonic_peak`].
pub const MIN_SPECTRUM_LEN: usize = 16;

/// Spectrum of the longest even-length suffix with the mean removed, so
/// that an exact period-2 signal lands in the single Nyquist bin.
pub fn subharmonic_peak(series: &[f64]) -> Result<SubharmonicPeak> {
    if series.len() < MIN_SPECTRUM_LEN {
        return Err(Error::SeriesTooShort {
            needed: MIN_SPECTRUM_LEN,
            got: series.len(),
        });
    }
    let data = &series[series.len() % 2..];
    let n = data.len();
    let mean = data.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = data.iter().map(|&v| Complex::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let power: Vec<f64> = buf.iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = power.iter().sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| power[b].total_cmp(&power[a]).then(a.cmp(&b)));
    let (k1, k2) = (order[0], order[1]);
    let half = n / 2;
    let straddle = (k1 < half && k2 > half) || (k2 < half && k1 > half);
    let split = straddle && power[k2] > 0.0 && power[k1] / power[k2] < 2.0;
    let f = k1 as f64 / n as f64;
    Ok(SubharmonicPeak {
        peak_freq: if f > 0.5 { 1.0 - f } else { f },
        peak_weight: if total > 0.0 { power[k1] / total } else { 0.0 },
        split,
    })
}

/// `min |value|` over the last `window` entries is at least `threshold`.
pub fn long_range_order_in_time(
    series: &CorrelationSeries,
    window: usize,
    threshold: f64,
) -> Result<bool> {
    let v = series.values();
    if window == 0 || window > v.len() {
        return Err(Error::Precondition(format!(
            "window {window} for a series of length {}",
            v.len()
        )));
    }
    Ok(v[v.len() - window..].iter().all(|x| x.abs() >= threshold))
}

/// Depolarizing series of `⟨X, X⟩` from `|+⟩`, used as a reference decay.
pub fn depolarizing_reference(p: f64, n: usize) -> Result<CorrelationSeries> {
    let rho = outer(&(hadamard() * ket(2, 0)));
    channel_decay_series(&rho, &depolarizing(p)?, &pauli(1), n)
}

/// Dephasing series of `⟨X, X⟩` from `|+⟩`.
pub fn dephasing_reference(lambda: f64, n: usize) -> Result<CorrelationSeries> {
    let rho = outer(&(hadamard() * ket(2, 0)));
    channel_decay_series(&rho, &dephasing(lambda)?, &pauli(1), n)
}
