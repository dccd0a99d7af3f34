//! Bipartite process matrices with trivial global past and future.
//!
//! Tensor factors are ordered `A_I ⊗ A_O ⊗ B_I ⊗ B_O`. Instrument elements
//! are Choi operators on `X_I ⊗ X_O` (input first), and outcome statistics
//! follow `p(a, b|x, y) = Tr[Wᵀ (A_{a|x} ⊗ B_{b|y})]`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::operator_algebra::{
    c, ensure_square, hermitian_eigenvalues, hermiticity_defect, identity, kron_all, max_abs_diff,
    outer, partial_trace, pauli, permute_subsystems, tensor, unit, CMatrix, DimensionVector,
    DEFAULT_TOL,
};

pub const A_I: usize = 0;
pub const A_O: usize = 1;
pub const B_I: usize = 2;
pub const B_O: usize = 3;

/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-9;
/// Tolerance on the trace and on the projector fixed point.
pub const VALIDITY_TOL: f64 = 1e-8;
/// Tolerance on instrument completeness.
pub const INSTRUMENT_TOL: f64 = 1e-8;

/// Hermitian operator on `A_I ⊗ A_O ⊗ B_I ⊗ B_O`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    dims: [usize; 4],
    w: CMatrix,
}

impl ProcessMatrix {
    pub fn new(dims: [usize; 4], w: CMatrix) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "zero dimension in {dims:?}"
            )));
        }
        ensure_square(&w, dims.iter().product(), "process matrix")?;
        let defect = hermiticity_defect(&w);
        if defect > DEFAULT_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { dims, w })
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.w
    }

    /// `ρ^{A_I} ⊗ |U⟩⟩⟨⟨U|^{A_O B_I} ⊗ 𝟙^{B_O}` with `|U⟩⟩ = Σᵢ |i⟩ ⊗ U|i⟩`:
    /// Alice's output is carried to Bob's input by `U`.
    pub fn channel_process(rho: &CMatrix, u: &CMatrix) -> Result<Self> {
        let d = rho.nrows();
        ensure_square(rho, d, "initial state")?;
        ensure_square(u, d, "evolution")?;
        let choi = pure_choi(u);
        Self::new([d, d, d, d], kron_all([rho.clone(), choi, identity(d)]))
    }

    /// Qubit process violating both causal games:
    /// `¼[𝟙 + (ZZZ𝟙 + Z𝟙XX)/√2]`.
    pub fn causal_game_example() -> Self {
        let (i, x, z) = (pauli(0), pauli(1), pauli(3));
        let term1 = kron_all([z.clone(), z.clone(), z.clone(), i.clone()]);
        let term2 = kron_all([z, i, x.clone(), x]);
        let w = (identity(16) + (term1 + term2) * c(std::f64::consts::FRAC_1_SQRT_2)) * c(0.25);
        Self { dims: [2; 4], w }
    }
}

/// `|U⟩⟩⟨⟨U|` with `|U⟩⟩ = Σᵢ |i⟩ ⊗ U|i⟩`.
fn pure_choi(u: &CMatrix) -> CMatrix {
    let d = u.nrows();
    let v = CMatrix::from_fn(d * d, 1, |r, _| u[(r % d, r / d)]);
    outer(&v)
}

/// `ₓW = (𝟙_X/d_X) ⊗ Tr_X W` for the factors listed in `subsystems`.
pub fn trace_and_replace(w: &CMatrix, dims: &[usize], subsystems: &[usize]) -> Result<CMatrix> {
    let dv = DimensionVector::new(dims.to_vec())?;
    let keep: Vec<usize> = (0..dims.len())
        .filter(|k| !subsystems.contains(k))
        .collect();
    let reduced = partial_trace(w, &dv, &keep)?;
    let d_x: usize = subsystems.iter().map(|&k| dims[k]).product();
    // Rebuild with the traced factors appended last, then restore the order.
    let shuffled_dims: Vec<usize> = keep.iter().chain(subsystems).map(|&k| dims[k]).collect();
    let embedded = tensor(&reduced, &(identity(d_x) * c(1.0 / d_x as f64)));
    let order: Vec<usize> = keep.iter().chain(subsystems).copied().collect();
    let mut inverse = vec![0; dims.len()];
    for (pos, &k) in order.iter().enumerate() {
        inverse[k] = pos;
    }
    permute_subsystems(&embedded, &DimensionVector::new(shuffled_dims)?, &inverse)
}

/// Projector onto the linear span of valid bipartite process matrices.
pub fn lv_project(w: &ProcessMatrix) -> ProcessMatrix {
    let dims = w.dims;
    let tr = |subs: &[usize]| {
        trace_and_replace(&w.w, &dims, subs).expect("dimensions validated at construction")
    };
    let out = tr(&[A_O]) + tr(&[B_O]) - tr(&[A_O, B_O]) - tr(&[B_I, B_O]) + tr(&[A_O, B_I, B_O])
        - tr(&[A_I, A_O])
        + tr(&[A_I, A_O, B_O]);
    ProcessMatrix { dims, w: out }
}

/// Outcome of the three validity conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    pub min_eigenvalue: f64,
    pub trace: f64,
    pub expected_trace: f64,
    pub projector_defect: f64,
}

impl ValidityReport {
    pub fn positive(&self) -> bool {
        self.min_eigenvalue >= -PSD_TOL
    }

    pub fn trace_ok(&self) -> bool {
        (self.trace - self.expected_trace).abs() <= VALIDITY_TOL
    }

    pub fn fixed_point(&self) -> bool {
        self.projector_defect <= VALIDITY_TOL
    }

    pub fn is_valid(&self) -> bool {
        self.positive() && self.trace_ok() && self.fixed_point()
    }
}

pub fn validity_report(w: &ProcessMatrix) -> ValidityReport {
    let min_eigenvalue =
        hermitian_eigenvalues(&w.w).expect("hermiticity validated at construction")[0];
    ValidityReport {
        min_eigenvalue,
        trace: w.w.trace().re,
        expected_trace: (w.dims[A_O] * w.dims[B_O]) as f64,
        projector_defect: max_abs_diff(&lv_project(w).w, &w.w),
    }
}

/// `W ⪰ 0`, `Tr W = d_{A_O} d_{B_O}` and `W = L_V(W)`.
pub fn is_valid_process(w: &ProcessMatrix) -> (bool, ValidityReport) {
    let report = validity_report(w);
    (report.is_valid(), report)
}

/// Choi operator `Σᵢⱼ |i⟩⟨j| ⊗ Σₖ Kₖ|i⟩⟨j|Kₖ†` of a CP map (input first).
pub fn operation_choi(kraus: &[CMatrix]) -> Result<CMatrix> {
    let first = kraus.first().ok_or_else(|| {
        Error::InvalidParameter("operation needs at least one Kraus operator".into())
    })?;
    let (d_out, d_in) = first.shape();
    if kraus.iter().any(|k| k.shape() != (d_out, d_in)) {
        return Err(Error::DimensionMismatch(
            "Kraus operators differ in shape".into(),
        ));
    }
    let mut out = CMatrix::zeros(d_in * d_out, d_in * d_out);
    for i in 0..d_in {
        for j in 0..d_in {
            let e = unit(d_in, i, j);
            let image = kraus.iter().fold(CMatrix::zeros(d_out, d_out), |acc, k| {
                acc + k * &e * k.adjoint()
            });
            out += tensor(&e, &image);
        }
    }
    Ok(out)
}

/// Local instrument: `ops[x][a]` is the Choi operator of outcome `a` for
/// setting `x`, on `X_I ⊗ X_O`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    d_in: usize,
    d_out: usize,
    ops: Vec<Vec<CMatrix>>,
}

impl Instrument {
    /// Checks shapes only; completeness is reported by [`Instrument::completeness_defects`].
    pub fn new(d_in: usize, d_out: usize, ops: Vec<Vec<CMatrix>>) -> Result<Self> {
        if ops.is_empty() || ops.iter().any(Vec::is_empty) {
            return Err(Error::InvalidParameter(
                "instrument needs settings and outcomes".into(),
            ));
        }
        let k = ops[0].len();
        if ops.iter().any(|o| o.len() != k) {
            return Err(Error::InvalidParameter(
                "every setting needs the same outcome count".into(),
            ));
        }
        for (x, row) in ops.iter().enumerate() {
            for (a, m) in row.iter().enumerate() {
                ensure_square(m, d_in * d_out, &format!("instrument element ({a}|{x})"))?;
            }
        }
        Ok(Self { d_in, d_out, ops })
    }

    pub fn settings(&self) -> usize {
        self.ops.len()
    }

    pub fn outcomes(&self) -> usize {
        self.ops[0].len()
    }

    pub fn element(&self, outcome: usize, setting: usize) -> Result<&CMatrix> {
        let row = self.ops.get(setting).ok_or(Error::IndexOutOfRange {
            index: setting,
            count: self.settings(),
        })?;
        row.get(outcome).ok_or(Error::IndexOutOfRange {
            index: outcome,
            count: self.outcomes(),
        })
    }

    /// `max |Σ_a Tr_out A_{a|x} − 𝟙|` for each setting `x`.
    pub fn completeness_defects(&self) -> Vec<f64> {
        let dv = DimensionVector::new(vec![self.d_in, self.d_out]).expect("positive dimensions");
        let id = identity(self.d_in);
        self.ops
            .iter()
            .map(|row| {
                let sum = row.iter().fold(
                    CMatrix::zeros(self.d_in * self.d_out, self.d_in * self.d_out),
                    |acc, m| acc + m,
                );
                let reduced = partial_trace(&sum, &dv, &[0]).expect("shape validated");
                max_abs_diff(&reduced, &id)
            })
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.completeness_defects()
            .iter()
            .all(|&d| d <= INSTRUMENT_TOL)
    }

    /// Lüders measurement of a ±1-valued observable per setting with the
    /// post-measurement state sent on; outcome 0 is `+1`, outcome 1 is `−1`.
    pub fn luders(observables: &[CMatrix]) -> Result<Self> {
        let d = observables
            .first()
            .ok_or_else(|| Error::InvalidParameter("no observables".into()))?
            .nrows();
        let id = identity(d);
        let ops = observables
            .iter()
            .map(|o| {
                ensure_square(o, d, "observable")?;
                [1.0, -1.0]
                    .into_iter()
                    .map(|s| operation_choi(&[(&id + o * c(s)) * c(0.5)]))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, d, ops)
    }

    /// Every element `𝟙/(d_out·k)`: outcomes are uniform whatever the process.
    pub fn uniform_noise(
        d_in: usize,
        d_out: usize,
        settings: usize,
        outcomes: usize,
    ) -> Result<Self> {
        if settings == 0 || outcomes == 0 {
            return Err(Error::InvalidParameter(
                "need at least one setting and outcome".into(),
            ));
        }
        let m = identity(d_in * d_out) * c(1.0 / (d_out * outcomes) as f64);
        Self::new(d_in, d_out, vec![vec![m; outcomes]; settings])
    }

    /// Qubit instrument of the causal-game example.
    ///
    /// Setting 0 always answers 1 and forwards the input. Setting 1 measures
    /// `Z` and answers the result; the variant fixes what is sent on.
    pub fn causal_game(variant: GameInstrumentVariant) -> Self {
        let phi = CMatrix::from_fn(4, 1, |r, _| if r == 0 || r == 3 { c(1.0) } else { c(0.0) });
        let setting0 = vec![CMatrix::zeros(4, 4), outer(&phi)];
        let setting1 = (0..2)
            .map(|a| match variant {
                GameInstrumentVariant::Reprepare => tensor(&unit(2, a, a), &unit(2, 0, 0)),
                GameInstrumentVariant::Literal => tensor(&unit(2, a, a), &identity(2)) * c(0.5),
            })
            .collect();
        Self::new(2, 2, vec![setting0, setting1]).expect("fixed qubit shapes")
    }
}

/// Choice of the setting-1 operations in [`Instrument::causal_game`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GameInstrumentVariant {
    /// `|a⟩⟨a| ⊗ |0⟩⟨0|`: measure, then send `|0⟩`.
    #[default]
    Reprepare,
    /// `½|a⟩⟨a| ⊗ 𝟙`: measure, then send the maximally mixed state.
    Literal,
}

/// Conditional outcome table `p(a, b|x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    pub m_a: usize,
    pub m_b: usize,
    pub k_a: usize,
    pub k_b: usize,
    values: Vec<f64>,
}

impl ProbabilityTable {
    pub fn from_fn(
        m_a: usize,
        m_b: usize,
        k_a: usize,
        k_b: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let mut values = Vec::with_capacity(m_a * m_b * k_a * k_b);
        for x in 0..m_a {
            for y in 0..m_b {
                for a in 0..k_a {
                    for b in 0..k_b {
                        values.push(f(a, b, x, y));
                    }
                }
            }
        }
        Self {
            m_a,
            m_b,
            k_a,
            k_b,
            values,
        }
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.values[((x * self.m_b + y) * self.k_a + a) * self.k_b + b]
    }

    /// Largest `|Σ_{a,b} p(a,b|x,y) − 1|` over input pairs.
    pub fn normalization_defect(&self) -> f64 {
        self.values
            .chunks(self.k_a * self.k_b)
            .map(|block| (block.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn ensure_binary_game(&self) -> Result<()> {
        if [self.m_a, self.m_b, self.k_a, self.k_b] != [2; 4] {
            return Err(Error::DimensionMismatch(
                "causal games need two inputs and two outputs per party".into(),
            ));
        }
        let defect = self.normalization_defect();
        if defect > VALIDITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "table not normalized (defect {defect:.3e})"
            )));
        }
        Ok(())
    }

    fn game_score(&self, win: impl Fn(usize, usize, usize, usize) -> bool) -> Result<f64> {
        self.ensure_binary_game()?;
        let mut s = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        if win(a, b, x, y) {
                            s += self.get(a, b, x, y);
                        }
                    }
                }
            }
        }
        Ok(s / 4.0)
    }
}

/// `p(a, b|x, y) = Tr[Wᵀ (A_{a|x} ⊗ B_{b|y})]`.
pub fn process_correlation(
    w: &ProcessMatrix,
    alice: &Instrument,
    bob: &Instrument,
    x: usize,
    y: usize,
    a_out: usize,
    b_out: usize,
) -> Result<f64> {
    check_instruments(w, alice, bob)?;
    let m = tensor(alice.element(a_out, x)?, bob.element(b_out, y)?);
    Ok(trace_of_transposed_product(&w.w, &m))
}

/// `Tr[Wᵀ M] = Σᵢⱼ Wⱼᵢ Mⱼᵢ`.
fn trace_of_transposed_product(w: &CMatrix, m: &CMatrix) -> f64 {
    w.iter().zip(m.iter()).map(|(a, b)| (a * b).re).sum()
}

fn check_instruments(w: &ProcessMatrix, alice: &Instrument, bob: &Instrument) -> Result<()> {
    let d = w.dims;
    if [alice.d_in, alice.d_out, bob.d_in, bob.d_out] != d {
        return Err(Error::DimensionMismatch(format!(
            "instruments act on ({}, {}, {}, {}), process on {d:?}",
            alice.d_in, alice.d_out, bob.d_in, bob.d_out
        )));
    }
    Ok(())
}

/// Full outcome table of a process with two local instruments.
pub fn probability_table(
    w: &ProcessMatrix,
    alice: &Instrument,
    bob: &Instrument,
) -> Result<ProbabilityTable> {
    check_instruments(w, alice, bob)?;
    let mut err = None;
    let table = ProbabilityTable::from_fn(
        alice.settings(),
        bob.settings(),
        alice.outcomes(),
        bob.outcomes(),
        |a, b, x, y| {
            process_correlation(w, alice, bob, x, y, a, b).unwrap_or_else(|e| {
                err = Some(e);
                f64::NAN
            })
        },
    );
    err.map_or(Ok(table), Err)
}

/// `¼ Σ δ_{a,y} δ_{b,x} p(a, b|x, y)`; causal bound ½.
pub fn gyni_score(p: &ProbabilityTable) -> Result<f64> {
    p.game_score(|a, b, x, y| a == y && b == x)
}

/// `¼ Σ δ_{x(a⊕y),0} δ_{y(b⊕x),0} p(a, b|x, y)`; causal bound ¾.
pub fn lgyni_score(p: &ProbabilityTable) -> Result<f64> {
    p.game_score(|a, b, x, y| x * (a ^ y) == 0 && y * (b ^ x) == 0)
}

/// Closed-form vertex count of the bipartite causal polytope.
pub fn count_causal_vertices(m_a: u32, m_b: u32, k_a: u64, k_b: u64) -> Result<u128> {
    if m_a == 0 || m_b == 0 || k_a == 0 || k_b == 0 {
        return Err(Error::InvalidParameter(
            "all counts must be at least 1".into(),
        ));
    }
    let pow = |base: u64, exp: u32| {
        (base as u128)
            .checked_pow(exp)
            .ok_or_else(|| Error::InvalidParameter("vertex count overflows".into()))
    };
    let mul = |a: u128, b: u128| {
        a.checked_mul(b)
            .ok_or_else(|| Error::InvalidParameter("vertex count overflows".into()))
    };
    let a_first = mul(pow(k_a, m_a)?, pow(k_b, m_a * m_b)?)?;
    let b_first = mul(pow(k_a, m_a * m_b)?, pow(k_b, m_b)?)?;
    let both = mul(pow(k_a, m_a)?, pow(k_b, m_b)?)?;
    Ok(a_first + b_first - both)
}

/// Deterministic causal strategies beyond this many are not enumerated.
pub const MAX_ENUMERATED_STRATEGIES: u128 = 1 << 22;

/// All distinct deterministic causal tables: `a = f(x), b = g(x, y, a)` or
/// `b = h(y), a = k(x, y, b)`. Each is stored as the answer pair per `(x, y)`.
pub fn enumerate_causal_vertices(
    m_a: usize,
    m_b: usize,
    k_a: usize,
    k_b: usize,
) -> Result<Vec<ProbabilityTable>> {
    let per_order = count_causal_vertices(m_a as u32, m_b as u32, k_a as u64, k_b as u64)?;
    if per_order > MAX_ENUMERATED_STRATEGIES {
        return Err(Error::InvalidParameter(format!(
            "{per_order} vertices is too many to enumerate"
        )));
    }
    let pairs = m_a * m_b;
    let mut seen: HashSet<Vec<(usize, usize)>> = HashSet::new();
    let mut out = Vec::new();
    let mut push = |answers: Vec<(usize, usize)>| {
        if seen.insert(answers.clone()) {
            out.push(ProbabilityTable::from_fn(
                m_a,
                m_b,
                k_a,
                k_b,
                |a, b, x, y| f64::from(u8::from(answers[x * m_b + y] == (a, b))),
            ));
        }
    };
    // Since a is fixed by x, b may depend on (x, y) alone.
    for f in functions(m_a, k_a) {
        for g in functions(pairs, k_b) {
            push((0..pairs).map(|xy| (f[xy / m_b], g[xy])).collect());
        }
    }
    for h in functions(m_b, k_b) {
        for k in functions(pairs, k_a) {
            push((0..pairs).map(|xy| (k[xy], h[xy % m_b])).collect());
        }
    }
    Ok(out)
}

/// Every map `{0..domain} → {0..range}` as a value list.
fn functions(domain: usize, range: usize) -> Vec<Vec<usize>> {
    let count = range.pow(domain as u32);
    (0..count)
        .map(|mut code| {
            (0..domain)
                .map(|_| {
                    let v = code % range;
                    code /= range;
                    v
                })
                .collect()
        })
        .collect()
}

/// Ancilla-augmented pseudo-density matrix for settings `(x, y)`:
/// `|x⟩⟨x|^X ⊗ |y⟩⟨y|^Y ⊗ W / (d_{A_O} d_{B_O})`, unit trace, with factors
/// reordered to `X ⊗ A_I ⊗ A_O ⊗ Y ⊗ B_I ⊗ B_O`.
pub fn ancilla_pdm(
    w: &ProcessMatrix,
    x: usize,
    y: usize,
    m_a: usize,
    m_b: usize,
) -> Result<CMatrix> {
    if x >= m_a || y >= m_b {
        return Err(Error::IndexOutOfRange {
            index: x.max(y),
            count: m_a.min(m_b),
        });
    }
    let d = w.dims;
    let scale = 1.0 / (d[A_O] * d[B_O]) as f64;
    let full = kron_all([unit(m_a, x, x), unit(m_b, y, y), w.w.clone() * c(scale)]);
    let dims = DimensionVector::new(vec![m_a, m_b, d[0], d[1], d[2], d[3]])?;
    permute_subsystems(&full, &dims, &[0, 2, 3, 1, 4, 5])
}

/// Setting-controlled instrument element `Σ_x |x⟩⟨x| ⊗ A_{a|x}`.
fn controlled_element(inst: &Instrument, outcome: usize) -> CMatrix {
    let m = inst.settings();
    (0..m).fold(
        CMatrix::zeros(m * inst.d_in * inst.d_out, m * inst.d_in * inst.d_out),
        |acc, x| acc + tensor(&unit(m, x, x), &inst.ops[x][outcome]),
    )
}

/// Outcome table read off the ancilla-augmented PDMs:
/// `p(a, b|x, y) = d_{A_O} d_{B_O} Tr[R_{xy}ᵀ (M_a ⊗ M_b)]`.
pub fn pdm_probability_table(
    w: &ProcessMatrix,
    alice: &Instrument,
    bob: &Instrument,
) -> Result<ProbabilityTable> {
    check_instruments(w, alice, bob)?;
    let (m_a, m_b) = (alice.settings(), bob.settings());
    let scale = (w.dims[A_O] * w.dims[B_O]) as f64;
    let ma: Vec<CMatrix> = (0..alice.outcomes())
        .map(|a| controlled_element(alice, a))
        .collect();
    let mb: Vec<CMatrix> = (0..bob.outcomes())
        .map(|b| controlled_element(bob, b))
        .collect();
    let mut rs = Vec::with_capacity(m_a * m_b);
    for x in 0..m_a {
        for y in 0..m_b {
            rs.push(ancilla_pdm(w, x, y, m_a, m_b)?);
        }
    }
    Ok(ProbabilityTable::from_fn(
        m_a,
        m_b,
        alice.outcomes(),
        bob.outcomes(),
        |a, b, x, y| scale * trace_of_transposed_product(&rs[x * m_b + y], &tensor(&ma[a], &mb[b])),
    ))
}

/// `(GYNI, LGYNI)` of the example process evaluated through the
/// ancilla-augmented PDM.
pub fn pdm_gyni_demo(variant: GameInstrumentVariant) -> Result<(f64, f64)> {
    let inst = Instrument::causal_game(variant);
    let table = pdm_probability_table(&ProcessMatrix::causal_game_example(), &inst, &inst)?;
    Ok((gyni_score(&table)?, lgyni_score(&table)?))
}

/// `(GYNI, LGYNI)` of the example process evaluated directly.
pub fn process_gyni_demo(variant: GameInstrumentVariant) -> Result<(f64, f64)> {
    let inst = Instrument::causal_game(variant);
    let table = probability_table(&ProcessMatrix::causal_game_example(), &inst, &inst)?;
    Ok((gyni_score(&table)?, lgyni_score(&table)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_algebra::{haar_random_unitary, random_density_matrix, random_hermitian};

    fn gyni_closed_form() -> f64 {
        5.0 / 16.0 * (1.0 + std::f64::consts::FRAC_1_SQRT_2)
    }

    fn loop_process() -> ProcessMatrix {
        // [[𝟙]]^{A_O B_I} ⊗ [[𝟙]]^{B_O A_I}, reordered to A_I A_O B_I B_O.
        let phi = pure_choi(&identity(2));
        let raw = tensor(&phi, &phi); // A_O B_I B_O A_I
        let dims = DimensionVector::new(vec![2; 4]).unwrap();
        let w = permute_subsystems(&raw, &dims, &[3, 0, 1, 2]).unwrap();
        ProcessMatrix::new([2; 4], w).unwrap()
    }

    #[test]
    fn projector_is_idempotent_and_trace_preserving() {
        for seed in 0..3 {
            let w = ProcessMatrix::new([2; 4], random_hermitian(16, seed)).unwrap();
            let once = lv_project(&w);
            let twice = lv_project(&once);
            assert!(max_abs_diff(&once.w, &twice.w) < 1e-10);
            assert!((once.w.trace() - w.w.trace()).norm() < 1e-10);
        }
        let w = ProcessMatrix::new([2, 3, 2, 2], random_hermitian(24, 9)).unwrap();
        let once = lv_project(&w);
        assert!(max_abs_diff(&once.w, &lv_project(&once).w) < 1e-10);
    }

    #[test]
    fn valid_examples() {
        let id = identity(2);
        let w = ProcessMatrix::channel_process(&(id.clone() * c(0.5)), &id).unwrap();
        assert!(is_valid_process(&w).0);
        let u = haar_random_unitary(2, 4);
        let w = ProcessMatrix::channel_process(&random_density_matrix(2, 5), &u).unwrap();
        assert!(is_valid_process(&w).0);
        assert!(is_valid_process(&ProcessMatrix::causal_game_example()).0);
        let noise = ProcessMatrix::new([2; 4], identity(16) * c(0.25)).unwrap();
        assert!(max_abs_diff(&lv_project(&noise).w, &noise.w) < 1e-12);

        let neg = ProcessMatrix::new([2; 4], identity(16) * c(-0.25)).unwrap();
        let (ok, report) = is_valid_process(&neg);
        assert!(!ok && !report.positive());

        let lp = loop_process();
        let (ok, report) = is_valid_process(&lp);
        assert!(!ok && !report.fixed_point(), "{report:?}");
    }

    #[test]
    fn trace_and_replace_matches_definition() {
        let w = random_hermitian(8, 2);
        let out = trace_and_replace(&w, &[2, 2, 2], &[1]).unwrap();
        let dv = DimensionVector::new(vec![2, 2, 2]).unwrap();
        let reduced = partial_trace(&w, &dv, &[0, 2]).unwrap();
        let rebuilt =
            permute_subsystems(&tensor(&reduced, &(identity(2) * c(0.5))), &dv, &[0, 2, 1])
                .unwrap();
        assert!(max_abs_diff(&out, &rebuilt) < 1e-14);
    }

    #[test]
    fn pauli_measurements_give_unitary_correlation() {
        let u = haar_random_unitary(2, 17);
        let w = ProcessMatrix::channel_process(&random_density_matrix(2, 18), &u).unwrap();
        for i in 1..=3u8 {
            for j in 1..=3u8 {
                let a = Instrument::luders(&[pauli(i)]).unwrap();
                let b = Instrument::luders(&[pauli(j)]).unwrap();
                let t = probability_table(&w, &a, &b).unwrap();
                assert!(t.normalization_defect() < 1e-12);
                let signed =
                    t.get(0, 0, 0, 0) - t.get(0, 1, 0, 0) - t.get(1, 0, 0, 0) + t.get(1, 1, 0, 0);
                let expected = 0.5 * (pauli(j) * &u * pauli(i) * u.adjoint()).trace().re;
                assert!((signed - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn game_example_scores() {
        let inst = Instrument::causal_game(GameInstrumentVariant::Reprepare);
        assert!(inst.is_complete());
        let (g, l) = process_gyni_demo(GameInstrumentVariant::Reprepare).unwrap();
        assert!((g - gyni_closed_form()).abs() < 1e-12);
        assert!((l - gyni_closed_form() - 0.25).abs() < 1e-12);
        let (pg, pl) = pdm_gyni_demo(GameInstrumentVariant::Reprepare).unwrap();
        assert!((pg - g).abs() < 1e-10 && (pl - l).abs() < 1e-10);

        // The literal operations are complete but do not violate either bound.
        assert!(Instrument::causal_game(GameInstrumentVariant::Literal).is_complete());
        let (g, l) = process_gyni_demo(GameInstrumentVariant::Literal).unwrap();
        assert!(g < 0.5 && l < 0.75);
    }

    #[test]
    fn uniform_noise_is_uniform() {
        let noise = Instrument::uniform_noise(2, 2, 2, 2).unwrap();
        let w = ProcessMatrix::causal_game_example();
        let t = probability_table(&w, &noise, &noise).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        assert!((t.get(a, b, x, y) - 0.25).abs() < 1e-12);
                    }
                }
            }
        }
        assert!((gyni_score(&t).unwrap() - 0.25).abs() < 1e-12);
        let pt = pdm_probability_table(&w, &noise, &noise).unwrap();
        assert!((gyni_score(&pt).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn vertex_counts() {
        assert_eq!(count_causal_vertices(2, 2, 2, 2).unwrap(), 112);
        assert_eq!(count_causal_vertices(1, 1, 2, 2).unwrap(), 4);
        assert_eq!(count_causal_vertices(1, 1, 1, 1).unwrap(), 1);
        assert!(count_causal_vertices(0, 1, 1, 1).is_err());
        for (ma, mb, ka, kb) in [(2, 2, 2, 2), (1, 1, 2, 2), (1, 1, 1, 1), (2, 1, 3, 2)] {
            let v = enumerate_causal_vertices(ma, mb, ka, kb).unwrap();
            assert_eq!(
                v.len() as u128,
                count_causal_vertices(ma as u32, mb as u32, ka as u64, kb as u64).unwrap()
            );
        }
    }

    #[test]
    fn deterministic_strategies_respect_bounds() {
        for t in enumerate_causal_vertices(2, 2, 2, 2).unwrap() {
            assert!(gyni_score(&t).unwrap() <= 0.5);
            assert!(lgyni_score(&t).unwrap() <= 0.75);
        }
    }

    #[test]
    fn unnormalized_table_rejected() {
        let t = ProbabilityTable::from_fn(2, 2, 2, 2, |_, _, _, _| 0.3);
        assert!(gyni_score(&t).is_err());
        let t = ProbabilityTable::from_fn(1, 1, 2, 2, |_, _, _, _| 0.25);
        assert!(lgyni_score(&t).is_err());
    }
}
