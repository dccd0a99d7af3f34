//! Dense complex linear algebra and qubit/Pauli utilities.
//!
//! All operators are `CMatrix` values. Multipartite operators carry a
//! dimension list alongside them; index 0 is the leftmost tensor factor.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;

/// Default absolute tolerance for structural checks.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Real scalar as a complex number.
#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Ordered subsystem dimensions of a multipartite operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionVector {
    dims: Vec<usize>,
}

impl DimensionVector {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "dimensions must be positive and non-empty, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    fn check_matrix(&self, m: &CMatrix) -> Result<()> {
        let d = self.total();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} (total {d}) vs matrix {}x{}",
                self.dims,
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(())
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.dims.len() {
            return Err(Error::IndexOutOfRange {
                index,
                count: self.dims.len(),
            });
        }
        Ok(())
    }

    /// Stride of each subsystem in the flattened basis index.
    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }
}

impl TryFrom<&[usize]> for DimensionVector {
    type Error = Error;
    fn try_from(d: &[usize]) -> Result<Self> {
        Self::new(d.to_vec())
    }
}

/// One single-qubit Pauli label per event: 0 = I, 1 = X, 2 = Y, 3 = Z.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    indices: Vec<u8>,
}

impl PauliString {
    pub fn new(indices: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i > 3) {
            return Err(Error::InvalidParameter(format!(
                "Pauli index {bad} not in 0..=3"
            )));
        }
        Ok(Self { indices })
    }

    /// Parses strings such as `"XZ"` or `"IXYZ"`.
    pub fn parse(s: &str) -> Result<Self> {
        let indices = s
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' | '0' => Ok(0),
                'X' | '1' => Ok(1),
                'Y' | '2' => Ok(2),
                'Z' | '3' => Ok(3),
                other => Err(Error::InvalidParameter(format!(
                    "unknown Pauli label '{other}'"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(indices)
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// All 4ⁿ strings in lexicographic order (leftmost label most significant).
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..4usize.pow(n as u32)).map(move |mut k| {
            let mut idx = vec![0u8; n];
            for slot in idx.iter_mut().rev() {
                *slot = (k % 4) as u8;
                k /= 4;
            }
            PauliString { indices: idx }
        })
    }

    /// Tensor product of the labelled Pauli matrices.
    pub fn matrix(&self) -> CMatrix {
        kron_all(self.indices.iter().map(|&i| pauli(i)))
    }

    pub fn label(&self) -> String {
        self.indices
            .iter()
            .map(|&i| ['I', 'X', 'Y', 'Z'][i as usize])
            .collect()
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// Single-qubit Pauli matrix; `i` in 0..=3 (I, X, Y, Z).
///
/// # Panics
/// Panics if `i > 3`.
pub fn pauli(i: u8) -> CMatrix {
    let e = match i {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("Pauli index {i} out of range"),
    };
    CMatrix::from_row_slice(2, 2, &e)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Computational basis column vector |i⟩ in dimension `d`.
pub fn ket(d: usize, i: usize) -> CMatrix {
    let mut v = CMatrix::zeros(d, 1);
    v[(i, 0)] = ONE;
    v
}

/// |v⟩⟨v| for a column vector.
pub fn outer(v: &CMatrix) -> CMatrix {
    v * v.adjoint()
}

/// |i⟩⟨j| in dimension `d`.
pub fn unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

/// Hermitian conjugate.
pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Left-to-right Kronecker product of a sequence; the empty product is `[[1]]`.
pub fn kron_all<I: IntoIterator<Item = CMatrix>>(items: I) -> CMatrix {
    items
        .into_iter()
        .fold(CMatrix::from_element(1, 1, ONE), |acc, m| acc.kronecker(&m))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Largest entrywise modulus of `a − b`; infinite when shapes differ.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `m − m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    hermiticity_defect(m) <= tol
}

/// Largest entrywise modulus of `U†U − 𝟙`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    unitarity_defect(u) <= tol
}

pub fn ensure_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    let d = unitarity_defect(u);
    if d > tol {
        return Err(Error::NotUnitary(d));
    }
    Ok(())
}

pub fn ensure_square(m: &CMatrix, d: usize, what: &str) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "{what}: expected {d}x{d}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Splits a flat basis index into per-subsystem digits.
fn digits(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

/// Traces out every subsystem not listed in `keep`. Kept factors stay in
/// their original relative order.
pub fn partial_trace(m: &CMatrix, dims: &DimensionVector, keep: &[usize]) -> Result<CMatrix> {
    dims.check_matrix(m)?;
    for &k in keep {
        dims.check_index(k)?;
    }
    let d = dims.as_slice();
    let n = d.len();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..n).filter(|k| !kept.contains(k)).collect();
    let keep_dim: usize = kept.iter().map(|&k| d[k]).product();
    let total = dims.total();

    // (kept flat index, traced flat index) for every full basis index.
    let mut split = Vec::with_capacity(total);
    let mut dig = vec![0; n];
    for idx in 0..total {
        digits(idx, d, &mut dig);
        let ki = kept.iter().fold(0, |acc, &k| acc * d[k] + dig[k]);
        let ti = traced.iter().fold(0, |acc, &k| acc * d[k] + dig[k]);
        split.push((ki, ti));
    }
    let mut out = CMatrix::zeros(keep_dim, keep_dim);
    for i in 0..total {
        let (ki, ti) = split[i];
        for j in 0..total {
            let (kj, tj) = split[j];
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Transposes the selected tensor factor only.
pub fn partial_transpose(m: &CMatrix, dims: &DimensionVector, subsystem: usize) -> Result<CMatrix> {
    dims.check_matrix(m)?;
    dims.check_index(subsystem)?;
    let stride = dims.strides()[subsystem];
    let d = dims.as_slice()[subsystem];
    let total = dims.total();
    let digit = |idx: usize| (idx / stride) % d;
    let mut out = CMatrix::zeros(total, total);
    for i in 0..total {
        let si = digit(i);
        for j in 0..total {
            let sj = digit(j);
            let i2 = i - si * stride + sj * stride;
            let j2 = j - sj * stride + si * stride;
            out[(i2, j2)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Reorders tensor factors: output factor `k` is input factor `perm[k]`.
pub fn permute_subsystems(m: &CMatrix, dims: &DimensionVector, perm: &[usize]) -> Result<CMatrix> {
    dims.check_matrix(m)?;
    let n = dims.len();
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidParameter(format!(
            "permutation length {} != {n}",
            perm.len()
        )));
    }
    for &p in perm {
        dims.check_index(p)?;
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParameter(format!(
                "{perm:?} is not a permutation"
            )));
        }
    }
    let d = dims.as_slice();
    let new_dims: Vec<usize> = perm.iter().map(|&p| d[p]).collect();
    let total = dims.total();
    let mut map = vec![0; total];
    let mut dig = vec![0; n];
    for (idx, slot) in map.iter_mut().enumerate() {
        digits(idx, d, &mut dig);
        *slot = perm
            .iter()
            .zip(&new_dims)
            .fold(0, |acc, (&p, &nd)| acc * nd + dig[p]);
    }
    let mut out = CMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    hermitian_eigh(m).map(|(vals, _)| vals)
}

/// Ascending eigenvalues with the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let defect = hermiticity_defect(m);
    if defect > DEFAULT_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let h = (m + m.adjoint()) * c(0.5);
    let n = h.nrows();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = CMatrix::from_fn(n, order.len(), |r, col| eig.eigenvectors[(r, order[col])]);
    Ok((vals, vecs))
}

/// `exp(−i·t·H)` for Hermitian `H`, via spectral decomposition.
pub fn unitary_from_hamiltonian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eigh(h)?;
    let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&e| C64::from_polar(1.0, -e * t)),
    ));
    Ok(&vecs * phases * vecs.adjoint())
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().sum()
}

/// Haar-distributed unitary from the QR decomposition of a complex Ginibre
/// matrix, with the phases of `R`'s diagonal absorbed into `Q`.
pub fn haar_random_unitary(d: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_with_rng(d, &mut rng)
}

pub fn haar_with_rng<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / rkk.norm()
        } else {
            ONE
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Random mixed state `G G† / Tr(G G†)` with complex Ginibre `G`.
pub fn random_density_matrix(d: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(re, im)
    });
    let rho = &g * g.adjoint();
    let t = rho.trace();
    rho / t
}

/// Random normalized column vector.
pub fn random_state_vector(d: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = CMatrix::from_fn(d, 1, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(re, im)
    });
    let n = v.norm();
    v / c(n)
}

/// Random Hermitian matrix with standard-normal entries.
pub fn random_hermitian(d: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(re, im)
    });
    (&g + g.adjoint()) * c(0.5)
}

/// Pairwise (cascade) summation; the result depends only on the slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// The SWAP operator on `C^d ⊗ C^d`.
pub fn swap(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(i * d + j, j * d + i)] = ONE;
        }
    }
    s
}

/// Unnormalized maximally entangled projector Σᵢⱼ |ii⟩⟨jj|.
pub fn max_entangled_projector(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = ONE;
        }
    }
    m
}

/// Hadamard gate.
pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)])
}
