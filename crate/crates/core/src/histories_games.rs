//! Consistent-histories decoherence functionals and quantum-classical
//! signalling games.
//!
//! A history is a label tuple `[α₁, …, αₙ]` picking one projector per time.
//! Its class operator is `C_α = P^n_{αₙ} Uₙ₋₁ ⋯ U₁ P^1_{α₁}` and
//! `D(α, α′) = Tr[C_α ρ C_{α′}†]`, which is the Heisenberg-picture nested trace
//! with the gap unitaries moved onto the state.

use rayon::prelude::*;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::operator_algebra::{
    ensure_square, ensure_unitary, identity, max_abs_diff, pairwise_sum, CMatrix, C64, DEFAULT_TOL,
};
use crate::pdm::TemporalProcess;

/// Tolerance on projector exhaustiveness and exclusivity.
pub const PROJECTOR_TOL: f64 = 1e-10;

/// Initial state, one exhaustive exclusive projector set per time, and the
/// Schrödinger-picture unitaries acting in each gap.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryFamily {
    initial: CMatrix,
    projector_sets: Vec<Vec<CMatrix>>,
    unitaries: Vec<CMatrix>,
}

impl HistoryFamily {
    pub fn new(
        initial: CMatrix,
        projector_sets: Vec<Vec<CMatrix>>,
        unitaries: Vec<CMatrix>,
    ) -> Result<Self> {
        let d = initial.nrows();
        ensure_square(&initial, d, "initial state")?;
        if projector_sets.is_empty() {
            return Err(Error::InvalidParameter(
                "a history needs at least one time".into(),
            ));
        }
        if unitaries.len() + 1 != projector_sets.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} times need {} unitaries, got {}",
                projector_sets.len(),
                projector_sets.len() - 1,
                unitaries.len()
            )));
        }
        for u in &unitaries {
            ensure_square(u, d, "gap unitary")?;
            ensure_unitary(u, DEFAULT_TOL)?;
        }
        let id = identity(d);
        for (t, set) in projector_sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "time {t} has no projectors"
                )));
            }
            let mut sum = CMatrix::zeros(d, d);
            for (a, p) in set.iter().enumerate() {
                ensure_square(p, d, &format!("projector {a} at time {t}"))?;
                for (b, q) in set.iter().enumerate() {
                    let expected = if a == b {
                        p.clone()
                    } else {
                        CMatrix::zeros(d, d)
                    };
                    if max_abs_diff(&(p * q), &expected) > PROJECTOR_TOL {
                        return Err(Error::Precondition(format!(
                            "projectors {a} and {b} at time {t} are not mutually exclusive projectors"
                        )));
                    }
                }
                sum += p;
            }
            if max_abs_diff(&sum, &id) > PROJECTOR_TOL {
                return Err(Error::Precondition(format!(
                    "projectors at time {t} are not exhaustive"
                )));
            }
        }
        Ok(Self {
            initial,
            projector_sets,
            unitaries,
        })
    }

    /// Two-outcome family of `±1`-valued observables, label 0 for `+1`.
    pub fn from_observables(
        initial: CMatrix,
        observables: &[CMatrix],
        unitaries: Vec<CMatrix>,
    ) -> Result<Self> {
        let d = initial.nrows();
        let id = identity(d);
        let sets = observables
            .iter()
            .map(|o| {
                ensure_square(o, d, "observable")?;
                Ok(vec![
                    (&id + o) * C64::new(0.5, 0.0),
                    (&id - o) * C64::new(0.5, 0.0),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(initial, sets, unitaries)
    }

    pub fn times(&self) -> usize {
        self.projector_sets.len()
    }

    pub fn outcome_counts(&self) -> Vec<usize> {
        self.projector_sets.iter().map(Vec::len).collect()
    }

    /// Every history, last time varying fastest.
    pub fn histories(&self) -> Vec<Vec<usize>> {
        let counts = self.outcome_counts();
        let total: usize = counts.iter().product();
        (0..total)
            .map(|mut code| {
                let mut h = vec![0; counts.len()];
                for (slot, &k) in h.iter_mut().zip(&counts).rev() {
                    *slot = code % k;
                    code /= k;
                }
                h
            })
            .collect()
    }

    fn check_history(&self, h: &[usize]) -> Result<()> {
        if h.len() != self.times() {
            return Err(Error::DimensionMismatch(format!(
                "history of length {} for {} times",
                h.len(),
                self.times()
            )));
        }
        for (set, &a) in self.projector_sets.iter().zip(h) {
            if a >= set.len() {
                return Err(Error::IndexOutOfRange {
                    index: a,
                    count: set.len(),
                });
            }
        }
        Ok(())
    }

    /// `C_α = P^n_{αₙ} Uₙ₋₁ ⋯ U₁ P^1_{α₁}`.
    pub fn class_operator(&self, h: &[usize]) -> Result<CMatrix> {
        self.check_history(h)?;
        let mut c = self.projector_sets[0][h[0]].clone();
        for (t, u) in self.unitaries.iter().enumerate() {
            c = &self.projector_sets[t + 1][h[t + 1]] * u * c;
        }
        Ok(c)
    }

    /// Coarse-grained family: `partitions[t]` groups the fine labels at time `t`.
    pub fn coarse_grained(&self, partitions: &[Vec<Vec<usize>>]) -> Result<Self> {
        check_partitions(&self.outcome_counts(), partitions)?;
        let d = self.initial.nrows();
        let sets = self
            .projector_sets
            .iter()
            .zip(partitions)
            .map(|(set, groups)| {
                groups
                    .iter()
                    .map(|g| g.iter().fold(CMatrix::zeros(d, d), |acc, &a| acc + &set[a]))
                    .collect()
            })
            .collect();
        Self::new(self.initial.clone(), sets, self.unitaries.clone())
    }
}

fn check_partitions(counts: &[usize], partitions: &[Vec<Vec<usize>>]) -> Result<()> {
    if partitions.len() != counts.len() {
        return Err(Error::DimensionMismatch(
            "one partition per time is required".into(),
        ));
    }
    for (t, (groups, &k)) in partitions.iter().zip(counts).enumerate() {
        let mut seen = vec![false; k];
        for &a in groups.iter().flatten() {
            if a >= k || std::mem::replace(&mut seen[a], true) {
                return Err(Error::InvalidParameter(format!(
                    "partition at time {t} is not a partition of 0..{k}"
                )));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParameter(format!(
                "partition at time {t} misses labels"
            )));
        }
    }
    Ok(())
}

/// `D([α], [α′]) = Tr[C_α ρ C_{α′}†]`.
pub fn decoherence_functional(
    f: &HistoryFamily,
    hist: &[usize],
    hist_prime: &[usize],
) -> Result<C64> {
    let c = f.class_operator(hist)?;
    let cp = f.class_operator(hist_prime)?;
    Ok((c * &f.initial * cp.adjoint()).trace())
}

/// All entries `D(α, α′)` over the family's histories.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceFunctional {
    pub histories: Vec<Vec<usize>>,
    pub entries: CMatrix,
}

impl DecoherenceFunctional {
    pub fn compute(f: &HistoryFamily) -> Result<Self> {
        let histories = f.histories();
        let classes: Vec<CMatrix> = histories
            .par_iter()
            .map(|h| f.class_operator(h))
            .collect::<Result<_>>()?;
        let evolved: Vec<CMatrix> = classes.par_iter().map(|c| c * &f.initial).collect();
        let n = histories.len();
        let rows: Vec<Vec<C64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| trace_product_adjoint(&evolved[i], &classes[j]))
                    .collect()
            })
            .collect();
        let entries = CMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Ok(Self { histories, entries })
    }

    /// `Σ D` over all pairs; equals `Tr ρ`.
    pub fn total(&self) -> C64 {
        let re: Vec<f64> = self.entries.iter().map(|z| z.re).collect();
        let im: Vec<f64> = self.entries.iter().map(|z| z.im).collect();
        C64::new(pairwise_sum(&re), pairwise_sum(&im))
    }

    /// `max |D(α, α′) − D(α′, α)*|`.
    pub fn hermiticity_defect(&self) -> f64 {
        crate::operator_algebra::hermiticity_defect(&self.entries)
    }

    /// Largest off-diagonal `|Re D|` (weak) or `|D|` (strong).
    pub fn max_interference(&self, kind: Consistency) -> f64 {
        let n = self.entries.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let z = self.entries[(i, j)];
                    worst = worst.max(match kind {
                        Consistency::Weak => z.re.abs(),
                        Consistency::Strong => z.norm(),
                    });
                }
            }
        }
        worst
    }

    /// Sums fine entries within each coarse class pair.
    pub fn coarse_grain(&self, partitions: &[Vec<Vec<usize>>]) -> Result<Self> {
        let counts: Vec<usize> = (0..partitions.len())
            .map(|t| self.histories.iter().map(|h| h[t] + 1).max().unwrap_or(0))
            .collect();
        check_partitions(&counts, partitions)?;
        let group_of: Vec<Vec<usize>> = partitions
            .iter()
            .zip(&counts)
            .map(|(groups, &k)| {
                let mut g = vec![0; k];
                for (gi, members) in groups.iter().enumerate() {
                    for &a in members {
                        g[a] = gi;
                    }
                }
                g
            })
            .collect();
        let coarse_counts: Vec<usize> = partitions.iter().map(Vec::len).collect();
        let index = |h: &[usize]| {
            h.iter()
                .enumerate()
                .fold(0, |acc, (t, &a)| acc * coarse_counts[t] + group_of[t][a])
        };
        let total: usize = coarse_counts.iter().product();
        let mut entries = CMatrix::zeros(total, total);
        for (i, hi) in self.histories.iter().enumerate() {
            for (j, hj) in self.histories.iter().enumerate() {
                entries[(index(hi), index(hj))] += self.entries[(i, j)];
            }
        }
        let histories = (0..total)
            .map(|mut code| {
                let mut h = vec![0; coarse_counts.len()];
                for (slot, &k) in h.iter_mut().zip(&coarse_counts).rev() {
                    *slot = code % k;
                    code /= k;
                }
                h
            })
            .collect();
        Ok(Self { histories, entries })
    }
}

/// `Tr[A B†]` without forming the product.
fn trace_product_adjoint(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consistency {
    /// Off-diagonal real parts vanish.
    Weak,
    /// Off-diagonal entries vanish.
    Strong,
}

pub fn is_consistent(f: &HistoryFamily, tol: f64, kind: Consistency) -> Result<bool> {
    Ok(DecoherenceFunctional::compute(f)?.max_interference(kind) < tol)
}

/// `Σ_α α₁⋯αₙ D([α], [α])` for a two-outcome family, outcome 0 counted as
/// `+1` and outcome 1 as `−1`.
pub fn pdm_correlation_from_df(f: &HistoryFamily) -> Result<f64> {
    if f.outcome_counts().iter().any(|&k| k != 2) {
        return Err(Error::Precondition(
            "every time needs a ± projector pair".into(),
        ));
    }
    let terms: Vec<f64> = f
        .histories()
        .iter()
        .map(|h| {
            let sign = if h.iter().filter(|&&a| a == 1).count() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            decoherence_functional(f, h, h).map(|d| sign * d.re)
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&terms))
}

/// Temporal process with the same state and unitary gaps as `f`.
pub fn matching_process(f: &HistoryFamily) -> Result<TemporalProcess> {
    let steps = f
        .unitaries
        .iter()
        .map(|u| KrausChannel::unitary(u.clone()))
        .collect::<Result<_>>()?;
    TemporalProcess::new(f.initial.clone(), steps)
}

/// `p_q(a, b|x) = Tr[(𝒩 ∘ Φ^a)(τ^x) Ψ^{b|a}]`, indexed `[x][a][b]`.
///
/// `phi[a]` is the Kraus family of outcome `a`, `psi[a][b]` the POVM used
/// after outcome `a`.
pub fn signalling_game_probability(
    tau: &[CMatrix],
    phi: &[Vec<CMatrix>],
    memory: &KrausChannel,
    psi: &[Vec<CMatrix>],
) -> Result<Vec<Vec<Vec<f64>>>> {
    let d_in = memory.in_dim();
    let d = tau
        .first()
        .map(|t| t.nrows())
        .ok_or_else(|| Error::InvalidParameter("no input states".into()))?;
    for t in tau {
        ensure_square(t, d, "encoded state")?;
    }
    let mut completeness = CMatrix::zeros(d, d);
    for family in phi {
        for k in family {
            if k.ncols() != d || k.nrows() != d_in {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {}x{} between {d} and memory input {d_in}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            completeness += k.adjoint() * k;
        }
    }
    let defect = max_abs_diff(&completeness, &identity(d));
    if defect > 1e-10 {
        return Err(Error::IncompleteInstrument(format!(
            "Σ K†K deviates from 𝟙 by {defect:.3e}"
        )));
    }
    if psi.len() != phi.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} POVMs for {} outcomes",
            psi.len(),
            phi.len()
        )));
    }
    let d_out = memory.out_dim();
    for (a, povm) in psi.iter().enumerate() {
        let mut sum = CMatrix::zeros(d_out, d_out);
        for e in povm {
            ensure_square(e, d_out, "POVM element")?;
            sum += e;
        }
        let defect = max_abs_diff(&sum, &identity(d_out));
        if defect > 1e-10 {
            return Err(Error::IncompleteInstrument(format!(
                "POVM after outcome {a} deviates by {defect:.3e}"
            )));
        }
    }
    Ok(tau
        .iter()
        .map(|t| {
            phi.iter()
                .zip(psi)
                .map(|(family, povm)| {
                    let branch = family.iter().fold(CMatrix::zeros(d_in, d_in), |acc, k| {
                        acc + k * t * k.adjoint()
                    });
                    let out = memory.apply_unchecked(&branch);
                    povm.iter().map(|e| (&out * e).trace().re).collect()
                })
                .collect()
        })
        .collect())
}
