//! Command-line grammar. Leaf argument structs double as the `parameters`
//! object of a JSON config, so every field is (de)serializable.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "spacetime",
    version,
    about = "Run spacetime-correlation experiments and write machine-readable results",
    after_help = "Run without a command to list every experiment and its parameters."
)]
pub struct Cli {
    /// Output format (each experiment has its own default)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write results to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for stochastic experiments (mandatory for them)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tolerance for the consistency checks
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// JSON config; command-line flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Group>,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// List every experiment with its parameters
    List,
    /// Pseudo-density matrices of qubit processes
    #[command(subcommand)]
    Pdm(PdmCmd),
    /// Spacetime Gaussian states
    #[command(subcommand)]
    Gaussian(GaussianCmd),
    /// Spacetime Wigner functions in truncated Fock space
    #[command(subcommand, name = "cv-wigner")]
    CvWigner(CvWignerCmd),
    /// Process matrices and causal games
    #[command(subcommand, alias = "game")]
    Process(ProcessCmd),
    /// Consistent histories and decoherence functionals
    #[command(subcommand)]
    Histories(HistoriesCmd),
    /// Out-of-time-order correlators and related models
    #[command(subcommand)]
    Otoc(OtocCmd),
    /// Temporal order under noise and periodic driving
    #[command(subcommand)]
    Tc(TcCmd),
    /// Choi-Jamiolkowski operators
    #[command(subcommand)]
    Cj(CjCmd),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PdmArgs {
    /// Initial qubit state (zero, one, plus, minus, plus-i, minus-i, mixed, bloch:x,y,z)
    #[arg(long, default_value = "zero")]
    pub state: String,
    /// Comma-separated channels between consecutive events
    #[arg(long, default_value = "identity")]
    pub steps: String,
    /// Strength of noisy channels
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PdmCorrelationArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub process: PdmArgs,
    /// One Pauli label per event, e.g. ZX
    #[arg(long, default_value = "ZZ")]
    pub paulis: String,
}

#[derive(Debug, Subcommand)]
pub enum PdmCmd {
    /// Full PDM matrix
    Build(PdmArgs),
    /// PDM eigenvalues and causality monotone
    Eigen(PdmArgs),
    /// Event correlation of a Pauli string
    Correlation(PdmCorrelationArgs),
    /// Causality monotone (trace norm minus one)
    Monotone(PdmArgs),
    /// Two-time correlation triple and tetrahedron membership
    Tetra(PdmArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GaussianStateArgs {
    /// vacuum, thermal or tmss
    #[arg(long, default_value = "vacuum")]
    pub kind: String,
    /// Mean occupation of the thermal state
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
    /// Two-mode squeezing parameter
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GaussianTemporalArgs {
    /// Initial single-mode state: vacuum or thermal
    #[arg(long, default_value = "vacuum")]
    pub kind: String,
    /// Mean occupation of the thermal state
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
    /// Evolution between the two times: identity or rotation
    #[arg(long, default_value = "identity")]
    pub step: String,
    /// Phase-space rotation angle
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct UncertaintyArgs {
    /// Covariance matrix, rows separated by ';' (ordering q1,p1,q2,p2,...)
    #[arg(long)]
    pub cov: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PartialTransposeArgs {
    /// Squeezing parameter of the comparison two-mode squeezed state
    #[arg(long, default_value_t = 3.0)]
    pub r: f64,
}

#[derive(Debug, Subcommand)]
pub enum GaussianCmd {
    /// Covariance matrix of a standard state
    State(GaussianStateArgs),
    /// Two-time spacetime Gaussian state
    Temporal(GaussianTemporalArgs),
    /// Robertson-Schroedinger test of a covariance matrix
    Uncertainty(UncertaintyArgs),
    /// Partial transpose of the two-time thermal state against a squeezed state
    Pt(PartialTransposeArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct WignerPointArgs {
    /// First-time phase-space point re,im
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub alpha: String,
    /// Second-time phase-space point re,im
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub beta: String,
    /// Fock-space truncation
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    /// vacuum, fock:k or coherent:re,im
    #[arg(long, default_value = "vacuum")]
    pub state: String,
    /// identity or phase-damping
    #[arg(long, default_value = "identity")]
    pub channel: String,
    /// Also sample the measurement cascade this many times (needs --seed)
    #[arg(long)]
    pub shots: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct WignerNormArgs {
    /// Half-width of the square grid
    #[arg(long, default_value_t = 5.0)]
    pub radius: f64,
    /// Grid points per axis
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    /// Fock-space truncation
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    /// vacuum, fock:k or coherent:re,im
    #[arg(long, default_value = "vacuum")]
    pub state: String,
    /// identity or phase-damping
    #[arg(long, default_value = "identity")]
    pub channel: String,
}

#[derive(Debug, Subcommand)]
pub enum CvWignerCmd {
    /// Spacetime Wigner function at one pair of points
    Point(WignerPointArgs),
    /// Grid integral of the spacetime Wigner function
    Normcheck(WignerNormArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ProcessValidateArgs {
    /// causal-game or channel
    #[arg(long, default_value = "causal-game")]
    pub example: String,
    /// Weight of white noise mixed into the process
    #[arg(long, default_value_t = 0.0)]
    pub mix: f64,
    /// Input state of the channel example
    #[arg(long, default_value = "mixed")]
    pub state: String,
    /// Unitary of the channel example
    #[arg(long, default_value = "identity")]
    pub unitary: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ProcessCorrelateArgs {
    /// Input state of the channel process
    #[arg(long, default_value = "mixed")]
    pub state: String,
    /// Unitary from Alice to Bob
    #[arg(long, default_value = "hadamard")]
    pub unitary: String,
    /// Pauli measured by Alice
    #[arg(long, default_value = "Z")]
    pub a: String,
    /// Pauli measured by Bob
    #[arg(long, default_value = "X")]
    pub b: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GyniArgs {
    /// paper (measure and reprepare |0>) or literal (measure and send the mixed state)
    #[arg(long, default_value = "paper")]
    pub demo: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerticesArgs {
    /// Alice's settings
    #[arg(long, default_value_t = 2)]
    pub ma: u32,
    /// Bob's settings
    #[arg(long, default_value_t = 2)]
    pub mb: u32,
    /// Alice's outcomes
    #[arg(long, default_value_t = 2)]
    pub ka: u64,
    /// Bob's outcomes
    #[arg(long, default_value_t = 2)]
    pub kb: u64,
}

#[derive(Debug, Subcommand)]
pub enum ProcessCmd {
    /// Positivity, normalization and projector checks
    Validate(ProcessValidateArgs),
    /// Pauli correlation through a channel process
    Correlate(ProcessCorrelateArgs),
    /// GYNI and LGYNI scores of the causal-game process
    Gyni(GyniArgs),
    /// Deterministic causal strategies: formula and enumeration
    Vertices(VerticesArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HistoriesArgs {
    /// Initial qubit state
    #[arg(long, default_value = "zero")]
    pub state: String,
    /// Unitary applied between consecutive times
    #[arg(long, default_value = "hadamard")]
    pub unitary: String,
    /// Comma-separated Pauli observables, one per time
    #[arg(long, default_value = "Z,X")]
    pub obs: String,
}

#[derive(Debug, Subcommand)]
pub enum HistoriesCmd {
    /// Decoherence functional entries
    Df(HistoriesArgs),
    /// Weak and strong consistency
    Consistent(HistoriesArgs),
    /// Signed diagonal sum against the PDM correlation
    Corr(HistoriesArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OtocDirectArgs {
    /// Number of qubits; U is Haar random
    #[arg(long, default_value_t = 3)]
    pub qubits: usize,
    /// Pauli V on the first qubit
    #[arg(long, default_value = "X")]
    pub v: String,
    /// Pauli W on the last qubit
    #[arg(long, default_value = "Z")]
    pub w: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OtocPdmArgs {
    /// Hilbert-space dimension
    #[arg(long, default_value_t = 4)]
    pub dim: usize,
    /// Rank of the random projector A
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FinalStateArgs {
    /// Matter dimension N
    #[arg(long, default_value_t = 4)]
    pub n: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HarmonicArgs {
    /// Mass
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// Angular frequency
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Comma-separated Euclidean time separations
    #[arg(long, default_value = "0.5,1,2")]
    pub tau: String,
    /// Quadrature points per axis for the kernel oracle
    #[arg(long, default_value_t = 401)]
    pub points: usize,
}

#[derive(Debug, Subcommand)]
pub enum OtocCmd {
    /// Direct OTOC with a Haar-random evolution
    Direct(OtocDirectArgs),
    /// Forward-backward process branch against the direct OTOC
    Pdm(OtocPdmArgs),
    /// Final-state projection with Haar-random S
    Finalstate(FinalStateArgs),
    /// Harmonic-oscillator two-point functions
    Harmonic(HarmonicArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DecayArgs {
    /// Qubit channel applied between events
    #[arg(long, default_value = "depolarizing")]
    pub channel: String,
    /// Channel strength
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
    /// Number of events
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Pauli observable measured at every event
    #[arg(long, default_value = "X")]
    pub obs: String,
    /// Initial state (default: the +1 eigenstate of the observable)
    #[arg(long)]
    pub state: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SymmetrizationArgs {
    /// depolarizing or dephasing
    #[arg(long, default_value = "depolarizing")]
    pub noise: String,
    /// Noise strength per round
    #[arg(long, default_value_t = 0.2)]
    pub p: f64,
    /// Number of events
    #[arg(long, default_value_t = 50)]
    pub n: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PhaseFlipArgs {
    /// Physical phase-flip probability
    #[arg(long, default_value_t = 0.05)]
    pub p: f64,
    /// Number of protocol rounds
    #[arg(long, default_value_t = 10)]
    pub n: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FloquetArgs {
    /// Chain length
    #[arg(long, default_value_t = 8)]
    pub l: usize,
    /// Pulse imperfection
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    pub epsilon: f64,
    /// Uniform transverse field during the interaction stage
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub hx: f64,
    /// Number of driving periods
    #[arg(long, default_value_t = 200)]
    pub periods: usize,
    /// Measured site
    #[arg(long, default_value_t = 0)]
    pub site: usize,
    /// Switch the Ising couplings off
    #[arg(long)]
    pub no_interactions: bool,
    /// Lower end of the coupling interval
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    pub j_min: f64,
    /// Upper end of the coupling interval
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub j_max: f64,
    /// Lower end of the longitudinal-field interval
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub h_min: f64,
    /// Upper end of the longitudinal-field interval
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub h_max: f64,
}

#[derive(Debug, Subcommand)]
pub enum TcCmd {
    /// Two-point correlation under a repeated channel
    Decay(DecayArgs),
    /// Symmetrization protocol recurrence and simulation
    Symm(SymmetrizationArgs),
    /// Three-qubit phase-flip code correlations
    Phaseflip(PhaseFlipArgs),
    /// Disordered Floquet chain correlation series
    Floquet(FloquetArgs),
    /// Subharmonic spectrum of the Floquet series
    Spectrum(FloquetArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ChannelArgs {
    /// Qubit channel name
    #[arg(long, default_value = "depolarizing")]
    pub channel: String,
    /// Channel strength
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CjCheckArgs {
    /// A qubit channel name, transpose, or scaled-identity (2x identity)
    #[arg(long, default_value = "transpose")]
    pub map: String,
    /// Channel strength
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RoundtripArgs {
    /// Number of random channels
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Hilbert-space dimension
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Kraus operators per channel
    #[arg(long, default_value_t = 2)]
    pub kraus: usize,
}

#[derive(Debug, Subcommand)]
pub enum CjCmd {
    /// Choi operator of a qubit channel
    OfChannel(ChannelArgs),
    /// TP, Hermiticity-preserving and CP flags of a map
    Check(CjCheckArgs),
    /// Channel to Choi to channel on random channels
    Roundtrip(RoundtripArgs),
}
