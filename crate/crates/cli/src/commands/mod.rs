//! Experiment implementations, one module per command group.

mod cj;
mod cv_wigner;
mod gaussian;
mod histories;
mod otoc;
mod pdm;
mod process;
mod tc;

use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};
use spacetime_core::CMatrix;

use crate::cli::{
    CjCmd, CvWignerCmd, GaussianCmd, Group, HistoriesCmd, OtocCmd, PdmCmd, ProcessCmd, TcCmd,
};
use crate::config::{merge, to_map};
use crate::error::{invalid, CliResult};
use crate::report::{num, Report};

/// Run-wide settings shared by every experiment.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ctx {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

impl Ctx {
    pub fn seed(&self, experiment: &str) -> CliResult<u64> {
        self.seed.ok_or_else(|| {
            invalid(format!(
                "'{experiment}' is stochastic: pass --seed N (or \"seed\" in the config)"
            ))
        })
    }

    pub fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

type Handler<T> = fn(&T, &Ctx, Report) -> CliResult<Report>;

fn run<T>(
    name: &str,
    args: &T,
    m: &ArgMatches,
    file: &Map<String, Value>,
    ctx: &Ctx,
    handler: Handler<T>,
) -> CliResult<Report>
where
    T: Serialize + DeserializeOwned,
{
    let args = merge(args, m, file)?;
    let mut params = to_map(&args);
    if let Some(seed) = ctx.seed {
        params.insert("seed".into(), json!(seed));
    }
    if let Some(tol) = ctx.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(invalid(format!("tolerance must be positive, got {tol}")));
        }
        params.insert("tol".into(), num(tol));
    }
    handler(&args, ctx, Report::new(name, params))
}

/// Runs the leaf command; `m` holds the leaf's own matches.
pub fn dispatch(
    group: &Group,
    m: &ArgMatches,
    file: &Map<String, Value>,
    ctx: &Ctx,
) -> CliResult<Report> {
    match group {
        Group::List => Err(invalid("'list' is not an experiment")),
        Group::Pdm(cmd) => match cmd {
            PdmCmd::Build(a) => run("pdm build", a, m, file, ctx, pdm::build),
            PdmCmd::Eigen(a) => run("pdm eigen", a, m, file, ctx, pdm::eigen),
            PdmCmd::Correlation(a) => run("pdm correlation", a, m, file, ctx, pdm::correlation),
            PdmCmd::Monotone(a) => run("pdm monotone", a, m, file, ctx, pdm::monotone),
            PdmCmd::Tetra(a) => run("pdm tetra", a, m, file, ctx, pdm::tetra),
        },
        Group::Gaussian(cmd) => match cmd {
            GaussianCmd::State(a) => run("gaussian state", a, m, file, ctx, gaussian::state),
            GaussianCmd::Temporal(a) => {
                run("gaussian temporal", a, m, file, ctx, gaussian::temporal)
            }
            GaussianCmd::Uncertainty(a) => run(
                "gaussian uncertainty",
                a,
                m,
                file,
                ctx,
                gaussian::uncertainty,
            ),
            GaussianCmd::Pt(a) => run("gaussian pt", a, m, file, ctx, gaussian::pt),
        },
        Group::CvWigner(cmd) => match cmd {
            CvWignerCmd::Point(a) => run("cv-wigner point", a, m, file, ctx, cv_wigner::point),
            CvWignerCmd::Normcheck(a) => {
                run("cv-wigner normcheck", a, m, file, ctx, cv_wigner::normcheck)
            }
        },
        Group::Process(cmd) => match cmd {
            ProcessCmd::Validate(a) => run("process validate", a, m, file, ctx, process::validate),
            ProcessCmd::Correlate(a) => {
                run("process correlate", a, m, file, ctx, process::correlate)
            }
            ProcessCmd::Gyni(a) => run("process gyni", a, m, file, ctx, process::gyni),
            ProcessCmd::Vertices(a) => run("process vertices", a, m, file, ctx, process::vertices),
        },
        Group::Histories(cmd) => match cmd {
            HistoriesCmd::Df(a) => run("histories df", a, m, file, ctx, histories::df),
            HistoriesCmd::Consistent(a) => run(
                "histories consistent",
                a,
                m,
                file,
                ctx,
                histories::consistent,
            ),
            HistoriesCmd::Corr(a) => run("histories corr", a, m, file, ctx, histories::corr),
        },
        Group::Otoc(cmd) => match cmd {
            OtocCmd::Direct(a) => run("otoc direct", a, m, file, ctx, otoc::direct),
            OtocCmd::Pdm(a) => run("otoc pdm", a, m, file, ctx, otoc::pdm),
            OtocCmd::Finalstate(a) => run("otoc finalstate", a, m, file, ctx, otoc::final_state),
            OtocCmd::Harmonic(a) => run("otoc harmonic", a, m, file, ctx, otoc::harmonic),
        },
        Group::Tc(cmd) => match cmd {
            TcCmd::Decay(a) => run("tc decay", a, m, file, ctx, tc::decay),
            TcCmd::Symm(a) => run("tc symm", a, m, file, ctx, tc::symm),
            TcCmd::Phaseflip(a) => run("tc phaseflip", a, m, file, ctx, tc::phase_flip),
            TcCmd::Floquet(a) => run("tc floquet", a, m, file, ctx, tc::floquet),
            TcCmd::Spectrum(a) => run("tc spectrum", a, m, file, ctx, tc::spectrum),
        },
        Group::Cj(cmd) => match cmd {
            CjCmd::OfChannel(a) => run("cj of-channel", a, m, file, ctx, cj::of_channel),
            CjCmd::Check(a) => run("cj check", a, m, file, ctx, cj::check),
            CjCmd::Roundtrip(a) => run("cj roundtrip", a, m, file, ctx, cj::roundtrip),
        },
    }
}

/// `{"re": [[..]], "im": [[..]]}`, row-major.
fn complex_matrix(m: &CMatrix) -> Value {
    let part = |f: fn(&spacetime_core::C64) -> f64| {
        Value::Array(
            (0..m.nrows())
                .map(|i| Value::Array((0..m.ncols()).map(|j| num(f(&m[(i, j)]))).collect()))
                .collect(),
        )
    };
    json!({ "re": part(|z| z.re), "im": part(|z| z.im) })
}

fn real_matrix(m: &spacetime_core::gaussian::RMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| num(m[(i, j)])).collect()))
            .collect(),
    )
}
