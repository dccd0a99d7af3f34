use serde_json::json;
use spacetime_core::histories_games::{
    is_consistent, matching_process, pdm_correlation_from_df, Consistency, DecoherenceFunctional,
    HistoryFamily,
};
use spacetime_core::pdm::event_correlation_observables;
use spacetime_core::CMatrix;

use super::Ctx;
use crate::cli::HistoriesArgs;
use crate::error::{invalid, CliResult};
use crate::parse::{names, observable, qubit_state, qubit_unitary};
use crate::report::{num, Report, Table};

/// Histories grow as 2^times.
const MAX_TIMES: usize = 8;

fn family(a: &HistoriesArgs) -> CliResult<(HistoryFamily, Vec<CMatrix>)> {
    let obs = names(&a.obs)?
        .into_iter()
        .map(observable)
        .collect::<CliResult<Vec<_>>>()?;
    if obs.len() > MAX_TIMES {
        return Err(invalid(format!("at most {MAX_TIMES} times are supported")));
    }
    let u = qubit_unitary(&a.unitary)?;
    let f = HistoryFamily::from_observables(qubit_state(&a.state)?, &obs, vec![u; obs.len() - 1])?;
    Ok((f, obs))
}

fn label(h: &[usize]) -> String {
    h.iter().map(|&k| if k == 0 { '+' } else { '-' }).collect()
}

fn sanity(df: &DecoherenceFunctional, r: &mut Report, tol: f64) {
    r.check_close("hermitian pairs", df.hermiticity_defect(), tol);
    r.check_close("sums to one", (df.total() - 1.0).norm(), tol.max(1e-10));
}

pub fn df(a: &HistoriesArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let (f, _) = family(a)?;
    let df = DecoherenceFunctional::compute(&f)?;
    sanity(&df, &mut r, ctx.tol(1e-12));
    let mut t = Table::new(["history", "history_prime", "re", "im"]);
    for (i, h) in df.histories.iter().enumerate() {
        for (j, hp) in df.histories.iter().enumerate() {
            let z = df.entries[(i, j)];
            t.push(vec![
                json!(label(h)),
                json!(label(hp)),
                num(z.re),
                num(z.im),
            ]);
        }
    }
    Ok(r.with_table(t))
}

pub fn consistent(a: &HistoriesArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let (f, _) = family(a)?;
    let df = DecoherenceFunctional::compute(&f)?;
    let tol = ctx.tol(1e-10);
    sanity(&df, &mut r, 1e-12);
    r.set(
        "weakly_consistent",
        is_consistent(&f, tol, Consistency::Weak)?,
    );
    r.set(
        "strongly_consistent",
        is_consistent(&f, tol, Consistency::Strong)?,
    );
    r.set(
        "max_weak_interference",
        num(df.max_interference(Consistency::Weak)),
    );
    r.set(
        "max_strong_interference",
        num(df.max_interference(Consistency::Strong)),
    );
    Ok(r)
}

pub fn corr(a: &HistoriesArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let (f, obs) = family(a)?;
    let from_df = pdm_correlation_from_df(&f)?;
    let direct = event_correlation_observables(&matching_process(&f)?, &obs)?;
    r.check_close(
        "signed diagonal equals PDM correlation",
        (from_df - direct).abs(),
        ctx.tol(1e-12),
    );
    r.set("df_correlation", num(from_df));
    r.set("pdm_correlation", num(direct));
    Ok(r)
}
