use serde_json::json;
use spacetime_core::channels::KrausChannel;
use spacetime_core::operator_algebra::{c, identity};
use spacetime_core::pdm::{event_correlation_observables, TemporalProcess};
use spacetime_core::process_matrix::{
    count_causal_vertices, enumerate_causal_vertices, gyni_score, is_valid_process, lgyni_score,
    pdm_gyni_demo, probability_table, process_gyni_demo, GameInstrumentVariant, Instrument,
    ProcessMatrix, MAX_ENUMERATED_STRATEGIES,
};

use super::Ctx;
use crate::cli::{GyniArgs, ProcessCorrelateArgs, ProcessValidateArgs, VerticesArgs};
use crate::error::{invalid, CliResult};
use crate::parse::{observable, qubit_state, qubit_unitary};
use crate::report::{num, Report};

pub fn validate(a: &ProcessValidateArgs, _: &Ctx, mut r: Report) -> CliResult<Report> {
    let w = match a.example.as_str() {
        "causal-game" => ProcessMatrix::causal_game_example(),
        "channel" => {
            ProcessMatrix::channel_process(&qubit_state(&a.state)?, &qubit_unitary(&a.unitary)?)?
        }
        other => {
            return Err(invalid(format!(
                "unknown process '{other}' (causal-game, channel)"
            )))
        }
    };
    if !a.mix.is_finite() {
        return Err(invalid("mix must be finite"));
    }
    let d = w.dims();
    let d_total: usize = d.iter().product();
    // 𝟙/(d_AI d_BI) is the normalized white-noise process.
    let noise = identity(d_total) * c(1.0 / (d[0] * d[2]) as f64);
    let mixed = ProcessMatrix::new(d, w.matrix() * c(1.0 - a.mix) + noise * c(a.mix))?;
    let (valid, rep) = is_valid_process(&mixed);
    r.set("valid", valid);
    r.set("positive", rep.positive());
    r.set("trace_ok", rep.trace_ok());
    r.set("fixed_point", rep.fixed_point());
    r.set("min_eigenvalue", num(rep.min_eigenvalue));
    r.set("trace", num(rep.trace));
    r.set("expected_trace", num(rep.expected_trace));
    r.set("projector_defect", num(rep.projector_defect));
    Ok(r)
}

pub fn correlate(a: &ProcessCorrelateArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let rho = qubit_state(&a.state)?;
    let u = qubit_unitary(&a.unitary)?;
    let (oa, ob) = (observable(&a.a)?, observable(&a.b)?);
    let w = ProcessMatrix::channel_process(&rho, &u)?;
    let table = probability_table(
        &w,
        &Instrument::luders(std::slice::from_ref(&oa))?,
        &Instrument::luders(std::slice::from_ref(&ob))?,
    )?;
    let sign = |k: usize| if k == 0 { 1.0 } else { -1.0 };
    let mut value = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            value += sign(i) * sign(j) * table.get(i, j, 0, 0);
        }
    }
    let proc = TemporalProcess::new(rho, vec![KrausChannel::unitary(u)?])?;
    let direct = event_correlation_observables(&proc, &[oa, ob])?;
    r.check_close(
        "matches temporal correlation",
        (value - direct).abs(),
        ctx.tol(1e-12),
    );
    r.check_close("normalized", table.normalization_defect(), 1e-10);
    r.set("correlation", num(value));
    r.set("temporal_correlation", num(direct));
    Ok(r)
}

pub fn gyni(a: &GyniArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let variant = match a.demo.as_str() {
        "paper" => GameInstrumentVariant::Reprepare,
        "literal" => GameInstrumentVariant::Literal,
        other => return Err(invalid(format!("unknown demo '{other}' (paper, literal)"))),
    };
    let (g, lg) = process_gyni_demo(variant)?;
    let (pg, plg) = pdm_gyni_demo(variant)?;
    let tol = ctx.tol(1e-10);
    r.check_close("ancilla PDM reproduces GYNI", (g - pg).abs(), tol);
    r.check_close("ancilla PDM reproduces LGYNI", (lg - plg).abs(), tol);
    r.set("gyni", num(g));
    r.set("lgyni", num(lg));
    r.set("gyni_causal_bound", num(0.5));
    r.set("lgyni_causal_bound", num(0.75));
    r.set("gyni_violated", g > 0.5);
    r.set("lgyni_violated", lg > 0.75);
    Ok(r)
}

pub fn vertices(a: &VerticesArgs, _: &Ctx, mut r: Report) -> CliResult<Report> {
    let count = count_causal_vertices(a.ma, a.mb, a.ka, a.kb)?;
    r.set("formula_count", count.to_string());
    if count > MAX_ENUMERATED_STRATEGIES {
        r.set("enumerated_count", serde_json::Value::Null);
        return Ok(r);
    }
    let list =
        enumerate_causal_vertices(a.ma as usize, a.mb as usize, a.ka as usize, a.kb as usize)?;
    r.check(
        "formula matches enumeration",
        list.len() as u128 == count,
        format!("{} enumerated", list.len()),
    );
    r.set("enumerated_count", json!(list.len()));
    if [a.ma, a.mb] == [2, 2] && [a.ka, a.kb] == [2, 2] {
        let mut best = (0.0f64, 0.0f64);
        for v in &list {
            best = (best.0.max(gyni_score(v)?), best.1.max(lgyni_score(v)?));
        }
        r.check(
            "causal bounds hold",
            best.0 <= 0.5 && best.1 <= 0.75,
            format!("max scores {best:?}"),
        );
        r.set("max_gyni", num(best.0));
        r.set("max_lgyni", num(best.1));
    }
    Ok(r)
}
