use serde_json::json;
use spacetime_core::operator_algebra::{hermiticity_defect, pauli};
use spacetime_core::pdm::{
    build_pdm, causality_monotone, event_correlation, expectation_from_pdm, tetrahedron_point, Pdm,
    TemporalProcess,
};
use spacetime_core::PauliString;

use super::{complex_matrix, Ctx};
use crate::cli::{PdmArgs, PdmCorrelationArgs};
use crate::error::{invalid, CliResult};
use crate::parse::{names, qubit_channel, qubit_state};
use crate::report::{num, nums, Report, Table};

/// Largest PDM built on request: 2^10-dimensional.
const MAX_EVENTS: usize = 10;

fn process(a: &PdmArgs) -> CliResult<TemporalProcess> {
    let steps = names(&a.steps)?
        .into_iter()
        .map(|s| qubit_channel(s, a.p))
        .collect::<CliResult<Vec<_>>>()?;
    if steps.len() + 1 > MAX_EVENTS {
        return Err(invalid(format!(
            "at most {MAX_EVENTS} events are supported"
        )));
    }
    Ok(TemporalProcess::new(qubit_state(&a.state)?, steps)?)
}

fn pdm_of(a: &PdmArgs, r: &mut Report) -> CliResult<Pdm> {
    let pdm = build_pdm(&process(a)?)?;
    r.check_close("unit trace", (pdm.matrix.trace().re - 1.0).abs(), 1e-10);
    r.check_close("hermitian", hermiticity_defect(&pdm.matrix), 1e-12);
    Ok(pdm)
}

pub fn build(a: &PdmArgs, _: &Ctx, mut r: Report) -> CliResult<Report> {
    let pdm = pdm_of(a, &mut r)?;
    r.set("events", pdm.n_events);
    r.set("matrix", complex_matrix(&pdm.matrix));
    let mut t = Table::new(["row", "col", "re", "im"]);
    for i in 0..pdm.matrix.nrows() {
        for j in 0..pdm.matrix.ncols() {
            let z = pdm.matrix[(i, j)];
            t.push(vec![json!(i), json!(j), num(z.re), num(z.im)]);
        }
    }
    Ok(r.with_table(t))
}

pub fn eigen(a: &PdmArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let pdm = pdm_of(a, &mut r)?;
    let ev = pdm.eigenvalues()?;
    r.check_close(
        "eigenvalue sum",
        (ev.iter().sum::<f64>() - 1.0).abs(),
        ctx.tol(1e-10),
    );
    r.set("eigenvalues", nums(&ev));
    r.set("causality_monotone", num(causality_monotone(&pdm)));
    let mut t = Table::new(["index", "eigenvalue"]);
    for (k, v) in ev.iter().enumerate() {
        t.push(vec![json!(k), num(*v)]);
    }
    Ok(r.with_table(t))
}

pub fn correlation(a: &PdmCorrelationArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let proc = process(&a.process)?;
    let s = PauliString::parse(&a.paulis)?;
    if s.len() != proc.n_events() {
        return Err(invalid(format!(
            "{} Pauli labels for {} events",
            s.len(),
            proc.n_events()
        )));
    }
    let value = event_correlation(&proc, &s)?;
    let pdm = build_pdm(&proc)?;
    let ops: Vec<_> = s.indices().iter().map(|&i| pauli(i)).collect();
    let via_pdm = expectation_from_pdm(&pdm, &ops)?;
    r.check_close(
        "PDM expectation agrees",
        (value - via_pdm).abs(),
        ctx.tol(1e-12),
    );
    r.set("correlation", num(value));
    Ok(r)
}

pub fn monotone(a: &PdmArgs, _: &Ctx, mut r: Report) -> CliResult<Report> {
    let pdm = pdm_of(a, &mut r)?;
    let f = causality_monotone(&pdm);
    r.check("nonnegative", f >= 0.0, format!("monotone {f}"));
    r.set("causality_monotone", num(f));
    Ok(r)
}

pub fn tetra(a: &PdmArgs, _: &Ctx, mut r: Report) -> CliResult<Report> {
    let t = tetrahedron_point(&process(a)?)?;
    let m = t.classify();
    let bounded = t.as_array().iter().all(|v| v.abs() <= 1.0 + 1e-12);
    r.check(
        "correlations bounded",
        bounded,
        format!("{:?}", t.as_array()),
    );
    r.set("t11", num(t.t11));
    r.set("t22", num(t.t22));
    r.set("t33", num(t.t33));
    r.set("in_spatial_tetrahedron", m.in_spatial_t);
    r.set("in_temporal_tetrahedron", m.in_temporal_t);
    Ok(r)
}
