use serde_json::json;
use spacetime_core::operator_algebra::{
    c, haar_random_unitary, identity, kron_all, random_state_vector,
};
use spacetime_core::otoc::{
    final_state_conditional_output, harmonic_pdm_correlation, harmonic_pi_correlation,
    harmonic_quadrature_moment, otoc_direct, otoc_via_pdm, OtocSpec, HARMONIC_ORACLE_CONSTANT,
};
use spacetime_core::CMatrix;

use super::Ctx;
use crate::cli::{FinalStateArgs, HarmonicArgs, OtocDirectArgs, OtocPdmArgs};
use crate::error::{invalid, CliResult};
use crate::parse::{float_list, observable};
use crate::report::{num, Report, Table};

const MAX_DIM: usize = 512;

fn check_dim(d: usize) -> CliResult<()> {
    if d == 0 || d > MAX_DIM {
        return Err(invalid(format!("dimension must be in 1..={MAX_DIM}")));
    }
    Ok(())
}

fn mixed(d: usize) -> CMatrix {
    identity(d) * c(1.0 / d as f64)
}

pub fn direct(a: &OtocDirectArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let seed = ctx.seed("otoc direct")?;
    if a.qubits == 0 || a.qubits > 9 {
        return Err(invalid("qubits must be in 1..=9"));
    }
    let n = a.qubits;
    let d = 1 << n;
    let place = |op: CMatrix, site: usize| {
        kron_all((0..n).map(|k| if k == site { op.clone() } else { identity(2) }))
    };
    let v = place(observable(&a.v)?, 0);
    let w = place(observable(&a.w)?, n - 1);
    let spec = OtocSpec::new(v, w, haar_random_unitary(d, seed), mixed(d))?;
    let e = otoc_direct(&spec);
    r.check_close("bounded", (e.value.norm() - 1.0).max(0.0), 1e-12);
    r.set("otoc_re", num(e.value.re));
    r.set("otoc_im", num(e.value.im));
    r.set("forward_steps", e.forward_steps);
    r.set("backward_steps", e.backward_steps);
    Ok(r)
}

pub fn pdm(a: &OtocPdmArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let seed = ctx.seed("otoc pdm")?;
    check_dim(a.dim)?;
    if a.rank == 0 || a.rank > a.dim {
        return Err(invalid("rank must be in 1..=dim"));
    }
    let basis = haar_random_unitary(a.dim, seed);
    let cols = basis.columns(0, a.rank).into_owned();
    let proj = &cols * cols.adjoint();
    let b = haar_random_unitary(a.dim, seed.wrapping_add(1));
    let u = haar_random_unitary(a.dim, seed.wrapping_add(2));
    let via = otoc_via_pdm(&proj, &b, &u, &mixed(a.dim))?;
    let dir = otoc_direct(&OtocSpec::new(proj, b, u, mixed(a.dim))?);
    r.check_close(
        "process branch equals direct OTOC",
        (via.value - dir.value).norm(),
        ctx.tol(1e-12),
    );
    r.set("pdm_re", num(via.value.re));
    r.set("pdm_im", num(via.value.im));
    r.set("direct_re", num(dir.value.re));
    r.set("direct_im", num(dir.value.im));
    r.set("pdm_steps", json!([via.forward_steps, via.backward_steps]));
    r.set(
        "direct_steps",
        json!([dir.forward_steps, dir.backward_steps]),
    );
    Ok(r)
}

pub fn final_state(a: &FinalStateArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let seed = ctx.seed("otoc finalstate")?;
    check_dim(a.n * a.n)?;
    let s = haar_random_unitary(a.n, seed);
    let psi = random_state_vector(a.n, seed.wrapping_add(1));
    let out = final_state_conditional_output(&psi, &s, None)?;
    let tol = ctx.tol(1e-10);
    r.check_close("output equals S|psi>", (out.fidelity - 1.0).abs(), tol);
    r.check_close(
        "probability is 1/N^2",
        (out.probability - 1.0 / (a.n * a.n) as f64).abs(),
        tol,
    );
    r.set("probability", num(out.probability));
    r.set("fidelity", num(out.fidelity));
    Ok(r)
}

pub fn harmonic(a: &HarmonicArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let taus = float_list(&a.tau)?;
    let mut t = Table::new(["tau", "pdm", "path_integral", "ratio", "quadrature_oracle"]);
    let mut worst: f64 = 0.0;
    for tau in taus {
        let pdm = harmonic_pdm_correlation(a.m, a.omega, tau)?;
        let pi = harmonic_pi_correlation(a.omega, tau)?;
        let q = harmonic_quadrature_moment(a.m, a.omega, tau, a.points)?;
        worst = worst.max((q / HARMONIC_ORACLE_CONSTANT - pdm).abs() / pdm);
        t.push(vec![num(tau), num(pdm), num(pi), num(pdm / pi), num(q)]);
    }
    r.check_close(
        "oracle matches up to the global constant",
        worst,
        ctx.tol(1e-6),
    );
    r.set("oracle_constant", num(HARMONIC_ORACLE_CONSTANT));
    Ok(r.with_table(t).prefer(crate::report::Format::Csv))
}
