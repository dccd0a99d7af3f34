use spacetime_core::gaussian::{
    partial_transpose_gaussian, temporal_gaussian, thermal, two_mode_squeezed,
    uncertainty_min_eigenvalue, uncertainty_ok, vacuum, GaussianState, GaussianStep, RMatrix,
};

use super::{real_matrix, Ctx};
use crate::cli::{GaussianStateArgs, GaussianTemporalArgs, PartialTransposeArgs, UncertaintyArgs};
use crate::error::{invalid, CliResult};
use crate::parse;
use crate::report::{num, Report};

fn describe(cov: &RMatrix, r: &mut Report) -> CliResult<()> {
    r.set("covariance", real_matrix(cov));
    r.set(
        "uncertainty_min_eigenvalue",
        num(uncertainty_min_eigenvalue(cov)?),
    );
    r.set("uncertainty_ok", uncertainty_ok(cov)?);
    Ok(())
}

pub fn state(a: &GaussianStateArgs, _: &Ctx, mut r: Report) -> CliResult<Report> {
    let st = match a.kind.as_str() {
        "vacuum" => vacuum(1),
        "thermal" => thermal(a.nbar)?,
        "tmss" => two_mode_squeezed(a.r),
        other => {
            return Err(invalid(format!(
                "unknown Gaussian state '{other}' (vacuum, thermal, tmss)"
            )))
        }
    };
    describe(&st.cov, &mut r)?;
    r.check(
        "physical state obeys uncertainty",
        uncertainty_ok(&st.cov)?,
        "",
    );
    Ok(r)
}

pub fn temporal(a: &GaussianTemporalArgs, _: &Ctx, mut r: Report) -> CliResult<Report> {
    let initial: GaussianState = match a.kind.as_str() {
        "vacuum" => vacuum(1),
        "thermal" => thermal(a.nbar)?,
        other => {
            return Err(invalid(format!(
                "unknown initial state '{other}' (vacuum, thermal)"
            )))
        }
    };
    let step = match a.step.as_str() {
        "identity" => GaussianStep::identity(),
        "rotation" => GaussianStep::rotation(a.theta),
        other => {
            return Err(invalid(format!(
                "unknown step '{other}' (identity, rotation)"
            )))
        }
    };
    let st = temporal_gaussian(&initial, &step)?;
    r.check_close("symmetric", (&st.cov - st.cov.transpose()).amax(), 1e-12);
    describe(&st.cov, &mut r)?;
    Ok(r)
}

pub fn uncertainty(a: &UncertaintyArgs, _: &Ctx, mut r: Report) -> CliResult<Report> {
    let rows = parse::real_matrix(
        a.cov
            .as_deref()
            .ok_or_else(|| invalid("--cov is required"))?,
    )?;
    let n = rows.len();
    if rows[0].len() != n {
        return Err(invalid("covariance must be square"));
    }
    let cov = RMatrix::from_row_iterator(n, n, rows.into_iter().flatten());
    r.set(
        "uncertainty_min_eigenvalue",
        num(uncertainty_min_eigenvalue(&cov)?),
    );
    r.set("uncertainty_ok", uncertainty_ok(&cov)?);
    Ok(r)
}

pub fn pt(a: &PartialTransposeArgs, _: &Ctx, mut r: Report) -> CliResult<Report> {
    let omts = temporal_gaussian(&thermal(a.r.sinh().powi(2))?, &GaussianStep::identity())?.cov;
    let transposed = partial_transpose_gaussian(&omts, 1)?;
    let tmss = two_mode_squeezed(a.r).cov;
    let rel = transposed
        .iter()
        .zip(tmss.iter())
        .filter(|(_, b)| **b != 0.0)
        .map(|(x, b)| ((x - b) / b).abs())
        .fold(0.0, f64::max);
    let pattern = transposed
        .iter()
        .zip(tmss.iter())
        .all(|(x, b)| (*x == 0.0) == (*b == 0.0));
    r.check("same zero pattern", pattern, "");
    r.set("partial_transpose", real_matrix(&transposed));
    r.set("two_mode_squeezed", real_matrix(&tmss));
    r.set("max_relative_error", num(rel));
    r.set("omts_uncertainty_ok", uncertainty_ok(&omts)?);
    r.set("transposed_uncertainty_ok", uncertainty_ok(&transposed)?);
    Ok(r)
}
