use spacetime_core::channels::KrausChannel;
use spacetime_core::cv_wigner::{
    fock_phase_damping, spacetime_wigner_point_complex, wigner_cascade_monte_carlo,
    wigner_normalization_check, Grid,
};

use super::Ctx;
use crate::cli::{WignerNormArgs, WignerPointArgs};
use crate::error::{invalid, CliResult};
use crate::parse::{complex, fock_state};
use crate::report::{num, Report};

/// Keeps dense Fock-space work interactive.
const MAX_N: usize = 200;

fn mode_channel(name: &str, n_max: usize) -> CliResult<KrausChannel> {
    match name {
        "identity" => Ok(KrausChannel::identity(n_max)),
        "phase-damping" => Ok(fock_phase_damping(n_max)),
        other => Err(invalid(format!(
            "unknown mode channel '{other}' (identity, phase-damping)"
        ))),
    }
}

fn check_n(n_max: usize) -> CliResult<()> {
    if n_max == 0 || n_max > MAX_N {
        return Err(invalid(format!("n_max must be in 1..={MAX_N}")));
    }
    Ok(())
}

pub fn point(a: &WignerPointArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    check_n(a.n_max)?;
    let (alpha, beta) = (complex(&a.alpha)?, complex(&a.beta)?);
    let rho = fock_state(&a.state, a.n_max)?;
    let ch = mode_channel(&a.channel, a.n_max)?;
    let w = spacetime_wigner_point_complex(&rho, &ch, alpha, beta, a.n_max)?;
    r.check_close("real valued", w.im.abs(), ctx.tol(1e-10));
    r.set("wigner", num(w.re));
    if let Some(shots) = a.shots {
        let seed = ctx.seed("cv-wigner point --shots")?;
        let (mean, se) = wigner_cascade_monte_carlo(&rho, &ch, alpha, beta, a.n_max, shots, seed)?;
        r.check(
            "sampled cascade within 5 standard errors",
            (mean - w.re).abs() <= 5.0 * se + 1e-12,
            format!("sample mean {mean}, standard error {se}"),
        );
        r.set("sample_mean", num(mean));
        r.set("standard_error", num(se));
    }
    Ok(r)
}

pub fn normcheck(a: &WignerNormArgs, _: &Ctx, mut r: Report) -> CliResult<Report> {
    check_n(a.n_max)?;
    if a.points == 0 || a.points > 512 {
        return Err(invalid("points per axis must be in 1..=512"));
    }
    let grid = Grid {
        radius: a.radius,
        points_per_axis: a.points,
    };
    let rho = fock_state(&a.state, a.n_max)?;
    let value =
        wigner_normalization_check(&rho, &mode_channel(&a.channel, a.n_max)?, grid, a.n_max)?;
    r.set("integral", num(value));
    r.set("deviation", num(value - 1.0));
    Ok(r)
}
