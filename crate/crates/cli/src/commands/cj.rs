use spacetime_core::channels::{
    check_choi, choi_of_channel, random_channel, ChoiOperator, KrausChannel,
};
use spacetime_core::operator_algebra::{c, max_abs_diff, tensor, unit};
use spacetime_core::CMatrix;

use super::{complex_matrix, Ctx};
use crate::cli::{ChannelArgs, CjCheckArgs, RoundtripArgs};
use crate::error::{invalid, CliResult};
use crate::parse::qubit_channel;
use crate::report::{num, Report};

fn flags(choi: &ChoiOperator, r: &mut Report) {
    let f = check_choi(choi);
    r.set("tp", f.tp);
    r.set("hermitian_preserving", f.hermitian_preserving);
    r.set("cp", f.cp);
}

pub fn of_channel(a: &ChannelArgs, _: &Ctx, mut r: Report) -> CliResult<Report> {
    let choi = choi_of_channel(&qubit_channel(&a.channel, a.p)?);
    let f = check_choi(&choi);
    r.check(
        "channel Choi operator is CPTP",
        f.cp && f.tp,
        format!("{f:?}"),
    );
    flags(&choi, &mut r);
    r.set("choi", complex_matrix(&choi.matrix));
    Ok(r)
}

/// Choi operator of the qubit transpose map, the swap operator.
fn transpose_choi() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            m += tensor(&unit(2, j, i), &unit(2, i, j));
        }
    }
    m
}

pub fn check(a: &CjCheckArgs, _: &Ctx, mut r: Report) -> CliResult<Report> {
    let matrix = match a.map.as_str() {
        "transpose" => transpose_choi(),
        "scaled-identity" => choi_of_channel(&KrausChannel::identity(2)).matrix * c(2.0),
        name => choi_of_channel(&qubit_channel(name, a.p)?).matrix,
    };
    let choi = ChoiOperator::new(matrix, 2, 2)?;
    flags(&choi, &mut r);
    r.set("choi", complex_matrix(&choi.matrix));
    Ok(r)
}

pub fn roundtrip(a: &RoundtripArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let seed = ctx.seed("cj roundtrip")?;
    if a.dim == 0
        || a.dim > 8
        || a.kraus == 0
        || a.kraus > a.dim * a.dim
        || a.count == 0
        || a.count > 1000
    {
        return Err(invalid(
            "need dim in 1..=8, kraus in 1..=dim^2, count in 1..=1000",
        ));
    }
    let mut worst: f64 = 0.0;
    let mut all_cptp = true;
    for k in 0..a.count as u64 {
        let ch = random_channel(a.dim, a.kraus, seed.wrapping_add(k));
        let choi = choi_of_channel(&ch);
        let f = check_choi(&choi);
        all_cptp &= f.cp && f.tp;
        let back = choi.to_kraus()?;
        for i in 0..a.dim {
            for j in 0..a.dim {
                let e = unit(a.dim, i, j);
                let want = ch.apply(&e)?;
                worst = worst.max(max_abs_diff(&choi.apply(&e)?, &want));
                worst = worst.max(max_abs_diff(&back.apply(&e)?, &want));
            }
        }
    }
    r.check_close("roundtrip reproduces the channel", worst, ctx.tol(1e-10));
    r.check("random channels flagged CPTP", all_cptp, "");
    r.set("max_error", num(worst));
    Ok(r)
}
