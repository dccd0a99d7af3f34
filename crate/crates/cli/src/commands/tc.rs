use serde_json::json;
use spacetime_core::channels::{dephasing, depolarizing};
use spacetime_core::timecrystal::{
    channel_decay_series, dephasing_symmetrization_series, floquet_correlation_series,
    phase_flip_code_series, phase_flip_code_simulated, phase_flip_logical_error, subharmonic_peak,
    symmetrization_series, symmetrization_simulated, CorrelationSeries, DisorderConfig,
    FloquetChainSpec, MIN_SPECTRUM_LEN,
};

use super::Ctx;
use crate::cli::{DecayArgs, FloquetArgs, PhaseFlipArgs, SymmetrizationArgs};
use crate::error::{invalid, CliResult};
use crate::parse::{observable, pauli_index, qubit_channel, qubit_state};
use crate::report::{num, Format, Report, Table};

/// Longest series produced on request.
const MAX_LEN: usize = 100_000;
/// Brute-force cross-checks stop here.
const SIMULATED_LEN: usize = 6;

fn check_len(n: usize) -> CliResult<()> {
    if n == 0 || n > MAX_LEN {
        return Err(invalid(format!("series length must be in 1..={MAX_LEN}")));
    }
    Ok(())
}

fn series_table(name: &str, s: &CorrelationSeries) -> Table {
    let mut t = Table::new([name, "corr"]);
    for (n, v) in s.indexed() {
        t.push(vec![json!(n), num(v)]);
    }
    t
}

pub fn decay(a: &DecayArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    check_len(a.n)?;
    let k = pauli_index(&a.obs)?;
    let default_state = ["mixed", "plus", "plus-i", "zero"][k as usize];
    let rho = qubit_state(a.state.as_deref().unwrap_or(default_state))?;
    let s = channel_decay_series(
        &rho,
        &qubit_channel(&a.channel, a.p)?,
        &observable(&a.obs)?,
        a.n,
    )?;
    let rate = match (a.channel.as_str(), k) {
        ("depolarizing", 1..=3) => Some(1.0 - a.p),
        ("dephasing", 1 | 2) => Some((1.0 - a.p).sqrt()),
        ("identity", _) => Some(1.0),
        _ => None,
    };
    if let Some(rate) = rate {
        let worst = s
            .indexed()
            .map(|(n, v)| (v - rate.powi(n as i32 - 1)).abs())
            .fold(0.0, f64::max);
        r.check_close("Bloch contraction power law", worst, ctx.tol(1e-10));
    }
    Ok(r.with_table(series_table("N", &s)).prefer(Format::Csv))
}

pub fn symm(a: &SymmetrizationArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    check_len(a.n)?;
    let (s, channel) = match a.noise.as_str() {
        "depolarizing" => (symmetrization_series(a.p, a.n)?, depolarizing(a.p)?),
        "dephasing" => (dephasing_symmetrization_series(a.p, a.n)?, dephasing(a.p)?),
        other => {
            return Err(invalid(format!(
                "unknown noise '{other}' (depolarizing, dephasing)"
            )))
        }
    };
    let sim = symmetrization_simulated(&channel, a.n.min(SIMULATED_LEN))?;
    let worst = sim
        .values()
        .iter()
        .zip(s.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    r.check_close(
        "recurrence matches two-copy simulation",
        worst,
        ctx.tol(1e-8),
    );
    Ok(r.with_table(series_table("N", &s)).prefer(Format::Csv))
}

pub fn phase_flip(a: &PhaseFlipArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    check_len(a.n + 1)?;
    let q = phase_flip_logical_error(a.p)?;
    let (xx, zz) = phase_flip_code_series(a.p, a.n + 1)?;
    let (sxx, szz) = phase_flip_code_simulated(a.p, (a.n + 1).min(SIMULATED_LEN))?;
    let worst = sxx
        .values()
        .iter()
        .zip(xx.values())
        .chain(szz.values().iter().zip(zz.values()))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    r.check_close(
        "Markov chain matches three-qubit simulation",
        worst,
        ctx.tol(1e-10),
    );
    let mut t = Table::new(["rounds", "xx", "zz", "first_order"]);
    for k in 0..=a.n {
        let event = k + 1;
        t.push(vec![
            json!(k),
            num(xx.get(event).unwrap_or(f64::NAN)),
            num(zz.get(event).unwrap_or(f64::NAN)),
            num(1.0 - 2.0 * k as f64 * q),
        ]);
    }
    r.set("logical_error", num(q));
    Ok(r.with_table(t).prefer(Format::Csv))
}

fn floquet_series(
    a: &FloquetArgs,
    ctx: &Ctx,
    experiment: &str,
) -> CliResult<(FloquetChainSpec, CorrelationSeries)> {
    let seed = ctx.seed(experiment)?;
    check_len(a.periods + 1)?;
    for (lo, hi, what) in [(a.j_min, a.j_max, "coupling"), (a.h_min, a.h_max, "field")] {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(invalid(format!("{what} interval [{lo}, {hi}] is empty")));
        }
    }
    let cfg = DisorderConfig {
        coupling_range: (a.j_min, a.j_max),
        field_range: (a.h_min, a.h_max),
    };
    let mut spec = FloquetChainSpec::disordered(a.l, a.epsilon, a.hx, seed, cfg)?;
    if a.no_interactions {
        spec = spec.without_interactions();
    }
    let s = floquet_correlation_series(&spec, a.site, a.periods)?;
    Ok((spec, s))
}

pub fn floquet(a: &FloquetArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    let (spec, s) = floquet_series(a, ctx, "tc floquet")?;
    if a.epsilon == 0.0 && a.hx == 0.0 {
        let worst = s
            .indexed()
            .filter(|(n, _)| n % 2 == 0)
            .map(|(_, v)| (v.abs() - 1.0).abs())
            .fold(0.0, f64::max);
        r.check_close(
            "perfect pulses keep even periods at |1|",
            worst,
            ctx.tol(1e-10),
        );
    }
    r.set("couplings", crate::report::nums(&spec.couplings));
    r.set("fields_z", crate::report::nums(&spec.fields_z));
    Ok(r.with_table(series_table("period", &s)).prefer(Format::Csv))
}

pub fn spectrum(a: &FloquetArgs, ctx: &Ctx, mut r: Report) -> CliResult<Report> {
    if a.periods + 1 < MIN_SPECTRUM_LEN {
        return Err(invalid(format!(
            "spectrum needs at least {} periods",
            MIN_SPECTRUM_LEN - 1
        )));
    }
    let (_, s) = floquet_series(a, ctx, "tc spectrum")?;
    let peak = subharmonic_peak(s.values())?;
    r.set("peak_freq", num(peak.peak_freq));
    r.set("peak_weight", num(peak.peak_weight));
    r.set("split", peak.split);
    Ok(r)
}
