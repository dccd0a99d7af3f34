//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use spacetime_core::channels::{
    check_choi, choi_of_channel, dephasing, depolarizing, random_channel, ChoiOperator,
    KrausChannel,
};
use spacetime_core::cv_wigner::{
    coherent_state, spatial_wigner_point, two_mode_wigner, wigner_normalization_check, Grid,
};
use spacetime_core::gaussian::{
    partial_transpose_gaussian, temporal_gaussian, thermal, two_mode_squeezed, uncertainty_ok,
    vacuum, GaussianStep, RMatrix,
};
use spacetime_core::histories_games::{
    matching_process, pdm_correlation_from_df, DecoherenceFunctional, HistoryFamily,
};
use spacetime_core::operator_algebra::{
    c, haar_random_unitary, hadamard, identity, ket, max_abs_diff, outer, pauli,
    random_density_matrix, random_state_vector, swap, tensor, unit,
};
use spacetime_core::otoc::{
    final_state_conditional_output, harmonic_pdm_correlation, harmonic_pi_correlation,
    harmonic_quadrature_moment, otoc_direct, otoc_via_pdm, OtocSpec, HARMONIC_ORACLE_CONSTANT,
};
use spacetime_core::pdm::{
    build_pdm, causality_monotone, event_correlation_observables, TemporalProcess,
};
use spacetime_core::process_matrix::{
    count_causal_vertices, enumerate_causal_vertices, gyni_score, lgyni_score, pdm_gyni_demo,
    process_gyni_demo, GameInstrumentVariant,
};
use spacetime_core::timecrystal::{
    channel_decay_series, dephasing_symmetrization_series, floquet_correlation_series,
    phase_flip_code_series, subharmonic_peak, symmetrization_series, symmetrization_simulated,
    DisorderConfig, FloquetChainSpec,
};
use spacetime_core::{CMatrix, C64};
use std::io::Write;

struct Report {
    failures: Vec<usize>,
}

impl Report {
    fn record(&mut self, id: usize, title: &str, ok: bool, detail: String) {
        // Written to the raw handle so the lines survive the test harness's capture.
        let verdict = if ok { "PASS" } else { "FAIL" };
        writeln!(
            std::io::stdout(),
            "criterion {id:>2} {verdict} {title}: {detail}"
        )
        .expect("stdout is writable");
        if !ok {
            self.failures.push(id);
        }
    }
}

fn mixed(d: usize) -> CMatrix {
    identity(d) * c(1.0 / d as f64)
}

fn criterion_1(r: &mut Report) {
    let pdm = build_pdm(
        &TemporalProcess::new(outer(&ket(2, 0)), vec![KrausChannel::identity(2)]).unwrap(),
    )
    .unwrap();
    let mut display = CMatrix::zeros(4, 4);
    display[(0, 0)] = c(1.0);
    display[(1, 2)] = c(0.5);
    display[(2, 1)] = c(0.5);
    let matrix_err = max_abs_diff(&pdm.matrix, &display);
    let ev = pdm.eigenvalues().unwrap();
    let ev_err = ev
        .iter()
        .zip([-0.5, 0.0, 0.5, 1.0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    r.record(
        1,
        "two-time |0> PDM",
        matrix_err <= 1e-12 && ev_err <= 1e-12,
        format!("matrix err {matrix_err:.1e}, eigenvalue err {ev_err:.1e}"),
    );
}

fn criterion_2(r: &mut Report) {
    let pdm = build_pdm(&TemporalProcess::new(mixed(2), vec![KrausChannel::identity(2)]).unwrap())
        .unwrap();
    let err = max_abs_diff(&pdm.matrix, &(swap(2) * c(0.5)));
    let mono = causality_monotone(&pdm);
    r.record(
        2,
        "maximally mixed PDM = SWAP/2",
        err <= 1e-12 && (mono - 1.0).abs() <= 1e-12,
        format!("err {err:.1e}, monotone {mono:.12}"),
    );
}

fn criterion_3(r: &mut Report) {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let u = haar_random_unitary(2, 100 + seed);
        let proc = TemporalProcess::new(mixed(2), vec![KrausChannel::unitary(u.clone()).unwrap()])
            .unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                let got = event_correlation_observables(&proc, &[pauli(i), pauli(j)]).unwrap();
                let want = 0.5 * (pauli(j) * &u * pauli(i) * u.adjoint()).trace().re;
                worst = worst.max((got - want).abs());
            }
        }
    }
    r.record(
        3,
        "unitary temporal correlations",
        worst <= 1e-12,
        format!("max err {worst:.1e}"),
    );
}

fn criterion_4(r: &mut Report) {
    let rho = outer(&(hadamard() * ket(2, 0)));
    let mut worst: f64 = 0.0;
    for p in [0.05, 0.1, 0.3] {
        let dep = channel_decay_series(&rho, &depolarizing(p).unwrap(), &pauli(1), 25).unwrap();
        let deph = channel_decay_series(&rho, &dephasing(p).unwrap(), &pauli(1), 25).unwrap();
        for n in 1..=25 {
            worst = worst.max((dep.get(n).unwrap() - (1.0 - p).powi(n as i32 - 1)).abs());
            worst = worst.max((deph.get(n).unwrap() - (1.0 - p).sqrt().powi(n as i32 - 1)).abs());
        }
    }
    r.record(
        4,
        "depolarizing and dephasing decay",
        worst <= 1e-10,
        format!("max err {worst:.1e}"),
    );
}

fn criterion_5(r: &mut Report) {
    let limit = (1.0f64 - 4.0 * 0.2).sqrt() / 0.8;
    let a200 = symmetrization_series(0.2, 200).unwrap().get(200).unwrap();
    let mut worst: f64 = 0.0;
    for p in [0.05, 0.2, 0.5] {
        let rec = symmetrization_series(p, 6).unwrap();
        let sim = symmetrization_simulated(&depolarizing(p).unwrap(), 6).unwrap();
        worst = rec
            .values()
            .iter()
            .zip(sim.values())
            .fold(worst, |w, (a, b)| w.max((a - b).abs()));
        let rec = dephasing_symmetrization_series(p, 6).unwrap();
        let sim = symmetrization_simulated(&dephasing(p).unwrap(), 6).unwrap();
        worst = rec
            .values()
            .iter()
            .zip(sim.values())
            .fold(worst, |w, (a, b)| w.max((a - b).abs()));
    }
    let ok = (a200 - limit).abs() <= 1e-6 && worst <= 1e-8;
    r.record(
        5,
        "symmetrization protocol",
        ok,
        format!("a_200 = {a200:.9} (limit {limit:.9}), simulation err {worst:.1e}"),
    );
}

fn criterion_6(r: &mut Report) {
    let (g, lg) = process_gyni_demo(GameInstrumentVariant::default()).unwrap();
    let (pg, plg) = pdm_gyni_demo(GameInstrumentVariant::default()).unwrap();
    let g_exact = 5.0 / 16.0 * (1.0 + std::f64::consts::FRAC_1_SQRT_2);
    let vertices = enumerate_causal_vertices(2, 2, 2, 2).unwrap();
    let bounded = vertices
        .iter()
        .all(|v| gyni_score(v).unwrap() <= 0.5 && lgyni_score(v).unwrap() <= 0.75);
    let ok = (g - g_exact).abs() <= 1e-6
        && (lg - (g_exact + 0.25)).abs() <= 1e-6
        && (pg - g).abs() <= 1e-10
        && (plg - lg).abs() <= 1e-10
        && vertices.len() == 112
        && bounded;
    r.record(
        6,
        "GYNI / LGYNI",
        ok,
        format!(
            "process {g:.6}/{lg:.6}, ancilla PDM {pg:.6}/{plg:.6}, {} vertices bounded: {bounded}",
            vertices.len()
        ),
    );
}

fn criterion_7(r: &mut Report) {
    let formula = count_causal_vertices(2, 2, 2, 2).unwrap();
    let enumerated = enumerate_causal_vertices(2, 2, 2, 2).unwrap().len();
    r.record(
        7,
        "causal polytope vertices",
        formula == 112 && enumerated == 112,
        format!("formula {formula}, enumeration {enumerated}"),
    );
}

fn criterion_8(r: &mut Report) {
    #[rustfmt::skip]
    let sigma_vs = RMatrix::from_row_slice(4, 4, &[
        1.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 1.0,
        1.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 1.0,
    ]);
    let vs = temporal_gaussian(&vacuum(1), &GaussianStep::identity())
        .unwrap()
        .cov;
    let rr: f64 = 0.7;
    let omts = temporal_gaussian(
        &thermal(rr.sinh().powi(2)).unwrap(),
        &GaussianStep::identity(),
    )
    .unwrap()
    .cov;
    let vs_err = (&vs - &sigma_vs).amax();
    let omts_err = (&omts - &sigma_vs * (2.0 * rr).cosh()).amax();
    let violates = !uncertainty_ok(&vs).unwrap() && !uncertainty_ok(&omts).unwrap();
    let r3: f64 = 3.0;
    let pt = partial_transpose_gaussian(&(&sigma_vs * (2.0 * r3).cosh()), 1).unwrap();
    let tmss = two_mode_squeezed(r3).cov;
    let rel = pt
        .iter()
        .zip(tmss.iter())
        .filter(|(_, b)| b.abs() > 0.0)
        .map(|(a, b)| ((a - b) / b).abs())
        .fold(0.0, f64::max);
    let zero_pattern = pt
        .iter()
        .zip(tmss.iter())
        .all(|(a, b)| (*b == 0.0) == (*a == 0.0));
    let ok = vs_err <= 1e-4 && omts_err <= 1e-4 && violates && rel <= 2e-5 && zero_pattern;
    r.record(8, "spacetime Gaussian states", ok, format!("vs err {vs_err:.1e}, omts err {omts_err:.1e}, uncertainty violated {violates}, PT rel err {rel:.1e}"));
}

fn criterion_9(r: &mut Report) {
    let mut worst: f64 = 0.0;
    let mut flags_ok = true;
    for seed in 0..20 {
        let d = 2 + (seed as usize % 2);
        let ch = random_channel(d, 1 + seed as usize % 4, 300 + seed);
        let choi = choi_of_channel(&ch);
        let f = check_choi(&choi);
        flags_ok &= f.tp && f.cp && f.hermitian_preserving;
        for i in 0..d {
            for j in 0..d {
                let e = unit(d, i, j);
                worst = worst.max(max_abs_diff(
                    &choi.apply(&e).unwrap(),
                    &ch.apply(&e).unwrap(),
                ));
            }
        }
    }
    // Transpose map: TP and HP but not CP. Scaled identity channel: CP but not TP.
    let mut transpose = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            transpose += tensor(&unit(2, j, i), &unit(2, i, j));
        }
    }
    let t = check_choi(&ChoiOperator::new(transpose, 2, 2).unwrap());
    let scaled = choi_of_channel(&KrausChannel::identity(2)).matrix * c(2.0);
    let s = check_choi(&ChoiOperator::new(scaled, 2, 2).unwrap());
    let anti = check_choi(
        &ChoiOperator::new(
            CMatrix::from_fn(4, 4, |a, b| C64::new(0.0, (a + b) as f64)),
            2,
            2,
        )
        .unwrap(),
    );
    flags_ok &= t.tp && t.hermitian_preserving && !t.cp;
    flags_ok &= s.cp && !s.tp;
    flags_ok &= !anti.hermitian_preserving && !anti.cp;
    r.record(
        9,
        "Choi-Jamiolkowski roundtrip",
        worst <= 1e-10 && flags_ok,
        format!("roundtrip err {worst:.1e}, flags correct {flags_ok}"),
    );
}

fn criterion_10(r: &mut Report) {
    let (mut herm, mut total, mut corr): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for seed in 0..10 {
        let rho = random_density_matrix(2, 500 + seed);
        let u = haar_random_unitary(2, 600 + seed);
        for i in 1..=3 {
            for j in 1..=3 {
                let fam = HistoryFamily::from_observables(
                    rho.clone(),
                    &[pauli(i), pauli(j)],
                    vec![u.clone()],
                )
                .unwrap();
                let df = DecoherenceFunctional::compute(&fam).unwrap();
                herm = herm.max(df.hermiticity_defect());
                total = total.max((df.total() - 1.0).norm());
                let from_df = pdm_correlation_from_df(&fam).unwrap();
                let proc = matching_process(&fam).unwrap();
                let direct = event_correlation_observables(&proc, &[pauli(i), pauli(j)]).unwrap();
                corr = corr.max((from_df - direct).abs());
            }
        }
    }
    let ok = herm <= 1e-12 && total <= 1e-10 && corr <= 1e-12;
    r.record(
        10,
        "decoherence functionals",
        ok,
        format!("hermiticity {herm:.1e}, total err {total:.1e}, correlation err {corr:.1e}"),
    );
}

fn random_projector(d: usize, rank: usize, seed: u64) -> CMatrix {
    let v = haar_random_unitary(d, seed);
    let cols = v.columns(0, rank).into_owned();
    &cols * cols.adjoint()
}

fn criterion_11(r: &mut Report) {
    let mut otoc_err: f64 = 0.0;
    for (k, d) in [2usize, 4, 8].into_iter().enumerate() {
        for seed in 0..5u64 {
            let base = 1000 * (k as u64 + 1) + 10 * seed;
            let a = random_projector(d, 1 + seed as usize % (d - 1).max(1), base);
            let b = haar_random_unitary(d, base + 1);
            let u = haar_random_unitary(d, base + 2);
            let via = otoc_via_pdm(&a, &b, &u, &mixed(d)).unwrap().value;
            let direct = otoc_direct(&OtocSpec::new(a, b, u, mixed(d)).unwrap()).value;
            otoc_err = otoc_err.max((via - direct).norm());
        }
    }
    let mut fid_err: f64 = 0.0;
    for n in [2usize, 4, 8] {
        for seed in 0..20u64 {
            let s = haar_random_unitary(n, 2000 + seed);
            let psi = random_state_vector(n, 3000 + seed);
            let out = final_state_conditional_output(&psi, &s, None).unwrap();
            fid_err = fid_err.max((out.fidelity - 1.0).abs());
        }
    }
    let ok = otoc_err <= 1e-12 && fid_err <= 1e-10;
    r.record(
        11,
        "OTOC and final-state model",
        ok,
        format!("otoc err {otoc_err:.1e}, fidelity err {fid_err:.1e}"),
    );
}

fn criterion_12(r: &mut Report) {
    let (m, w) = (1.3, 0.8);
    let (mut closed, mut oracle): (f64, f64) = (0.0, 0.0);
    let mut ratios = Vec::new();
    for tau in [0.5, 1.0, 2.0] {
        let pdm = harmonic_pdm_correlation(m, w, tau).unwrap();
        let pi = harmonic_pi_correlation(w, tau).unwrap();
        let sh = (w * tau).sinh();
        closed = closed.max((pdm - 1.0 / (8.0 * m * w * sh * sh)).abs());
        closed =
            closed.max((pi - (w * tau / 2.0).cosh() / (2.0 * w * (w * tau / 2.0).sinh())).abs());
        let q = harmonic_quadrature_moment(m, w, tau, 401).unwrap();
        oracle = oracle.max((q - HARMONIC_ORACLE_CONSTANT * pdm).abs());
        ratios.push(pdm / pi);
    }
    let ok = closed <= 1e-12 && oracle <= 1e-6 && ratios.iter().all(|x| (x - 1.0).abs() > 1e-3);
    r.record(12, "harmonic oscillator correlations", ok, format!("closed-form err {closed:.1e}, oracle err {oracle:.1e} (constant {HARMONIC_ORACLE_CONSTANT}), ratios {ratios:.4?}"));
}

fn criterion_13(r: &mut Report) {
    let (l, site, periods) = (8, 0, 200);
    let mut clean_err: f64 = 0.0;
    let mut interacting_split = Vec::new();
    let mut free_split = Vec::new();
    for seed in 0..5 {
        let clean =
            FloquetChainSpec::disordered(l, 0.0, 0.0, seed, DisorderConfig::default()).unwrap();
        let s = floquet_correlation_series(&clean, site, 40).unwrap();
        for (_, v) in s.indexed().filter(|(n, _)| n % 2 == 0) {
            clean_err = clean_err.max((v.abs() - 1.0).abs());
        }
        let spec =
            FloquetChainSpec::disordered(l, 0.05, 0.0, seed, DisorderConfig::default()).unwrap();
        let s = floquet_correlation_series(&spec, site, periods).unwrap();
        interacting_split.push(subharmonic_peak(s.values()).unwrap().split);
        let s = floquet_correlation_series(&spec.without_interactions(), site, periods).unwrap();
        free_split.push(subharmonic_peak(s.values()).unwrap().split);
    }
    let ok =
        clean_err <= 1e-10 && interacting_split.iter().all(|s| !s) && free_split.iter().all(|&s| s);
    r.record(13, "Floquet time crystal (L = 8, 5 seeds)", ok, format!("clean err {clean_err:.1e}, split with J>0 {interacting_split:?}, split with J=0 {free_split:?}"));
}

fn criterion_14(r: &mut Report) {
    let n = 40;
    let coh = coherent_state(C64::new(0.4, -0.3), n);
    let fock = |k| ket(n, k);
    let mut psi = tensor(&coh, &fock(1))
        + tensor(&fock(2), &coh)
        + tensor(&fock(0), &fock(3)) * C64::new(0.0, 0.5);
    psi /= c(psi.norm());
    let rho12 = outer(&psi);
    let mut spatial: f64 = 0.0;
    for (a, b) in [
        (C64::new(0.0, 0.0), C64::new(0.3, 0.1)),
        (C64::new(-0.5, 0.2), C64::new(0.4, -0.6)),
        (C64::new(1.0, 0.0), C64::new(0.0, -1.0)),
    ] {
        let lhs = spatial_wigner_point(&rho12, a, b, n).unwrap();
        let rhs = two_mode_wigner(&rho12, a, b, n).unwrap();
        spatial = spatial.max((lhs - rhs).abs());
    }
    let grid = Grid {
        radius: 5.0,
        points_per_axis: 64,
    };
    let norm = wigner_normalization_check(&outer(&ket(n, 0)), &KrausChannel::identity(n), grid, n)
        .unwrap();
    let ok = spatial <= 1e-8 && (norm - 1.0).abs() <= 0.02;
    r.record(
        14,
        "CV spacetime Wigner",
        ok,
        format!("spatial err {spatial:.1e}, grid normalization {norm:.6}"),
    );
}

fn criterion_15(r: &mut Report) {
    let p: f64 = 0.05;
    let q = 3.0 * p * p - 2.0 * p.powi(3);
    let (xx, zz) = phase_flip_code_series(p, 11).unwrap();
    let xx_ok = xx.values().iter().all(|&v| v == 1.0);
    let mut worst_ratio: f64 = 0.0;
    for n in 1..=10 {
        let first_order = 1.0 - 2.0 * n as f64 * q;
        let gap = (zz.get(n + 1).unwrap() - first_order).abs();
        worst_ratio = worst_ratio.max(gap / (18.0 * p.powi(4) * (n * n) as f64));
    }
    r.record(
        15,
        "phase-flip code",
        xx_ok && worst_ratio <= 1.0,
        format!("XX exact {xx_ok}, worst gap / (18 p^4 N^2) = {worst_ratio:.3}"),
    );
}

#[test]
fn acceptance_criteria() {
    let mut r = Report {
        failures: Vec::new(),
    };
    let checks: [fn(&mut Report); 15] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
        criterion_13,
        criterion_14,
        criterion_15,
    ];
    for check in checks {
        check(&mut r);
    }
    assert!(r.failures.is_empty(), "failed criteria: {:?}", r.failures);
}
