//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances and runtime budgets are fixed here.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use qot_core::harness::{
    run_integral_check, run_selfdist, run_subadd_sweep, run_triangle_sweep, CostFamily, ExperimentConfig,
    ExperimentKind, Outcome, SampleRecord, SweepReport,
};
use qot_core::integral::{l_apply, lstar_apply, residue_selfcheck, verify_integral_rep, QuadratureRule, RMap};
use qot_core::kms::{cost, kms_inner};
use qot_core::linalg::{ComplexMatrix, I};
use qot_core::optimizer::{build_sdp, certify, divergence, solve, SolverParams, SolverStatus};
use qot_core::quantum::{
    derive_seed, marginal_pair, random_observable, random_state, replacer_channel, DensityMatrix, ObservableTuple,
};

use common::{dist, pure_pure_cost, random_feasible_channel, sech_integral, second_pure_channel};

const MASTER: u64 = 0x5eed_2024;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn criterion(id: u32, name: &str, budget_s: Option<f64>, body: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = body();
    let secs = start.elapsed().as_secs_f64();
    let in_time = budget_s.is_none_or(|b| secs < b);
    let passed = v.passed && in_time;
    let budget = budget_s.map_or(String::new(), |b| format!(" / budget {b} s"));
    println!(
        "{} [{id}] {name}: {}{} ({secs:.2} s{budget})",
        if passed { "PASS" } else { "FAIL" },
        v.detail,
        if in_time { "" } else { "; over runtime budget" },
    );
    passed
}

fn general_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let n = rows.max(cols);
    let re = random_observable(n, derive_seed(seed, 0));
    let im = random_observable(n, derive_seed(seed, 1));
    ComplexMatrix::from_fn(rows, cols, |r, c| re[(r, c)] + I * im[(r, c)])
}

fn random_tuple(dim: usize, d: usize, seed: u64) -> ObservableTuple {
    ObservableTuple::new(dim, (0..d as u64).map(|k| random_observable(dim, derive_seed(seed, k))).collect()).unwrap()
}

/// Instance `i` of the operator and integral suites: dims in {2,3,4}, about
/// half with rank-deficient `rho`.
fn suite_instance(i: u64) -> qot_core::quantum::MarginalInstance {
    let n = 2 + (i % 3) as usize;
    let m = 2 + ((i / 3) % 3) as usize;
    let seed = derive_seed(MASTER, 1000 + i);
    match i % 4 {
        0 => marginal_pair(n, m, n, m, seed),
        1 => marginal_pair(n, m, n, 1, seed),
        // isometric channel with pure sigma: rank(rho) = 1
        2 => marginal_pair(n.max(m), m, 1, 1, seed),
        _ => marginal_pair(n, m, 2.max(m.div_ceil(n)), 1, seed),
    }
    .unwrap()
}

fn quadrature_sanity() -> Verdict {
    let rule = QuadratureRule::default();
    let weight_err = (rule.total_weight() - 1.0).abs();
    let first_moment = rule.integrate(|t| t).abs();
    let mut worst_rule = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for a in [0.1, 1.0, 3.0] {
        let q = rule.integrate(|t| (a * t).cos());
        let oracle = sech_integral(|t| (a * t).cos());
        worst_rule = worst_rule.max((q - oracle).abs());
        worst_oracle = worst_oracle.max((oracle - 1.0 / (a / 4.0).cosh()).abs());
    }
    verdict(
        weight_err <= 1e-9 && first_moment <= 1e-10 && worst_rule <= 1e-8 && worst_oracle <= 1e-10,
        format!(
            "|sum w - 1| = {weight_err:.1e} (<= 1e-9), |int t| = {first_moment:.1e} (<= 1e-10), \
             max |rule - adaptive oracle| = {worst_rule:.1e} (<= 1e-8), oracle vs 1/cosh(a/4) {worst_oracle:.1e}"
        ),
    )
}

fn residue_identity() -> Verdict {
    let rule = QuadratureRule::default();
    let worst = (-12..=12).map(|k| residue_selfcheck(k as f64 * 0.25, &rule).gap).fold(0.0f64, f64::max);
    verdict(worst <= 1e-8, format!("max |f(0) - quadrature| over a in [-3, 3] = {worst:.1e} (<= 1e-8)"))
}

fn integral_representation() -> Verdict {
    let rule = QuadratureRule::default();
    let mut worst = 0.0f64;
    let mut rank_deficient = 0;
    let mut failures = 0;
    let mut dims_differ = 0;
    for i in 0..200u64 {
        let inst = suite_instance(i);
        let d = 1 + ((i / 9) % 3) as usize;
        let (n, m) = (inst.rho.dim(), inst.sigma.dim());
        let xs = random_tuple(n, d, derive_seed(MASTER, 2000 + i));
        let ys = random_tuple(m, d, derive_seed(MASTER, 3000 + i));
        match verify_integral_rep(&inst.channel, &inst.rho, &inst.sigma, &xs, &ys, &rule) {
            Ok(c) => {
                let rel = c.gap / (1.0 + c.lhs.abs());
                worst = worst.max(rel);
                if rel > 1e-6 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
        rank_deficient += usize::from(inst.rho.rank() < n);
        dims_differ += usize::from(n != m);
    }
    verdict(
        failures == 0 && rank_deficient > 0,
        format!(
            "200 instances ({rank_deficient} rank-deficient rho, {dims_differ} with dim_in != dim_out), \
             max gap/(1+cost) = {worst:.1e} (<= 1e-6), failures {failures}"
        ),
    )
}

fn operator_lemmas() -> Verdict {
    let (mut l_iso, mut r_iso, mut r_kernel, mut intertwine) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut contraction = f64::INFINITY;
    let mut kernel_cases = 0;
    let count = 120u64;
    for i in 0..count {
        let inst = suite_instance(i);
        let (ch, rho, sigma) = (&inst.channel, &inst.rho, &inst.sigma);
        let (n, m) = (rho.dim(), sigma.dim());
        let seed = derive_seed(MASTER, 4000 + i);

        let y = general_matrix(m, m, derive_seed(seed, 0));
        let ly = l_apply(ch, &y).unwrap();
        l_iso = l_iso.max((ly.norm() - y.frobenius_norm()).abs());

        let r = RMap::new(ch, rho, sigma).unwrap();
        let a = general_matrix(n, n, derive_seed(seed, 1));
        let p = rho.support_projection();
        r_iso = r_iso.max((r.apply(&a).unwrap().norm() - (&a * &p).frobenius_norm()).abs());
        if rho.rank() < n {
            let ker = &a * &(&ComplexMatrix::identity(n) - &p);
            r_kernel = r_kernel.max(r.apply(&ker).unwrap().norm());
            kernel_cases += 1;
        }

        let x = random_observable(n, derive_seed(seed, 2));
        let lhs = lstar_apply(ch, &r.apply(&(&x * &rho.sqrt())).unwrap()).unwrap();
        let phix = ch.heisenberg_apply(&x).unwrap();
        intertwine = intertwine.max(dist(&lhs, &(&phix * &sigma.sqrt())));

        let slack = kms_inner(&x, &x, rho).unwrap() - kms_inner(&phix, &phix, sigma).unwrap();
        contraction = contraction.min(slack);
    }
    let r_worst = r_iso.max(r_kernel);
    verdict(
        l_iso <= 1e-12 && r_worst <= 1e-10 && intertwine <= 1e-10 && contraction >= -1e-10 && kernel_cases > 0,
        format!(
            "{count} instances: L isometry {l_iso:.1e} (<= 1e-12), R partial isometry {r_iso:.1e} and on \
             {kernel_cases} kernel cases {r_kernel:.1e} (<= 1e-10), L*R intertwining {intertwine:.1e} (<= 1e-10), \
             min KMS contraction slack {contraction:.1e} (>= -1e-10)"
        ),
    )
}

fn sweep_config(kind: ExperimentKind, seed: u64, samples: usize) -> ExperimentConfig {
    ExperimentConfig { experiment: kind, seed: Some(seed), samples, ..Default::default() }
}

fn subadditivity() -> Verdict {
    let qubit = sweep_config(ExperimentKind::SubaddSweep, derive_seed(MASTER, 5), 100);
    let qutrit = ExperimentConfig {
        dim: 3,
        d: 2,
        costs: CostFamily::Random,
        rank: Some(2),
        ..sweep_config(ExperimentKind::SubaddSweep, derive_seed(MASTER, 6), 100)
    };
    let mut min_slack = f64::INFINITY;
    let mut bad = 0;
    for cfg in [qubit, qutrit] {
        let r = run_subadd_sweep(&cfg).unwrap();
        for rec in &r.records {
            if rec.outcome == Outcome::Error || rec.outcome == Outcome::SolverError {
                bad += 1;
            } else {
                min_slack = min_slack.min(rec.slack);
            }
        }
    }
    verdict(
        bad == 0 && min_slack >= -1e-8,
        format!("200 chains (100 qubit Pauli, 100 qutrit random rank 2): min slack {min_slack:.3e} (>= -1e-8), errors {bad}"),
    )
}

fn triangle() -> Verdict {
    let cfg = sweep_config(ExperimentKind::TriangleSweep, derive_seed(MASTER, 7), 100);
    let r = run_triangle_sweep(&cfg).unwrap();
    let worst = r.records.iter().map(|x| x.violation).fold(f64::NEG_INFINITY, f64::max);
    let not_optimal = r.records.iter().filter(|x| !x.all_optimal).count();
    let errors = r.records.iter().filter(|x| x.error.is_some()).count();
    verdict(
        worst <= 1e-5 && not_optimal == 0 && errors == 0,
        format!(
            "100 qubit triples, Pauli costs, 300 solves at tol 1e-8/1e-6: max W13 - W12 - W23 = {worst:.3e} \
             (<= 1e-5), non-optimal triples {not_optimal}, errors {errors}"
        ),
    )
}

fn exact_anchors() -> Verdict {
    let cfg = sweep_config(ExperimentKind::Selfdist, derive_seed(MASTER, 8), 50);
    let r = run_selfdist(&cfg).unwrap();
    let self_worst = r.records.iter().map(|x| x.divergence).fold(0.0f64, f64::max);
    let self_ok = r.records.iter().all(|x| x.status == Some(SolverStatus::Optimal));

    let params = SolverParams::default();
    let (mut channel_gap, mut closed_gap, mut sdp_gap) = (0.0f64, 0.0f64, 0.0f64);
    let mut pure_ok = true;
    for i in 0..20u64 {
        let n = 2 + (i % 2) as usize;
        let seed = derive_seed(MASTER, 9000 + i);
        let rho = random_state(n, 1, derive_seed(seed, 0)).unwrap();
        let sigma = random_state(n, 1, derive_seed(seed, 1)).unwrap();
        let xs = if n == 2 { ObservableTuple::pauli() } else { random_tuple(n, 2, derive_seed(seed, 2)) };
        let closed = pure_pure_cost(&rho, &sigma, &xs);
        let c1 = cost(&replacer_channel(&rho, n).unwrap(), &rho, &sigma, &xs, &xs).unwrap().total;
        let c2 = cost(&second_pure_channel(&rho, &sigma, seed), &rho, &sigma, &xs, &xs).unwrap().total;
        channel_gap = channel_gap.max((c1 - c2).abs());
        closed_gap = closed_gap.max((c1 - closed).abs());
        let sol = divergence(&rho, &sigma, &xs, &params).unwrap();
        pure_ok &= sol.status == SolverStatus::Optimal;
        sdp_gap = sdp_gap.max((sol.optimal_cost - closed).abs());
    }

    let zero = DensityMatrix::basis(2, 0).unwrap();
    let one = DensityMatrix::basis(2, 1).unwrap();
    let w01 = divergence(&zero, &one, &ObservableTuple::pauli(), &params).unwrap();
    let w01_err = (w01.divergence - 2.0).abs();

    verdict(
        self_ok
            && self_worst <= 1e-3
            && pure_ok
            && channel_gap <= 1e-10
            && closed_gap <= 1e-10
            && sdp_gap <= 1e-5
            && w01_err <= 1e-5,
        format!(
            "max W(rho,rho) over 50 states {self_worst:.2e} (<= 1e-3); 20 pure pairs: two feasible channels agree to \
             {channel_gap:.1e}, closed form {closed_gap:.1e}, SDP optimum vs sum (<x>_rho - <x>_sigma)^2 {sdp_gap:.1e} \
             (<= 1e-5); |W(|0>,|1>) - 2| = {w01_err:.1e}"
        ),
    )
}

fn certificates() -> Verdict {
    let params = SolverParams::default();
    let (mut constraint, mut psd, mut gap, mut round_trip) = (0.0f64, f64::INFINITY, 0.0f64, 0.0f64);
    let mut beaten_by = f64::NEG_INFINITY;
    let (mut optimal, mut failed_certs) = (0, 0);
    let count = 40u64;
    for i in 0..count {
        let n = 2 + (i % 2) as usize;
        let seed = derive_seed(MASTER, 10_000 + i);
        let rank = if i % 5 == 4 { 1 } else { n };
        let inst = marginal_pair(n, n, 1 + (i % 3) as usize, rank, seed).unwrap();
        let xs = if n == 2 && i % 4 == 0 {
            ObservableTuple::pauli()
        } else {
            random_tuple(n, 1 + (i % 3) as usize, derive_seed(seed, 7))
        };
        let problem = build_sdp(&inst.rho, &inst.sigma, &xs, &xs).unwrap();
        let sol = solve(&problem, &params).unwrap();
        if sol.status != SolverStatus::Optimal {
            continue;
        }
        optimal += 1;
        let cert = certify(&sol, &problem);
        failed_certs += usize::from(!cert.passed);
        constraint = constraint.max(cert.max_constraint_violation);
        psd = psd.min(cert.psd_margin);
        gap = gap.max(cert.duality_gap.abs());
        round_trip = round_trip.max(cert.round_trip_mismatch);

        let mut feasible = vec![inst.channel.clone(), replacer_channel(&inst.rho, n).unwrap()];
        feasible.extend(
            (0..4).map(|k| random_feasible_channel(&inst.channel, &inst.rho, &inst.sigma, derive_seed(seed, 20 + k))),
        );
        for ch in &feasible {
            let c = cost(ch, &inst.rho, &inst.sigma, &xs, &xs).unwrap().total;
            beaten_by = beaten_by.max(sol.optimal_cost - c);
        }
    }
    verdict(
        optimal == count as usize
            && failed_certs == 0
            && constraint <= 1e-8
            && psd >= -1e-9
            && gap <= 1e-6
            && round_trip <= 1e-6
            && beaten_by <= 1e-6,
        format!(
            "{optimal}/{count} Optimal: max constraint residual {constraint:.1e} (<= 1e-8), min PSD margin {psd:.1e} \
             (>= -1e-9), max |gap| {gap:.1e} (<= 1e-6), max round-trip mismatch {round_trip:.1e} (<= 1e-6), \
             failed certificates {failed_certs}; 6 feasible channels per instance beat the optimum by at most {beaten_by:.1e} (<= 1e-6)"
        ),
    )
}

fn fingerprint<R: SampleRecord>(r: SweepReport<R>) -> String {
    let r = r.without_timing();
    format!("{}\n{}", serde_json::to_string(&r.summary).unwrap(), serde_json::to_string(&r.records).unwrap())
}

fn determinism() -> Verdict {
    let configs = [
        ExperimentConfig {
            dim: 3,
            dim_out: Some(2),
            d: 2,
            costs: CostFamily::Random,
            ..sweep_config(ExperimentKind::IntegralCheck, 11, 24)
        },
        sweep_config(ExperimentKind::SubaddSweep, 12, 24),
        sweep_config(ExperimentKind::TriangleSweep, 13, 12),
        sweep_config(ExperimentKind::Selfdist, 14, 12),
    ];
    let mut mismatches = Vec::new();
    for cfg in configs {
        let run = |jobs: usize| {
            let c = ExperimentConfig { jobs, ..cfg.clone() };
            match c.experiment {
                ExperimentKind::IntegralCheck => fingerprint(run_integral_check(&c).unwrap()),
                ExperimentKind::SubaddSweep => fingerprint(run_subadd_sweep(&c).unwrap()),
                ExperimentKind::TriangleSweep => fingerprint(run_triangle_sweep(&c).unwrap()),
                ExperimentKind::Selfdist => fingerprint(run_selfdist(&c).unwrap()),
            }
        };
        let (a, b, c) = (run(1), run(8), run(1));
        if a != b || a != c {
            mismatches.push(cfg.experiment.name());
        }
    }
    verdict(
        mismatches.is_empty(),
        format!("4 sweeps, runs at jobs 1, 8, 1 compared without timing fields; mismatching: {mismatches:?}"),
    )
}

fn main() -> ExitCode {
    let results = [
        criterion(1, "quadrature sanity", Some(1.0), quadrature_sanity),
        criterion(2, "residue identity", Some(1.0), residue_identity),
        criterion(3, "integral representation", Some(60.0), integral_representation),
        criterion(4, "operator lemmas", Some(30.0), operator_lemmas),
        criterion(5, "subadditivity", Some(60.0), subadditivity),
        criterion(6, "triangle inequality", Some(600.0), triangle),
        criterion(7, "exact anchors", Some(300.0), exact_anchors),
        criterion(8, "optimizer certificates", Some(300.0), certificates),
        criterion(9, "determinism", None, determinism),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
