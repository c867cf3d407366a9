//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Run with `cargo test -p sturm-measure-cli --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sturm_measure::analysis::find_sign_changes;
use sturm_measure::measure::{Interval, PiecewiseMeasure, Problem};
use sturm_measure::oracle::{onestep_solve, picard_solve};
use sturm_measure::propagator::{
    cross_atom, cross_atom_from_right, jump_left, jump_right, solve_ivp, Side, State,
};
use sturm_measure::theorems::{
    random_instance, run_campaign, CampaignMode, GeneratorConfig, Instance,
};

type M = PiecewiseMeasure<f64>;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sturm-measure")
}

fn config_path(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn criterion_1_classical_reduction() {
    let start = Instant::now();
    let interval = Interval::new(0.0, 7.0).unwrap();
    let problem = Problem::new(0.5, M::lebesgue(interval), M::constant(interval, -1.0)).unwrap();
    let sol = solve_ivp(&problem, FRAC_PI_2, 1.0, 0.0).unwrap();

    let mut sup_err: f64 = 0.0;
    for i in 0..1000 {
        let x = 0.001 + 6.998 * i as f64 / 999.0;
        let s = sol.evaluate(x, Side::Mid).unwrap();
        sup_err = sup_err.max((s.u - x.sin()).abs());
    }
    assert!(sup_err <= 1e-10, "sup-error vs sine: {sup_err}");

    let zs = find_sign_changes(&sol, 0.05, 6.95).unwrap();
    assert_eq!(zs.len(), 2, "expected exactly two sign changes");
    assert!((zs[0].position - PI).abs() <= 1e-10);
    assert!((zs[1].position - 2.0 * PI).abs() <= 1e-10);

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 0.1,
        "runtime {elapsed:?} exceeds 0.1 s"
    );
    println!("[PASS] criterion 1: classical reduction (sup-error {sup_err:.2e}, {elapsed:?})");
}

#[test]
fn criterion_2_jump_algebra() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED2);
    let mut checked = 0usize;
    let mut max_identity: f64 = 0.0;
    let mut max_roundtrip: f64 = 0.0;
    while checked < 100_000 {
        let r: f64 = rng.gen_range(0.0..=1.0);
        let da: f64 = rng.gen_range(0.0..2.5);
        let db: f64 = rng.gen_range(-3.0..3.0);
        let theta_c = 1.0 - (1.0 - r) * (1.0 - r) * da * db;
        let theta_r = 1.0 - r * r * da * db;
        if theta_c.abs() < 1e-3 || theta_r.abs() < 1e-3 {
            continue;
        }
        // unit-scale balanced state
        let raw = State::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if raw.max_norm() < 1e-3 {
            continue;
        }
        let mid = raw.scale(1.0 / raw.max_norm());
        checked += 1;

        let right = jump_right(r, da, db, &mid);
        let left = jump_left(r, da, db, &mid);
        let balanced = left.scale(r).add(&right.scale(1.0 - r));
        max_identity = max_identity
            .max((balanced.u - mid.u).abs())
            .max((balanced.v - mid.v).abs());
        // jump relations re-derived from the recorded mid
        let right2 = jump_right(r, da, db, &mid);
        let left2 = jump_left(r, da, db, &mid);
        max_identity = max_identity
            .max((right2.u - right.u).abs())
            .max((right2.v - right.v).abs())
            .max((left2.u - left.u).abs())
            .max((left2.v - left.v).abs());

        // crossing forward from the left limit and back again
        let (mid_f, right_f) = cross_atom(r, da, db, &left).unwrap();
        let (mid_b, left_b) = cross_atom_from_right(r, da, db, &right_f).unwrap();
        let dev = (left_b.u - left.u)
            .abs()
            .max((left_b.v - left.v).abs())
            .max((mid_b.u - mid_f.u).abs())
            .max((mid_b.v - mid_f.v).abs());
        max_roundtrip = max_roundtrip.max(dev);
    }
    assert!(
        max_identity <= 1e-13,
        "jump identities deviate by {max_identity}"
    );
    assert!(
        max_roundtrip <= 1e-12,
        "cross-atom round trip deviates by {max_roundtrip}"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "runtime {elapsed:?} exceeds 1 s"
    );
    println!(
        "[PASS] criterion 2: jump algebra (identities {max_identity:.2e}, round trip {max_roundtrip:.2e}, {elapsed:?})"
    );
}

fn oracle_instance(seed: u64) -> Instance {
    random_instance(seed, &GeneratorConfig::oracle()).unwrap()
}

#[test]
fn criterion_3_oracle_equivalence() {
    let start = Instant::now();
    let mut max_onestep: f64 = 0.0;
    let mut max_picard: f64 = 0.0;
    for i in 0..200u64 {
        let inst = oracle_instance(0xAC3000 + i);
        let p = &inst.problem;
        assert!(p.atom_positions().len() <= 10, "instance atom budget");
        assert!(
            p.alpha().densities().len() <= 12 && p.beta().densities().len() <= 12,
            "instance piece budget"
        );
        let sol = solve_ivp(p, inst.x0, inst.u_init.0, inst.u_init.1).unwrap();

        let samples = onestep_solve(p, inst.x0, inst.u_init.0, inst.u_init.1, 10_000).unwrap();
        for s in &samples {
            let exact = sol.evaluate(s.x, s.side).unwrap();
            max_onestep = max_onestep
                .max((exact.u - s.state.u).abs())
                .max((exact.v - s.state.v).abs());
        }

        // picard on the central half-interval, re-anchored at its midpoint
        let interval = p.interval();
        let len = interval.length();
        let window = (interval.a() + 0.25 * len, interval.b() - 0.25 * len);
        let mut x0 = 0.5 * (window.0 + window.1);
        while p.alpha().delta(x0).unwrap() != 0.0 || p.beta().delta(x0).unwrap() != 0.0 {
            x0 += 1e-3 * len;
        }
        let anchor = sol.evaluate(x0, Side::Mid).unwrap();
        let picard = picard_solve(p, x0, anchor.u, anchor.v, 30, 10_000, window).unwrap();
        for s in &picard {
            let exact = sol.evaluate(s.x, Side::Mid).unwrap();
            max_picard = max_picard
                .max((exact.u - s.state.u).abs())
                .max((exact.v - s.state.v).abs());
        }
    }
    assert!(
        max_onestep <= 1e-6,
        "one-step deviation {max_onestep} exceeds 1e-6"
    );
    assert!(
        max_picard <= 1e-5,
        "picard deviation {max_picard} exceeds 1e-5"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "runtime {elapsed:?} exceeds 60 s"
    );
    println!(
        "[PASS] criterion 3: oracle equivalence (one-step {max_onestep:.2e}, picard {max_picard:.2e}, {elapsed:?})"
    );
}

#[test]
fn criterion_4_isolation_and_classification() {
    let start = Instant::now();
    let summary = run_campaign(
        CampaignMode::Isolation,
        500,
        0xAC34,
        &GeneratorConfig::isolation(),
    )
    .unwrap();
    assert!(
        summary.failures.is_empty(),
        "violations: {:?}",
        summary
            .failures
            .iter()
            .map(|f| (&f.context, f.instance_seed))
            .collect::<Vec<_>>()
    );
    for kind in [
        "kind.continuous-zero",
        "kind.left-zero",
        "kind.right-zero",
        "kind.strict-flip",
    ] {
        assert!(
            summary.clause_counts.get(kind).copied().unwrap_or(0) > 0,
            "classification kind {kind} never exercised"
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "runtime {elapsed:?} exceeds 60 s"
    );
    println!(
        "[PASS] criterion 4: isolation & classification ({} zeros over 500 instances, {elapsed:?})",
        summary.clause_counts.get("zeros").copied().unwrap_or(0)
    );
}

#[test]
fn criterion_5_wronskian_suite() {
    let start = Instant::now();
    let summary = run_campaign(
        CampaignMode::Wronskian,
        200,
        0xAC35,
        &GeneratorConfig::wronskian(),
    )
    .unwrap();
    assert!(
        summary.failures.is_empty(),
        "violations: {:?}",
        summary
            .failures
            .iter()
            .map(|f| (&f.context, f.instance_seed))
            .collect::<Vec<_>>()
    );
    for check in ["constancy", "relation", "product", "series", "dependent"] {
        assert!(
            summary.aux_counts.get(check).copied().unwrap_or(0) > 0,
            "wronskian check {check} never exercised"
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "runtime {elapsed:?} exceeds 30 s"
    );
    println!(
        "[PASS] criterion 5: wronskian suite ({} relation checks, {elapsed:?})",
        summary.aux_counts.get("relation").copied().unwrap_or(0)
    );
}

#[test]
fn criterion_6_separation_campaign() {
    let start = Instant::now();
    let summary = run_campaign(
        CampaignMode::Separation,
        500,
        0xAC36,
        &GeneratorConfig::separation(),
    )
    .unwrap();
    assert!(
        summary.failures.is_empty(),
        "counterexamples: {:?}",
        summary
            .failures
            .iter()
            .map(|f| (&f.context, f.instance_seed))
            .collect::<Vec<_>>()
    );
    for id in [
        "I.1", "I.2", "I.3", "I.4", "II.1", "II.2", "II.3", "II.4", "II.5",
    ] {
        let count = summary.clause_counts.get(id).copied().unwrap_or(0);
        assert!(count >= 20, "clause {id} exercised only {count} times");
    }
    assert!(
        summary
            .aux_counts
            .get("separation-flip-product")
            .copied()
            .unwrap_or(0)
            > 0,
        "auxiliary flip-product law never exercised"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "runtime {elapsed:?} exceeds 120 s"
    );
    println!(
        "[PASS] criterion 6: separation campaign ({} pairs, clauses {:?}, {elapsed:?})",
        summary.pairs_total, summary.clause_counts
    );
}

#[test]
fn criterion_7_comparison_campaign() {
    let start = Instant::now();
    let summary = run_campaign(
        CampaignMode::Comparison,
        500,
        0xAC37,
        &GeneratorConfig::comparison(),
    )
    .unwrap();
    assert!(
        summary.failures.is_empty(),
        "counterexamples: {:?}",
        summary
            .failures
            .iter()
            .map(|f| (&f.context, f.instance_seed))
            .collect::<Vec<_>>()
    );
    for id in [
        "I.1", "I.2", "I.3", "I.4", "II.1", "II.2", "II.3", "II.4", "II.5",
    ] {
        let count = summary.clause_counts.get(id).copied().unwrap_or(0);
        assert!(count >= 20, "clause {id} exercised only {count} times");
    }
    for aux in [
        "comparison-flip-product",
        "comparison-flip-onesided-left",
        "comparison-flip-onesided-right",
    ] {
        assert!(
            summary.aux_counts.get(aux).copied().unwrap_or(0) > 0,
            "auxiliary law {aux} never exercised"
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "runtime {elapsed:?} exceeds 120 s"
    );
    println!(
        "[PASS] criterion 7: comparison campaign ({} pairs, clauses {:?}, {elapsed:?})",
        summary.pairs_total, summary.clause_counts
    );
}

#[test]
fn criterion_8_hypothesis_gating() {
    // θ_r = 0 at the atom: rejected with exit code 2 and a diagnostic
    // naming the atom
    let out = Command::new(bin())
        .args([
            "check",
            "--config",
            &config_path("hypothesis_violation.json"),
        ])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2), "expected exit code 2");
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(
        stdout.contains("\"position\": 0.0") && stdout.contains("\"pass\": false"),
        "report must name the failing atom: {stdout}"
    );
    assert!(
        stderr.contains("theta vanishes at atom(s): 0"),
        "diagnostic must name the atom: {stderr}"
    );

    // determinism of the gate
    let again = Command::new(bin())
        .args([
            "check",
            "--config",
            &config_path("hypothesis_violation.json"),
        ])
        .output()
        .expect("binary runs");
    assert_eq!(again.status.code(), Some(2));
    assert_eq!(again.stdout, out.stdout.clone());

    // a passing configuration exits 0
    let ok = Command::new(bin())
        .args(["check", "--config", &config_path("classical.json")])
        .output()
        .expect("binary runs");
    assert_eq!(ok.status.code(), Some(0));
    println!("[PASS] criterion 8: hypothesis gating (exit 2 with atom diagnostic)");
}

#[test]
fn criterion_9_cli_determinism() {
    let run = || {
        Command::new(bin())
            .args([
                "verify",
                "--config",
                &config_path("classical.json"),
                "--mode",
                "separation",
                "--n",
                "25",
                "--seed",
                "42",
            ])
            .output()
            .expect("binary runs")
    };
    let first = run();
    let second = run();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(second.status.code(), Some(0));
    assert!(!first.stdout.is_empty());
    assert_eq!(
        first.stdout, second.stdout,
        "verify output must be byte-identical across runs"
    );
    println!(
        "[PASS] criterion 9: cli determinism ({} byte report reproduced)",
        first.stdout.len()
    );
}
