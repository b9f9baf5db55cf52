//! Acceptance criteria, one test per criterion. Each test prints a single
//! `[acceptance] PASS|FAIL` line to stderr (visible without `--nocapture`)
//! and then asserts.

mod common;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use common::{dense_haar_forward, random_instance, reference_prox, verdict, NonSmooth};
use penalty_ipg::baselines::{fista_momentum, run_baseline, BaselineMethod};
use penalty_ipg::functions::{DistanceToBall, L1Norm, ProxMap, ScaledSqNorm};
use penalty_ipg::haar::HaarTransform;
use penalty_ipg::netpbm::read_pgm;
use penalty_ipg::problems::{build_heron, build_inpainting, inpainting_oracle};
use penalty_ipg::prox::BallSet;
use penalty_ipg::rng::SeededRng;
use penalty_ipg::solver::{
    ipg_step, quasi_fejer_check, solve, solve_with, validate_hypotheses, FejerTolerances,
    PenaltyFunction, SolveOptions, SolveReport, SolverState, StepSchedule, StoppingRule,
};
use penalty_ipg::Vector;

fn image_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/astronaut_384x512.pgm")
}

const HERON_SEEDS: std::ops::Range<u64> = 0..10;

fn heron_runs(consistent: bool, a: f64, b: f64) -> Vec<(penalty_ipg::problems::HeronInstance, SolveReport)> {
    HERON_SEEDS
        .map(|seed| {
            let inst = build_heron(5, 2, consistent, seed).unwrap();
            let problem = inst.problem().unwrap();
            let report = solve(
                &problem,
                &inst.schedule(a, b).unwrap(),
                &StoppingRule::relative_change(1e-6, 200_000).unwrap(),
            )
            .unwrap();
            (inst, report)
        })
        .collect()
}

#[test]
fn criterion_1_transcription_oracle() {
    let clock = Instant::now();
    let mut rng = SeededRng::new(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let raw = random_instance(&mut rng);
        let problem = raw.to_problem();
        let sched = StepSchedule::new(rng.uniform_open(0.1, 2.0), rng.uniform_open(0.01, 1.0) / raw.frobenius_sq())
            .unwrap();
        let mut state = SolverState::new(problem.start.clone());
        let mut reference = raw.start.clone();
        for k in 1..=3 {
            reference = raw.reference_step(&reference, sched.alpha(k), sched.beta(k));
            ipg_step(&mut state, &problem, &sched).unwrap();
            for (a, b) in state.x().iter().zip(&reference) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    let pass = worst <= 1e-12 && secs < 5.0;
    verdict(
        "criterion 1 (transcription oracle)",
        pass,
        &format!("max |diff| = {worst:.3e} over 100 instances x 3 steps, {secs:.2}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_2_consistent_heron_exactness() {
    let clock = Instant::now();
    let runs = heron_runs(true, 0.6, 1.9);
    let secs = clock.elapsed().as_secs_f64();
    let norms: Vec<f64> = runs.iter().map(|(_, r)| r.x.norm()).collect();
    let iters: Vec<usize> = runs.iter().map(|(_, r)| r.iterations).collect();
    let hits = norms.iter().filter(|&&v| v <= 1e-3).count();
    let in_band = runs
        .iter()
        .all(|(_, r)| r.converged() && (300..=12_000).contains(&r.iterations));
    let mean_iters = iters.iter().sum::<usize>() as f64 / iters.len() as f64;
    let pass = hits >= 9 && in_band && secs < 10.0;
    verdict(
        "criterion 2 (consistent Heron exactness)",
        pass,
        &format!(
            "{hits}/10 seeds with |x_K| <= 1e-3 (norms {:?}), iterations {iters:?} (mean {mean_iters:.0}), {secs:.2}s",
            norms.iter().map(|v| format!("{v:.1e}")).collect::<Vec<_>>()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_inconsistent_heron_feasibility() {
    let clock = Instant::now();
    let runs = heron_runs(false, 0.6, 1.9);
    let secs = clock.elapsed().as_secs_f64();
    let mut hits = 0;
    let mut details = Vec::new();
    for (inst, report) in &runs {
        let x_ls = inst.oracle.as_ref().expect("full column rank");
        let grad = inst.penalty_gradient(&report.x).norm() / (inst.norm_a * inst.norm_a);
        let dist = report.x.dist(x_ls);
        if grad <= 1e-3 && dist <= 1e-2 {
            hits += 1;
        }
        details.push(format!("({grad:.1e}, {dist:.1e})"));
    }
    let pass = hits >= 9 && secs < 10.0;
    verdict(
        "criterion 3 (inconsistent Heron feasibility)",
        pass,
        &format!("{hits}/10 seeds pass; (scaled gradient, distance to x_ls) = {}, {secs:.2}s", details.join(" ")),
    );
    assert!(pass);
}

#[test]
fn criterion_4_toy_inpainting_oracle() {
    let clock = Instant::now();
    let mut rng = SeededRng::new(77);
    let img = penalty_ipg::haar::Image::new(8, 8, rng.uniform_vec(64, 0.0, 1.0)).unwrap();
    let inst = build_inpainting(&img, 0.6, 0.1, 1e-4, 5, None).unwrap();
    let oracle = inpainting_oracle(&inst, 1_000_000).unwrap();
    let report = solve(
        &inst.problem().unwrap(),
        &StepSchedule::new(1.1, 1.8).unwrap(),
        &StoppingRule::relative_change(1e-8, 10_000_000).unwrap(),
    )
    .unwrap();
    let dist = report.x.dist(&oracle.x);
    let secs = clock.elapsed().as_secs_f64();
    let pass = report.converged() && dist <= 1e-3 && secs < 30.0;
    verdict(
        "criterion 4 (toy inpainting vs oracle)",
        pass,
        &format!(
            "8x8, |x_K - x_oracle| = {dist:.3e} after {} iterations (oracle {} iterations, residual {:.1e}), {secs:.2}s",
            report.iterations,
            oracle.iterations,
            oracle.residuals.last().copied().unwrap_or(0.0)
        ),
    );
    assert!(pass);
}

fn ipg_isnr_trace(inst: &penalty_ipg::problems::InpaintingInstance, iters: usize) -> Vec<f64> {
    let opts = SolveOptions {
        metric: Some(inst.isnr_metric()),
        ..Default::default()
    };
    let report = solve_with(
        &inst.problem().unwrap(),
        &StepSchedule::new(1.1, 1.8).unwrap(),
        &StoppingRule::fixed_iterations(iters),
        &opts,
    )
    .unwrap();
    report.trace.iter().map(|r| r.metric.unwrap()).collect()
}

#[test]
fn criterion_5_desk_scale_isnr_band() {
    let clock = Instant::now();
    let clean = read_pgm(image_path()).unwrap();
    let inst = build_inpainting(&clean, 0.6, 1.0, 1e-4, 1, None).unwrap();
    // trace[k - 1] holds x_k; iteration j produces x_{j+1}
    let isnr = ipg_isnr_trace(&inst, 20);
    let (at5, at20) = (isnr[5], isnr[20]);
    let secs = clock.elapsed().as_secs_f64();
    let pass = (14.5..=18.5).contains(&at20) && at20 - at5 >= 1.0 && secs < 60.0;
    verdict(
        "criterion 5 (ISNR band)",
        pass,
        &format!("ISNR after 20 iterations {at20:.4} dB, after 5 {at5:.4} dB, {secs:.2}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_6_solver_ordering() {
    let clean = read_pgm(image_path()).unwrap();
    let mut wins = 0;
    let mut rows = Vec::new();
    for seed in 1..=5 {
        let ipg = *ipg_isnr_trace(&build_inpainting(&clean, 0.6, 1.0, 1e-4, seed, None).unwrap(), 20)
            .last()
            .unwrap();

        let pgm_inst = build_inpainting(&clean, 0.6, 0.1, 1e-8, seed, None).unwrap();
        let comp = pgm_inst.composite().unwrap();
        let pgm = run_baseline(
            &comp,
            BaselineMethod::Pgm {
                gamma: 1.9 / (1e-8 + 1.0),
                allow_out_of_range: false,
            },
            &pgm_inst.observed,
            &StoppingRule::fixed_iterations(20),
            None,
        )
        .unwrap();
        let pgm = pgm_inst.isnr(&pgm.x);

        let fista_inst = build_inpainting(&clean, 0.6, 0.05, 1e-4, seed, None).unwrap();
        let fista = run_baseline(
            &fista_inst.composite().unwrap(),
            BaselineMethod::Fista,
            &fista_inst.observed,
            &StoppingRule::fixed_iterations(20),
            None,
        )
        .unwrap();
        let fista = fista_inst.isnr(&fista.x);

        if ipg >= pgm {
            wins += 1;
        }
        rows.push(format!("seed {seed}: ipg {ipg:.3} pgm {pgm:.3} fista {fista:.3}"));
    }
    let pass = wins >= 4;
    verdict(
        "criterion 6 (Algorithm 1 >= PGM)",
        pass,
        &format!("{wins}/5 seeds; {}", rows.join("; ")),
    );
    assert!(pass);
}

/// Blank pattern of the published ISNR grid: rows are b = 0.5..2.0, columns
/// a = 0.8..2.0, `-` marks a cell that was not run.
const TABLE_PATTERN: [&str; 16] = [
    "xxxxxxxxxxxxx",
    "xxxxxxxxxxxxx",
    "xxxxxxxxxxxxx",
    "xxxxxxxxxxxxx",
    "xxxxxxxxxxxxx",
    "xxxxxxxxxxxx-",
    "xxxxxxxxxxx--",
    "xxxxxxxxx----",
    "xxxxxxxx-----",
    "xxxxxxx------",
    "xxxxxx-------",
    "xxxxx--------",
    "xxxx---------",
    "xxxx---------",
    "xxx----------",
    "xx-----------",
];

#[test]
fn criterion_7_hypothesis_gate() {
    let clock = Instant::now();
    let a_values = ["0.8", "0.9", "1", "1.1", "1.2", "1.3", "1.4", "1.5", "1.6", "1.7", "1.8", "1.9", "2"];
    let b_values = [
        "0.5", "0.6", "0.7", "0.8", "0.9", "1", "1.1", "1.2", "1.3", "1.4", "1.5", "1.6", "1.7", "1.8", "1.9", "2",
    ];
    let g = PenaltyFunction::new(Arc::new(ScaledSqNorm { weight: 1.0 }), 0.0).unwrap();
    let mut mismatches = Vec::new();
    for (row, b) in b_values.iter().enumerate() {
        for (col, a) in a_values.iter().enumerate() {
            let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
            let accepted = validate_hypotheses(&StepSchedule::new(a, b).unwrap(), &g).passed();
            let published = TABLE_PATTERN[row].as_bytes()[col] == b'x';
            if accepted != published {
                mismatches.push(format!("(a={a}, b={b})"));
            }
        }
    }
    let h3 = |a, b| {
        validate_hypotheses(&StepSchedule::new(a, b).unwrap(), &g)
            .get("H3")
            .cloned()
            .unwrap()
    };
    let rejected = !validate_hypotheses(&StepSchedule::new(2.0, 1.0).unwrap(), &g).passed();
    let margin = h3(1.9, 1.0).margin.unwrap();
    let secs = clock.elapsed().as_secs_f64();
    let pass = mismatches.is_empty() && rejected && (margin - 0.1).abs() < 1e-12 && secs < 1.0;
    verdict(
        "criterion 7 (hypothesis gate)",
        pass,
        &format!(
            "{} of 208 cells disagree {mismatches:?}; (2,1) rejected: {rejected}; (1.9,1) margin {margin:.4}; {secs:.3}s",
            mismatches.len()
        ),
    );
    assert!(pass);
}

fn prox_optimality_failures() -> Vec<String> {
    // The prox output p of f at y with step t must satisfy
    // f(p) + |p - y|²/(2t) <= f(q) + |q - y|²/(2t) for every probe q.
    let mut rng = SeededRng::new(8);
    let mut failures = Vec::new();
    for case in 0..300 {
        let n = 1 + case % 4;
        let y = Vector::from_slice(&rng.uniform_vec(n, -4.0, 4.0));
        let t = rng.uniform_open(0.05, 3.0);
        let (f, raw): (Box<dyn ProxMap>, NonSmooth) = match case % 3 {
            0 => {
                let w = rng.uniform_open(0.1, 2.0);
                (Box::new(L1Norm { weight: w }), NonSmooth::L1(w))
            }
            1 => {
                let c = rng.uniform_vec(n, -2.0, 2.0);
                let r = rng.uniform_open(0.1, 1.5);
                let ball = BallSet::new(Vector::from_slice(&c), r).unwrap();
                (Box::new(DistanceToBall { ball }), NonSmooth::Ball(c, r))
            }
            _ => {
                let w = rng.uniform_open(0.1, 2.0);
                (Box::new(ScaledSqNorm { weight: w }), NonSmooth::SqNorm(w))
            }
        };
        let p = f.prox(&y, t).unwrap();
        let model = |q: &Vector| f.value(q) + q.dist_sq(&y) / (2.0 * t);
        let best = model(&p);
        for _ in 0..200 {
            let scale = rng.uniform_open(1e-4, 1.0);
            let dir = Vector::from_slice(&rng.uniform_vec(n, -1.0, 1.0));
            let q = p.add_scaled(scale, &dir);
            if model(&q) < best - 1e-12 {
                failures.push(format!("case {case}: probe beats prox"));
                break;
            }
        }
        let reference = reference_prox(&raw, &y, t);
        let diff = p.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if diff > 1e-12 {
            failures.push(format!("case {case}: differs from reference by {diff:e}"));
        }
    }
    failures
}

fn haar_dense_max_error() -> f64 {
    let mut rng = SeededRng::new(9);
    let mut worst = 0.0f64;
    for (h, w) in [(2, 2), (2, 4), (4, 2), (4, 4), (4, 8), (8, 4), (8, 8), (2, 8), (8, 2)] {
        let max = penalty_ipg::haar::max_levels(h, w).min(3);
        for levels in 1..=max {
            let t = HaarTransform::new(h, w, levels).unwrap();
            for _ in 0..5 {
                let x = rng.uniform_vec(h * w, -1.0, 1.0);
                let fast = t.forward(&Vector::from_slice(&x)).unwrap();
                let dense = dense_haar_forward(h, w, levels, &x);
                for (a, b) in fast.iter().zip(&dense) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    worst
}

#[test]
fn criterion_8_property_suites() {
    let clock = Instant::now();

    let prox_failures = prox_optimality_failures();
    let prox_ok = prox_failures.is_empty();

    let haar_err = haar_dense_max_error();
    let haar_ok = haar_err <= 1e-12;

    let tol = FejerTolerances::default();
    let mut fejer_rows = Vec::new();
    let mut fejer_ok = true;
    for (_, report) in heron_runs(true, 0.6, 1.9) {
        let r = quasi_fejer_check(&report.trace, &tol).unwrap();
        fejer_ok &= r.tail_ok && r.penalty_ok;
        fejer_rows.push(format!("({:.1e}, {:.1e})", r.tail_slack_sum, r.final_penalty));
    }

    let mut t = 1.0;
    let mut t_ok = true;
    for k in 1..=10_000usize {
        if t < (k as f64 + 1.0) / 2.0 {
            t_ok = false;
        }
        let next = fista_momentum(t);
        t_ok &= next > t;
        t = next;
    }

    let secs = clock.elapsed().as_secs_f64();
    let pass = prox_ok && haar_ok && fejer_ok && t_ok && secs < 30.0;
    verdict(
        "criterion 8 (property suites)",
        pass,
        &format!(
            "prox {} ({} failures), Haar dense max err {haar_err:.1e}, quasi-Fejer {} (tail slack, final g) = {}, FISTA t bound {}, {secs:.2}s",
            if prox_ok { "ok" } else { "FAILED" },
            prox_failures.len(),
            if fejer_ok { "ok" } else { "FAILED" },
            fejer_rows.join(" "),
            if t_ok { "ok" } else { "FAILED" },
        ),
    );
    assert!(pass);
}
