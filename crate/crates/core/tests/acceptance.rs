//! Acceptance battery. Runs every criterion in sequence, prints one
//! PASS/FAIL line each, and exits non-zero if any failed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::Rng;

use stratmine::classifiers::smo::{self, dual_objective, Kernel, SmoParams};
use stratmine::classifiers::{self, fit, read_model, write_model, ClassifierSpec, ModelState, OneRRule};
use stratmine::evaluate::{cross_validate, make_ordered_folds, rule_conformance, select_hypothesis_space};
use stratmine::featurize::{featurize_ct, featurize_rps, pattern_space_size, WindowConfig};
use stratmine::gamedata::{
    parse_ct_log, parse_rps_log, read_arff, write_arff, write_ct_log, write_rps_log, Attribute, Dataset, Value,
};
use stratmine::report::{DataSummary, EvaluationReport, Run};
use stratmine::synthetic::{
    oracle_expected_accuracy, synth_ct, synth_rps, CtResponderRule, Generator, Predictor, RpsSubjectRule, Source,
};
use stratmine::{seed, Gesture};

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let ok = parts.iter().all(|p| p.ok);
    let detail = parts
        .iter()
        .map(|p| format!("{}{}", if p.ok { "" } else { "!" }, p.detail))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { ok, detail }
}

fn within_time(start: Instant, limit: Duration) -> Outcome {
    let took = start.elapsed();
    check(
        took < limit,
        format!("{:.2}s < {}s", took.as_secs_f64(), limit.as_secs()),
    )
}

fn three_sigma(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let rule = RpsSubjectRule::shift(Source::Own, 1, 0.9, 1);
    let episodes = synth_rps(10, 2, 30, &rule, None).unwrap();
    let decisions: usize = episodes.iter().map(|e| e.len()).sum();
    let d = featurize_rps(&episodes, WindowConfig::default()).unwrap();
    let nominal = d.attributes().iter().all(|a| !a.is_numeric());
    let space = pattern_space_size(WindowConfig::new(3).unwrap(), 3);
    all(vec![
        check(episodes.len() == 20, format!("{} episodes", episodes.len())),
        check(decisions == 600, format!("{decisions} decisions")),
        check(d.len() == 540, format!("{} instances", d.len())),
        check(
            d.attributes().len() == 7 && nominal,
            format!("{} nominal attributes", d.attributes().len()),
        ),
        check(space == Some(2187), format!("pattern space {space:?}")),
        within_time(start, Duration::from_secs(1)),
    ])
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let rule = RpsSubjectRule::shift(Source::Own, 1, 0.9, 2);
    let episodes = synth_rps(93, 2, 30, &rule, None).unwrap();
    let d = featurize_rps(&episodes, WindowConfig::default()).unwrap();
    let expected = oracle_expected_accuracy(Generator::Rps(&rule), Predictor::Rule).unwrap();

    let m = classifiers::fit_one_r(&d, classifiers::DEFAULT_MIN_BUCKET).unwrap();
    let ModelState::OneR(r) = m.state() else { unreachable!() };
    let source = d.attributes()[r.attribute].name().to_string();
    let want_map: Vec<Option<usize>> = Gesture::ALL.iter().map(|g| Some(g.beaten_by().index())).collect();
    let map_ok = matches!(&r.rule, OneRRule::Nominal { value_map } if *value_map == want_map);

    let cv = cross_validate(&d, &ClassifierSpec::OneR { min_bucket: 6 }, 10).unwrap();
    let acc = cv.mean_accuracy.unwrap_or(0.0);
    all(vec![
        check(d.len() >= 5000, format!("n={}", d.len())),
        check(source == "own_prev_1", format!("attribute {source}")),
        check(map_ok, "shift map recovered"),
        check(
            (acc - expected).abs() <= 0.03,
            format!("cv {acc:.4} vs oracle {expected}"),
        ),
        within_time(start, Duration::from_secs(10)),
    ])
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let rule = CtResponderRule::new(0.9515, 3);
    let d = featurize_ct(&synth_ct(5000, &rule).unwrap()).unwrap();

    let dt = cross_validate(&d, &ClassifierSpec::DecisionTable { stale_limit: 5 }, 10).unwrap();
    let dt_acc = dt.mean_accuracy.unwrap_or(0.0);
    let refusal = fit(&d, &ClassifierSpec::FixedRule(rule.fixed_rule())).unwrap();
    let conformance = rule_conformance(&d, &refusal).unwrap();
    let eq = cross_validate(&d, &ClassifierSpec::EquilibriumResponder, 10).unwrap();
    let eq_acc = eq.mean_accuracy.unwrap_or(1.0);
    all(vec![
        check(
            (0.92..=0.98).contains(&dt_acc),
            format!("decision table cv {dt_acc:.4}"),
        ),
        check(
            (conformance - 0.9515).abs() <= 0.02,
            format!("refusal conformance {conformance:.4}"),
        ),
        check(
            eq_acc < dt_acc && eq_acc < conformance,
            format!("equilibrium responder {eq_acc:.4}"),
        ),
        within_time(start, Duration::from_secs(30)),
    ])
}

/// Maximum of the dual by enumerating every assignment of each multiplier
/// to its lower bound, upper bound or the interior, and solving the
/// stationarity system on each face. Exact for positive definite kernels.
fn active_set_optimum(points: &[Vec<f64>], y: &[f64], kernel: Kernel, c: f64) -> f64 {
    let n = points.len();
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| y[i] * y[j] * kernel.eval(&points[i], &points[j]))
                .collect()
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    for code in 0..3usize.pow(n as u32) {
        let mut state = vec![0u8; n];
        let mut rest = code;
        for s in state.iter_mut() {
            *s = (rest % 3) as u8;
            rest /= 3;
        }
        let mut alpha: Vec<f64> = state.iter().map(|&s| if s == 1 { c } else { 0.0 }).collect();
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        if !free.is_empty() {
            // [Q_FF y_F; y_F' 0] [a_F; b] = [1 - Q_FU a_U; -y_U' a_U]
            let m = free.len() + 1;
            let mut a = vec![vec![0.0; m + 1]; m];
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[r][s] = q[i][j];
                }
                a[r][m - 1] = y[i];
                a[r][m] = 1.0 - (0..n).filter(|&j| state[j] == 1).map(|j| q[i][j] * c).sum::<f64>();
            }
            for (s, &j) in free.iter().enumerate() {
                a[m - 1][s] = y[j];
            }
            a[m - 1][m] = -(0..n).filter(|&j| state[j] == 1).map(|j| y[j] * c).sum::<f64>();
            let Some(sol) = gauss(a) else { continue };
            let mut inside = true;
            for (r, &i) in free.iter().enumerate() {
                inside &= sol[r] > 0.0 && sol[r] < c;
                alpha[i] = sol[r];
            }
            if !inside {
                continue;
            }
        }
        let eq: f64 = alpha.iter().zip(y).map(|(a, y)| a * y).sum();
        if eq.abs() > 1e-9 {
            continue;
        }
        best = best.max(dual_objective(points, y, kernel, &alpha));
    }
    best
}

fn gauss(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot_row[col];
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    Some((0..m).map(|r| a[r][m] / a[r][r]).collect())
}

/// Largest dual value over multipliers on a grid of step `c / steps`.
fn grid_optimum(points: &[Vec<f64>], y: &[f64], kernel: Kernel, c: f64, steps: usize) -> f64 {
    let n = points.len();
    let mut best = f64::NEG_INFINITY;
    let mut idx = vec![0usize; n];
    loop {
        let eq: i64 = idx.iter().zip(y).map(|(&k, &y)| k as i64 * y as i64).sum();
        if eq == 0 {
            let alpha: Vec<f64> = idx.iter().map(|&k| c * k as f64 / steps as f64).collect();
            best = best.max(dual_objective(points, y, kernel, &alpha));
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            idx[i] += 1;
            if idx[i] <= steps {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// KKT conditions of the solution, with a common bias inside the interval
/// every multiplier allows.
fn kkt_holds(points: &[Vec<f64>], y: &[f64], sol: &smo::SmoSolution, p: &SmoParams) -> Result<(), String> {
    let tol = p.tolerance;
    let eq: f64 = sol.alphas.iter().zip(y).map(|(a, y)| a * y).sum();
    if eq.abs() > 1e-9 {
        return Err(format!("sum a_i y_i = {eq}"));
    }
    if sol.alphas.iter().any(|&a| !(0.0..=p.c).contains(&a)) {
        return Err("multiplier outside [0, C]".into());
    }
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..points.len() {
        let g = sol.decision(points, y, p.kernel, &points[i]) - sol.bias;
        let a = sol.alphas[i];
        // y (g + b) >= 1 - tol, <= 1 + tol, or both
        let (need_ge, need_le) = if a <= 0.0 {
            (true, false)
        } else if a >= p.c {
            (false, true)
        } else {
            (true, true)
        };
        let (ge, le) = ((1.0 - tol) * y[i] - g, (1.0 + tol) * y[i] - g);
        let (ge, le) = (ge - 1e-9, le + 1e-9);
        if y[i] > 0.0 {
            if need_ge {
                lo = lo.max(ge);
            }
            if need_le {
                hi = hi.min(le);
            }
        } else {
            // y = -1 flips the inequalities
            if need_ge {
                hi = hi.min(ge + 2e-9);
            }
            if need_le {
                lo = lo.max(le - 2e-9);
            }
        }
    }
    if lo > hi {
        return Err(format!("no bias satisfies all conditions [{lo}, {hi}]"));
    }
    let has_support = sol.alphas.iter().any(|&a| a > 0.0);
    if has_support && !(lo..=hi).contains(&sol.bias) {
        return Err(format!("bias {} outside [{lo}, {hi}]", sol.bias));
    }
    Ok(())
}

/// Stopping tolerance for the battery. At the default 1e-3 the objective
/// stops about 2e-6 short of the optimum.
const BATTERY_TOLERANCE: f64 = 1e-6;

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let fixed: Vec<Vec<f64>> = vec![
        vec![1.0, 0.0, 0.0, 0.5],
        vec![0.0, 1.0, 0.5, 0.0],
        vec![0.5, 0.0, 1.0, 0.0],
        vec![0.0, 0.5, 0.0, 1.0],
    ];
    let kernels = [Kernel::Linear, Kernel::Polynomial { degree: 2 }];
    let mut problems: Vec<(Vec<Vec<f64>>, Vec<f64>, SmoParams)> = Vec::new();
    for kernel in kernels {
        for c in [1.0, 10.0] {
            for labels in 0..16u32 {
                let y: Vec<f64> = (0..4).map(|i| if labels >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
                let params = SmoParams {
                    c,
                    kernel,
                    tolerance: BATTERY_TOLERANCE,
                    ..SmoParams::default()
                };
                problems.push((fixed.clone(), y, params));
            }
        }
    }
    let grid_cases = problems.len();
    for s in 0..20u64 {
        let mut rng = seed::rng(seed::derive(4, s));
        let points: Vec<Vec<f64>> = (0..8)
            .map(|_| (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = (0..8)
            .map(|i| if i % 2 == 0 || rng.gen_bool(0.3) { 1.0 } else { -1.0 })
            .collect();
        for kernel in kernels {
            problems.push((
                points.clone(),
                y.clone(),
                SmoParams {
                    kernel,
                    seed: s,
                    tolerance: BATTERY_TOLERANCE,
                    ..SmoParams::default()
                },
            ));
        }
    }

    let mut worst_gap: f64 = 0.0;
    let mut failures = Vec::new();
    for (i, (points, y, params)) in problems.iter().enumerate() {
        let sol = smo::solve(points, y, params).unwrap();
        let got = dual_objective(points, y, params.kernel, &sol.alphas);
        let want = active_set_optimum(points, y, params.kernel, params.c);
        let gap = (got - want).abs();
        worst_gap = worst_gap.max(gap);
        if gap > 1e-6 {
            failures.push(format!("case {i}: smo {got} oracle {want}"));
        }
        if let Err(e) = kkt_holds(points, y, &sol, params) {
            failures.push(format!("case {i}: kkt {e}"));
        }
        if i < grid_cases && grid_optimum(points, y, params.kernel, params.c, 20) > want + 1e-9 {
            failures.push(format!("case {i}: grid beats the enumerated optimum"));
        }
    }
    all(vec![
        check(
            failures.is_empty(),
            format!(
                "{} problems, worst objective gap {worst_gap:.2e} {}",
                problems.len(),
                failures.join(", ")
            ),
        ),
        within_time(start, Duration::from_secs(60)),
    ])
}

fn three_class(n: usize, seed: u64) -> Dataset {
    let attrs = vec![
        Attribute::nominal("x", ["a", "b"]).unwrap(),
        Attribute::nominal("y", ["p", "q", "r"]).unwrap(),
    ];
    let mut d = Dataset::new("three", attrs, 1).unwrap();
    let mut rng = seed::rng(seed);
    for _ in 0..n {
        // skewed labels so the majority is unambiguous
        let c = [0, 0, 1, 2, 2, 2][rng.gen_range(0..6)];
        d.push(vec![Value::Nominal(rng.gen_range(0..2)), Value::Nominal(c)])
            .unwrap();
    }
    d
}

fn criterion_5() -> Outcome {
    let n = 30000;
    let d = three_class(n, 5);
    let m = fit(&d, &ClassifierSpec::UniformRandom { seed: 55 }).unwrap();
    let hits = m
        .predict_batch(d.instances())
        .unwrap()
        .iter()
        .zip(d.classes())
        .filter(|(p, c)| **p == *c)
        .count();
    let acc = hits as f64 / n as f64;
    let bound = three_sigma(1.0 / 3.0, n);

    let z = fit(&d, &ClassifierSpec::ZeroR).unwrap();
    let z_hits = z
        .predict_batch(d.instances())
        .unwrap()
        .iter()
        .zip(d.classes())
        .filter(|(p, c)| **p == *c)
        .count();
    let majority = *d.class_counts().iter().max().unwrap();
    all(vec![
        check(
            (acc - 1.0 / 3.0).abs() <= bound,
            format!("uniform {acc:.4} within 1/3 ± {bound:.4}"),
        ),
        check(z_hits == majority, format!("zero_r {z_hits}/{n}, majority {majority}")),
    ])
}

fn ranking_check(label: &str, d: &Dataset, bayes: f64) -> Vec<Outcome> {
    let specs: Vec<ClassifierSpec> = ClassifierSpec::IDS
        .iter()
        .map(|id| ClassifierSpec::from_id(id, 6).unwrap())
        .collect();
    let report = select_hypothesis_space(d, &specs, 10).unwrap();
    let acc = |id: &str| {
        report
            .ranking
            .iter()
            .find(|r| r.classifier.id() == id)
            .and_then(|r| r.mean_accuracy)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let pos = |id: &str| report.ranking.iter().position(|r| r.classifier.id() == id).unwrap();
    let baselines_below = ["uniform_random", "zero_r"]
        .iter()
        .all(|b| ["one_r", "decision_table"].iter().all(|l| pos(b) > pos(l)));
    let winner = report.winner.clone().unwrap_or_default();
    let top = acc(&winner);
    vec![
        check(
            baselines_below,
            format!("{label}: baselines ranked below rule learners"),
        ),
        check(
            top >= bayes - 0.03,
            format!("{label}: winner {winner} {top:.4} vs Bayes rate {bayes}"),
        ),
    ]
}

fn criterion_6() -> Outcome {
    let rps_rule = RpsSubjectRule::shift(Source::Opp, 1, 1.0, 6);
    let rps = featurize_rps(&synth_rps(10, 2, 30, &rps_rule, None).unwrap(), WindowConfig::default()).unwrap();
    let noisy_rule = RpsSubjectRule::shift(Source::Own, 2, 0.9, 16);
    let noisy = featurize_rps(
        &synth_rps(20, 2, 30, &noisy_rule, None).unwrap(),
        WindowConfig::default(),
    )
    .unwrap();
    let ct_rule = CtResponderRule::new(1.0, 6);
    let ct = featurize_ct(&synth_ct(371, &ct_rule).unwrap()).unwrap();
    let mut parts = ranking_check("rps", &rps, 1.0);
    parts.extend(ranking_check("rps noisy", &noisy, 0.9));
    parts.extend(ranking_check("ct", &ct, 1.0));
    all(parts)
}

fn report_json(seed: u64) -> String {
    let rule = RpsSubjectRule::shift(Source::Own, 1, 0.8, seed);
    let d = featurize_rps(&synth_rps(10, 2, 30, &rule, None).unwrap(), WindowConfig::default()).unwrap();
    let specs: Vec<ClassifierSpec> = ClassifierSpec::IDS
        .iter()
        .map(|id| ClassifierSpec::from_id(id, seed).unwrap())
        .collect();
    let ranking = select_hypothesis_space(&d, &specs, 10).unwrap();
    let run = Run {
        label: "w3".into(),
        data: DataSummary::of(&d),
        ranking,
    };
    EvaluationReport::new(serde_json::json!({ "seed": seed, "folds": 10 }), vec![run]).to_json()
}

fn criterion_7() -> Outcome {
    let json_same = report_json(7) == report_json(7);

    let rule = RpsSubjectRule::shift(Source::Own, 1, 0.8, 7);
    let episodes = synth_rps(10, 2, 30, &rule, None).unwrap();
    let rps_csv = write_rps_log(&episodes);
    let rps_back = parse_rps_log(&rps_csv).map(|e| e == episodes).unwrap_or(false);
    let records = synth_ct(371, &CtResponderRule::new(0.9515, 7)).unwrap();
    let ct_csv = write_ct_log(&records);
    let ct_back = parse_ct_log(&ct_csv).map(|r| r == records).unwrap_or(false);
    let synth_again = write_rps_log(&synth_rps(10, 2, 30, &rule, None).unwrap()) == rps_csv;

    let rps = featurize_rps(&episodes, WindowConfig::default()).unwrap();
    let ct = featurize_ct(&records).unwrap();
    let mut arff_ok = true;
    let mut model_ok = true;
    for d in [&rps, &ct] {
        let text = write_arff(d);
        arff_ok &= read_arff(&text)
            .map(|b| &b == d && write_arff(&b) == text)
            .unwrap_or(false);
        let mut specs: Vec<ClassifierSpec> = ClassifierSpec::IDS
            .iter()
            .map(|id| ClassifierSpec::from_id(id, 7).unwrap())
            .collect();
        specs.push(ClassifierSpec::FixedRule(classifiers::FixedRule::Refusal));
        for spec in &specs {
            let Ok(m) = fit(d, spec) else { continue };
            let text = write_model(&m);
            model_ok &= read_model(&text)
                .map(|b| b == m && write_model(&b) == text)
                .unwrap_or(false);
        }
    }
    all(vec![
        check(json_same, "identical JSON reports"),
        check(synth_again, "identical synthetic logs"),
        check(rps_back && ct_back, "synth -> CSV -> parse"),
        check(arff_ok, "ARFF round-trip"),
        check(model_ok, "model round-trip"),
    ])
}

fn criterion_8() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 2000,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (2usize..=200).prop_flat_map(|n| (Just(n), 2usize..=n));
    let result = runner.run(&strategy, |(n, k)| {
        let plan = make_ordered_folds(n, k).unwrap();
        prop_assert_eq!(plan.boundaries.len(), k);
        let mut next = 0;
        for r in &plan.boundaries {
            prop_assert_eq!(r.start, next);
            prop_assert!(!r.is_empty());
            next = r.end;
        }
        prop_assert_eq!(next, n);
        let sizes: Vec<usize> = plan.boundaries.iter().map(|r| r.len()).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        Ok(())
    });
    // the exhaustive sweep is cheap enough to run as well
    let mut exhaustive = true;
    for n in 2..=200 {
        for k in 2..=n {
            let plan = make_ordered_folds(n, k).unwrap();
            let mut covered = vec![0u8; n];
            for r in &plan.boundaries {
                for i in r.clone() {
                    covered[i] += 1;
                }
            }
            let sizes: Vec<usize> = plan.boundaries.iter().map(|r| r.len()).collect();
            exhaustive &= covered.iter().all(|&c| c == 1)
                && sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1
                && plan.boundaries.windows(2).all(|w| w[0].end == w[1].start);
        }
    }
    all(vec![
        check(
            result.is_ok(),
            match result {
                Ok(()) => "property test passed".to_string(),
                Err(e) => format!("property test failed: {e}"),
            },
        ),
        check(exhaustive, "all 19701 (n, k) pairs"),
    ])
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("structural reproduction", criterion_1),
        ("miner recovers generator", criterion_2),
        ("responder rule reproduction", criterion_3),
        ("SMO correctness", criterion_4),
        ("baseline exactness", criterion_5),
        ("ranking sanity", criterion_6),
        ("determinism and round-trips", criterion_7),
        ("fold-plan properties", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        failed += usize::from(!outcome.ok);
        println!(
            "{} criterion {} ({name}): {}",
            if outcome.ok { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
