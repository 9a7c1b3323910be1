//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use forge::{
    boxed, evaluate_placement, full_visibility_cloud, generate_scene, label_primitives, render_cloud, settle, CameraSpec, ForgeConfig,
    GroundTruthScene, BACKGROUND,
};
use harness::{
    choose_task, generate_corpus, run_ablation, run_correlation, run_separability, write_ablation_csv, Corpus, HarnessConfig, Variant,
};
use placer::geometry::{in_view, PointCloud, PoseOffset, SegmentId};
use placer::planner::{find_placement, find_placement_with_context, GridRestriction, PlannerConfig, PlanningContext};
use placer::predicates::directional::{all_slacks, rule_margin};
use placer::predicates::{classify, eval_directional, DirectionalConfig, Predicate, PredicateConfig};
use placer::prior::{build_heuristic_prior, GmmComponent, GmmPrior};
use placer::realism::PreparedRealism;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn corpus(n: usize, seed: u64) -> Corpus {
    generate_corpus(n, seed, &ForgeConfig::default()).expect("corpus generation")
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn constraint_soundness() -> Outcome {
    let start = Instant::now();
    let scenes = corpus(100, 101);
    let cfg = HarnessConfig::default();
    let (mut problems, mut planned, mut violations) = (0, 0, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for (i, entry) in scenes.iter().enumerate() {
        let cloud = render_cloud(&entry.scene).unwrap();
        let Some(task) = choose_task(&entry.scene, &cloud, cfg.min_visible_points, &mut rng) else {
            continue;
        };
        problems += 1;
        let pc = PlannerConfig { seed: i as u64, ..cfg.planner.clone() };
        let result = find_placement(task.query, task.anchor, &cloud, &task.goal, &pc).unwrap();
        let Some(delta) = result.best_delta else {
            continue;
        };
        planned += 1;
        let moved = cloud.cloud(task.query).unwrap().apply_offset(&delta).unwrap();
        let realism = PreparedRealism::new(&cloud.without(task.query).unwrap(), pc.realism).unwrap();
        let f = realism.score(&moved).unwrap().score;
        let p = classify(&moved, cloud.cloud(task.anchor).unwrap(), &pc.predicates).unwrap();
        let goal_ok = task.goal.required().iter().all(|g| p.get(*g) > pc.eps_rho);
        if !(f > pc.eps_f && goal_ok && in_view(&moved, cloud.camera(), pc.in_view_fraction)) {
            violations += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        problems >= 100 && violations == 0 && t < Duration::from_secs(120),
        format!("{problems} problems, {planned} placements, {violations} violations, {:.1} s", secs(t)),
    )
}

fn ablation_ordering() -> Outcome {
    let scenes = corpus(100, 202);
    let rows = run_ablation(&scenes, &[Variant::Full100, Variant::NoDisc], &HarnessConfig { seed: 2, ..HarnessConfig::default() }).unwrap();
    let (full, nodisc) = (&rows[0], &rows[1]);
    let ratio = full.stable_pose as f64 / nodisc.stable_pose.max(1) as f64;
    outcome(
        full.trials >= 100 && ratio >= 2.0 && nodisc.found_predicates >= full.found_predicates,
        format!(
            "stable {}/{} vs {}/{} (ratio {ratio:.2}, need >= 2), found predicates nodisc {} vs full {}",
            full.stable_pose, full.trials, nodisc.stable_pose, nodisc.trials, nodisc.found_predicates, full.found_predicates
        ),
    )
}

fn correlation_sign() -> Outcome {
    let scenes = corpus(130, 303);
    let (summary, _, _) = run_correlation(&scenes, &HarnessConfig { seed: 3, ..HarnessConfig::default() }, 2).unwrap();
    let p = summary.planned;
    outcome(
        p.n >= 200 && p.r < 0.0 && p.p < 0.05,
        format!(
            "planned r = {:.3}, p = {:.2e}, n = {} ({} dropped); prior samples r = {:.3}, p = {:.2e}, n = {}",
            p.r, p.p, p.n, p.dropped, summary.random.r, summary.random.p, summary.random.n
        ),
    )
}

fn separability() -> Outcome {
    let scenes = corpus(200, 404);
    let r = run_separability(&scenes, &HarnessConfig::default()).unwrap();
    outcome(
        r.gap >= 0.4,
        format!("true poses {:.3}, perturbed {:.3}, gap {:.3} over {} objects in 200 scenes", r.mean_positive, r.mean_negative, r.gap, r.positives),
    )
}

fn predicate_agreement() -> Outcome {
    const SPACING: f64 = 0.001;
    const OFFSET: f64 = 0.001;
    let scenes = corpus(100, 505);
    let cfg = PredicateConfig::ground_truth();
    let (mut dir_total, mut dir_agree) = (0usize, 0usize);
    let (mut dist_total, mut dist_agree) = (0usize, 0usize);
    let mut mismatches = Vec::new();
    for entry in &scenes {
        let cloud = full_visibility_cloud(&entry.scene, SPACING).unwrap();
        for q in &entry.scene.objects {
            for a in entry.scene.objects.iter().filter(|a| a.id != q.id) {
                let truth = label_primitives(q, a, &cfg);
                let engine = classify(cloud.cloud(q.id).unwrap(), cloud.cloud(a.id).unwrap(), &cfg).unwrap();
                let slacks = all_slacks(&boxed(q), &boxed(a), &cfg.directional);
                for (k, s) in slacks.iter().enumerate() {
                    if rule_margin(s).abs() > 2.0 * SPACING {
                        let p = Predicate::ALL[k];
                        dir_total += 1;
                        dir_agree += usize::from(engine.get(p) == truth.predicates.get(p));
                    }
                }
                let centered = q.center.distance_xy(&a.center);
                for (p, value, threshold) in
                    [(Predicate::Touching, truth.distance, cfg.touching), (Predicate::Near, truth.distance, cfg.near), (Predicate::Centered, centered, cfg.centered)]
                {
                    if (value - threshold).abs() > OFFSET {
                        dist_total += 1;
                        if engine.get(p) == truth.predicates.get(p) {
                            dist_agree += 1;
                        } else if mismatches.len() < 3 {
                            mismatches.push(format!("{} {}->{} at {value:.4}", p.name(), q.id, a.id));
                        }
                    }
                }
            }
        }
    }
    let dir_rate = dir_agree as f64 / dir_total.max(1) as f64;
    outcome(
        dir_total > 0 && dir_rate >= 0.95 && dist_agree == dist_total,
        format!("directional {dir_agree}/{dir_total} ({:.2}%), distance-based {dist_agree}/{dist_total} {mismatches:?}", 100.0 * dir_rate),
    )
}

fn cem_optimality() -> Outcome {
    let start = Instant::now();
    let forge_cfg = ForgeConfig { count: (3, 3), ..ForgeConfig::default() };
    let grid = GridRestriction { step: 0.01, dz: 0.0, yaw: 0.0 };
    let cfg = PlannerConfig { grid: Some(grid), time_budget_secs: 60.0, ..PlannerConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut scenes, mut within, mut worst) = (0, 0, 0.0f64);
    let mut plan_time = Duration::ZERO;
    while scenes < 10 {
        let gt = generate_scene(&mut rng, &forge_cfg).unwrap();
        let cloud = render_cloud(&gt).unwrap();
        // Fixed dz = 0 keeps the query on the table only if it starts there.
        let Some(task) = (0..10).filter_map(|_| choose_task(&gt, &cloud, 50, &mut rng)).find(|t| gt.object(t.query).unwrap().bottom().abs() < 1e-9)
        else {
            continue;
        };
        let ctx = PlanningContext::new(&cloud, task.query, task.anchor, &task.goal, &PlannerConfig { seed: scenes, ..cfg.clone() }).unwrap();
        let mut best = f64::INFINITY;
        for i in -50..=50 {
            for j in -50..=50 {
                let d = PoseOffset::from_array(grid.snap(i as f64 * 0.01, j as f64 * 0.01));
                let e = ctx.evaluate(&d, None).unwrap();
                if e.checks.all() {
                    best = best.min(e.cost);
                }
            }
        }
        if !best.is_finite() {
            continue;
        }
        scenes += 1;
        let query = cloud.cloud(task.query).unwrap();
        let prior = build_heuristic_prior(query, cloud.cloud(task.anchor).unwrap(), &cloud.without(task.query).unwrap(), &task.goal, &cfg.prior).unwrap();
        let t = Instant::now();
        let found = find_placement_with_context(&ctx, &prior).unwrap().best_cost.unwrap_or(f64::INFINITY);
        plan_time += t.elapsed();
        let slack = if best == 0.0 { 0.01 } else { 0.05 * best };
        within += usize::from(found <= best + slack);
        worst = worst.max(found - best);
    }
    let t = start.elapsed();
    outcome(
        within == 10 && plan_time < Duration::from_secs(30),
        format!(
            "{within}/10 within tolerance of grid optimum, worst excess {worst:.4}, planning {:.1} s, total with grid search {:.1} s",
            secs(plan_time),
            secs(t)
        ),
    )
}

/// Asymptotic Kolmogorov distribution tail with the Stephens correction.
fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-1.0f64).powi(k - 1) * (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// Marginal CDF obtained by integrating exp(marginal_log_density) on a fine grid.
fn numeric_cdf(prior: &GmmPrior<f64>, dim: usize, lo: f64, hi: f64, steps: usize) -> impl Fn(f64) -> f64 {
    let h = (hi - lo) / steps as f64;
    let pdf: Vec<f64> = (0..=steps).map(|i| prior.marginal_log_density(dim, lo + i as f64 * h).exp()).collect();
    let mut cdf = vec![0.0; steps + 1];
    for i in 1..=steps {
        cdf[i] = cdf[i - 1] + 0.5 * h * (pdf[i - 1] + pdf[i]);
    }
    move |x: f64| {
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return cdf[steps];
        }
        let t = (x - lo) / h;
        let i = (t.floor() as usize).min(steps - 1);
        cdf[i] + (t - i as f64) * (cdf[i + 1] - cdf[i])
    }
}

fn gmm_statistics() -> Outcome {
    let prior = GmmPrior::new(vec![
        GmmComponent { weight: 0.5, mean: [0.2, 0.0, 0.01, 0.0], sigma: [0.05, 0.03, 0.02, 0.3] },
        GmmComponent { weight: 0.3, mean: [-0.15, 0.1, 0.05, 1.0], sigma: [0.03, 0.06, 0.01, 0.4] },
        GmmComponent { weight: 0.2, mean: [0.0, -0.2, 0.0, -1.0], sigma: [0.08, 0.02, 0.03, 0.2] },
    ])
    .unwrap();
    const N: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let samples: Vec<[f64; 4]> = (0..N).map(|_| prior.sample(&mut rng).to_array()).collect();
    let mut worst_p: f64 = 1.0;
    let mut ps = Vec::new();
    for dim in 0..4 {
        let (lo, hi) = (-3.0, 3.0);
        let cdf = numeric_cdf(&prior, dim, lo, hi, 400_000);
        let mut xs: Vec<f64> = samples.iter().map(|s| s[dim]).collect();
        xs.sort_by(f64::total_cmp);
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let f = cdf(*x);
                (f - i as f64 / N as f64).abs().max(((i + 1) as f64 / N as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        let p = ks_p_value(d, N);
        ps.push(format!("{p:.3}"));
        worst_p = worst_p.min(p);
    }
    let mut counts = [0usize; 3];
    for _ in 0..N {
        counts[prior.sample_component(&mut rng)] += 1;
    }
    let freq_ok = prior.components().iter().zip(counts).all(|(c, k)| {
        let mean = N as f64 * c.weight;
        (k as f64 - mean).abs() <= 3.0 * (mean * (1.0 - c.weight)).sqrt()
    });
    outcome(worst_p > 0.01 && freq_ok, format!("KS p-values per marginal {ps:?}, component counts {counts:?} for weights (0.5, 0.3, 0.2)"))
}

fn determinism_and_performance() -> Outcome {
    let scenes = corpus(4, 808);
    let cfg = HarnessConfig { seed: 8, ..HarnessConfig::default() };
    let csv = || {
        let mut buf = Vec::new();
        write_ablation_csv(&run_ablation(&scenes, &[Variant::Full100, Variant::NoDisc, Variant::Mean], &cfg).unwrap(), &mut buf).unwrap();
        buf
    };
    let csv_same = csv() == csv();

    let forge_cfg = ForgeConfig { count: (5, 5), ..ForgeConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let (gt, cloud, task) = loop {
        let gt = generate_scene(&mut rng, &forge_cfg).unwrap();
        let cloud = render_cloud(&gt).unwrap();
        if let Some(task) = choose_task(&gt, &cloud, 50, &mut rng) {
            break (gt, cloud, task);
        }
    };
    let pc = PlannerConfig { seed: 8, ..PlannerConfig::default() };
    let t = Instant::now();
    let first = find_placement(task.query, task.anchor, &cloud, &task.goal, &pc).unwrap();
    let elapsed = t.elapsed();
    let second = find_placement(task.query, task.anchor, &cloud, &task.goal, &pc).unwrap();
    let plan_same = serde_json::to_string(&first).unwrap() == serde_json::to_string(&second).unwrap();
    outcome(
        csv_same && plan_same && elapsed < Duration::from_secs(5),
        format!(
            "plan bytes identical: {plan_same}, csv bytes identical: {csv_same}, plan on {} objects / {} points: {:.2} s",
            gt.objects.len(),
            cloud.total_points(),
            secs(elapsed)
        ),
    )
}

fn property_suites() -> Outcome {
    let config = Config { cases: 1000, failure_persistence: None, ..Config::default() };
    let mut failures = Vec::new();
    let mut run = |name: &str, result: Result<(), String>| {
        if let Err(e) = result {
            failures.push(format!("{name}: {e}"));
        }
    };

    let point = || (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| placer::geometry::Point3::new(x, y, z));
    let cloud = move || prop::collection::vec(point(), 1..24).prop_map(|p| PointCloud::new(p).unwrap());
    let delta = || (-2.0..2.0, -2.0..2.0, -2.0..2.0, -10.0..10.0).prop_map(|(x, y, z, w)| PoseOffset::new(x, y, z, w));
    let blob = move || {
        (point(), prop::collection::vec((-0.1..0.1f64, -0.1..0.1f64, -0.1..0.1f64), 1..16)).prop_map(|(c, d)| {
            PointCloud::new(d.into_iter().map(|(x, y, z)| placer::geometry::Point3::new(c.x + x, c.y + y, c.z + z)).collect()).unwrap()
        })
    };

    run(
        "rigidity and inverse round trip",
        TestRunner::new(config.clone())
            .run(&(cloud(), delta()), |(c, d): (PointCloud<f64>, PoseOffset<f64>)| {
                let moved = c.apply_offset(&d).unwrap();
                let back = moved.apply_offset(&d.inverse()).unwrap();
                let (p, q) = (c.points(), moved.points());
                for i in 0..p.len() {
                    for j in i + 1..p.len() {
                        prop_assert!((p[i].distance(&p[j]) - q[i].distance(&q[j])).abs() < 1e-9);
                    }
                    prop_assert!(p[i].distance(&back.points()[i]) < 1e-9);
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    run(
        "antisymmetry, mutual exclusion, translation invariance",
        TestRunner::new(config.clone())
            .run(&(blob(), blob(), point()), |(a, b, t)| {
                let dc = DirectionalConfig::default();
                let (ab, ba) = (eval_directional(&a, &b, &dc).unwrap(), eval_directional(&b, &a, &dc).unwrap());
                prop_assert_eq!((ab.left_of, ab.in_front_of, ab.above), (ba.right_of, ba.behind, ba.below));
                prop_assert!(!(ab.left_of && ab.right_of) && !(ab.in_front_of && ab.behind) && !(ab.above && ab.below));
                let cfg = PredicateConfig::for_clouds();
                let slack = all_slacks(
                    &placer::predicates::BoxedObject::from_cloud(&a).unwrap(),
                    &placer::predicates::BoxedObject::from_cloud(&b).unwrap(),
                    &cfg.directional,
                )
                .iter()
                .flatten()
                .fold(f64::INFINITY, |m, s| m.min(s.abs()));
                let dist = placer::geometry::min_distance(&a, &b).unwrap();
                let cdist = a.centroid().unwrap().distance_xy(&b.centroid().unwrap());
                let margin = [slack, (dist - cfg.touching).abs(), (dist - cfg.near).abs(), (cdist - cfg.centered).abs()].into_iter().fold(f64::INFINITY, f64::min);
                if margin > 1e-9 {
                    let shift = t * 3.0;
                    prop_assert_eq!(classify(&a, &b, &cfg).unwrap(), classify(&a.translated(shift), &b.translated(shift), &cfg).unwrap());
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    let scene = |seed: u64, bins: usize, camera: CameraSpec| -> GroundTruthScene {
        generate_scene(&mut ChaCha8Rng::seed_from_u64(seed), &ForgeConfig { bins, camera, ..ForgeConfig::default() }).unwrap()
    };
    run(
        "settle idempotence",
        TestRunner::new(config.clone())
            .run(&(any::<u64>(), 0usize..2, any::<prop::sample::Index>(), (-0.3..0.3, -0.3..0.3, -0.05..0.3, -3.2..3.2)), |(seed, bins, pick, d)| {
                let gt = scene(seed, bins, CameraSpec::default());
                let id: SegmentId = gt.objects[pick.index(gt.objects.len())].id;
                let first = evaluate_placement(&gt, id, &PoseOffset::new(d.0, d.1, d.2, d.3), None).unwrap();
                let again = settle(&gt.with_object(first.settled).unwrap(), id).unwrap();
                prop_assert!(again.displacement < 1e-9 && again.supported);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    run(
        "back-projection exactness",
        TestRunner::new(config)
            .run(&(any::<u64>(), 0usize..2), |(seed, bins)| {
                let gt = scene(seed, bins, CameraSpec { width: 64, height: 48, focal: 56.0, ..CameraSpec::default() });
                let cloud = render_cloud(&gt).unwrap();
                for (id, p) in cloud.points() {
                    let (u, v) = gt.camera.project(p).unwrap();
                    prop_assert!((u - u.floor() - 0.5).abs() < 1e-6 && (v - v.floor() - 0.5).abs() < 1e-6);
                    if id != BACKGROUND {
                        prop_assert!(gt.object(id).unwrap().signed_distance(p).abs() < 1e-6);
                    }
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    outcome(failures.is_empty(), if failures.is_empty() { "4 suites x 1000 cases".to_string() } else { failures.join("; ") })
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("constraint soundness", constraint_soundness),
        ("ablation ordering", ablation_ordering),
        ("correlation sign", correlation_sign),
        ("separability", separability),
        ("predicate engine vs oracle", predicate_agreement),
        ("CEM optimality on a grid", cem_optimality),
        ("GMM prior statistics", gmm_statistics),
        ("determinism and performance", determinism_and_performance),
        ("property suites", property_suites),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let t = Instant::now();
        let o = check();
        println!("criterion {} {name}: {} ({}) [{:.1} s]", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail, secs(t.elapsed()));
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
