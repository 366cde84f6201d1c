//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use tspbound::bounds::{build_report, harmonic, harmonic_vs_log, BoundReport};
use tspbound::generate::{gen_random_euclidean, gen_random_metric, instance_seed, mix_seed};
use tspbound::heuristics::Heuristic;
use tspbound::instance::{Instance, Weight};
use tspbound::json::{trace_from_json, trace_to_json};
use tspbound::oracle::{brute_force_opt, held_karp_opt};
use tspbound::sweep::{run_sweep, InstanceKind, SweepConfig};
use tspbound::trace::{check_avarc, validate_trace, AvArcVerdict, ConstructionStep, Trace};
use tspbound::tsplib::{emit_tsplib, emit_tsplib_coords, parse_tsplib};
use tspbound::{nearest_neighbor, Execution};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

const REL_TOL: f64 = 1e-9;
const DIGITS_12: f64 = 1e-12;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn d4() -> Instance {
    Instance::from_matrix(
        "d4",
        &[
            vec![0, 1, 2, 10],
            vec![1, 0, 1, 2],
            vec![2, 1, 0, 1],
            vec![10, 2, 1, 0],
        ],
    )
    .unwrap()
}

/// Three tours exist on four vertices; enumerate them by hand.
fn d4_tours_by_hand(inst: &Instance) -> Weight {
    [[0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3]]
        .iter()
        .map(|t| inst.tour_weight(t))
        .min()
        .unwrap()
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let mut checked = 0;
    for k in 0..100u64 {
        let n = 5 + (k % 6) as usize;
        for inst in [gen_random_metric(n, 1000 + k).unwrap(), gen_random_euclidean(n, 2000 + k).unwrap()] {
            let brute = brute_force_opt(&inst).map_err(|e| e.to_string())?;
            let hk = held_karp_opt(&inst).map_err(|e| e.to_string())?;
            ensure(brute.value == hk.value, || {
                format!("{}: brute {} vs held-karp {}", inst.name(), brute.value, hk.value)
            })?;
            checked += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} instances agree in {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let inst = d4();
    let opt = brute_force_opt(&inst).map_err(|e| e.to_string())?;
    ensure(opt.value == 6 && d4_tours_by_hand(&inst) == 6, || format!("optimum {}", opt.value))?;

    let nn = Heuristic::NearestNeighbor.run(&inst, 0).unwrap();
    let ins = Heuristic::CheapestInsertion.run(&inst, 0).unwrap();
    let greedy = Heuristic::GreedyEdge.run(&inst, 0).unwrap();
    ensure(nn.final_weight == 13, || format!("nn weight {}", nn.final_weight))?;
    ensure(ins.final_weight == 6, || format!("insertion weight {}", ins.final_weight))?;
    ensure(greedy.final_weight == 13, || format!("greedy weight {}", greedy.final_weight))?;

    let nn_report = build_report(&nn, &opt).unwrap();
    ensure((nn_report.ratio - 13.0 / 6.0).abs() <= DIGITS_12, || format!("nn ratio {}", nn_report.ratio))?;
    // pr_sum from the step list: 1/1 + 1/2 + 10/3.
    ensure((nn_report.pr_sum - 29.0 / 6.0).abs() <= DIGITS_12, || format!("nn pr_sum {}", nn_report.pr_sum))?;
    let violated: Vec<usize> = nn
        .steps
        .iter()
        .filter(|s| check_avarc(s) == AvArcVerdict::Violated)
        .map(|s| s.i)
        .collect();
    ensure(violated == [3], || format!("nn violations at i = {violated:?}"))?;

    let ins_report = build_report(&ins, &opt).unwrap();
    ensure(ins_report.ratio == 1.0, || format!("insertion ratio {}", ins_report.ratio))?;
    Ok("NN 13, insertion 6, greedy 13, opt 6, ratio 13/6, pr_sum 29/6, violation at i=3".into())
}

fn criterion_3() -> Outcome {
    let mut state = 0x00AC_CE97_u64;
    let mut next = |bound: u64| {
        state = mix_seed(state);
        state % bound
    };
    let mut boundary = 0;
    for k in 0..10_000 {
        let i = 1 + next(2000) as usize;
        let m = 1 + next(5) as usize;
        let (w_before, delta_a) = if k % 3 == 0 {
            // Land exactly on delta_a / w_before = m / i.
            let t = 1 + next(5000) as Weight;
            boundary += 1;
            (i as Weight * t, m as Weight * t)
        } else {
            (1 + next(1_000_000) as Weight, next(1_000_000) as Weight)
        };
        let step = ConstructionStep::accounting(i, m, w_before, delta_a);
        let rho = step.rho.ok_or("rho undefined")?;
        let satisfied = check_avarc(&step) == AvArcVerdict::Satisfied;
        ensure(satisfied == (rho <= 1.0), || {
            format!("i={i} m={m} w={w_before} delta={delta_a}: verdict {satisfied} but rho {rho}")
        })?;
    }
    Ok(format!("10000 tuples agree ({boundary} on the rho = 1 boundary)"))
}

struct Corpus {
    instances: Vec<Instance>,
    traces: Vec<(usize, Trace)>,
    reports: Vec<BoundReport>,
}

fn corpus() -> Corpus {
    let instances: Vec<Instance> = (0..500usize)
        .map(|k| {
            let n = 5 + k % 8;
            let seed = instance_seed(2024, n, k);
            if (k / 8) % 2 == 0 {
                gen_random_euclidean(n, seed).unwrap()
            } else {
                gen_random_metric(n, seed).unwrap()
            }
        })
        .collect();
    let mut traces = Vec::new();
    let mut reports = Vec::new();
    for (idx, inst) in instances.iter().enumerate() {
        let opt = held_karp_opt(inst).unwrap();
        for h in Heuristic::ALL {
            let trace = h.run(inst, 0).unwrap();
            reports.push(build_report(&trace, &opt).unwrap());
            traces.push((idx, trace));
        }
    }
    Corpus {
        instances,
        traces,
        reports,
    }
}

fn criterion_4(c: &Corpus) -> Outcome {
    for (idx, trace) in &c.traces {
        let inst = &c.instances[*idx];
        let violations = validate_trace(trace, inst).map_err(|e| e.to_string())?;
        ensure(violations.is_empty(), || {
            format!("{} {}: {}", inst.name(), trace.heuristic, violations[0])
        })?;
        let telescoped: Weight = trace.steps.iter().map(|s| s.delta_a).sum();
        ensure(telescoped == trace.final_weight, || format!("{} telescoping", inst.name()))?;
    }
    for r in &c.reports {
        ensure(r.ratio >= 1.0, || format!("{} {} ratio {}", r.instance, r.heuristic, r.ratio))?;
    }
    Ok(format!("{} traces on {} instances valid, all ratios >= 1", c.traces.len(), c.instances.len()))
}

fn criterion_5() -> Outcome {
    let started = Instant::now();
    let rows = harmonic_vs_log(1_000_000);
    let elapsed = started.elapsed();
    let failing: Vec<usize> = rows.iter().filter(|r| !r.holds).map(|r| r.n).collect();
    ensure(failing == [1, 2, 3, 4], || format!("failures at {:?}", &failing[..failing.len().min(10)]))?;
    // Exact fractions by direct summation.
    let h4 = 1.0 + 1.0 / 2.0 + 1.0 / 3.0 + 1.0 / 4.0;
    let h5 = h4 + 1.0 / 5.0;
    for (n, exact, frac) in [(4, 25.0 / 12.0, h4), (5, 137.0 / 60.0, h5)] {
        let computed = harmonic(n).unwrap();
        ensure((computed - exact).abs() / exact <= DIGITS_12, || format!("H_{n} = {computed}"))?;
        ensure((rows[n - 1].harmonic - exact).abs() / exact <= DIGITS_12, || format!("table H_{n}"))?;
        ensure((frac - exact).abs() / exact <= DIGITS_12, || "fraction check".to_string())?;
    }
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("failures exactly at n = 1..4 up to 10^6, in {elapsed:.2?}"))
}

fn criterion_6(c: &Corpus) -> Outcome {
    let mut reports: Vec<BoundReport> = c.reports.clone();
    for heuristic in Heuristic::ALL {
        for kind in [InstanceKind::Euclidean, InstanceKind::Metric] {
            let config = SweepConfig {
                n_min: 5,
                n_max: 12,
                count: 10,
                seed: 6,
                heuristic,
                kind,
                start: 0,
                allow_small: false,
            };
            let result = run_sweep(&config, Execution::default()).map_err(|e| e.to_string())?;
            reports.extend(result.runs.into_iter().map(|r| r.report));
        }
    }
    // Uniform weights satisfy the average-arc condition at every step.
    for n in 5..=12 {
        let rows: Vec<Vec<Weight>> = (0..n).map(|i| (0..n).map(|j| 7 * Weight::from(i != j)).collect()).collect();
        let inst = Instance::from_matrix(format!("uniform{n}"), &rows).unwrap();
        let opt = held_karp_opt(&inst).unwrap();
        for h in Heuristic::ALL {
            reports.push(build_report(&h.run(&inst, 0).unwrap(), &opt).unwrap());
        }
    }

    let mut applicable = 0;
    for r in &reports {
        if r.avarc_all && r.n >= 5 {
            applicable += 1;
            ensure(r.pr_sum <= r.bound_harmonic * (1.0 + REL_TOL), || {
                format!("{} {}: pr_sum {} > m_max*H_n {}", r.instance, r.heuristic, r.pr_sum, r.bound_harmonic)
            })?;
            ensure(r.bound_harmonic <= r.bound_log, || {
                format!("{}: m_max*H_n {} > m_max*log2 n {}", r.instance, r.bound_harmonic, r.bound_log)
            })?;
        }
    }
    ensure(applicable > 0, || "no run satisfied the average-arc condition".to_string())?;
    let total = reports.len();
    let pr = reports.iter().filter(|r| r.pr_holds).count();
    let log = reports.iter().filter(|r| r.thelog_holds).count();
    Ok(format!(
        "{applicable}/{total} runs in the conditional domain, all bounded; observed pr_holds={pr}/{total} thelog_holds={log}/{total}"
    ))
}

fn criterion_7(c: &Corpus) -> Outcome {
    for inst in &c.instances {
        let back = parse_tsplib(&emit_tsplib(inst)).map_err(|e| e.to_string())?;
        ensure(&back == inst, || format!("{}: FULL_MATRIX round trip differs", inst.name()))?;
        if let Some(text) = emit_tsplib_coords(inst) {
            let back = parse_tsplib(&text).map_err(|e| e.to_string())?;
            ensure(&back == inst && back.points() == inst.points(), || {
                format!("{}: EUC_2D round trip differs", inst.name())
            })?;
        }
    }
    for (_, trace) in &c.traces {
        let back = trace_from_json(&trace_to_json(trace)).map_err(|e| e.to_string())?;
        ensure(&back == trace, || format!("{} {}: JSON round trip differs", trace.instance_name, trace.heuristic))?;
    }
    let fixture = "NAME: tri345\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\n\
                   NODE_COORD_SECTION\n1 0 0\n2 3 0\n3 0 4\nEOF\n";
    let tri = parse_tsplib(fixture).map_err(|e| e.to_string())?;
    let mut w = [tri.weight(0, 1), tri.weight(0, 2), tri.weight(1, 2)];
    w.sort();
    ensure(w == [3, 4, 5], || format!("triangle weights {w:?}"))?;
    Ok(format!("{} instances and {} traces round-trip; triangle is 3/4/5", c.instances.len(), c.traces.len()))
}

fn criterion_8() -> Outcome {
    let inst = gen_random_euclidean(18, 8).unwrap();
    let started = Instant::now();
    let opt = held_karp_opt(&inst).map_err(|e| e.to_string())?;
    let hk_time = started.elapsed();
    ensure(hk_time < Duration::from_secs(10), || format!("Held-Karp n=18 took {hk_time:?}"))?;
    ensure(inst.tour_weight(&opt.tour) == opt.value, || "Held-Karp tour weight".to_string())?;

    let started = Instant::now();
    let big = gen_random_euclidean(10_000, 8).unwrap();
    let trace = nearest_neighbor(&big, 0).map_err(|e| e.to_string())?;
    let nn_time = started.elapsed();
    ensure(nn_time < Duration::from_secs(5), || format!("NN n=10000 took {nn_time:?}"))?;
    ensure(trace.steps.len() == 10_000, || "NN step count".to_string())?;
    Ok(format!("Held-Karp n=18 in {hk_time:.2?}; generate + NN n=10000 in {nn_time:.2?}"))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_tspbound"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let read = |path: &str| std::fs::read(Path::new(path)).map_err(|e| e.to_string());

    let mut compared = 0;
    for kind in ["euclidean", "metric"] {
        let (a, b) = (p(&format!("{kind}_a.tsp")), p(&format!("{kind}_b.tsp")));
        let out_a = run_cli(&["gen", "--n", "9", "--seed", "5", "--kind", kind, "--out", &a])?;
        let out_b = run_cli(&["gen", "--n", "9", "--seed", "5", "--kind", kind, "--out", &b])?;
        ensure(read(&a)? == read(&b)? && out_a == out_b, || format!("gen {kind} differs"))?;
        compared += 1;

        for h in ["nn", "cheapest-insertion", "greedy"] {
            let (ta, tb) = (p(&format!("{kind}_{h}_a.json")), p(&format!("{kind}_{h}_b.json")));
            run_cli(&["solve", "--heuristic", h, "--instance", &a, "--trace-out", &ta])?;
            run_cli(&["solve", "--heuristic", h, "--instance", &a, "--trace-out", &tb])?;
            ensure(read(&ta)? == read(&tb)?, || format!("solve {h} differs"))?;
            for format in ["json", "csv"] {
                let ra = run_cli(&["report", "--trace", &ta, "--instance", &a, "--format", format])?;
                let rb = run_cli(&["report", "--trace", &tb, "--instance", &a, "--format", format])?;
                ensure(ra == rb, || format!("report {h} {format} differs"))?;
            }
            compared += 3;
        }
    }
    let (sa, sb) = (p("sweep_a.csv"), p("sweep_b.csv"));
    let args = |out: &str| -> Vec<String> {
        ["sweep", "--n-min", "5", "--n-max", "9", "--count", "6", "--seed", "3", "--heuristic", "nn", "--csv-out", out]
            .iter()
            .map(|s| s.to_string())
            .collect()
    };
    let ya = run_cli(&args(&sa).iter().map(String::as_str).collect::<Vec<_>>())?;
    let yb = run_cli(&args(&sb).iter().map(String::as_str).collect::<Vec<_>>())?;
    ensure(read(&sa)? == read(&sb)? && ya == yb, || "sweep differs".to_string())?;
    let ha = run_cli(&["check-harmonic", "--n-max", "1000"])?;
    let hb = run_cli(&["check-harmonic", "--n-max", "1000"])?;
    ensure(ha == hb, || "check-harmonic differs".to_string())?;
    compared += 2;
    Ok(format!("{compared} command pairs byte-identical"))
}

fn main() -> ExitCode {
    let corpus = corpus();
    let criteria: Vec<Criterion<'_>> = vec![
        ("oracle equivalence", Box::new(criterion_1)),
        ("golden D4 suite", Box::new(criterion_2)),
        ("average-arc algebraic equivalence", Box::new(criterion_3)),
        ("telescoping and validation", Box::new(|| criterion_4(&corpus))),
        ("harmonic/log boundary", Box::new(criterion_5)),
        ("conditional-bound accounting", Box::new(|| criterion_6(&corpus))),
        ("serialization", Box::new(|| criterion_7(&corpus))),
        ("performance", Box::new(criterion_8)),
        ("determinism", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({detail})", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
