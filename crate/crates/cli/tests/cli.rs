use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mcqf_cli::report::{aggregate, mean, median, read_summary};
use mcqf_core::net::{
    generate_topology, Network, NodeId, TopologyFile, TopologyKind, TopologySpec,
};
use mcqf_core::traffic::{FlowSet, FlowsFile, TTFlow};
use tempfile::TempDir;

fn mcqf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcqf"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn gen_is_reproducible_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let args = [
        "gen",
        "--topo",
        "ring",
        "--switches",
        "26",
        "--kind",
        "tsd",
        "--flows",
        "500",
        "--seed",
        "1",
    ];
    ok(&mcqf(dir.path(), &[&args[..], &["--out", "a"]].concat()));
    ok(&mcqf(dir.path(), &[&args[..], &["--out", "b"]].concat()));
    for f in ["topology.json", "flows.json"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(f)).unwrap(),
            fs::read(dir.path().join("b").join(f)).unwrap()
        );
    }
    let topo: TopologyFile =
        serde_json::from_slice(&fs::read(dir.path().join("a/topology.json")).unwrap()).unwrap();
    let net = Network::from_file(topo).unwrap();
    assert_eq!(
        net,
        generate_topology(
            &TopologySpec::new(TopologyKind::Ring { n: 26 }, 100_000_000),
            1
        )
        .unwrap()
    );
    let flows: FlowsFile =
        serde_json::from_slice(&fs::read(dir.path().join("a/flows.json")).unwrap()).unwrap();
    assert_eq!(FlowSet::from_file(flows).unwrap().len(), 500);
}

#[test]
fn erg_flags_build_ten_switches() {
    let dir = TempDir::new().unwrap();
    ok(&mcqf(
        dir.path(),
        &[
            "gen", "--topo", "erg", "--n", "10", "--p", "0.3", "--flows", "5",
        ],
    ));
    let topo: TopologyFile =
        serde_json::from_slice(&fs::read(dir.path().join("topology.json")).unwrap()).unwrap();
    assert_eq!(Network::from_file(topo).unwrap().switches().count(), 10);
}

#[test]
fn bad_flags_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    assert!(!mcqf(dir.path(), &["gen", "--topo", "mesh"])
        .status
        .success());
    assert!(!mcqf(dir.path(), &["schedule", "--ti", "maybe"])
        .status
        .success());
}

#[test]
fn cycles_lists_the_expected_triple_and_matches_greedy_score() {
    let dir = TempDir::new().unwrap();
    ok(&mcqf(
        dir.path(),
        &[
            "gen",
            "--kind",
            "tsd",
            "--flows",
            "60",
            "--bw-bps",
            "1000000000",
            "--seed",
            "4",
        ],
    ));
    let files = [
        "--topology-file",
        "topology.json",
        "--flows-file",
        "flows.json",
    ];
    let out: serde_json::Value = serde_json::from_str(&ok(&mcqf(
        dir.path(),
        &[&["cycles", "--list"][..], &files].concat(),
    )))
    .unwrap();
    let combos = out["combinations"].as_array().unwrap();
    assert_eq!(combos.len() as u64, out["evaluated"].as_u64().unwrap());
    assert!(combos
        .iter()
        .any(|c| c["cycles"] == serde_json::json!([25, 50, 100])));

    // re-run the greedy pass through the scheduler: route 0, zero offsets, no search
    let best: Vec<u64> = serde_json::from_value(out["best"].clone()).unwrap();
    let cycles = best
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let mut args = vec![
        "schedule",
        "--cycles",
        &cycles,
        "--algo",
        "ga",
        "--k",
        "1",
        "--generations",
        "0",
        "--population",
        "2",
        "--out",
        "g",
    ];
    args.extend(files);
    let sched = ok(&mcqf(dir.path(), &args));
    assert!(
        sched.contains(&format!("scheduled {}/60", out["scheduled"])),
        "{sched}"
    );
}

#[test]
fn cycles_infeasible_exits_2() {
    let dir = TempDir::new().unwrap();
    let net = generate_topology(
        &TopologySpec::new(TopologyKind::Ring { n: 4 }, 100_000_000),
        0,
    )
    .unwrap();
    let h: Vec<NodeId> = net.end_stations().collect();
    let flows = FlowSet::new(vec![
        TTFlow {
            id: 0,
            src: h[0],
            dst: h[1],
            period: 100,
            deadline: 100,
            size: 1500,
        },
        TTFlow {
            id: 1,
            src: h[2],
            dst: h[3],
            period: 150,
            deadline: 150,
            size: 64,
        },
    ])
    .unwrap();
    fs::write(
        dir.path().join("t.json"),
        serde_json::to_string(&net.to_file()).unwrap(),
    )
    .unwrap();
    fs::write(
        dir.path().join("f.json"),
        serde_json::to_string(&flows.to_file()).unwrap(),
    )
    .unwrap();
    let out = mcqf(
        dir.path(),
        &[
            "cycles",
            "--topology-file",
            "t.json",
            "--flows-file",
            "f.json",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no feasible cycle combination"));
}

#[test]
fn invalid_explicit_cycles_name_the_constraint() {
    let dir = TempDir::new().unwrap();
    for (cycles, label) in [("50,25,100", "C9"), ("25,60,100", "C10"), ("30", "C7")] {
        let out = mcqf(
            dir.path(),
            &[
                "schedule", "--kind", "tsd", "--flows", "10", "--cycles", cycles,
            ],
        );
        assert_eq!(out.status.code(), Some(2), "{cycles}");
        assert!(
            String::from_utf8_lossy(&out.stderr).contains(label),
            "{cycles}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = mcqf(
        dir.path(),
        &[
            "schedule",
            "--kind",
            "tsd",
            "--flows",
            "10",
            "--cycles",
            "25,50,100",
            "--splits",
            "0.5,0.5,0.5",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

/// Five light flows on a gigabit ring; every flow fits on its shortest route.
fn feasible_instance(dir: &Path) {
    let net = generate_topology(
        &TopologySpec::new(TopologyKind::Ring { n: 4 }, 1_000_000_000),
        0,
    )
    .unwrap();
    let h: Vec<NodeId> = net.end_stations().collect();
    let pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)];
    let flows = FlowSet::new(
        pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| TTFlow {
                id: i as u32,
                src: h[a],
                dst: h[b],
                period: 1000,
                deadline: 1000,
                size: 100,
            })
            .collect(),
    )
    .unwrap();
    fs::write(
        dir.join("t.json"),
        serde_json::to_string(&net.to_file()).unwrap(),
    )
    .unwrap();
    fs::write(
        dir.join("f.json"),
        serde_json::to_string(&flows.to_file()).unwrap(),
    )
    .unwrap();
}

#[test]
fn gasa_with_ti_schedules_a_feasible_instance_fully() {
    let dir = TempDir::new().unwrap();
    feasible_instance(dir.path());
    let out = ok(&mcqf(
        dir.path(),
        &[
            "schedule",
            "--topology-file",
            "t.json",
            "--flows-file",
            "f.json",
            "--cycles",
            "125,250,500",
            "--algo",
            "gasa",
            "--ti",
            "on",
            "--out",
            "r",
        ],
    ));
    assert!(out.contains("scheduled 5/5"), "{out}");
    let sol: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("r/gasa-ti_s0.solution.json")).unwrap())
            .unwrap();
    assert_eq!(sol["schedulability"], 1.0);
    for f in sol["flows"].as_array().unwrap() {
        for key in ["id", "qg", "route", "ti", "wcd_us", "scheduled"] {
            assert!(f.get(key).is_some(), "missing {key}");
        }
        assert!((1..=3).contains(&f["qg"].as_u64().unwrap()));
        assert!(f["wcd_us"].as_u64().unwrap() <= 1000);
    }
    let trace = fs::read_to_string(dir.path().join("r/gasa-ti_s0.trace.csv")).unwrap();
    assert!(trace.starts_with("generation,best_fitness,scheduled,elapsed_ms\n"));
}

#[test]
fn summary_header_written_once_and_report_recomputes() {
    let dir = TempDir::new().unwrap();
    feasible_instance(dir.path());
    let base = [
        "schedule",
        "--topology-file",
        "t.json",
        "--flows-file",
        "f.json",
        "--cycles",
        "125,250,500",
        "--out",
        "r",
        "--reps",
        "3",
    ];
    for algo in ["sa", "ga", "gasa"] {
        ok(&mcqf(
            dir.path(),
            &[&base[..], &["--algo", algo, "--max-evals", "2000"]].concat(),
        ));
    }
    let text = fs::read_to_string(dir.path().join("r/summary.csv")).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("topology,")).count(),
        1
    );
    assert_eq!(text.lines().count(), 1 + 9);

    let rows = read_summary(&dir.path().join("r/summary.csv")).unwrap();
    let table = aggregate(&rows);
    assert_eq!(table.len(), 3);
    let printed = ok(&mcqf(
        dir.path(),
        &["report", "r/summary.csv", "--out", "agg.csv"],
    ));
    assert_eq!(printed.lines().count(), 4);
    assert_eq!(
        fs::read_to_string(dir.path().join("agg.csv")).unwrap(),
        printed
    );
    for a in &table {
        let mine: Vec<f64> = rows
            .iter()
            .filter(|r| r.algo == a.algo)
            .map(|r| r.schedulability)
            .collect();
        assert_eq!(a.runs, 3);
        assert_eq!(a.mean_schedulability, mean(&mine));
        assert_eq!(a.median_schedulability, median(&mine));
    }
}

#[test]
fn arithmetic_helpers() {
    assert_eq!(mean(&[1.0, 2.0, 6.0]), 3.0);
    assert_eq!(median(&[5.0, 1.0, 3.0]), 3.0);
    assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
}

#[test]
fn constant_trace_converges_at_zero() {
    use mcqf_core::opt::{convergence_point, TracePoint};
    let t = |g| TracePoint {
        generation: g,
        best_fitness: 0.5,
        scheduled: 3,
        evaluations: g as u64 * 10,
        elapsed_ms: 0.0,
    };
    assert_eq!(convergence_point(&[t(0), t(1), t(2)]), 0);
}

#[test]
fn empty_summary_exits_2() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("s.csv"), "").unwrap();
    assert_eq!(
        mcqf(dir.path(), &["report", "s.csv"]).status.code(),
        Some(2)
    );
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let args = [
        "schedule",
        "--kind",
        "rsd",
        "--flows",
        "40",
        "--algo",
        "gasa",
        "--ti",
        "on",
        "--seed",
        "7",
        "--max-evals",
        "4000",
    ];
    ok(&mcqf(dir.path(), &[&args[..], &["--out", "a"]].concat()));
    ok(&mcqf(dir.path(), &[&args[..], &["--out", "b"]].concat()));
    for f in ["gasa-ti_s7.solution.json", "gasa-ti_s7.trace.csv"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(f)).unwrap(),
            fs::read(dir.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}
