use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn assoc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assoc"))
        .args(args)
        .current_dir(dir)
        .env_remove("ASSOC_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn algebra_check_passes_and_detects_a_flipped_sign() {
    let dir = tempfile::tempdir().unwrap();
    let ok = assoc(&["algebra-check"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("B_phi is definite"));

    let bad = assoc(&["algebra-check", "--flip-epsilon", "275"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout(&bad);
    let last = text.lines().last().unwrap();
    assert!(last.contains("FAIL at <e_i x e_j, e_k>"), "{last}");
    assert!(
        last.contains("6 mismatches, first <e2 x e5, e7> = 1, expected -1"),
        "{last}"
    );

    assert_eq!(
        assoc(&["algebra-check", "--flip-epsilon", "124"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn rep_check_prints_the_rank_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = assoc(&["rep-check"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("rank P_{1,5} = 12: rank 12"));
    assert!(text.contains("rank P_{1,3} = 8: rank 8"));
    assert!(text.contains("(1,1):1 (1,3):2 (1,5):2 (1,7):1 (total 60)"));
}

#[test]
fn verify_writes_one_record_per_sample_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = assoc(
        &[
            "verify",
            "sl-cone",
            "--samples",
            "7",
            "--json",
            "cone.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let recs = lines(&dir.path().join("cone.jsonl"));
    assert_eq!(recs.len(), 8);
    for (i, r) in recs[..7].iter().enumerate() {
        assert_eq!(r["kind"], "sample");
        assert_eq!(r["sample"], i);
        assert_eq!(r["pass"], true);
        assert!(r["metrics"]["associativity_residual"].as_f64().unwrap() < 1e-9);
        assert!(r.get("wall_time_ms").is_none());
    }
    let s = &recs[7];
    assert_eq!(s["kind"], "summary");
    assert_eq!(s["passed"], 7);
    assert_eq!(s["tolerances"]["min_traceless"], 0.1);
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = assoc(
        &["verify", "sl-cone", "--seed", "42", "--samples", "12"],
        dir.path(),
    );
    let b = assoc(
        &["verify", "sl-cone", "--seed", "42", "--samples", "12"],
        dir.path(),
    );
    let c = assoc(
        &["verify", "sl-cone", "--seed", "43", "--samples", "12"],
        dir.path(),
    );
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let timed = assoc(
        &["verify", "plane", "--samples", "2", "--timing"],
        dir.path(),
    );
    assert!(stdout(&timed).contains("wall_time_ms"));
}

#[test]
fn failing_examples_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["verify", "perturbed-cone", "--samples", "3"],
        vec!["verify", "sphere-cylinder", "--samples", "3"],
        vec!["verify", "sl-cone", "--samples", "3", "--skip-christoffel"],
        vec![
            "verify",
            "sl-cone",
            "--samples",
            "3",
            "--tol-override",
            "symmetry=1e-300",
        ],
    ] {
        assert_eq!(assoc(&args, dir.path()).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "[verify]\nsampels = 3\n").unwrap();
    std::fs::write(
        dir.path().join("neg.toml"),
        "[verify.tolerances]\nharmonic = -1.0\n",
    )
    .unwrap();
    for args in [
        vec!["verify", "torus"],
        vec!["verify", "plane", "--tol-override", "nope=1"],
        vec!["verify", "plane", "--tol-override", "symmetry"],
        vec!["verify", "plane", "--samples", "0"],
        vec!["verify", "plane", "--config", "bad.toml"],
        vec!["verify", "plane", "--config", "neg.toml"],
        vec!["verify", "plane", "--config", "missing.toml"],
        vec!["verify", "graph:missing.grid"],
        vec!["solve-graph", "--boundary", "square"],
        vec!["solve-graph", "--n", "2"],
        vec!["report", "missing.jsonl"],
        vec!["frobnicate"],
    ] {
        assert_eq!(assoc(&args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_sets_samples_and_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "[verify]\nsamples = 4\nseed = 3\n[verify.tolerances]\nmin_traceless = 100.0\n",
    )
    .unwrap();
    let o = assoc(&["verify", "sl-cone", "--config", "run.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).lines().count(), 5);
    // flags win over the file
    let o = assoc(
        &[
            "verify",
            "sl-cone",
            "--config",
            "run.toml",
            "--tol-override",
            "min_traceless=0.1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn solve_then_verify_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = assoc(
        &[
            "solve-graph",
            "--n",
            "17",
            "--amplitude",
            "0.1",
            "--out",
            "h.grid",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("converged after 1 iterations"));

    let o = assoc(
        &[
            "verify",
            "graph:h.grid",
            "--samples",
            "6",
            "--json",
            "g.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = assoc(&["report", "g.jsonl"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("graph:h.grid: 6 samples (seed 1), 6 passed"));

    let o = assoc(&["report", "g.jsonl", "--csv"], dir.path());
    let csv = stdout(&o);
    let mut rows = csv.lines();
    let header: Vec<&str> = rows.next().unwrap().split(',').collect();
    assert!(header.contains(&"metrics.breakdown.n17") && header.contains(&"x0"));
    assert_eq!(rows.count(), 6);
}

#[test]
fn zero_boundary_gives_a_trivial_grid_in_the_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_assoc"))
        .args([
            "solve-graph",
            "--boundary",
            "zero",
            "--n",
            "5",
            "--out",
            "z.grid",
        ])
        .current_dir(dir.path())
        .env("ASSOC_OUT_DIR", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out.join("z.grid")).unwrap();
    assert!(text.lines().skip(3).all(|l| l == "0e0 0e0 0e0 0e0"));
    assert_eq!(text.lines().count(), 3 + 216);
}

#[test]
fn large_amplitude_without_continuation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = assoc(
        &[
            "solve-graph",
            "--amplitude",
            "10",
            "--boundary",
            "sincos",
            "--no-continuation",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("iteration  20"));
    assert!(text.contains("diverged after 20 iterations"));
    assert!(!dir.path().join("graph.grid").exists());
}

#[test]
fn unconverged_or_malformed_grids_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("box 0 0 0 1 1 1\nn 3\nresidual 0\n");
    for i in 0..64 {
        text.push_str(&format!("{} 0 0 0\n", (i % 5) as f64));
    }
    std::fs::write(dir.path().join("rough.grid"), &text).unwrap();
    let o = assoc(&["verify", "graph:rough.grid"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not converged"));

    std::fs::write(
        dir.path().join("short.grid"),
        "box 0 0 0 1 1 1\nn 3\nresidual 0\n1 2 3 4\n",
    )
    .unwrap();
    assert_eq!(
        assoc(&["verify", "graph:short.grid"], dir.path())
            .status
            .code(),
        Some(2)
    );
    std::fs::write(dir.path().join("bad.jsonl"), "{\"kind\":\"sample\"}\n").unwrap();
    assert_eq!(
        assoc(&["report", "bad.jsonl"], dir.path()).status.code(),
        Some(2)
    );
}
