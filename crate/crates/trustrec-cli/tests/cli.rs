//! End-to-end tests of the `trustrec` binary on the committed fixture:
//! exit codes, printed summaries, written files, and flag/config-file
//! precedence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use trustrec::graph::Convention;
use trustrec::ingest::{build_dataset, parse_trust_edges};
use trustrec::katz::Provenance;
use trustrec::persist::{read_id_map, read_similarity};
use trustrec::sparse::SparseMatrix;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../trustrec/tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trustrec"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn path_arg(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn ingest_reports_corpus_statistics_and_writes_id_maps() {
    let out_dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "ingest",
        "--trust",
        &path_arg(&fixture("trust.txt")),
        "--ratings",
        &path_arg(&fixture("ratings.txt")),
        "--out",
        &path_arg(out_dir.path()),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(
        text.contains("users=5 items=6 ratings=13 edges=5"),
        "unexpected summary: {text}"
    );
    let users = read_id_map(&out_dir.path().join("users.txt")).unwrap();
    assert_eq!(users.len(), 5);
    assert_eq!(users.raw(0), 100);
    assert_eq!(users.raw(4), 500);
    let items = read_id_map(&out_dir.path().join("items.txt")).unwrap();
    assert_eq!(items.len(), 6);
    assert_eq!(items.raw(5), 60);
}

#[test]
fn eigen_reports_the_dominant_eigenvalue() {
    let output = run(&["eigen", "--trust", &path_arg(&fixture("trust.txt"))]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(
        text.contains("spectral radius estimate 1.000000"),
        "got: {text}"
    );
    assert!(text.contains("converged=true"), "got: {text}");
}

#[test]
fn one_step_similarity_round_trips_to_identity_plus_scaled_adjacency() {
    let out_dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "similarity",
        "--trust",
        &path_arg(&fixture("trust.txt")),
        "--alpha",
        "0.25",
        "--kmax",
        "1",
        "--out",
        &path_arg(out_dir.path()),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));

    let sigma = read_similarity(&out_dir.path().join("similarity.txt")).unwrap();
    // expected: identity plus 0.25 * adjacency, built through the library
    let trust = parse_trust_edges(
        std::io::BufReader::new(fs::File::open(fixture("trust.txt")).unwrap()),
        None,
    )
    .unwrap();
    let data = build_dataset(&trust, &[], Convention::TrusteeRows).unwrap();
    let expected = SparseMatrix::identity(5)
        .add(&data.graph.adjacency().scaled(0.25))
        .unwrap();
    assert_eq!(sigma.matrix().max_abs_diff(&expected).unwrap(), 0.0);
    match sigma.provenance() {
        Provenance::Katz(c) => {
            assert_eq!(c.alpha, 0.25);
            assert_eq!(c.k_max, 1);
            assert_eq!(c.label(), "KS_NNNN");
        }
        other => panic!("unexpected provenance {other:?}"),
    }
}

#[test]
fn boost_without_two_steps_is_rejected_with_explanation() {
    let out_dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "similarity",
        "--trust",
        &path_arg(&fixture("trust.txt")),
        "--kmax",
        "1",
        "--boost",
        "--row-norm",
        "max",
        "--out",
        &path_arg(out_dir.path()),
    ]);
    assert!(!output.status.success());
    let text = stderr(&output);
    assert!(
        text.contains("boost requires exactly two propagation steps"),
        "unhelpful error: {text}"
    );
    assert!(!out_dir.path().join("similarity.txt").exists());
}

#[test]
fn missing_input_exits_nonzero_and_names_the_path() {
    let output = run(&[
        "ingest",
        "--trust",
        "/definitely/not/here.txt",
        "--ratings",
        &path_arg(&fixture("ratings.txt")),
    ]);
    assert!(!output.status.success());
    assert!(stderr(&output).contains("/definitely/not/here.txt"));
}

#[test]
fn evaluate_writes_metric_tables_for_chosen_labels() {
    let out_dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "evaluate",
        "--trust",
        &path_arg(&fixture("trust.txt")),
        "--ratings",
        &path_arg(&fixture("ratings.txt")),
        "--convention",
        "transposed",
        "--alpha",
        "0.5",
        "--cold-threshold",
        "2",
        "--label",
        "MP",
        "--label",
        "Trust_exp",
        "--label",
        "Trust_jac",
        "--out",
        &path_arg(out_dir.path()),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));

    let metrics = fs::read_to_string(out_dir.path().join("metrics.csv")).unwrap();
    let lines: Vec<&str> = metrics.lines().collect();
    assert_eq!(lines[0], "config,k,ndcg,precision,recall,users,empty_lists");
    assert_eq!(
        lines.len(),
        1 + 3 * 10,
        "one row per configuration and cutoff"
    );
    // hand-derived top-10 gain for the direct-trust baseline on the fixture
    assert!(
        metrics.contains("Trust_exp,10,0.775325"),
        "missing expected row in: {metrics}"
    );

    let curves = fs::read_to_string(out_dir.path().join("curves.csv")).unwrap();
    let lines: Vec<&str> = curves.lines().collect();
    assert_eq!(lines[0], "config,k,recall,precision");
    assert_eq!(lines.len(), 1 + 3 * 10);
}

#[test]
fn sweep_covers_the_whole_grid() {
    let out_dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "sweep",
        "--trust",
        &path_arg(&fixture("trust.txt")),
        "--ratings",
        &path_arg(&fixture("ratings.txt")),
        "--convention",
        "truster-rows",
        "--alpha",
        "0.5",
        "--cold-threshold",
        "2",
        "--out",
        &path_arg(out_dir.path()),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("36 configurations"));
    let metrics = fs::read_to_string(out_dir.path().join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 1 + 36 * 10);
}

#[test]
fn identical_runs_produce_byte_identical_files() {
    let once = tempfile::tempdir().unwrap();
    let twice = tempfile::tempdir().unwrap();
    for dir in [&once, &twice] {
        let output = run(&[
            "evaluate",
            "--trust",
            &path_arg(&fixture("trust.txt")),
            "--ratings",
            &path_arg(&fixture("ratings.txt")),
            "--convention",
            "truster-rows",
            "--alpha",
            "0.5",
            "--cold-threshold",
            "2",
            "--all",
            "--out",
            &path_arg(dir.path()),
        ]);
        assert!(output.status.success(), "stderr: {}", stderr(&output));
        let output = run(&[
            "recommend",
            "--trust",
            &path_arg(&fixture("trust.txt")),
            "--ratings",
            &path_arg(&fixture("ratings.txt")),
            "--convention",
            "truster-rows",
            "--alpha",
            "0.5",
            "--cold-threshold",
            "2",
            "--label",
            "KS_PNMB",
            "--out",
            &path_arg(dir.path()),
        ]);
        assert!(output.status.success(), "stderr: {}", stderr(&output));
    }
    for name in ["metrics.csv", "curves.csv", "recommendations.txt"] {
        let a = fs::read(once.path().join(name)).unwrap();
        let b = fs::read(twice.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override_them() {
    let out_dir = tempfile::tempdir().unwrap();
    let cfg_path = out_dir.path().join("run.cfg");
    fs::write(
        &cfg_path,
        format!(
            "# fixture run\ntrust={}\nalpha=0.5\nkmax=1\nconvention=truster-rows\n",
            path_arg(&fixture("trust.txt"))
        ),
    )
    .unwrap();

    // flags absent: the file's alpha applies
    let from_file = out_dir.path().join("from_file");
    let output = run(&[
        "similarity",
        "--config",
        &path_arg(&cfg_path),
        "--out",
        &path_arg(&from_file),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let sigma = read_similarity(&from_file.join("similarity.txt")).unwrap();
    let Provenance::Katz(c) = sigma.provenance() else {
        panic!("not a propagated matrix")
    };
    assert_eq!(c.alpha, 0.5);
    assert_eq!(c.k_max, 1);
    assert_eq!(c.convention, Convention::TrusterRows);

    // --alpha overrides the file; kmax/convention still come from it
    let overridden = out_dir.path().join("overridden");
    let output = run(&[
        "similarity",
        "--config",
        &path_arg(&cfg_path),
        "--alpha",
        "0.25",
        "--out",
        &path_arg(&overridden),
    ]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let sigma = read_similarity(&overridden.join("similarity.txt")).unwrap();
    let Provenance::Katz(c) = sigma.provenance() else {
        panic!("not a propagated matrix")
    };
    assert_eq!(c.alpha, 0.25);
    assert_eq!(c.k_max, 1);
    assert_eq!(c.convention, Convention::TrusterRows);
}

#[test]
fn unknown_config_key_is_rejected_with_location() {
    let out_dir = tempfile::tempdir().unwrap();
    let cfg_path = out_dir.path().join("bad.cfg");
    fs::write(&cfg_path, "alhpa=0.5\n").unwrap();
    let output = run(&[
        "similarity",
        "--trust",
        &path_arg(&fixture("trust.txt")),
        "--config",
        &path_arg(&cfg_path),
    ]);
    assert!(!output.status.success());
    let text = stderr(&output);
    assert!(
        text.contains("alhpa") && text.contains(":1"),
        "unhelpful error: {text}"
    );
}

#[test]
fn convention_aliases_map_to_the_canonical_orientations() {
    for (alias, canonical) in [("as-paper", "trustee-rows"), ("transposed", "truster-rows")] {
        let out_dir = tempfile::tempdir().unwrap();
        let output = run(&[
            "similarity",
            "--trust",
            &path_arg(&fixture("trust.txt")),
            "--convention",
            alias,
            "--out",
            &path_arg(out_dir.path()),
        ]);
        assert!(output.status.success(), "stderr: {}", stderr(&output));
        let sidecar = fs::read_to_string(out_dir.path().join("similarity.txt.provenance")).unwrap();
        assert!(
            sidecar.contains(&format!("convention={canonical}")),
            "alias {alias}: sidecar was {sidecar}"
        );
    }
}
