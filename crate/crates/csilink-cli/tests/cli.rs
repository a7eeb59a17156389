//! Command-line behavior: exit codes, diagnostics, help coverage.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_csilink")
}

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(repo_root())
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn validate_ok_and_exit_codes() {
    let out = run(&["validate", "assets/chord-2.diag"]);
    assert!(out.status.success());

    // malformed diagram file: exit 2 with a line diagnostic
    let dir = std::env::temp_dir().join("csilink-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.diag");
    std::fs::write(&bad, "m=1 parity=odd flavor=link\next 1: a b\nint:\nedge a -> zz\n").unwrap();
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "stderr: {err}");
}

#[test]
fn resource_cap_exit_code() {
    let out = run(&[
        "enumerate",
        "--m",
        "1",
        "--parity",
        "odd",
        "--flavor",
        "link",
        "--order",
        "9",
        "--degree",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cap"), "stderr: {err}");
}

#[test]
fn delta_output_round_trips() {
    let out = run(&["delta", "assets/tripod.diag"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let sum = csilink::diagram::parse_diagram_sum(&text).unwrap();
    assert_eq!(sum.len(), 3);
}

#[test]
fn enumerate_prints_parseable_diagrams() {
    let out = run(&[
        "enumerate",
        "--m",
        "1",
        "--parity",
        "odd",
        "--flavor",
        "link",
        "--order",
        "2",
        "--degree",
        "0",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# 4 diagrams"));
    let blocks: Vec<&str> = text
        .split("\n\n")
        .map(|b| b.trim())
        .filter(|b| !b.is_empty())
        .collect();
    for block in blocks {
        let body = block.trim_start_matches('#').trim();
        let body = match body.find("m=") {
            Some(i) => &body[i..],
            None => continue,
        };
        csilink::diagram::parse_diagram(body).unwrap();
    }
}

#[test]
fn cohomology_table_sweeps() {
    let out = run(&[
        "cohomology",
        "--m",
        "1",
        "--parity",
        "odd",
        "--flavor",
        "link",
        "--order",
        "2",
        "--degree",
        "2",
        "--table",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // header plus three degree rows
    assert_eq!(text.trim().lines().count(), 4);
}

#[test]
fn mu_override_changes_invariant() {
    let base = run(&[
        "invariant",
        "assets/long-unknot.lnk",
        "--order",
        "2",
        "--flavor",
        "link",
        "--samples",
        "5e4",
        "--seed",
        "11",
    ]);
    assert!(base.status.success());
    let with_mu = run(&[
        "invariant",
        "assets/long-unknot.lnk",
        "--order",
        "2",
        "--flavor",
        "link",
        "--samples",
        "5e4",
        "--seed",
        "11",
        "--mu",
        "assets/tripod.diag=1.0",
    ]);
    assert!(with_mu.status.success());
    assert_ne!(base.stdout, with_mu.stdout);
}

#[test]
fn finite_type_check_runs() {
    // write the bundled singular pair to a file and check it
    let dir = std::env::temp_dir().join("csilink-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("two-singular.slnk");
    std::fs::write(
        &path,
        csilink::vassiliev::two_singular_braid_pair().to_text(),
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap(), "--format", "singular-link"]);
    assert!(out.status.success());
    let out = run(&[
        "finite-type-check",
        path.to_str().unwrap(),
        "--order",
        "1",
        "--flavor",
        "braid",
        "--samples",
        "5e4",
        "--seed",
        "2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let fields: Vec<&str> = text.trim().split('\t').collect();
    assert_eq!(fields.len(), 4);
}

#[test]
fn help_documents_every_interface_flag() {
    let subcommands: &[(&str, &[&str])] = &[
        ("enumerate", &["--m", "--parity", "--flavor", "--order", "--degree", "--max-vertices"]),
        ("delta", &[]),
        (
            "cohomology",
            &["--m", "--parity", "--flavor", "--order", "--degree", "--table"],
        ),
        ("weights", &["--m", "--k", "--flavor"]),
        (
            "integrate",
            &["--samples", "--seed", "--form", "--theta-cap", "--mu"],
        ),
        (
            "invariant",
            &["--order", "--flavor", "--basis-index", "--samples", "--seed"],
        ),
        (
            "finite-type-check",
            &["--order", "--flavor", "--samples", "--seed"],
        ),
        ("validate", &["--format"]),
    ];
    for (sub, flags) in subcommands {
        let out = run(&[sub, "--help"]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        for flag in *flags {
            assert!(text.contains(flag), "{sub} --help misses {flag}");
        }
        assert!(text.contains("--workers"), "{sub} --help misses --workers");
    }
}
