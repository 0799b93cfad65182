//! End-to-end checks of the command-line surface: one invocation per
//! subcommand, exit-code contract, and output determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mlsparse"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn gen_is_deterministic() {
    let dir = workdir("cli-gen");
    let a = dir.join("a.txt");
    let b = dir.join("b.txt");
    assert_success(&run(&["gen", "--n", "8", "--seed", "7", "--out", a.to_str().unwrap()]));
    assert_success(&run(&["gen", "--n", "8", "--seed", "7", "--out", b.to_str().unwrap()]));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.lines().count() >= 7);
}

#[test]
fn gen_seed_comes_from_the_environment() {
    let out_a = bin()
        .args(["gen", "--n", "6"])
        .env("MLSPARSE_SEED", "123")
        .output()
        .unwrap();
    let out_b = bin()
        .args(["gen", "--n", "6", "--seed", "123"])
        .output()
        .unwrap();
    assert_eq!(stdout(&out_a), stdout(&out_b));
}

#[test]
fn closure_of_star_is_k3_of_twos() {
    let dir = workdir("cli-closure");
    let g = dir.join("star.txt");
    write(&g, "0 1 1\n0 2 1\n0 3 1\n");
    let out = run(&["closure", "--graph", g.to_str().unwrap(), "--terminals", "1,2,3"]);
    assert_success(&out);
    assert_eq!(stdout(&out), "1 2 2\n1 3 2\n2 3 2\n");
}

#[test]
fn spanner_star_keeps_all_spokes() {
    let dir = workdir("cli-spanner");
    let g = dir.join("star.txt");
    write(&g, "0 1 1\n0 2 1\n0 3 1\n");
    let out = run(&[
        "spanner",
        "--graph",
        g.to_str().unwrap(),
        "--terminals",
        "1,2,3",
        "--f",
        "mult:2",
        "--json",
    ]);
    assert_success(&out);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["weight"], "3");
    assert_eq!(v["result"]["count"], 3);
}

#[test]
fn steiner_exact_weight_on_star() {
    let dir = workdir("cli-steiner");
    let g = dir.join("star.txt");
    write(&g, "0 1 1\n0 2 1\n0 3 1\n");
    let out = run(&[
        "steiner",
        "--graph",
        g.to_str().unwrap(),
        "--terminals",
        "1,2,3",
        "--exact",
        "--json",
    ]);
    assert_success(&out);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["result"]["weight"], "3");
}

#[test]
fn exact_routes_around_heavy_edge() {
    let dir = workdir("cli-exact");
    let g = dir.join("tri.txt");
    write(&g, "0 1 1\n1 2 1\n0 2 3\n");
    let out = run(&["exact", "--graph", g.to_str().unwrap(), "--pairs", "0,2", "--f", "id"]);
    assert_success(&out);
    assert_eq!(stdout(&out), "0 1 1\n1 2 1\n");
}

#[test]
fn export_ilp_writes_deterministic_lp() {
    let dir = workdir("cli-export");
    let g = dir.join("tri.txt");
    write(&g, "0 1 1\n1 2 1\n0 2 3\n");
    let lp_a = dir.join("a.lp");
    let lp_b = dir.join("b.lp");
    for lp in [&lp_a, &lp_b] {
        let out = run(&[
            "export-ilp",
            "--graph",
            g.to_str().unwrap(),
            "--pairs",
            "0,2",
            "--f",
            "id",
            "--out",
            lp.to_str().unwrap(),
            "--json",
        ]);
        assert_success(&out);
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["variables"], 9);
    }
    let a = std::fs::read(&lp_a).unwrap();
    assert_eq!(a, std::fs::read(&lp_b).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("Minimize\n"));
    assert!(text.contains("budget_0_2:"));
    assert!(text.trim_end().ends_with("End"));
}

#[test]
fn multilevel_rounding_on_path() {
    let dir = workdir("cli-multilevel");
    let g = dir.join("path.txt");
    write(&g, "1 2 1\n2 3 1\n");
    let t = dir.join("terms.txt");
    write(&t, "1 2\n2 1\n3 2\n");
    let sol = dir.join("sol.txt");
    let out = run(&[
        "multilevel",
        "--graph",
        g.to_str().unwrap(),
        "--terminals-file",
        t.to_str().unwrap(),
        "--f",
        "id",
        "--q-preset",
        "td",
        "--out",
        sol.to_str().unwrap(),
        "--json",
    ]);
    assert_success(&out);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // Both edges at grade 2 under linear costs: 2*(1+1).
    assert_eq!(v["cost"], "4");
    assert_eq!(std::fs::read_to_string(&sol).unwrap(), "1 2 2\n2 3 2\n");

    // Composite agrees here and reports the chosen quantizer.
    let out = run(&[
        "multilevel",
        "--graph",
        g.to_str().unwrap(),
        "--terminals-file",
        t.to_str().unwrap(),
        "--f",
        "id",
        "--algorithm",
        "composite",
        "--json",
    ]);
    assert_success(&out);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["cost"], "4");

    // Metric-closure multilevel spanner reports per-level stretch.
    let out = run(&[
        "multilevel",
        "--graph",
        g.to_str().unwrap(),
        "--terminals-file",
        t.to_str().unwrap(),
        "--f",
        "mult:2",
        "--algorithm",
        "mc-multilevel",
        "--json",
    ]);
    assert_success(&out);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["detail"]["per_level"][0]["ok"], true);
}

#[test]
fn ratio_prints_exact_four_thirds() {
    let out = run(&["ratio", "--ell", "2", "--g", "linear"]);
    assert_success(&out);
    assert_eq!(stdout(&out).trim(), "4/3");
}

#[test]
fn ratio_table_is_csv() {
    let out = run(&["ratio", "--ell", "6", "--g", "linear", "--table"]);
    assert_success(&out);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ell,t"));
    assert_eq!(lines.next(), Some("1,1.000000"));
    assert_eq!(lines.next(), Some("2,1.333333"));
    assert!(text.lines().count() == 7);
}

#[test]
fn experiment_and_plot_round_trip() {
    let dir = workdir("cli-experiment");
    let csv = dir.join("results.csv");
    let out = run(&[
        "experiment",
        "--n",
        "6,8",
        "--ell",
        "2",
        "--t",
        "1.2,2",
        "--trials",
        "2",
        "--seed",
        "11",
        "--mode",
        "exact-ratio",
        "--no-timing",
        "--out",
        csv.to_str().unwrap(),
        "--json",
    ]);
    assert_success(&out);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rows"], 16);

    // Re-running writes identical bytes.
    let csv2 = dir.join("results2.csv");
    let out = run(&[
        "experiment",
        "--n",
        "6,8",
        "--ell",
        "2",
        "--t",
        "1.2,2",
        "--trials",
        "2",
        "--seed",
        "11",
        "--mode",
        "exact-ratio",
        "--no-timing",
        "--out",
        csv2.to_str().unwrap(),
    ]);
    assert_success(&out);
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&csv2).unwrap());

    let svg = dir.join("plot.svg");
    let out = run(&[
        "plot",
        "--csv",
        csv.to_str().unwrap(),
        "--kind",
        "box",
        "--group-by",
        "t",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert_success(&out);
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));
    assert!(svg_text.contains("CMP"));
}

#[test]
fn exit_codes_follow_the_contract() {
    // Usage error: unknown flag -> 2 (clap).
    let out = run(&["gen", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(2));

    // Compute/input error: missing file -> 1.
    let out = run(&["closure", "--graph", "/nonexistent/g.txt", "--terminals", "1,2"]);
    assert_eq!(out.status.code(), Some(1));

    // Invalid graph content -> 1 with a line number in the message.
    let dir = workdir("cli-exit");
    let g = dir.join("bad.txt");
    write(&g, "1 2 1\n1 2 2\n");
    let out = run(&["closure", "--graph", g.to_str().unwrap(), "--terminals", "1,2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("duplicate edge"));

    // Help exists for every subcommand.
    for sub in [
        "gen",
        "closure",
        "spanner",
        "steiner",
        "exact",
        "export-ilp",
        "multilevel",
        "ratio",
        "experiment",
        "plot",
    ] {
        let out = run(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub} --help");
    }
}
