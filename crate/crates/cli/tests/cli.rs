use std::path::Path;
use std::process::{Command, Output};

fn persteam(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_persteam")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn synth_run_verify_explain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = persteam(d, &["synth", "--preset", "planted", "--groups", "20", "--seed", "3", "--out", "c"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(d.join("c/pipeline.conf").exists());

    let o = persteam(d, &["--config", "c/pipeline.conf", "all"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.contains(" ran ")).count(), 8, "{}", stdout(&o));
    let o = persteam(d, &["--config", "c/pipeline.conf", "all"]);
    assert_eq!(stdout(&o).lines().filter(|l| l.contains(" cached ")).count(), 8);

    let o = persteam(d, &["--config", "c/pipeline.conf", "verify", "--truth", "c/truth.json"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("recall 1.0000"), "{}", stdout(&o));

    let o = persteam(d, &["--config", "c/pipeline.conf", "explain", "0"]);
    assert!(stdout(&o).starts_with("team 0: "), "{}", stdout(&o));
    let o = persteam(d, &["--config", "c/pipeline.conf", "explain", "100000"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("unknown team"));
}

#[test]
fn single_stages_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(persteam(d, &["synth", "--preset", "fig-s1", "--out", "s1"]).status.success());
    let cfg = ["--config", "s1/pipeline.conf"];

    let o = persteam(d, &[&cfg[..], &["mine"]].concat());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("run `ingest` first"), "{}", stderr(&o));

    for stage in ["ingest", "network", "persist", "mine"] {
        let o = persteam(d, &[&cfg[..], &["run", stage]].concat());
        assert!(o.status.success(), "{stage}: {}", stderr(&o));
    }
    let edges = std::fs::read_to_string(d.join("s1/run/persistent_edges.csv")).unwrap();
    assert!(edges.contains("A,B,2-6\n"));
    assert!(!edges.contains("C,D"));

    let o = persteam(d, &[&cfg[..], &["--set", "min_pubs=2", "mine"]].concat());
    assert!(stderr(&o).contains("stage persist is out of date"), "{}", stderr(&o));

    let o = persteam(d, &[&cfg[..], &["--set", "margin=1", "config"]].concat());
    assert!(stdout(&o).contains("margin = 1\n"));
    assert!(stdout(&o).contains("window_start = 1\n"));

    let o = persteam(d, &[&cfg[..], &["--set", "colour=red", "config"]].concat());
    assert!(!o.status.success());
    let o = persteam(d, &[&cfg[..], &["run", "nope"]].concat());
    assert!(stderr(&o).contains("unknown stage"));
}

#[test]
fn help_lists_every_key() {
    let o = persteam(Path::new("."), &["--help"]);
    let text = stdout(&o);
    for key in ["publications", "citation_window", "author_cap", "window_len", "min_pubs", "delta", "gamma", "margin", "threads"] {
        assert!(text.contains(&format!("  {key} ")), "{key} missing from help");
    }
}
