use std::path::{Path, PathBuf};

use icregion::cli::{main_with_args, EXIT_NEGATIVE};

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("icregion").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn files_in(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

#[test]
fn prove_exit_codes() {
    let (code, out, _) = run(&["prove", &data("queries/relfm-c-le-e.query")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("PROVABLE"));
    let (code, out, _) = run(&["prove", &data("queries/data-processing-reversed.query")]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.starts_with("NOT PROVABLE"));
}

#[test]
fn every_shipped_relation_query_is_provable() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/queries");
    let relations: Vec<PathBuf> = files_in(&dir)
        .into_iter()
        .filter(|p| {
            p.file_name()
                .unwrap()
                .to_string_lossy()
                .starts_with("relfm-")
        })
        .collect();
    assert_eq!(relations.len(), 12);
    for q in relations {
        let (code, out, err) = run(&["prove", q.to_str().unwrap(), "--check", "50"]);
        assert_eq!(code, 0, "{}: {out}{err}", q.display());
    }
}

#[test]
fn fm_on_shipped_conditions() {
    let (code, out, err) = run(&[
        "fm",
        &data("hk-conditions.txt"),
        "--eliminate",
        "R1c,R1p,R2c,R2p",
    ]);
    assert_eq!(code, 0, "{err}");
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("vars R1 R2"));
    // all five facet directions survive on this slice, plus R1, R2 >= 0
    assert_eq!(lines.count(), 7, "{out}");
}

#[test]
fn fm_writes_file_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("out.txt");
    let (code, out, _) = run(&[
        "fm",
        &data("hk-conditions.txt"),
        "--eliminate",
        "R1c,R1p,R2c,R2p",
        "-o",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "7 rows");
    let (code, again, _) = run(&["fm", dest.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(again, std::fs::read_to_string(&dest).unwrap());
}

#[test]
fn region_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("det");
    let (code, _, err) = run(&[
        "region",
        &data("channels/binary-modulo.json"),
        "--theorem",
        "det-cap",
        "--grid-step",
        "0.1",
        "-o",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    assert!(csv.starts_with("R1,R2\n"));
    assert!(csv.contains("0.5,1\n"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(prefix.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(json["labels"], serde_json::json!(["R1", "R2"]));
    assert!(json["points"].as_array().unwrap().len() >= 3);
}

#[test]
fn region_errors_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("bad");
    let p = prefix.to_str().unwrap();
    let (code, _, err) = run(&[
        "region",
        &data("channels/non-injective.json"),
        "--theorem",
        "det-cap",
        "-o",
        p,
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("y2(x2=0, t1=0) = y2(x2=0, t1=1)"), "{err}");
    let (code, _, err) = run(&[
        "region",
        &data("channels/noisy-z.json"),
        "--theorem",
        "cribbing",
        "-o",
        p,
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("does not apply"), "{err}");
    let (code, _, _) = run(&[
        "region",
        "--theorem",
        "modulo",
        "--grid-step",
        "0.3",
        "-o",
        p,
    ]);
    assert_eq!(code, 1);
    assert!(files_in(dir.path()).is_empty());
}

#[test]
fn region_is_deterministic() {
    let args = [
        "region",
        "--theorem",
        "modulo",
        "--m",
        "3",
        "--grid-step",
        "0.05",
    ];
    assert_eq!(run(&args).1, run(&args).1);
}

#[test]
fn figure_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = run(&["figure", "fig8", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("max sum-rate 1.5"), "{out}");
    let files = files_in(dir.path());
    assert_eq!(files.len(), 1);
    assert!(files[0].ends_with("fig8-capacity.csv"));
    let (code, _, _) = run(&["figure", "fig10", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn simulate_csv_is_seeded() {
    let args = [
        "simulate", "--n", "12", "--r1", "0.25", "--r1p", "0.6", "--lambda", "0.5", "--trials",
        "200",
    ];
    let (code, a, _) = run(&args);
    assert_eq!(code, 0);
    let mut lines = a.lines();
    assert_eq!(
        lines.next(),
        Some("n,R1,R1p,lambda,trials,enc_fail,dec_err,err_rate,ci_lo,ci_hi,analytic")
    );
    assert!(lines.next().unwrap().starts_with("12,0.25,0.6,0.5,200,"));
    assert_eq!(a, run(&args).1);
    let other = run(&[&args[..], &["--seed", "8"]].concat()).1;
    assert_ne!(a, other);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["bogus"]).0, 1);
    assert_eq!(
        run(&["simulate", "--n", "0", "--r1", "0.2", "--r1p", "0.5", "--lambda", "0.5"]).0,
        1
    );
    assert_eq!(run(&["region", "--theorem", "nope"]).0, 1);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
}
