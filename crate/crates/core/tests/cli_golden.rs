//! The documented example corpus, replayed through the command line.

use std::path::PathBuf;
use std::process::Command;

use geoindex::cli::{run, Outcome};

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

fn example(name: &str) -> String {
    examples().join(name).to_string_lossy().into_owned()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(examples().join("golden").join(name)).unwrap()
}

fn geoindex(args: &[&str]) -> Outcome {
    run(std::iter::once("geoindex").chain(args.iter().copied()))
}

#[track_caller]
fn assert_golden(args: &[&str], code: i32, file: &str) {
    let out = geoindex(args);
    assert_eq!(out.code, code, "stderr: {}", out.stderr);
    assert_eq!(out.stdout, golden(file), "output of {args:?} drifted from {file}");
}

#[test]
fn betti_ladders() {
    assert_golden(&["betti", "--n", "3", "--qmax", "8"], 0, "betti-n3-q8.tsv");
    assert_golden(&["betti", "--n", "2", "--qmax", "12", "--format", "json"], 0, "betti-n2-q12.json");
}

#[test]
fn pair_tables() {
    let cfg = example("s2-pair.json");
    assert_golden(&["index-table", "--config", &cfg, "--m-max", "10"], 0, "s2-pair.index-table.tsv");
    assert_golden(&["mean-index", "--config", &cfg], 0, "s2-pair.mean-index.tsv");
}

#[test]
fn pair_identity_and_morse_window() {
    let cfg = example("s2-pair.json");
    assert_golden(&["identity-check", "--config", &cfg, "--format", "json"], 0, "s2-pair.identity-check.json");
    assert_golden(
        &["verify-morse", "--config", &cfg, "--window", "1:3", "--format", "json"],
        0,
        "s2-pair.verify-morse.json",
    );
}

#[test]
fn jump_certificates() {
    let cfg = example("s2-single.json");
    let out = geoindex(&["jump-search", "--config", &cfg, "--delta", "1/10", "--max-M", "50", "--max-N", "100", "--format", "json"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, std::fs::read_to_string(example("s2-single.cert.json")).unwrap());

    let cert = example("s2-single.cert.json");
    assert_golden(
        &["verify-jump", "--config", &cfg, "--cert", &cert, "--probe", "10"],
        0,
        "s2-single.verify-jump.tsv",
    );
}

#[test]
fn replayed_proofs_fail_with_the_top_degree_inequality() {
    for (cfg, cert, file) in [
        ("s2-pair.json", "s2-pair.cert.json", "s2-pair.replay-proof.json"),
        ("s3-boundary.json", "s3-boundary.cert.json", "s3-boundary.replay-proof.json"),
    ] {
        let (cfg, cert) = (example(cfg), example(cert));
        let args = ["replay-proof", "--config", &cfg, "--cert", &cert, "--format", "json"];
        assert_golden(&args, 1, file);
        let out = geoindex(&args);
        assert!(out.stderr.contains("Morse inequality at the top degree"), "{}", out.stderr);
    }
}

#[test]
fn config_output_format_is_honoured() {
    assert_golden(&["validate", "--config", &example("s2-golden.json")], 0, "s2-golden.validate.json");
}

#[test]
fn exit_statuses() {
    let dir = std::env::temp_dir().join(format!("geoindex-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, text: String| {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    };
    let pair = std::fs::read_to_string(examples().join("s2-pair.json")).unwrap();

    let unknown = write("unknown.json", pair.replace("\"bumpy\": true,", "\"bumpy\": true, \"colour\": 1,"));
    let out = geoindex(&["validate", "--config", &unknown]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 4") && out.stderr.contains("colour"), "{}", out.stderr);

    let half = write("half.json", pair.replace("3/5", "1/2"));
    let out = geoindex(&["validate", "--config", &half]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("1/2"), "{}", out.stderr);

    let p0 = write("p0.json", pair.replace("\"thetas\": [\"3/5\"]", "\"p_zero\": 1"));
    let out = geoindex(&["validate", "--config", &p0]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("bumpy constraint"), "{}", out.stderr);

    // 0.3333333333333 ± 1e-13 contains 1/3; a resolution limit of 2 lets it
    // load, and the third iterate cannot be decided.
    let coarse = write(
        "coarse.json",
        pair.replace("\"bumpy\": true,", "\"bumpy\": true,\n  \"resolution_limit\": 2,")
            .replace("[\"3/5\"]", "[{\"decimal\": \"0.3333333333333\", \"err\": \"0.0000000000001\"}]"),
    );
    let out = geoindex(&["index-table", "--config", &coarse, "--label", "A", "--m-max", "3"]);
    assert_eq!(out.code, 3, "{}", out.stderr);

    let out = geoindex(&["identity-check", "--config", &example("s2-golden.json")]);
    assert_eq!(out.code, 1);

    let out = geoindex(&["jump-search", "--config", &example("s2-pair.json"), "--delta", "1/10", "--max-M", "5", "--max-N", "20"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("near miss"), "{}", out.stderr);

    let bad_cert = write(
        "bad.cert.json",
        std::fs::read_to_string(examples().join("s2-single.cert.json")).unwrap().replace("\"N\": 6", "\"N\": 7"),
    );
    let out = geoindex(&["verify-jump", "--config", &example("s2-single.json"), "--cert", &bad_cert]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("invalid certificate"), "{}", out.stderr);

    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let cfg = example("s2-pair.json");
    let cert = example("s2-pair.cert.json");
    let commands: [&[&str]; 3] = [
        &["jump-search", "--config", &cfg, "--delta", "1/10", "--max-M", "50", "--max-N", "100"],
        &["verify-morse", "--config", &cfg, "--window", "0:40"],
        &["replay-proof", "--config", &cfg, "--cert", &cert],
    ];
    for args in commands {
        let outputs: Vec<_> = ["1", "2", "7"]
            .iter()
            .map(|w| {
                Command::new(env!("CARGO_BIN_EXE_geoindex"))
                    .args(args)
                    .env("GEOINDEX_WORKERS", w)
                    .output()
                    .unwrap()
            })
            .collect();
        for o in &outputs[1..] {
            assert_eq!(o.stdout, outputs[0].stdout, "{args:?}");
            assert_eq!(o.status.code(), outputs[0].status.code());
        }
    }
    let bad = Command::new(env!("CARGO_BIN_EXE_geoindex"))
        .args(["betti", "--n", "2", "--qmax", "3"])
        .env("GEOINDEX_WORKERS", "0")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
