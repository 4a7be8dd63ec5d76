use std::path::Path;
use std::process::{Command, Output};

fn efseg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_efseg"))
        .args(args)
        .output()
        .unwrap()
}

fn write_steps(path: &Path) {
    let mut text = String::from("count\n");
    for (i, level) in [2u32, 15, 4, 25].iter().enumerate() {
        for j in 0..60u32 {
            text.push_str(&format!("{}\n", level + (j * 7 + i as u32) % 4));
        }
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn segment_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("y.csv");
    write_steps(&input);
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out in [&out_a, &out_b] {
        let o = efseg(&[
            "segment",
            "--input",
            input.to_str().unwrap(),
            "--family",
            "poisson",
            "--kmax",
            "12",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read_to_string(&out_a).unwrap();
    assert_eq!(a, std::fs::read_to_string(&out_b).unwrap());
    let doc: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(doc["change_points"], serde_json::json!([60, 120, 180]));
    assert_eq!(doc["selection"]["k_hat"], 4);
    assert_eq!(doc["segments"].as_array().unwrap().len(), 4);

    // evaluate the result against itself and a shifted list
    let list = dir.path().join("ref.txt");
    std::fs::write(&list, "62\n120\n175\n").unwrap();
    let o = efseg(&["evaluate", out_a.to_str().unwrap(), list.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["hausdorff"], 5);
}

#[test]
fn fasta_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.fa");
    let mut seq = String::from(">toy\n");
    seq.push_str(&"AAT".repeat(100));
    seq.push_str(&"GCG".repeat(100));
    std::fs::write(&input, &seq).unwrap();
    let o = efseg(&[
        "segment",
        "--input",
        input.to_str().unwrap(),
        "--fasta",
        "--kmax",
        "10",
        "--beta",
        "0.1",
        "--natural",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["change_points"], serde_json::json!([300]));
    // neither segment uses every category
    assert_eq!(doc["segments"][0]["boundary"], true);
    assert!(doc["segments"][0].get("natural").is_none());

    std::fs::write(&input, ">toy\nACNT\n").unwrap();
    let o = efseg(&["segment", "--input", input.to_str().unwrap(), "--fasta"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 3"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    std::fs::write(&input, "1\nx\n").unwrap();
    let o = efseg(&[
        "segment",
        "--input",
        input.to_str().unwrap(),
        "--family",
        "poisson",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    std::fs::write(&input, "1\n2\n3\n4\n").unwrap();
    let o = efseg(&[
        "segment",
        "--input",
        input.to_str().unwrap(),
        "--family",
        "poisson",
        "--kmax",
        "3",
        "--min-len",
        "2",
        "--beta",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(3));

    let o = efseg(&[
        "segment",
        "--input",
        input.to_str().unwrap(),
        "--family",
        "gamma",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_table() {
    let args = [
        "simulate",
        "--n",
        "800",
        "--k-mean",
        "4",
        "--replicates",
        "2",
        "--kmax",
        "12",
        "--seed",
        "5",
    ];
    let a = efseg(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("replicate,K_true,K_hat,delta"));
    assert_eq!(lines.count(), 2);
    assert_eq!(efseg(&args).stdout, text.as_bytes());
}

#[test]
fn constants_output() {
    let o = efseg(&[
        "constants",
        "--family",
        "categorical",
        "--dim",
        "3",
        "--radius",
        "2",
        "--epsilon",
        "0.01",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((c["zeta"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert_eq!(c["kappa"], 2.0);
    assert_eq!(c["M_eps"], 1.0);

    let o = efseg(&[
        "constants",
        "--family",
        "exponential",
        "--lower",
        "-4",
        "--upper",
        "-0.5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((c["zeta"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((c["kappa"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}
