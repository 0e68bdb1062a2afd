//! Every example runs and prints what it advertises.

#[allow(dead_code)]
#[path = "../examples/classify_all.rs"]
mod classify_all;
#[allow(dead_code)]
#[path = "../examples/ideal_algorithm.rs"]
mod ideal_algorithm;
#[allow(dead_code)]
#[path = "../examples/nmr_readout.rs"]
mod nmr_readout;
#[allow(dead_code)]
#[path = "../examples/oracle_encoding.rs"]
mod oracle_encoding;
#[allow(dead_code)]
#[path = "../examples/pulse_compilation.rs"]
mod pulse_compilation;
#[allow(dead_code)]
#[path = "../examples/pulse_level_run.rs"]
mod pulse_level_run;

#[test]
fn oracle_encoding_lists_catalog() {
    let out = oracle_encoding::run().unwrap();
    assert_eq!(out.matches(" product").count(), 8);
    assert_eq!(out.matches(" entangling").count(), 8);
    assert!(out.contains(r#"{"index":9,"diagonal":[1,-1,-1,-1],"parity":"odd"}"#));
}

#[test]
fn ideal_algorithm_reports_overlap() {
    let out = ideal_algorithm::run().unwrap();
    assert!(out.contains("|<0b0000|0b0001>|^2 = 0.250000"), "{out}");
    assert!(out.contains("block signs +1 / -1"));
}

#[test]
fn nmr_readout_recovers_lines() {
    let out = nmr_readout::run().unwrap();
    assert!(out.contains("-153.050 Hz"));
    assert!(out.contains("-> odd"));
    assert!(out.contains("no lines above threshold"));
}

#[test]
fn pulse_compilation_verifies_everything() {
    let out = pulse_compilation::run().unwrap();
    assert!(out.contains("all 22 gates verified in both frames"));
    assert!(out.contains("frame flip true"));
    assert!(out.contains("81.9672 ms"));
}

#[test]
fn pulse_level_run_matches_ideal() {
    let out = pulse_level_run::run().unwrap();
    for line in out.lines() {
        let diff: f64 = line.rsplit("= ").next().unwrap().parse().unwrap();
        assert!(diff < 1e-9, "{line}");
    }
}

#[test]
fn classify_all_agrees() {
    assert!(classify_all::run().unwrap().ends_with("agreement 16/16\n"));
}
