//! Shared helpers for the CLI test targets.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Output;

use assert_cmd::Command;

pub fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn run(args: &[&str]) -> Output {
    Command::cargo_bin("macroscope")
        .expect("binary builds")
        .args(args)
        .output()
        .expect("binary runs")
}

/// Every golden case: (golden file, argv).
pub fn golden_cases() -> Vec<(&'static str, Vec<String>)> {
    vec![
        (
            "affinity_three_cycle.json",
            vec!["affinity".into(), fixture("three_cycle.json")],
        ),
        (
            "affinity_reversible_walk.json",
            vec!["affinity".into(), fixture("reversible_walk.json")],
        ),
        (
            "sigma_flip_T3.json",
            vec![
                "sigma".into(),
                fixture("reversible_flip.json"),
                "--rho".into(),
                "uniform".into(),
                "--T".into(),
                "3".into(),
            ],
        ),
        (
            "sigma_three_cycle_T1.json",
            vec![
                "sigma".into(),
                fixture("three_cycle.json"),
                "--rho".into(),
                "uniform".into(),
                "--T".into(),
                "1".into(),
            ],
        ),
        (
            "dpi_three_cycle_merge12.json",
            vec![
                "dpi".into(),
                fixture("three_cycle.json"),
                "--lens".into(),
                fixture("lens_merge12.json"),
                "--T".into(),
                "2".into(),
            ],
        ),
        (
            "defect_two_pair_slow.json",
            vec![
                "defect".into(),
                fixture("two_pair_slow.json"),
                "--lens".into(),
                fixture("lens_pairs.json"),
                "--tau".into(),
                "1".into(),
            ],
        ),
        (
            "protocol_unbiased_T3.json",
            vec![
                "protocol-audit".into(),
                fixture("protocol_unbiased.json"),
                "--T".into(),
                "3".into(),
                "--tol-row-sum".into(),
                "1e-5".into(),
            ],
        ),
        (
            "protocol_biased_T2.json",
            vec![
                "protocol-audit".into(),
                fixture("protocol_biased.json"),
                "--T".into(),
                "2".into(),
                "--tol-row-sum".into(),
                "1e-5".into(),
            ],
        ),
        (
            "strobe_k0_k1_T2.json",
            vec![
                "strobe".into(),
                fixture("k0.json"),
                fixture("k1.json"),
                "--T".into(),
                "2".into(),
                "--tol-row-sum".into(),
                "1e-5".into(),
            ],
        ),
        (
            "gate_three_cycle_12.json",
            vec![
                "gate".into(),
                fixture("three_cycle.json"),
                "--delete".into(),
                "1-2".into(),
            ],
        ),
        (
            "gap_reversible_walk.json",
            vec!["gap".into(), fixture("reversible_walk.json")],
        ),
        (
            "forcing_16_4.json",
            vec![
                "forcing".into(),
                "--n".into(),
                "16".into(),
                "--k".into(),
                "4".into(),
                "--mc".into(),
                "100000".into(),
                "--seed".into(),
                "1".into(),
            ],
        ),
        (
            "icap_identity_signals.json",
            vec![
                "icap".into(),
                fixture("bridge_identity.json"),
                "--signals".into(),
                fixture("signals_small.json"),
            ],
        ),
        (
            "icap_delay_fuzz.json",
            vec![
                "icap".into(),
                fixture("bridge_delay.json"),
                "--fuzz".into(),
                "10".into(),
                "--seed".into(),
                "7".into(),
            ],
        ),
        (
            "zeno_harmonic.json",
            vec!["zeno".into(), fixture("schedule_harmonic.json")],
        ),
        (
            "zeno_geometric.json",
            vec!["zeno".into(), fixture("schedule_geometric.json")],
        ),
        (
            "zeno_table.json",
            vec!["zeno".into(), fixture("schedule_table.json")],
        ),
        (
            "zeno_vanishing_theta.json",
            vec!["zeno".into(), fixture("schedule_vanishing_theta.json")],
        ),
        (
            "route_commuting.json",
            vec!["route".into(), fixture("route_commuting.json")],
        ),
        (
            "route_noisy.json",
            vec!["route".into(), fixture("route_noisy.json")],
        ),
    ]
}
