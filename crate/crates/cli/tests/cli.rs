//! End-to-end checks of the command-line binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onebit-mimo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onebit-mimo"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit status {:?}, stderr: {}",
        output.status,
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("utf8 output")
}

#[test]
fn ktable_emits_known_counts() {
    let out = stdout(&run(&["ktable", "--max-nr", "4", "--max-nt", "4"]));
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "nr,nt,k,log2_k");
    assert!(out.lines().any(|l| l.starts_with("3,2,52,")));
    assert!(out.lines().any(|l| l.starts_with("1,3,4,2")));
    assert!(out.lines().any(|l| l.starts_with("4,4,256,8")));
}

#[test]
fn sweep_is_bit_identical_across_runs() {
    let args = [
        "sweep",
        "--nr",
        "2",
        "--nt",
        "2",
        "--snr-db",
        "-5:5:5",
        "--trials",
        "2",
        "--seed",
        "11",
        "--strategies",
        "upper_bound,convex_opt,aqnm",
    ];
    let first = stdout(&run(&args));
    let second = stdout(&run(&args));
    assert_eq!(first, second);
    assert!(first.starts_with("snr_db,strategy,mean_rate_bits,stderr_bits,trials,seed\n"));
    assert_eq!(first.lines().count(), 1 + 3 * 3);
}

#[test]
fn sweep_independent_of_worker_count() {
    let args = [
        "sweep",
        "--nr",
        "2",
        "--nt",
        "2",
        "--snr-db",
        "0:10:10",
        "--trials",
        "4",
        "--seed",
        "21",
        "--strategies",
        "upper_bound,convex_opt_ba",
    ];
    let serial = stdout(&run_with_threads(&args, "1"));
    let parallel = stdout(&run_with_threads(&args, "4"));
    assert_eq!(serial, parallel);
}

#[test]
fn sweep_marks_inapplicable_strategies() {
    let out = run(&[
        "sweep",
        "--nr",
        "3",
        "--nt",
        "2",
        "--snr-db",
        "0",
        "--trials",
        "1",
        "--seed",
        "3",
        "--strategies",
        "channel_inversion,upper_bound",
    ]);
    let text = stdout(&out);
    let skipped: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("0,channel_inversion"))
        .collect();
    assert_eq!(skipped, ["0,channel_inversion,skipped,skipped,1,3"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped"));
}

#[test]
fn sweep_accepts_json_config() {
    let dir = std::env::temp_dir().join("onebit_mimo_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.json");
    std::fs::write(
        &path,
        r#"{
            "channel": {"model": {"kind": "iid_gaussian", "nr": 2, "nt": 2}, "seed": 11},
            "snr_db": [-5.0, 0.0, 5.0],
            "strategies": ["upper_bound", "convex_opt", "aqnm"],
            "trials": 2,
            "seed": 11
        }"#,
    )
    .unwrap();
    let from_config = stdout(&run(&["sweep", "--config", path.to_str().unwrap()]));
    let from_flags = stdout(&run(&[
        "sweep",
        "--nr",
        "2",
        "--nt",
        "2",
        "--snr-db",
        "-5:5:5",
        "--trials",
        "2",
        "--seed",
        "11",
        "--strategies",
        "upper_bound,convex_opt,aqnm",
    ]));
    assert_eq!(from_config, from_flags);
}

#[test]
fn sweep_rejects_unknown_strategy() {
    let out = run(&[
        "sweep",
        "--nr",
        "2",
        "--nt",
        "2",
        "--snr-db",
        "0",
        "--strategies",
        "upper_bound,nope",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("strategies[1]"));
}

#[test]
fn constellation_dump_for_mimo_channel() {
    let out = stdout(&run(&[
        "constellation",
        "--nr",
        "2",
        "--nt",
        "2",
        "--snr-db",
        "15",
        "--seed",
        "5",
    ]));
    let parsed: serde_json::Value = serde_json::from_str(&out).expect("valid JSON");
    assert_eq!(parsed["kind"], "max_margin");
    assert_eq!(parsed["m"], 16);
    assert_eq!(parsed["symbols_re"].as_array().unwrap().len(), 16);
    assert_eq!(parsed["probabilities"].as_array().unwrap().len(), 16);
    assert!(parsed["d_min"].as_f64().unwrap() > 0.0);
    assert_eq!(parsed["channel"]["nr"], 2);
}

#[test]
fn constellation_dump_for_miso_channel_has_four_symbols() {
    let out = stdout(&run(&[
        "constellation",
        "--nr",
        "1",
        "--nt",
        "2",
        "--snr-db",
        "10",
        "--seed",
        "2",
    ]));
    let parsed: serde_json::Value = serde_json::from_str(&out).expect("valid JSON");
    assert_eq!(parsed["kind"], "max_margin");
    assert_eq!(parsed["m"], 4);
}

#[test]
fn constellation_dump_for_simo_channel() {
    // Fixed scalar channel: the grid capacity must track the closed form.
    let dir = std::env::temp_dir().join("onebit_mimo_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("siso.json");
    std::fs::write(&path, r#"{"nr":1,"nt":1,"re":[[1.0]],"im":[[0.0]]}"#).unwrap();
    let out = stdout(&run(&[
        "constellation",
        "--channel-json",
        path.to_str().unwrap(),
        "--snr-db",
        "10",
        "--grid-n",
        "24",
    ]));
    let parsed: serde_json::Value = serde_json::from_str(&out).expect("valid JSON");
    assert_eq!(parsed["kind"], "simo_grid");
    let capacity = parsed["capacity_bits"].as_f64().unwrap();
    let exact = 2.0 * (1.0 - onebit_mimo::binary_entropy(onebit_mimo::q_func(10f64.sqrt())).unwrap());
    assert!((capacity - exact).abs() < 0.05, "capacity {capacity} vs {exact}");
}

#[test]
fn simo_capacity_table() {
    let out = stdout(&run(&["simo-capacity", "--max-nr", "8"]));
    assert!(out.starts_with("nr,lower_bits,capacity_bits,upper_bits,p0_star\n"));
    assert_eq!(out.lines().count(), 9);
    // Row 1: capacity exactly 2 bits.
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let capacity: f64 = row[2].parse().unwrap();
    assert!((capacity - 2.0).abs() < 1e-6);
}

#[test]
fn constellation_dump_for_mmwave_channel() {
    // Two paths through 2x2 / 4x4 arrays: the kept-pattern count is the
    // orthant count K(4, 2) = 128.
    let out = stdout(&run(&[
        "constellation",
        "--paths",
        "2",
        "--rx-array",
        "2x2",
        "--tx-array",
        "4x4",
        "--snr-db",
        "40",
        "--seed",
        "13",
    ]));
    let parsed: serde_json::Value = serde_json::from_str(&out).expect("valid JSON");
    assert_eq!(parsed["kind"], "max_margin");
    assert_eq!(parsed["m"], 128);
    assert_eq!(parsed["channel"]["nt"], 16);
}

#[test]
fn mmwave_sweep_runs() {
    let out = stdout(&run(&[
        "mmwave",
        "--rx-array",
        "2x2",
        "--tx-array",
        "4x4",
        "--paths",
        "1",
        "--snr-db",
        "20",
        "--trials",
        "1",
        "--seed",
        "9",
        "--strategies",
        "upper_bound,convex_opt",
    ]));
    assert!(out.starts_with("snr_db,strategy,mean_rate_bits,stderr_bits,trials,seed\n"));
    assert_eq!(out.lines().count(), 3);
    // Single-path channels are rank one, so inversion would be skipped; the
    // selected strategies must both produce numbers.
    for line in out.lines().skip(1) {
        assert!(!line.contains("skipped"), "{line}");
    }
}
