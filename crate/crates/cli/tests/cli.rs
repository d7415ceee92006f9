use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use roughsupport::report::CombBelowReport;

fn roughsupport(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roughsupport")).args(args).output().expect("binary runs")
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn density_interval_corners() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = roughsupport(&["density-interval", "--grid", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, "a1,a2,p");
    assert_eq!(rows.len(), 4);
    let at = |a1: f64, a2: f64| rows.iter().find(|r| r[0] == a1 && r[1] == a2).unwrap()[2];
    assert_eq!(at(0.0, 0.0), 0.0);
    assert_eq!(at(-1.0, 1.0), 1.0);
}

#[test]
fn density_circle_is_interior_and_peaks_near_the_symmetric_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pt.csv");
    let o = roughsupport(&["density-circle", "--grid", "41", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, "theta1,theta2,p_T");
    let pi = std::f64::consts::PI;
    assert!(rows.iter().all(|r| r[0] > 0.0 && r[0] < pi && r[1] > 0.0 && r[1] < pi && r[0] + r[1] > pi));
    let best = rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    let theta = [best[0], best[1], 2.0 * pi - best[0] - best[1]];
    let cell = pi / 40.0;
    let near = (0..3).any(|k| {
        let img = [theta[k], theta[(k + 1) % 3], theta[(k + 2) % 3]];
        (img[0] - pi).abs() <= 1.5 * cell && (img[1] - pi / 2.0).abs() <= 1.5 * cell
    });
    assert!(near, "argmax {theta:?}");
    // the density vanishes at the corners, where one gap closes
    let corner = rows
        .iter()
        .filter(|r| [r[0], r[1], 2.0 * pi - r[0] - r[1]].iter().any(|&t| t < 1.5 * cell))
        .map(|r| r[2])
        .fold(0.0, f64::max);
    assert!(corner < 0.2 * best[2], "{corner}");
}

#[test]
fn pstar_beam_and_hoop() {
    let o = roughsupport(&["pstar", "beam", "--mu", "0,0.5"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "mu,p_star");
    assert_eq!(lines[1], "0.0,1.0");
    let half: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((half - 0.252315).abs() < 1e-6);

    let o = roughsupport(&["pstar", "hoop", "--steps", "10"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        if v[0] >= 0.5 {
            assert_eq!(v[1], 0.0, "{line}");
        }
    }
}

#[test]
fn mc_is_reproducible_and_counts_add_up() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = roughsupport(&[
            "mc",
            "interval",
            "--teeth",
            "100",
            "--trials",
            "5000",
            "--bins",
            "5",
            "--seed",
            "17",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let (header, rows) = csv_rows(&a);
    assert_eq!(header, "bin_lo_1,bin_hi_1,bin_lo_2,bin_hi_2,count,empirical_density,analytic_density");
    let counts: f64 = rows.iter().map(|r| r[4]).sum();

    let manifest = fs::read_to_string(a.with_extension("json")).unwrap();
    let parsed = roughsupport::montecarlo::RunManifest::from_json(&manifest).unwrap();
    assert_eq!(parsed.master_seed, 17);
    assert_eq!(parsed.config.trials, 5000);
    assert!(parsed.fit.is_some());
    assert_eq!(counts as u64, 5000 - parsed.degenerate_count.unwrap());
    assert_eq!(fs::read_to_string(b.with_extension("json")).unwrap(), manifest);
}

#[test]
fn mc_circle_with_other_heights() {
    let o = roughsupport(&[
        "mc",
        "circle",
        "--teeth",
        "61",
        "--trials",
        "2000",
        "--bins",
        "6",
        "--dist",
        "triangular:0.3",
        "--placement",
        "random",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 37);
}

#[test]
fn comb_below_line_and_plane() {
    let o = roughsupport(&[
        "comb-below",
        "line",
        "--support",
        "-0.5,0.5",
        "--gaps",
        "1,1",
        "--teeth",
        "400",
        "--trials",
        "5000",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let report: CombBelowReport = serde_json::from_str(&text).unwrap();
    assert!(report.case_one);
    assert!(report.z.abs() < 4.0, "{report:?}");

    let o = roughsupport(&[
        "comb-below",
        "plane",
        "--phi",
        "0.3,2.4,4.4",
        "--gaps",
        "1,0.5,2",
        "--teeth",
        "400",
        "--trials",
        "5000",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: CombBelowReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report.surface, "plane");
    assert!(report.z.abs() < 4.0, "{report:?}");
}

#[test]
fn robustness_table() {
    let o = roughsupport(&[
        "robustness",
        "--teeth",
        "100",
        "--trials",
        "2000",
        "--bins",
        "5",
        "--variant",
        "uniform",
        "--variant",
        "beta:2,2@random",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\"beta:2,2@random\""));
    assert!(text.contains("\"pairwise\""));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["density-interval", "--grid", "1"][..],
        &["pstar", "beam", "--mu", "1.5"],
        &["mc", "interval", "--dist", "beta:0,1"],
        &["mc", "interval", "--placement", "sideways"],
        &["mc", "interval", "--trials", "0"],
        &["comb-below", "line", "--support", "-0.5,0.5", "--gaps", "1"],
        &["comb-below", "plane", "--phi", "0,0.5,1", "--gaps", "1,1,1"],
        &["verify", "--criteria", "16"],
        &["no-such-command"],
    ] {
        let o = roughsupport(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn unwritable_output_exits_with_one() {
    let o = roughsupport(&["density-interval", "--grid", "3", "--out", "/nonexistent/dir/p.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_catches_a_tampered_density() {
    let o = roughsupport(&["verify", "--criteria", "1,2,9", "--tamper-density"]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[FAIL]")).count(), 3, "{text}");
}

#[test]
fn verify_fast_passes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("outcomes.json");
    let o = roughsupport(&["verify", "--profile", "fast", "--json", json.to_str().unwrap()]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with('[')).count(), 15);
    assert!(text.lines().filter(|l| l.starts_with("[INFO]")).count() == 2);
    let outcomes = fs::read_to_string(json).unwrap();
    assert!(outcomes.contains("\"informational\": true"));
}
