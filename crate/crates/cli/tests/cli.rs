use std::path::Path;
use std::process::{Command, Output};

use moufang_core::birep::{canonical_lr, BirepSamples, Birepresentation};
use moufang_core::chart::LoopPoint;
use moufang_core::malcev::{Tensor3, TensorExport};
use moufang_core::suite::{Report, StructureFunctionsExport};
use serde_json::Value;

fn moufang(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moufang"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn report(out: &Output) -> Report {
    Report::from_json(&stdout(out)).expect("report json")
}

#[test]
fn quaternion_corollary_passes() {
    let out = moufang(&["verify", "--loop", "quaternion", "--checks", "corollary"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    for name in ["corollary.ss", "corollary.tt", "corollary.st"] {
        let c = r.find(name).unwrap();
        assert!(!c.expected_failure && c.max_residual <= 1e-10, "{c:?}");
    }
}

#[test]
fn octonion_corollary_expected_failure() {
    let out = moufang(&["verify", "--loop", "octonion", "--checks", "corollary"]);
    assert_eq!(code(&out), 0);
    let st = report(&out).find("corollary.st").cloned().unwrap();
    assert!(st.expected_failure);
    assert!(st.max_residual >= 0.5);
}

#[test]
fn octonion_derivative_suite() {
    let out = moufang(&[
        "verify",
        "--loop",
        "octonion",
        "--checks",
        "gle,lie-cartan,yamaguti,closure,dimension",
        "--samples",
        "10",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    for c in r.checks.iter().filter(|c| !c.expected_failure && c.name != "diff.jet-vs-fd") {
        assert!(c.max_residual <= 1e-8, "{c:?}");
    }
    assert!(r.find("diff.jet-vs-fd").unwrap().max_residual <= 1e-5);
}

#[test]
fn empty_check_list() {
    let out = moufang(&["verify", "--checks", "none"]);
    assert_eq!(code(&out), 0);
    assert!(report(&out).checks.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&moufang(&["verify", "--radius", "0.9"])), 2);
    assert_eq!(code(&moufang(&["verify", "--tol", "0"])), 2);
    assert_eq!(code(&moufang(&["verify", "--loop", "sedenion"])), 2);
    assert_eq!(code(&moufang(&["verify", "--checks", "bogus"])), 2);
    assert_eq!(code(&moufang(&["verify", "--config", "/nonexistent/cfg.json"])), 2);
    assert_eq!(code(&moufang(&["frobnicate"])), 2);
}

#[test]
fn check_failure_exits_1() {
    let out = moufang(&[
        "verify", "--loop", "octonion", "--checks", "gle", "--samples", "3", "--diff", "fd", "--tol", "1e-14",
    ]);
    assert_eq!(code(&out), 1);
    assert!(!report(&out).passed());
}

fn strip_wall_time(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("\"wall_time_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify", "--loop", "quaternion", "--checks", "moufang,malcev,birep", "--samples", "20", "--seed", "7"];
    let a = stdout(&moufang(&args));
    let b = stdout(&moufang(&args));
    assert_eq!(strip_wall_time(&a), strip_wall_time(&b));
    let other = stdout(&moufang(&[&args[..7], &["--seed", "8"]].concat()));
    assert_ne!(strip_wall_time(&a), strip_wall_time(&other));
}

#[test]
fn json_round_trips_through_generic_parser() {
    let out = moufang(&["verify", "--loop", "circle", "--checks", "moufang,birep", "--samples", "5"]);
    let text = stdout(&out);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::from_value::<Report>(v.clone()).unwrap(), report(&out));
    let rec = &v["checks"][0];
    for key in ["name", "samples", "max_residual", "mean_residual", "threshold", "verdict", "expected_failure"] {
        assert!(rec.get(key).is_some(), "{key}");
    }
    assert_eq!(v["meta"]["config"]["loop"], "circle");
    assert!(v["meta"]["versions"]["moufang-cli"].is_string());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"loop": "circle", "checks": ["birep"], "samples": 4, "format": "table"}"#).unwrap();
    let out = moufang(&["verify", "--config", cfg.to_str().unwrap(), "--format", "json", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r.meta.config.samples, 4);
    assert_eq!(r.meta.config.seed, 3);
    assert_eq!(r.checks[0].samples, 4);

    std::fs::write(&cfg, r#"{"radius": 2.0}"#).unwrap();
    assert_eq!(code(&moufang(&["verify", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn table_format_one_row_per_check() {
    let out = moufang(&["verify", "--loop", "quaternion", "--checks", "birep", "--samples", "4", "--format", "table"]);
    let text = stdout(&out);
    for name in ["birep.axioms", "birep.associativity", "birep.fault-injection"] {
        assert_eq!(text.lines().filter(|l| l.starts_with(name)).count(), 1, "{text}");
    }
}

#[test]
fn output_file_and_table_rendering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = moufang(&["verify", "--loop", "circle", "--checks", "moufang", "--samples", "4", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let rendered = stdout(&moufang(&["table", "--report", path.to_str().unwrap()]));
    assert!(rendered.contains("moufang.identity"));
    assert!(rendered.trim_end().ends_with("PASS"));
}

#[test]
fn export_mul_table_octonion() {
    let out = moufang(&["export", "mul-table", "--loop", "octonion"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 64);
    assert!(entries.iter().all(|e| e["sign"] == 1 || e["sign"] == -1));
}

#[test]
fn export_structure_constants_circle() {
    let out = moufang(&["export", "structure-constants", "--loop", "circle"]);
    assert_eq!(code(&out), 0);
    let e: TensorExport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(e.entries.is_empty());
}

#[test]
fn export_structure_functions_quaternion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cg.json");
    let out = moufang(&["export", "structure-functions", "--loop", "quaternion", "--at", "0.1,0,0", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let f: StructureFunctionsExport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(f.at, vec![0.1, 0.0, 0.0]);
    let c: TensorExport =
        serde_json::from_str(&stdout(&moufang(&["export", "structure-constants", "--loop", "quaternion"]))).unwrap();
    let cg = Tensor3::from_export(&TensorExport { r: f.r, entries: f.entries });
    assert!(cg.max_abs_diff(&Tensor3::from_export(&c)) <= 1e-9);
}

#[test]
fn export_errors_exit_2() {
    let out = moufang(&["export", "structure-functions", "--loop", "quaternion", "--at", "1.5,0,0"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("chart"));
    assert_eq!(code(&moufang(&["export", "structure-functions", "--loop", "quaternion", "--at", "-0.1,0"])), 2);
    assert_eq!(code(&moufang(&["export", "structure-functions", "--loop", "quaternion"])), 2);
}

#[test]
fn table_subcommand_levels() {
    let text = stdout(&moufang(&["table", "--level", "4"]));
    assert_eq!(text.lines().count(), 17);
    let text = stdout(&moufang(&["table", "--loop", "quaternion"]));
    assert!(text.lines().nth(2).unwrap().split_whitespace().eq(["e1", "+e1", "-1", "+e3", "-e2"]));
    assert_eq!(code(&moufang(&["table", "--level", "5"])), 2);
}

fn write_birep_table(path: &Path, corrupt: bool) {
    let b = canonical_lr(2).unwrap();
    let chart = *b.chart();
    let g = LoopPoint(vec![0.1, -0.05, 0.08]);
    let mut pts = vec![chart.identity()];
    for _ in 0..6 {
        let next = chart.mul(pts.last().unwrap(), &g).unwrap();
        pts.push(next);
    }
    let mut table = BirepSamples::tabulate(&b, &pts).unwrap();
    if corrupt {
        table.samples[3].t[0][1] += 1e-3;
    }
    std::fs::write(path, table.to_json()).unwrap();
}

#[test]
fn sampled_birep_file() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    write_birep_table(&good, false);
    write_birep_table(&bad, true);
    let base = ["verify", "--loop", "quaternion", "--checks", "none", "--birep-file"];

    let out = moufang(&[&base[..], &[good.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!(r.find("birep.sampled-left").unwrap().samples > 0);
    assert!(r.find("birep.sampled-unit").is_some());

    let out = moufang(&[&base[..], &[bad.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 1);

    let out = moufang(&["verify", "--loop", "octonion", "--checks", "none", "--birep-file", good.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}
