use std::path::Path;
use std::process::{Command, Output};

use qphase_cli::grid::GridOutput;

fn qphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qphase")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

struct Csv {
    headers: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn parse_csv(text: &str) -> Csv {
    let mut headers = Vec::new();
    let mut lines = text.lines();
    let mut columns = Vec::new();
    for line in lines.by_ref() {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest.split_once('=').unwrap();
            headers.push((k.to_string(), v.to_string()));
        } else {
            columns = line.split(',').map(str::to_string).collect();
            break;
        }
    }
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    Csv { headers, columns, rows }
}

fn read_csv(path: &Path) -> Csv {
    parse_csv(&std::fs::read_to_string(path).unwrap())
}

fn grid_to(dir: &Path, name: &str, args: &[&str]) -> (Output, std::path::PathBuf) {
    let path = dir.join(name);
    let mut full = vec!["grid"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    (qphase(&full), path)
}

#[test]
fn csv_layout_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--dist", "wigner", "--n", "2", "--h", "1.6", "--np", "31", "--nx", "17"];
    let (a, pa) = grid_to(dir.path(), "a.csv", &args);
    let (b, pb) = grid_to(dir.path(), "b.csv", &args);
    assert!(a.status.success() && b.status.success());
    let bytes = std::fs::read(&pa).unwrap();
    assert_eq!(bytes, std::fs::read(&pb).unwrap());

    let csv = read_csv(&pa);
    assert_eq!(csv.columns, ["p", "x", "value"]);
    assert_eq!(csv.rows.len(), 31 * 17);
    // x varies fastest
    assert_eq!(csv.rows[0][0], csv.rows[16][0]);
    assert_eq!((csv.rows[0][1], csv.rows[16][1]), (-6.0, 6.0));
    let q = &csv.headers.iter().find(|(k, _)| k == "q").unwrap().1;
    let mantissa = q.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
    assert_eq!(q.parse::<f64>().unwrap(), (-0.5f64 * 1.6 * 1.6).exp());
}

#[test]
fn json_and_csv_agree() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--dist", "husimi", "--n", "1", "--h", "0.6", "--np", "21", "--nx", "11"];
    let (_, pc) = grid_to(dir.path(), "g.csv", &args);
    let mut json_args = args.to_vec();
    json_args.extend_from_slice(&["--format", "json"]);
    let (o, pj) = grid_to(dir.path(), "g.json", &json_args);
    assert!(o.status.success());
    let json: GridOutput = serde_json::from_str(&std::fs::read_to_string(pj).unwrap()).unwrap();
    let csv = read_csv(&pc);
    assert_eq!(json.meta.n, 1);
    assert_eq!(json.meta.h, 0.6);
    for (k, row) in csv.rows.iter().enumerate() {
        let (i, j) = (k / 11, k % 11);
        assert_eq!(row[0], json.p[i]);
        assert_eq!(row[1], json.x[j]);
        assert!((row[2] - json.values[i][j]).abs() <= 1e-15);
    }
}

#[test]
fn displaced_peak_of_first_excited_state() {
    let o = qphase(&["grid", "--dist", "wigner", "--n", "1", "--h", "0.6"]);
    assert!(o.status.success());
    let csv = parse_csv(&stdout(&o));
    assert_eq!(csv.rows.len(), 200 * 200);
    let best = csv.rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!(best[0] < 0.0 && best[1].abs() < 0.1, "peak at ({}, {})", best[0], best[1]);
}

#[test]
fn ground_state_ignores_deformation() {
    let a = parse_csv(&stdout(&qphase(&["grid", "--n", "0", "--h", "15", "--np", "41", "--nx", "41"])));
    let b = parse_csv(&stdout(&qphase(&["grid", "--n", "0", "--h", "0", "--np", "41", "--nx", "41"])));
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        assert!((ra[2] - rb[2]).abs() <= 1e-12);
    }
}

#[test]
fn husimi_values_are_bounded() {
    let o = qphase(&["grid", "--dist", "husimi", "--n", "2", "--h", "1.6", "--np", "60", "--nx", "60"]);
    let csv = parse_csv(&stdout(&o));
    let bound = 1.0 / std::f64::consts::PI;
    assert!(csv.rows.iter().all(|r| (0.0..=bound).contains(&r[2])));
}

#[test]
fn all_forms_report_their_spread() {
    let o = qphase(&["grid", "--form", "all", "--n", "3", "--h", "1.0", "--np", "15", "--nx", "15"]);
    assert!(o.status.success());
    let csv = parse_csv(&stdout(&o));
    assert_eq!(csv.columns, ["p", "x", "dsum", "hyper", "asc"]);
    let dev: f64 = csv.headers.iter().find(|(k, _)| k == "max_pairwise_deviation").unwrap().1.parse().unwrap();
    assert!(dev < 1e-9);
}

#[test]
fn moments_examples() {
    let out = stdout(&qphase(&["moments", "--n", "2", "--h", "1.6"]));
    assert!(out.contains("p_mean = -3.2"), "{out}");
    let out = stdout(&qphase(&["moments", "--n", "0", "--h", "5"]));
    assert!(out.contains("p_mean = 0\n") && out.contains("x_mean = 0\n"), "{out}");
    let out = stdout(&qphase(&["moments", "--n", "1", "--h", "0"]));
    assert!(out.contains("E = 1.5\n"), "{out}");
    let o = qphase(&["moments", "--n", "1", "--h", "1", "--oracle"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("p_mean_oracle = "));
}

#[test]
fn q_flag_converts_to_h() {
    let via_q = stdout(&qphase(&["moments", "--n", "2", "--q", "0.5"]));
    let h = (2.0 * 2f64.ln()).sqrt();
    let via_h = stdout(&qphase(&["moments", "--n", "2", "--h", &h.to_string()]));
    let p = |s: &str| -> f64 {
        s.lines().find_map(|l| l.strip_prefix("p_mean = ")).unwrap().parse().unwrap()
    };
    assert!((p(&via_q) - p(&via_h)).abs() < 1e-14);
}

#[test]
fn spectrum_lists_levels() {
    let out = stdout(&qphase(&["spectrum", "--n", "3", "--h", "0"]));
    assert!(out.contains("\n0,0.5,0.5\n") && out.contains("\n3,3.5,3.5\n"), "{out}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qphase(&["grid", "--h", "1", "--q", "0.5"]).status.code(), Some(2));
    assert_eq!(qphase(&["grid", "--np", "1"]).status.code(), Some(2));
    assert_eq!(qphase(&["grid", "--dist", "husimi", "--form", "asc"]).status.code(), Some(2));
    assert_eq!(qphase(&["grid", "--h", "-1"]).status.code(), Some(2));
    assert_eq!(qphase(&["bogus"]).status.code(), Some(2));
    assert_eq!(qphase(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn large_h_warns_about_window() {
    let o = qphase(&["grid", "--n", "1", "--h", "15", "--np", "3", "--nx", "3"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--pmin"));
}

#[test]
fn verify_passes_on_a_healthy_build() {
    let o = qphase(&["verify"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn trace_suite_covers_low_states() {
    let o = qphase(&["verify", "--suite", "trace"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.lines().any(|l| l.starts_with("ok") && l.contains("trace/quadrature (3,3)")));
    assert!(out.lines().filter(|l| l.contains("trace/")).count() >= 20);
}

#[test]
fn corrupted_normalization_is_caught() {
    let o = qphase(&["verify", "--suite", "orthonormality", "--corrupt-norm", "1.01"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL orthonormality/")));
}

#[test]
fn figure_regime_smoke() {
    for n in ["1", "2"] {
        for h in ["0", "0.6", "1", "1.6", "2.3", "15"] {
            for dist in ["wigner", "husimi"] {
                let o = qphase(&["grid", "--dist", dist, "--n", n, "--h", h, "--np", "40", "--nx", "40"]);
                assert!(o.status.success(), "n={n} h={h} {dist}: {}", String::from_utf8_lossy(&o.stderr));
            }
        }
    }
}
