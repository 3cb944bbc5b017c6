use std::path::PathBuf;
use std::process::{Command, Output};

use deltascat::classifier::ThresholdReport;
use deltascat::cli::{from_json, to_json};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deltascat"))
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("deltascat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], config: Option<&PathBuf>) -> Output {
    let mut c = bin();
    c.args(args);
    if let Some(p) = config {
        c.arg("--config").arg(p);
    }
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn classify_examples() {
    let cases = [
        (r#"{"alpha":[0],"points":[[0,0]]}"#, "Case1", None),
        (r#"{"alpha":[0,0],"points":[[-0.5,0],[0.5,0]]}"#, "Case3", Some("p-wave")),
        (r#"{"alpha":[1,-1],"points":[[-0.5,0],[0.5,0]]}"#, "Case2", Some("s-wave")),
    ];
    for (i, (input, label, kind)) in cases.iter().enumerate() {
        let cfg = write_config(&format!("classify{i}.json"), input);
        let o = run(&["classify"], Some(&cfg));
        assert_eq!(o.status.code(), Some(0));
        let report: ThresholdReport = from_json(&stdout(&o)).unwrap();
        assert_eq!(format!("{}", report.case_label), *label);
        match kind {
            None => {
                assert!(report.resonances.is_empty());
                assert!(stdout(&o).contains("bounded for all 1<p<infinity"));
            }
            Some(k) => assert!(stdout(&o).contains(&format!("\"kind\": \"{k}\""))),
        }
    }
}

#[test]
fn report_round_trips_byte_for_byte() {
    let cfg = write_config("triple.json", r#"{"alpha":[-0.11031780007632579,0,-0.11031780007632579],"points":[[-1,0],[0,0],[1,0]]}"#);
    let text = stdout(&run(&["classify"], Some(&cfg)));
    let back: ThresholdReport = from_json(&text).unwrap();
    assert_eq!(to_json(&back).unwrap(), text);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let cfg = write_config("pair.json", r#"{"alpha":[0.2,-0.4],"points":[[-0.5,0.1],[0.5,0]],"options":{"grid":"log:1e-6:1e-3:8"}}"#);
    for cmd in ["classify", "expansion", "resolvent", "spectrum"] {
        let a = run(&[cmd], Some(&cfg));
        let b = bin().arg(cmd).arg("--config").arg(&cfg).env("DELTASCAT_THREADS", "1").output().unwrap();
        assert_eq!(a.status.code(), Some(0), "{cmd}");
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn spectrum_examples() {
    let one = write_config("one.json", r#"{"alpha":[0],"points":[[0,0]]}"#);
    let o = run(&["spectrum"], Some(&one));
    let text = stdout(&o);
    assert!(text.starts_with("kappa,energy,det_residual\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    assert!((rows[0][1] + 1.2609471).abs() < 1e-6);

    let o = run(&["spectrum", "--grid", "log:10:20:2"], Some(&one));
    assert_eq!(o.status.code(), Some(0));
    assert!(csv_rows(&stdout(&o)).is_empty());

    let pair = write_config("sym.json", r#"{"alpha":[-0.3,-0.3],"points":[[-0.5,0],[0.5,0]]}"#);
    let rows = csv_rows(&stdout(&run(&["spectrum"], Some(&pair))));
    assert!(!rows.is_empty() && rows.len() <= 2);
    assert!(rows.iter().all(|r| r[2] < 1e-10));
}

#[test]
fn floats_have_seventeen_digits() {
    let one = write_config("digits.json", r#"{"alpha":[0],"points":[[0,0]]}"#);
    let text = stdout(&run(&["spectrum"], Some(&one)));
    for field in text.lines().nth(1).unwrap().split(',') {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
    }
}

#[test]
fn expansion_on_p_wave_pair() {
    let cfg = write_config("expansion.json", r#"{"alpha":[0,0],"points":[[-0.5,0],[0.5,0]]}"#);
    let text = stdout(&run(&["expansion"], Some(&cfg)));
    assert!(text.starts_with("lambda,value_re,value_im,residual,fitted_order\n"));
    let order = csv_rows(&text)[0][4];
    assert!((order - 2.0).abs() < 0.3, "{order}");
}

#[test]
fn decay_ratio_plateaus() {
    let o = run(&["decay", "--eps", "1", "--grid", "log:10:1e4:12"], None);
    let rows = csv_rows(&stdout(&o));
    let ratios: Vec<f64> = rows.iter().map(|r| r[3]).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    assert!(hi / lo < 1.5, "{ratios:?}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bogus"], None).status.code(), Some(2));
    assert_eq!(run(&["classify"], None).status.code(), Some(2));
    let bad = write_config("bad.json", r#"{"alpha":[0,1],"points":[[0,0]]}"#);
    let o = run(&["classify"], Some(&bad));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("\"exit_code\":2"));
    let garbled = write_config("garbled.json", "{\"alpha\": [0");
    assert_eq!(run(&["spectrum"], Some(&garbled)).status.code(), Some(2));
    let one = write_config("tol.json", r#"{"alpha":[0],"points":[[0,0]]}"#);
    assert_eq!(run(&["classify", "--tol", "2"], Some(&one)).status.code(), Some(2));
    assert_eq!(run(&["waveop", "--p", "0.5"], Some(&one)).status.code(), Some(2));
    // three points never give Case4: a numerical failure, not an input error
    let o = bin().args(["search-case4"]).arg("--config").arg(write_config("n3.json", r#"{"alpha":[],"points":[],"options":{"n_points":3}}"#)).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn search_output_is_a_valid_config() {
    let out = std::env::temp_dir().join(format!("deltascat-case4-{}.json", std::process::id()));
    let o = bin().args(["search-case4", "--seed", "7", "--out"]).arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let report = stdout(&run(&["classify"], Some(&out)));
    assert!(report.contains("\"case_label\": \"Case4\""));
}
