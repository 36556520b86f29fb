use std::collections::BTreeSet;
use std::process::{Command, Output};

use clap::CommandFactory;
use rootsum::cli::Cli;

fn rootsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rootsum"))
        .args(args)
        .env_remove("ROOTSUM_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = rootsum(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn field(text: &str, key: &str) -> String {
    let prefix = format!("{key}: ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

fn leading_f64(s: &str) -> f64 {
    s.split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn floor_sum_examples() {
    assert_eq!(stdout(&["floor-sum", "--n", "7", "--m", "2"]), "11\n");
    let both = stdout(&["floor-sum", "--n", "30", "--m", "3", "--special"]);
    assert_eq!(field(&both, "total"), "57");
    assert_eq!(field(&both, "special"), "57");
    let checked = stdout(&["floor-sum", "--n", "1e6", "--m", "4", "--check"]);
    assert_eq!(field(&checked, "check"), "match");
}

#[test]
fn exit_codes() {
    assert_eq!(rootsum(&["floor-sum", "--n", "0", "--m", "2"]).status.code(), Some(2));
    assert_eq!(rootsum(&["floor-sum", "--n", "5", "--m", "1"]).status.code(), Some(2));
    assert_eq!(rootsum(&["floor-sum", "--n", "abc", "--m", "2"]).status.code(), Some(2));
    assert_eq!(rootsum(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(rootsum(&["zeta", "--m", "2", "--precision", "32"]).status.code(), Some(2));
    assert_eq!(rootsum(&["frac-sum", "--n", "1e9", "--m", "2"]).status.code(), Some(2));
    assert_eq!(
        rootsum(&["frac-sum", "--n", "1e3", "--m", "2", "--budget", "100"]).status.code(),
        Some(2)
    );
    // terms of the expansion grow at n = 2 with twelve corrections
    assert_eq!(rootsum(&["zeta", "--m", "2", "--n", "2", "--p", "12"]).status.code(), Some(2));
}

#[test]
fn consistency_errors_map_to_exit_three() {
    use rootsum::cli::CliError;
    let e = CliError::from(rootsum_core::Error::Consistency("x".into()));
    assert_eq!(e.exit_code(), 3);
    let e = CliError::from(rootsum_core::Error::InvalidArgument("x".into()));
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn malformed_expansion_file_is_usage_error() {
    let dir = std::env::temp_dir().join(format!("rootsum-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("zero-den.json");
    std::fs::write(
        &path,
        r#"{"m":2,"p":1,"terms":[{"num":2,"den":3,"exp_num":3,"exp_den":2},{"num":1,"den":2,"exp_num":1,"exp_den":2},{"num":1,"den":0,"exp_num":-1,"exp_den":2}],"zeta_arg_num":-1,"zeta_arg_den":2}"#,
    )
    .unwrap();
    let out = rootsum(&["expansion", "--load", path.to_str().unwrap(), "--eval", "10"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn frac_sum_examples() {
    let v = stdout(&["frac-sum", "--n", "10", "--m", "2", "--mode", "oracle"]);
    assert!((leading_f64(&v) - 3.46827819).abs() < 5e-9, "{v}");
    assert_eq!(stdout(&["frac-sum", "--n", "1", "--m", "2", "--mode", "oracle"]), "0\n");
    let both = stdout(&["frac-sum", "--n", "1e6", "--m", "2", "--p", "2", "--mode", "both"]);
    assert_eq!(field(&both, "within_bound"), "true");
    let residual = leading_f64(&field(&both, "residual")).abs();
    // printed residual digits are rounded, so compare against twice the term
    assert!(residual <= 2.0 * leading_f64(&field(&both, "first_omitted")), "{both}");
}

#[test]
fn zeta_example() {
    let out = stdout(&["zeta", "--m", "2"]);
    assert!(field(&out, "value").starts_with("-0.207886224977"), "{out}");
    assert!(leading_f64(&field(&out, "error_bound")) < 1e-30);
    let est = stdout(&["zeta", "--m", "2", "--n", "1e4", "--p", "3"]);
    assert!(field(&est, "value").starts_with("-0.207886224977"));
}

#[test]
fn equidist_example() {
    let out = stdout(&["equidist", "--m", "2", "--n", "1000000", "--bins", "10"]);
    assert!(leading_f64(&field(&out, "max_deviation")) < 5e-3, "{out}");
    let single = stdout(&["equidist", "--m", "2", "--n", "100", "--bins", "1"]);
    assert_eq!(field(&single, "max_deviation_exact"), "0");
}

#[test]
fn residuals_example_and_csv_schema() {
    let csv = stdout(&["residuals", "--m", "2", "--p", "1", "--ns", "1e3,1e4,1e5,1e6", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,reference,predicted,residual,slope,flag"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.len() == 6 && r[5] == "ok"));
    let last_slope: f64 = rows[3][4].parse().unwrap();
    assert!((last_slope + 2.5).abs() < 0.05, "{csv}");
    let plain = stdout(&["residuals", "--m", "2", "--p", "1", "--ns", "1e3,1e4,1e5,1e6"]);
    assert!((leading_f64(&field(&plain, "slope")) + 2.5).abs() < 0.05);
}

#[test]
fn json_output_parses() {
    let out = stdout(&["oracle", "--n", "10", "--m", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["floor_sum"], serde_json::json!(19));
    let table = stdout(&["y-seq", "--lo", "1", "--hi", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&table).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn expansion_file_round_trip() {
    let json = stdout(&["expansion", "--m", "3", "--p", "4"]);
    let dir = std::env::temp_dir().join(format!("rootsum-exp-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("m3p4.json");
    std::fs::write(&path, &json).unwrap();
    let loaded = stdout(&["expansion", "--load", path.to_str().unwrap(), "--eval", "1e5"]);
    let built = stdout(&["expansion", "--m", "3", "--p", "4", "--eval", "1e5"]);
    assert_eq!(loaded, built);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn precision_env_and_flag() {
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_rootsum"));
        c.args(args).env_remove("ROOTSUM_PRECISION");
        if let Some(p) = env {
            c.env("ROOTSUM_PRECISION", p);
        }
        String::from_utf8(c.output().unwrap().stdout).unwrap()
    };
    let default = run(None, &["root", "--k", "2", "--m", "2"]);
    let env = run(Some("64"), &["root", "--k", "2", "--m", "2"]);
    let flag = run(Some("64"), &["root", "--k", "2", "--m", "2", "--precision", "128"]);
    assert_ne!(default, env);
    assert_eq!(default, flag);
    assert!(field(&env, "value").len() < field(&default, "value").len());
}

#[test]
fn identical_invocations_are_byte_identical() {
    let cases: [&[&str]; 4] = [
        &["residuals", "--m", "3", "--p", "1", "--ns", "1e3,5e4,2e5", "--format", "csv"],
        &["frac-sum", "--n", "123456", "--m", "5", "--format", "json"],
        &["xsq-check", "--nmax", "200", "--all"],
        &["equidist", "--m", "4", "--n", "50000", "--bins", "7", "--mean"],
    ];
    for args in cases {
        assert_eq!(rootsum(args).stdout, rootsum(args).stdout, "{args:?}");
    }
}

/// One invocation per library operation, keyed by the operation name.
const COVERAGE: &[(&str, &[&str])] = &[
    ("integer_nth_root", &["root", "--k", "18446744073709551616", "--m", "3"]),
    ("bernoulli", &["bernoulli", "--k", "4"]),
    ("bernoulli_table", &["bernoulli", "--k", "12", "--table"]),
    ("faulhaber_sum", &["faulhaber", "--n", "10", "--m", "3"]),
    ("floor_sqrt_sum", &["floor-sum", "--n", "1000", "--m", "2", "--special"]),
    ("floor_root_sum", &["floor-sum", "--n", "1000", "--m", "6"]),
    ("floor_root_sum_special", &["floor-sum", "--n", "1000", "--m", "5", "--special"]),
    ("binom_rational", &["binom", "--alpha", "-2/3", "--j", "4"]),
    ("binom_half_closed_form", &["binom", "--alpha", "1/2", "--j", "5"]),
    ("em_correction_coeff", &["coeff", "--m", "3", "--k", "2"]),
    ("em_coeff_sqrt_paperform", &["coeff", "--m", "2", "--k", "3"]),
    ("build_power_sum_expansion", &["expansion", "--m", "4", "--p", "3"]),
    ("build_sqrt_expansion_closed_form", &["expansion", "--m", "2", "--p", "3", "--sqrt-closed-form"]),
    ("hp_root", &["root", "--k", "10", "--m", "2"]),
    ("frac_part", &["root", "--k", "10", "--m", "3"]),
    ("eval_expansion", &["expansion", "--m", "2", "--p", "2", "--eval", "1000"]),
    ("estimate_zeta_neg_inv", &["zeta", "--m", "3", "--n", "1e4", "--p", "3"]),
    ("zeta_neg_inv", &["zeta", "--m", "2"]),
    ("brute_floor_sum", &["oracle", "--n", "1e12", "--m", "3", "--floor-only"]),
    ("brute_frac_sum", &["frac-sum", "--n", "1000", "--m", "2", "--mode", "oracle"]),
    ("oracle_sums", &["oracle", "--n", "1000", "--m", "3"]),
    ("count_frac_below", &["count-below", "--side", "10", "--x", "1"]),
    ("frac_sum_expansion", &["frac-sum", "--n", "1000", "--m", "3", "--mode", "expansion"]),
    ("sqrt_frac_sum_expansion", &["frac-sum", "--n", "1000", "--m", "2", "--sqrt-closed-form"]),
    ("residual_table", &["residuals", "--m", "2", "--p", "2", "--ns", "1e3,1e4"]),
    ("y_sequence", &["y-seq", "--lo", "1", "--hi", "20"]),
    ("extrema_scan", &["extrema", "--lo", "1", "--hi", "1000"]),
    ("equidist_stats", &["equidist", "--m", "3", "--n", "1e4", "--bins", "5"]),
    ("frac_mean", &["equidist", "--m", "2", "--n", "1e4", "--mean"]),
    ("xsq_constant_check", &["xsq-check", "--nmax", "100"]),
];

#[test]
fn every_operation_is_reachable() {
    for (op, args) in COVERAGE {
        let out = rootsum(args);
        assert!(
            out.status.success() && !out.stdout.is_empty(),
            "{op} via {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let exercised: BTreeSet<&str> = COVERAGE.iter().map(|(_, a)| a[0]).collect();
    let cmd = Cli::command();
    let defined: BTreeSet<&str> = cmd.get_subcommands().map(|c| c.get_name()).collect();
    assert_eq!(exercised, defined);
}

#[test]
fn sample_outputs() {
    assert_eq!(stdout(&["bernoulli", "--k", "4"]), "-1/30\n");
    assert_eq!(stdout(&["faulhaber", "--n", "10", "--m", "2"]), "385\n");
    let r = stdout(&["root", "--k", "18446744073709551616", "--m", "3"]);
    assert_eq!(field(&r, "floor"), "2642245");
    let c = stdout(&["coeff", "--m", "2", "--k", "2"]);
    assert_eq!(field(&c, "coeff"), "-1/1920");
    assert_eq!(field(&c, "exponent"), "-5/2");
    assert_eq!(field(&c, "sqrt_form_agrees"), "true");
    let b = stdout(&["binom", "--alpha", "1/3", "--j", "2"]);
    assert_eq!(b, "-1/9\n");
    let count = stdout(&["count-below", "--side", "10", "--x", "1"]);
    assert_eq!(field(&count, "printed_formula"), "108");
    assert_eq!(field(&count, "direct_open"), "90");
    assert_eq!(field(&count, "ceil_formula"), "99");
    let ext = stdout(&["extrema", "--lo", "1", "--hi", "5000"]);
    assert_eq!(field(&ext, "minima_match_prediction"), "true");
    assert_eq!(field(&ext, "positives_match_prediction"), "true");
}
