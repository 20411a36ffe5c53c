use std::io::Write;
use std::process::{Command, Stdio};

use proptest::prelude::*;
use serde_json::Value;
use subsys_cli::{run, Outcome, SystemFile, EXIT_PARSE, EXIT_UNCERTIFIED};

fn exec(args: &[&str]) -> Outcome {
    run(args, &mut std::io::empty())
}

fn exec_stdin(args: &[&str], input: &str) -> Outcome {
    run(args, &mut input.as_bytes())
}

fn json(args: &[&str]) -> Value {
    let mut a = vec!["--json"];
    a.extend_from_slice(args);
    let out = exec(&a);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn temp_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn defect_denominator_divides_three(v: &str) {
    let den: i64 = v.split_once('/').map_or(1, |(_, d)| d.parse().unwrap());
    assert_eq!(3 % den, 0, "defect {v}");
}

#[test]
fn catalog_build_piped_into_defect_gives_two() {
    let bin = env!("CARGO_BIN_EXE_subsys");
    let built = Command::new(bin).args(["catalog", "build", "gp4:S(2k+1,2).k=1"]).output().unwrap();
    assert!(built.status.success());
    let mut child = Command::new(bin)
        .args(["defect", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&built.stdout).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "defect 2"), "{text}");
    assert!(text.contains("source gp4:S(2k+1,2).k=1"));
}

#[test]
fn json_report_of_a_system_file_can_be_piped() {
    let built = exec(&["--json", "catalog", "build", "gp4:S(2k+1,-2).k=2"]);
    let v: Value = serde_json::from_str(&exec_stdin(&["--json", "defect", "-"], &built.stdout).stdout).unwrap();
    assert_eq!(v["result"]["defect"], "-2");
    assert_eq!(v["result"]["source"], "gp4:S(2k+1,-2).k=2");
}

#[test]
fn region_at_one_half_is_minus_two_thirds() {
    let v = json(&["toeplitz", "regions", "--alpha", "1/2"]);
    assert_eq!(v["result"][0]["defect"], "-2/3");
    let text = exec(&["toeplitz", "regions", "--alpha", "1/2"]).stdout;
    assert!(text.contains("alpha 1/2 defect -2/3"));
}

#[test]
fn example_two_decomposes_into_two_components() {
    let file = temp_file(&exec(&["catalog", "build", "example:2"]).stdout);
    let v = json(&["decompose", file.path().to_str().unwrap(), "--seed", "3"]);
    assert_eq!(v["seed"], 3);
    let comps = v["result"]["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    for c in comps {
        assert_eq!(c["status"], "indecomposable");
        assert_eq!(c["ambient_dim"], 1);
    }
}

#[test]
fn reports_are_deterministic_for_a_fixed_seed() {
    let file = temp_file(&exec(&["catalog", "build", "example:7"]).stdout);
    let path = file.path().to_str().unwrap();
    let a = exec(&["--json", "decompose", path, "--seed", "11"]);
    let b = exec(&["--json", "decompose", path, "--seed", "11"]);
    assert_eq!(a, b);
    let args = ["--json", "verify", "two-types", "--count", "20", "--seed", "5"];
    assert_eq!(exec(&args), exec(&args));
}

#[test]
fn defects_in_reports_have_denominator_dividing_three() {
    let alphas = ["1/2", "-1/2", "3", "2+2i", "1/2+1/2i", "1/2i", "-2", "1/3"];
    let mut args = vec!["toeplitz", "regions", "--alpha"];
    args.extend_from_slice(&alphas);
    for item in json(&args)["result"].as_array().unwrap() {
        defect_denominator_divides_three(item["defect"].as_str().unwrap());
    }
    for key in ["gp4:S(2k,-1).k=1.i=2", "gp4:S(2k+1,0).k=1.i=1.j=3", "gp4:S(2k,0;l).k=2.l=2"] {
        let built = exec(&["catalog", "build", key]);
        let out = exec_stdin(&["--json", "defect", "-"], &built.stdout);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        defect_denominator_divides_three(v["result"]["defect"].as_str().unwrap());
        defect_denominator_divides_three(v["result"]["quasi"].as_str().unwrap());
    }
}

#[test]
fn coxeter_plus_preserves_the_defect() {
    let built = exec(&["catalog", "build", "gp4:S(2k,1).k=2.i=3"]);
    let file = temp_file(&built.stdout);
    let plus = exec(&["coxeter", "plus", file.path().to_str().unwrap()]);
    assert_eq!(plus.code, 0, "{}", plus.stderr);
    assert!(plus.stdout.contains("meta functor plus"));
    let before: Value = serde_json::from_str(&exec_stdin(&["--json", "defect", "-"], &built.stdout).stdout).unwrap();
    let after: Value = serde_json::from_str(&exec_stdin(&["--json", "defect", "-"], &plus.stdout).stdout).unwrap();
    assert_eq!(before["result"]["defect"], after["result"]["defect"]);
    let dual = json(&["coxeter", "duality", file.path().to_str().unwrap()]);
    assert_eq!(dual["result"]["passed"], true);
}

#[test]
fn isomorphism_verdicts() {
    let a = temp_file(&exec(&["catalog", "build", "gp4:S(2k,-1).k=1.i=1"]).stdout);
    let b = temp_file(&exec(&["catalog", "build", "gp4:S(2k,-1).k=1.i=2"]).stdout);
    let (pa, pb) = (a.path().to_str().unwrap(), b.path().to_str().unwrap());
    assert_eq!(json(&["isom", pa, pa])["result"]["verdict"], "isomorphic");
    assert_eq!(json(&["isom", pa, pb])["result"]["verdict"], "not-isomorphic");
}

#[test]
fn float_files_record_their_tolerance() {
    let text = "format_version 1\nfield complex-float\nambient_dim 1\nsubspace A\n  1e0\nsubspace B\n  1e0\nsubspace C\nsubspace D\n";
    let file = temp_file(text);
    let path = file.path().to_str().unwrap();
    let v = json(&["defect", path, "--tol", "1e-7"]);
    assert_eq!(v["tolerance"], 1e-7);
    assert_eq!(v["result"]["defect"], "0");
    let v = json(&["diagram", path]);
    assert_eq!(v["tolerance"], 1e-6);
    // Exact-only analyses refuse floating input.
    assert_eq!(exec(&["decompose", path]).code, EXIT_PARSE);
}

#[test]
fn tolerance_environment_override() {
    let bin = env!("CARGO_BIN_EXE_subsys");
    let out = Command::new(bin)
        .args(["--json", "toeplitz", "exotic", "--n", "4"])
        .env(subsys_cli::TOL_ENV, "1e-5")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tolerance"], 1e-5);
    let out = Command::new(bin).args(["toeplitz", "exotic", "--n", "4"]).env(subsys_cli::TOL_ENV, "tiny").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_PARSE));
}

#[test]
fn exit_statuses() {
    assert_eq!(exec(&["catalog", "build", "gp4:nonsense"]).code, EXIT_PARSE);
    assert_eq!(exec_stdin(&["defect", "-"], "format_version 1\nfield reals\n").code, EXIT_PARSE);
    assert_eq!(exec(&["toeplitz", "regions", "--alpha", "2"]).code, EXIT_PARSE);
    assert_eq!(exec(&["no-such-command"]).code, EXIT_PARSE);
    // det [[z,1],[1,1]] = z − 1 vanishes on the circle and the symbol is not triangular.
    let out = exec(&["toeplitz", "defect", "block=2; k:1=[[1,0],[0,0]]; k:0=[[0,1],[1,1]]"]);
    assert_eq!(out.code, EXIT_UNCERTIFIED, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("uncertified"));
}

#[test]
fn index_of_block_v() {
    let v = json(&["toeplitz", "index", "v:3"]);
    assert_eq!(v["result"]["index"], -3);
}

#[test]
fn verify_gp_range_agrees() {
    let v = json(&["verify", "gp-range", "--k-even", "2", "--k-odd", "2"]);
    let items = v["result"]["items"].as_array().unwrap();
    assert!(!items.is_empty());
    assert_eq!(v["result"]["agree"].as_u64().unwrap() as usize, items.len());
}

fn scalar() -> impl Strategy<Value = String> {
    (-4i64..=4, -3i64..=3, 1i64..=4).prop_map(|(a, b, d)| {
        let z = &subsys_core::GaussRat::gaussian(a, b) * &subsys_core::GaussRat::ratio(1, d);
        z.to_string()
    })
}

fn exact_file() -> impl Strategy<Value = String> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(d, n)| {
        proptest::collection::vec(proptest::collection::vec(proptest::collection::vec(scalar(), d), 0..=d), n)
            .prop_map(move |subs| {
                let mut s = format!("format_version 1\nfield gaussian-rational\nambient_dim {d}\nmeta note random\n");
                for (i, vecs) in subs.iter().enumerate() {
                    s += &format!("subspace V{i}\n");
                    for v in vecs {
                        s += &format!("  {}\n", v.join(" "));
                    }
                }
                s
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_files_round_trip_byte_for_byte(text in exact_file()) {
        let f: SystemFile = text.parse().unwrap();
        prop_assert_eq!(f.to_text(), text);
        let back: SystemFile = f.to_json().to_string().parse().unwrap();
        prop_assert_eq!(back, f);
    }
}
