use std::path::PathBuf;
use std::process::Command as Process;

use eqsteenrod::fixtures;
use eqsteenrod_cli::commands::{Model, Suite, VerifyOptions};
use eqsteenrod_cli::problem::{self, ProblemFile};
use eqsteenrod_cli::{emit, run, CliError, Command, Format};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn load(name: &str) -> eqsteenrod::fixtures::Fixture {
    let file = problem::parse(&data(name)).unwrap();
    problem::build(&file, name).unwrap()
}

fn cohomology(max_degree: usize) -> Command {
    Command::Cohomology {
        max_degree,
        model: Model::Bredon,
    }
}

fn dims(report: &eqsteenrod_cli::Report) -> Vec<usize> {
    report.cohomology.iter().map(|d| d.dimension).collect()
}

#[test]
fn nerve_directive_gives_the_cohomology_of_bz3() {
    let fx = load("bz3_nerve.json");
    let report = run(&cohomology(3), &fx).unwrap();
    assert_eq!(dims(&report), vec![1, 1, 1, 1]);
    assert!(report.passed);
}

#[test]
fn first_reduced_power_of_the_degree_two_class_is_its_cube() {
    let fx = fixtures::bz3_constant(8).unwrap();
    let power = Command::Power {
        s: 1,
        beta: false,
        max_degree: 2,
        model: Model::Bredon,
    };
    let report = run(&power, &fx).unwrap();
    let row = report.operations.iter().find(|r| r.input.degree == 2).unwrap();
    let cups = run(
        &Command::Cup {
            max_degree: 6,
            model: Model::Bredon,
        },
        &fx,
    )
    .unwrap();
    let product = |a: i64, b: i64| {
        cups.cup_products
            .iter()
            .find(|r| r.left.degree == a && r.right.degree == b)
            .unwrap()
            .product
            .clone()
    };
    // y² = c·z for the basis class z of H^4, so y³ = c·(z·y)
    let c = product(2, 2).coords[0];
    let zy = product(4, 2);
    let cube: Vec<u32> = zy.coords.iter().map(|&v| v * c % 3).collect();
    assert_eq!(row.value.degree, 6);
    assert_eq!(row.value.coords, cube);
    assert!(cube.iter().any(|&v| v != 0));
}

#[test]
fn mu_suite_passes_on_the_f27_fixture() {
    let fx = fixtures::z2_on_bz3_f27(5).unwrap();
    let verify = Command::Verify(VerifyOptions {
        suite: Suite::Mu,
        max_degree: 4,
        max_s: 2,
        a: 1,
        b: 1,
        pairs: 100,
        seed: 3,
        lift: "cone-first".into(),
    });
    let report = run(&verify, &fx).unwrap();
    assert!(report.passed);
    assert!(report.suites[0].checks.len() > 10);
}

#[test]
fn builder_files_match_the_built_in_fixtures() {
    let pairs = [
        ("bz3_nerve.json", fixtures::bz3_constant(5).unwrap()),
        ("z2_on_bz3.json", fixtures::z2_on_bz3_constant(5).unwrap()),
        ("frobenius.json", fixtures::frobenius_bz3(5).unwrap()),
    ];
    for (file, fx) in pairs {
        assert_eq!(problem::export(&load(file)), problem::export(&fx), "{file}");
    }
}

#[test]
fn galois_file_has_the_cohomology_of_the_normal_basis() {
    let report = run(&cohomology(4), &load("frobenius.json")).unwrap();
    assert_eq!(dims(&report), vec![1, 0, 0, 0, 0]);
}

#[test]
fn explicit_files_round_trip() {
    for fx in fixtures::all_p3(3).unwrap() {
        let file = problem::export(&fx);
        let reparsed: ProblemFile = problem::parse_str(&problem::to_json(&file)).unwrap();
        assert_eq!(reparsed, file, "{}", fx.name);
        let rebuilt = problem::build(&reparsed, &fx.name).unwrap();
        assert_eq!(problem::export(&rebuilt), file, "{}", fx.name);
    }
    let circle = problem::parse(&data("circle.json")).unwrap();
    assert_eq!(problem::parse_str(&problem::to_json(&circle)).unwrap(), circle);
}

#[test]
fn explicit_circle() {
    let report = run(&cohomology(1), &load("circle.json")).unwrap();
    assert_eq!(dims(&report), vec![1, 1]);
}

#[test]
fn syntax_errors_are_located() {
    let err = problem::parse_str("{\n  \"prime\": 3,\n  \"space\": [\n}").unwrap_err();
    match err {
        CliError::Syntax { line, .. } => assert_eq!(line, 4),
        other => panic!("expected a syntax error, got {other:?}"),
    }
}

#[test]
fn missing_mult_row_is_a_schema_error_naming_the_element() {
    let file = problem::parse(&data("missing_row.json")).unwrap();
    let err = problem::build(&file, "missing_row").unwrap_err();
    assert_eq!(err.class(), "schema");
    assert!(err.to_string().contains("element `a`"), "{err}");
}

#[test]
fn broken_two_simplex_relation_is_a_validation_error_naming_the_simplex() {
    let file = problem::parse(&data("broken_relation.json")).unwrap();
    let err = problem::build(&file, "broken").unwrap_err();
    assert_eq!(err.class(), "validation");
    assert!(err.to_string().contains("simplex (2,0)"), "{err}");
}

#[test]
fn non_reduced_space_is_rejected() {
    let file = problem::parse_str(r#"{"prime": 2, "space": {"kind": "standard_simplex", "dim": 2}}"#).unwrap();
    let err = problem::build(&file, "delta2").unwrap_err();
    assert_eq!(err.class(), "validation");
    assert!(err.to_string().contains("one vertex"), "{err}");
}

#[test]
fn wrong_types_are_schema_errors() {
    let err = problem::parse_str(r#"{"prime": "three", "space": {"kind": "standard_simplex", "dim": 0}}"#).unwrap_err();
    assert_eq!(err.class(), "schema");
}

#[test]
fn insufficient_truncation_is_an_error() {
    let fx = fixtures::bz3_constant(5).unwrap();
    let power = Command::Power {
        s: 1,
        beta: false,
        max_degree: 3,
        model: Model::Bredon,
    };
    let err = run(&power, &fx).unwrap_err();
    assert_eq!(err.class(), "truncation");
    assert!(run(&cohomology(5), &fx).is_err());
}

#[test]
fn empty_tables_are_empty_arrays() {
    let report = run(&Command::Check, &fixtures::bz3_constant(2).unwrap()).unwrap();
    let json: serde_json::Value = serde_json::from_str(&emit(&report, Format::Json)).unwrap();
    for key in ["cohomology", "cup_products", "operations", "suites", "criteria"] {
        assert_eq!(json[key], serde_json::json!([]), "{key}");
    }
    assert_eq!(json["schema"], "eqsteenrod-report/1");
}

fn binary(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_eqsteenrod"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn structured_output_is_byte_identical_across_runs() {
    let path = data("z2_on_bz3.json");
    let runs: [&[&str]; 2] = [
        &["--format", "json", "verify", "--suite", "cartan", "--max-degree", "2", "--max-s", "1", "--fixture", "z2-on-bz3-constant"],
        &["--format", "json", "cup", "--max-degree", "4", "--input", path.to_str().unwrap()],
    ];
    for args in runs {
        let first = binary(args);
        let second = binary(args);
        assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
        assert!(!first.stdout.is_empty());
        assert_eq!(first.stdout, second.stdout);
    }
}

#[test]
fn exit_codes() {
    let ok = binary(&["cohomology", "--fixture", "bz3-constant", "--max-degree", "2"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = binary(&["check", "--input", data("broken_relation.json").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error[validation]"));
    let short = binary(&["cohomology", "--fixture", "bz3-constant", "--top-dim", "2", "--max-degree", "3"]);
    assert_eq!(short.status.code(), Some(2));
}

#[test]
fn export_output_parses_back() {
    let out = binary(&["export", "--fixture", "z2-on-bz3-f27", "--top-dim", "2"]);
    assert!(out.status.success());
    let file = problem::parse_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let fx = problem::build(&file, "exported").unwrap();
    assert_eq!(problem::export(&fx), file);
}

#[test]
fn selftest_runs_selected_criteria() {
    let report = eqsteenrod_cli::selftest(&[1, 2]).unwrap();
    assert_eq!(report.criteria.len(), 2);
    assert!(report.passed);
}
