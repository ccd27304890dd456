use std::path::Path;
use std::process::{Command, Output};

use npure_cli::problem::{CheckKind, CheckSpec, Int, NamedSubmodule, PolicySpec, ProblemDescription, RingSpec};
use npure_core::Ring;
use proptest::prelude::*;

fn npure(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npure"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("machine report is JSON")
}

const Z4: &str = r#"{"ring":"Z/4","ambient_rank":1,"relations":[[4]],
    "submodules":[{"name":"N","generators":[[2]]}],
    "checks":[{"check":"pure","submodule":"N"},{"check":"n-pure","submodule":"N","level":2}]}"#;

#[test]
fn check_reports_failures_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "z4.json", Z4);
    let out = npure(&["check", &file, "--format", "machine"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["command"], "check");
    assert_eq!(r["inputs-digest"].as_str().unwrap().len(), 64);
    assert_eq!(r["verdicts"][0]["outcome"], "fails");
    assert_eq!(r["verdicts"][0]["witness"]["ideals"][0], "(2)");
    assert_eq!(r["verdicts"][1]["outcome"], "holds");
    assert!(r["timing"].is_null());
    assert_eq!(r["violations"].as_array().unwrap().len(), 0);

    let text = npure(&["check", &file]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("pure(N)") && text.contains("fails"), "{text}");
}

#[test]
fn exit_codes_for_holds_unknown_and_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let holds = write(
        dir.path(),
        "holds.json",
        r#"{"ring":"Z/4","ambient_rank":1,"relations":[[4]],"submodules":[{"name":"N","generators":[[2]]}],"checks":[{"check":"n-pure","submodule":"N"}]}"#,
    );
    assert_eq!(npure(&["check", &holds]).status.code(), Some(0));
    // the global level overrides the default of 2
    assert_eq!(npure(&["check", &holds, "--n", "1"]).status.code(), Some(1));

    let unknown = write(
        dir.path(),
        "unknown.json",
        r#"{"ring":"Z","ambient_rank":1,"submodules":[{"name":"N","generators":[[3]]}],"checks":[{"check":"n-pure","submodule":"N"}]}"#,
    );
    let out = npure(&["check", &unknown, "--policy", "bounded:2", "--format", "machine"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdicts"][0]["bound"], 2);
    // 2 ∈ bounded:8 exposes the failure, and failure beats unknown
    assert_eq!(
        npure(&["check", &unknown, "--policy", "bounded:8"]).status.code(),
        Some(1)
    );

    let bad = write(dir.path(), "bad.json", r#"{"ring":"Q","ambient_rank":1}"#);
    for args in [
        vec!["check", bad.as_str()],
        vec!["check", "/nonexistent/problem.json"],
        vec!["check", holds.as_str(), "--policy", "sometimes"],
        vec!["scan", "no-such-claim"],
        vec!["scan", "hierarchy", "--family", "cubes:8"],
        vec!["mine", "no-such-pattern"],
        vec!["frobnicate"],
        vec!["check", holds.as_str(), "--bogus"],
    ] {
        let out = npure(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    assert_eq!(npure(&["--help"]).status.code(), Some(0));
}

#[test]
fn scan_mine_enumerate_and_maximal_pure() {
    let out = npure(&["scan", "hierarchy", "--family", "cyclic:24", "--format", "machine"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdicts"][0]["outcome"], "holds");

    let out = npure(&[
        "scan",
        "hereditary",
        "--family",
        "pairs:32",
        "--levels",
        "2",
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    let v = &r["violations"][0];
    assert_eq!(v["claim"], "hereditary");
    assert_eq!(v["level"], 2);

    let out = npure(&[
        "mine",
        "n-pure-not-(n-1)-pure",
        "--family",
        "cyclic:16",
        "--n",
        "3",
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let found = json(&out)["verdicts"][0]["result"].clone();
    assert!(found
        .as_array()
        .unwrap()
        .iter()
        .any(|s| s.as_str().unwrap().starts_with("span{(2)} in Z/8 ")));

    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "v.json",
        r#"{"ring":"Z/2","ambient_rank":2,"relations":[[2,0],[0,2]],"submodules":[{"name":"L","generators":[[1,0]]}]}"#,
    );
    let out = npure(&["enumerate", &file, "--format", "machine"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdicts"][0]["result"].as_array().unwrap().len(), 5);

    // over a field every subspace is pure: the maximal proper ones are the three lines
    let out = npure(&["maximal-pure", &file, "--format", "machine"]);
    assert_eq!(json(&out)["verdicts"][0]["result"].as_array().unwrap().len(), 3);
    let out = npure(&[
        "maximal-pure",
        &file,
        "--submodule",
        "L",
        "--include-self",
        "--format",
        "machine",
    ]);
    // nothing lies strictly between 0 and the line, so both count
    let result = json(&out)["verdicts"][0]["result"].clone();
    let result: Vec<&str> = result.as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert_eq!(result.len(), 2);
    assert!(result.contains(&"span{(1,0), (0,2)}"), "{result:?}");
    let out = npure(&["maximal-pure", &file, "--submodule", "Q"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn timing_flag_and_stable_digests() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", Z4);
    let reformatted = serde_json::to_string_pretty(&serde_json::from_str::<serde_json::Value>(Z4).unwrap()).unwrap();
    let b = write(dir.path(), "b.json", &reformatted);
    let ra = json(&npure(&["check", &a, "--format", "machine"]));
    let rb = json(&npure(&["check", &b, "--format", "machine"]));
    assert_eq!(ra["inputs-digest"], rb["inputs-digest"]);
    let rc = json(&npure(&["check", &a, "--format", "machine", "--policy", "exhaustive"]));
    assert_ne!(ra["inputs-digest"], rc["inputs-digest"]);
    let timed = json(&npure(&["check", &a, "--format", "machine", "--timing"]));
    assert!(timed["timing"]["elapsed_ms"].as_f64().unwrap() >= 0.0);
}

fn int() -> impl Strategy<Value = Int> {
    prop_oneof![
        (-1000i64..1000).prop_map(Int::from),
        "[1-9][0-9]{19,30}".prop_map(|s| Int(s.parse().unwrap())),
    ]
}

fn check_spec() -> impl Strategy<Value = CheckSpec> {
    let kinds = [
        CheckKind::Pure,
        CheckKind::NPure,
        CheckKind::FullyNPure,
        CheckKind::PidFactorization,
        CheckKind::CoprimeProduct,
        CheckKind::MaximalPure,
    ];
    let policy = prop_oneof![
        Just(PolicySpec::Exhaustive),
        Just(PolicySpec::Residue(None)),
        (1u64..100).prop_map(|e| PolicySpec::Residue(Some(e))),
        (1u64..100).prop_map(PolicySpec::Bounded),
    ];
    (
        prop::sample::select(kinds.to_vec()),
        prop::option::of("[A-Za-z]{1,4}"),
        prop::option::of(1u32..6),
        prop::option::of(policy),
        prop::option::of(prop::collection::vec((2u64..8, 1u32..3), 1..3)),
        prop::option::of((2u64..30, 2u64..30)),
        prop::option::of(any::<bool>()),
    )
        .prop_map(|(kind, sub, level, policy, pp, factors, include_self)| {
            let mut c = CheckSpec::new(kind);
            c.submodule = sub;
            c.level = level;
            c.policy = policy;
            c.prime_powers = pp;
            c.factors = factors;
            c.include_self = include_self;
            c
        })
}

fn problem() -> impl Strategy<Value = ProblemDescription> {
    (
        1usize..=3,
        prop_oneof![
            Just(Ring::Integers),
            (2u64..100).prop_map(|m| Ring::modular(m).unwrap())
        ],
    )
        .prop_flat_map(|(k, ring)| {
            let row = move || prop::collection::vec(int(), k);
            let named = ("[a-z]{1,3}", prop::collection::vec(row(), 0..3))
                .prop_map(|(name, generators)| NamedSubmodule { name, generators });
            (
                prop::collection::vec(row(), 0..3),
                prop::collection::vec(named, 0..3),
                prop::collection::vec(check_spec(), 0..4),
            )
                .prop_map(move |(relations, submodules, checks)| ProblemDescription {
                    ring: RingSpec(ring),
                    ambient_rank: k,
                    relations,
                    submodules,
                    checks,
                })
        })
}

proptest! {
    #[test]
    fn problem_descriptions_round_trip(p in problem()) {
        let text = p.to_json();
        prop_assert_eq!(ProblemDescription::parse(&text).unwrap(), p.clone());
        let pretty = serde_json::to_string_pretty(&p).unwrap();
        prop_assert_eq!(ProblemDescription::parse(&pretty).unwrap(), p);
    }
}
