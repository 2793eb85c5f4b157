use ietlang::corpus::{list, load_example, Provenance};

#[test]
fn every_fixture_meets_its_expectations() {
    let mut failures = Vec::new();
    for name in list().unwrap() {
        let fixture = load_example(&name).unwrap();
        for outcome in fixture.check_all() {
            println!("{name:22} {outcome}");
            if !outcome.passed {
                failures.push(format!("{name}: {outcome}"));
            }
        }
    }
    assert!(failures.is_empty(), "failed expectations:\n{}", failures.join("\n"));
}

#[test]
fn corpus_has_the_named_examples() {
    let names = list().unwrap();
    for want in [
        "sturmian",
        "fake-sturmian",
        "skew-sturmian",
        "skew-sturmian-split",
        "exaf",
        "mon-fibonacci",
        "no-order-7words",
        "weak-demo",
        "ttrok-fibonacci",
        "two-loops",
    ] {
        assert!(names.iter().any(|n| n == want), "{want} missing");
    }
}

#[test]
fn every_expectation_records_its_provenance() {
    for name in list().unwrap() {
        let f = load_example(&name).unwrap();
        assert!(!f.expected.is_empty(), "{name} has no expectations");
        let literature = f.expected.iter().filter(|e| e.provenance == Provenance::Literature).count();
        assert!(literature <= f.expected.len());
    }
}

#[test]
fn unknown_names_are_rejected() {
    assert!(matches!(load_example("no-such-example"), Err(ietlang::corpus::CorpusError::UnknownExample(_))));
    assert!(matches!(load_example("../Cargo"), Err(ietlang::corpus::CorpusError::UnknownExample(_))));
}

#[test]
fn wrong_schema_is_reported() {
    let text = r#"{"schema": 2, "name": "x", "description": "", "alphabet": ["1"], "words": ["1"], "depth": 1, "expected": []}"#;
    assert!(matches!(
        ietlang::corpus::parse_fixture("x", text),
        Err(ietlang::corpus::CorpusError::Schema { found: 2, .. })
    ));
}
