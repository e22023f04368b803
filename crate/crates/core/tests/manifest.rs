use relint::oracle::{parse_manifest, run_case};

#[test]
fn recorded_cases_hold() {
    let cases = parse_manifest(include_str!("data/cases.manifest")).expect("manifest parses");
    assert!(cases.len() >= 20);
    let mut failed = Vec::new();
    for case in &cases {
        let failures = run_case(case).unwrap_or_else(|e| panic!("{case}: {e}"));
        for f in failures {
            failed.push(format!("{case}: expected {:?}, observed {}", f.check, f.observed));
        }
    }
    assert!(failed.is_empty(), "{}", failed.join("\n"));
}
