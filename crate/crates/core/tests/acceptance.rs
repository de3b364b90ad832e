//! Every acceptance criterion, one summary line each. Criterion 9 is
//! optional and reported without gating.

use eqsteenrod::selftest::Selftest;

#[test]
fn acceptance_criteria() {
    let mut suite = Selftest::new().expect("selftest state");
    let mut gating_failures = Vec::new();
    for n in 1..=9 {
        let report = suite.run(n).unwrap_or_else(|e| panic!("criterion {n} errored: {e}"));
        println!("{}", report.line());
        for c in report.failures().iter().take(5) {
            println!("    failed: {} ({})", c.label, c.detail);
        }
        for s in &report.suites {
            for skipped in &s.skipped {
                println!("    skipped [{} on {}]: {skipped}", s.suite, s.fixture);
            }
        }
        if !report.passed && !report.optional {
            gating_failures.push(n);
        }
    }
    assert!(gating_failures.is_empty(), "failing criteria: {gating_failures:?}");
}
