//! Runs every acceptance criterion once and prints one verdict line per criterion.
//! A criterion passes only when its checks hold and it finishes inside its budget.
//! Lines go straight to stdout so they survive the harness's output capture.

use std::io::Write;
use std::time::Instant;

use laurent_sieve_cli::config::DEFAULT_SEED;
use laurent_sieve_cli::suite::{SuiteOptions, CRITERIA};

#[test]
fn acceptance() {
    let opts = SuiteOptions { seed: DEFAULT_SEED };
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for c in CRITERIA {
        let start = Instant::now();
        let result = (c.run)(&opts);
        let secs = start.elapsed().as_secs_f64();
        let (ok, why) = match &result {
            Ok(check) if !check.pass => (false, format!(" detail={}", check.detail)),
            Ok(_) if secs > c.budget_secs as f64 => (false, " over budget".to_string()),
            Ok(_) => (true, String::new()),
            Err(e) => (false, format!(" error={e}")),
        };
        writeln!(out, "criterion {:02} {}: {} ({secs:.1}s, budget {}s){why}", c.id, c.slug, if ok { "PASS" } else { "FAIL" }, c.budget_secs).unwrap();
        if !ok {
            failed.push(c.name());
        }
    }
    writeln!(out, "acceptance: {}/{} criteria pass", CRITERIA.len() - failed.len(), CRITERIA.len()).unwrap();
    assert_eq!(CRITERIA.len(), 14);
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
