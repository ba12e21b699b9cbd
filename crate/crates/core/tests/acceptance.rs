//! One PASS/FAIL line per acceptance criterion. The suite runs every
//! criterion, prints the report, then asserts on the results.

use gwcone_core::acceptance::{run_all, AcceptanceConfig};

#[test]
fn acceptance_suite() {
    let results = run_all(&AcceptanceConfig::default());
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed()).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
