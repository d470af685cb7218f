//! Full verification battery; one line of output per criterion. Runs
//! sequentially in a single test so the shared character-sum histograms are
//! computed once.

use asw_core::acceptance::run_all;

#[test]
fn acceptance_battery() {
    let reports = run_all();
    for r in &reports {
        println!("{r}");
    }
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    assert!(
        failed.is_empty(),
        "failing criteria: {}",
        failed
            .iter()
            .map(|r| format!("{} ({}): {}", r.index, r.name, r.detail))
            .collect::<Vec<_>>()
            .join("; ")
    );
}
