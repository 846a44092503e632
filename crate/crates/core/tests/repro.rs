use subposet_core::repro;
use subposet_core::SearchOptions;

#[test]
fn reproduction_suite_passes() {
    let outcomes = repro::run_all(&SearchOptions::default());
    assert_eq!(outcomes.len(), repro::list().len());
    for o in &outcomes {
        assert!(o.passed, "check {} ({}) failed: {}", o.id, o.name, o.detail);
    }
}

#[test]
fn filtering_by_id() {
    let outcomes = repro::run(&[1, 3], &SearchOptions::default());
    let ids: Vec<u32> = outcomes.iter().map(|o| o.id).collect();
    assert_eq!(ids, [1, 3]);
}
