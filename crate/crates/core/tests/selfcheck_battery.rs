use cusim::selfcheck::run_all;

#[test]
fn battery_passes_for_several_seeds() {
    for seed in [1u64, 42, 2024] {
        let results = run_all(seed);
        assert!(!results.is_empty());
        for r in &results {
            assert!(r.passed, "seed {seed}: check '{}' failed: {}", r.name, r.detail);
        }
    }
}

#[test]
fn battery_reports_every_check_once() {
    let results = run_all(7);
    let mut names: Vec<&str> = results.iter().map(|r| r.name).collect();
    let total = names.len();
    names.sort_unstable();
    names.dedup();
    assert_eq!(names.len(), total, "duplicate check names");
}
