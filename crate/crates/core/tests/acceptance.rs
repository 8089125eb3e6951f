//! Runs every acceptance criterion at full size and prints one line each.

use twderham_core::acceptance::{run_all, Scale, DEFAULT_SEED};

#[test]
fn acceptance_criteria() {
    let seed = std::env::var("TWDERHAM_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED);
    let results = run_all(Scale::Full, seed);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.ok()).map(|r| r.id).collect();
    assert_eq!(results.len(), 10);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
