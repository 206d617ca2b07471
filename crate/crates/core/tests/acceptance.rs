//! One pass/fail line per acceptance criterion. Tolerances are the pinned
//! defaults unless `PROJHULL_TOL_C<id>` overrides them.

use projhull::acceptance::{criteria, run_criterion};

const PINNED: [(usize, f64); 8] = [(1, 1e-2), (2, 1e-2), (3, 1e-10), (4, 1e-12), (5, 1e-9), (6, 1.2), (7, 0.6), (8, 1e-9)];

fn main() {
    let cs = criteria();
    let ids: Vec<(usize, f64)> = cs.iter().map(|c| (c.id, c.default_tolerance)).collect();
    assert_eq!(ids, PINNED, "default tolerances drifted");
    let mut failed = Vec::new();
    for c in &cs {
        let r = run_criterion(c);
        println!("{}", r.line());
        if !r.passed {
            failed.push(r.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", cs.len());
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
