//! Every acceptance criterion at its stated scale, one line each.
//!
//! Runs without the libtest harness so the lines are printed even when everything passes.

use std::time::{Duration, Instant};

use kzmodp::suite::{run_criterion, SuiteConfig, CRITERIA};

fn budget(id: u32) -> Duration {
    let secs = match id {
        1 => 1,
        2 => 30,
        3 => 300,
        4 => 10,
        5 => 30,
        6 => 60,
        7 => 300,
        8 => 60,
        9 => 300,
        10 => 30,
        _ => 0,
    };
    Duration::from_secs(secs)
}

fn main() {
    let cfg = SuiteConfig::default();
    let mut failed = Vec::new();
    for &(id, name) in CRITERIA.iter() {
        let started = Instant::now();
        let report = run_criterion(id, &cfg);
        let elapsed = started.elapsed();
        let in_time = elapsed <= budget(id);
        let ok = report.passed && in_time;
        println!(
            "criterion {id:>2} {}: {name} ({} checks, {:.2}s of {}s)",
            if ok { "PASS" } else { "FAIL" },
            report.checks,
            elapsed.as_secs_f64(),
            budget(id).as_secs()
        );
        for note in &report.notes {
            println!("    note: {note}");
        }
        for f in &report.failures {
            println!("    failure: {f}");
        }
        if !ok {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", CRITERIA.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
