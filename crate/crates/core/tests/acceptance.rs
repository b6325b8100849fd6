//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, followed by the
//! rows behind it. Exits nonzero only for failures outside the documented gaps.
//!
//! `QDE_CRITERIA=1,4,9` restricts the run.

use qde_core::config::RunConfig;
use qde_core::verify;

fn main() {
    let cfg = RunConfig::default();
    let ids: Vec<u32> = match std::env::var("QDE_CRITERIA") {
        Ok(s) => s.split(',').filter_map(|t| t.trim().parse().ok()).collect(),
        Err(_) => verify::CRITERIA.to_vec(),
    };
    let mut unexpected = 0;
    let mut failed = 0;
    for id in ids {
        let r = verify::run(id, &cfg);
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {} ({:.1} s)", r.id, r.title, r.elapsed.as_secs_f64());
        for row in &r.rows {
            let mark = if row.pass { "ok  " } else { "FAIL" };
            println!("    {mark} {} :: {} [{}]", row.name, row.detail, row.anchor);
            if let Some(why) = &row.known_gap {
                println!("         known gap: {why}");
            }
        }
        if !r.pass {
            failed += 1;
        }
        unexpected += r.unexpected_failures().count();
    }
    println!("{failed} criteria failed; {unexpected} failing rows outside the documented gaps");
    if unexpected > 0 {
        std::process::exit(1);
    }
}
