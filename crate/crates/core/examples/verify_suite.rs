//! The default verification suite with a reduced Monte-Carlo budget.

use fracheat::verify::{default_suite, roll_up, SuiteConfig};

fn main() -> fracheat::Result<()> {
    let cfg = SuiteConfig { mc_samples: 100_000, ..SuiteConfig::default() };
    let reports = default_suite(&cfg)?;
    for r in &reports {
        println!("{:<6} {}", if r.passed { "pass" } else { "FAIL" }, r.name);
        for note in r.notes.iter().chain(r.children.iter().flat_map(|c| &c.notes)).filter(|n| n.starts_with("failed")) {
            println!("       {note}");
        }
    }
    println!("all passed: {}", roll_up(&reports));
    Ok(())
}
