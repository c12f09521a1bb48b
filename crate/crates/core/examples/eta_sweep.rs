//! A sweep across the critical exponent, driven by the shipped `configs/sweep.json`.

use fracheat::cli::{kernel_profile, parse_config, sweep, sweep_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = parse_config(include_str!("../configs/sweep.json"))?;
    let prof = kernel_profile(&cfg)?;
    print!("{}", sweep_csv(&sweep(&cfg, &prof)?));
    Ok(())
}
