//! Runs one suite at a chosen size and prints the first few failures.
//!
//! `cargo run --release -p monodromic-core --example stress -- blocks 300 6 [seed]`

use monodromic::{run_suite, GeneratorConfig, SuiteName};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let name: SuiteName = args[1].parse().unwrap();
    let cases: usize = args[2].parse().unwrap();
    let max_dim: usize = args[3].parse().unwrap();
    let seed: u64 = args.get(4).map_or(0, |s| s.parse().unwrap());
    let cfg = GeneratorConfig { seed, case_count: cases, max_dim, ..GeneratorConfig::default() };
    let r = run_suite(name, &cfg).unwrap();
    println!("{name}: {}/{} in {:.0} ms", r.passed, r.results.len(), r.wall_time_ms);
    for f in r.failures().take(3) {
        println!("  {} #{}: {}", f.suite, f.index, f.message.as_deref().unwrap_or(""));
    }
}
