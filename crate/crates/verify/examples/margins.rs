//! Prints the worst defect/tolerance ratio per check over a range of seeds;
//! useful when tuning sampling ranges or tolerances.

fn main() {
    let seeds: u64 = std::env::args().nth(1).and_then(|v| v.parse().ok()).unwrap_or(10);
    let mut worst: Vec<(String, f64)> = Vec::new();
    let mut failures = 0usize;
    for seed in 0..seeds {
        for r in nulfrac_verify::run_suite(seed, 1) {
            let margin = r.max_rel_defect / r.tolerance;
            if !r.passed {
                failures += 1;
            }
            match worst.iter_mut().find(|(id, _)| *id == r.id) {
                Some(e) => e.1 = e.1.max(margin),
                None => worst.push((r.id.clone(), margin)),
            }
        }
    }
    worst.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("{} seeds, {} failures", seeds, failures);
    for (id, m) in worst {
        println!("{:>24}: defect/tol = {:.3e}", id, m);
    }
}
