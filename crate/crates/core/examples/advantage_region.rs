//! Where can the quantum conditional-nulling receiver beat the single-pulse
//! classical bound?

use qtr_bounds::{advantage_region_search, AdvantageGrid};

fn main() -> qtr_bounds::Result<()> {
    let gamma = vec![1e-3, 1e-2, 1e-1, 1.0, 10.0];
    let big_m = vec![1, 100, 10_000, 1_000_000];

    let dim = advantage_region_search(&AdvantageGrid {
        m: vec![2, 3, 4],
        n_b: vec![0.1, 0.3, 0.6, 0.9],
        big_m: big_m.clone(),
        gamma: gamma.clone(),
    })?;
    println!("dim background: {} of {} points satisfy the condition", dim.satisfying.len(), dim.grid_size);
    for p in dim.satisfying.iter().take(5) {
        println!("  m={} M={} gamma={} n_b={}: ln m = {:.3} <= {:.3}", p.m, p.big_m, p.gamma, p.n_b, p.ln_m, p.rhs);
    }

    let bright = advantage_region_search(&AdvantageGrid {
        m: (3..=64).collect(),
        n_b: vec![1.5, 2.0, 5.0, 10.0, 100.0],
        big_m,
        gamma,
    })?;
    println!(
        "bright background: {} of {} points satisfy the condition",
        bright.satisfying.len(),
        bright.grid_size
    );
    println!("{} ({})", bright.witness.statement, if bright.witness.holds { "holds" } else { "violated" });
    Ok(())
}
