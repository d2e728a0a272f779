//! Range bins with round-trip delays, and the energy each transmitter spends.

use qtr_bounds::{build_range_bins, energy_accounting, RangeGrid, ScenarioParams};

fn main() -> qtr_bounds::Result<()> {
    for bin in build_range_bins(&RangeGrid { r_min: 1000.0, r_max: 5000.0, m: 8 })? {
        println!(
            "bin {:>2}: {:>7.1} m .. {:>7.1} m, delay {:.4} us",
            bin.index,
            bin.r_lo,
            bin.r_hi,
            bin.round_trip_delay * 1e6
        );
    }
    let e = energy_accounting(&ScenarioParams::new(8, 10_000, 1e-3, 0.1, 1.0)?);
    println!("\n{e:#?}");
    Ok(())
}
