//! Sweep from a spec file's text and write CSV to stdout.

use std::io;

use qtr_bounds::grid::parse_sweep_spec;
use qtr_bounds::scenario::{sweep, write_csv};

const SPEC: &str = "\
# bins, modes and photon numbers
m = 2, 4, 8
M = log(100, 1e6, 5)
n_s = 0.01
eta = 0.1
n_b = 0.5, 5
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = parse_sweep_spec(SPEC.lines())?;
    let rows = sweep(&spec)?;
    write_csv(&rows, &mut io::stdout().lock())?;
    Ok(())
}
