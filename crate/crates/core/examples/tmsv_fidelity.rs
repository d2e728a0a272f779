//! Fidelity between the returns with and without a target, checked against
//! the truncated Fock-basis evaluation.

use qtr_bounds::fock::{fock_fidelity_oracle, DEFAULT_CUTOFF};
use qtr_bounds::gaussian::{background_output_state, gaussian_fidelity, target_output_state};

fn main() -> qtr_bounds::Result<()> {
    let (eta, n_b) = (0.1, 0.5);
    println!("{:>8} {:>18} {:>18} {:>10}", "n_s", "closed form", "fock", "deficit");
    for n_s in [1e-3, 1e-2, 5e-2, 0.1] {
        let target = target_output_state(eta, n_b, n_s)?;
        let background = background_output_state(n_b, n_s)?;
        let closed = gaussian_fidelity(&target, &background)?;
        let fock = fock_fidelity_oracle(&target, &background, DEFAULT_CUTOFF)?;
        println!("{n_s:>8} {closed:>18.14} {:>18.14} {:>10.2e}", fock.value, fock.trace_deficit);
    }
    Ok(())
}
