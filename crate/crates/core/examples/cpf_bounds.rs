//! Every bound for a single ranging scenario, plus the exact quantum bound
//! converging to its asymptote as the per-mode signal shrinks.

use qtr_bounds::bounds::{quantum_cpf_upper_bound_exact, qtr_quantum_ub_asymptotic};
use qtr_bounds::gaussian::{background_output_state, gaussian_fidelity, target_output_state};
use qtr_bounds::{compare_all, ScenarioParams};

fn main() -> qtr_bounds::Result<()> {
    let report = compare_all(&ScenarioParams::new(4, 10_000, 0.01, 0.1, 2.0)?)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serialisable"));

    println!("\nexact vs asymptotic quantum bound at 1e4 photons per bin");
    let (m, eta, n_b) = (4, 0.01, 20.0);
    for n_s in [1e-2, 1e-3, 1e-4] {
        let big_m = (1e4 / n_s) as u64;
        let f = gaussian_fidelity(&target_output_state(eta, n_b, n_s)?, &background_output_state(n_b, n_s)?)?;
        let exact = quantum_cpf_upper_bound_exact(m, big_m, f)?;
        let asym = qtr_quantum_ub_asymptotic(&ScenarioParams::new(m, big_m, n_s, eta, n_b)?);
        println!("n_s = {n_s:e}: exact {exact:.6e}, asymptote {asym:.6e}");
    }
    Ok(())
}
