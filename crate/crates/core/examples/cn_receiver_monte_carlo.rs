//! Monte Carlo run of the conditional-nulling receiver next to its analytic
//! error probability.

use qtr_bounds::bounds::cn_error_probability;
use qtr_bounds::cn_sim::trace_trial;
use qtr_bounds::{simulate_cn, simulate_qtr_cn, CNParams, CnSimConfig, ScenarioParams};

fn main() -> qtr_bounds::Result<()> {
    for (z1, z2, n) in [(0.1, 0.1, 4), (0.3, 0.5, 8), (0.01, 0.5, 16)] {
        let cn = CNParams::new(z1, z2, n)?;
        let r = simulate_cn(&CnSimConfig { cn, trials: 1_000_000, master_seed: 42 })?;
        println!(
            "zeta1={z1} zeta2={z2} N={n}: simulated {:.6} [{:.6}, {:.6}], analytic {:.6}",
            r.error_rate,
            r.wilson_95.0,
            r.wilson_95.1,
            cn_error_probability(&cn)
        );
    }

    println!("\nfirst trials at zeta1 = zeta2 = 0.5, N = 6");
    let cn = CNParams::new(0.5, 0.5, 6)?;
    for i in 0..6 {
        println!("  {:?}", trace_trial(&cn, 1, i));
    }

    let sim = simulate_qtr_cn(&ScenarioParams::new(8, 5000, 0.01, 0.1, 1.0)?, 1_000_000, 7)?;
    println!("\nranging scenario: zeta {:.4e}, analytic {:.4e}, asymptote {:.4e}", sim.zeta, sim.analytic, sim.asymptotic);
    if let Some(r) = sim.result {
        println!("simulated {:.4e} +/- {:.1e}", r.error_rate, r.std_error);
    }
    Ok(())
}
