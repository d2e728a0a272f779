//! Monte Carlo model of the feed-forward conditional-nulling receiver.
//!
//! A trial scans the bins in order with the target-test measurement. The
//! true target always answers "target"; a reference bin does so with the
//! false-alarm probability `ζ₁`, which makes it the provisional guess and
//! switches the receiver to confirming the remaining bins. A reference bin
//! always passes confirmation; the true target slips through with the miss
//! probability `ζ₂`, leaving the wrong guess in place.
//!
//! Trial `i` draws from its own ChaCha8 stream (`stream = i`, key from the
//! master seed), so error counts depend only on the configuration and not on
//! how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{cn_error_probability, qtr_cn_asymptotic, qtr_cn_zeta, CNParams, ScenarioParams};
use crate::error::{domain, Result};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;
const CHUNK: u64 = 1 << 14;
/// Smallest `ζ` worth simulating; below this the error rate is not
/// resolvable and the analytic value is reported instead.
pub const MIN_SIMULATED_ZETA: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CnSimConfig {
    pub cn: CNParams,
    pub trials: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CnSimResult {
    pub config: CnSimConfig,
    pub error_count: u64,
    pub error_rate: f64,
    /// Binomial standard error `√(p(1 − p)/n)` at the empirical rate.
    pub std_error: f64,
    pub wilson_95: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Scan,
    Confirm { provisional: u32 },
}

/// What happened in one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialTrace {
    pub target_bin: u32,
    /// Reference bin that raised a false alarm during the scan, if any.
    pub false_alarm_bin: Option<u32>,
    /// Declared bin.
    pub decision: u32,
    pub error: bool,
}

/// Random stream for trial `trial_index` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

/// Runs the receiver once against a target in `target_bin` (1-based).
pub fn run_cn_trial<R: Rng + ?Sized>(cn: &CNParams, target_bin: u32, rng: &mut R) -> TrialTrace {
    debug_assert!((1..=cn.n_hyp).contains(&target_bin));
    let mut phase = Phase::Scan;
    for bin in 1..=cn.n_hyp {
        match phase {
            Phase::Scan if bin == target_bin => {
                return TrialTrace {
                    target_bin,
                    false_alarm_bin: None,
                    decision: bin,
                    error: false,
                };
            }
            Phase::Scan => {
                if rng.random::<f64>() < cn.zeta1 {
                    phase = Phase::Confirm { provisional: bin };
                }
            }
            Phase::Confirm { provisional } if bin == target_bin => {
                let missed = rng.random::<f64>() < cn.zeta2;
                return TrialTrace {
                    target_bin,
                    false_alarm_bin: Some(provisional),
                    decision: if missed { provisional } else { bin },
                    error: missed,
                };
            }
            // reference bins always pass confirmation
            Phase::Confirm { .. } => {}
        }
    }
    unreachable!("target bin {target_bin} outside 1..={}", cn.n_hyp)
}

/// Error indicator of one trial.
pub fn simulate_cn_trial<R: Rng + ?Sized>(cn: &CNParams, target_bin: u32, rng: &mut R) -> bool {
    run_cn_trial(cn, target_bin, rng).error
}

/// Trial `trial_index` with the target drawn uniformly from its own stream.
pub fn trace_trial(cn: &CNParams, master_seed: u64, trial_index: u64) -> TrialTrace {
    let mut rng = trial_rng(master_seed, trial_index);
    let target = rng.random_range(1..=cn.n_hyp);
    run_cn_trial(cn, target, &mut rng)
}

/// Runs `config.trials` independent trials on the current rayon pool.
pub fn simulate_cn(config: &CnSimConfig) -> Result<CnSimResult> {
    if config.trials == 0 {
        return domain("need at least one trial");
    }
    CNParams::new(config.cn.zeta1, config.cn.zeta2, config.cn.n_hyp)?;
    let chunks = config.trials.div_ceil(CHUNK);
    let error_count: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let end = ((c + 1) * CHUNK).min(config.trials);
            (c * CHUNK..end)
                .filter(|&i| trace_trial(&config.cn, config.master_seed, i).error)
                .count() as u64
        })
        .sum();
    Ok(summarize(*config, error_count))
}

fn summarize(config: CnSimConfig, error_count: u64) -> CnSimResult {
    let n = config.trials as f64;
    let p = error_count as f64 / n;
    CnSimResult {
        config,
        error_count,
        error_rate: p,
        std_error: (p * (1.0 - p) / n).sqrt(),
        wilson_95: wilson_interval(error_count, config.trials, Z_95),
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = p + z2 / (2.0 * n_f);
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    let lo = ((centre - half) / denom).clamp(0.0, p);
    let hi = ((centre + half) / denom).clamp(p, 1.0);
    (lo, hi)
}

/// Conditional-nulling simulation of a ranging scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QtrCnSimulation {
    pub scenario: ScenarioParams,
    pub zeta: f64,
    /// Exact receiver error at this `ζ`.
    pub analytic: f64,
    /// Large-exponent approximation `((m − 1)/2) ζ²`.
    pub asymptotic: f64,
    /// `None` when `ζ` underflowed and nothing was simulated.
    pub result: Option<CnSimResult>,
    pub zero_variance: bool,
}

/// Simulates the receiver for a scenario with `ζ₁ = ζ₂ = exp(−MηN_S/N_B)`
/// and one hypothesis per range bin.
pub fn simulate_qtr_cn(s: &ScenarioParams, trials: u64, master_seed: u64) -> Result<QtrCnSimulation> {
    s.validate()?;
    let zeta = qtr_cn_zeta(s)?;
    let asymptotic = qtr_cn_asymptotic(s)?;
    let cn = CNParams::new(zeta, zeta, s.m)?;
    let analytic = cn_error_probability(&cn);
    if zeta <= MIN_SIMULATED_ZETA {
        return Ok(QtrCnSimulation {
            scenario: *s,
            zeta,
            analytic,
            asymptotic,
            result: None,
            zero_variance: true,
        });
    }
    let result = simulate_cn(&CnSimConfig { cn, trials, master_seed })?;
    Ok(QtrCnSimulation {
        scenario: *s,
        zeta,
        analytic,
        asymptotic,
        result: Some(result),
        zero_variance: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cn(z1: f64, z2: f64, n: u32) -> CNParams {
        CNParams::new(z1, z2, n).unwrap()
    }

    #[test]
    fn no_false_alarms_means_no_errors() {
        let p = cn(0.0, 0.9, 6);
        let mut rng = trial_rng(1, 0);
        for target in 1..=6 {
            for _ in 0..200 {
                assert!(!simulate_cn_trial(&p, target, &mut rng));
            }
        }
    }

    #[test]
    fn forced_paths() {
        let p = cn(1.0, 1.0, 5);
        let mut rng = trial_rng(3, 9);
        let first = run_cn_trial(&p, 1, &mut rng);
        assert!(!first.error);
        assert_eq!(first.decision, 1);
        for target in 2..=5 {
            let t = run_cn_trial(&p, target, &mut rng);
            assert!(t.error);
            assert_eq!(t.false_alarm_bin, Some(1));
            assert_eq!(t.decision, 1);
        }
    }

    #[test]
    fn zero_rates_give_exact_zero() {
        let r = simulate_cn(&CnSimConfig { cn: cn(0.0, 0.0, 4), trials: 10_000, master_seed: 5 }).unwrap();
        assert_eq!(r.error_count, 0);
        assert_eq!(r.error_rate, 0.0);
        assert_eq!(r.wilson_95.0, 0.0);
        assert!(r.wilson_95.1 > 0.0 && r.wilson_95.1 < 1e-3);
    }

    #[test]
    fn wilson_interval_brackets_rate() {
        for (k, n) in [(0, 10), (3, 10), (10, 10), (5000, 1_000_000)] {
            let (lo, hi) = wilson_interval(k, n, Z_95);
            let p = k as f64 / n as f64;
            assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0, "{k}/{n}: ({lo}, {hi})");
        }
        let (lo, hi) = wilson_interval(3, 10, Z_95);
        // textbook values for 3/10
        assert!((lo - 0.1078).abs() < 1e-4 && (hi - 0.6032).abs() < 1e-4, "{lo} {hi}");
    }

    #[test]
    fn rejects_zero_trials() {
        assert!(simulate_cn(&CnSimConfig { cn: cn(0.1, 0.1, 4), trials: 0, master_seed: 1 }).is_err());
    }

    #[test]
    fn trial_streams_are_independent_of_order() {
        let p = cn(0.3, 0.5, 8);
        let forward: Vec<_> = (0..50).map(|i| trace_trial(&p, 11, i)).collect();
        let backward: Vec<_> = (0..50).rev().map(|i| trace_trial(&p, 11, i)).collect();
        assert!(forward.iter().eq(backward.iter().rev()));
    }

    #[test]
    fn underflowing_zeta_is_not_simulated() {
        let s = ScenarioParams::new(4, 1_000_000_000, 1.0, 1.0, 1.0).unwrap();
        let out = simulate_qtr_cn(&s, 1000, 1).unwrap();
        assert!(out.zero_variance);
        assert!(out.result.is_none());
        assert_eq!(out.analytic, 0.0);
    }

    #[test]
    fn dark_scenario_errs_at_chance() {
        let s = ScenarioParams::new(4, 100, 0.1, 0.0, 1.0).unwrap();
        let out = simulate_qtr_cn(&s, 200_000, 3).unwrap();
        assert_eq!(out.zeta, 1.0);
        assert_eq!(out.analytic, 0.75);
        let r = out.result.unwrap();
        assert!((r.error_rate - 0.75).abs() <= 4.0 * (0.75f64 * 0.25 / 200_000.0).sqrt());
    }
}
