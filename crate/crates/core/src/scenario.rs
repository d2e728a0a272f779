//! Range-bin geometry, energy bookkeeping and scenario-level comparison of
//! the quantum and classical ranging bounds.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    classical_cpf_lower_bound, classical_ctr_lower_bound, qtr_cn_asymptotic,
    qtr_quantum_ub_asymptotic, quantum_cpf_upper_bound_exact, BoundsReport, ScenarioParams,
};
use crate::error::{domain, Error, Result};
use crate::gaussian::{background_output_state, gaussian_fidelity, target_output_state};

/// Speed of light in vacuum, m/s (exact SI value).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const DEFAULT_SWEEP_CAP: usize = 1_000_000;

/// Surveillance interval `[r_min, r_max]` (metres) split into `m` shells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub m: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeBin {
    /// 1-based, increasing with range.
    pub index: u32,
    pub r_lo: f64,
    pub r_hi: f64,
    /// Round-trip delay to the bin centre, seconds.
    pub round_trip_delay: f64,
}

/// Uniform partition of the grid's interval into `m` contiguous bins.
pub fn build_range_bins(g: &RangeGrid) -> Result<Vec<RangeBin>> {
    if !(g.r_min.is_finite() && g.r_max.is_finite() && g.r_min > 0.0 && g.r_max > g.r_min) {
        return domain(format!("need 0 < r_min < r_max, got [{}, {}]", g.r_min, g.r_max));
    }
    if g.m < 2 {
        return domain(format!("need at least 2 range bins, got {}", g.m));
    }
    let width = (g.r_max - g.r_min) / g.m as f64;
    let edge = |i: u32| {
        if i == g.m {
            g.r_max
        } else {
            g.r_min + i as f64 * width
        }
    };
    Ok((0..g.m)
        .map(|i| {
            let (r_lo, r_hi) = (edge(i), edge(i + 1));
            RangeBin {
                index: i + 1,
                r_lo,
                r_hi,
                round_trip_delay: (r_lo + r_hi) / SPEED_OF_LIGHT,
            }
        })
        .collect())
}

/// Photon budgets of the two strategies. Both spend `m M N_S` photons: the
/// entangled source as `M` modes per bin, the classical benchmark as a single
/// pulse that every bin sees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBudget {
    pub quantum_total: f64,
    pub classical_pulse: f64,
    /// Upper limit on photons hitting the target (reached when it sits in
    /// the last bin).
    pub max_target_exposure: f64,
    /// Photons per bin used by the bin-by-bin classical variant.
    pub per_bin: f64,
}

impl EnergyBudget {
    pub fn new(m: u32, big_m: u64, n_s: f64) -> Self {
        let per_bin = big_m as f64 * n_s;
        let total = m as f64 * per_bin;
        EnergyBudget {
            quantum_total: total,
            classical_pulse: total,
            max_target_exposure: total,
            per_bin,
        }
    }
}

pub fn energy_accounting(s: &ScenarioParams) -> EnergyBudget {
    EnergyBudget::new(s.m, s.big_m, s.n_s)
}

/// Evaluates every bound for one scenario.
///
/// The classical CPF bound uses `E_T = E_B = N_B`, `μ_T = η`, `μ_B = 0`;
/// the exact quantum bound uses the single-copy fidelity between the target
/// and background signal-idler outputs. `advantage_possible` is the
/// sufficient condition `P_CN ≤ P_LB^CTR`.
pub fn compare_all(s: &ScenarioParams) -> Result<BoundsReport> {
    s.validate()?;
    if !(s.n_b > 0.0) {
        return domain("scenario comparison needs n_b > 0");
    }
    let gamma = s.snr()?;
    let classical_cpf_lb = classical_cpf_lower_bound(s.m, s.big_m, s.n_s, 0.0, s.eta, s.n_b, s.n_b)?;
    let fidelity = gaussian_fidelity(
        &target_output_state(s.eta, s.n_b, s.n_s)?,
        &background_output_state(s.n_b, s.n_s)?,
    )?;
    let quantum_ub_exact = quantum_cpf_upper_bound_exact(s.m, s.big_m, fidelity)?;
    let cn_qtr_asym = qtr_cn_asymptotic(s)?;
    let classical_ctr_lb = classical_ctr_lower_bound(s);
    Ok(BoundsReport {
        m: s.m,
        big_m: s.big_m,
        n_s: s.n_s,
        eta: s.eta,
        n_b: s.n_b,
        gamma,
        classical_cpf_lb,
        quantum_ub_exact,
        quantum_ub_asym: qtr_quantum_ub_asymptotic(s),
        cn_qtr_asym,
        classical_ctr_lb,
        advantage_possible: log_cn_asym(s) <= log_ctr_lb(s),
    })
}

// Both bounds underflow together for large exposures, so they are
// compared through their logarithms.
fn log_cn_asym(s: &ScenarioParams) -> f64 {
    let m = s.m as f64;
    ((m - 1.0) / 2.0).ln() - 2.0 * s.big_m as f64 * s.eta * s.n_s / s.n_b
}

fn log_ctr_lb(s: &ScenarioParams) -> f64 {
    let m = s.m as f64;
    ((m - 1.0) / (2.0 * m)).ln() - 2.0 * m * s.big_m as f64 * s.eta * s.n_s / (2.0 * s.n_b + 1.0)
}

/// Cartesian-product sweep over scenario parameters. A single-element list
/// fixes that parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub m: Vec<u32>,
    #[serde(rename = "M")]
    pub big_m: Vec<u64>,
    pub n_s: Vec<f64>,
    pub eta: Vec<f64>,
    pub n_b: Vec<f64>,
    pub cap: usize,
}

impl SweepSpec {
    /// Number of rows, or `None` on overflow.
    pub fn size(&self) -> Option<usize> {
        [self.m.len(), self.big_m.len(), self.n_s.len(), self.eta.len(), self.n_b.len()]
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
    }

    /// Scenario for row `row` (last parameter varies fastest).
    fn scenario(&self, mut row: usize) -> ScenarioParams {
        let mut pick = |len: usize| {
            let i = row % len;
            row /= len;
            i
        };
        let n_b = self.n_b[pick(self.n_b.len())];
        let eta = self.eta[pick(self.eta.len())];
        let n_s = self.n_s[pick(self.n_s.len())];
        let big_m = self.big_m[pick(self.big_m.len())];
        let m = self.m[pick(self.m.len())];
        ScenarioParams { m, big_m, n_s, eta, n_b }
    }
}

/// Evaluates [`compare_all`] on every grid point, rows ordered
/// lexicographically by `(m, M, n_s, eta, n_b)` grid indices.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<BoundsReport>> {
    let lists = [spec.m.len(), spec.big_m.len(), spec.n_s.len(), spec.eta.len(), spec.n_b.len()];
    if lists.contains(&0) {
        return domain("every sweep parameter needs at least one value");
    }
    let size = spec.size().unwrap_or(usize::MAX);
    if size > spec.cap {
        return Err(Error::GridTooLarge { size, cap: spec.cap });
    }
    (0..size)
        .into_par_iter()
        .map(|row| compare_all(&spec.scenario(row)))
        .collect()
}

/// CSV columns, in order.
pub const CSV_COLUMNS: [&str; 12] = [
    "m",
    "M",
    "n_s",
    "eta",
    "n_b",
    "gamma",
    "classical_cpf_lb",
    "quantum_ub_exact",
    "quantum_ub_asym",
    "cn_qtr_asym",
    "classical_ctr_lb",
    "advantage_possible",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl BoundsReport {
    pub fn csv_record(&self) -> String {
        [
            self.m.to_string(),
            self.big_m.to_string(),
            format_f64(self.n_s),
            format_f64(self.eta),
            format_f64(self.n_b),
            format_f64(self.gamma),
            format_f64(self.classical_cpf_lb),
            format_f64(self.quantum_ub_exact),
            format_f64(self.quantum_ub_asym),
            format_f64(self.cn_qtr_asym),
            format_f64(self.classical_ctr_lb),
            self.advantage_possible.to_string(),
        ]
        .join(",")
    }
}

pub fn write_csv<W: Write + ?Sized>(rows: &[BoundsReport], out: &mut W) -> io::Result<()> {
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.csv_record())?;
    }
    Ok(())
}
