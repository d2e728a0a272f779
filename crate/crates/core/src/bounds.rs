//! Closed-form error-probability bounds for channel position finding and
//! its application to target ranging, plus the quantum-advantage test.
//!
//! Every bound is returned raw: values above 1 are vacuous but still carry
//! information about how far a sweep is from the useful regime.

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_probability, domain, Error, Result};

/// Parameters of one ranging scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Number of range bins (hypotheses).
    pub m: u32,
    /// Modes per bin.
    #[serde(rename = "M")]
    pub big_m: u64,
    /// Mean signal photons per mode.
    pub n_s: f64,
    /// Round-trip transmissivity.
    pub eta: f64,
    /// Background photons per mode.
    pub n_b: f64,
}

impl ScenarioParams {
    pub fn new(m: u32, big_m: u64, n_s: f64, eta: f64, n_b: f64) -> Result<Self> {
        let s = ScenarioParams { m, big_m, n_s, eta, n_b };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return domain(format!("need at least 2 bins, got m = {}", self.m));
        }
        if self.big_m < 1 {
            return domain("need at least one mode per bin");
        }
        check_non_negative("n_s", self.n_s)?;
        check_probability("eta", self.eta)?;
        check_non_negative("n_b", self.n_b)
    }

    /// Single-use signal-to-noise ratio `γ = η N_S / N_B`.
    pub fn snr(&self) -> Result<f64> {
        if self.n_b > 0.0 {
            Ok(self.eta * self.n_s / self.n_b)
        } else {
            domain("SNR is undefined without background photons (n_b = 0)")
        }
    }

    /// Photons transmitted over all bins, `m M N_S`.
    pub fn total_energy(&self) -> f64 {
        self.m as f64 * self.big_m as f64 * self.n_s
    }

    fn m_f64(&self) -> f64 {
        self.m as f64
    }

    fn big_m_f64(&self) -> f64 {
        self.big_m as f64
    }
}

/// Error rates of the two partially unambiguous measurements used by the
/// conditional-nulling receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CNParams {
    /// False-alarm probability of the target test.
    pub zeta1: f64,
    /// Miss probability of the reference confirmation.
    pub zeta2: f64,
    /// Number of hypotheses.
    pub n_hyp: u32,
}

impl CNParams {
    pub fn new(zeta1: f64, zeta2: f64, n_hyp: u32) -> Result<Self> {
        check_probability("zeta1", zeta1)?;
        check_probability("zeta2", zeta2)?;
        if n_hyp < 2 {
            return domain(format!("need at least 2 hypotheses, got {n_hyp}"));
        }
        Ok(CNParams { zeta1, zeta2, n_hyp })
    }
}

/// Every bound for one scenario. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub m: u32,
    #[serde(rename = "M")]
    pub big_m: u64,
    pub n_s: f64,
    pub eta: f64,
    pub n_b: f64,
    pub gamma: f64,
    pub classical_cpf_lb: f64,
    pub quantum_ub_exact: f64,
    pub quantum_ub_asym: f64,
    pub cn_qtr_asym: f64,
    pub classical_ctr_lb: f64,
    pub advantage_possible: bool,
}

impl BoundsReport {
    pub fn params(&self) -> ScenarioParams {
        ScenarioParams {
            m: self.m,
            big_m: self.big_m,
            n_s: self.n_s,
            eta: self.eta,
            n_b: self.n_b,
        }
    }

    /// True when any reported probability exceeds 1.
    pub fn vacuous(&self) -> bool {
        [
            self.classical_cpf_lb,
            self.quantum_ub_exact,
            self.quantum_ub_asym,
            self.cn_qtr_asym,
            self.classical_ctr_lb,
        ]
        .iter()
        .any(|&p| p > 1.0)
    }
}

/// `c_{E_B,E_T} = [1 + (√(E_B(1+E_T)) − √(E_T(1+E_B)))²]⁻¹`.
pub fn cpf_noise_constant(e_b: f64, e_t: f64) -> f64 {
    let d = (e_b * (1.0 + e_t)).sqrt() - (e_t * (1.0 + e_b)).sqrt();
    1.0 / (1.0 + d * d)
}

/// Lower bound on the error of locating the target channel with classical
/// light (`M` modes, `n_s` photons each, per box).
pub fn classical_cpf_lower_bound(
    m: u32,
    big_m: u64,
    n_s: f64,
    mu_b: f64,
    mu_t: f64,
    e_b: f64,
    e_t: f64,
) -> Result<f64> {
    if m < 2 {
        return domain(format!("need at least 2 boxes, got m = {m}"));
    }
    check_non_negative("n_s", n_s)?;
    check_probability("mu_b", mu_b)?;
    check_probability("mu_t", mu_t)?;
    check_non_negative("e_b", e_b)?;
    check_non_negative("e_t", e_t)?;
    let m = m as f64;
    let big_m = big_m as f64;
    let c = cpf_noise_constant(e_b, e_t);
    let gap = mu_b.sqrt() - mu_t.sqrt();
    let exponent = 2.0 * big_m * n_s * gap * gap / (1.0 + e_b + e_t);
    Ok((m - 1.0) / (2.0 * m) * (2.0 * big_m * c.ln() - exponent).exp())
}

/// `(m − 1) F^{2M}` from the single-copy fidelity between target and
/// background outputs.
pub fn quantum_cpf_upper_bound_exact(m: u32, big_m: u64, single_copy_fidelity: f64) -> Result<f64> {
    if m < 2 {
        return domain(format!("need at least 2 boxes, got m = {m}"));
    }
    check_probability("single-copy fidelity", single_copy_fidelity)?;
    let f = single_copy_fidelity;
    let power = if f == 0.0 { 0.0 } else { (2.0 * big_m as f64 * f.ln()).exp() };
    Ok((m as f64 - 1.0) * power)
}

/// `(m − 1) exp(−M η N_S / (N_B + 1))`.
pub fn qtr_quantum_ub_asymptotic(s: &ScenarioParams) -> f64 {
    (s.m_f64() - 1.0) * (-s.big_m_f64() * s.eta * s.n_s / (s.n_b + 1.0)).exp()
}

/// Mean error of the feed-forward conditional-nulling receiver,
/// `(1/N)(ζ₂/ζ₁)(N ζ₁ + (1 − ζ₁)^N − 1)`.
///
/// Evaluated through the identity
/// `N ζ₁ + (1 − ζ₁)^N − 1 = ζ₁ Σ_{k=1}^{N−1} [1 − (1 − ζ₁)^k]`,
/// which has no cancellation for small `ζ₁` and is 0 at `ζ₁ = 0`.
pub fn cn_error_probability(p: &CNParams) -> f64 {
    if p.zeta1 == 0.0 || p.zeta2 == 0.0 {
        return 0.0;
    }
    let log_keep = (-p.zeta1).ln_1p();
    let sum: f64 = (1..p.n_hyp)
        .map(|k| -(k as f64 * log_keep).exp_m1())
        .sum();
    p.zeta2 * sum / p.n_hyp as f64
}

/// Common Type-I/Type-II rate `exp(−M η N_S / N_B)` that turns the
/// conditional-nulling error into its asymptotic ranging form.
pub fn qtr_cn_zeta(s: &ScenarioParams) -> Result<f64> {
    if !(s.n_b > 0.0) {
        return domain("conditional-nulling rates need n_b > 0");
    }
    Ok((-s.big_m_f64() * s.eta * s.n_s / s.n_b).exp())
}

/// `((m − 1)/2) exp(−2 M η N_S / N_B)`.
pub fn qtr_cn_asymptotic(s: &ScenarioParams) -> Result<f64> {
    if !(s.n_b > 0.0) {
        return domain("conditional-nulling asymptote diverges at n_b = 0");
    }
    Ok((s.m_f64() - 1.0) / 2.0 * (-2.0 * s.big_m_f64() * s.eta * s.n_s / s.n_b).exp())
}

/// Classical lower bound with `M N_S` photons sent to each bin separately.
pub fn classical_qtr_lower_bound_per_bin(s: &ScenarioParams) -> f64 {
    let m = s.m_f64();
    (m - 1.0) / (2.0 * m) * (-2.0 * s.big_m_f64() * s.eta * s.n_s / (2.0 * s.n_b + 1.0)).exp()
}

/// Classical lower bound when the whole `m M N_S` budget goes out as one
/// pulse that returns from whichever bin holds the target.
pub fn classical_ctr_lower_bound(s: &ScenarioParams) -> f64 {
    let m = s.m_f64();
    let modes = m * s.big_m_f64();
    (m - 1.0) / (2.0 * m) * (-2.0 * modes * s.eta * s.n_s / (2.0 * s.n_b + 1.0)).exp()
}

/// Right-hand side `2Mγ (N_B(2 − m) + 1) / (2N_B + 1)` of the advantage test.
pub fn advantage_rhs(m: u32, big_m: u64, gamma: f64, n_b: f64) -> f64 {
    let m = m as f64;
    2.0 * big_m as f64 * gamma * (n_b * (2.0 - m) + 1.0) / (2.0 * n_b + 1.0)
}

/// Sufficient condition for the conditional-nulling receiver to beat the
/// single-pulse classical bound: `ln m ≤ 2Mγ (N_B(2 − m) + 1)/(2N_B + 1)`.
pub fn advantage_condition(m: u32, big_m: u64, gamma: f64, n_b: f64) -> Result<bool> {
    if m < 2 {
        return domain(format!("need at least 2 bins, got m = {m}"));
    }
    if big_m < 1 {
        return domain("need at least one mode per bin");
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return domain(format!("gamma must be positive and finite, got {gamma}"));
    }
    if !(n_b > 0.0 && n_b.is_finite()) {
        return domain(format!("n_b must be positive and finite, got {n_b}"));
    }
    Ok((m as f64).ln() <= advantage_rhs(m, big_m, gamma, n_b))
}

/// Grid for [`advantage_region_search`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageGrid {
    pub m: Vec<u32>,
    pub n_b: Vec<f64>,
    #[serde(rename = "M")]
    pub big_m: Vec<u64>,
    pub gamma: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvantagePoint {
    pub m: u32,
    #[serde(rename = "M")]
    pub big_m: u64,
    pub gamma: f64,
    pub n_b: f64,
    pub ln_m: f64,
    pub rhs: f64,
}

/// Check of `N_B(2 − m) + 1 < 0 ⟺ N_B > 1/(m − 2)` over every `(m, N_B)`
/// pair of the grid with `m > 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticWitness {
    pub statement: String,
    pub pairs_checked: usize,
    /// Pairs where the factor is negative, so the condition fails for every
    /// `M` and `γ`.
    pub pairs_excluded: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageSearch {
    pub grid_size: usize,
    pub satisfying: Vec<AdvantagePoint>,
    pub witness: AnalyticWitness,
}

pub const WITNESS_STATEMENT: &str =
    "for m > 2: N_B(2 - m) + 1 < 0 <=> N_B > 1/(m - 2); then the right-hand side is negative and ln m <= RHS is impossible";

/// Enumerates the grid and keeps every point where [`advantage_condition`]
/// holds. Points are visited in `(m, n_b, M, γ)` lexicographic order.
pub fn advantage_region_search(grid: &AdvantageGrid) -> Result<AdvantageSearch> {
    if grid.m.is_empty() || grid.n_b.is_empty() || grid.big_m.is_empty() || grid.gamma.is_empty() {
        return domain("advantage search needs non-empty grids for m, n_b, M and gamma");
    }
    let grid_size = [grid.m.len(), grid.n_b.len(), grid.big_m.len(), grid.gamma.len()]
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .ok_or_else(|| Error::Domain("advantage grid size overflows".into()))?;

    let mut satisfying = Vec::new();
    let mut pairs_checked = 0;
    let mut pairs_excluded = 0;
    let mut holds = true;
    for &m in &grid.m {
        for &n_b in &grid.n_b {
            if m > 2 {
                pairs_checked += 1;
                let factor_negative = n_b * (2.0 - m as f64) + 1.0 < 0.0;
                let above_threshold = n_b > 1.0 / (m as f64 - 2.0);
                holds &= factor_negative == above_threshold;
                if factor_negative {
                    pairs_excluded += 1;
                }
            }
            for &big_m in &grid.big_m {
                for &gamma in &grid.gamma {
                    if advantage_condition(m, big_m, gamma, n_b)? {
                        satisfying.push(AdvantagePoint {
                            m,
                            big_m,
                            gamma,
                            n_b,
                            ln_m: (m as f64).ln(),
                            rhs: advantage_rhs(m, big_m, gamma, n_b),
                        });
                    }
                }
            }
        }
    }
    Ok(AdvantageSearch {
        grid_size,
        satisfying,
        witness: AnalyticWitness {
            statement: WITNESS_STATEMENT.to_string(),
            pairs_checked,
            pairs_excluded,
            holds,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    fn scenario(m: u32, big_m: u64, n_s: f64, eta: f64, n_b: f64) -> ScenarioParams {
        ScenarioParams { m, big_m, n_s, eta, n_b }
    }

    #[test]
    fn cpf_lower_bound_examples() {
        for m in [2u32, 3, 7] {
            let v = classical_cpf_lower_bound(m, 5, 0.3, 0.4, 0.4, 1.5, 1.5).unwrap();
            let expected = (m as f64 - 1.0) / (2.0 * m as f64);
            assert!(close(v, expected, 1e-15), "{v} vs {expected}");
        }
        let v = classical_cpf_lower_bound(2, 1, 1.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert!(close(v, 0.25 * (-2f64).exp(), 1e-14));
        assert!(close(v, 0.033834, 1e-5));

        assert!(close(cpf_noise_constant(0.0, 3.0), 0.25, 1e-15));
        let v = classical_cpf_lower_bound(4, 3, 0.2, 0.5, 0.5, 0.0, 3.0).unwrap();
        assert!(close(v, 3.0 / 8.0 * 0.25f64.powi(6), 1e-13));
    }

    #[test]
    fn cpf_lower_bound_rejects_bad_input() {
        assert!(classical_cpf_lower_bound(1, 1, 1.0, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(classical_cpf_lower_bound(2, 1, 1.0, -0.1, 1.0, 0.0, 0.0).is_err());
        assert!(classical_cpf_lower_bound(2, 1, 1.0, 0.0, 1.1, 0.0, 0.0).is_err());
        assert!(classical_cpf_lower_bound(2, 1, 1.0, 0.0, 1.0, -1.0, 0.0).is_err());
        assert!(classical_cpf_lower_bound(2, 1, -1.0, 0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn quantum_exact_examples() {
        assert_eq!(quantum_cpf_upper_bound_exact(5, 100, 1.0).unwrap(), 4.0);
        assert_eq!(quantum_cpf_upper_bound_exact(5, 100, 0.0).unwrap(), 0.0);
        let v = quantum_cpf_upper_bound_exact(4, 10, 0.9).unwrap();
        assert!(close(v, 3.0 * 0.9f64.powi(20), 1e-13));
        assert!(close(v, 0.364730, 1e-5));
        assert!(quantum_cpf_upper_bound_exact(4, 10, 1.2).is_err());
        assert!(quantum_cpf_upper_bound_exact(1, 10, 0.5).is_err());
    }

    #[test]
    fn quantum_asymptotic_examples() {
        assert_eq!(qtr_quantum_ub_asymptotic(&scenario(4, 100, 0.1, 0.0, 1.0)), 3.0);
        let v = qtr_quantum_ub_asymptotic(&scenario(4, 100_000, 0.01, 0.01, 1.0));
        assert!(close(v, 3.0 * (-5f64).exp(), 1e-14));
        assert!(close(v, 0.0202138, 1e-5));
        let p1 = qtr_quantum_ub_asymptotic(&scenario(4, 1000, 0.01, 0.1, 2.0)) / 3.0;
        let p2 = qtr_quantum_ub_asymptotic(&scenario(4, 2000, 0.01, 0.1, 2.0)) / 3.0;
        assert!(close(p2, p1 * p1, 1e-13));
    }

    #[test]
    fn cn_error_examples() {
        let v = cn_error_probability(&CNParams::new(0.1, 0.1, 4).unwrap());
        assert!(close(v, 0.014025, 1e-12), "{v}");
        for (z1, n) in [(0.0, 2), (0.3, 4), (1.0, 9)] {
            assert_eq!(cn_error_probability(&CNParams::new(z1, 0.0, n).unwrap()), 0.0);
        }
        let v = cn_error_probability(&CNParams::new(1.0, 1.0, 4).unwrap());
        assert!(close(v, 0.75, 1e-15));
    }

    #[test]
    fn cn_error_matches_printed_closed_form() {
        for &z1 in &[0.05, 0.2, 0.5, 0.9] {
            for &z2 in &[0.1, 0.7] {
                for n in [2u32, 3, 8, 16] {
                    let nf = n as f64;
                    let printed = (z2 / z1) * (nf * z1 + (1.0 - z1).powi(n as i32) - 1.0) / nf;
                    let v = cn_error_probability(&CNParams::new(z1, z2, n).unwrap());
                    assert!(close(v, printed, 1e-12), "{z1} {z2} {n}: {v} vs {printed}");
                }
            }
        }
    }

    #[test]
    fn cn_params_validation() {
        assert!(CNParams::new(-0.1, 0.5, 4).is_err());
        assert!(CNParams::new(0.1, 1.5, 4).is_err());
        assert!(CNParams::new(0.1, 0.5, 1).is_err());
    }

    #[test]
    fn cn_asymptote_examples() {
        assert!(close(qtr_cn_asymptotic(&scenario(5, 10, 0.1, 0.0, 1.0)).unwrap(), 2.0, 1e-15));
        let v = qtr_cn_asymptotic(&scenario(4, 100_000, 0.01, 0.01, 1.0)).unwrap();
        assert!(close(v, 1.5 * (-20f64).exp(), 1e-13));
        assert!(close(v, 3.0917e-9, 1e-4));
        assert!(qtr_cn_asymptotic(&scenario(4, 10, 0.1, 0.1, 0.0)).is_err());

        // ((N − 1)/2) ζ₁ζ₂ with ζ₁ = ζ₂ = exp(−MηN_S/N_B)
        let s = scenario(6, 4000, 0.01, 0.05, 0.5);
        let zeta = qtr_cn_zeta(&s).unwrap();
        assert!(close(qtr_cn_asymptotic(&s).unwrap(), 2.5 * zeta * zeta, 1e-12));
    }

    #[test]
    fn classical_ranging_examples() {
        let s = scenario(2, 1, 1.0, 1.0, 0.5);
        assert!(close(classical_qtr_lower_bound_per_bin(&s), 0.25 * (-1f64).exp(), 1e-15));
        assert!(close(classical_qtr_lower_bound_per_bin(&s), 0.091970, 1e-5));
        assert!(close(classical_ctr_lower_bound(&s), 0.25 * (-2f64).exp(), 1e-15));
        assert!(close(classical_ctr_lower_bound(&s), 0.033834, 1e-5));

        let dark = scenario(7, 50, 0.2, 0.0, 3.0);
        assert_eq!(classical_qtr_lower_bound_per_bin(&dark), 3.0 / 7.0);
        assert_eq!(classical_ctr_lower_bound(&dark), 3.0 / 7.0);

        let one_bin = scenario(1, 30, 0.2, 0.3, 1.0);
        assert_eq!(classical_ctr_lower_bound(&one_bin), classical_qtr_lower_bound_per_bin(&one_bin));

        let s = scenario(5, 40, 0.02, 0.3, 1.7);
        let via_cpf = classical_cpf_lower_bound(5, 40, 0.02, 0.0, 0.3, 1.7, 1.7).unwrap();
        assert!(close(classical_qtr_lower_bound_per_bin(&s), via_cpf, 1e-14));
        assert_eq!(cpf_noise_constant(1.7, 1.7), 1.0);
    }

    #[test]
    fn advantage_condition_examples() {
        for big_m in [1, 100, 1_000_000] {
            for gamma in [1e-3, 1.0, 50.0] {
                assert!(!advantage_condition(3, big_m, gamma, 2.0).unwrap());
            }
        }
        assert!(close(advantage_rhs(2, 10, 0.5, 1.0), 10.0 / 3.0, 1e-15));
        assert!(advantage_condition(2, 10, 0.5, 1.0).unwrap());
        for m in 2..10 {
            assert!(!advantage_condition(m, 10, 1e-12, 0.5).unwrap());
        }
        assert!(advantage_condition(1, 10, 0.5, 1.0).is_err());
        assert!(advantage_condition(2, 0, 0.5, 1.0).is_err());
        assert!(advantage_condition(2, 10, 0.0, 1.0).is_err());
        assert!(advantage_condition(2, 10, 0.5, 0.0).is_err());
    }

    #[test]
    fn region_search_examples() {
        let grid = AdvantageGrid {
            m: (3..=64).collect(),
            n_b: vec![1.5, 3.0, 100.0],
            big_m: vec![1, 1000, 1_000_000],
            gamma: vec![1e-3, 1.0, 10.0],
        };
        let out = advantage_region_search(&grid).unwrap();
        assert_eq!(out.grid_size, 62 * 27);
        assert!(out.satisfying.is_empty());
        assert!(out.witness.holds);
        assert_eq!(out.witness.pairs_excluded, out.witness.pairs_checked);

        // below N_B = 1 the m = 3 factor stays positive: RHS = Mγ/2 > ln 3 once Mγ > 2 ln 3
        let grid = AdvantageGrid { m: vec![3], n_b: vec![0.5], big_m: vec![10], gamma: vec![0.1, 0.3] };
        let out = advantage_region_search(&grid).unwrap();
        assert_eq!(out.satisfying.len(), 1);
        assert_eq!(out.satisfying[0].gamma, 0.3);
        assert_eq!(out.witness.pairs_excluded, 0);

        let grid = AdvantageGrid { m: vec![2], n_b: vec![1.0], big_m: vec![10], gamma: vec![0.5] };
        let out = advantage_region_search(&grid).unwrap();
        assert_eq!(out.satisfying.len(), advantage_condition(2, 10, 0.5, 1.0).unwrap() as usize);
        assert_eq!(out.witness.pairs_checked, 0);

        let empty = AdvantageGrid { m: vec![], n_b: vec![1.0], big_m: vec![1], gamma: vec![1.0] };
        assert!(advantage_region_search(&empty).is_err());
    }

    #[test]
    fn scenario_validation() {
        assert!(ScenarioParams::new(1, 10, 0.1, 0.1, 1.0).is_err());
        assert!(ScenarioParams::new(2, 0, 0.1, 0.1, 1.0).is_err());
        assert!(ScenarioParams::new(2, 10, 0.1, 1.5, 1.0).is_err());
        assert!(ScenarioParams::new(2, 10, -0.1, 0.5, 1.0).is_err());
        let s = ScenarioParams::new(10, 10_000, 1e-3, 0.1, 2.0).unwrap();
        assert!(close(s.total_energy(), 100.0, 1e-12));
        assert!(close(s.snr().unwrap(), 5e-5, 1e-12));
        assert!(ScenarioParams::new(10, 10, 1e-3, 0.1, 0.0).unwrap().snr().is_err());
    }
}
