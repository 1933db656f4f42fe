//! Static and dynamic power of SFQ logic, and the per-logical-qubit budget of
//! a decoder built from one NPU per lattice site.

use std::fmt::Write;

use crate::cells::DESIGN_BIAS_MA;
use crate::NpuError;

/// Magnetic flux quantum in webers, at the precision used for the budget.
pub const PHI0_WB: f64 = 2.068e-15;

/// Supply voltage of the cell library.
pub const SUPPLY_V: f64 = 2.5e-3;

/// Resistively biased logic dissipates its bias statically.
pub fn rsfq_power(bias_v: f64, bias_a: f64) -> f64 {
    bias_v * bias_a
}

/// Energy-efficient SFQ: dynamic only, twice `I * Phi0` per clock.
pub fn ersfq_power(bias_a: f64, freq_hz: f64) -> f64 {
    bias_a * freq_hz * PHI0_WB * 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerParams {
    pub f_npu_ghz: f64,
    pub p_stage2_uw: f64,
    pub budget_w: f64,
}

impl Default for PowerParams {
    fn default() -> Self {
        Self {
            f_npu_ghz: 16.0,
            p_stage2_uw: 400.3,
            budget_w: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerReport {
    pub d: usize,
    pub params: PowerParams,
    pub npu_count: u64,
    pub p_npu_uw: f64,
    pub p_nn_uw: f64,
    pub p_total_uw: f64,
    /// Logical qubits that fit in the budget. Saturates when the per-qubit
    /// power is zero.
    pub capacity: u64,
}

pub fn decoder_power_report(d: usize, params: PowerParams) -> Result<PowerReport, NpuError> {
    if d < 3 || d % 2 == 0 {
        return Err(NpuError::InvalidDistance(d));
    }
    let PowerParams {
        f_npu_ghz,
        p_stage2_uw,
        budget_w,
    } = params;
    if !(f_npu_ghz >= 0.0 && p_stage2_uw >= 0.0 && budget_w >= 0.0) {
        return Err(NpuError::NegativeParameter);
    }
    let side = (2 * d - 1) as u64;
    let npu_count = side * side;
    let p_npu_uw = ersfq_power(DESIGN_BIAS_MA * 1e-3, f_npu_ghz * 1e9) * 1e6;
    let p_nn_uw = p_npu_uw * npu_count as f64;
    let p_total_uw = p_nn_uw + p_stage2_uw;
    let capacity = if budget_w == 0.0 {
        0
    } else {
        (budget_w / (p_total_uw * 1e-6)).floor() as u64
    };
    Ok(PowerReport {
        d,
        params,
        npu_count,
        p_npu_uw,
        p_nn_uw,
        p_total_uw,
        capacity,
    })
}

pub const CSV_HEADER: &str = "d,f_npu_ghz,npu_count,p_npu_uw,p_nn_uw,p_stage2_uw,p_total_uw,budget_w,capacity";

impl PowerReport {
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.fields() {
            writeln!(s, "{k}={v}").unwrap();
        }
        s
    }

    pub fn csv_row(&self) -> String {
        self.fields().iter().map(|(_, v)| v.as_str()).collect::<Vec<_>>().join(",")
    }

    fn fields(&self) -> [(&'static str, String); 9] {
        [
            ("d", self.d.to_string()),
            ("f_npu_ghz", format!("{}", self.params.f_npu_ghz)),
            ("npu_count", self.npu_count.to_string()),
            ("p_npu_uw", format!("{:.6}", self.p_npu_uw)),
            ("p_nn_uw", format!("{:.4}", self.p_nn_uw)),
            ("p_stage2_uw", format!("{}", self.params.p_stage2_uw)),
            ("p_total_uw", format!("{:.4}", self.p_total_uw)),
            ("budget_w", format!("{}", self.params.budget_w)),
            ("capacity", self.capacity.to_string()),
        ]
    }
}
