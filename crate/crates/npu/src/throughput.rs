//! Multiplication counts of same-padded convolution stacks over a
//! `(2d-1) x (2d-1)` lattice, and whether one NPU per site keeps up.

use neoqec_core::nn::ConvLayerSpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultCount {
    /// Per-site multiplications of each layer, `kh * kw * in * out`.
    pub coefficients: Vec<u64>,
    pub per_layer: Vec<u64>,
    pub sites: u64,
    pub total: u64,
}

impl MultCount {
    pub fn coefficient_total(&self) -> u64 {
        self.coefficients.iter().sum()
    }
}

pub fn count_mults(specs: &[ConvLayerSpec], d: usize) -> MultCount {
    let side = (2 * d).saturating_sub(1) as u64;
    let sites = side * side;
    let coefficients: Vec<u64> = specs.iter().map(|s| s.mults_per_pixel() as u64).collect();
    let per_layer: Vec<u64> = coefficients.iter().map(|c| c * sites).collect();
    MultCount {
        total: per_layer.iter().sum(),
        coefficients,
        per_layer,
        sites,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Throughput {
    /// Multiplications each NPU must finish per cycle budget.
    pub mults_required: u64,
    pub npu_count: u64,
    /// Clock cycles available, one XNOR per cycle.
    pub cycles_available: f64,
    pub feasible: bool,
}

pub fn throughput_check(specs: &[ConvLayerSpec], d: usize, f_npu_ghz: f64, budget_us: f64) -> Throughput {
    let m = count_mults(specs, d);
    let cycles_available = f_npu_ghz * 1e3 * budget_us;
    let mults_required = m.coefficient_total();
    Throughput {
        mults_required,
        npu_count: m.sites,
        cycles_available,
        feasible: mults_required as f64 <= cycles_available,
    }
}
