//! RSFQ cell library figures and NPU cost totals.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Dff,
    Tff,
    Xor,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec {
    pub kind: CellKind,
    pub name: &'static str,
    pub jj_count: u32,
    pub bias_ma: f64,
    pub area_um2: f64,
    pub latency_ps: f64,
}

pub const CELLS: [CellSpec; 4] = [
    CellSpec { kind: CellKind::Dff, name: "DFF", jj_count: 6, bias_ma: 0.720, area_um2: 900.0, latency_ps: 5.1 },
    CellSpec { kind: CellKind::Tff, name: "TFF", jj_count: 13, bias_ma: 0.808, area_um2: 3600.0, latency_ps: 7.3 },
    CellSpec { kind: CellKind::Xor, name: "XOR", jj_count: 11, bias_ma: 1.068, area_um2: 3600.0, latency_ps: 6.5 },
    CellSpec { kind: CellKind::Not, name: "NOT", jj_count: 11, bias_ma: 0.848, area_um2: 3600.0, latency_ps: 6.5 },
];

pub fn cell(kind: CellKind) -> &'static CellSpec {
    CELLS.iter().find(|c| c.kind == kind).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CellCounts {
    pub dff: u32,
    pub tff: u32,
    pub xor: u32,
    pub not: u32,
}

impl CellCounts {
    /// One XOR and one NOT in the arithmetic unit, `k` TFFs and a readout DFF
    /// in the counter.
    pub fn npu(k: u32) -> Self {
        Self { dff: 1, tff: k, xor: 1, not: 1 }
    }

    pub fn counter(k: u32) -> Self {
        Self { dff: 1, tff: k, ..Self::default() }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static CellSpec, u32)> {
        [
            (cell(CellKind::Dff), self.dff),
            (cell(CellKind::Tff), self.tff),
            (cell(CellKind::Xor), self.xor),
            (cell(CellKind::Not), self.not),
        ]
        .into_iter()
    }

    pub fn jj(&self) -> u32 {
        self.iter().map(|(c, n)| c.jj_count * n).sum()
    }

    pub fn bias_ma(&self) -> f64 {
        self.iter().map(|(c, n)| c.bias_ma * n as f64).sum()
    }

    pub fn area_um2(&self) -> f64 {
        self.iter().map(|(c, n)| c.area_um2 * n as f64).sum()
    }
}

/// Design totals of the laid-out 9-bit NPU. They include interconnect JJs
/// that the cell table does not account for.
pub const DESIGN_K: u32 = 9;
pub const DESIGN_JJ: u32 = 151;
pub const DESIGN_BIAS_MA: f64 = 11.2;
pub const DESIGN_LATENCY_PS: f64 = 13.8;

#[derive(Debug, Clone, PartialEq)]
pub struct NpuReport {
    pub k: u32,
    pub cells: CellCounts,
    pub jj_total: u32,
    pub bias_total_ma: f64,
    pub latency_ps: f64,
    pub fmax_ghz: f64,
    /// Cell-table sums rather than design figures.
    pub estimate: bool,
}

impl NpuReport {
    /// `fmax` rounded to the nearest 10 GHz.
    pub fn fmax_class_ghz(&self) -> u32 {
        ((self.fmax_ghz / 10.0).round() * 10.0) as u32
    }
}

/// Cost of an NPU with a `k`-bit counter. Only `k = 9` has design figures.
/// Other widths sum the cell table. Their critical path is taken to be an XOR
/// stage feeding the first TFF, which is also what the design latency works
/// out to.
pub fn npu_cost(k: u32) -> NpuReport {
    assert!(k >= 1, "counter needs at least one bit");
    let cells = CellCounts::npu(k);
    let (jj_total, bias_total_ma, latency_ps, estimate) = if k == DESIGN_K {
        (DESIGN_JJ, DESIGN_BIAS_MA, DESIGN_LATENCY_PS, false)
    } else {
        let path = cell(CellKind::Xor).latency_ps + cell(CellKind::Tff).latency_ps;
        (cells.jj(), cells.bias_ma(), path, true)
    };
    NpuReport {
        k,
        cells,
        jj_total,
        bias_total_ma,
        latency_ps,
        fmax_ghz: 1000.0 / latency_ps,
        estimate,
    }
}
