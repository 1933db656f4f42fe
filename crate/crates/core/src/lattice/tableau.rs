use super::timeline::Timeline;
use super::LatticeError;

/// Per-cycle Pauli error record, also used as the Pauli frame of corrections.
///
/// Data layers run over `0..=cycles`; the extra layer holds corrections placed
/// between the last noisy round and the final perfect readout (the noise model
/// never writes it). Measurement layers run over `0..cycles`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ErrorTableau {
    cycles: usize,
    cells: usize,
    x: Vec<bool>,
    z: Vec<bool>,
    meas: Vec<bool>,
}

impl ErrorTableau {
    pub fn zeros(cycles: usize, cells: usize) -> Self {
        Self {
            cycles,
            cells,
            x: vec![false; (cycles + 1) * cells],
            z: vec![false; (cycles + 1) * cells],
            meas: vec![false; cycles * cells],
        }
    }

    pub fn for_timeline(tl: &Timeline) -> Self {
        Self::zeros(tl.cycles(), tl.layout().num_cells())
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn matches(&self, tl: &Timeline) -> bool {
        self.cycles == tl.cycles() && self.cells == tl.layout().num_cells()
    }

    pub fn x(&self, t: usize, q: usize) -> bool {
        self.x[t * self.cells + q]
    }

    pub fn z(&self, t: usize, q: usize) -> bool {
        self.z[t * self.cells + q]
    }

    pub fn meas(&self, t: usize, a: usize) -> bool {
        self.meas[t * self.cells + a]
    }

    pub fn set_x(&mut self, t: usize, q: usize, v: bool) {
        self.x[t * self.cells + q] = v;
    }

    pub fn set_z(&mut self, t: usize, q: usize, v: bool) {
        self.z[t * self.cells + q] = v;
    }

    pub fn set_meas(&mut self, t: usize, a: usize, v: bool) {
        self.meas[t * self.cells + a] = v;
    }

    pub fn flip_x(&mut self, t: usize, q: usize) {
        self.x[t * self.cells + q] ^= true;
    }

    pub fn flip_z(&mut self, t: usize, q: usize) {
        self.z[t * self.cells + q] ^= true;
    }

    pub fn flip_meas(&mut self, t: usize, a: usize) {
        self.meas[t * self.cells + a] ^= true;
    }

    /// Data layer `t` of the X component, indexed by cell.
    pub fn x_layer(&self, t: usize) -> &[bool] {
        &self.x[t * self.cells..(t + 1) * self.cells]
    }

    pub fn z_layer(&self, t: usize) -> &[bool] {
        &self.z[t * self.cells..(t + 1) * self.cells]
    }

    pub fn meas_layer(&self, t: usize) -> &[bool] {
        &self.meas[t * self.cells..(t + 1) * self.cells]
    }

    pub fn is_zero(&self) -> bool {
        !(self.x.iter().any(|&b| b) || self.z.iter().any(|&b| b) || self.meas.iter().any(|&b| b))
    }

    /// Number of set bits across all three components.
    pub fn weight(&self) -> usize {
        self.x.iter().chain(&self.z).chain(&self.meas).filter(|&&b| b).count()
    }

    pub fn xor_assign(&mut self, other: &ErrorTableau) -> Result<(), LatticeError> {
        if self.cycles != other.cycles || self.cells != other.cells {
            return Err(LatticeError::DimensionMismatch);
        }
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
        for (a, b) in self.meas.iter_mut().zip(&other.meas) {
            *a ^= b;
        }
        Ok(())
    }

    /// Parity of the accumulated X component on `q` over layers `0..=t`.
    pub fn cumulative_x(&self, t: usize, q: usize) -> bool {
        (0..=t).fold(false, |acc, u| acc ^ self.x(u, q))
    }

    pub fn cumulative_z(&self, t: usize, q: usize) -> bool {
        (0..=t).fold(false, |acc, u| acc ^ self.z(u, q))
    }
}

/// Combine a record with a Pauli frame (elementwise XOR).
pub fn apply_frame(e: &ErrorTableau, frame: &ErrorTableau) -> Result<ErrorTableau, LatticeError> {
    let mut out = e.clone();
    out.xor_assign(frame)?;
    Ok(out)
}
