//! Space-time structure: which qubits and stabilizers exist at each cycle.
//!
//! Layers `0..cycles` are noisy rounds; layer `cycles` is the final perfect
//! readout. A memory experiment uses one fixed set of stabilizers. A
//! merge-and-split run switches the junction on for the merge phase only.

use super::layout::{CellKind, CodeLayout, Shape};
use super::LatticeError;

/// Phases of a rough merge-and-split (logical XX measurement).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LsSchedule {
    pub d: usize,
    pub init_cycles: usize,
    pub merge_cycles: usize,
    pub split_cycles: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Init,
    Merge,
    Split,
}

impl LsSchedule {
    /// One preparation cycle, `d` merged cycles, and split cycles making `3d` in total.
    pub fn standard(d: usize) -> Self {
        Self {
            d,
            init_cycles: 1,
            merge_cycles: d,
            split_cycles: 2 * d - 1,
        }
    }

    pub fn total_cycles(&self) -> usize {
        self.init_cycles + self.merge_cycles + self.split_cycles
    }

    /// Cycle whose junction X-stabilizer outcomes carry the logical XX parity.
    pub fn first_merge_cycle(&self) -> usize {
        self.init_cycles
    }

    /// Cycle at which the junction data are measured out in the Z basis.
    pub fn split_cycle(&self) -> usize {
        self.init_cycles + self.merge_cycles
    }

    pub fn phase(&self, t: usize) -> Phase {
        if t < self.first_merge_cycle() {
            Phase::Init
        } else if t < self.split_cycle() {
            Phase::Merge
        } else {
            Phase::Split
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Detector {
    cell: u32,
    n: u8,
    support: [u32; 4],
}

#[derive(Debug, Clone)]
pub struct Timeline {
    layout: CodeLayout,
    cycles: usize,
    schedule: Option<LsSchedule>,
    detectors: Vec<Vec<Detector>>,
    detector_slot: Vec<Vec<u32>>,
}

const NO_SLOT: u32 = u32::MAX;

impl Timeline {
    /// Idle memory experiment: `cycles` noisy rounds plus a perfect final round.
    pub fn memory(layout: CodeLayout, cycles: usize) -> Result<Self, LatticeError> {
        if cycles == 0 {
            return Err(LatticeError::NoCycles);
        }
        if layout.shape() != Shape::Single {
            return Err(LatticeError::WrongShape {
                expected: Shape::Single,
            });
        }
        Ok(Self::assemble(layout, cycles, None))
    }

    pub fn lattice_surgery(layout: CodeLayout, schedule: LsSchedule) -> Result<Self, LatticeError> {
        if layout.shape() != Shape::MergedRough {
            return Err(LatticeError::WrongShape {
                expected: Shape::MergedRough,
            });
        }
        if schedule.d != layout.d() {
            return Err(LatticeError::ScheduleMismatch {
                schedule: schedule.d,
                layout: layout.d(),
            });
        }
        if schedule.merge_cycles == 0 || schedule.split_cycles == 0 {
            return Err(LatticeError::NoCycles);
        }
        let cycles = schedule.total_cycles();
        Ok(Self::assemble(layout, cycles, Some(schedule)))
    }

    fn assemble(layout: CodeLayout, cycles: usize, schedule: Option<LsSchedule>) -> Self {
        let mut tl = Self {
            layout,
            cycles,
            schedule,
            detectors: Vec::new(),
            detector_slot: Vec::new(),
        };
        let n = tl.layout.num_cells();
        for t in 0..=cycles {
            let mut layer = Vec::new();
            let mut slots = vec![NO_SLOT; n];
            for a in 0..n {
                if !tl.layout.kind(a).is_ancilla() || !tl.has_detector(a, t) {
                    continue;
                }
                let mut det = Detector {
                    cell: a as u32,
                    n: 0,
                    support: [0; 4],
                };
                for &q in tl.layout.neighbours(a) {
                    if tl.is_member(q, t) || (t > 0 && tl.is_member(q, t - 1)) {
                        det.support[det.n as usize] = q as u32;
                        det.n += 1;
                    }
                }
                slots[a] = layer.len() as u32;
                layer.push(det);
            }
            tl.detectors.push(layer);
            tl.detector_slot.push(slots);
        }
        tl
    }

    pub fn layout(&self) -> &CodeLayout {
        &self.layout
    }

    /// Number of noisy cycles `T`.
    pub fn cycles(&self) -> usize {
        self.cycles
    }

    /// Detection layers, `T + 1` including the final perfect round.
    pub fn layers(&self) -> usize {
        self.cycles + 1
    }

    pub fn schedule(&self) -> Option<&LsSchedule> {
        self.schedule.as_ref()
    }

    fn merge_window(&self) -> Option<(usize, usize)> {
        self.schedule
            .map(|s| (s.first_merge_cycle(), s.split_cycle()))
    }

    fn clamp(&self, t: usize) -> usize {
        // The final round measures whatever was measured in the last noisy round.
        if t >= self.cycles {
            self.cycles - 1
        } else {
            t
        }
    }

    /// Whether data qubit `q` belongs to the measured stabilizers at cycle `t`.
    pub fn is_member(&self, q: usize, t: usize) -> bool {
        match self.merge_window() {
            Some((m0, s)) if self.layout.is_junction(q) => {
                let t = self.clamp(t);
                m0 <= t && t < s
            }
            _ => true,
        }
    }

    /// Whether data qubit `q` can carry an error (or correction) at cycle `t`.
    ///
    /// Junction data exist from their preparation, folded into the first merge
    /// cycle, up to and including the split cycle at which they are measured.
    pub fn data_live(&self, q: usize, t: usize) -> bool {
        if self.layout.kind(q) != CellKind::Data || t > self.cycles {
            return false;
        }
        match self.merge_window() {
            Some((m0, s)) if self.layout.is_junction(q) => m0 <= t && t <= s,
            _ => true,
        }
    }

    pub fn ancilla_active(&self, a: usize, t: usize) -> bool {
        let kind = self.layout.kind(a);
        if !kind.is_ancilla() || t > self.cycles {
            return false;
        }
        match self.merge_window() {
            Some((m0, s)) if self.layout.is_junction(a) => {
                let t = self.clamp(t);
                m0 <= t && t < s
            }
            _ => true,
        }
    }

    /// Whether ancilla `a` can suffer a measurement flip at cycle `t`.
    pub fn meas_live(&self, a: usize, t: usize) -> bool {
        t < self.cycles && self.ancilla_active(a, t)
    }

    /// Whether the ancilla's first outcome is random (no detector on that round).
    fn random_start(&self, a: usize) -> Option<usize> {
        match self.merge_window() {
            Some((m0, _)) if self.layout.is_junction(a) => Some(m0),
            _ => None,
        }
    }

    pub fn has_detector(&self, a: usize, t: usize) -> bool {
        self.ancilla_active(a, t) && self.random_start(a) != Some(t)
    }

    /// Stabilizer support of ancilla `a` measured at cycle `t`.
    pub fn stabilizer_support(&self, a: usize, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.layout
            .neighbours(a)
            .iter()
            .copied()
            .filter(move |&q| self.is_member(q, t))
    }

    /// Data qubits whose new errors at `t` toggle the detector `(a, t)`.
    ///
    /// This is the union of the stabilizer supports at `t - 1` and `t`: at a
    /// split the junction outcomes are folded back into the boundary detector.
    pub fn detector_support(&self, a: usize, t: usize) -> &[u32] {
        let slot = self.detector_slot[t][a];
        assert_ne!(slot, NO_SLOT, "no detector at ancilla {a}, layer {t}");
        let det = &self.detectors[t][slot as usize];
        &det.support[..det.n as usize]
    }

    /// Detector cells present on layer `t`, in row-major order.
    pub fn detector_cells(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.detectors[t].iter().map(|d| d.cell as usize)
    }

    /// Detectors of layer `t` as (ancilla cell, toggling support) pairs.
    pub(crate) fn detectors_with_support(&self, t: usize) -> impl Iterator<Item = (usize, &[u32])> {
        self.detectors[t]
            .iter()
            .map(|d| (d.cell as usize, &d.support[..d.n as usize]))
    }

    /// Detectors toggled by an X or Z error component on data `q` at cycle `t`.
    pub fn data_toggles(&self, q: usize, t: usize, pauli: super::Pauli) -> Vec<(usize, usize)> {
        if !self.data_live(q, t) {
            return Vec::new();
        }
        let want = pauli.detected_by();
        self.layout
            .neighbours(q)
            .iter()
            .copied()
            .filter(|&a| self.layout.kind(a) == want && self.has_detector(a, t))
            .filter(|&a| self.detector_support(a, t).contains(&(q as u32)))
            .map(|a| (t, a))
            .collect()
    }

    /// Detectors toggled by a flipped outcome of ancilla `a` at cycle `t`.
    pub fn meas_toggles(&self, a: usize, t: usize) -> Vec<(usize, usize)> {
        if !self.meas_live(a, t) {
            return Vec::new();
        }
        [t, t + 1]
            .into_iter()
            .filter(|&u| self.has_detector(a, u))
            .map(|u| (u, a))
            .collect()
    }

    /// Boundary masks seen by the first stage at layer `t`. While merged, the
    /// inner edges of the two patches are no longer boundaries.
    pub fn boundary_masks(&self, t: usize) -> (Vec<bool>, Vec<bool>) {
        let x = self.layout.x_boundary_mask().to_vec();
        let mut z = self.layout.z_boundary_mask().to_vec();
        if let (Some(s), Some(j)) = (self.schedule, self.layout.junction_col()) {
            if s.phase(self.clamp(t)) == Phase::Merge {
                let cols = self.layout.cols();
                for r in 0..self.layout.rows() {
                    z[r * cols + j - 1] = false;
                    z[r * cols + j + 1] = false;
                }
            }
        }
        (x, z)
    }
}
