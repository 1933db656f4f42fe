use super::layout::CellKind;
use super::tableau::ErrorTableau;
use super::timeline::Timeline;
use super::LatticeError;

/// Detection events per layer and cell. Only detector cells can be set; the
/// X- and Z-type events live on disjoint ancilla cells of the same grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DetectionVolume {
    layers: usize,
    cells: usize,
    ev: Vec<bool>,
}

impl DetectionVolume {
    pub fn zeros(layers: usize, cells: usize) -> Self {
        Self {
            layers,
            cells,
            ev: vec![false; layers * cells],
        }
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn get(&self, t: usize, cell: usize) -> bool {
        self.ev[t * self.cells + cell]
    }

    pub fn set(&mut self, t: usize, cell: usize, v: bool) {
        self.ev[t * self.cells + cell] = v;
    }

    pub fn flip(&mut self, t: usize, cell: usize) {
        self.ev[t * self.cells + cell] ^= true;
    }

    pub fn layer(&self, t: usize) -> &[bool] {
        &self.ev[t * self.cells..(t + 1) * self.cells]
    }

    pub fn is_empty(&self) -> bool {
        !self.ev.iter().any(|&b| b)
    }

    pub fn count(&self) -> usize {
        self.ev.iter().filter(|&&b| b).count()
    }

    /// Events of one ancilla kind as `(t, cell)` pairs in lexicographic order.
    pub fn events_of<'a>(
        &'a self,
        tl: &'a Timeline,
        kind: CellKind,
    ) -> impl Iterator<Item = (usize, usize)> + 'a {
        (0..self.layers).flat_map(move |t| {
            (0..self.cells)
                .filter(move |&c| self.get(t, c) && tl.layout().kind(c) == kind)
                .map(move |c| (t, c))
        })
    }

    pub fn xor_assign(&mut self, other: &DetectionVolume) -> Result<(), LatticeError> {
        if self.layers != other.layers || self.cells != other.cells {
            return Err(LatticeError::DimensionMismatch);
        }
        for (a, b) in self.ev.iter_mut().zip(&other.ev) {
            *a ^= b;
        }
        Ok(())
    }
}

/// Detection events of a record: the temporal XOR of consecutive syndromes,
/// including the final perfect round as layer `T`.
pub fn extract_detection(tl: &Timeline, e: &ErrorTableau) -> Result<DetectionVolume, LatticeError> {
    if !e.matches(tl) {
        return Err(LatticeError::DimensionMismatch);
    }
    let layout = tl.layout();
    let mut vol = DetectionVolume::zeros(tl.layers(), layout.num_cells());
    for t in 0..tl.layers() {
        let xs = e.x_layer(t);
        let zs = e.z_layer(t);
        for (a, support) in tl.detectors_with_support(t) {
            let errs = if layout.kind(a) == CellKind::AncZ { xs } else { zs };
            let mut v = support.iter().fold(false, |acc, &q| acc ^ errs[q as usize]);
            if tl.meas_live(a, t) {
                v ^= e.meas(t, a);
            }
            if t > 0 && tl.meas_live(a, t - 1) {
                v ^= e.meas(t - 1, a);
            }
            if v {
                vol.set(t, a, true);
            }
        }
    }
    Ok(vol)
}

/// Raw outcome of ancilla `a` at cycle `t`: parity of the accumulated relevant
/// error component on its stabilizer at that cycle, XOR its measurement flip.
pub fn raw_syndrome(tl: &Timeline, e: &ErrorTableau, t: usize, a: usize) -> bool {
    let kind = tl.layout().kind(a);
    let mut v = tl.stabilizer_support(a, t).fold(false, |acc, q| {
        acc ^ match kind {
            CellKind::AncZ => e.cumulative_x(t, q),
            _ => e.cumulative_z(t, q),
        }
    });
    if tl.meas_live(a, t) {
        v ^= e.meas(t, a);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{CodeLayout, Pauli, Shape};
    use crate::rng::trial_rng;
    use rand::Rng;

    fn memory(d: usize, t: usize) -> Timeline {
        Timeline::memory(CodeLayout::build(d, Shape::Single).unwrap(), t).unwrap()
    }

    fn random_tableau(tl: &Timeline, density: f64, seed: u64) -> ErrorTableau {
        let mut rng = trial_rng(seed, 1);
        let mut e = ErrorTableau::for_timeline(tl);
        let l = tl.layout();
        for t in 0..tl.layers() {
            for c in 0..l.num_cells() {
                if tl.data_live(c, t) {
                    e.set_x(t, c, rng.gen_bool(density));
                    e.set_z(t, c, rng.gen_bool(density));
                }
                if tl.meas_live(c, t) {
                    e.set_meas(t, c, rng.gen_bool(density));
                }
            }
        }
        e
    }

    /// Cumulative-syndrome definition evaluated directly for a single patch.
    fn brute_force(tl: &Timeline, e: &ErrorTableau) -> DetectionVolume {
        let l = tl.layout();
        let mut vol = DetectionVolume::zeros(tl.layers(), l.num_cells());
        for a in (0..l.num_cells()).filter(|&c| l.kind(c).is_ancilla()) {
            let mut prev = false;
            for t in 0..tl.layers() {
                let mut s = false;
                for &q in l.neighbours(a) {
                    for u in 0..=t {
                        s ^= if l.kind(a) == CellKind::AncZ { e.x(u, q) } else { e.z(u, q) };
                    }
                }
                if t < tl.cycles() {
                    s ^= e.meas(t, a);
                }
                vol.set(t, a, s ^ prev);
                prev = s;
            }
        }
        vol
    }

    #[test]
    fn single_bit_flip_pairs_two_z_ancillas() {
        let tl = memory(3, 2);
        let l = tl.layout();
        let mut e = ErrorTableau::for_timeline(&tl);
        e.set_x(0, l.cell(2, 2), true);
        let vol = extract_detection(&tl, &e).unwrap();
        let mut hot: Vec<_> = (0..tl.layers())
            .flat_map(|t| (0..l.num_cells()).map(move |c| (t, c)))
            .filter(|&(t, c)| vol.get(t, c))
            .map(|(t, c)| (t, l.coords(c)))
            .collect();
        hot.sort();
        assert_eq!(hot, vec![(0, (1, 2)), (0, (3, 2))]);
        assert_eq!(vol, brute_force(&tl, &e));
    }

    #[test]
    fn measurement_flip_gives_timelike_pair() {
        let tl = memory(3, 2);
        let l = tl.layout();
        let a = l.cell(1, 2);
        let mut e = ErrorTableau::for_timeline(&tl);
        e.set_meas(1, a, true);
        let vol = extract_detection(&tl, &e).unwrap();
        assert_eq!(vol.count(), 2);
        assert!(vol.get(1, a) && vol.get(2, a));
    }

    #[test]
    fn matches_brute_force_on_random_records() {
        for d in [3, 5] {
            let tl = memory(d, d);
            for seed in 0..50 {
                let e = random_tableau(&tl, 0.1, seed);
                assert_eq!(extract_detection(&tl, &e).unwrap(), brute_force(&tl, &e));
            }
        }
    }

    #[test]
    fn linearity_over_random_pairs() {
        for d in [3, 5] {
            let tl = memory(d, d);
            for seed in 0..1000u64 {
                let a = random_tableau(&tl, 0.05, 2 * seed);
                let b = random_tableau(&tl, 0.05, 2 * seed + 1);
                let mut combined = a.clone();
                combined.xor_assign(&b).unwrap();
                let mut lhs = extract_detection(&tl, &a).unwrap();
                lhs.xor_assign(&extract_detection(&tl, &b).unwrap()).unwrap();
                assert_eq!(lhs, extract_detection(&tl, &combined).unwrap());
            }
        }
    }

    #[test]
    fn stabilizer_tableaux_are_invisible() {
        for d in [3, 5] {
            let tl = memory(d, 3);
            let l = tl.layout();
            for a in (0..l.num_cells()).filter(|&c| l.kind(c).is_ancilla()) {
                // the stabilizer itself, applied as a Pauli of its own type
                let pauli = if l.kind(a) == CellKind::AncX { Pauli::X } else { Pauli::Z };
                let mut e = ErrorTableau::for_timeline(&tl);
                for &q in l.neighbours(a) {
                    match pauli {
                        Pauli::X => e.set_x(1, q, true),
                        Pauli::Z => e.set_z(1, q, true),
                    }
                }
                assert!(extract_detection(&tl, &e).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn zero_record_has_no_events() {
        let tl = memory(5, 5);
        let e = ErrorTableau::for_timeline(&tl);
        assert!(extract_detection(&tl, &e).unwrap().is_empty());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let tl = memory(3, 3);
        let e = ErrorTableau::zeros(2, 25);
        assert_eq!(extract_detection(&tl, &e), Err(LatticeError::DimensionMismatch));
    }

    #[test]
    fn raw_syndrome_differences_give_events() {
        let tl = memory(5, 5);
        let e = random_tableau(&tl, 0.1, 99);
        let vol = extract_detection(&tl, &e).unwrap();
        let l = tl.layout();
        for a in (0..l.num_cells()).filter(|&c| l.kind(c).is_ancilla()) {
            let mut prev = false;
            for t in 0..tl.layers() {
                let s = raw_syndrome(&tl, &e, t, a);
                assert_eq!(vol.get(t, a), s ^ prev);
                prev = s;
            }
        }
    }
}
