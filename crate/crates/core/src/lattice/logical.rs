use super::detection::{extract_detection, raw_syndrome};
use super::layout::{CellKind, Pauli, Shape};
use super::tableau::{apply_frame, ErrorTableau};
use super::timeline::Timeline;
use super::LatticeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LogicalOutcome {
    /// A Z-type logical anticommutes with the residual bit flips.
    pub x_fail: bool,
    /// An X-type logical anticommutes with the residual phase flips.
    pub z_fail: bool,
}

impl LogicalOutcome {
    pub fn failed(&self) -> bool {
        self.x_fail || self.z_fail
    }
}

/// Judge a syndrome-free residual by overlap parity with the layout's logical
/// operators. A merged layout fails if any of its logicals is flipped.
pub fn judge_logical(tl: &Timeline, residual: &ErrorTableau) -> Result<LogicalOutcome, LatticeError> {
    let vol = extract_detection(tl, residual)?;
    if !vol.is_empty() {
        return Err(LatticeError::NontrivialResidual(vol.count()));
    }
    let last = tl.cycles();
    let mut out = LogicalOutcome::default();
    for op in tl.layout().logical_ops() {
        let flipped = op.support.iter().fold(false, |acc, &q| {
            acc ^ match op.pauli {
                Pauli::Z => residual.cumulative_x(last, q),
                Pauli::X => residual.cumulative_z(last, q),
            }
        });
        match op.pauli {
            Pauli::Z => out.x_fail |= flipped,
            Pauli::X => out.z_fail |= flipped,
        }
    }
    Ok(out)
}

/// Corrected logical XX parity of a merge: the XOR over junction X-stabilizers
/// of their first-merge-cycle outcome, with the frame's implied flips removed.
/// The noise-free reference parity is `false`.
pub fn ls_logical_xx(tl: &Timeline, e: &ErrorTableau, frame: &ErrorTableau) -> Result<bool, LatticeError> {
    let sched = tl.schedule().ok_or(LatticeError::WrongShape {
        expected: Shape::MergedRough,
    })?;
    let residual = apply_frame(e, frame)?;
    let m0 = sched.first_merge_cycle();
    let layout = tl.layout();
    Ok(layout
        .cells_of(CellKind::AncX)
        .filter(|&a| layout.is_junction(a))
        .fold(false, |acc, a| acc ^ raw_syndrome(tl, &residual, m0, a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{CodeLayout, LsSchedule};

    fn memory(d: usize) -> Timeline {
        Timeline::memory(CodeLayout::build(d, Shape::Single).unwrap(), d).unwrap()
    }

    fn surgery(d: usize) -> Timeline {
        let l = CodeLayout::build(d, Shape::MergedRough).unwrap();
        Timeline::lattice_surgery(l, LsSchedule::standard(d)).unwrap()
    }

    #[test]
    fn zero_residual_succeeds() {
        let tl = memory(3);
        let e = ErrorTableau::for_timeline(&tl);
        assert_eq!(judge_logical(&tl, &e).unwrap(), LogicalOutcome::default());
    }

    #[test]
    fn boundary_to_boundary_bit_flip_chain_fails() {
        let tl = memory(3);
        let l = tl.layout();
        let mut e = ErrorTableau::for_timeline(&tl);
        // column 0 runs between the two bit-flip boundaries; it meets row 0 once
        for r in (0..l.rows()).step_by(2) {
            e.set_x(0, l.cell(r, 0), true);
        }
        let out = judge_logical(&tl, &e).unwrap();
        assert!(out.x_fail && !out.z_fail);
    }

    #[test]
    fn boundary_to_boundary_phase_flip_chain_fails() {
        let tl = memory(3);
        let l = tl.layout();
        let mut e = ErrorTableau::for_timeline(&tl);
        for c in (0..l.cols()).step_by(2) {
            e.set_z(1, l.cell(0, c), true);
        }
        let out = judge_logical(&tl, &e).unwrap();
        assert!(!out.x_fail && out.z_fail);
    }

    #[test]
    fn stabilizers_do_not_change_the_verdict() {
        for d in [3, 5] {
            let tl = memory(d);
            let l = tl.layout();
            let mut logical = ErrorTableau::for_timeline(&tl);
            for r in (0..l.rows()).step_by(2) {
                logical.set_x(0, l.cell(r, 0), true);
            }
            for base in [ErrorTableau::for_timeline(&tl), logical] {
                let before = judge_logical(&tl, &base).unwrap();
                for a in (0..l.num_cells()).filter(|&c| l.kind(c).is_ancilla()) {
                    let mut e = base.clone();
                    for &q in l.neighbours(a) {
                        if l.kind(a) == CellKind::AncX {
                            e.flip_x(2, q);
                        } else {
                            e.flip_z(2, q);
                        }
                    }
                    assert_eq!(judge_logical(&tl, &e).unwrap(), before);
                }
            }
        }
    }

    #[test]
    fn refuses_residual_with_syndrome() {
        let tl = memory(3);
        let mut e = ErrorTableau::for_timeline(&tl);
        e.set_x(0, tl.layout().cell(2, 2), true);
        assert_eq!(judge_logical(&tl, &e), Err(LatticeError::NontrivialResidual(2)));
    }

    #[test]
    fn xx_parity_tracks_first_merge_flip() {
        let tl = surgery(3);
        let zero = ErrorTableau::for_timeline(&tl);
        assert!(!ls_logical_xx(&tl, &zero, &zero).unwrap());

        let m0 = tl.schedule().unwrap().first_merge_cycle();
        let a = tl.layout().cell(2, 5);
        let mut e = zero.clone();
        e.set_meas(m0, a, true);
        assert!(ls_logical_xx(&tl, &e, &zero).unwrap());
        assert!(!ls_logical_xx(&tl, &e, &e).unwrap());

        // a later flip on the same ancilla does not touch the parity
        let mut late = zero.clone();
        late.set_meas(m0 + 1, a, true);
        assert!(!ls_logical_xx(&tl, &late, &zero).unwrap());
    }

    #[test]
    fn xx_parity_needs_merged_timeline() {
        let tl = memory(3);
        let e = ErrorTableau::for_timeline(&tl);
        assert!(ls_logical_xx(&tl, &e, &e).is_err());
    }

    #[test]
    fn pre_merge_phase_flip_on_inner_edge_flips_xx() {
        let tl = surgery(3);
        let zero = ErrorTableau::for_timeline(&tl);
        let mut e = zero.clone();
        e.set_z(0, tl.layout().cell(2, 4), true);
        assert!(ls_logical_xx(&tl, &e, &zero).unwrap());
        // junction data sit under two junction stabilizers and cancel
        let mut j = zero.clone();
        j.set_z(1, tl.layout().cell(1, 5), true);
        assert!(!ls_logical_xx(&tl, &j, &zero).unwrap());
    }
}
