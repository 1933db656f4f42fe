//! Phenomenological depolarizing noise.

use rand::Rng;

use super::tableau::ErrorTableau;
use super::timeline::Timeline;
use super::LatticeError;
use crate::lattice::CellKind;
use crate::rng::trial_rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub p: f64,
    pub seed: u64,
    pub trial_index: u64,
}

impl NoiseParams {
    pub fn new(p: f64, seed: u64, trial_index: u64) -> Self {
        Self {
            p,
            seed,
            trial_index,
        }
    }
}

/// Sample one trial.
///
/// Each live data qubit suffers X, Y or Z with probability `p / 3` each, per
/// noisy cycle, Y setting both components. Each measured ancilla reports a
/// flipped outcome with probability `2p / 3`. Draw order is cycle-major, then
/// row-major over cells, so a `(seed, trial_index)` pair fixes the sample.
pub fn sample_errors(tl: &Timeline, params: &NoiseParams) -> Result<ErrorTableau, LatticeError> {
    if !(0.0..=1.0).contains(&params.p) {
        return Err(LatticeError::InvalidRate(params.p));
    }
    let mut e = ErrorTableau::for_timeline(tl);
    if params.p == 0.0 {
        return Ok(e);
    }
    let layout = tl.layout();
    let third = params.p / 3.0;
    let mut rng = trial_rng(params.seed, params.trial_index);
    for t in 0..tl.cycles() {
        for cell in 0..layout.num_cells() {
            match layout.kind(cell) {
                CellKind::Data if tl.data_live(cell, t) => {
                    let u: f64 = rng.gen();
                    if u < third {
                        e.set_x(t, cell, true);
                    } else if u < 2.0 * third {
                        e.set_x(t, cell, true);
                        e.set_z(t, cell, true);
                    } else if u < params.p {
                        e.set_z(t, cell, true);
                    }
                }
                CellKind::AncX | CellKind::AncZ if tl.meas_live(cell, t) => {
                    let u: f64 = rng.gen();
                    if u < 2.0 * third {
                        e.set_meas(t, cell, true);
                    }
                }
                _ => {}
            }
        }
    }
    Ok(e)
}
