use super::conv::{BitPlanes, Planes};
use super::NnError;
use crate::lattice::{CellKind, CodeLayout, DetectionVolume, Timeline};

/// First-stage input for one target layer: `2K` event channels, alternating
/// X-type and Z-type ancillas for layers `t..t+K`, then the X- and Z-boundary
/// masks of the layout at `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WindowInput {
    k: usize,
    target: usize,
    bits: BitPlanes,
}

impl WindowInput {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn bits(&self) -> &BitPlanes {
        &self.bits
    }

    pub fn to_planes(&self) -> Planes {
        self.bits.to_planes()
    }

    pub fn into_bits(self) -> BitPlanes {
        self.bits
    }
}

/// Layers past the final perfect round are zero-filled.
pub fn build_window(tl: &Timeline, vol: &DetectionVolume, t: usize, k: usize) -> Result<WindowInput, NnError> {
    if t >= vol.layers() {
        return Err(NnError::WindowOutOfRange { t, layers: vol.layers() });
    }
    let layout = tl.layout();
    let (h, w) = (layout.rows(), layout.cols());
    let mut bits = BitPlanes::zeros(2 * k + 2, h, w);
    for i in 0..k {
        let u = t + i;
        if u >= vol.layers() {
            break;
        }
        let events = vol.layer(u);
        for (cell, &hot) in events.iter().enumerate() {
            if !hot {
                continue;
            }
            let ch = match layout.kind(cell) {
                CellKind::AncX => 2 * i,
                CellKind::AncZ => 2 * i + 1,
                _ => continue,
            };
            bits.plane_mut(ch)[cell] = true;
        }
    }
    let (xb, zb) = tl.boundary_masks(t);
    bits.plane_mut(2 * k).copy_from_slice(&xb);
    bits.plane_mut(2 * k + 1).copy_from_slice(&zb);
    Ok(WindowInput { k, target: t, bits })
}

/// Raw four-channel output of a decoder network.
#[derive(Debug, Clone, PartialEq)]
pub enum NetOutput {
    Probs(Planes),
    Bits(BitPlanes),
}

/// Errors inferred on one target layer, indexed by cell.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InferredErrors {
    pub x_on_data: Vec<bool>,
    pub z_on_data: Vec<bool>,
    pub mflip_on_ancx: Vec<bool>,
    pub mflip_on_ancz: Vec<bool>,
}

impl InferredErrors {
    pub fn is_empty(&self) -> bool {
        [&self.x_on_data, &self.z_on_data, &self.mflip_on_ancx, &self.mflip_on_ancz]
            .iter()
            .all(|v| !v.iter().any(|&b| b))
    }

    pub fn count(&self) -> usize {
        [&self.x_on_data, &self.z_on_data, &self.mflip_on_ancx, &self.mflip_on_ancz]
            .iter()
            .map(|v| v.iter().filter(|&&b| b).count())
            .sum()
    }
}

/// Flag a cell when its value exceeds 0.5 (or its bit is set) and its kind
/// matches the channel: data for channels 0 and 1, X-type and Z-type ancillas
/// for channels 2 and 3.
pub fn threshold_outputs(out: &NetOutput, layout: &CodeLayout) -> InferredErrors {
    let n = layout.num_cells();
    let flag = |c: usize, cell: usize| -> bool {
        match out {
            NetOutput::Probs(p) => p.plane(c)[cell] > 0.5,
            NetOutput::Bits(b) => b.plane(c)[cell],
        }
    };
    let mask = |c: usize, kind: CellKind| -> Vec<bool> {
        (0..n).map(|cell| layout.kind(cell) == kind && flag(c, cell)).collect()
    };
    InferredErrors {
        x_on_data: mask(0, CellKind::Data),
        z_on_data: mask(1, CellKind::Data),
        mflip_on_ancx: mask(2, CellKind::AncX),
        mflip_on_ancz: mask(3, CellKind::AncZ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{CodeLayout, Shape};

    fn tl() -> Timeline {
        Timeline::memory(CodeLayout::build(3, Shape::Single).unwrap(), 3).unwrap()
    }

    #[test]
    fn empty_volume_gives_mask_channels_only() {
        let tl = tl();
        let vol = DetectionVolume::zeros(tl.layers(), tl.layout().num_cells());
        let win = build_window(&tl, &vol, 0, 4).unwrap();
        let b = win.bits();
        assert_eq!(b.ch, 10);
        for c in 0..8 {
            assert!(!b.plane(c).iter().any(|&v| v));
        }
        assert_eq!(b.plane(8), tl.layout().x_boundary_mask());
        assert_eq!(b.plane(9), tl.layout().z_boundary_mask());
    }

    #[test]
    fn single_z_event_lands_in_channel_one() {
        let tl = tl();
        let l = tl.layout();
        let mut vol = DetectionVolume::zeros(tl.layers(), l.num_cells());
        vol.set(1, l.cell(1, 2), true);
        let win = build_window(&tl, &vol, 1, 3).unwrap();
        let hot: Vec<_> = (0..2 * 3)
            .flat_map(|c| (0..l.num_cells()).map(move |i| (c, i)))
            .filter(|&(c, i)| win.bits().plane(c)[i])
            .collect();
        assert_eq!(hot, vec![(1, l.cell(1, 2))]);
    }

    #[test]
    fn tail_is_zero_padded_and_range_checked() {
        let tl = tl();
        let l = tl.layout();
        let mut vol = DetectionVolume::zeros(tl.layers(), l.num_cells());
        vol.set(3, l.cell(2, 1), true);
        let win = build_window(&tl, &vol, 3, 4).unwrap();
        assert!(win.bits().plane(0)[l.cell(2, 1)]);
        assert!(build_window(&tl, &vol, 4, 4).is_err());
    }

    #[test]
    fn strict_threshold_and_masking() {
        let l = CodeLayout::build(3, Shape::Single).unwrap();
        let mut p = Planes::zeros(4, 5, 5);
        p.data.fill(0.5);
        assert!(threshold_outputs(&NetOutput::Probs(p.clone()), &l).is_empty());
        p.set(0, 2, 2, 0.51);
        p.set(0, 1, 2, 0.9);
        let inf = threshold_outputs(&NetOutput::Probs(p), &l);
        assert_eq!(inf.count(), 1);
        assert!(inf.x_on_data[l.cell(2, 2)]);
    }
}
