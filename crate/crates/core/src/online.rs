//! Buffered greedy second stage and the two-stage online pipeline.
//!
//! Detection layers arrive one at a time. A defect may start a match once
//! `th_v` layers (its own included) have been buffered; its partner may be any
//! live defect already in the buffer. Each greedy pass grows a search radius
//! `rho = 1..=r_max`: in lexicographic `(t, r, c)` order every eligible defect
//! takes the nearest live partner within `rho` (ties to the lexicographically
//! smaller partner), else the boundary if that lies within `rho`. Defects left
//! over carry forward to the next layer. The final flush repeats this with an
//! unbounded radius until the buffer is empty.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{DecodingGraph, DecodingGraphs, Mechanism};
use crate::lattice::{
    apply_frame, extract_detection, judge_logical, ls_logical_xx, CellKind, DetectionVolume,
    ErrorTableau, LatticeError, LogicalOutcome, Shape, Timeline,
};
use crate::nn::{build_window, threshold_outputs, ConvNet, NnError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OnlineError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("layer {t} ingested after layer {last}")]
    OutOfOrder { t: usize, last: usize },
    #[error("invalid online configuration: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OnlineConfig {
    pub th_v: usize,
    pub r_max: u32,
    pub time_weight: u32,
}

impl OnlineConfig {
    /// `th_v = 2`, `r_max = 2d`, `time_weight = 1`.
    pub fn for_distance(d: usize) -> Self {
        Self {
            th_v: 2,
            r_max: 2 * d as u32,
            time_weight: 1,
        }
    }

    pub fn validate(&self) -> Result<(), OnlineError> {
        if self.th_v == 0 {
            return Err(OnlineError::InvalidConfig("th_v must be at least 1"));
        }
        if self.r_max == 0 {
            return Err(OnlineError::InvalidConfig("r_max must be at least 1"));
        }
        if self.time_weight == 0 {
            return Err(OnlineError::InvalidConfig("time_weight must be at least 1"));
        }
        Ok(())
    }
}

/// Live defects per ancilla type, kept in `(t, cell)` order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DefectBuffer {
    x: BTreeSet<(usize, usize)>,
    z: BTreeSet<(usize, usize)>,
    last: Option<usize>,
}

impl DefectBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty() && self.z.is_empty()
    }

    pub fn len(&self) -> usize {
        self.x.len() + self.z.len()
    }

    /// Last ingested layer.
    pub fn last_layer(&self) -> Option<usize> {
        self.last
    }

    pub fn defects(&self, kind: CellKind) -> &BTreeSet<(usize, usize)> {
        match kind {
            CellKind::AncX => &self.x,
            CellKind::AncZ => &self.z,
            _ => panic!("no defects of kind {kind:?}"),
        }
    }

    fn defects_mut(&mut self, kind: CellKind) -> &mut BTreeSet<(usize, usize)> {
        match kind {
            CellKind::AncX => &mut self.x,
            CellKind::AncZ => &mut self.z,
            _ => panic!("no defects of kind {kind:?}"),
        }
    }

    /// Append the true events of layer `t`, which must follow the previous one.
    pub fn ingest_layer(&mut self, tl: &Timeline, events: &[bool], t: usize) -> Result<(), OnlineError> {
        if let Some(last) = self.last {
            if t <= last {
                return Err(OnlineError::OutOfOrder { t, last });
            }
        }
        let layout = tl.layout();
        if events.len() != layout.num_cells() {
            return Err(LatticeError::DimensionMismatch.into());
        }
        self.last = Some(t);
        for (cell, _) in events.iter().enumerate().filter(|(_, &e)| e) {
            match layout.kind(cell) {
                CellKind::AncX => self.x.insert((t, cell)),
                CellKind::AncZ => self.z.insert((t, cell)),
                _ => return Err(LatticeError::DimensionMismatch.into()),
            };
        }
        Ok(())
    }
}

/// One greedy decision and the correction chain written to the frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub kind: CellKind,
    pub a: (usize, usize),
    /// `None` for a boundary match.
    pub b: Option<(usize, usize)>,
    pub weight: u32,
    pub chain: Vec<Mechanism>,
}

fn greedy_kind(
    set: &mut BTreeSet<(usize, usize)>,
    g: &DecodingGraph,
    init_max: usize,
    t_max: usize,
    r_max: Option<u32>,
    frame: &mut ErrorTableau,
    out: &mut Vec<Match>,
) {
    let mut rho = 1u32;
    loop {
        if !set.iter().any(|&(t, _)| t <= init_max) {
            return;
        }
        if r_max.is_some_and(|r| rho > r) {
            return;
        }
        let initiators: Vec<_> = set.iter().copied().take_while(|&(t, _)| t <= init_max).collect();
        for u in initiators {
            if !set.contains(&u) {
                continue;
            }
            let src = g.node(u.0, u.1).expect("defect on a detector");
            let s = g.search(src, t_max, rho);
            let partner = set
                .iter()
                .filter(|&&v| v != u)
                .filter_map(|&v| s.dist(g.node(v.0, v.1).expect("defect on a detector")).map(|d| (d, v)))
                .min();
            let (target, b, weight) = match partner {
                Some((d, v)) => (g.node(v.0, v.1).unwrap(), Some(v), d),
                None => match s.dist(g.boundary()) {
                    Some(d) => (g.boundary(), None, d),
                    None => continue,
                },
            };
            let chain = g.path(&s, target);
            for m in &chain {
                m.apply(frame);
            }
            set.remove(&u);
            if let Some(v) = b {
                set.remove(&v);
            }
            out.push(Match {
                kind: g.kind(),
                a: u,
                b,
                weight,
                chain,
            });
        }
        rho = rho.checked_add(1).expect("search radius overflow");
    }
}

/// One greedy pass over the buffer after layer `t_now` has been ingested.
pub fn greedy_step(
    buf: &mut DefectBuffer,
    graphs: &DecodingGraphs,
    cfg: &OnlineConfig,
    t_now: usize,
    frame: &mut ErrorTableau,
) -> Vec<Match> {
    let mut out = Vec::new();
    let Some(init_max) = (t_now + 1).checked_sub(cfg.th_v) else {
        return out;
    };
    for g in graphs.iter() {
        greedy_kind(buf.defects_mut(g.kind()), g, init_max, t_now, Some(cfg.r_max), frame, &mut out);
    }
    out
}

/// Match every remaining defect, growing the radius without bound.
pub fn final_flush(buf: &mut DefectBuffer, graphs: &DecodingGraphs, frame: &mut ErrorTableau) -> Vec<Match> {
    let mut out = Vec::new();
    for g in graphs.iter() {
        greedy_kind(buf.defects_mut(g.kind()), g, usize::MAX, usize::MAX, None, frame, &mut out);
    }
    debug_assert!(buf.is_empty());
    out
}

/// A timeline with its matching graphs and second-stage settings, shared by
/// all trials of an experiment.
#[derive(Debug, Clone)]
pub struct DecoderContext {
    pub timeline: Timeline,
    pub graphs: DecodingGraphs,
    pub config: OnlineConfig,
}

impl DecoderContext {
    pub fn new(timeline: Timeline, config: OnlineConfig) -> Result<Self, OnlineError> {
        config.validate()?;
        let graphs = DecodingGraphs::new(&timeline, config.time_weight);
        Ok(Self {
            timeline,
            graphs,
            config,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub frame: ErrorTableau,
    pub outcome: LogicalOutcome,
    /// Whether the logical XX parity of a merge came out wrong.
    pub xx_fail: Option<bool>,
}

impl DecodeResult {
    pub fn failed(&self) -> bool {
        self.outcome.failed() || self.xx_fail == Some(true)
    }
}

/// Judge a finished frame: logical overlap on the residual, plus the XX
/// parity for a merge-and-split timeline.
pub fn judge_frame(tl: &Timeline, e: &ErrorTableau, frame: ErrorTableau) -> Result<DecodeResult, LatticeError> {
    let residual = apply_frame(e, &frame)?;
    let outcome = judge_logical(tl, &residual)?;
    let xx_fail = match tl.layout().shape() {
        Shape::MergedRough => Some(ls_logical_xx(tl, e, &frame)?),
        Shape::Single => None,
    };
    Ok(DecodeResult {
        frame,
        outcome,
        xx_fail,
    })
}

/// Apply one first-stage inference to target layer `j`: corrections go to the
/// frame and their event signatures are cancelled in `vol`.
fn nn_correct(
    tl: &Timeline,
    net: &ConvNet,
    vol: &mut DetectionVolume,
    j: usize,
    frame: &mut ErrorTableau,
) -> Result<usize, OnlineError> {
    let win = build_window(tl, vol, j, net.k())?;
    let inferred = threshold_outputs(&net.infer(&win)?, tl.layout());
    let mut mechs = Vec::new();
    for cell in 0..tl.layout().num_cells() {
        if tl.data_live(cell, j) {
            if inferred.x_on_data[cell] {
                mechs.push(Mechanism::Data { t: j, q: cell, pauli: crate::lattice::Pauli::X });
            }
            if inferred.z_on_data[cell] {
                mechs.push(Mechanism::Data { t: j, q: cell, pauli: crate::lattice::Pauli::Z });
            }
        }
        if tl.meas_live(cell, j) && (inferred.mflip_on_ancx[cell] || inferred.mflip_on_ancz[cell]) {
            mechs.push(Mechanism::Meas { t: j, a: cell });
        }
    }
    for m in &mechs {
        m.apply(frame);
        for (t, a) in m.toggles(tl) {
            vol.flip(t, a);
        }
    }
    Ok(mechs.len())
}

/// Decode one trial online. With a network, target layer `j` is corrected by
/// the first stage (which sees layers `j..j+K`) before the second stage
/// ingests it; without one, layers go straight to the buffer.
pub fn run_pipeline(ctx: &DecoderContext, e: &ErrorTableau, net: Option<&ConvNet>) -> Result<DecodeResult, OnlineError> {
    let tl = &ctx.timeline;
    if let Some(net) = net {
        net.check_decoder()?;
        if net.k() == 0 {
            return Err(OnlineError::InvalidConfig("window depth K must be at least 1"));
        }
    }
    let mut vol = extract_detection(tl, e)?;
    let mut frame = ErrorTableau::for_timeline(tl);
    let mut buf = DefectBuffer::new();
    for j in 0..tl.layers() {
        if let Some(net) = net {
            if j < tl.cycles() {
                nn_correct(tl, net, &mut vol, j, &mut frame)?;
            }
        }
        buf.ingest_layer(tl, vol.layer(j), j)?;
        greedy_step(&mut buf, &ctx.graphs, &ctx.config, j, &mut frame);
    }
    final_flush(&mut buf, &ctx.graphs, &mut frame);
    Ok(judge_frame(tl, e, frame)?)
}
