//! Space-time matching graphs.
//!
//! Each ancilla type gets its own graph. Nodes are detectors `(t, cell)`,
//! numbered in lexicographic `(t, r, c)` order. Every elementary error
//! mechanism that toggles detectors of that type is an edge: two toggles give an
//! ordinary edge, one toggle an edge to the shared boundary sink.
//!
//! Weights are in grid cells: every data error costs 2 (it spans two cells
//! between same-type ancillas, or one ancilla and the boundary just beyond the
//! patch edge) and a measurement flip costs `time_weight`. On the bulk of a
//! patch the graph distance is therefore `|dr| + |dc| + time_weight * |dt|`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::lattice::{CellKind, ErrorTableau, Pauli, Timeline};

/// An elementary error: one Pauli component on a data qubit or one flipped
/// measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mechanism {
    Data { t: usize, q: usize, pauli: Pauli },
    Meas { t: usize, a: usize },
}

impl Mechanism {
    pub fn apply(&self, frame: &mut ErrorTableau) {
        match *self {
            Mechanism::Data { t, q, pauli: Pauli::X } => frame.flip_x(t, q),
            Mechanism::Data { t, q, pauli: Pauli::Z } => frame.flip_z(t, q),
            Mechanism::Meas { t, a } => frame.flip_meas(t, a),
        }
    }

    /// Detectors toggled by this mechanism.
    pub fn toggles(&self, tl: &Timeline) -> Vec<(usize, usize)> {
        match *self {
            Mechanism::Data { t, q, pauli } => tl.data_toggles(q, t, pauli),
            Mechanism::Meas { t, a } => tl.meas_toggles(a, t),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    to: u32,
    w: u32,
    mech: u32,
}

const NONE: u32 = u32::MAX;
pub const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct DecodingGraph {
    kind: CellKind,
    cells: usize,
    nodes: Vec<(usize, usize)>,
    node_of: Vec<u32>,
    adj: Vec<Vec<Edge>>,
    mechs: Vec<Mechanism>,
}

/// Result of a single-source search.
#[derive(Debug, Clone)]
pub struct Search {
    src: u32,
    dist: Vec<u32>,
    pred: Vec<(u32, u32)>,
}

impl Search {
    pub fn source(&self) -> usize {
        self.src as usize
    }

    /// Distance to `node`, or `None` if it was not reached.
    pub fn dist(&self, node: usize) -> Option<u32> {
        match self.dist[node] {
            UNREACHED => None,
            d => Some(d),
        }
    }
}

impl DecodingGraph {
    pub fn new(tl: &Timeline, kind: CellKind, time_weight: u32) -> Self {
        assert!(kind.is_ancilla());
        let layout = tl.layout();
        let cells = layout.num_cells();
        let mut nodes = Vec::new();
        let mut node_of = vec![NONE; tl.layers() * cells];
        for t in 0..tl.layers() {
            for a in tl.detector_cells(t) {
                if layout.kind(a) == kind {
                    node_of[t * cells + a] = nodes.len() as u32;
                    nodes.push((t, a));
                }
            }
        }
        let boundary = nodes.len() as u32;
        let mut g = Self {
            kind,
            cells,
            nodes,
            node_of,
            adj: vec![Vec::new(); boundary as usize + 1],
            mechs: Vec::new(),
        };

        let pauli = match kind {
            CellKind::AncZ => Pauli::X,
            _ => Pauli::Z,
        };
        let add = |g: &mut Self, m: Mechanism, w: u32| {
            let hits = m.toggles(tl);
            let ends: Vec<u32> = hits.iter().map(|&(t, a)| g.node_of[t * cells + a]).collect();
            let (u, v) = match ends.as_slice() {
                [u] => (*u, boundary),
                [u, v] => (*u, *v),
                [] => return,
                _ => unreachable!("mechanism toggles more than two detectors"),
            };
            // Parallel mechanisms share an edge; the first one found represents it.
            if g.adj[u as usize].iter().any(|e| e.to == v) {
                return;
            }
            let id = g.mechs.len() as u32;
            g.mechs.push(m);
            g.adj[u as usize].push(Edge { to: v, w, mech: id });
            g.adj[v as usize].push(Edge { to: u, w, mech: id });
        };
        for t in 0..tl.layers() {
            for q in layout.cells_of(CellKind::Data) {
                add(&mut g, Mechanism::Data { t, q, pauli }, 2);
            }
            for a in layout.cells_of(kind) {
                add(&mut g, Mechanism::Meas { t, a }, time_weight);
            }
        }
        g
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Index of the boundary sink.
    pub fn boundary(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, t: usize, cell: usize) -> Option<usize> {
        match self.node_of.get(t * self.cells + cell) {
            Some(&n) if n != NONE => Some(n as usize),
            _ => None,
        }
    }

    pub fn coords(&self, node: usize) -> (usize, usize) {
        self.nodes[node]
    }

    pub fn mechanisms(&self) -> &[Mechanism] {
        &self.mechs
    }

    pub fn num_edges(&self) -> usize {
        self.mechs.len()
    }

    /// Dijkstra from `src` over nodes with layer `<= t_max`, settling nothing
    /// beyond `cutoff`. The boundary is reached but never expanded.
    pub fn search(&self, src: usize, t_max: usize, cutoff: u32) -> Search {
        let n = self.adj.len();
        let boundary = self.boundary() as u32;
        let mut dist = vec![UNREACHED; n];
        let mut pred = vec![(NONE, NONE); n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0;
        heap.push(Reverse((0u32, src as u32)));
        while let Some(Reverse((du, u))) = heap.pop() {
            if du > dist[u as usize] || u == boundary {
                continue;
            }
            for e in &self.adj[u as usize] {
                if e.to != boundary && self.nodes[e.to as usize].0 > t_max {
                    continue;
                }
                let dv = du.saturating_add(e.w);
                if dv > cutoff || dv >= dist[e.to as usize] {
                    continue;
                }
                dist[e.to as usize] = dv;
                pred[e.to as usize] = (u, e.mech);
                heap.push(Reverse((dv, e.to)));
            }
        }
        Search {
            src: src as u32,
            dist,
            pred,
        }
    }

    /// Mechanisms along the recorded shortest path from the search source to `target`.
    pub fn path(&self, s: &Search, target: usize) -> Vec<Mechanism> {
        assert!(s.dist[target] != UNREACHED, "target not reached");
        let mut out = Vec::new();
        let mut v = target as u32;
        while v != s.src {
            let (u, m) = s.pred[v as usize];
            out.push(self.mechs[m as usize]);
            v = u;
        }
        out.reverse();
        out
    }
}

/// The pair of graphs for one timeline.
#[derive(Debug, Clone)]
pub struct DecodingGraphs {
    pub x: DecodingGraph,
    pub z: DecodingGraph,
}

impl DecodingGraphs {
    /// `x` matches X-type detectors (phase flips), `z` matches Z-type detectors (bit flips).
    pub fn new(tl: &Timeline, time_weight: u32) -> Self {
        Self {
            x: DecodingGraph::new(tl, CellKind::AncX, time_weight),
            z: DecodingGraph::new(tl, CellKind::AncZ, time_weight),
        }
    }

    pub fn for_kind(&self, kind: CellKind) -> &DecodingGraph {
        match kind {
            CellKind::AncX => &self.x,
            CellKind::AncZ => &self.z,
            _ => panic!("no matching graph for {kind:?}"),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &DecodingGraph> {
        [&self.x, &self.z].into_iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{extract_detection, CodeLayout, LsSchedule, Shape};

    fn timelines() -> Vec<Timeline> {
        let single = Timeline::memory(CodeLayout::build(3, Shape::Single).unwrap(), 3).unwrap();
        let merged = Timeline::lattice_surgery(
            CodeLayout::build(3, Shape::MergedRough).unwrap(),
            LsSchedule::standard(3),
        )
        .unwrap();
        vec![single, merged]
    }

    #[test]
    fn mechanism_toggles_equal_extraction() {
        for tl in timelines() {
            let l = tl.layout();
            let mut mechs = Vec::new();
            for t in 0..tl.layers() {
                for c in 0..l.num_cells() {
                    for pauli in [Pauli::X, Pauli::Z] {
                        if tl.data_live(c, t) {
                            mechs.push(Mechanism::Data { t, q: c, pauli });
                        }
                    }
                    if tl.meas_live(c, t) {
                        mechs.push(Mechanism::Meas { t, a: c });
                    }
                }
            }
            for m in mechs {
                let mut e = ErrorTableau::for_timeline(&tl);
                m.apply(&mut e);
                let vol = extract_detection(&tl, &e).unwrap();
                let mut hot: Vec<_> = (0..tl.layers())
                    .flat_map(|t| (0..l.num_cells()).map(move |c| (t, c)))
                    .filter(|&(t, c)| vol.get(t, c))
                    .collect();
                hot.sort();
                let mut expect = m.toggles(&tl);
                expect.sort();
                assert_eq!(hot, expect, "{m:?}");
            }
        }
    }

    #[test]
    fn bulk_distances_are_manhattan() {
        let tl = Timeline::memory(CodeLayout::build(5, Shape::Single).unwrap(), 5).unwrap();
        let l = tl.layout();
        let g = DecodingGraphs::new(&tl, 1);
        for kind in [CellKind::AncX, CellKind::AncZ] {
            let g = g.for_kind(kind);
            let centre = if kind == CellKind::AncX { l.cell(4, 3) } else { l.cell(3, 4) };
            let src = g.node(2, centre).unwrap();
            let (ts, cs) = g.coords(src);
            let (rs, ccs) = l.coords(cs);
            let s = g.search(src, usize::MAX, u32::MAX);
            for v in 0..g.num_nodes() {
                let (t, c) = g.coords(v);
                let (r, cc) = l.coords(c);
                let manhattan = r.abs_diff(rs) + cc.abs_diff(ccs) + t.abs_diff(ts);
                assert_eq!(s.dist(v).unwrap() as usize, manhattan);
            }
        }
    }

    #[test]
    fn spec_example_distances() {
        let tl = Timeline::memory(CodeLayout::build(3, Shape::Single).unwrap(), 3).unwrap();
        let l = tl.layout();
        let g = &DecodingGraphs::new(&tl, 1).z;
        let u = g.node(0, l.cell(1, 2)).unwrap();
        let v = g.node(0, l.cell(3, 2)).unwrap();
        let s = g.search(u, usize::MAX, u32::MAX);
        assert_eq!(s.dist(v), Some(2));
        assert_eq!(s.dist(g.boundary()), Some(2));
        let path = g.path(&s, v);
        assert_eq!(
            path,
            vec![Mechanism::Data {
                t: 0,
                q: l.cell(2, 2),
                pauli: Pauli::X
            }]
        );
    }

    #[test]
    fn time_bound_and_cutoff_limit_the_search() {
        let tl = Timeline::memory(CodeLayout::build(3, Shape::Single).unwrap(), 3).unwrap();
        let l = tl.layout();
        let g = &DecodingGraphs::new(&tl, 1).x;
        let a = l.cell(2, 1);
        let src = g.node(0, a).unwrap();
        let s = g.search(src, 1, u32::MAX);
        assert_eq!(s.dist(g.node(1, a).unwrap()), Some(1));
        assert_eq!(s.dist(g.node(2, a).unwrap()), None);
        let s = g.search(src, usize::MAX, 1);
        assert_eq!(s.dist(g.node(2, a).unwrap()), None);
    }

    #[test]
    fn path_applies_to_endpoint_events_only() {
        for tl in timelines() {
            let graphs = DecodingGraphs::new(&tl, 1);
            for g in graphs.iter() {
                let src = 0;
                let s = g.search(src, usize::MAX, u32::MAX);
                for v in (0..g.num_nodes()).step_by(3).chain([g.boundary()]) {
                    let mut e = ErrorTableau::for_timeline(&tl);
                    for m in g.path(&s, v) {
                        m.apply(&mut e);
                    }
                    let vol = extract_detection(&tl, &e).unwrap();
                    let mut expect = vec![g.coords(src)];
                    if v != g.boundary() && v != src {
                        expect.push(g.coords(v));
                    }
                    if v == src {
                        expect.clear();
                    }
                    let mut hot: Vec<_> = (0..tl.layers())
                        .flat_map(|t| (0..tl.layout().num_cells()).map(move |c| (t, c)))
                        .filter(|&(t, c)| vol.get(t, c))
                        .collect();
                    hot.sort();
                    expect.sort();
                    assert_eq!(hot, expect);
                }
            }
        }
    }

    #[test]
    fn every_detector_reaches_the_boundary() {
        for tl in timelines() {
            for g in DecodingGraphs::new(&tl, 1).iter() {
                for v in 0..g.num_nodes() {
                    let s = g.search(v, usize::MAX, u32::MAX);
                    assert!(s.dist(g.boundary()).is_some());
                }
            }
        }
    }
}
