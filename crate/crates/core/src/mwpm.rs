//! Exact minimum-weight perfect matching of defects, each defect pairing with
//! another of its type or with the boundary.
//!
//! The reference solver is a dynamic program over subsets. Because a pair
//! `(i, j)` with `w_ij >= b_i + b_j` can always be split into two boundary
//! matches at no extra cost, defects only ever need to pair across edges with
//! `w_ij < b_i + b_j`; the connected components of those edges are solved
//! independently without losing optimality.

use mwmatching::Matching as Blossom;
use thiserror::Error;

use crate::graph::{DecodingGraph, Search};
use crate::lattice::{extract_detection, ErrorTableau, LatticeError};
use crate::online::{judge_frame, DecodeResult, DecoderContext};

/// Largest defect count the subset DP accepts.
pub const MAX_EXACT: usize = 20;

/// Component size above which [`Solver::Auto`] hands over to blossom; the DP's
/// `2^n` table gets slower than blossom well before its capacity.
pub const AUTO_DP_MAX: usize = 12;

/// Pair weight for defects that cannot be joined by any chain.
pub const UNPAIRABLE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MwpmError {
    #[error("{n} defects exceed the exact solver's capacity of {max}")]
    CapacityExceeded { n: usize, max: usize },
    #[error("defect at layer {t}, cell {cell} is not a detector of this graph")]
    NotADetector { t: usize, cell: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingProblem {
    /// `(t, cell)` of each defect.
    pub defects: Vec<(usize, usize)>,
    pub pairwise: Vec<Vec<u32>>,
    pub boundary: Vec<u32>,
}

impl MatchingProblem {
    pub fn len(&self) -> usize {
        self.defects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defects.is_empty()
    }

    fn sub(&self, idx: &[usize]) -> MatchingProblem {
        MatchingProblem {
            defects: idx.iter().map(|&i| self.defects[i]).collect(),
            pairwise: idx.iter().map(|&i| idx.iter().map(|&j| self.pairwise[i][j]).collect()).collect(),
            boundary: idx.iter().map(|&i| self.boundary[i]).collect(),
        }
    }

    /// Total weight of `m` under this problem.
    pub fn cost(&self, m: &Matching) -> u64 {
        m.pairs
            .iter()
            .map(|&(i, j)| match j {
                Some(j) => self.pairwise[i][j] as u64,
                None => self.boundary[i] as u64,
            })
            .sum()
    }
}

/// Pairs `(i, Some(j))` with `i < j`, boundary matches `(i, None)`, sorted by `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    pub pairs: Vec<(usize, Option<usize>)>,
    pub cost: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Subset DP only; components above [`MAX_EXACT`] are refused.
    SubsetDp,
    /// Subset DP, falling back to an exact blossom solver for large components.
    Auto,
}

fn searches(g: &DecodingGraph, defects: &[(usize, usize)]) -> Result<Vec<Search>, MwpmError> {
    defects
        .iter()
        .map(|&(t, cell)| {
            let n = g.node(t, cell).ok_or(MwpmError::NotADetector { t, cell })?;
            Ok(g.search(n, usize::MAX, u32::MAX))
        })
        .collect()
}

fn problem_from(g: &DecodingGraph, defects: &[(usize, usize)], s: &[Search]) -> MatchingProblem {
    let nodes: Vec<_> = defects.iter().map(|&(t, c)| g.node(t, c).unwrap()).collect();
    let pairwise = s
        .iter()
        .map(|si| nodes.iter().map(|&v| si.dist(v).unwrap_or(UNPAIRABLE)).collect())
        .collect();
    let boundary = s
        .iter()
        .map(|si| si.dist(g.boundary()).expect("every detector reaches the boundary"))
        .collect();
    MatchingProblem {
        defects: defects.to_vec(),
        pairwise,
        boundary,
    }
}

/// Shortest-path weights between defects and to the boundary on `g`.
pub fn build_problem(g: &DecodingGraph, defects: &[(usize, usize)]) -> Result<MatchingProblem, MwpmError> {
    let s = searches(g, defects)?;
    Ok(problem_from(g, defects, &s))
}

/// Cheapest matching by trying every pairing in turn; exponential, for
/// checking the solvers on small problems.
pub fn brute_force_cost(p: &MatchingProblem) -> u64 {
    fn go(p: &MatchingProblem, left: &mut Vec<usize>) -> u64 {
        let Some(i) = left.pop() else {
            return 0;
        };
        let mut best = p.boundary[i] as u64 + go(p, left);
        for k in 0..left.len() {
            let j = left.remove(k);
            if p.pairwise[i][j] != UNPAIRABLE {
                best = best.min(p.pairwise[i][j] as u64 + go(p, left));
            }
            left.insert(k, j);
        }
        left.push(i);
        best
    }
    go(p, &mut (0..p.len()).collect())
}

/// Subset DP: `f(S) = min(b_i + f(S-i), min_j w_ij + f(S-i-j))` with `i` the
/// lowest member of `S`. Ties prefer the smallest partner, then the boundary.
pub fn solve_exact(p: &MatchingProblem) -> Result<Matching, MwpmError> {
    let n = p.len();
    if n > MAX_EXACT {
        return Err(MwpmError::CapacityExceeded { n, max: MAX_EXACT });
    }
    const BOUNDARY: u8 = u8::MAX;
    let full = (1usize << n) - 1;
    let mut cost = vec![0u64; full + 1];
    let mut choice = vec![BOUNDARY; full + 1];
    for s in 1..=full {
        let i = s.trailing_zeros() as usize;
        let rest = s & !(1 << i);
        let mut best = u64::MAX;
        let mut pick = BOUNDARY;
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            r &= r - 1;
            let w = p.pairwise[i][j];
            if w == UNPAIRABLE {
                continue;
            }
            let c = w as u64 + cost[rest & !(1 << j)];
            if c < best {
                best = c;
                pick = j as u8;
            }
        }
        let c = p.boundary[i] as u64 + cost[rest];
        if c < best {
            best = c;
            pick = BOUNDARY;
        }
        cost[s] = best;
        choice[s] = pick;
    }
    let mut pairs = Vec::new();
    let mut s = full;
    while s != 0 {
        let i = s.trailing_zeros() as usize;
        s &= !(1 << i);
        match choice[s | (1 << i)] {
            BOUNDARY => pairs.push((i, None)),
            j => {
                pairs.push((i, Some(j as usize)));
                s &= !(1 << j);
            }
        }
    }
    Ok(Matching {
        pairs,
        cost: cost[full],
    })
}

/// Exact matching by weighted blossom on the problem doubled with boundary twins.
pub fn solve_blossom(p: &MatchingProblem) -> Matching {
    let n = p.len();
    if n == 0 {
        return Matching::default();
    }
    let useful = |i: usize, j: usize| {
        let w = p.pairwise[i][j];
        w != UNPAIRABLE && (w as u64) < p.boundary[i] as u64 + p.boundary[j] as u64
    };
    let mut top = p.boundary.iter().copied().max().unwrap_or(0) as i64;
    for i in 0..n {
        for j in i + 1..n {
            if useful(i, j) {
                top = top.max(p.pairwise[i][j] as i64);
            }
        }
    }
    let big = i32::try_from(top + 1).expect("weights fit the blossom solver");
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((i, n + i, big - p.boundary[i] as i32));
        for j in i + 1..n {
            if useful(i, j) {
                edges.push((i, j, big - p.pairwise[i][j] as i32));
            }
            edges.push((n + i, n + j, big));
        }
    }
    let mates = Blossom::new(edges).max_cardinality().solve();
    let mut pairs = Vec::new();
    for (i, &m) in mates.iter().enumerate().take(n) {
        if m == n + i {
            pairs.push((i, None));
        } else if m < n && i < m {
            pairs.push((i, Some(m)));
        } else {
            debug_assert!(m < n, "perfect matching on the doubled graph");
        }
    }
    let mut out = Matching { pairs, cost: 0 };
    out.cost = p.cost(&out);
    out
}

/// Solve component by component.
pub fn solve(p: &MatchingProblem, solver: Solver) -> Result<Matching, MwpmError> {
    let n = p.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            let w = p.pairwise[i][j];
            if w != UNPAIRABLE && (w as u64) < p.boundary[i] as u64 + p.boundary[j] as u64 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    let mut pairs = Vec::new();
    for idx in groups {
        let sub = p.sub(&idx);
        let m = match solver {
            Solver::SubsetDp => solve_exact(&sub)?,
            Solver::Auto if idx.len() <= AUTO_DP_MAX => solve_exact(&sub)?,
            Solver::Auto => solve_blossom(&sub),
        };
        pairs.extend(m.pairs.into_iter().map(|(i, j)| (idx[i], j.map(|j| idx[j]))));
    }
    pairs.sort();
    let mut out = Matching { pairs, cost: 0 };
    out.cost = p.cost(&out);
    Ok(out)
}

/// Decode a full record by matching each type's defects and writing the
/// shortest chains into a fresh frame.
pub fn mwpm_decode(ctx: &DecoderContext, e: &ErrorTableau, solver: Solver) -> Result<DecodeResult, MwpmError> {
    let tl = &ctx.timeline;
    let vol = extract_detection(tl, e)?;
    let mut frame = ErrorTableau::for_timeline(tl);
    for g in ctx.graphs.iter() {
        let defects: Vec<_> = vol.events_of(tl, g.kind()).collect();
        if defects.is_empty() {
            continue;
        }
        let s = searches(g, &defects)?;
        let problem = problem_from(g, &defects, &s);
        let m = solve(&problem, solver)?;
        for (i, j) in m.pairs {
            let target = match j {
                Some(j) => g.node(defects[j].0, defects[j].1).unwrap(),
                None => g.boundary(),
            };
            for mech in g.path(&s[i], target) {
                mech.apply(&mut frame);
            }
        }
    }
    Ok(judge_frame(tl, e, frame)?)
}
