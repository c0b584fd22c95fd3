//! The random greedy independent set process.
//!
//! Live edges are never copied: each original edge carries one status byte
//! holding the number of its vertices already in `I`, or [`DEAD`] once it
//! has been removed. The live residual of an edge is its original vertex
//! list minus the chosen vertices.
//!
//! Live residuals always form an antichain of distinct sets. After `v` is
//! chosen, a freshly shrunk residual `f = e \ {v}` cannot contain another
//! live residual (that one would already lie inside `e`), so the domination
//! sweep only has to look for live supersets of `f`, which share every
//! vertex of `f` and are found by intersecting incidence lists.

mod reference;
mod run;

pub use reference::reference_transition;
pub use run::{run, run_with, Checkpoint, RunOptions, RunTrace, StopSettings};

use crate::error::{Error, Result};
use crate::hypergraph::{EdgeId, Hypergraph, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

const DEAD: u8 = u8::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum VertexState {
    Open,
    Chosen,
    Closed,
}

/// What happened in one step.
#[derive(Clone, Debug, Default, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub chosen: Vertex,
    /// Vertices closed by a live 2-edge through the chosen vertex.
    pub closed: Vec<Vertex>,
    /// Edges shrunk, keyed by their new size.
    pub shrink: BTreeMap<usize, usize>,
    /// Edges removed because they met a closed vertex, keyed by size at removal.
    pub closure: BTreeMap<usize, usize>,
    /// Edges removed because they contained a live edge, keyed by size at removal.
    pub domination: BTreeMap<usize, usize>,
}

/// Degree distribution of one edge size over the open vertices.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DegreeSummary {
    pub size: usize,
    pub mean: f64,
    pub min: u32,
    pub max: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub step: usize,
    pub open: usize,
    /// Live edge counts indexed by size (entries 0 and 1 are always zero).
    pub live_by_size: Vec<usize>,
    pub degrees: Vec<DegreeSummary>,
}

impl Snapshot {
    pub fn live_edges(&self) -> usize {
        self.live_by_size.iter().sum()
    }
}

/// Mutable state `(I(i), V(i), H(i))` with per-vertex degree trackers.
#[derive(Clone)]
pub struct ProcessState<'h> {
    h: &'h Hypergraph,
    r: usize,
    seed: u64,
    rng: ChaCha8Rng,
    status: Vec<u8>,
    state: Vec<VertexState>,
    open: Vec<Vertex>,
    pos: Vec<u32>,
    independent: Vec<Vertex>,
    // per-vertex rows of width r + 1, indexed by edge size
    initial: Vec<u32>,
    created: Vec<u32>,
    destroyed: Vec<u32>,
    live_by_size: Vec<usize>,
    // scratch buffers reused across steps
    through: Vec<EdgeId>,
    fresh: Vec<EdgeId>,
    residual: Vec<Vertex>,
    candidates: Vec<EdgeId>,
}

impl<'h> ProcessState<'h> {
    pub fn new(h: &'h Hypergraph, seed: u64) -> Result<Self> {
        let r = h.max_edge_size();
        if r >= DEAD as usize {
            return Err(Error::input("edges of 255 or more vertices are not supported"));
        }
        let n = h.vertex_count();
        let width = r + 1;
        let mut st = ProcessState {
            h,
            r,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            status: vec![0; h.edge_count()],
            state: vec![VertexState::Open; n],
            open: (0..n as Vertex).collect(),
            pos: (0..n as u32).collect(),
            independent: Vec::new(),
            initial: vec![0; n * width],
            created: vec![0; n * width],
            destroyed: vec![0; n * width],
            live_by_size: vec![0; width],
            through: Vec::new(),
            fresh: Vec::new(),
            residual: Vec::new(),
            candidates: Vec::new(),
        };
        if h.uniformity().is_none() {
            st.remove_initial_supersets();
        }
        for id in 0..h.edge_count() as EdgeId {
            if st.status[id as usize] != DEAD {
                let e = h.edge(id);
                st.live_by_size[e.len()] += 1;
                for &w in e {
                    st.initial[w as usize * width + e.len()] += 1;
                }
            }
        }
        Ok(st)
    }

    fn remove_initial_supersets(&mut self) {
        let mut supersets = Vec::new();
        for id in 0..self.h.edge_count() as EdgeId {
            let lists: Vec<&[EdgeId]> = self.h.edge(id).iter().map(|&w| self.h.incident(w)).collect();
            intersect_sorted(&lists, &mut supersets);
            for &g in &supersets {
                if g != id {
                    self.status[g as usize] = DEAD;
                }
            }
        }
    }

    pub fn hypergraph(&self) -> &'h Hypergraph {
        self.h
    }

    /// Largest edge size `r`.
    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn step_index(&self) -> usize {
        self.independent.len()
    }

    pub fn independent_set(&self) -> &[Vertex] {
        &self.independent
    }

    /// Open vertices in internal (swap-removal) order.
    pub fn open_vertices(&self) -> &[Vertex] {
        &self.open
    }

    pub fn open_count(&self) -> usize {
        self.open.len()
    }

    pub fn is_complete(&self) -> bool {
        self.open.is_empty()
    }

    pub fn vertex_state(&self, v: Vertex) -> VertexState {
        self.state[v as usize]
    }

    /// Trackers of chosen and closed vertices stay at their last values.
    pub fn is_frozen(&self, v: Vertex) -> bool {
        self.state[v as usize] != VertexState::Open
    }

    fn slot(&self, v: Vertex, size: usize) -> usize {
        v as usize * (self.r + 1) + size
    }

    /// Cumulative `d_ℓ^+(v)`: live edges of size `size` created through `v` by shrinking.
    pub fn created(&self, v: Vertex, size: usize) -> u32 {
        self.created[self.slot(v, size)]
    }

    /// Cumulative `d_ℓ^-(v)`: edges of size `size` through `v` that shrank or were removed.
    pub fn destroyed(&self, v: Vertex, size: usize) -> u32 {
        self.destroyed[self.slot(v, size)]
    }

    /// Current number of live edges of size `size` containing `v`, from the trackers.
    pub fn live_degree(&self, v: Vertex, size: usize) -> u32 {
        let s = self.slot(v, size);
        self.initial[s] + self.created[s] - self.destroyed[s]
    }

    pub fn live_count(&self, size: usize) -> usize {
        self.live_by_size.get(size).copied().unwrap_or(0)
    }

    pub fn live_edge_total(&self) -> usize {
        self.live_by_size.iter().sum()
    }

    #[inline]
    fn alive(&self, e: EdgeId) -> bool {
        self.status[e as usize] != DEAD
    }

    #[inline]
    fn residual_len(&self, e: EdgeId) -> usize {
        self.h.edge(e).len() - self.status[e as usize] as usize
    }

    /// Live residual of edge `e` (its vertices outside `I`), if the edge is live.
    pub fn residual_of(&self, e: EdgeId) -> Option<Vec<Vertex>> {
        self.alive(e).then(|| {
            self.h
                .edge(e)
                .iter()
                .copied()
                .filter(|&w| self.state[w as usize] != VertexState::Chosen)
                .collect()
        })
    }

    /// Calls `f(id, residual)` for every live edge.
    pub fn for_each_live_edge(&self, mut f: impl FnMut(EdgeId, &[Vertex])) {
        let mut buf = Vec::with_capacity(self.r);
        for id in 0..self.h.edge_count() as EdgeId {
            if self.alive(id) {
                buf.clear();
                buf.extend(
                    self.h
                        .edge(id)
                        .iter()
                        .copied()
                        .filter(|&w| self.state[w as usize] != VertexState::Chosen),
                );
                f(id, &buf);
            }
        }
    }

    /// Live residuals containing `v`, with their original edge ids.
    pub fn live_edges_through(&self, v: Vertex) -> Vec<(EdgeId, Vec<Vertex>)> {
        self.h
            .incident(v)
            .iter()
            .filter_map(|&e| self.residual_of(e).map(|res| (e, res)))
            .collect()
    }

    /// Sorted list of all live residuals.
    pub fn live_edge_sets(&self) -> Vec<Vec<Vertex>> {
        let mut out = Vec::new();
        self.for_each_live_edge(|_, res| out.push(res.to_vec()));
        out.sort();
        out
    }

    pub fn snapshot(&self) -> Snapshot {
        let degrees = (2..=self.r)
            .map(|size| {
                let mut sum = 0u64;
                let mut min = u32::MAX;
                let mut max = 0;
                for &v in &self.open {
                    let d = self.live_degree(v, size);
                    sum += d as u64;
                    min = min.min(d);
                    max = max.max(d);
                }
                let count = self.open.len();
                DegreeSummary {
                    size,
                    mean: if count == 0 { 0.0 } else { sum as f64 / count as f64 },
                    min: if count == 0 { 0 } else { min },
                    max,
                }
            })
            .collect();
        Snapshot {
            step: self.step_index(),
            open: self.open.len(),
            live_by_size: self.live_by_size.clone(),
            degrees,
        }
    }

    /// Chooses a uniformly random open vertex and applies one step.
    pub fn step(&mut self) -> Result<StepRecord> {
        if self.open.is_empty() {
            return Err(Error::ProcessComplete);
        }
        let idx = self.rng.random_range(0..self.open.len());
        let v = self.open[idx];
        Ok(self.apply(v))
    }

    /// Applies one step with a caller-chosen open vertex; the generator is not advanced.
    pub fn step_with(&mut self, v: Vertex) -> Result<StepRecord> {
        if self.open.is_empty() {
            return Err(Error::ProcessComplete);
        }
        self.h.check_vertex(v)?;
        if self.state[v as usize] != VertexState::Open {
            return Err(Error::input(format!("vertex {v} is not open")));
        }
        Ok(self.apply(v))
    }

    fn remove_open(&mut self, v: Vertex, to: VertexState) {
        let p = self.pos[v as usize] as usize;
        let last = *self.open.last().expect("open set is nonempty");
        self.open.swap_remove(p);
        if last != v {
            self.pos[last as usize] = p as u32;
        }
        self.state[v as usize] = to;
    }

    fn kill(&mut self, e: EdgeId, tally: &mut BTreeMap<usize, usize>) {
        let size = self.residual_len(e);
        self.status[e as usize] = DEAD;
        self.live_by_size[size] -= 1;
        *tally.entry(size).or_default() += 1;
        let width = self.r + 1;
        for &w in self.h.edge(e) {
            if self.state[w as usize] == VertexState::Open {
                self.destroyed[w as usize * width + size] += 1;
            }
        }
    }

    fn apply(&mut self, v: Vertex) -> StepRecord {
        let h = self.h;
        let mut rec = StepRecord {
            step: self.step_index() + 1,
            chosen: v,
            ..StepRecord::default()
        };
        let mut through = std::mem::take(&mut self.through);
        through.clear();
        for &e in h.incident(v) {
            if !self.alive(e) {
                continue;
            }
            if self.residual_len(e) == 2 {
                let u = h
                    .edge(e)
                    .iter()
                    .copied()
                    .find(|&w| w != v && self.state[w as usize] == VertexState::Open)
                    .expect("a live 2-edge has two open vertices");
                rec.closed.push(u);
            } else {
                through.push(e);
            }
        }

        self.remove_open(v, VertexState::Chosen);
        self.independent.push(v);
        for &u in &rec.closed {
            self.remove_open(u, VertexState::Closed);
        }
        for &u in &rec.closed {
            for &e in h.incident(u) {
                if self.alive(e) {
                    self.kill(e, &mut rec.closure);
                }
            }
        }

        let width = self.r + 1;
        let mut fresh = std::mem::take(&mut self.fresh);
        fresh.clear();
        for &e in &through {
            if !self.alive(e) {
                continue;
            }
            let old = self.residual_len(e);
            self.status[e as usize] += 1;
            self.live_by_size[old] -= 1;
            self.live_by_size[old - 1] += 1;
            *rec.shrink.entry(old - 1).or_default() += 1;
            for &w in h.edge(e) {
                if self.state[w as usize] == VertexState::Open {
                    self.created[w as usize * width + old - 1] += 1;
                    self.destroyed[w as usize * width + old] += 1;
                }
            }
            fresh.push(e);
        }

        let mut residual = std::mem::take(&mut self.residual);
        let mut candidates = std::mem::take(&mut self.candidates);
        for &f in &fresh {
            if !self.alive(f) {
                continue;
            }
            residual.clear();
            residual.extend(
                h.edge(f)
                    .iter()
                    .copied()
                    .filter(|&w| self.state[w as usize] != VertexState::Chosen),
            );
            let lists: Vec<&[EdgeId]> = residual.iter().map(|&w| h.incident(w)).collect();
            intersect_sorted(&lists, &mut candidates);
            for &g in &candidates {
                if g != f && self.alive(g) && self.residual_len(g) > residual.len() {
                    self.kill(g, &mut rec.domination);
                }
            }
        }
        self.through = through;
        self.fresh = fresh;
        self.residual = residual;
        self.candidates = candidates;
        rec
    }

    /// Recounts live degrees from the edge store and compares them with the trackers.
    pub fn check_trackers(&self) -> Result<()> {
        let width = self.r + 1;
        let mut counted = vec![0u32; self.state.len() * width];
        self.for_each_live_edge(|_, res| {
            for &w in res {
                counted[w as usize * width + res.len()] += 1;
            }
        });
        for &v in &self.open {
            for size in 2..=self.r {
                let want = counted[v as usize * width + size];
                let got = self.live_degree(v, size);
                if want != got {
                    return Err(Error::Precondition(format!(
                        "tracker mismatch at vertex {v}, size {size}: trackers {got}, edges {want}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// True when `I` contains no edge of the original hypergraph.
    pub fn is_independent(&self) -> bool {
        !self.h.edges().any(|e| {
            e.iter()
                .all(|&w| self.state[w as usize] == VertexState::Chosen)
        })
    }

    /// True when every vertex outside `I` would complete an original edge.
    pub fn is_maximal(&self) -> bool {
        (0..self.state.len() as Vertex)
            .filter(|&w| self.state[w as usize] != VertexState::Chosen)
            .all(|w| {
                self.h.incident(w).iter().any(|&e| {
                    self.h.edge(e).iter().all(|&x| {
                        x == w || self.state[x as usize] == VertexState::Chosen
                    })
                })
            })
    }
}

/// Intersection of ascending id lists (empty input gives an empty result).
fn intersect_sorted(lists: &[&[EdgeId]], out: &mut Vec<EdgeId>) {
    out.clear();
    let mut order: Vec<&[EdgeId]> = lists.to_vec();
    order.sort_unstable_by_key(|l| l.len());
    match order.as_slice() {
        [] => {}
        [only] => out.extend_from_slice(only),
        [a, b, rest @ ..] => {
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                let (x, y) = (a[i], b[j]);
                if x == y {
                    if rest.iter().all(|l| l.binary_search(&x).is_ok()) {
                        out.push(x);
                    }
                    i += 1;
                    j += 1;
                } else {
                    i += usize::from(x < y);
                    j += usize::from(y < x);
                }
            }
        }
    }
}
