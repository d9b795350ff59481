//! Prediction for neighborhoods with one north and one east offset.
//!
//! A `-1` cell flips only once both of its neighbors are `+1`, so the cells
//! that stay `-1` forever are those of the digraph on `-1` cells that lie on
//! a cycle or lead into one. Everything else flips at a time given by a
//! longest path.

use std::collections::{BTreeSet, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};
use crate::grid::{Cell, Configuration, LNeighborhood};

const NONE: u32 = u32::MAX;

/// Digraph on the `-1` cells of a `width x height` torus; each vertex points
/// to its north and east neighbors when those are `-1` too.
#[derive(Debug, Clone)]
pub struct CellDigraph {
    width: usize,
    height: usize,
    vertex: Vec<bool>,
    out: Vec<[u32; 2]>,
}

fn size1_offsets(nb: &LNeighborhood) -> Result<(usize, usize)> {
    if nb.north().len() != 1 || nb.east().len() != 1 {
        return Err(Error::WrongNeighborhoodArity {
            north: nb.north().len(),
            east: nb.east().len(),
        });
    }
    Ok((nb.east()[0], nb.north()[0]))
}

pub fn build_cell_digraph(x: &Configuration, nb: &LNeighborhood) -> Result<CellDigraph> {
    let (ke, kn) = size1_offsets(nb)?;
    nb.check_for(x.n())?;
    let n = x.n();
    Ok(CellDigraph::from_fn(n, n, ke, kn, |i, j| !x.is_plus(i, j)))
}

impl CellDigraph {
    /// `minus(i, j)` tells whether cell `(i, j)` is `-1`.
    pub fn from_fn(
        width: usize,
        height: usize,
        east: usize,
        north: usize,
        minus: impl Fn(usize, usize) -> bool,
    ) -> CellDigraph {
        let mut vertex = vec![false; width * height];
        for j in 0..height {
            for i in 0..width {
                vertex[j * width + i] = minus(i, j);
            }
        }
        let mut out = vec![[NONE; 2]; width * height];
        for j in 0..height {
            for i in 0..width {
                let v = j * width + i;
                if !vertex[v] {
                    continue;
                }
                let up = ((j + north) % height) * width + i;
                let right = j * width + (i + east) % width;
                if vertex[up] {
                    out[v][0] = up as u32;
                }
                if vertex[right] {
                    out[v][1] = right as u32;
                }
            }
        }
        CellDigraph {
            width,
            height,
            vertex,
            out,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn cell(&self, v: usize) -> Cell {
        Cell::new(v % self.width, v / self.width)
    }

    fn index(&self, c: Cell) -> usize {
        c.j * self.width + c.i
    }

    pub fn is_vertex(&self, c: Cell) -> bool {
        self.vertex[self.index(c)]
    }

    pub fn vertices(&self) -> Vec<Cell> {
        (0..self.vertex.len())
            .filter(|&v| self.vertex[v])
            .map(|v| self.cell(v))
            .collect()
    }

    pub fn out_edges(&self, c: Cell) -> Vec<Cell> {
        self.out[self.index(c)]
            .iter()
            .filter(|&&t| t != NONE)
            .map(|&t| self.cell(t as usize))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().flatten().filter(|&&t| t != NONE).count()
    }

    fn targets(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v].iter().filter(|&&t| t != NONE).map(|&t| t as usize)
    }

    fn cycle_mask(&self) -> Vec<bool> {
        let mut g = DiGraph::<(), ()>::with_capacity(self.vertex.len(), 2 * self.vertex.len());
        for _ in 0..self.vertex.len() {
            g.add_node(());
        }
        let mut on_cycle = vec![false; self.vertex.len()];
        for (v, flag) in on_cycle.iter_mut().enumerate() {
            for t in self.targets(v) {
                if t == v {
                    *flag = true;
                }
                g.add_edge(NodeIndex::new(v), NodeIndex::new(t), ());
            }
        }
        for comp in tarjan_scc(&g) {
            if comp.len() >= 2 {
                for node in comp {
                    on_cycle[node.index()] = true;
                }
            }
        }
        on_cycle
    }

    fn never_flip_mask(&self) -> Vec<bool> {
        let mut reached = self.cycle_mask();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); self.vertex.len()];
        for v in 0..self.vertex.len() {
            for t in self.targets(v) {
                rev[t].push(v as u32);
            }
        }
        let mut queue: VecDeque<usize> = (0..reached.len()).filter(|&v| reached[v]).collect();
        while let Some(v) = queue.pop_front() {
            for &u in &rev[v] {
                if !reached[u as usize] {
                    reached[u as usize] = true;
                    queue.push_back(u as usize);
                }
            }
        }
        reached
    }

    /// Flip times of every cell of the torus this digraph was built on.
    pub fn schedule(&self) -> FlipSchedule {
        let len = self.vertex.len();
        let never = self.never_flip_mask();
        let mut entries: Vec<FlipEntry> = (0..len)
            .map(|v| {
                if !self.vertex[v] {
                    FlipEntry::AlreadyPlus
                } else if never[v] {
                    FlipEntry::Never
                } else {
                    FlipEntry::FlipsAt(0)
                }
            })
            .collect();
        // Kahn's order over reversed edges: a vertex is settled once all of
        // its `-1` targets are; its time is one more than the latest of them.
        let mut pending = vec![0u8; len];
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); len];
        let mut ready = VecDeque::new();
        for v in 0..len {
            if !matches!(entries[v], FlipEntry::FlipsAt(_)) {
                continue;
            }
            for t in self.targets(v) {
                pending[v] += 1;
                rev[t].push(v as u32);
            }
            if pending[v] == 0 {
                ready.push_back(v);
            }
        }
        let mut time = vec![0usize; len];
        while let Some(v) = ready.pop_front() {
            time[v] += 1;
            entries[v] = FlipEntry::FlipsAt(time[v]);
            for &u in &rev[v] {
                let u = u as usize;
                time[u] = time[u].max(time[v]);
                pending[u] -= 1;
                if pending[u] == 0 {
                    ready.push_back(u);
                }
            }
        }
        debug_assert!(entries.iter().all(|e| *e != FlipEntry::FlipsAt(0)));
        FlipSchedule {
            width: self.width,
            height: self.height,
            entries,
        }
    }
}

/// Vertices lying on some directed cycle.
pub fn cycle_vertices(g: &CellDigraph) -> BTreeSet<Cell> {
    let mask = g.cycle_mask();
    (0..mask.len()).filter(|&v| mask[v]).map(|v| g.cell(v)).collect()
}

/// Vertices on a cycle or with a path into one: exactly the cells that stay `-1`.
pub fn never_flip_set(g: &CellDigraph) -> BTreeSet<Cell> {
    let mask = g.never_flip_mask();
    (0..mask.len()).filter(|&v| mask[v]).map(|v| g.cell(v)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlipEntry {
    AlreadyPlus,
    Never,
    FlipsAt(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipSchedule {
    width: usize,
    height: usize,
    entries: Vec<FlipEntry>,
}

impl FlipSchedule {
    pub fn get(&self, c: Cell) -> FlipEntry {
        self.entries[c.j * self.width + c.i]
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[FlipEntry] {
        &self.entries
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

pub fn flip_times(x: &Configuration, g: &CellDigraph) -> FlipSchedule {
    assert!(
        g.width == x.n() && g.height == x.n(),
        "digraph was built on a different grid"
    );
    debug_assert!(x.cells().all(|c| x.get(c).is_plus() != g.is_vertex(c)));
    g.schedule()
}

/// Partition of the torus into the residue classes that an `(p, p_north)`
/// neighborhood never mixes, with a relabeling of each class onto a smaller
/// torus where the neighborhood becomes Toom's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgridMap {
    p: usize,
    p_north: usize,
    n: usize,
    ge: usize,
    gn: usize,
    // column i -> (s, q) and row j -> (t, q')
    col: Vec<(usize, usize)>,
    row: Vec<(usize, usize)>,
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn axis_labels(p: usize, n: usize) -> Vec<(usize, usize)> {
    let g = gcd(p % n, n);
    let mut labels = vec![(usize::MAX, usize::MAX); n];
    for s in 0..g {
        for q in 0..n / g {
            labels[(s + q * p) % n] = (s, q);
        }
    }
    labels
}

pub fn subgrid_map(p: usize, p_north: usize, n: usize) -> SubgridMap {
    assert!(
        p >= 1 && p_north >= 1 && n >= 1,
        "periods and size must be positive"
    );
    SubgridMap {
        p,
        p_north,
        n,
        ge: gcd(p % n, n),
        gn: gcd(p_north % n, n),
        col: axis_labels(p, n),
        row: axis_labels(p_north, n),
    }
}

impl SubgridMap {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn periods(&self) -> (usize, usize) {
        (self.p, self.p_north)
    }

    /// Number of classes along each axis, `(gcd(p, n), gcd(p_north, n))`.
    pub fn class_counts(&self) -> (usize, usize) {
        (self.ge, self.gn)
    }

    pub fn classes(&self) -> Vec<(usize, usize)> {
        (0..self.ge)
            .flat_map(|s| (0..self.gn).map(move |t| (s, t)))
            .collect()
    }

    /// Width and height of every relabeled subtorus.
    pub fn subtorus_dims(&self) -> (usize, usize) {
        (self.n / self.ge, self.n / self.gn)
    }

    /// The grid cell that class `(s, t)` relabels to `(q, q')`.
    pub fn cell_at(&self, class: (usize, usize), q: usize, q_north: usize) -> Cell {
        Cell::new(
            (class.0 + q * self.p) % self.n,
            (class.1 + q_north * self.p_north) % self.n,
        )
    }

    pub fn class_cells(&self, class: (usize, usize)) -> Vec<Cell> {
        let (w, h) = self.subtorus_dims();
        (0..h)
            .flat_map(|qn| (0..w).map(move |q| (q, qn)))
            .map(|(q, qn)| self.cell_at(class, q, qn))
            .collect()
    }

    pub fn locate(&self, c: Cell) -> Result<((usize, usize), Cell)> {
        c.check(self.n)?;
        let (s, q) = self.col[c.i];
        let (t, qn) = self.row[c.j];
        debug_assert_eq!(s, c.i % self.ge);
        debug_assert_eq!(t, c.j % self.gn);
        Ok(((s, t), Cell::new(q, qn)))
    }
}

pub fn locate(c: Cell, m: &SubgridMap) -> Result<((usize, usize), Cell)> {
    m.locate(c)
}

fn class_digraph(x: &Configuration, m: &SubgridMap, class: (usize, usize)) -> CellDigraph {
    let (w, h) = m.subtorus_dims();
    CellDigraph::from_fn(w, h, 1, 1, |q, qn| {
        let c = m.cell_at(class, q, qn);
        !x.is_plus(c.i, c.j)
    })
}

/// Whether `c` differs from its initial state at time `t`, decided on the
/// cell's residue class without simulating.
pub fn predict_fast(x: &Configuration, nb: &LNeighborhood, t: usize, c: Cell) -> Result<bool> {
    let (ke, kn) = size1_offsets(nb)?;
    nb.check_for(x.n())?;
    c.check(x.n())?;
    if x.get(c).is_plus() || t == 0 {
        return Ok(false);
    }
    let m = subgrid_map(ke, kn, x.n());
    let (class, sub) = m.locate(c)?;
    let g = class_digraph(x, &m, class);
    Ok(matches!(g.schedule().get(sub), FlipEntry::FlipsAt(tau) if tau <= t))
}

/// Flip schedule of the whole grid, assembled class by class.
pub fn fast_schedule(x: &Configuration, nb: &LNeighborhood) -> Result<FlipSchedule> {
    let (ke, kn) = size1_offsets(nb)?;
    nb.check_for(x.n())?;
    let n = x.n();
    let m = subgrid_map(ke, kn, n);
    let mut entries = vec![FlipEntry::AlreadyPlus; n * n];
    for class in m.classes() {
        let sched = class_digraph(x, &m, class).schedule();
        let (w, h) = m.subtorus_dims();
        for qn in 0..h {
            for q in 0..w {
                let c = m.cell_at(class, q, qn);
                entries[c.j * n + c.i] = sched.get(Cell::new(q, qn));
            }
        }
    }
    Ok(FlipSchedule {
        width: n,
        height: n,
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixClass {
    InCycle,
    ReachesCycle,
    Flips,
    /// The cell starts `+1` and is not a vertex of the digraph.
    NotVertex,
}

pub const MATRIX_CAP: usize = 12;

#[derive(Clone, PartialEq, Eq)]
struct BoolMatrix {
    dim: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BoolMatrix {
    fn zero(dim: usize) -> BoolMatrix {
        let words = dim.div_ceil(64);
        BoolMatrix {
            dim,
            words,
            rows: vec![0; dim * words],
        }
    }

    fn identity(dim: usize) -> BoolMatrix {
        let mut m = BoolMatrix::zero(dim);
        for i in 0..dim {
            m.set(i, i);
        }
        m
    }

    fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    fn set(&mut self, r: usize, c: usize) {
        self.rows[r * self.words + c / 64] |= 1 << (c % 64);
    }

    fn row_is_zero(&self, r: usize) -> bool {
        self.rows[r * self.words..(r + 1) * self.words]
            .iter()
            .all(|&w| w == 0)
    }

    fn or(&self, other: &BoolMatrix) -> BoolMatrix {
        let mut m = self.clone();
        m.rows.iter_mut().zip(&other.rows).for_each(|(a, b)| *a |= b);
        m
    }

    fn mul(&self, other: &BoolMatrix) -> BoolMatrix {
        let mut m = BoolMatrix::zero(self.dim);
        let w = self.words;
        for r in 0..self.dim {
            for k in 0..self.dim {
                if self.get(r, k) {
                    for x in 0..w {
                        m.rows[r * w + x] |= other.rows[k * w + x];
                    }
                }
            }
        }
        m
    }

    fn pow(&self, mut e: usize) -> BoolMatrix {
        let mut acc = BoolMatrix::identity(self.dim);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Entry `(r, c)` is set iff `self^k` has it set for some `1 <= k <= upto`.
    fn any_power(&self, upto: usize) -> BoolMatrix {
        let step = BoolMatrix::identity(self.dim).or(self);
        self.mul(&step.pow(upto - 1))
    }
}

/// Classifies every cell (row-major) with Boolean matrix powers of the
/// adjacency matrix and of its extension by a sink fed from every cycle
/// vertex. Reference oracle, limited to `n <= 12`.
pub fn matrix_power_classify(x: &Configuration, nb: &LNeighborhood) -> Result<Vec<MatrixClass>> {
    let (ke, kn) = size1_offsets(nb)?;
    let n = x.n();
    if n > MATRIX_CAP {
        return Err(Error::InstanceTooLarge { n, cap: MATRIX_CAP });
    }
    nb.check_for(n)?;
    let v = n * n;
    let minus = |k: usize| !x.is_plus(k % n, k / n);
    let mut a = BoolMatrix::zero(v);
    for k in (0..v).filter(|&k| minus(k)) {
        let (i, j) = (k % n, k / n);
        for t in [((j + kn) % n) * n + i, j * n + (i + ke) % n] {
            if minus(t) {
                a.set(k, t);
            }
        }
    }
    let cyc = a.any_power(v);
    let sink = v;
    let mut b = BoolMatrix::zero(v + 1);
    for r in 0..v {
        for c in 0..v {
            if a.get(r, c) {
                b.set(r, c);
            }
        }
        if cyc.get(r, r) {
            b.set(r, sink);
        }
    }
    let reach = b.any_power(v + 1);
    Ok((0..v)
        .map(|k| {
            if !minus(k) {
                MatrixClass::NotVertex
            } else if cyc.get(k, k) {
                MatrixClass::InCycle
            } else if reach.get(k, sink) {
                MatrixClass::ReachesCycle
            } else {
                MatrixClass::Flips
            }
        })
        .collect())
}

fn adjacency(x: &Configuration, nb: &LNeighborhood) -> Result<BoolMatrix> {
    let (ke, kn) = size1_offsets(nb)?;
    let n = x.n();
    if n > MATRIX_CAP {
        return Err(Error::InstanceTooLarge { n, cap: MATRIX_CAP });
    }
    nb.check_for(n)?;
    let v = n * n;
    let minus = |k: usize| !x.is_plus(k % n, k / n);
    let mut a = BoolMatrix::zero(v);
    for k in (0..v).filter(|&k| minus(k)) {
        let (i, j) = (k % n, k / n);
        for tgt in [((j + kn) % n) * n + i, j * n + (i + ke) % n] {
            if minus(tgt) {
                a.set(k, tgt);
            }
        }
    }
    Ok(a)
}

/// Pred answered with one matrix power: a `-1` cell is still `-1` at time
/// `t` iff a walk of length `t` leaves it, i.e. its row of `A^t` is nonzero.
pub fn matrix_power_changed(x: &Configuration, nb: &LNeighborhood, t: usize, c: Cell) -> Result<bool> {
    c.check(x.n())?;
    let a = adjacency(x, nb)?;
    if x.get(c).is_plus() {
        return Ok(false);
    }
    let at = a.pow(t.min(a.dim));
    Ok(at.row_is_zero(c.j * x.n() + c.i))
}

/// Flip time of every cell (row-major) from successive powers of `A`: the
/// first `t` whose row of `A^t` is zero. `Some(0)` for `+1` cells.
pub fn matrix_power_flip_times(x: &Configuration, nb: &LNeighborhood) -> Result<Vec<Option<usize>>> {
    let a = adjacency(x, nb)?;
    let n = x.n();
    let mut times: Vec<Option<usize>> = (0..a.dim).map(|k| x.is_plus(k % n, k / n).then_some(0)).collect();
    let mut p = a.clone();
    for t in 1..=a.dim {
        for (k, slot) in times.iter_mut().enumerate() {
            if slot.is_none() && p.row_is_zero(k) {
                *slot = Some(t);
            }
        }
        p = p.mul(&a);
    }
    Ok(times)
}

pub fn matrix_power_predictor(x: &Configuration, nb: &LNeighborhood, c: Cell) -> Result<MatrixClass> {
    c.check(x.n())?;
    let all = matrix_power_classify(x, nb)?;
    Ok(all[c.j * x.n() + c.i])
}
