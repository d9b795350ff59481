//! Placement of a circuit on a grid of tiles.
//!
//! Node `k` of the topological order sits on the diagonal at tile
//! `(N-1-k, N-1-k)`, so sources are always north-east of their consumers.
//! Each node sends its value south along its column and west along its row.
//! A gate reads its north input from a lane in its own column above the
//! diagonal, fed by an OR tap on the row of its first source, and its east
//! input from a lane in its own row, fed by a tap on the column of its second
//! source. Lanes that meet elsewhere cross.

use crate::circuit::{GateKind, MonotoneCircuit, Node};
use crate::compile::tile::TileKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    /// Tiles per side.
    pub size: usize,
    /// Row-major from the south-west, `tiles[y * size + x]`.
    pub tiles: Vec<TileKind>,
    /// Columns whose north boundary carries TRUE.
    pub active_columns: Vec<bool>,
    /// Tile whose south output is the circuit output.
    pub output_tile: (usize, usize),
}

impl Placement {
    pub fn at(&self, x: usize, y: usize) -> TileKind {
        self.tiles[y * self.size + x]
    }

    pub fn count(&self, kind: TileKind) -> usize {
        self.tiles.iter().filter(|&&k| k == kind).count()
    }

    /// Text picture, north row first: `v h & | x .` for the tile kinds.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for y in (0..self.size).rev() {
            for x in 0..self.size {
                s.push(match self.at(x, y) {
                    TileKind::VWire => 'v',
                    TileKind::HWire => 'h',
                    TileKind::And => '&',
                    TileKind::Or => '|',
                    TileKind::Cross => 'x',
                    TileKind::Blank => '.',
                });
            }
            s.push('\n');
        }
        s
    }
}

/// Default bound on the side of the tile grid.
pub const MAX_TILES: usize = 512;

pub fn layout_circuit(c: &MonotoneCircuit) -> Result<Placement> {
    layout_circuit_with_limit(c, MAX_TILES)
}

pub fn layout_circuit_with_limit(c: &MonotoneCircuit, max_tiles: usize) -> Result<Placement> {
    let c = c.output_cone();
    let nodes = c.nodes();
    let n = nodes.len();
    if n > max_tiles {
        return Err(Error::LayoutOverflow {
            needed: n,
            limit: max_tiles,
        });
    }
    debug_assert_eq!(c.output(), n - 1);
    let pos = |k: usize| n - 1 - k;

    // lane extents: the row of node j runs west down to column row_end[j],
    // the column of node j runs south down to row col_end[j]
    let mut row_end: Vec<Option<usize>> = vec![None; n];
    let mut col_end: Vec<Option<usize>> = vec![None; n];
    for (k, node) in nodes.iter().enumerate() {
        if let Node::Gate { left, right, .. } = *node {
            row_end[left] = Some(row_end[left].map_or(pos(k), |e: usize| e.min(pos(k))));
            col_end[right] = Some(col_end[right].map_or(pos(k), |e: usize| e.min(pos(k))));
        }
    }

    let mut tiles = vec![TileKind::Blank; n * n];
    for y in 0..n {
        for x in 0..n {
            let kind = if x == y {
                match nodes[pos(x)] {
                    Node::Input { .. } => TileKind::Or,
                    Node::Gate {
                        kind: GateKind::And, ..
                    } => TileKind::And,
                    Node::Gate {
                        kind: GateKind::Or, ..
                    } => TileKind::Or,
                }
            } else if y > x {
                // row of node j heading west meets the north lane of node k
                let (j, k) = (pos(y), pos(x));
                let h = row_end[j].is_some_and(|e| e <= x);
                let (v, tap) = match nodes[k] {
                    Node::Input { .. } => (true, false),
                    Node::Gate { left, .. } => (j >= left, j == left),
                };
                lane_tile(h, v, tap)
            } else {
                // column of node j heading south meets the east lane of node k
                let (j, k) = (pos(x), pos(y));
                let v = col_end[j].is_some_and(|e| e <= y);
                let (h, tap) = match nodes[k] {
                    Node::Input { .. } => (false, false),
                    Node::Gate { right, .. } => (j >= right, j == right),
                };
                lane_tile(h, v, tap)
            };
            tiles[y * n + x] = kind;
        }
    }
    let active_columns = (0..n)
        .map(|x| matches!(nodes[pos(x)], Node::Input { value: true, .. }))
        .collect();
    Ok(Placement {
        size: n,
        tiles,
        active_columns,
        output_tile: (0, 0),
    })
}

fn lane_tile(h: bool, v: bool, tap: bool) -> TileKind {
    match (h, v) {
        (true, true) if tap => TileKind::Or,
        (true, true) => TileKind::Cross,
        (true, false) => TileKind::HWire,
        (false, true) => TileKind::VWire,
        (false, false) => TileKind::Blank,
    }
}

/// Evaluates a placement tile by tile, from the north-east corner.
/// Returns the south output of the output tile.
pub fn evaluate_placement(p: &Placement) -> bool {
    let n = p.size;
    let mut south = vec![false; n * n];
    let mut west = vec![false; n * n];
    for y in (0..n).rev() {
        for x in (0..n).rev() {
            let north_in = if y + 1 < n {
                south[(y + 1) * n + x]
            } else {
                p.active_columns[x]
            };
            let east_in = if x + 1 < n { west[y * n + x + 1] } else { false };
            let (s, w) = (p.at(x, y).truth_table())(north_in, east_in);
            south[y * n + x] = s;
            west[y * n + x] = w;
        }
    }
    south[p.output_tile.1 * n + p.output_tile.0]
}
