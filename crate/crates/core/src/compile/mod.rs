//! Compilation of monotone circuits into initial configurations whose fixed
//! point computes the circuit.

pub mod family;
pub mod layout;
pub mod tile;
pub mod verify;

use std::fmt::Write as _;

pub use family::{wire_params, NeighborhoodFamily, WireParams};
pub use layout::{evaluate_placement, layout_circuit, layout_circuit_with_limit, Placement};
pub use tile::{shipped_families, GadgetSet, Port, Side, Tile, TileKind, TruthTable};
pub use verify::{verify_gadget, Contract, VerifyReport, Violation};

use crate::automaton::run_to_fixed_point;
use crate::circuit::{normalize_fanout, MonotoneCircuit};
use crate::error::{parse_err, Error, Result};
use crate::grid::{join, Cell, Configuration, LNeighborhood, State};
use crate::predict::gcd;

/// Loads (or derives) the gadget set for a family and verifies every tile.
pub fn build_gadget_set(f: &NeighborhoodFamily) -> Result<GadgetSet> {
    let gs = load_gadget_set(f)?;
    gs.check_composable()?;
    for kind in TileKind::ALL {
        let report = verify_gadget(gs.tile(kind), &gs.neighborhood, kind.truth_table());
        if !report.passed() {
            return Err(Error::GadgetConstructionFailed(report.to_string()));
        }
    }
    Ok(gs)
}

/// The shipped set for a family, transposed or inflated as needed, unverified.
pub fn load_gadget_set(f: &NeighborhoodFamily) -> Result<GadgetSet> {
    f.validate()?;
    let missing = || Error::GadgetConstructionFailed(format!("no gadget set available for {f}"));
    let gs = match *f {
        NeighborhoodFamily::Periodic {
            p,
            p_north,
            east_size,
            north_size,
        } => load_gadget_set(&NeighborhoodFamily::Contiguous {
            ke: east_size,
            kn: north_size,
        })?
        .inflated(p, p_north)?,
        _ => tile::shipped(f)
            .or_else(|| tile::shipped(&f.transposed()).map(|g| g.transposed()))
            .ok_or_else(missing)?,
    };
    Ok(gs)
}

/// All tiles of a set verified, one report per tile.
pub fn verify_gadget_set(gs: &GadgetSet) -> Vec<VerifyReport> {
    TileKind::ALL
        .iter()
        .map(|&k| verify_gadget(gs.tile(k), &gs.neighborhood, k.truth_table()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledInstance {
    pub config: Configuration,
    pub neighborhood: LNeighborhood,
    pub output_cell: Cell,
    pub time_bound: usize,
}

impl CompiledInstance {
    pub fn to_text(&self) -> String {
        let mut s = self.config.to_text();
        writeln!(s, "output {} {}", self.output_cell.i, self.output_cell.j).unwrap();
        writeln!(s, "time {}", self.time_bound).unwrap();
        writeln!(
            s,
            "neighborhood N={} E={}",
            join(self.neighborhood.north()),
            join(self.neighborhood.east())
        )
        .unwrap();
        s
    }

    pub fn parse(text: &str) -> Result<CompiledInstance> {
        let lines: Vec<&str> = text.lines().collect();
        let n: usize = lines
            .first()
            .and_then(|l| l.trim().parse().ok())
            .ok_or_else(|| parse_err(1, "expected grid size"))?;
        if lines.len() < n + 1 {
            return Err(parse_err(lines.len(), "grid ends early"));
        }
        let config = Configuration::parse(&lines[..=n].join("\n"))?;
        let (mut output, mut time, mut nb) = (None, None, None);
        for (k, line) in lines.iter().enumerate().skip(n + 1) {
            let ln = k + 1;
            let words: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| parse_err(ln, format!("bad number {s:?}")))
            };
            match words.as_slice() {
                [] => {}
                ["output", i, j] => output = Some(Cell::new(num(i)?, num(j)?).check(n)?),
                ["time", t] => time = Some(num(t)?),
                ["neighborhood", north, east] => {
                    let list = |w: &str, key: &str| -> Result<Vec<usize>> {
                        let body = w
                            .strip_prefix(key)
                            .ok_or_else(|| parse_err(ln, format!("expected {key}<list>")))?;
                        body.split(',').map(num).collect()
                    };
                    nb = Some(LNeighborhood::new(&list(north, "N=")?, &list(east, "E=")?)?);
                }
                _ => return Err(parse_err(ln, format!("unexpected line {line:?}"))),
            }
        }
        let last = lines.len();
        Ok(CompiledInstance {
            config,
            output_cell: output.ok_or_else(|| parse_err(last, "missing output line"))?,
            time_bound: time.ok_or_else(|| parse_err(last, "missing time line"))?,
            neighborhood: nb.ok_or_else(|| parse_err(last, "missing neighborhood line"))?,
        })
    }
}

/// Lays out the placement: a `-1` margin west and south, the tile grid, and
/// idle bands north and east standing in for the missing neighbors, with
/// TRUE inputs raised on the north band. Returns the cells and the output cell.
fn assemble(p: &Placement, gs: &GadgetSet) -> (Vec<Vec<bool>>, usize, usize, Cell) {
    let (tw, th) = (gs.width, gs.height);
    let (rn, re) = (gs.band_rows(), gs.band_cols());
    let width = re + p.size * tw + re;
    let height = rn + p.size * th + rn;
    let mut cells = vec![vec![false; width]; height];
    for ty in 0..p.size {
        for tx in 0..p.size {
            let t = gs.tile(p.at(tx, ty));
            for j in 0..th {
                for i in 0..tw {
                    cells[rn + ty * th + j][re + tx * tw + i] = t.pattern[j * tw + i];
                }
            }
        }
    }
    let blank = gs.tile(TileKind::Blank);
    let top = rn + p.size * th;
    let right = re + p.size * tw;
    for tx in 0..p.size {
        for j in 0..rn {
            for i in 0..tw {
                cells[top + j][re + tx * tw + i] = blank.pattern[j * tw + i];
            }
        }
        if p.active_columns[tx] {
            for &(i, j) in &blank.port(Side::N).unwrap().template {
                cells[rn + (p.size - 1) * th + j][re + tx * tw + i] = true;
            }
        }
    }
    for ty in 0..p.size {
        for j in 0..th {
            for i in 0..re {
                cells[rn + ty * th + j][right + i] = blank.pattern[j * tw + i];
            }
        }
    }
    let (ox, oy) = p.output_tile;
    let &(i, j) = blank
        .port(Side::S)
        .unwrap()
        .template
        .first()
        .expect("south output template is not empty");
    let out = Cell::new(re + ox * tw + i, rn + oy * th + j);
    (cells, width, height, out)
}

/// Builds the initial configuration whose fixed point has the output cell
/// `+1` exactly when the circuit evaluates to TRUE.
pub fn compile(c: &MonotoneCircuit, f: &NeighborhoodFamily) -> Result<CompiledInstance> {
    let gs = build_gadget_set(f)?;
    compile_with(c, &gs, layout::MAX_TILES)
}

/// Like [`compile`] with a prebuilt gadget set and a bound on the tile grid side.
pub fn compile_with(c: &MonotoneCircuit, gs: &GadgetSet, max_tiles: usize) -> Result<CompiledInstance> {
    let c = normalize_fanout(&c.output_cone());
    let placement = layout_circuit_with_limit(&c, max_tiles)?;
    let (cells, width, height, out) = assemble(&placement, gs);
    let mut n = width.max(height);
    if let NeighborhoodFamily::Periodic { p, p_north, .. } = gs.family {
        let l = p / gcd(p, p_north) * p_north;
        n = n.div_ceil(l) * l;
    }
    let config = Configuration::from_fn(n, |cell| {
        State::from_bool(cell.j < height && cell.i < width && cells[cell.j][cell.i])
    });
    Ok(CompiledInstance {
        config,
        neighborhood: gs.neighborhood.clone(),
        output_cell: out,
        time_bound: n * n,
    })
}

/// Runs the instance to its fixed point and compares the output cell.
pub fn check_compiled(inst: &CompiledInstance, expected: bool) -> bool {
    match run_to_fixed_point(&inst.config, &inst.neighborhood) {
        Ok((fp, _)) => fp.get(inst.output_cell).is_plus() == expected,
        Err(_) => false,
    }
}
