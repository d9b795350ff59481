//! Per-tile verification in a harness that reproduces a tile's surroundings.
//!
//! Cells look only north and east, so a tile's final state depends only on
//! the final state of the south band of the tile above and of the west band
//! of the tile to its right. The harness pins those two bands (idle, or with
//! the input template raised) and surrounds the rest with `-1`.

use std::fmt;

use crate::compile::tile::{Side, Tile, TruthTable};
use crate::grid::{LNeighborhood, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Contract {
    /// The south band must end idle, or idle plus the south output template.
    SouthOutput,
    /// Same for the west band.
    WestOutput,
    /// Nothing outside the tile may turn `+1`.
    Containment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub inputs: (bool, bool),
    pub contract: Contract,
    /// Tile coordinates; negative values lie in the surrounding margin.
    pub cell: (i64, i64),
    pub found: State,
    pub expected: State,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub tile: String,
    /// Steps to the fixed point for inputs `(F,F), (F,T), (T,F), (T,T)`.
    pub steps: [usize; 4],
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Whether the given contract held for the given input combination.
    pub fn holds(&self, inputs: (bool, bool), contract: Contract) -> bool {
        !self
            .violations
            .iter()
            .any(|v| v.inputs == inputs && v.contract == contract)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "{}: ok", self.tile);
        }
        write!(f, "{}: {} violations", self.tile, self.violations.len())?;
        for v in self.violations.iter().take(5) {
            write!(
                f,
                "; inputs N={} E={} {:?} at {:?} is {} expected {}",
                v.inputs.0 as u8,
                v.inputs.1 as u8,
                v.contract,
                v.cell,
                v.found.to_char(),
                v.expected.to_char()
            )?;
        }
        Ok(())
    }
}

struct Harness {
    w: usize,
    h: usize,
    // offset of the tile origin inside the harness
    ox: usize,
    oy: usize,
    plus: Vec<bool>,
    fixed: Vec<bool>,
}

impl Harness {
    fn idx(&self, x: usize, y: usize) -> usize {
        y * self.w + x
    }

    fn run(&mut self, nb: &LNeighborhood) -> usize {
        let t = nb.threshold();
        let mut steps = 0;
        let mut next = self.plus.clone();
        loop {
            let mut changed = false;
            for y in 0..self.h {
                for x in 0..self.w {
                    let k = self.idx(x, y);
                    if self.plus[k] || self.fixed[k] {
                        continue;
                    }
                    let count = nb
                        .north()
                        .iter()
                        .filter(|&&d| y + d < self.h && self.plus[self.idx(x, y + d)])
                        .count()
                        + nb.east()
                            .iter()
                            .filter(|&&d| x + d < self.w && self.plus[self.idx(x + d, y)])
                            .count();
                    if count >= t {
                        next[k] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                return steps;
            }
            self.plus.copy_from_slice(&next);
            steps += 1;
        }
    }
}

/// Runs the tile under all four input combinations and checks the truth
/// table on its output bands plus containment.
pub fn verify_gadget(tile: &Tile, nb: &LNeighborhood, table: TruthTable) -> VerifyReport {
    let rn = *nb.north().last().unwrap();
    let re = *nb.east().last().unwrap();
    let (tw, th) = (tile.width, tile.height);
    let template = |side: Side| -> Vec<(usize, usize)> {
        tile.port(side).map(|p| p.template.clone()).unwrap_or_default()
    };
    let (n_in, e_in) = (template(Side::N), template(Side::E));
    let (s_out, w_out) = (template(Side::S), template(Side::W));

    let mut report = VerifyReport {
        tile: tile.name.clone(),
        steps: [0; 4],
        violations: Vec::new(),
    };
    for (combo, &(north, east)) in [(false, false), (false, true), (true, false), (true, true)]
        .iter()
        .enumerate()
    {
        let mut hs = Harness {
            w: tw + 2 * re,
            h: th + 2 * rn,
            ox: re,
            oy: rn,
            plus: vec![false; (tw + 2 * re) * (th + 2 * rn)],
            fixed: vec![false; (tw + 2 * re) * (th + 2 * rn)],
        };
        for y in 0..hs.h {
            for x in 0..hs.w {
                let k = hs.idx(x, y);
                let (i, j) = (x as i64 - hs.ox as i64, y as i64 - hs.oy as i64);
                let (i, j) = (i as usize, j as usize);
                let in_x = x >= hs.ox && x < hs.ox + tw;
                let in_y = y >= hs.oy && y < hs.oy + th;
                if in_x && in_y {
                    hs.plus[k] = tile.pattern[j * tw + i];
                } else if in_x && y >= hs.oy + th {
                    // south band of the tile above
                    hs.plus[k] = tile.pattern[(j - th) * tw + i];
                    hs.fixed[k] = true;
                } else if in_y && x >= hs.ox + tw {
                    // west band of the tile to the right
                    hs.plus[k] = tile.pattern[j * tw + (i - tw)];
                    hs.fixed[k] = true;
                } else if x >= hs.ox + tw && y >= hs.oy + th {
                    hs.fixed[k] = true;
                }
            }
        }
        let mut raise = |cells: &[(usize, usize)]| {
            for &(i, j) in cells {
                let k = hs.idx(i + hs.ox, j + hs.oy);
                hs.plus[k] = true;
            }
        };
        if north {
            raise(&n_in);
        }
        if east {
            raise(&e_in);
        }
        report.steps[combo] = hs.run(nb);

        let (want_s, want_w) = table(north, east);
        for y in 0..hs.h {
            for x in 0..hs.w {
                let (i, j) = (x as i64 - hs.ox as i64, y as i64 - hs.oy as i64);
                let found = State::from_bool(hs.plus[hs.idx(x, y)]);
                let mut push = |contract, expected: bool| {
                    let expected = State::from_bool(expected);
                    if found != expected {
                        report.violations.push(Violation {
                            inputs: (north, east),
                            contract,
                            cell: (i, j),
                            found,
                            expected,
                        });
                    }
                };
                if i < 0 || j < 0 {
                    push(Contract::Containment, false);
                    continue;
                }
                let (iu, ju) = (i as usize, j as usize);
                if iu >= tw || ju >= th {
                    continue;
                }
                let idle = tile.pattern[ju * tw + iu];
                let in_s = s_out.contains(&(iu, ju));
                let in_w = w_out.contains(&(iu, ju));
                if ju < rn || iu < re {
                    let expected = idle || (in_s && want_s) || (in_w && want_w);
                    let contract = if in_w || (iu < re && !in_s) {
                        Contract::WestOutput
                    } else {
                        Contract::SouthOutput
                    };
                    push(contract, expected);
                }
            }
        }
    }
    report
}
