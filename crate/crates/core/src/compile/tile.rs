//! Tiles, gadget sets and their text format.

use std::fmt::Write as _;

use crate::compile::family::NeighborhoodFamily;
use crate::error::{parse_err, Error, Result};
use crate::grid::{LNeighborhood, State};

/// Every tile reads its north and east inputs and drives its south and west
/// outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TileKind {
    VWire,
    HWire,
    And,
    Or,
    Cross,
    Blank,
}

pub type TruthTable = fn(bool, bool) -> (bool, bool);

impl TileKind {
    pub const ALL: [TileKind; 6] = [
        TileKind::VWire,
        TileKind::HWire,
        TileKind::And,
        TileKind::Or,
        TileKind::Cross,
        TileKind::Blank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TileKind::VWire => "vwire",
            TileKind::HWire => "hwire",
            TileKind::And => "and",
            TileKind::Or => "or",
            TileKind::Cross => "cross",
            TileKind::Blank => "blank",
        }
    }

    pub fn from_name(s: &str) -> Option<TileKind> {
        TileKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// `(north, east) -> (south, west)`.
    pub fn truth_table(self) -> TruthTable {
        match self {
            TileKind::VWire => |n, _| (n, false),
            TileKind::HWire => |_, e| (false, e),
            TileKind::And => |n, e| (n && e, n && e),
            TileKind::Or => |n, e| (n || e, n || e),
            TileKind::Cross => |n, e| (n, e),
            TileKind::Blank => |_, _| (false, false),
        }
    }

    pub fn transposed(self) -> TileKind {
        match self {
            TileKind::VWire => TileKind::HWire,
            TileKind::HWire => TileKind::VWire,
            k => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    N,
    E,
    S,
    W,
}

impl Side {
    fn parse(s: &str) -> Option<Side> {
        match s {
            "N" => Some(Side::N),
            "E" => Some(Side::E),
            "S" => Some(Side::S),
            "W" => Some(Side::W),
            _ => None,
        }
    }

    fn letter(self) -> char {
        match self {
            Side::N => 'N',
            Side::E => 'E',
            Side::S => 'S',
            Side::W => 'W',
        }
    }

    fn transposed(self) -> Side {
        match self {
            Side::N => Side::E,
            Side::E => Side::N,
            Side::S => Side::W,
            Side::W => Side::S,
        }
    }
}

/// A port and the cells that read `+1` when it carries TRUE. Input templates
/// lie in the neighboring tile's band, just outside this tile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub input: bool,
    pub side: Side,
    pub name: String,
    pub offset: usize,
    pub template: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tile {
    pub name: String,
    pub width: usize,
    pub height: usize,
    /// Row-major from the south-west corner.
    pub pattern: Vec<bool>,
    pub ports: Vec<Port>,
}

impl Tile {
    pub fn get(&self, i: usize, j: usize) -> State {
        State::from_bool(self.pattern[j * self.width + i])
    }

    pub fn port(&self, side: Side) -> Option<&Port> {
        self.ports.iter().find(|p| p.side == side)
    }

    fn transposed(&self) -> Tile {
        let (w, h) = (self.height, self.width);
        let mut pattern = vec![false; w * h];
        for j in 0..h {
            for i in 0..w {
                pattern[j * w + i] = self.pattern[i * self.width + j];
            }
        }
        let name = TileKind::from_name(&self.name)
            .map(|k| k.transposed().name().to_string())
            .unwrap_or_else(|| self.name.clone());
        let mut ports: Vec<Port> = self
            .ports
            .iter()
            .map(|p| Port {
                input: p.input,
                side: p.side.transposed(),
                name: p.side.transposed().letter().to_ascii_lowercase().to_string(),
                offset: p.offset,
                template: p.template.iter().map(|&(i, j)| (j, i)).collect(),
            })
            .collect();
        ports.sort_by_key(|p| p.side as u8);
        Tile {
            name,
            width: w,
            height: h,
            pattern,
            ports,
        }
    }

    fn inflated(&self, p: usize, p_north: usize) -> Tile {
        let (w, h) = (self.width * p, self.height * p_north);
        let mut pattern = vec![false; w * h];
        for j in 0..self.height {
            for i in 0..self.width {
                pattern[j * p_north * w + i * p] = self.pattern[j * self.width + i];
            }
        }
        let ports = self
            .ports
            .iter()
            .map(|port| {
                let scale = match port.side {
                    Side::N | Side::S => p,
                    Side::E | Side::W => p_north,
                };
                Port {
                    offset: port.offset * scale,
                    template: port.template.iter().map(|&(i, j)| (i * p, j * p_north)).collect(),
                    ..port.clone()
                }
            })
            .collect();
        Tile {
            name: self.name.clone(),
            width: w,
            height: h,
            pattern,
            ports,
        }
    }
}

/// One tile of each kind, all of the same size and sharing the same idle
/// south and west bands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetSet {
    pub family: NeighborhoodFamily,
    pub neighborhood: LNeighborhood,
    pub width: usize,
    pub height: usize,
    /// For sparse families, the multiple of the neighborhood span used as tile size.
    pub scale: Option<usize>,
    tiles: Vec<Tile>,
}

impl GadgetSet {
    pub fn new(family: NeighborhoodFamily, tiles: Vec<Tile>) -> Result<GadgetSet> {
        let neighborhood = family.neighborhood()?;
        let fail = |why: String| Err(Error::GadgetConstructionFailed(why));
        let Some(first) = tiles.first() else {
            return fail("gadget set has no tiles".into());
        };
        let (width, height) = (first.width, first.height);
        let mut ordered = Vec::new();
        for kind in TileKind::ALL {
            let Some(t) = tiles.iter().find(|t| t.name == kind.name()) else {
                return fail(format!("missing tile {}", kind.name()));
            };
            if t.width != width || t.height != height {
                return fail(format!("tile {} has a different size", t.name));
            }
            ordered.push(t.clone());
        }
        let scale = match family {
            NeighborhoodFamily::Sparse2 { je, jn, .. }
                if width % je == 0 && height % jn == 0 && width / je == height / jn =>
            {
                Some(width / je)
            }
            _ => None,
        };
        Ok(GadgetSet {
            family,
            neighborhood,
            width,
            height,
            scale,
            tiles: ordered,
        })
    }

    pub fn tile(&self, kind: TileKind) -> &Tile {
        &self.tiles[TileKind::ALL.iter().position(|&k| k == kind).unwrap()]
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    /// Rows of the idle south band.
    pub fn band_rows(&self) -> usize {
        *self.neighborhood.north().last().unwrap()
    }

    /// Columns of the idle west band.
    pub fn band_cols(&self) -> usize {
        *self.neighborhood.east().last().unwrap()
    }

    /// Checks that any two tiles can abut: equal idle bands and aligned ports.
    pub fn check_composable(&self) -> Result<()> {
        let blank = self.tile(TileKind::Blank);
        let (rn, re) = (self.band_rows(), self.band_cols());
        for t in &self.tiles {
            for j in 0..self.height {
                for i in 0..self.width {
                    if (j < rn || i < re) && t.get(i, j) != blank.get(i, j) {
                        return Err(Error::GadgetConstructionFailed(format!(
                            "tile {} differs from the idle band at ({i},{j})",
                            t.name
                        )));
                    }
                }
            }
            for side in [Side::N, Side::E, Side::S, Side::W] {
                let (a, b) = (t.port(side), blank.port(side));
                if a.is_none() || a.map(|p| (p.offset, &p.template)) != b.map(|p| (p.offset, &p.template)) {
                    return Err(Error::GadgetConstructionFailed(format!(
                        "tile {} has a misaligned {} port",
                        t.name,
                        side.letter()
                    )));
                }
            }
            let (n, s) = (t.port(Side::N).unwrap(), t.port(Side::S).unwrap());
            let (e, w) = (t.port(Side::E).unwrap(), t.port(Side::W).unwrap());
            let shifted_s: Vec<_> = s.template.iter().map(|&(i, j)| (i, j + self.height)).collect();
            let shifted_w: Vec<_> = w.template.iter().map(|&(i, j)| (i + self.width, j)).collect();
            if n.offset != s.offset
                || n.template != shifted_s
                || e.offset != w.offset
                || e.template != shifted_w
            {
                return Err(Error::GadgetConstructionFailed(format!(
                    "tile {} outputs do not line up with the inputs of its neighbors",
                    t.name
                )));
            }
        }
        Ok(())
    }

    pub fn transposed(&self) -> GadgetSet {
        GadgetSet::new(
            self.family.transposed(),
            self.tiles.iter().map(Tile::transposed).collect(),
        )
        .expect("transposing keeps a set well formed")
    }

    /// Spreads a contiguous set over the residue class `(0, 0)` of an
    /// `(p, p_north)` lattice; every other cell stays `-1`.
    pub fn inflated(&self, p: usize, p_north: usize) -> Result<GadgetSet> {
        let NeighborhoodFamily::Contiguous { ke, kn } = self.family else {
            return Err(Error::GadgetConstructionFailed(
                "only contiguous sets inflate".into(),
            ));
        };
        let family = NeighborhoodFamily::Periodic {
            p,
            p_north,
            east_size: ke,
            north_size: kn,
        };
        GadgetSet::new(
            family,
            self.tiles.iter().map(|t| t.inflated(p, p_north)).collect(),
        )
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("family {}\n", self.family);
        for t in &self.tiles {
            writeln!(s, "tile {} {} {}", t.name, t.width, t.height).unwrap();
            for j in (0..t.height).rev() {
                for i in 0..t.width {
                    s.push(t.get(i, j).to_char());
                }
                s.push('\n');
            }
            for p in &t.ports {
                write!(
                    s,
                    "port {} {} {} {}",
                    if p.input { "in" } else { "out" },
                    p.side.letter(),
                    p.name,
                    p.offset
                )
                .unwrap();
                for (i, j) in &p.template {
                    write!(s, " {i},{j}").unwrap();
                }
                s.push('\n');
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<GadgetSet> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty gadget set"))?;
        let words: Vec<&str> = header.split_whitespace().collect();
        if words.first() != Some(&"family") {
            return Err(parse_err(ln, "expected a family header"));
        }
        let family = NeighborhoodFamily::parse_words(&words[1..]).map_err(|e| parse_err(ln, e))?;
        let mut tiles: Vec<Tile> = Vec::new();
        while let Some((ln, line)) = lines.next() {
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["tile", name, w, h] => {
                    let num = |s: &str| {
                        s.parse::<usize>()
                            .map_err(|_| parse_err(ln, format!("bad size {s:?}")))
                    };
                    let (w, h) = (num(w)?, num(h)?);
                    if w == 0 || h == 0 {
                        return Err(parse_err(ln, "tile size must be positive"));
                    }
                    let mut pattern = vec![false; w * h];
                    for r in 0..h {
                        let (rl, row) = lines
                            .next()
                            .ok_or_else(|| parse_err(ln, "tile pattern ends early"))?;
                        if row.chars().count() != w {
                            return Err(parse_err(rl, format!("pattern row must have {w} cells")));
                        }
                        for (i, ch) in row.chars().enumerate() {
                            let st = State::from_char(ch)
                                .ok_or_else(|| parse_err(rl, format!("unexpected character {ch:?}")))?;
                            pattern[(h - 1 - r) * w + i] = st.is_plus();
                        }
                    }
                    tiles.push(Tile {
                        name: name.to_string(),
                        width: w,
                        height: h,
                        pattern,
                        ports: Vec::new(),
                    });
                }
                ["port", dir, side, name, offset, cells @ ..] => {
                    let tile = tiles
                        .last_mut()
                        .ok_or_else(|| parse_err(ln, "port before any tile"))?;
                    let input = match *dir {
                        "in" => true,
                        "out" => false,
                        _ => {
                            return Err(parse_err(
                                ln,
                                format!("port direction must be in or out, got {dir:?}"),
                            ))
                        }
                    };
                    let side =
                        Side::parse(side).ok_or_else(|| parse_err(ln, format!("bad side {side:?}")))?;
                    if input != matches!(side, Side::N | Side::E) {
                        return Err(parse_err(ln, "inputs sit on N and E, outputs on S and W"));
                    }
                    let offset = offset
                        .parse()
                        .map_err(|_| parse_err(ln, format!("bad edge offset {offset:?}")))?;
                    let mut template = Vec::new();
                    for c in cells {
                        let (i, j) = c
                            .split_once(',')
                            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                            .ok_or_else(|| parse_err(ln, format!("bad template cell {c:?}")))?;
                        template.push((i, j));
                    }
                    tile.ports.push(Port {
                        input,
                        side,
                        name: name.to_string(),
                        offset,
                        template,
                    });
                }
                _ => return Err(parse_err(ln, format!("unexpected line {line:?}"))),
            }
        }
        GadgetSet::new(family, tiles)
    }
}

const SHIPPED: &[(&str, &str)] = &[
    ("contiguous 2 2", include_str!("../../gadgets/contiguous_2_2.txt")),
    ("contiguous 3 2", include_str!("../../gadgets/contiguous_3_2.txt")),
    ("contiguous 3 3", include_str!("../../gadgets/contiguous_3_3.txt")),
    ("contiguous 4 3", include_str!("../../gadgets/contiguous_4_3.txt")),
    (
        "sparse2 1 3 1 3",
        include_str!("../../gadgets/sparse2_1_3_1_3.txt"),
    ),
];

/// Families with a gadget set checked in as data, before transposition.
pub fn shipped_families() -> Vec<NeighborhoodFamily> {
    SHIPPED
        .iter()
        .map(|(k, _)| NeighborhoodFamily::parse_words(&k.split_whitespace().collect::<Vec<_>>()).unwrap())
        .collect()
}

pub(crate) fn shipped(family: &NeighborhoodFamily) -> Option<GadgetSet> {
    let key = family.to_string();
    SHIPPED
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, text)| GadgetSet::parse(text).expect("shipped gadget set parses"))
}
