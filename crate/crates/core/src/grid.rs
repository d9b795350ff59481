//! Torus grid, cell states and L-shaped neighborhoods.

use std::fmt;

use crate::error::{parse_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Minus,
    Plus,
}

impl State {
    pub fn spin(self) -> i32 {
        match self {
            State::Minus => -1,
            State::Plus => 1,
        }
    }

    pub fn is_plus(self) -> bool {
        self == State::Plus
    }

    pub fn from_bool(plus: bool) -> State {
        if plus {
            State::Plus
        } else {
            State::Minus
        }
    }

    pub fn to_char(self) -> char {
        match self {
            State::Minus => '-',
            State::Plus => '+',
        }
    }

    pub fn from_char(c: char) -> Option<State> {
        match c {
            '-' => Some(State::Minus),
            '+' => Some(State::Plus),
            _ => None,
        }
    }
}

/// A grid cell; `i` grows to the east, `j` grows to the north.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
}

impl Cell {
    pub fn new(i: usize, j: usize) -> Cell {
        Cell { i, j }
    }

    pub fn check(self, n: usize) -> Result<Cell> {
        if self.i < n && self.j < n {
            Ok(self)
        } else {
            Err(Error::CellOutOfRange {
                i: self.i,
                j: self.j,
                n,
            })
        }
    }
}

/// The sets `S_N` and `S_E` of positive offsets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LNeighborhood {
    north: Vec<usize>,
    east: Vec<usize>,
}

impl LNeighborhood {
    pub fn new(north: &[usize], east: &[usize]) -> Result<LNeighborhood> {
        let mut north = north.to_vec();
        let mut east = east.to_vec();
        for (name, set) in [("north", &mut north), ("east", &mut east)] {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(Error::InvalidNeighborhood(format!("{name} set is empty")));
            }
            if set[0] == 0 {
                return Err(Error::InvalidNeighborhood(format!(
                    "{name} offsets must be at least 1"
                )));
            }
        }
        Ok(LNeighborhood { north, east })
    }

    pub fn toom() -> LNeighborhood {
        LNeighborhood {
            north: vec![1],
            east: vec![1],
        }
    }

    pub fn north(&self) -> &[usize] {
        &self.north
    }

    pub fn east(&self) -> &[usize] {
        &self.east
    }

    pub fn size(&self) -> usize {
        self.north.len() + self.east.len()
    }

    /// Minimum number of `+1` neighbors that turns a `-1` cell into `+1`.
    pub fn threshold(&self) -> usize {
        self.size() / 2 + 1
    }

    /// North offsets `(0,k)` ascending, then east offsets `(k,0)` ascending.
    pub fn offsets(&self) -> Vec<(usize, usize)> {
        self.north
            .iter()
            .map(|&k| (0, k))
            .chain(self.east.iter().map(|&k| (k, 0)))
            .collect()
    }

    /// Rejects offsets of one axis that coincide modulo `n`, including an
    /// offset that lands back on the central cell.
    pub fn check_for(&self, n: usize) -> Result<()> {
        for set in [&self.north, &self.east] {
            let mut seen: Vec<(usize, usize)> = Vec::with_capacity(set.len());
            for &k in set.iter() {
                let r = k % n;
                if r == 0 {
                    return Err(Error::OffsetCollision { a: k, b: 0, n });
                }
                if let Some(&(a, _)) = seen.iter().find(|&&(_, s)| s == r) {
                    return Err(Error::OffsetCollision { a, b: k, n });
                }
                seen.push((k, r));
            }
        }
        Ok(())
    }

    pub fn transposed(&self) -> LNeighborhood {
        LNeighborhood {
            north: self.east.clone(),
            east: self.north.clone(),
        }
    }
}

impl fmt::Display for LNeighborhood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} E={}", join(&self.north), join(&self.east))
    }
}

pub(crate) fn join(v: &[usize]) -> String {
    v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
}

/// An `n x n` torus configuration, one bit per cell, rows packed into words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    n: usize,
    wpr: usize,
    bits: Vec<u64>,
}

impl Configuration {
    pub fn new(n: usize, fill: State) -> Configuration {
        assert!(n >= 1, "grid side must be positive");
        let wpr = n.div_ceil(64);
        let mut c = Configuration {
            n,
            wpr,
            bits: vec![0; wpr * n],
        };
        if fill.is_plus() {
            for j in 0..n {
                for i in 0..n {
                    c.set(Cell::new(i, j), State::Plus);
                }
            }
        }
        c
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(Cell) -> State) -> Configuration {
        let mut c = Configuration::new(n, State::Minus);
        for j in 0..n {
            for i in 0..n {
                let cell = Cell::new(i, j);
                if f(cell).is_plus() {
                    c.set(cell, State::Plus);
                }
            }
        }
        c
    }

    /// Cell `k` of the row-major order is `+1` iff bit `k` of `mask` is set.
    pub fn from_mask(n: usize, mask: u64) -> Configuration {
        assert!(n * n <= 64);
        Configuration::from_fn(n, |c| State::from_bool(mask >> (c.j * n + c.i) & 1 == 1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn words_per_row(&self) -> usize {
        self.wpr
    }

    pub(crate) fn row(&self, j: usize) -> &[u64] {
        &self.bits[j * self.wpr..(j + 1) * self.wpr]
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.bits
    }

    #[inline]
    pub fn get(&self, c: Cell) -> State {
        State::from_bool(self.is_plus(c.i, c.j))
    }

    #[inline]
    pub fn is_plus(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n && j < self.n);
        self.bits[j * self.wpr + i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, c: Cell, s: State) {
        debug_assert!(c.i < self.n && c.j < self.n);
        let w = &mut self.bits[c.j * self.wpr + c.i / 64];
        let m = 1u64 << (c.i % 64);
        if s.is_plus() {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    pub fn plus_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> {
        let n = self.n;
        (0..n).flat_map(move |j| (0..n).map(move |i| Cell::new(i, j)))
    }

    /// Translate by `(di, dj)`: the result holds at `c + d` what `self` holds at `c`.
    pub fn shifted(&self, di: usize, dj: usize) -> Configuration {
        let n = self.n;
        Configuration::from_fn(n, |c| {
            self.get(Cell::new((c.i + n - di % n) % n, (c.j + n - dj % n) % n))
        })
    }

    /// Cellwise order with `-1 < +1`.
    pub fn le(&self, other: &Configuration) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn parse(text: &str) -> Result<Configuration> {
        let mut lines = text.split('\n').enumerate();
        let (_, first) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let n: usize = first
            .trim_end_matches('\r')
            .parse()
            .map_err(|_| parse_err(1, format!("expected grid size, found {first:?}")))?;
        if n == 0 {
            return Err(parse_err(1, "grid size must be positive"));
        }
        let mut c = Configuration::new(n, State::Minus);
        for r in 0..n {
            let (idx, line) = lines.next().ok_or_else(|| parse_err(r + 2, "missing grid row"))?;
            let line = line.strip_suffix('\r').unwrap_or(line);
            let mut count = 0;
            for (i, ch) in line.chars().enumerate() {
                let s = State::from_char(ch)
                    .ok_or_else(|| parse_err(idx + 1, format!("unexpected character {ch:?}")))?;
                if i >= n {
                    return Err(parse_err(idx + 1, format!("row longer than {n}")));
                }
                c.set(Cell::new(i, n - 1 - r), s);
                count += 1;
            }
            if count != n {
                return Err(parse_err(idx + 1, format!("row has {count} cells, expected {n}")));
            }
        }
        // only the empty piece after a final newline may follow
        if let Some((idx, rest)) = lines.next() {
            if !rest.is_empty() || lines.next().is_some() {
                return Err(parse_err(idx + 1, "trailing content after grid"));
            }
        }
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let n = self.n;
        let mut s = String::with_capacity((n + 1) * (n + 1) + 8);
        s.push_str(&n.to_string());
        s.push('\n');
        for r in 0..n {
            let j = n - 1 - r;
            for i in 0..n {
                s.push(self.get(Cell::new(i, j)).to_char());
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_and_orientation() {
        let c = Configuration::parse("3\n+--\n---\n--+\n").unwrap();
        assert!(c.is_plus(0, 2));
        assert!(c.is_plus(2, 0));
        assert_eq!(c.plus_count(), 2);
        assert_eq!(Configuration::parse(&c.to_text()).unwrap(), c);
        assert_eq!(Configuration::parse("3\n+--\n---\n--+").unwrap(), c);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(Configuration::parse("2\n+x\n--\n").is_err());
        assert!(Configuration::parse("2\n+\n--\n").is_err());
        assert!(Configuration::parse("2\n++\n").is_err());
        assert!(Configuration::parse("2\n++\n--\n+\n").is_err());
        assert!(Configuration::parse("0\n").is_err());
    }

    #[test]
    fn offsets_order() {
        let nb = LNeighborhood::new(&[6, 2, 4], &[3, 6]).unwrap();
        assert_eq!(nb.offsets(), vec![(0, 2), (0, 4), (0, 6), (3, 0), (6, 0)]);
        assert_eq!(LNeighborhood::toom().offsets(), vec![(0, 1), (1, 0)]);
        let big = LNeighborhood::new(&[1, 2, 3, 4], &[1, 2, 3]).unwrap();
        assert_eq!(big.offsets().len(), 7);
    }

    #[test]
    fn neighborhood_validation() {
        assert!(LNeighborhood::new(&[], &[1]).is_err());
        assert!(LNeighborhood::new(&[0], &[1]).is_err());
        let nb = LNeighborhood::new(&[1, 5], &[1]).unwrap();
        assert!(nb.check_for(6).is_ok());
        assert_eq!(nb.check_for(4), Err(Error::OffsetCollision { a: 1, b: 5, n: 4 }));
        assert!(LNeighborhood::new(&[3], &[1]).unwrap().check_for(3).is_err());
    }

    #[test]
    fn shift_moves_cells() {
        let mut c = Configuration::new(5, State::Minus);
        c.set(Cell::new(4, 1), State::Plus);
        let s = c.shifted(2, 4);
        assert!(s.is_plus(1, 0));
        assert_eq!(s.plus_count(), 1);
    }
}
