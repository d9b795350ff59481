//! The freezing majority rule and synchronous dynamics on the torus.

use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{Cell, Configuration, LNeighborhood, State};

/// `+1` iff the cell is already `+1` or the neighbor spins sum to a positive value.
pub fn local_rule(self_state: State, neighbors: &[State]) -> State {
    if self_state.is_plus() {
        return State::Plus;
    }
    let sum: i32 = neighbors.iter().map(|s| s.spin()).sum();
    State::from_bool(sum > 0)
}

/// One synchronous application of the global map.
pub fn step(x: &Configuration, nb: &LNeighborhood) -> Result<Configuration> {
    step_with_threads(x, nb, 1)
}

/// Like [`step`] but splits the rows over `threads` workers. The output does
/// not depend on `threads`.
pub fn step_with_threads(x: &Configuration, nb: &LNeighborhood, threads: usize) -> Result<Configuration> {
    let n = x.n();
    nb.check_for(n)?;
    let wpr = x.words_per_row();
    let north: Vec<usize> = nb.north().iter().map(|k| k % n).collect();
    let east: Vec<usize> = nb.east().iter().map(|k| k % n).collect();
    let threshold = nb.threshold();
    let planes = usize::BITS as usize - nb.size().leading_zeros() as usize;

    let mut out = x.clone();
    let fill_row = |j: usize, dst: &mut [u64]| {
        let mut rotated = vec![0u64; east.len() * wpr];
        for (e, &k) in east.iter().enumerate() {
            rotate_into(x.row(j), k, n, &mut rotated[e * wpr..(e + 1) * wpr]);
        }
        let mut counter = vec![0u64; planes];
        for w in 0..wpr {
            counter.iter_mut().for_each(|p| *p = 0);
            for &k in &north {
                add_word(&mut counter, x.row((j + k) % n)[w]);
            }
            for e in 0..east.len() {
                add_word(&mut counter, rotated[e * wpr + w]);
            }
            dst[w] |= at_least(&counter, threshold);
        }
    };
    let words = out.words_mut();
    if threads <= 1 {
        words
            .chunks_mut(wpr)
            .enumerate()
            .for_each(|(j, dst)| fill_row(j, dst));
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            words
                .par_chunks_mut(wpr)
                .enumerate()
                .for_each(|(j, dst)| fill_row(j, dst));
        });
    }
    Ok(out)
}

fn read_bits(row: &[u64], p: usize, len: usize) -> u64 {
    let (w, off) = (p / 64, p % 64);
    let mut v = row[w] >> off;
    if off > 0 && w + 1 < row.len() {
        v |= row[w + 1] << (64 - off);
    }
    if len < 64 {
        v &= (1u64 << len) - 1;
    }
    v
}

/// Bit `i` of `out` becomes bit `(i + k) mod n` of `row`.
fn rotate_into(row: &[u64], k: usize, n: usize, out: &mut [u64]) {
    for (w, slot) in out.iter_mut().enumerate() {
        let base = w * 64;
        let len = (n - base).min(64);
        let start = (base + k) % n;
        *slot = if start + len <= n {
            read_bits(row, start, len)
        } else {
            let first = n - start;
            read_bits(row, start, first) | read_bits(row, 0, len - first) << first
        };
    }
}

// bit-sliced ripple-carry add of one 0/1 word into the counter planes
#[inline]
fn add_word(planes: &mut [u64], mut carry: u64) {
    for p in planes.iter_mut() {
        let c = *p & carry;
        *p ^= carry;
        carry = c;
        if carry == 0 {
            break;
        }
    }
}

#[inline]
fn at_least(planes: &[u64], t: usize) -> u64 {
    let mut gt = 0u64;
    let mut eq = !0u64;
    for b in (0..planes.len()).rev() {
        if t >> b & 1 == 1 {
            eq &= planes[b];
        } else {
            gt |= eq & planes[b];
            eq &= !planes[b];
        }
    }
    gt | eq
}

/// Exact synchronous evolution that only re-examines cells whose neighbors
/// flipped in the previous step.
pub(crate) struct Evolution {
    n: usize,
    plus: Vec<bool>,
    north: Vec<usize>,
    east: Vec<usize>,
    threshold: usize,
    candidates: Vec<u32>,
    mark: Vec<u32>,
    flips: Vec<u32>,
    pub(crate) time: usize,
}

impl Evolution {
    pub(crate) fn new(x: &Configuration, nb: &LNeighborhood) -> Result<Evolution> {
        let n = x.n();
        nb.check_for(n)?;
        let mut plus = vec![false; n * n];
        let mut candidates = Vec::new();
        for j in 0..n {
            for i in 0..n {
                if x.is_plus(i, j) {
                    plus[j * n + i] = true;
                } else {
                    candidates.push((j * n + i) as u32);
                }
            }
        }
        Ok(Evolution {
            n,
            plus,
            north: nb.north().iter().map(|k| k % n).collect(),
            east: nb.east().iter().map(|k| k % n).collect(),
            threshold: nb.threshold(),
            candidates,
            mark: vec![u32::MAX; n * n],
            flips: Vec::new(),
            time: 0,
        })
    }

    #[inline]
    fn fires(&self, idx: usize) -> bool {
        let n = self.n;
        let (i, j) = (idx % n, idx / n);
        let mut count = 0;
        for &k in &self.north {
            let jj = if j + k >= n { j + k - n } else { j + k };
            count += self.plus[jj * n + i] as usize;
        }
        for &k in &self.east {
            let ii = if i + k >= n { i + k - n } else { i + k };
            count += self.plus[j * n + ii] as usize;
        }
        count >= self.threshold
    }

    /// Performs one step. Returns the cells that flipped, empty at a fixed point.
    pub(crate) fn advance(&mut self) -> &[u32] {
        let mut flips = std::mem::take(&mut self.flips);
        flips.clear();
        for &c in &self.candidates {
            if !self.plus[c as usize] && self.fires(c as usize) {
                flips.push(c);
            }
        }
        if flips.is_empty() {
            self.flips = flips;
            return &self.flips;
        }
        for &c in &flips {
            self.plus[c as usize] = true;
        }
        self.time += 1;
        let stamp = self.time as u32;
        let n = self.n;
        self.candidates.clear();
        for &c in &flips {
            let (i, j) = (c as usize % n, c as usize / n);
            for &k in &self.north {
                let u = ((j + n - k) % n) * n + i;
                if !self.plus[u] && self.mark[u] != stamp {
                    self.mark[u] = stamp;
                    self.candidates.push(u as u32);
                }
            }
            for &k in &self.east {
                let u = j * n + (i + n - k) % n;
                if !self.plus[u] && self.mark[u] != stamp {
                    self.mark[u] = stamp;
                    self.candidates.push(u as u32);
                }
            }
        }
        self.flips = flips;
        &self.flips
    }

    pub(crate) fn to_config(&self) -> Configuration {
        let n = self.n;
        Configuration::from_fn(n, |c| State::from_bool(self.plus[c.j * n + c.i]))
    }
}

/// `F^t(x)`, with `t` clamped to `n²`.
pub fn simulate(x: &Configuration, nb: &LNeighborhood, t: usize) -> Result<Configuration> {
    let n = x.n();
    let t = t.min(n * n);
    let mut ev = Evolution::new(x, nb)?;
    while ev.time < t {
        if ev.advance().is_empty() {
            break;
        }
    }
    Ok(ev.to_config())
}

/// Runs to the fixed point and returns it with the number of steps taken.
///
/// Panics if more than `n²` steps are needed, which the rule forbids.
pub fn run_to_fixed_point(x: &Configuration, nb: &LNeighborhood) -> Result<(Configuration, usize)> {
    let mut ev = Evolution::new(x, nb)?;
    let bound = x.n() * x.n();
    while !ev.advance().is_empty() {
        assert!(
            ev.time <= bound,
            "convergence bound exceeded: {} steps on a {}x{} torus",
            ev.time,
            x.n(),
            x.n()
        );
    }
    Ok((ev.to_config(), ev.time))
}

/// Time at which each cell (row-major) becomes `+1`: `Some(0)` for cells that
/// start `+1`, `None` for cells still `-1` at the fixed point.
pub fn plus_times(x: &Configuration, nb: &LNeighborhood) -> Result<Vec<Option<usize>>> {
    let n = x.n();
    let mut ev = Evolution::new(x, nb)?;
    let mut times: Vec<Option<usize>> = (0..n * n).map(|k| x.is_plus(k % n, k / n).then_some(0)).collect();
    loop {
        let t = ev.time + 1;
        let flips = ev.advance();
        if flips.is_empty() {
            break;
        }
        for &c in flips {
            times[c as usize] = Some(t);
        }
        assert!(t <= n * n, "convergence bound exceeded");
    }
    Ok(times)
}

/// Whether cell `c` differs at time `t` from its initial state.
pub fn predict_by_simulation(x: &Configuration, nb: &LNeighborhood, t: usize, c: Cell) -> Result<bool> {
    c.check(x.n())?;
    if x.get(c).is_plus() || t == 0 {
        return Ok(false);
    }
    Ok(simulate(x, nb, t)?.get(c).is_plus())
}
