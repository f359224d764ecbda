//! Polar annulus-sector grid over sticks.
//!
//! A stick is registered in every cell that one of its points falls in
//! (with a small safety margin), so two sticks can only meet if they share
//! a cell. Annulus `k` covers radii `[k h, (k+1) h)`; it is cut into
//! `⌈2π sinh((k+1)h) / h⌉` equal sectors.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::hash::{BuildHasherDefault, Hasher};

use crate::geometry::{axis_foot, axis_height, HPoint, Stick};

const MAX_SECTORS: f64 = 4_294_967_296.0;
const RHO_MARGIN: f64 = 1e-8;
const T_MARGIN: f64 = 1e-7;

#[derive(Default)]
pub struct CellHasher(u64);

impl Hasher for CellHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x100_0000_01B3);
        }
    }
    fn write_u64(&mut self, n: u64) {
        let x = n.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        self.0 = x ^ (x >> 29);
    }
}

type CellMap = HashMap<u64, Vec<u32>, BuildHasherDefault<CellHasher>>;

#[derive(Debug, Clone)]
pub struct StickIndex {
    h: f64,
    cells: CellMap,
    scratch: Vec<u64>,
}

impl StickIndex {
    pub fn new(cell_size: f64) -> StickIndex {
        StickIndex {
            h: cell_size,
            cells: CellMap::default(),
            scratch: Vec::new(),
        }
    }

    /// A cell size suited to sticks of length `length`.
    pub fn for_length(length: f64) -> StickIndex {
        StickIndex::new((length / 4.0).clamp(0.25, 1.0))
    }

    fn sectors(&self, k: u64) -> f64 {
        let r1 = (k + 1) as f64 * self.h;
        (TAU * r1.sinh() / self.h).ceil().clamp(1.0, MAX_SECTORS)
    }

    /// Cells touched by `stick`, appended to `out` (may repeat).
    pub fn cells_of(&self, stick: &Stick, out: &mut Vec<u64>) {
        let half = stick.length() / 2.0;
        let frame = stick.frame();
        let (d, dir) = frame.local(&HPoint::ORIGIN);
        let (t0, d0) = if d == 0.0 {
            (0.0, 0.0)
        } else {
            (axis_foot(d, dir), axis_height(d, dir).abs())
        };
        let cd0 = d0.cosh();
        let reach = |r: f64| -> f64 {
            if r <= d0 {
                0.0
            } else {
                (r.cosh() / cd0).acosh()
            }
        };
        let point = |t: f64| -> HPoint {
            if t >= 0.0 {
                frame.global(t, 0.0)
            } else {
                frame.global(-t, PI)
            }
        };
        let rho_lo = (stick.min_rho() - RHO_MARGIN).max(0.0);
        let rho_hi = stick.max_rho() + RHO_MARGIN;
        let k_lo = (rho_lo / self.h).floor() as u64;
        let k_hi = (rho_hi / self.h).floor() as u64;
        for k in k_lo..=k_hi {
            let n = self.sectors(k);
            let key = |j: u64| (k << 40) | j;
            let r0 = k as f64 * self.h - RHO_MARGIN;
            let r1 = (k + 1) as f64 * self.h + RHO_MARGIN;
            if r0 <= 0.0 {
                let nn = n as u64;
                out.extend((0..nn).map(key));
                continue;
            }
            let outer = reach(r1);
            let inner = if r0 > d0 { reach(r0) } else { -1.0 };
            let mut pieces: [(f64, f64); 2] = [(0.0, -1.0); 2];
            if inner < 0.0 {
                pieces[0] = (t0 - outer, t0 + outer);
            } else {
                pieces[0] = (t0 - outer, t0 - inner);
                pieces[1] = (t0 + inner, t0 + outer);
            }
            for (a, b) in pieces {
                let a = (a - T_MARGIN).max(-half);
                let b = (b + T_MARGIN).min(half);
                if a > b {
                    continue;
                }
                let pa = point(a);
                let pb = point(b);
                let (ta, tb) = (pa.angle(), pb.angle());
                let span = tb.diff(ta);
                let (start, width) = if span >= 0.0 { (ta, span) } else { (tb, -span) };
                let eta = 1e-12 + 4e-9 / r0.sinh();
                let s0 = start.add(-eta);
                let sectors_f = (width + 2.0 * eta) * n / TAU;
                let j0 = (s0.radians() * n / TAU).floor() as u64;
                let nn = n as u64;
                let count = (sectors_f.ceil() as u64 + 1).min(nn);
                for m in 0..count {
                    out.push(key((j0 + m) % nn));
                }
            }
        }
    }

    /// Registers stick `id`.
    pub fn insert(&mut self, id: u32, stick: &Stick) {
        let mut cells = std::mem::take(&mut self.scratch);
        cells.clear();
        self.cells_of(stick, &mut cells);
        cells.sort_unstable();
        cells.dedup();
        for &c in &cells {
            self.cells.entry(c).or_default().push(id);
        }
        self.scratch = cells;
    }

    /// Calls `f` with the ids of registered sticks sharing a cell with
    /// `stick` (an id may be reported more than once).
    pub fn for_each_candidate<F: FnMut(u32)>(&mut self, stick: &Stick, mut f: F) {
        let mut cells = std::mem::take(&mut self.scratch);
        cells.clear();
        self.cells_of(stick, &mut cells);
        cells.sort_unstable();
        cells.dedup();
        for c in &cells {
            if let Some(v) = self.cells.get(c) {
                for &id in v {
                    f(id);
                }
            }
        }
        self.scratch = cells;
    }

    /// Distinct candidate ids for `stick`, sorted.
    pub fn candidates(&mut self, stick: &Stick) -> Vec<u32> {
        let mut out = Vec::new();
        self.for_each_candidate(stick, |id| out.push(id));
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }
}
