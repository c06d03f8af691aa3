//! Height-ordered enumeration of rational points on P^n and of the
//! Weierstrass family.
//!
//! A point is stored as its canonical primitive tuple: integer
//! coordinates with gcd 1 whose first nonzero entry is positive. The
//! height is the max of the absolute coordinates, which is exact for Q.
//! Streams are generated level by level so nothing of size O(x^{n+1})
//! is ever materialized.

use crate::curves::Curve;
use crate::par;

/// A point of P^n(Q) in canonical primitive coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<i64>,
}

impl ProjPoint {
    /// Canonicalizes an arbitrary nonzero integer tuple. Returns None for
    /// the zero tuple.
    pub fn canonical(coords: &[i64]) -> Option<ProjPoint> {
        let mut g: i64 = 0;
        for &c in coords {
            g = gcd(g, c.abs());
        }
        if g == 0 {
            return None;
        }
        let mut v: Vec<i64> = coords.iter().map(|&c| c / g).collect();
        if let Some(first) = v.iter().find(|&&c| c != 0) {
            if *first < 0 {
                for c in &mut v {
                    *c = -*c;
                }
            }
        }
        Some(ProjPoint { coords: v })
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn height(&self) -> u64 {
        self.coords.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn is_canonical(coords: &[i64]) -> bool {
        match ProjPoint::canonical(coords) {
            Some(p) => p.coords == coords,
            None => false,
        }
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Stream of every canonical point of P^n(Q) with height at most `x`,
/// in nondecreasing height order, ties broken lexicographically.
pub fn enumerate_proj(n: usize, x: u64) -> impl Iterator<Item = ProjPoint> {
    assert!(n >= 1 && x >= 1);
    (1..=x).flat_map(move |h| LevelIter::new(n, h))
}

/// Points with height exactly `h`, ascending lexicographically.
struct LevelIter {
    h: i64,
    odometer: Vec<i64>,
    done: bool,
}

impl LevelIter {
    fn new(n: usize, h: u64) -> LevelIter {
        LevelIter {
            h: h as i64,
            odometer: vec![-(h as i64); n + 1],
            done: false,
        }
    }

    fn advance(&mut self) {
        for i in (0..self.odometer.len()).rev() {
            if self.odometer[i] < self.h {
                self.odometer[i] += 1;
                for c in &mut self.odometer[i + 1..] {
                    *c = -self.h;
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for LevelIter {
    type Item = ProjPoint;

    fn next(&mut self) -> Option<ProjPoint> {
        while !self.done {
            let v = &self.odometer;
            let on_shell = v.iter().any(|&c| c.abs() == self.h);
            if on_shell && ProjPoint::is_canonical(v) {
                let out = ProjPoint { coords: v.clone() };
                self.advance();
                return Some(out);
            }
            self.advance();
        }
        None
    }
}

/// |{u in P^n(Q) : H(u) <= x}|, computed by sharded level scans.
pub fn count_height(n: usize, x: u64) -> u64 {
    assert!(n >= 1 && x >= 1);
    count_height_impl(n, x, false)
}

/// Single-threaded variant kept for direct comparison in benches.
pub fn count_height_seq(n: usize, x: u64) -> u64 {
    assert!(n >= 1 && x >= 1);
    count_height_impl(n, x, true)
}

fn count_height_impl(n: usize, x: u64, force_seq: bool) -> u64 {
    // levels are assigned to chunks round-robin: level costs grow with h,
    // so contiguous blocks would leave the last chunk doing most of the work
    let chunks = (par::default_chunks() as u64).min(x);
    let ranges = par::shard_ranges(chunks, chunks as usize);
    let count_stride = |r: std::ops::Range<u64>| -> u64 {
        let chunk = r.start;
        let mut total = 0u64;
        let mut h = chunk + 1;
        while h <= x {
            total += LevelIter::new(n, h).count() as u64;
            h += chunks;
        }
        total
    };
    let partials = if force_seq {
        par::map_chunks_seq(ranges, count_stride)
    } else {
        par::map_chunks(ranges, count_stride)
    };
    partials.into_iter().sum()
}

/// All integral Weierstrass curves with max(|a|, |b|) <= x and nonzero
/// discriminant, in row-major (a, then b) order.
pub fn enumerate_weierstrass(x: u64) -> impl Iterator<Item = Curve> {
    assert!(x >= 1);
    let x = x as i64;
    (-x..=x).flat_map(move |a| (-x..=x).filter_map(move |b| Curve::new(a, b).ok()))
}
