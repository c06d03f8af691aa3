//! Frobenius class histograms for the full Weierstrass family over F_p.
//!
//! For every nonsingular (a, b) in F_p^2 the pair
//! (a_p mod ell, p mod ell) is tallied. The fast path walks the family by
//! j-invariant: each j outside {0, 1728} carries exactly p - 1 curves,
//! split evenly between a quadratic-twist pair with opposite traces, so
//! one point count per j covers the whole fiber. The two special lines
//! a = 0 and b = 0 are counted curve by curve. The result is identical to
//! the brute-force tally over all pairs, which
//! [`family_histogram_naive`] keeps around as the reference route.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gl2;
use crate::modarith::{is_prime, QuadTable};
use crate::par;

/// Tally of (trace, det) Frobenius classes over the family mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassHistogram {
    ell: u64,
    p: u64,
    counts: BTreeMap<(u64, u64), u64>,
    total: u64,
}

impl ClassHistogram {
    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// |U(F_p)| = p^2 - p.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// The determinant label shared by every class: p mod ell.
    pub fn det_class(&self) -> u64 {
        self.p % self.ell
    }

    pub fn counts(&self) -> &BTreeMap<(u64, u64), u64> {
        &self.counts
    }

    pub fn count(&self, t: u64, d: u64) -> u64 {
        self.counts.get(&(t, d)).copied().unwrap_or(0)
    }

    /// Whether p does not divide |SL2(F_ell)| = ell^3 - ell. Histograms at
    /// pairs failing this are still produced but flagged in reports.
    pub fn tame(&self) -> bool {
        !gl2::group_order_sl2(self.ell).is_multiple_of(self.p)
    }
}

fn tally_from_vec(ell: u64, p: u64, tallies: Vec<u64>) -> ClassHistogram {
    let d = p % ell;
    let mut counts = BTreeMap::new();
    let mut total = 0;
    for (t, &c) in tallies.iter().enumerate() {
        if c > 0 {
            counts.insert((t as u64, d), c);
        }
        total += c;
    }
    ClassHistogram {
        ell,
        p,
        counts,
        total,
    }
}

struct FamilyTables {
    p: u64,
    chi: QuadTable,
    cubes: Vec<u64>,
}

impl FamilyTables {
    fn new(p: u64) -> FamilyTables {
        let chi = QuadTable::new(p).expect("p is prime");
        let cubes: Vec<u64> = (0..p).map(|x| (x * x % p) * x % p).collect();
        FamilyTables { p, chi, cubes }
    }

    #[inline]
    fn ap(&self, a: u64, b: u64) -> i64 {
        let p = self.p;
        let mut sum = 0i64;
        for x in 0..p {
            let v = (self.cubes[x as usize] + a * x % p + b) % p;
            sum += self.chi.chi_reduced(v);
        }
        -sum
    }
}

/// Histogram over the full family, sharded over the j-line.
pub fn family_histogram(p: u64, ell: u64) -> ClassHistogram {
    family_histogram_impl(p, ell, false)
}

/// Single-threaded variant for direct comparison.
pub fn family_histogram_seq(p: u64, ell: u64) -> ClassHistogram {
    family_histogram_impl(p, ell, true)
}

fn family_histogram_impl(p: u64, ell: u64, force_seq: bool) -> ClassHistogram {
    assert!(p > 3 && is_prime(p), "need a good prime p > 3");
    assert!(is_prime(ell) && ell != p, "need a prime ell != p");
    let tables = FamilyTables::new(p);
    let tables = &tables;
    let j1728 = 1728 % p;
    let half = (p - 1) / 2;

    // Work items 0..p are j-values; items p..(3p - 2) index the two
    // special lines a = 0 (b = 1..p) and b = 0 (a = 1..p).
    let len = 3 * p - 2;
    let ranges = par::shard_ranges(len, par::default_chunks());
    let scan = move |r: std::ops::Range<u64>| -> Vec<u64> {
        let mut tally = vec![0u64; ell as usize];
        let mut add = |ap: i64, weight: u64| {
            let t = ap.rem_euclid(ell as i64) as u64;
            tally[t as usize] += weight;
        };
        for item in r {
            if item < p {
                let j = item;
                if j == 0 || j == j1728 {
                    continue;
                }
                let k = (1728 + p - j) % p;
                let a0 = 3 * j % p * k % p;
                let b0 = 2 * j % p * k % p * k % p;
                let ap = tables.ap(a0, b0);
                add(ap, half);
                add(-ap, half);
            } else if item < 2 * p - 1 {
                let b = item - p + 1;
                add(tables.ap(0, b), 1);
            } else {
                let a = item - (2 * p - 1) + 1;
                add(tables.ap(a, 0), 1);
            }
        }
        tally
    };
    let partials = if force_seq {
        par::map_chunks_seq(ranges, scan)
    } else {
        par::map_chunks(ranges, scan)
    };
    let mut tally = vec![0u64; ell as usize];
    for part in partials {
        for (slot, v) in tally.iter_mut().zip(part) {
            *slot += v;
        }
    }
    let h = tally_from_vec(ell, p, tally);
    assert_eq!(h.total, p * p - p, "family size must be p^2 - p");
    h
}

/// Brute-force histogram: every (a, b) pair counted separately. The
/// reference route; quadratic in p times the point-count cost.
pub fn family_histogram_naive(p: u64, ell: u64) -> ClassHistogram {
    assert!(p > 3 && is_prime(p));
    assert!(is_prime(ell) && ell != p);
    let tables = FamilyTables::new(p);
    let mut tally = vec![0u64; ell as usize];
    for a in 0..p {
        for b in 0..p {
            if (4 * (a * a % p) % p * a % p + 27 * (b * b % p) % p).is_multiple_of(p) {
                continue;
            }
            let t = tables.ap(a, b).rem_euclid(ell as i64) as u64;
            tally[t as usize] += 1;
        }
    }
    tally_from_vec(ell, p, tally)
}

/// Expected count |C| / |SL2(F_ell)| * (p^2 - p) for an explicit
/// conjugation-stable class inside the det = p mod ell coset.
pub fn prediction(ell: u64, p: u64, class: &gl2::MatSet) -> Result<f64> {
    let d = p % ell;
    for m in class.iter() {
        if m.det() != d {
            return Err(Error::NotInCoset { expected: d });
        }
    }
    Ok(class.len() as f64 / gl2::group_order_sl2(ell) as f64 * (p * p - p) as f64)
}

/// Expected count for one characteristic-polynomial fiber.
pub fn prediction_fiber(ell: u64, p: u64, t: u64) -> f64 {
    let d = p % ell;
    let fiber = gl2::charpoly_fiber(ell, t, d);
    fiber.len() as f64 / gl2::group_order_sl2(ell) as f64 * (p * p - p) as f64
}

/// One row of a deviation report.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    pub t: u64,
    pub d: u64,
    pub observed: u64,
    pub predicted: f64,
    /// (observed - predicted) / p^(3/2)
    pub normalized: f64,
}

/// Per-class (observed - predicted) / p^(3/2) table across all trace
/// classes in the determinant coset of the histogram.
pub fn deviation_report(h: &ClassHistogram) -> Vec<DeviationRow> {
    let d = h.det_class();
    let scale = (h.p() as f64).powf(1.5);
    (0..h.ell())
        .map(|t| {
            let observed = h.count(t, d);
            let predicted = prediction_fiber(h.ell(), h.p(), t);
            DeviationRow {
                t,
                d,
                observed,
                predicted,
                normalized: (observed as f64 - predicted) / scale,
            }
        })
        .collect()
}
