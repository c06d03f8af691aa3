//! One-sided classification of the mod-ell Galois image of a curve over Q
//! from sampled Frobenius data.
//!
//! For odd ell the classifier eliminates the maximal-subgroup types of
//! GL2(F_ell) one witness class (t, d) = (a_p mod ell, p mod ell) at a
//! time:
//!
//! - Borel (a stable line): every element of a Borel has split
//!   characteristic polynomial, so one class with t^2 - 4d a nonzero
//!   nonsquare eliminates it.
//! - split Cartan normalizer: elements outside the torus have trace 0 and
//!   torus elements have square discriminant, so a class with t != 0 and
//!   nonzero nonsquare discriminant is incompatible. Two distinct such
//!   classes are required before the type is eliminated.
//! - nonsplit Cartan normalizer: symmetric, with nonzero square
//!   discriminant witnesses, again two distinct classes.
//! - exceptional (projective A4, S4, A5): the projective-order invariant
//!   u = t^2/d on those groups only takes values in
//!   {0, 1, 2, 4} union the roots of u^2 - 3u + 1; any other observed u
//!   eliminates the type.
//!
//! A verdict never claims non-surjectivity: `Candidate` only means the
//! budget did not prove surjectivity, which is the right over-count for
//! the exceptional-set experiments. At ell = 2 the image is computed
//! exactly from the cubic.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::curves::{self, Curve, Reduction};
use crate::modarith::{is_prime, primes_in, QuadTable};

/// Maximal-subgroup types not yet ruled out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Reason {
    Reducible,
    SplitCartanNorm,
    NonsplitCartanNorm,
    Exceptional,
}

impl Reason {
    pub const ALL: [Reason; 4] = [
        Reason::Reducible,
        Reason::SplitCartanNorm,
        Reason::NonsplitCartanNorm,
        Reason::Exceptional,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Reason::Reducible => "Reducible",
            Reason::SplitCartanNorm => "SplitCartanNorm",
            Reason::NonsplitCartanNorm => "NonsplitCartanNorm",
            Reason::Exceptional => "Exceptional",
        }
    }
}

/// Outcome of a classification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageVerdict {
    reasons: BTreeSet<Reason>,
    primes_used: u32,
}

impl ImageVerdict {
    pub fn contains_sl2(&self) -> bool {
        self.reasons.is_empty()
    }

    /// Subgroup types not yet ruled out; empty exactly for `ContainsSL2`.
    pub fn reasons(&self) -> &BTreeSet<Reason> {
        &self.reasons
    }

    pub fn primes_used(&self) -> u32 {
        self.primes_used
    }

    pub fn label(&self) -> String {
        if self.contains_sl2() {
            "ContainsSL2".to_string()
        } else {
            let names: Vec<&str> = self.reasons.iter().map(Reason::name).collect();
            format!("Candidate({})", names.join("+"))
        }
    }
}

/// Incremental elimination state, fed one Frobenius class at a time.
/// Public so synthetic class streams can drive it directly.
#[derive(Debug, Clone)]
pub struct EliminationState {
    ell: u64,
    chi: QuadTable,
    exceptional_u: Vec<u64>,
    split_witnesses: BTreeSet<(u64, u64)>,
    nonsplit_witnesses: BTreeSet<(u64, u64)>,
    eliminated: BTreeSet<Reason>,
    observed: u32,
}

impl EliminationState {
    pub fn new(ell: u64) -> EliminationState {
        assert!(is_prime(ell) && ell >= 3, "elimination needs odd ell");
        let exceptional_u = allowed_exceptional_u(ell);
        EliminationState {
            ell,
            chi: QuadTable::new(ell).expect("ell is prime"),
            exceptional_u,
            split_witnesses: BTreeSet::new(),
            nonsplit_witnesses: BTreeSet::new(),
            eliminated: BTreeSet::new(),
            observed: 0,
        }
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// Feeds one class (t, d) with d nonzero mod ell.
    pub fn observe(&mut self, t: u64, d: u64) {
        let ell = self.ell;
        let t = t % ell;
        let d = d % ell;
        assert!(d != 0, "determinant class must be a unit");
        self.observed += 1;

        let disc = (t * t % ell + ell - 4 * d % ell) % ell;
        let disc_chi = self.chi.chi_reduced(disc);

        if disc_chi == -1 {
            self.eliminated.insert(Reason::Reducible);
            if t != 0 {
                self.split_witnesses.insert((t, d));
                if self.split_witnesses.len() >= 2 {
                    self.eliminated.insert(Reason::SplitCartanNorm);
                }
            }
        }
        if disc_chi == 1 && t != 0 {
            self.nonsplit_witnesses.insert((t, d));
            if self.nonsplit_witnesses.len() >= 2 {
                self.eliminated.insert(Reason::NonsplitCartanNorm);
            }
        }

        let u = t * t % ell * crate::modarith::inv_mod(d, ell).unwrap() % ell;
        if !self.exceptional_u.contains(&u) {
            self.eliminated.insert(Reason::Exceptional);
        }
    }

    pub fn all_eliminated(&self) -> bool {
        self.eliminated.len() == Reason::ALL.len()
    }

    pub fn eliminated(&self) -> &BTreeSet<Reason> {
        &self.eliminated
    }

    pub fn into_verdict(self) -> ImageVerdict {
        let reasons = Reason::ALL
            .iter()
            .filter(|r| !self.eliminated.contains(r))
            .copied()
            .collect();
        ImageVerdict {
            reasons,
            primes_used: self.observed,
        }
    }
}

/// u = t^2/d values realized by the exceptional projective types:
/// projective orders 1..5 give u in {4, 0, 1, 2} and the golden-ratio
/// classes u^2 - 3u + 1 = 0.
fn allowed_exceptional_u(ell: u64) -> Vec<u64> {
    let mut out = vec![0, 1, 2, 4 % ell];
    for u in 0..ell {
        if (u * u % ell + ell - 3 * u % ell + 1).is_multiple_of(ell) {
            out.push(u);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Shared character tables for every prime in a budget interval, so curve
/// grids can be classified without rebuilding tables per curve.
pub struct ApTables {
    tables: Vec<QuadTable>,
}

impl ApTables {
    /// Tables for all primes in [5, budget].
    pub fn new(budget: u64) -> ApTables {
        let primes = if budget >= 5 {
            primes_in(5, budget)
        } else {
            Vec::new()
        };
        ApTables {
            tables: primes.into_iter().map(|p| QuadTable::new(p).unwrap()).collect(),
        }
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.tables.iter().map(|t| t.prime())
    }

    pub fn budget_tables(&self) -> &[QuadTable] {
        &self.tables
    }
}

/// Classifies the mod-ell image of `e` using good primes up to the budget
/// endpoint. Bad primes and p = ell are skipped but still consume budget,
/// since the budget is the interval endpoint. Deterministic given
/// (curve, ell, budget); stops early once everything is eliminated.
pub fn classify_mod_ell(e: &Curve, ell: u64, budget: u64) -> ImageVerdict {
    let tables = ApTables::new(budget);
    classify_mod_ell_with(&tables, e, ell)
}

/// Classification against prebuilt tables.
pub fn classify_mod_ell_with(tables: &ApTables, e: &Curve, ell: u64) -> ImageVerdict {
    let mut state = EliminationState::new(ell);
    for chi in tables.budget_tables() {
        let p = chi.prime();
        if p == ell {
            continue;
        }
        let Reduction::Good(cm) = e.reduce(p) else {
            continue;
        };
        let a_p = curves::ap_with_table(cm.a().value(), cm.b().value(), chi);
        let t = a_p.rem_euclid(ell as i64) as u64;
        state.observe(t, p % ell);
        if state.all_eliminated() {
            break;
        }
    }
    state.into_verdict()
}

/// Exact mod-2 image, read off the cubic x^3 + ax + b over Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mod2Image {
    /// Irreducible cubic with nonsquare discriminant: the full S3.
    Full,
    /// Irreducible cubic with square discriminant: the 3-cycle group.
    Cyclic3,
    /// Reducible cubic: image of order at most 2.
    OrderLE2,
}

impl Mod2Image {
    pub fn is_surjective(&self) -> bool {
        matches!(self, Mod2Image::Full)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Mod2Image::Full => "Full",
            Mod2Image::Cyclic3 => "Cyclic3",
            Mod2Image::OrderLE2 => "OrderLE2",
        }
    }
}

/// Image of the mod-2 representation via the 2-division cubic.
pub fn mod2_image(e: &Curve) -> Mod2Image {
    if cubic_has_integer_root(e.a(), e.b()) {
        return Mod2Image::OrderLE2;
    }
    // disc(x^3 + ax + b) = -4a^3 - 27b^2
    let disc = -(e.disc_factor());
    if is_perfect_square_i128(disc) {
        Mod2Image::Cyclic3
    } else {
        Mod2Image::Full
    }
}

/// Rational root test for the monic integer cubic x^3 + ax + b: any
/// rational root is an integer dividing b.
fn cubic_has_integer_root(a: i64, b: i64) -> bool {
    if b == 0 {
        return true; // x = 0
    }
    let eval = |r: i128| -> i128 { r * r * r + (a as i128) * r + b as i128 };
    let babs = b.unsigned_abs();
    let mut d = 1u64;
    while d * d <= babs {
        if babs.is_multiple_of(d) {
            for cand in [d as i128, babs as i128 / d as i128] {
                if eval(cand) == 0 || eval(-cand) == 0 {
                    return true;
                }
            }
        }
        d += 1;
    }
    false
}

fn is_perfect_square_i128(v: i128) -> bool {
    if v < 0 {
        return false;
    }
    let r = (v as f64).sqrt() as i128;
    for cand in r.saturating_sub(2)..=r + 2 {
        if cand >= 0 && cand * cand == v {
            return true;
        }
    }
    false
}

/// Verdict for a single ell in a multi-ell scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EllVerdict {
    Mod2(Mod2Image),
    ModEll(ImageVerdict),
}

impl EllVerdict {
    pub fn is_surjective(&self) -> bool {
        match self {
            EllVerdict::Mod2(m) => m.is_surjective(),
            EllVerdict::ModEll(v) => v.contains_sl2(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            EllVerdict::Mod2(m) => m.label().to_string(),
            EllVerdict::ModEll(v) => v.label(),
        }
    }
}

/// Runs the classifier at every listed prime: exact at 2, elimination at
/// odd ell (ell = 3 goes through the same tables as ell >= 5).
pub fn surjective_all_ell(e: &Curve, ells: &[u64], budget: u64) -> BTreeMap<u64, EllVerdict> {
    let tables = ApTables::new(budget);
    surjective_all_ell_with(&tables, e, ells)
}

/// Multi-ell scan against prebuilt tables.
pub fn surjective_all_ell_with(
    tables: &ApTables,
    e: &Curve,
    ells: &[u64],
) -> BTreeMap<u64, EllVerdict> {
    assert!(!ells.is_empty());
    let mut out = BTreeMap::new();
    for &ell in ells {
        let v = if ell == 2 {
            EllVerdict::Mod2(mod2_image(e))
        } else {
            EllVerdict::ModEll(classify_mod_ell_with(tables, e, ell))
        };
        out.insert(ell, v);
    }
    out
}
