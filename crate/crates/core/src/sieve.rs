//! The large-sieve quantity L(Q) and the counting bounds built from it.
//!
//! L(Q) sums, over squarefree a <= Q, the products of omega_p / (1 - omega_p)
//! across the primes dividing a. It is evaluated in exact rational
//! arithmetic so the monotonicity tests can be exact. Primes with no
//! supplied omega contribute nothing, which keeps L(Q) a lower bound and
//! the resulting count bound an upper-bound shape.
//!
//! The implicit constants of the underlying inequalities are not
//! effective. Bounds are reported with constant 1; the end-to-end
//! inequality check multiplies by the diagnostic constant
//! [`DIAGNOSTIC_CONSTANT`] instead. Both are labels for charts, not
//! certified constants.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::heights::ProjPoint;

/// Constant used when asserting the end-to-end sieve inequality.
pub const DIAGNOSTIC_CONSTANT: f64 = 64.0;

/// A sieving setup: dimension, height bound, modulus bound, local
/// densities and the excluded prime set.
#[derive(Debug, Clone)]
pub struct SieveProblem {
    n: u32,
    degree: u32,
    omega: BTreeMap<u64, BigRational>,
    excluded: BTreeSet<u64>,
    x: f64,
    q: f64,
}

impl SieveProblem {
    /// New problem over P^n with height bound `x`; Q defaults to x^(1/2).
    pub fn new(n: u32, x: f64) -> SieveProblem {
        assert!(n >= 1 && x >= 2.0);
        SieveProblem {
            n,
            degree: 1,
            omega: BTreeMap::new(),
            excluded: BTreeSet::new(),
            x,
            q: x.sqrt(),
        }
    }

    pub fn with_q(mut self, q: f64) -> SieveProblem {
        assert!(q >= 1.0);
        self.q = q;
        self
    }

    /// Sets omega_p. Values must lie in [0, 1).
    pub fn set_omega(&mut self, p: u64, omega: BigRational) -> Result<()> {
        if omega.is_negative() || omega >= BigRational::one() {
            return Err(Error::OmegaOutOfRange { p });
        }
        self.omega.insert(p, omega);
        Ok(())
    }

    pub fn set_omega_ratio(&mut self, p: u64, num: i64, den: i64) -> Result<()> {
        self.set_omega(p, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn exclude(&mut self, p: u64) {
        self.excluded.insert(p);
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn excluded_count(&self) -> usize {
        self.excluded.len()
    }

    pub fn omega(&self, p: u64) -> Option<&BigRational> {
        self.omega.get(&p)
    }

    /// L(Q) in exact rationals: sum over squarefree a <= Q of
    /// prod_{p | a} omega_p / (1 - omega_p).
    pub fn l_of_q(&self) -> BigRational {
        let qmax = self.q.floor() as u64;
        if qmax == 0 {
            return BigRational::zero();
        }
        // factor(p) := omega_p / (1 - omega_p), zero when omega_p is absent
        let factors: BTreeMap<u64, BigRational> = self
            .omega
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(&p, w)| (p, w / (BigRational::one() - w)))
            .collect();
        let spf = smallest_prime_factor_table(qmax);
        let mut total = BigRational::one(); // a = 1 term
        'term: for a in 2..=qmax {
            let mut term = BigRational::one();
            let mut rest = a;
            while rest > 1 {
                let p = spf[rest as usize];
                rest /= p;
                if rest % p == 0 {
                    continue 'term; // not squarefree
                }
                match factors.get(&p) {
                    Some(f) => term *= f,
                    None => continue 'term, // omega_p = 0 kills the term
                }
            }
            total += term;
        }
        total
    }

    /// max(x^{(n+1) deg}, Q^{2(n+1)}) / L(Q), with +infinity when L(Q) = 0.
    pub fn sieve_bound(&self) -> f64 {
        self.sieve_bound_with_l(&self.l_of_q())
    }

    /// Same bound with an externally supplied L(Q) value.
    pub fn sieve_bound_with_l(&self, l: &BigRational) -> f64 {
        if l.is_zero() {
            return f64::INFINITY;
        }
        let e1 = ((self.n + 1) * self.degree) as f64;
        let e2 = (2 * (self.n + 1)) as f64;
        let numer = self.x.powf(e1).max(self.q.powf(e2));
        numer / l.to_f64().expect("L(Q) fits in f64")
    }
}

fn smallest_prime_factor_table(limit: u64) -> Vec<u64> {
    let mut spf: Vec<u64> = (0..=limit).collect();
    let mut p = 2u64;
    while p * p <= limit {
        if spf[p as usize] == p {
            let mut m = p * p;
            while m <= limit {
                if spf[m as usize] == m {
                    spf[m as usize] = p;
                }
                m += p;
            }
        }
        p += 1;
    }
    spf
}

/// The three-term count-bound shape
/// (1-delta)^-1 x^{(n+1/2) deg} log x + |S|^{4n+4} + ((1-delta)^-1 c)^{4n+4},
/// evaluated with implicit constant 1.
pub fn hit_count_bound(n: u32, delta: f64, c: f64, s_count: u64, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    assert!(c >= 1.0 && x >= 2.0);
    let degree = 1.0;
    let inv = 1.0 / (1.0 - delta);
    let e = 4 * n + 4;
    let term1 = inv * x.powf((n as f64 + 0.5) * degree) * x.ln();
    let term2 = (s_count as f64).powi(e as i32);
    let term3 = (inv * c).powi(e as i32);
    Ok(term1 + term2 + term3)
}

/// Diagnostic size of the enlarged exceptional set: |S| + ceil(log2 |G_g|).
pub fn enlarged_exceptional_count(s_count: u64, g_order: u64) -> u64 {
    assert!(g_order >= 1);
    if g_order == 1 {
        return s_count;
    }
    s_count + (64 - (g_order - 1).leading_zeros()) as u64
}

/// Demonstration set for the end-to-end inequality: points of P^1(Q)
/// whose canonical numerator is even.
pub fn even_numerator_member(p: &ProjPoint) -> bool {
    p.coords()[0] % 2 == 0
}

/// Brute-forced local density omega_p of the even-numerator set: the
/// fraction of F_p^2 missed by reductions of integer representatives.
/// Scans representatives in a box wide enough to saturate every residue.
pub fn even_numerator_omega(p: u64) -> BigRational {
    let reach = (2 * p * p).max(64) as i64;
    let mut hit = vec![false; (p * p) as usize];
    // lifts of canonical members, times every scalar mod p
    for a0 in -reach..=reach {
        for a1 in -reach..=reach {
            if (a0, a1) == (0, 0) {
                continue;
            }
            let pt = ProjPoint::canonical(&[a0, a1]).unwrap();
            if pt.coords() != [a0, a1] || !even_numerator_member(&pt) {
                continue;
            }
            for lam in 1..=p as i64 {
                let r0 = (lam * a0).rem_euclid(p as i64) as u64;
                let r1 = (lam * a1).rem_euclid(p as i64) as u64;
                hit[(r0 * p + r1) as usize] = true;
            }
        }
    }
    let count = hit.iter().filter(|&&h| h).count() as i64;
    BigRational::one() - BigRational::new(BigInt::from(count), BigInt::from((p * p) as i64))
}

/// The full demonstration problem at height bound `x`, with omega_p
/// brute-forced for every prime up to Q.
pub fn even_numerator_problem(x: f64) -> SieveProblem {
    let mut problem = SieveProblem::new(1, x);
    let qmax = problem.q().floor() as u64;
    if qmax >= 2 {
        for p in crate::modarith::primes_up_to(qmax) {
            let w = even_numerator_omega(p);
            problem.set_omega(p, w).expect("densities lie in [0,1)");
        }
    }
    problem
}

/// Count of even-numerator points of height at most x.
pub fn even_numerator_count(x: u64) -> u64 {
    crate::heights::enumerate_proj(1, x)
        .filter(even_numerator_member)
        .count() as u64
}

/// Reference evaluation of L(Q): per-term trial division, no shared
/// sieve table. Independent route for testing [`SieveProblem::l_of_q`].
pub fn l_of_q_reference(problem: &SieveProblem) -> BigRational {
    let qmax = problem.q().floor() as u64;
    let mut total = BigRational::zero();
    for a in 1..=qmax {
        let mut term = BigRational::one();
        let mut squarefree = true;
        let mut rest = a;
        let mut d = 2u64;
        while d * d <= rest {
            if rest % d == 0 {
                let mut e = 0;
                while rest % d == 0 {
                    rest /= d;
                    e += 1;
                }
                if e > 1 {
                    squarefree = false;
                    break;
                }
                term *= omega_factor(problem, d);
            }
            d += 1;
        }
        if squarefree && rest > 1 {
            term *= omega_factor(problem, rest);
        }
        if squarefree {
            total += term;
        }
    }
    total
}

fn omega_factor(problem: &SieveProblem, p: u64) -> BigRational {
    match problem.omega(p) {
        Some(w) => w / (BigRational::one() - w),
        None => BigRational::zero(),
    }
}
