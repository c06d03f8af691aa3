//! Elliptic curves y^2 = x^3 + ax + b over Q and over F_p.
//!
//! Point counting is the O(p) quadratic-character sum. Reduction at p <= 3
//! is always reported bad: short Weierstrass reduction degenerates there
//! and no experiment in this crate needs those primes.

use crate::error::{Error, Result};
use crate::modarith::{Field, FieldElem, QuadTable};

/// Coefficient cap keeping 4a^3 + 27b^2 inside i128.
pub const MAX_COEFF: i64 = 1 << 40;

/// An integral Weierstrass curve, nonsingular over Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Curve {
    a: i64,
    b: i64,
}

impl Curve {
    pub fn new(a: i64, b: i64) -> Result<Curve> {
        for c in [a, b] {
            if c.abs() > MAX_COEFF {
                return Err(Error::CoefficientTooLarge(c));
            }
        }
        let c = Curve { a, b };
        if c.disc_factor() == 0 {
            return Err(Error::SingularCurve);
        }
        Ok(c)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// 4a^3 + 27b^2; the discriminant is -16 times this.
    pub fn disc_factor(&self) -> i128 {
        let a = self.a as i128;
        let b = self.b as i128;
        4 * a * a * a + 27 * b * b
    }

    pub fn discriminant(&self) -> i128 {
        -16 * self.disc_factor()
    }

    /// Reduction mod p. Bad at p <= 3 and at primes dividing 4a^3 + 27b^2.
    pub fn reduce(&self, p: u64) -> Reduction {
        if p <= 3 {
            return Reduction::Bad;
        }
        let field = match Field::new(p) {
            Ok(f) => f,
            Err(_) => return Reduction::Bad,
        };
        if self.disc_factor().rem_euclid(p as i128) == 0 {
            return Reduction::Bad;
        }
        Reduction::Good(CurveModP {
            a: field.elem(self.a.rem_euclid(p as i64)),
            b: field.elem(self.b.rem_euclid(p as i64)),
        })
    }
}

/// Outcome of reducing a curve mod p. Bad reduction is a value, not a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Good(CurveModP),
    Bad,
}

impl Reduction {
    pub fn good(self) -> Option<CurveModP> {
        match self {
            Reduction::Good(c) => Some(c),
            Reduction::Bad => None,
        }
    }
}

/// A curve with good reduction over F_p, p > 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveModP {
    a: FieldElem,
    b: FieldElem,
}

impl CurveModP {
    pub fn new(a: FieldElem, b: FieldElem) -> Result<CurveModP> {
        assert_eq!(a.modulus(), b.modulus());
        let p = a.modulus();
        if p <= 3 {
            return Err(Error::SingularCurve);
        }
        let f = Field::new(p)?;
        let disc = f.elem(4) * a.pow(3) + f.elem(27) * b.pow(2);
        if disc.is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(CurveModP { a, b })
    }

    pub fn a(&self) -> FieldElem {
        self.a
    }

    pub fn b(&self) -> FieldElem {
        self.b
    }

    pub fn p(&self) -> u64 {
        self.a.modulus()
    }
}

/// Frobenius datum (p, a_p) with the Hasse bound enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrobData {
    p: u64,
    a_p: i64,
}

impl FrobData {
    pub fn new(p: u64, a_p: i64) -> Result<FrobData> {
        if !crate::modarith::is_prime(p) {
            return Err(Error::CompositeModulus(p));
        }
        if (a_p as i128) * (a_p as i128) > 4 * p as i128 {
            return Err(Error::HasseViolation { p, a_p });
        }
        Ok(FrobData { p, a_p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a_p(&self) -> i64 {
        self.a_p
    }

    /// #E(F_p) = p + 1 - a_p.
    pub fn point_count(&self) -> u64 {
        (self.p as i64 + 1 - self.a_p) as u64
    }
}

/// Trace of Frobenius by the character sum
/// #E(F_p) = p + 1 + sum_x chi(x^3 + ax + b).
pub fn trace_of_frobenius(e: &CurveModP) -> FrobData {
    let p = e.p();
    let chi = QuadTable::new(p).expect("modulus of a CurveModP is prime");
    let a_p = ap_with_table(e.a.value(), e.b.value(), &chi);
    FrobData { p, a_p }
}

/// Character-sum kernel over a shared table: a_p = -sum_x chi(x^3 + ax + b).
/// `a` and `b` must already be reduced below the table's prime.
pub fn ap_with_table(a: u64, b: u64, chi: &QuadTable) -> i64 {
    let p = chi.prime();
    debug_assert!(a < p && b < p);
    let mut sum = 0i64;
    for x in 0..p {
        let x2 = (x * x) % p;
        let x3 = (x2 * x) % p;
        let v = (x3 + a * x % p + b) % p;
        sum += chi.chi_reduced(v);
    }
    -sum
}

/// Reference point counter: walks all (x, y) in F_p^2 and adds infinity.
/// Slow on purpose; it is the independent check for the character sum.
pub fn point_count_bruteforce(e: &CurveModP) -> u64 {
    let p = e.p();
    let a = e.a.value();
    let b = e.b.value();
    let mut n = 1u64;
    for x in 0..p {
        let rhs = ((x * x % p) * x % p + a * x % p + b) % p;
        for y in 0..p {
            if y * y % p == rhs {
                n += 1;
            }
        }
    }
    n
}

/// Trace and determinant of Frobenius mod ell: (a_p mod ell, p mod ell).
pub fn frobenius_charpoly_mod(f: &FrobData, ell: u64) -> Result<(u64, u64)> {
    if f.p == ell {
        return Err(Error::EqualCharacteristic(ell));
    }
    let t = f.a_p.rem_euclid(ell as i64) as u64;
    let d = f.p % ell;
    Ok((t, d))
}

/// Whether the roots of x^2 - a_p x + p generate a free abelian group of
/// rank 2 in C^x.
///
/// Both roots have modulus sqrt(p), so any multiplicative relation forces
/// a power of the ratio pi / conj(pi) to be 1. That ratio is a root of
/// unity exactly in the supersingular case a_p = 0 mod p and in the
/// rational-angle cases a_p^2 in {0, p, 2p, 3p, 4p}.
pub fn phi_rank_is_free_rank2(f: &FrobData) -> bool {
    if f.a_p.rem_euclid(f.p as i64) == 0 {
        return false;
    }
    let sq = (f.a_p as i128) * (f.a_p as i128);
    let p = f.p as i128;
    !(sq % p == 0 && sq / p <= 4)
}
