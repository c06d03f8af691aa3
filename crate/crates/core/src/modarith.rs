//! Prime fields F_p and elementary number-theory utilities.
//!
//! Moduli are capped below 2^62 so every product fits a 128-bit
//! intermediate. Primality is decided deterministically: trial division
//! below 2^32, a fixed Miller-Rabin witness set above it.

use crate::error::{Error, Result};

/// Exclusive upper bound for field moduli.
pub const MAX_MODULUS: u64 = 1 << 62;

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn miller_rabin(n: u64) -> bool {
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &MR_WITNESSES {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic primality test for all `n < 2^62`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    if n < (1 << 32) {
        let mut d = 3;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 2;
        }
        true
    } else {
        miller_rabin(n)
    }
}

/// A prime field descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    p: u64,
}

impl Field {
    /// Builds the field of order `p`, rejecting composite or oversized moduli.
    pub fn new(p: u64) -> Result<Field> {
        if p >= MAX_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::CompositeModulus(p));
        }
        Ok(Field { p })
    }

    pub fn order(&self) -> u64 {
        self.p
    }

    /// Canonical residue of a signed integer.
    pub fn elem(&self, v: i64) -> FieldElem {
        let p = self.p as i64;
        FieldElem {
            value: v.rem_euclid(p) as u64,
            modulus: self.p,
        }
    }

    pub fn elem_u(&self, v: u64) -> FieldElem {
        FieldElem {
            value: v % self.p,
            modulus: self.p,
        }
    }
}

/// A residue with its prime modulus attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    value: u64,
    modulus: u64,
}

impl FieldElem {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pow(&self, exp: u64) -> FieldElem {
        FieldElem {
            value: pow_mod(self.value, exp, self.modulus),
            modulus: self.modulus,
        }
    }

    /// Inverse by extended Euclid. Zero is rejected explicitly.
    pub fn inv(&self) -> Result<FieldElem> {
        if self.value == 0 {
            return Err(Error::ZeroInverse(self.modulus));
        }
        let v = inv_mod(self.value, self.modulus).expect("nonzero residue mod a prime");
        Ok(FieldElem {
            value: v,
            modulus: self.modulus,
        })
    }
}

/// Extended-Euclid inverse of `a` mod `m`, for any `m >= 2`.
/// Returns `None` when `gcd(a, m) != 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

fn check_same_modulus(a: &FieldElem, b: &FieldElem) {
    assert_eq!(
        a.modulus, b.modulus,
        "mixed moduli {} and {}",
        a.modulus, b.modulus
    );
}

impl std::ops::Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        check_same_modulus(&self, &rhs);
        let mut v = self.value + rhs.value;
        if v >= self.modulus {
            v -= self.modulus;
        }
        FieldElem {
            value: v,
            modulus: self.modulus,
        }
    }
}

impl std::ops::Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: FieldElem) -> FieldElem {
        check_same_modulus(&self, &rhs);
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + self.modulus - rhs.value
        };
        FieldElem {
            value: v,
            modulus: self.modulus,
        }
    }
}

impl std::ops::Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        check_same_modulus(&self, &rhs);
        FieldElem {
            value: mul_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl std::ops::Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            value: if self.value == 0 {
                0
            } else {
                self.modulus - self.value
            },
            modulus: self.modulus,
        }
    }
}

/// Legendre symbol by Euler's criterion: `a^((p-1)/2)` mapped to {-1, 0, 1}.
pub fn legendre(a: FieldElem) -> i32 {
    if a.value == 0 {
        return 0;
    }
    let p = a.modulus;
    if p == 2 {
        return 1;
    }
    let e = pow_mod(a.value, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Precomputed quadratic-character table for one prime.
///
/// `chi(x)` is 0 at zero, +1 on nonzero squares, -1 otherwise. The table
/// costs O(p) to build and turns each evaluation into a lookup, which is
/// what the point-counting kernels iterate on.
#[derive(Debug, Clone)]
pub struct QuadTable {
    p: u64,
    table: Vec<i8>,
}

impl QuadTable {
    pub fn new(p: u64) -> Result<QuadTable> {
        if !is_prime(p) {
            return Err(Error::CompositeModulus(p));
        }
        let mut table = vec![-1i8; p as usize];
        table[0] = 0;
        let mut v = 1u64;
        while v <= p / 2 {
            table[mul_mod(v, v, p) as usize] = 1;
            v += 1;
        }
        Ok(QuadTable { p, table })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Character value at a residue already reduced below `p`.
    #[inline]
    pub fn chi_reduced(&self, x: u64) -> i64 {
        debug_assert!(x < self.p);
        self.table[x as usize] as i64
    }

    #[inline]
    pub fn chi(&self, x: u64) -> i64 {
        self.table[(x % self.p) as usize] as i64
    }
}

/// All primes in `[lo, hi]`, ascending. Requires `2 <= lo <= hi`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    assert!(2 <= lo && lo <= hi, "bad prime range [{lo}, {hi}]");
    let root = (hi as f64).sqrt() as u64 + 1;
    let base = small_primes(root);
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in &base {
        let start = lo.div_ceil(p).max(2) * p;
        let mut m = start;
        while m <= hi {
            composite[(m - lo) as usize] = true;
            m += p;
        }
    }
    (lo..=hi)
        .filter(|&n| n >= 2 && !composite[(n - lo) as usize])
        .collect()
}

/// All primes up to `n` inclusive.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    primes_in(2, n)
}

fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; (limit + 1) as usize];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2u64;
    while p * p <= limit {
        if sieve[p as usize] {
            let mut m = p * p;
            while m <= limit {
                sieve[m as usize] = false;
                m += p;
            }
        }
        p += 1;
    }
    (2..=limit).filter(|&n| sieve[n as usize]).collect()
}

/// Strictly increasing list of squarefree integers in `[1, q]`.
pub fn squarefree_up_to(q: u64) -> Vec<u64> {
    assert!(q >= 1);
    let mut ok = vec![true; (q + 1) as usize];
    let mut p = 2u64;
    while p * p <= q {
        let sq = p * p;
        let mut m = sq;
        while m <= q {
            ok[m as usize] = false;
            m += sq;
        }
        p += 1;
    }
    (1..=q).filter(|&n| ok[n as usize]).collect()
}

/// Prime factorization by trial division. Intended for desk-scale inputs.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_new_accepts_primes() {
        assert_eq!(Field::new(5).unwrap().order(), 5);
        assert_eq!(Field::new(1009).unwrap().order(), 1009);
        // Mersenne prime 2^61 - 1 goes through the Miller-Rabin branch.
        assert!(Field::new((1 << 61) - 1).is_ok());
    }

    #[test]
    fn field_new_rejects_composites() {
        assert_eq!(Field::new(6), Err(Error::CompositeModulus(6)));
        assert_eq!(Field::new(1), Err(Error::CompositeModulus(1)));
        assert_eq!(Field::new(0), Err(Error::CompositeModulus(0)));
        // 2^61 + 1 = 3 * 768614336404564651
        assert_eq!(
            Field::new((1 << 61) + 1),
            Err(Error::CompositeModulus((1 << 61) + 1))
        );
        assert_eq!(
            Field::new(MAX_MODULUS),
            Err(Error::ModulusTooLarge(MAX_MODULUS))
        );
    }

    #[test]
    fn legendre_examples() {
        let f5 = Field::new(5).unwrap();
        assert_eq!(legendre(f5.elem(0)), 0);
        assert_eq!(legendre(f5.elem(4)), 1);
        assert_eq!(legendre(f5.elem(3)), -1);
    }

    #[test]
    fn legendre_matches_square_enumeration() {
        for p in primes_up_to(101) {
            let f = Field::new(p).unwrap();
            let mut squares = std::collections::HashSet::new();
            for v in 1..p {
                squares.insert(mul_mod(v, v, p));
            }
            for v in 0..p {
                let expect = if v == 0 {
                    0
                } else if squares.contains(&v) {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre(f.elem_u(v)), expect, "p={p} v={v}");
            }
        }
    }

    #[test]
    fn legendre_multiplicative() {
        for p in [7u64, 11, 13, 101] {
            let f = Field::new(p).unwrap();
            for a in 1..p {
                for b in 1..p {
                    let ab = f.elem_u(a) * f.elem_u(b);
                    assert_eq!(legendre(ab), legendre(f.elem_u(a)) * legendre(f.elem_u(b)));
                }
            }
        }
    }

    #[test]
    fn inverses_exhaustive_small() {
        for p in primes_up_to(101) {
            let f = Field::new(p).unwrap();
            for v in 1..p {
                let e = f.elem_u(v);
                assert_eq!((e * e.inv().unwrap()).value(), 1);
            }
        }
    }

    #[test]
    fn inverses_random_large() {
        let p = (1 << 61) - 1;
        let f = Field::new(p).unwrap();
        let mut rng = crate::rng::SplitMix64::new(9);
        for _ in 0..100 {
            let v = rng.below(p - 1) + 1;
            let e = f.elem_u(v);
            assert_eq!((e * e.inv().unwrap()).value(), 1);
        }
    }

    #[test]
    fn zero_inverse_is_an_error() {
        let f = Field::new(7).unwrap();
        assert_eq!(f.elem(0).inv(), Err(Error::ZeroInverse(7)));
    }

    #[test]
    fn quad_table_matches_legendre() {
        for p in [2u64, 3, 5, 101, 1009] {
            let f = Field::new(p).unwrap();
            let t = QuadTable::new(p).unwrap();
            for v in 0..p.min(500) {
                assert_eq!(t.chi_reduced(v), legendre(f.elem_u(v)) as i64);
            }
        }
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_up_to(1), vec![1]);
        assert_eq!(squarefree_up_to(10), vec![1, 2, 3, 5, 6, 7, 10]);
        assert_eq!(squarefree_up_to(4), vec![1, 2, 3]);
    }

    #[test]
    fn squarefree_matches_direct_definition() {
        let list = squarefree_up_to(10_000);
        let direct: Vec<u64> = (1..=10_000u64)
            .filter(|&n| factor(n).iter().all(|&(_, e)| e == 1))
            .collect();
        assert_eq!(list, direct);
    }

    #[test]
    fn primes_in_examples() {
        assert_eq!(primes_in(2, 10), vec![2, 3, 5, 7]);
        assert_eq!(primes_in(11, 11), vec![11]);
        assert_eq!(primes_in(90, 100), vec![97]);
    }

    #[test]
    fn primes_in_matches_trial_division() {
        let got = primes_in(500, 1000);
        let expect: Vec<u64> = (500..=1000).filter(|&n| is_prime(n)).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn factor_roundtrip() {
        for n in 1..2000u64 {
            let f = factor(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            for &(p, _) in &f {
                assert!(is_prime(p));
            }
        }
    }
}
