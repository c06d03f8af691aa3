//! Invertible 2x2 matrices over Z/m and the subgroup machinery built on
//! them: breadth-first closure, commutator subgroups, conjugacy
//! invariants, characteristic-polynomial fibers and determinant cosets.
//!
//! Entries are residues below 2^16 and a matrix packs into one 64-bit
//! word, so element sets are flat sorted `Vec<u64>` and membership is a
//! binary search. Most callers work over a prime ell; the arithmetic
//! itself only needs the determinant to be a unit, which is what lets the
//! same closure code run over composite Z/n.

use std::collections::HashMap;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::modarith::{factor, inv_mod, is_prime};

/// Default ceiling for closure sizes.
pub const DEFAULT_CLOSURE_CAP: usize = 20_000_000;

/// An invertible 2x2 matrix over Z/m, row-major entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    e: [u16; 4],
    m: u16,
}

impl Mat2 {
    /// Builds a matrix, reducing entries mod `m` and rejecting it when the
    /// determinant is not a unit.
    pub fn new(entries: [i64; 4], m: u64) -> Result<Mat2> {
        assert!((2..=u16::MAX as u64).contains(&m), "modulus {m} out of range");
        let mut e = [0u16; 4];
        for (slot, &v) in e.iter_mut().zip(entries.iter()) {
            *slot = v.rem_euclid(m as i64) as u16;
        }
        let mat = Mat2 { e, m: m as u16 };
        let det = mat.det();
        if num_integer_gcd(det, m) != 1 {
            return Err(Error::SingularMatrix(m));
        }
        Ok(mat)
    }

    pub fn identity(m: u64) -> Mat2 {
        Mat2::new([1, 0, 0, 1], m).expect("identity is invertible")
    }

    pub fn modulus(&self) -> u64 {
        self.m as u64
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.e[0] as u64, self.e[1] as u64, self.e[2] as u64, self.e[3] as u64]
    }

    pub fn trace(&self) -> u64 {
        (self.e[0] as u64 + self.e[3] as u64) % self.m as u64
    }

    pub fn det(&self) -> u64 {
        let m = self.m as u64;
        let ad = self.e[0] as u64 * self.e[3] as u64 % m;
        let bc = self.e[1] as u64 * self.e[2] as u64 % m;
        (ad + m - bc) % m
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        assert_eq!(self.m, rhs.m, "mixed moduli");
        let m = self.m as u64;
        let a = &self.e;
        let b = &rhs.e;
        let p = |i: usize, j: usize| a[i] as u64 * b[j] as u64;
        Mat2 {
            e: [
                ((p(0, 0) + p(1, 2)) % m) as u16,
                ((p(0, 1) + p(1, 3)) % m) as u16,
                ((p(2, 0) + p(3, 2)) % m) as u16,
                ((p(2, 1) + p(3, 3)) % m) as u16,
            ],
            m: self.m,
        }
    }

    /// Inverse via the adjugate; the determinant is a unit by construction.
    pub fn inv(&self) -> Mat2 {
        let m = self.m as u64;
        let di = inv_mod(self.det(), m).expect("stored matrices are invertible");
        let neg = |v: u16| (m - v as u64) % m;
        let mul = |x: u64, y: u64| (x * y % m) as u16;
        Mat2 {
            e: [
                mul(self.e[3] as u64, di),
                mul(neg(self.e[1]), di),
                mul(neg(self.e[2]), di),
                mul(self.e[0] as u64, di),
            ],
            m: self.m,
        }
    }

    /// g * self * g^-1.
    pub fn conj_by(&self, g: &Mat2) -> Mat2 {
        g.mul(self).mul(&g.inv())
    }

    /// [self, rhs] = self rhs self^-1 rhs^-1.
    pub fn commutator(&self, rhs: &Mat2) -> Mat2 {
        self.mul(rhs).mul(&self.inv()).mul(&rhs.inv())
    }

    /// Packs the four entries into one word; the modulus is implicit.
    #[inline]
    pub fn pack(&self) -> u64 {
        (self.e[0] as u64)
            | (self.e[1] as u64) << 16
            | (self.e[2] as u64) << 32
            | (self.e[3] as u64) << 48
    }

    #[inline]
    pub fn unpack(key: u64, m: u64) -> Mat2 {
        Mat2 {
            e: [
                (key & 0xFFFF) as u16,
                (key >> 16 & 0xFFFF) as u16,
                (key >> 32 & 0xFFFF) as u16,
                (key >> 48) as u16,
            ],
            m: m as u16,
        }
    }
}

fn num_integer_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Trace and determinant, the conjugation invariants that fix the
/// characteristic polynomial x^2 - t x + d.
pub fn conj_invariants(m: &Mat2) -> (u64, u64) {
    (m.trace(), m.det())
}

/// |GL2(F_ell)| = (ell^2 - 1)(ell^2 - ell).
pub fn group_order_gl2(ell: u64) -> u64 {
    assert!(is_prime(ell), "{ell} is not prime");
    (ell * ell - 1) * (ell * ell - ell)
}

/// |SL2(F_ell)| = ell^3 - ell.
pub fn group_order_sl2(ell: u64) -> u64 {
    assert!(is_prime(ell), "{ell} is not prime");
    ell * ell * ell - ell
}

/// |GL2(Z/n)| = n^4 prod_{p | n} (1 - 1/p)(1 - 1/p^2).
pub fn group_order_gl2_zn(n: u64) -> u64 {
    assert!(n >= 2);
    let mut order: u128 = (n as u128).pow(4);
    for (p, _) in factor(n) {
        let p = p as u128;
        order = order / p * (p - 1);
        order = order / (p * p) * (p * p - 1);
    }
    order as u64
}

/// |SL2(Z/n)| = |GL2(Z/n)| / phi(n).
pub fn group_order_sl2_zn(n: u64) -> u64 {
    let mut phi = n;
    for (p, _) in factor(n) {
        phi = phi / p * (p - 1);
    }
    group_order_gl2_zn(n) / phi
}

/// A materialized subgroup: its generators plus the full, deduplicated,
/// sorted element set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupHandle {
    m: u16,
    generators: Vec<Mat2>,
    elements: Vec<u64>,
}

impl SubgroupHandle {
    pub fn modulus(&self) -> u64 {
        self.m as u64
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn contains(&self, mat: &Mat2) -> bool {
        debug_assert_eq!(mat.modulus(), self.modulus());
        self.elements.binary_search(&mat.pack()).is_ok()
    }

    pub fn contains_key(&self, key: u64) -> bool {
        self.elements.binary_search(&key).is_ok()
    }

    /// Elements in packed ascending order.
    pub fn iter(&self) -> impl Iterator<Item = Mat2> + '_ {
        let m = self.modulus();
        self.elements.iter().map(move |&k| Mat2::unpack(k, m))
    }

    pub fn keys(&self) -> &[u64] {
        &self.elements
    }

    pub fn is_subgroup_of(&self, other: &SubgroupHandle) -> bool {
        self.m == other.m && self.elements.iter().all(|k| other.contains_key(*k))
    }

    pub fn set_eq(&self, other: &SubgroupHandle) -> bool {
        self.m == other.m && self.elements == other.elements
    }

    /// Intersection, rebuilt as a handle generated by its own elements.
    pub fn intersect(&self, other: &SubgroupHandle) -> SubgroupHandle {
        assert_eq!(self.m, other.m);
        let elements: Vec<u64> = self
            .elements
            .iter()
            .copied()
            .filter(|k| other.contains_key(*k))
            .collect();
        let m = self.modulus();
        SubgroupHandle {
            m: self.m,
            generators: elements.iter().map(|&k| Mat2::unpack(k, m)).collect(),
            elements,
        }
    }
}

/// Breadth-first closure of `generators` under multiplication, with the
/// default size cap.
pub fn closure(generators: &[Mat2]) -> Result<SubgroupHandle> {
    closure_with_cap(generators, DEFAULT_CLOSURE_CAP)
}

/// Closure with an explicit cap on the number of materialized elements.
pub fn closure_with_cap(generators: &[Mat2], cap: usize) -> Result<SubgroupHandle> {
    assert!(!generators.is_empty(), "need at least one generator");
    let m = generators[0].modulus();
    for g in generators {
        assert_eq!(g.modulus(), m, "mixed moduli among generators");
    }
    let identity = Mat2::identity(m);
    let mut seen: HashSet<u64> = HashSet::new();
    seen.insert(identity.pack());
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for g in generators {
            let y = x.mul(g);
            if seen.insert(y.pack()) {
                if seen.len() > cap {
                    return Err(Error::CapExceeded { cap });
                }
                frontier.push(y);
            }
        }
    }
    let mut elements: Vec<u64> = seen.into_iter().collect();
    elements.sort_unstable();
    Ok(SubgroupHandle {
        m: m as u16,
        generators: generators.to_vec(),
        elements,
    })
}

/// Commutator subgroup: the normal closure in `g` of the commutators of
/// its generators. Element count is checked to divide |g|.
pub fn commutator_subgroup(g: &SubgroupHandle) -> Result<SubgroupHandle> {
    let m = g.modulus();
    let identity = Mat2::identity(m);
    let mut seen: HashSet<u64> = HashSet::new();
    seen.insert(identity.pack());
    let mut elements = vec![identity];

    let mut new_gens: Vec<Mat2> = Vec::new();
    for a in g.generators() {
        for b in g.generators() {
            let c = a.commutator(b);
            if !seen.contains(&c.pack()) {
                new_gens.push(c);
            }
        }
    }

    // Alternate closing under multiplication and conjugating by the
    // ambient generators until nothing new appears.
    let mut gens: Vec<Mat2> = Vec::new();
    loop {
        if new_gens.is_empty() {
            break;
        }
        for c in new_gens.drain(..) {
            if seen.insert(c.pack()) {
                elements.push(c);
            }
            gens.push(c);
        }
        // subgroup closure under all collected generators
        let mut frontier = elements.clone();
        while let Some(x) = frontier.pop() {
            for gg in &gens {
                let y = x.mul(gg);
                if seen.insert(y.pack()) {
                    if seen.len() > DEFAULT_CLOSURE_CAP {
                        return Err(Error::CapExceeded {
                            cap: DEFAULT_CLOSURE_CAP,
                        });
                    }
                    elements.push(y);
                    frontier.push(y);
                }
            }
        }
        // normality: conjugates of current elements by ambient generators
        for h in g.generators() {
            for x in &elements {
                let y = x.conj_by(h);
                if !seen.contains(&y.pack()) {
                    new_gens.push(y);
                }
            }
        }
    }

    let mut keys: Vec<u64> = elements.iter().map(Mat2::pack).collect();
    keys.sort_unstable();
    keys.dedup();
    assert_eq!(
        g.order() % keys.len(),
        0,
        "commutator subgroup order must divide the group order"
    );
    let generators = elements;
    Ok(SubgroupHandle {
        m: m as u16,
        generators,
        elements: keys,
    })
}

/// A plain set of matrices over one modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatSet {
    m: u16,
    keys: Vec<u64>,
}

impl MatSet {
    pub fn from_iter<I: IntoIterator<Item = Mat2>>(m: u64, mats: I) -> MatSet {
        let mut keys: Vec<u64> = mats
            .into_iter()
            .map(|mat| {
                assert_eq!(mat.modulus(), m);
                mat.pack()
            })
            .collect();
        keys.sort_unstable();
        keys.dedup();
        MatSet { m: m as u16, keys }
    }

    pub fn modulus(&self) -> u64 {
        self.m as u64
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn contains(&self, mat: &Mat2) -> bool {
        self.keys.binary_search(&mat.pack()).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Mat2> + '_ {
        let m = self.modulus();
        self.keys.iter().map(move |&k| Mat2::unpack(k, m))
    }
}

/// All invertible matrices over F_ell with the given trace and nonzero
/// determinant. The result is stable under conjugation.
pub fn charpoly_fiber(ell: u64, t: u64, d: u64) -> MatSet {
    assert!(is_prime(ell));
    assert!(!d.is_multiple_of(ell), "determinant must be nonzero");
    let t = t % ell;
    let d = d % ell;
    let mut out = Vec::new();
    for a in 0..ell {
        let dd = (t + ell - a) % ell;
        let ad = a * dd % ell;
        let target_bc = (ad + ell - d) % ell; // bc = ad - det
        for b in 0..ell {
            if b == 0 {
                if target_bc == 0 {
                    for c in 0..ell {
                        out.push(Mat2::new([a as i64, 0, c as i64, dd as i64], ell).unwrap());
                    }
                }
            } else {
                let c = target_bc * inv_mod(b, ell).unwrap() % ell;
                out.push(Mat2::new([a as i64, b as i64, c as i64, dd as i64], ell).unwrap());
            }
        }
    }
    MatSet::from_iter(ell, out)
}

/// The coset { m : det m = d } of SL2(F_ell), held as a predicate plus its
/// cardinality rather than a materialized set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetCoset {
    ell: u64,
    d: u64,
}

impl DetCoset {
    pub fn new(ell: u64, d: u64) -> DetCoset {
        assert!(is_prime(ell));
        assert!(!d.is_multiple_of(ell), "determinant must be nonzero");
        DetCoset { ell, d: d % ell }
    }

    pub fn det(&self) -> u64 {
        self.d
    }

    pub fn is_special_linear(&self) -> bool {
        self.d == 1
    }

    pub fn contains(&self, m: &Mat2) -> bool {
        m.modulus() == self.ell && m.det() == self.d
    }

    pub fn cardinality(&self) -> u64 {
        group_order_sl2(self.ell)
    }
}

/// Smallest generator of F_ell^x.
pub fn primitive_root(ell: u64) -> u64 {
    assert!(is_prime(ell) && ell >= 3);
    let phi = ell - 1;
    let prime_divisors: Vec<u64> = factor(phi).into_iter().map(|(p, _)| p).collect();
    'outer: for g in 2..ell {
        for &q in &prime_divisors {
            if modarith_pow(g, phi / q, ell) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("every prime field has a primitive root");
}

/// Smallest quadratic nonresidue mod ell, ell odd.
pub fn smallest_nonresidue(ell: u64) -> u64 {
    assert!(is_prime(ell) && ell >= 3);
    (2..ell)
        .find(|&v| modarith_pow(v, (ell - 1) / 2, ell) == ell - 1)
        .expect("odd prime fields have nonresidues")
}

fn modarith_pow(b: u64, e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    let mut b = b % m;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// GL2(F_ell), generated by the two elementary matrices and a diagonal
/// matrix whose top entry generates F_ell^x.
pub fn gl2_group(ell: u64) -> SubgroupHandle {
    assert!(is_prime(ell));
    let mut gens = vec![
        Mat2::new([1, 1, 0, 1], ell).unwrap(),
        Mat2::new([1, 0, 1, 1], ell).unwrap(),
    ];
    if ell >= 3 {
        let g = primitive_root(ell) as i64;
        gens.push(Mat2::new([g, 0, 0, 1], ell).unwrap());
    }
    let h = closure(&gens).expect("GL2 over a small prime fits the cap");
    debug_assert_eq!(h.order() as u64, group_order_gl2(ell));
    h
}

/// SL2(F_ell) from the standard unipotent pair.
pub fn sl2_group(ell: u64) -> SubgroupHandle {
    assert!(is_prime(ell));
    let gens = vec![
        Mat2::new([1, 1, 0, 1], ell).unwrap(),
        Mat2::new([1, 0, 1, 1], ell).unwrap(),
    ];
    let h = closure(&gens).expect("SL2 over a small prime fits the cap");
    debug_assert_eq!(h.order() as u64, group_order_sl2(ell));
    h
}

/// Upper-triangular invertible matrices, order ell (ell - 1)^2.
pub fn borel_subgroup(ell: u64) -> SubgroupHandle {
    assert!(is_prime(ell) && ell >= 3);
    let g = primitive_root(ell) as i64;
    let gens = vec![
        Mat2::new([1, 1, 0, 1], ell).unwrap(),
        Mat2::new([g, 0, 0, 1], ell).unwrap(),
        Mat2::new([1, 0, 0, g], ell).unwrap(),
    ];
    closure(&gens).expect("Borel fits the cap")
}

/// Normalizer of the diagonal torus: monomial matrices, order 2 (ell - 1)^2.
pub fn split_cartan_normalizer(ell: u64) -> SubgroupHandle {
    assert!(is_prime(ell) && ell >= 3);
    let g = primitive_root(ell) as i64;
    let gens = vec![
        Mat2::new([g, 0, 0, 1], ell).unwrap(),
        Mat2::new([1, 0, 0, g], ell).unwrap(),
        Mat2::new([0, 1, 1, 0], ell).unwrap(),
    ];
    closure(&gens).expect("split Cartan normalizer fits the cap")
}

/// Normalizer of a nonsplit torus, order 2 (ell^2 - 1). The torus embeds
/// F_{ell^2}^x as matrices [[a, eps b], [b, a]] for a fixed nonresidue eps.
pub fn nonsplit_cartan_normalizer(ell: u64) -> SubgroupHandle {
    assert!(is_prime(ell) && ell >= 3);
    let eps = smallest_nonresidue(ell) as i64;
    // A single torus generator of full order plus the conjugation flip.
    let torus_gen = (0..ell as i64)
        .flat_map(|a| (0..ell as i64).map(move |b| (a, b)))
        .filter_map(|(a, b)| Mat2::new([a, eps * b, b, a], ell).ok())
        .find(|m| element_order(m) == ell * ell - 1)
        .expect("the nonsplit torus is cyclic of order ell^2 - 1");
    let flip = Mat2::new([1, 0, 0, -1], ell).unwrap();
    closure(&[torus_gen, flip]).expect("nonsplit Cartan normalizer fits the cap")
}

/// Multiplicative order of a matrix.
pub fn element_order(m: &Mat2) -> u64 {
    let id = Mat2::identity(m.modulus());
    let mut acc = *m;
    let mut n = 1u64;
    while acc != id {
        acc = acc.mul(m);
        n += 1;
        assert!(n <= (u16::MAX as u64).pow(2), "order runaway");
    }
    n
}

/// The quaternion lift of the tetrahedral group inside SL2(F_ell): the
/// subgroup of order 24 normalizing the quaternion group of order 8.
/// Defined for odd ell >= 5.
pub fn tetrahedral_preimage(ell: u64) -> SubgroupHandle {
    assert!(is_prime(ell) && ell >= 5);
    let i_mat = Mat2::new([0, 1, -1, 0], ell).unwrap();
    let j_mat = if modarith_pow(ell - 1, (ell - 1) / 2, ell) == 1 {
        // -1 is a square: j = diag(x, -x) with x^2 = -1
        let x = (1..ell)
            .find(|&v| v * v % ell == ell - 1)
            .expect("-1 is a square here") as i64;
        Mat2::new([x, 0, 0, -x], ell).unwrap()
    } else {
        // a^2 + b^2 = -1 always has a solution
        let (a, b) = (0..ell)
            .flat_map(|a| (0..ell).map(move |b| (a, b)))
            .find(|&(a, b)| (a * a + b * b) % ell == ell - 1)
            .expect("sum of two squares hits -1");
        Mat2::new([a as i64, b as i64, b as i64, -(a as i64)], ell).unwrap()
    };
    let k_mat = i_mat.mul(&j_mat);
    // omega = (-1 + i + j + k) / 2 cycles i -> j -> k and has order 3.
    let inv2 = inv_mod(2, ell).unwrap() as i64;
    let ie = i_mat.entries();
    let je = j_mat.entries();
    let ke = k_mat.entries();
    let neg_id = [ell as i64 - 1, 0, 0, ell as i64 - 1];
    let mut we = [0i64; 4];
    for idx in 0..4 {
        we[idx] = (neg_id[idx] + ie[idx] as i64 + je[idx] as i64 + ke[idx] as i64) * inv2;
    }
    let w = Mat2::new(we, ell).unwrap();
    let h = closure(&[i_mat, j_mat, w]).expect("order 24 fits the cap");
    debug_assert_eq!(h.order(), 24);
    h
}

/// GL2(Z/n) for composite n, generated by the elementary matrices and the
/// diagonal matrices diag(u, 1) over all units u.
pub fn gl2_zn_group(n: u64) -> Result<SubgroupHandle> {
    assert!(n >= 2);
    let mut gens = vec![
        Mat2::new([1, 1, 0, 1], n).unwrap(),
        Mat2::new([1, 0, 1, 1], n).unwrap(),
    ];
    for u in 2..n {
        if num_integer_gcd(u, n) == 1 {
            gens.push(Mat2::new([u as i64, 0, 0, 1], n).unwrap());
        }
    }
    closure(&gens)
}

/// SL2(Z/n): kernel of the determinant on GL2(Z/n).
pub fn sl2_zn_group(n: u64) -> Result<SubgroupHandle> {
    let gens = vec![
        Mat2::new([1, 1, 0, 1], n).unwrap(),
        Mat2::new([1, 0, 1, 1], n).unwrap(),
    ];
    closure(&gens)
}

/// Exhaustive commutator set closure; quadratic in the group order and
/// only sensible for small groups. Reference route for
/// [`commutator_subgroup`].
pub fn commutator_subgroup_allpairs(g: &SubgroupHandle) -> Result<SubgroupHandle> {
    let mut comms: HashMap<u64, Mat2> = HashMap::new();
    for a in g.iter() {
        for b in g.iter() {
            let c = a.commutator(&b);
            comms.insert(c.pack(), c);
        }
    }
    let gens: Vec<Mat2> = comms.into_values().collect();
    closure(&gens)
}
