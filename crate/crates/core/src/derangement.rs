//! Exhaustive coset and derangement computations in GL2(F_ell) for small
//! ell.
//!
//! Two independent routes to the same notion are kept side by side: an
//! element is a derangement for the action on H/M exactly when it lies
//! outside the union of conjugates of M. [`conjugate_union`] materializes
//! that union; [`action_table`] recomputes fixed points directly from the
//! coset action so the equivalence can be asserted rather than assumed.

use std::collections::HashMap;

use num::rational::Ratio;

use crate::error::{Error, HypothesisViolation, Result};
use crate::gl2::{self, Mat2, MatSet, SubgroupHandle};
use crate::rng::SplitMix64;

/// Union of the conjugates h M h^-1 over h in H.
pub fn conjugate_union(h: &SubgroupHandle, m: &SubgroupHandle) -> Result<MatSet> {
    if !m.is_subgroup_of(h) {
        return Err(Error::NotASubgroup);
    }
    let modulus = h.modulus();
    let mut keys: Vec<u64> = Vec::new();
    for g in h.iter() {
        let gi = g.inv();
        for x in m.iter() {
            keys.push(g.mul(&x).mul(&gi).pack());
        }
    }
    keys.sort_unstable();
    keys.dedup();
    Ok(MatSet::from_iter(
        modulus,
        keys.into_iter().map(move |k| Mat2::unpack(k, modulus)),
    ))
}

/// Which elements to average over: the whole group or one det coset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kappa {
    WholeGroup,
    Det(u64),
}

impl Kappa {
    fn admits(&self, m: &Mat2) -> bool {
        match self {
            Kappa::WholeGroup => true,
            Kappa::Det(d) => m.det() == *d % m.modulus(),
        }
    }
}

/// Proportion of elements of the chosen coset of H that are derangements
/// on H/M, i.e. lie outside the conjugate union.
pub fn derangement_proportion(
    h: &SubgroupHandle,
    m: &SubgroupHandle,
    kappa: Kappa,
) -> Result<Ratio<u64>> {
    let c = conjugate_union(h, m)?;
    let mut size = 0u64;
    let mut derangements = 0u64;
    for x in h.iter() {
        if !kappa.admits(&x) {
            continue;
        }
        size += 1;
        if !c.contains(&x) {
            derangements += 1;
        }
    }
    assert!(size > 0, "empty coset");
    Ok(Ratio::new(derangements, size))
}

/// The coset action of H on H/M with per-element fixed-point flags.
#[derive(Debug, Clone)]
pub struct ActionTable {
    group: SubgroupHandle,
    point_count: usize,
    fixed_point_flags: Vec<bool>,
}

impl ActionTable {
    pub fn group(&self) -> &SubgroupHandle {
        &self.group
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    /// Flag per element of `group`, in the group's iteration order.
    pub fn fixed_point_flags(&self) -> &[bool] {
        &self.fixed_point_flags
    }

    pub fn derangement_count(&self) -> usize {
        self.fixed_point_flags.iter().filter(|&&f| !f).count()
    }
}

/// Builds the coset action directly: x fixes hM iff h^-1 x h lies in M.
pub fn action_table(h: &SubgroupHandle, m: &SubgroupHandle) -> Result<ActionTable> {
    if !m.is_subgroup_of(h) {
        return Err(Error::NotASubgroup);
    }
    let reps = coset_reps(h, m);
    let point_count = reps.len();
    assert_eq!(point_count * m.order(), h.order());
    let flags: Vec<bool> = h
        .iter()
        .map(|x| {
            reps.iter()
                .any(|r| m.contains(&r.inv().mul(&x).mul(r)))
        })
        .collect();
    Ok(ActionTable {
        group: h.clone(),
        point_count,
        fixed_point_flags: flags,
    })
}

/// One representative per left coset of m in h.
fn coset_reps(h: &SubgroupHandle, m: &SubgroupHandle) -> Vec<Mat2> {
    let mut assigned: HashMap<u64, usize> = HashMap::new();
    let mut reps = Vec::new();
    for g in h.iter() {
        if assigned.contains_key(&g.pack()) {
            continue;
        }
        let id = reps.len();
        reps.push(g);
        for x in m.iter() {
            assigned.insert(g.mul(&x).pack(), id);
        }
    }
    reps
}

/// One row of a coset delta table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetDeltaRow {
    /// Determinant labelling the H_g-coset (cosets of SL2-type subgroups
    /// are cut out by the determinant).
    pub det: u64,
    pub representative: Mat2,
    pub intersection: u64,
    pub ratio: Ratio<u64>,
}

/// |C cap kappa| / |H_g| over the H_g-cosets kappa of H, where C is the
/// conjugate union of M in H.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetDeltaTable {
    pub rows: Vec<CosetDeltaRow>,
}

impl CosetDeltaTable {
    pub fn max_ratio(&self) -> Ratio<u64> {
        self.rows
            .iter()
            .map(|r| r.ratio)
            .max()
            .expect("tables have at least one coset")
    }
}

/// Checks the hypotheses (M inside H, M not containing the commutator
/// subgroup S of H, H_g normal, M -> H/H_g surjective) and tabulates
/// |C cap kappa| / |H_g| per H_g-coset.
pub fn coset_delta_table(
    h: &SubgroupHandle,
    hg: &SubgroupHandle,
    m: &SubgroupHandle,
) -> Result<CosetDeltaTable> {
    if !m.is_subgroup_of(h) {
        return Err(Error::HypothesisFailed(HypothesisViolation::MNotInAmbient));
    }
    if !hg.is_subgroup_of(h) {
        return Err(Error::HypothesisFailed(HypothesisViolation::NotNormal));
    }
    // normality of H_g in H
    for g in h.generators() {
        for x in hg.iter() {
            if !hg.contains(&x.conj_by(g)) {
                return Err(Error::HypothesisFailed(HypothesisViolation::NotNormal));
            }
        }
    }
    let s = gl2::commutator_subgroup(h)?;
    if s.is_subgroup_of(m) {
        return Err(Error::HypothesisFailed(HypothesisViolation::MContainsS));
    }

    // label the H_g-cosets of H
    let mut coset_of: HashMap<u64, usize> = HashMap::new();
    let mut reps: Vec<Mat2> = Vec::new();
    for g in h.iter() {
        if coset_of.contains_key(&g.pack()) {
            continue;
        }
        let id = reps.len();
        reps.push(g);
        for x in hg.iter() {
            coset_of.insert(g.mul(&x).pack(), id);
        }
    }

    // M -> H/H_g surjective: M must meet every coset
    let mut hit = vec![false; reps.len()];
    for x in m.iter() {
        hit[coset_of[&x.pack()]] = true;
    }
    if hit.iter().any(|&b| !b) {
        return Err(Error::HypothesisFailed(
            HypothesisViolation::QuotientNotSurjective,
        ));
    }

    let c = conjugate_union(h, m)?;
    let mut intersections = vec![0u64; reps.len()];
    for x in c.iter() {
        intersections[coset_of[&x.pack()]] += 1;
    }
    let rows = reps
        .iter()
        .zip(&intersections)
        .map(|(rep, &cnt)| CosetDeltaRow {
            det: rep.det(),
            representative: *rep,
            intersection: cnt,
            ratio: Ratio::new(cnt, hg.order() as u64),
        })
        .collect();
    Ok(CosetDeltaTable { rows })
}

/// Outcome counts from a product-closure probe in SL2 x SL2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoursatReport {
    pub ell: u64,
    pub trials: u32,
    /// Closures equal to the full product.
    pub full_product: u32,
    /// Closures of order |SL2| with injective first projection.
    pub graph_of_isomorphism: u32,
    /// At least one projection was not surjective.
    pub projection_not_surjective: u32,
    /// Closures with both projections surjective whose order is neither
    /// |SL2| nor |SL2|^2. Orders observed are recorded for inspection.
    pub other_orders: Vec<usize>,
}

impl GoursatReport {
    pub fn dichotomy_holds(&self) -> bool {
        self.other_orders.is_empty()
    }
}

/// Random generator-pair probe in SL2(F_ell) x SL2(F_ell).
///
/// Each trial draws two pairs, closes them under multiplication, and when
/// both projections are surjective classifies the closure as the full
/// product, a graph of an isomorphism, or something else (tracked in
/// `other_orders` rather than asserted away).
pub fn goursat_probe(ell: u64, trials: u32, seed: u64) -> Result<GoursatReport> {
    assert!(matches!(ell, 5 | 7), "probe is tuned for ell in {{5, 7}}");
    let sl2 = gl2::sl2_group(ell);
    let sl2_order = sl2.order();
    let mut rng = SplitMix64::new(seed);
    let mut report = GoursatReport {
        ell,
        trials,
        full_product: 0,
        graph_of_isomorphism: 0,
        projection_not_surjective: 0,
        other_orders: Vec::new(),
    };

    for _ in 0..trials {
        let g1 = (random_sl2(&mut rng, ell), random_sl2(&mut rng, ell));
        let g2 = (random_sl2(&mut rng, ell), random_sl2(&mut rng, ell));
        let closure = product_closure(&[g1, g2], sl2_order * sl2_order)?;

        let mut left: Vec<u64> = closure.iter().map(|(a, _)| a.pack()).collect();
        left.sort_unstable();
        left.dedup();
        let mut right: Vec<u64> = closure.iter().map(|(_, b)| b.pack()).collect();
        right.sort_unstable();
        right.dedup();

        if left.len() != sl2_order || right.len() != sl2_order {
            report.projection_not_surjective += 1;
            continue;
        }
        if closure.len() == sl2_order * sl2_order {
            report.full_product += 1;
        } else if closure.len() == sl2_order {
            // order |SL2| with surjective first projection forces injectivity
            report.graph_of_isomorphism += 1;
        } else {
            report.other_orders.push(closure.len());
        }
    }
    Ok(report)
}

fn random_sl2(rng: &mut SplitMix64, ell: u64) -> Mat2 {
    loop {
        let v = rng.next_u64();
        let e = [
            ((v & 0xFFFF) % ell) as i64,
            ((v >> 16 & 0xFFFF) % ell) as i64,
            ((v >> 32 & 0xFFFF) % ell) as i64,
            ((v >> 48) % ell) as i64,
        ];
        if let Ok(m) = Mat2::new(e, ell) {
            if m.det() == 1 {
                return m;
            }
        }
    }
}

fn product_closure(gens: &[(Mat2, Mat2)], cap: usize) -> Result<Vec<(Mat2, Mat2)>> {
    let m = gens[0].0.modulus();
    let id = (Mat2::identity(m), Mat2::identity(m));
    let mut seen: std::collections::HashSet<(u64, u64)> = std::collections::HashSet::new();
    seen.insert((id.0.pack(), id.1.pack()));
    let mut elements = vec![id];
    let mut frontier = vec![id];
    while let Some((xa, xb)) = frontier.pop() {
        for (ga, gb) in gens {
            let y = (xa.mul(ga), xb.mul(gb));
            if seen.insert((y.0.pack(), y.1.pack())) {
                if seen.len() > cap {
                    return Err(Error::CapExceeded { cap });
                }
                elements.push(y);
                frontier.push(y);
            }
        }
    }
    Ok(elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl2::{
        borel_subgroup, closure, gl2_group, nonsplit_cartan_normalizer, sl2_group,
        split_cartan_normalizer,
    };

    fn borel_in_sl2(ell: u64) -> SubgroupHandle {
        borel_subgroup(ell).intersect(&sl2_group(ell))
    }

    #[test]
    fn conjugate_union_extremes() {
        let h = sl2_group(5);
        let c = conjugate_union(&h, &h).unwrap();
        assert_eq!(c.len(), h.order());

        let trivial = closure(&[Mat2::identity(5)]).unwrap();
        let c = conjugate_union(&h, &trivial).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.contains(&Mat2::identity(5)));
    }

    #[test]
    fn conjugate_union_requires_subgroup() {
        let h = sl2_group(5);
        let outside = closure(&[Mat2::new([2, 0, 0, 1], 5).unwrap()]).unwrap();
        assert_eq!(conjugate_union(&h, &outside), Err(Error::NotASubgroup));
    }

    /// Eigenvector criterion: reducible characteristic polynomial.
    fn has_eigenvector(m: &Mat2) -> bool {
        let ell = m.modulus();
        let (t, d) = gl2::conj_invariants(m);
        let disc = (t * t % ell + ell - 4 * d % ell) % ell;
        let table = crate::modarith::QuadTable::new(ell).unwrap();
        table.chi_reduced(disc) >= 0
    }

    #[test]
    fn borel_union_is_eigenvector_locus() {
        for ell in [5u64, 7, 11] {
            let h = sl2_group(ell);
            let m = borel_in_sl2(ell);
            let c = conjugate_union(&h, &m).unwrap();
            for x in h.iter() {
                assert_eq!(c.contains(&x), has_eigenvector(&x), "ell={ell}");
            }
        }
    }

    #[test]
    fn sl2_borel_delta_is_one_third() {
        let h = sl2_group(5);
        let m = borel_in_sl2(5);
        assert_eq!(m.order(), 20);
        let delta = derangement_proportion(&h, &m, Kappa::WholeGroup).unwrap();
        assert_eq!(delta, Ratio::new(40, 120));
    }

    #[test]
    fn gl2_borel_per_coset_deltas() {
        let h = gl2_group(5);
        let m = borel_subgroup(5);
        let expect = [
            (1u64, Ratio::new(40u64, 120)),
            (2, Ratio::new(60, 120)),
            (3, Ratio::new(60, 120)),
            (4, Ratio::new(40, 120)),
        ];
        for (d, want) in expect {
            let delta = derangement_proportion(&h, &m, Kappa::Det(d)).unwrap();
            assert_eq!(delta, want, "det = {d}");
            assert!(delta > Ratio::new(0, 1));
        }
    }

    #[test]
    fn identity_is_never_a_derangement() {
        let h = sl2_group(5);
        let m = borel_in_sl2(5);
        let c = conjugate_union(&h, &m).unwrap();
        assert!(c.contains(&Mat2::identity(5)));
    }

    #[test]
    fn fixed_point_equivalence_exhaustive() {
        for ell in [5u64, 7] {
            for ambient in ["sl2", "gl2"] {
                let h = if ambient == "sl2" {
                    sl2_group(ell)
                } else {
                    gl2_group(ell)
                };
                let stabs: Vec<(&str, SubgroupHandle)> = vec![
                    ("borel", borel_subgroup(ell).intersect(&h)),
                    ("split_cn", split_cartan_normalizer(ell).intersect(&h)),
                    ("nonsplit_cn", nonsplit_cartan_normalizer(ell).intersect(&h)),
                ];
                for (name, m) in stabs {
                    let c = conjugate_union(&h, &m).unwrap();
                    let table = action_table(&h, &m).unwrap();
                    for (x, &has_fp) in h.iter().zip(table.fixed_point_flags()) {
                        assert_eq!(
                            has_fp,
                            c.contains(&x),
                            "ell={ell} H={ambient} M={name}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn delta_consistent_between_routes() {
        let ell = 5u64;
        let h = gl2_group(ell);
        let m = split_cartan_normalizer(ell);
        let c = conjugate_union(&h, &m).unwrap();
        let table = action_table(&h, &m).unwrap();
        for d in 1..ell {
            let mut size = 0u64;
            let mut fp_derangements = 0u64;
            for (x, &has_fp) in h.iter().zip(table.fixed_point_flags()) {
                if x.det() != d {
                    continue;
                }
                size += 1;
                if !has_fp {
                    fp_derangements += 1;
                }
            }
            let via_union = derangement_proportion(&h, &m, Kappa::Det(d)).unwrap();
            assert_eq!(via_union, Ratio::new(fp_derangements, size));
            // delta = 1 - |C cap kappa| / |kappa|
            let in_c = h.iter().filter(|x| x.det() == d && c.contains(x)).count() as u64;
            assert_eq!(via_union, Ratio::new(size - in_c, size));
        }
    }

    #[test]
    fn coset_table_hypothesis_failures() {
        let h = gl2_group(5);
        let sl2 = sl2_group(5);
        // M containing S is rejected
        assert_eq!(
            coset_delta_table(&h, &sl2, &h),
            Err(Error::HypothesisFailed(HypothesisViolation::MContainsS))
        );
        // Borel does not surject onto GL2/SL2? It does; use a subgroup of SL2.
        let m = borel_in_sl2(5);
        assert_eq!(
            coset_delta_table(&h, &sl2, &m),
            Err(Error::HypothesisFailed(
                HypothesisViolation::QuotientNotSurjective
            ))
        );
    }

    #[test]
    fn coset_table_split_cn_mod7() {
        let h = gl2_group(7);
        let sl2 = sl2_group(7);
        let m = split_cartan_normalizer(7);
        let table = coset_delta_table(&h, &sl2, &m).unwrap();
        assert_eq!(table.rows.len(), 6);
        assert!(table.max_ratio() < Ratio::new(1, 1));
    }

    #[test]
    fn coset_table_trivial_m() {
        let s = sl2_group(5);
        let trivial = closure(&[Mat2::identity(5)]).unwrap();
        let table = coset_delta_table(&s, &s, &trivial).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].ratio, Ratio::new(1, 120));
    }

    #[test]
    fn centralizer_orders() {
        // Every centralizer holds a maximal torus worth of elements; a
        // non-semisimple element with equal eigenvalues commutes with the
        // full unipotent centralizer as well.
        let ell = 5u64;
        let h = gl2_group(ell);
        let elements: Vec<Mat2> = h.iter().collect();
        let mut rng = SplitMix64::new(2718);
        for _ in 0..20 {
            let beta = elements[rng.below(elements.len() as u64) as usize];
            let centralizer = elements
                .iter()
                .filter(|x| x.mul(&beta) == beta.mul(x))
                .count() as u64;
            assert!(centralizer >= ell - 1, "centralizer {centralizer}");
            let (t, d) = gl2::conj_invariants(&beta);
            let disc = (t * t % ell + ell - 4 * d % ell) % ell;
            let scalar = beta.entries()[1] == 0
                && beta.entries()[2] == 0
                && beta.entries()[0] == beta.entries()[3];
            if disc == 0 && !scalar {
                assert!(centralizer >= ell * (ell - 1), "non-semisimple {centralizer}");
            }
        }
    }

    #[test]
    fn goursat_diagonal_pairs_give_graph() {
        let ell = 5u64;
        let g = Mat2::new([1, 1, 0, 1], ell).unwrap();
        let h = Mat2::new([1, 0, 1, 1], ell).unwrap();
        let closure = product_closure(&[(g, g), (h, h)], 20_000).unwrap();
        assert_eq!(closure.len(), 120);
        // graph of the identity isomorphism
        for (a, b) in &closure {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn goursat_probe_is_deterministic() {
        let a = goursat_probe(5, 40, 12345).unwrap();
        let b = goursat_probe(5, 40, 12345).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, 40);
        assert_eq!(
            a.full_product
                + a.graph_of_isomorphism
                + a.projection_not_surjective
                + a.other_orders.len() as u32,
            40
        );
    }

    #[test]
    fn goursat_probe_sees_full_products() {
        let r = goursat_probe(5, 60, 7).unwrap();
        assert!(r.full_product > 0);
        // any extra outcome is a central graph of order 2 |SL2|
        for &n in &r.other_orders {
            assert_eq!(n, 240);
        }
    }
}
