//! The six experiment runners. Each builds a [`Table`] plus a config
//! block; sharding and thread counts never influence the emitted bytes.

use std::ops::Range;

use galois_sieve_core::curves::{ap_with_table, phi_rank_is_free_rank2, Curve, FrobData, Reduction};
use galois_sieve_core::derangement;
use galois_sieve_core::equidist;
use galois_sieve_core::galimage::{self, ApTables};
use galois_sieve_core::gl2;
use galois_sieve_core::heights;
use galois_sieve_core::modarith::is_prime;
use galois_sieve_core::par;
use galois_sieve_core::sieve;
use num::ToPrimitive;

use crate::table::{Cell, Table};
use crate::{CliError, Config};

fn curve_list(height: u64) -> Vec<Curve> {
    heights::enumerate_weierstrass(height).collect()
}

fn shard_slices<T>(items: &[T], shards: usize) -> Vec<Range<u64>> {
    par::shard_ranges(items.len() as u64, shards)
}

/// Per-curve verdict scan over a height box, one row per curve.
pub fn run_duke(cfg: &Config) -> Result<Table, CliError> {
    let height = cfg.single_height()?;
    let curves = curve_list(height);
    let tables = ApTables::new(cfg.budget);
    let ells = &cfg.ells;

    let ranges = shard_slices(&curves, cfg.shards);
    let chunk_rows = par::map_chunks(ranges, |r| {
        let mut rows = Vec::new();
        for idx in r {
            let e = &curves[idx as usize];
            let verdicts = galimage::surjective_all_ell_with(&tables, e, ells);
            let mut row = vec![Cell::I(e.a()), Cell::I(e.b())];
            for ell in ells {
                row.push(Cell::S(verdicts[ell].label()));
            }
            rows.push((row, verdicts));
        }
        rows
    });

    let mut columns = vec!["a".to_string(), "b".to_string()];
    columns.extend(ells.iter().map(|l| format!("verdict_{l}")));
    let mut table = Table::new(columns);

    let mut per_ell_bad = vec![0u64; ells.len()];
    let mut union_bad = 0u64;
    for (row, verdicts) in chunk_rows.into_iter().flatten() {
        let mut any = false;
        for (i, ell) in ells.iter().enumerate() {
            if !verdicts[ell].is_surjective() {
                per_ell_bad[i] += 1;
                any = true;
            }
        }
        if any {
            union_bad += 1;
        }
        table.push(row);
    }

    let total = curves.len() as u64;
    for (i, ell) in ells.iter().enumerate() {
        eprintln!(
            "duke: x={height} ell={ell}: |B_ell(x)| = {} / {} = {:.4}",
            per_ell_bad[i],
            total,
            per_ell_bad[i] as f64 / total as f64
        );
    }
    eprintln!(
        "duke: x={height}: |B(x)| = {} / {} = {:.4}",
        union_bad,
        total,
        union_bad as f64 / total as f64
    );
    Ok(table)
}

/// Measured non-surjective counts against the (ell+1)^{9/2} x^{5/2} log x
/// bound shape, one row per (x, ell).
pub fn run_blcount(cfg: &Config) -> Result<Table, CliError> {
    let mut table = Table::new(vec!["x", "ell", "measured", "bound_shape", "ratio"]);
    let tables = ApTables::new(cfg.budget);
    for &x in &cfg.heights {
        let curves = curve_list(x);
        let ranges = shard_slices(&curves, cfg.shards);
        let ells = &cfg.ells;
        let chunk_counts = par::map_chunks(ranges, |r| {
            let mut bad = vec![0u64; ells.len()];
            for idx in r {
                let verdicts = galimage::surjective_all_ell_with(&tables, &curves[idx as usize], ells);
                for (i, ell) in ells.iter().enumerate() {
                    if !verdicts[ell].is_surjective() {
                        bad[i] += 1;
                    }
                }
            }
            bad
        });
        let mut measured = vec![0u64; cfg.ells.len()];
        for chunk in chunk_counts {
            for (slot, v) in measured.iter_mut().zip(chunk) {
                *slot += v;
            }
        }
        for (i, &ell) in cfg.ells.iter().enumerate() {
            let xf = x as f64;
            let bound = ((ell + 1) as f64).powf(4.5) * xf.powf(2.5) * xf.ln();
            table.push(vec![
                Cell::U(x),
                Cell::U(ell),
                Cell::U(measured[i]),
                Cell::F(bound),
                Cell::F(measured[i] as f64 / bound),
            ]);
        }
    }
    Ok(table)
}

/// Least good prime witnessing multiplicative rank 2, per curve.
/// witness_p = 0 marks curves with no witness below the budget.
pub fn run_tx(cfg: &Config) -> Result<Table, CliError> {
    let height = cfg.single_height()?;
    let curves = curve_list(height);
    let tables = ApTables::new(cfg.budget);

    let ranges = shard_slices(&curves, cfg.shards);
    let witnesses = par::map_chunks(ranges, |r| {
        let mut out = Vec::new();
        for idx in r {
            let e = &curves[idx as usize];
            let mut witness = 0u64;
            for chi in tables.budget_tables() {
                let p = chi.prime();
                if let Reduction::Good(cm) = e.reduce(p) {
                    let a_p = ap_with_table(cm.a().value(), cm.b().value(), chi);
                    let f = FrobData::new(p, a_p).expect("character sum satisfies Hasse");
                    if phi_rank_is_free_rank2(&f) {
                        witness = p;
                        break;
                    }
                }
            }
            out.push(witness);
        }
        out
    });

    let mut table = Table::new(vec!["a", "b", "witness_p"]);
    let mut missing = 0u64;
    for (e, w) in curves.iter().zip(witnesses.into_iter().flatten()) {
        if w == 0 {
            missing += 1;
        }
        table.push(vec![Cell::I(e.a()), Cell::I(e.b()), Cell::U(w)]);
    }
    eprintln!(
        "tx: x={height} budget={}: curves without witness = {} / {} = {:.4}",
        cfg.budget,
        missing,
        curves.len(),
        missing as f64 / curves.len() as f64
    );
    Ok(table)
}

/// Frobenius class deviations per prime, one row per trace class.
pub fn run_equidist(cfg: &Config) -> Result<Table, CliError> {
    let ell = cfg.single_ell()?;
    let mut table = Table::new(vec![
        "p",
        "ell",
        "t",
        "d",
        "observed",
        "predicted",
        "normalized_dev",
        "tame",
    ]);
    for &p in &cfg.primes {
        if !is_prime(p) || p <= 3 {
            return Err(CliError::Config(format!("equidist needs primes p > 3, got {p}")));
        }
        if p == ell {
            return Err(CliError::Config(format!("equidist needs p != ell, got {p}")));
        }
        let h = equidist::family_histogram(p, ell);
        if h.total() != p * p - p {
            return Err(CliError::Internal(format!(
                "histogram total {} != p^2 - p at p = {p}",
                h.total()
            )));
        }
        let tame = h.tame();
        if !tame {
            eprintln!("equidist: note: p={p} divides |SL2(F_{ell})|");
        }
        for row in equidist::deviation_report(&h) {
            table.push(vec![
                Cell::U(p),
                Cell::U(ell),
                Cell::U(row.t),
                Cell::U(row.d),
                Cell::U(row.observed),
                Cell::F(row.predicted),
                Cell::F(row.normalized),
                Cell::U(tame as u64),
            ]);
        }
    }
    Ok(table)
}

/// Exhaustive derangement proportions per (ell, ambient, stabilizer,
/// det coset).
pub fn run_derangement(cfg: &Config) -> Result<Table, CliError> {
    let mut table = Table::new(vec![
        "ell",
        "ambient",
        "stabilizer",
        "coset_det",
        "derangements",
        "coset_size",
        "delta",
    ]);
    for &ell in &cfg.ells {
        if ell < 3 {
            eprintln!("derangement: skipping ell={ell}: constructions need ell >= 3");
            continue;
        }
        if ell > 13 {
            return Err(CliError::Config(format!(
                "derangement is exhaustive and capped at ell <= 13, got {ell}"
            )));
        }
        if !is_prime(ell) {
            return Err(CliError::Config(format!("ell must be prime, got {ell}")));
        }
        let ambients = [("GL2", gl2::gl2_group(ell)), ("SL2", gl2::sl2_group(ell))];
        for (ambient_name, h) in &ambients {
            let stabilizers = [
                ("Borel", gl2::borel_subgroup(ell).intersect(h)),
                ("SplitCartanNormalizer", gl2::split_cartan_normalizer(ell).intersect(h)),
                (
                    "NonsplitCartanNormalizer",
                    gl2::nonsplit_cartan_normalizer(ell).intersect(h),
                ),
            ];
            for (stab_name, m) in &stabilizers {
                // one conjugate-union scan per (H, M), tallied by det coset
                let union = derangement::conjugate_union(h, m)
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                let mut size = vec![0u64; ell as usize];
                let mut derangements = vec![0u64; ell as usize];
                for x in h.iter() {
                    let d = x.det() as usize;
                    size[d] += 1;
                    if !union.contains(&x) {
                        derangements[d] += 1;
                    }
                }
                let dets: Vec<u64> = if *ambient_name == "SL2" {
                    vec![1]
                } else {
                    (1..ell).collect()
                };
                for d in dets {
                    let (dr, sz) = (derangements[d as usize], size[d as usize]);
                    table.push(vec![
                        Cell::U(ell),
                        Cell::S(ambient_name.to_string()),
                        Cell::S(stab_name.to_string()),
                        Cell::U(d),
                        Cell::U(dr),
                        Cell::U(sz),
                        Cell::F(dr as f64 / sz as f64),
                    ]);
                }
            }
        }
    }
    Ok(table)
}

/// L(Q) and the sieve bound for the even-numerator demonstration set,
/// with an all-zero-omega baseline row per height.
pub fn run_sieve(cfg: &Config) -> Result<Table, CliError> {
    let mut table = Table::new(vec![
        "x",
        "q",
        "n",
        "source",
        "l_exact",
        "l_value",
        "sieve_bound",
        "measured",
        "within_64x",
    ]);
    for &x in &cfg.heights {
        if x < 2 {
            return Err(CliError::Config("sieve needs --height >= 2".to_string()));
        }
        let measured = sieve::even_numerator_count(x);
        let zero = sieve::SieveProblem::new(1, x as f64);
        let demo = sieve::even_numerator_problem(x as f64);
        for (name, problem) in [("zero", zero), ("demo", demo)] {
            let l = problem.l_of_q();
            let bound = problem.sieve_bound_with_l(&l);
            let ok = (measured as f64) <= sieve::DIAGNOSTIC_CONSTANT * bound;
            table.push(vec![
                Cell::U(x),
                Cell::F(problem.q()),
                Cell::U(problem.n() as u64),
                Cell::S(name.to_string()),
                Cell::S(format!("{l}")),
                Cell::F(l.to_f64().unwrap_or(f64::NAN)),
                Cell::F(bound),
                Cell::U(measured),
                Cell::U(ok as u64),
            ]);
        }
    }
    Ok(table)
}

