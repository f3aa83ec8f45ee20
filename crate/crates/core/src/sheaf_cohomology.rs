//! Pushforwards of complexes on the square, strand homology of free graded complexes, and the
//! checks built on them.
//!
//! A free graded complex is a [`TwistComplex<P>`] whose terms may carry a coefficient monomial:
//! the term `O(a) ⊗ μ` is one generator of `O(a) ⊗ S_c` with `μ` running over a basis of `S_c`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::beilinson::{build_b, build_koszul, build_mm, build_r, MmPair};
use crate::complexes::{mapping_cone_unchecked, ChainMap, Term, TwistComplex, P, PxP};
use crate::error::{Error, Result};
use crate::field::{random_primes, rat, FieldConfig, Rational};
use crate::graded::{dim_graded_piece, mult_matrix_in, BasisCache, IndexedBasis, Polynomial, WeightVector};
use crate::linalg::{rank, SparseMatrix};
use crate::report::{SeriesCheck, StrandRow, VerificationReport};
use crate::series::HilbertSeries;

pub type FreeGradedComplex = TwistComplex<P>;

/// Which factor of the square survives a pushforward.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    /// `O(a,b) ↦ O(a) ⊗ S_{b+k}`.
    First,
    /// `O(a,b) ↦ S_{a+k} ⊗ O(b)`.
    Second,
}

/// Pushes `E ⊗ (pullback of O(k))` forward onto the kept factor.
///
/// Only `H^0` of the integrated factor is modelled, so every integrated twist must exceed `-w`.
pub fn pushforward(e: &TwistComplex<PxP>, keep: Keep, k: i64) -> Result<FreeGradedComplex> {
    let w = e.weights();
    let split = |t: (i64, i64)| match keep {
        Keep::First => (t.0, t.1 + k),
        Keep::Second => (t.1, t.0 + k),
    };
    let mut out = FreeGradedComplex::new(w);
    let mut cache = BasisCache::new(w);
    // first generator index of every term, per degree
    let mut offsets: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for j in e.degrees() {
        let mut offs = Vec::new();
        for t in e.terms(j) {
            let (a, c) = split((t.twist.0, t.twist.1));
            if c <= -w.total() {
                return Err(Error::UnsupportedTwistRange { twist: c, bound: -w.total() });
            }
            offs.push(out.rank(j));
            for mono in cache.get(c).monomials.clone() {
                out.push_term(j, Term { twist: a, label: t.label.clone(), coeff: Some(mono) });
            }
        }
        offsets.insert(j, offs);
    }
    for j in e.degrees() {
        for (row, col, entry) in e.differential(j).iter() {
            let src = &e.terms(j)[col];
            let (_, c_src) = split((src.twist.0, src.twist.1));
            let (_, c_tgt) = split((e.terms(j + 1)[row].twist.0, e.terms(j + 1)[row].twist.1));
            let source_basis = cache.get(c_src).monomials.clone();
            let target_index = cache.get(c_tgt).index.clone();
            for (left, right, coeff) in entry.terms() {
                let (module, scalar) = match keep {
                    Keep::First => (left, right),
                    Keep::Second => (right, left),
                };
                let p = Polynomial::term(module.clone(), coeff.clone());
                for (i, mono) in source_basis.iter().enumerate() {
                    let image = mono.mul(scalar);
                    let target = target_index[&image];
                    out.add_entry(j, offsets[&(j + 1)][row] + target, offsets[&j][col] + i, &p)?;
                }
            }
        }
    }
    Ok(out)
}

/// `Φ(E)(O(k))`: integrate the second factor.
pub fn fm1_apply(e: &TwistComplex<PxP>, k: i64) -> Result<FreeGradedComplex> {
    pushforward(e, Keep::First, k)
}

/// The multiplication map `R̃_k -> O(k)` sending each degree-0 generator `O(l) ⊗ μ` to `μ`.
pub fn diagonal_augmentation(rt: &FreeGradedComplex, k: i64) -> Result<ChainMap<P>> {
    let w = rt.weights();
    let mut aug = ChainMap::new(rt.clone(), TwistComplex::single(w, Term::new(k)))?;
    for (col, t) in rt.terms(0).iter().enumerate() {
        let mono = t.coeff.clone().ok_or_else(|| Error::Shape("generator without coefficient".into()))?;
        aug.add_entry(0, 0, col, &Polynomial::monomial(mono))?;
    }
    Ok(aug)
}

/// Linear algebra of one internal degree `e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrandReport {
    pub e: i64,
    pub term_dims: BTreeMap<i64, usize>,
    /// Rank of `d^j` on the strand.
    pub ranks: BTreeMap<i64, usize>,
    pub homology: BTreeMap<i64, usize>,
}

impl StrandReport {
    pub fn euler_characteristic(&self) -> i64 {
        self.term_dims.iter().map(|(j, d)| if j.rem_euclid(2) == 0 { *d as i64 } else { -(*d as i64) }).sum()
    }

    pub fn homology_euler_characteristic(&self) -> i64 {
        self.homology.iter().map(|(j, d)| if j.rem_euclid(2) == 0 { *d as i64 } else { -(*d as i64) }).sum()
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology.is_empty()
    }

    pub fn row(&self) -> StrandRow {
        StrandRow { e: self.e, dims: self.homology.clone() }
    }
}

/// Matrix of `d^j` on the degree-`e` strand, generator blocks in term order.
fn strand_matrix(c: &FreeGradedComplex, j: i64, e: i64, cache: &mut BasisCache) -> SparseMatrix<Rational> {
    let offsets = |j: i64, cache: &mut BasisCache| -> Vec<usize> {
        let mut acc = 0;
        c.terms(j)
            .iter()
            .map(|t| {
                let o = acc;
                acc += cache.dim(e + t.twist);
                o
            })
            .collect()
    };
    let src_off = offsets(j, cache);
    let tgt_off = offsets(j + 1, cache);
    let ncols = c.terms(j).iter().map(|t| cache.dim(e + t.twist)).sum();
    let nrows = c.terms(j + 1).iter().map(|t| cache.dim(e + t.twist)).sum();
    let mut trip = Vec::new();
    for (row, col, f) in c.differential(j).iter() {
        let a = e + c.terms(j)[col].twist;
        let b = e + c.terms(j + 1)[row].twist;
        if a < 0 || b < 0 {
            continue;
        }
        let source: IndexedBasis = cache.get(a).clone();
        let target = cache.get(b);
        let m = mult_matrix_in(f, &source, target);
        for (r, entries) in m.rows.iter().enumerate() {
            for (cc, v) in entries {
                trip.push((tgt_off[row] + r, src_off[col] + cc, v.clone()));
            }
        }
    }
    SparseMatrix::from_triplets(nrows, ncols, trip)
}

/// Homology dimensions of the degree-`e` strand of `c`.
pub fn strand_homology(c: &FreeGradedComplex, e: i64, field: FieldConfig) -> Result<StrandReport> {
    let w = c.weights();
    let mut cache = BasisCache::new(w);
    let degrees = c.degrees();
    let mut term_dims = BTreeMap::new();
    for &j in &degrees {
        let d: usize = c.terms(j).iter().map(|t| dim_graded_piece(w, e + t.twist) as usize).sum();
        if d > 0 {
            term_dims.insert(j, d);
        }
    }
    let mut ranks = BTreeMap::new();
    for &j in &degrees {
        if c.rank(j + 1) == 0 {
            continue;
        }
        let m = strand_matrix(c, j, e, &mut cache);
        let r = rank(field, &m)?;
        if r > 0 {
            ranks.insert(j, r);
        }
    }
    let mut homology = BTreeMap::new();
    for (&j, &d) in &term_dims {
        let h = d - ranks.get(&j).copied().unwrap_or(0) - ranks.get(&(j - 1)).copied().unwrap_or(0);
        if h > 0 {
            homology.insert(j, h);
        }
    }
    Ok(StrandReport { e, term_dims, ranks, homology })
}

/// The fields a strand computation is run over: the rationals alone, or the requested prime and
/// two more drawn from a fixed seed.
fn field_runs(field: FieldConfig, w: &WeightVector) -> Result<Vec<FieldConfig>> {
    match field.validated(w.total())? {
        FieldConfig::Rationals => Ok(vec![FieldConfig::Rationals]),
        FieldConfig::Prime(p) => {
            let mut out = vec![FieldConfig::Prime(p)];
            out.extend(random_primes(2, w.total() as u64 + 1, p).into_iter().map(FieldConfig::Prime));
            Ok(out)
        }
    }
}

const PRIME_CAVEAT: &str = "ranks computed modulo three primes; a result can differ from the rational one only at primes dividing some minor";

/// Strands `e ∈ es` of `c`, in parallel, with agreement across the configured fields.
fn strands(
    c: &FreeGradedComplex,
    es: impl IntoIterator<Item = i64>,
    field: FieldConfig,
    report: &mut VerificationReport,
) -> Result<Vec<StrandReport>> {
    let runs = field_runs(field, c.weights())?;
    let es: Vec<i64> = es.into_iter().collect();
    let results: Vec<Vec<StrandReport>> = es
        .par_iter()
        .map(|&e| runs.iter().map(|f| strand_homology(c, e, *f)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if runs.len() > 1 {
        report.qualifier = Some(PRIME_CAVEAT.to_string());
        let primes: Vec<String> = runs.iter().map(ToString::to_string).collect();
        report.detail("fields", primes);
    }
    let mut out = Vec::new();
    for per_field in results {
        let first = per_field[0].clone();
        if per_field.iter().any(|s| s.homology != first.homology) {
            report.fail(format!("strand e={}: homology differs between primes", first.e));
        }
        out.push(first);
    }
    Ok(out)
}

/// `Σ_j (-1)^j HS(C^j)`.
pub fn euler_series(c: &FreeGradedComplex) -> HilbertSeries {
    let mut s = HilbertSeries::zero();
    for j in c.degrees() {
        let sign = if j.rem_euclid(2) == 0 { 1 } else { -1 };
        for t in c.terms(j) {
            s.add_twist(t.twist, sign);
        }
    }
    s
}

/// Exact comparison of the Euler series of `c` with `HS(O(target))`, or with zero.
pub fn euler_series_check(c: &FreeGradedComplex, target: Option<i64>) -> VerificationReport {
    let lhs = euler_series(c);
    let rhs = target.map_or_else(HilbertSeries::zero, HilbertSeries::of_twist);
    let mut report = VerificationReport::new("euler_series", c.weights());
    if let Some(t) = target {
        report = report.param("target", t);
    }
    let equal = lhs == rhs;
    if !equal {
        report.fail(format!("{lhs} != {rhs}"));
    }
    report.series = Some(SeriesCheck { lhs: lhs.to_string(), rhs: rhs.to_string(), equal });
    report
}

/// Cancels every invertible (constant) entry of the differential by Gaussian elimination.
///
/// The result is homotopy equivalent to `c` and has no constant entries left, so it is the
/// minimal complex: it is empty exactly when `c` is acyclic.
pub fn reduce(c: &FreeGradedComplex) -> FreeGradedComplex {
    let mut work = Reducer::new(c);
    while let Some((j, r, col)) = work.best_pivot() {
        work.eliminate(j, r, col);
    }
    work.finish(c)
}

struct Reducer {
    /// `d^j` by column: `cols[j][c] = {row -> entry}`.
    cols: BTreeMap<i64, Vec<BTreeMap<usize, Polynomial>>>,
    /// `rows[j][r] = {columns with an entry in row r}`.
    rows: BTreeMap<i64, Vec<BTreeSet<usize>>>,
    alive: BTreeMap<i64, Vec<bool>>,
}

impl Reducer {
    fn new(c: &FreeGradedComplex) -> Self {
        let mut cols = BTreeMap::new();
        let mut rows = BTreeMap::new();
        let mut alive = BTreeMap::new();
        for j in c.degrees() {
            alive.insert(j, vec![true; c.rank(j)]);
            let mut cj = vec![BTreeMap::new(); c.rank(j)];
            let mut rj = vec![BTreeSet::new(); c.rank(j + 1)];
            for (r, col, e) in c.differential(j).iter() {
                cj[col].insert(r, e.clone());
                rj[r].insert(col);
            }
            cols.insert(j, cj);
            rows.insert(j, rj);
        }
        Reducer { cols, rows, alive }
    }

    /// Constant entry with the smallest Markowitz cost, ties broken by position.
    fn best_pivot(&self) -> Option<(i64, usize, usize)> {
        let mut best: Option<(usize, (i64, usize, usize))> = None;
        for (&j, cj) in &self.cols {
            for (col, entries) in cj.iter().enumerate() {
                for (&r, e) in entries {
                    if e.as_nonzero_constant().is_none() {
                        continue;
                    }
                    let cost = (entries.len() - 1) * (self.rows[&j][r].len() - 1);
                    if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                        best = Some((cost, (j, r, col)));
                        if cost == 0 {
                            return best.map(|(_, p)| p);
                        }
                    }
                }
            }
        }
        best.map(|(_, p)| p)
    }

    fn eliminate(&mut self, j: i64, r: usize, col: usize) {
        let unit = self.cols[&j][col][&r].as_nonzero_constant().expect("pivot is constant").clone();
        let inv = rat(1) / unit;
        let pivot_col: Vec<(usize, Polynomial)> =
            self.cols[&j][col].iter().filter(|(&rr, _)| rr != r).map(|(rr, e)| (*rr, e.clone())).collect();
        let pivot_row: Vec<(usize, Polynomial)> = self.rows[&j][r]
            .iter()
            .filter(|&&cc| cc != col)
            .map(|&cc| (cc, self.cols[&j][cc][&r].clone()))
            .collect();
        // Schur complement: d(r',c') -= d(r',col) u^-1 d(r,c')
        for (cc, right) in &pivot_row {
            let right = right.scale(&inv);
            for (rr, left) in &pivot_col {
                let delta = left.mul(&right).neg();
                let cj = self.cols.get_mut(&j).unwrap();
                let slot = cj[*cc].entry(*rr).or_default();
                slot.add_assign(&delta);
                if slot.is_zero() {
                    cj[*cc].remove(rr);
                    self.rows.get_mut(&j).unwrap()[*rr].remove(cc);
                } else {
                    self.rows.get_mut(&j).unwrap()[*rr].insert(*cc);
                }
            }
        }
        // drop column `col` and row `r` of d^j
        for rr in self.cols.get_mut(&j).unwrap()[col].keys().copied().collect::<Vec<_>>() {
            self.rows.get_mut(&j).unwrap()[rr].remove(&col);
        }
        self.cols.get_mut(&j).unwrap()[col].clear();
        for cc in std::mem::take(&mut self.rows.get_mut(&j).unwrap()[r]) {
            self.cols.get_mut(&j).unwrap()[cc].remove(&r);
        }
        // generator `col` of C^j is a row of d^{j-1}; generator `r` of C^{j+1} a column of d^{j+1}
        if let Some(rows_prev) = self.rows.get_mut(&(j - 1)) {
            if col < rows_prev.len() {
                let cols_prev = self.cols.get_mut(&(j - 1)).unwrap();
                for cc in std::mem::take(&mut rows_prev[col]) {
                    cols_prev[cc].remove(&col);
                }
            }
        }
        if let Some(cols_next) = self.cols.get_mut(&(j + 1)) {
            let rows_next = self.rows.get_mut(&(j + 1)).unwrap();
            for rr in std::mem::take(&mut cols_next[r]).into_keys() {
                rows_next[rr].remove(&r);
            }
        }
        self.alive.get_mut(&j).unwrap()[col] = false;
        self.alive.get_mut(&(j + 1)).unwrap()[r] = false;
    }

    fn finish(self, c: &FreeGradedComplex) -> FreeGradedComplex {
        let mut out = FreeGradedComplex::new(c.weights());
        let mut new_index: BTreeMap<i64, Vec<Option<usize>>> = BTreeMap::new();
        for (&j, alive) in &self.alive {
            let idx = alive
                .iter()
                .enumerate()
                .map(|(i, &a)| a.then(|| out.push_term(j, c.terms(j)[i].clone())))
                .collect();
            new_index.insert(j, idx);
        }
        for (&j, cj) in &self.cols {
            for (col, entries) in cj.iter().enumerate() {
                let Some(nc) = new_index[&j][col] else { continue };
                for (&r, e) in entries {
                    let nr = new_index[&(j + 1)][r].expect("entries only join live generators");
                    out.add_entry(j, nr, nc, e).expect("elimination preserves degrees");
                }
            }
        }
        out
    }
}

fn truncation_note(d: i64) -> String {
    format!("strands e=0..{d} on the minimal model, plus the exact Euler series identity")
}

/// Checks that `R̃_k = Φ(R)(O(k))` resolves `O(k)` through the multiplication augmentation:
/// `H^0` of every strand `e <= D` has dimension `dim S_{e+k}`, nothing else survives, the cone of
/// the augmentation is acyclic, and the Euler series of `R̃_k` equals that of `O(k)`.
pub fn verify_diagonal_resolution_of(
    r: &TwistComplex<PxP>,
    k: i64,
    d: i64,
    field: FieldConfig,
) -> Result<VerificationReport> {
    let w = r.weights().clone();
    if k <= -w.total() || k > 0 {
        return Err(Error::Range(format!("k must satisfy {} < k <= 0, got {k}", -w.total())));
    }
    let mut report = VerificationReport::new("diagonal_resolution", &w)
        .param("k", k)
        .param("degree_bound", d)
        .param("field", field.to_string());
    report.qualifier = Some(truncation_note(d));
    let rt = fm1_apply(r, k)?;
    report.detail("generators", rt.total_rank());
    report.push_part(rt.check_d_squared()?);
    let aug = diagonal_augmentation(&rt, k)?;
    let chain = aug.is_chain_map()?;
    let chain_ok = chain.pass;
    report.push_part(chain);
    report.push_part(euler_series_check(&rt, Some(k)));
    if !chain_ok {
        return Ok(report);
    }

    let minimal = reduce(&rt);
    report.detail("minimal_generators", minimal.total_rank());
    let rows = strands(&minimal, 0..=d, field, &mut report)?;
    for s in &rows {
        let expected = dim_graded_piece(&w, s.e + k) as usize;
        let mut want = BTreeMap::new();
        if expected > 0 {
            want.insert(0, expected);
        }
        if s.homology != want {
            report.fail(format!("strand e={}: homology {:?}, expected {:?}", s.e, s.homology, want));
        }
    }
    report.strands = rows.iter().map(StrandReport::row).collect();

    let cone = reduce(&mapping_cone_unchecked(&aug));
    report.detail("cone_minimal_generators", cone.total_rank());
    for s in strands(&cone, 0..=d, field, &mut report)? {
        if !s.is_acyclic() {
            report.fail(format!("augmentation cone has homology {:?} at e={}", s.homology, s.e));
        }
    }
    Ok(report)
}

pub fn verify_diagonal_resolution(w: &WeightVector, k: i64, d: i64, field: FieldConfig) -> Result<VerificationReport> {
    let r = build_r(w, 1 - w.total())?;
    verify_diagonal_resolution_of(&r, k, d, field)
}

/// `dim H^i(P, B_l(k)) = δ_{k,l} δ_{i,0}` for all `-w < k, l <= 0`.
pub fn verify_blk_cohomology(w: &WeightVector, field: FieldConfig) -> Result<VerificationReport> {
    let runs = field_runs(field, w)?;
    let mut report = VerificationReport::new("blk_cohomology", w).param("field", field.to_string());
    let range: Vec<i64> = (1 - w.total()..=0).collect();
    let pairs: Vec<(i64, i64)> = range.iter().flat_map(|&k| range.iter().map(move |&l| (k, l))).collect();
    let results: Vec<(i64, i64, Vec<BTreeMap<i64, usize>>)> = pairs
        .par_iter()
        .map(|&(k, l)| {
            let c = build_b(w, l)?.twist_by(&[k])?;
            for j in c.degrees() {
                for t in c.terms(j) {
                    if t.twist <= -w.total() {
                        return Err(Error::UnsupportedTwistRange { twist: t.twist, bound: -w.total() });
                    }
                }
            }
            let dims = runs
                .iter()
                .map(|f| Ok(strand_homology(&c, 0, *f)?.homology))
                .collect::<Result<Vec<_>>>()?;
            Ok((k, l, dims))
        })
        .collect::<Result<Vec<_>>>()?;
    if runs.len() > 1 {
        report.qualifier = Some(PRIME_CAVEAT.to_string());
    }
    let mut table = Vec::new();
    for (k, l, dims) in results {
        if dims.iter().any(|d| *d != dims[0]) {
            report.fail(format!("k={k} l={l}: homology differs between primes"));
        }
        let mut want = BTreeMap::new();
        if k == l {
            want.insert(0, 1);
        }
        if dims[0] != want {
            report.fail(format!("H^*(B_{l}({k})) = {:?}, expected {:?}", dims[0], want));
        }
        table.push(serde_json::json!({"k": k, "l": l, "dims": dims[0]}));
    }
    report.detail("entries", table.len());
    report.detail("table", table);
    Ok(report)
}

/// Acyclicity of `cone(ε_m)` on strands `e <= D` and vanishing of its Euler series.
pub fn verify_mres_pair(pair: &MmPair, d: i64, field: FieldConfig) -> Result<VerificationReport> {
    let w = pair.complex.weights().clone();
    let mut report = VerificationReport::new("m_resolution", &w)
        .param("m", pair.m)
        .param("degree_bound", d)
        .param("field", field.to_string());
    report.qualifier = Some(truncation_note(d));
    let chain = pair.epsilon.is_chain_map()?;
    let chain_ok = chain.pass;
    report.push_part(chain);
    if !chain_ok {
        return Ok(report);
    }
    let cone = mapping_cone_unchecked(&pair.epsilon);
    report.push_part(euler_series_check(&cone, None));
    let minimal = reduce(&cone);
    report.detail("cone_generators", cone.total_rank());
    report.detail("cone_minimal_generators", minimal.total_rank());
    let rows = strands(&minimal, 0..=d, field, &mut report)?;
    for s in &rows {
        if !s.is_acyclic() {
            report.fail(format!("cone(ε) has homology {:?} at e={}", s.homology, s.e));
        }
    }
    report.strands = rows.iter().map(StrandReport::row).collect();
    Ok(report)
}

pub fn verify_mres(w: &WeightVector, m: i64, d: i64, field: FieldConfig) -> Result<VerificationReport> {
    verify_mres_pair(&build_mm(w, m)?, d, field)
}

/// Degree-`t` strands of the Koszul complex for `0 <= t <= 2w`: only `t = 0` has homology, one
/// dimension in degree 0.
pub fn verify_koszul_strands(w: &WeightVector, field: FieldConfig) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("koszul_strands", w).param("field", field.to_string());
    let k = build_koszul(w);
    let rows = strands(&k, 0..=2 * w.total(), field, &mut report)?;
    for s in &rows {
        let mut want = BTreeMap::new();
        if s.e == 0 {
            want.insert(0, 1);
        }
        if s.homology != want {
            report.fail(format!("Koszul strand t={}: homology {:?}", s.e, s.homology));
        }
    }
    report.strands = rows.iter().map(StrandReport::row).collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beilinson::closed_form_differential;
    use crate::complexes::{mapping_cone, BiTwist};
    use crate::graded::IndexSubset;

    fn wv(v: &[u32]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    fn q() -> FieldConfig {
        FieldConfig::Rationals
    }

    #[test]
    fn pushforward_of_structure_sheaf() {
        let w = wv(&[1, 1, 2]);
        let o = TwistComplex::<PxP>::single(&w, Term::new(BiTwist(0, 0)));
        let p = fm1_apply(&o, 0).unwrap();
        assert_eq!(p.degrees(), vec![0]);
        assert_eq!(p.terms(0)[0].twist, 0);
        let o = TwistComplex::<PxP>::single(&w, Term::new(BiTwist(2, -1)));
        assert!(fm1_apply(&o, -1).unwrap().is_zero());
        assert!(matches!(fm1_apply(&o, -3), Err(Error::UnsupportedTwistRange { twist: -4, bound: -4 })));
    }

    #[test]
    fn pushforward_terms_of_resolution() {
        let w = wv(&[1, 1, 1]);
        let r = build_r(&w, -2).unwrap();
        let p = fm1_apply(&r, 0).unwrap();
        // ⊕_{-2<=l<=0} O(l) ⊗ S_{-l}
        let twists: Vec<i64> = p.terms(0).iter().map(|t| t.twist).collect();
        assert_eq!(twists, vec![-2, -2, -2, -2, -2, -2, -1, -1, -1, 0]);
        assert!(p.check_d_squared().unwrap().pass);
    }

    #[test]
    fn strand_of_multiplication_by_variable() {
        let w = wv(&[1, 1]);
        let mut c = FreeGradedComplex::new(&w);
        c.push_term(0, Term::new(0));
        c.push_term(1, Term::new(1));
        c.add_entry(0, 0, 0, &Polynomial::var(&w, 0)).unwrap();
        let s = strand_homology(&c, 1, q()).unwrap();
        assert_eq!(s.term_dims, BTreeMap::from([(0, 2), (1, 3)]));
        assert_eq!(s.ranks, BTreeMap::from([(0, 2)]));
        assert_eq!(s.homology, BTreeMap::from([(1, 1)]));
        let single = TwistComplex::<P>::single(&w, Term::new(3));
        assert_eq!(strand_homology(&single, 2, q()).unwrap().homology, BTreeMap::from([(0, 6)]));
    }

    #[test]
    fn euler_series_of_identity_cone() {
        let w = wv(&[1, 2]);
        let o = TwistComplex::<P>::single(&w, Term::new(0));
        let mut id = ChainMap::new(o.clone(), o).unwrap();
        id.add_entry(0, 0, 0, &Polynomial::int(&w, 1)).unwrap();
        let cone = mapping_cone(&id).unwrap();
        assert!(euler_series_check(&cone, None).pass);
        assert!(reduce(&cone).is_zero());
    }

    /// The reduced and unreduced complexes have the same strand homology.
    #[test]
    fn reduction_preserves_strands() {
        for (v, k) in [(&[1, 1, 1][..], 0), (&[1, 1, 1], -1), (&[1, 1, 2], -2), (&[1, 2], 0)] {
            let w = wv(v);
            let rt = fm1_apply(&closed_form_differential(&w, 1 - w.total()).unwrap(), k).unwrap();
            let red = reduce(&rt);
            assert!(red.check_d_squared().unwrap().pass);
            for e in 0..=2 * w.total() {
                let a = strand_homology(&rt, e, q()).unwrap();
                let b = strand_homology(&red, e, q()).unwrap();
                assert_eq!(a.homology, b.homology, "w={w} k={k} e={e}");
                assert_eq!(a.euler_characteristic(), b.euler_characteristic());
            }
        }
    }

    #[test]
    fn strand_euler_matches_series() {
        let w = wv(&[1, 1, 2]);
        let rt = fm1_apply(&build_r(&w, -3).unwrap(), -1).unwrap();
        let s = euler_series(&rt);
        for e in -2..12 {
            let st = strand_homology(&rt, e, q()).unwrap();
            assert_eq!(st.euler_characteristic(), s.coefficient(&w, e));
            assert_eq!(st.homology_euler_characteristic(), st.euler_characteristic());
        }
    }

    #[test]
    fn diagonal_resolution_small() {
        let w = wv(&[1, 1, 1]);
        for k in -2..=0 {
            let r = verify_diagonal_resolution(&w, k, 9, q()).unwrap();
            assert!(r.pass, "{r}");
            assert_eq!(r.strands.len(), 10);
        }
        let w = wv(&[1, 1]);
        let r = verify_diagonal_resolution(&w, -1, 2, q()).unwrap();
        assert!(r.pass);
        assert!(r.strands[0].dims.is_empty());
    }

    #[test]
    fn prime_field_agrees() {
        let w = wv(&[1, 1, 2]);
        let r = verify_diagonal_resolution(&w, -1, 6, FieldConfig::Prime(101)).unwrap();
        assert!(r.pass, "{r}");
        assert!(r.qualifier.as_deref().is_some_and(|q| q.contains("primes")));
        assert!(matches!(
            verify_diagonal_resolution(&w, -1, 6, FieldConfig::Prime(3)),
            Err(Error::InvalidField(_))
        ));
    }

    #[test]
    fn blk_table_small() {
        assert!(verify_blk_cohomology(&wv(&[1, 1, 1]), q()).unwrap().pass);
        assert!(verify_blk_cohomology(&wv(&[1, 2]), q()).unwrap().pass);
    }

    #[test]
    fn mres_small() {
        let w = wv(&[1, 1, 1]);
        for m in 1..3 {
            let r = verify_mres(&w, m, 9, q()).unwrap();
            assert!(r.pass, "{r}");
        }
    }

    #[test]
    fn koszul_small() {
        assert!(verify_koszul_strands(&wv(&[1, 2, 3]), q()).unwrap().pass);
    }

    #[test]
    fn nonacyclic_cone_is_detected() {
        let w = wv(&[1, 1]);
        // O(-1) --x0--> O(0): cokernel is nonzero
        let mut c = FreeGradedComplex::new(&w);
        c.push_term(-1, Term::labeled(-1, 0, IndexSubset::empty()));
        c.push_term(0, Term::new(0));
        c.add_entry(-1, 0, 0, &Polynomial::var(&w, 0)).unwrap();
        let red = reduce(&c);
        assert_eq!(red.total_rank(), 2);
        assert!(!strand_homology(&red, 0, q()).unwrap().is_acyclic());
    }
}
