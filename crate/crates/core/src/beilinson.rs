//! The Koszul complex, its truncations `B_l`, the maps `μ_k`, the complexes `R_k` resolving the
//! diagonal, and the pairs `(M_m, ε_m)`.

use std::collections::{BTreeMap, HashMap};

use crate::complexes::{box_sheaf_complex, mapping_cone, BiTwist, ChainMap, Term, TermLabel, TwistComplex, P, PxP};
use crate::error::{Error, Result};
use crate::field::rat;
use crate::graded::{BiPolynomial, IndexSubset, Monomial, Polynomial, WeightVector};
use crate::report::VerificationReport;
use crate::sheaf_cohomology::{pushforward, Keep};

fn label_index<T>(terms: &[Term<T>]) -> HashMap<TermLabel, usize> {
    terms
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.label.clone().map(|l| (l, i)))
        .collect()
}

/// `K^j = ⊕_{|I|=-j} O(-w_I)` with `d` sending `I` to `I \ {i}` by `(-1)^{N_I^i} x_i`.
pub fn build_koszul(w: &WeightVector) -> TwistComplex<P> {
    koszul_part(w, 0, i64::MAX)
}

/// Terms `O(shift - w_I)` for `w_I <= max_weight`, labeled `(l, I)`.
fn koszul_part(w: &WeightVector, l: i64, max_weight: i64) -> TwistComplex<P> {
    let shift = -l;
    let mut c = TwistComplex::<P>::new(w);
    let mut index: Vec<HashMap<IndexSubset, usize>> = Vec::new();
    for size in 0..=w.nvars() {
        let mut idx = HashMap::new();
        for subset in IndexSubset::all_of_size(w.nvars(), size) {
            if w.subset_weight(&subset) <= max_weight {
                let twist = shift - w.subset_weight(&subset);
                let pos = c.push_term(-(size as i64), Term::labeled(twist, l, subset.clone()));
                idx.insert(subset, pos);
            }
        }
        index.push(idx);
    }
    for size in 1..=w.nvars() {
        let j = -(size as i64);
        for (subset, &col) in &index[size] {
            for i in subset.iter() {
                let smaller = subset.without(i).expect("i is in the subset");
                let row = index[size - 1][&smaller];
                let e = Polynomial::var(w, i).scale(&rat(subset.koszul_sign(i)));
                c.add_entry(j, row, col, &e).expect("Koszul entries have forced degrees");
            }
        }
    }
    c
}

fn check_block_index(w: &WeightVector, l: i64) -> Result<()> {
    if l <= -w.total() || l > 0 {
        return Err(Error::Range(format!("block index {l} outside ({}, 0]", -w.total())));
    }
    Ok(())
}

/// The subcomplex of `K(-l)` on the terms with `w_I <= -l`.
pub fn build_b(w: &WeightVector, l: i64) -> Result<TwistComplex<P>> {
    check_block_index(w, l)?;
    Ok(koszul_part(w, l, -l))
}

/// `μ_k : O(k) ⊠ B_k[-1] -> R_{k+1}`, with component `-(-1)^{N_I^i} x_i ⊗ 1` from `I` to
/// `(k + w_i, I \ {i})` whenever that target term exists.
pub fn build_mu(w: &WeightVector, k: i64, r_next: &TwistComplex<PxP>) -> Result<ChainMap<PxP>> {
    if k <= -w.total() || k >= 0 {
        return Err(Error::Range(format!("μ_k needs {} < k < 0, got {k}", -w.total())));
    }
    let source = box_sheaf_complex(k, &build_b(w, k)?, true);
    let mut mu = ChainMap::new(source.clone(), r_next.clone())?;
    for j in source.degrees() {
        let targets = label_index(r_next.terms(j));
        for (col, term) in source.terms(j).iter().enumerate() {
            let subset = &term.label.as_ref().expect("B_k terms are labeled").subset;
            for i in subset.iter() {
                let label = TermLabel { l: k + w.weight(i), subset: subset.without(i).expect("member") };
                if let Some(&row) = targets.get(&label) {
                    let e = BiPolynomial::left_var(w, i, -subset.koszul_sign(i));
                    mu.add_entry(j, row, col, &e)?;
                }
            }
        }
    }
    Ok(mu)
}

/// Multiplication marker `f_l : O(l,-l) -> O_Δ` on the degree-0 term with label `(l, ∅)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentationMarker {
    pub l: i64,
    pub term: usize,
}

/// Position of one entry of `μ_k`: component `degree`, `(row, col)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MuMutation {
    pub k: i64,
    pub degree: i64,
    pub row: usize,
    pub col: usize,
}

/// `R_0, ..., R_k` and the maps `μ` joining them, built from `R_0 = O_{P×P}` by cones.
#[derive(Clone, Debug)]
pub struct ResolutionBundle {
    w: WeightVector,
    r: BTreeMap<i64, TwistComplex<PxP>>,
    mu: BTreeMap<i64, ChainMap<PxP>>,
}

impl ResolutionBundle {
    /// Builds every `R_j` for `k <= j <= 0`.
    pub fn up_to(w: &WeightVector, k: i64) -> Result<Self> {
        Self::up_to_mutated(w, k, None)
    }

    /// As [`ResolutionBundle::up_to`], with one entry of one `μ` negated before its cone is taken.
    pub fn up_to_mutated(w: &WeightVector, k: i64, mutation: Option<&MuMutation>) -> Result<Self> {
        check_block_index(w, k)?;
        let mut r = BTreeMap::new();
        let mut mu = BTreeMap::new();
        r.insert(0, resolution_start(w));
        for j in (k..0).rev() {
            let mut m = build_mu(w, j, &r[&(j + 1)])?;
            if let Some(mm) = mutation.filter(|mm| mm.k == j) {
                m.flip_entry_sign(mm.degree, mm.row, mm.col)?;
            }
            r.insert(j, mapping_cone(&m)?);
            mu.insert(j, m);
        }
        Ok(ResolutionBundle { w: w.clone(), r, mu })
    }

    /// Every entry position of every `μ_k` in the bundle.
    pub fn mu_positions(&self) -> Vec<MuMutation> {
        self.mu
            .iter()
            .flat_map(|(&k, m)| {
                m.entry_positions().into_iter().map(move |(degree, row, col)| MuMutation { k, degree, row, col })
            })
            .collect()
    }

    /// The full bundle down to `R_{1-w}`.
    pub fn full(w: &WeightVector) -> Result<Self> {
        Self::up_to(w, 1 - w.total())
    }

    pub fn weights(&self) -> &WeightVector {
        &self.w
    }

    pub fn r(&self, k: i64) -> Result<&TwistComplex<PxP>> {
        self.r.get(&k).ok_or_else(|| Error::Range(format!("R_{k} was not built")))
    }

    pub fn mu(&self, k: i64) -> Result<&ChainMap<PxP>> {
        self.mu.get(&k).ok_or_else(|| Error::Range(format!("μ_{k} was not built")))
    }

    /// Lowest `k` available.
    pub fn lowest(&self) -> i64 {
        *self.r.keys().next().expect("R_0 is always present")
    }

    pub fn augmentation(&self, k: i64) -> Result<Vec<AugmentationMarker>> {
        Ok(augmentation_markers(self.r(k)?))
    }
}

fn resolution_start(w: &WeightVector) -> TwistComplex<PxP> {
    TwistComplex::single(w, Term::labeled(BiTwist(0, 0), 0, IndexSubset::empty()))
}

pub fn build_r(w: &WeightVector, k: i64) -> Result<TwistComplex<PxP>> {
    Ok(ResolutionBundle::up_to(w, k)?.r(k)?.clone())
}

/// The degree-0 terms `O(l,-l)`, each carrying its multiplication map to the diagonal.
pub fn augmentation_markers(r: &TwistComplex<PxP>) -> Vec<AugmentationMarker> {
    r.terms(0)
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let label = t.label.as_ref()?;
            label.subset.is_empty().then_some(AugmentationMarker { l: label.l, term: i })
        })
        .collect()
}

/// `R_k` written down directly: terms `O(l, -l-w_I)` for `k <= l <= 0`, `w_I <= -l`, ordered by
/// `l` then `I`; `d` has `(-1)^{N_I^i} 1⊗x_i` into `(l, I\{i})` and `-(-1)^{N_I^i} x_i⊗1` into
/// `(l+w_i, I\{i})`.
pub fn closed_form_differential(w: &WeightVector, k: i64) -> Result<TwistComplex<PxP>> {
    check_block_index(w, k)?;
    let mut c = TwistComplex::<PxP>::new(w);
    for size in 0..=w.nvars() {
        let j = -(size as i64);
        for l in k..=0 {
            for subset in IndexSubset::all_of_size(w.nvars(), size) {
                let wi = w.subset_weight(&subset);
                if wi <= -l {
                    c.push_term(j, Term::labeled(BiTwist(l, -l - wi), l, subset));
                }
            }
        }
    }
    for size in 1..=w.nvars() {
        let j = -(size as i64);
        let targets = label_index(c.terms(j + 1));
        let sources: Vec<TermLabel> = c.terms(j).iter().map(|t| t.label.clone().expect("labeled")).collect();
        for (col, label) in sources.iter().enumerate() {
            for i in label.subset.iter() {
                let sign = label.subset.koszul_sign(i);
                let smaller = label.subset.without(i).expect("member");
                let same = TermLabel { l: label.l, subset: smaller.clone() };
                if let Some(&row) = targets.get(&same) {
                    c.add_entry(j, row, col, &BiPolynomial::right_var(w, i, sign))?;
                }
                let up = TermLabel { l: label.l + w.weight(i), subset: smaller };
                if let Some(&row) = targets.get(&up) {
                    c.add_entry(j, row, col, &BiPolynomial::left_var(w, i, -sign))?;
                }
            }
        }
    }
    Ok(c)
}

/// Checks that the markers `f_l` kill the image of `d^{-1}` once `S ⊗ S` is collapsed to `S`.
pub fn verify_augmentation_of(r: &TwistComplex<PxP>) -> VerificationReport {
    let mut report = VerificationReport::new("augmentation", r.weights());
    let markers = augmentation_markers(r);
    let d = r.differential(-1);
    let mut sums: BTreeMap<usize, Polynomial> = BTreeMap::new();
    for (row, col, e) in d.iter() {
        if markers.iter().any(|m| m.term == row) {
            sums.entry(col).or_default().add_assign(&e.collapse());
        }
    }
    for (col, s) in sums {
        if !s.is_zero() {
            report.fail(format!("augmentation ∘ d^-1 on {} is {s}", r.terms(-1)[col]));
        }
    }
    report.detail("markers", markers.len());
    report
}

pub fn verify_augmentation(w: &WeightVector) -> Result<VerificationReport> {
    Ok(verify_augmentation_of(&build_r(w, 1 - w.total())?))
}

/// `M_m = Mc(ρ_m)` for `ρ_m : pr_{1*}(R_{1-m}(m,0)) -> O(m)`, with the map `ε_m : B_{-m} -> M_m`.
#[derive(Clone, Debug)]
pub struct MmPair {
    pub m: i64,
    pub complex: TwistComplex<P>,
    pub epsilon: ChainMap<P>,
    pub rho: ChainMap<P>,
}

fn check_m(w: &WeightVector, m: i64) -> Result<()> {
    if m <= 0 || m >= w.total() {
        return Err(Error::Range(format!("m must satisfy 0 < m < {}, got {m}", w.total())));
    }
    Ok(())
}

/// `ρ_m` on the degree-0 generators `O(-l) ⊗ S_{l+m}`: the generator `μ` goes to `-μ`.
///
/// The sign makes `ε_m^0 = id` together with the `ε_m` components below a chain map under the
/// cone convention used here.
pub fn build_rho(w: &WeightVector, m: i64) -> Result<ChainMap<P>> {
    check_m(w, m)?;
    let pushed = pushforward(&build_r(w, 1 - m)?.twist_by(&[m, 0])?, Keep::Second, 0)?;
    let target = TwistComplex::single(w, Term::new(m));
    let mut rho = ChainMap::new(pushed.clone(), target)?;
    for (col, t) in pushed.terms(0).iter().enumerate() {
        let coeff = t.coeff.clone().expect("pushforward generators carry a coefficient");
        rho.add_entry(0, 0, col, &Polynomial::term(coeff, rat(-1)))?;
    }
    Ok(rho)
}

pub fn build_mm(w: &WeightVector, m: i64) -> Result<MmPair> {
    let rho = build_rho(w, m)?;
    let complex = mapping_cone(&rho)?;
    let b = build_b(w, -m)?;
    let mut epsilon = ChainMap::new(b.clone(), complex.clone())?;
    epsilon.add_entry(0, 0, 0, &Polynomial::int(w, 1))?;
    for j in b.degrees().into_iter().filter(|&j| j < 0) {
        let targets: HashMap<(TermLabel, Monomial), usize> = complex
            .terms(j)
            .iter()
            .enumerate()
            .filter_map(|(i, t)| Some(((t.label.clone()?, t.coeff.clone()?), i)))
            .collect();
        for (col, term) in b.terms(j).iter().enumerate() {
            let subset = &term.label.as_ref().expect("labeled").subset;
            for i in subset.iter() {
                let label = TermLabel { l: w.weight(i) - m, subset: subset.without(i).expect("member") };
                if let Some(&row) = targets.get(&(label, Monomial::var(w, i))) {
                    let e = Polynomial::int(w, -subset.koszul_sign(i));
                    epsilon.add_entry(j, row, col, &e)?;
                }
            }
        }
    }
    Ok(MmPair { m, complex, epsilon, rho })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(v: &[u32]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn koszul_ranks_and_signs() {
        let k = build_koszul(&wv(&[1, 1]));
        assert_eq!((k.rank(-2), k.rank(-1), k.rank(0)), (1, 2, 1));
        let w = wv(&[1, 1, 1]);
        let k = build_koszul(&w);
        // I = {0,1} is the first size-2 subset; {0} and {1} are the first two size-1 subsets
        assert_eq!(k.terms(-2)[0].label.as_ref().unwrap().subset.as_slice(), &[0, 1]);
        assert_eq!(k.entry(-2, 1, 0), Some(&Polynomial::var(&w, 0)));
        assert_eq!(k.entry(-2, 0, 0), Some(&Polynomial::var(&w, 1).neg()));
        assert!(k.check_d_squared().unwrap().pass);
    }

    #[test]
    fn b_blocks() {
        let w = wv(&[1, 1, 2]);
        let b0 = build_b(&w, 0).unwrap();
        assert_eq!(b0.degrees(), vec![0]);
        assert_eq!(b0.terms(0)[0].twist, 0);
        let b = build_b(&w, -2).unwrap();
        let subsets: Vec<Vec<usize>> = b
            .degrees()
            .iter()
            .rev()
            .flat_map(|&j| b.terms(j).iter().map(|t| t.label.as_ref().unwrap().subset.as_slice().to_vec()))
            .collect();
        assert_eq!(subsets, vec![vec![], vec![0], vec![1], vec![2], vec![0, 1]]);
        assert!(matches!(build_b(&w, -4), Err(Error::Range(_))));
        assert!(matches!(build_b(&w, 1), Err(Error::Range(_))));
        assert_eq!(b0.twist_by(&[5]).unwrap().terms(0)[0].twist, 5);
    }

    #[test]
    fn mu_for_projective_line() {
        let w = wv(&[1, 1]);
        let r0 = build_r(&w, 0).unwrap();
        let mu = build_mu(&w, -1, &r0).unwrap();
        assert_eq!(mu.degrees(), vec![0]);
        assert_eq!(mu.entry(0, 0, 0), Some(&BiPolynomial::left_var(&w, 0, -1)));
        assert_eq!(mu.entry(0, 0, 1), Some(&BiPolynomial::left_var(&w, 1, -1)));
        assert!(mu.is_chain_map().unwrap().pass);
    }

    #[test]
    fn recursion_matches_closed_form() {
        for v in [&[1, 1][..], &[1, 1, 2], &[1, 2, 3]] {
            let w = wv(v);
            let bundle = ResolutionBundle::full(&w).unwrap();
            for k in bundle.lowest()..=0 {
                assert_eq!(bundle.r(k).unwrap(), &closed_form_differential(&w, k).unwrap(), "w={w} k={k}");
            }
        }
    }

    #[test]
    fn resolution_term_counts() {
        let w = wv(&[1, 1, 2, 2, 3]);
        let r = closed_form_differential(&w, 1 - w.total()).unwrap();
        let counts: Vec<usize> = (0..=4).map(|s| r.rank(-s)).collect();
        assert_eq!(counts, vec![9, 36, 54, 36, 9]);
    }

    #[test]
    fn augmentation_cancels() {
        assert!(verify_augmentation(&wv(&[1, 1, 1])).unwrap().pass);
        let w = wv(&[1, 1, 2]);
        let mut r = closed_form_differential(&w, -3).unwrap();
        let (row, col) = r
            .differential(-1)
            .iter()
            .find(|(_, _, e)| e.terms().next().is_some_and(|(l, _, _)| !l.is_one()))
            .map(|(r, c, _)| (r, c))
            .unwrap();
        r.flip_entry_sign(-1, row, col).unwrap();
        assert!(!verify_augmentation_of(&r).pass);
    }

    #[test]
    fn epsilon_is_a_chain_map() {
        for v in [&[1, 1, 1][..], &[1, 1, 2], &[1, 2, 3]] {
            let w = wv(v);
            for m in 1..w.total() {
                let pair = build_mm(&w, m).unwrap();
                assert!(pair.complex.check_d_squared().unwrap().pass);
                assert!(pair.epsilon.is_chain_map().unwrap().pass, "w={w} m={m}");
                assert_eq!(pair.complex.rank(0), 1);
            }
        }
    }

    #[test]
    fn m_range() {
        let w = wv(&[1, 1, 1]);
        assert!(matches!(build_mm(&w, 0), Err(Error::Range(_))));
        assert!(matches!(build_mm(&w, 3), Err(Error::Range(_))));
    }
}
