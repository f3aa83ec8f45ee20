use proptest::prelude::*;
use std::collections::BTreeSet;

use wps_core::beilinson::{build_b, build_koszul, build_mm, closed_form_differential, ResolutionBundle};
use wps_core::complexes::mapping_cone;
use wps_core::graded::IndexSubset;
use wps_core::ktheory::{
    chi_x_twist, euler_gram, mat_mul, mat_pow, operator_matrices, recurrence_coefficients, verify_monodromy_identity,
    zeros, HypersurfaceModel, IntMatrix,
};
use wps_core::sheaf_cohomology::{euler_series, fm1_apply, strand_homology};
use wps_core::{FieldConfig, WeightVector};

fn weights(min_len: usize, max_len: usize, max_weight: u32) -> impl Strategy<Value = WeightVector> {
    prop::collection::vec(1..=max_weight, min_len..=max_len).prop_map(|mut v| {
        v.sort_unstable();
        WeightVector::new(v).unwrap()
    })
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn shift_composes_additively(w in weights(2, 4, 3), a in -3i64..3, b in -3i64..3) {
        let k = build_koszul(&w);
        prop_assert_eq!(k.shift(a + b), k.shift(a).shift(b));
        prop_assert!(k.shift(a).check_d_squared().unwrap().pass);
    }

    #[test]
    fn recursion_equals_closed_form(w in weights(2, 4, 3)) {
        let bundle = ResolutionBundle::full(&w).unwrap();
        for k in bundle.lowest()..=0 {
            let r = bundle.r(k).unwrap();
            prop_assert!(r.check_d_squared().unwrap().pass);
            prop_assert_eq!(r, &closed_form_differential(&w, k).unwrap());
            if k < 0 {
                prop_assert!(bundle.mu(k).unwrap().is_chain_map().unwrap().pass);
            }
        }
    }

    #[test]
    fn cone_labels_are_disjoint_union(w in weights(2, 4, 3), pick in 0usize..100) {
        let bundle = ResolutionBundle::full(&w).unwrap();
        let ks: Vec<i64> = (bundle.lowest()..0).collect();
        prop_assume!(!ks.is_empty());
        let k = ks[pick % ks.len()];
        let mu = bundle.mu(k).unwrap();
        let cone = mapping_cone(mu).unwrap();
        for j in cone.degrees() {
            let got: Vec<_> = cone.labels(j);
            let mut want = mu.source.labels(j + 1);
            want.extend(mu.target.labels(j));
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn resolution_term_counts(w in weights(2, 5, 3)) {
        let r = closed_form_differential(&w, 1 - w.total()).unwrap();
        for size in 0..=w.nvars() {
            let expected: i64 = IndexSubset::all_of_size(w.nvars(), size)
                .iter()
                .map(|s| w.total() - w.subset_weight(s))
                .sum();
            prop_assert_eq!(r.rank(-(size as i64)) as i64, expected);
        }
        prop_assert_eq!(r.rank(0) as i64, w.total());
    }

    #[test]
    fn pushforwards_are_complexes_with_matching_series(w in weights(2, 3, 3), k_off in 0i64..10, e in -2i64..8) {
        let k = -(k_off % w.total());
        let rt = fm1_apply(&closed_form_differential(&w, 1 - w.total()).unwrap(), k).unwrap();
        prop_assert!(rt.check_d_squared().unwrap().pass);
        let strand = strand_homology(&rt, e, FieldConfig::Rationals).unwrap();
        prop_assert_eq!(strand.euler_characteristic(), euler_series(&rt).coefficient(&w, e));
        prop_assert_eq!(strand.homology_euler_characteristic(), strand.euler_characteristic());
    }

    #[test]
    fn koszul_strands_are_exact(w in weights(2, 4, 3), t in 1i64..12) {
        let s = strand_homology(&build_koszul(&w), t, FieldConfig::Rationals).unwrap();
        prop_assert!(s.is_acyclic());
    }

    #[test]
    fn b_blocks_have_delta_cohomology(w in weights(2, 3, 3), k_off in 0i64..10, l_off in 0i64..10) {
        let k = -(k_off % w.total());
        let l = -(l_off % w.total());
        let c = build_b(&w, l).unwrap().twist_by(&[k]).unwrap();
        let h = strand_homology(&c, 0, FieldConfig::Rationals).unwrap().homology;
        let expected: Vec<(i64, usize)> = if k == l { vec![(0, 1)] } else { vec![] };
        prop_assert_eq!(h.into_iter().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn epsilon_is_chain_map(w in weights(3, 3, 3), m_off in 0i64..10) {
        let m = 1 + m_off % (w.total() - 1);
        let pair = build_mm(&w, m).unwrap();
        prop_assert!(pair.epsilon.is_chain_map().unwrap().pass);
        prop_assert_eq!(pair.complex.rank(0), 1);
    }
}

fn cy(w: &WeightVector) -> HypersurfaceModel {
    HypersurfaceModel::calabi_yau(w).unwrap()
}

fn rank_of(m: &IntMatrix) -> usize {
    // over Q via fraction-free elimination on a copy
    let mut a: Vec<Vec<i128>> = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            let (x, y) = (a[i][c], a[r][c]);
            for t in 0..cols {
                a[i][t] = a[i][t] * y - a[r][t] * x;
            }
        }
        r += 1;
    }
    r
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn chi_serre_symmetry(w in weights(3, 5, 3)) {
        let m = cy(&w);
        let sign = if (w.n() - 1) % 2 == 0 { 1 } else { -1 };
        for i in -2 * w.total()..=2 * w.total() {
            prop_assert_eq!(chi_x_twist(&m, i), sign * chi_x_twist(&m, -i));
        }
    }

    #[test]
    fn euler_gram_is_translation_invariant(w in weights(3, 5, 3), d_off in 0i64..20) {
        let d = 1 + d_off % w.total();
        let g = euler_gram(&HypersurfaceModel::new(&w, d).unwrap());
        let r = g.len();
        for a in 1..r {
            for b in 1..r {
                prop_assert_eq!(g[a][b], g[a - 1][b - 1]);
            }
        }
    }

    #[test]
    fn l_satisfies_its_recurrence(w in weights(2, 5, 3)) {
        let m = HypersurfaceModel::new_allowing_points(&w, w.total()).unwrap();
        let l = operator_matrices(&m).unwrap().l;
        let c = recurrence_coefficients(&w);
        let r = l.len();
        let mut acc = zeros(r, r);
        for (d, &cd) in c.iter().enumerate() {
            let p = mat_pow(&l, (w.total() - d as i64) as u32).unwrap();
            for i in 0..r {
                for j in 0..r {
                    acc[i][j] += cd as i128 * p[i][j];
                }
            }
        }
        prop_assert_eq!(acc, zeros(r, r));
    }

    #[test]
    fn k_is_a_transvection(w in weights(3, 5, 3), d_off in 0i64..20) {
        let d = 1 + d_off % w.total();
        let model = HypersurfaceModel::new(&w, d).unwrap();
        let k = operator_matrices(&model).unwrap().k;
        let mut diff = k.clone();
        for (i, row) in diff.iter_mut().enumerate() {
            row[i] -= 1;
        }
        prop_assert!(rank_of(&diff) <= 1);
        // K e_0 = (1 - χ(O_X)) e_0, and χ(O_X) = 0 for odd-dimensional Calabi-Yau X
        let chi0 = chi_x_twist(&model, 0) as i128;
        let mut expected = vec![0i128; k.len()];
        expected[0] = 1 - chi0;
        prop_assert_eq!(k.iter().map(|r| r[0]).collect::<Vec<_>>(), expected);
        if model.is_calabi_yau() && (w.n() - 1) % 2 == 1 {
            prop_assert_eq!(chi0, 0);
        }
    }

    #[test]
    fn monodromy_holds_and_mutant_fails(w in weights(3, 5, 3)) {
        let m = cy(&w);
        prop_assert!(verify_monodromy_identity(&m).unwrap().pass);
        prop_assert!(!verify_monodromy_identity(&m.clone().with_chi0_override(1)).unwrap().pass);
        let ops = operator_matrices(&m).unwrap();
        prop_assert_eq!(mat_mul(&ops.l, &ops.k).unwrap(), ops.g);
    }
}

#[test]
fn distinct_labels_in_resolution() {
    let w = WeightVector::new(vec![1, 1, 2, 2, 3]).unwrap();
    let r = closed_form_differential(&w, 1 - w.total()).unwrap();
    for j in r.degrees() {
        let labels: BTreeSet<_> = r.labels(j).into_iter().collect();
        assert_eq!(labels.len(), r.rank(j));
    }
}
