use std::collections::BTreeMap;

use lyubeznik::combinatorics::{SquareFreeIdeal, VarSet};
use lyubeznik::invariants::{chi_inclusion_exclusion, lyubeznik_table, single_lyubeznik_numbers};
use lyubeznik::linalg::{ExactMatrix, FieldSpec, PrimeField, Rationals};
use lyubeznik::oracle::{
    all_ideals, compare_with_skeleton, corner, exhaustive_sweep, iterated_check, negative_set, one_determined_check, window_cech,
    window_cohomology_dims, window_iterated, OracleViolation, WindowModule,
};
use lyubeznik::sqmod::{cech_cohomology, ModuleSkeleton};

fn ideal(n: usize, gens: &[&[usize]]) -> SquareFreeIdeal {
    let gens: Vec<Vec<usize>> = gens.iter().map(|g| g.to_vec()).collect();
    SquareFreeIdeal::from_one_based(n, &gens).unwrap()
}

fn window_length(i: &SquareFreeIdeal, j: usize, bound: i32) -> usize {
    let s = WindowModule::polynomial_ring(&Rationals, i.n(), bound).unwrap();
    window_cech(&s, i.generators(), j).unwrap().square_free_length()
}

fn window_table_entry(i: &SquareFreeIdeal, a: usize, b: usize) -> usize {
    let n = i.n();
    let m = SquareFreeIdeal::maximal(n).unwrap();
    let steps = vec![(i.clone(), n - b), (m, a)];
    window_iterated(&steps, 2, &Rationals).unwrap().unwrap().square_free_length()
}

#[test]
fn single_variable_torsion() {
    let dims = window_cohomology_dims(&ideal(1, &[&[1]]), 1, 2, &Rationals).unwrap();
    for (beta, d) in dims {
        assert_eq!(d, usize::from(beta[0] < 0), "{beta:?}");
    }
}

#[test]
fn two_points_first_cohomology() {
    let i = ideal(2, &[&[1, 2]]);
    let dims = window_cohomology_dims(&i, 1, 2, &Rationals).unwrap();
    for (beta, d) in &dims {
        assert_eq!(*d, usize::from(beta.iter().any(|&v| v < 0)), "{beta:?}");
    }
    let skeleton = cech_cohomology(&ModuleSkeleton::unit(&Rationals, 2).unwrap(), &i, 1).unwrap();
    assert_eq!(compare_with_skeleton(&dims, &skeleton), Ok(()));
}

#[test]
fn top_cohomology_of_the_plane() {
    let m = SquareFreeIdeal::maximal(2).unwrap();
    let dims = window_cohomology_dims(&m, 2, 2, &Rationals).unwrap();
    for (beta, d) in dims {
        assert_eq!(d, usize::from(beta.iter().all(|&v| v <= -1)), "{beta:?}");
    }
}

#[test]
fn localization_pieces() {
    // Čech on the single generator x^G: slot 0 is S, slot 1 is S_{x^G}.
    let n = 3;
    for g in VarSet::full(n).subsets().filter(|g| !g.is_empty()) {
        let s = WindowModule::polynomial_ring(&Rationals, n, 2).unwrap();
        let gens = [g];
        let h0 = window_cech(&s, &gens, 0).unwrap();
        let h1 = window_cech(&s, &gens, 1).unwrap();
        for (beta, d1) in h1.dims() {
            let neg = negative_set(beta);
            // S_{x^G} / S: pieces with neg β ⊆ G, minus those of S itself.
            let expected = usize::from(neg.is_subset(g) && !neg.is_empty());
            assert_eq!(*d1, expected, "{beta:?}");
            assert_eq!(h0.dim(beta), 0);
        }
    }
}

#[test]
fn face_complement_primes_agree() {
    let n = 4;
    for vars in VarSet::full(n).subsets().filter(|v| !v.is_empty()) {
        let p = SquareFreeIdeal::prime(n, vars).unwrap();
        for j in 0..=n {
            assert_eq!(window_length(&p, j, 2), usize::from(j == vars.len()));
        }
    }
}

#[test]
fn alternating_sums_match_inclusion_exclusion() {
    // Per degree, Σ_j (-1)^j dim H^j_I(S)_β = Σ_T (-1)^|T| [neg β ⊆ G_T].
    for i in all_ideals(3, 3).unwrap() {
        let gens = i.generators().to_vec();
        let per_j: Vec<BTreeMap<Vec<i32>, usize>> = (0..=gens.len())
            .map(|j| window_cohomology_dims(&i, j, 1, &Rationals).unwrap())
            .collect();
        for beta in per_j[0].keys() {
            let neg = negative_set(beta);
            let lhs: i64 = per_j
                .iter()
                .enumerate()
                .map(|(j, d)| if j % 2 == 0 { 1 } else { -1 } * d[beta] as i64)
                .sum();
            let rhs: i64 = (0u32..1 << gens.len())
                .filter(|t| {
                    let g = (0..gens.len())
                        .filter(|k| t >> k & 1 == 1)
                        .fold(VarSet::EMPTY, |acc, k| acc.union(gens[k]));
                    neg.is_subset(g)
                })
                .map(|t| if t.count_ones() % 2 == 0 { 1 } else { -1 })
                .sum();
            assert_eq!(lhs, rhs, "{i:?} at {beta:?}");
        }
        if i.is_proper() && !i.is_zero() {
            // Summed over the square-free corners this is the characteristic.
            let n = i.n();
            let chi: i64 = (0..=n)
                .map(|j| {
                    let len: usize = VarSet::full(n)
                        .subsets()
                        .map(|f| per_j.get(j).map_or(0, |d| d[&corner(n, f)]))
                        .sum();
                    let sign = if (n - j) % 2 == 0 { 1 } else { -1 };
                    sign * len as i64
                })
                .sum();
            let d = i.quotient_dim().unwrap();
            let expected: i64 = single_lyubeznik_numbers(&i, FieldSpec::Rationals)
                .unwrap()
                .iter()
                .take(d + 1)
                .enumerate()
                .map(|(k, &l)| if k % 2 == 0 { l as i64 } else { -(l as i64) })
                .sum();
            assert_eq!(expected, chi_inclusion_exclusion(&i).unwrap());
            // Lengths above the dimension vanish, so the full sum agrees.
            assert_eq!(chi, expected, "{i:?}");
        }
    }
}

#[test]
fn exhaustive_sweep_up_to_three_variables() {
    let f2 = PrimeField::new(2).unwrap();
    for n in 1..=3 {
        for i in all_ideals(n, 4).unwrap() {
            for j in 0..=4 {
                assert_eq!(one_determined_check(&i, j, 2, &Rationals).unwrap(), Ok(()), "{i:?} j = {j}");
                assert_eq!(one_determined_check(&i, j, 2, &f2).unwrap(), Ok(()), "{i:?} j = {j}");
            }
        }
    }
}

#[test]
fn sweep_driver_counts() {
    let report = exhaustive_sweep(2, 4, 2, 2, 2, &Rationals).unwrap();
    assert!(report.ok(), "{:?}", report.failures);
    // 3 + 6 ideals, three values of j each.
    assert_eq!(report.single_checks, 27);
    assert!(report.iterated_checks > 0);
}

#[test]
fn iterated_against_maximal_ideal() {
    for n in 1..=2 {
        let m = SquareFreeIdeal::maximal(n).unwrap();
        for i in all_ideals(n, 4).unwrap() {
            for j in 0..=n {
                for a in 0..=n {
                    let steps = vec![(i.clone(), j), (m.clone(), a)];
                    assert_eq!(iterated_check(&steps, 2, &Rationals).unwrap(), Ok(()), "{i:?} {j} {a}");
                }
            }
        }
    }
}

#[test]
fn corrupted_skeleton_is_caught() {
    let i = ideal(2, &[&[1, 2]]);
    let dims = window_cohomology_dims(&i, 1, 2, &Rationals).unwrap();
    let good = cech_cohomology(&ModuleSkeleton::unit(&Rationals, 2).unwrap(), &i, 1).unwrap();
    let mut bad_dims = good.graded_dims().clone();
    bad_dims.insert(VarSet::from_indices([0, 1]), 2);
    let q = Rationals;
    let drops = [
        ((VarSet::from_indices([0, 1]), 0), ExactMatrix::zeros(&q, 1, 2)),
        ((VarSet::from_indices([0, 1]), 1), ExactMatrix::zeros(&q, 1, 2)),
    ]
    .into_iter()
    .collect();
    let bad = ModuleSkeleton::from_parts(&q, 2, bad_dims, drops).unwrap();
    match compare_with_skeleton(&dims, &bad) {
        Err(OracleViolation::SkeletonMismatch { degree, window, skeleton }) => {
            assert_eq!(negative_set(&degree), VarSet::from_indices([0, 1]));
            assert_eq!((window, skeleton), (1, 2));
        }
        other => panic!("expected a mismatch, got {other:?}"),
    }
}

#[test]
fn derived_lyubeznik_values() {
    // Two points in the plane.
    let two = ideal(2, &[&[1, 2]]);
    assert_eq!(window_length(&two, 1, 2), 3);
    let engine = lyubeznik_table(&two, FieldSpec::Rationals).unwrap();
    for a in 0..=1 {
        for b in 0..=1 {
            assert_eq!(window_table_entry(&two, a, b), engine.get(a, b), "λ_{a},{b}");
        }
    }
    assert_eq!(engine.entries, vec![vec![0, 0], vec![0, 1]]);

    // Face-complement primes have the trivial table.
    let p = ideal(3, &[&[1], &[3]]);
    let d = p.quotient_dim().unwrap();
    for a in 0..=d {
        for b in 0..=d {
            assert_eq!(window_table_entry(&p, a, b), usize::from(a == d && b == d));
        }
    }

    // Two planes in k^4 meeting at the origin.
    let fixture = ideal(4, &[&[1, 3], &[1, 4], &[2, 3], &[2, 4]]);
    let lambdas = single_lyubeznik_numbers(&fixture, FieldSpec::Rationals).unwrap();
    for (k, &l) in lambdas.iter().enumerate() {
        assert_eq!(window_length(&fixture, fixture.n() - k, 1), l, "λ^{k}");
    }
}

#[test]
fn example_characteristic_on_the_window() {
    let i = ideal(5, &[&[1, 3], &[1, 4], &[2, 3], &[2, 4], &[2, 5]]);
    let lambdas: Vec<usize> = (0..=5).map(|k| window_length(&i, 5 - k, 1)).collect();
    let d = i.quotient_dim().unwrap();
    let chi: i64 = lambdas
        .iter()
        .take(d + 1)
        .enumerate()
        .map(|(k, &l)| if k % 2 == 0 { l as i64 } else { -(l as i64) })
        .sum();
    assert_eq!(chi, 3);
}
