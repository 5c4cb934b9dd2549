mod common;

use common::*;
use polydomain::coefficients::{binomial, PolydomainSpec};
use polydomain::defect::{defect_map, delta_ineq, iterated_defect, membership, membership_unchecked, phi, wold_split};
use polydomain::ensemble::{generate_random_member, Purity};
use polydomain::fock::{compress, vacuum_projection, FockModel};
use polydomain::linalg::{block_diag, herm_norm, identity, min_eig, op_norm, random_gaussian, random_unitary};
use polydomain::scalar::c64;
use polydomain::tuple::{tensor_tuple, OperatorTuple};
use polydomain::words::enumerate_words;
use proptest::prelude::*;

fn degrees_for(spec: &PolydomainSpec<f64>, extra: usize) -> Vec<usize> {
    let reserve = spec.reserve(spec.m.iter().sum());
    spec.n.iter().map(|&n| reserve + if n == 1 { extra + 2 } else { extra }).collect()
}

#[test]
fn universal_defect_identity() {
    for spec in spec_catalogue() {
        let d = degrees_for(&spec, 2);
        let md = FockModel::new(&spec, &d).unwrap();
        let w = md.as_tuple();
        let delta = defect_map(&w, &identity(md.dim()), &spec.m);
        let pc = vacuum_projection::<f64>(&md.basis).matrix;
        let rows = md.basis.interior_indices(spec.reserve(spec.m.iter().sum()));
        assert!(op_norm(&compress(&(delta - pc), &rows, &rows)) <= 1e-10, "{spec:?}");
    }
}

#[test]
fn universal_model_is_pure() {
    for spec in spec_catalogue() {
        let d = degrees_for(&spec, 1);
        let md = FockModel::new(&spec, &d).unwrap();
        let w = md.as_tuple();
        for i in 0..spec.k() {
            let rows = md.basis.interior_indices(1);
            let limit = d[i] - 1;
            let mut y = identity::<f64>(md.dim());
            let mut prev = f64::INFINITY;
            for _ in 0..=limit {
                y = phi(&w, i, &y);
                let n = op_norm(&compress(&y, &rows, &rows));
                assert!(n <= prev + 1e-12);
                prev = n;
            }
            assert!(prev <= 1e-14, "{spec:?} group {i}: {prev}");
        }
    }
}

#[test]
fn word_shifts_have_orthogonal_ranges() {
    for spec in spec_catalogue().into_iter().filter(|s| s.k() == 1 && s.n[0] == 2) {
        let md = FockModel::new(&spec, &[4]).unwrap();
        for p in 1..=3 {
            let words: Vec<_> = enumerate_words(2, p).into_iter().filter(|w| w.len() == p).collect();
            let ops: Vec<_> = words
                .iter()
                .map(|w| md.word_shift(&polydomain::MultiWord(vec![w.clone()])).to_dense())
                .collect();
            for (a, x) in ops.iter().enumerate() {
                for (b, y) in ops.iter().enumerate() {
                    if a != b {
                        assert!(op_norm(&x.ad_mul(y)) <= 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn weighted_row_bound() {
    for spec in spec_catalogue().into_iter().filter(|s| s.k() == 1) {
        let d = 5;
        let md = FockModel::new(&spec, &[d]).unwrap();
        let b = &md.b[0];
        let n = spec.n[0];
        for p in 1..=3 {
            let mut sum = polydomain::linalg::zeros::<f64>(md.dim(), md.dim());
            for (idx, w) in enumerate_words(n, p).iter().enumerate() {
                if w.len() != p {
                    continue;
                }
                let op = md.word_shift(&polydomain::MultiWord(vec![w.clone()])).to_dense();
                sum += &op * op.adjoint() * c64(b[idx], 0.0);
            }
            let rows = md.basis.interior_indices(p);
            let c = binomial::<f64>(p + spec.m[0] - 1, spec.m[0] - 1);
            let gap = identity::<f64>(rows.len()) * c64(c, 0.0) - compress(&sum, &rows, &rows);
            assert!(min_eig(&gap) >= -1e-12, "{spec:?} p={p}");
        }
    }
}

/// Cross-commuting tuple with independent Gaussian factors, one scale per group.
fn random_tuple(spec: &PolydomainSpec<f64>, seed: u64, scales: &[f64]) -> OperatorTuple<f64> {
    let mut g = rng(seed);
    let dims: Vec<usize> = if spec.k() == 1 { vec![3] } else { vec![2, 2] };
    let factors: Vec<Vec<_>> = (0..spec.k())
        .map(|i| (0..spec.n[i]).map(|_| random_gaussian::<f64, _>(&mut g, dims[i], dims[i]) * c64(scales[i], 0.0)).collect())
        .collect();
    let t = tensor_tuple(spec.clone(), &factors).unwrap();
    t.conjugated(&random_unitary(&mut g, t.dim))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn membership_definitions_agree(seed in any::<u64>(), which in 0usize..9, s1 in 0.05f64..0.6, s2 in 0.05f64..0.6) {
        let spec = &spec_catalogue()[which];
        let t = random_tuple(spec, seed, &[s1, s2]);
        let c = membership(&t, 1e-9, None).unwrap();
        prop_assert!(c.checks["definitions_agree"]);
        if c.verdict {
            let (ok, worst) = delta_ineq(&t, 1e-9);
            prop_assert!(ok, "{}", worst);
        }
    }

    #[test]
    fn iterated_defect_is_monotone(seed in any::<u64>(), which in 0usize..9) {
        let spec = &spec_catalogue()[which];
        let t = generate_random_member(spec, 4, Purity::Boundary, seed).unwrap();
        let k = spec.k();
        let eye = identity::<f64>(t.dim);
        for base in [1usize, 2, 4] {
            let qs = vec![base; k];
            let cur = iterated_defect(&t, &qs);
            prop_assert!(min_eig(&(&eye - &cur)) >= -1e-9);
            for i in 0..k {
                let mut next = qs.clone();
                next[i] += 1;
                let grown = iterated_defect(&t, &next);
                prop_assert!(min_eig(&(grown - &cur)) >= -1e-9);
            }
        }
    }

    #[test]
    fn pure_members_keep_lower_defects(seed in any::<u64>(), which in 0usize..9) {
        let spec = &spec_catalogue()[which];
        let t = generate_random_member(spec, 4, Purity::Pure, seed).unwrap();
        let c = membership_unchecked(&t, 1e-9);
        prop_assert!(c.verdict);
        prop_assert!(c.witnesses.values().all(|w| w.min_eig >= -1e-9));
    }

    #[test]
    fn wold_split_of_block_tuples(seed in any::<u64>(), which in 0usize..9, phase in 0.0f64..6.28) {
        let spec = &spec_catalogue()[which];
        let pure = generate_random_member(spec, 3, Purity::Pure, seed).unwrap();
        let u = scalar_coisometry(spec, phase);
        let t = u.direct_sum(&pure);
        let ws = wold_split(&t, 1e-9).unwrap();
        let expect = block_diag(&polydomain::linalg::zeros(u.dim, u.dim), &identity(pure.dim));
        prop_assert!(dist(&ws.p0, &expect) <= 1e-8);
        prop_assert!(ws.invariance_residual <= 1e-8 && ws.reducing_residual <= 1e-8);
        prop_assert!(herm_norm(&(&ws.p0 + &ws.p1 - identity::<f64>(t.dim))) <= 1e-12);
    }
}

/// One-dimensional tuple with `Phi_i(1) = 1` for every group.
fn scalar_coisometry(spec: &PolydomainSpec<f64>, phase: f64) -> OperatorTuple<f64> {
    let vals: Vec<Vec<_>> = (0..spec.k())
        .map(|i| {
            let total: f64 = spec.q[i].support().filter(|(w, _)| w.len() == 1).map(|(_, &a)| a).sum();
            let higher: Vec<_> = spec.q[i].support().filter(|(w, _)| w.len() > 1).collect();
            let z = if higher.is_empty() {
                (1.0 / total).sqrt()
            } else {
                // a x + b x^2 = 1 with x = |z|^2.
                let a = total;
                let b: f64 = higher.iter().map(|(_, &c)| c).sum();
                (((a * a + 4.0 * b).sqrt() - a) / (2.0 * b)).sqrt()
            };
            (0..spec.n[i]).map(|_| c64(z * phase.cos(), z * phase.sin())).collect()
        })
        .collect();
    let ops = vals.into_iter().map(|g| g.into_iter().map(|c| polydomain::CMat::from_element(1, 1, c)).collect()).collect();
    OperatorTuple::new(spec.clone(), ops).unwrap()
}
