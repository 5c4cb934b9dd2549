mod common;

use common::*;
use polydomain::berezin::{
    berezin_kernel, berezin_transform, cesaro, eval_series, hardy_norm_estimate, radius_check, von_neumann_check,
    FreeSeries,
};
use polydomain::charfn::{admits_charfn, char_function, model_space, pure_dilation, pure_iff_inner, coincide_under_unitary};
use polydomain::coefficients::{b_coeff, b_table, validate, PolydomainSpec, PositiveRegularPoly};
use polydomain::defect::{
    defect_map, exemp_battery, is_cnc, is_pure, membership, phi_map, radial_scan, wold_split, default_r_grid, Verdict,
};
use polydomain::factorization::{
    beurling_condition, beurling_factorize, invariant_subspace_tests, reducing_characterize, support, FactorizeOptions,
    MultiAnalyticOp,
};
use polydomain::fock::{build_basis, interior_projection, vacuum_projection, weighted_left_shift, weighted_right_shift, word_operator, FockModel};
use polydomain::linalg::{identity, kron, op_norm, random_gaussian, random_unitary, zeros};
use polydomain::scalar::c64;
use polydomain::tuple::OperatorTuple;
use polydomain::words::{enumerate_words, factorizations, reverse};
use polydomain::{MultiWord, Word};

fn w(v: &[usize]) -> Word {
    Word::new(v.to_vec())
}

fn scalar(spec: PolydomainSpec<f64>, vals: &[(f64, f64)]) -> OperatorTuple<f64> {
    OperatorTuple::scalars(spec, vals.iter().map(|&(a, b)| vec![c64(a, b)]).collect()).unwrap()
}

fn disc(m: usize) -> PolydomainSpec<f64> {
    PolydomainSpec::<f64>::rows(vec![1], vec![m])
}

#[test]
fn word_enumeration() {
    assert_eq!(enumerate_words(1, 3), vec![w(&[]), w(&[1]), w(&[1, 1]), w(&[1, 1, 1])]);
    assert_eq!(enumerate_words(2, 1), vec![w(&[]), w(&[1]), w(&[2])]);
    assert_eq!(enumerate_words(2, 2).len(), 7);
    assert_eq!(reverse(&w(&[])), w(&[]));
    assert_eq!(reverse(&w(&[1, 2])), w(&[2, 1]));
    assert_eq!(factorizations(&w(&[1, 2]), 2), vec![vec![w(&[1]), w(&[2])]]);
    assert_eq!(factorizations(&w(&[1, 1, 1]), 2).len(), 2);
    assert!(factorizations(&w(&[1]), 2).is_empty());
}

#[test]
fn polynomial_validation() {
    assert!(validate(&PolydomainSpec::<f64>::rows(vec![2], vec![1])).valid);
    let constant = PositiveRegularPoly::from_terms(1, [(w(&[]), 0.5), (w(&[1]), 1.0)]);
    assert!(!validate(&PolydomainSpec::new(vec![1], vec![1], vec![constant])).valid);
    let q = PositiveRegularPoly::from_terms(2, [(w(&[1]), 2.0), (w(&[2]), 1.0), (w(&[1, 2]), 1.0)]);
    assert!(validate(&PolydomainSpec::new(vec![2], vec![1], vec![q])).valid);
}

#[test]
fn b_coefficients() {
    let z = PositiveRegularPoly::<f64>::row(1);
    for j in 0..6 {
        let a = w(&vec![1; j]);
        assert_eq!(b_coeff(&z, 1, &a), 1.0);
        assert_eq!(b_coeff(&z, 2, &a), (j + 1) as f64);
    }
    assert_eq!(b_coeff(&weighted_row(), 1, &w(&[1, 2])), 2.0);
    for a in enumerate_words(2, 2).into_iter().filter(|a| a.len() == 2) {
        assert_eq!(b_coeff(&row(2), 2, &a), 3.0);
    }
    assert!(b_table(&z, 1, 4).values.iter().all(|&v| v == 1.0));
    assert!(b_table(&row(2), 1, 3).values.iter().all(|&v| v == 1.0));
    assert_eq!(b_table(&z, 3, 3).values, vec![1.0, 3.0, 6.0, 10.0]);
}

#[test]
fn bases_and_shifts() {
    assert_eq!(build_basis(&disc(1), &[3]).unwrap().dim, 4);
    assert_eq!(build_basis(&PolydomainSpec::<f64>::rows(vec![2, 1], vec![1, 1]), &[2, 2]).unwrap().dim, 21);
    assert_eq!(build_basis(&PolydomainSpec::<f64>::rows(vec![2], vec![1]), &[0]).unwrap().dim, 1);
    assert!(build_basis(&PolydomainSpec::<f64>::rows(vec![3], vec![1]), &[12]).is_err());

    let md = FockModel::new(&disc(2), &[6]).unwrap();
    let wm = weighted_left_shift(&md, 0, 0).unwrap().matrix;
    for j in 0..6 {
        assert!((wm[(j + 1, j)].re - (((j + 1) as f64) / ((j + 2) as f64)).sqrt()).abs() < 1e-15);
    }
    assert!(wm.column(6).iter().all(|z| z.norm() == 0.0));
    let lam = weighted_right_shift(&md, 0, 0).unwrap().matrix;
    assert_eq!(lam, wm);

    let md2 = FockModel::<f64>::new(&PolydomainSpec::rows(vec![2], vec![1]), &[3]).unwrap();
    let l11 = weighted_right_shift(&md2, 0, 0).unwrap().matrix;
    let from = md2.basis.index_of(&MultiWord(vec![w(&[2])])).unwrap();
    let to = md2.basis.index_of(&MultiWord(vec![w(&[2, 1])])).unwrap();
    assert!((l11[(to, from)].re - 1.0).abs() < 1e-15);

    let md3 = FockModel::new(&PolydomainSpec::<f64>::rows(vec![2, 1], vec![2, 1]), &[3, 3]).unwrap();
    let rows = md3.basis.interior_indices(1);
    for i in 0..2 {
        for j in 0..md3.spec.n[i] {
            let a = weighted_left_shift(&md3, i, j).unwrap().matrix;
            for i2 in 0..2 {
                for j2 in 0..md3.spec.n[i2] {
                    let b = weighted_right_shift(&md3, i2, j2).unwrap().matrix;
                    let c = &a * &b - &b * &a;
                    let cc = polydomain::fock::compress(&c, &rows, &rows);
                    assert!(op_norm(&cc) < 1e-12);
                }
            }
        }
    }
}

#[test]
fn projections_and_word_operators() {
    let md = FockModel::new(&disc(1), &[4]).unwrap();
    let p = vacuum_projection::<f64>(&md.basis).matrix;
    assert!(op_norm(&(&p * &p - &p)) < 1e-14 && op_norm(&(&p - p.adjoint())) < 1e-14);
    assert_eq!(p[(1, 1)].re, 0.0);
    assert_eq!(interior_projection::<f64>(&md.basis, 0).matrix, identity(md.dim()));
    assert_eq!(interior_projection::<f64>(&md.basis, 4).matrix, p);
    let md2 = FockModel::new(&PolydomainSpec::<f64>::rows(vec![2, 1], vec![1, 1]), &[3, 2]).unwrap();
    let ip = interior_projection::<f64>(&md2.basis, 1).matrix;
    let rank: f64 = (0..md2.dim()).map(|i| ip[(i, i)].re).sum();
    assert_eq!(rank as usize, 7 * 2);

    assert_eq!(word_operator(&md, &MultiWord(vec![w(&[])])).unwrap().matrix, identity(md.dim()));
    let w2 = word_operator(&md, &MultiWord(vec![w(&[1, 1])])).unwrap().matrix;
    assert!((w2[(2, 0)].re - 1.0).abs() < 1e-15);
    let md_m2 = FockModel::new(&disc(2), &[4]).unwrap();
    let w2 = word_operator(&md_m2, &MultiWord(vec![w(&[1, 1])])).unwrap().matrix;
    assert!((w2[(2, 0)].re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn positive_maps_and_defects() {
    let z = PositiveRegularPoly::<f64>::row(1);
    let one = identity::<f64>(1);
    let t = polydomain::CMat::from_element(1, 1, c64(0.3, 0.0));
    assert!((phi_map(&z, &[t], &one).unwrap()[(0, 0)].re - 0.09).abs() < 1e-15);
    assert_eq!(phi_map(&z, &[zeros(1, 1)], &one).unwrap()[(0, 0)].re, 0.0);
    let q2 = PositiveRegularPoly::linear(vec![2.0]);
    let h = polydomain::CMat::from_element(1, 1, c64(0.5, 0.0));
    assert!((phi_map(&q2, &[h], &one).unwrap()[(0, 0)].re - 0.5).abs() < 1e-15);

    let s = scalar(disc(2), &[(0.6, 0.0)]);
    assert!((defect_map(&s, &one, &[2])[(0, 0)].re - 0.64f64.powi(2)).abs() < 1e-14);
    let bi = scalar(PolydomainSpec::<f64>::rows(vec![1, 1], vec![1, 1]), &[(0.5, 0.0), (0.0, -0.3)]);
    assert!((defect_map(&bi, &one, &[1, 1])[(0, 0)].re - 0.75 * 0.91).abs() < 1e-14);
    assert!(membership(&bi, 1e-9, None).unwrap().verdict);
    let bad = scalar(PolydomainSpec::<f64>::rows(vec![1, 1], vec![1, 1]), &[(1.2, 0.0), (0.0, 0.0)]);
    let c = membership(&bad, 1e-9, None).unwrap();
    assert!(!c.verdict);
    assert!((c.witnesses["I-phi_1(I)"].min_eig + 0.44).abs() < 1e-12);
    for m in 1..=3 {
        let u = scalar(disc(m), &[(0.6, 0.8)]);
        assert!(membership(&u, 1e-9, None).unwrap().verdict);
        assert!(!is_pure(&u, 1e-9, 100).pure);
        let ex = exemp_battery(&u, 1e-9);
        assert!(ex.delta_m_zero && ex.delta_ones_zero);
    }
}

#[test]
fn purity_cnc_and_radial() {
    let lam = scalar(disc(1), &[(0.5, 0.0)]);
    let trace = &is_pure(&lam, 1e-9, 200).traces[0];
    for (p, v) in trace.iter().enumerate() {
        assert!((v - 0.25f64.powi(p as i32 + 1)).abs() < 1e-15);
    }
    let nil = OperatorTuple::new(disc(1), vec![vec![polydomain::CMat::from_fn(3, 3, |r, c| c64(if r == c + 1 { 1.0 } else { 0.0 }, 0.0))]]).unwrap();
    assert!(is_pure(&nil, 1e-12, 3).pure);

    let (v, g) = is_cnc(&lam, &[10], 1e-9).unwrap();
    assert_eq!(v, Verdict::True);
    assert!((g - (1.0 - 0.25f64.powi(11))).abs() < 1e-12);
    let one = scalar(disc(1), &[(1.0, 0.0)]);
    assert_eq!(is_cnc(&one, &[10], 1e-9).unwrap().0, Verdict::NotCertified);
    let sum = lam.direct_sum(&one);
    assert_eq!(is_cnc(&sum, &[10], 1e-9).unwrap().0, Verdict::NotCertified);

    let t = polydomain::ensemble::generate_random_member(&PolydomainSpec::<f64>::rows(vec![2], vec![2]), 4, polydomain::ensemble::Purity::Boundary, 3).unwrap();
    for (_, c) in radial_scan(&t, &default_r_grid(), 1e-9) {
        assert!(c.verdict);
    }
}

#[test]
fn wold_examples() {
    let u = scalar(disc(1), &[(0.0, 1.0)]);
    assert_eq!(wold_split(&u, 1e-9).unwrap().rank, 0);
    let lam = scalar(disc(1), &[(0.5, 0.0)]);
    assert_eq!(wold_split(&lam, 1e-9).unwrap().rank, 1);
    let ws = wold_split(&u.direct_sum(&lam), 1e-9).unwrap();
    assert!((ws.p0[(1, 1)].re - 1.0).abs() < 1e-12 && ws.p0[(0, 0)].norm() < 1e-12);
}

#[test]
fn exemp_examples() {
    let spec = PolydomainSpec::<f64>::rows(vec![1, 1], vec![1, 1]);
    let s = polydomain::CMat::from_fn(2, 2, |r, c| c64(if r == 0 && c == 1 { 0.9 } else { 0.0 }, 0.0));
    let t = polydomain::CMat::from_fn(2, 2, |r, c| c64(if r == c { 0.4 } else { 0.3 }, 0.0));
    let i2 = identity::<f64>(2);
    let tup = OperatorTuple::new(spec, vec![vec![kron(&s, &i2)], vec![kron(&i2, &t)]]).unwrap();
    let ex = exemp_battery(&tup, 1e-9);
    assert!(ex.sufficient_doubly_commuting && ex.member);

    let spec = PolydomainSpec::<f64>::rows(vec![2], vec![2]);
    let mut rng = rng(5);
    let g = [random_gaussian::<f64, _>(&mut rng, 3, 3), random_gaussian(&mut rng, 3, 3)];
    let raw = OperatorTuple::new(spec, vec![g.to_vec()]).unwrap();
    let n = op_norm(&polydomain::defect::phi(&raw, 0, &identity(3)));
    let tup = raw.scaled((0.45 / n).sqrt());
    let ex = exemp_battery(&tup, 1e-9);
    assert!(ex.sufficient_sum && ex.member && ex.consistent);
}

#[test]
fn berezin_examples() {
    let zero = scalar(disc(1), &[(0.0, 0.0)]);
    let k = berezin_kernel(&zero, &[6], 1e-9).unwrap();
    assert!((k.matrix[(0, 0)].re - 1.0).abs() < 1e-15);
    assert!(k.matrix.rows(1, 6).iter().all(|z| z.norm() == 0.0));

    let l = 0.6;
    let d = 20;
    let k = berezin_kernel(&scalar(disc(1), &[(0.0, l)]), &[d], 1e-9).unwrap();
    let root = (1.0 - l * l).sqrt();
    for j in 0..=d {
        let expect = c64::<f64>(0.0, -l).powu(j as u32) * root;
        assert!((k.matrix[(j, 0)] - expect).norm() < 1e-14);
    }
    assert!((k.gram()[(0, 0)].re - (1.0 - l.powi(2 * (d as i32 + 1)))).abs() < 1e-14);

    let lam = scalar(disc(1), &[(0.3, 0.0)]);
    let k = berezin_kernel(&lam, &[30], 1e-9).unwrap();
    let b = berezin_transform(&k, &identity(31)).unwrap();
    assert!((b[(0, 0)].re - 1.0).abs() < 1e-12);
    let pc = vacuum_projection::<f64>(&FockModel::new(&disc(1), &[30]).unwrap().basis).matrix;
    assert!((berezin_transform(&k, &pc).unwrap()[(0, 0)].re - 0.91).abs() < 1e-12);
}

#[test]
fn series_examples() {
    let one = FreeSeries::<f64>::constant(vec![1], c64(1.0, 0.0));
    let lam = scalar(disc(1), &[(0.4, 0.2)]);
    assert_eq!(eval_series(&one, &lam, 0.7), identity(1));
    let mut z = FreeSeries::<f64>::new(vec![1]);
    z.add_term(MultiWord(vec![w(&[1])]), c64(1.0, 0.0));
    assert!((eval_series(&z, &lam, 0.5)[(0, 0)] - c64(0.2, 0.1)).norm() < 1e-15);

    let grid = [0.2, 0.5, 0.9];
    let n = hardy_norm_estimate(&z, &disc(1), &[8], &grid).unwrap();
    for (a, r) in n.iter().zip(grid) {
        assert!((a - r).abs() < 1e-12);
    }
    let n = hardy_norm_estimate(&z, &disc(2), &[8], &[1.0]).unwrap();
    assert!((n[0] - (8.0f64 / 9.0).sqrt()).abs() < 1e-12);
    assert!(hardy_norm_estimate(&one, &disc(1), &[5], &grid).unwrap().iter().all(|v| (v - 1.0).abs() < 1e-15));

    let mut geo = FreeSeries::<f64>::new(vec![1]);
    let mut flat = FreeSeries::<f64>::new(vec![1]);
    for j in 1..=12 {
        geo.add_term(MultiWord(vec![w(&vec![1; j])]), c64(2f64.powi(j as i32), 0.0));
        flat.add_term(MultiWord(vec![w(&vec![1; j])]), c64(1.0, 0.0));
    }
    assert!(!radius_check(&geo, &disc(1), 12, 1e-9).unwrap().verdict);
    assert!(radius_check(&flat, &disc(1), 12, 1e-9).unwrap().verdict);
    assert!(radius_check(&z, &disc(1), 12, 1e-9).unwrap().verdict);

    let pair = vec![(one.clone(), one.clone())];
    let vn = von_neumann_check(&lam, &[pair], &[4]).unwrap();
    assert!(vn.max_violation.abs() < 1e-12);
    let vn = von_neumann_check(&lam, &[vec![(z.clone(), one)]], &[4]).unwrap();
    assert!((vn.lhs[0] - 0.2f64.hypot(0.4)).abs() < 1e-15 && vn.max_violation <= 0.0);
}

#[test]
fn cesaro_examples() {
    let md = FockModel::new(&PolydomainSpec::<f64>::rows(vec![2], vec![1]), &[3]).unwrap();
    let pc = vacuum_projection::<f64>(&md.basis).matrix;
    assert_eq!(cesaro(&pc, &md.basis, 1).unwrap(), pc);
    let a = random_gaussian::<f64, _>(&mut rng(1), md.dim(), md.dim());
    let big = cesaro(&a, &md.basis, 10_000).unwrap();
    assert!(dist(&big, &a) < 1e-3 * op_norm(&a));
}

#[test]
fn beurling_examples() {
    let md = FockModel::new(&disc(1), &[6]).unwrap();
    let n = md.dim();
    let pc = vacuum_projection::<f64>(&md.basis).matrix;
    let opts = FactorizeOptions::new(1);
    assert!(beurling_condition(&identity(n), &md, 1, 1e-9, 1).unwrap().verdict);
    let y = identity::<f64>(n) - &pc;
    assert!(beurling_condition(&y, &md, 1, 1e-9, 1).unwrap().verdict);
    assert!(!beurling_condition(&pc, &md, 1, 1e-9, 1).unwrap().verdict);

    let f = beurling_factorize(&y, &md, 1, &opts).unwrap();
    let wm = md.left_shift(0, 0).to_dense();
    assert!(dist(&(&f.m.op * f.m.op.adjoint()), &(&wm * wm.adjoint())) < 1e-10);
    let f = beurling_factorize(&identity(n), &md, 1, &opts).unwrap();
    assert!(f.roundtrip_residual < 1e-10);
    let f = beurling_factorize(&zeros(n, n), &md, 1, &opts).unwrap();
    assert_eq!(f.m.e_in, 0);

    let wop = MultiAnalyticOp::new(wm.clone(), &md, 1, 1).unwrap();
    assert!(wop.is_inner(1e-12));
    assert!(MultiAnalyticOp::new(zeros(n, n), &md, 1, 1).unwrap().is_inner(1e-12));
    let dense = MultiAnalyticOp::new(random_gaussian(&mut rng(2), n, n), &md, 1, 1).unwrap();
    assert!(dense.intertwine_residual > 1e-8);

    let md2 = FockModel::<f64>::new(&PolydomainSpec::rows(vec![2], vec![1]), &[3]).unwrap();
    let n2 = md2.dim();
    let eye = MultiAnalyticOp::new(identity(n2 * 2), &md2, 2, 2).unwrap();
    assert_eq!(support(&eye, n2, 1e-8).basis.ncols(), 2);
    let z = MultiAnalyticOp::new(zeros(n2 * 2, n2 * 2), &md2, 2, 2).unwrap();
    assert_eq!(support(&z, n2, 1e-8).basis.ncols(), 0);
    let mut slice = zeros::<f64>(2, 2);
    slice[(0, 0)] = c64(1.0, 0.0);
    let one_dim = MultiAnalyticOp::new(kron(&identity(n2), &slice), &md2, 2, 2).unwrap();
    assert_eq!(support(&one_dim, n2, 1e-8).basis.ncols(), 1);
}

#[test]
fn subspace_examples() {
    let md = FockModel::new(&disc(1), &[6]).unwrap();
    let n = md.dim();
    let wm = md.left_shift(0, 0).to_dense();
    let p = &wm * wm.adjoint();
    let r = invariant_subspace_tests(&p, &md, 1, 1e-9, 1).unwrap();
    assert!(r.invariant && r.beurling.verdict);
    let pc = vacuum_projection::<f64>(&md.basis).matrix;
    assert!(!invariant_subspace_tests(&pc, &md, 1, 1e-9, 1).unwrap().invariant);

    let md2 = FockModel::new(&PolydomainSpec::<f64>::rows(vec![1, 1], vec![1, 1]), &[4, 4]).unwrap();
    let w1 = md2.left_shift(0, 0).to_dense();
    let w2 = md2.left_shift(1, 0).to_dense();
    let psi = &w1 * &w2;
    let r = invariant_subspace_tests(&(&psi * psi.adjoint()), &md2, 1, 1e-9, 1).unwrap();
    assert!(r.invariant && r.doubly_commuting == Some(true));

    let mut pe = zeros::<f64>(3, 3);
    pe[(0, 0)] = c64(1.0, 0.0);
    pe[(2, 2)] = c64(1.0, 0.0);
    let full = kron(&identity(n), &pe);
    let res = reducing_characterize(&full, &md, 3, 1e-9, 1e-8);
    assert!(res.reducing && res.e_basis.as_ref().unwrap().ncols() == 2);
    let u = random_unitary::<f64, _>(&mut rng(4), 3);
    let rotated = kron(&identity(n), &(&u * &pe * u.adjoint()));
    let res = reducing_characterize(&rotated, &md, 3, 1e-9, 1e-8);
    assert!(res.reducing && res.match_residual.unwrap() < 1e-9);
    let vac = kron(&pc, &identity(3));
    assert!(!reducing_characterize(&vac, &md, 3, 1e-9, 1e-8).reducing);
    let _ = n;
}

#[test]
fn characteristic_function_examples() {
    let opts = FactorizeOptions::new(1);
    for t in [(0.0, 0.0), (0.4, 0.0), (1.0, 0.0)] {
        assert!(admits_charfn(&scalar(disc(1), &[t]), &[8], 1e-9).unwrap().verdict);
    }
    let zero = scalar(disc(1), &[(0.0, 0.0)]);
    let cf = char_function(&zero, &[8], &opts).unwrap();
    let pc = vacuum_projection::<f64>(&cf.model.basis).matrix;
    let th = cf.theta();
    assert!(dist(&(th * th.adjoint()), &(identity::<f64>(9) - pc)) < 1e-10);
    let r = pure_iff_inner(&zero, &[8], &opts).unwrap();
    assert_eq!((r.pure, r.inner, r.agreement), (Verdict::True, Verdict::True, Verdict::True));

    let lam = scalar(disc(1), &[(0.4, 0.0)]);
    let cf = char_function(&lam, &[40], &opts).unwrap();
    assert_eq!(cf.defect_dim, 1);
    assert!(cf.identity_residual < 1e-9);

    let one = scalar(disc(1), &[(1.0, 0.0)]);
    let cf = char_function(&one, &[6], &opts).unwrap();
    let th = cf.theta();
    assert!(dist(&(th * th.adjoint()), &identity(th.nrows())) < 1e-10);
    assert_eq!(pure_iff_inner(&one, &[6], &opts).unwrap().agreement, Verdict::NotCertified);

    let ms = model_space(&zero, &[8], &opts).unwrap();
    assert_eq!(ms.gamma.ncols(), 1);
    assert!(op_norm(&ms.ops[0][0]) < 1e-12);
    let ms = model_space(&lam, &[40], &opts).unwrap();
    let back = ms.gamma.ad_mul(&(&ms.ops[0][0] * &ms.gamma));
    assert!((back[(0, 0)].norm() - 0.4).abs() < 1e-9);

    let u = identity::<f64>(1);
    let co = coincide_under_unitary(&lam, &lam, &u, &[30], &opts).unwrap();
    assert!(co.coincidence_residual < 1e-8);
    let diag = OperatorTuple::new(disc(1), vec![vec![polydomain::CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(0.2, 0.0), c64(0.0, -0.5)]))]]).unwrap();
    let swap = polydomain::CMat::from_fn(2, 2, |r, c| c64(if r != c { 1.0 } else { 0.0 }, 0.0));
    let co = coincide_under_unitary(&diag, &diag.conjugated(&swap), &swap, &[30], &opts).unwrap();
    assert!(co.coincidence_residual < 1e-8);

    assert_eq!(pure_dilation(&lam, &[30], 3, 1e-9, 1e-8).unwrap().dilation_index, 1);
    let two = OperatorTuple::new(disc(1), vec![vec![zeros(2, 2)]]).unwrap();
    assert_eq!(pure_dilation(&two, &[3], 3, 1e-9, 1e-8).unwrap().dilation_index, 2);
}

#[test]
fn vacuum_slice_compression_dilation() {
    let md = FockModel::new(&PolydomainSpec::<f64>::rows(vec![2], vec![1]), &[4]).unwrap();
    let keep: Vec<usize> = (0..md.basis.dim).filter(|&i| md.basis.total_degree(i) <= 2).collect();
    let ops: Vec<polydomain::CMat<f64>> = (0..2)
        .map(|j| polydomain::fock::compress(&md.left_shift(0, j).to_dense(), &keep, &keep))
        .collect();
    let t = OperatorTuple::new(md.spec.clone(), vec![ops]).unwrap();
    let dil = pure_dilation(&t, &[6], 3, 1e-9, 1e-8).unwrap();
    assert_eq!(dil.dilation_index, 1);
    assert!(dil.reconstruction_residual < 1e-9);
}
