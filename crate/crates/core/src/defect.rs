//! Completely positive maps `Phi_{q_i, X_i}`, defect maps `Delta^p`, and the
//! certification battery built on them.

use crate::coefficients::{PolydomainSpec, PositiveRegularPoly};
use crate::error::{Error, Result};
use crate::fock::compress;
use crate::linalg::{herm_norm, identity, op_norm, projector, psd_test, range_basis, zeros};
use crate::scalar::{cr, lit, to_f64, CMat, Real};
use crate::tuple::{OperatorTuple, TupleAction};
use serde::Serialize;
use std::collections::BTreeMap;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Three-valued outcome for statements that finite truncation may fail to decide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    True,
    False,
    NotCertified,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Verdict::True
    }
}

/// `Phi_{q,X}(Y) = sum_alpha a_alpha X_alpha Y X_alpha^*` for a single group.
pub fn phi_map<R: Real>(q: &PositiveRegularPoly<R>, x: &[CMat<R>], y: &CMat<R>) -> Result<CMat<R>> {
    if x.len() != q.arity {
        return Err(Error::Shape(format!("{} operators for arity {}", x.len(), q.arity)));
    }
    let h = y.nrows();
    if x.iter().any(|m| m.nrows() != h || m.ncols() != h) {
        return Err(Error::Shape("operator and Y sizes differ".into()));
    }
    let spec = PolydomainSpec::new(vec![q.arity], vec![1], vec![q.clone()]);
    let t = OperatorTuple::new_unchecked(spec, h, vec![x.to_vec()]);
    Ok(phi(&t, 0, y))
}

/// `Phi_i(Y)` for group `i` (0-based) of any tuple action.
pub fn phi<R: Real, A: TupleAction<R> + ?Sized>(action: &A, i: usize, y: &CMat<R>) -> CMat<R> {
    let mut out = zeros(y.nrows(), y.ncols());
    for (w, a) in action.spec().q[i].support() {
        out += action.conjugate_word(i, w, y) * cr(*a);
    }
    out
}

/// `(id - Phi_1)^{p_1} ... (id - Phi_k)^{p_k}(Y)`.
pub fn defect_map<R: Real, A: TupleAction<R> + ?Sized>(action: &A, y: &CMat<R>, p: &[usize]) -> CMat<R> {
    let mut cur = y.clone();
    for i in (0..p.len()).rev() {
        for _ in 0..p[i] {
            cur = &cur - phi(action, i, &cur);
        }
    }
    cur
}

/// `Delta^p(Y)` for every `0 <= p <= m`, sharing intermediate results.
pub fn defect_grid<R: Real, A: TupleAction<R> + ?Sized>(
    action: &A,
    y: &CMat<R>,
    m: &[usize],
) -> BTreeMap<Vec<usize>, CMat<R>> {
    let mut grid = BTreeMap::new();
    for p in grid_points(m) {
        let value = match p.iter().position(|&v| v > 0) {
            None => y.clone(),
            Some(i) => {
                let mut prev = p.clone();
                prev[i] -= 1;
                let base: &CMat<R> = &grid[&prev];
                base - phi(action, i, base)
            }
        };
        grid.insert(p, value);
    }
    grid
}

/// All `p` with `0 <= p <= m`, in lexicographic order.
pub fn grid_points(m: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &mi in m {
        let mut next = Vec::new();
        for p in &out {
            for v in 0..=mi {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// `(id - Phi_k^{q_k}) ... (id - Phi_1^{q_1})(I)`.
pub fn iterated_defect<R: Real, A: TupleAction<R> + ?Sized>(action: &A, qs: &[usize]) -> CMat<R> {
    let mut y = identity(action.dim());
    for (i, &qi) in qs.iter().enumerate() {
        let mut pow = y.clone();
        for _ in 0..qi {
            pow = phi(action, i, &pow);
        }
        y -= pow;
    }
    y
}

#[derive(Clone, Debug)]
pub struct Witness<R: Real> {
    pub matrix: CMat<R>,
    pub min_eig: R,
    pub threshold: R,
    pub pass: bool,
}

impl<R: Real> Witness<R> {
    pub fn psd(matrix: CMat<R>, tol: R) -> Self {
        let t = psd_test(&matrix, tol);
        Witness { matrix, min_eig: t.min_eig, threshold: t.threshold, pass: t.pass }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate<R: Real> {
    pub verdict: bool,
    pub witnesses: BTreeMap<String, Witness<R>>,
    pub checks: BTreeMap<String, bool>,
}

impl<R: Real> Certificate<R> {
    pub fn min_eig(&self) -> R {
        self.witnesses.values().map(|w| w.min_eig).fold(R::max_value().unwrap_or_else(R::one), |a, b| a.min(b))
    }

    pub fn failing(&self) -> Vec<String> {
        self.witnesses.iter().filter(|(_, w)| !w.pass).map(|(k, _)| k.clone()).collect()
    }
}

pub fn label(p: &[usize]) -> String {
    let s: Vec<String> = p.iter().map(|v| v.to_string()).collect();
    format!("delta^({})", s.join(","))
}

/// `Delta^p_X(Y) >= -tol` for every `0 != p <= m`, each witness restricted to
/// `rows` when given.
pub fn defect_certificate<R: Real, A: TupleAction<R> + ?Sized>(
    action: &A,
    y: &CMat<R>,
    tol: R,
    rows: Option<&[usize]>,
) -> Certificate<R> {
    let m = action.spec().m.clone();
    let grid = defect_grid(action, y, &m);
    let mut witnesses = BTreeMap::new();
    for (p, val) in grid {
        if p.iter().all(|&v| v == 0) {
            continue;
        }
        let mat = match rows {
            Some(r) => compress(&val, r, r),
            None => val,
        };
        witnesses.insert(label(&p), Witness::psd(mat, tol));
    }
    let verdict = witnesses.values().all(|w| w.pass);
    Certificate { verdict, witnesses, checks: BTreeMap::new() }
}

/// Membership in the polydomain: `Phi_i(I) <= I` plus the full defect grid,
/// cross-checked against the epsilon-product form of the definition.
pub fn membership<R: Real>(tuple: &OperatorTuple<R>, tol: R, comm_tol: Option<R>) -> Result<Certificate<R>> {
    tuple.check_commutation(comm_tol)?;
    Ok(membership_unchecked(tuple, tol))
}

pub fn membership_unchecked<R: Real, A: TupleAction<R> + ?Sized>(action: &A, tol: R) -> Certificate<R> {
    let spec = action.spec().clone();
    let eye = identity(action.dim());
    let mut cert = defect_certificate(action, &eye, tol, None);
    let mut contractive = true;
    for i in 0..spec.k() {
        let w = Witness::psd(&eye - phi(action, i, &eye), tol);
        contractive &= w.pass;
        cert.witnesses.insert(format!("I-phi_{}(I)", i + 1), w);
    }
    let grid_ok = contractive && cert.verdict;
    let mut eps_ok = contractive;
    for mask in 1..(1usize << spec.k()) {
        let p: Vec<usize> = (0..spec.k()).map(|i| if mask >> i & 1 == 1 { spec.m[i] } else { 0 }).collect();
        eps_ok &= cert.witnesses[&label(&p)].pass;
    }
    cert.verdict = grid_ok;
    cert.checks.insert("phi_contractive".into(), contractive);
    cert.checks.insert("grid".into(), grid_ok);
    cert.checks.insert("epsilon_product".into(), eps_ok);
    cert.checks.insert("definitions_agree".into(), grid_ok == eps_ok);
    cert
}

/// `Delta^m(I) <= Delta^q(I) + tol` for every `0 != q <= m`.
pub fn delta_ineq<R: Real, A: TupleAction<R> + ?Sized>(action: &A, tol: R) -> (bool, R) {
    let m = action.spec().m.clone();
    let grid = defect_grid(action, &identity(action.dim()), &m);
    let top = &grid[&m];
    let mut worst = R::max_value().unwrap_or_else(R::one);
    let mut ok = true;
    for (p, val) in &grid {
        if p.iter().all(|&v| v == 0) {
            continue;
        }
        let t = psd_test(&(val - top), tol);
        ok &= t.pass;
        worst = worst.min(t.min_eig);
    }
    (ok, worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct PurityReport {
    pub pure: bool,
    /// Per group, `||Phi_i^p(I)||` for `p = 1, 2, ...`.
    pub traces: Vec<Vec<f64>>,
}

/// Purity: every `||Phi_i^p(I)||` drops below `tol` within `max_iter` steps.
pub fn is_pure<R: Real, A: TupleAction<R> + ?Sized>(action: &A, tol: R, max_iter: usize) -> PurityReport {
    let mut pure = true;
    let mut traces = Vec::new();
    for i in 0..action.spec().k() {
        let mut y = identity(action.dim());
        let mut trace = Vec::new();
        let mut reached = false;
        for _ in 0..max_iter {
            y = phi(action, i, &y);
            let n = herm_norm(&y);
            trace.push(to_f64(n));
            if n < tol {
                reached = true;
                break;
            }
        }
        pure &= reached;
        traces.push(trace);
    }
    PurityReport { pure, traces }
}

/// Complete non-coisometry at truncation degree `d`: `True` when
/// `lambda_min(K_d^* K_d) > tol`, otherwise `NotCertified`.
pub fn is_cnc<R: Real>(tuple: &OperatorTuple<R>, d: &[usize], tol: R) -> Result<(Verdict, R)> {
    let kernel = crate::berezin::berezin_kernel(tuple, d, tol)?;
    let g = kernel.gram();
    let lo = crate::linalg::min_eig(&g);
    Ok((if lo > tol { Verdict::True } else { Verdict::NotCertified }, lo))
}

pub fn default_r_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
    g.push(0.99);
    g
}

pub fn radial_scan<R: Real>(tuple: &OperatorTuple<R>, r_grid: &[R], tol: R) -> Vec<(R, Certificate<R>)> {
    r_grid
        .iter()
        .map(|&r| (r, membership_unchecked(&tuple.scaled(r), tol)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct WoldSplit<R: Real> {
    pub p0: CMat<R>,
    pub p1: CMat<R>,
    pub rank: usize,
    pub krylov_steps: usize,
    /// `max ||(I - P0) T_{ij} P0||`.
    pub invariance_residual: R,
    /// `max ||(I - P0) T_{ij}^* P0||`; zero when the split also reduces.
    pub reducing_residual: R,
}

/// Krylov closure of `range Delta^m(I)` under all `T_{i,j}`.
pub fn wold_split<R: Real>(tuple: &OperatorTuple<R>, tol: R) -> Result<WoldSplit<R>> {
    let h = tuple.dim;
    let eye = identity::<R>(h);
    for i in 0..tuple.k() {
        if !psd_test(&(&eye - phi(tuple, i, &eye)), tol).pass {
            return Err(Error::Precondition(format!("phi_{}(I) is not below I", i + 1)));
        }
    }
    let delta = defect_map(tuple, &eye, &tuple.spec.m);
    let scale = herm_norm(&delta).max(R::one());
    let (vals, vecs) = crate::linalg::eigh(&delta);
    let keep: Vec<usize> = (0..vals.len()).filter(|&j| vals[j].abs() > tol * scale).collect();
    let mut basis = crate::linalg::select_columns(&vecs, &keep);
    let mut steps = 0;
    while basis.ncols() > 0 && basis.ncols() < h && steps < h {
        steps += 1;
        let mut blocks = vec![basis.clone()];
        for g in &tuple.ops {
            for t in g {
                blocks.push(t * &basis);
            }
        }
        let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
        let mut stacked = zeros(h, cols);
        let mut at = 0;
        for b in &blocks {
            stacked.view_mut((0, at), b.shape()).copy_from(b);
            at += b.ncols();
        }
        let next = range_basis(&stacked, lit(1e-10));
        if next.ncols() == basis.ncols() {
            basis = next;
            break;
        }
        basis = next;
    }
    let p0 = projector(&basis);
    let p1 = &eye - &p0;
    let mut inv = R::zero();
    let mut red = R::zero();
    for g in &tuple.ops {
        for t in g {
            inv = inv.max(op_norm(&(&p1 * t * &p0)));
            red = red.max(op_norm(&(&p1 * t.adjoint() * &p0)));
        }
    }
    Ok(WoldSplit { rank: basis.ncols(), p0, p1, krylov_steps: steps, invariance_residual: inv, reducing_residual: red })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExempReport {
    pub member: bool,
    pub pure: bool,
    pub delta_m_psd: bool,
    /// Purity together with `Delta^m(I) >= 0`.
    pub sufficient_pure: bool,
    pub doubly_commuting: bool,
    pub factors_member: Vec<bool>,
    pub sufficient_doubly_commuting: bool,
    /// `sum_i m_i Phi_i(I) <= I`.
    pub sufficient_sum: bool,
    pub delta_m_zero: bool,
    pub delta_ones_zero: bool,
    /// For members, `Delta^m(I) = 0` iff `Delta^{(1,...,1)}(I) = 0`.
    pub zero_equivalence_holds: bool,
    /// No sufficient condition holds for a non-member.
    pub consistent: bool,
}

pub fn exemp_battery<R: Real>(tuple: &OperatorTuple<R>, tol: R) -> ExempReport {
    let spec = &tuple.spec;
    let k = spec.k();
    let eye = identity::<R>(tuple.dim);
    let member = membership_unchecked(tuple, tol).verdict;
    let pure = is_pure(tuple, tol, 10_000).pure;
    let delta_m = defect_map(tuple, &eye, &spec.m);
    let delta_m_psd = psd_test(&delta_m, tol).pass;
    let sufficient_pure = pure && delta_m_psd;
    let doubly_commuting = k >= 2 && tuple.double_commutator_defect() <= tol.max(tuple.default_comm_tol());
    let factors_member: Vec<bool> = (0..k)
        .map(|i| {
            let sub_spec = PolydomainSpec::new(vec![spec.n[i]], vec![spec.m[i]], vec![spec.q[i].clone()]);
            let sub = OperatorTuple::new_unchecked(sub_spec, tuple.dim, vec![tuple.ops[i].clone()]);
            membership_unchecked(&sub, tol).verdict
        })
        .collect();
    let sufficient_doubly_commuting = doubly_commuting && factors_member.iter().all(|&b| b);
    let mut sum = eye.clone();
    for i in 0..k {
        sum -= phi(tuple, i, &eye) * cr(lit::<R>(spec.m[i] as f64));
    }
    let sufficient_sum = psd_test(&sum, tol).pass;
    let zero_tol = tol * lit(10.0);
    let delta_m_zero = herm_norm(&delta_m) <= zero_tol;
    let delta_ones_zero = herm_norm(&defect_map(tuple, &eye, &vec![1; k])) <= zero_tol;
    let zero_equivalence_holds = !member || delta_m_zero == delta_ones_zero;
    let consistent = member || !(sufficient_pure || sufficient_doubly_commuting || sufficient_sum);
    ExempReport {
        member,
        pure,
        delta_m_psd,
        sufficient_pure,
        doubly_commuting,
        factors_member,
        sufficient_doubly_commuting,
        sufficient_sum,
        delta_m_zero,
        delta_ones_zero,
        zero_equivalence_holds,
        consistent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;

    fn scalar_tuple(spec: PolydomainSpec<f64>, vals: &[(f64, f64)]) -> OperatorTuple<f64> {
        OperatorTuple::scalars(spec, vals.iter().map(|&(a, b)| vec![c64(a, b)]).collect()).unwrap()
    }

    #[test]
    fn phi_examples() {
        let q = PositiveRegularPoly::<f64>::row(1);
        let y = identity::<f64>(1);
        let t = CMat::<f64>::from_element(1, 1, c64(0.3, 0.0));
        assert!((phi_map(&q, &[t], &y).unwrap()[(0, 0)].re - 0.09).abs() < 1e-15);
        let q2 = PositiveRegularPoly::linear(vec![2.0]);
        let h = CMat::<f64>::from_element(1, 1, c64(0.5, 0.0));
        assert!((phi_map(&q2, &[h], &y).unwrap()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!(phi_map(&q, &[], &y).is_err());
    }

    #[test]
    fn defect_examples() {
        let t = scalar_tuple(PolydomainSpec::rows(vec![1], vec![2]), &[(0.6, 0.0)]);
        let d = defect_map(&t, &identity(1), &[2]);
        assert!((d[(0, 0)].re - (1.0f64 - 0.36).powi(2)).abs() < 1e-14);
        let t2 = scalar_tuple(PolydomainSpec::rows(vec![1, 1], vec![1, 1]), &[(0.5, 0.0), (0.0, -0.3)]);
        let d2 = defect_map(&t2, &identity(1), &[1, 1]);
        assert!((d2[(0, 0)].re - 0.75 * 0.91).abs() < 1e-14);
        assert_eq!(defect_map(&t2, &identity(1), &[0, 0]), identity(1));
    }

    #[test]
    fn membership_examples() {
        let spec = PolydomainSpec::rows(vec![1, 1], vec![1, 1]);
        let t = scalar_tuple(spec.clone(), &[(0.5, 0.0), (0.0, -0.3)]);
        let c = membership(&t, 1e-9, None).unwrap();
        assert!(c.verdict && c.checks["definitions_agree"]);
        let bad = scalar_tuple(spec, &[(1.2, 0.0), (0.0, 0.0)]);
        let c = membership(&bad, 1e-9, None).unwrap();
        assert!(!c.verdict);
        assert!((c.witnesses["I-phi_1(I)"].min_eig + 0.44).abs() < 1e-12);
    }

    #[test]
    fn unitary_member_not_pure() {
        for m in 1..=3 {
            let t = scalar_tuple(PolydomainSpec::rows(vec![1], vec![m]), &[(0.6, 0.8)]);
            assert!(membership(&t, 1e-9, None).unwrap().verdict);
            assert!(!is_pure(&t, 1e-9, 200).pure);
        }
        let t = scalar_tuple(PolydomainSpec::rows(vec![1], vec![1]), &[(0.5, 0.0)]);
        let p = is_pure(&t, 1e-9, 200);
        assert!(p.pure);
        assert!((p.traces[0][2] - 0.25f64.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn grid_order() {
        assert_eq!(grid_points(&[1, 2]).len(), 6);
        assert_eq!(grid_points(&[1, 2])[0], vec![0, 0]);
    }
}
