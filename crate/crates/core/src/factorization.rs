//! Beurling-type factorization `Y = M M^*` with multi-analytic `M`,
//! inner/support tests and invariant or reducing subspace characterizations.

use crate::berezin::{defect_kernel_on, BerezinKernel};
use crate::defect::{defect_certificate, defect_map, Certificate};
use crate::error::{Error, Result};
use crate::fock::{compress, FockModel};
use crate::linalg::{eigh, identity, kron, op_norm, projection_defects, projector, random_unitary, range_basis, select_columns, zeros};
use crate::scalar::{cr, lit, CMat, Real};
use crate::tuple::OperatorTuple;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `M : fock (x) C^{e_in} -> fock (x) C^{h_out}` intertwining `W (x) I`.
#[derive(Clone, Debug)]
pub struct MultiAnalyticOp<R: Real> {
    pub op: CMat<R>,
    pub e_in: usize,
    pub h_out: usize,
    pub intertwine_residual: R,
}

/// `max_{ij} ||(E (x) I)(M (W_{ij} (x) I) - (W_{ij} (x) I) M)(E (x) I)||`.
pub fn multi_analytic_residual<R: Real>(
    m: &CMat<R>,
    model: &FockModel<R>,
    e_in: usize,
    h_out: usize,
    reserve: usize,
) -> R {
    let rows = model.basis.interior_tensor_indices(reserve, h_out);
    let cols = model.basis.interior_tensor_indices(reserve, e_in);
    let mut worst = R::zero();
    for group in &model.left {
        for w in group {
            let diff = w.right_tensor(m, e_in) - w.left_tensor(m, h_out);
            worst = worst.max(op_norm(&compress(&diff, &rows, &cols)));
        }
    }
    worst
}

impl<R: Real> MultiAnalyticOp<R> {
    pub fn new(op: CMat<R>, model: &FockModel<R>, e_in: usize, h_out: usize) -> Result<Self> {
        let n = model.basis.dim;
        if op.nrows() != n * h_out || op.ncols() != n * e_in {
            return Err(Error::Shape(format!(
                "operator {}x{} vs fock dim {n} with coefficient dims {e_in}->{h_out}",
                op.nrows(),
                op.ncols()
            )));
        }
        let intertwine_residual = multi_analytic_residual(&op, model, e_in, h_out, 1);
        Ok(MultiAnalyticOp { op, e_in, h_out, intertwine_residual })
    }

    pub fn is_multi_analytic(&self, tol: R) -> bool {
        self.intertwine_residual <= tol
    }

    /// Partial-isometry defect `||(MM^*)^2 - MM^*||`.
    pub fn inner_defect(&self) -> R {
        let p = &self.op * self.op.adjoint();
        op_norm(&(&p * &p - &p))
    }

    pub fn is_inner(&self, tol: R) -> bool {
        self.is_multi_analytic(tol) && self.inner_defect() <= tol
    }
}

pub fn is_multi_analytic<R: Real>(m: &MultiAnalyticOp<R>, tol: R) -> bool {
    m.is_multi_analytic(tol)
}

pub fn is_inner<R: Real>(m: &MultiAnalyticOp<R>, tol: R) -> bool {
    m.is_inner(tol)
}

/// `Delta^p_{W (x) I}(Y) >= -tol` on the interior with the given reserve.
pub fn beurling_condition<R: Real>(
    y: &CMat<R>,
    model: &FockModel<R>,
    coeff_dim: usize,
    tol: R,
    reserve: usize,
) -> Result<Certificate<R>> {
    let n = model.basis.dim * coeff_dim;
    if y.nrows() != n || y.ncols() != n {
        return Err(Error::Shape(format!("Y is {}x{}, expected {n}", y.nrows(), y.ncols())));
    }
    let rows = model.basis.interior_tensor_indices(reserve, coeff_dim);
    Ok(defect_certificate(&model.action(coeff_dim), y, tol, Some(&rows)))
}

/// Default interior reserve for identity checks: `deg q * sum m_i`.
pub fn default_reserve<R: Real>(model: &FockModel<R>) -> usize {
    model.spec.reserve(model.spec.m.iter().sum())
}

#[derive(Clone, Copy, Debug)]
pub struct FactorizeOptions<R> {
    pub tol: R,
    pub eps_rank: R,
    /// Interior reserve for the condition and the round-trip check.
    pub reserve: usize,
    /// Rotates the range basis by a seeded Haar unitary.
    pub seed: Option<u64>,
}

impl<R: Real> FactorizeOptions<R> {
    pub fn new(reserve: usize) -> Self {
        FactorizeOptions { tol: lit(1e-9), eps_rank: lit(1e-8), reserve, seed: None }
    }
}

#[derive(Clone, Debug)]
pub struct BeurlingFactorization<R: Real> {
    pub m: MultiAnalyticOp<R>,
    /// Auxiliary tuple `X_{ij} = A_{ij}^*` on the numerical range of `Y`.
    pub x: OperatorTuple<R>,
    /// Orthonormal basis of the numerical range, `(N c) x r`.
    pub range: CMat<R>,
    /// `Y^{1/2}` in range coordinates.
    pub root: CMat<R>,
    /// Kernel of `W (x) I` built on `Delta^m_{W (x) I}(Y)`; `M = kernel^*`.
    /// Its defect basis lives in `fock (x) C^c`.
    pub kernel: BerezinKernel<R>,
    pub condition: Certificate<R>,
    pub rank: usize,
    /// Largest eigenvalue dropped by the rank cutoff.
    pub clipped: R,
    pub roundtrip_residual: R,
}

/// Builds `M` with `M^* = sum_beta sqrt(b_beta) e_beta (x) D (W_beta^* (x) I)`,
/// `D = Delta^m_{W (x) I}(Y)^{1/2}`. This is `Y^{1/2} K_X^*` for the tuple
/// `A_{ij}(Y^{1/2} x) = Y^{1/2}(W_{ij}^* (x) I) x` up to a unitary on the
/// coefficient space, without inverting `Y^{1/2}`.
pub fn beurling_factorize<R: Real>(
    y: &CMat<R>,
    model: &FockModel<R>,
    coeff_dim: usize,
    opts: &FactorizeOptions<R>,
) -> Result<BeurlingFactorization<R>> {
    let condition = beurling_condition(y, model, coeff_dim, opts.tol, opts.reserve)?;
    if !condition.verdict {
        return Err(Error::Precondition(format!(
            "Beurling condition fails: {}",
            condition.failing().join(", ")
        )));
    }
    let (vals, vecs) = eigh(y);
    let top = vals.last().copied().unwrap_or_else(R::zero);
    let scale = top.abs().max(vals.first().map(|v| v.abs()).unwrap_or_else(R::zero)).max(R::one());
    if vals.first().is_some_and(|&lo| lo < -opts.tol * scale) {
        return Err(Error::Precondition("Y is not positive semidefinite".into()));
    }
    let cut = opts.eps_rank * top.max(R::zero());
    let keep: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] > cut && vals[j] > R::zero()).collect();
    let clipped = (0..vals.len()).filter(|j| !keep.contains(j)).map(|j| vals[j]).fold(R::zero(), |a, b| a.max(b));
    let mut range = select_columns(&vecs, &keep);
    let r = keep.len();
    let spec = model.spec.clone();
    let mut root = zeros(r, r);
    for (a, &j) in keep.iter().enumerate() {
        root[(a, a)] = cr(vals[j].sqrt());
    }
    if let Some(seed) = opts.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: CMat<R> = random_unitary(&mut rng, r);
        range = &range * &u;
        root = u.adjoint() * root * &u;
    }
    let mut root_inv = zeros(r, r);
    if r > 0 {
        let (rv, rvec) = eigh(&root);
        let mut scaled = rvec.clone();
        for (j, v) in rv.iter().enumerate() {
            let s = cr(R::one() / *v);
            for x in scaled.column_mut(j).iter_mut() {
                *x *= s;
            }
        }
        root_inv = scaled * rvec.adjoint();
    }
    let ops: Vec<Vec<CMat<R>>> = model
        .left
        .iter()
        .map(|group| {
            group
                .iter()
                .map(|w| {
                    let moved = w.adjoint_left_tensor(&range, coeff_dim);
                    let a = &root * range.ad_mul(&moved) * &root_inv;
                    a.adjoint()
                })
                .collect()
        })
        .collect();
    let x = OperatorTuple::new_unchecked(spec, r, ops);
    let action = model.action(coeff_dim);
    let delta = defect_map(&action, y, &model.spec.m);
    let mut kernel = defect_kernel_on(&action, model, &delta, opts.tol).map_err(|e| match e {
        Error::NotMember(msg) => Error::Precondition(format!("Delta^m(Y) is not positive on the truncation: {msg}")),
        other => other,
    })?;
    if let Some(seed) = opts.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let u: CMat<R> = random_unitary(&mut rng, kernel.defect_dim);
        kernel.matrix = kron(&identity(model.basis.dim), &u.adjoint()) * &kernel.matrix;
        kernel.defect_basis = &kernel.defect_basis * &u;
        kernel.defect_root = u.adjoint() * &kernel.defect_root;
    }
    let m_op = kernel.matrix.adjoint();
    let m = MultiAnalyticOp::new(m_op, model, kernel.defect_dim, coeff_dim)?;
    let interior = model.basis.interior_tensor_indices(opts.reserve, coeff_dim);
    let diff = y - &m.op * m.op.adjoint();
    let roundtrip_residual = op_norm(&compress(&diff, &interior, &interior));
    Ok(BeurlingFactorization { m, x, range, root, kernel, condition, rank: r, clipped, roundtrip_residual })
}

#[derive(Clone, Debug)]
pub struct Support<R: Real> {
    /// Orthonormal basis of `L`, `e_in x l`.
    pub basis: CMat<R>,
    /// `I (x) P_L` on `fock (x) C^{e_in}`.
    pub projection: CMat<R>,
    /// `||(I - I (x) P_L) M^*||`.
    pub containment_residual: R,
}

/// `L = (P_C (x) I) range M^*`.
pub fn support<R: Real>(m: &MultiAnalyticOp<R>, fock_dim: usize, eps_rank: R) -> Support<R> {
    let ms = m.op.adjoint();
    let vac = ms.rows(0, m.e_in).into_owned();
    let basis = range_basis(&vac, eps_rank);
    let projection = kron(&identity(fock_dim), &projector(&basis));
    let containment_residual = op_norm(&(&ms - &projection * &ms));
    Support { basis, projection, containment_residual }
}

#[derive(Clone, Debug)]
pub struct SubspaceReport<R: Real> {
    pub idempotence_defect: R,
    pub selfadjoint_defect: R,
    pub invariance_residual: R,
    pub invariant: bool,
    pub beurling: Certificate<R>,
    /// Present for polyball specs with `k >= 2`.
    pub doubly_commuting_residual: Option<R>,
    pub doubly_commuting: Option<bool>,
}

pub fn invariant_subspace_tests<R: Real>(
    p: &CMat<R>,
    model: &FockModel<R>,
    coeff_dim: usize,
    tol: R,
    reserve: usize,
) -> Result<SubspaceReport<R>> {
    let (idem, sa) = projection_defects(p);
    let n = p.nrows();
    let comp = identity::<R>(n) - p;
    let mut inv = R::zero();
    for group in &model.left {
        for w in group {
            inv = inv.max(op_norm(&(&comp * w.left_tensor(p, coeff_dim))));
        }
    }
    let beurling = beurling_condition(p, model, coeff_dim, tol, reserve)?;
    let (dc_res, dc) = if model.spec.is_polyball() && model.spec.k() >= 2 {
        let mut worst = R::zero();
        for i1 in 0..model.spec.k() {
            for i2 in 0..model.spec.k() {
                if i1 == i2 {
                    continue;
                }
                for w1 in &model.left[i1] {
                    let a = p * w1.left_tensor(p, coeff_dim);
                    for w2 in &model.left[i2] {
                        let b = p * w2.adjoint_left_tensor(p, coeff_dim);
                        worst = worst.max(op_norm(&(&a * &b - &b * &a)));
                    }
                }
            }
        }
        (Some(worst), Some(worst <= tol))
    } else {
        (None, None)
    };
    Ok(SubspaceReport {
        idempotence_defect: idem,
        selfadjoint_defect: sa,
        invariance_residual: inv,
        invariant: inv <= tol,
        beurling,
        doubly_commuting_residual: dc_res,
        doubly_commuting: dc,
    })
}

#[derive(Clone, Debug)]
pub struct ReducingResult<R: Real> {
    pub reducing: bool,
    /// Largest of `||(I-P)(W (x) I)P||` and `||(I-P)(W^* (x) I)P||`.
    pub obstruction: R,
    /// Basis of `E = (P_C (x) I) M` when reducing.
    pub e_basis: Option<CMat<R>>,
    /// `||P - I (x) P_E||` when reducing.
    pub match_residual: Option<R>,
}

pub fn reducing_characterize<R: Real>(
    p: &CMat<R>,
    model: &FockModel<R>,
    coeff_dim: usize,
    tol: R,
    eps_rank: R,
) -> ReducingResult<R> {
    let n = p.nrows();
    let comp = identity::<R>(n) - p;
    let mut obstruction = R::zero();
    for group in &model.left {
        for w in group {
            obstruction = obstruction.max(op_norm(&(&comp * w.left_tensor(p, coeff_dim))));
            obstruction = obstruction.max(op_norm(&(&comp * w.adjoint_left_tensor(p, coeff_dim))));
        }
    }
    if obstruction > tol {
        return ReducingResult { reducing: false, obstruction, e_basis: None, match_residual: None };
    }
    let e_basis = range_basis(&p.rows(0, coeff_dim).into_owned(), eps_rank);
    let target = kron(&identity(model.basis.dim), &projector(&e_basis));
    let match_residual = op_norm(&(p - target));
    ReducingResult { reducing: match_residual <= tol, obstruction, e_basis: Some(e_basis), match_residual: Some(match_residual) }
}

/// Closure of a column space under every `W_{ij} (x) I`.
pub fn shift_closure<R: Real>(start: &CMat<R>, model: &FockModel<R>, coeff_dim: usize, eps_rank: R) -> CMat<R> {
    let n = start.nrows();
    let mut basis = range_basis(start, eps_rank);
    loop {
        let mut blocks = vec![basis.clone()];
        for group in &model.left {
            for w in group {
                blocks.push(w.left_tensor(&basis, coeff_dim));
            }
        }
        let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
        let mut stacked = zeros(n, cols);
        let mut at = 0;
        for b in &blocks {
            stacked.view_mut((0, at), b.shape()).copy_from(b);
            at += b.ncols();
        }
        let next = range_basis(&stacked, eps_rank);
        let done = next.ncols() == basis.ncols() || next.ncols() == n;
        basis = next;
        if done {
            return basis;
        }
    }
}

/// For a co-invariant range of `p`: `||(E (x) I)(P_span - I (x) P_E)(E (x) I)||`
/// with `span = closure of range p under W (x) I`, `E = (P_C (x) I) range p`.
pub fn cyclic_span_residual<R: Real>(p: &CMat<R>, model: &FockModel<R>, coeff_dim: usize, reserve: usize, eps_rank: R) -> R {
    let span = projector(&shift_closure(p, model, coeff_dim, eps_rank));
    let e_basis = range_basis(&p.rows(0, coeff_dim).into_owned(), eps_rank);
    let target = kron(&identity(model.basis.dim), &projector(&e_basis));
    let rows = model.basis.interior_tensor_indices(reserve, coeff_dim);
    op_norm(&compress(&(span - target), &rows, &rows))
}

/// `V` with `V (P_C (x) I) M_1^* = (P_C (x) I) M_2^*`, so that `M_1 = M_2 (I (x) V)`
/// when `M_1 M_1^* = M_2 M_2^*`. Returns `V` and the interior residual.
pub fn coincidence_isometry<R: Real>(
    m1: &MultiAnalyticOp<R>,
    m2: &MultiAnalyticOp<R>,
    model: &FockModel<R>,
    eps_rank: R,
    reserve: usize,
) -> Result<(CMat<R>, R)> {
    if m1.h_out != m2.h_out {
        return Err(Error::Shape("codomains differ".into()));
    }
    let a1 = m1.op.columns(0, m1.e_in).adjoint();
    let a2 = m2.op.columns(0, m2.e_in).adjoint();
    let v = if m1.e_in == 0 || m2.e_in == 0 {
        zeros(m2.e_in, m1.e_in)
    } else {
        let top = op_norm(&a1);
        let pinv = a1.clone().pseudo_inverse(eps_rank * top.max(R::one())).map_err(|e| Error::Precondition(e.to_string()))?;
        &a2 * pinv
    };
    let lifted = &m2.op * kron(&identity(model.basis.dim), &v);
    let rows = model.basis.interior_tensor_indices(reserve, m1.h_out);
    let cols = model.basis.interior_tensor_indices(reserve, m1.e_in);
    let residual = op_norm(&compress(&(&m1.op - lifted), &rows, &cols));
    Ok((v, residual))
}
