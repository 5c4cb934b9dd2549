//! Characteristic functions, pure-iff-inner checks, model spaces, unitary
//! coincidence and pure dilations.

use crate::berezin::{berezin_kernel_on, tail_bound, BerezinKernel};
use crate::defect::{is_pure, Certificate, Verdict};
use crate::error::{Error, Result};
use crate::factorization::{
    beurling_condition, beurling_factorize, default_reserve, shift_closure, BeurlingFactorization, FactorizeOptions,
};
use crate::fock::{compress, FockModel};
use crate::linalg::{eigh, herm_norm, identity, kron, min_eig, op_norm, projector, select_columns, zeros};
use crate::scalar::{cr, lit, CMat, Real};
use crate::tuple::OperatorTuple;
use crate::words::enumerate_multiwords;

/// `Delta_{W (x) I}^p(I - KK^*) >= -tol` on the interior for all `0 != p <= m`.
pub fn admits_charfn<R: Real>(tuple: &OperatorTuple<R>, d: &[usize], tol: R) -> Result<Certificate<R>> {
    let model = FockModel::new(&tuple.spec, d)?;
    let kernel = berezin_kernel_on(tuple, &model, tol)?;
    let y = complement_gram(&kernel);
    beurling_condition(&y, &model, kernel.defect_dim, tol, default_reserve(&model))
}

fn complement_gram<R: Real>(kernel: &BerezinKernel<R>) -> CMat<R> {
    let n = kernel.matrix.nrows();
    identity::<R>(n) - &kernel.matrix * kernel.matrix.adjoint()
}

#[derive(Clone, Debug)]
pub struct CharFunction<R: Real> {
    pub model: FockModel<R>,
    pub kernel: BerezinKernel<R>,
    /// `Theta = (I - KK^*)^{1/2} K_{M_T}^*` from `fock (x) D_*` to `fock (x) D`.
    pub factorization: BeurlingFactorization<R>,
    pub defect_dim: usize,
    pub star_defect_dim: usize,
    /// `||E(KK^* + Theta Theta^* - I)E||`.
    pub identity_residual: R,
    pub reserve: usize,
}

impl<R: Real> CharFunction<R> {
    pub fn theta(&self) -> &CMat<R> {
        &self.factorization.m.op
    }
}

pub fn char_function<R: Real>(tuple: &OperatorTuple<R>, d: &[usize], opts: &FactorizeOptions<R>) -> Result<CharFunction<R>> {
    let model = FockModel::new(&tuple.spec, d)?;
    char_function_on(tuple, model, opts)
}

pub fn char_function_on<R: Real>(tuple: &OperatorTuple<R>, model: FockModel<R>, opts: &FactorizeOptions<R>) -> Result<CharFunction<R>> {
    let kernel = berezin_kernel_on(tuple, &model, opts.tol)?;
    let y = complement_gram(&kernel);
    let factorization = beurling_factorize(&y, &model, kernel.defect_dim, opts).map_err(|e| match e {
        Error::Precondition(msg) => Error::Precondition(format!("tuple does not admit a characteristic function: {msg}")),
        other => other,
    })?;
    let identity_residual = factorization.roundtrip_residual;
    Ok(CharFunction {
        defect_dim: kernel.defect_dim,
        star_defect_dim: factorization.m.e_in,
        model,
        kernel,
        factorization,
        identity_residual,
        reserve: opts.reserve,
    })
}

/// `Phi_i^infinity` as a superoperator, by repeated squaring of
/// `sum_alpha a_alpha conj(T_alpha) (x) T_alpha`; `None` without convergence.
fn limit_superoperator<R: Real>(tuple: &OperatorTuple<R>, i: usize, tol: R) -> Option<CMat<R>> {
    let h = tuple.dim;
    let mut s = zeros::<R>(h * h, h * h);
    for (w, a) in tuple.spec.q[i].support() {
        let t = tuple.word(i, w);
        s += kron(&t.map(|z| z.conj()), &t) * cr(*a);
    }
    let vec_i: CMat<R> = CMat::from_fn(h * h, 1, |r, _| if r % (h + 1) == 0 { cr(R::one()) } else { cr(R::zero()) });
    let mut prev = &s * &vec_i;
    for _ in 0..64 {
        s = &s * &s;
        let cur = &s * &vec_i;
        if op_norm(&(&cur - &prev)) <= tol {
            return Some(s);
        }
        prev = cur;
    }
    None
}

/// `lim K_d^* K_d = prod_i (id - Phi_i^infinity)(I)`, exact in `d`.
pub fn limit_gram<R: Real>(tuple: &OperatorTuple<R>, tol: R) -> Option<CMat<R>> {
    let h = tuple.dim;
    let mut y: CMat<R> = CMat::from_fn(h * h, 1, |r, _| if r % (h + 1) == 0 { cr(R::one()) } else { cr(R::zero()) });
    for i in 0..tuple.k() {
        let s = limit_superoperator(tuple, i, tol)?;
        y = &y - s * &y;
    }
    Some(CMat::from_fn(h, h, |r, c| y[(c * h + r, 0)]))
}

#[derive(Clone, Debug)]
pub struct PureInnerReport<R: Real> {
    pub pure: Verdict,
    pub inner: Verdict,
    pub cnc: Verdict,
    /// `True` when both sides are certified and agree, `False` when they
    /// disagree for a certified c.n.c. tuple, `NotCertified` otherwise.
    pub agreement: Verdict,
    pub inner_defect: R,
    pub theta_inner_defect: R,
    pub tail: Option<f64>,
    /// `max ||K T_{ij}^* - (W_{ij}^* (x) I) K||` on the interior, pure case.
    pub equivalence_residual: Option<R>,
    /// `||KK^* - P_H||` with `P_H` the complement of `range Theta`, pure case.
    pub range_residual: Option<R>,
}

/// Purity against innerness of the characteristic function. Innerness is read
/// off the limit Gram `K^*K` (a partial isometry iff `Theta` is inner); the
/// truncated `Theta` defect is reported alongside.
pub fn pure_iff_inner<R: Real>(tuple: &OperatorTuple<R>, d: &[usize], opts: &FactorizeOptions<R>) -> Result<PureInnerReport<R>> {
    let tol = opts.tol;
    let cf = char_function(tuple, d, opts)?;
    let purity = is_pure(tuple, tol, 10_000);
    let pure = Verdict::from_bool(purity.pure);
    let tail = tail_bound(tuple, d);
    let theta = cf.theta();
    let tt = theta * theta.adjoint();
    let theta_inner_defect = op_norm(&(&tt * &tt - &tt));
    let (inner, inner_defect, cnc) = match limit_gram(tuple, tol) {
        Some(g) => {
            let defect = op_norm(&(&g * &g - &g));
            let scale = herm_norm(&g).max(R::one());
            let cnc = Verdict::from_bool(min_eig(&g) > tol * scale);
            (Verdict::from_bool(defect <= lit::<R>(1e3) * tol * scale), defect, cnc)
        }
        None => (Verdict::NotCertified, R::zero(), Verdict::NotCertified),
    };
    let agreement = match (pure, inner) {
        (Verdict::NotCertified, _) | (_, Verdict::NotCertified) => Verdict::NotCertified,
        (a, b) if a == b => Verdict::True,
        _ if cnc == Verdict::True => Verdict::False,
        _ => Verdict::NotCertified,
    };
    let (equivalence_residual, range_residual) = if pure == Verdict::True {
        let k = &cf.kernel.matrix;
        let e = cf.kernel.defect_dim;
        let rows = cf.model.basis.interior_tensor_indices(1, e);
        let cols: Vec<usize> = (0..tuple.dim).collect();
        let mut worst = R::zero();
        for (i, group) in cf.model.left.iter().enumerate() {
            for (j, w) in group.iter().enumerate() {
                let diff = k * tuple.ops[i][j].adjoint() - w.adjoint_left_tensor(k, e);
                worst = worst.max(op_norm(&compress(&diff, &rows, &cols)));
            }
        }
        let p_h = identity::<R>(tt.nrows()) - &tt;
        (Some(worst), Some(op_norm(&(k * k.adjoint() - p_h))))
    } else {
        (None, None)
    };
    Ok(PureInnerReport {
        pure,
        inner,
        cnc,
        agreement,
        inner_defect,
        theta_inner_defect,
        tail,
        equivalence_residual,
        range_residual,
    })
}

#[derive(Clone, Debug)]
pub struct ModelSpace<R: Real> {
    /// `(I - Theta^* Theta)^{1/2}` on `fock (x) D_*`.
    pub delta_theta: CMat<R>,
    /// Basis of `closure(Delta_Theta (fock (x) D_*))`, columns in `fock (x) D_*`.
    pub delta_range: CMat<R>,
    /// `dim(fock (x) D)`; the ambient space is that block plus `delta_range`.
    pub fock_block: usize,
    pub projection: CMat<R>,
    /// `Gamma : H -> ambient` with `Gamma K^* g = P_H (g (+) 0)`.
    pub gamma: CMat<R>,
    pub ops: Vec<Vec<CMat<R>>>,
    /// `max(||Gamma^* Gamma - I||, ||Gamma Gamma^* - P_H||)`.
    pub unitary_residual: R,
    /// `||P_H (I - K (K^*K)^{-1} K^*) (+) 0||`; zero when `Gamma` is well defined.
    pub well_defined_residual: R,
    /// `||H perp {Theta phi (+) Delta phi}||`.
    pub orthogonality_residual: R,
    pub intertwine_residual: R,
}

pub fn model_space<R: Real>(tuple: &OperatorTuple<R>, d: &[usize], opts: &FactorizeOptions<R>) -> Result<ModelSpace<R>> {
    let tol = opts.tol;
    let cf = char_function(tuple, d, opts)?;
    let k = &cf.kernel.matrix;
    let gram = cf.kernel.gram();
    if tuple.dim > 0 && min_eig(&gram) <= tol * herm_norm(&gram).max(R::one()) {
        return Err(Error::Precondition("complete non-coisometry is not certified at this degree".into()));
    }
    let theta = cf.theta();
    let nd = theta.nrows();
    let ns = theta.ncols();
    let dt2 = identity::<R>(ns) - theta.ad_mul(theta);
    let (vals, vecs) = eigh(&dt2);
    let keep: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] > opts.eps_rank).collect();
    let delta_range = select_columns(&vecs, &keep);
    let mut rooted = delta_range.clone();
    for (c, &j) in keep.iter().enumerate() {
        let s = cr(vals[j].sqrt());
        for x in rooted.column_mut(c).iter_mut() {
            *x *= s;
        }
    }
    let delta_theta = &rooted * delta_range.adjoint();
    let z = delta_range.ncols();
    let amb = nd + z;
    let mut psi = zeros::<R>(amb, ns);
    psi.view_mut((0, 0), (nd, ns)).copy_from(theta);
    psi.view_mut((nd, 0), (z, ns)).copy_from(&delta_range.ad_mul(&delta_theta));
    let projection = identity::<R>(amb) - &psi * psi.adjoint();
    let mut iota = zeros::<R>(amb, nd);
    iota.view_mut((0, 0), (nd, nd)).copy_from(&identity(nd));
    let gram_inv = gram.clone().try_inverse().ok_or_else(|| Error::Precondition("K^*K is singular".into()))?;
    let lift = k * &gram_inv;
    let gamma = &projection * &iota * &lift;
    let unitary_residual = op_norm(&(gamma.ad_mul(&gamma) - identity::<R>(tuple.dim)))
        .max(op_norm(&(&gamma * gamma.adjoint() - &projection)));
    let well_defined_residual = op_norm(&(&projection * &iota * (identity::<R>(nd) - &lift * k.adjoint())));
    let orthogonality_residual = op_norm(&(&projection * &psi));
    let ops: Vec<Vec<CMat<R>>> = tuple.ops.iter().map(|g| g.iter().map(|t| &gamma * t * gamma.adjoint()).collect()).collect();
    let e = cf.defect_dim;
    let rows = cf.model.basis.interior_tensor_indices(1, e);
    let cols: Vec<usize> = (0..amb).collect();
    let j_ph = iota.adjoint() * &projection;
    let mut intertwine_residual = R::zero();
    for (i, group) in cf.model.left.iter().enumerate() {
        for (j, w) in group.iter().enumerate() {
            let lhs = iota.adjoint() * ops[i][j].adjoint() * &projection;
            let rhs = w.adjoint_left_tensor(&j_ph, e);
            intertwine_residual = intertwine_residual.max(op_norm(&compress(&(lhs - rhs), &rows, &cols)));
        }
    }
    Ok(ModelSpace {
        delta_theta,
        delta_range,
        fock_block: nd,
        projection,
        gamma,
        ops,
        unitary_residual,
        well_defined_residual,
        orthogonality_residual,
        intertwine_residual,
    })
}

#[derive(Clone, Debug)]
pub struct Coincidence<R: Real> {
    pub tau: CMat<R>,
    pub tau_star: CMat<R>,
    /// `max(||tau^* tau - I||, ||tau tau^* - I||)`.
    pub tau_unitary_residual: R,
    pub tau_star_unitary_residual: R,
    pub conjugation_residual: R,
    /// `||E((I (x) tau) Theta_A - Theta_B (I (x) tau_*))E||`.
    pub coincidence_residual: R,
}

fn unitary_defect<R: Real>(u: &CMat<R>) -> R {
    op_norm(&(u.ad_mul(u) - identity::<R>(u.ncols()))).max(op_norm(&(u * u.adjoint() - identity::<R>(u.nrows()))))
}

/// `tau = U|_D`, `tau_* = (I (x) tau)|_{D_*}` for `T_B = U T_A U^*`.
pub fn coincide_under_unitary<R: Real>(
    a: &OperatorTuple<R>,
    b: &OperatorTuple<R>,
    u: &CMat<R>,
    d: &[usize],
    opts: &FactorizeOptions<R>,
) -> Result<Coincidence<R>> {
    let conj = a.conjugated(u);
    let mut conjugation_residual = R::zero();
    for (ga, gb) in conj.ops.iter().zip(&b.ops) {
        for (x, y) in ga.iter().zip(gb) {
            conjugation_residual = conjugation_residual.max(op_norm(&(x - y)));
        }
    }
    let scale = a.max_norm().max(R::one());
    if unitary_defect(u) > opts.tol * lit(1e3) || conjugation_residual > opts.tol * lit(1e3) * scale {
        return Err(Error::Precondition("U is not a unitary conjugating T_A to T_B".into()));
    }
    let ca = char_function(a, d, opts)?;
    let cb = char_function(b, d, opts)?;
    let tau = cb.kernel.defect_basis.adjoint() * u * &ca.kernel.defect_basis;
    let n = ca.model.basis.dim;
    let lift = kron(&identity(n), &tau);
    let qa = &ca.factorization.kernel.defect_basis;
    let qb = &cb.factorization.kernel.defect_basis;
    let tau_star = qb.adjoint() * &lift * qa;
    let lhs = &lift * ca.theta();
    let rhs = cb.theta() * kron(&identity(n), &tau_star);
    let rows = ca.model.basis.interior_tensor_indices(opts.reserve, tau.nrows());
    let cols = ca.model.basis.interior_tensor_indices(opts.reserve, tau_star.ncols());
    let coincidence_residual = op_norm(&compress(&(lhs - rhs), &rows, &cols));
    Ok(Coincidence {
        tau_unitary_residual: unitary_defect(&tau),
        tau_star_unitary_residual: unitary_defect(&tau_star),
        tau,
        tau_star,
        conjugation_residual,
        coincidence_residual,
    })
}

pub const DEFAULT_DIL_DEG: usize = 3;

#[derive(Clone, Debug)]
pub struct Dilation<R: Real> {
    pub kernel: BerezinKernel<R>,
    /// `max ||(I - P)(W_{ij}^* (x) I) P||`, `P = KK^*`.
    pub coinvariance_residual: R,
    /// `max_{deg <= dil_deg} ||T_(alpha) - K^*(W_(alpha) (x) I)K||`.
    pub reconstruction_residual: R,
    /// `||E(I - P_span)E||` for the span of `(W_(alpha) (x) I) K H`.
    pub minimality_residual: R,
    pub dilation_index: usize,
    pub dil_deg: usize,
}

pub fn pure_dilation<R: Real>(tuple: &OperatorTuple<R>, d: &[usize], dil_deg: usize, tol: R, eps_rank: R) -> Result<Dilation<R>> {
    let model = FockModel::new(&tuple.spec, d)?;
    let kernel = berezin_kernel_on(tuple, &model, tol)?;
    let k = &kernel.matrix;
    let e = kernel.defect_dim;
    let p = k * k.adjoint();
    let comp = identity::<R>(p.nrows()) - &p;
    let mut coinvariance_residual = R::zero();
    for group in &model.left {
        for w in group {
            coinvariance_residual = coinvariance_residual.max(op_norm(&(&comp * w.adjoint_left_tensor(&p, e))));
        }
    }
    let caps: Vec<usize> = d.iter().map(|&di| di.min(dil_deg)).collect();
    let mut reconstruction_residual = R::zero();
    for mw in enumerate_multiwords(&tuple.spec.n, &caps) {
        if mw.total_degree() > dil_deg {
            continue;
        }
        let shifted = model.word_shift(&mw).left_tensor(k, e);
        let diff = tuple.multiword(&mw) - k.ad_mul(&shifted);
        reconstruction_residual = reconstruction_residual.max(op_norm(&diff));
    }
    let span = projector(&shift_closure(k, &model, e, eps_rank));
    let rows = model.basis.interior_tensor_indices(1, e);
    let minimality_residual = op_norm(&compress(&(identity::<R>(span.nrows()) - span), &rows, &rows));
    Ok(Dilation {
        dilation_index: e,
        kernel,
        coinvariance_residual,
        reconstruction_residual,
        minimality_residual,
        dil_deg,
    })
}
