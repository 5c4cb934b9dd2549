//! Berezin kernels and transforms, free series evaluation, Hardy-norm
//! estimates, von Neumann checks and Cesàro operators.

use crate::coefficients::{binomial, PolydomainSpec};
use crate::defect::{defect_map, phi};
use crate::error::{Error, Result};
use crate::fock::{compress, FockModel, TruncatedFockBasis, DEFAULT_DIM_CAP};
use crate::linalg::{eigh, herm_norm, identity, op_norm, select_columns, select_rows, zeros};
use crate::scalar::{cr, lit, to_f64, CMat, Real, C};
use crate::tuple::{OperatorTuple, TupleAction};
use crate::words::MultiWord;
use num_traits::Zero;
use std::collections::BTreeMap;

/// `K h = sum_beta sqrt(b_beta) e_beta (x) Delta^{1/2} T_beta^* h` at a fixed
/// truncation, with the defect space in eigen-coordinates.
#[derive(Clone, Debug)]
pub struct BerezinKernel<R: Real> {
    pub degrees: Vec<usize>,
    pub fock_dim: usize,
    pub defect_dim: usize,
    /// Orthonormal basis of the defect space, `h x e`.
    pub defect_basis: CMat<R>,
    pub defect_eigs: Vec<R>,
    /// `Delta^{1/2}` in defect coordinates, `e x h`.
    pub defect_root: CMat<R>,
    /// `(fock_dim * e) x h`, fock index major.
    pub matrix: CMat<R>,
}

impl<R: Real> BerezinKernel<R> {
    pub fn gram(&self) -> CMat<R> {
        self.matrix.ad_mul(&self.matrix)
    }

    pub fn range_projection_candidate(&self) -> CMat<R> {
        &self.matrix * self.matrix.adjoint()
    }

    /// Rows `c, c+e, c+2e, ...` as an `N x h` matrix.
    pub fn slice(&self, c: usize) -> CMat<R> {
        let rows: Vec<usize> = (0..self.fock_dim).map(|b| b * self.defect_dim + c).collect();
        select_rows(&self.matrix, &rows)
    }
}

/// Spectral defect root with clipping: eigenvalues below `-tol*scale`
/// reject the input, those with `|lambda| <= tol*scale` are dropped.
pub fn defect_root<R: Real>(delta: &CMat<R>, tol: R) -> Result<(CMat<R>, Vec<R>, CMat<R>)> {
    let (vals, vecs) = eigh(delta);
    let scale = herm_norm(delta).max(R::one());
    if let Some(&lo) = vals.first() {
        if lo < -tol * scale {
            return Err(Error::NotMember(format!("Delta^m(I) has eigenvalue {:.3e}", to_f64(lo))));
        }
    }
    let keep: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] > tol * scale).collect();
    let basis = select_columns(&vecs, &keep);
    let eigs: Vec<R> = keep.iter().map(|&j| vals[j]).collect();
    let mut root = basis.adjoint();
    for (r, v) in eigs.iter().enumerate() {
        let s = cr(v.sqrt());
        for x in root.row_mut(r).iter_mut() {
            *x *= s;
        }
    }
    Ok((basis, eigs, root))
}

pub fn berezin_kernel<R: Real>(tuple: &OperatorTuple<R>, d: &[usize], tol: R) -> Result<BerezinKernel<R>> {
    let model = FockModel::new(&tuple.spec, d)?;
    berezin_kernel_on(tuple, &model, tol)
}

/// Kernel on a prebuilt model; rows follow `R_beta = R_parent T_{i,j}^*`.
pub fn berezin_kernel_on<R: Real, A: TupleAction<R> + ?Sized>(
    tuple: &A,
    model: &FockModel<R>,
    tol: R,
) -> Result<BerezinKernel<R>> {
    let delta = defect_map(tuple, &identity(tuple.dim()), &tuple.spec().m);
    defect_kernel_on(tuple, model, &delta, tol)
}

/// Kernel with `Delta^{1/2}` replaced by the root of a given positive
/// defect `delta`: rows `sqrt(b_beta) delta^{1/2} T_beta^*`.
pub fn defect_kernel_on<R: Real, A: TupleAction<R> + ?Sized>(
    tuple: &A,
    model: &FockModel<R>,
    delta: &CMat<R>,
    tol: R,
) -> Result<BerezinKernel<R>> {
    let h = tuple.dim();
    let (basis_d, eigs, root) = defect_root(delta, tol)?;
    let e = eigs.len();
    let n = model.basis.dim;
    let mut matrix = zeros(n * e, h);
    if e > 0 {
        let mut rows: Vec<CMat<R>> = Vec::with_capacity(n);
        rows.push(root.clone());
        for idx in 1..n {
            let (i, j, parent) = model.basis.parent(idx).expect("non-vacuum index has a parent");
            let adj = tuple.left(i, j - 1, &rows[parent].adjoint());
            rows.push(adj.adjoint());
        }
        for (idx, r) in rows.iter().enumerate() {
            let w = cr(model.weight(idx));
            matrix.view_mut((idx * e, 0), (e, h)).copy_from(&(r * w));
        }
    }
    Ok(BerezinKernel {
        degrees: model.basis.degrees.clone(),
        fock_dim: n,
        defect_dim: e,
        defect_basis: basis_d,
        defect_eigs: eigs,
        defect_root: root,
        matrix,
    })
}

/// `K^* (g (x) I) K` for `g` acting on the truncated Fock space.
pub fn berezin_transform<R: Real>(kernel: &BerezinKernel<R>, g: &CMat<R>) -> Result<CMat<R>> {
    if g.nrows() != kernel.fock_dim || g.ncols() != kernel.fock_dim {
        return Err(Error::Shape(format!("g is {}x{}, fock dim {}", g.nrows(), g.ncols(), kernel.fock_dim)));
    }
    let h = kernel.matrix.ncols();
    let mut out = zeros(h, h);
    for c in 0..kernel.defect_dim {
        let s = kernel.slice(c);
        out += s.ad_mul(&(g * &s));
    }
    Ok(out)
}

/// Per `(i,j)`: `||(E (x) I)(K T_{ij}^* - (W_{ij}^* (x) I) K)||`, `E` the
/// interior with reserve 1.
pub fn intertwine_residual<R: Real>(
    tuple: &OperatorTuple<R>,
    kernel: &BerezinKernel<R>,
    model: &FockModel<R>,
) -> Vec<Vec<R>> {
    let e = kernel.defect_dim;
    let rows = model.basis.interior_tensor_indices(1, e);
    let cols: Vec<usize> = (0..tuple.dim).collect();
    (0..tuple.k())
        .map(|i| {
            (0..tuple.spec.n[i])
                .map(|j| {
                    let lhs = &kernel.matrix * tuple.ops[i][j].adjoint();
                    let rhs = model.left[i][j].adjoint_left_tensor(&kernel.matrix, e);
                    op_norm(&compress(&(lhs - rhs), &rows, &cols))
                })
                .collect()
        })
        .collect()
}

/// Finitely supported series `sum c_beta Z_beta` over k free semigroups.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeSeries<R: Real> {
    pub arities: Vec<usize>,
    pub coeffs: BTreeMap<MultiWord, C<R>>,
}

impl<R: Real> FreeSeries<R> {
    pub fn new(arities: Vec<usize>) -> Self {
        FreeSeries { arities, coeffs: BTreeMap::new() }
    }

    pub fn constant(arities: Vec<usize>, c: C<R>) -> Self {
        let k = arities.len();
        let mut s = Self::new(arities);
        s.add_term(MultiWord::identity(k), c);
        s
    }

    pub fn add_term(&mut self, mw: MultiWord, c: C<R>) {
        let e = self.coeffs.entry(mw).or_insert_with(C::zero);
        *e += c;
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(MultiWord::total_degree).max().unwrap_or(0)
    }

    pub fn max_factor_degree(&self) -> usize {
        self.coeffs
            .keys()
            .flat_map(|mw| mw.parts().iter().map(|w| w.len()))
            .max()
            .unwrap_or(0)
    }

    /// Homogeneous part of total degree `n`.
    pub fn homogeneous(&self, n: usize) -> Self {
        FreeSeries {
            arities: self.arities.clone(),
            coeffs: self.coeffs.iter().filter(|(mw, _)| mw.total_degree() == n).map(|(a, b)| (a.clone(), *b)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for mw in self.coeffs.keys() {
            if !mw.fits(&self.arities) {
                return Err(Error::Parse(format!("series term {mw:?} does not fit arities {:?}", self.arities)));
            }
        }
        Ok(())
    }
}

/// `sum_beta r^{|beta|} c_beta X_beta`.
pub fn eval_series<R: Real, A: TupleAction<R> + ?Sized>(phi_s: &FreeSeries<R>, action: &A, r: R) -> CMat<R> {
    let eye = identity(action.dim());
    let mut out = zeros(action.dim(), action.dim());
    for (mw, c) in &phi_s.coeffs {
        let s = *c * cr(r.powi(mw.total_degree() as i32));
        out += action.multiword_left(mw, &eye) * s;
    }
    out
}

/// `phi(rW)` on the truncated model, assembled from sparse word shifts.
pub fn eval_series_on_model<R: Real>(phi_s: &FreeSeries<R>, model: &FockModel<R>, r: R) -> CMat<R> {
    let n = model.basis.dim;
    let mut out = zeros(n, n);
    for (mw, c) in &phi_s.coeffs {
        let s = *c * cr(r.powi(mw.total_degree() as i32));
        for (col, entry) in model.word_shift(mw).map.iter().enumerate() {
            if let Some((row, w)) = entry {
                out[(*row, col)] += s * cr(*w);
            }
        }
    }
    out
}

/// `||phi(rW)||` for every `r` in the grid.
pub fn hardy_norm_estimate<R: Real>(
    phi_s: &FreeSeries<R>,
    spec: &PolydomainSpec<R>,
    d: &[usize],
    r_grid: &[R],
) -> Result<Vec<R>> {
    let model = FockModel::new(spec, d)?;
    Ok(r_grid.iter().map(|&r| op_norm(&eval_series_on_model(phi_s, &model, r))).collect())
}

pub fn is_nondecreasing<R: Real>(v: &[R], tol: R) -> bool {
    v.windows(2).all(|w| w[1] >= w[0] - tol * w[0].abs().max(R::one()))
}

#[derive(Clone, Debug)]
pub struct RadiusCheck<R: Real> {
    pub verdict: bool,
    /// `||H_n(W)||^{1/n}` for `n = 1..=d`.
    pub roots: Vec<R>,
    pub window_max: R,
}

/// Root test on homogeneous parts over the tail window `n in (d/2, d]`; an
/// all-zero window means the root sequence vanishes there.
pub fn radius_check<R: Real>(phi_s: &FreeSeries<R>, spec: &PolydomainSpec<R>, d: usize, tol: R) -> Result<RadiusCheck<R>> {
    let model = FockModel::new(spec, &vec![d; spec.k()])?;
    let mut roots = Vec::with_capacity(d);
    for n in 1..=d {
        let part = phi_s.homogeneous(n);
        let norm = op_norm(&eval_series_on_model(&part, &model, R::one()));
        roots.push(if norm > R::zero() { norm.powf(R::one() / lit(n as f64)) } else { R::zero() });
    }
    let window_max = roots[d / 2..].iter().copied().fold(R::zero(), |a, b| a.max(b));
    Ok(RadiusCheck { verdict: window_max <= R::one() + tol, roots, window_max })
}

/// A sum `sum_gamma p_gamma q_gamma^*` of polynomial products.
pub type PolyPairs<R> = Vec<(FreeSeries<R>, FreeSeries<R>)>;

#[derive(Clone, Debug)]
pub struct VonNeumannResult<R: Real> {
    pub max_violation: R,
    pub lhs: Vec<R>,
    pub rhs: Vec<R>,
    pub reserve: usize,
}

/// `max_s ||S_s(T)|| - ||E S_s(W) E||` with `S = sum p_gamma q_gamma^*`, `E`
/// reserving the largest per-factor polynomial degree.
pub fn von_neumann_check<R: Real>(
    tuple: &OperatorTuple<R>,
    samples: &[PolyPairs<R>],
    d: &[usize],
) -> Result<VonNeumannResult<R>> {
    let model = FockModel::new(&tuple.spec, d)?;
    let reserve = samples
        .iter()
        .flatten()
        .flat_map(|(p, q)| [p.max_factor_degree(), q.max_factor_degree()])
        .max()
        .unwrap_or(0);
    if d.iter().any(|&di| di < reserve) {
        return Err(Error::Precondition(format!("degree {d:?} below polynomial reserve {reserve}")));
    }
    let interior = model.basis.interior_indices(reserve);
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let mut worst = R::min_value().unwrap_or_else(|| -R::one());
    for sample in samples {
        let mut st = zeros(tuple.dim, tuple.dim);
        let mut sw = zeros(model.basis.dim, model.basis.dim);
        for (p, q) in sample {
            st += eval_series(p, tuple, R::one()) * eval_series(q, tuple, R::one()).adjoint();
            sw += eval_series_on_model(p, &model, R::one()) * eval_series_on_model(q, &model, R::one()).adjoint();
        }
        let l = op_norm(&st);
        let r = op_norm(&compress(&sw, &interior, &interior));
        worst = worst.max(l - r);
        lhs.push(l);
        rhs.push(r);
    }
    Ok(VonNeumannResult { max_violation: worst, lhs, rhs, reserve })
}

fn cesaro_weight<R: Real>(da: usize, db: usize, n: usize) -> R {
    let j = da.abs_diff(db) as f64;
    lit::<R>((1.0 - j / n as f64).max(0.0))
}

/// `chi_n(A) = sum_{|j|<n} (1 - |j|/n) Gamma_j(A)` over total-degree bands.
pub fn cesaro<R: Real>(a: &CMat<R>, basis: &TruncatedFockBasis, n: usize) -> Result<CMat<R>> {
    check_square(a, basis)?;
    if n == 0 {
        return Err(Error::Precondition("Cesàro index must be positive".into()));
    }
    let deg: Vec<usize> = (0..basis.dim).map(|i| basis.total_degree(i)).collect();
    Ok(CMat::from_fn(basis.dim, basis.dim, |r, c| a[(r, c)] * cr(cesaro_weight::<R>(deg[r], deg[c], n))))
}

/// Inverse of `chi_n` when every present band has a positive weight
/// (`n` above the largest total degree).
pub fn cesaro_inverse<R: Real>(b: &CMat<R>, basis: &TruncatedFockBasis, n: usize) -> Result<CMat<R>> {
    check_square(b, basis)?;
    if n <= basis.max_total_degree() {
        return Err(Error::Precondition(format!(
            "n={n} must exceed the largest total degree {}",
            basis.max_total_degree()
        )));
    }
    let deg: Vec<usize> = (0..basis.dim).map(|i| basis.total_degree(i)).collect();
    Ok(CMat::from_fn(basis.dim, basis.dim, |r, c| b[(r, c)] / cr(cesaro_weight::<R>(deg[r], deg[c], n))))
}

fn check_square<R: Real>(a: &CMat<R>, basis: &TruncatedFockBasis) -> Result<()> {
    if a.nrows() != basis.dim || a.ncols() != basis.dim {
        return Err(Error::Shape(format!("operator is {}x{}, fock dim {}", a.nrows(), a.ncols(), basis.dim)));
    }
    Ok(())
}

/// `sum_{p >= start} C(p+m-1, m-1) rho2^p` for `rho2 < 1`.
pub fn tail_series(start: usize, m: usize, rho2: f64) -> f64 {
    if rho2 <= 0.0 {
        return if start == 0 { 1.0 } else { 0.0 };
    }
    if rho2 >= 1.0 {
        return f64::INFINITY;
    }
    let mut total = 0.0;
    let mut p = start;
    loop {
        let term = binomial::<f64>(p + m - 1, m - 1) * rho2.powi(p as i32);
        total += term;
        let ratio = (p + m) as f64 / (p + 1) as f64 * rho2;
        if (term <= 1e-18 * total || term < 1e-300) && ratio < 1.0 {
            break;
        }
        p += 1;
        if p > start + 100_000 {
            return f64::INFINITY;
        }
    }
    total
}

/// `rho_i^2 = ||Phi_i(I)||` for each group.
pub fn contraction_levels<R: Real>(tuple: &OperatorTuple<R>) -> Vec<f64> {
    let eye = identity(tuple.dim);
    (0..tuple.k()).map(|i| to_f64(herm_norm(&phi(tuple, i, &eye)))).collect()
}

/// Per-group bounds on `||I - K_d^* K_d||` for pure members; `None` when some
/// `||Phi_i(I)|| >= 1`.
pub fn tail_bounds<R: Real>(tuple: &OperatorTuple<R>, d: &[usize]) -> Option<Vec<f64>> {
    let rho2 = contraction_levels(tuple);
    if rho2.iter().any(|&r| r >= 1.0) {
        return None;
    }
    Some(
        (0..tuple.k())
            .map(|i| {
                let deg = tuple.spec.q[i].degree().max(1);
                let start = (d[i] + 1).div_ceil(deg);
                tail_series(start, tuple.spec.m[i], rho2[i])
            })
            .collect(),
    )
}

pub fn tail_bound<R: Real>(tuple: &OperatorTuple<R>, d: &[usize]) -> Option<f64> {
    tail_bounds(tuple, d).map(|v| v.iter().sum())
}

/// Smallest per-group degrees with tail below `tol / k`, within the
/// dimension cap.
pub fn choose_degree<R: Real>(tuple: &OperatorTuple<R>, tol: f64, cap: usize) -> Result<Vec<usize>> {
    let rho2 = contraction_levels(tuple);
    let k = tuple.k();
    let mut d = Vec::with_capacity(k);
    for i in 0..k {
        if rho2[i] >= 1.0 {
            return Err(Error::NoTailBound(format!("||Phi_{}(I)|| = {:.6} is not below 1", i + 1, rho2[i])));
        }
        let deg = tuple.spec.q[i].degree().max(1);
        let mut di: usize = 0;
        loop {
            let start = (di + 1).div_ceil(deg);
            if tail_series(start, tuple.spec.m[i], rho2[i]) <= tol / k as f64 {
                break;
            }
            di += 1;
            if crate::words::word_count(tuple.spec.n[i], di) > cap {
                return Err(Error::DimensionCap { dim: crate::words::word_count(tuple.spec.n[i], di), cap });
            }
        }
        d.push(di);
    }
    TruncatedFockBasis::new(&tuple.spec.n, &d, cap)?;
    Ok(d)
}

pub fn choose_degree_default<R: Real>(tuple: &OperatorTuple<R>, tol: f64) -> Result<Vec<usize>> {
    choose_degree(tuple, tol, DEFAULT_DIM_CAP)
}
