//! Dense complex linear algebra helpers on top of nalgebra.

use crate::scalar::{cr, lit, CMat, Real, C};
use nalgebra::{ComplexField, DMatrix, SymmetricEigen};
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn identity<R: Real>(n: usize) -> CMat<R> {
    CMat::<R>::identity(n, n)
}

pub fn zeros<R: Real>(r: usize, c: usize) -> CMat<R> {
    CMat::<R>::zeros(r, c)
}

pub fn hermitian_part<R: Real>(m: &CMat<R>) -> CMat<R> {
    let half = cr(lit::<R>(0.5));
    (m + m.adjoint()) * half
}

/// Eigen-decomposition of the Hermitian part, eigenvalues ascending.
pub fn eigh<R: Real>(m: &CMat<R>) -> (Vec<R>, CMat<R>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

pub fn eigvalsh<R: Real>(m: &CMat<R>) -> Vec<R> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<R> = SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Smallest eigenvalue of the Hermitian part (`+inf`-free: 0 for empty).
pub fn min_eig<R: Real>(m: &CMat<R>) -> R {
    eigvalsh(m).first().copied().unwrap_or_else(R::zero)
}

pub fn max_eig<R: Real>(m: &CMat<R>) -> R {
    eigvalsh(m).last().copied().unwrap_or_else(R::zero)
}

/// Spectral norm (largest singular value).
pub fn op_norm<R: Real>(m: &CMat<R>) -> R {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return R::zero();
    }
    let scale = m.iter().map(|z| z.modulus()).fold(R::zero(), |a, b| if b > a { b } else { a });
    if scale == R::zero() {
        return R::zero();
    }
    let s = m / cr(scale);
    let gram = if r >= c { s.adjoint() * &s } else { &s * s.adjoint() };
    let top = max_eig(&gram);
    top.max(R::zero()).sqrt() * scale
}

/// Spectral norm of a Hermitian matrix.
pub fn herm_norm<R: Real>(m: &CMat<R>) -> R {
    let v = eigvalsh(m);
    match (v.first(), v.last()) {
        (Some(a), Some(b)) => a.abs().max(b.abs()),
        _ => R::zero(),
    }
}

/// Result of the scale-free PSD test `lambda_min >= -tol * max(1, ||H||)`.
#[derive(Clone, Copy, Debug)]
pub struct PsdTest<R> {
    pub pass: bool,
    pub min_eig: R,
    pub norm: R,
    pub threshold: R,
}

pub fn psd_test<R: Real>(h: &CMat<R>, tol: R) -> PsdTest<R> {
    let v = eigvalsh(h);
    let (lo, hi) = match (v.first(), v.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (R::zero(), R::zero()),
    };
    let norm = lo.abs().max(hi.abs());
    let threshold = -tol * norm.max(R::one());
    PsdTest { pass: lo >= threshold, min_eig: lo, norm, threshold }
}

/// Square root of a PSD matrix, negative eigenvalues clipped to zero.
pub fn sqrt_psd<R: Real>(h: &CMat<R>) -> CMat<R> {
    let (vals, vecs) = eigh(h);
    let mut scaled = vecs.clone();
    for (j, v) in vals.iter().enumerate() {
        let s = cr(v.max(R::zero()).sqrt());
        for x in scaled.column_mut(j).iter_mut() {
            *x *= s;
        }
    }
    &scaled * vecs.adjoint()
}

/// Orthonormal basis for the column space, singular values `<= eps_rel * sigma_max` dropped.
pub fn range_basis<R: Real>(m: &CMat<R>, eps_rel: R) -> CMat<R> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return zeros(r, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sv = &svd.singular_values;
    let top = sv.iter().copied().fold(R::zero(), |a, b| a.max(b));
    if top <= R::zero() {
        return zeros(r, 0);
    }
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > eps_rel * top).collect();
    select_columns(&u, &keep)
}

pub fn select_columns<R: Real>(m: &CMat<R>, cols: &[usize]) -> CMat<R> {
    let mut out = zeros(m.nrows(), cols.len());
    for (dst, &src) in cols.iter().enumerate() {
        out.set_column(dst, &m.column(src));
    }
    out
}

pub fn select_rows<R: Real>(m: &CMat<R>, rows: &[usize]) -> CMat<R> {
    let mut out = zeros(rows.len(), m.ncols());
    for (dst, &src) in rows.iter().enumerate() {
        out.set_row(dst, &m.row(src));
    }
    out
}

/// Orthogonal projection onto the span of orthonormal columns.
pub fn projector<R: Real>(basis: &CMat<R>) -> CMat<R> {
    basis * basis.adjoint()
}

pub fn kron<R: Real>(a: &CMat<R>, b: &CMat<R>) -> CMat<R> {
    a.kronecker(b)
}

pub fn block_diag<R: Real>(a: &CMat<R>, b: &CMat<R>) -> CMat<R> {
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// `||(A A)-A||`-style idempotence and `||A-A*||` defects of a projection candidate.
pub fn projection_defects<R: Real>(p: &CMat<R>) -> (R, R) {
    (op_norm(&(p * p - p)), op_norm(&(p - p.adjoint())))
}

pub fn random_gaussian<R: Real, G: Rng + ?Sized>(rng: &mut G, r: usize, c: usize) -> CMat<R> {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(r, c, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C::new(lit(re * half), lit(im * half))
    })
}

/// Haar-distributed unitary via QR with phase correction.
pub fn random_unitary<R: Real, G: Rng + ?Sized>(rng: &mut G, n: usize) -> CMat<R> {
    if n == 0 {
        return zeros(0, 0);
    }
    let g = random_gaussian::<R, G>(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let rm = qr.r();
    for j in 0..n {
        let d = rm[(j, j)];
        let a = d.modulus();
        let phase = if a > R::zero() { d / cr(a) } else { C::one() };
        for x in q.column_mut(j).iter_mut() {
            *x *= phase;
        }
    }
    q
}

pub fn scale<R: Real>(m: &CMat<R>, s: R) -> CMat<R> {
    m * cr(s)
}

pub fn is_zero_matrix<R: Real>(m: &CMat<R>) -> bool {
    m.iter().all(|z| z.is_zero())
}
