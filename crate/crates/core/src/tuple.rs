//! Operator tuples `T = (T_1, ..., T_k)`, `T_i = (T_{i,1}, ..., T_{i,n_i})`,
//! with commuting entries across groups.

use crate::coefficients::{validate, PolydomainSpec};
use crate::error::{Error, Result};
use crate::linalg::{block_diag, identity, op_norm};
use crate::scalar::{cr, lit, CMat, Real};
use crate::words::{MultiWord, Word};

/// Left multiplication by the entries of a tuple on a space of dimension `dim()`.
///
/// Group and generator indices are 0-based; word letters are 1-based.
pub trait TupleAction<R: Real> {
    fn dim(&self) -> usize;
    fn spec(&self) -> &PolydomainSpec<R>;
    /// `X_{i,j} m`.
    fn left(&self, i: usize, j: usize, m: &CMat<R>) -> CMat<R>;
    /// `X_{i,j}^* m`.
    fn adjoint_left(&self, i: usize, j: usize, m: &CMat<R>) -> CMat<R>;

    /// `X_{i,w} m` with `X_{i,w} = X_{i,w_1} ... X_{i,w_p}`.
    fn word_left(&self, i: usize, w: &Word, m: &CMat<R>) -> CMat<R> {
        let mut r = m.clone();
        for &l in w.letters().iter().rev() {
            r = self.left(i, l - 1, &r);
        }
        r
    }

    /// `X_{i,w}^* m`.
    fn word_adjoint_left(&self, i: usize, w: &Word, m: &CMat<R>) -> CMat<R> {
        let mut r = m.clone();
        for &l in w.letters() {
            r = self.adjoint_left(i, l - 1, &r);
        }
        r
    }

    /// `X_{(beta)} m = X_{1,beta_1} ... X_{k,beta_k} m`.
    fn multiword_left(&self, mw: &MultiWord, m: &CMat<R>) -> CMat<R> {
        let mut r = m.clone();
        for (i, w) in mw.parts().iter().enumerate().rev() {
            r = self.word_left(i, w, &r);
        }
        r
    }

    /// `X_{i,w} Y X_{i,w}^*`.
    fn conjugate_word(&self, i: usize, w: &Word, y: &CMat<R>) -> CMat<R> {
        let a = self.word_left(i, w, &y.adjoint());
        self.word_left(i, w, &a.adjoint())
    }
}

#[derive(Clone, Debug)]
pub struct OperatorTuple<R: Real> {
    pub spec: PolydomainSpec<R>,
    pub dim: usize,
    pub ops: Vec<Vec<CMat<R>>>,
}

impl<R: Real> OperatorTuple<R> {
    /// Checks the spec and the shapes; cross-group commutation is checked
    /// separately by [`OperatorTuple::check_commutation`].
    pub fn new(spec: PolydomainSpec<R>, ops: Vec<Vec<CMat<R>>>) -> Result<Self> {
        let report = validate(&spec);
        if !report.valid {
            return Err(Error::InvalidSpec(report.issues.join("; ")));
        }
        if ops.len() != spec.k() {
            return Err(Error::Shape(format!("{} groups for k={}", ops.len(), spec.k())));
        }
        let dim = ops.first().and_then(|g| g.first()).map(|m| m.nrows()).unwrap_or(0);
        for (i, g) in ops.iter().enumerate() {
            if g.len() != spec.n[i] {
                return Err(Error::Shape(format!("group {} has {} entries, n={}", i + 1, g.len(), spec.n[i])));
            }
            for m in g {
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::Shape(format!("expected {dim}x{dim}, got {}x{}", m.nrows(), m.ncols())));
                }
            }
        }
        Ok(OperatorTuple { spec, dim, ops })
    }

    pub fn new_unchecked(spec: PolydomainSpec<R>, dim: usize, ops: Vec<Vec<CMat<R>>>) -> Self {
        OperatorTuple { spec, dim, ops }
    }

    /// Scalar tuple on `C^1`.
    pub fn scalars(spec: PolydomainSpec<R>, values: Vec<Vec<crate::scalar::C<R>>>) -> Result<Self> {
        let ops = values
            .into_iter()
            .map(|g| g.into_iter().map(|z| CMat::<R>::from_element(1, 1, z)).collect())
            .collect();
        Self::new(spec, ops)
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    pub fn max_norm(&self) -> R {
        self.ops.iter().flatten().map(op_norm).fold(R::zero(), |a, b| a.max(b))
    }

    /// Default commutation tolerance `1e-10 * max ||T||^2`.
    pub fn default_comm_tol(&self) -> R {
        let s = self.max_norm();
        lit::<R>(1e-10) * s * s
    }

    /// `max ||T_{p,a} T_{q,b} - T_{q,b} T_{p,a}||` over `p != q`.
    pub fn commutator_defect(&self) -> R {
        let mut worst = R::zero();
        for p in 0..self.k() {
            for q in p + 1..self.k() {
                for a in &self.ops[p] {
                    for b in &self.ops[q] {
                        worst = worst.max(op_norm(&(a * b - b * a)));
                    }
                }
            }
        }
        worst
    }

    /// `max ||T_{p,a} T_{q,b}^* - T_{q,b}^* T_{p,a}||` over `p != q`.
    pub fn double_commutator_defect(&self) -> R {
        let mut worst = R::zero();
        for p in 0..self.k() {
            for q in 0..self.k() {
                if p == q {
                    continue;
                }
                for a in &self.ops[p] {
                    for b in &self.ops[q] {
                        let bs = b.adjoint();
                        worst = worst.max(op_norm(&(a * &bs - &bs * a)));
                    }
                }
            }
        }
        worst
    }

    /// Rejects tuples whose cross-group commutators exceed `comm_tol`
    /// (default `1e-10 * max ||T||^2`). Returns the measured defect.
    pub fn check_commutation(&self, comm_tol: Option<R>) -> Result<R> {
        let tol = comm_tol.unwrap_or_else(|| self.default_comm_tol());
        let v = self.commutator_defect();
        if v > tol {
            return Err(Error::Commutation { value: crate::scalar::to_f64(v), tol: crate::scalar::to_f64(tol) });
        }
        Ok(v)
    }

    pub fn scaled(&self, r: R) -> Self {
        let s = cr(r);
        self.map_ops(|m| m * s)
    }

    /// Per-group scaling `r_i T_i`.
    pub fn scaled_groups(&self, r: &[R]) -> Self {
        let ops = self
            .ops
            .iter()
            .zip(r)
            .map(|(g, &ri)| g.iter().map(|m| m * cr(ri)).collect())
            .collect();
        OperatorTuple { spec: self.spec.clone(), dim: self.dim, ops }
    }

    /// `U T U^*`.
    pub fn conjugated(&self, u: &CMat<R>) -> Self {
        let us = u.adjoint();
        self.map_ops(|m| u * m * &us)
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| block_diag(x, y)).collect())
            .collect();
        OperatorTuple { spec: self.spec.clone(), dim: self.dim + other.dim, ops }
    }

    pub fn map_ops(&self, f: impl Fn(&CMat<R>) -> CMat<R>) -> Self {
        let ops = self.ops.iter().map(|g| g.iter().map(&f).collect()).collect();
        OperatorTuple { spec: self.spec.clone(), dim: self.dim, ops }
    }

    /// `T_{i,w}` as a dense matrix.
    pub fn word(&self, i: usize, w: &Word) -> CMat<R> {
        self.word_left(i, w, &identity(self.dim))
    }

    /// `T_{1,alpha_1} ... T_{k,alpha_k}`.
    pub fn multiword(&self, mw: &MultiWord) -> CMat<R> {
        self.multiword_left(mw, &identity(self.dim))
    }
}

impl<R: Real> TupleAction<R> for OperatorTuple<R> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn spec(&self) -> &PolydomainSpec<R> {
        &self.spec
    }
    fn left(&self, i: usize, j: usize, m: &CMat<R>) -> CMat<R> {
        &self.ops[i][j] * m
    }
    fn adjoint_left(&self, i: usize, j: usize, m: &CMat<R>) -> CMat<R> {
        self.ops[i][j].ad_mul(m)
    }
}

/// Tensor-product tuple: group `i` acts on its own factor `C^{dims[i]}`.
pub fn tensor_tuple<R: Real>(spec: PolydomainSpec<R>, factors: &[Vec<CMat<R>>]) -> Result<OperatorTuple<R>> {
    let dims: Vec<usize> = factors
        .iter()
        .map(|g| g.first().map(|m| m.nrows()).unwrap_or(1))
        .collect();
    let ops = factors
        .iter()
        .enumerate()
        .map(|(i, g)| {
            g.iter()
                .map(|a| {
                    let mut acc = identity::<R>(1);
                    for (p, &dp) in dims.iter().enumerate() {
                        let f = if p == i { a.clone() } else { identity(dp) };
                        acc = acc.kronecker(&f);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    OperatorTuple::new(spec, ops)
}
