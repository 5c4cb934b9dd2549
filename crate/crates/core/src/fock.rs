//! Truncated tensor products of full Fock spaces and the universal model
//! `W_{i,j}` (weighted left creation) and `Lambda_{i,j}` (weighted right
//! creation), compressed to the cut space.

use crate::coefficients::PolydomainSpec;
use crate::error::{Error, Result};
use crate::linalg::zeros;
use crate::scalar::{cr, CMat, Real};
use crate::tuple::{OperatorTuple, TupleAction};
use crate::words::{enumerate_words, MultiWord, Word};
use serde::{Deserialize, Serialize};

pub const DEFAULT_DIM_CAP: usize = 20_000;
const NONE: usize = usize::MAX;

/// Ordered basis `e_{beta_1} (x) ... (x) e_{beta_k}` with `|beta_i| <= d_i`,
/// first factor major.
#[derive(Clone, Debug)]
pub struct TruncatedFockBasis {
    pub arities: Vec<usize>,
    pub degrees: Vec<usize>,
    pub factor_words: Vec<Vec<Word>>,
    pub strides: Vec<usize>,
    pub dim: usize,
    left_child: Vec<Vec<usize>>,
    right_child: Vec<Vec<usize>>,
    drop_first: Vec<Vec<usize>>,
    first_letter: Vec<Vec<usize>>,
}

impl TruncatedFockBasis {
    pub fn new(arities: &[usize], degrees: &[usize], cap: usize) -> Result<Self> {
        if arities.len() != degrees.len() || arities.is_empty() {
            return Err(Error::Shape(format!(
                "{} arities vs {} degrees",
                arities.len(),
                degrees.len()
            )));
        }
        let mut dim: usize = 1;
        for (&n, &d) in arities.iter().zip(degrees) {
            let c = crate::words::word_count(n, d);
            dim = dim.checked_mul(c).ok_or(Error::DimensionCap { dim: usize::MAX, cap })?;
            if dim > cap {
                return Err(Error::DimensionCap { dim, cap });
            }
        }
        let factor_words: Vec<Vec<Word>> =
            arities.iter().zip(degrees).map(|(&n, &d)| enumerate_words(n, d)).collect();
        let k = arities.len();
        let mut strides = vec![1; k];
        for i in (0..k.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factor_words[i + 1].len();
        }
        let mut left_child = Vec::with_capacity(k);
        let mut right_child = Vec::with_capacity(k);
        let mut drop_first = Vec::with_capacity(k);
        let mut first_letter = Vec::with_capacity(k);
        for (i, words) in factor_words.iter().enumerate() {
            let n = arities[i];
            let d = degrees[i];
            let mut lc = vec![NONE; words.len() * n];
            let mut rc = vec![NONE; words.len() * n];
            let mut df = vec![NONE; words.len()];
            let mut fl = vec![0; words.len()];
            for (a, w) in words.iter().enumerate() {
                if w.len() < d {
                    for j in 1..=n {
                        lc[a * n + j - 1] = w.prepend(j).graded_index(n);
                        rc[a * n + j - 1] = w.append(j).graded_index(n);
                    }
                }
                if let Some((&f, rest)) = w.letters().split_first() {
                    fl[a] = f;
                    df[a] = Word::new(rest.to_vec()).graded_index(n);
                }
            }
            left_child.push(lc);
            right_child.push(rc);
            drop_first.push(df);
            first_letter.push(fl);
        }
        Ok(TruncatedFockBasis {
            arities: arities.to_vec(),
            degrees: degrees.to_vec(),
            factor_words,
            strides,
            dim,
            left_child,
            right_child,
            drop_first,
            first_letter,
        })
    }

    pub fn k(&self) -> usize {
        self.arities.len()
    }

    /// Per-factor word indices of basis vector `idx`.
    pub fn components(&self, idx: usize) -> Vec<usize> {
        (0..self.k()).map(|i| self.component(idx, i)).collect()
    }

    #[inline]
    pub fn component(&self, idx: usize, i: usize) -> usize {
        (idx / self.strides[i]) % self.factor_words[i].len()
    }

    pub fn index_of(&self, mw: &MultiWord) -> Option<usize> {
        if mw.k() != self.k() {
            return None;
        }
        let mut idx = 0;
        for (i, w) in mw.parts().iter().enumerate() {
            if w.len() > self.degrees[i] || !w.fits_arity(self.arities[i]) {
                return None;
            }
            idx += w.graded_index(self.arities[i]) * self.strides[i];
        }
        Some(idx)
    }

    pub fn multiword(&self, idx: usize) -> MultiWord {
        MultiWord((0..self.k()).map(|i| self.factor_words[i][self.component(idx, i)].clone()).collect())
    }

    pub fn factor_degree(&self, idx: usize, i: usize) -> usize {
        self.factor_words[i][self.component(idx, i)].len()
    }

    pub fn total_degree(&self, idx: usize) -> usize {
        (0..self.k()).map(|i| self.factor_degree(idx, i)).sum()
    }

    pub fn max_total_degree(&self) -> usize {
        self.degrees.iter().sum()
    }

    /// Indices of basis vectors with every factor degree `<= d_i - reserve`.
    pub fn interior_indices(&self, reserve: usize) -> Vec<usize> {
        (0..self.dim)
            .filter(|&idx| (0..self.k()).all(|i| self.factor_degree(idx, i) + reserve <= self.degrees[i]))
            .collect()
    }

    /// Interior indices in `fock (x) C^e`, coefficient index fastest.
    pub fn interior_tensor_indices(&self, reserve: usize, e: usize) -> Vec<usize> {
        self.interior_indices(reserve)
            .into_iter()
            .flat_map(|b| (0..e).map(move |c| b * e + c))
            .collect()
    }

    /// Index of `g_j alpha` in factor `i` for the basis vector `idx`, if it fits.
    pub fn left_child(&self, idx: usize, i: usize, j: usize) -> Option<usize> {
        let a = self.component(idx, i);
        let c = self.left_child[i][a * self.arities[i] + j];
        (c != NONE).then(|| idx - a * self.strides[i] + c * self.strides[i])
    }

    pub fn right_child(&self, idx: usize, i: usize, j: usize) -> Option<usize> {
        let a = self.component(idx, i);
        let c = self.right_child[i][a * self.arities[i] + j];
        (c != NONE).then(|| idx - a * self.strides[i] + c * self.strides[i])
    }

    /// For a non-vacuum basis vector: `(factor i, letter j, parent)` where the
    /// parent drops the first letter of the first nonempty factor word.
    pub fn parent(&self, idx: usize) -> Option<(usize, usize, usize)> {
        for i in 0..self.k() {
            let a = self.component(idx, i);
            let p = self.drop_first[i][a];
            if p != NONE {
                let parent = idx - a * self.strides[i] + p * self.strides[i];
                return Some((i, self.first_letter[i][a], parent));
            }
        }
        None
    }
}

pub fn build_basis<C>(spec: &PolydomainSpec<C>, d: &[usize]) -> Result<TruncatedFockBasis> {
    TruncatedFockBasis::new(&spec.n, d, DEFAULT_DIM_CAP)
}

/// Descriptor of the space a [`LinOp`] acts on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Fock { arities: Vec<usize>, degrees: Vec<usize> },
    FockTensor { arities: Vec<usize>, degrees: Vec<usize>, coeff_dim: usize },
    Plain { dim: usize },
}

impl Space {
    pub fn fock(basis: &TruncatedFockBasis) -> Self {
        Space::Fock { arities: basis.arities.clone(), degrees: basis.degrees.clone() }
    }

    pub fn fock_tensor(basis: &TruncatedFockBasis, coeff_dim: usize) -> Self {
        Space::FockTensor {
            arities: basis.arities.clone(),
            degrees: basis.degrees.clone(),
            coeff_dim,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Space::Fock { arities, degrees } => fock_dim(arities, degrees),
            Space::FockTensor { arities, degrees, coeff_dim } => fock_dim(arities, degrees) * coeff_dim,
            Space::Plain { dim } => *dim,
        }
    }
}

fn fock_dim(arities: &[usize], degrees: &[usize]) -> usize {
    arities.iter().zip(degrees).map(|(&n, &d)| crate::words::word_count(n, d)).product()
}

/// Dense matrix tagged with domain and codomain descriptors.
#[derive(Clone, Debug)]
pub struct LinOp<R: Real> {
    pub matrix: CMat<R>,
    pub domain: Space,
    pub codomain: Space,
}

impl<R: Real> LinOp<R> {
    pub fn new(matrix: CMat<R>, domain: Space, codomain: Space) -> Result<Self> {
        if matrix.ncols() != domain.dim() || matrix.nrows() != codomain.dim() {
            return Err(Error::Shape(format!(
                "matrix {}x{} does not match spaces {}->{}",
                matrix.nrows(),
                matrix.ncols(),
                domain.dim(),
                codomain.dim()
            )));
        }
        Ok(LinOp { matrix, domain, codomain })
    }

    pub fn on_fock(matrix: CMat<R>, basis: &TruncatedFockBasis) -> Self {
        let s = Space::fock(basis);
        LinOp { matrix, domain: s.clone(), codomain: s }
    }
}

/// A partial weighted permutation: column `c` goes to `(row, weight)` or to 0.
#[derive(Clone, Debug)]
pub struct WeightedShift<R> {
    pub dim: usize,
    pub map: Vec<Option<(usize, R)>>,
}

impl<R: Real> WeightedShift<R> {
    pub fn identity(dim: usize) -> Self {
        WeightedShift { dim, map: (0..dim).map(|c| Some((c, R::one()))).collect() }
    }

    /// `self . other`.
    pub fn compose(&self, other: &WeightedShift<R>) -> WeightedShift<R> {
        let map = other
            .map
            .iter()
            .map(|e| e.and_then(|(t, w)| self.map[t].map(|(t2, w2)| (t2, w * w2))))
            .collect();
        WeightedShift { dim: self.dim, map }
    }

    pub fn to_dense(&self) -> CMat<R> {
        let mut m = zeros(self.dim, self.dim);
        for (c, e) in self.map.iter().enumerate() {
            if let Some((r, w)) = e {
                m[(*r, c)] = cr(*w);
            }
        }
        m
    }

    /// `(W (x) I_e) y (W (x) I_e)^*` in one pass over the columns.
    pub fn conjugate_tensor(&self, y: &CMat<R>, e: usize) -> CMat<R> {
        let mut out = zeros(y.nrows(), y.ncols());
        let moves: Vec<(usize, usize, R)> =
            self.map.iter().enumerate().filter_map(|(c, m)| m.map(|(t, w)| (c, t, w))).collect();
        for &(c2, t2, w2) in &moves {
            for s2 in 0..e {
                let src = y.column(c2 * e + s2);
                let mut dst = out.column_mut(t2 * e + s2);
                for &(c1, t1, w1) in &moves {
                    let w = cr(w1 * w2);
                    for s1 in 0..e {
                        dst[t1 * e + s1] = src[c1 * e + s1] * w;
                    }
                }
            }
        }
        out
    }

    /// `(W (x) I_e) m`.
    pub fn left_tensor(&self, m: &CMat<R>, e: usize) -> CMat<R> {
        let mut out = zeros(m.nrows(), m.ncols());
        for (c, entry) in self.map.iter().enumerate() {
            if let Some((t, w)) = entry {
                let w = cr(*w);
                for s in 0..e {
                    let src = m.row(c * e + s) * w;
                    out.row_mut(t * e + s).copy_from(&src);
                }
            }
        }
        out
    }

    /// `(W* (x) I_e) m`.
    pub fn adjoint_left_tensor(&self, m: &CMat<R>, e: usize) -> CMat<R> {
        let mut out = zeros(m.nrows(), m.ncols());
        for (c, entry) in self.map.iter().enumerate() {
            if let Some((t, w)) = entry {
                let w = cr(*w);
                for s in 0..e {
                    let src = m.row(t * e + s) * w;
                    out.row_mut(c * e + s).copy_from(&src);
                }
            }
        }
        out
    }

    /// `m (W (x) I_e)`.
    pub fn right_tensor(&self, m: &CMat<R>, e: usize) -> CMat<R> {
        let mut out = zeros(m.nrows(), m.ncols());
        for (c, entry) in self.map.iter().enumerate() {
            if let Some((t, w)) = entry {
                let w = cr(*w);
                for s in 0..e {
                    let src = m.column(t * e + s) * w;
                    out.column_mut(c * e + s).copy_from(&src);
                }
            }
        }
        out
    }

    /// `m (W* (x) I_e)`.
    pub fn adjoint_right_tensor(&self, m: &CMat<R>, e: usize) -> CMat<R> {
        let mut out = zeros(m.nrows(), m.ncols());
        for (c, entry) in self.map.iter().enumerate() {
            if let Some((t, w)) = entry {
                let w = cr(*w);
                for s in 0..e {
                    let src = m.column(c * e + s) * w;
                    out.column_mut(t * e + s).copy_from(&src);
                }
            }
        }
        out
    }

    pub fn to_linop(&self, basis: &TruncatedFockBasis) -> LinOp<R> {
        LinOp::on_fock(self.to_dense(), basis)
    }
}

/// The universal model on a truncated basis: weights `b_{i,alpha}` and the
/// compressed shifts.
#[derive(Clone, Debug)]
pub struct FockModel<R: Real> {
    pub spec: PolydomainSpec<R>,
    pub basis: TruncatedFockBasis,
    pub b: Vec<Vec<R>>,
    pub left: Vec<Vec<WeightedShift<R>>>,
}

impl<R: Real> FockModel<R> {
    pub fn new(spec: &PolydomainSpec<R>, d: &[usize]) -> Result<Self> {
        Self::with_cap(spec, d, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(spec: &PolydomainSpec<R>, d: &[usize], cap: usize) -> Result<Self> {
        let report = crate::coefficients::validate(spec);
        if !report.valid {
            return Err(Error::InvalidSpec(report.issues.join("; ")));
        }
        let basis = TruncatedFockBasis::new(&spec.n, d, cap)?;
        let b = spec.b_tables(d).into_iter().map(|t| t.values).collect();
        let mut model = FockModel { spec: spec.clone(), basis, b, left: Vec::new() };
        model.left = (0..spec.k())
            .map(|i| (0..spec.n[i]).map(|j| model.shift(i, j, true)).collect())
            .collect();
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim
    }

    fn shift(&self, i: usize, j: usize, left: bool) -> WeightedShift<R> {
        let basis = &self.basis;
        let map = (0..basis.dim)
            .map(|idx| {
                let child = if left { basis.left_child(idx, i, j) } else { basis.right_child(idx, i, j) };
                child.map(|t| {
                    let a = basis.component(idx, i);
                    let c = basis.component(t, i);
                    (t, (self.b[i][a] / self.b[i][c]).sqrt())
                })
            })
            .collect();
        WeightedShift { dim: basis.dim, map }
    }

    /// `W_{i,j}` with 0-based group `i` and generator `j`.
    pub fn left_shift(&self, i: usize, j: usize) -> &WeightedShift<R> {
        &self.left[i][j]
    }

    /// `Lambda_{i,j}` with 0-based group `i` and generator `j`.
    pub fn right_shift(&self, i: usize, j: usize) -> WeightedShift<R> {
        self.shift(i, j, false)
    }

    /// `W_{1,alpha_1} ... W_{k,alpha_k}` as a weighted shift.
    pub fn word_shift(&self, mw: &MultiWord) -> WeightedShift<R> {
        let mut acc = WeightedShift::identity(self.basis.dim);
        for (i, w) in mw.parts().iter().enumerate() {
            for &l in w.letters() {
                acc = acc.compose(&self.left[i][l - 1]);
            }
        }
        acc
    }

    /// `sqrt(prod_i b_{i, beta_i})` for basis vector `idx`.
    pub fn weight(&self, idx: usize) -> R {
        let mut w = R::one();
        for i in 0..self.basis.k() {
            w *= self.b[i][self.basis.component(idx, i)];
        }
        w.sqrt()
    }

    /// The compressed model as a dense operator tuple.
    pub fn as_tuple(&self) -> OperatorTuple<R> {
        let ops = self.left.iter().map(|g| g.iter().map(WeightedShift::to_dense).collect()).collect();
        OperatorTuple::new_unchecked(self.spec.clone(), self.basis.dim, ops)
    }

    /// Action of `W (x) I_e` for use with the defect machinery.
    pub fn action(&self, e: usize) -> ShiftAction<'_, R> {
        ShiftAction { model: self, e }
    }
}

pub fn weighted_left_shift<R: Real>(model: &FockModel<R>, i: usize, j: usize) -> Result<LinOp<R>> {
    check_index(model, i, j)?;
    Ok(model.left[i][j].to_linop(&model.basis))
}

pub fn weighted_right_shift<R: Real>(model: &FockModel<R>, i: usize, j: usize) -> Result<LinOp<R>> {
    check_index(model, i, j)?;
    Ok(model.right_shift(i, j).to_linop(&model.basis))
}

fn check_index<R: Real>(model: &FockModel<R>, i: usize, j: usize) -> Result<()> {
    if i >= model.spec.k() || j >= model.spec.n[i] {
        return Err(Error::Index(format!("(i,j)=({i},{j}) outside k={}, n={:?}", model.spec.k(), model.spec.n)));
    }
    Ok(())
}

pub fn word_operator<R: Real>(model: &FockModel<R>, mw: &MultiWord) -> Result<LinOp<R>> {
    if !mw.fits(&model.spec.n) {
        return Err(Error::Index(format!("multi-word {mw:?} does not fit arities {:?}", model.spec.n)));
    }
    Ok(model.word_shift(mw).to_linop(&model.basis))
}

pub fn vacuum_projection<R: Real>(basis: &TruncatedFockBasis) -> LinOp<R> {
    let mut m = zeros(basis.dim, basis.dim);
    m[(0, 0)] = cr(R::one());
    LinOp::on_fock(m, basis)
}

pub fn interior_projection<R: Real>(basis: &TruncatedFockBasis, reserve: usize) -> LinOp<R> {
    let mut m = zeros(basis.dim, basis.dim);
    for idx in basis.interior_indices(reserve) {
        m[(idx, idx)] = cr(R::one());
    }
    LinOp::on_fock(m, basis)
}

/// `W (x) I_e` as a [`TupleAction`] on `fock (x) C^e`.
#[derive(Clone, Copy)]
pub struct ShiftAction<'a, R: Real> {
    pub model: &'a FockModel<R>,
    pub e: usize,
}

impl<R: Real> TupleAction<R> for ShiftAction<'_, R> {
    fn dim(&self) -> usize {
        self.model.basis.dim * self.e
    }
    fn spec(&self) -> &PolydomainSpec<R> {
        &self.model.spec
    }
    fn left(&self, i: usize, j: usize, m: &CMat<R>) -> CMat<R> {
        self.model.left[i][j].left_tensor(m, self.e)
    }
    fn adjoint_left(&self, i: usize, j: usize, m: &CMat<R>) -> CMat<R> {
        self.model.left[i][j].adjoint_left_tensor(m, self.e)
    }
    fn conjugate_word(&self, i: usize, w: &Word, y: &CMat<R>) -> CMat<R> {
        let mut acc = WeightedShift::identity(self.model.basis.dim);
        for &l in w.letters() {
            acc = acc.compose(&self.model.left[i][l - 1]);
        }
        acc.conjugate_tensor(y, self.e)
    }
}

/// Restriction `rows x cols` of a matrix.
pub fn compress<R: Real>(m: &CMat<R>, rows: &[usize], cols: &[usize]) -> CMat<R> {
    let mut out = zeros(rows.len(), cols.len());
    for (a, &r) in rows.iter().enumerate() {
        for (b, &c) in cols.iter().enumerate() {
            out[(a, b)] = m[(r, c)];
        }
    }
    out
}
