//! Positive regular polynomials `q_i`, polydomain specs and the weights
//! `b^{(m)}_alpha`.

use crate::scalar::Coeff;
use crate::words::{enumerate_words, factorizations, word_count, Word};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

/// A noncommutative polynomial with nonnegative coefficients, no constant
/// term and strictly positive linear part.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveRegularPoly<C> {
    pub arity: usize,
    pub coeffs: BTreeMap<Word, C>,
}

impl<C: Coeff> PositiveRegularPoly<C> {
    pub fn new(arity: usize, coeffs: BTreeMap<Word, C>) -> Self {
        PositiveRegularPoly { arity, coeffs }
    }

    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Word, C)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (w, c) in terms {
            let entry = coeffs.entry(w).or_insert_with(C::zero);
            *entry = entry.clone() + c;
        }
        PositiveRegularPoly { arity, coeffs }
    }

    /// `Z_1 + ... + Z_n`.
    pub fn row(arity: usize) -> Self {
        Self::from_terms(arity, (1..=arity).map(|j| (Word::letter(j), C::one())))
    }

    /// `sum_j c_j Z_j`.
    pub fn linear(cs: Vec<C>) -> Self {
        let n = cs.len();
        Self::from_terms(n, cs.into_iter().enumerate().map(|(j, c)| (Word::letter(j + 1), c)))
    }

    pub fn coeff(&self, w: &Word) -> C {
        self.coeffs.get(w).cloned().unwrap_or_else(C::zero)
    }

    /// Largest word length carrying a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(w, _)| w.len())
            .max()
            .unwrap_or(0)
    }

    /// Support words with nonzero coefficient, in graded order.
    pub fn support(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.coeffs.iter().filter(|(_, c)| !c.is_zero())
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> PositiveRegularPoly<D> {
        PositiveRegularPoly {
            arity: self.arity,
            coeffs: self.coeffs.iter().map(|(w, c)| (w.clone(), f(c))).collect(),
        }
    }

    /// Checks the positive-regular conditions, collecting every failure.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.arity == 0 {
            out.push("arity must be at least 1".to_string());
        }
        for (w, c) in &self.coeffs {
            if !w.fits_arity(self.arity) {
                out.push(format!("word {w:?} uses a letter outside 1..={}", self.arity));
            }
            if *c < C::zero() {
                out.push(format!("coefficient of {w:?} is negative"));
            }
        }
        if self.coeffs.get(&Word::empty()).is_some_and(|c| !c.is_zero()) {
            out.push("constant term must vanish".to_string());
        }
        for j in 1..=self.arity {
            if !(self.coeff(&Word::letter(j)) > C::zero()) {
                out.push(format!("linear coefficient of g{j} must be positive"));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolydomainSpec<C> {
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub q: Vec<PositiveRegularPoly<C>>,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    pub issues: Vec<String>,
}

impl<C: Coeff> PolydomainSpec<C> {
    pub fn new(n: Vec<usize>, m: Vec<usize>, q: Vec<PositiveRegularPoly<C>>) -> Self {
        PolydomainSpec { n, m, q }
    }

    /// Polyball-type spec: every `q_i` is a row sum.
    pub fn rows(n: Vec<usize>, m: Vec<usize>) -> Self {
        let q = n.iter().map(|&ni| PositiveRegularPoly::row(ni)).collect();
        PolydomainSpec { n, m, q }
    }

    pub fn k(&self) -> usize {
        self.q.len()
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> PolydomainSpec<D> {
        PolydomainSpec {
            n: self.n.clone(),
            m: self.m.clone(),
            q: self.q.iter().map(|p| p.map(&f)).collect(),
        }
    }

    /// `true` when every `q_i` is `Z_{i,1}+...+Z_{i,n_i}` and every `m_i = 1`.
    pub fn is_polyball(&self) -> bool {
        self.m.iter().all(|&m| m == 1)
            && self.q.iter().all(|p| {
                p.support().count() == p.arity
                    && (1..=p.arity).all(|j| p.coeff(&Word::letter(j)) == C::one())
            })
    }

    /// Reserve degree for `s` applications of defect maps: `max deg q_i * s`.
    pub fn reserve(&self, s: usize) -> usize {
        self.q.iter().map(|p| p.degree()).max().unwrap_or(1) * s
    }

    pub fn b_tables(&self, d: &[usize]) -> Vec<BTable<C>> {
        self.q
            .iter()
            .zip(&self.m)
            .zip(d)
            .map(|((q, &m), &di)| b_table(q, m, di))
            .collect()
    }
}

/// Structured validation; never panics.
pub fn validate<C: Coeff>(spec: &PolydomainSpec<C>) -> ValidationReport {
    let mut issues = Vec::new();
    let k = spec.k();
    if k == 0 {
        issues.push("k must be at least 1".to_string());
    }
    if spec.n.len() != k || spec.m.len() != k {
        issues.push(format!(
            "length mismatch: k={k}, |n|={}, |m|={}",
            spec.n.len(),
            spec.m.len()
        ));
    }
    for (i, q) in spec.q.iter().enumerate() {
        if spec.n.get(i).is_some_and(|&n| n != q.arity) {
            issues.push(format!("factor {}: q arity {} differs from n={}", i + 1, q.arity, spec.n[i]));
        }
        if spec.m.get(i) == Some(&0) {
            issues.push(format!("factor {}: m must be positive", i + 1));
        }
        for v in q.violations() {
            issues.push(format!("factor {}: {v}", i + 1));
        }
    }
    ValidationReport { valid: issues.is_empty(), issues }
}

impl PolydomainSpec<f64> {
    /// Exact binary-to-rational conversion of every coefficient.
    pub fn to_rational(&self) -> PolydomainSpec<BigRational> {
        self.map(|&c| BigRational::from_f64(c).unwrap_or_else(|| BigRational::from_integer(BigInt::zero())))
    }
}

/// `C(n, k)` by the additive Pascal recurrence.
pub fn binomial<C: Coeff>(n: usize, k: usize) -> C {
    if k > n {
        return C::zero();
    }
    let mut row = vec![C::one()];
    for i in 1..=n {
        let mut next = Vec::with_capacity(i + 1);
        next.push(C::one());
        for j in 1..i {
            next.push(row[j - 1].clone() + row[j].clone());
        }
        next.push(C::one());
        row = next;
    }
    row[k].clone()
}

/// `b^{(m)}_alpha` by direct enumeration of factorizations.
pub fn b_coeff<C: Coeff>(q: &PositiveRegularPoly<C>, m: usize, alpha: &Word) -> C {
    if alpha.is_empty() {
        return C::one();
    }
    let mut total = C::zero();
    for p in 1..=alpha.len() {
        let mut inner = C::zero();
        for f in factorizations(alpha, p) {
            let mut prod = C::one();
            for g in &f {
                prod = prod * q.coeff(g);
            }
            inner = inner + prod;
        }
        if !inner.is_zero() {
            total = total + inner * binomial::<C>(p + m - 1, m - 1);
        }
    }
    total
}

/// The table `alpha -> b^{(m)}_alpha` for `|alpha| <= degree`, indexed by
/// graded position.
#[derive(Clone, Debug, PartialEq)]
pub struct BTable<C> {
    pub arity: usize,
    pub m: usize,
    pub degree: usize,
    pub values: Vec<C>,
}

impl<C: Coeff> BTable<C> {
    pub fn get(&self, w: &Word) -> Option<&C> {
        if w.len() > self.degree || !w.fits_arity(self.arity) {
            return None;
        }
        self.values.get(w.graded_index(self.arity))
    }

    pub fn words(&self) -> Vec<Word> {
        enumerate_words(self.arity, self.degree)
    }

    /// Constant in the bound `b_alpha b_beta <= C(|beta|+m-1, m-1) b_{alpha beta}`.
    pub fn mb_constant(&self, beta_len: usize) -> C {
        binomial(beta_len + self.m - 1, self.m - 1)
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> BTable<D> {
        BTable {
            arity: self.arity,
            m: self.m,
            degree: self.degree,
            values: self.values.iter().map(f).collect(),
        }
    }
}

fn index_of(letters: &[usize], n: usize) -> usize {
    let mut rank = 0usize;
    for &l in letters {
        rank = rank * n + (l - 1);
    }
    crate::words::words_below_length(n, letters.len()) + rank
}

/// Bulk `b^{(m)}` via `b^{(1)}_alpha = sum_{alpha = gamma delta} a_gamma b^{(1)}_delta`
/// and `b^{(s)} = b^{(s-1)} * b^{(1)}` (coefficients of `(1-q)^{-m}`).
pub fn b_table<C: Coeff>(q: &PositiveRegularPoly<C>, m: usize, d: usize) -> BTable<C> {
    assert!(m >= 1, "m must be positive");
    let n = q.arity;
    let words = enumerate_words(n, d);
    let lengths: std::collections::BTreeSet<usize> =
        q.support().filter(|(w, _)| !w.is_empty()).map(|(w, _)| w.len()).collect();
    let size = word_count(n, d);
    let mut first = vec![C::zero(); size];
    first[0] = C::one();
    for (idx, w) in words.iter().enumerate().skip(1) {
        let l = w.letters();
        let mut acc = C::zero();
        for &len in lengths.iter().take_while(|&&len| len <= l.len()) {
            let a = q.coeff(&Word::new(l[..len].to_vec()));
            if !a.is_zero() {
                acc = acc + a * first[index_of(&l[len..], n)].clone();
            }
        }
        first[idx] = acc;
    }
    let mut cur = first.clone();
    for _ in 1..m {
        let mut next = vec![C::zero(); size];
        for (idx, w) in words.iter().enumerate() {
            let l = w.letters();
            let mut acc = C::zero();
            for cut in 0..=l.len() {
                let a = &cur[index_of(&l[..cut], n)];
                let b = &first[index_of(&l[cut..], n)];
                if !a.is_zero() && !b.is_zero() {
                    acc = acc + a.clone() * b.clone();
                }
            }
            next[idx] = acc;
        }
        cur = next;
    }
    BTable { arity: n, m, degree: d, values: cur }
}
