//! JSON file formats for specs, tuples, free series, linear operators and
//! polynomial pair samples. Matrices are row-major `[re, im]` arrays.

use crate::berezin::{FreeSeries, PolyPairs};
use crate::coefficients::{validate, PolydomainSpec, PositiveRegularPoly};
use crate::error::{Error, Result};
use crate::fock::{LinOp, Space};
use crate::scalar::{c64, CMat};
use crate::tuple::OperatorTuple;
use crate::words::{MultiWord, Word};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermFile {
    pub word: Word,
    pub coeff: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub q: Vec<Vec<TermFile>>,
}

impl SpecFile {
    pub fn into_spec(self) -> Result<PolydomainSpec<f64>> {
        let k = self.n.len();
        if self.k.is_some_and(|kk| kk != k) || self.m.len() != k || self.q.len() != k {
            return Err(Error::Parse(format!(
                "k={:?} with |n|={}, |m|={}, |q|={}",
                self.k,
                k,
                self.m.len(),
                self.q.len()
            )));
        }
        let q = self
            .q
            .into_iter()
            .zip(&self.n)
            .map(|(terms, &n)| PositiveRegularPoly::from_terms(n, terms.into_iter().map(|t| (t.word, t.coeff))))
            .collect();
        let spec = PolydomainSpec::new(self.n, self.m, q);
        let report = validate(&spec);
        if !report.valid {
            return Err(Error::InvalidSpec(report.issues.join("; ")));
        }
        Ok(spec)
    }

    pub fn from_spec(spec: &PolydomainSpec<f64>) -> Self {
        SpecFile {
            k: Some(spec.k()),
            n: spec.n.clone(),
            m: spec.m.clone(),
            q: spec
                .q
                .iter()
                .map(|p| p.support().map(|(w, &c)| TermFile { word: w.clone(), coeff: c }).collect())
                .collect(),
        }
    }
}

pub fn parse_spec(text: &str) -> Result<PolydomainSpec<f64>> {
    serde_json::from_str::<SpecFile>(text)?.into_spec()
}

pub fn spec_to_json(spec: &PolydomainSpec<f64>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SpecFile::from_spec(spec))?)
}

/// Flat row-major entries, or one array per row.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixData {
    Flat(Vec<[f64; 2]>),
    Rows(Vec<Vec<[f64; 2]>>),
}

impl MatrixData {
    pub fn from_matrix(m: &CMat<f64>) -> Self {
        let mut v = Vec::with_capacity(m.nrows() * m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                v.push([m[(r, c)].re, m[(r, c)].im]);
            }
        }
        MatrixData::Flat(v)
    }

    pub fn to_matrix(&self, rows: usize, cols: usize) -> Result<CMat<f64>> {
        let flat: Vec<[f64; 2]> = match self {
            MatrixData::Flat(v) => v.clone(),
            MatrixData::Rows(rs) => {
                if rs.len() != rows || rs.iter().any(|r| r.len() != cols) {
                    return Err(Error::Parse(format!("expected {rows} rows of {cols} entries")));
                }
                rs.concat()
            }
        };
        if flat.len() != rows * cols {
            return Err(Error::Parse(format!("expected {} entries, got {}", rows * cols, flat.len())));
        }
        if flat.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite matrix entry".into()));
        }
        Ok(CMat::from_fn(rows, cols, |r, c| {
            let [re, im] = flat[r * cols + c];
            c64(re, im)
        }))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TupleFile {
    pub dim: usize,
    #[serde(rename = "T")]
    pub t: Vec<Vec<MatrixData>>,
}

/// Parses a tuple file against a spec; cross-group commutation is left to
/// the caller.
pub fn parse_tuple(text: &str, spec: &PolydomainSpec<f64>) -> Result<OperatorTuple<f64>> {
    let f: TupleFile = serde_json::from_str(text)?;
    let ops = f
        .t
        .iter()
        .map(|g| g.iter().map(|m| m.to_matrix(f.dim, f.dim)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let t = OperatorTuple::new(spec.clone(), ops)?;
    if t.dim != f.dim {
        return Err(Error::Parse(format!("declared dim {} but matrices are {}", f.dim, t.dim)));
    }
    Ok(t)
}

pub fn tuple_to_file(t: &OperatorTuple<f64>) -> TupleFile {
    TupleFile { dim: t.dim, t: t.ops.iter().map(|g| g.iter().map(MatrixData::from_matrix).collect()).collect() }
}

pub fn tuple_to_json(t: &OperatorTuple<f64>) -> Result<String> {
    Ok(serde_json::to_string(&tuple_to_file(t))?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub words: Vec<Word>,
    pub coeff: [f64; 2],
}

pub fn series_from_terms(terms: &[SeriesTerm], arities: &[usize]) -> Result<FreeSeries<f64>> {
    let mut s = FreeSeries::new(arities.to_vec());
    for t in terms {
        s.add_term(MultiWord(t.words.clone()), c64(t.coeff[0], t.coeff[1]));
    }
    s.validate()?;
    Ok(s)
}

pub fn parse_series(text: &str, arities: &[usize]) -> Result<FreeSeries<f64>> {
    let terms: Vec<SeriesTerm> = serde_json::from_str(text)?;
    series_from_terms(&terms, arities)
}

pub fn series_to_terms(s: &FreeSeries<f64>) -> Vec<SeriesTerm> {
    s.coeffs.iter().map(|(mw, c)| SeriesTerm { words: mw.0.clone(), coeff: [c.re, c.im] }).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairFile {
    pub p: Vec<SeriesTerm>,
    pub q: Vec<SeriesTerm>,
}

/// A list of samples, each a list of `{p, q}` pairs summed as `p q^*`.
pub fn parse_poly_pairs(text: &str, arities: &[usize]) -> Result<Vec<PolyPairs<f64>>> {
    let samples: Vec<Vec<PairFile>> = serde_json::from_str(text)?;
    samples
        .iter()
        .map(|s| {
            s.iter()
                .map(|pq| Ok((series_from_terms(&pq.p, arities)?, series_from_terms(&pq.q, arities)?)))
                .collect()
        })
        .collect()
}

pub fn poly_pairs_to_file(samples: &[PolyPairs<f64>]) -> Vec<Vec<PairFile>> {
    samples
        .iter()
        .map(|s| s.iter().map(|(p, q)| PairFile { p: series_to_terms(p), q: series_to_terms(q) }).collect())
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinOpFile {
    pub rows: usize,
    pub cols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Space>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<Space>,
    pub data: MatrixData,
}

impl LinOpFile {
    pub fn from_linop(op: &LinOp<f64>) -> Self {
        LinOpFile {
            rows: op.matrix.nrows(),
            cols: op.matrix.ncols(),
            domain: Some(op.domain.clone()),
            codomain: Some(op.codomain.clone()),
            data: MatrixData::from_matrix(&op.matrix),
        }
    }

    pub fn from_matrix(m: &CMat<f64>) -> Self {
        LinOpFile { rows: m.nrows(), cols: m.ncols(), domain: None, codomain: None, data: MatrixData::from_matrix(m) }
    }

    pub fn into_linop(self) -> Result<LinOp<f64>> {
        let matrix = self.data.to_matrix(self.rows, self.cols)?;
        let domain = self.domain.unwrap_or(Space::Plain { dim: self.cols });
        let codomain = self.codomain.unwrap_or(Space::Plain { dim: self.rows });
        LinOp::new(matrix, domain, codomain)
    }
}

pub fn parse_linop(text: &str) -> Result<LinOp<f64>> {
    serde_json::from_str::<LinOpFile>(text)?.into_linop()
}

pub fn linop_to_json(op: &LinOp<f64>) -> Result<String> {
    Ok(serde_json::to_string(&LinOpFile::from_linop(op))?)
}
