//! Seeded random ensembles: polydomain members, free polynomials and
//! polynomial pair sums.

use crate::berezin::{FreeSeries, PolyPairs};
use crate::coefficients::PolydomainSpec;
use crate::defect::{membership_unchecked, phi};
use crate::error::{Error, Result};
use crate::linalg::{herm_norm, identity, random_gaussian, random_unitary};
use crate::scalar::{lit, to_f64, Real, C};
use crate::tuple::{tensor_tuple, OperatorTuple};
use crate::words::{MultiWord, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Purity {
    /// Every `||Phi_i(I)||` is drawn from `[0.05, 0.35]`.
    Pure,
    /// Each factor sits at the largest scaling that keeps membership.
    Boundary,
}

const BISECT_STEPS: usize = 60;
const DEFAULT_TOL: f64 = 1e-9;

fn factor_spec<R: Real>(spec: &PolydomainSpec<R>, i: usize) -> PolydomainSpec<R> {
    PolydomainSpec::new(vec![spec.n[i]], vec![spec.m[i]], vec![spec.q[i].clone()])
}

fn scaled_factor<R: Real>(spec: &PolydomainSpec<R>, ops: &[crate::CMat<R>], r: R) -> OperatorTuple<R> {
    let dim = ops[0].nrows();
    OperatorTuple::new_unchecked(spec.clone(), dim, vec![ops.iter().map(|a| a * crate::scalar::cr(r)).collect()])
}

/// Bisection for the largest `r` with `pred(r)`, assuming monotonicity.
fn bisect_largest<R: Real>(mut pred: impl FnMut(R) -> bool) -> R {
    let mut hi = R::one();
    let mut grow = 0;
    while pred(hi) && grow < 60 {
        hi *= lit(2.0);
        grow += 1;
    }
    let mut lo = R::zero();
    for _ in 0..BISECT_STEPS {
        let mid = (lo + hi) * lit(0.5);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Largest membership-preserving scaling of one factor.
fn boundary_scale<R: Real>(spec: &PolydomainSpec<R>, ops: &[crate::CMat<R>], tol: R) -> R {
    bisect_largest(|r| membership_unchecked(&scaled_factor(spec, ops, r), tol).verdict)
}

fn contraction_scale<R: Real>(spec: &PolydomainSpec<R>, ops: &[crate::CMat<R>], target: R) -> R {
    let eye = identity(ops[0].nrows());
    bisect_largest(|r| herm_norm(&phi(&scaled_factor(spec, ops, r), 0, &eye)) <= target)
}

/// Default per-factor dimensions with product at most `dim`.
pub fn split_dims(k: usize, dim: usize) -> Vec<usize> {
    let base = (dim.max(1) as f64).powf(1.0 / k as f64).floor().max(1.0) as usize;
    let mut dims = vec![base; k];
    // Grow leading factors while the product still fits.
    for i in 0..k {
        let rest: usize = dims.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).product();
        while (dims[i] + 1) * rest <= dim {
            dims[i] += 1;
        }
    }
    dims
}

/// Tensor-factor member: group `i` acts on its own factor of dimension
/// `dims[i]`, scaled per factor, then conjugated by a Haar unitary.
pub fn random_member_with_dims<R: Real>(
    spec: &PolydomainSpec<R>,
    dims: &[usize],
    purity: Purity,
    seed: u64,
) -> Result<OperatorTuple<R>> {
    if dims.len() != spec.k() || dims.contains(&0) {
        return Err(Error::Shape(format!("factor dims {dims:?} for k={}", spec.k())));
    }
    let report = crate::coefficients::validate(spec);
    if !report.valid {
        return Err(Error::InvalidSpec(report.issues.join("; ")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = lit::<R>(DEFAULT_TOL);
    let mut factors = Vec::with_capacity(spec.k());
    for (i, &di) in dims.iter().enumerate() {
        let fs = factor_spec(spec, i);
        let ops: Vec<crate::CMat<R>> = (0..spec.n[i]).map(|_| random_gaussian(&mut rng, di, di)).collect();
        let edge = boundary_scale(&fs, &ops, tol * lit(1e-3));
        let r = match purity {
            Purity::Boundary => edge,
            Purity::Pure => {
                let target = lit::<R>(rng.gen_range(0.05..0.35));
                contraction_scale(&fs, &ops, target).min(edge)
            }
        };
        factors.push(ops.iter().map(|a| a * crate::scalar::cr(r)).collect::<Vec<_>>());
    }
    let tuple = tensor_tuple(spec.clone(), &factors)?;
    let u = random_unitary(&mut rng, tuple.dim);
    let tuple = tuple.conjugated(&u);
    let cert = membership_unchecked(&tuple, tol);
    if !cert.verdict {
        return Err(Error::NotMember(format!(
            "generated tuple failed membership (min eigenvalue {:.3e})",
            to_f64(cert.min_eig())
        )));
    }
    Ok(tuple)
}

pub fn generate_random_member<R: Real>(spec: &PolydomainSpec<R>, dim: usize, purity: Purity, seed: u64) -> Result<OperatorTuple<R>> {
    random_member_with_dims(spec, &split_dims(spec.k(), dim), purity, seed)
}

pub fn random_complex<R: Real, G: Rng + ?Sized>(rng: &mut G) -> C<R> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(lit(re), lit(im))
}

pub fn random_word<G: Rng + ?Sized>(rng: &mut G, n: usize, len: usize) -> Word {
    Word::new((0..len).map(|_| rng.gen_range(1..=n)).collect())
}

/// `terms` random monomials with total degree at most `max_deg`.
pub fn random_series<R: Real, G: Rng + ?Sized>(rng: &mut G, arities: &[usize], max_deg: usize, terms: usize) -> FreeSeries<R> {
    let mut s = FreeSeries::new(arities.to_vec());
    for _ in 0..terms {
        let total = rng.gen_range(0..=max_deg);
        let mut lens = vec![0usize; arities.len()];
        for _ in 0..total {
            lens[rng.gen_range(0..arities.len())] += 1;
        }
        let mw = MultiWord(arities.iter().zip(&lens).map(|(&n, &l)| random_word(rng, n, l)).collect());
        s.add_term(mw, random_complex(rng));
    }
    s
}

/// `sum_{gamma < count} p_gamma q_gamma^*` with random polynomials.
pub fn random_poly_pairs<R: Real, G: Rng + ?Sized>(rng: &mut G, arities: &[usize], max_deg: usize, count: usize) -> PolyPairs<R> {
    (0..count)
        .map(|_| (random_series(rng, arities, max_deg, 3), random_series(rng, arities, max_deg, 3)))
        .collect()
}
