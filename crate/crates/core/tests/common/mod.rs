#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use polydomain::coefficients::{PolydomainSpec, PositiveRegularPoly};
use polydomain::fock::FockModel;
use polydomain::linalg::{identity, kron, op_norm, random_gaussian, random_unitary};
use polydomain::scalar::c64;
use polydomain::tuple::{tensor_tuple, OperatorTuple};
use polydomain::{CMat, Word};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Random valid polynomial with small rational coefficients, degree <= 3.
pub fn random_rational_poly(rng: &mut impl Rng, n: usize) -> PositiveRegularPoly<BigRational> {
    let mut terms = Vec::new();
    for j in 1..=n {
        terms.push((Word::new(vec![j]), rat(rng.gen_range(1..=5), rng.gen_range(1..=7))));
    }
    for _ in 0..rng.gen_range(0..=3) {
        let len = rng.gen_range(2..=3);
        let w = Word::new((0..len).map(|_| rng.gen_range(1..=n)).collect());
        terms.push((w, rat(rng.gen_range(0..=4), rng.gen_range(1..=9))));
    }
    PositiveRegularPoly::from_terms(n, terms)
}

fn binom_big(n: usize, k: usize) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    BigRational::new(num, den)
}

/// Brute-force `b^{(m)}_alpha`: sum over all cut sets of the word.
pub fn oracle_b(q: &PositiveRegularPoly<BigRational>, m: usize, alpha: &[usize]) -> BigRational {
    let len = alpha.len();
    if len == 0 {
        return BigRational::one();
    }
    let mut total = BigRational::zero();
    for cuts in 0u32..(1u32 << (len - 1)) {
        let mut prod = BigRational::one();
        let mut start = 0;
        let mut parts = 0;
        for pos in 1..=len {
            if pos == len || cuts >> (pos - 1) & 1 == 1 {
                prod *= q.coeff(&Word::new(alpha[start..pos].to_vec()));
                start = pos;
                parts += 1;
            }
        }
        if !prod.is_zero() {
            total += prod * binom_big(parts + m - 1, m - 1);
        }
    }
    total
}

/// Row polynomial `Z_1 + ... + Z_n`.
pub fn row(n: usize) -> PositiveRegularPoly<f64> {
    PositiveRegularPoly::row(n)
}

/// `2 Z_1 + Z_2`.
pub fn weighted_row() -> PositiveRegularPoly<f64> {
    PositiveRegularPoly::linear(vec![2.0, 1.0])
}

pub fn spec(n: Vec<usize>, m: Vec<usize>, q: Vec<PositiveRegularPoly<f64>>) -> PolydomainSpec<f64> {
    PolydomainSpec::new(n, m, q)
}

/// A small catalogue of valid specs covering k <= 2, n_i <= 2, m_i <= 2.
pub fn spec_catalogue() -> Vec<PolydomainSpec<f64>> {
    let mut out = vec![
        PolydomainSpec::rows(vec![1], vec![1]),
        PolydomainSpec::rows(vec![2], vec![1]),
        PolydomainSpec::rows(vec![1], vec![2]),
        PolydomainSpec::rows(vec![2], vec![2]),
        spec(vec![2], vec![1], vec![weighted_row()]),
        PolydomainSpec::rows(vec![1, 1], vec![1, 1]),
        PolydomainSpec::rows(vec![2, 1], vec![1, 2]),
        spec(vec![2, 2], vec![1, 1], vec![weighted_row(), row(2)]),
    ];
    let curved = PositiveRegularPoly::from_terms(1, [(Word::letter(1), 1.0), (Word::new(vec![1, 1]), 0.5)]);
    out.push(spec(vec![1], vec![1], vec![curved]));
    out
}

/// `sum_{|alpha| <= 1} Lambda_alpha (x) C_alpha` with a dominant
/// partial-isometry constant term and small Gaussian shift coefficients.
pub fn random_multi_analytic(model: &FockModel<f64>, e_in: usize, h_out: usize, seed: u64) -> CMat<f64> {
    let mut g = rng(seed);
    let n = model.dim();
    let u = random_unitary::<f64, _>(&mut g, e_in.max(h_out));
    let c0 = u.view((0, 0), (h_out, e_in)).into_owned() * c64(2.0, 0.0);
    let mut m = kron(&identity(n), &c0);
    for i in 0..model.spec.k() {
        for j in 0..model.spec.n[i] {
            let c = random_gaussian::<f64, _>(&mut g, h_out, e_in) * c64(0.3, 0.0);
            m += kron(&model.right_shift(i, j).to_dense(), &c);
        }
    }
    m
}

/// Tuple with `Phi_i(I) = I` for every group: scaled Haar unitaries on
/// tensor factors of dimension `dim`.
pub fn coisometric_tuple(spec: &PolydomainSpec<f64>, dim: usize, seed: u64) -> OperatorTuple<f64> {
    let mut g = rng(seed);
    let factors: Vec<Vec<CMat<f64>>> = (0..spec.k())
        .map(|i| {
            let q = &spec.q[i];
            let lin: Vec<f64> = (1..=spec.n[i]).map(|j| q.coeff(&Word::letter(j))).collect();
            let higher: f64 = q.support().filter(|(w, _)| w.len() > 1).map(|(_, &c)| c).sum();
            (0..spec.n[i])
                .map(|j| {
                    let x = if higher == 0.0 {
                        1.0 / (spec.n[i] as f64 * lin[j])
                    } else {
                        // a x + b x^2 = 1 with x = |z|^2.
                        ((lin[j] * lin[j] + 4.0 * higher).sqrt() - lin[j]) / (2.0 * higher)
                    };
                    random_unitary::<f64, _>(&mut g, dim) * c64(x.sqrt(), 0.0)
                })
                .collect()
        })
        .collect();
    tensor_tuple(spec.clone(), &factors).unwrap()
}

pub fn dist(a: &CMat<f64>, b: &CMat<f64>) -> f64 {
    op_norm(&(a - b))
}

/// Prints the one-line criterion result and returns whether it passed.
pub fn report(id: usize, name: &str, pass: bool, detail: &str, elapsed: std::time::Duration) -> bool {
    println!(
        "criterion {id:>2} {}: {name} ({detail}; {:.2}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}
