//! Resolution errors over M-types, soft covering, spectral smoothing and one-shot bounds.

use std::ops::{Add, Mul};

use num_complex::Complex;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{m_type_count, output_state, CQChannel, Distribution, MType};
use crate::error::{binomial, saturating_pow, Caps, Error, Result};
use crate::hermitian::{
    eigh, positive_part_projector, power_on_support, trace_norm, ComplexMatrix, DensityOperator, HermitianOperator,
};
use crate::info::{pinch, pinching_from_spectrum, renyi_mutual_info, RenyiOrder, SUPPORT_TOL};
use crate::scalar::Scalar;

/// Errors within this of the minimum count as ties; the lexicographically first type wins.
pub const TIE_TOL: f64 = 1e-12;
pub const LOCAL_SEARCH_MIN_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionResult<T> {
    /// `min_q ½‖W(p) - W(q)‖₁` over M-types `q` on `X^n`.
    pub error: T,
    /// Minimizing M-type on the product alphabet (first letter most significant).
    pub argmin: MType,
    pub m: u64,
    pub n: usize,
}

/// Per-letter outputs of a channel as flat arrays, diagonal when every state is.
enum Letters<T> {
    Diagonal(Vec<Vec<T>>),
    Dense(usize, Vec<Vec<Complex<T>>>),
}

impl<T: Scalar> Letters<T> {
    fn of(channel: &CQChannel<T>) -> Self {
        if channel.states().iter().all(|s| s.operator().is_diagonal(T::zero())) {
            Letters::Diagonal(channel.states().iter().map(|s| s.operator().diagonal()).collect())
        } else {
            Letters::Dense(channel.dim(), channel.states().iter().map(|s| s.matrix().data().to_vec()).collect())
        }
    }

    fn len(&self) -> usize {
        match self {
            Letters::Diagonal(v) => v.len(),
            Letters::Dense(_, v) => v.len(),
        }
    }

    /// `½‖Σ_x c_x W_x / M - target‖₁` for every M-type, in lexicographic order.
    fn type_errors(&self, m: u64, target: &DensityOperator<T>) -> Vec<T> {
        let scale = T::one() / T::lit(m as f64);
        match self {
            Letters::Diagonal(rows) => {
                let t = target.operator().diagonal();
                let eval = |s: &[T]| -> T {
                    s.iter().zip(&t).map(|(a, b)| (*a * scale - *b).abs()).sum::<T>() / T::two()
                };
                all_type_values(rows, m, &eval)
            }
            Letters::Dense(d, mats) => {
                let t = target.matrix().data();
                let eval = |s: &[Complex<T>]| -> T {
                    let diff: Vec<Complex<T>> = s.iter().zip(t).map(|(a, b)| *a * scale - *b).collect();
                    let op = HermitianOperator::from_matrix_unchecked(
                        ComplexMatrix::new(*d, diff).expect("square by construction"),
                    );
                    trace_norm(&op).unwrap_or_else(|_| T::infinity()) / T::two()
                };
                all_type_values(mats, m, &eval)
            }
        }
    }

    /// Error of one explicit count vector.
    fn counts_error(&self, counts: &[u64], target: &DensityOperator<T>) -> Result<T> {
        let m: u64 = counts.iter().sum();
        let scale = T::one() / T::lit(m as f64);
        match self {
            Letters::Diagonal(rows) => {
                let t = target.operator().diagonal();
                let mut s = vec![T::zero(); t.len()];
                for (row, &c) in rows.iter().zip(counts) {
                    if c > 0 {
                        let c = T::lit(c as f64);
                        s.iter_mut().zip(row).for_each(|(a, b)| *a += *b * c);
                    }
                }
                Ok(s.iter().zip(&t).map(|(a, b)| (*a * scale - *b).abs()).sum::<T>() / T::two())
            }
            Letters::Dense(d, mats) => {
                let t = target.matrix().data();
                let mut s = vec![Complex::new(T::zero(), T::zero()); t.len()];
                for (mat, &c) in mats.iter().zip(counts) {
                    if c > 0 {
                        let c = T::lit(c as f64);
                        s.iter_mut().zip(mat).for_each(|(a, b)| *a += *b * c);
                    }
                }
                let diff: Vec<Complex<T>> = s.iter().zip(t).map(|(a, b)| *a * scale - *b).collect();
                let op = HermitianOperator::from_matrix_unchecked(ComplexMatrix::new(*d, diff)?);
                Ok(trace_norm(&op)? / T::two())
            }
        }
    }
}

/// Evaluates `eval(Σ_x c_x W_x)` over every count vector summing to `m`, lexicographically.
///
/// Work is split over the first two coordinates; partial sums are built incrementally.
fn all_type_values<T, E>(letters: &[Vec<E>], m: u64, eval: &(dyn Fn(&[E]) -> T + Sync)) -> Vec<T>
where
    T: Scalar,
    E: Copy + Add<Output = E> + Mul<T, Output = E> + Send + Sync,
{
    let k = letters.len();
    let depth = 2.min(k - 1);
    let mut prefixes: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..depth {
        prefixes = prefixes
            .into_iter()
            .flat_map(|p| {
                let used: u64 = p.iter().sum();
                (0..=m - used).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    let zero = letters[0][0] * T::zero();
    prefixes
        .par_iter()
        .map(|prefix| {
            let mut acc = vec![zero; letters[0].len()];
            for (x, &c) in prefix.iter().enumerate() {
                let c = T::lit(c as f64);
                acc.iter_mut().zip(&letters[x]).for_each(|(a, b)| *a = *a + *b * c);
            }
            let used: u64 = prefix.iter().sum();
            let mut out = Vec::new();
            dfs(letters, prefix.len(), m - used, &acc, eval, &mut out);
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn dfs<T, E>(letters: &[Vec<E>], pos: usize, remaining: u64, acc: &[E], eval: &(dyn Fn(&[E]) -> T + Sync), out: &mut Vec<T>)
where
    T: Scalar,
    E: Copy + Add<Output = E> + Mul<T, Output = E>,
{
    if pos + 1 == letters.len() {
        let r = T::lit(remaining as f64);
        let last: Vec<E> = acc.iter().zip(&letters[pos]).map(|(a, b)| *a + *b * r).collect();
        out.push(eval(&last));
        return;
    }
    let mut cur = acc.to_vec();
    for c in 0..=remaining {
        dfs(letters, pos + 1, remaining - c, &cur, eval, out);
        cur.iter_mut().zip(&letters[pos]).for_each(|(a, b)| *a = *a + *b);
    }
}

/// The `idx`-th M-type on `k` letters in lexicographic order.
fn nth_m_type(k: usize, m: u64, mut idx: u128) -> MType {
    let mut counts = vec![0u64; k];
    let mut remaining = m;
    for (pos, slot) in counts.iter_mut().enumerate().take(k - 1) {
        let rest = (k - pos - 2) as u128;
        let mut c = 0;
        loop {
            let block = binomial((remaining - c) as u128 + rest, rest);
            if idx < block {
                break;
            }
            idx -= block;
            c += 1;
        }
        *slot = c;
        remaining -= c;
    }
    counts[k - 1] = remaining;
    MType::new(counts, m).expect("counts sum to m")
}

/// Minimum with lexicographic tie-breaking within [`TIE_TOL`].
fn first_minimum<T: Scalar>(values: &[T]) -> (usize, T) {
    let min = values.iter().copied().fold(T::infinity(), T::min);
    let tol = T::tolerance(TIE_TOL);
    let idx = values.iter().position(|&v| v <= min + tol).unwrap_or(0);
    (idx, values[idx])
}

struct Problem<T> {
    product: CQChannel<T>,
    letters: Letters<T>,
    m: u64,
    n: usize,
}

impl<T: Scalar> Problem<T> {
    fn new(channel: &CQChannel<T>, m: u64, n: usize, caps: &Caps) -> Result<Self> {
        if m == 0 {
            return Err(Error::validation("M must be positive"));
        }
        let kn = saturating_pow(channel.alphabet_size(), n);
        caps.check_types(kn)?;
        caps.check_types(m_type_count(kn.min(usize::MAX as u128) as usize, m))?;
        let product = channel.product(n, caps)?;
        let letters = Letters::of(&product);
        Ok(Problem { product, letters, m, n })
    }

    fn solve(&self, target: &DensityOperator<T>) -> ResolutionResult<T> {
        let errors = self.letters.type_errors(self.m, target);
        let (idx, error) = first_minimum(&errors);
        ResolutionResult {
            error: error.max(T::zero()).min(T::one()),
            argmin: nth_m_type(self.letters.len(), self.m, idx as u128),
            m: self.m,
            n: self.n,
        }
    }
}

/// `ε(p, W^{⊗n}, M)` by enumerating every M-type on `X^n`; `p_n` lives on the product alphabet.
pub fn resolution_error_exact<T: Scalar>(
    channel: &CQChannel<T>,
    p_n: &Distribution<T>,
    m: u64,
    n: usize,
    caps: &Caps,
) -> Result<ResolutionResult<T>> {
    let problem = Problem::new(channel, m, n, caps)?;
    let target = output_state(&problem.product, p_n)?;
    Ok(problem.solve(&target))
}

/// `ε(p^{⊗n}, W^{⊗n}, M)`
pub fn resolution_error_iid<T: Scalar>(
    channel: &CQChannel<T>,
    p: &Distribution<T>,
    m: u64,
    n: usize,
    caps: &Caps,
) -> Result<ResolutionResult<T>> {
    if p.len() != channel.alphabet_size() {
        return Err(Error::validation("distribution does not match the channel alphabet"));
    }
    resolution_error_exact(channel, &p.iid_power(n), m, n, caps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstSearch {
    /// Simplex grid resolution: step `1/grid`.
    pub grid: u64,
    /// Coordinatewise refinement after the grid pass.
    pub refine: bool,
}

/// Lower bound on `ε(W^{⊗n}, M) = sup_p ε(p, W^{⊗n}, M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstResolution<T> {
    pub lower_bound: T,
    /// Input on `X^n` attaining the bound.
    pub input: Distribution<T>,
    pub inner: ResolutionResult<T>,
    pub evaluations: usize,
}

/// Grid search over inputs on `X^n`, then pairwise mass moves with step halving down to 1e-6.
///
/// Every evaluation is an exact inner minimum, so the result is a certified lower bound.
pub fn resolution_error_worst<T: Scalar>(
    channel: &CQChannel<T>,
    m: u64,
    n: usize,
    search: WorstSearch,
    caps: &Caps,
) -> Result<WorstResolution<T>> {
    if search.grid == 0 {
        return Err(Error::validation("grid resolution must be positive"));
    }
    let problem = Problem::new(channel, m, n, caps)?;
    let k = problem.letters.len();
    caps.check_types(m_type_count(k, search.grid))?;

    let eval = |p: &Distribution<T>| -> Result<ResolutionResult<T>> {
        Ok(problem.solve(&output_state(&problem.product, p)?))
    };
    let mut best: Option<(Distribution<T>, ResolutionResult<T>)> = None;
    let mut evaluations = 0;
    let mut counts = vec![0u64; k];
    let mut grid_points = Vec::new();
    grid_fill(&mut counts, 0, search.grid, &mut grid_points);
    for c in grid_points {
        let p = MType::new(c, search.grid)?.distribution::<T>();
        let r = eval(&p)?;
        evaluations += 1;
        if best.as_ref().is_none_or(|(_, b)| r.error > b.error) {
            best = Some((p, r));
        }
    }
    let (mut p, mut r) = best.expect("grid is non-empty");

    if search.refine && k > 1 {
        let mut step = T::one() / T::lit(search.grid as f64);
        let min_step = T::lit(LOCAL_SEARCH_MIN_STEP);
        while step >= min_step {
            let mut improved = false;
            for from in 0..k {
                for to in 0..k {
                    if from == to || p.mass(from) < step {
                        continue;
                    }
                    let mut masses = p.masses().to_vec();
                    masses[from] -= step;
                    masses[to] += step;
                    let cand = Distribution::from_weights(masses)?;
                    let cr = eval(&cand)?;
                    evaluations += 1;
                    if cr.error > r.error + T::tolerance(TIE_TOL) {
                        p = cand;
                        r = cr;
                        improved = true;
                    }
                }
            }
            if !improved {
                step /= T::two();
            }
        }
    }
    Ok(WorstResolution {
        lower_bound: r.error,
        input: p,
        inner: r,
        evaluations,
    })
}

fn grid_fill(counts: &mut [u64], pos: usize, remaining: u64, out: &mut Vec<Vec<u64>>) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        out.push(counts.to_vec());
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        grid_fill(counts, pos + 1, remaining - c, out);
    }
}

/// `2^{2/α - 2} · 2^{((α-1)/α) I_α(X;B) - log M}`, evaluated as written.
pub fn soft_cover_bound<T: Scalar>(order: RenyiOrder<T>, channel: &CQChannel<T>, q: &Distribution<T>, m: u64) -> Result<T> {
    if m == 0 {
        return Err(Error::validation("M must be positive"));
    }
    let a = order.alpha();
    let i = renyi_mutual_info(order, channel, q)?.value;
    let exponent = T::two() / a - T::two() + order.s() / a * i - T::lit(m as f64).log2();
    Ok(T::two().powf(exponent))
}

/// `2^{2/α-2} 2^{((α-1)/α)(I_α(X;B) - log M)}`, the form that scales as `M^{-(α-1)/α}`.
pub fn soft_cover_rate_bound<T: Scalar>(order: RenyiOrder<T>, channel: &CQChannel<T>, q: &Distribution<T>, m: u64) -> Result<T> {
    if m == 0 {
        return Err(Error::validation("M must be positive"));
    }
    let a = order.alpha();
    let i = renyi_mutual_info(order, channel, q)?.value;
    let exponent = T::two() / a - T::two() + order.s() / a * (i - T::lit(m as f64).log2());
    Ok(T::two().powf(exponent))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoftCoverReport<T> {
    pub samples: usize,
    pub m: u64,
    pub n: usize,
    pub seed: u64,
    /// `½‖W_C - W(q)^{⊗n}‖₁` for each sampled codebook, by sample index.
    pub errors: Vec<T>,
    pub mean_error: T,
    /// Sample standard deviation divided by `√samples`.
    pub std_error: T,
    /// `(α, bound)` on the product channel.
    pub bounds: Vec<(T, T)>,
}

/// Words of RNG output reserved per drawn letter.
const WORDS_PER_LETTER: u128 = 16;

/// Draws `samples` random codebooks of `m` codewords i.i.d. from `q^{⊗n}`.
///
/// Letter `l` of codeword `j` in sample `i` comes from the ChaCha8 stream `i` of `seed`
/// at a fixed word offset, so results do not depend on scheduling.
#[allow(clippy::too_many_arguments)]
pub fn soft_cover_simulate<T: Scalar>(
    channel: &CQChannel<T>,
    q: &Distribution<T>,
    m: u64,
    n: usize,
    samples: usize,
    seed: u64,
    orders: &[RenyiOrder<T>],
    caps: &Caps,
) -> Result<SoftCoverReport<T>> {
    if samples == 0 || m == 0 || n == 0 {
        return Err(Error::validation("samples, M and n must be positive"));
    }
    let k = channel.alphabet_size();
    if q.len() != k {
        return Err(Error::validation("distribution does not match the channel alphabet"));
    }
    caps.check_types(saturating_pow(k, n))?;
    let product = channel.product(n, caps)?;
    let q_n = q.iid_power(n);
    let target = output_state(&product, &q_n)?;
    let letters = Letters::of(&product);
    let sampler = WeightedIndex::new(q.masses().iter().map(|x| x.as_f64()))
        .map_err(|e| Error::validation(format!("invalid sampling distribution: {e}")))?;

    let errors = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut counts = vec![0u64; product.alphabet_size()];
            for j in 0..m as u128 {
                let mut word = 0usize;
                for l in 0..n as u128 {
                    rng.set_word_pos((j * n as u128 + l) * WORDS_PER_LETTER);
                    word = word * k + sampler.sample(&mut rng);
                }
                counts[word] += 1;
            }
            letters.counts_error(&counts, &target)
        })
        .collect::<Result<Vec<T>>>()?;

    let count = T::lit(samples as f64);
    let mean = errors.iter().copied().sum::<T>() / count;
    let std_error = if samples > 1 {
        let var = errors.iter().map(|e| (*e - mean) * (*e - mean)).sum::<T>() / (count - T::one());
        var.sqrt() / count.sqrt()
    } else {
        T::zero()
    };
    let bounds = orders
        .iter()
        .map(|o| Ok((o.alpha(), soft_cover_bound(*o, &product, &q_n, m)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SoftCoverReport {
        samples,
        m,
        n,
        seed,
        errors,
        mean_error: mean,
        std_error,
        bounds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingParams<T> {
    lambda: T,
    v: u32,
    l: T,
}

impl<T: Scalar> SmoothingParams<T> {
    pub fn new(lambda: T, v: u32, l: T) -> Result<Self> {
        if !(lambda > T::zero()) || v == 0 || !(l > T::zero()) {
            return Err(Error::validation("smoothing needs lambda > 0, v >= 1 and L > 0"));
        }
        Ok(SmoothingParams { lambda, v, l })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn l(&self) -> T {
        self.l
    }
}

/// `f_{v,λ}(t) = s₁ 2^{λ max(-v, ⌈log(t/s₁)/λ⌉)}`, with `t ≤ 0` sent to the floor level.
pub fn smoothing_level<T: Scalar>(t: T, s1: T, lambda: T, v: u32) -> T {
    let floor_exp = -T::lit(v as f64);
    let k = if t > T::zero() {
        ((t / s1).log2() / lambda).ceil().max(floor_exp)
    } else {
        floor_exp
    };
    s1 * T::two().powf(lambda * k)
}

/// `⌈ρ⌉_{λ,v}`: rounds each eigenvalue up to the geometric grid `s₁ 2^{-kλ}`, `k ≤ v`.
pub fn ceil_operator<T: Scalar>(rho: &HermitianOperator<T>, lambda: T, v: u32) -> Result<HermitianOperator<T>> {
    if !(lambda > T::zero()) || v == 0 {
        return Err(Error::validation("smoothing needs lambda > 0 and v >= 1"));
    }
    let spec = eigh(rho)?;
    let s1 = spec.max_eigenvalue();
    if !(s1 > T::zero()) {
        return Err(Error::Domain("smoothing needs a nonzero positive operator".into()));
    }
    Ok(spec.map(|t| smoothing_level(t, s1, lambda, v)))
}

/// Lemma bound `4√(Σ p Tr W_x {E_σ(W_x) ≥ Cσ}) + √(v'/M Σ p Tr σ⁻¹ E_σ(W_x)² {E_σ(W_x) < Cσ})`
/// on `min_q ‖W(p) - W(q)‖₁` (twice the resolution error).
pub fn ll2_bound<T: Scalar>(
    channel: &CQChannel<T>,
    p: &Distribution<T>,
    sigma: &DensityOperator<T>,
    c: T,
    m: u64,
) -> Result<T> {
    if m == 0 {
        return Err(Error::validation("M must be positive"));
    }
    Error::check_dim(channel.dim(), sigma.dim())?;
    let map = pinching_from_spectrum(sigma.operator())?;
    let v_prime = T::lit(map.len() as f64);
    let tol = T::tolerance(SUPPORT_TOL);
    let inverse = power_on_support(sigma.operator(), -T::one(), tol)?;
    let kernel = eigh(sigma.operator())?.projector_where(|x| x <= tol);
    let c_sigma = sigma.operator().scale(c);

    let mut first = T::zero();
    let mut second = T::zero();
    for (&px, w) in p.masses().iter().zip(channel.states()) {
        if px <= T::zero() {
            continue;
        }
        if w.operator().trace_product(&kernel)? > tol {
            return Err(Error::Domain("output leaves the support of sigma".into()));
        }
        let e = pinch(&map, w.operator())?;
        let large = positive_part_projector(&c_sigma, &e)?;
        first += px * w.operator().trace_product(&large)?;
        let small = HermitianOperator::identity(e.dim()).sub(&large)?;
        let e2 = e.matrix().matmul(e.matrix());
        let term = inverse.matrix().matmul(&e2).matmul(small.matrix()).trace().re;
        second += px * term;
    }
    Ok(T::lit(4.0) * first.max(T::zero()).sqrt() + (v_prime / T::lit(m as f64) * second.max(T::zero())).sqrt())
}

/// Lemma bound `4√(Σ p Tr W_x {E(W_x) ≥ L⌈W(p)⌉}) + √(vL/M)` with `E` the pinching of `⌈W(p)⌉_{λ,v}`.
pub fn ll1b_bound<T: Scalar>(channel: &CQChannel<T>, p: &Distribution<T>, params: SmoothingParams<T>, m: u64) -> Result<T> {
    if m == 0 {
        return Err(Error::validation("M must be positive"));
    }
    let out = output_state(channel, p)?;
    let ceil = ceil_operator(out.operator(), params.lambda(), params.v())?;
    let map = pinching_from_spectrum(&ceil)?;
    let threshold = ceil.scale(params.l());
    let mut first = T::zero();
    for (&px, w) in p.masses().iter().zip(channel.states()) {
        if px <= T::zero() {
            continue;
        }
        let e = pinch(&map, w.operator())?;
        let large = positive_part_projector(&threshold, &e)?;
        first += px * w.operator().trace_product(&large)?;
    }
    let v = T::lit(params.v() as f64);
    Ok(T::lit(4.0) * first.max(T::zero()).sqrt() + (v * params.l() / T::lit(m as f64)).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConversePoint<T> {
    pub n: usize,
    pub m: u64,
    pub error: T,
}

/// Exact `ε(p^{⊗n}, W^{⊗n}, ⌊2^{nR}⌋)` for `n = 1..=n_max`.
pub fn converse_trend<T: Scalar>(
    channel: &CQChannel<T>,
    p: &Distribution<T>,
    rate: T,
    n_max: usize,
    caps: &Caps,
) -> Result<Vec<ConversePoint<T>>> {
    if !(rate >= T::zero()) {
        return Err(Error::validation("rate must be non-negative"));
    }
    (1..=n_max)
        .map(|n| {
            let m = T::two().powf(T::lit(n as f64) * rate).floor().as_f64().max(1.0);
            if m > u64::MAX as f64 {
                return Err(Error::ResourceCap {
                    what: "codebook size",
                    requested: u128::MAX,
                    cap: u64::MAX as u128,
                });
            }
            let m = m as u64;
            let r = resolution_error_iid(channel, p, m, n, caps)?;
            Ok(ConversePoint { n, m, error: r.error })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{codebook_state, enumerate_m_types, Codebook, Word};
    use crate::hermitian::{min_eigenvalue, trace_distance};
    use crate::testutil::*;
    use proptest::prelude::*;

    fn example1(eps: f64) -> CQChannel<f64> {
        CQChannel::classical(&[vec![1.0 - eps, eps], vec![eps, 1.0 - eps], vec![0.5, 0.5]]).unwrap()
    }

    fn flip(eps: f64) -> CQChannel<f64> {
        CQChannel::classical(&[vec![1.0 - eps, eps], vec![eps, 1.0 - eps]]).unwrap()
    }

    /// Direct minimum over materialized M-types using codebook states.
    fn naive(channel: &CQChannel<f64>, p_n: &Distribution<f64>, m: u64, n: usize) -> f64 {
        let caps = Caps::default();
        let product = channel.product(n, &caps).unwrap();
        let target = output_state(&product, p_n).unwrap();
        enumerate_m_types(product.alphabet_size(), m, &caps)
            .unwrap()
            .iter()
            .map(|t| {
                let words = t
                    .codebook()
                    .into_iter()
                    .map(|x| Word::from_index(x, channel.alphabet_size(), n))
                    .collect();
                let s = codebook_state(channel, &Codebook::new(words).unwrap(), &caps).unwrap();
                trace_distance(s.operator(), target.operator()).unwrap()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn m_type_unranking_matches_enumeration() {
        let caps = Caps::default();
        for k in 1..=4 {
            for m in 1..=5 {
                for (i, t) in enumerate_m_types(k, m, &caps).unwrap().into_iter().enumerate() {
                    assert_eq!(nth_m_type(k, m, i as u128), t);
                }
            }
        }
    }

    #[test]
    fn exact_examples() {
        let caps = Caps::default();
        let w = example1(0.1);
        let p = Distribution::new(vec![0.5, 0.5, 0.0]).unwrap();
        let r = resolution_error_exact(&w, &p, 1, 1, &caps).unwrap();
        assert!(r.error.abs() < 1e-15);
        assert_eq!(r.argmin.counts(), &[0, 0, 1]);

        let r = resolution_error_exact(&flip(0.1), &Distribution::uniform(2), 1, 1, &caps).unwrap();
        assert!((r.error - 0.4).abs() < 1e-12);
        assert_eq!(r.argmin.counts(), &[0, 1]);

        let q = Distribution::new(vec![0.25, 0.5, 0.25]).unwrap();
        assert!(resolution_error_exact(&w, &q, 4, 1, &caps).unwrap().error.abs() < 1e-12);
    }

    #[test]
    fn exact_matches_naive_enumeration() {
        let caps = Caps::default();
        let mut r = rng(30);
        for _ in 0..10 {
            let w = random_channel(&mut r, 3, 2);
            let p = random_distribution(&mut r, 3);
            for m in 1..=3 {
                let fast = resolution_error_exact(&w, &p, m, 1, &caps).unwrap().error;
                assert!((fast - naive(&w, &p, m, 1)).abs() < 1e-10);
            }
        }
        let w = random_channel(&mut r, 2, 2);
        let p = random_distribution(&mut r, 2);
        let fast = resolution_error_iid(&w, &p, 3, 2, &caps).unwrap().error;
        assert!((fast - naive(&w, &p.iid_power(2), 3, 2)).abs() < 1e-10);
    }

    #[test]
    fn exact_respects_caps() {
        let caps = Caps { max_types: 9, ..Caps::default() };
        assert!(matches!(
            resolution_error_exact(&example1(0.1), &Distribution::uniform(3), 3, 1, &caps),
            Err(Error::ResourceCap { .. })
        ));
        let caps = Caps { max_dim: 4, ..Caps::default() };
        assert!(matches!(
            resolution_error_iid(&flip(0.1), &Distribution::uniform(2), 1, 3, &caps),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn exact_nonincreasing_under_multiples() {
        let caps = Caps::default();
        let mut r = rng(31);
        for _ in 0..10 {
            let w = random_channel(&mut r, 3, 2);
            let p = random_distribution(&mut r, 3);
            for m in 1..=3 {
                let a = resolution_error_exact(&w, &p, m, 1, &caps).unwrap().error;
                let b = resolution_error_exact(&w, &p, 2 * m, 1, &caps).unwrap().error;
                assert!(b <= a + 1e-12);
            }
        }
    }

    /// `½ Σ_k C(n,k) |(1-ε)^{n-k} ε^k - 2^{-n}|`: a product of flips against the uniform target.
    fn flip_word_distance(eps: f64, n: i32) -> f64 {
        let mut binom = 1.0;
        let mut total = 0.0;
        for k in 0..=n {
            total += binom * ((1.0 - eps).powi(n - k) * eps.powi(k) - 0.5f64.powi(n)).abs();
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
        total / 2.0
    }

    #[test]
    fn converse_trend_goldens() {
        let caps = Caps::default();
        let trend = converse_trend(&flip(0.1), &Distribution::uniform(2), 0.0, 4, &caps).unwrap();
        let goldens = [0.4, 0.56, 0.604, 0.6352];
        for (pt, g) in trend.iter().zip(goldens) {
            assert_eq!(pt.m, 1);
            assert!((pt.error - flip_word_distance(0.1, pt.n as i32)).abs() < 1e-12);
            assert!((pt.error - g).abs() < 1e-12, "n={} {}", pt.n, pt.error);
        }
        assert!(trend[3].error > trend[0].error);
    }

    #[test]
    fn converse_trend_injective_above_rate() {
        let caps = Caps::default();
        let w = CQChannel::classical(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let trend = converse_trend(&w, &Distribution::uniform(2), 1.0, 3, &caps).unwrap();
        for pt in trend {
            assert_eq!(pt.m, 1 << pt.n);
            assert!(pt.error < 1e-12);
        }
    }

    #[test]
    fn worst_examples() {
        let caps = Caps::default();
        let search = WorstSearch { grid: 20, refine: true };
        let noiseless = CQChannel::classical(&[vec![1.0]]).unwrap();
        assert_eq!(resolution_error_worst(&noiseless, 3, 1, search, &caps).unwrap().lower_bound, 0.0);

        // outputs (a, 1-a) for a in [0.1, 0.9]; the farthest point from {0.1, 0.5, 0.9} is 0.2 away
        let w = resolution_error_worst(&example1(0.1), 1, 1, search, &caps).unwrap();
        assert!((w.lower_bound - 0.2).abs() < 1e-6, "{}", w.lower_bound);
        let exact = resolution_error_exact(&example1(0.1), &w.input, 1, 1, &caps).unwrap();
        assert!((exact.error - w.lower_bound).abs() < 1e-12);
    }

    #[test]
    fn worst_grid_nonincreasing_under_multiples() {
        let caps = Caps::default();
        let mut r = rng(32);
        let search = WorstSearch { grid: 10, refine: false };
        for _ in 0..3 {
            let w = random_channel(&mut r, 3, 2);
            let a = resolution_error_worst(&w, 1, 1, search, &caps).unwrap().lower_bound;
            let b = resolution_error_worst(&w, 2, 1, search, &caps).unwrap().lower_bound;
            let c = resolution_error_worst(&w, 4, 1, search, &caps).unwrap().lower_bound;
            assert!(b <= a + 1e-12 && c <= b + 1e-12);
        }
    }

    #[test]
    fn soft_cover_bound_examples() {
        let two = RenyiOrder::new(2.0).unwrap();
        let rho = DensityOperator::<f64>::from_diag(&[0.3, 0.7]).unwrap();
        let flat = CQChannel::from_states(vec![rho.clone(), rho]).unwrap();
        let q = Distribution::uniform(2);
        assert!((soft_cover_bound(two, &flat, &q, 1).unwrap() - 0.5).abs() < 1e-12);
        assert!((soft_cover_bound(two, &flat, &q, 4).unwrap() - 0.125).abs() < 1e-12);
        let w = example1(0.2);
        for alpha in [1.25, 1.5, 2.0] {
            let o = RenyiOrder::new(alpha).unwrap();
            let a = soft_cover_bound(o, &w, &Distribution::uniform(3), 8).unwrap();
            let b = soft_cover_bound(o, &w, &Distribution::uniform(3), 16).unwrap();
            assert!((a / b - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn renyi_mutual_info_is_additive_on_products() {
        let caps = Caps::default();
        let mut r = rng(33);
        let w = random_channel(&mut r, 2, 2);
        let q = random_distribution(&mut r, 2);
        for alpha in [1.25, 2.0] {
            let o = RenyiOrder::new(alpha).unwrap();
            let one = renyi_mutual_info(o, &w, &q).unwrap().value;
            let two = renyi_mutual_info(o, &w.product(2, &caps).unwrap(), &q.iid_power(2)).unwrap().value;
            assert!((two - 2.0 * one).abs() < 1e-7);
        }
    }

    #[test]
    fn soft_cover_single_output_channel() {
        let caps = Caps::default();
        let rho = DensityOperator::<f64>::from_diag(&[0.3, 0.7]).unwrap();
        let flat = CQChannel::from_states(vec![rho.clone(), rho]).unwrap();
        let rep = soft_cover_simulate(&flat, &Distribution::uniform(2), 3, 2, 20, 1, &[], &caps).unwrap();
        assert!(rep.mean_error.abs() < 1e-12);
        assert_eq!(rep.errors.len(), 20);
    }

    #[test]
    fn soft_cover_m1_matches_closed_form() {
        let caps = Caps::default();
        let mut r = rng(34);
        let w = random_channel(&mut r, 2, 2);
        let q = Distribution::new(vec![0.3, 0.7]).unwrap();
        let out = output_state(&w, &q).unwrap();
        let expected: f64 = (0..2)
            .map(|x| q.mass(x) * trace_distance(w.state(x).operator(), out.operator()).unwrap())
            .sum();
        let rep = soft_cover_simulate(&w, &q, 1, 1, 4000, 9, &[], &caps).unwrap();
        assert!((rep.mean_error - expected).abs() < 4.0 * rep.std_error + 1e-12);
    }

    #[test]
    fn soft_cover_is_deterministic() {
        let caps = Caps::default();
        let mut r = rng(35);
        let w = random_channel(&mut r, 3, 2);
        let q = Distribution::uniform(3);
        let orders = [RenyiOrder::new(2.0).unwrap()];
        let a = soft_cover_simulate(&w, &q, 5, 2, 30, 11, &orders, &caps).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| soft_cover_simulate(&w, &q, 5, 2, 30, 11, &orders, &caps).unwrap());
        assert_eq!(a, b);
        let c = soft_cover_simulate(&w, &q, 5, 2, 30, 12, &orders, &caps).unwrap();
        assert_ne!(a.errors, c.errors);
    }

    #[test]
    fn ceil_examples() {
        let flat = HermitianOperator::from_real_diag(&[0.5, 0.5]);
        assert!(ceil_operator(&flat, 0.7, 3).unwrap().max_abs_diff(&flat) < 1e-15);

        let rho = HermitianOperator::from_real_diag(&[0.8, 0.15, 0.05]);
        let c = ceil_operator(&rho, 1.0, 10).unwrap();
        let expected = HermitianOperator::from_real_diag(&[0.8, 0.2, 0.05]);
        assert!(c.max_abs_diff(&expected) < 1e-12, "{:?}", c.diagonal());

        let rho = HermitianOperator::from_real_diag(&[0.9, 0.1]);
        let c = ceil_operator(&rho, 1.0, 1).unwrap();
        assert!(c.max_abs_diff(&HermitianOperator::from_real_diag(&[0.9, 0.45])) < 1e-12);

        assert!(ceil_operator(&HermitianOperator::<f64>::zeros(2), 1.0, 1).is_err());
    }

    #[test]
    fn ceil_level_count() {
        let mut r = rng(36);
        for _ in 0..20 {
            let rho = random_density(&mut r, 5);
            for v in 1..=4 {
                let c = ceil_operator(rho.operator(), 0.5, v).unwrap();
                assert!(pinching_from_spectrum(&c).unwrap().len() <= v as usize + 1);
            }
        }
    }

    #[test]
    fn ll2_flat_channel() {
        let sigma = DensityOperator::from_diag(&[0.6, 0.3, 0.1]).unwrap();
        let w = CQChannel::from_states(vec![sigma.clone(), sigma.clone()]).unwrap();
        let p = Distribution::uniform(2);
        let m = 5;
        // {σ ≥ 2σ} = 0, and Tr σ⁻¹σ² = 1 with v' = 3
        let b = ll2_bound(&w, &p, &sigma, 2.0, m).unwrap();
        assert!((b - (3.0f64 / 5.0).sqrt()).abs() < 1e-12);
        let far = ll2_bound(&w, &p, &sigma, 2.0, 1_000_000).unwrap();
        assert!(far < 2e-3);
    }

    #[test]
    fn ll1b_flat_channel() {
        let rho = DensityOperator::from_diag(&[0.6, 0.3, 0.1]).unwrap();
        let w = CQChannel::from_states(vec![rho.clone(), rho]).unwrap();
        let params = SmoothingParams::new(1.0, 3, 2.0).unwrap();
        let b = ll1b_bound(&w, &Distribution::uniform(2), params, 7).unwrap();
        assert!((b - (2.0f64 * 3.0 / 7.0).sqrt()).abs() < 1e-12);
        let params = SmoothingParams::new(1.0, 4, 8.0).unwrap();
        let b = ll1b_bound(&w, &Distribution::uniform(2), params, 128).unwrap();
        assert!((b - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ll2_rejects_support_violation() {
        let w = CQChannel::classical(&[vec![0.5, 0.5]]).unwrap();
        let sigma = DensityOperator::from_diag(&[1.0, 0.0]).unwrap();
        assert!(ll2_bound(&w, &Distribution::uniform(1), &sigma, 1.0, 2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn ceil_sandwich(seed in any::<u64>(), d in 1usize..=5, lambda in 0.1f64..3.0, v in 1u32..8) {
            let mut r = rng(seed);
            let rho = random_density(&mut r, d);
            let c = ceil_operator(rho.operator(), lambda, v).unwrap();
            prop_assert!(min_eigenvalue(&c.sub(rho.operator()).unwrap()).unwrap() >= -1e-9);
            let upper = rho.operator().scale(2f64.powf(lambda))
                .add(&HermitianOperator::identity(d).scale(2f64.powf(-(v as f64) * lambda))).unwrap();
            prop_assert!(min_eigenvalue(&upper.sub(&c).unwrap()).unwrap() >= -1e-9);
        }
    }
}
