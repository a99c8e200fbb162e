//! Entropies, relative entropies, sandwiched Rényi quantities and pinching.
//!
//! All logarithms are base 2.

use crate::channel::{output_state, CQChannel, Distribution};
use crate::error::{Error, Result};
use crate::hermitian::{
    eigh, positive_part_projector, power_on_support, trace_distance, ComplexMatrix, DensityOperator,
    HermitianOperator,
};
use crate::scalar::{Extended, Scalar};

/// Eigenvalues below this are treated as zero when computing divergences.
pub const SUPPORT_TOL: f64 = 1e-12;

pub const RENYI_MAX_ITER: usize = 500;
pub const RENYI_DAMPING: f64 = 0.5;
pub const RENYI_CONVERGENCE: f64 = 1e-10;

fn support_tol<T: Scalar>() -> T {
    T::tolerance(SUPPORT_TOL)
}

/// `h(e) = -e log e - (1-e) log(1-e)`
pub fn binary_entropy<T: Scalar>(e: T) -> Result<T> {
    if !(e >= T::zero() && e <= T::one()) {
        return Err(Error::Domain(format!("binary entropy argument {e} outside [0, 1]")));
    }
    Ok(xlog_inv(e) + xlog_inv(T::one() - e))
}

/// `x log(1/x)` with `0 log(1/0) = 0`.
fn xlog_inv<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        -x * x.log2()
    } else {
        T::zero()
    }
}

/// Shannon entropy of a probability vector.
pub fn shannon_entropy<T: Scalar>(p: &[T]) -> T {
    p.iter().map(|&x| if x > support_tol() { xlog_inv(x) } else { T::zero() }).sum()
}

/// `H(ρ) = -Tr ρ log ρ`
pub fn vn_entropy<T: Scalar>(rho: &DensityOperator<T>) -> Result<T> {
    let spec = rho.operator().eigh()?;
    Ok(shannon_entropy(&spec.eigenvalues).max(T::zero()))
}

/// Weight of `ρ` outside the support of `σ`.
fn weight_off_support<T: Scalar>(rho: &HermitianOperator<T>, sigma: &HermitianOperator<T>) -> Result<T> {
    let kernel = eigh(sigma)?.projector_where(|x| x <= support_tol());
    rho.trace_product(&kernel)
}

/// `D(ρ‖σ) = Tr ρ (log ρ - log σ)`, `+∞` when `supp ρ ⊄ supp σ`.
pub fn qrel_entropy<T: Scalar>(rho: &DensityOperator<T>, sigma: &DensityOperator<T>) -> Result<Extended<T>> {
    Error::check_dim(rho.dim(), sigma.dim())?;
    if weight_off_support(rho.operator(), sigma.operator())? > support_tol() {
        return Ok(Extended::PosInfinity);
    }
    let tol = support_tol::<T>();
    let log_rho = eigh(rho.operator())?.map(|x| if x > tol { x.log2() } else { T::zero() });
    let log_sigma = eigh(sigma.operator())?.map(|x| if x > tol { x.log2() } else { T::zero() });
    let d = rho.operator().trace_product(&log_rho.sub(&log_sigma)?)?;
    Ok(Extended::Finite(d.max(T::zero())))
}

/// `I(X;B) = H(W(p)) - Σ_x p(x) H(W_x)`
pub fn mutual_info<T: Scalar>(channel: &CQChannel<T>, dist: &Distribution<T>) -> Result<T> {
    let out = output_state(channel, dist)?;
    let mut conditional = T::zero();
    for (&p, w) in dist.masses().iter().zip(channel.states()) {
        if p > T::zero() {
            conditional += p * vn_entropy(w)?;
        }
    }
    Ok((vn_entropy(&out)? - conditional).max(T::zero()))
}

/// `φ(s|ρ‖σ) = log Tr (σ^{s/(2(1-s))} ρ σ^{s/(2(1-s))})^{1-s}` for `s ∈ [-1, 1) \ {0}`.
///
/// Powers of `σ` are taken on its support. For `s < 0` a support violation gives `+∞`;
/// for `s > 0` a vanishing trace gives `-∞`.
pub fn phi<T: Scalar>(s: T, rho: &DensityOperator<T>, sigma: &DensityOperator<T>) -> Result<Extended<T>> {
    if !(s >= -T::one() && s < T::one()) || s == T::zero() {
        return Err(Error::Domain(format!("phi needs s in [-1, 1) without 0, got {s}")));
    }
    Error::check_dim(rho.dim(), sigma.dim())?;
    let tol = support_tol::<T>();
    if s < T::zero() && weight_off_support(rho.operator(), sigma.operator())? > tol {
        return Ok(Extended::PosInfinity);
    }
    let e = s / (T::two() * (T::one() - s));
    let half = power_on_support(sigma.operator(), e, tol)?;
    let inner = rho.operator().sandwich(&half)?;
    let q: T = eigh(&inner)?
        .eigenvalues
        .iter()
        .filter(|&&x| x > T::zero())
        .map(|&x| x.powf(T::one() - s))
        .sum();
    if q > T::zero() {
        Ok(Extended::Finite(q.log2()))
    } else {
        Ok(Extended::NegInfinity)
    }
}

/// Rényi order `α ∈ (1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RenyiOrder<T> {
    alpha: T,
}

impl<T: Scalar> RenyiOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if !(alpha > T::one() && alpha <= T::two()) {
            return Err(Error::Domain(format!("Rényi order must lie in (1, 2], got {alpha}")));
        }
        Ok(RenyiOrder { alpha })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// `s = α - 1`
    pub fn s(&self) -> T {
        self.alpha - T::one()
    }
}

/// `D_{1+s}(ρ‖σ) = φ(-s|ρ‖σ) / s`
pub fn sandwiched_renyi<T: Scalar>(
    order: RenyiOrder<T>,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
) -> Result<Extended<T>> {
    let s = order.s();
    Ok(phi(-s, rho, sigma)?.map(|v| (v / s).max(T::zero())))
}

/// Minimized sandwiched Rényi mutual information and the minimizing `σ`.
#[derive(Debug, Clone)]
pub struct RenyiMutualInfo<T> {
    pub value: T,
    pub sigma: DensityOperator<T>,
    pub iterations: usize,
    /// `false` when the iteration hit its cap; `value` is then the best iterate found.
    pub converged: bool,
}

/// `Σ_x q(x) Tr (σ^β W_x σ^β)^α` and the unnormalized update `Σ_x q(x) (σ^β W_x σ^β)^α`.
fn renyi_objective<T: Scalar>(
    alpha: T,
    channel: &CQChannel<T>,
    q: &Distribution<T>,
    sigma: &DensityOperator<T>,
) -> Result<(T, HermitianOperator<T>)> {
    let beta = (T::one() - alpha) / (T::two() * alpha);
    let half = power_on_support(sigma.operator(), beta, support_tol())?;
    let mut total = T::zero();
    let mut update = ComplexMatrix::zeros(channel.dim());
    for (&p, w) in q.masses().iter().zip(channel.states()) {
        if p <= T::zero() {
            continue;
        }
        let inner = w.operator().sandwich(&half)?;
        let spec = eigh(&inner)?;
        let powered = spec.map(|x| if x > T::zero() { x.powf(alpha) } else { T::zero() });
        total += p * powered.trace();
        update = &update + &powered.matrix().scale(p);
    }
    Ok((total, HermitianOperator::new(update)?))
}

/// Floors the spectrum at the support threshold and renormalizes.
fn floored<T: Scalar>(op: &HermitianOperator<T>) -> Result<DensityOperator<T>> {
    let spec = eigh(op)?;
    let floor = support_tol::<T>();
    let vals: Vec<T> = spec.eigenvalues.iter().map(|&x| x.max(floor)).collect();
    let total: T = vals.iter().copied().sum();
    let vals: Vec<T> = vals.into_iter().map(|x| x / total).collect();
    DensityOperator::new(spec.synthesize(&vals))
}

/// `I_α(X;B) = min_σ 1/(α-1) log Σ_x q(x) ‖σ^{(1-α)/2α} W_x σ^{(1-α)/2α}‖_α^α`
///
/// Damped fixed-point iteration started from `W(q)`.
pub fn renyi_mutual_info<T: Scalar>(
    order: RenyiOrder<T>,
    channel: &CQChannel<T>,
    q: &Distribution<T>,
) -> Result<RenyiMutualInfo<T>> {
    let alpha = order.alpha();
    let s = order.s();
    let value_of = |total: T| (total.log2() / s).max(T::zero());
    let damping = T::lit(RENYI_DAMPING);

    let mut sigma = floored(output_state(channel, q)?.operator())?;
    let (total, mut update) = renyi_objective(alpha, channel, q, &sigma)?;
    let mut best = (value_of(total), sigma.clone());
    for it in 1..=RENYI_MAX_ITER {
        let t = update.trace();
        let target = update.scale(T::one() / t);
        let mixed = sigma.operator().scale(T::one() - damping).add(&target.scale(damping))?;
        let next = floored(&mixed)?;
        let step = trace_distance(next.operator(), sigma.operator())?;
        sigma = next;
        let (total, u) = renyi_objective(alpha, channel, q, &sigma)?;
        update = u;
        let v = value_of(total);
        if v <= best.0 {
            best = (v, sigma.clone());
        }
        if step < T::tolerance(RENYI_CONVERGENCE) {
            return Ok(RenyiMutualInfo {
                value: best.0,
                sigma: best.1,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(RenyiMutualInfo {
        value: best.0,
        sigma: best.1,
        iterations: RENYI_MAX_ITER,
        converged: false,
    })
}

/// Orthogonal projectors summing to the identity.
#[derive(Debug, Clone)]
pub struct PinchingMap<T> {
    blocks: Vec<HermitianOperator<T>>,
}

impl<T: Scalar> PinchingMap<T> {
    pub fn new(blocks: Vec<HermitianOperator<T>>) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::validation("pinching map needs at least one block"))?;
        let d = first.dim();
        let tol = T::tolerance(1e-9);
        let mut sum = ComplexMatrix::zeros(d);
        for (i, p) in blocks.iter().enumerate() {
            Error::check_dim(d, p.dim())?;
            if p.matrix().matmul(p.matrix()).max_abs_diff(p.matrix()) > tol {
                return Err(Error::validation(format!("block {i} is not a projector")));
            }
            for q in &blocks[..i] {
                if p.matrix().matmul(q.matrix()).max_abs_diff(&ComplexMatrix::zeros(d)) > tol {
                    return Err(Error::validation("pinching blocks are not orthogonal"));
                }
            }
            sum = &sum + p.matrix();
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(d)) > tol {
            return Err(Error::validation("pinching blocks do not sum to the identity"));
        }
        Ok(PinchingMap { blocks })
    }

    pub(crate) fn from_blocks_unchecked(blocks: Vec<HermitianOperator<T>>) -> Self {
        PinchingMap { blocks }
    }

    pub fn identity(d: usize) -> Self {
        PinchingMap {
            blocks: vec![HermitianOperator::identity(d)],
        }
    }

    pub fn blocks(&self) -> &[HermitianOperator<T>] {
        &self.blocks
    }

    /// Number of blocks (v′ for a spectral pinching).
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].dim()
    }
}

/// `E(X) = Σ_b P_b X P_b`
pub fn pinch<T: Scalar>(map: &PinchingMap<T>, op: &HermitianOperator<T>) -> Result<HermitianOperator<T>> {
    Error::check_dim(map.dim(), op.dim())?;
    let mut acc = ComplexMatrix::zeros(op.dim());
    for p in map.blocks() {
        acc = &acc + op.sandwich(p)?.matrix();
    }
    Ok(HermitianOperator::from_matrix_unchecked(acc))
}

pub fn pinch_density<T: Scalar>(map: &PinchingMap<T>, rho: &DensityOperator<T>) -> Result<DensityOperator<T>> {
    DensityOperator::new(pinch(map, rho.operator())?)
}

/// Pinching onto the eigenspaces of `sigma`.
pub fn pinching_from_spectrum<T: Scalar>(sigma: &HermitianOperator<T>) -> Result<PinchingMap<T>> {
    Ok(PinchingMap::from_blocks_unchecked(eigh(sigma)?.block_projectors()))
}

/// `Tr ρ {ρ ≤ 2^a σ}`
pub fn spectral_cdf<T: Scalar>(rho: &DensityOperator<T>, sigma: &HermitianOperator<T>, a: T) -> Result<T> {
    Error::check_dim(rho.dim(), sigma.dim())?;
    let proj = positive_part_projector(rho.operator(), &sigma.scale(T::two().powf(a)))?;
    Ok(rho.operator().trace_product(&proj)?.max(T::zero()).min(T::one()))
}
