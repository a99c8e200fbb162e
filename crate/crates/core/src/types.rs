//! Method of types in a fixed basis: empirical states, type projectors, majorization,
//! Sanov-set membership, permutation twirling and the related operator inequalities.

use std::collections::HashMap;

use num_complex::Complex;
use rayon::prelude::*;

use crate::channel::{empirical_output, enumerate_m_types, m_type_count, output_state, CQChannel, Distribution, Word};
use crate::error::{saturating_pow, Caps, Error, Result};
use crate::hermitian::{min_eigenvalue, trace_norm, ComplexMatrix, DensityOperator, HermitianOperator};
use crate::info::{phi, qrel_entropy, shannon_entropy, vn_entropy, PinchingMap};
use crate::scalar::{Extended, Scalar};

pub const BASIS_TOL: f64 = 1e-10;
/// Largest block length accepted by [`twirl`] (`7! = 5040` permutations).
pub const MAX_TWIRL_N: usize = 7;
pub const MAJORIZATION_TOL: f64 = 1e-12;

/// Orthonormal basis `{|v_j⟩}` stored as the columns of a unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis<T> {
    vectors: ComplexMatrix<T>,
}

impl<T: Scalar> Basis<T> {
    pub fn new(vectors: ComplexMatrix<T>) -> Result<Self> {
        let gram = vectors.adjoint().matmul(&vectors);
        if gram.max_abs_diff(&ComplexMatrix::identity(vectors.dim())) > T::tolerance(BASIS_TOL) {
            return Err(Error::validation("basis vectors are not orthonormal"));
        }
        Ok(Basis { vectors })
    }

    pub fn standard(d: usize) -> Self {
        Basis {
            vectors: ComplexMatrix::identity(d),
        }
    }

    /// Eigenbasis of `op`, in descending eigenvalue order.
    pub fn eigenbasis(op: &HermitianOperator<T>) -> Result<Self> {
        Ok(Basis {
            vectors: op.eigh()?.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn unitary(&self) -> &ComplexMatrix<T> {
        &self.vectors
    }

    /// `Σ_j w_j |v_j⟩⟨v_j|`
    pub fn diagonal_operator(&self, weights: &[T]) -> HermitianOperator<T> {
        HermitianOperator::from_real_diag(weights)
            .conjugate_by(&self.vectors)
            .expect("dimensions agree")
    }

    /// `U^{⊗n}`
    pub fn tensor_unitary(&self, n: usize, caps: &Caps) -> Result<ComplexMatrix<T>> {
        caps.check_dim("basis tensor power", saturating_pow(self.dim(), n))?;
        let mut acc = self.vectors.clone();
        for _ in 1..n {
            acc = acc.kron(&self.vectors);
        }
        Ok(acc)
    }
}

/// Letter counts of a length-n word of basis indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmpiricalState {
    counts: Vec<u64>,
    n: u64,
}

impl EmpiricalState {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::validation("empirical state over an empty basis"));
        }
        let n = counts.iter().sum();
        if n == 0 {
            return Err(Error::validation("empirical state of an empty word"));
        }
        Ok(EmpiricalState { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.counts.len()
    }

    pub fn frequencies<T: Scalar>(&self) -> Vec<T> {
        let n = T::lit(self.n as f64);
        self.counts.iter().map(|&c| T::lit(c as f64) / n).collect()
    }

    /// `Σ_j (c_j/n) |v_j⟩⟨v_j|`
    pub fn density<T: Scalar>(&self, basis: &Basis<T>) -> Result<DensityOperator<T>> {
        Error::check_dim(basis.dim(), self.d())?;
        DensityOperator::new(basis.diagonal_operator(&self.frequencies()))
    }
}

pub fn empirical_state(word: &[usize], d: usize) -> Result<EmpiricalState> {
    let mut counts = vec![0u64; d];
    for &x in word {
        if x >= d {
            return Err(Error::validation(format!("basis index {x} out of range for dimension {d}")));
        }
        counts[x] += 1;
    }
    EmpiricalState::new(counts)
}

/// All empirical states of length `n` over `d` letters, lexicographically.
pub fn enumerate_empirical_states(n: u64, d: usize, caps: &Caps) -> Result<Vec<EmpiricalState>> {
    Ok(enumerate_m_types(d, n, caps)?
        .into_iter()
        .map(|t| EmpiricalState {
            counts: t.counts().to_vec(),
            n,
        })
        .collect())
}

pub fn empirical_state_count(n: u64, d: usize) -> u128 {
    m_type_count(d, n)
}

/// `n! / Π c_j!`, saturating.
pub fn multinomial(counts: &[u64]) -> u128 {
    let mut total: u128 = 1;
    let mut seen: u128 = 0;
    for &c in counts {
        for i in 1..=c as u128 {
            seen += 1;
            // running product of binomials stays integral
            total = total.saturating_mul(seen) / i;
        }
    }
    total
}

/// Type class of every word of `(C^d)^{⊗n}`, indexed with the first letter most significant.
fn word_types(d: usize, n: usize) -> Vec<Vec<u64>> {
    let total = d.pow(n as u32);
    (0..total)
        .map(|idx| {
            let mut counts = vec![0u64; d];
            for x in Word::from_index(idx, d, n).symbols {
                counts[x] += 1;
            }
            counts
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct TypeProjector<T> {
    pub ty: EmpiricalState,
    pub basis: Basis<T>,
    pub matrix: HermitianOperator<T>,
}

impl<T: Scalar> TypeProjector<T> {
    pub fn rank(&self) -> u128 {
        multinomial(self.ty.counts())
    }
}

/// `T^n_{ρ',B} = Σ_{x^n : e_B(x^n) = ρ'} |v[x^n]⟩⟨v[x^n]|`
pub fn type_projector<T: Scalar>(t: &EmpiricalState, basis: &Basis<T>, caps: &Caps) -> Result<TypeProjector<T>> {
    let d = basis.dim();
    Error::check_dim(d, t.d())?;
    let n = t.n() as usize;
    let u = basis.tensor_unitary(n, caps)?;
    let diag: Vec<T> = word_types(d, n)
        .into_iter()
        .map(|c| if c == t.counts() { T::one() } else { T::zero() })
        .collect();
    let matrix = HermitianOperator::from_real_diag(&diag).conjugate_by(&u)?;
    Ok(TypeProjector {
        ty: t.clone(),
        basis: basis.clone(),
        matrix,
    })
}

/// Pinching `E_B(X) = Σ_t T_t X T_t` over all type classes of length `n`.
pub fn type_pinching<T: Scalar>(basis: &Basis<T>, n: usize, caps: &Caps) -> Result<PinchingMap<T>> {
    let d = basis.dim();
    caps.check_types(empirical_state_count(n as u64, d))?;
    let u = basis.tensor_unitary(n, caps)?;
    let types = word_types(d, n);
    let mut blocks = Vec::new();
    for t in enumerate_empirical_states(n as u64, d, caps)? {
        let diag: Vec<T> = types
            .iter()
            .map(|c| if c == t.counts() { T::one() } else { T::zero() })
            .collect();
        blocks.push(HermitianOperator::from_real_diag(&diag).conjugate_by(&u)?);
    }
    Ok(PinchingMap::from_blocks_unchecked(blocks))
}

fn sorted_descending<T: Scalar>(p: &[T]) -> Vec<T> {
    let mut v = p.to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).expect("finite masses"));
    v
}

/// `p ≻ p2`: every descending prefix sum of `p` dominates that of `p2`.
pub fn majorizes<T: Scalar>(p: &[T], p2: &[T]) -> Result<bool> {
    if p.len() != p2.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: p2.len(),
        });
    }
    let (a, b) = (sorted_descending(p), sorted_descending(p2));
    let tol = T::tolerance(MAJORIZATION_TOL);
    let mut sa = T::zero();
    let mut sb = T::zero();
    for (x, y) in a.iter().zip(&b) {
        sa += *x;
        sb += *y;
        if sa < sb - tol {
            return Ok(false);
        }
    }
    Ok((sa - sb).abs() <= T::tolerance(1e-9))
}

#[derive(Debug, Clone)]
pub struct SanovQuery<T> {
    /// Candidate spectrum `p'`.
    pub p_prime: Distribution<T>,
    pub rho_prime: EmpiricalState,
    pub basis: Basis<T>,
    pub rho: DensityOperator<T>,
    pub r: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SanovResult<T> {
    /// `D(ρ'‖ρ) + H(ρ') - H(p')`
    pub value: Extended<T>,
    /// Membership in `S_{ρ,r}`: `value ≤ r`.
    pub member: bool,
}

pub fn sanov_exponent<T: Scalar>(q: &SanovQuery<T>) -> Result<SanovResult<T>> {
    let spectrum: Vec<T> = q.rho_prime.frequencies();
    if !majorizes(q.p_prime.masses(), &spectrum)? {
        return Err(Error::Domain("p' does not majorize the spectrum of rho'".into()));
    }
    let rho_prime = q.rho_prime.density(&q.basis)?;
    let entropy_gap = vn_entropy(&rho_prime)? - shannon_entropy(q.p_prime.masses());
    let value = qrel_entropy(&rho_prime, &q.rho)?.map(|d| d + entropy_gap);
    let member = match value {
        Extended::Finite(v) => v <= q.r,
        Extended::NegInfinity => true,
        Extended::PosInfinity => false,
    };
    Ok(SanovResult { value, member })
}

/// Local dimension `d` with `d^n = dim`.
fn local_dim(dim: usize, n: usize) -> Result<usize> {
    let d = (dim as f64).powf(1.0 / n as f64).round() as usize;
    if d == 0 || d.checked_pow(n as u32) != Some(dim) {
        return Err(Error::validation(format!("dimension {dim} is not an n-th power for n = {n}")));
    }
    Ok(d)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `(1/n!) Σ_g U_g X U_g†` over permutations of the `n` tensor factors.
pub fn twirl<T: Scalar>(op: &HermitianOperator<T>, n: usize) -> Result<HermitianOperator<T>> {
    if n == 0 {
        return Err(Error::validation("block length must be positive"));
    }
    if n > MAX_TWIRL_N {
        return Err(Error::ResourceCap {
            what: "twirl block length",
            requested: n as u128,
            cap: MAX_TWIRL_N as u128,
        });
    }
    let dim = op.dim();
    let d = local_dim(dim, n)?;
    let perms = permutations(n);
    let words: Vec<Vec<usize>> = (0..dim).map(|i| Word::from_index(i, d, n).symbols).collect();
    let permuted = |g: &[usize], idx: usize| -> usize {
        let w = &words[idx];
        g.iter().fold(0, |acc, &src| acc * d + w[src])
    };
    let zero = Complex::new(T::zero(), T::zero());
    let entries: Vec<(usize, usize, Complex<T>)> = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let z = op.matrix().get(i, j);
            (z != zero).then_some((i, j, z))
        })
        .collect();
    let weight = T::one() / T::lit(perms.len() as f64);
    let mut out = ComplexMatrix::zeros(dim);
    for g in &perms {
        let map: HashMap<usize, usize> = entries
            .iter()
            .flat_map(|&(i, j, _)| [i, j])
            .map(|i| (i, permuted(g, i)))
            .collect();
        for &(i, j, z) in &entries {
            let (a, b) = (map[&i], map[&j]);
            out.set(a, b, out.get(a, b) + z * weight);
        }
    }
    Ok(HermitianOperator::from_matrix_unchecked(out))
}

/// `x^n ∈ B_n(δ, p)`: `‖W[x^n] - W(p)‖₁ ≥ δ`.
pub fn bad_codeword_test<T: Scalar>(channel: &CQChannel<T>, w: &Word, p: &Distribution<T>, delta: T) -> Result<bool> {
    if !(delta > T::zero()) {
        return Err(Error::validation("delta must be positive"));
    }
    let emp = empirical_output(channel, w)?;
    let target = output_state(channel, p)?;
    Ok(trace_norm(&emp.operator().sub(target.operator())?)? >= delta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypesBound<T> {
    pub n: u64,
    pub counts: Vec<u64>,
    /// `Tr ρ^{⊗n} T^n_{ρ'}`
    pub lhs: T,
    /// `2^{-n D(ρ'‖ρ)}`
    pub rhs: T,
    pub ok: bool,
}

/// Classical types bound `Tr ρ^{⊗n} T^n_{ρ'} ≤ 2^{-n D(ρ'‖ρ)}` for `ρ` diagonal in the standard basis.
pub fn commuting_types_bound_check<T: Scalar>(rho: &DensityOperator<T>, rho_prime: &EmpiricalState) -> Result<TypesBound<T>> {
    if !rho.operator().is_diagonal(T::tolerance(1e-12)) {
        return Err(Error::validation("rho must be diagonal in the type basis"));
    }
    Error::check_dim(rho.dim(), rho_prime.d())?;
    let probs = rho.operator().diagonal();
    let n = rho_prime.n();
    let freqs: Vec<T> = rho_prime.frequencies();
    let mut log_prob = T::zero();
    let mut kl = T::zero();
    let mut impossible = false;
    for ((&c, &f), &r) in rho_prime.counts().iter().zip(&freqs).zip(&probs) {
        if c == 0 {
            continue;
        }
        if r <= T::zero() {
            impossible = true;
            break;
        }
        log_prob += T::lit(c as f64) * r.log2();
        kl += f * (f / r).log2();
    }
    let (lhs, rhs) = if impossible {
        (T::zero(), T::zero())
    } else {
        let mult = T::lit(multinomial(rho_prime.counts()) as f64);
        (mult * T::two().powf(log_prob), T::two().powf(-T::lit(n as f64) * kl))
    };
    Ok(TypesBound {
        n,
        counts: rho_prime.counts().to_vec(),
        lhs,
        rhs,
        ok: lhs <= rhs * (T::one() + T::tolerance(1e-9)),
    })
}

/// The types bound for every type of length `n`.
pub fn types_bound_sweep<T: Scalar>(rho: &DensityOperator<T>, n: u64, caps: &Caps) -> Result<Vec<TypesBound<T>>> {
    enumerate_empirical_states(n, rho.dim(), caps)?
        .par_iter()
        .map(|t| commuting_types_bound_check(rho, t))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinchingSandwich<T> {
    /// `-φ(s|E_B(σ^{⊗n})‖ρ^{⊗n})`
    pub pinched: T,
    /// `-φ(s|σ^{⊗n}‖ρ^{⊗n})`
    pub plain: T,
    /// `s (d-1) log(n+1)`
    pub slack: T,
    pub ok: bool,
}

/// Checks `-φ(s|E_B(σ^{⊗n})‖ρ^{⊗n}) ≤ -φ(s|σ^{⊗n}‖ρ^{⊗n}) ≤ -φ(s|E_B(σ^{⊗n})‖ρ^{⊗n}) + s(d-1)log(n+1)`
/// with `B` the eigenbasis of `ρ`.
pub fn pinching_sandwich_check<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    n: usize,
    s: T,
    tol: T,
    caps: &Caps,
) -> Result<PinchingSandwich<T>> {
    if !(s > T::zero() && s < T::one()) {
        return Err(Error::Domain(format!("s must lie in (0, 1), got {s}")));
    }
    Error::check_dim(rho.dim(), sigma.dim())?;
    let basis = Basis::eigenbasis(rho.operator())?;
    let map = type_pinching(&basis, n, caps)?;
    let rho_n = rho.tensor_power(n, caps)?;
    let sigma_n = sigma.tensor_power(n, caps)?;
    let pinched_sigma = DensityOperator::from_operator_unchecked(crate::info::pinch(&map, sigma_n.operator())?);
    let neg = |x: Extended<T>| match x {
        Extended::Finite(v) => Ok(-v),
        _ => Err(Error::Domain("phi is not finite".into())),
    };
    let pinched = neg(phi(s, &pinched_sigma, &rho_n)?)?;
    let plain = neg(phi(s, &sigma_n, &rho_n)?)?;
    let slack = s * T::lit((rho.dim() - 1) as f64) * T::lit((n + 1) as f64).log2();
    Ok(PinchingSandwich {
        pinched,
        plain,
        slack,
        ok: pinched <= plain + tol && plain <= pinched + slack + tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwirlCheck<T> {
    pub word: Vec<usize>,
    /// Smallest eigenvalue of `(n+1)^{|X|-1} e(x^n)^{⊗n} - W_{S_n}(|x^n⟩⟨x^n|)`.
    pub min_eigenvalue: T,
    pub ok: bool,
}

/// `W_{S_n}(|x^n⟩⟨x^n|) ≤ (n+1)^{|X|-1} e(x^n)^{⊗n}` for a word over `alphabet` letters.
pub fn twirl_inequality_check<T: Scalar>(word: &[usize], alphabet: usize, slack: T, caps: &Caps) -> Result<TwirlCheck<T>> {
    let n = word.len();
    let e = empirical_state(word, alphabet)?;
    let e_n = e.density::<T>(&Basis::standard(alphabet))?.tensor_power(n, caps)?;
    let idx = Word::new(word.to_vec())?.to_index(alphabet);
    let dim = e_n.dim();
    let mut diag = vec![T::zero(); dim];
    diag[idx] = T::one();
    let tw = twirl(&HermitianOperator::from_real_diag(&diag), n)?;
    let factor = T::lit((n + 1) as f64).powi(alphabet as i32 - 1);
    let diff = e_n.operator().scale(factor).sub(&tw)?;
    // both sides are diagonal in the word basis
    let min = if diff.is_diagonal(T::zero()) {
        diff.diagonal().into_iter().fold(T::infinity(), T::min)
    } else {
        min_eigenvalue(&diff)?
    };
    Ok(TwirlCheck {
        word: word.to_vec(),
        min_eigenvalue: min,
        ok: min >= -slack,
    })
}
