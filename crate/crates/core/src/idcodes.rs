//! Identification codes: validation against a channel and the counting argument that ties
//! code size to worst-input resolution error.

use crate::channel::{output_state, CQChannel, Distribution};
use crate::error::{Error, Result};
use crate::hermitian::{min_eigenvalue, trace_norm, DensityOperator, HermitianOperator};
use crate::scalar::Scalar;

/// Slack for `0 ≤ D ≤ I`.
pub const TEST_PSD_TOL: f64 = 1e-9;
/// Slack when comparing acceptance probabilities against `λ₁`, `λ₂`.
pub const ACCEPTANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct IDEntry<T> {
    pub dist: Distribution<T>,
    pub test: HermitianOperator<T>,
}

/// `(N, λ₁, λ₂)` identification code `(p_i, D_i)`.
#[derive(Debug, Clone)]
pub struct IDCode<T> {
    entries: Vec<IDEntry<T>>,
    lambda1: T,
    lambda2: T,
}

fn check_effect<T: Scalar>(d: &HermitianOperator<T>) -> Result<()> {
    let tol = T::tolerance(TEST_PSD_TOL);
    if min_eigenvalue(d)? < -tol {
        return Err(Error::validation("test operator is not positive semidefinite"));
    }
    if min_eigenvalue(&HermitianOperator::identity(d.dim()).sub(d)?)? < -tol {
        return Err(Error::validation("test operator exceeds the identity"));
    }
    Ok(())
}

impl<T: Scalar> IDCode<T> {
    pub fn new(entries: Vec<IDEntry<T>>, lambda1: T, lambda2: T) -> Result<Self> {
        for (name, l) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !(l > T::zero() && l < T::one()) {
                return Err(Error::validation(format!("{name} must lie in (0, 1), got {l}")));
            }
        }
        if entries.len() < 2 {
            return Err(Error::validation("an identification code needs at least two entries"));
        }
        let (k, d) = (entries[0].dist.len(), entries[0].test.dim());
        for e in &entries {
            Error::check_dim(k, e.dist.len())?;
            Error::check_dim(d, e.test.dim())?;
            check_effect(&e.test)?;
        }
        Ok(IDCode {
            entries,
            lambda1,
            lambda2,
        })
    }

    pub fn entries(&self) -> &[IDEntry<T>] {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn lambda1(&self) -> T {
        self.lambda1
    }

    pub fn lambda2(&self) -> T {
        self.lambda2
    }

    fn check_channel(&self, channel: &CQChannel<T>) -> Result<()> {
        Error::check_dim(channel.alphabet_size(), self.entries[0].dist.len())?;
        Error::check_dim(channel.dim(), self.entries[0].test.dim())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairCheck<T> {
    pub i: usize,
    pub j: usize,
    /// `Tr W(p_i) D_j`
    pub acceptance: T,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IDVerification<T> {
    /// All ordered pairs; `i == j` rows carry the self-acceptance.
    pub pairs: Vec<PairCheck<T>>,
    /// `max_i 1 - Tr W(p_i) D_i`
    pub worst_missed: T,
    /// `max_{i≠j} Tr W(p_i) D_j`
    pub worst_false_accept: T,
    pub valid: bool,
}

pub fn verify_id_code<T: Scalar>(code: &IDCode<T>, channel: &CQChannel<T>) -> Result<IDVerification<T>> {
    code.check_channel(channel)?;
    let outputs = code
        .entries
        .iter()
        .map(|e| output_state(channel, &e.dist))
        .collect::<Result<Vec<_>>>()?;
    let tol = T::tolerance(ACCEPTANCE_TOL);
    let mut pairs = Vec::new();
    let mut worst_missed = T::neg_infinity();
    let mut worst_false_accept = T::neg_infinity();
    for (i, w) in outputs.iter().enumerate() {
        for (j, e) in code.entries.iter().enumerate() {
            let acc = w.operator().trace_product(&e.test)?;
            let pass = if i == j {
                worst_missed = worst_missed.max(T::one() - acc);
                acc >= T::one() - code.lambda1 - tol
            } else {
                worst_false_accept = worst_false_accept.max(acc);
                acc <= code.lambda2 + tol
            };
            pairs.push(PairCheck {
                i,
                j,
                acceptance: acc,
                pass,
            });
        }
    }
    let valid = pairs.iter().all(|p| p.pass);
    Ok(IDVerification {
        pairs,
        worst_missed: worst_missed.max(T::zero()),
        worst_false_accept: worst_false_accept.max(T::zero()),
        valid,
    })
}

/// `‖D(ρ) - D(σ)‖₁ = 2|Tr (ρ-σ) D|` for the binary measurement `(D, I-D)`.
pub fn measurement_distance<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    test: &HermitianOperator<T>,
) -> Result<T> {
    let diff = rho.operator().sub(sigma.operator())?;
    Ok(T::two() * diff.trace_product(test)?.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDistance<T> {
    pub i: usize,
    pub j: usize,
    pub trace_norm: T,
    pub measured: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceReport<T> {
    pub pairs: Vec<PairDistance<T>>,
    pub min_distance: T,
    /// `2(1 - λ₁ - λ₂)`
    pub required: T,
    pub ok: bool,
}

/// `‖W(p_i) - W(p_j)‖₁ ≥ ‖D_i(W(p_i)) - D_i(W(p_j))‖₁ ≥ 2(1-λ₁-λ₂)` over all `i ≠ j`.
pub fn pairwise_distance_check<T: Scalar>(code: &IDCode<T>, channel: &CQChannel<T>) -> Result<DistanceReport<T>> {
    code.check_channel(channel)?;
    let outputs = code
        .entries
        .iter()
        .map(|e| output_state(channel, &e.dist))
        .collect::<Result<Vec<_>>>()?;
    let required = T::two() * (T::one() - code.lambda1 - code.lambda2);
    let tol = T::tolerance(TEST_PSD_TOL);
    let mut pairs = Vec::new();
    let mut ok = true;
    let mut min_distance = T::infinity();
    for i in 0..outputs.len() {
        for j in 0..outputs.len() {
            if i == j {
                continue;
            }
            let tn = trace_norm(&outputs[i].operator().sub(outputs[j].operator())?)?;
            let measured = measurement_distance(&outputs[i], &outputs[j], &code.entries[i].test)?;
            ok &= tn >= measured - tol && measured >= required - tol;
            min_distance = min_distance.min(tn);
            pairs.push(PairDistance {
                i,
                j,
                trace_norm: tn,
                measured,
            });
        }
    }
    Ok(DistanceReport {
        pairs,
        min_distance,
        required,
        ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Applicability {
    /// `1 - λ₁ - λ₂ > ε`
    Applicable,
    Inapplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BridgeCheck {
    /// `|X|^M ≥ N`
    pub holds: bool,
    pub applicability: Applicability,
    /// `1 - λ₁ - λ₂ > 2ε`, the margin the triangle-inequality step consumes.
    pub double_margin: bool,
    pub alphabet_pow: u128,
}

/// Counting side of the bridge between ID codes and worst-input resolvability.
pub fn bridge_counting_check<T: Scalar>(
    n_codes: u128,
    alphabet_size: u64,
    m: u64,
    lambda1: T,
    lambda2: T,
    eps: T,
) -> Result<BridgeCheck> {
    if alphabet_size == 0 {
        return Err(Error::validation("alphabet must be non-empty"));
    }
    let pow = (alphabet_size as u128).saturating_pow(m.min(u32::MAX as u64) as u32);
    let gap = T::one() - lambda1 - lambda2;
    Ok(BridgeCheck {
        holds: pow >= n_codes,
        applicability: if gap > eps {
            Applicability::Applicable
        } else {
            Applicability::Inapplicable
        },
        double_margin: gap > T::two() * eps,
        alphabet_pow: pow,
    })
}

/// Largest `M` certified by the one-shot estimate `ε(⌊log N / log|X|⌋, W) ≥ 1 - ε_ID(N, W)`.
pub fn one_shot_block(n_codes: u128, alphabet_size: u64) -> Result<u64> {
    if alphabet_size < 2 || n_codes == 0 {
        return Err(Error::validation("need |X| ≥ 2 and N ≥ 1"));
    }
    // integer floor of log_{|X|} N
    let (mut m, mut p) = (0u64, alphabet_size as u128);
    while p <= n_codes {
        m += 1;
        p = match p.checked_mul(alphabet_size as u128) {
            Some(v) => v,
            None => break,
        };
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogChain<T> {
    /// `log log N`
    pub lhs: T,
    /// `log n + log M + log log |X|`
    pub rhs: T,
    pub ok: bool,
}

/// `log log N ≤ log n + log M + log log |X|` for an `n`-shot code of size `N` on alphabet `X`.
pub fn loglog_chain_check<T: Scalar>(n: u64, n_codes: u128, m: u64, alphabet_size: u64) -> Result<LogLogChain<T>> {
    if n == 0 || m == 0 || n_codes < 2 || alphabet_size < 2 {
        return Err(Error::validation("need n, M ≥ 1 and N, |X| ≥ 2"));
    }
    let lg = |x: f64| T::lit(x).log2();
    let lhs = lg(n_codes as f64).log2();
    let rhs = lg(n as f64) + lg(m as f64) + lg(alphabet_size as f64).log2();
    Ok(LogLogChain {
        lhs,
        rhs,
        ok: lhs <= rhs + T::tolerance(1e-12),
    })
}

/// Checks `D_i = Σ_{j ∈ A_i} E_j` for a POVM `{E_j}` and user-supplied index sets `A_i`.
pub fn is_simultaneous<T: Scalar>(code: &IDCode<T>, povm: &[HermitianOperator<T>], subsets: &[Vec<usize>], tol: T) -> Result<bool> {
    if subsets.len() != code.size() {
        return Err(Error::DimensionMismatch {
            expected: code.size(),
            found: subsets.len(),
        });
    }
    let d = code.entries[0].test.dim();
    let mut total = HermitianOperator::zeros(d);
    for e in povm {
        Error::check_dim(d, e.dim())?;
        check_effect(e)?;
        total = total.add(e)?;
    }
    if total.max_abs_diff(&HermitianOperator::identity(d)) > tol {
        return Ok(false);
    }
    for (entry, set) in code.entries.iter().zip(subsets) {
        let mut sum = HermitianOperator::zeros(d);
        for &j in set {
            let e = povm
                .get(j)
                .ok_or_else(|| Error::validation(format!("POVM index {j} out of range")))?;
            sum = sum.add(e)?;
        }
        if sum.max_abs_diff(&entry.test) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::m_type_count;
    use rand::Rng;
    use crate::testutil::*;

    fn orthogonal() -> CQChannel<f64> {
        CQChannel::classical(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn proj(i: usize) -> HermitianOperator<f64> {
        let mut v = vec![0.0; 2];
        v[i] = 1.0;
        HermitianOperator::from_real_diag(&v)
    }

    fn orthogonal_code(l1: f64, l2: f64) -> IDCode<f64> {
        IDCode::new(
            vec![
                IDEntry {
                    dist: Distribution::point_mass(2, 0),
                    test: proj(0),
                },
                IDEntry {
                    dist: Distribution::point_mass(2, 1),
                    test: proj(1),
                },
            ],
            l1,
            l2,
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let e = |t: HermitianOperator<f64>| IDEntry {
            dist: Distribution::uniform(2),
            test: t,
        };
        assert!(IDCode::new(vec![e(proj(0))], 0.1, 0.1).is_err());
        assert!(IDCode::new(vec![e(proj(0)), e(proj(1))], 0.0, 0.1).is_err());
        assert!(IDCode::new(vec![e(proj(0)), e(proj(1))], 0.1, 1.0).is_err());
        assert!(IDCode::new(vec![e(proj(0)), e(proj(0).scale(1.5))], 0.1, 0.1).is_err());
        assert!(IDCode::new(vec![e(proj(0)), e(proj(0).scale(-0.1))], 0.1, 0.1).is_err());
        assert!(IDCode::new(vec![e(proj(0)), e(HermitianOperator::identity(3))], 0.1, 0.1).is_err());
        assert!(IDCode::new(vec![e(proj(0)), e(proj(0).scale(1.0 + 1e-10))], 0.1, 0.1).is_ok());
    }

    #[test]
    fn orthogonal_code_is_valid() {
        for (l1, l2) in [(0.01, 0.01), (0.3, 0.6), (0.9, 0.9)] {
            let code = orthogonal_code(l1, l2);
            let v = verify_id_code(&code, &orthogonal()).unwrap();
            assert!(v.valid);
            assert_eq!(v.worst_missed, 0.0);
            assert_eq!(v.worst_false_accept, 0.0);
            let d = pairwise_distance_check(&code, &orthogonal()).unwrap();
            assert!(d.ok);
            assert!((d.min_distance - 2.0).abs() < 1e-12);
        }
        assert!(verify_id_code(&orthogonal_code(0.1, 0.1), &CQChannel::classical(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap()).is_err());
    }

    #[test]
    fn shared_tests_fail_cross_condition() {
        let ch = CQChannel::classical(&[vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
        let code = IDCode::new(
            vec![
                IDEntry {
                    dist: Distribution::point_mass(2, 0),
                    test: proj(0),
                },
                IDEntry {
                    dist: Distribution::point_mass(2, 1),
                    test: proj(0),
                },
            ],
            0.3,
            0.2,
        )
        .unwrap();
        assert!(!verify_id_code(&code, &ch).unwrap().valid);
    }

    #[test]
    fn identical_outputs_admit_no_code() {
        let mut r = rng(60);
        let ch = random_channel(&mut r, 3, 2);
        // W(p₁) = W(p₂) with p₁ ≠ p₂ needs a collision; use the same input twice
        let p = random_distribution(&mut r, 3);
        for _ in 0..50 {
            let code = IDCode::new(
                vec![
                    IDEntry {
                        dist: p.clone(),
                        test: random_projector(&mut r, 2, 1),
                    },
                    IDEntry {
                        dist: p.clone(),
                        test: random_projector(&mut r, 2, 1),
                    },
                ],
                0.4,
                0.5,
            )
            .unwrap();
            assert!(!verify_id_code(&code, &ch).unwrap().valid);
        }
    }

    #[test]
    fn measurement_contracts_trace_norm() {
        let mut r = rng(61);
        for _ in 0..100 {
            let d = 3;
            let (a, b) = (random_density(&mut r, d), random_density(&mut r, d));
            let rank = 1 + r.random_range(0..d);
            let t = random_projector(&mut r, d, rank);
            let m = measurement_distance(&a, &b, &t).unwrap();
            let tn = trace_norm(&a.operator().sub(b.operator()).unwrap()).unwrap();
            assert!(m <= tn + 1e-9);
        }
    }

    #[test]
    fn verified_codes_pass_distance_check() {
        let mut r = rng(62);
        let mut hits = 0;
        for _ in 0..200 {
            let ch = random_channel(&mut r, 3, 2);
            let entries: Vec<_> = (0..3)
                .map(|x| {
                    let spec = ch.state(x).operator().eigh().unwrap();
                    IDEntry {
                        dist: Distribution::point_mass(3, x),
                        test: spec.synthesize(&[1.0, 0.0]),
                    }
                })
                .collect();
            let code = IDCode::new(entries, 0.45, 0.5).unwrap();
            if verify_id_code(&code, &ch).unwrap().valid {
                hits += 1;
                assert!(pairwise_distance_check(&code, &ch).unwrap().ok);
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn vacuous_distance_requirement() {
        let ch = CQChannel::classical(&[vec![0.6, 0.4], vec![0.5, 0.5]]).unwrap();
        let code = IDCode::new(
            vec![
                IDEntry {
                    dist: Distribution::point_mass(2, 0),
                    test: proj(0),
                },
                IDEntry {
                    dist: Distribution::point_mass(2, 1),
                    test: proj(1),
                },
            ],
            0.6,
            0.6,
        )
        .unwrap();
        let d = pairwise_distance_check(&code, &ch).unwrap();
        assert!(d.required <= 0.0 && d.ok);
    }

    #[test]
    fn counting_examples() {
        let c = bridge_counting_check(9, 3, 2, 0.1, 0.1, 0.3).unwrap();
        assert!(c.holds && c.applicability == Applicability::Applicable);
        assert!(c.double_margin);
        let c = bridge_counting_check(9, 2, 3, 0.1, 0.1, 0.5).unwrap();
        assert!(!c.holds && c.alphabet_pow == 8);
        assert_eq!(c.applicability, Applicability::Applicable);
        assert!(!c.double_margin);
        let c = bridge_counting_check(2, 2, 1, 0.5, 0.4, 0.2).unwrap();
        assert_eq!(c.applicability, Applicability::Inapplicable);
        assert!(bridge_counting_check(u128::MAX, 10, 1000, 0.1, 0.1, 0.0).unwrap().holds);
    }

    #[test]
    fn m_types_never_exceed_alphabet_power() {
        for k in 1..=5u64 {
            for m in 1..=8u64 {
                assert!(m_type_count(k as usize, m) <= (k as u128).pow(m as u32));
            }
        }
    }

    #[test]
    fn one_shot_block_is_floor_log() {
        assert_eq!(one_shot_block(9, 3).unwrap(), 2);
        assert_eq!(one_shot_block(8, 3).unwrap(), 1);
        assert_eq!(one_shot_block(1024, 2).unwrap(), 10);
        assert_eq!(one_shot_block(1023, 2).unwrap(), 9);
        assert_eq!(one_shot_block(u128::MAX, 2).unwrap(), 127);
        for (n, k) in [(100u128, 3u64), (7, 7), (50, 2)] {
            let m = one_shot_block(n, k).unwrap();
            assert!(bridge_counting_check(n, k, m + 1, 0.1, 0.1, 0.0).unwrap().holds);
        }
    }

    #[test]
    fn loglog_chain() {
        // n = 1: equivalent to N ≤ |X|^M
        for (n_codes, k, m) in [(9u128, 3u64, 2u64), (8, 2, 3), (16, 2, 4), (2, 2, 1)] {
            let c = loglog_chain_check::<f64>(1, n_codes, m, k).unwrap();
            assert_eq!(c.ok, bridge_counting_check(n_codes, k, m, 0.1, 0.1, 0.0).unwrap().holds);
        }
        assert!(!loglog_chain_check::<f64>(1, 10, 3, 2).unwrap().ok);
        // n-shot: N ≤ (|X|^n)^M
        assert!(loglog_chain_check::<f64>(3, 1 << 60, 20, 2).unwrap().ok);
        assert!(!loglog_chain_check::<f64>(3, 1 << 61, 20, 2).unwrap().ok);
    }

    #[test]
    fn simultaneous_refinement() {
        let code = orthogonal_code(0.1, 0.1);
        let povm = vec![proj(0), proj(1)];
        assert!(is_simultaneous(&code, &povm, &[vec![0], vec![1]], 1e-12).unwrap());
        assert!(!is_simultaneous(&code, &povm, &[vec![1], vec![0]], 1e-12).unwrap());
        assert!(!is_simultaneous(&code, &[proj(0)], &[vec![0], vec![0]], 1e-12).unwrap());
        let halves = vec![proj(0).scale(0.5), proj(0).scale(0.5), proj(1)];
        assert!(is_simultaneous(&code, &halves, &[vec![0, 1], vec![2]], 1e-12).unwrap());
        assert!(is_simultaneous(&code, &povm, &[vec![0], vec![5]], 1e-12).is_err());
    }
}
