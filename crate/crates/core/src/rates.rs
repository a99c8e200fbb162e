//! Holevo capacity and the fixed-input resolvability rate.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::channel::{output_state, CQChannel, Distribution};
use crate::error::{Error, Result};
use crate::hermitian::{trace_norm, HermitianOperator};
use crate::info::{mutual_info, qrel_entropy};
use crate::scalar::{Extended, Scalar};

pub const BA_MAX_ITER: usize = 100_000;
pub const BA_PRUNE: f64 = 1e-15;
/// Largest alphabet accepted by vertex enumeration.
pub const MAX_VERTEX_ALPHABET: usize = 12;
pub const RANK_TOL: f64 = 1e-9;
pub const FEASIBILITY_TOL: f64 = 1e-8;
pub const DEDUP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate<T> {
    /// `max_x D(W_x‖W(p)) - I(p)`, an upper bound on `C(W) - value`, at the returned input.
    DualityGap { gap: T, input: Distribution<T> },
    /// The feasible vertex attaining the minimum.
    Argmin(Distribution<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult<T> {
    pub value: T,
    pub certificate: Certificate<T>,
    pub iterations: usize,
}

impl<T: Scalar> RateResult<T> {
    pub fn distribution(&self) -> &Distribution<T> {
        match &self.certificate {
            Certificate::DualityGap { input, .. } => input,
            Certificate::Argmin(q) => q,
        }
    }
}

/// `C(W) = max_p I(X;B)` by Blahut–Arimoto, stopping once the duality gap is at most `tol`.
pub fn capacity<T: Scalar>(channel: &CQChannel<T>, tol: T) -> Result<RateResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::validation("tolerance must be positive"));
    }
    let k = channel.alphabet_size();
    let mut p = Distribution::uniform(k);
    let prune = T::lit(BA_PRUNE);
    let mut last = (T::zero(), T::infinity());
    for it in 0..BA_MAX_ITER {
        let out = output_state(channel, &p)?;
        let divs = channel
            .states()
            .iter()
            .map(|w| qrel_entropy(w, &out))
            .collect::<Result<Vec<_>>>()?;
        let info: T = p
            .masses()
            .iter()
            .zip(&divs)
            .filter(|(m, _)| **m > T::zero())
            .map(|(m, d)| *m * d.to_scalar())
            .sum();
        let top = divs.iter().copied().fold(Extended::Finite(T::zero()), |a, b| if b > a { b } else { a });
        let gap = match top {
            Extended::Finite(t) => (t - info).max(T::zero()),
            _ => T::infinity(),
        };
        last = (info, gap);
        if gap <= tol {
            return Ok(RateResult {
                value: info,
                certificate: Certificate::DualityGap { gap, input: p },
                iterations: it,
            });
        }
        let weights: Vec<T> = p
            .masses()
            .iter()
            .zip(&divs)
            .map(|(m, d)| match d {
                Extended::Finite(v) => *m * T::two().powf(*v),
                // zero-mass letters with unreachable outputs stay at zero
                _ => T::zero(),
            })
            .collect();
        let total: T = weights.iter().copied().sum();
        let pruned: Vec<T> = weights
            .into_iter()
            .map(|w| if w / total < prune { T::zero() } else { w })
            .collect();
        p = Distribution::from_weights(pruned)?;
    }
    Err(Error::NoConvergence {
        iterations: BA_MAX_ITER,
        best_value: last.0.as_f64(),
        residual: last.1.as_f64(),
        best_point: p.masses().iter().map(|m| m.as_f64()).collect(),
    })
}

/// Real coordinates of a Hermitian matrix (diagonal, then real and imaginary upper parts).
fn real_coords<T: Scalar>(op: &HermitianOperator<T>) -> Vec<f64> {
    let d = op.dim();
    let m = op.matrix();
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        v.push(m.get(i, i).re.as_f64());
    }
    for i in 0..d {
        for j in (i + 1)..d {
            v.push(m.get(i, j).re.as_f64());
            v.push(m.get(i, j).im.as_f64());
        }
    }
    v
}

fn numeric_rank(m: &DMatrix<f64>) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    m.clone().svd(false, false).singular_values.iter().filter(|&&s| s > RANK_TOL).count()
}

fn subsets(k: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << k) {
        if (mask.count_ones() as usize) <= max_size {
            out.push((0..k).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Vertices of `{q in the simplex : W(q) = W(p)}`.
///
/// Each support set of size at most `rank{W_x - W_0} + 1` with independent outputs is solved
/// exactly; nonnegative solutions reproducing `W(p)` within 1e-8 in trace norm are kept.
pub fn feasible_vertices<T: Scalar>(channel: &CQChannel<T>, p: &Distribution<T>) -> Result<Vec<Distribution<T>>> {
    let k = channel.alphabet_size();
    if k > MAX_VERTEX_ALPHABET {
        return Err(Error::ResourceCap {
            what: "alphabet size for vertex enumeration",
            requested: k as u128,
            cap: MAX_VERTEX_ALPHABET as u128,
        });
    }
    let target = output_state(channel, p)?;
    let cols: Vec<Vec<f64>> = channel.states().iter().map(|w| real_coords(w.operator())).collect();
    let rows = cols[0].len();
    let b = DVector::from_vec(real_coords(target.operator()));

    let diffs = DMatrix::from_fn(rows, k - 1, |i, j| cols[j + 1][i] - cols[0][i]);
    let rank = numeric_rank(&diffs) + 1;

    let candidates: Vec<Option<Vec<f64>>> = subsets(k, rank)
        .par_iter()
        .map(|support| {
            let a = DMatrix::from_fn(rows, support.len(), |i, j| cols[support[j]][i]);
            if numeric_rank(&a) < support.len() {
                return None;
            }
            let sol = a.svd(true, true).solve(&b, RANK_TOL).ok()?;
            if sol.iter().any(|&x| x < -DEDUP_TOL) {
                return None;
            }
            let mut q = vec![0.0; k];
            for (&x, &v) in support.iter().zip(sol.iter()) {
                q[x] = v.max(0.0);
            }
            Some(q)
        })
        .collect();

    let mut vertices: Vec<Distribution<T>> = Vec::new();
    for q in candidates.into_iter().flatten() {
        let total: f64 = q.iter().sum();
        if !(total > 0.0) {
            continue;
        }
        let Ok(dist) = Distribution::new(q.iter().map(|x| T::lit(x / total)).collect()) else {
            continue;
        };
        let out = output_state(channel, &dist)?;
        if trace_norm(&out.operator().sub(target.operator())?)?.as_f64() > FEASIBILITY_TOL {
            continue;
        }
        if vertices.iter().any(|v| v.max_abs_diff(&dist).as_f64() <= DEDUP_TOL) {
            continue;
        }
        vertices.push(dist);
    }
    Ok(vertices)
}

/// `R(p,W) = min_{q : W(q) = W(p)} I(X;B)_{W×q}`, attained at a vertex by concavity of `I` in `q`.
pub fn fixed_input_rate<T: Scalar>(channel: &CQChannel<T>, p: &Distribution<T>) -> Result<RateResult<T>> {
    let vertices = feasible_vertices(channel, p)?;
    let mut best: Option<(T, Distribution<T>)> = None;
    for q in vertices.iter() {
        let v = mutual_info(channel, q)?;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, q.clone()));
        }
    }
    let (value, argmin) = match best {
        Some(b) => b,
        // numerical corner: fall back to p itself, which is always feasible
        None => (mutual_info(channel, p)?, p.clone()),
    };
    let own = mutual_info(channel, p)?;
    let (value, argmin) = if own < value { (own, p.clone()) } else { (value, argmin) };
    Ok(RateResult {
        value,
        certificate: Certificate::Argmin(argmin),
        iterations: vertices.len(),
    })
}
