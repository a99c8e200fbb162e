//! Classical-quantum channels, input distributions, words, codebooks and M-types.

use crate::error::{binomial, saturating_pow, Caps, Error, Result};
use crate::hermitian::DensityOperator;
use crate::scalar::Scalar;

/// Tolerance on `Σ p(x) = 1` for distributions.
pub const DISTRIBUTION_TOL: f64 = 1e-12;
/// Tolerance on `M·p(x) ∈ ℤ` for M-types.
pub const MTYPE_TOL: f64 = 1e-9;

/// A finite alphabet mapped to density operators of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CQChannel<T> {
    labels: Vec<String>,
    states: Vec<DensityOperator<T>>,
}

impl<T: Scalar> CQChannel<T> {
    pub fn new(labels: Vec<String>, states: Vec<DensityOperator<T>>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::validation("channel needs at least one input"));
        }
        if labels.len() != states.len() {
            return Err(Error::validation(format!(
                "{} labels for {} states",
                labels.len(),
                states.len()
            )));
        }
        let d = states[0].dim();
        for (label, s) in labels.iter().zip(&states) {
            if s.dim() != d {
                return Err(Error::validation(format!(
                    "state for input '{label}' has dimension {}, expected {d}",
                    s.dim()
                )));
            }
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::validation(format!("duplicate input label '{a}'")));
            }
        }
        Ok(CQChannel { labels, states })
    }

    /// Channel with labels `0, 1, ..., k-1`.
    pub fn from_states(states: Vec<DensityOperator<T>>) -> Result<Self> {
        let labels = (0..states.len()).map(|i| i.to_string()).collect();
        Self::new(labels, states)
    }

    /// Classical channel: each row is an output distribution, embedded as a diagonal density.
    pub fn classical(rows: &[Vec<T>]) -> Result<Self> {
        let states = rows
            .iter()
            .map(|r| DensityOperator::from_diag(r))
            .collect::<Result<Vec<_>>>()?;
        Self::from_states(states)
    }

    pub fn alphabet_size(&self) -> usize {
        self.states.len()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn states(&self) -> &[DensityOperator<T>] {
        &self.states
    }

    pub fn state(&self, x: usize) -> &DensityOperator<T> {
        &self.states[x]
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The n-fold product channel `x^n ↦ W_{x_1} ⊗ ... ⊗ W_{x_n}` over the
    /// product alphabet, indexed with `x_1` most significant.
    pub fn product(&self, n: usize, caps: &Caps) -> Result<CQChannel<T>> {
        if n == 0 {
            return Err(Error::validation("block length must be positive"));
        }
        caps.check_dim("product output dimension", saturating_pow(self.dim(), n))?;
        let k = self.alphabet_size();
        let count = saturating_pow(k, n);
        caps.check_types(count)?;
        let mut labels = Vec::with_capacity(count as usize);
        let mut states = Vec::with_capacity(count as usize);
        for idx in 0..count as usize {
            let w = Word::from_index(idx, k, n);
            labels.push(
                w.symbols
                    .iter()
                    .map(|&x| self.labels[x].as_str())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            states.push(word_state(self, &w, caps)?);
        }
        Ok(CQChannel { labels, states })
    }
}

/// Probability vector over a channel alphabet (by position).
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    masses: Vec<T>,
}

impl<T: Scalar> Distribution<T> {
    pub fn new(masses: Vec<T>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::validation("distribution over an empty alphabet"));
        }
        if let Some(m) = masses.iter().find(|m| !(**m >= T::zero())) {
            return Err(Error::validation(format!("negative or invalid mass {m}")));
        }
        let total: T = masses.iter().copied().sum();
        if !((total - T::one()).abs() <= T::tolerance(DISTRIBUTION_TOL)) {
            return Err(Error::validation(format!("masses sum to {total}, expected 1")));
        }
        Ok(Distribution { masses })
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(weights: Vec<T>) -> Result<Self> {
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero()) || weights.iter().any(|w| *w < T::zero()) {
            return Err(Error::validation("weights must be non-negative with positive sum"));
        }
        Ok(Distribution {
            masses: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(k: usize) -> Self {
        Distribution {
            masses: vec![T::one() / T::lit(k as f64); k],
        }
    }

    pub fn point_mass(k: usize, x: usize) -> Self {
        let mut masses = vec![T::zero(); k];
        masses[x] = T::one();
        Distribution { masses }
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn mass(&self, x: usize) -> T {
        self.masses[x]
    }

    /// i.i.d. power `p^{⊗n}` on the product alphabet (`x_1` most significant).
    pub fn iid_power(&self, n: usize) -> Distribution<T> {
        let mut masses = vec![T::one()];
        for _ in 0..n {
            masses = masses
                .iter()
                .flat_map(|&a| self.masses.iter().map(move |&b| a * b))
                .collect();
        }
        Distribution { masses }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.masses
            .iter()
            .zip(&other.masses)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }

    fn check_alphabet(&self, k: usize) -> Result<()> {
        if self.len() != k {
            return Err(Error::validation(format!(
                "distribution has {} masses but the alphabet has {k} letters",
                self.len()
            )));
        }
        Ok(())
    }
}

/// A distribution whose masses are integer multiples of `1/M`, stored exactly as counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MType {
    counts: Vec<u64>,
    resolution: u64,
}

impl MType {
    pub fn new(counts: Vec<u64>, resolution: u64) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::validation("M must be positive"));
        }
        if counts.iter().sum::<u64>() != resolution {
            return Err(Error::validation(format!(
                "counts {counts:?} do not sum to M = {resolution}"
            )));
        }
        Ok(MType { counts, resolution })
    }

    /// Recognizes `dist` as an M-type (each `M·p(x)` within 1e-9 of an integer).
    pub fn from_distribution<T: Scalar>(dist: &Distribution<T>, resolution: u64) -> Result<Self> {
        let m = resolution as f64;
        let mut counts = Vec::with_capacity(dist.len());
        for &p in dist.masses() {
            let scaled = p.as_f64() * m;
            let rounded = scaled.round();
            if (scaled - rounded).abs() > MTYPE_TOL {
                return Err(Error::validation(format!("mass {p} is not a multiple of 1/{resolution}")));
            }
            counts.push(rounded as u64);
        }
        Self::new(counts, resolution)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn resolution(&self) -> u64 {
        self.resolution
    }

    pub fn distribution<T: Scalar>(&self) -> Distribution<T> {
        let m = T::lit(self.resolution as f64);
        Distribution {
            masses: self.counts.iter().map(|&c| T::lit(c as f64) / m).collect(),
        }
    }

    /// A codebook realizing this type: each letter repeated `count` times, in letter order.
    pub fn codebook(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(x, &c)| std::iter::repeat_n(x, c as usize))
            .collect()
    }
}

/// A length-n sequence of input letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    pub symbols: Vec<usize>,
}

impl Word {
    pub fn new(symbols: Vec<usize>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::validation("words must have length at least 1"));
        }
        Ok(Word { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Position in the product alphabet of size `k^n` (first letter most significant).
    pub fn to_index(&self, k: usize) -> usize {
        self.symbols.iter().fold(0, |acc, &x| acc * k + x)
    }

    pub fn from_index(mut idx: usize, k: usize, n: usize) -> Word {
        let mut symbols = vec![0; n];
        for slot in symbols.iter_mut().rev() {
            *slot = idx % k;
            idx /= k;
        }
        Word { symbols }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Word { symbols }
    }

    /// Letter frequencies over an alphabet of size `k`.
    pub fn empirical_distribution<T: Scalar>(&self, k: usize) -> Result<Distribution<T>> {
        let mut counts = vec![0u64; k];
        for &x in &self.symbols {
            if x >= k {
                return Err(Error::validation(format!("symbol {x} outside alphabet of size {k}")));
            }
            counts[x] += 1;
        }
        Ok(MType::new(counts, self.len() as u64)?.distribution())
    }

    fn check_alphabet(&self, k: usize) -> Result<()> {
        match self.symbols.iter().find(|&&x| x >= k) {
            Some(x) => Err(Error::validation(format!("symbol {x} outside alphabet of size {k}"))),
            None => Ok(()),
        }
    }
}

/// A size-M sequence of equal-length words; repetitions are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    words: Vec<Word>,
}

impl Codebook {
    pub fn new(words: Vec<Word>) -> Result<Self> {
        let first = words
            .first()
            .ok_or_else(|| Error::validation("codebook must contain at least one word"))?;
        let n = first.len();
        if let Some(w) = words.iter().find(|w| w.len() != n) {
            return Err(Error::validation(format!(
                "codebook words have unequal lengths ({} vs {n})",
                w.len()
            )));
        }
        Ok(Codebook { words })
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn block_length(&self) -> usize {
        self.words[0].len()
    }
}

/// `W × p = Σ_x p(x) |x><x| ⊗ W_x`, kept block-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CQJointState<T> {
    pub blocks: Vec<(T, DensityOperator<T>)>,
}

impl<T: Scalar> CQJointState<T> {
    /// Output marginal `Σ_x p(x) W_x`.
    pub fn marginal(&self) -> Result<DensityOperator<T>> {
        DensityOperator::mixture(self.blocks.iter().map(|(w, s)| (*w, s)))
    }
}

/// `W(p) = Σ_x p(x) W_x`
pub fn output_state<T: Scalar>(channel: &CQChannel<T>, dist: &Distribution<T>) -> Result<DensityOperator<T>> {
    dist.check_alphabet(channel.alphabet_size())?;
    DensityOperator::mixture(dist.masses().iter().copied().zip(channel.states()))
}

pub fn joint_state<T: Scalar>(channel: &CQChannel<T>, dist: &Distribution<T>) -> Result<CQJointState<T>> {
    dist.check_alphabet(channel.alphabet_size())?;
    Ok(CQJointState {
        blocks: dist
            .masses()
            .iter()
            .copied()
            .zip(channel.states().iter().cloned())
            .filter(|(w, _)| *w > T::zero())
            .collect(),
    })
}

/// `W_{x_1} ⊗ ... ⊗ W_{x_n}`
pub fn word_state<T: Scalar>(channel: &CQChannel<T>, w: &Word, caps: &Caps) -> Result<DensityOperator<T>> {
    w.check_alphabet(channel.alphabet_size())?;
    caps.check_dim("word state dimension", saturating_pow(channel.dim(), w.len()))?;
    let mut acc = channel.state(w.symbols[0]).clone();
    for &x in &w.symbols[1..] {
        acc = acc.kron(channel.state(x));
    }
    Ok(acc)
}

/// `W_C = (1/M) Σ_m W_{x_m}`
pub fn codebook_state<T: Scalar>(channel: &CQChannel<T>, c: &Codebook, caps: &Caps) -> Result<DensityOperator<T>> {
    let weight = T::one() / T::lit(c.size() as f64);
    let states = c
        .words()
        .iter()
        .map(|w| word_state(channel, w, caps))
        .collect::<Result<Vec<_>>>()?;
    DensityOperator::mixture(states.iter().map(|s| (weight, s)))
}

/// `W[x^n] = (1/n) Σ_j W_{x_j}`
pub fn empirical_output<T: Scalar>(channel: &CQChannel<T>, w: &Word) -> Result<DensityOperator<T>> {
    let p = w.empirical_distribution(channel.alphabet_size())?;
    output_state(channel, &p)
}

/// Number of M-types on an alphabet of size `k`: `C(M+k-1, k-1)`.
pub fn m_type_count(k: usize, m: u64) -> u128 {
    binomial(m as u128 + k as u128 - 1, k as u128 - 1)
}

/// All M-types on `k` letters, in lexicographic order of their mass vectors.
pub fn enumerate_m_types(k: usize, m: u64, caps: &Caps) -> Result<Vec<MType>> {
    if k == 0 || m == 0 {
        return Err(Error::validation("alphabet size and M must be positive"));
    }
    caps.check_types(m_type_count(k, m))?;
    let mut out = Vec::new();
    let mut counts = vec![0u64; k];
    fill_types(&mut counts, 0, m, m, &mut out);
    Ok(out)
}

fn fill_types(counts: &mut [u64], pos: usize, remaining: u64, m: u64, out: &mut Vec<MType>) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        out.push(MType {
            counts: counts.to_vec(),
            resolution: m,
        });
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        fill_types(counts, pos + 1, remaining - c, m, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::DensityOperator;

    fn example1(eps: f64) -> CQChannel<f64> {
        CQChannel::classical(&[vec![1.0 - eps, eps], vec![eps, 1.0 - eps], vec![0.5, 0.5]]).unwrap()
    }

    fn half_half() -> DensityOperator<f64> {
        DensityOperator::from_diag(&[0.5, 0.5]).unwrap()
    }

    #[test]
    fn output_state_examples() {
        let w = example1(0.1);
        let p = Distribution::new(vec![0.5, 0.5, 0.0]).unwrap();
        let out = output_state(&w, &p).unwrap();
        assert!(out.operator().max_abs_diff(half_half().operator()) < 1e-15);
        let q = Distribution::point_mass(3, 2);
        assert!(output_state(&w, &q).unwrap().operator().max_abs_diff(half_half().operator()) < 1e-15);
        let x = Distribution::point_mass(3, 0);
        assert_eq!(&output_state(&w, &x).unwrap(), w.state(0));
        assert!(output_state(&w, &Distribution::uniform(2)).is_err());
    }

    #[test]
    fn joint_state_examples() {
        let w = example1(0.2);
        let j = joint_state(&w, &Distribution::point_mass(3, 1)).unwrap();
        assert_eq!(j.blocks.len(), 1);
        assert_eq!(j.blocks[0].0, 1.0);
        assert_eq!(&j.blocks[0].1, w.state(1));

        let two = CQChannel::classical(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let j = joint_state(&two, &Distribution::uniform(2)).unwrap();
        assert_eq!(j.blocks.len(), 2);
        assert!(j.blocks.iter().all(|(w, _)| *w == 0.5));
        let total: f64 = j.blocks.iter().map(|(w, s)| w * s.operator().trace()).sum();
        assert!((total - 1.0).abs() < 1e-15);
        let m = j.marginal().unwrap();
        assert!(m.operator().max_abs_diff(half_half().operator()) < 1e-15);
    }

    #[test]
    fn word_and_codebook_states() {
        let caps = Caps::default();
        let w = example1(0.1);
        let single = Word::new(vec![1]).unwrap();
        assert_eq!(&word_state(&w, &single, &caps).unwrap(), w.state(1));
        let xx = Word::new(vec![0, 0]).unwrap();
        let s = word_state(&w, &xx, &caps).unwrap();
        assert_eq!(s, w.state(0).kron(w.state(0)));
        assert!((s.operator().trace() - 1.0).abs() < 1e-15);

        let c1 = Codebook::new(vec![single.clone()]).unwrap();
        assert_eq!(codebook_state(&w, &c1, &caps).unwrap().operator(), w.state(1).operator());
        let dup = Codebook::new(vec![single.clone(), single]).unwrap();
        assert!(codebook_state(&w, &dup, &caps)
            .unwrap()
            .operator()
            .max_abs_diff(w.state(1).operator())
            < 1e-15);
        let c01 = Codebook::new(vec![Word::new(vec![0]).unwrap(), Word::new(vec![1]).unwrap()]).unwrap();
        let s = codebook_state(&w, &c01, &caps).unwrap();
        assert!(s.operator().max_abs_diff(half_half().operator()) < 1e-15);

        assert!(Codebook::new(vec![]).is_err());
        assert!(Codebook::new(vec![Word::new(vec![0]).unwrap(), Word::new(vec![0, 1]).unwrap()]).is_err());
        assert!(word_state(&w, &Word::new(vec![5]).unwrap(), &caps).is_err());
    }

    #[test]
    fn empirical_output_examples() {
        let w = example1(0.3);
        let constant = Word::new(vec![1, 1, 1]).unwrap();
        assert!(empirical_output(&w, &constant)
            .unwrap()
            .operator()
            .max_abs_diff(w.state(1).operator())
            < 1e-15);
        let w01 = Word::new(vec![0, 1]).unwrap();
        assert!(empirical_output(&w, &w01)
            .unwrap()
            .operator()
            .max_abs_diff(half_half().operator())
            < 1e-15);
    }

    #[test]
    fn m_type_enumeration() {
        let caps = Caps::default();
        assert_eq!(enumerate_m_types(3, 2, &caps).unwrap().len(), 6);
        assert_eq!(enumerate_m_types(1, 7, &caps).unwrap(), vec![MType::new(vec![7], 7).unwrap()]);
        let t = enumerate_m_types(2, 3, &caps).unwrap();
        let counts: Vec<Vec<u64>> = t.iter().map(|m| m.counts().to_vec()).collect();
        assert_eq!(counts, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
        let tight = Caps { max_types: 5, ..Caps::default() };
        assert!(matches!(enumerate_m_types(3, 2, &tight), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn m_types_are_distinct_and_valid() {
        let caps = Caps::default();
        for k in 1..=4 {
            for m in 1..=6 {
                let all = enumerate_m_types(k, m, &caps).unwrap();
                assert_eq!(all.len() as u128, m_type_count(k, m));
                let mut sorted = all.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), all.len());
                for t in &all {
                    let d: Distribution<f64> = t.distribution();
                    assert!(MType::from_distribution(&Distribution::new(d.masses().to_vec()).unwrap(), m).is_ok());
                }
            }
        }
    }

    #[test]
    fn mtype_recognition() {
        let d = Distribution::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert_eq!(MType::from_distribution(&d, 3).unwrap().counts(), &[1, 2]);
        assert!(MType::from_distribution(&d, 2).is_err());
    }

    #[test]
    fn codebook_of_single_letters_matches_empirical_output() {
        let caps = Caps::default();
        let w = example1(0.15);
        let letters = vec![0usize, 2, 2, 1, 0];
        let c = Codebook::new(letters.iter().map(|&x| Word::new(vec![x]).unwrap()).collect()).unwrap();
        let p: Distribution<f64> = Word::new(letters).unwrap().empirical_distribution(3).unwrap();
        let a = output_state(&w, &p).unwrap();
        let b = codebook_state(&w, &c, &caps).unwrap();
        assert!(a.operator().max_abs_diff(b.operator()) < 1e-10);
    }

    #[test]
    fn word_state_is_multiplicative_over_concatenation() {
        let caps = Caps::default();
        let w = CQChannel::from_states(vec![
            DensityOperator::pure(&[num_complex::Complex::new(0.6, 0.0), num_complex::Complex::new(0.0, 0.8)]).unwrap(),
            DensityOperator::from_diag(&[0.3, 0.7]).unwrap(),
        ])
        .unwrap();
        let a = Word::new(vec![0, 1]).unwrap();
        let b = Word::new(vec![1]).unwrap();
        let lhs = word_state(&w, &a.concat(&b), &caps).unwrap();
        let rhs = word_state(&w, &a, &caps).unwrap().kron(&word_state(&w, &b, &caps).unwrap());
        assert!(lhs.operator().max_abs_diff(rhs.operator()) < 1e-10);
    }

    #[test]
    fn product_channel_indexing() {
        let caps = Caps::default();
        let w = example1(0.1);
        let w2 = w.product(2, &caps).unwrap();
        assert_eq!(w2.alphabet_size(), 9);
        let idx = Word::new(vec![2, 1]).unwrap().to_index(3);
        assert_eq!(w2.labels()[idx], "2,1");
        assert_eq!(w2.state(idx), &w.state(2).kron(w.state(1)));
        assert_eq!(Word::from_index(idx, 3, 2).symbols, vec![2, 1]);
        let p = Distribution::<f64>::new(vec![0.2, 0.3, 0.5]).unwrap();
        let p2 = p.iid_power(2);
        assert!((p2.mass(idx) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn channel_validation() {
        let a = DensityOperator::<f64>::from_diag(&[1.0, 0.0]).unwrap();
        let b = DensityOperator::<f64>::from_diag(&[1.0, 0.0, 0.0]).unwrap();
        assert!(CQChannel::from_states(vec![a.clone(), b]).is_err());
        assert!(CQChannel::<f64>::from_states(vec![]).is_err());
        assert!(CQChannel::new(vec!["a".into(), "a".into()], vec![a.clone(), a]).is_err());
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![1.5, -0.5]).is_err());
    }
}
