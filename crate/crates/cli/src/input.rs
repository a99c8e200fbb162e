//! JSON input files and built-in channels.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use cqres::channel::{Codebook, Word};
use cqres::hermitian::ComplexMatrix;
use cqres::idcodes::{IDCode, IDEntry};
use cqres::{Channel, Code, Density, Dist, Operator};
use num_complex::Complex;
use serde::Deserialize;

use crate::CliError;

/// Row-major complex matrix as `[[[re, im], ...], ...]`.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub dim: usize,
    pub inputs: Vec<InputJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputJson {
    pub label: String,
    pub state: MatrixJson,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdCodeJson {
    pub lambda1: f64,
    pub lambda2: f64,
    pub entries: Vec<IdEntryJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdEntryJson {
    pub dist: BTreeMap<String, f64>,
    pub test: MatrixJson,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    // serde_json reports line and column
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn context(what: String) -> impl FnOnce(cqres::Error) -> CliError {
    move |e| CliError::Input(format!("{what}: {e}"))
}

pub fn matrix_from_json(m: &MatrixJson, dim: usize, what: &str) -> Result<ComplexMatrix<f64>, CliError> {
    if m.len() != dim || m.iter().any(|r| r.len() != dim) {
        return Err(CliError::Input(format!("{what}: expected a {dim}x{dim} matrix")));
    }
    let rows: Vec<Vec<Complex<f64>>> = m
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Complex::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(context(what.to_string()))
}

pub fn channel_from_json(c: &ChannelJson) -> Result<Channel, CliError> {
    let mut labels = Vec::with_capacity(c.inputs.len());
    let mut states = Vec::with_capacity(c.inputs.len());
    for input in &c.inputs {
        let what = format!("input '{}'", input.label);
        let m = matrix_from_json(&input.state, c.dim, &what)?;
        states.push(Density::from_matrix(m).map_err(context(what))?);
        labels.push(input.label.clone());
    }
    Channel::new(labels, states).map_err(context("channel".into()))
}

pub fn load_channel(path: &Path) -> Result<Channel, CliError> {
    let text = read(path)?;
    channel_from_json(&parse(path, &text)?)
}

/// The three-input channel `0 ↦ (1-ε, ε)`, `1 ↦ (ε, 1-ε)`, `e ↦ (½, ½)`.
pub fn example1(eps: f64) -> Result<Channel, CliError> {
    check_eps(eps)?;
    let rows = [vec![1.0 - eps, eps], vec![eps, 1.0 - eps], vec![0.5, 0.5]];
    let states = rows
        .iter()
        .map(|r| Density::from_diag(r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Channel::new(vec!["0".into(), "1".into(), "e".into()], states)?)
}

/// Binary symmetric channel with crossover `ε`.
pub fn flip(eps: f64) -> Result<Channel, CliError> {
    check_eps(eps)?;
    let states = vec![Density::from_diag(&[1.0 - eps, eps])?, Density::from_diag(&[eps, 1.0 - eps])?];
    Ok(Channel::new(vec!["0".into(), "1".into()], states)?)
}

fn check_eps(eps: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(CliError::Input(format!("--eps must lie in [0, 1], got {eps}")))
    }
}

pub fn dist_from_map(map: &BTreeMap<String, f64>, channel: &Channel, what: &str) -> Result<Dist, CliError> {
    let mut masses = vec![0.0; channel.alphabet_size()];
    for (label, &mass) in map {
        let x = channel
            .label_index(label)
            .ok_or_else(|| CliError::Input(format!("{what}: unknown input label '{label}'")))?;
        masses[x] = mass;
    }
    Dist::new(masses).map_err(context(what.to_string()))
}

pub fn load_dist(path: &Path, channel: &Channel) -> Result<Dist, CliError> {
    let text = read(path)?;
    let map: BTreeMap<String, f64> = parse(path, &text)?;
    dist_from_map(&map, channel, &path.display().to_string())
}

pub fn load_codebook(path: &Path, channel: &Channel) -> Result<Codebook, CliError> {
    let text = read(path)?;
    let rows: Vec<Vec<String>> = parse(path, &text)?;
    let mut words = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let symbols = row
            .iter()
            .map(|l| {
                channel
                    .label_index(l)
                    .ok_or_else(|| CliError::Input(format!("codeword {i}: unknown input label '{l}'")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        words.push(Word::new(symbols).map_err(context(format!("codeword {i}")))?);
    }
    Codebook::new(words).map_err(context("codebook".into()))
}

pub fn id_code_from_json(c: &IdCodeJson, channel: &Channel) -> Result<Code, CliError> {
    let mut entries = Vec::with_capacity(c.entries.len());
    for (i, e) in c.entries.iter().enumerate() {
        let what = format!("entry {i}");
        let dist = dist_from_map(&e.dist, channel, &what)?;
        let m = matrix_from_json(&e.test, channel.dim(), &what)?;
        let test = Operator::new(m).map_err(context(what))?;
        entries.push(IDEntry { dist, test });
    }
    IDCode::new(entries, c.lambda1, c.lambda2).map_err(context("identification code".into()))
}

pub fn load_id_code(path: &Path, channel: &Channel) -> Result<Code, CliError> {
    let text = read(path)?;
    id_code_from_json(&parse(path, &text)?, channel)
}

pub fn load_density(path: &Path) -> Result<Density, CliError> {
    let text = read(path)?;
    let m: MatrixJson = parse(path, &text)?;
    let dim = m.len();
    let what = path.display().to_string();
    Density::from_matrix(matrix_from_json(&m, dim, &what)?).map_err(context(what))
}

/// `a:b:step`, inclusive of `b` up to rounding.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts[..] else {
        return Err(format!("expected start:stop:step, got '{s}'"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if step.is_nan() || step <= 0.0 || a.is_nan() || b.is_nan() || b < a {
        return Err(format!("need step > 0 and stop ≥ start in '{s}'"));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| a + step * i as f64).collect())
}
