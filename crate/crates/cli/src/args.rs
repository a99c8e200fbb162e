use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Parser)]
#[command(name = "cqres", version, about = "Classical-quantum channel resolvability toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Cap on enumerated M-types / empirical types.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub max_types: u128,

    /// Cap on tensor-power matrix dimension.
    #[arg(long, global = true, default_value_t = 4096)]
    pub max_dim: usize,

    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    /// Inputs 0, 1, e with outputs (1-ε, ε), (ε, 1-ε), (½, ½).
    Example1,
    /// Binary symmetric channel.
    Flip,
}

#[derive(Debug, Clone, Args)]
pub struct ChannelArgs {
    /// Channel JSON: {"dim": d, "inputs": [{"label": .., "state": [[[re, im], ..], ..]}]}
    #[arg(long, conflicts_with = "builtin")]
    pub channel: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,

    /// Crossover parameter of the built-in channel.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DistArgs {
    /// Distribution JSON: {"label": mass, ..}; missing labels get mass 0.
    #[arg(long, conflicts_with = "uniform")]
    pub dist: Option<PathBuf>,

    #[arg(long)]
    pub uniform: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RhoArgs {
    /// Density JSON: [[[re, im], ..], ..]
    #[arg(long, conflicts_with = "rho_diag")]
    pub rho: Option<PathBuf>,

    /// Diagonal density, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub rho_diag: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Holevo capacity by Blahut-Arimoto.
    #[command(after_help = "CSV: capacity,duality_gap,iterations,input")]
    Capacity {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },

    /// Fixed-input resolvability rate min { I(p', W) : W(p') = W(p) }.
    #[command(after_help = "CSV: fixed_rate,argmin")]
    FixedRate {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        dist: DistArgs,
    },

    /// Exact resolution error over M-types on X^n for the input p^n.
    #[command(after_help = "CSV: n,M,exact_error\nWith --codebook: n,M,codebook_error")]
    Resolve {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long = "M")]
        m: u64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Codebook JSON (array of words, each an array of labels) to evaluate instead.
        #[arg(long)]
        codebook: Option<PathBuf>,
    },

    /// Lower bound on the worst-input resolution error by grid and local search.
    #[command(after_help = "CSV: n,M,lower_bound,input")]
    WorstResolve {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long = "M")]
        m: u64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Simplex grid step 1/grid.
        #[arg(long, default_value_t = 20)]
        grid: u64,
        #[arg(long)]
        no_refine: bool,
    },

    /// Random-codebook soft covering against the one-shot Rényi bound.
    #[command(after_help = "CSV: sample,trace_distance (half trace norm per sampled codebook)")]
    Softcover {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long = "M")]
        m: u64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.25, 1.5, 2.0])]
        alpha: Vec<f64>,
    },

    /// Pinching-based bound with σ = W(p).
    #[command(after_help = "CSV: M,C,bound")]
    BoundLl2 {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long = "M")]
        m: u64,
        /// Threshold; defaults to M/(4v') with v' the number of distinct eigenvalues of W(p).
        #[arg(long = "C")]
        c: Option<f64>,
    },

    /// Smoothing-based bound.
    #[command(after_help = "CSV: M,lambda,v,L,bound")]
    BoundLl1b {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long = "M")]
        m: u64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        v: u32,
        /// Defaults to M/(4v).
        #[arg(long = "L")]
        l: Option<f64>,
    },

    /// Sanov exponents of every empirical state of length n in the standard basis.
    #[command(after_help = "CSV: type_counts,exponent,member")]
    SanovSweep {
        #[command(flatten)]
        rho: RhoArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: f64,
    },

    /// Types bound Tr ρ^n T ≤ 2^{-nD} for every type of length 1..=n.
    #[command(after_help = "CSV: n,type_counts,lhs,rhs,ok")]
    TypesCheck {
        #[command(flatten)]
        rho: RhoArgs,
        #[arg(long)]
        n: u64,
    },

    /// Validate an identification code against a channel.
    #[command(after_help = "CSV: i,j,acceptance,pass\nID-code JSON: {\"lambda1\": .., \"lambda2\": .., \"entries\": [{\"dist\": {..}, \"test\": [[[re, im], ..], ..]}]}")]
    IdVerify {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        code: PathBuf,
    },

    /// Counting check |X|^M ≥ N tying ID codes to resolvability.
    #[command(after_help = "CSV: N,alphabet,M,lambda1,lambda2,resolution_error,alphabet_pow,holds,applicable,double_margin")]
    IdBridge {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long = "N")]
        n_codes: u128,
        /// Alphabet size; defaults to the channel's.
        #[arg(long)]
        alphabet: Option<u64>,
        #[arg(long = "M")]
        m: u64,
        #[arg(long)]
        lambda1: f64,
        #[arg(long)]
        lambda2: f64,
        /// ε(W, M); computed by worst-input search on the channel when absent.
        #[arg(long)]
        resolution_error: Option<f64>,
        #[arg(long, default_value_t = 20)]
        grid: u64,
    },

    /// Exact errors at M = max(1, ⌊2^{nR}⌋) for n = 1..=n-max.
    #[command(after_help = "CSV: n,M,exact_error")]
    ConverseTrend {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 0.0)]
        rate: f64,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },

    /// Capacity and fixed rate at p = (½, ½, 0) of the built-in example1 over an ε grid.
    #[command(after_help = "CSV: epsilon,capacity,fixed_rate")]
    SeparationFigure {
        #[arg(long, default_value = "0.05:0.5:0.05")]
        eps_grid: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}
