use cqres::channel::{codebook_state, output_state};
use cqres::hermitian::trace_distance;
use cqres::idcodes::{bridge_counting_check, pairwise_distance_check, verify_id_code, Applicability};
use cqres::info::{pinching_from_spectrum, RenyiOrder};
use cqres::rates::{capacity, fixed_input_rate, Certificate};
use cqres::resolvability::{
    converse_trend, ll1b_bound, ll2_bound, resolution_error_iid, resolution_error_worst, soft_cover_simulate,
    SmoothingParams, WorstSearch,
};
use cqres::types::{enumerate_empirical_states, sanov_exponent, types_bound_sweep, Basis, SanovQuery};
use cqres::{Caps, Channel, Density, Dist, Extended};

use crate::args::{Builtin, ChannelArgs, Cli, Command, DistArgs, RhoArgs};
use crate::input::{example1, flip, load_channel, load_codebook, load_density, load_dist, load_id_code, parse_grid};
use crate::output::{counts, masses, num, Table};
use crate::CliError;

/// CSV table plus human-readable report lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub report: Vec<String>,
}

fn channel_of(a: &ChannelArgs) -> Result<Channel, CliError> {
    match (&a.channel, a.builtin) {
        (Some(path), None) => load_channel(path),
        (None, Some(Builtin::Example1)) => example1(a.eps),
        (None, Some(Builtin::Flip)) => flip(a.eps),
        _ => Err(CliError::Input("give exactly one of --channel or --builtin".into())),
    }
}

fn dist_of(a: &DistArgs, channel: &Channel) -> Result<Dist, CliError> {
    match (&a.dist, a.uniform) {
        (Some(path), false) => load_dist(path, channel),
        (None, true) => Ok(Dist::uniform(channel.alphabet_size())),
        _ => Err(CliError::Input("give exactly one of --dist or --uniform".into())),
    }
}

fn rho_of(a: &RhoArgs) -> Result<Density, CliError> {
    match (&a.rho, &a.rho_diag) {
        (Some(path), None) => load_density(path),
        (None, Some(d)) => Ok(Density::from_diag(d)?),
        _ => Err(CliError::Input("give exactly one of --rho or --rho-diag".into())),
    }
}

fn positive(name: &str, v: u64) -> Result<(), CliError> {
    if v == 0 {
        Err(CliError::Input(format!("--{name} must be positive")))
    } else {
        Ok(())
    }
}

fn flag(b: bool) -> String {
    b.to_string()
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let caps = Caps {
        max_dim: cli.max_dim,
        max_types: cli.max_types,
    };
    let mut report = vec![format!("seed: {}", cli.seed)];
    let table = match &cli.command {
        Command::Capacity { channel, tol } => {
            let w = channel_of(channel)?;
            let r = capacity(&w, *tol)?;
            let gap = match &r.certificate {
                Certificate::DualityGap { gap, .. } => *gap,
                Certificate::Argmin(_) => 0.0,
            };
            report.push(format!("capacity: {} bits (duality gap {})", num(r.value), num(gap)));
            let mut t = Table::new(vec!["capacity", "duality_gap", "iterations", "input"]);
            t.push(vec![num(r.value), num(gap), r.iterations.to_string(), masses(r.distribution().masses())]);
            t
        }
        Command::FixedRate { channel, dist } => {
            let w = channel_of(channel)?;
            let p = dist_of(dist, &w)?;
            let r = fixed_input_rate(&w, &p)?;
            report.push(format!("fixed-input rate: {} bits", num(r.value)));
            let mut t = Table::new(vec!["fixed_rate", "argmin"]);
            t.push(vec![num(r.value), masses(r.distribution().masses())]);
            t
        }
        Command::Resolve {
            channel,
            dist,
            m,
            n,
            codebook,
        } => {
            positive("M", *m)?;
            let w = channel_of(channel)?;
            let p = dist_of(dist, &w)?;
            if let Some(path) = codebook {
                let c = load_codebook(path, &w)?;
                if c.size() as u64 != *m || c.block_length() != *n {
                    return Err(CliError::Input(format!(
                        "codebook has {} words of length {}, expected M = {m} and n = {n}",
                        c.size(),
                        c.block_length()
                    )));
                }
                let target = output_state(&w.product(*n, &caps)?, &p.iid_power(*n))?;
                let e = trace_distance(codebook_state(&w, &c, &caps)?.operator(), target.operator())?;
                report.push(format!("codebook error: {}", num(e)));
                let mut t = Table::new(vec!["n", "M", "codebook_error"]);
                t.push(vec![n.to_string(), m.to_string(), num(e)]);
                t
            } else {
                let r = resolution_error_iid(&w, &p, *m, *n, &caps)?;
                report.push(format!("exact error: {} at M-type {}", num(r.error), counts(r.argmin.counts())));
                let mut t = Table::new(vec!["n", "M", "exact_error"]);
                t.push(vec![n.to_string(), m.to_string(), num(r.error)]);
                t
            }
        }
        Command::WorstResolve {
            channel,
            m,
            n,
            grid,
            no_refine,
        } => {
            positive("M", *m)?;
            let w = channel_of(channel)?;
            let search = WorstSearch {
                grid: *grid,
                refine: !no_refine,
            };
            let r = resolution_error_worst(&w, *m, *n, search, &caps)?;
            report.push(format!(
                "worst-input error ≥ {} ({} evaluations)",
                num(r.lower_bound),
                r.evaluations
            ));
            let mut t = Table::new(vec!["n", "M", "lower_bound", "input"]);
            t.push(vec![n.to_string(), m.to_string(), num(r.lower_bound), masses(r.input.masses())]);
            t
        }
        Command::Softcover {
            channel,
            dist,
            m,
            n,
            samples,
            alpha,
        } => {
            positive("M", *m)?;
            let w = channel_of(channel)?;
            let q = dist_of(dist, &w)?;
            let orders = alpha
                .iter()
                .map(|&a| RenyiOrder::new(a))
                .collect::<Result<Vec<_>, _>>()?;
            let r = soft_cover_simulate(&w, &q, *m, *n, *samples, cli.seed, &orders, &caps)?;
            report.push(format!("mean error: {} (std error {})", num(r.mean_error), num(r.std_error)));
            for (a, b) in &r.bounds {
                report.push(format!("bound at alpha {}: {}", num(*a), num(*b)));
            }
            let mut t = Table::new(vec!["sample", "trace_distance"]);
            for (i, e) in r.errors.iter().enumerate() {
                t.push(vec![i.to_string(), num(*e)]);
            }
            t
        }
        Command::BoundLl2 { channel, dist, m, c } => {
            positive("M", *m)?;
            let w = channel_of(channel)?;
            let p = dist_of(dist, &w)?;
            let sigma = output_state(&w, &p)?;
            let c = match c {
                Some(c) => *c,
                None => {
                    let v = pinching_from_spectrum(sigma.operator())?.len();
                    *m as f64 / (4.0 * v as f64)
                }
            };
            let b = ll2_bound(&w, &p, &sigma, c, *m)?;
            report.push(format!("bound: {}", num(b)));
            let mut t = Table::new(vec!["M", "C", "bound"]);
            t.push(vec![m.to_string(), num(c), num(b)]);
            t
        }
        Command::BoundLl1b {
            channel,
            dist,
            m,
            lambda,
            v,
            l,
        } => {
            positive("M", *m)?;
            let w = channel_of(channel)?;
            let p = dist_of(dist, &w)?;
            let l = l.unwrap_or(*m as f64 / (4.0 * *v as f64));
            let b = ll1b_bound(&w, &p, SmoothingParams::new(*lambda, *v, l)?, *m)?;
            report.push(format!("bound: {}", num(b)));
            let mut t = Table::new(vec!["M", "lambda", "v", "L", "bound"]);
            t.push(vec![m.to_string(), num(*lambda), v.to_string(), num(l), num(b)]);
            t
        }
        Command::SanovSweep { rho, n, r } => {
            positive("n", *n)?;
            let rho = rho_of(rho)?;
            let basis = Basis::standard(rho.dim());
            let mut t = Table::new(vec!["type_counts", "exponent", "member"]);
            let mut members = 0;
            for ty in enumerate_empirical_states(*n, rho.dim(), &caps)? {
                let q = SanovQuery {
                    p_prime: Dist::new(ty.frequencies())?,
                    rho_prime: ty.clone(),
                    basis: basis.clone(),
                    rho: rho.clone(),
                    r: *r,
                };
                let res = sanov_exponent(&q)?;
                members += res.member as usize;
                let value = match res.value {
                    Extended::Finite(v) => num(v),
                    Extended::PosInfinity => "inf".into(),
                    Extended::NegInfinity => "-inf".into(),
                };
                t.push(vec![counts(ty.counts()), value, flag(res.member)]);
            }
            report.push(format!("{members} of {} types lie in the Sanov set", t.rows.len()));
            t
        }
        Command::TypesCheck { rho, n } => {
            positive("n", *n)?;
            let rho = rho_of(rho)?;
            let mut t = Table::new(vec!["n", "type_counts", "lhs", "rhs", "ok"]);
            let mut failures = 0;
            for len in 1..=*n {
                for b in types_bound_sweep(&rho, len, &caps)? {
                    failures += (!b.ok) as usize;
                    t.push(vec![len.to_string(), counts(&b.counts), num(b.lhs), num(b.rhs), flag(b.ok)]);
                }
            }
            report.push(format!("{} rows, {failures} violations", t.rows.len()));
            t
        }
        Command::IdVerify { channel, code } => {
            let w = channel_of(channel)?;
            let code = load_id_code(code, &w)?;
            let v = verify_id_code(&code, &w)?;
            report.push(format!(
                "valid: {} (worst missed {}, worst false acceptance {})",
                v.valid,
                num(v.worst_missed),
                num(v.worst_false_accept)
            ));
            if v.valid {
                let d = pairwise_distance_check(&code, &w)?;
                report.push(format!(
                    "min pairwise trace norm {} vs required {}: {}",
                    num(d.min_distance),
                    num(d.required),
                    if d.ok { "ok" } else { "violated" }
                ));
            }
            let mut t = Table::new(vec!["i", "j", "acceptance", "pass"]);
            for p in &v.pairs {
                t.push(vec![p.i.to_string(), p.j.to_string(), num(p.acceptance), flag(p.pass)]);
            }
            t
        }
        Command::IdBridge {
            channel,
            n_codes,
            alphabet,
            m,
            lambda1,
            lambda2,
            resolution_error,
            grid,
        } => {
            positive("M", *m)?;
            let w = if channel.channel.is_some() || channel.builtin.is_some() {
                Some(channel_of(channel)?)
            } else {
                None
            };
            let alphabet = match (alphabet, &w) {
                (Some(a), _) => *a,
                (None, Some(w)) => w.alphabet_size() as u64,
                (None, None) => return Err(CliError::Input("give --alphabet or a channel".into())),
            };
            let eps = match (resolution_error, &w) {
                (Some(e), _) => *e,
                (None, Some(w)) => {
                    let search = WorstSearch {
                        grid: *grid,
                        refine: true,
                    };
                    resolution_error_worst(w, *m, 1, search, &caps)?.lower_bound
                }
                (None, None) => {
                    return Err(CliError::Input("give --resolution-error or a channel".into()));
                }
            };
            let c = bridge_counting_check(*n_codes, alphabet, *m, *lambda1, *lambda2, eps)?;
            let applicable = c.applicability == Applicability::Applicable;
            report.push(format!(
                "|X|^M = {} {} N = {}; lemma {}",
                c.alphabet_pow,
                if c.holds { "≥" } else { "<" },
                n_codes,
                if applicable { "applicable" } else { "inapplicable" }
            ));
            let mut t = Table::new(vec![
                "N",
                "alphabet",
                "M",
                "lambda1",
                "lambda2",
                "resolution_error",
                "alphabet_pow",
                "holds",
                "applicable",
                "double_margin",
            ]);
            t.push(vec![
                n_codes.to_string(),
                alphabet.to_string(),
                m.to_string(),
                num(*lambda1),
                num(*lambda2),
                num(eps),
                c.alphabet_pow.to_string(),
                flag(c.holds),
                flag(applicable),
                flag(c.double_margin),
            ]);
            t
        }
        Command::ConverseTrend {
            channel,
            dist,
            rate,
            n_max,
        } => {
            let w = channel_of(channel)?;
            let p = dist_of(dist, &w)?;
            let points = converse_trend(&w, &p, *rate, *n_max, &caps)?;
            let mut t = Table::new(vec!["n", "M", "exact_error"]);
            for pt in &points {
                t.push(vec![pt.n.to_string(), pt.m.to_string(), num(pt.error)]);
            }
            report.push(format!("{} block lengths at rate {}", points.len(), num(*rate)));
            t
        }
        Command::SeparationFigure { eps_grid, tol } => {
            let grid = parse_grid(eps_grid).map_err(CliError::Input)?;
            let p = Dist::new(vec![0.5, 0.5, 0.0])?;
            let mut t = Table::new(vec!["epsilon", "capacity", "fixed_rate"]);
            for eps in grid {
                let w = example1(eps)?;
                let c = capacity(&w, *tol)?.value;
                let f = fixed_input_rate(&w, &p)?.value;
                t.push(vec![num(eps), num(c), num(f)]);
            }
            report.push(format!("{} grid points", t.rows.len()));
            t
        }
    };
    Ok(Outcome { table, report })
}
