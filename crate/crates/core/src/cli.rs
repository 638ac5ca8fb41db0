//! Command-line front-end. Every subcommand prints one JSON object (or
//! `key: value` lines in plain mode) built from the library results.
//!
//! Exit codes: 0 on success, 1 on a domain error, 2 on a usage error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{Map, Number, Value};

use crate::bounds::{
    construct_large_lfree_traced, epsilon_instance, extend_disjoint, extend_geometric, lambda_of, lfree_interval,
    EpsilonAnchor,
};
use crate::count::{brute_force_multicolour_cliques, count_exact, count_fptras, count_multicolour_cliques, ApproxParams, ColouredGraph};
use crate::equation::LinearEquation;
use crate::error::{Error, Result};
use crate::gadget::{build_gadget, np_instance};
use crate::hypergraph::{to_hitting_set_instance, Hypergraph};
use crate::setcore::{brute_force_count_lfree, brute_force_max_lfree, IntegerSet, DEFAULT_ORACLE_CAP};
use crate::solve::{self, SolveOutcome};

#[derive(Debug, Parser)]
#[command(name = "lfree", version, about = "Subsets of integers avoiding solutions to a linear equation")]
struct Cli {
    /// Largest set the brute-force oracles accept.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: usize,

    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Json)]
    output: OutputMode,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Json,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecideMethod {
    /// Two-variable solver for two-variable equations, hitting sets otherwise.
    Auto,
    HittingSet,
    Fpt,
    TwoVariable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExtendMethod {
    HittingSet,
    Fpt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExtendMode {
    /// Geometric when the coefficients satisfy a + b = c, disjoint otherwise.
    Auto,
    Disjoint,
    Geometric,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Is the set L-free? Reports a non-trivial solution when it is not.
    Check {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        set: PathBuf,
    },
    /// Is there an L-free subset of exactly k elements?
    Decide {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        set: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, default_value_t = DecideMethod::Auto)]
        method: DecideMethod,
    },
    /// Largest L-free subset.
    Max {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        set: PathBuf,
    },
    /// Is there an L-free subset of at least ceil(ε|A|) elements?
    Epsilon {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        epsilon: String,
    },
    /// Is there an L-free k-subset containing a given set?
    ExtendDecide {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        contain: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, default_value_t = ExtendMethod::HittingSet)]
        method: ExtendMethod,
    },
    /// Exact number of L-free k-subsets, optionally containing a given set.
    Count {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        set: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        contain: Option<PathBuf>,
    },
    /// Randomized estimate of the number of L-free k-subsets.
    CountApprox {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        set: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        delta: String,
        /// Defaults to LFREE_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Fixed sample count; always samples.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Integer encoding of a uniform hypergraph.
    Gadget {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Solution hypergraph of a set.
    ToHittingSet {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        set: PathBuf,
    },
    /// Set and size equivalent to an independent set question.
    NpInstance {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        graph: PathBuf,
        #[arg(short)]
        s: usize,
    },
    /// L-free upper interval of [n].
    Interval {
        #[arg(long)]
        eq: String,
        #[arg(short)]
        n: u64,
    },
    /// The density constant λ and its ingredients.
    Lambda {
        #[arg(long)]
        eq: String,
    },
    /// L-free subset of more than λ|Z| elements.
    Construct {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        set: PathBuf,
        /// Defaults to LFREE_SEED; without either the scan is deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solution-inert extension of a set of naturals.
    ExtendSet {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        set: PathBuf,
        /// Target size for disjoint mode, number of new elements for
        /// geometric mode.
        #[arg(short)]
        t: usize,
        #[arg(long, value_enum, default_value_t = ExtendMode::Auto)]
        mode: ExtendMode,
    },
    /// Instance whose ε-density question matches an exact-size question.
    EpsilonInstance {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        set: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        epsilon: String,
        #[arg(long, requires = "anchor_epsilon")]
        anchor: Option<PathBuf>,
        #[arg(long, requires = "anchor")]
        anchor_epsilon: Option<String>,
    },
    /// Multicolour cliques of a coloured graph by interpolation.
    Cliques {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        graph: PathBuf,
        /// Also enumerate cliques directly (subject to the oracle cap).
        #[arg(long)]
        verify: bool,
    },
    /// Brute-force maximum, and count when k is given.
    Oracle {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        set: PathBuf,
        #[arg(short)]
        k: Option<usize>,
    },
}

/// Everything a caller needs to reproduce process behaviour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) and executes one subcommand.
pub fn run<I, T>(argv: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                RunOutput { code: 2, stdout: String::new(), stderr: text }
            } else {
                RunOutput { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli) {
        Ok(obj) => RunOutput { code: 0, stdout: render(&obj, cli.output), stderr: String::new() },
        Err(e) => RunOutput { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

type Obj = Map<String, Value>;

fn execute(cli: &Cli) -> Result<Obj> {
    let cap = cli.oracle_cap;
    let mut params = BTreeMap::new();
    let mut out = Obj::new();
    let mut echo = |k: &str, v: String| {
        params.insert(k.to_string(), v);
    };
    match &cli.command {
        Command::Check { eq, set } => {
            let eq = equation(eq, &mut echo)?;
            let a = read_set(set, "set", &mut echo)?;
            out.insert("command".into(), "check".into());
            match eq.first_nontrivial_solution(&a) {
                None => {
                    out.insert("answer".into(), "yes".into());
                    out.insert("solution".into(), Value::Null);
                }
                Some(t) => {
                    out.insert("answer".into(), "no".into());
                    out.insert("solution".into(), ints(&t));
                }
            }
        }
        Command::Decide { eq, set, k, method } => {
            let eq = equation(eq, &mut echo)?;
            let a = read_set(set, "set", &mut echo)?;
            echo("k", k.to_string());
            echo("method", format!("{method:?}"));
            out.insert("command".into(), "decide".into());
            let res = match method {
                DecideMethod::Auto if eq.arity() == 2 => solve::decide_two_variable(&eq, &a, *k)?,
                DecideMethod::Auto | DecideMethod::HittingSet => solve::decide(&eq, &a, *k)?,
                DecideMethod::Fpt => solve::decide_fpt_by_k(&eq, &a, *k)?,
                DecideMethod::TwoVariable => solve::decide_two_variable(&eq, &a, *k)?,
            };
            outcome(&mut out, &res);
        }
        Command::Max { eq, set } => {
            let eq = equation(eq, &mut echo)?;
            let a = read_set(set, "set", &mut echo)?;
            let res = solve::max_lfree(&eq, &a)?;
            out.insert("command".into(), "max".into());
            out.insert("value".into(), res.size.to_string().into());
            out.insert("witness".into(), set_json(&res.witness));
            out.insert("method".into(), "hitting-set".into());
            out.insert("stats".into(), stats(res.stats.nodes));
        }
        Command::Epsilon { eq, set, epsilon } => {
            let eq = equation(eq, &mut echo)?;
            let a = read_set(set, "set", &mut echo)?;
            let e = rational(epsilon, "epsilon", &mut echo)?;
            out.insert("command".into(), "epsilon".into());
            outcome(&mut out, &solve::decide_epsilon(&eq, &a, &e)?);
        }
        Command::ExtendDecide { eq, set, contain, k, method } => {
            let eq = equation(eq, &mut echo)?;
            let a = read_set(set, "set", &mut echo)?;
            let b = read_set(contain, "contain", &mut echo)?;
            echo("k", k.to_string());
            echo("method", format!("{method:?}"));
            out.insert("command".into(), "extend-decide".into());
            let res = match method {
                ExtendMethod::HittingSet => solve::decide_extension(&eq, &a, &b, *k)?,
                ExtendMethod::Fpt => solve::extension_fpt_by_k(&eq, &a, &b, *k)?,
            };
            outcome(&mut out, &res);
        }
        Command::Count { eq, set, k, contain } => {
            let eq = equation(eq, &mut echo)?;
            let a = read_set(set, "set", &mut echo)?;
            let b = match contain {
                Some(p) => read_set(p, "contain", &mut echo)?,
                None => IntegerSet::empty(),
            };
            echo("k", k.to_string());
            let res = count_exact(&eq, &a, *k, &b)?;
            out.insert("command".into(), "count".into());
            out.insert("value".into(), res.to_string().into());
            out.insert("kind".into(), res.kind().into());
        }
        Command::CountApprox { eq, set, k, epsilon, delta, seed, samples } => {
            let eq = equation(eq, &mut echo)?;
            let a = read_set(set, "set", &mut echo)?;
            let e = rational(epsilon, "epsilon", &mut echo)?;
            let d = rational(delta, "delta", &mut echo)?;
            let seed = seed.or(env_seed()?).unwrap_or(0);
            echo("k", k.to_string());
            echo("seed", seed.to_string());
            let mut params = ApproxParams::new(e, d, seed)?;
            if let Some(t) = samples {
                echo("samples", t.to_string());
                params = params.with_samples(*t);
            }
            let res = count_fptras(&eq, &a, *k, &params)?;
            out.insert("command".into(), "count-approx".into());
            out.insert("value".into(), res.to_string().into());
            out.insert("kind".into(), res.kind().into());
            if let Some(meta) = &res.meta {
                out.insert("samples".into(), meta.samples.to_string().into());
                out.insert("successes".into(), meta.successes.to_string().into());
            }
        }
        Command::Gadget { eq, graph } => {
            let eq = equation(eq, &mut echo)?;
            let h = read_hypergraph(graph, &mut echo)?;
            let g = build_gadget(&eq, &h)?;
            out.insert("command".into(), "gadget".into());
            out.insert("d".into(), g.d().to_string().into());
            let vertices: Vec<BigInt> = (1..=h.n()).map(|v| g.vertex_number(v).expect("vertex").clone()).collect();
            let edges: Vec<BigInt> = (0..h.edge_count()).map(|i| g.edge_number(i).expect("edge").clone()).collect();
            out.insert("vertex_numbers".into(), ints(&vertices));
            out.insert("edge_numbers".into(), ints(&edges));
            out.insert("witness".into(), set_json(g.union()));
        }
        Command::ToHittingSet { eq, set } => {
            let eq = equation(eq, &mut echo)?;
            let a = read_set(set, "set", &mut echo)?;
            let (h, _) = to_hitting_set_instance(&eq, &a);
            out.insert("command".into(), "to-hitting-set".into());
            out.insert("n".into(), h.n().to_string().into());
            out.insert("elements".into(), set_json(&a));
            let edges: Vec<Value> = h.edges().iter().map(|e| Value::Array(e.iter().map(|&v| v.into()).collect())).collect();
            out.insert("edges".into(), Value::Array(edges));
        }
        Command::NpInstance { eq, graph, s } => {
            let eq = equation(eq, &mut echo)?;
            let h = read_hypergraph(graph, &mut echo)?;
            echo("s", s.to_string());
            let (a, k) = np_instance(&h, *s, &eq)?;
            out.insert("command".into(), "np-instance".into());
            out.insert("witness".into(), set_json(&a));
            out.insert("k".into(), k.to_string().into());
        }
        Command::Interval { eq, n } => {
            let eq = equation(eq, &mut echo)?;
            echo("n", n.to_string());
            let set = lfree_interval(&eq, *n)?;
            out.insert("command".into(), "interval".into());
            out.insert("value".into(), set.len().to_string().into());
            out.insert("witness".into(), set_json(&set));
        }
        Command::Lambda { eq } => {
            let eq = equation(eq, &mut echo)?;
            let b = lambda_of(&eq)?;
            out.insert("command".into(), "lambda".into());
            out.insert("value".into(), b.lambda.to_string().into());
            out.insert("a_sum".into(), b.a_sum.to_string().into());
            out.insert("b_sum".into(), b.b_sum.to_string().into());
            out.insert("c".into(), b.c.to_string().into());
            out.insert("kappa_lower".into(), b.kappa_lower.to_string().into());
        }
        Command::Construct { eq, set, seed } => {
            let eq = equation(eq, &mut echo)?;
            let z = read_set(set, "set", &mut echo)?;
            let seed = seed.or(env_seed()?);
            if let Some(s) = seed {
                echo("seed", s.to_string());
            }
            let res = construct_large_lfree_traced(&eq, &z, seed)?;
            out.insert("command".into(), "construct".into());
            out.insert("value".into(), res.set.len().to_string().into());
            out.insert("witness".into(), set_json(&res.set));
            out.insert("p".into(), res.p.to_string().into());
            out.insert("multiplier".into(), res.multiplier.to_string().into());
        }
        Command::ExtendSet { eq, set, t, mode } => {
            let eq = equation(eq, &mut echo)?;
            let a = read_set(set, "set", &mut echo)?;
            echo("t", t.to_string());
            echo("mode", format!("{mode:?}"));
            let geometric = match mode {
                ExtendMode::Auto => {
                    let (x, y, z) = crate::bounds::three_term_shape(&eq)?;
                    x + y == z
                }
                ExtendMode::Disjoint => false,
                ExtendMode::Geometric => true,
            };
            out.insert("command".into(), "extend-set".into());
            let b = if geometric {
                out.insert("mode".into(), "geometric".into());
                extend_geometric(&eq, &a, *t)?
            } else {
                let d = extend_disjoint(&eq, &a, *t)?;
                out.insert("mode".into(), "disjoint".into());
                out.insert("tau".into(), d.tau.to_string().into());
                out.insert("n".into(), d.n.to_string().into());
                out.insert("p".into(), d.p.to_string().into());
                d.set
            };
            out.insert("witness".into(), set_json(&b));
        }
        Command::EpsilonInstance { eq, set, k, epsilon, anchor, anchor_epsilon } => {
            let eq = equation(eq, &mut echo)?;
            let a = read_set(set, "set", &mut echo)?;
            let e = rational(epsilon, "epsilon", &mut echo)?;
            echo("k", k.to_string());
            let anchor = match (anchor, anchor_epsilon) {
                (Some(p), Some(ep)) => Some(EpsilonAnchor {
                    set: read_set(p, "anchor", &mut echo)?,
                    epsilon_prime: rational(ep, "anchor_epsilon", &mut echo)?,
                }),
                _ => None,
            };
            let res = epsilon_instance(&eq, &a, *k, &e, anchor.as_ref(), cap)?;
            out.insert("command".into(), "epsilon-instance".into());
            out.insert("witness".into(), set_json(&res.set));
            out.insert("d".into(), res.d.to_string().into());
            out.insert("r".into(), res.r.to_string().into());
            out.insert("k_star".into(), res.k_star.to_string().into());
            out.insert("target".into(), res.target.to_string().into());
        }
        Command::Cliques { eq, graph, verify } => {
            let eq = equation(eq, &mut echo)?;
            let text = read_text(graph)?;
            echo("graph", graph.display().to_string());
            let g = ColouredGraph::parse(&text)?;
            let res = count_multicolour_cliques(&eq, &g)?;
            out.insert("command".into(), "cliques".into());
            out.insert("value".into(), res.count.to_string().into());
            out.insert("q".into(), res.q.to_string().into());
            out.insert("dummy_pairs".into(), res.dummy_pairs.to_string().into());
            let strs = |v: Vec<String>| Value::Array(v.into_iter().map(Value::String).collect());
            out.insert("values".into(), strs(res.values.iter().map(ToString::to_string).collect()));
            out.insert("coefficients".into(), strs(res.coefficients.iter().map(ToString::to_string).collect()));
            out.insert("residuals_zero".into(), res.residuals.iter().all(Zero::is_zero).into());
            if *verify {
                echo("verify", "true".into());
                let direct = brute_force_multicolour_cliques(&g, cap)?;
                out.insert("brute_force".into(), direct.to_string().into());
            }
        }
        Command::Oracle { eq, set, k } => {
            let eq = equation(eq, &mut echo)?;
            let a = read_set(set, "set", &mut echo)?;
            let (size, witness) = brute_force_max_lfree(&eq, &a, cap)?;
            out.insert("command".into(), "oracle".into());
            out.insert("value".into(), size.to_string().into());
            out.insert("witness".into(), set_json(&witness));
            if let Some(k) = k {
                echo("k", k.to_string());
                let n = brute_force_count_lfree(&eq, &a, *k, cap)?;
                out.insert("count".into(), n.to_string().into());
            }
        }
    }
    params.insert("oracle_cap".into(), cap.to_string());
    let params: Obj = params.into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    out.insert("params".into(), Value::Object(params));
    Ok(out)
}

fn equation(text: &str, echo: &mut impl FnMut(&str, String)) -> Result<LinearEquation> {
    let eq = LinearEquation::from_str(text)?;
    echo("eq", eq.to_string());
    Ok(eq)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn read_set(path: &Path, name: &str, echo: &mut impl FnMut(&str, String)) -> Result<IntegerSet> {
    let set = IntegerSet::parse(&read_text(path)?)?;
    echo(name, path.display().to_string());
    Ok(set)
}

fn read_hypergraph(path: &Path, echo: &mut impl FnMut(&str, String)) -> Result<Hypergraph> {
    let h = Hypergraph::parse(&read_text(path)?)?;
    echo("graph", path.display().to_string());
    Ok(h)
}

fn rational(text: &str, name: &str, echo: &mut impl FnMut(&str, String)) -> Result<BigRational> {
    let q = parse_rational(text)?;
    echo(name, q.to_string());
    Ok(q)
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("LFREE_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| Error::Parse(format!("LFREE_SEED = `{s}` is not a u64"))),
        Err(_) => Ok(None),
    }
}

/// Exact rational from `p/q`, a decimal such as `-0.25`, or an integer.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("`{text}` is not a rational number"));
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("`{text}` has a zero denominator")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str(&digits).map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let q = BigRational::new(num, den);
    Ok(if neg { -q } else { q })
}

fn int(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("decimal integer"))
}

fn ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

fn set_json(s: &IntegerSet) -> Value {
    ints(s.as_slice())
}

fn stats(nodes: u64) -> Value {
    let mut m = Obj::new();
    m.insert("nodes".into(), nodes.to_string().into());
    Value::Object(m)
}

fn outcome(out: &mut Obj, res: &SolveOutcome) {
    out.insert("answer".into(), if res.answer { "yes" } else { "no" }.into());
    out.insert("witness".into(), res.witness.as_ref().map_or(Value::Null, set_json));
    out.insert("method".into(), res.method.as_str().into());
    out.insert("stats".into(), stats(res.stats.nodes));
}

fn render(obj: &Obj, mode: OutputMode) -> String {
    match mode {
        OutputMode::Json => format!("{}\n", Value::Object(obj.clone())),
        OutputMode::Plain => {
            let mut s = String::new();
            for (k, v) in obj.iter().filter(|(k, _)| k.as_str() != "params") {
                let text = match v {
                    Value::String(x) => x.clone(),
                    Value::Array(items) => items
                        .iter()
                        .map(|i| match i {
                            Value::String(x) => x.clone(),
                            other => other.to_string(),
                        })
                        .collect::<Vec<_>>()
                        .join(" "),
                    other => other.to_string(),
                };
                s.push_str(&format!("{k}: {text}\n"));
            }
            s
        }
    }
}
