//! `coalg`: computations and verification suites over JSON instances.
//!
//! Exit codes: 0 = computed/verified, 1 = a checked property failed
//! (the payload carries the counterexample), 2 = input or parse error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use coalg::bialgebra::{iterated_delta, Iterated};
use coalg::convolution::{conv_power_apply, degree_upper_bound, BoundMode, LinearMapRule, UnipotenceBound};
use coalg::dual::{character_independence_system, DualFunctional, IndependenceSystemOutcome};
use coalg::json::{element_to_json, parse_instance, tensor_to_json, Instance};
use coalg::monoid::{character_series, character_series_kleene, kleene_star, mobius, Series, TraceMonoid};
use coalg::scalar::{RingSpec, Scalar};
use coalg::suites;
use coalg::{CoalgError, Result};

#[derive(Parser)]
#[command(name = "coalg", version, about = "Exact bialgebra computations and theorem verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterated coproduct of a named element from an instance file.
    Delta {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        element: String,
        /// Iteration index: -1 is the counit, 0 the identity, k >= 1
        /// gives a tensor of arity k + 1.
        #[arg(long, default_value_t = 1)]
        k: i64,
    },
    /// Convolution power of the identity applied to a named element.
    Conv {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 2)]
        n: u32,
    },
    /// Smallest verified degree-upper bound of a named element, from an
    /// instance file or from an inline family description.
    Unipotent {
        #[arg(long)]
        file: Option<PathBuf>,
        /// Element name (with --file) or basis index (inline).
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 10)]
        horizon: u32,
        /// Inline coefficient ring, e.g. `Z/4` (with --q / --p).
        #[arg(long)]
        ring: Option<String>,
        /// Inline infiltration parameter.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        /// Inline Frobenius quotient exponent (requires --q).
        #[arg(long)]
        p: Option<u32>,
        /// Truncation degree for inline infiltration families.
        #[arg(long, default_value_t = 16)]
        trunc: i64,
    },
    /// Möbius series of a trace monoid by the clique formula.
    Mobius {
        /// Comma-separated letters, e.g. `x,y,z`.
        #[arg(long)]
        alphabet: String,
        /// Comma-separated commutation edges, e.g. `x-y,y-z`.
        #[arg(long, default_value = "")]
        edges: String,
        #[arg(long, default_value_t = 6)]
        trunc: u32,
    },
    /// Truncated Kleene star of a proper series.
    Star {
        #[arg(long)]
        alphabet: String,
        #[arg(long, default_value = "")]
        edges: String,
        /// The series, e.g. `x + 2*y - 1/2*xy`.
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 6)]
        trunc: u32,
        #[arg(long, default_value = "rationals")]
        ring: String,
    },
    /// Character series of a trace monoid from letter values, with the
    /// Kleene-star cross-check.
    Character {
        #[arg(long)]
        alphabet: String,
        #[arg(long, default_value = "")]
        edges: String,
        /// Letter values, e.g. `x=1/2,y=3`.
        #[arg(long)]
        chars: String,
        #[arg(long, default_value_t = 6)]
        trunc: u32,
        #[arg(long, default_value = "rationals")]
        ring: String,
    },
    /// Exact independence system for univariate characters over the
    /// filtered dual.
    Independence {
        /// Infiltration parameter of the family (0 gives the shuffle).
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        q: String,
        /// Character parameters, e.g. `1,2,5`.
        #[arg(long, allow_hyphen_values = true)]
        chars: String,
        /// Maximal filtration degree of the unknown coefficients.
        #[arg(long, default_value_t = 3)]
        maxdeg: i64,
        #[arg(long, default_value_t = 12)]
        trunc: i64,
        #[arg(long, default_value = "rationals")]
        ring: String,
        /// Also dump the assembled system as plain matrix text.
        #[arg(long, default_value_t = false)]
        dump_matrix: bool,
    },
    /// Run a named verification suite, or all of them.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

struct RunOutcome {
    payload: Value,
    verified: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            println!("{}", serde_json::to_string_pretty(&outcome.payload).expect("serializable"));
            if outcome.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn load_instance(path: &PathBuf) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CoalgError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CoalgError::Parse(format!("bad JSON: {e}")))?;
    parse_instance(&value)
}

fn named_element(instance: &Instance, name: &str) -> Result<coalg::bialgebra::Element> {
    instance
        .elements
        .get(name)
        .cloned()
        .ok_or_else(|| CoalgError::Parse(format!("no element named '{name}' in the instance")))
}

fn parse_ring_flag(text: &str) -> Result<Arc<RingSpec>> {
    let t = text.trim();
    match t.to_ascii_lowercase().as_str() {
        "integers" | "z" | "zz" => return Ok(Arc::new(RingSpec::Integers)),
        "rationals" | "q" | "qq" => return Ok(Arc::new(RingSpec::Rationals)),
        _ => {}
    }
    if let Some(n) = t.strip_prefix("Z/").or_else(|| t.strip_prefix("z/")) {
        let n: u64 = n
            .parse()
            .map_err(|_| CoalgError::Parse(format!("bad modulus in ring '{t}'")))?;
        return Ok(Arc::new(RingSpec::modular(n)?));
    }
    Err(CoalgError::Parse(format!("unknown ring '{t}' (use integers, rationals, or Z/n)")))
}

fn parse_monoid_flags(alphabet: &str, edges: &str) -> Result<Arc<TraceMonoid>> {
    let letters: Vec<String> = alphabet
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    let refs: Vec<&str> = letters.iter().map(String::as_str).collect();
    let mut pairs: Vec<(String, String)> = Vec::new();
    for edge in edges.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (a, b) = edge
            .split_once('-')
            .ok_or_else(|| CoalgError::Parse(format!("edge '{edge}' must look like x-y")))?;
        pairs.push((a.trim().to_string(), b.trim().to_string()));
    }
    let pair_refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Ok(Arc::new(TraceMonoid::new(&refs, &pair_refs)?))
}

fn run(command: Command) -> Result<RunOutcome> {
    match command {
        Command::Delta { file, element, k } => {
            let instance = load_instance(&file)?;
            let e = named_element(&instance, &element)?;
            let payload = match iterated_delta(&e, k)? {
                Iterated::Scalar(s) => json!({"scalar": s.to_string()}),
                Iterated::Tensor(t) => json!({"tensor": tensor_to_json(&t)}),
            };
            Ok(RunOutcome { payload, verified: true })
        }
        Command::Conv { file, element, n } => {
            let instance = load_instance(&file)?;
            let e = named_element(&instance, &element)?;
            let id = LinearMapRule::identity(&instance.descriptor)?;
            let value = conv_power_apply(&id, n, &e)?.into_element()?;
            Ok(RunOutcome { payload: json!({"element": element_to_json(&value)}), verified: true })
        }
        Command::Unipotent { file, element, horizon, ring, q, p, trunc } => {
            let e = match file {
                Some(path) => {
                    let instance = load_instance(&path)?;
                    named_element(&instance, &element)?
                }
                None => {
                    let ring = parse_ring_flag(&ring.ok_or_else(|| {
                        CoalgError::Parse("inline mode needs --ring (or pass --file)".into())
                    })?)?;
                    let qv = Scalar::parse(&ring, &q.unwrap_or_else(|| "0".into()))?;
                    let descr = match p {
                        Some(p) => coalg::bialgebra::BialgebraDescriptor::frobenius_quotient(&ring, p, qv)?,
                        None => coalg::bialgebra::BialgebraDescriptor::infiltration(&ring, qv, trunc)?,
                    };
                    let idx = descr.parse_basis(&element)?;
                    coalg::bialgebra::Element::basis(&descr, idx)?
                }
            };
            let payload = match degree_upper_bound(&e, horizon)? {
                UnipotenceBound::Bound { m, mode } => json!({
                    "bound": m,
                    "mode": match mode {
                        BoundMode::Certified => "Certified",
                        BoundMode::HorizonOnly => "HorizonOnly",
                    },
                }),
                UnipotenceBound::NotIdUnipotentWithinHorizon => json!({
                    "bound": Value::Null,
                    "mode": "NotIdUnipotentWithinHorizon",
                }),
            };
            Ok(RunOutcome { payload, verified: true })
        }
        Command::Mobius { alphabet, edges, trunc } => {
            let monoid = parse_monoid_flags(&alphabet, &edges)?;
            let ring = Arc::new(RingSpec::Integers);
            let series = mobius(&ring, &monoid, trunc);
            Ok(RunOutcome { payload: json!({"series": series.pretty()}), verified: true })
        }
        Command::Star { alphabet, edges, element, trunc, ring } => {
            let monoid = parse_monoid_flags(&alphabet, &edges)?;
            let ring = parse_ring_flag(&ring)?;
            let series = Series::parse(&ring, &monoid, trunc, &element)?;
            let star = kleene_star(&series, trunc)?;
            Ok(RunOutcome { payload: json!({"series": star.pretty()}), verified: true })
        }
        Command::Character { alphabet, edges, chars, trunc, ring } => {
            let monoid = parse_monoid_flags(&alphabet, &edges)?;
            let ring = parse_ring_flag(&ring)?;
            let mut values = vec![Scalar::zero(&ring); monoid.alphabet().len()];
            for assignment in chars.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (letter, value) = assignment
                    .split_once('=')
                    .ok_or_else(|| CoalgError::Parse(format!("character value '{assignment}' must look like x=1/2")))?;
                let idx = monoid.letter_index(letter.trim())? as usize;
                values[idx] = Scalar::parse(&ring, value.trim())?;
            }
            let direct = character_series(&ring, &monoid, &values, trunc)?;
            let starred = character_series_kleene(&ring, &monoid, &values, trunc)?;
            let agree = direct == starred;
            let payload = json!({
                "series": direct.pretty(),
                "kleene": starred.pretty(),
                "agree": agree,
            });
            Ok(RunOutcome { payload, verified: agree })
        }
        Command::Independence { q, chars, maxdeg, trunc, ring, dump_matrix } => {
            let ring = parse_ring_flag(&ring)?;
            let qv = Scalar::parse(&ring, &q)?;
            let descr = coalg::bialgebra::BialgebraDescriptor::infiltration(&ring, qv, trunc)?;
            let characters: Vec<DualFunctional> = chars
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|a| {
                    let alpha = Scalar::parse(&ring, a)?;
                    DualFunctional::character_x(&descr, &alpha, trunc)
                })
                .collect::<Result<_>>()?;
            let mut payload = match character_independence_system(&characters, maxdeg)? {
                IndependenceSystemOutcome::TrivialOnly => json!({"result": "trivial-only"}),
                IndependenceSystemOutcome::Witness(ps) => {
                    let witness: Vec<Value> = ps
                        .iter()
                        .enumerate()
                        .map(|(i, p)| {
                            let coeffs: Vec<Value> = p
                                .coeffs()
                                .iter()
                                .map(|(idx, c)| {
                                    json!({
                                        "basis": p.descriptor().basis_string(idx),
                                        "coeff": c.to_string(),
                                    })
                                })
                                .collect();
                            json!({"char": i, "coeffs": coeffs})
                        })
                        .collect();
                    json!({"result": "witness", "witness": witness})
                }
            };
            if dump_matrix {
                let text = coalg::dual::character_system_text(&characters, maxdeg)?;
                payload["matrix"] = Value::String(text);
            }
            Ok(RunOutcome { payload, verified: true })
        }
        Command::Verify { suite, seed } => {
            let outcomes = if suite == "all" {
                suites::run_all(seed)?
            } else {
                vec![suites::run_suite(&suite, seed)?]
            };
            let pass = outcomes.iter().all(|o| o.pass);
            let list: Vec<Value> = outcomes
                .iter()
                .map(|o| json!({"name": o.name, "pass": o.pass, "detail": o.detail}))
                .collect();
            Ok(RunOutcome { payload: json!({"pass": pass, "suites": list}), verified: pass })
        }
    }
}
