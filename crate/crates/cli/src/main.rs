use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fqdef::definability::{self, default_epsilon};
use fqdef::dirichlet::{self, APQuery};
use fqdef::places::{self, Place};
use fqdef::quaternion::{self, RamificationSet};
use fqdef::symbols;
use fqdef::text::{parse_elem, parse_field, parse_place, parse_poly, parse_ratfunc};
use fqdef::{acceptance, Error, Field, FieldElem, RatFunc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

mod report;

use report::{Mode, Report};

#[derive(Parser)]
#[command(name = "fqdef", version, about = "Residue symbols, reciprocity and definability checks over F_q(t)")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Base field as "p^e" or a prime power.
    #[arg(long, global = true, default_value = "3")]
    q: String,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit one JSON document.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV rows.
    #[arg(long, global = true)]
    csv: bool,
    /// Worker threads for sweeps; output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Degree bound for sweeps and witness searches.
    #[arg(long, global = true)]
    degree_max: Option<usize>,
    /// Number of sampled pairs per membership test.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Nonsquare constant; defaults to the smallest one.
    #[arg(long, global = true)]
    epsilon: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// n-th power residue symbol (alpha/P)_n, or (alpha/beta)_n for composite beta.
    Symbol {
        #[arg(long)]
        alpha: String,
        #[arg(long, required_unless_present = "beta", conflicts_with = "beta")]
        prime: Option<String>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long, default_value_t = 2)]
        n: u64,
    },
    /// Quadratic local symbol (alpha, beta)_v.
    LocalSymbol {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        place: String,
    },
    /// Product of local symbols over all places.
    Hilbert {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// Checks general reciprocity on all coprime pairs up to --degree-max.
    ReciprocitySweep {
        #[arg(long, default_value_t = 2)]
        n: u64,
    },
    /// Ramification set of the quaternion algebra (a, b).
    Delta {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Membership of x in a set attached to (a, b).
    Member {
        #[arg(long, value_enum)]
        set: SetKind,
        #[arg(long)]
        x: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Parameter of I^c.
        #[arg(long)]
        c: Option<String>,
    },
    /// Elements s with x^2 - s x + 1 irreducible, and whether U + U covers F_q.
    USet,
    /// Pair (eps P, eps Q) ramified exactly at P and infinity.
    /// The prime Q depends on --seed.
    Witness {
        #[arg(long)]
        prime: String,
    },
    /// Compares direct and theorem-side membership tests.
    /// The sampled pairs depend on --seed.
    Membership {
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long)]
        x: String,
    },
    /// Counts monic primes of a degree in a residue class and finds one.
    /// The example prime depends on --seed.
    ApPrimes {
        #[arg(long)]
        modulus: String,
        #[arg(long)]
        residue: String,
        #[arg(long)]
        degree: usize,
    },
    /// Distribution of monic primes of a degree over unit classes.
    Uniformity {
        #[arg(long)]
        modulus: String,
        #[arg(long)]
        degree: usize,
    },
    /// Runs the acceptance suite.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetKind {
    #[value(name = "S")]
    S,
    #[value(name = "T")]
    T,
    #[value(name = "Tx")]
    Tx,
    #[value(name = "parity")]
    Parity,
    #[value(name = "Ic")]
    Ic,
    #[value(name = "J")]
    J,
    #[value(name = "Rtilde")]
    Rtilde,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    #[value(name = "A")]
    A,
    #[value(name = "AorAinf")]
    AorAinf,
    #[value(name = "const")]
    Const,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Verification(_) | Error::SearchExhausted(_) => Failure::Verification(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = if cli.opts.json {
        Mode::Json
    } else if cli.opts.csv {
        Mode::Csv
    } else {
        Mode::Text
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(mode));
            if report.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn field_name(f: &Field) -> String {
    format!("{}^{}", f.characteristic(), f.degree())
}

fn epsilon(field: &Field, opts: &Opts) -> CliResult<FieldElem> {
    Ok(match &opts.epsilon {
        Some(s) => parse_elem(field, s)?,
        None => default_epsilon(field)?,
    })
}

fn places_json(ps: impl IntoIterator<Item = impl ToString>) -> Value {
    Value::Array(ps.into_iter().map(|p| Value::String(p.to_string())).collect())
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable value")
}

fn run(cli: &Cli) -> CliResult<Report> {
    let opts = &cli.opts;
    let field = parse_field(&opts.q)?;
    let name = field_name(&field);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let rat = |s: &str| parse_ratfunc(&field, s);
    match &cli.cmd {
        Cmd::Symbol { alpha, prime, beta, n } => {
            let a = parse_poly(&field, alpha)?;
            let mut r = Report::new("symbol", name).input("alpha", a.to_string()).input("n", *n);
            let (value, evidence) = if let Some(p) = prime {
                let p = parse_poly(&field, p)?;
                r = r.input("prime", p.to_string());
                let v = symbols::residue_symbol(&a, &p, *n)?;
                let deg = p.degree().unwrap_or(0);
                (v, json!({ "residue": a.rem(&p)?.to_string(), "residue_degree": deg }))
            } else {
                let b = parse_poly(&field, beta.as_deref().expect("clap enforces one of prime/beta"))?;
                r = r.input("beta", b.to_string());
                let v = symbols::residue_symbol_general(&a, &b, *n)?;
                let factors: Vec<Value> = b
                    .factor_default()?
                    .factors
                    .iter()
                    .map(|(p, m)| {
                        let s = symbols::residue_symbol(&a, p, *n).expect("monic prime factor");
                        json!({ "prime": p.to_string(), "multiplicity": m, "symbol": to_json(&s) })
                    })
                    .collect();
                (v, json!({ "factors": factors }))
            };
            r.lines.push(format!("value: {value}"));
            r.result = to_json(&value);
            r.evidence = evidence;
            Ok(r)
        }
        Cmd::LocalSymbol { alpha, beta, place } => {
            let (a, b, v) = (rat(alpha)?, rat(beta)?, parse_place(&field, place)?);
            let s = symbols::local_symbol(&a, &b, &v)?;
            let mut r = Report::new("local-symbol", name)
                .input("alpha", a.to_string())
                .input("beta", b.to_string())
                .input("place", v.to_string());
            r.lines.push(format!("({a}, {b})_{v} = {s}"));
            r.result = json!(s);
            r.evidence = json!({
                "valuation_alpha": places::valuation(&a, &v)?,
                "valuation_beta": places::valuation(&b, &v)?,
            });
            Ok(r)
        }
        Cmd::Hilbert { alpha, beta } => {
            let (a, b) = (rat(alpha)?, rat(beta)?);
            let h = symbols::hilbert_product(&a, &b)?;
            let mut r = Report::new("hilbert", name).input("alpha", a.to_string()).input("beta", b.to_string());
            for (v, s) in &h.per_place {
                r.lines.push(format!("{v}: {s}"));
            }
            r.lines.push(format!("product: {}", h.product));
            r.table = Some((vec!["place", "symbol"], h.per_place.iter().map(|(v, s)| vec![v.to_string(), s.to_string()]).collect()));
            r.result = json!(h.product);
            r.evidence = json!({ "per_place": to_json(&h.per_place) });
            r.verified = h.product == 1;
            Ok(r)
        }
        Cmd::ReciprocitySweep { n } => {
            let deg = opts.degree_max.unwrap_or(2);
            let rep = symbols::reciprocity_sweep(&field, deg, *n, opts.jobs)?;
            let mut r = Report::new("reciprocity-sweep", name).input("degree_max", deg).input("n", *n);
            r.lines.push(format!("pairs checked: {}", rep.pairs_checked));
            r.lines.push(format!("violations: {}", rep.violations.len()));
            for v in &rep.violations {
                r.lines.push(format!("  ({}, {}): lhs {} rhs {}", v.alpha, v.beta, v.check.lhs, v.check.rhs));
            }
            r.table = Some((
                vec!["alpha", "beta", "lhs", "rhs"],
                rep.violations
                    .iter()
                    .map(|v| vec![v.alpha.to_string(), v.beta.to_string(), v.check.lhs.to_string(), v.check.rhs.to_string()])
                    .collect(),
            ));
            r.result = json!({ "pairs_checked": rep.pairs_checked, "violations": rep.violations.len() });
            r.evidence = json!({ "violations": to_json(&rep.violations) });
            r.verified = rep.violations.is_empty();
            Ok(r)
        }
        Cmd::Delta { a, b } => {
            let (a, b) = (rat(a)?, rat(b)?);
            let d = quaternion::delta(&a, &b)?;
            let mut candidates = places::odd_support(&a)?;
            candidates.extend(places::odd_support(&b)?);
            let mut symbols_at = serde_json::Map::new();
            for v in &candidates {
                symbols_at.insert(v.to_string(), json!(symbols::local_symbol(&a, &b, v)?));
            }
            let mut r = Report::new("delta", name).input("a", a.to_string()).input("b", b.to_string());
            let listed: Vec<String> = d.places.iter().map(Place::to_string).collect();
            r.lines.push(format!("delta: {{{}}}", listed.join(", ")));
            r.table = Some((vec!["place"], listed.iter().map(|p| vec![p.clone()]).collect()));
            r.result = places_json(&listed);
            r.evidence = json!({ "candidates": Value::Object(symbols_at) });
            r.verified = d.len() % 2 == 0;
            Ok(r)
        }
        Cmd::Member { set, x, a, b, c } => {
            let (x, a, b) = (rat(x)?, rat(a)?, rat(b)?);
            let d = quaternion::delta(&a, &b)?;
            let mut r = Report::new("member", name)
                .input("set", set_name(*set))
                .input("x", x.to_string())
                .input("a", a.to_string())
                .input("b", b.to_string());
            let mut evidence = json!({
                "delta": places_json(&d.places),
                "valuations": to_json(&d.valuations(&x)?),
            });
            let member = match set {
                SetKind::S => {
                    let mut local = serde_json::Map::new();
                    for v in &d.places {
                        local.insert(v.to_string(), json!(d.contains_s_local(&x, v)?));
                    }
                    evidence["local"] = Value::Object(local);
                    d.contains_s(&x)?
                }
                SetKind::T => d.contains_t(&x)?,
                SetKind::Tx => d.contains_t_unit(&x)?,
                SetKind::Parity => d.contains_parity(&x)?,
                SetKind::Ic => {
                    let c = rat(c.as_deref().ok_or_else(|| Failure::Usage("--set Ic needs --c".into()))?)?;
                    r = r.input("c", c.to_string());
                    evidence["odd_support_c"] = places_json(places::odd_support(&c)?);
                    if !x.is_one() {
                        let one_minus = &RatFunc::one(&field) - &x;
                        evidence["valuations_one_minus_x"] = to_json(&d.valuations(&one_minus)?);
                    }
                    d.contains_i_c(&x, &c)?
                }
                SetKind::J => d.contains_jacobson(&x)?,
                SetKind::Rtilde => d.contains_r_tilde(&x)?,
            };
            r.lines.push(format!("{x} in {}_(a,b): {member}", set_name(*set)));
            r.lines.push(format!("delta: {{{}}}", join_places(&d)));
            r.result = json!(member);
            r.evidence = evidence;
            Ok(r)
        }
        Cmd::USet => {
            let u = quaternion::u_set(&field)?;
            let mut r = Report::new("u-set", name);
            let members: Vec<String> = u.members.iter().map(FieldElem::to_string).collect();
            r.lines.push(format!("U_{} = {{{}}}", u.q, members.join(", ")));
            r.lines.push(format!("U + U = F_q: {}", u.covers));
            r.table = Some((vec!["element"], members.iter().map(|m| vec![m.clone()]).collect()));
            r.result = json!({ "members": members, "size": members.len(), "covers": u.covers });
            Ok(r)
        }
        Cmd::Witness { prime } => {
            let p = parse_place(&field, prime)?;
            let eps = epsilon(&field, opts)?;
            let cap = opts.degree_max.unwrap_or(p.residue_degree() + definability::WITNESS_DEGREE_SLACK);
            let w = definability::witness_pair_with_cap(&p, &eps, cap, &mut rng)?;
            let d = quaternion::delta(&w.a, &w.b)?;
            let mut r = Report::new("witness", name)
                .input("prime", p.to_string())
                .input("epsilon", eps.to_string())
                .input("seed", opts.seed);
            r.lines.push(format!("a = {}", w.a));
            r.lines.push(format!("b = {}", w.b));
            r.lines.push(format!("delta: {{{}}}", join_places(&d)));
            let mut local = serde_json::Map::new();
            for v in [w.p.clone(), w.q.clone(), Place::Infinity] {
                local.insert(v.to_string(), json!(symbols::local_symbol(&w.a, &w.b, &v)?));
            }
            r.result = to_json(&w);
            r.evidence = json!({
                "delta": places_json(&d.places),
                "local_symbols": Value::Object(local),
                "gamma": definability::gamma_check(&w.a, &w.b, &eps)?,
            });
            Ok(r)
        }
        Cmd::Membership { target, x } => {
            let x = rat(x)?;
            let samples = opts.samples.unwrap_or(20);
            let mut r = Report::new("membership", name).input("x", x.to_string()).input("seed", opts.seed);
            match target {
                Target::Const => {
                    r = r.input("target", "const");
                    let c = definability::is_constant_semantic(&x);
                    r.lines.push(format!("{x} constant: {c}"));
                    r.result = json!(c);
                    r.evidence = json!({ "num": x.num().to_string(), "den": x.den().to_string() });
                }
                Target::AorAinf => {
                    let eps = epsilon(&field, opts)?;
                    r = r.input("target", "AorAinf").input("epsilon", eps.to_string()).input("samples", samples);
                    let v = definability::member_a_union_ainf_theorem(&x, &eps, samples, &mut rng)?;
                    r.lines.push(format!("{x} in A u A_inf: {} (direct {}, agree {})", v.theorem, v.semantic, v.agree));
                    r.lines.push(format!("pairs tested: {}", v.evidence.len()));
                    r.result = json!({ "verdict": v.theorem, "semantic": v.semantic, "agree": v.agree });
                    r.evidence = to_json(&v.evidence);
                    r.verified = v.agree;
                }
                Target::A => {
                    let eps = epsilon(&field, opts)?;
                    r = r.input("target", "A").input("epsilon", eps.to_string()).input("samples", samples);
                    let v = definability::member_a(&x, &eps, samples, &mut rng)?;
                    r.lines.push(format!("{x} in A: {} (direct {}, agree {})", v.verdict, v.expected, v.agree));
                    r.lines.push(format!("pairs tested: {}", v.union.evidence.len()));
                    r.result = json!({
                        "verdict": v.verdict,
                        "expected": v.expected,
                        "agree": v.agree,
                        "union": v.union.theorem,
                        "degree_clause": v.degree_clause,
                    });
                    r.evidence = to_json(&v.union.evidence);
                    r.verified = v.agree && v.union.agree;
                }
            }
            Ok(r)
        }
        Cmd::ApPrimes { modulus, residue, degree } => {
            let query = APQuery::new(parse_poly(&field, modulus)?, parse_poly(&field, residue)?, *degree)?;
            let count = dirichlet::pi_ap(&query)?;
            let example = dirichlet::find_prime_in_ap(&query.f, &query.c, query.k, &mut rng)?;
            let mut r = Report::new("ap-primes", name)
                .input("modulus", query.f.to_string())
                .input("residue", query.c.to_string())
                .input("degree", *degree)
                .input("seed", opts.seed);
            let example_text = example.as_ref().map(|p| p.to_string());
            r.lines.push(format!("primes of degree {degree} = {} mod {}: {count}", query.c, query.f));
            r.lines.push(format!("example: {}", example_text.as_deref().unwrap_or("none")));
            r.table = Some((vec!["degree", "count", "example"], vec![vec![degree.to_string(), count.to_string(), example_text.clone().unwrap_or_default()]]));
            r.result = json!({ "count": count, "example": example_text });
            if *degree >= 1 {
                r.evidence = json!({
                    "pi_q": dirichlet::pi_q(field.order(), *degree as u32)?.to_string(),
                    "phi": dirichlet::euler_phi(&query.f)?.to_string(),
                });
            }
            r.verified = (count == 0) == example.is_none();
            Ok(r)
        }
        Cmd::Uniformity { modulus, degree } => {
            let f = parse_poly(&field, modulus)?;
            let rep = dirichlet::uniformity_report(&f, *degree)?;
            let mut r = Report::new("uniformity", name).input("modulus", f.to_string()).input("degree", *degree);
            r.lines.push(format!("pi_q({degree}) = {}, Phi(f) = {}, expected {:.4}", rep.pi_q, rep.phi, rep.expected));
            for row in &rep.rows {
                r.lines.push(format!("  {}: {} (deviation {:.4})", row.c, row.count, row.deviation));
            }
            r.lines.push(format!("max deviation: {:.4}", rep.max_deviation));
            if let Some(w) = &rep.warning {
                r.lines.push(format!("warning: {w}"));
            }
            r.table = Some((
                vec!["c", "count", "expected", "deviation"],
                rep.rows
                    .iter()
                    .map(|row| vec![row.c.to_string(), row.count.to_string(), format!("{:.6}", rep.expected), format!("{:.6}", row.deviation)])
                    .collect(),
            ));
            r.result = json!({
                "pi_q": rep.pi_q.to_string(),
                "phi": rep.phi.to_string(),
                "expected": rep.expected,
                "max_deviation": rep.max_deviation,
                "within_tolerance": rep.within(dirichlet::UNIFORMITY_TOLERANCE),
                "in_range": rep.in_range,
                "warning": rep.warning,
            });
            r.evidence = to_json(&rep.rows);
            Ok(r)
        }
        Cmd::Selftest => {
            let results = acceptance::run_all(opts.seed);
            let mut r = Report::new("selftest", name).input("seed", opts.seed);
            r.lines = results.iter().map(|c| c.to_string()).collect();
            let failed: Vec<u8> = results.iter().filter(|c| !c.pass).map(|c| c.id).collect();
            r.lines.push(format!("{} of {} criteria passed", results.len() - failed.len(), results.len()));
            r.table = Some((
                vec!["id", "name", "pass", "detail"],
                results.iter().map(|c| vec![c.id.to_string(), c.name.to_string(), c.pass.to_string(), c.detail.clone()]).collect(),
            ));
            r.result = json!({ "passed": results.len() - failed.len(), "failed": failed });
            r.evidence = Value::Array(
                results.iter().map(|c| json!({ "id": c.id, "name": c.name, "pass": c.pass, "detail": c.detail })).collect(),
            );
            r.verified = failed.is_empty();
            Ok(r)
        }
    }
}

fn set_name(s: SetKind) -> &'static str {
    match s {
        SetKind::S => "S",
        SetKind::T => "T",
        SetKind::Tx => "Tx",
        SetKind::Parity => "parity",
        SetKind::Ic => "Ic",
        SetKind::J => "J",
        SetKind::Rtilde => "Rtilde",
    }
}

fn join_places(d: &RamificationSet) -> String {
    d.places.iter().map(Place::to_string).collect::<Vec<_>>().join(", ")
}
