//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for domain errors (invalid probabilities,
//! impossible antecedents, failing checks, unreadable files), 2 for syntax
//! errors and bad usage.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::{AlgebraError, ConditionalAlgebra, Equivalence, ATOM_LIMIT_ENV, DEFAULT_ATOM_LIMIT};
use crate::betting::{self, BetReport};
use crate::laws::{self, LawConfig};
use crate::model::Model;
use crate::prevision::{PrevisionEngine, PrevisionError};
use crate::rational::{self, Rational};
use crate::term::CondTerm;

#[derive(Debug, Parser)]
#[command(name = "trievent", version, about = "Evaluate compound conditionals with exact rational arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the random quantity of a term and its prevision
    Eval(TermArgs),
    /// Print the prevision of a term
    Prevision(TermArgs),
    /// Print the reduct of a term at a world
    Reduce {
        #[command(flatten)]
        term: TermArgs,
        #[arg(long)]
        world: String,
    },
    /// List the atoms below a term with their chain products
    Atoms {
        #[command(flatten)]
        term: TermArgs,
        #[command(flatten)]
        limit: LimitArgs,
    },
    /// Decide whether two terms denote the same conditional
    Equiv {
        #[command(flatten)]
        term: TermArgs,
        #[arg(long)]
        term2: String,
        #[command(flatten)]
        limit: LimitArgs,
    },
    /// Run the randomized law suites
    Laws {
        /// Model whose worlds are used; by default each case draws 1 to 4 worlds
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        limit: LimitArgs,
    },
    /// Bet on a term at its prevision, or at a perturbed price
    Bet {
        #[command(flatten)]
        term: TermArgs,
        /// Amount added to the coherent price, as p/q
        #[arg(long)]
        perturb: Option<String>,
    },
}

#[derive(Debug, Args)]
struct TermArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    term: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct LimitArgs {
    /// Largest world count for atom enumeration
    #[arg(long, env = ATOM_LIMIT_ENV, default_value_t = DEFAULT_ATOM_LIMIT)]
    atom_limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout, stderr: String::new() }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn domain(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn syntax(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<PrevisionError> for Failure {
    fn from(e: PrevisionError) -> Self {
        Failure::domain(e.to_string())
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        Failure::domain(e.to_string())
    }
}

impl From<laws::LawError> for Failure {
    fn from(e: laws::LawError) -> Self {
        Failure::domain(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome::ok(text)
            };
        }
    };
    match dispatch(cli.command) {
        Ok(outcome) => outcome,
        Err(f) => Outcome { code: f.code, stdout: String::new(), stderr: format!("error: {}\n", f.message) },
    }
}

fn dispatch(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Eval(args) => {
            let (model, t) = load(&args)?;
            Ok(Outcome::ok(eval(&model, &t, args.format)?))
        }
        Command::Prevision(args) => {
            let (model, t) = load(&args)?;
            Ok(Outcome::ok(prevision(&model, &t, args.format)?))
        }
        Command::Reduce { term, world } => {
            let (model, t) = load(&term)?;
            let w = model.space().world(&world).ok_or_else(|| Failure::syntax(format!("unknown world {world:?}")))?;
            Ok(Outcome::ok(reduce(&model, &t, w, term.format)))
        }
        Command::Atoms { term, limit } => {
            let (model, t) = load(&term)?;
            Ok(Outcome::ok(atoms(&model, &t, limit.atom_limit, term.format)?))
        }
        Command::Equiv { term, term2, limit } => {
            let (model, t) = load(&term)?;
            let s = parse_term(&model, &term2, "--term2")?;
            Ok(Outcome::ok(equiv(&model, &t, &s, limit.atom_limit, term.format)?))
        }
        Command::Laws { model, seed, cases, depth, format, limit } => {
            let space = match model {
                Some(path) => Some(read_model(&path)?.space().clone()),
                None => None,
            };
            let cfg = LawConfig { seed, cases, depth, space, atom_limit: limit.atom_limit };
            let results = laws::run_laws(&cfg)?;
            let failed = results.iter().any(|r| !r.passed());
            let stdout = match format {
                Format::Text => laws::render_text(&cfg, &results),
                Format::Csv => laws_csv(&results),
                Format::Json => laws_json(&cfg, &results),
            };
            Ok(Outcome { code: i32::from(failed), stdout, stderr: String::new() })
        }
        Command::Bet { term, perturb } => {
            let (model, t) = load(&term)?;
            let epsilon = match perturb {
                Some(p) => rational::parse(&p).ok_or_else(|| Failure::syntax(format!("invalid --perturb {p:?}")))?,
                None => rational::zero(),
            };
            let engine = PrevisionEngine::new(model.cp().clone());
            let report = betting::bet_perturbed(&engine, &t, &epsilon)?;
            let stdout = bet(&model, &report, term.format);
            // a perturbed price is expected to show a nonzero gain
            let code = if report.is_fair() || !num_traits::Zero::is_zero(&epsilon) { 0 } else { 1 };
            Ok(Outcome { code, stdout, stderr: String::new() })
        }
    }
}

fn read_model(path: &PathBuf) -> Result<Model, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::domain(format!("{}: {e}", path.display())))?;
    Model::parse(&text).map_err(|e| {
        let message = format!("{}: {e}", path.display());
        if e.is_syntax() {
            Failure::syntax(message)
        } else {
            Failure::domain(message)
        }
    })
}

fn parse_term(model: &Model, text: &str, flag: &str) -> Result<CondTerm, Failure> {
    model.term(text).map_err(|e| {
        let message = format!("{flag}: {e}");
        if e.is_syntax() {
            Failure::syntax(message)
        } else {
            Failure::domain(message)
        }
    })
}

fn load(args: &TermArgs) -> Result<(Model, CondTerm), Failure> {
    let model = read_model(&args.model)?;
    let t = parse_term(&model, &args.term, "--term")?;
    Ok((model, t))
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().flexible(true).from_writer(Vec::new())
}

fn csv_finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn eval(model: &Model, t: &CondTerm, format: Format) -> Result<String, Failure> {
    let engine = PrevisionEngine::new(model.cp().clone());
    let (x, p) = engine.evaluate(t)?;
    let space = model.space();
    let b = t.clone().simplify().antecedent_disjunction(space);
    let rendered = model.render(t);
    Ok(match format {
        Format::Text => {
            let values: Vec<String> = x.values().iter().map(rational::format).collect();
            let width = space.worlds().iter().map(|w| w.chars().count()).max().unwrap_or(0).max(5);
            let vwidth = values.iter().map(String::len).max().unwrap_or(0).max(1);
            let mut out = String::new();
            let _ = writeln!(out, "term: {rendered}");
            let _ = writeln!(out, "antecedents: {}", model.scope().show(&b));
            let _ = writeln!(out, "{:<width$}  {:<vwidth$}  b(t)", "world", "X");
            let inside = (0..space.len()).filter(|&w| b.has(w));
            let outside: Vec<usize> = (0..space.len()).filter(|&w| !b.has(w)).collect();
            for w in inside {
                let _ = writeln!(out, "{:<width$}  {:<vwidth$}  *", space.name(w), values[w]);
            }
            if !outside.is_empty() {
                let _ = writeln!(out, "{}", "-".repeat(width + vwidth + 8));
                for w in outside {
                    let _ = writeln!(out, "{:<width$}  {:<vwidth$}", space.name(w), values[w]);
                }
            }
            let _ = writeln!(out, "prevision: {}", rational::format(&p));
            out
        }
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["world", "value", "in_antecedent"]).expect("in-memory writer");
            for (i, v) in x.values().iter().enumerate() {
                let inside = if b.has(i) { "true" } else { "false" };
                w.write_record([space.name(i), &rational::format(v), inside]).expect("in-memory writer");
            }
            w.write_record(["prevision", &rational::format(&p)]).expect("in-memory writer");
            csv_finish(w)
        }
        Format::Json => json_text(&json!({
            "term": rendered,
            "worlds": x.values().iter().enumerate().map(|(i, v)| json!({
                "world": space.name(i),
                "value": rational::to_json(v),
                "in_antecedent": b.has(i),
            })).collect::<Vec<_>>(),
            "prevision": rational::to_json(&p),
        })),
    })
}

fn prevision(model: &Model, t: &CondTerm, format: Format) -> Result<String, Failure> {
    let p = PrevisionEngine::new(model.cp().clone()).prevision(t)?;
    let rendered = model.render(t);
    Ok(match format {
        Format::Text => format!("{}\n", rational::format(&p)),
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["term", "prevision"]).expect("in-memory writer");
            w.write_record([rendered.as_str(), &rational::format(&p)]).expect("in-memory writer");
            csv_finish(w)
        }
        Format::Json => json_text(&json!({ "term": rendered, "prevision": rational::to_json(&p) })),
    })
}

fn reduce(model: &Model, t: &CondTerm, world: usize, format: Format) -> String {
    let r = model.render(&t.reduce(world));
    let name = model.space().name(world);
    match format {
        Format::Text => format!("{r}\n"),
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["term", "world", "reduct"]).expect("in-memory writer");
            w.write_record([model.render(t).as_str(), name, &r]).expect("in-memory writer");
            csv_finish(w)
        }
        Format::Json => json_text(&json!({ "term": model.render(t), "world": name, "reduct": r })),
    }
}

fn atoms(model: &Model, t: &CondTerm, limit: usize, format: Format) -> Result<String, Failure> {
    let space = model.space();
    let alg = ConditionalAlgebra::new(space, limit)?;
    let cp = model.cp();
    let set = alg.atom_set(t)?;
    let below: Vec<(String, Rational)> = set
        .iter()
        .map(|i| {
            let atom = &alg.atoms()[i];
            Ok((atom.show(space), alg.chain_product(atom, cp)?))
        })
        .collect::<Result<_, AlgebraError>>()?;
    // the canonical measure is only defined for positive probabilities
    let mu = match alg.mu_p(t, cp) {
        Ok(mu) => Some(mu),
        Err(AlgebraError::NotPositive) => None,
        Err(e) => return Err(e.into()),
    };
    let experimental = match mu {
        Some(_) => None,
        None => Some(alg.chain_measure(t, cp)?),
    };
    let total = alg.atoms().len();
    Ok(match format {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "term: {}", model.render(t));
            let _ = writeln!(out, "atoms: {} of {total}", below.len());
            for (atom, chain) in &below {
                let _ = writeln!(out, "{atom}  {}", rational::format(chain));
            }
            match (&mu, &experimental) {
                (Some(mu), _) => {
                    let _ = writeln!(out, "mu_P: {}", rational::format(mu));
                }
                (None, Some(m)) => {
                    let _ = writeln!(out, "mu_P: undefined (probability has several layers)");
                    let _ = writeln!(out, "chain measure (experimental): {}", rational::format(m));
                }
                (None, None) => unreachable!("one of the measures is computed"),
            }
            out
        }
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["atom", "chain_product"]).expect("in-memory writer");
            for (atom, chain) in &below {
                w.write_record([atom.as_str(), &rational::format(chain)]).expect("in-memory writer");
            }
            match (&mu, &experimental) {
                (Some(mu), _) => w.write_record(["mu_P", &rational::format(mu)]),
                (_, Some(m)) => w.write_record(["chain_measure_experimental", &rational::format(m)]),
                (None, None) => unreachable!("one of the measures is computed"),
            }
            .expect("in-memory writer");
            csv_finish(w)
        }
        Format::Json => json_text(&json!({
            "term": model.render(t),
            "total_atoms": total,
            "atoms": below.iter().map(|(atom, chain)| json!({
                "atom": atom,
                "chain_product": rational::to_json(chain),
            })).collect::<Vec<_>>(),
            "mu_P": mu.as_ref().map(rational::to_json),
            "chain_measure_experimental": experimental.as_ref().map(rational::to_json),
        })),
    })
}

fn equiv(model: &Model, t: &CondTerm, s: &CondTerm, limit: usize, format: Format) -> Result<String, Failure> {
    let space = model.space();
    let alg = ConditionalAlgebra::new(space, limit)?;
    let verdict = alg.compare(t, s)?;
    let (lhs, rhs) = (model.render(t), model.render(s));
    let witness = match &verdict {
        Equivalence::Equivalent => None,
        Equivalence::Differ { atom, in_left } => {
            let shown = atom.show(space);
            let (holds, fails) = if *in_left { (&lhs, &rhs) } else { (&rhs, &lhs) };
            Some((shown, holds.clone(), fails.clone()))
        }
    };
    Ok(match format {
        Format::Text => match &witness {
            None => "equivalent\n".to_string(),
            Some((atom, holds, fails)) => {
                format!("not equivalent\nwitness: {atom} is below {holds} but not below {fails}\n")
            }
        },
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["verdict", "witness", "below", "not_below"]).expect("in-memory writer");
            match &witness {
                None => w.write_record(["equivalent", "", "", ""]),
                Some((atom, holds, fails)) => w.write_record(["not equivalent", atom, holds, fails]),
            }
            .expect("in-memory writer");
            csv_finish(w)
        }
        Format::Json => json_text(&json!({
            "left": lhs,
            "right": rhs,
            "equivalent": witness.is_none(),
            "witness": witness.as_ref().map(|(atom, holds, fails)| json!({
                "atom": atom,
                "below": holds,
                "not_below": fails,
            })),
        })),
    })
}

fn laws_csv(results: &[laws::LawResult]) -> String {
    let mut w = csv_writer();
    w.write_record(["group", "law", "checked", "failed", "first_failure"]).expect("in-memory writer");
    for r in results {
        w.write_record([
            r.group,
            r.name,
            &r.checked.to_string(),
            &r.failed.to_string(),
            r.first_failure.as_deref().unwrap_or(""),
        ])
        .expect("in-memory writer");
    }
    csv_finish(w)
}

fn laws_json(cfg: &LawConfig, results: &[laws::LawResult]) -> String {
    json_text(&json!({
        "seed": cfg.seed,
        "cases": cfg.cases,
        "depth": cfg.depth,
        "laws": results.iter().map(|r| json!({
            "group": r.group,
            "law": r.name,
            "checked": r.checked,
            "failed": r.failed,
            "first_failure": r.first_failure,
        })).collect::<Vec<_>>(),
        "failed": results.iter().filter(|r| !r.passed()).count(),
    }))
}

fn bet(model: &Model, r: &BetReport, format: Format) -> String {
    let space = model.space();
    let status = if r.is_fair() { "PASS" } else { "FAIL" };
    match format {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "term: {}", model.render(&r.term));
            let _ = writeln!(out, "antecedents: {}", model.scope().show(&r.antecedent));
            let _ = writeln!(out, "prevision: {}", rational::format(&r.prevision));
            let _ = writeln!(out, "paid: {}", rational::format(&r.paid));
            let rows: Vec<[String; 3]> = (0..space.len())
                .map(|w| {
                    let gain = if r.antecedent.has(w) { rational::format(r.gains.get(w)) } else { "off".into() };
                    [space.name(w).to_string(), rational::format(r.payout.get(w)), gain]
                })
                .collect();
            let widths: Vec<usize> = (0..3)
                .map(|i| rows.iter().map(|row| row[i].chars().count()).max().unwrap_or(0).max(6))
                .collect();
            let _ = writeln!(out, "{:<a$}  {:<b$}  gain", "world", "payout", a = widths[0], b = widths[1]);
            for row in &rows {
                let _ = writeln!(out, "{:<a$}  {:<b$}  {}", row[0], row[1], row[2], a = widths[0], b = widths[1]);
            }
            let _ = writeln!(out, "gain prevision: {}", rational::format(&r.gain_prevision));
            let _ = writeln!(out, "{status} zero expected gain");
            out
        }
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["world", "payout", "gain", "in_antecedent"]).expect("in-memory writer");
            for i in 0..space.len() {
                let inside = if r.antecedent.has(i) { "true" } else { "false" };
                w.write_record([space.name(i), &rational::format(r.payout.get(i)), &rational::format(r.gains.get(i)), inside])
                    .expect("in-memory writer");
            }
            w.write_record(["paid", &rational::format(&r.paid)]).expect("in-memory writer");
            w.write_record(["gain_prevision", &rational::format(&r.gain_prevision)]).expect("in-memory writer");
            w.write_record(["status", status]).expect("in-memory writer");
            csv_finish(w)
        }
        Format::Json => json_text(&json!({
            "term": model.render(&r.term),
            "prevision": rational::to_json(&r.prevision),
            "paid": rational::to_json(&r.paid),
            "worlds": (0..space.len()).map(|i| json!({
                "world": space.name(i),
                "payout": rational::to_json(r.payout.get(i)),
                "gain": rational::to_json(r.gains.get(i)),
                "in_antecedent": r.antecedent.has(i),
            })).collect::<Vec<_>>(),
            "gain_prevision": rational::to_json(&r.gain_prevision),
            "fair": r.is_fair(),
        })),
    }
}
