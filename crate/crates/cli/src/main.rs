//! Command-line front end for the `hyperbasis` library.
//!
//! Exit codes: 0 success, 1 an honest unknown or bound-exceeded result,
//! 2 usage or parse errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use hyperbasis::freealg::{
    free_semigroup, paper_reductions, search_models, FreeConfig, FreeStatus, GenWord,
};
use hyperbasis::hyper::{
    expand, triviality_probe, Builtin, ExpansionMode, Hyperidentity, Triviality,
};
use hyperbasis::rewrite::{
    check_proof, check_word_proof, derive_with, word_budget, word_derive_bounded, Budget, Outcome,
    Proof, Strategy, WordIdentity, WordProof,
};
use hyperbasis::term::{format_identity, format_term, parse_identity, parse_term, Identity, Term};
use hyperbasis::typesys::{lower_covers, parse_type, type_leq, SimilarityType};
use hyperbasis::witness::{assoc_instance, format_two_op, instance_census, t_family, two_op_type};
use hyperbasis::words::{is_square_free, square_factors, ternary_squarefree, thue_morse};

#[derive(Parser, Debug)]
#[command(
    name = "hyperbasis",
    version,
    about = "Hyperidentities, derivations and relatively free semigroups"
)]
struct Cli {
    /// Print the result as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Write a run manifest (command line, budgets, version, timing, digest).
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand a hyperidentity into the identities it implies up to a size bound.
    Expand(ExpandArgs),
    /// Search for a derivation of an identity from axioms.
    Derive(DeriveArgs),
    /// Compute a relatively free semigroup.
    Free(FreeArgs),
    /// Thue–Morse and square-free words.
    Word {
        #[command(subcommand)]
        command: WordCommand,
    },
    /// Alternating term towers and instance censuses.
    Witness {
        #[command(subcommand)]
        command: WitnessCommand,
    },
    /// Compare two similarity types, or list the lower covers of one.
    Typeorder(TypeorderArgs),
    /// Probe whether a hyperidentity forces the trivial identity x1 = x2.
    Trivial(TrivialArgs),
    /// Enumerate small semigroups satisfying laws.
    Models(ModelsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Taylor,
    Prehyper,
}

impl ModeArg {
    fn mode(self) -> ExpansionMode {
        match self {
            ModeArg::Taylor => ExpansionMode::Taylor,
            ModeArg::Prehyper => ExpansionMode::Prehyper,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Auto,
    Tree,
}

#[derive(Args, Debug, Clone, Default)]
struct BudgetArgs {
    /// Largest term size (operation count) a search may visit.
    #[arg(long)]
    max_term_ops: Option<usize>,
    /// Largest number of visited states.
    #[arg(long)]
    max_visited: Option<usize>,
    /// Longest proof.
    #[arg(long)]
    max_depth: Option<usize>,
}

impl BudgetArgs {
    fn apply(&self, mut b: Budget) -> Budget {
        if let Some(v) = self.max_term_ops {
            b.max_term_ops = v;
        }
        if let Some(v) = self.max_visited {
            b.max_visited = v;
        }
        if let Some(v) = self.max_depth {
            b.max_depth = v;
        }
        b
    }
}

#[derive(Args, Debug)]
struct ExpandArgs {
    /// Catalog name (`hyperassociativity`, `unary_power:2,3`, …) or a
    /// hyperidentity such as `F(x1,F(x2,x3)) = F(F(x1,x2),x3)`.
    #[arg(long)]
    hyper: String,
    /// Similarity type, e.g. `2`, `2,1` or `f:2,g:1`.
    #[arg(long = "type", default_value = "2")]
    ty: String,
    #[arg(long, value_enum, default_value = "taylor")]
    mode: ModeArg,
    #[arg(long, default_value_t = 2)]
    max_ops: usize,
}

#[derive(Args, Debug)]
struct DeriveArgs {
    /// Axioms separated by `;` (repeatable).
    #[arg(long, required = true)]
    axioms: Vec<String>,
    #[arg(long)]
    goal: String,
    #[arg(long = "type", default_value = "2")]
    ty: String,
    /// Treat axioms and goal as semigroup words (associativity implicit).
    #[arg(long)]
    words: bool,
    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug)]
struct FreeArgs {
    /// Semigroup laws such as `xyxzxyx=xyzyx`, separated by `;` (repeatable).
    #[arg(long, required = true)]
    law: Vec<String>,
    #[arg(long, default_value_t = 2)]
    gens: usize,
    /// Fixed word length bound; escalates automatically when absent.
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, default_value_t = FreeConfig::DEFAULT_MAX_WORDS)]
    max_words: usize,
    /// Also print the Cayley table.
    #[arg(long)]
    table: bool,
}

#[derive(Subcommand, Debug)]
enum WordCommand {
    /// Prefix of the Thue–Morse sequence.
    Tm {
        #[arg(long)]
        len: usize,
    },
    /// Prefix of a square-free word over a, b, c.
    Sqfree {
        #[arg(long)]
        len: usize,
        /// Verify square-freeness.
        #[arg(long)]
        check: bool,
    },
    /// List the square factors of a word.
    Squares { word: String },
    /// Power reductions of a word over a, b under xxyyz = xxyxxyz.
    Reduce { word: String },
}

#[derive(Subcommand, Debug)]
enum WitnessCommand {
    /// Print a tower term.
    Tfam {
        #[arg(long)]
        level: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        star: bool,
    },
    /// Both sides of the associativity instance of a tower term.
    Assoc {
        #[arg(long)]
        level: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        star: bool,
    },
    /// Small hyperidentity instances inside a host term.
    Census {
        /// Host term in prefix form, e.g. `dot(x1,circ(x2,x3))`.
        #[arg(long, required_unless_present = "tower")]
        host: Option<String>,
        /// Use the lhs of the associativity instance of the level-N index-0
        /// tower term as host.
        #[arg(long, value_name = "N", conflicts_with = "host")]
        tower: Option<usize>,
        #[arg(long, default_value = "hyperassociativity")]
        hyper: String,
        #[arg(long)]
        max_ops: usize,
        #[arg(long)]
        projections: bool,
        /// Type of the host; defaults to the two binary operations dot and circ.
        #[arg(long = "type")]
        ty: Option<String>,
    },
}

#[derive(Args, Debug)]
struct TypeorderArgs {
    lhs: String,
    rhs: Option<String>,
    /// List the lower covers of LHS instead of comparing.
    #[arg(long, conflicts_with = "rhs")]
    covers: bool,
}

#[derive(Args, Debug)]
struct TrivialArgs {
    #[arg(long)]
    hyper: String,
    #[arg(long = "type", default_value = "2")]
    ty: String,
    #[arg(long, value_enum, default_value = "taylor")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    max_ops: usize,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug)]
struct ModelsArgs {
    #[arg(long, required = true)]
    law: Vec<String>,
    #[arg(long)]
    size: usize,
}

/// A usage or input error (exit 2).
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<Output, UsageError>;

/// What a command produced.
struct Output {
    value: Value,
    text: String,
    /// False for unknown or bound-exceeded outcomes.
    settled: bool,
    budgets: BTreeMap<String, usize>,
}

impl Output {
    fn done(value: Value, text: String) -> Self {
        Output {
            value,
            text,
            settled: true,
            budgets: BTreeMap::new(),
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    command_line: Vec<String>,
    budgets: BTreeMap<String, usize>,
    version: &'static str,
    elapsed_ms: u128,
    digest: String,
}

/// `@path` reads the argument from a file.
fn arg_text(s: &str) -> Result<String, UsageError> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map(|t| t.trim().to_string())
            .map_err(|e| UsageError(format!("cannot read {path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

fn split_list(items: &[String]) -> Result<Vec<String>, UsageError> {
    let mut out = Vec::new();
    for item in items {
        for part in arg_text(item)?.split([';', '\n']) {
            let part = part.trim();
            if !part.is_empty() {
                out.push(part.to_string());
            }
        }
    }
    Ok(out)
}

fn parse_word_law(s: &str) -> Result<WordIdentity, UsageError> {
    WordIdentity::parse(s)
        .filter(|w| !w.lhs.is_empty() && !w.rhs.is_empty())
        .ok_or_else(|| UsageError(format!("`{s}` is not a semigroup law like xyx=xyyx")))
}

fn load_hyper(arg: &str, tau: &SimilarityType) -> Result<Hyperidentity, UsageError> {
    let arg = arg_text(arg)?;
    if arg.contains('=') || arg.contains('≈') {
        Ok(Hyperidentity::parse(&arg, Some(tau))?)
    } else {
        Ok(Builtin::from_str(&arg)?.hyperidentity()?)
    }
}

fn budget_map(b: &Budget) -> BTreeMap<String, usize> {
    [
        ("max_term_ops".to_string(), b.max_term_ops),
        ("max_visited".to_string(), b.max_visited),
        ("max_depth".to_string(), b.max_depth),
    ]
    .into()
}

fn proof_json(p: &Proof) -> Value {
    Value::Array(
        p.steps
            .iter()
            .map(|s| {
                let sub: BTreeMap<String, String> = s
                    .sub
                    .iter()
                    .map(|(v, t)| (format!("x{v}"), t.to_string()))
                    .collect();
                json!({"axiom": s.axiom, "dir": s.dir, "pos": s.pos, "sub": sub})
            })
            .collect(),
    )
}

fn word_proof_json(p: &WordProof) -> Value {
    Value::Array(
        p.steps
            .iter()
            .map(|s| {
                let sub: BTreeMap<String, Vec<u32>> = s
                    .sub
                    .iter()
                    .map(|(v, w)| (format!("x{v}"), w.clone()))
                    .collect();
                json!({"axiom": s.axiom, "dir": s.dir, "start": s.start, "sub": sub})
            })
            .collect(),
    )
}

fn proof_text(axioms: &[Identity], start: &Term, p: &Proof, tau: &SimilarityType) -> String {
    let mut out = format!("  {}\n", format_term(start, tau));
    if let Ok(states) = p.replay(axioms, start) {
        for (s, t) in p.steps.iter().zip(states.iter().skip(1)) {
            let pos: Vec<String> = s.pos.iter().map(usize::to_string).collect();
            out.push_str(&format!(
                "  = {}    [axiom {} {} at ({})]\n",
                format_term(t, tau),
                s.axiom,
                serde_json::to_value(s.dir)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                pos.join(",")
            ));
        }
    }
    out
}

fn cmd_expand(a: &ExpandArgs) -> CmdResult {
    let tau = parse_type(&arg_text(&a.ty)?)?;
    let e = load_hyper(&a.hyper, &tau)?;
    let ids = expand(&e, &tau, &a.mode.mode(), a.max_ops)?;
    let printed: Vec<String> = ids.iter().map(|i| format_identity(i, &tau)).collect();
    let value = json!({
        "hyperidentity": e.to_string(),
        "type": tau.to_string(),
        "mode": format!("{:?}", a.mode).to_lowercase(),
        "max_ops": a.max_ops,
        "count": printed.len(),
        "identities": printed,
    });
    let mut text = format!(
        "{} over {} ({} mode, images up to {} ops): {} identities\n",
        e,
        tau,
        value["mode"].as_str().unwrap_or(""),
        a.max_ops,
        printed.len()
    );
    for p in &printed {
        text.push_str(&format!("  {p}\n"));
    }
    Ok(Output::done(value, text))
}

fn cmd_derive(a: &DeriveArgs) -> CmdResult {
    let axiom_texts = split_list(&a.axioms)?;
    if axiom_texts.is_empty() {
        return Err(UsageError("no axioms given".into()));
    }
    let goal_text = arg_text(&a.goal)?;
    if a.words {
        let axioms: Vec<WordIdentity> = axiom_texts
            .iter()
            .map(|s| parse_word_law(s))
            .collect::<Result<_, _>>()?;
        let goal = parse_word_law(&goal_text)?;
        let budget = a.budget.apply(word_budget(&goal));
        budget.validate()?;
        let out = word_derive_bounded(&axioms, &goal, &budget);
        let (value, text, settled) = match &out {
            Outcome::Derived(p) => {
                let checked = check_word_proof(&axioms, &goal, p);
                (
                    json!({"goal": goal_text, "axioms": axiom_texts, "status": "derived", "checked": checked, "length": p.len(), "steps": word_proof_json(p)}),
                    format!("derived {goal_text} in {} steps (checked: {checked})\n", p.len()),
                    true,
                )
            }
            Outcome::Unknown { visited } => (
                json!({"goal": goal_text, "axioms": axiom_texts, "status": "unknown", "visited": visited}),
                format!("unknown: no derivation of {goal_text} within budget ({visited} states visited)\n"),
                false,
            ),
        };
        return Ok(Output {
            value,
            text,
            settled,
            budgets: budget_map(&budget),
        });
    }
    let tau = parse_type(&arg_text(&a.ty)?)?;
    let axioms: Vec<Identity> = axiom_texts
        .iter()
        .map(|s| parse_identity(s, &tau))
        .collect::<Result<_, _>>()?;
    let goal = parse_identity(&goal_text, &tau)?;
    let budget = a.budget.apply(Budget::for_goal(&goal));
    budget.validate()?;
    let strategy = match a.strategy {
        StrategyArg::Auto => Strategy::Auto,
        StrategyArg::Tree => Strategy::Tree,
    };
    let printed_axioms: Vec<String> = axioms.iter().map(|e| format_identity(e, &tau)).collect();
    let printed_goal = format_identity(&goal, &tau);
    let out = derive_with(&axioms, &goal, &budget, strategy);
    let (value, text, settled) = match &out {
        Outcome::Derived(p) => {
            let checked = check_proof(&axioms, &goal, p);
            let mut text = format!("derived {printed_goal} in {} steps (checked: {checked})\n", p.len());
            text.push_str(&proof_text(&axioms, &goal.lhs, p, &tau));
            (
                json!({"goal": printed_goal, "axioms": printed_axioms, "status": "derived", "checked": checked, "length": p.len(), "steps": proof_json(p)}),
                text,
                true,
            )
        }
        Outcome::Unknown { visited } => (
            json!({"goal": printed_goal, "axioms": printed_axioms, "status": "unknown", "visited": visited}),
            format!("unknown: no derivation of {printed_goal} within budget ({visited} states visited)\n"),
            false,
        ),
    };
    Ok(Output {
        value,
        text,
        settled,
        budgets: budget_map(&budget),
    })
}

fn cmd_free(a: &FreeArgs) -> CmdResult {
    let laws: Vec<WordIdentity> = split_list(&a.law)?
        .iter()
        .map(|s| parse_word_law(s))
        .collect::<Result<_, _>>()?;
    let cfg = FreeConfig {
        bound: a.bound,
        max_words: a.max_words,
    };
    let r = free_semigroup(&laws, a.gens, &cfg)?;
    let mut value = serde_json::to_value(&r)?;
    if !a.table {
        if let Some(m) = value.get_mut("multiplication") {
            *m = Value::Null;
        }
    }
    let mut text = match r.status {
        FreeStatus::Stable { cardinality } => {
            format!(
                "Stable, {cardinality} elements (laws {}; {} generators; bound {})\n",
                r.identities.join(", "),
                r.generators,
                r.bound
            )
        }
        FreeStatus::BoundExceeded { census } => format!(
            "BoundExceeded, {census} classes at bound {} (laws {}; {} generators)\n",
            r.bound,
            r.identities.join(", "),
            r.generators
        ),
    };
    let reps: Vec<String> = r.classes.iter().map(GenWord::to_string).collect();
    text.push_str(&format!("classes: {}\n", reps.join(" ")));
    if a.table {
        if let Some(t) = &r.multiplication {
            text.push_str(&t.to_text());
        }
    }
    let mut budgets = BTreeMap::from([("max_words".to_string(), a.max_words)]);
    if let Some(b) = a.bound {
        budgets.insert("bound".into(), b);
    }
    Ok(Output {
        value,
        text,
        settled: r.is_stable(),
        budgets,
    })
}

fn cmd_word(c: &WordCommand) -> CmdResult {
    match c {
        WordCommand::Tm { len } => {
            let w: String = thue_morse(*len)
                .iter()
                .map(|b| char::from(b'0' + b))
                .collect();
            Ok(Output::done(
                json!({"word": w, "length": len}),
                format!("{w}\n"),
            ))
        }
        WordCommand::Sqfree { len, check } => {
            let w = ternary_squarefree(*len);
            let mut value = json!({"word": w, "length": len});
            let mut text = format!("{w}\n");
            if *check {
                let ok = is_square_free(w.as_bytes());
                value["square_free"] = json!(ok);
                text.push_str(&format!("square-free: {ok}\n"));
            }
            Ok(Output::done(value, text))
        }
        WordCommand::Squares { word } => {
            let w = arg_text(word)?;
            let chars: Vec<char> = w.chars().collect();
            let found: Vec<(usize, String)> = square_factors(&chars)
                .into_iter()
                .map(|(s, p)| (s, chars[s..s + p].iter().collect()))
                .collect();
            let mut text = format!("{} square factor(s)\n", found.len());
            for (s, root) in &found {
                text.push_str(&format!("  at {s}: ({root})^2\n"));
            }
            let list: Vec<Value> = found
                .iter()
                .map(|(s, r)| json!({"start": s, "root": r}))
                .collect();
            Ok(Output::done(
                json!({"word": w, "square_free": found.is_empty(), "squares": list}),
                text,
            ))
        }
        WordCommand::Reduce { word } => {
            let w = GenWord::parse(&arg_text(word)?)?;
            let r = paper_reductions(&w)?;
            let value = json!({"input": r.input.to_string(), "output": r.output.to_string(), "steps": r.proof.len(), "proof": word_proof_json(&r.proof)});
            Ok(Output::done(
                value,
                format!(
                    "{} -> {} ({} certified steps)\n",
                    r.input,
                    r.output,
                    r.proof.len()
                ),
            ))
        }
    }
}

fn cmd_witness(c: &WitnessCommand) -> CmdResult {
    match c {
        WitnessCommand::Tfam { level, k, star } => {
            let t = t_family(*level, *k, *star)?;
            let s = format_two_op(&t);
            let value = json!({"level": level, "k": k, "starred": star, "term": s, "op_count": t.op_count()});
            Ok(Output::done(value, format!("{s}\n")))
        }
        WitnessCommand::Assoc { level, k, star } => {
            let (l, r) = assoc_instance(&t_family(*level, *k, *star)?)?;
            let value = json!({"lhs": format_two_op(&l), "rhs": format_two_op(&r), "lhs_ops": l.op_count(), "rhs_ops": r.op_count()});
            Ok(Output::done(
                value,
                format!("{}\n=\n{}\n", format_two_op(&l), format_two_op(&r)),
            ))
        }
        WitnessCommand::Census {
            host,
            tower,
            hyper,
            max_ops,
            projections,
            ty,
        } => {
            let tau = match ty {
                Some(t) => parse_type(&arg_text(t)?)?,
                None => two_op_type(),
            };
            let host = match (host, tower) {
                (_, Some(n)) => assoc_instance(&t_family(*n, 0, false)?)?.0,
                (Some(h), None) => parse_term(&arg_text(h)?, &tau)?,
                (None, None) => return Err(UsageError("give --host or --tower".into())),
            };
            let e = load_hyper(hyper, &tau)?;
            let census = instance_census(&host, &e, &tau, *max_ops, *projections);
            let mut text = format!(
                "{} instance(s) of {} in a host of {} operations\n",
                census.len(),
                e,
                host.op_count()
            );
            for c in &census {
                let images: Vec<String> = c
                    .images
                    .iter()
                    .map(|(k, v)| format!("{k} := {v}"))
                    .collect();
                let pos: Vec<String> = c.position.iter().map(usize::to_string).collect();
                text.push_str(&format!(
                    "  ({}) {:?}: {}\n",
                    pos.join(","),
                    c.side,
                    images.join(", ")
                ));
            }
            let value = json!({"hyperidentity": e.to_string(), "host_ops": host.op_count(), "max_ops": max_ops, "projections": projections, "count": census.len(), "census": census});
            Ok(Output::done(value, text))
        }
    }
}

fn cmd_typeorder(a: &TypeorderArgs) -> CmdResult {
    let lhs = parse_type(&arg_text(&a.lhs)?)?;
    if a.covers || a.rhs.is_none() {
        let covers: Vec<String> = lower_covers(&lhs).iter().map(ToString::to_string).collect();
        let text = format!(
            "lower covers of {lhs}: {}\n",
            if covers.is_empty() {
                "none".to_string()
            } else {
                covers.join(" ")
            }
        );
        return Ok(Output::done(
            json!({"type": lhs.to_string(), "lower_covers": covers}),
            text,
        ));
    }
    let rhs = parse_type(&arg_text(a.rhs.as_deref().unwrap_or_default())?)?;
    let (le, ge) = (type_leq(&lhs, &rhs), type_leq(&rhs, &lhs));
    let relation = match (le, ge) {
        (true, true) => "equal",
        (true, false) => "less",
        (false, true) => "greater",
        (false, false) => "incomparable",
    };
    let value = json!({"lhs": lhs.to_string(), "rhs": rhs.to_string(), "leq": le, "geq": ge, "relation": relation});
    Ok(Output::done(value, format!("{lhs} vs {rhs}: {relation}\n")))
}

fn cmd_trivial(a: &TrivialArgs) -> CmdResult {
    let tau = parse_type(&arg_text(&a.ty)?)?;
    let e = load_hyper(&a.hyper, &tau)?;
    let goal = hyperbasis::hyper::trivial_goal();
    let budget = a.budget.apply(Budget::for_goal(&goal));
    budget.validate()?;
    let t = triviality_probe(&e, &tau, &a.mode.mode(), a.max_ops, &budget)?;
    let (value, text, settled) = match &t {
        Triviality::Trivial { axioms, proof } => {
            let checked = check_proof(axioms, &goal, proof);
            let printed: Vec<String> = axioms.iter().map(|i| format_identity(i, &tau)).collect();
            let mut text = format!(
                "trivial: {e} over {tau} forces x1 = x2 (proof of {} steps, checked: {checked})\n",
                proof.len()
            );
            text.push_str(&proof_text(axioms, &goal.lhs, proof, &tau));
            (
                json!({"status": "trivial", "checked": checked, "axioms": printed, "steps": proof_json(proof)}),
                text,
                true,
            )
        }
        Triviality::Unknown { axioms, visited } => (
            json!({"status": "unknown", "axioms": axioms, "visited": visited}),
            format!(
                "unknown: x1 = x2 not found from {axioms} instances ({visited} states visited)\n"
            ),
            false,
        ),
    };
    let mut budgets = budget_map(&budget);
    budgets.insert("max_ops".into(), a.max_ops);
    Ok(Output {
        value,
        text,
        settled,
        budgets,
    })
}

fn cmd_models(a: &ModelsArgs) -> CmdResult {
    let laws: Vec<WordIdentity> = split_list(&a.law)?
        .iter()
        .map(|s| parse_word_law(s))
        .collect::<Result<_, _>>()?;
    let models = search_models(&laws, a.size)?;
    let mut text = format!("{} model(s) of size {}\n", models.len(), a.size);
    for m in &models {
        let rows: Vec<String> = m
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        text.push_str(&format!("  [{}]\n", rows.join(" | ")));
    }
    Ok(Output::done(
        json!({"size": a.size, "count": models.len(), "models": models}),
        text,
    ))
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Expand(a) => cmd_expand(a),
        Command::Derive(a) => cmd_derive(a),
        Command::Free(a) => cmd_free(a),
        Command::Word { command } => cmd_word(command),
        Command::Witness { command } => cmd_witness(command),
        Command::Typeorder(a) => cmd_typeorder(a),
        Command::Trivial(a) => cmd_trivial(a),
        Command::Models(a) => cmd_models(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let started = Instant::now();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let elapsed = started.elapsed();
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&out.value).expect("json values serialize")
        );
    } else {
        print!("{}", out.text);
    }
    if let Some(path) = &cli.manifest {
        let canonical = serde_json::to_string(&out.value).expect("json values serialize");
        let manifest = RunManifest {
            command_line: std::env::args().collect(),
            budgets: out.budgets.clone(),
            version: env!("CARGO_PKG_VERSION"),
            elapsed_ms: elapsed.as_millis(),
            digest: hex::encode(Sha256::digest(canonical.as_bytes())),
        };
        let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        if let Err(e) = std::fs::write(path, body) {
            eprintln!("error: cannot write manifest {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if out.settled {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
