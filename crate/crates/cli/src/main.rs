use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;

use relconn::catalog::{builtin, builtin_library, format_relation, parse_relations};
use relconn::classify::{classify_set, profile, RelationProfile};
use relconn::clausal::SchaeferClass;
use relconn::constructions::{express_m, reduce_sat_to_conn, Target};
use relconn::cpss::{conn_by_projections, conn_cpss, Backend, ConnReport};
use relconn::formula::{parse_formula, Formula};
use relconn::generate::{random_cpss_pool, random_formula};
use relconn::graph::{SolutionGraph, BRUTE_VARS_MAX};
use relconn::horn::{maximal_self_implicating_sets, normalize_nu_traced, parse_horn, NuRule};
use relconn::relation::{format_bits, Relation};

#[derive(Parser)]
#[command(
    name = "relconn",
    version,
    about = "Connectivity of Boolean constraint solution graphs"
)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Exit with status 1 when a yes/no query answers no.
    #[arg(long, global = true)]
    exit_status: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closure and tightness profile of each relation.
    ClassifyRelation(RelationInput),
    /// Classify a relation set and print the matching complexity row.
    ClassifySet(RelationInput),
    /// Is the solution graph connected?
    Conn {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Is there a path between two solutions?
    Stconn {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Largest shortest-path distance inside a component.
    Diameter { file: PathBuf },
    /// Components, their minima and the locally minimal solutions.
    Components { file: PathBuf },
    /// Print the solution graph in DOT format.
    Graph {
        file: PathBuf,
        /// Write to this file instead of standard output.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Horn clause set utilities.
    #[command(subcommand)]
    Horn(HornCommand),
    /// Reduce a {P,N} formula to an {M} formula that is disconnected iff
    /// the input is satisfiable.
    Reduce { file: PathBuf },
    /// Express M from a Horn relation that is not safely componentwise IHSB-.
    ExpressM(RelationInput),
    /// Generate a random formula over a random CPSS pool.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ClassArg::Horn)]
        class: ClassArg,
        #[arg(long, default_value_t = 6)]
        vars: usize,
        #[arg(long, default_value_t = 5)]
        constraints: usize,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
    },
}

#[derive(Subcommand)]
enum HornCommand {
    /// Variables forced to 1 by setting a set of variables to 1.
    Imp {
        file: PathBuf,
        /// Space or comma separated variable names.
        #[arg(long, default_value = "")]
        set: String,
    },
    /// Maximal self-implicating sets containing no restraint set.
    Selfimp { file: PathBuf },
    /// Apply the simplification rules until none applies.
    Normalize { file: PathBuf },
}

#[derive(Args)]
struct RelationInput {
    /// Relation files (`rel NAME ARITY : tuples`).
    files: Vec<PathBuf>,
    /// Built-in relation by name, e.g. M or R_PSPA.
    #[arg(long)]
    builtin: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Brute,
    Cpss,
    Projections,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Bijunctive,
    Horn,
    DualHorn,
    Affine,
}

impl From<ClassArg> for SchaeferClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Bijunctive => SchaeferClass::Bijunctive,
            ClassArg::Horn => SchaeferClass::Horn,
            ClassArg::DualHorn => SchaeferClass::DualHorn,
            ClassArg::Affine => SchaeferClass::Affine,
        }
    }
}

struct Output {
    text: String,
    json: serde_json::Value,
    answer: Option<bool>,
}

impl Output {
    fn new(text: impl Into<String>, json: impl Serialize) -> Result<Self> {
        Ok(Output {
            text: text.into(),
            json: serde_json::to_value(json)?,
            answer: None,
        })
    }

    fn answer(mut self, yes: bool) -> Self {
        self.answer = Some(yes);
        self
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_formula(path: &Path) -> Result<Formula> {
    let text = read(path)?;
    parse_formula(&text, &builtin_library()).with_context(|| format!("in {}", path.display()))
}

fn load_relations(input: &RelationInput) -> Result<Vec<Relation>> {
    let mut out = Vec::new();
    for path in &input.files {
        let rels =
            parse_relations(&read(path)?).with_context(|| format!("in {}", path.display()))?;
        out.extend(rels);
    }
    for name in &input.builtin {
        out.push(builtin(name).ok_or_else(|| anyhow!("unknown built-in relation `{name}`"))?);
    }
    if out.is_empty() {
        bail!("no relations given");
    }
    Ok(out)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn profile_text(p: &RelationProfile) -> String {
    let safe = |v: Option<bool>| v.map_or("unknown", yes_no);
    let rows = [
        ("0-valid", yes_no(p.zero_valid)),
        ("1-valid", yes_no(p.one_valid)),
        ("bijunctive", yes_no(p.bijunctive)),
        ("Horn", yes_no(p.horn)),
        ("dual Horn", yes_no(p.dual_horn)),
        ("affine", yes_no(p.affine)),
        ("IHSB-", yes_no(p.ihsb_minus)),
        ("IHSB+", yes_no(p.ihsb_plus)),
        ("OR-free", yes_no(p.or_free)),
        ("NAND-free", yes_no(p.nand_free)),
        (
            "componentwise bijunctive",
            yes_no(p.componentwise_bijunctive),
        ),
        ("componentwise IHSB-", yes_no(p.componentwise_ihsb_minus)),
        ("componentwise IHSB+", yes_no(p.componentwise_ihsb_plus)),
        (
            "safely componentwise bijunctive",
            safe(p.safely_componentwise_bijunctive),
        ),
        ("safely OR-free", safe(p.safely_or_free)),
        ("safely NAND-free", safe(p.safely_nand_free)),
        (
            "safely componentwise IHSB-",
            safe(p.safely_componentwise_ihsb_minus),
        ),
        (
            "safely componentwise IHSB+",
            safe(p.safely_componentwise_ihsb_plus),
        ),
    ];
    let mut s = format!(
        "{} (arity {}, {} tuples)\n",
        p.name.as_deref().unwrap_or("relation"),
        p.arity,
        p.size
    );
    for (k, v) in rows {
        s += &format!("  {k}: {v}\n");
    }
    s
}

fn conn_text(r: &ConnReport) -> String {
    String::from(if r.connected {
        "connected"
    } else {
        "disconnected"
    })
}

fn brute_report(phi: &Formula) -> Result<ConnReport> {
    Ok(ConnReport {
        connected: SolutionGraph::new(phi)?.is_connected(),
        method: "brute force".into(),
        projections: Vec::new(),
    })
}

fn conn(phi: &Formula, method: Method) -> Result<Output> {
    let report = match method {
        Method::Brute => brute_report(phi)?,
        Method::Cpss => conn_cpss(phi)?,
        Method::Projections => conn_by_projections(phi, Backend::BruteForce)?,
        Method::Auto => {
            let set: Vec<Relation> = phi.used_relations().into_iter().cloned().collect();
            let class = classify_set(&set).ok();
            match class {
                Some(c) if c.cpss => conn_cpss(phi)?,
                _ if phi.num_vars() <= BRUTE_VARS_MAX => brute_report(phi)?,
                Some(c) => {
                    let text = format!(
                        "undecided: {} variables exceed the brute-force bound; Conn_C is {} for {}",
                        phi.num_vars(),
                        c.predictions.conn,
                        c.set_class
                    );
                    let json = json!({
                        "connected": null,
                        "method": "prediction",
                        "set_class": c.set_class,
                        "predictions": c.predictions,
                    });
                    return Output::new(text, json);
                }
                None => bail!(
                    "{} variables exceed the brute-force bound and the set cannot be classified",
                    phi.num_vars()
                ),
            }
        }
    };
    Ok(Output::new(conn_text(&report), &report)?.answer(report.connected))
}

fn nu_rule(r: NuRule) -> &'static str {
    match r {
        NuRule::B => "b",
        NuRule::C => "c",
        NuRule::D => "d",
        NuRule::E => "e",
    }
}

fn horn(cmd: &HornCommand) -> Result<Output> {
    match cmd {
        HornCommand::Imp { file, set } => {
            let h = parse_horn(&read(file)?)?;
            let u = h.parse_set(&set.replace(',', " "))?;
            let imp = h.imp(&u);
            let names: Vec<&str> = imp.iter().map(|&v| h.variables()[v].as_str()).collect();
            Output::new(
                format!("Imp({}) = {}", h.format_set(&u), h.format_set(&imp)),
                json!({ "set": h.format_set(&u), "imp": names }),
            )
        }
        HornCommand::Selfimp { file } => {
            let h = parse_horn(&read(file)?)?;
            let sets = maximal_self_implicating_sets(&h)?;
            let formatted: Vec<String> = sets.iter().map(|u| h.format_set(u)).collect();
            let lists: Vec<Vec<&str>> = sets
                .iter()
                .map(|u| u.iter().map(|&v| h.variables()[v].as_str()).collect())
                .collect();
            Output::new(formatted.join("\n"), json!({ "sets": lists }))
        }
        HornCommand::Normalize { file } => {
            let h = parse_horn(&read(file)?)?;
            let (nu, trace) = normalize_nu_traced(&h);
            let steps: Vec<String> = trace
                .iter()
                .map(|(r, c)| format!("rule ({}): {}", nu_rule(*r), h.format_clause(c)))
                .collect();
            let mut text = String::new();
            for s in &steps {
                text += &format!("# {s}\n");
            }
            text += nu.to_text().trim_end();
            let clauses: Vec<String> = nu.clauses().iter().map(|c| nu.format_clause(c)).collect();
            Output::new(text, json!({ "steps": steps, "clauses": clauses }))
        }
    }
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::ClassifyRelation(input) => {
            let profiles: Vec<RelationProfile> =
                load_relations(input)?.iter().map(profile).collect();
            let text: Vec<String> = profiles.iter().map(profile_text).collect();
            Output::new(text.join("\n").trim_end(), &profiles)
        }
        Command::ClassifySet(input) => {
            let c = classify_set(&load_relations(input)?)?;
            Output::new(c.summary(), &c)
        }
        Command::Conn { file, method } => conn(&load_formula(file)?, *method),
        Command::Stconn { file, from, to } => {
            let phi = load_formula(file)?;
            let (s, t) = (phi.parse_assignment(from)?, phi.parse_assignment(to)?);
            let path = SolutionGraph::new(&phi)?.shortest_path(s, t)?;
            let n = phi.num_vars();
            let steps: Option<Vec<String>> =
                path.map(|p| p.into_iter().map(|a| format_bits(a, n)).collect());
            let text = match &steps {
                Some(p) => format!("connected (distance {})\n{}", p.len() - 1, p.join(" ")),
                None => "not connected".to_string(),
            };
            let found = steps.is_some();
            let json = json!({ "connected": found, "path": steps });
            Ok(Output::new(text, json)?.answer(found))
        }
        Command::Diameter { file } => {
            let d = SolutionGraph::new(&load_formula(file)?)?.diameter();
            Output::new(d.to_string(), json!({ "diameter": d }))
        }
        Command::Components { file } => {
            let r = SolutionGraph::new(&load_formula(file)?)?.report();
            let mut text = format!(
                "{} solution(s), {} component(s)",
                r.n_solutions,
                r.components.len()
            );
            for (i, c) in r.components.iter().enumerate() {
                text += &format!("\n  {}: {}", i + 1, c.join(" "));
            }
            Output::new(text, &r)
        }
        Command::Graph { file, dot } => {
            let g = SolutionGraph::new(&load_formula(file)?)?;
            let text = g.to_dot();
            match dot {
                Some(path) => {
                    fs::write(path, &text)
                        .with_context(|| format!("cannot write {}", path.display()))?;
                    Output::new(
                        format!("wrote {}", path.display()),
                        json!({ "dot": path.display().to_string() }),
                    )
                }
                None => Output::new(text.trim_end(), json!({ "dot": text })),
            }
        }
        Command::Horn(cmd) => horn(cmd),
        Command::Reduce { file } => {
            let out = reduce_sat_to_conn(&load_formula(file)?)?;
            let text = out.formula.to_text();
            Output::new(text.trim_end(), json!({ "formula": text }))
        }
        Command::ExpressM(input) => {
            let rels = load_relations(input)?;
            let [r] = rels.as_slice() else {
                bail!("express-m takes exactly one relation, got {}", rels.len());
            };
            let e = express_m(r)?;
            let target = match e.target {
                Target::K => "K",
                Target::L => "L",
                Target::M => "M",
            };
            let formula = e.formula.to_text();
            let mut text = String::new();
            for s in &e.steps {
                text += &format!("# {s}\n");
            }
            text += formula.trim_end();
            Output::new(
                text,
                json!({ "target": target, "steps": e.steps, "formula": formula }),
            )
        }
        Command::Random {
            seed,
            class,
            vars,
            constraints,
            max_arity,
        } => {
            if *vars == 0 || *constraints == 0 || *max_arity == 0 {
                bail!("--vars, --constraints and --max-arity must be positive");
            }
            let mut rng = StdRng::seed_from_u64(*seed);
            let pool_size = rng.gen_range(1..=3);
            let pool = random_cpss_pool(&mut rng, (*class).into(), pool_size, *max_arity)?;
            let phi = random_formula(&mut rng, &pool, *vars, *constraints, 0.1)?;
            let text = phi.to_text();
            let rels: Vec<String> = pool.iter().map(format_relation).collect();
            Output::new(
                text.trim_end(),
                json!({ "seed": seed, "relations": rels, "formula": text }),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let written = if cli.json {
                writeln!(
                    stdout,
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("json")
                )
            } else {
                writeln!(stdout, "{}", out.text)
            };
            if written.is_err() {
                return ExitCode::from(2);
            }
            match out.answer {
                Some(false) if cli.exit_status => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
