use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hpp::engine::{classify, ClassSignature, Engine, EngineError, Limits, DEFAULT_ATOM_CAP, DEFAULT_TABLE_CAP};
use hpp::formula::Program;
use hpp::matching::{self, BoundSelector, GwmLimits, GwmMode};
use hpp::proof::{check_derivation, check_derivation_for, parse_derivation, ProofError};
use hpp::strategies::{validate_strategy, StrategyRegistry};
use hpp::syntax::{ground, parse_program, parse_query, GroundOptions, DEFAULT_INSTANCE_CAP};

#[derive(Parser)]
#[command(name = "hpp", version, about = "Evaluate, query and certify ground hybrid probabilistic programs")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Config {
    /// Output style; `machine` prints one `key=value` record per line.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Most head atoms the consistency check expands.
    #[arg(long, default_value_t = DEFAULT_ATOM_CAP, value_parser = positive, global = true)]
    atom_cap: usize,
    /// Most formula-table entries an evaluation may allocate.
    #[arg(long, default_value_t = DEFAULT_TABLE_CAP, value_parser = positive, global = true)]
    table_cap: usize,
    /// Most raw substitutions the grounder may try.
    #[arg(long, default_value_t = DEFAULT_INSTANCE_CAP, value_parser = positive, global = true)]
    ground_cap: usize,
    /// Largest GWM instance, in vertices.
    #[arg(long, default_value_t = GwmLimits::default().dp_cap, value_parser = positive, global = true)]
    gwm_cap: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check syntax and echo the program in canonical form.
    Parse { file: PathBuf },
    /// Print the ground program.
    Ground { file: PathBuf },
    /// Print head width, body width, clauses, atoms and strategies.
    Classify { file: PathBuf },
    /// Compute the least fixpoint.
    Lfp {
        file: PathBuf,
        /// Width bound N; without it, head-width-1 programs use the atom-only evaluator.
        #[arg(long)]
        width: Option<usize>,
        /// Print every table entry.
        #[arg(long)]
        dump: bool,
    },
    /// Decide whether the program entails a query `F : [a,b]`.
    Entail {
        file: PathBuf,
        #[arg(long)]
        query: String,
        /// Write a derivation of the query here when it is entailed.
        #[arg(long)]
        prove: Option<PathBuf>,
    },
    /// Decide consistency and name an empty formula when there is one.
    Consistent { file: PathBuf },
    /// Verify a derivation against a program.
    CheckProof {
        file: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        /// Also require the derivation to end in this annotated formula.
        #[arg(long)]
        goal: Option<String>,
    },
    /// Solve and decide a generalized weighted matching instance.
    Gwm { instance: PathBuf },
    /// Run the axiom harness over every built-in strategy.
    ValidateStrategies {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Positive,
    Negative,
}

struct Ctx {
    config: Config,
    engine: Engine,
    out: String,
}

impl Ctx {
    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn human(&self) -> bool {
        self.config.format == Format::Human
    }

    fn read(&self, path: &Path) -> Result<String> {
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
    }

    fn program(&self, path: &Path) -> Result<Program> {
        let src = self.read(path)?;
        let sp = parse_program(&src, self.engine.registry()).with_context(|| format!("{}", path.display()))?;
        let opts = GroundOptions { instance_cap: self.config.ground_cap };
        Ok(ground(&sp, opts).with_context(|| format!("{}", path.display()))?)
    }
}

/// Quotes values that would break a `key=value` record.
fn value(s: &str) -> String {
    if s.is_empty() || s.contains(char::is_whitespace) || s.contains('"') {
        format!("{s:?}")
    } else {
        s.to_string()
    }
}

fn signature_record(c: &ClassSignature) -> String {
    format!("k={} r={} m={} a={} s={}", c.head_width, c.body_width, c.clauses, c.atoms, c.strategies)
}

fn run(cli: Cli) -> Result<(Verdict, String)> {
    let limits = Limits { atom_cap: cli.config.atom_cap, table_cap: cli.config.table_cap };
    let engine = Engine::new(StrategyRegistry::builtin()).with_limits(limits);
    let mut ctx = Ctx { config: cli.config, engine, out: String::new() };
    let verdict = match cli.command {
        Command::Parse { file } => {
            let src = ctx.read(&file)?;
            let sp = parse_program(&src, ctx.engine.registry()).with_context(|| format!("{}", file.display()))?;
            if ctx.human() {
                ctx.line(sp.to_string().trim_end());
            } else {
                for (i, c) in sp.clauses.iter().enumerate() {
                    ctx.line(format!("clause={} text={}", i + 1, value(&c.to_string())));
                }
            }
            Verdict::Positive
        }
        Command::Ground { file } => {
            let p = ctx.program(&file)?;
            if ctx.human() {
                ctx.line(p.to_string().trim_end());
            } else {
                for id in p.clause_ids() {
                    let c = p.clause(id).expect("listed id");
                    ctx.line(format!("clause={id} text={}", value(&c.to_string())));
                }
            }
            Verdict::Positive
        }
        Command::Classify { file } => {
            let p = ctx.program(&file)?;
            let c = classify(&p);
            let class = format!("HPP_{{{},{}}}", c.head_width, c.body_width);
            if ctx.human() {
                ctx.line(format!("{} class={class}", signature_record(&c)));
            } else {
                ctx.line(format!("{} class={class} hpp1={}", signature_record(&c), c.is_hpp1()));
            }
            Verdict::Positive
        }
        Command::Lfp { file, width, dump } => lfp(&mut ctx, &file, width, dump)?,
        Command::Entail { file, query, prove } => entail(&mut ctx, &file, &query, prove.as_deref())?,
        Command::Consistent { file } => {
            let p = ctx.program(&file)?;
            let v = ctx.engine.consistent(&p)?;
            let full: Vec<String> = v.full_width_values.iter().map(|(s, iv)| format!("{}={iv}", s.name)).collect();
            match (v.consistent, ctx.human()) {
                (true, true) => ctx.line("CONSISTENT"),
                (true, false) => ctx.line(format!("verdict=consistent {}", full.join(" "))),
                (false, human) => {
                    let w = v.witness.map(|w| w.to_string()).unwrap_or_else(|| "none".into());
                    if human {
                        ctx.line(format!("INCONSISTENT witness={w}"));
                    } else {
                        ctx.line(format!("verdict=inconsistent witness={} {}", value(&w), full.join(" ")));
                    }
                }
            }
            if v.consistent {
                Verdict::Positive
            } else {
                Verdict::Negative
            }
        }
        Command::CheckProof { file, proof, goal } => {
            let p = ctx.program(&file)?;
            let src = ctx.read(&proof)?;
            let d = parse_derivation(&src, ctx.engine.registry()).with_context(|| format!("{}", proof.display()))?;
            let result = match goal {
                Some(g) => {
                    let g = parse_query(&g, ctx.engine.registry()).context("--goal")?;
                    check_derivation_for(&p, ctx.engine.registry(), &d, &g)
                }
                None => check_derivation(&p, ctx.engine.registry(), &d),
            };
            match result {
                Ok(()) => {
                    let r = d.result().expect("checked nonempty").to_string();
                    if ctx.human() {
                        ctx.line(format!("VALID steps={} proves {r}", d.len()));
                    } else {
                        ctx.line(format!("verdict=valid steps={} result={}", d.len(), value(&r)));
                    }
                    Verdict::Positive
                }
                Err(e) => {
                    if ctx.human() {
                        ctx.line(format!("INVALID {e}"));
                    } else {
                        ctx.line(format!("verdict=invalid step={} reason={}", e.step, value(&e.reason)));
                    }
                    Verdict::Negative
                }
            }
        }
        Command::Gwm { instance } => gwm(&mut ctx, &instance)?,
        Command::ValidateStrategies { samples, seed } => {
            let mut failed = 0;
            let reports: Vec<_> =
                ctx.engine.registry().iter().flat_map(|s| validate_strategy(s.as_ref(), samples, seed)).collect();
            {
                for r in reports {
                    let status = if r.passed() { "pass" } else { "FAIL" };
                    let cx = r
                        .counterexample
                        .as_ref()
                        .map(|c| c.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";"));
                    failed += usize::from(!r.passed());
                    if ctx.human() {
                        let tail = cx.map(|c| format!(" counterexample {c}")).unwrap_or_default();
                        ctx.line(format!("{:<4} {:<14} {status} samples={}{tail}", r.strategy.name, r.axiom, r.samples_tested));
                    } else {
                        let tail = cx.map(|c| format!(" counterexample={c}")).unwrap_or_default();
                        ctx.line(format!(
                            "strategy={} axiom={} status={} samples={}{tail}",
                            r.strategy.name,
                            r.axiom,
                            status.to_lowercase(),
                            r.samples_tested
                        ));
                    }
                }
            }
            if failed == 0 {
                Verdict::Positive
            } else {
                Verdict::Negative
            }
        }
    };
    Ok((verdict, ctx.out))
}

fn lfp(ctx: &mut Ctx, file: &Path, width: Option<usize>, dump: bool) -> Result<Verdict> {
    let p = ctx.program(file)?;
    let sig = classify(&p);
    let (entries, iterations, empty, lines): (usize, usize, Option<String>, Vec<(String, String)>) =
        if width.is_none() && sig.is_hpp1() {
            let (fix, trace) = ctx.engine.lfp1(&p)?;
            let empty = fix.atoms().iter().find(|(_, v)| v.is_empty()).map(|(a, _)| a.to_string());
            let lines = fix.atoms().iter().map(|(a, v)| (a.to_string(), v.to_string())).collect();
            (fix.atoms().len(), trace.iterations.len(), empty, lines)
        } else {
            let n = width.unwrap_or_else(|| sig.head_width.max(sig.body_width).max(1));
            let (table, trace) = ctx.engine.lfp(&p, n)?;
            let empty = table.first_empty().map(|f| f.to_string());
            let lines = table.iter().map(|(f, v)| (f.to_string(), v.to_string())).collect();
            (table.len(), trace.iterations.len(), empty, lines)
        };
    let mode = if width.is_none() && sig.is_hpp1() { "atoms" } else { "formulas" };
    let defined = empty.is_none();
    if ctx.human() {
        ctx.line(format!("mode={mode} entries={entries} iterations={iterations} fully_defined={defined}"));
        if dump {
            for (f, v) in &lines {
                ctx.line(format!("{f} : {v}"));
            }
        }
    } else {
        ctx.line(format!(
            "mode={mode} entries={entries} iterations={iterations} fully_defined={defined} first_empty={}",
            value(empty.as_deref().unwrap_or("none"))
        ));
        if dump {
            for (f, v) in &lines {
                ctx.line(format!("formula={} value={v}", value(f)));
            }
        }
    }
    Ok(Verdict::Positive)
}

fn entail(ctx: &mut Ctx, file: &Path, query: &str, prove: Option<&Path>) -> Result<Verdict> {
    let p = ctx.program(file)?;
    let q = parse_query(query, ctx.engine.registry()).context("--query")?;
    let verdict = match ctx.engine.entails(&p, &q) {
        Err(EngineError::InconsistentProgram { witness }) => {
            let w = witness.map(|w| w.to_string()).unwrap_or_else(|| "none".into());
            if ctx.human() {
                ctx.line(format!("INCONSISTENT witness={w}"));
            } else {
                ctx.line(format!("verdict=inconsistent witness={}", value(&w)));
            }
            return Ok(Verdict::Negative);
        }
        other => other?,
    };
    match (verdict.entailed, ctx.human()) {
        (true, true) => ctx.line(format!("ENTAILED h={}", verdict.computed)),
        (false, true) => ctx.line(format!("NOT ENTAILED h={}", verdict.computed)),
        (e, false) => ctx.line(format!(
            "verdict={} h={} query={}",
            if e { "entailed" } else { "not_entailed" },
            verdict.computed,
            value(&q.to_string())
        )),
    }
    if !verdict.entailed {
        if prove.is_some() {
            eprintln!("no derivation written: the query is not entailed");
        }
        return Ok(Verdict::Negative);
    }
    if let Some(out) = prove {
        let d = match hpp::proof::generate_proof(&p, ctx.engine.registry(), &verdict.trace, &q) {
            Ok(d) => d,
            Err(ProofError::Engine(e)) => return Err(e.into()),
            Err(e) => bail!("proof generation failed: {e}"),
        };
        fs::write(out, d.to_string()).with_context(|| format!("cannot write {}", out.display()))?;
        if ctx.human() {
            ctx.line(format!("proof steps={} written to {}", d.len(), out.display()));
        } else {
            ctx.line(format!("proof_steps={} proof_file={}", d.len(), value(&out.display().to_string())));
        }
    }
    Ok(Verdict::Positive)
}

fn gwm(ctx: &mut Ctx, path: &Path) -> Result<Verdict> {
    let src = ctx.read(path)?;
    let inst = matching::parse_instance(&src, ctx.engine.registry()).with_context(|| format!("{}", path.display()))?;
    let limits = GwmLimits {
        enumeration_cap: GwmLimits::default().enumeration_cap.min(ctx.config.gwm_cap),
        dp_cap: ctx.config.gwm_cap,
    };
    let sol = matching::solve(&inst, ctx.engine.registry(), limits)?;
    let decision = match (&sol.value, inst.mode) {
        (None, _) => false,
        (Some(v), GwmMode::Max) => *v >= inst.bound,
        (Some(v), GwmMode::Min) => *v <= inst.bound,
    };
    let goal = format!(
        "{}.{}",
        inst.strategy.name,
        match inst.selector {
            BoundSelector::Lower => "c1",
            BoundSelector::Upper => "c2",
        }
    );
    let mode = match inst.mode {
        GwmMode::Max => "max",
        GwmMode::Min => "min",
    };
    match (&sol.value, &sol.matching) {
        (Some(v), Some(m)) => {
            let edges: Vec<String> = m.iter().map(|(u, w)| format!("{u}-{w}")).collect();
            if ctx.human() {
                ctx.line(format!("FEASIBLE {mode} {goal} optimum={v} matching={}", edges.join(",")));
                ctx.line(format!("decision B={} {}", inst.bound, if decision { "YES" } else { "NO" }));
            } else {
                ctx.line(format!(
                    "feasible=true mode={mode} goal={goal} optimum={v} matching={} bound={} decision={decision}",
                    edges.join(","),
                    inst.bound
                ));
            }
        }
        _ => {
            if ctx.human() {
                ctx.line("INFEASIBLE no complete matching");
            } else {
                ctx.line(format!("feasible=false mode={mode} goal={goal} bound={} decision=false", inst.bound));
            }
        }
    }
    Ok(if decision { Verdict::Positive } else { Verdict::Negative })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok((verdict, out)) => {
            print!("{out}");
            match verdict {
                Verdict::Positive => ExitCode::SUCCESS,
                Verdict::Negative => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
