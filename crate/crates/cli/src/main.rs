use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use lbox::checker::{attach_levels, check, infer_levels, Derivation, Mode};
use lbox::fincat::{
    check_cokleisli_ccc, check_comonad_axioms, comparison_is_normal, compare_lift_with_composite, lift_comonad,
    normal_underlying_functor, power_comonad, Budget, FinMonoid, LawReport, Shape,
};
use lbox::kernel::{alpha_eq, Judgment, Stack, Term, Type};
use lbox::rewrite::{equal_theory, normalize, DEFAULT_BUDGET};
use lbox::semantics::{build_model, check_soundness, default_depth, interp_contextual, Valuation};
use lbox::syntax::{parse_file, parse_term, Decl, ModelConfig, MonoidSpec, RawJudgment, Signature};
use lbox::translate::{desugar_judgment, to_gentzen};

#[derive(Parser)]
#[command(name = "lbox", version, about = "Checker, rewriter and model builder for a leveled modal lambda calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check every definition and judgment in a theory file.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "fitch")]
        mode: Mode,
        /// Print derivations as JSON trees.
        #[arg(long)]
        json: bool,
    },
    /// Report the levels inferred for each goal.
    Levels { file: PathBuf },
    /// Reduce a term to beta normal form.
    Normalize {
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Decide the equation goals of a theory file.
    Eq { file: PathBuf },
    /// Translate checked goals into another calculus.
    Translate {
        file: PathBuf,
        #[arg(long)]
        to: Target,
    },
    /// Interpret goals in a finite model and test equation goals for soundness.
    Model {
        file: PathBuf,
        /// `trivial`, `z2` or the path of a multiplication table.
        #[arg(long)]
        monoid: Option<String>,
        #[arg(long)]
        depth: Option<u32>,
        /// Base type sizes, as NAME=SIZE.
        #[arg(long = "val", value_parser = parse_size)]
        val: Vec<(String, u64)>,
        /// Print each denotation as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Check the categorical laws of the power comonad of a monoid.
    Laws {
        #[arg(long, default_value = "z2")]
        monoid: String,
        #[arg(long, default_value_t = 3)]
        max_size: u64,
        /// List every checked equation.
        #[arg(long)]
        verbose: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Gentzen,
    LambdaBox,
}

fn parse_size(s: &str) -> Result<(String, u64), String> {
    let (name, size) = s.split_once('=').ok_or_else(|| format!("expected NAME=SIZE, found `{s}`"))?;
    let size = size.trim().parse().map_err(|e| format!("bad size in `{s}`: {e}"))?;
    Ok((name.trim().to_string(), size))
}

/// A theory file, parsed.
struct Theory {
    path: PathBuf,
    decls: Vec<Decl>,
    sig: Signature,
}

impl Theory {
    fn load(path: &Path) -> Result<Theory> {
        let src = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let decls = parse_file(&src).map_err(|e| anyhow!("{}: {e}", path.display()))?;
        let sig = Signature::from_decls(&decls);
        Ok(Theory { path: path.to_path_buf(), decls, sig })
    }

    fn goals(&self) -> Vec<Goal> {
        let mut out = Vec::new();
        for d in &self.decls {
            match d {
                Decl::Def { name, ty, level, term, pos } => out.push(Goal {
                    label: name.clone(),
                    line: pos.line,
                    raw: ty.clone().map(|ty| RawJudgment { stack: Stack::empty(), term: term.clone(), ty, level: *level }),
                }),
                Decl::Judge { judgment, pos } => {
                    out.push(Goal { label: format!("line {}", pos.line), line: pos.line, raw: Some(judgment.clone()) })
                }
                _ => {}
            }
        }
        out
    }

    fn equations(&self) -> Vec<Equation> {
        self.decls
            .iter()
            .filter_map(|d| match d {
                Decl::Eq { stack, lhs, rhs, ty, level, pos } => Some(Equation {
                    line: pos.line,
                    stack: stack.clone(),
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                    ty: ty.clone(),
                    level: *level,
                }),
                _ => None,
            })
            .collect()
    }

    fn model_config(&self) -> Option<&ModelConfig> {
        self.decls.iter().rev().find_map(|d| match d {
            Decl::Model { config, .. } => Some(config),
            _ => None,
        })
    }

    fn where_(&self, line: usize) -> String {
        format!("{}:{line}", self.path.display())
    }

    /// Levels `raw`, from its stated level or by inference against the signature.
    fn level(&self, raw: &RawJudgment, mode: Mode) -> Result<Judgment> {
        let j = raw.unleveled();
        match raw.level {
            Some(l) => attach_levels(&j, l).map_err(|e| anyhow!(e)),
            None => infer_levels(&j, &self.sig, mode, None).map_err(Into::into),
        }
    }

    fn derive(&self, raw: &RawJudgment, mode: Mode) -> Result<Derivation> {
        let j = self.level(raw, mode)?;
        Ok(check(mode, &j)?)
    }
}

struct Goal {
    label: String,
    line: usize,
    /// `None` for a definition without a type.
    raw: Option<RawJudgment>,
}

impl Goal {
    fn judgment(&self) -> Result<&RawJudgment> {
        self.raw.as_ref().ok_or_else(|| anyhow!("`{}` has no type to check against", self.label))
    }
}

struct Equation {
    line: usize,
    stack: Stack,
    lhs: Term,
    rhs: Term,
    ty: Option<Type>,
    level: Option<u32>,
}

impl Equation {
    fn sides(&self) -> Option<(RawJudgment, RawJudgment)> {
        let ty = self.ty.clone()?;
        let side = |term: &Term| RawJudgment { stack: self.stack.clone(), term: term.clone(), ty: ty.clone(), level: self.level };
        Some((side(&self.lhs), side(&self.rhs)))
    }

    /// Both sides leveled alike: the left side fixes the level of the right.
    fn derive(&self, theory: &Theory) -> Result<Option<(Derivation, Derivation)>> {
        let Some((lhs, mut rhs)) = self.sides() else { return Ok(None) };
        let left = theory.derive(&lhs, Mode::Fitch).context("left side")?;
        rhs.level = left.conclusion.level.map(|l| l.0);
        let right = theory.derive(&rhs, Mode::Fitch).context("right side")?;
        Ok(Some((left, right)))
    }

    fn describe(&self) -> String {
        format!("{} = {}", self.lhs, self.rhs)
    }
}

/// Counts failures and reports them on standard error.
#[derive(Default)]
struct Tally {
    failed: usize,
}

impl Tally {
    fn fail(&mut self, at: &str, what: impl std::fmt::Display) {
        self.failed += 1;
        eprintln!("{at}: {what:#}");
    }

    fn exit(&self) -> ExitCode {
        if self.failed == 0 {
            ExitCode::SUCCESS
        } else {
            eprintln!("{} failed", self.failed);
            ExitCode::FAILURE
        }
    }
}

fn run_check(file: &Path, mode: Mode, as_json: bool) -> Result<ExitCode> {
    let theory = Theory::load(file)?;
    let mut tally = Tally::default();
    let mut trees = Vec::new();
    for goal in theory.goals() {
        match goal.judgment().and_then(|raw| theory.derive(raw, mode)) {
            Ok(d) if as_json => trees.push(json!({ "name": goal.label, "derivation": d.to_json() })),
            Ok(d) => println!("ok {}: {}", goal.label, d.conclusion),
            Err(e) => tally.fail(&theory.where_(goal.line), format!("{}: {e:#}", goal.label)),
        }
    }
    if as_json {
        println!("{}", serde_json::to_string_pretty(&trees)?);
    }
    Ok(tally.exit())
}

fn frame_levels(j: &Judgment) -> String {
    match j.top_level() {
        Some(top) => (0..j.stack.height() as u32).map(|i| (top.0 - i).to_string()).collect::<Vec<_>>().join(", "),
        None => "unleveled".into(),
    }
}

fn run_levels(file: &Path) -> Result<ExitCode> {
    let theory = Theory::load(file)?;
    let mut tally = Tally::default();
    let mut report = |label: String, line: usize, raw: Result<RawJudgment>| {
        let leveled = raw.and_then(|raw| {
            let j = raw.unleveled();
            Ok(infer_levels(&j, &theory.sig, Mode::Fitch, raw.level)?)
        });
        match leveled {
            Ok(j) => println!("{label}: {j}\n    frames at levels {}", frame_levels(&j)),
            Err(e) => tally.fail(&theory.where_(line), format!("{label}: {e:#}")),
        }
    };
    for goal in theory.goals() {
        let raw = goal.judgment().cloned();
        report(goal.label, goal.line, raw);
    }
    for eq in theory.equations() {
        if let Some((lhs, _)) = eq.sides() {
            report(format!("eq at line {}", eq.line), eq.line, Ok(lhs));
        }
    }
    Ok(tally.exit())
}

fn run_normalize(expr: &str, budget: usize) -> Result<ExitCode> {
    let term = parse_term(expr)?;
    println!("{}", normalize(&term, budget)?);
    Ok(ExitCode::SUCCESS)
}

fn run_eq(file: &Path) -> Result<ExitCode> {
    let theory = Theory::load(file)?;
    let mut tally = Tally::default();
    for eq in theory.equations() {
        let at = theory.where_(eq.line);
        let verdict = eq.derive(&theory).and_then(|sides| match sides {
            Some((left, right)) => Ok(equal_theory(&left.conclusion.term, &right.conclusion.term, &left.conclusion)?),
            None => Ok(alpha_eq(&normalize(&eq.lhs, DEFAULT_BUDGET)?, &normalize(&eq.rhs, DEFAULT_BUDGET)?)),
        });
        let mode = if eq.ty.is_some() { "" } else { " (untyped, by beta normal forms)" };
        match verdict {
            Ok(true) => println!("pass {at}: {}{mode}", eq.describe()),
            Ok(false) => tally.fail(&at, format!("not equal: {}{mode}", eq.describe())),
            Err(e) => tally.fail(&at, format!("{}: {e:#}", eq.describe())),
        }
    }
    Ok(tally.exit())
}

fn translate_one(theory: &Theory, raw: &RawJudgment, to: Target) -> Result<Judgment> {
    let d = theory.derive(raw, Mode::Fitch)?;
    let desugared = desugar_judgment(&d.conclusion);
    match to {
        Target::LambdaBox => Ok(desugared),
        Target::Gentzen => {
            let d = check(Mode::Fitch, &desugared)?;
            let (j, _) = to_gentzen(&d)?;
            check(Mode::Gentzen, &j).context("translated judgment does not check")?;
            Ok(j)
        }
    }
}

fn run_translate(file: &Path, to: Target) -> Result<ExitCode> {
    let theory = Theory::load(file)?;
    let mut tally = Tally::default();
    for goal in theory.goals() {
        match goal.judgment().and_then(|raw| translate_one(&theory, raw, to)) {
            Ok(j) => println!("{}: {j}", goal.label),
            Err(e) => tally.fail(&theory.where_(goal.line), format!("{}: {e:#}", goal.label)),
        }
    }
    Ok(tally.exit())
}

fn load_monoid(name: &str, base: &Path) -> Result<FinMonoid> {
    match name {
        "trivial" => Ok(FinMonoid::trivial()),
        "z2" => Ok(FinMonoid::z2()),
        path => {
            let path = base.join(path);
            let src = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            FinMonoid::parse(&src).with_context(|| format!("monoid table {}", path.display()))
        }
    }
}

struct ModelSetup {
    monoid: FinMonoid,
    depth: Option<u32>,
    valuation: Valuation,
}

impl ModelSetup {
    /// Flags win over the file's last `model` declaration. Bases without a
    /// size get two elements.
    fn new(theory: &Theory, monoid: Option<&str>, depth: Option<u32>, val: &[(String, u64)]) -> Result<ModelSetup> {
        let config = theory.model_config();
        let monoid = match (monoid, config.map(|c| &c.monoid)) {
            (Some(name), _) => load_monoid(name, Path::new("."))?,
            (None, Some(MonoidSpec::Z2)) => FinMonoid::z2(),
            (None, Some(MonoidSpec::Table(path))) => {
                load_monoid(path, theory.path.parent().unwrap_or(Path::new(".")))?
            }
            (None, _) => FinMonoid::trivial(),
        };
        let mut sizes: BTreeMap<String, u64> = theory.sig.names().map(|n| (n.to_string(), 2)).collect();
        if let Some(c) = config {
            sizes.extend(c.valuation.clone());
        }
        sizes.extend(val.iter().cloned());
        let valuation = sizes.iter().fold(Valuation::new(), |v, (name, size)| v.with(name, *size));
        Ok(ModelSetup { monoid, depth: depth.or(config.and_then(|c| c.depth)), valuation })
    }

    fn depth_for(&self, j: &Judgment) -> u32 {
        self.depth.unwrap_or_else(|| default_depth(j).unwrap_or(0))
    }

    fn build(&self, j: &Judgment) -> Result<lbox::semantics::Model> {
        Ok(build_model(&self.monoid, self.depth_for(j), self.valuation.clone())?)
    }
}

fn run_model(file: &Path, monoid: Option<&str>, depth: Option<u32>, val: &[(String, u64)], csv: bool) -> Result<ExitCode> {
    let theory = Theory::load(file)?;
    let setup = ModelSetup::new(&theory, monoid, depth, val)?;
    let mut tally = Tally::default();
    for goal in theory.goals() {
        let den = goal.judgment().and_then(|raw| {
            let d = theory.derive(raw, Mode::Fitch)?;
            Ok(interp_contextual(&setup.build(&d.conclusion)?, &d)?)
        });
        match den {
            Ok(den) => {
                println!("{}: {} entries, {} -> {}", goal.label, den.table().len(), den.morphism.dom(), den.target);
                if csv {
                    print!("{}", den.to_csv()?);
                }
            }
            Err(e) => tally.fail(&theory.where_(goal.line), format!("{}: {e:#}", goal.label)),
        }
    }
    for eq in theory.equations() {
        let at = theory.where_(eq.line);
        let sound = eq.derive(&theory).and_then(|sides| match sides {
            Some((left, right)) => Ok(Some(check_soundness(&setup.build(&left.conclusion)?, &left, &right)?)),
            None => Ok(None),
        });
        match sound {
            Ok(Some(s)) if s.equal => println!("sound {at}: {}", eq.describe()),
            Ok(Some(s)) => {
                let w = s.witness.expect("unequal tables have a witness");
                tally.fail(&at, format!("{} differs at {}: {} vs {}", eq.describe(), w.input, w.left, w.right))
            }
            Ok(None) => eprintln!("{at}: skipped {}: no type given", eq.describe()),
            Err(e) => tally.fail(&at, format!("{}: {e:#}", eq.describe())),
        }
    }
    Ok(tally.exit())
}

fn run_laws(monoid: &str, max_size: u64, verbose: bool) -> Result<ExitCode> {
    let m = load_monoid(monoid, Path::new("."))?;
    m.check_laws()?;
    let t = power_comonad(&m)?;
    let objects: Vec<Shape> = (1..=max_size).map(|k| Shape::atom("X", k)).collect();
    let budget = Budget::default();
    let reports: Vec<(&str, LawReport)> = vec![
        ("comonad", check_comonad_axioms(&t, &objects, &budget)),
        ("co-Kleisli closed structure", check_cokleisli_ccc(&t, &objects, &budget)),
        ("lifted comonad", check_comonad_axioms(&lift_comonad(&t), &objects, &budget)),
        ("lift against composite", compare_lift_with_composite(&t, &objects, &budget)),
    ];
    let mut tally = Tally::default();
    for (name, report) in &reports {
        if verbose {
            print!("{report}");
        }
        let sampled = if report.exhaustive() { "" } else { ", some sampled" };
        println!("{name}: {} checks{sampled}", report.checks.len());
        for f in report.failures() {
            tally.fail(name, format!("{} at {}: {:?}", f.law, f.at, f.outcome));
        }
    }
    let normal = comparison_is_normal(&normal_underlying_functor(&t), &objects)?;
    if normal.normal {
        println!("underlying functor: normal");
    } else {
        tally.fail("underlying functor", "comparison is not a bijection");
    }
    if tally.failed == 0 {
        println!("all laws hold for objects of size 1..{max_size}");
    }
    Ok(tally.exit())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check { file, mode, json } => run_check(file, *mode, *json),
        Command::Levels { file } => run_levels(file),
        Command::Normalize { expr, budget } => run_normalize(expr, *budget),
        Command::Eq { file } => run_eq(file),
        Command::Translate { file, to } => run_translate(file, *to),
        Command::Model { file, monoid, depth, val, csv } => run_model(file, monoid.as_deref(), *depth, val, *csv),
        Command::Laws { monoid, max_size, verbose } => run_laws(monoid, *max_size, *verbose),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_parse() {
        assert_eq!(parse_size("A=2"), Ok(("A".into(), 2)));
        assert!(parse_size("A").is_err());
        assert!(parse_size("A=x").is_err());
    }

    #[test]
    fn command_line_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
