//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lbox::checker::{attach_levels, check, erase_levels, infer_levels, structural_inhabitants, Derivation, Mode, Rule};
use lbox::corpus::{beta_eta_pairs, generate, CorpusConfig, EqPair, Sample};
use lbox::fincat::{
    check_cokleisli_ccc, check_comonad_axioms, check_ff_equivalence, comparison_is_normal, compare_lift_with_composite,
    identity_functor, lift_comonad, normal_underlying_functor, power_comonad, power_endofunctor, Budget, CoKleisli,
    FinError, FinMonoid, FinSet, Functor, LawReport, Shape,
};
use lbox::kernel::{alpha_eq, Context, Judgment, Stack, Type};
use lbox::rewrite::{equal_theory, explore, redexes, step, DEFAULT_BUDGET};
use lbox::semantics::{build_model, check_soundness, interp_contextual, Model, SemanticsError, Valuation};
use lbox::syntax::{parse_judgment, parse_term, Signature};
use lbox::translate::{desugar_judgment, to_gentzen, TranslateError};

type Outcome = Result<String, String>;

const SEED: u64 = 0x1b0c;

fn derive(src: &str) -> Result<Derivation, String> {
    let raw = parse_judgment(src).map_err(|e| e.to_string())?;
    let j = attach_levels(&raw.unleveled(), raw.level.unwrap_or(0))?;
    check(Mode::Fitch, &j).map_err(|e| e.to_string())
}

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let took = start.elapsed();
    if took > limit {
        Err(format!("{detail}; took {took:.1?}, limit {limit:?}"))
    } else {
        Ok(detail)
    }
}

fn axiom_k() -> Outcome {
    let start = Instant::now();
    let k = ". |- \\x. \\y. quo ((unq x) (unq y)) : [](A -> B) -> []A -> []B @ 1";
    let d = derive(k)?;
    if d.conclusion.level.map(|l| l.0) != Some(1) {
        return Err("axiom K checked at the wrong level".into());
    }
    let mutants = [
        ". |- \\x. \\y. quo ((unq x) y) : [](A -> B) -> []A -> []B @ 1",
        ". |- \\x. \\y. quo (x (unq y)) : [](A -> B) -> []A -> []B @ 1",
        ". |- \\x. \\y. quo ((unq x) (unq y)) : [](A -> B) -> []A -> []B @ 0",
        ". |- \\x. \\y. ((unq x) (unq y)) : [](A -> B) -> []A -> []B @ 1",
    ];
    for m in mutants {
        if derive(m).is_ok() {
            return Err(format!("mutant accepted: {m}"));
        }
    }
    // the same term with its types one level too high
    let a2 = |n: &str| Type::base(n, 2);
    let shifted = Type::arrows(
        &[Type::boxed(Type::arrow(a2("A"), a2("B"))), Type::boxed(a2("A"))],
        Type::boxed(a2("B")),
    );
    let j = Judgment::new(Stack::single(Context::empty()), 1, d.conclusion.term.clone(), shifted);
    if check(Mode::Fitch, &j).is_ok() {
        return Err("axiom K accepted with level-2 components at level 1".into());
    }
    within(Duration::from_secs(1), start, format!("checks at level 1; {} mutants and a level swap rejected", mutants.len()))
}

fn substitution() -> Outcome {
    let m = parse_term("(\\x. quo (\\x. x (unq x))) y").map_err(|e| e.to_string())?;
    let sites = redexes(&m);
    let root = sites.iter().find(|s| s.path.is_empty()).ok_or("no root redex")?;
    let reduct = step(&m, root).map_err(|e| e.to_string())?;
    let expected = parse_term("quo (\\x. x (unq y))").map_err(|e| e.to_string())?;
    if alpha_eq(&reduct, &expected) {
        Ok(format!("{m} ~> {reduct}"))
    } else {
        Err(format!("{m} ~> {reduct}, expected {expected}"))
    }
}

fn subject_reduction(samples: &[Sample]) -> Outcome {
    let start = Instant::now();
    let mut steps = 0usize;
    for s in samples {
        let j = &s.judgment;
        for site in redexes(&j.term) {
            let r = step(&j.term, &site).map_err(|e| format!("{}: {e}", j.term))?;
            let jr = Judgment { term: r.clone(), ..j.clone() };
            check(Mode::Fitch, &jr).map_err(|e| format!("{} ~> {r} fails to check: {e}", j.term))?;
            steps += 1;
        }
    }
    within(Duration::from_secs(60), start, format!("{} terms, {steps} one-step reducts re-check", samples.len()))
}

fn confluence(samples: &[Sample]) -> Outcome {
    let start = Instant::now();
    let (mut visited, mut most) = (0usize, 0usize);
    for s in samples {
        let e = explore(&s.judgment.term, DEFAULT_BUDGET).map_err(|e| format!("{}: {e}", s.judgment.term))?;
        if e.normal_forms.len() != 1 {
            return Err(format!("{} has {} normal forms", s.judgment.term, e.normal_forms.len()));
        }
        visited += e.visited;
        most = most.max(e.steps);
    }
    within(
        Duration::from_secs(300),
        start,
        format!("{} terms, {visited} reducts visited, at most {most} steps per term", samples.len()),
    )
}

fn labeling(samples: &[Sample]) -> Outcome {
    let sig = Signature::new().with("A", &[0, 1, 2]).with("B", &[0, 1, 2]);
    for s in samples {
        let erased = erase_levels(&s.judgment);
        let inferred = infer_levels(&erased, &sig, Mode::Fitch, None).map_err(|e| format!("{}: {e}", s.judgment.term))?;
        if erase_levels(&inferred) != erased {
            return Err(format!("{} re-erases differently", s.judgment.term));
        }
    }
    Ok(format!("{} judgments", samples.len()))
}

fn structural() -> Outcome {
    let a = Type::ubase("A");
    let b = Type::ubase("B");
    let mut checked = 0;
    for n in 0..=2 {
        let gamma: Vec<Type> = [a.clone(), b.clone()].into_iter().cycle().take(n).collect();
        let rest = vec![b.clone()];
        let inhabitants = structural_inhabitants(&gamma, &a, &b, &rest, &a, 0).map_err(|e| e.to_string())?;
        if inhabitants.len() != 4 {
            return Err(format!("{} inhabitants for |G| = {n}", inhabitants.len()));
        }
        for i in inhabitants {
            let j = Judgment::new(Stack::single(Context::empty()), 1, i.term.clone(), i.ty.clone());
            check(Mode::Fitch, &j).map_err(|e| format!("{}: {} : {}: {e}", i.rule, i.term, i.ty))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} inhabitants for |G| = 0, 1, 2"))
}

fn report(name: &str, r: LawReport, failures: &mut Vec<String>, sampled: &mut usize) -> usize {
    if !r.exhaustive() {
        *sampled += 1;
    }
    failures.extend(r.failures().iter().map(|f| format!("{name}: {f:?}")));
    r.checks.len()
}

fn categorical_laws() -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    let objects: Vec<Shape> = (1..=3).map(|k| Shape::atom("X", k)).collect();
    let (mut failures, mut sampled, mut laws) = (Vec::new(), 0usize, 0usize);
    for m in [FinMonoid::trivial(), FinMonoid::z2()] {
        let t = power_comonad(&m).map_err(|e| e.to_string())?;
        laws += report("comonad", check_comonad_axioms(&t, &objects, &budget), &mut failures, &mut sampled);
        laws += report("co-Kleisli", check_cokleisli_ccc(&t, &objects, &budget), &mut failures, &mut sampled);
        laws += report("lift", check_comonad_axioms(&lift_comonad(&t), &objects, &budget), &mut failures, &mut sampled);
        laws += report("lift vs composite", compare_lift_with_composite(&t, &objects, &budget), &mut failures, &mut sampled);
    }
    if let Some(f) = failures.first() {
        return Err(format!("{} failures, first: {f}", failures.len()));
    }
    within(
        Duration::from_secs(120),
        start,
        format!("{laws} law checks over sizes 1..3; {sampled} reports used sampled points or morphisms"),
    )
}

fn normality() -> Outcome {
    let objects: Vec<Shape> = (1..=2).map(|k| Shape::atom("X", k)).collect();
    let mut functors: Vec<(Functor, Option<bool>)> = vec![(identity_functor(std::rc::Rc::new(FinSet)), Some(true))];
    for m in [FinMonoid::trivial(), FinMonoid::z2()] {
        let t = power_comonad(&m).map_err(|e| e.to_string())?;
        functors.push((normal_underlying_functor(&t), Some(true)));
        functors.push((identity_functor(std::rc::Rc::new(CoKleisli::new(t))), Some(true)));
        let model = build_model(&m, 2, Valuation::new()).map_err(|e| e.to_string())?;
        for l in 0..2 {
            functors.push((model.box_functor(l).map_err(|e| e.to_string())?.clone(), Some(true)));
        }
    }
    functors.push((power_endofunctor(&FinMonoid::z2()).map_err(|e| e.to_string())?, Some(false)));
    let (mut disagreements, mut ff) = (Vec::new(), 0usize);
    for (f, want) in &functors {
        let c = comparison_is_normal(f, &objects).map_err(|e| e.to_string())?;
        if want.is_some_and(|w| w != c.normal) {
            disagreements.push(format!("{}: normal = {}", f.name, c.normal));
        }
        match check_ff_equivalence(f, &objects) {
            Ok(r) if r.biconditional_holds() => ff += 1,
            Err(FinError::Untabulated(_)) => {}
            Ok(r) => disagreements.push(format!("{}: {r:?}", f.name)),
            Err(e) => disagreements.push(format!("{}: {e}", f.name)),
        }
    }
    if disagreements.is_empty() {
        Ok(format!(
            "{} functors normal as expected; full-faithfulness biconditional holds on the {ff} with tabulated targets",
            functors.len()
        ))
    } else {
        Err(disagreements.join("; "))
    }
}

fn models() -> Vec<Model> {
    let mut out = Vec::new();
    for m in [FinMonoid::trivial(), FinMonoid::z2()] {
        for depth in 0..=2 {
            for size in 1..=2 {
                out.push(build_model(&m, depth, Valuation::new().with("A", size).with("B", size)).expect("lawful monoid"));
            }
        }
    }
    out
}

fn fits(e: &SemanticsError) -> bool {
    !matches!(e, SemanticsError::Fin(FinError::TooLarge(_)) | SemanticsError::LevelExceedsDepth { .. })
}

fn soundness(pairs: &[EqPair]) -> Outcome {
    let start = Instant::now();
    let models = models();
    let (mut runs, mut too_large, mut unevaluated) = (0usize, 0usize, 0usize);
    for p in pairs {
        let (jl, jr) = p.sides();
        let dl = check(Mode::Fitch, &jl).map_err(|e| format!("{}: {e}", p.lhs))?;
        let dr = check(Mode::Fitch, &jr).map_err(|e| format!("{}: {e}", p.rhs))?;
        let top = p.judgment.top_level().map_or(0, |l| l.0);
        let mut ran = 0;
        for m in models.iter().filter(|m| m.depth() >= top) {
            match check_soundness(m, &dl, &dr) {
                Ok(s) if s.equal => ran += 1,
                Ok(s) => return Err(format!("{} and {} differ in {m:?} at {:?}", p.lhs, p.rhs, s.witness)),
                Err(e) if !fits(&e) => too_large += 1,
                Err(e) => return Err(format!("{}: {e}", p.lhs)),
            }
        }
        runs += ran;
        if ran == 0 {
            unevaluated += 1;
        }
    }
    if unevaluated > 0 {
        return Err(format!("{unevaluated} pairs fit no model"));
    }
    within(
        Duration::from_secs(300),
        start,
        format!("{} pairs, {runs} model comparisons equal, {too_large} skipped as too large", pairs.len()),
    )
}

fn transparency(samples: &[Sample]) -> Outcome {
    let models: Vec<Model> = models().into_iter().filter(|m| m.monoid().size() == 2 || m.depth() == 2).collect();
    let (mut derivations, mut compared, mut too_large) = (0usize, 0usize, 0usize);
    for s in samples {
        let mut any = false;
        for node in s.derivation.nodes().into_iter().filter(|n| n.rule == Rule::CQuo) {
            let top = node.conclusion.top_level().map_or(0, |l| l.0);
            for m in models.iter().filter(|m| m.depth() >= top) {
                match (interp_contextual(m, node), interp_contextual(m, &node.premises[0])) {
                    (Ok(a), Ok(b)) if a.table() == b.table() => {
                        compared += 1;
                        any = true;
                    }
                    (Ok(_), Ok(_)) => return Err(format!("`{}` changes its table in {m:?}", node.conclusion.term)),
                    (Err(e), _) | (_, Err(e)) if !fits(&e) => too_large += 1,
                    (Err(e), _) | (_, Err(e)) => return Err(format!("{}: {e}", node.conclusion.term)),
                }
            }
        }
        derivations += usize::from(any);
    }
    if derivations < 100 {
        return Err(format!("only {derivations} derivations with a comparable contextual quotation"));
    }
    Ok(format!("{derivations} derivations, {compared} byte-identical tables, {too_large} skipped as too large"))
}

fn translations(samples: &[Sample], pairs: &[EqPair]) -> Outcome {
    let mut kept = 0usize;
    for p in pairs {
        let j = desugar_judgment(&p.judgment);
        let (l, r) = (desugar_judgment(&Judgment { term: p.lhs.clone(), ..p.judgment.clone() }), desugar_judgment(&Judgment { term: p.rhs.clone(), ..p.judgment.clone() }));
        for side in [&l, &r] {
            check(Mode::Fitch, side).map_err(|e| format!("desugared `{}` fails to check: {e}", side.term))?;
        }
        match equal_theory(&l.term, &r.term, &j) {
            Ok(true) => kept += 1,
            Ok(false) => return Err(format!("desugaring separates {} and {}", p.lhs, p.rhs)),
            Err(e) => return Err(format!("{}: {e}", p.lhs)),
        }
    }
    let (mut translated, mut outer) = (0usize, 0usize);
    for s in samples {
        let j = desugar_judgment(&s.judgment);
        let d = check(Mode::Fitch, &j).map_err(|e| e.to_string())?;
        match to_gentzen(&d) {
            Ok((g, _)) => {
                check(Mode::Gentzen, &g).map_err(|e| format!("Gentzen image of `{}` fails: {e}", j.term))?;
                let height = j.stack.height();
                for (i, frame) in j.stack.frames().iter().enumerate() {
                    for (x, t) in &frame.0 {
                        let want = (0..height - 1 - i).fold(t.erase(), |acc, _| Type::boxed(acc));
                        if g.stack.top().lookup(x) != Some(&want) {
                            return Err(format!("`{x}` is not boxed {} times in `{g:?}`", height - 1 - i));
                        }
                    }
                }
                translated += 1;
            }
            Err(TranslateError::OuterFrameAccess(_)) => outer += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    if kept < 200 || translated < 200 {
        return Err(format!("{kept} desugared pairs, {translated} Gentzen translations"));
    }
    Ok(format!(
        "{kept} pairs stay equal after desugaring; {translated} derivations check in Gentzen mode, {outer} unquote an outer frame at the root"
    ))
}

fn main() -> ExitCode {
    let corpus = generate(SEED, 1000, &CorpusConfig::default());
    let samples = &corpus.samples;
    let pairs = beta_eta_pairs(samples, SEED);
    let mut failed = 0;
    let mut line = |n: u32, name: &str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let r = f();
        let took = start.elapsed();
        let (tag, detail) = match r {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n:>2} {tag} {name}: {detail} [{took:.2?}]");
    };
    if !corpus.rejected.is_empty() {
        println!("corpus: {} generated judgments failed to check", corpus.rejected.len());
    }
    line(1, "axiom K", &axiom_k);
    line(2, "leveled substitution", &substitution);
    line(3, "subject reduction", &|| subject_reduction(samples));
    line(4, "confluence and termination", &|| confluence(samples));
    line(5, "labeling round trip", &|| labeling(samples));
    line(6, "structural rules", &structural);
    line(7, "categorical laws", &categorical_laws);
    line(8, "normality", &normality);
    line(9, "soundness", &|| soundness(&pairs));
    line(10, "contextual transparency", &|| transparency(samples));
    line(11, "translations", &|| translations(samples, &pairs));
    if failed == 0 && corpus.rejected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
