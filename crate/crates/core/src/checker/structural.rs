//! Admissible structural rules as derivation transformers, denecessitation and
//! the internal proofs of the structural rules for contextual boxes.
//!
//! Transformers walk the derivation top-down tracking where the target frame
//! sits in each node's stack, and rebuild each conclusion term bottom-up from
//! the transformed premises so parent and child agree on every binder name.

use super::{check, CheckError, Derivation, Mode, Rule};
use crate::binding::{free_at, Fresh};
use crate::kernel::{Context, Judgment, Level, Stack, Term, Type};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StructuralError {
    #[error("frame {index} is out of range for a stack of height {height}")]
    FrameIndexOutOfRange { index: usize, height: usize },
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("`{0}` is already bound in the target frame")]
    NameClash(String),
    #[error("variable `{0}` is not in the target frame")]
    MissingVariable(String),
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error("rule {0} is outside the fitch system")]
    UnsupportedRule(Rule),
    #[error("expected a closed derivation of a plain box, got `{0}`")]
    NotClosedBox(String),
}

/// Admissible rules. `frame` counts from the rightmost frame (0 = rightmost).
#[derive(Clone, Debug)]
pub enum Structural {
    /// Appends `name : ty` to the frame.
    Weaken { frame: usize, name: String, ty: Type },
    /// Swaps the hypotheses at positions `pos` and `pos + 1`.
    Exchange { frame: usize, pos: usize },
    /// Identifies `drop` with `keep`; both must have the same type.
    Contract { frame: usize, keep: String, drop: String },
    /// Rule S: replaces hypothesis `name` by the rightmost frame of `with`,
    /// whose outer frames must agree with those above `frame`.
    Subst { frame: usize, name: String, with: Box<Derivation> },
}

/// One step of the transformation, as seen at a node where the target frame is rightmost-relative `k`.
enum Op<'a> {
    Weaken { pos: usize, name: &'a str, ty: &'a Type },
    Exchange { pos: usize },
    Contract { keep: &'a str, drop: &'a str },
    Rename { from: &'a str, to: &'a str },
    Subst { name: &'a str, with: &'a Derivation },
}

impl Op<'_> {
    /// Names the transformed frame gains.
    fn introduced(&self) -> Vec<String> {
        match self {
            Op::Weaken { name, .. } => vec![name.to_string()],
            Op::Rename { to, .. } => vec![to.to_string()],
            Op::Subst { with, .. } => with.conclusion.stack.top().names().map(String::from).collect(),
            Op::Exchange { .. } | Op::Contract { .. } => vec![],
        }
    }

    fn frame(&self, ctx: &Context) -> Result<Context, StructuralError> {
        let mut out = ctx.0.clone();
        match self {
            Op::Weaken { pos, name, ty } => out.insert(*pos, (name.to_string(), (*ty).clone())),
            Op::Exchange { pos } => out.swap(*pos, pos + 1),
            Op::Contract { drop, .. } => {
                let i = ctx.position(drop).ok_or_else(|| StructuralError::MissingVariable(drop.to_string()))?;
                out.remove(i);
            }
            Op::Rename { from, to } => {
                let i = ctx.position(from).ok_or_else(|| StructuralError::MissingVariable(from.to_string()))?;
                out[i].0 = to.to_string();
            }
            Op::Subst { name, with } => {
                let i = ctx.position(name).ok_or_else(|| StructuralError::MissingVariable(name.to_string()))?;
                out.splice(i..=i, with.conclusion.stack.top().0.iter().cloned());
            }
        }
        Ok(Context(out))
    }
}

fn fresh_for(d: &Derivation, extra: &[String]) -> Fresh {
    let mut fresh = Fresh::new();
    for n in d.nodes() {
        fresh.avoid_term(&n.conclusion.term);
        for f in n.conclusion.stack.frames() {
            for x in f.names() {
                fresh.avoid(x);
            }
        }
    }
    for x in extra {
        fresh.avoid(x);
    }
    fresh
}

fn transform(d: &Derivation, k: Option<usize>, op: &Op, fresh: &mut Fresh) -> Result<Derivation, StructuralError> {
    let Some(k) = k else { return Ok(d.clone()) };
    let j = &d.conclusion;
    if let Term::Var(x) = &j.term {
        if k == 0 {
            match op {
                Op::Subst { name, with } if x == name => {
                    let top = op.frame(j.stack.top())?;
                    return Ok(replace_top(with, &top));
                }
                _ => {}
            }
        }
    }
    let mut stack_frames = j.stack.frames().to_vec();
    let idx = stack_frames.len() - 1 - k;
    stack_frames[idx] = op.frame(&stack_frames[idx])?;
    let stack = Stack::new(stack_frames).expect("nonempty");

    let introduced = op.introduced();
    let premises: Vec<Derivation> = match d.rule {
        Rule::Var | Rule::Star => vec![],
        Rule::Abs => {
            let mut p = d.premises[0].clone();
            let binder = last_name(p.conclusion.stack.top());
            if k == 0 && introduced.contains(&binder) {
                let to = fresh.fresh(&binder);
                p = transform(&p, Some(0), &Op::Rename { from: &binder, to: &to }, fresh)?;
            }
            vec![transform(&p, Some(k), op, fresh)?]
        }
        Rule::App | Rule::Pair | Rule::Proj1 | Rule::Proj2 => {
            d.premises.iter().map(|p| transform(p, Some(k), op, fresh)).collect::<Result<_, _>>()?
        }
        Rule::Quo | Rule::CQuo => vec![transform(&d.premises[0], Some(k + 1), op, fresh)?],
        Rule::Unq | Rule::CUnq => {
            let mut out = vec![transform(&d.premises[0], k.checked_sub(1), op, fresh)?];
            for p in &d.premises[1..] {
                out.push(transform(p, Some(k), op, fresh)?);
            }
            out
        }
        other => return Err(StructuralError::UnsupportedRule(other)),
    };
    let term = rebuild(&j.term, d.rule, &premises, k, op);
    Ok(Derivation { rule: d.rule, conclusion: Judgment { stack, level: j.level, term, ty: j.ty.clone() }, premises })
}

fn last_name(ctx: &Context) -> String {
    ctx.0.last().map(|(x, _)| x.clone()).expect("abstraction premise extends its frame")
}

/// Conclusion term of a node from its transformed premises.
fn rebuild(term: &Term, rule: Rule, premises: &[Derivation], k: usize, op: &Op) -> Term {
    let t = |i: usize| premises[i].conclusion.term.clone();
    match (rule, term) {
        (Rule::Var, Term::Var(x)) if k == 0 => match op {
            Op::Contract { keep, drop } if x == drop => Term::var(keep),
            Op::Rename { from, to } if x == from => Term::var(to),
            _ => term.clone(),
        },
        (Rule::Var, _) | (Rule::Star, _) => term.clone(),
        (Rule::Abs, Term::Lam(_, ann, _)) => {
            Term::Lam(last_name(premises[0].conclusion.stack.top()), ann.clone(), Box::new(t(0)))
        }
        (Rule::App, _) => Term::app(t(0), t(1)),
        (Rule::Pair, _) => Term::pair(t(0), t(1)),
        (Rule::Proj1, _) => Term::proj1(t(0)),
        (Rule::Proj2, _) => Term::proj2(t(0)),
        (Rule::Quo | Rule::CQuo, Term::Quo(bs, _)) => {
            let names = premises[0].conclusion.stack.top().names();
            Term::Quo(names.zip(bs).map(|(x, (_, a))| (x.to_string(), a.clone())).collect(), Box::new(t(0)))
        }
        (Rule::Unq | Rule::CUnq, _) => Term::Unq(Box::new(t(0)), (1..premises.len()).map(t).collect()),
        _ => unreachable!("rule {rule} does not conclude `{term}`"),
    }
}

/// The derivation `d` with its rightmost frame replaced by the larger `top`.
fn replace_top(d: &Derivation, top: &Context) -> Derivation {
    let j = &d.conclusion;
    let mut frames = j.stack.frames().to_vec();
    *frames.last_mut().expect("nonempty") = top.clone();
    let premises = match d.rule {
        Rule::Abs => {
            let p = &d.premises[0];
            let mut ext = top.clone();
            let (x, ty) = p.conclusion.stack.top().0.last().cloned().expect("extended");
            ext.push(&x, ty);
            vec![replace_top(p, &ext)]
        }
        Rule::Quo | Rule::CQuo => vec![replace_outer(&d.premises[0], 1, top)],
        Rule::Unq | Rule::CUnq => {
            let mut out = vec![d.premises[0].clone()];
            out.extend(d.premises[1..].iter().map(|p| replace_top(p, top)));
            out
        }
        _ => d.premises.iter().map(|p| replace_top(p, top)).collect(),
    };
    Derivation {
        rule: d.rule,
        conclusion: Judgment { stack: Stack::new(frames).expect("nonempty"), level: j.level, term: j.term.clone(), ty: j.ty.clone() },
        premises,
    }
}

/// Replaces the frame at distance `k` by `ctx` throughout `d`.
fn replace_outer(d: &Derivation, k: usize, ctx: &Context) -> Derivation {
    if k == 0 {
        return replace_top(d, ctx);
    }
    let j = &d.conclusion;
    let mut frames = j.stack.frames().to_vec();
    let idx = frames.len() - 1 - k;
    frames[idx] = ctx.clone();
    let premises = d
        .premises
        .iter()
        .enumerate()
        .map(|(i, p)| match d.rule {
            Rule::Quo | Rule::CQuo => replace_outer(p, k + 1, ctx),
            Rule::Unq | Rule::CUnq if i == 0 => replace_outer(p, k - 1, ctx),
            _ => replace_outer(p, k, ctx),
        })
        .collect();
    Derivation {
        rule: d.rule,
        conclusion: Judgment { stack: Stack::new(frames).expect("nonempty"), level: j.level, term: j.term.clone(), ty: j.ty.clone() },
        premises,
    }
}

/// Applies an admissible rule to a fitch derivation by induction on it.
pub fn derive_structural(rule: &Structural, d: &Derivation) -> Result<Derivation, StructuralError> {
    let stack = &d.conclusion.stack;
    let frame_at = |k: usize| {
        stack.frame(k).ok_or(StructuralError::FrameIndexOutOfRange { index: k, height: stack.height() })
    };
    match rule {
        Structural::Weaken { frame, name, ty } => {
            let ctx = frame_at(*frame)?;
            if ctx.contains(name) {
                return Err(StructuralError::NameClash(name.clone()));
            }
            if let Some(l) = d.conclusion.level {
                let want = l.offset(*frame as u32);
                if ty.check_level() != Ok(want) {
                    return Err(StructuralError::LevelMismatch(format!("`{name} : {ty}` must live at level {want}")));
                }
            }
            let op = Op::Weaken { pos: ctx.len(), name, ty };
            let mut fresh = fresh_for(d, std::slice::from_ref(name));
            transform(d, Some(*frame), &op, &mut fresh)
        }
        Structural::Exchange { frame, pos } => {
            let ctx = frame_at(*frame)?;
            if pos + 1 >= ctx.len() {
                return Err(StructuralError::Invalid(format!("no hypotheses at positions {pos} and {}", pos + 1)));
            }
            let mut fresh = fresh_for(d, &[]);
            transform(d, Some(*frame), &Op::Exchange { pos: *pos }, &mut fresh)
        }
        Structural::Contract { frame, keep, drop } => {
            let ctx = frame_at(*frame)?;
            let (Some(a), Some(b)) = (ctx.lookup(keep), ctx.lookup(drop)) else {
                return Err(StructuralError::MissingVariable(if ctx.contains(keep) { drop.clone() } else { keep.clone() }));
            };
            if a != b || keep == drop {
                return Err(StructuralError::Invalid(format!("cannot identify `{keep}` with `{drop}`")));
            }
            let mut fresh = fresh_for(d, &[]);
            transform(d, Some(*frame), &Op::Contract { keep, drop }, &mut fresh)
        }
        Structural::Subst { frame, name, with } => {
            let ctx = frame_at(*frame)?;
            let ty = ctx.lookup(name).ok_or_else(|| StructuralError::MissingVariable(name.clone()))?;
            match (d.conclusion.level, with.conclusion.level) {
                (Some(l), Some(m)) if m != l.offset(*frame as u32) => {
                    return Err(StructuralError::LevelMismatch(format!(
                        "substituted derivation lives at level {m}, rule S requires {}",
                        l.offset(*frame as u32)
                    )))
                }
                (Some(_), None) | (None, Some(_)) => {
                    return Err(StructuralError::LevelMismatch("mixing leveled and unleveled derivations".into()))
                }
                _ => {}
            }
            if with.ty() != ty {
                return Err(StructuralError::Invalid(format!("`{name} : {ty}` replaced by a term of type `{}`", with.ty())));
            }
            let outer = &stack.frames()[..stack.height() - 1 - frame];
            let with_frames = with.conclusion.stack.frames();
            if outer != &with_frames[..with_frames.len() - 1] {
                return Err(StructuralError::Invalid("outer frames of the substituted derivation differ".into()));
            }
            let gamma3 = with.conclusion.stack.top();
            if let Some(clash) = gamma3.names().find(|x| *x != name && ctx.contains(x)) {
                return Err(StructuralError::NameClash(clash.to_string()));
            }
            let fv = free_at(&with.conclusion.term, 0).into_iter().collect::<Vec<_>>();
            let mut fresh = fresh_for(d, &fv);
            for x in gamma3.names() {
                fresh.avoid(x);
            }
            transform(d, Some(*frame), &Op::Subst { name, with }, &mut fresh)
        }
    }
}

/// From a closed derivation of a plain box at level `l + 1`, the derivation of
/// its unquotation at level `l`. The conclusion stack is padded to two empty
/// frames, which derive the same judgments as a single one.
pub fn denecessitate(d: &Derivation) -> Result<Derivation, StructuralError> {
    let j = &d.conclusion;
    let closed = j.stack.frames().iter().all(Context::is_empty);
    let body = match &j.ty {
        Type::CBox(h, b) if h.is_empty() && closed => (**b).clone(),
        _ => return Err(StructuralError::NotClosedBox(j.to_string())),
    };
    let level = match j.level {
        Some(l) => Some(l.down().ok_or_else(|| StructuralError::LevelMismatch("box at level 0".into()))?),
        None => None,
    };
    let premise = Derivation {
        rule: d.rule,
        conclusion: Judgment { stack: Stack::empty(), ..j.clone() },
        premises: d.premises.clone(),
    };
    let stack = Stack::new(vec![Context::empty(), Context::empty()]).expect("nonempty");
    let term = Term::unq(j.term.clone());
    Ok(Derivation { rule: Rule::Unq, conclusion: Judgment { stack, level, term, ty: body }, premises: vec![premise] })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inhabitant {
    pub rule: &'static str,
    pub term: Term,
    pub ty: Type,
}

/// Proof terms of weakening, contraction, exchange and cut for contextual
/// boxes over `gamma, b, b_prime, gamma_prime` and result `goal`. Component
/// types are placed at `level` and each term is checked at `level + 1`.
pub fn structural_inhabitants(
    gamma: &[Type],
    b: &Type,
    b_prime: &Type,
    gamma_prime: &[Type],
    goal: &Type,
    level: u32,
) -> Result<Vec<Inhabitant>, CheckError> {
    let at = |t: &Type| t.at_level(Level(level)).map_err(|e| CheckError::LevelMismatch(e.to_string()));
    let gamma: Vec<Type> = gamma.iter().map(at).collect::<Result<_, _>>()?;
    let gamma_prime: Vec<Type> = gamma_prime.iter().map(at).collect::<Result<_, _>>()?;
    let (b, b_prime, goal) = (at(b)?, at(b_prime)?, at(goal)?);

    let xs: Vec<String> = (1..=gamma.len()).map(|i| format!("x{i}")).collect();
    let zs: Vec<String> = (1..=gamma_prime.len()).map(|i| format!("z{i}")).collect();
    let vars = |names: &[String]| names.iter().map(|x| Term::var(x)).collect::<Vec<_>>();
    let binders = |names: &[&String], tys: &[&Type]| {
        names.iter().zip(tys).map(|(x, t)| (x.to_string(), Some((*t).clone()))).collect::<Vec<_>>()
    };
    let with = |extra: &[Type]| gamma.iter().chain(extra).cloned().collect::<Vec<_>>();
    let cbox = |hyps: Vec<Type>| Type::cbox(hyps, goal.clone());
    let y = "y".to_string();
    let y2 = "y'".to_string();

    let mut out = Vec::new();

    // [G]A -> [G,B]A
    let names: Vec<&String> = xs.iter().chain([&y]).collect();
    let tys: Vec<&Type> = gamma.iter().chain([&b]).collect();
    let term = Term::lam("m", Term::cquo(binders(&names, &tys), Term::cunq(Term::var("m"), vars(&xs))));
    out.push(Inhabitant { rule: "weakening", term, ty: Type::arrow(cbox(gamma.clone()), cbox(with(std::slice::from_ref(&b)))) });

    // [G,B,B]A -> [G,B]A
    let mut args = vars(&xs);
    args.extend([Term::var(&y), Term::var(&y)]);
    let term = Term::lam("m", Term::cquo(binders(&names, &tys), Term::cunq(Term::var("m"), args)));
    out.push(Inhabitant {
        rule: "contraction",
        term,
        ty: Type::arrow(cbox(with(&[b.clone(), b.clone()])), cbox(with(std::slice::from_ref(&b)))),
    });

    // [G,B,B',G']A -> [G,B',B,G']A
    let names: Vec<&String> = xs.iter().chain([&y2, &y]).chain(zs.iter()).collect();
    let tys: Vec<&Type> = gamma.iter().chain([&b_prime, &b]).chain(gamma_prime.iter()).collect();
    let mut args = vars(&xs);
    args.extend([Term::var(&y), Term::var(&y2)]);
    args.extend(vars(&zs));
    let term = Term::lam("m", Term::cquo(binders(&names, &tys), Term::cunq(Term::var("m"), args)));
    let mut from = with(&[b.clone(), b_prime.clone()]);
    from.extend(gamma_prime.iter().cloned());
    let mut to = with(&[b_prime.clone(), b.clone()]);
    to.extend(gamma_prime.iter().cloned());
    out.push(Inhabitant { rule: "exchange", term, ty: Type::arrow(cbox(from), cbox(to)) });

    // [G]B -> [G,B]A -> [G]A
    let names: Vec<&String> = xs.iter().collect();
    let tys: Vec<&Type> = gamma.iter().collect();
    let mut args = vars(&xs);
    args.push(Term::cunq(Term::var("n"), vars(&xs)));
    let term = Term::lam(
        "n",
        Term::lam("m", Term::cquo(binders(&names, &tys), Term::cunq(Term::var("m"), args))),
    );
    let ty = Type::arrow(Type::cbox(gamma.clone(), b.clone()), Type::arrow(cbox(with(std::slice::from_ref(&b))), cbox(gamma.clone())));
    out.push(Inhabitant { rule: "cut", term, ty });

    for inh in &out {
        check(Mode::Fitch, &Judgment::new(Stack::empty(), level + 1, inh.term.clone(), inh.ty.clone()))?;
    }
    Ok(out)
}
