//! Syntax-directed type checking for every supported calculus.
//!
//! Checking is bidirectional: an expected type flows into abstractions,
//! quotations and pairs, while variables, applications, projections and
//! unquotations synthesise. Judgments with `level == None` are checked in the
//! unleveled system, where no level constraint is enforced.

mod levels;
mod reconstruct;
mod structural;

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::binding::{rename, Fresh};
use crate::kernel::{well_formed, Context, Judgment, Level, Stack, Term, Type};

pub use levels::{attach_levels, erase_levels, infer_levels, level_offsets, LevelError};
pub use reconstruct::{reconstruct, ReconstructError};
pub use structural::{
    denecessitate, derive_structural, structural_inhabitants, Inhabitant, Structural, StructuralError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Fitch,
    Gentzen,
    Dual,
    Multi,
    Benton,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Fitch, Mode::Gentzen, Mode::Dual, Mode::Multi, Mode::Benton];

    fn allows_quotes(self) -> bool {
        matches!(self, Mode::Fitch | Mode::Benton)
    }

    fn allows_dual_box(self) -> bool {
        matches!(self, Mode::Dual | Mode::Multi | Mode::Benton)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fitch => "fitch",
            Mode::Gentzen => "gentzen",
            Mode::Dual => "dual",
            Mode::Multi => "multi",
            Mode::Benton => "benton",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| format!("unknown mode `{s}` (expected fitch, gentzen, dual, multi or benton)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Var,
    Abs,
    App,
    Pair,
    Proj1,
    Proj2,
    Star,
    Quo,
    Unq,
    CQuo,
    CUnq,
    GBoxRule,
    DBoxI,
    DBoxE,
    MBoxI,
    MBoxE,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Var => "Var",
            Rule::Abs => "Abs",
            Rule::App => "App",
            Rule::Pair => "Pair",
            Rule::Proj1 => "Proj1",
            Rule::Proj2 => "Proj2",
            Rule::Star => "Star",
            Rule::Quo => "Quo",
            Rule::Unq => "Unq",
            Rule::CQuo => "CQuo",
            Rule::CUnq => "CUnq",
            Rule::GBoxRule => "GBoxRule",
            Rule::DBoxI => "DBoxI",
            Rule::DBoxE => "DBoxE",
            Rule::MBoxI => "MBoxI",
            Rule::MBoxE => "MBoxE",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub conclusion: Judgment,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn ty(&self) -> &Type {
        &self.conclusion.ty
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    /// `{rule, conclusion, premises}` with the conclusion in concrete syntax.
    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule.name(),
            "conclusion": self.conclusion.to_string(),
            "premises": self.premises.iter().map(Derivation::to_json).collect::<Vec<_>>(),
        })
    }

    /// Every node in pre-order.
    pub fn nodes(&self) -> Vec<&Derivation> {
        let mut out = vec![self];
        for p in &self.premises {
            out.extend(p.nodes());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("variable `{0}` is not in the rightmost context")]
    VariableNotInScope(String),
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("stack underflow: {0}")]
    StackUnderflow(String),
    #[error("{construct} is not available in {mode} mode")]
    ModeViolation { mode: Mode, construct: String },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    /// A binder without annotation in a position where no type flows in.
    #[error("cannot determine the type of `{0}`; add an annotation")]
    Underdetermined(String),
}

/// Checks `j` in `mode` and returns its derivation.
pub fn check(mode: Mode, j: &Judgment) -> Result<Derivation, CheckError> {
    let j = if mode == Mode::Gentzen || j.level.is_none() { erase_judgment(j) } else { j.clone() };
    if let Some(l) = j.level {
        if !well_formed(&j) {
            return Err(CheckError::LevelMismatch(describe_ill_formed(&j, l)));
        }
    }
    match mode {
        Mode::Gentzen if j.stack.height() != 1 => {
            return Err(CheckError::ModeViolation { mode, construct: "a context stack".into() })
        }
        Mode::Dual if j.stack.height() != 2 => {
            return Err(CheckError::ModeViolation {
                mode,
                construct: format!("a stack of height {}", j.stack.height()),
            })
        }
        _ => {}
    }
    let cx = Checker { mode };
    let d = cx.infer(&j.stack, j.level, &j.term, Some(&j.ty))?;
    Ok(d)
}

/// Number of frames beyond the rightmost one that `t` reaches into.
pub fn outer_reach(t: &Term) -> usize {
    match t {
        Term::Quo(_, b) => outer_reach(b).saturating_sub(1),
        Term::Unq(b, args) => args.iter().map(outer_reach).fold(outer_reach(b) + 1, usize::max),
        Term::DBox(b) => outer_reach(b) + 1,
        Term::DLet(_, m, n) => outer_reach(m).max(outer_reach(n)).max(1),
        Term::GBox(_, args, _) => args.iter().map(outer_reach).max().unwrap_or(0),
        other => other.children().into_iter().map(outer_reach).max().unwrap_or(0),
    }
}

/// Prepends empty frames so that every unquotation in the term has a frame to
/// pop. Leading empty frames never change what is derivable.
pub fn pad(j: &Judgment) -> Judgment {
    let need = outer_reach(&j.term) + 1;
    let mut frames = j.stack.frames().to_vec();
    while frames.len() < need {
        frames.insert(0, Context::empty());
    }
    Judgment { stack: Stack::new(frames).expect("nonempty"), ..j.clone() }
}

fn erase_judgment(j: &Judgment) -> Judgment {
    Judgment::unleveled(j.stack.erase(), j.term.erase(), j.ty.erase())
}

fn describe_ill_formed(j: &Judgment, l: Level) -> String {
    match j.ty.check_level() {
        Err(e) => return e.to_string(),
        Ok(lt) if lt != l => return format!("type `{}` lives at level {lt}, not {l}", j.ty),
        _ => {}
    }
    for d in 0..j.stack.height() {
        let frame = j.stack.frame(d).expect("index within height");
        if frame.has_duplicates() {
            return format!("frame {d} binds a name twice");
        }
        let want = l.offset(d as u32);
        for (x, t) in &frame.0 {
            match t.check_level() {
                Ok(lt) if lt == want => {}
                Ok(lt) => return format!("`{x} : {t}` lives at level {lt}, frame {d} requires {want}"),
                Err(e) => return e.to_string(),
            }
        }
    }
    "ill-formed judgment".into()
}

struct Checker {
    mode: Mode,
}

fn node(rule: Rule, stack: &Stack, level: Option<Level>, term: &Term, ty: Type, premises: Vec<Derivation>) -> Derivation {
    Derivation { rule, conclusion: Judgment { stack: stack.clone(), level, term: term.clone(), ty }, premises }
}

fn mismatch(term: &Term, expected: &Type, found: &Type) -> CheckError {
    CheckError::TypeMismatch(format!("`{term}` has type `{found}` but `{expected}` was expected"))
}

fn agree(term: &Term, expected: Option<&Type>, found: &Type) -> Result<(), CheckError> {
    match expected {
        Some(e) if e != found => Err(mismatch(term, e, found)),
        _ => Ok(()),
    }
}

/// Renames repeated binder names so a frame never binds a name twice.
/// Later occurrences win, matching rightmost lookup.
fn dedupe_names(names: &[String], avoid: &[&Term]) -> Vec<String> {
    let mut fresh = Fresh::avoiding(avoid.iter().copied());
    for x in names {
        fresh.avoid(x);
    }
    names
        .iter()
        .enumerate()
        .map(|(i, x)| if names[i + 1..].contains(x) { fresh.fresh(x) } else { x.clone() })
        .collect()
}

impl Checker {
    fn annotation(&self, ann: &Type, level: Option<Level>) -> Result<Type, CheckError> {
        match level {
            None => Ok(ann.erase()),
            Some(l) if ann.is_leveled() => {
                let lt = ann.check_level().expect("leveled");
                if lt == l {
                    Ok(ann.clone())
                } else {
                    Err(CheckError::LevelMismatch(format!("annotation `{ann}` lives at level {lt}, not {l}")))
                }
            }
            Some(l) => ann.at_level(l).map_err(|e| CheckError::LevelMismatch(e.to_string())),
        }
    }

    fn violation(&self, construct: &str) -> CheckError {
        CheckError::ModeViolation { mode: self.mode, construct: construct.into() }
    }

    fn infer(&self, stack: &Stack, level: Option<Level>, term: &Term, expected: Option<&Type>) -> Result<Derivation, CheckError> {
        match term {
            Term::Var(x) => {
                let ty = stack.top().lookup(x).ok_or_else(|| CheckError::VariableNotInScope(x.clone()))?.clone();
                agree(term, expected, &ty)?;
                Ok(node(Rule::Var, stack, level, term, ty, vec![]))
            }
            Term::Lam(x, ann, body) => {
                let (dom, cod) = match expected {
                    Some(Type::Arrow(a, b)) => {
                        if let Some(ann) = ann {
                            let given = self.annotation(ann, level)?;
                            if &given != a.as_ref() {
                                return Err(mismatch(&Term::var(x), a, &given));
                            }
                        }
                        ((**a).clone(), Some(b.as_ref()))
                    }
                    Some(other) => {
                        return Err(CheckError::TypeMismatch(format!(
                            "abstraction `{term}` checked against non-function type `{other}`"
                        )))
                    }
                    None => match ann {
                        Some(a) => (self.annotation(a, level)?, None),
                        None => return Err(CheckError::Underdetermined(x.clone())),
                    },
                };
                let (name, body) = if stack.top().contains(x) {
                    let mut fresh = Fresh::avoiding([term]);
                    for n in stack.top().names() {
                        fresh.avoid(n);
                    }
                    let y = fresh.fresh(x);
                    let renamed = rename(body, x, &y, 0, &mut fresh);
                    (y, renamed)
                } else {
                    (x.clone(), (**body).clone())
                };
                let premise = self.infer(&stack.with_top_extended(&name, dom.clone()), level, &body, cod)?;
                let ty = Type::arrow(dom, premise.ty().clone());
                Ok(node(Rule::Abs, stack, level, term, ty, vec![premise]))
            }
            Term::App(f, a) => {
                let (df, da) = match self.infer(stack, level, f, None) {
                    Ok(df) => {
                        let Type::Arrow(dom, _) = df.ty() else {
                            return Err(CheckError::TypeMismatch(format!(
                                "`{f}` of type `{}` is applied but is not a function",
                                df.ty()
                            )));
                        };
                        let dom = (**dom).clone();
                        let da = self.infer(stack, level, a, Some(&dom))?;
                        (df, da)
                    }
                    Err(CheckError::Underdetermined(why)) => {
                        // an unannotated function: the argument fixes the domain
                        let Some(exp) = expected else { return Err(CheckError::Underdetermined(why)) };
                        let da = self.infer(stack, level, a, None)?;
                        let df = self.infer(stack, level, f, Some(&Type::arrow(da.ty().clone(), exp.clone())))?;
                        (df, da)
                    }
                    Err(e) => return Err(e),
                };
                let Type::Arrow(_, cod) = df.ty() else { unreachable!("checked above") };
                let ty = (**cod).clone();
                agree(term, expected, &ty)?;
                Ok(node(Rule::App, stack, level, term, ty, vec![df, da]))
            }
            Term::Pair(a, b) => {
                let (ea, eb) = match expected {
                    Some(Type::Prod(x, y)) => (Some(x.as_ref()), Some(y.as_ref())),
                    Some(other) => {
                        return Err(CheckError::TypeMismatch(format!("pair `{term}` checked against `{other}`")))
                    }
                    None => (None, None),
                };
                let da = self.infer(stack, level, a, ea)?;
                let db = self.infer(stack, level, b, eb)?;
                let ty = Type::prod(da.ty().clone(), db.ty().clone());
                Ok(node(Rule::Pair, stack, level, term, ty, vec![da, db]))
            }
            Term::Proj1(p) | Term::Proj2(p) => {
                let dp = self.infer(stack, level, p, None)?;
                let Type::Prod(x, y) = dp.ty() else {
                    return Err(CheckError::TypeMismatch(format!("`{p}` of type `{}` is projected", dp.ty())));
                };
                let (rule, ty) =
                    if matches!(term, Term::Proj1(_)) { (Rule::Proj1, (**x).clone()) } else { (Rule::Proj2, (**y).clone()) };
                agree(term, expected, &ty)?;
                Ok(node(rule, stack, level, term, ty, vec![dp]))
            }
            Term::Star => {
                let ty = Type::Unit(level);
                agree(term, expected, &ty)?;
                Ok(node(Rule::Star, stack, level, term, ty, vec![]))
            }
            Term::Quo(binders, body) => {
                if !self.mode.allows_quotes() {
                    return Err(self.violation("quotation"));
                }
                let inner = match level {
                    Some(l) => Some(l.down().ok_or_else(|| {
                        CheckError::LevelMismatch(format!("quotation `{term}` cannot live at level 0"))
                    })?),
                    None => None,
                };
                let (hyps, body_expected) = match expected {
                    Some(Type::CBox(hyps, b)) => {
                        if hyps.len() != binders.len() {
                            return Err(CheckError::TypeMismatch(format!(
                                "`{term}` binds {} variables but `{}` has {} hypotheses",
                                binders.len(),
                                expected.expect("matched"),
                                hyps.len()
                            )));
                        }
                        (Some(hyps), Some(b.as_ref()))
                    }
                    Some(other) => {
                        return Err(CheckError::TypeMismatch(format!("quotation `{term}` checked against `{other}`")))
                    }
                    None => (None, None),
                };
                let mut tys = Vec::with_capacity(binders.len());
                for (i, (x, ann)) in binders.iter().enumerate() {
                    let want = hyps.map(|h| &h[i]);
                    let ty = match (ann, want) {
                        (Some(a), want) => {
                            let given = self.annotation(a, inner)?;
                            if let Some(w) = want {
                                if &given != w {
                                    return Err(mismatch(&Term::var(x), w, &given));
                                }
                            }
                            given
                        }
                        (None, Some(w)) => w.clone(),
                        (None, None) => return Err(CheckError::Underdetermined(x.clone())),
                    };
                    tys.push(ty);
                }
                let names: Vec<String> = binders.iter().map(|(x, _)| x.clone()).collect();
                let names = dedupe_names(&names, &[term]);
                let frame = Context(names.into_iter().zip(tys.iter().cloned()).collect());
                let premise = self.infer(&stack.pushed(frame), inner, body, body_expected)?;
                let ty = Type::cbox(tys, premise.ty().clone());
                let rule = if binders.is_empty() { Rule::Quo } else { Rule::CQuo };
                Ok(node(rule, stack, level, term, ty, vec![premise]))
            }
            Term::Unq(body, args) => {
                if !self.mode.allows_quotes() {
                    return Err(self.violation("unquotation"));
                }
                let popped = stack
                    .popped()
                    .ok_or_else(|| CheckError::StackUnderflow(format!("`{term}` needs an outer context")))?;
                let outer = level.map(Level::up);
                let mut premises = Vec::with_capacity(args.len() + 1);
                let db = match (args.is_empty(), expected) {
                    (true, Some(e)) => self.infer(&popped, outer, body, Some(&Type::boxed(e.clone())))?,
                    _ => match self.infer(&popped, outer, body, None) {
                        Err(CheckError::Underdetermined(why)) if expected.is_some() => {
                            let mut arg_ds = Vec::with_capacity(args.len());
                            for a in args {
                                arg_ds.push(self.infer(stack, level, a, None).map_err(|_| CheckError::Underdetermined(why.clone()))?);
                            }
                            let hyps = arg_ds.iter().map(|d| d.ty().clone()).collect();
                            let want = Type::cbox(hyps, expected.expect("guarded").clone());
                            let db = self.infer(&popped, outer, body, Some(&want))?;
                            premises.push(db);
                            premises.extend(arg_ds);
                            let ty = expected.expect("guarded").clone();
                            return Ok(node(Rule::CUnq, stack, level, term, ty, premises));
                        }
                        other => other?,
                    },
                };
                let Type::CBox(hyps, b) = db.ty() else {
                    return Err(CheckError::TypeMismatch(format!("`{body}` of type `{}` is unquoted", db.ty())));
                };
                if hyps.len() != args.len() {
                    return Err(CheckError::TypeMismatch(format!(
                        "`{body}` of type `{}` is unquoted with {} arguments",
                        db.ty(),
                        args.len()
                    )));
                }
                let ty = (**b).clone();
                let hyps = hyps.clone();
                premises.push(db);
                for (a, h) in args.iter().zip(&hyps) {
                    premises.push(self.infer(stack, level, a, Some(h))?);
                }
                agree(term, expected, &ty)?;
                let rule = if args.is_empty() { Rule::Unq } else { Rule::CUnq };
                Ok(node(rule, stack, level, term, ty, premises))
            }
            Term::GBox(xs, args, body) => {
                if self.mode != Mode::Gentzen {
                    return Err(self.violation("gbox"));
                }
                let body_expected = match expected {
                    Some(Type::CBox(h, b)) if h.is_empty() => Some(b.as_ref()),
                    Some(other) => {
                        return Err(CheckError::TypeMismatch(format!("box `{term}` checked against `{other}`")))
                    }
                    None => None,
                };
                let mut premises = Vec::with_capacity(args.len() + 1);
                let mut tys = Vec::with_capacity(args.len());
                for a in args {
                    let da = self.infer(stack, level, a, None)?;
                    match da.ty() {
                        Type::CBox(h, b) if h.is_empty() => tys.push((**b).clone()),
                        other => {
                            return Err(CheckError::TypeMismatch(format!("boxed argument `{a}` has type `{other}`")))
                        }
                    }
                    premises.push(da);
                }
                let names = dedupe_names(xs, &[term]);
                let inner = Stack::single(Context(names.into_iter().zip(tys).collect()));
                let db = self.infer(&inner, level, body, body_expected)?;
                let ty = Type::boxed(db.ty().clone());
                premises.push(db);
                Ok(node(Rule::GBoxRule, stack, level, term, ty, premises))
            }
            Term::DBox(body) => {
                if !self.mode.allows_dual_box() {
                    return Err(self.violation("dbox"));
                }
                let (premise_stack, rule) = if self.mode == Mode::Dual {
                    let modal = stack.frame(1).expect("dual stacks have height 2").clone();
                    (Stack::new(vec![Context::empty(), modal]).expect("nonempty"), Rule::DBoxI)
                } else {
                    let popped = stack
                        .popped()
                        .ok_or_else(|| CheckError::StackUnderflow(format!("`{term}` needs an outer context")))?;
                    (popped, Rule::MBoxI)
                };
                let body_expected = match expected {
                    Some(Type::Dual(b)) => Some(b.as_ref()),
                    Some(other) => {
                        return Err(CheckError::TypeMismatch(format!("box `{term}` checked against `{other}`")))
                    }
                    None => None,
                };
                let db = self.infer(&premise_stack, level.map(Level::up), body, body_expected)?;
                let ty = Type::dual(db.ty().clone());
                Ok(node(rule, stack, level, term, ty, vec![db]))
            }
            Term::DLet(u, m, n) => {
                if !self.mode.allows_dual_box() {
                    return Err(self.violation("let dbox"));
                }
                if stack.height() < 2 {
                    return Err(CheckError::StackUnderflow(format!("`{term}` needs a modal context")));
                }
                let dm = self.infer(stack, level, m, None)?;
                let Type::Dual(a) = dm.ty() else {
                    return Err(CheckError::TypeMismatch(format!("`{m}` of type `{}` is opened as a box", dm.ty())));
                };
                let (name, n) = if stack.frame(1).expect("height checked").contains(u) {
                    let mut fresh = Fresh::avoiding([term]);
                    for f in stack.frames() {
                        for x in f.names() {
                            fresh.avoid(x);
                        }
                    }
                    let v = fresh.fresh(u);
                    let renamed = rename(n, u, &v, 1, &mut fresh);
                    (v, renamed)
                } else {
                    (u.clone(), (**n).clone())
                };
                let mut extended = stack.clone();
                extended.frame_mut(1).expect("height checked").push(&name, (**a).clone());
                let dn = self.infer(&extended, level, &n, expected)?;
                let ty = dn.ty().clone();
                let rule = if self.mode == Mode::Dual { Rule::DBoxE } else { Rule::MBoxE };
                Ok(node(rule, stack, level, term, ty, vec![dm, dn]))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::alpha_eq;
    use crate::syntax::{parse_term, parse_type};

    fn at(ty: &str, l: u32) -> Type {
        parse_type(ty).unwrap().at_level(Level(l)).unwrap()
    }

    fn judge(frames: &[&[(&str, &str)]], l: u32, term: &str, ty: &str) -> Judgment {
        let h = frames.len() as u32;
        let frames = frames
            .iter()
            .enumerate()
            .map(|(i, f)| Context(f.iter().map(|(x, t)| (x.to_string(), at(t, l + h - 1 - i as u32))).collect()))
            .collect();
        Judgment::new(Stack::new(frames).unwrap(), l, parse_term(term).unwrap(), at(ty, l))
    }

    const AXIOM_K: &str = "\\x.\\y. quo ((unq x)(unq y))";

    #[test]
    fn axiom_k_checks_at_level_one() {
        let j = judge(&[&[]], 1, AXIOM_K, "[](A -> B) -> []A -> []B");
        let d = check(Mode::Fitch, &j).unwrap();
        assert_eq!(d.rule, Rule::Abs);
        assert!(alpha_eq(&d.conclusion.term, &j.term));
        // level 0 would put the box at level 0
        let mut low = j.clone();
        low.level = Some(Level(0));
        assert!(matches!(check(Mode::Fitch, &low), Err(CheckError::LevelMismatch(_))));
    }

    #[test]
    fn axiom_k_mutations_rejected() {
        for bad in ["\\x.\\y. quo (x (unq y))", "\\x.\\y. quo ((unq x) y)", "\\x.\\y. (unq x)(unq y)"] {
            let j = judge(&[&[]], 1, bad, "[](A -> B) -> []A -> []B");
            assert!(check(Mode::Fitch, &j).is_err(), "{bad}");
        }
    }

    #[test]
    fn var_searches_rightmost_frame_only() {
        assert_eq!(check(Mode::Fitch, &judge(&[&[("x", "A")]], 0, "x", "A")).unwrap().rule, Rule::Var);
        let j = judge(&[&[("x", "A")], &[]], 0, "x", "A");
        assert_eq!(check(Mode::Fitch, &j), Err(CheckError::VariableNotInScope("x".into())));
    }

    #[test]
    fn contextual_quotation() {
        let d = check(Mode::Fitch, &judge(&[&[]], 1, "quo [x : A] x", "[A]A")).unwrap();
        assert_eq!(d.rule, Rule::CQuo);
        assert_eq!(d.premises[0].conclusion.stack.height(), 2);
        let d = check(Mode::Fitch, &judge(&[&[("m", "[A]B")], &[("a", "A")]], 0, "unq m with [a]", "B")).unwrap();
        assert_eq!(d.rule, Rule::CUnq);
    }

    #[test]
    fn unquote_underflow_and_weakening() {
        let j = judge(&[&[("m", "[]A")]], 1, "quo (unq m)", "[]A");
        assert_eq!(check(Mode::Fitch, &j).unwrap().premises[0].rule, Rule::Unq);
        let j = judge(&[&[("m", "A")]], 0, "unq m", "A");
        assert!(matches!(check(Mode::Fitch, &j), Err(CheckError::StackUnderflow(_))));
        // the dropped rightmost frame may hold anything
        let j = judge(&[&[("m", "[]A")], &[("z", "B")]], 0, "unq m", "A");
        assert!(check(Mode::Fitch, &j).is_ok());
    }

    #[test]
    fn binder_clashes_are_renamed() {
        let j = judge(&[&[("x", "A")]], 0, "\\x. x", "B -> B");
        let d = check(Mode::Fitch, &j).unwrap();
        assert_eq!(d.premises[0].conclusion.stack.top().len(), 2);
        assert!(check(Mode::Fitch, &judge(&[&[]], 1, "quo [x, x] x", "[A, B]B")).is_ok());
    }

    #[test]
    fn modes_restrict_constructors() {
        let j = judge(&[&[]], 1, "quo (\\x. x)", "[](A -> A)");
        assert!(matches!(check(Mode::Gentzen, &j), Err(CheckError::ModeViolation { .. })));
        assert!(matches!(check(Mode::Multi, &j), Err(CheckError::ModeViolation { .. })));
        assert!(check(Mode::Benton, &j).is_ok());
        let g = Judgment::unleveled(
            Stack::single(Context(vec![("f".into(), parse_type("[](A -> B)").unwrap()), ("a".into(), parse_type("[]A").unwrap())])),
            parse_term("gbox g, b be f, a in g b").unwrap(),
            parse_type("[]B").unwrap(),
        );
        assert_eq!(check(Mode::Gentzen, &g).unwrap().rule, Rule::GBoxRule);
        assert!(check(Mode::Fitch, &g).is_err());
    }

    #[test]
    fn dual_context_rules() {
        // u : A in the modal context, boxed again
        let j = judge(&[&[("u", "A")], &[("m", "!A")]], 0, "let dbox v = m in dbox v", "!A");
        let d = check(Mode::Dual, &j).unwrap();
        assert_eq!(d.rule, Rule::DBoxE);
        assert_eq!(d.premises[1].rule, Rule::DBoxI);
        assert_eq!(check(Mode::Multi, &j).unwrap().rule, Rule::MBoxE);
        // modal variables are not directly visible at the lower level
        let j = judge(&[&[("u", "A")], &[]], 0, "u", "A");
        assert!(check(Mode::Dual, &j).is_err());
    }

    #[test]
    fn unleveled_and_synthesised_forms() {
        let j = Judgment::unleveled(Stack::single(Context::empty()), parse_term("unq (quo (\\x. x))").unwrap(), parse_type("A -> A").unwrap());
        assert!(matches!(check(Mode::Fitch, &j), Err(CheckError::StackUnderflow(_))));
        let j = Judgment::unleveled(
            Stack::new(vec![Context::empty(), Context::empty()]).unwrap(),
            parse_term("unq (quo (\\x. x))").unwrap(),
            parse_type("A -> A").unwrap(),
        );
        assert!(check(Mode::Fitch, &j).is_ok());
        let j = judge(&[&[("y", "A")]], 0, "(\\x. x) y", "A");
        assert!(check(Mode::Fitch, &j).is_ok());
    }

    #[test]
    fn json_shape() {
        let d = check(Mode::Fitch, &judge(&[&[("x", "A")]], 0, "x", "A")).unwrap();
        let v = d.to_json();
        assert_eq!(v["rule"], "Var");
        assert_eq!(v["conclusion"], "x : A |- x : A @ 0");
        assert!(v["premises"].as_array().unwrap().is_empty());
    }
}
