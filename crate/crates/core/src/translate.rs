//! Desugaring of contextual boxes into plain ones, and the translation of
//! Fitch derivations into the Gentzen calculus.

use std::collections::HashMap;

use crate::binding::Fresh;
use crate::checker::{Derivation, Rule};
use crate::kernel::{Context, Judgment, Stack, Term, Type};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("{0} cannot be translated; desugar contextual boxes first")]
    UnsupportedConstruct(String),
    /// An unquotation at the root reaches a frame the Gentzen context only holds boxed.
    #[error("`{0}` unquotes into an outer frame at the root of the derivation")]
    OuterFrameAccess(String),
}

/// `[A1, .., An]B` becomes `[](A1 -> .. -> An -> B)`.
pub fn desugar_type(ty: &Type) -> Type {
    match ty {
        Type::Base { .. } | Type::Unit(_) => ty.clone(),
        Type::Arrow(a, b) => Type::arrow(desugar_type(a), desugar_type(b)),
        Type::Prod(a, b) => Type::prod(desugar_type(a), desugar_type(b)),
        Type::CBox(hyps, body) => {
            let hyps: Vec<Type> = hyps.iter().map(desugar_type).collect();
            Type::boxed(Type::arrows(&hyps, desugar_type(body)))
        }
        Type::Dual(b) => Type::dual(desugar_type(b)),
    }
}

pub fn desugar_contextual(m: &Term) -> Term {
    match m {
        Term::Var(_) | Term::Star => m.clone(),
        Term::Lam(x, ann, b) => Term::Lam(x.clone(), ann.as_ref().map(desugar_type), Box::new(desugar_contextual(b))),
        Term::App(a, b) => Term::app(desugar_contextual(a), desugar_contextual(b)),
        Term::Pair(a, b) => Term::pair(desugar_contextual(a), desugar_contextual(b)),
        Term::Proj1(a) => Term::proj1(desugar_contextual(a)),
        Term::Proj2(a) => Term::proj2(desugar_contextual(a)),
        Term::Quo(bs, b) => {
            let body = bs.iter().rev().fold(desugar_contextual(b), |acc, (x, ann)| {
                Term::Lam(x.clone(), ann.as_ref().map(desugar_type), Box::new(acc))
            });
            Term::quo(body)
        }
        Term::Unq(b, args) => Term::apps(Term::unq(desugar_contextual(b)), args.iter().map(desugar_contextual)),
        Term::GBox(xs, args, b) => {
            Term::GBox(xs.clone(), args.iter().map(desugar_contextual).collect(), Box::new(desugar_contextual(b)))
        }
        Term::DBox(b) => Term::dbox(desugar_contextual(b)),
        Term::DLet(u, a, b) => Term::dlet(u, desugar_contextual(a), desugar_contextual(b)),
    }
}

/// Desugars the term and every type of a judgment.
pub fn desugar_judgment(j: &Judgment) -> Judgment {
    let frames = j
        .stack
        .frames()
        .iter()
        .map(|f| Context(f.0.iter().map(|(x, t)| (x.clone(), desugar_type(t))).collect()))
        .collect();
    Judgment {
        stack: Stack::new(frames).expect("nonempty"),
        level: j.level,
        term: desugar_contextual(&j.term),
        ty: desugar_type(&j.ty),
    }
}

fn boxed_times(ty: Type, times: usize) -> Type {
    (0..times).fold(ty, |t, _| Type::boxed(t))
}

/// Translates a Fitch derivation of `Γn; ..; Γ0 ⊢ M : A` into the Gentzen
/// judgment `□ⁿΓn, .., Γ0 ⊢ G(M) : A`, levels erased. Returns the judgment and
/// `G(M)`, which is also its term.
pub fn to_gentzen(d: &Derivation) -> Result<(Judgment, Term), TranslateError> {
    let mut fresh = Fresh::avoiding([&d.conclusion.term]);
    for node in d.nodes() {
        for f in node.conclusion.stack.frames() {
            for x in f.names() {
                fresh.avoid(x);
            }
        }
    }
    let mut g = Gentzen { fresh, splices: HashMap::new() };
    let term = g.translate(d)?;

    let frames = d.conclusion.stack.frames();
    let height = frames.len();
    let mut ctx: Vec<(String, Type)> = Vec::new();
    for (i, f) in frames.iter().enumerate() {
        let depth = height - 1 - i;
        for (x, t) in &f.0 {
            // an inner frame shadows an outer one
            ctx.retain(|(y, _)| y != x);
            ctx.push((x.clone(), boxed_times(t.erase(), depth)));
        }
    }
    let j = Judgment::unleveled(Stack::single(Context(ctx)), term.clone(), d.conclusion.ty.erase());
    Ok((j, term))
}

/// `to_gentzen` for a derivation whose outer frames are empty, giving a
/// judgment over the rightmost frame alone.
pub fn to_gentzen_closed(d: &Derivation) -> Result<(Judgment, Term), TranslateError> {
    let (mut j, term) = to_gentzen(d)?;
    let top: Vec<&str> = d.conclusion.stack.top().names().collect();
    j.stack.top_mut().0.retain(|(x, _)| top.contains(&x.as_str()));
    Ok((j, term))
}

struct Gentzen {
    fresh: Fresh,
    /// Unquotations already hoisted into an enclosing box, by node address.
    splices: HashMap<*const Derivation, String>,
}

impl Gentzen {
    fn translate(&mut self, d: &Derivation) -> Result<Term, TranslateError> {
        if let Some(z) = self.splices.get(&(d as *const Derivation)) {
            return Ok(Term::var(z));
        }
        let t = &d.conclusion.term;
        let ps = &d.premises;
        Ok(match d.rule {
            Rule::Var => t.clone(),
            Rule::Star => Term::Star,
            Rule::Abs => {
                let Type::Arrow(dom, _) = d.ty() else { unreachable!("abstraction has arrow type") };
                let name = ps[0].conclusion.stack.top().names().last().expect("bound by Abs").to_string();
                Term::lam_ann(&name, dom.erase(), self.translate(&ps[0])?)
            }
            Rule::App => Term::app(self.translate(&ps[0])?, self.translate(&ps[1])?),
            Rule::Pair => Term::pair(self.translate(&ps[0])?, self.translate(&ps[1])?),
            Rule::Proj1 => Term::proj1(self.translate(&ps[0])?),
            Rule::Proj2 => Term::proj2(self.translate(&ps[0])?),
            Rule::Quo => self.quotation(&ps[0])?,
            Rule::Unq => return Err(TranslateError::OuterFrameAccess(t.to_string())),
            Rule::CQuo | Rule::CUnq | Rule::GBoxRule | Rule::DBoxI | Rule::DBoxE | Rule::MBoxI | Rule::MBoxE => {
                return Err(TranslateError::UnsupportedConstruct(format!("`{t}` ({})", d.rule)))
            }
        })
    }

    /// `G(quo M)`: every unquotation in `M` at counter 0 becomes a binder of the
    /// Gentzen box, bound to the translation of its body.
    fn quotation(&mut self, body: &Derivation) -> Result<Term, TranslateError> {
        let mut found = Vec::new();
        collect_splices(body, 0, &mut found);
        let reserved = body.conclusion.term.clone();
        let mut names: Vec<String> = Vec::new();
        let mut args = Vec::new();
        for splice in found {
            let inner = &splice.premises[0];
            let name = match &inner.conclusion.term {
                Term::Var(x) if !binds(&reserved, x) => {
                    if names.contains(x) {
                        self.splices.insert(splice as *const Derivation, x.clone());
                        continue;
                    }
                    x.clone()
                }
                _ => self.fresh.fresh("z"),
            };
            args.push(self.translate(inner)?);
            self.splices.insert(splice as *const Derivation, name.clone());
            names.push(name);
        }
        let b = self.translate(body)?;
        Ok(Term::GBox(names, args, Box::new(b)))
    }
}

/// Whether some binder of `t` uses the name `x`.
fn binds(t: &Term, x: &str) -> bool {
    let here = match t {
        Term::Lam(y, _, _) | Term::DLet(y, _, _) => y == x,
        Term::Quo(bs, _) => bs.iter().any(|(y, _)| y == x),
        Term::GBox(ys, _, _) => ys.iter().any(|y| y == x),
        _ => false,
    };
    here || t.children().into_iter().any(|c| binds(c, x))
}

fn collect_splices<'a>(d: &'a Derivation, counter: usize, out: &mut Vec<&'a Derivation>) {
    match d.rule {
        Rule::Unq | Rule::CUnq if counter == 0 => out.push(d),
        Rule::Unq | Rule::CUnq => {
            collect_splices(&d.premises[0], counter - 1, out);
            for a in &d.premises[1..] {
                collect_splices(a, counter, out);
            }
        }
        Rule::Quo | Rule::CQuo => collect_splices(&d.premises[0], counter + 1, out),
        _ => {
            for p in &d.premises {
                collect_splices(p, counter, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{check, Mode};
    use crate::kernel::alpha_eq;
    use crate::rewrite::{normalize, DEFAULT_BUDGET};
    use crate::checker::attach_levels;
    use crate::syntax::{parse_judgment, parse_term, parse_type};

    fn leveled(src: &str) -> Judgment {
        let raw = parse_judgment(src).unwrap();
        attach_levels(&raw.unleveled(), raw.level.unwrap()).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn desugars_contextual_boxes() {
        assert_eq!(desugar_contextual(&t("quo [x:A] x")), t("quo (\\x:A. x)"));
        assert_eq!(desugar_contextual(&t("quo [] y")), t("quo y"));
        assert_eq!(desugar_contextual(&t("unq m with [a]")), t("(unq m) a"));
        assert_eq!(desugar_type(&parse_type("[A, B]C").unwrap()), parse_type("[](A -> B -> C)").unwrap());
        let redex = t("unq (quo [x, y] (x, y)) with [a, b]");
        let lhs = normalize(&redex, DEFAULT_BUDGET).unwrap();
        let rhs = normalize(&desugar_contextual(&redex), DEFAULT_BUDGET).unwrap();
        assert!(alpha_eq(&lhs, &rhs));
    }

    #[test]
    fn desugaring_preserves_typing() {
        let j = leveled("k : [A]B, a : A |- quo [x:A] (unq (quo [y:A] unq k with [y]) with [x]) : [A]B @ 1");
                check(Mode::Fitch, &j).unwrap();
        check(Mode::Fitch, &desugar_judgment(&j)).unwrap();
    }

    fn gentzen_of(src: &str) -> (Judgment, Term) {
        let j = leveled(src);
        let d = check(Mode::Fitch, &j).unwrap();
        let out = to_gentzen(&d).unwrap();
        check(Mode::Gentzen, &out.0).unwrap();
        out
    }

    #[test]
    fn axiom_k_becomes_a_gentzen_box() {
        let (j, g) = gentzen_of(". |- \\x. \\y. quo ((unq x) (unq y)) : [](A -> B) -> []A -> []B @ 1");
        let expect = t("\\x : [](A -> B). \\y : []A. gbox x, y be x, y in x y");
        assert!(alpha_eq(&g.unannotated(), &expect.unannotated()));
        assert_eq!(j.ty, parse_type("[](A -> B) -> []A -> []B").unwrap());
    }

    #[test]
    fn closed_box_has_no_bindings() {
        let (_, g) = gentzen_of(". |- quo (\\x. x) : [](A -> A) @ 1");
        assert!(matches!(g, Term::GBox(ref xs, ref args, _) if xs.is_empty() && args.is_empty()));
    }

    #[test]
    fn nested_splices_and_outer_frames() {
        let (j, g) = gentzen_of("q : A ; p : [][]A |- quo (quo (unq (unq p))) : [][]A @ 2");
        assert!(matches!(g, Term::GBox(ref xs, _, _) if xs.len() == 1));
        assert_eq!(j.stack.top().lookup("q"), Some(&parse_type("[]A").unwrap()));
        let (_, g) = gentzen_of("f : [](A -> B), a : []A |- quo ((unq f) (unq (quo (unq a)))) : []B @ 1");
        assert!(matches!(g, Term::GBox(ref xs, _, _) if xs.len() == 2));
    }

    #[test]
    fn root_unquotation_is_rejected() {
        let j = leveled("m : []A ; . |- unq m : A @ 0");
        let d = check(Mode::Fitch, &j).unwrap();
        assert!(matches!(to_gentzen(&d), Err(TranslateError::OuterFrameAccess(_))));
        let j = leveled(". |- quo [x:A] x : [A]A @ 1");
        let d = check(Mode::Fitch, &j).unwrap();
        assert!(matches!(to_gentzen(&d), Err(TranslateError::UnsupportedConstruct(_))));
    }
}
