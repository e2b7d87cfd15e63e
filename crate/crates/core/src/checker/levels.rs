//! Level inference and erasure.
//!
//! Every level inside a derivation is a fixed offset from the level of its
//! conclusion: quotation bodies sit one below, unquoted terms and frames one
//! above. Inference therefore checks the unleveled judgment, collects each base
//! occurrence with its offset, and picks the least root level satisfying the
//! signature and nonnegativity.

use std::collections::BTreeSet;

use super::{check, CheckError, Derivation, Mode, Rule};
use crate::kernel::{Context, Judgment, Level, Stack, Term, Type};
use crate::syntax::Signature;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LevelError {
    #[error("no level assignment satisfies the signature: {0}")]
    Unsatisfiable(String),
    #[error("base type `{0}` is not declared")]
    UndeclaredBase(String),
    #[error("not derivable even without levels: {0}")]
    NotDerivable(CheckError),
}

/// Drops every level from the judgment, including binder annotations.
pub fn erase_levels(j: &Judgment) -> Judgment {
    Judgment::unleveled(j.stack.erase(), j.term.erase(), j.ty.erase())
}

#[derive(Default)]
struct Constraints {
    /// (base name, offset)
    anchors: BTreeSet<(String, i64)>,
    /// least offset at which some type component sits
    lowest: i64,
}

impl Constraints {
    fn ty(&mut self, t: &Type, offset: i64) {
        self.lowest = self.lowest.min(offset);
        match t {
            Type::Base { name, .. } => {
                self.anchors.insert((name.clone(), offset));
            }
            Type::Unit(_) => {}
            Type::Arrow(a, b) | Type::Prod(a, b) => {
                self.ty(a, offset);
                self.ty(b, offset);
            }
            Type::CBox(hyps, body) => {
                for h in hyps {
                    self.ty(h, offset - 1);
                }
                self.ty(body, offset - 1);
            }
            Type::Dual(body) => self.ty(body, offset + 1),
        }
    }

    fn derivation(&mut self, d: &Derivation, offset: i64) {
        self.ty(&d.conclusion.ty, offset);
        for (depth, frame) in d.conclusion.stack.frames().iter().rev().enumerate() {
            for t in frame.types() {
                self.ty(t, offset + depth as i64);
            }
        }
        for (i, p) in d.premises.iter().enumerate() {
            self.derivation(p, offset + premise_offset(d.rule, i));
        }
    }
}

/// Level of premise `i` relative to the conclusion.
fn premise_offset(rule: Rule, i: usize) -> i64 {
    match rule {
        Rule::Quo | Rule::CQuo => -1,
        Rule::Unq | Rule::CUnq if i == 0 => 1,
        Rule::DBoxI | Rule::MBoxI => 1,
        _ => 0,
    }
}

/// Offsets of every binder annotation in pre-order, relative to the root.
pub fn level_offsets(t: &Term) -> Vec<i64> {
    fn go(t: &Term, offset: i64, out: &mut Vec<i64>) {
        match t {
            Term::Lam(_, ann, b) => {
                if ann.is_some() {
                    out.push(offset);
                }
                go(b, offset, out);
            }
            Term::Quo(bs, b) => {
                out.extend(bs.iter().filter(|(_, a)| a.is_some()).map(|_| offset - 1));
                go(b, offset - 1, out);
            }
            Term::Unq(b, args) => {
                go(b, offset + 1, out);
                for a in args {
                    go(a, offset, out);
                }
            }
            Term::DBox(b) => go(b, offset + 1, out),
            other => {
                for c in other.children() {
                    go(c, offset, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(t, 0, &mut out);
    out
}

fn level_annotations(t: &Term, level: i64) -> Result<Term, String> {
    let at = |ty: &Type, l: i64| -> Result<Type, String> {
        let l = u32::try_from(l).map_err(|_| format!("annotation `{ty}` would sit below level 0"))?;
        ty.at_level(Level(l)).map_err(|e| e.to_string())
    };
    Ok(match t {
        Term::Lam(x, ann, b) => Term::Lam(
            x.clone(),
            ann.as_ref().map(|a| at(a, level)).transpose()?,
            Box::new(level_annotations(b, level)?),
        ),
        Term::Quo(bs, b) => Term::Quo(
            bs.iter()
                .map(|(x, a)| Ok((x.clone(), a.as_ref().map(|a| at(a, level - 1)).transpose()?)))
                .collect::<Result<_, String>>()?,
            Box::new(level_annotations(b, level - 1)?),
        ),
        Term::Unq(b, args) => Term::Unq(
            Box::new(level_annotations(b, level + 1)?),
            args.iter().map(|a| level_annotations(a, level)).collect::<Result<_, _>>()?,
        ),
        Term::DBox(b) => Term::DBox(Box::new(level_annotations(b, level + 1)?)),
        Term::Var(_) | Term::Star => t.clone(),
        Term::App(a, b) => Term::app(level_annotations(a, level)?, level_annotations(b, level)?),
        Term::Pair(a, b) => Term::pair(level_annotations(a, level)?, level_annotations(b, level)?),
        Term::Proj1(a) => Term::proj1(level_annotations(a, level)?),
        Term::Proj2(a) => Term::proj2(level_annotations(a, level)?),
        Term::DLet(u, m, n) => Term::dlet(u, level_annotations(m, level)?, level_annotations(n, level)?),
        Term::GBox(..) => return Err("gbox terms carry no levels".into()),
    })
}

/// Attaches levels to `j`, a judgment whose types carry none, placing its
/// conclusion at `root`.
pub fn attach_levels(j: &Judgment, root: u32) -> Result<Judgment, String> {
    let h = j.stack.height();
    let frames = j
        .stack
        .frames()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let l = Level(root + (h - 1 - i) as u32);
            Ok(Context(f.0.iter().map(|(x, t)| Ok((x.clone(), t.at_level(l).map_err(|e| e.to_string())?))).collect::<Result<_, String>>()?))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(Judgment {
        stack: Stack::new(frames).expect("same height"),
        level: Some(Level(root)),
        term: level_annotations(&j.term, i64::from(root))?,
        ty: j.ty.at_level(Level(root)).map_err(|e| e.to_string())?,
    })
}

/// Least leveled judgment erasing to `j` that checks in `mode`. With `fixed`,
/// only that root level is considered.
pub fn infer_levels(j: &Judgment, sig: &Signature, mode: Mode, fixed: Option<u32>) -> Result<Judgment, LevelError> {
    let plain = erase_levels(j);
    let d = check(mode, &plain).map_err(LevelError::NotDerivable)?;
    let mut cs = Constraints::default();
    cs.derivation(&d, 0);
    if let Some((name, _)) = cs.anchors.iter().find(|(name, _)| sig.levels_of(name).is_none()) {
        return Err(LevelError::UndeclaredBase(name.clone()));
    }
    let lowest = (-cs.lowest).max(0);
    let fits = |root: i64| {
        root >= lowest
            && cs.anchors.iter().all(|(name, c)| {
                u32::try_from(root + c).is_ok_and(|l| sig.declares(name, l))
            })
    };
    let root = match fixed {
        Some(l) if fits(i64::from(l)) => i64::from(l),
        Some(l) => {
            return Err(LevelError::Unsatisfiable(format!("the judgment cannot live at level {l}")));
        }
        None => {
            let candidates: Vec<i64> = match cs.anchors.iter().next() {
                Some((name, c)) => sig.levels_of(name).expect("checked").iter().map(|s| i64::from(*s) - c).collect(),
                None => vec![lowest],
            };
            *candidates
                .iter()
                .filter(|r| fits(**r))
                .min()
                .ok_or_else(|| LevelError::Unsatisfiable(describe_conflict(&cs, sig)))?
        }
    };
    let leveled = attach_levels(&plain, root as u32).map_err(LevelError::Unsatisfiable)?;
    check(mode, &leveled).map_err(|e| LevelError::Unsatisfiable(e.to_string()))?;
    Ok(leveled)
}

fn describe_conflict(cs: &Constraints, sig: &Signature) -> String {
    let uses: Vec<String> = cs
        .anchors
        .iter()
        .map(|(name, c)| {
            let declared: Vec<String> = sig.levels_of(name).into_iter().flatten().map(u32::to_string).collect();
            format!("{name} at root{c:+} (declared at {})", declared.join(", "))
        })
        .collect();
    uses.join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_type};

    fn unleveled(frames: &[&[(&str, &str)]], term: &str, ty: &str) -> Judgment {
        let frames = frames
            .iter()
            .map(|f| Context(f.iter().map(|(x, t)| (x.to_string(), parse_type(t).unwrap())).collect()))
            .collect();
        Judgment::unleveled(Stack::new(frames).unwrap(), parse_term(term).unwrap(), parse_type(ty).unwrap())
    }

    #[test]
    fn axiom_k_is_labelled_at_level_one() {
        let sig = Signature::new().with("A", &[0]).with("B", &[0]);
        let j = unleveled(&[&[]], "\\x.\\y. quo ((unq x)(unq y))", "[](A -> B) -> []A -> []B");
        let out = infer_levels(&j, &sig, Mode::Fitch, None).unwrap();
        assert_eq!(out.level, Some(Level(1)));
        assert_eq!(erase_levels(&out), j);
    }

    #[test]
    fn single_anchor() {
        let sig = Signature::new().with("A", &[3]);
        let out = infer_levels(&unleveled(&[&[("x", "A")]], "x", "A"), &sig, Mode::Fitch, None).unwrap();
        assert_eq!(out.level, Some(Level(3)));
    }

    fn leaves(t: &Type) -> usize {
        match t {
            Type::Base { .. } | Type::Unit(_) => 1,
            Type::Arrow(a, b) | Type::Prod(a, b) => leaves(a) + leaves(b),
            Type::CBox(h, b) => h.iter().map(leaves).sum::<usize>() + leaves(b),
            Type::Dual(b) => leaves(b),
        }
    }

    fn relevel(t: &Type, next: &mut dyn FnMut() -> u32) -> Type {
        match t {
            Type::Base { name, .. } => Type::base(name, next()),
            Type::Unit(_) => Type::Unit(Some(Level(next()))),
            Type::Arrow(a, b) => Type::arrow(relevel(a, next), relevel(b, next)),
            Type::Prod(a, b) => Type::prod(relevel(a, next), relevel(b, next)),
            Type::CBox(h, b) => Type::cbox(h.iter().map(|x| relevel(x, next)).collect(), relevel(b, next)),
            Type::Dual(b) => Type::dual(relevel(b, next)),
        }
    }

    /// Root levels of every judgment obtained by giving each leaf occurrence of
    /// a base or unit type its own level up to `bound` that checks and respects
    /// the signature.
    fn brute_force(j: &Judgment, sig: &Signature, bound: u32) -> BTreeSet<u32> {
        let ann_leaves: usize = annotations(&j.term).iter().map(leaves).sum();
        let k = leaves(&j.ty) + j.stack.frames().iter().flat_map(|f| f.types()).map(leaves).sum::<usize>() + ann_leaves;
        let mut found = BTreeSet::new();
        let total = (bound as usize + 1).pow(k as u32);
        for code in 0..total {
            let digits = std::cell::RefCell::new(code);
            let next = || {
                let mut d = digits.borrow_mut();
                let v = (*d % (bound as usize + 1)) as u32;
                *d /= bound as usize + 1;
                v
            };
            let mut next_mut = next;
            let ty = relevel(&j.ty, &mut next_mut);
            let frames = j
                .stack
                .frames()
                .iter()
                .map(|f| Context(f.0.iter().map(|(x, t)| (x.clone(), relevel(t, &mut next_mut))).collect()))
                .collect();
            let cell = std::cell::RefCell::new(next_mut);
            let term = j.term.map_annotations(&|a| relevel(a, &mut *cell.borrow_mut()));
            let Ok(root) = ty.check_level() else { continue };
            let cand = Judgment { stack: Stack::new(frames).unwrap(), level: Some(root), term, ty };
            let mut names = Vec::new();
            collect_bases(&cand, &mut names);
            if names.iter().all(|(n, l)| sig.declares(n, *l)) && check(Mode::Fitch, &cand).is_ok() {
                found.insert(root.0);
            }
        }
        found
    }

    fn annotations(t: &Term) -> Vec<Type> {
        let out = std::cell::RefCell::new(Vec::new());
        t.map_annotations(&|a| {
            out.borrow_mut().push(a.clone());
            a.clone()
        });
        out.into_inner()
    }

    fn collect_bases(j: &Judgment, out: &mut Vec<(String, u32)>) {
        fn ty(t: &Type, out: &mut Vec<(String, u32)>) {
            match t {
                Type::Base { name, level } => out.push((name.clone(), level.unwrap().0)),
                Type::Unit(_) => {}
                Type::Arrow(a, b) | Type::Prod(a, b) => {
                    ty(a, out);
                    ty(b, out);
                }
                Type::CBox(h, b) => {
                    h.iter().for_each(|x| ty(x, out));
                    ty(b, out);
                }
                Type::Dual(b) => ty(b, out),
            }
        }
        ty(&j.ty, out);
        for f in j.stack.frames() {
            f.types().for_each(|t| ty(t, out));
        }
        for a in annotations(&j.term) {
            ty(&a, out);
        }
    }

    #[test]
    fn conflicting_anchors_are_unsatisfiable() {
        // A is used at the root level and one level below it
        let sig = Signature::new().with("A", &[0, 2]);
        let j = unleveled(&[&[("x", "A")]], "quo (\\y:A. y)", "[](A -> A)");
        assert!(matches!(infer_levels(&j, &sig, Mode::Fitch, None), Err(LevelError::Unsatisfiable(_))));
        assert!(brute_force(&j, &sig, 4).is_empty());
        assert!(brute_force(&j, &Signature::new().with("A", &[0, 1]), 4).contains(&1));
        // declaring A at 1 as well makes root 1 work
        let sig = sig.with("A", &[1]);
        let out = infer_levels(&j, &sig, Mode::Fitch, None).unwrap();
        assert_eq!(out.level, Some(Level(1)));
        assert_eq!(brute_force(&j, &sig, 4).first(), Some(&1));
        assert_eq!(brute_force(&j, &sig, 4).first().copied(), out.level.map(|l| l.0));
    }

    #[test]
    fn hidden_quotations_force_a_positive_level() {
        let sig = Signature::new();
        let j = unleveled(&[&[]], "snd (quo (), ())", "Unit");
        assert_eq!(infer_levels(&j, &sig, Mode::Fitch, None).unwrap().level, Some(Level(1)));
    }

    #[test]
    fn underivable_judgments_fail() {
        let sig = Signature::new().with("A", &[0]);
        let j = unleveled(&[&[("x", "A")], &[]], "x", "A");
        assert!(matches!(infer_levels(&j, &sig, Mode::Fitch, None), Err(LevelError::NotDerivable(_))));
        let j = unleveled(&[&[("x", "C")]], "x", "C");
        assert_eq!(infer_levels(&j, &sig, Mode::Fitch, None), Err(LevelError::UndeclaredBase("C".into())));
    }
}
