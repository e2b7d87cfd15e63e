//! Unification-based reconstruction of binder annotations and result types
//! for unleveled terms. Unconstrained type variables become fresh base types.

use std::collections::BTreeSet;

use crate::kernel::{Stack, Term, Type};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReconstructError {
    #[error("variable `{0}` is not in the rightmost context")]
    Unbound(String),
    #[error("cannot unify `{0}` with `{1}`")]
    Mismatch(String, String),
    #[error("`{0}` needs an outer context")]
    Underflow(String),
    #[error("infinite type while unifying `{0}`")]
    Occurs(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum UTy {
    Meta(usize),
    Base(String),
    Unit,
    Arrow(Box<UTy>, Box<UTy>),
    Prod(Box<UTy>, Box<UTy>),
    CBox(Vec<UTy>, Box<UTy>),
    Dual(Box<UTy>),
}

impl UTy {
    fn from_type(t: &Type) -> UTy {
        match t {
            Type::Base { name, .. } => UTy::Base(name.clone()),
            Type::Unit(_) => UTy::Unit,
            Type::Arrow(a, b) => UTy::Arrow(Box::new(UTy::from_type(a)), Box::new(UTy::from_type(b))),
            Type::Prod(a, b) => UTy::Prod(Box::new(UTy::from_type(a)), Box::new(UTy::from_type(b))),
            Type::CBox(h, b) => UTy::CBox(h.iter().map(UTy::from_type).collect(), Box::new(UTy::from_type(b))),
            Type::Dual(b) => UTy::Dual(Box::new(UTy::from_type(b))),
        }
    }
}

struct Solver {
    metas: Vec<Option<UTy>>,
    /// binder types in pre-order of binding sites
    binders: Vec<UTy>,
}

impl Solver {
    fn fresh(&mut self) -> UTy {
        self.metas.push(None);
        UTy::Meta(self.metas.len() - 1)
    }

    fn resolve(&self, t: &UTy) -> UTy {
        match t {
            UTy::Meta(i) => match &self.metas[*i] {
                Some(u) => self.resolve(u),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn occurs(&self, i: usize, t: &UTy) -> bool {
        match self.resolve(t) {
            UTy::Meta(j) => i == j,
            UTy::Base(_) | UTy::Unit => false,
            UTy::Arrow(a, b) | UTy::Prod(a, b) => self.occurs(i, &a) || self.occurs(i, &b),
            UTy::CBox(h, b) => h.iter().any(|x| self.occurs(i, x)) || self.occurs(i, &b),
            UTy::Dual(b) => self.occurs(i, &b),
        }
    }

    fn unify(&mut self, a: &UTy, b: &UTy) -> Result<(), ReconstructError> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (UTy::Meta(i), UTy::Meta(j)) if i == j => Ok(()),
            (UTy::Meta(i), other) | (other, UTy::Meta(i)) => {
                if self.occurs(*i, other) {
                    return Err(ReconstructError::Occurs(self.show(other)));
                }
                self.metas[*i] = Some(other.clone());
                Ok(())
            }
            (UTy::Base(x), UTy::Base(y)) if x == y => Ok(()),
            (UTy::Unit, UTy::Unit) => Ok(()),
            (UTy::Arrow(a1, b1), UTy::Arrow(a2, b2)) | (UTy::Prod(a1, b1), UTy::Prod(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            (UTy::CBox(h1, b1), UTy::CBox(h2, b2)) if h1.len() == h2.len() => {
                for (x, y) in h1.iter().zip(h2) {
                    self.unify(x, y)?;
                }
                self.unify(b1, b2)
            }
            (UTy::Dual(x), UTy::Dual(y)) => self.unify(x, y),
            _ => Err(ReconstructError::Mismatch(self.show(&a), self.show(&b))),
        }
    }

    fn show(&self, t: &UTy) -> String {
        self.to_type(t, &mut |i| format!("?{i}")).to_string()
    }

    fn to_type(&self, t: &UTy, name_meta: &mut dyn FnMut(usize) -> String) -> Type {
        match self.resolve(t) {
            UTy::Meta(i) => Type::ubase(&name_meta(i)),
            UTy::Base(x) => Type::ubase(&x),
            UTy::Unit => Type::Unit(None),
            UTy::Arrow(a, b) => Type::arrow(self.to_type(&a, name_meta), self.to_type(&b, name_meta)),
            UTy::Prod(a, b) => Type::prod(self.to_type(&a, name_meta), self.to_type(&b, name_meta)),
            UTy::CBox(h, b) => {
                Type::cbox(h.iter().map(|x| self.to_type(x, name_meta)).collect(), self.to_type(&b, name_meta))
            }
            UTy::Dual(b) => Type::dual(self.to_type(&b, name_meta)),
        }
    }

    fn binder(&mut self, ann: &Option<Type>) -> UTy {
        let t = match ann {
            Some(a) => UTy::from_type(a),
            None => self.fresh(),
        };
        self.binders.push(t.clone());
        t
    }

    fn infer(&mut self, env: &mut Vec<Vec<(String, UTy)>>, term: &Term) -> Result<UTy, ReconstructError> {
        match term {
            Term::Var(x) => env
                .last()
                .expect("nonempty")
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| ReconstructError::Unbound(x.clone())),
            Term::Lam(x, ann, b) => {
                let dom = self.binder(ann);
                env.last_mut().expect("nonempty").push((x.clone(), dom.clone()));
                let cod = self.infer(env, b);
                env.last_mut().expect("nonempty").pop();
                Ok(UTy::Arrow(Box::new(dom), Box::new(cod?)))
            }
            Term::App(f, a) => {
                let tf = self.infer(env, f)?;
                let ta = self.infer(env, a)?;
                let cod = self.fresh();
                self.unify(&tf, &UTy::Arrow(Box::new(ta), Box::new(cod.clone())))?;
                Ok(cod)
            }
            Term::Pair(a, b) => {
                let ta = self.infer(env, a)?;
                let tb = self.infer(env, b)?;
                Ok(UTy::Prod(Box::new(ta), Box::new(tb)))
            }
            Term::Proj1(p) | Term::Proj2(p) => {
                let tp = self.infer(env, p)?;
                let (x, y) = (self.fresh(), self.fresh());
                self.unify(&tp, &UTy::Prod(Box::new(x.clone()), Box::new(y.clone())))?;
                Ok(if matches!(term, Term::Proj1(_)) { x } else { y })
            }
            Term::Star => Ok(UTy::Unit),
            Term::Quo(bs, b) => {
                let frame: Vec<(String, UTy)> = bs.iter().map(|(x, a)| (x.clone(), self.binder(a))).collect();
                let hyps = frame.iter().map(|(_, t)| t.clone()).collect();
                env.push(frame);
                let body = self.infer(env, b);
                env.pop();
                Ok(UTy::CBox(hyps, Box::new(body?)))
            }
            Term::Unq(b, args) => {
                if env.len() < 2 {
                    return Err(ReconstructError::Underflow(term.to_string()));
                }
                let top = env.pop().expect("height checked");
                let tb = self.infer(env, b);
                env.push(top);
                let tb = tb?;
                let mut hyps = Vec::with_capacity(args.len());
                for a in args {
                    hyps.push(self.infer(env, a)?);
                }
                let res = self.fresh();
                self.unify(&tb, &UTy::CBox(hyps, Box::new(res.clone())))?;
                Ok(res)
            }
            Term::GBox(xs, args, b) => {
                let mut frame = Vec::with_capacity(xs.len());
                for (x, a) in xs.iter().zip(args) {
                    let ta = self.infer(env, a)?;
                    let inner = self.fresh();
                    self.unify(&ta, &UTy::CBox(vec![], Box::new(inner.clone())))?;
                    frame.push((x.clone(), inner));
                }
                let mut inner_env = vec![frame];
                let body = self.infer(&mut inner_env, b)?;
                Ok(UTy::CBox(vec![], Box::new(body)))
            }
            Term::DBox(b) => {
                if env.len() < 2 {
                    return Err(ReconstructError::Underflow(term.to_string()));
                }
                let top = env.pop().expect("height checked");
                let tb = self.infer(env, b);
                env.push(top);
                Ok(UTy::Dual(Box::new(tb?)))
            }
            Term::DLet(u, m, n) => {
                if env.len() < 2 {
                    return Err(ReconstructError::Underflow(term.to_string()));
                }
                let tm = self.infer(env, m)?;
                let inner = self.fresh();
                self.unify(&tm, &UTy::Dual(Box::new(inner.clone())))?;
                let k = env.len() - 2;
                env[k].push((u.clone(), inner));
                let tn = self.infer(env, n);
                env[k].pop();
                tn
            }
        }
    }
}

/// Fills in every binder annotation of `term` and computes its type under
/// `stack`, unified with `expected` when given. Returns the annotated term, its
/// type and the names of base types invented for unconstrained variables.
pub fn reconstruct(
    stack: &Stack,
    term: &Term,
    expected: Option<&Type>,
) -> Result<(Term, Type, Vec<String>), ReconstructError> {
    let mut solver = Solver { metas: Vec::new(), binders: Vec::new() };
    let mut env: Vec<Vec<(String, UTy)>> = stack
        .frames()
        .iter()
        .map(|f| f.0.iter().map(|(x, t)| (x.clone(), UTy::from_type(t))).collect())
        .collect();
    let ty = solver.infer(&mut env, term)?;
    if let Some(e) = expected {
        solver.unify(&ty, &UTy::from_type(e))?;
    }
    let mut taken = BTreeSet::new();
    collect_base_names(term, stack, expected, &mut taken);
    let mut invented: Vec<(usize, String)> = Vec::new();
    let mut counter = 0;
    let mut name_meta = |i: usize| {
        if let Some((_, n)) = invented.iter().find(|(j, _)| *j == i) {
            return n.clone();
        }
        let name = loop {
            let cand = format!("T{counter}");
            counter += 1;
            if !taken.contains(&cand) {
                break cand;
            }
        };
        invented.push((i, name.clone()));
        name
    };
    let ty_out = solver.to_type(&ty, &mut name_meta);
    let binder_types: Vec<Type> = solver.binders.iter().map(|b| solver.to_type(b, &mut name_meta)).collect();
    let mut it = binder_types.into_iter();
    let annotated = fill(term, &mut it);
    let names = invented.into_iter().map(|(_, n)| n).collect();
    Ok((annotated, ty_out, names))
}

/// Replaces binder annotations in the order `Solver::binder` visited them.
fn fill(t: &Term, tys: &mut impl Iterator<Item = Type>) -> Term {
    match t {
        Term::Lam(x, _, b) => {
            let a = tys.next().expect("one type per binder");
            Term::Lam(x.clone(), Some(a), Box::new(fill(b, tys)))
        }
        Term::Quo(bs, b) => {
            let bs = bs.iter().map(|(x, _)| (x.clone(), Some(tys.next().expect("one type per binder")))).collect();
            Term::Quo(bs, Box::new(fill(b, tys)))
        }
        Term::Var(_) | Term::Star => t.clone(),
        Term::App(a, b) => Term::app(fill(a, tys), fill(b, tys)),
        Term::Pair(a, b) => Term::pair(fill(a, tys), fill(b, tys)),
        Term::Proj1(a) => Term::proj1(fill(a, tys)),
        Term::Proj2(a) => Term::proj2(fill(a, tys)),
        Term::Unq(b, args) => {
            let b = fill(b, tys);
            Term::Unq(Box::new(b), args.iter().map(|a| fill(a, tys)).collect())
        }
        Term::GBox(xs, args, b) => {
            let args = args.iter().map(|a| fill(a, tys)).collect();
            Term::GBox(xs.clone(), args, Box::new(fill(b, tys)))
        }
        Term::DBox(b) => Term::dbox(fill(b, tys)),
        Term::DLet(u, m, n) => {
            let m = fill(m, tys);
            Term::dlet(u, m, fill(n, tys))
        }
    }
}

fn collect_base_names(term: &Term, stack: &Stack, expected: Option<&Type>, out: &mut BTreeSet<String>) {
    fn ty(t: &Type, out: &mut BTreeSet<String>) {
        match t {
            Type::Base { name, .. } => {
                out.insert(name.clone());
            }
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
    for f in stack.frames() {
        f.types().for_each(|t| ty(t, out));
    }
    if let Some(e) = expected {
        ty(e, out);
    }
    let cell = std::cell::RefCell::new(std::mem::take(out));
    term.map_annotations(&|a| {
        ty(a, &mut cell.borrow_mut());
        a.clone()
    });
    *out = cell.into_inner();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{check, Mode};
    use crate::kernel::{Context, Judgment};
    use crate::syntax::parse_term;

    #[test]
    fn identity_gets_an_invented_base() {
        let stack = Stack::new(vec![Context::empty(), Context::empty()]).unwrap();
        let t = parse_term("unq (quo (\\x. x))").unwrap();
        let (annotated, ty, names) = reconstruct(&stack, &t, None).unwrap();
        assert_eq!(ty, Type::arrow(Type::ubase("T0"), Type::ubase("T0")));
        assert_eq!(names, vec!["T0".to_string()]);
        assert!(check(Mode::Fitch, &Judgment::unleveled(stack, annotated, ty)).is_ok());
    }

    #[test]
    fn higher_order_redex_is_annotated() {
        let stack = Stack::single(Context(vec![("y".into(), Type::ubase("A"))]));
        let t = parse_term("(\\f. f y) (\\x. x)").unwrap();
        let (annotated, ty, names) = reconstruct(&stack, &t, None).unwrap();
        assert_eq!(ty, Type::ubase("A"));
        assert!(names.is_empty());
        assert!(check(Mode::Fitch, &Judgment::unleveled(stack, annotated, ty)).is_ok());
    }

    #[test]
    fn failures() {
        let stack = Stack::single(Context::empty());
        assert!(matches!(reconstruct(&stack, &parse_term("\\x. x x").unwrap(), None), Err(ReconstructError::Occurs(_))));
        assert!(matches!(reconstruct(&stack, &parse_term("unq m").unwrap(), None), Err(ReconstructError::Underflow(_))));
        assert!(matches!(reconstruct(&stack, &parse_term("fst ()").unwrap(), None), Err(ReconstructError::Mismatch(..))));
    }
}
