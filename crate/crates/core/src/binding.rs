//! Level-aware scoping: free variables per frame, fresh names, and the
//! counter-indexed substitution that only touches occurrences in the target frame.

use std::collections::{BTreeMap, BTreeSet};

use crate::kernel::Term;

/// Deterministic fresh-name supply. Names are built from a stem plus a numeric suffix.
#[derive(Clone, Debug, Default)]
pub struct Fresh {
    used: BTreeSet<String>,
}

impl Fresh {
    pub fn new() -> Fresh {
        Fresh::default()
    }

    pub fn avoiding<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Fresh {
        let mut f = Fresh::new();
        for t in terms {
            f.avoid_term(t);
        }
        f
    }

    pub fn avoid(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn avoid_term(&mut self, t: &Term) {
        t.all_names(&mut self.used);
    }

    pub fn fresh(&mut self, base: &str) -> String {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if stem.is_empty() { "v" } else { stem };
        let name = (1..)
            .map(|k| format!("{stem}{k}"))
            .find(|n| !self.used.contains(n))
            .expect("unbounded supply");
        self.used.insert(name.clone());
        name
    }
}

/// Names occurring free in `t` that refer to the frame `depth` steps above
/// the frame `t` is typed in.
pub fn free_at(t: &Term, depth: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    collect_free(t, depth, &mut bound, &mut out);
    out
}

fn collect_free(t: &Term, n: usize, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            if n == 0 && !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Star => {}
        Term::Lam(x, _, b) => {
            if n == 0 {
                bound.push(x.clone());
                collect_free(b, n, bound, out);
                bound.pop();
            } else {
                collect_free(b, n, bound, out);
            }
        }
        Term::App(a, b) | Term::Pair(a, b) => {
            collect_free(a, n, bound, out);
            collect_free(b, n, bound, out);
        }
        Term::Proj1(a) | Term::Proj2(a) => collect_free(a, n, bound, out),
        Term::Quo(_, b) => collect_free(b, n + 1, bound, out),
        Term::Unq(b, args) => {
            if n > 0 {
                collect_free(b, n - 1, bound, out);
            }
            for a in args {
                collect_free(a, n, bound, out);
            }
        }
        Term::GBox(_, args, _) => {
            for a in args {
                collect_free(a, n, bound, out);
            }
        }
        Term::DBox(b) => {
            if n > 0 {
                collect_free(b, n - 1, bound, out);
            }
        }
        Term::DLet(u, m, b) => {
            collect_free(m, n, bound, out);
            if n == 1 {
                bound.push(u.clone());
                collect_free(b, n, bound, out);
                bound.pop();
            } else {
                collect_free(b, n, bound, out);
            }
        }
    }
}

/// Whether `x` occurs free in `t` at frame distance `depth`.
pub fn occurs_free_at(t: &Term, x: &str, depth: usize) -> bool {
    free_at(t, depth).contains(x)
}

/// Free variables of `t` in its own frame and every frame above, keyed by distance.
pub fn free_by_depth(t: &Term) -> BTreeMap<usize, BTreeSet<String>> {
    let mut out = BTreeMap::new();
    walk_free_depths(t, 0, &mut Vec::new(), &mut out);
    out
}

fn walk_free_depths(
    t: &Term,
    up: isize,
    scopes: &mut Vec<(isize, String)>,
    out: &mut BTreeMap<usize, BTreeSet<String>>,
) {
    // `up` is the distance from the current frame to the root frame, negative
    // inside quotations. A binder records the absolute frame it lives in.
    match t {
        Term::Var(x) => {
            let bound = scopes.iter().any(|(f, y)| *f == up && y == x);
            if !bound && up >= 0 {
                out.entry(up as usize).or_default().insert(x.clone());
            }
        }
        Term::Star => {}
        Term::Lam(x, _, b) => {
            scopes.push((up, x.clone()));
            walk_free_depths(b, up, scopes, out);
            scopes.pop();
        }
        Term::App(a, b) | Term::Pair(a, b) => {
            walk_free_depths(a, up, scopes, out);
            walk_free_depths(b, up, scopes, out);
        }
        Term::Proj1(a) | Term::Proj2(a) => walk_free_depths(a, up, scopes, out),
        Term::Quo(bs, b) => {
            // a fresh frame; binders recorded for earlier frames at this depth are stale
            let frame = up - 1;
            let mut inner: Vec<_> = scopes.iter().filter(|(f, _)| *f > frame).cloned().collect();
            inner.extend(bs.iter().map(|(x, _)| (frame, x.clone())));
            walk_free_depths(b, frame, &mut inner, out);
        }
        Term::Unq(b, args) => {
            walk_free_depths(b, up + 1, scopes, out);
            for a in args {
                walk_free_depths(a, up, scopes, out);
            }
        }
        Term::GBox(_, args, _) => {
            for a in args {
                walk_free_depths(a, up, scopes, out);
            }
        }
        Term::DBox(b) => walk_free_depths(b, up + 1, scopes, out),
        Term::DLet(u, m, b) => {
            walk_free_depths(m, up, scopes, out);
            scopes.push((up + 1, u.clone()));
            walk_free_depths(b, up, scopes, out);
            scopes.pop();
        }
    }
}

/// `[with/x]_depth t`: replaces occurrences of `x` that refer to the frame `depth`
/// steps above `t`'s own frame. The counter grows under quotation and shrinks
/// under unquotation; occurrences reached with the counter at zero are replaced.
/// Binders that would capture free variables of `with` are renamed.
pub fn subst(t: &Term, x: &str, depth: usize, with: &Term, fresh: &mut Fresh) -> Term {
    fresh.avoid(x);
    fresh.avoid_term(with);
    fresh.avoid_term(t);
    let fv0 = free_at(with, 0);
    let fv1 = free_at(with, 1);
    let cx = SubstCx { x, with, fv0: &fv0, fv1: &fv1 };
    cx.go(t, depth, fresh)
}

/// Renames the binder-level variable `from` referring to frame `depth` of `t`.
pub fn rename(t: &Term, from: &str, to: &str, depth: usize, fresh: &mut Fresh) -> Term {
    subst(t, from, depth, &Term::Var(to.to_string()), fresh)
}

struct SubstCx<'a> {
    x: &'a str,
    with: &'a Term,
    fv0: &'a BTreeSet<String>,
    fv1: &'a BTreeSet<String>,
}

impl SubstCx<'_> {
    fn go(&self, t: &Term, n: usize, fresh: &mut Fresh) -> Term {
        match t {
            Term::Var(y) => {
                if n == 0 && y == self.x {
                    self.with.clone()
                } else {
                    t.clone()
                }
            }
            Term::Star => Term::Star,
            Term::Lam(y, ty, b) => {
                if n != 0 {
                    return Term::Lam(y.clone(), ty.clone(), Box::new(self.go(b, n, fresh)));
                }
                if y == self.x {
                    return t.clone();
                }
                if self.fv0.contains(y) && occurs_free_at(b, self.x, 0) {
                    let y2 = fresh.fresh(y);
                    let b2 = rename(b, y, &y2, 0, fresh);
                    Term::Lam(y2, ty.clone(), Box::new(self.go(&b2, 0, fresh)))
                } else {
                    Term::Lam(y.clone(), ty.clone(), Box::new(self.go(b, 0, fresh)))
                }
            }
            Term::App(a, b) => Term::app(self.go(a, n, fresh), self.go(b, n, fresh)),
            Term::Pair(a, b) => Term::pair(self.go(a, n, fresh), self.go(b, n, fresh)),
            Term::Proj1(a) => Term::proj1(self.go(a, n, fresh)),
            Term::Proj2(a) => Term::proj2(self.go(a, n, fresh)),
            Term::Quo(bs, b) => Term::Quo(bs.clone(), Box::new(self.go(b, n + 1, fresh))),
            Term::Unq(b, args) => {
                let body = if n > 0 { self.go(b, n - 1, fresh) } else { (**b).clone() };
                Term::Unq(Box::new(body), args.iter().map(|a| self.go(a, n, fresh)).collect())
            }
            Term::GBox(xs, args, b) => Term::GBox(
                xs.clone(),
                args.iter().map(|a| self.go(a, n, fresh)).collect(),
                b.clone(),
            ),
            Term::DBox(b) => {
                if n > 0 {
                    Term::dbox(self.go(b, n - 1, fresh))
                } else {
                    t.clone()
                }
            }
            Term::DLet(u, m, b) => {
                let m2 = self.go(m, n, fresh);
                // `u` joins the frame one step above the current one
                let (shadows, captures) = match n {
                    1 => (u == self.x, self.fv0.contains(u)),
                    0 => (false, self.fv1.contains(u)),
                    _ => (false, false),
                };
                if shadows {
                    return Term::DLet(u.clone(), Box::new(m2), b.clone());
                }
                if captures && occurs_free_at(b, self.x, n) {
                    let u2 = fresh.fresh(u);
                    let b2 = rename(b, u, &u2, 1, fresh);
                    Term::DLet(u2, Box::new(m2), Box::new(self.go(&b2, n, fresh)))
                } else {
                    Term::DLet(u.clone(), Box::new(m2), Box::new(self.go(b, n, fresh)))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::alpha_eq;

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn fresh_names_are_deterministic() {
        let mut f = Fresh::avoiding([&Term::lam("x1", v("x"))]);
        assert_eq!(f.fresh("x"), "x2");
        assert_eq!(f.fresh("x7"), "x3");
    }

    #[test]
    fn free_variables_by_frame() {
        // \y. quo (y (unq x))  -- y is in the root frame, x in the root frame via unq
        let t = Term::lam("y", Term::quo(Term::app(v("y"), Term::unq(v("x")))));
        assert_eq!(free_at(&t, 0), BTreeSet::from(["x".to_string()]));
        // unq z at the root refers one frame up
        let u = Term::unq(v("z"));
        assert!(free_at(&u, 0).is_empty());
        assert_eq!(free_at(&u, 1), BTreeSet::from(["z".to_string()]));
    }

    #[test]
    fn quoted_occurrence_untouched() {
        let mut f = Fresh::new();
        let t = Term::quo(v("x"));
        assert_eq!(subst(&t, "x", 0, &v("y"), &mut f), t);
        assert_eq!(subst(&v("x"), "x", 0, &v("n"), &mut f), v("n"));
    }

    #[test]
    fn only_the_same_level_occurrence_is_replaced() {
        // body of (\x. quo \x. (x (unq x))) y
        let body = Term::quo(Term::lam("x", Term::app(v("x"), Term::unq(v("x")))));
        let mut f = Fresh::new();
        let out = subst(&body, "x", 0, &v("y"), &mut f);
        let expect = Term::quo(Term::lam("x", Term::app(v("x"), Term::unq(v("y")))));
        assert!(alpha_eq(&out, &expect), "{out:?}");
    }

    #[test]
    fn capture_is_avoided_by_renaming() {
        // [y/x] \y. x y  = \y1. y y1
        let t = Term::lam("y", Term::app(v("x"), v("y")));
        let mut f = Fresh::new();
        let out = subst(&t, "x", 0, &v("y"), &mut f);
        assert!(alpha_eq(&out, &Term::lam("z", Term::app(v("y"), v("z")))));
    }

    #[test]
    fn binders_in_quoted_frames_never_capture() {
        // [y/x] quo \y. unq x  -> quo \y. unq y (outer y)
        let t = Term::quo(Term::lam("y", Term::unq(v("x"))));
        let mut f = Fresh::new();
        let out = subst(&t, "x", 0, &v("y"), &mut f);
        assert_eq!(out, Term::quo(Term::lam("y", Term::unq(v("y")))));
    }

    #[test]
    fn dlet_capture_one_frame_up() {
        // [unq u / x] (let dbox u = m in x): the inserted `unq u` refers one frame up
        let t = Term::dlet("u", v("m"), v("x"));
        let mut f = Fresh::new();
        let out = subst(&t, "x", 0, &Term::unq(v("u")), &mut f);
        match out {
            Term::DLet(u2, _, body) => {
                assert_ne!(u2, "u");
                assert_eq!(*body, Term::unq(v("u")));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn depth_map() {
        let t = Term::app(v("a"), Term::unq(Term::app(v("b"), Term::unq(v("c")))));
        let m = free_by_depth(&t);
        assert_eq!(m[&0], BTreeSet::from(["a".to_string()]));
        assert_eq!(m[&1], BTreeSet::from(["b".to_string()]));
        assert_eq!(m[&2], BTreeSet::from(["c".to_string()]));
    }
}
