//! Leveled types, terms, context stacks and judgments.

use std::collections::BTreeSet;

/// A stage index. Quotation moves a term one level down, unquotation one up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(pub u32);

impl Level {
    pub fn up(self) -> Level {
        Level(self.0 + 1)
    }

    pub fn down(self) -> Option<Level> {
        self.0.checked_sub(1).map(Level)
    }

    pub fn offset(self, by: u32) -> Level {
        Level(self.0 + by)
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Types. A `None` level marks an unleveled type (level-erased or Gentzen-style).
///
/// `CBox(hyps, body)` is the contextual box `[hyps] body`; the plain box is
/// `CBox([], body)`. `Dual` is the box of the dual-context and multi-context
/// systems, which sits one level below its body.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Base { name: String, level: Option<Level> },
    Arrow(Box<Type>, Box<Type>),
    Prod(Box<Type>, Box<Type>),
    Unit(Option<Level>),
    CBox(Vec<Type>, Box<Type>),
    Dual(Box<Type>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TypeLevelError {
    #[error("type `{0}` carries no level")]
    Unleveled(String),
    #[error("components of `{0}` live at different levels")]
    Mixed(String),
    #[error("box `{0}` would sit below level 0")]
    BoxBelowZero(String),
}

impl Type {
    pub fn base(name: &str, level: u32) -> Type {
        Type::Base { name: name.to_string(), level: Some(Level(level)) }
    }

    pub fn ubase(name: &str) -> Type {
        Type::Base { name: name.to_string(), level: None }
    }

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    pub fn boxed(body: Type) -> Type {
        Type::CBox(Vec::new(), Box::new(body))
    }

    pub fn cbox(hyps: Vec<Type>, body: Type) -> Type {
        Type::CBox(hyps, Box::new(body))
    }

    pub fn dual(body: Type) -> Type {
        Type::Dual(Box::new(body))
    }

    /// Right-nested arrows `a1 -> ... -> an -> cod`.
    pub fn arrows(doms: &[Type], cod: Type) -> Type {
        doms.iter().rev().fold(cod, |acc, d| Type::arrow(d.clone(), acc))
    }

    /// The level this type lives at, read off without validating components.
    pub fn level(&self) -> Option<Level> {
        match self {
            Type::Base { level, .. } | Type::Unit(level) => *level,
            Type::Arrow(a, b) | Type::Prod(a, b) => a.level().or_else(|| b.level()),
            Type::CBox(_, body) => body.level().map(Level::up),
            Type::Dual(body) => body.level().and_then(Level::down),
        }
    }

    /// Validates the level discipline and returns the level.
    pub fn check_level(&self) -> Result<Level, TypeLevelError> {
        match self {
            Type::Base { level: Some(l), .. } | Type::Unit(Some(l)) => Ok(*l),
            Type::Base { level: None, .. } | Type::Unit(None) => {
                Err(TypeLevelError::Unleveled(format!("{self}")))
            }
            Type::Arrow(a, b) | Type::Prod(a, b) => {
                let la = a.check_level()?;
                let lb = b.check_level()?;
                if la == lb {
                    Ok(la)
                } else {
                    Err(TypeLevelError::Mixed(format!("{self}")))
                }
            }
            Type::CBox(hyps, body) => {
                let lb = body.check_level()?;
                for h in hyps {
                    if h.check_level()? != lb {
                        return Err(TypeLevelError::Mixed(format!("{self}")));
                    }
                }
                Ok(lb.up())
            }
            Type::Dual(body) => {
                let lb = body.check_level()?;
                lb.down().ok_or_else(|| TypeLevelError::BoxBelowZero(format!("{self}")))
            }
        }
    }

    pub fn is_leveled(&self) -> bool {
        self.check_level().is_ok()
    }

    /// Drops every level annotation.
    pub fn erase(&self) -> Type {
        match self {
            Type::Base { name, .. } => Type::Base { name: name.clone(), level: None },
            Type::Unit(_) => Type::Unit(None),
            Type::Arrow(a, b) => Type::arrow(a.erase(), b.erase()),
            Type::Prod(a, b) => Type::prod(a.erase(), b.erase()),
            Type::CBox(hyps, body) => Type::cbox(hyps.iter().map(Type::erase).collect(), body.erase()),
            Type::Dual(body) => Type::dual(body.erase()),
        }
    }

    /// Attaches levels so that the whole type sits at `l`. Existing levels are overwritten.
    pub fn at_level(&self, l: Level) -> Result<Type, TypeLevelError> {
        Ok(match self {
            Type::Base { name, .. } => Type::Base { name: name.clone(), level: Some(l) },
            Type::Unit(_) => Type::Unit(Some(l)),
            Type::Arrow(a, b) => Type::arrow(a.at_level(l)?, b.at_level(l)?),
            Type::Prod(a, b) => Type::prod(a.at_level(l)?, b.at_level(l)?),
            Type::CBox(hyps, body) => {
                let inner = l.down().ok_or_else(|| TypeLevelError::BoxBelowZero(format!("{self}")))?;
                let hyps = hyps.iter().map(|h| h.at_level(inner)).collect::<Result<_, _>>()?;
                Type::cbox(hyps, body.at_level(inner)?)
            }
            Type::Dual(body) => Type::dual(body.at_level(l.up())?),
        })
    }

    /// Number of type constructors.
    pub fn size(&self) -> usize {
        match self {
            Type::Base { .. } | Type::Unit(_) => 1,
            Type::Arrow(a, b) | Type::Prod(a, b) => 1 + a.size() + b.size(),
            Type::CBox(hyps, body) => 1 + body.size() + hyps.iter().map(Type::size).sum::<usize>(),
            Type::Dual(body) => 1 + body.size(),
        }
    }
}

/// Terms of every calculus handled by the toolkit. Binder annotations are optional;
/// the checker fills missing ones from the expected type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Lam(String, Option<Type>, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Proj1(Box<Term>),
    Proj2(Box<Term>),
    Star,
    /// `quo [x1:A1, ..] body`; no binders is the plain quotation.
    Quo(Vec<(String, Option<Type>)>, Box<Term>),
    /// `unq body with [args]`; no arguments is the plain unquotation.
    Unq(Box<Term>, Vec<Term>),
    /// `gbox x1, .. be N1, .. in body` of the Gentzen-style calculus.
    GBox(Vec<String>, Vec<Term>, Box<Term>),
    DBox(Box<Term>),
    DLet(String, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn lam(x: &str, body: Term) -> Term {
        Term::Lam(x.to_string(), None, Box::new(body))
    }

    pub fn lam_ann(x: &str, ty: Type, body: Term) -> Term {
        Term::Lam(x.to_string(), Some(ty), Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn proj1(t: Term) -> Term {
        Term::Proj1(Box::new(t))
    }

    pub fn proj2(t: Term) -> Term {
        Term::Proj2(Box::new(t))
    }

    pub fn quo(body: Term) -> Term {
        Term::Quo(Vec::new(), Box::new(body))
    }

    pub fn cquo(binders: Vec<(String, Option<Type>)>, body: Term) -> Term {
        Term::Quo(binders, Box::new(body))
    }

    pub fn unq(body: Term) -> Term {
        Term::Unq(Box::new(body), Vec::new())
    }

    pub fn cunq(body: Term, args: Vec<Term>) -> Term {
        Term::Unq(Box::new(body), args)
    }

    pub fn dbox(body: Term) -> Term {
        Term::DBox(Box::new(body))
    }

    pub fn dlet(u: &str, m: Term, n: Term) -> Term {
        Term::DLet(u.to_string(), Box::new(m), Box::new(n))
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Immediate subterms in child-index order: `Unq` lists its body before its
    /// arguments and `GBox` its arguments before its body.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) | Term::Star => vec![],
            Term::Lam(_, _, b) | Term::Proj1(b) | Term::Proj2(b) | Term::Quo(_, b) | Term::DBox(b) => {
                vec![b]
            }
            Term::App(a, b) | Term::Pair(a, b) | Term::DLet(_, a, b) => vec![a, b],
            Term::Unq(b, args) => std::iter::once(&**b).chain(args.iter()).collect(),
            Term::GBox(_, args, b) => args.iter().chain(std::iter::once(&**b)).collect(),
        }
    }

    pub fn child_mut(&mut self, i: usize) -> Option<&mut Term> {
        match self {
            Term::Var(_) | Term::Star => None,
            Term::Lam(_, _, b) | Term::Proj1(b) | Term::Proj2(b) | Term::Quo(_, b) | Term::DBox(b) => {
                (i == 0).then_some(&mut **b)
            }
            Term::App(a, b) | Term::Pair(a, b) | Term::DLet(_, a, b) => match i {
                0 => Some(&mut **a),
                1 => Some(&mut **b),
                _ => None,
            },
            Term::Unq(b, args) => {
                if i == 0 {
                    Some(&mut **b)
                } else {
                    args.get_mut(i - 1)
                }
            }
            Term::GBox(_, args, b) => {
                if i < args.len() {
                    args.get_mut(i)
                } else if i == args.len() {
                    Some(&mut **b)
                } else {
                    None
                }
            }
        }
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&Term> {
        path.iter().try_fold(self, |t, &i| t.children().get(i).copied())
    }

    /// Every name occurring anywhere in the term, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Lam(x, _, _) | Term::DLet(x, _, _) => {
                out.insert(x.clone());
            }
            Term::Quo(bs, _) => out.extend(bs.iter().map(|(x, _)| x.clone())),
            Term::GBox(xs, _, _) => out.extend(xs.iter().cloned()),
            _ => {}
        }
        for c in self.children() {
            c.all_names(out);
        }
    }

    /// Whether the term uses only the plain (non-contextual) box.
    pub fn is_plain(&self) -> bool {
        let here = match self {
            Term::Quo(bs, _) => bs.is_empty(),
            Term::Unq(_, args) => args.is_empty(),
            _ => true,
        };
        here && self.children().iter().all(|c| c.is_plain())
    }

    /// Drops level annotations from binder types.
    pub fn erase(&self) -> Term {
        self.map_annotations(&|t| t.erase())
    }

    /// The term with every binder annotation removed.
    pub fn unannotated(&self) -> Term {
        let go = |t: &Term| Box::new(t.unannotated());
        match self {
            Term::Lam(x, _, b) => Term::Lam(x.clone(), None, go(b)),
            Term::Quo(bs, b) => Term::Quo(bs.iter().map(|(x, _)| (x.clone(), None)).collect(), go(b)),
            Term::Var(_) | Term::Star => self.clone(),
            Term::App(a, b) => Term::App(go(a), go(b)),
            Term::Pair(a, b) => Term::Pair(go(a), go(b)),
            Term::Proj1(a) => Term::Proj1(go(a)),
            Term::Proj2(a) => Term::Proj2(go(a)),
            Term::Unq(b, args) => Term::Unq(go(b), args.iter().map(Term::unannotated).collect()),
            Term::GBox(xs, args, b) => Term::GBox(xs.clone(), args.iter().map(Term::unannotated).collect(), go(b)),
            Term::DBox(b) => Term::DBox(go(b)),
            Term::DLet(u, m, n) => Term::DLet(u.clone(), go(m), go(n)),
        }
    }

    pub fn map_annotations(&self, f: &dyn Fn(&Type) -> Type) -> Term {
        let go = |t: &Term| Box::new(t.map_annotations(f));
        match self {
            Term::Var(_) | Term::Star => self.clone(),
            Term::Lam(x, ty, b) => Term::Lam(x.clone(), ty.as_ref().map(f), go(b)),
            Term::App(a, b) => Term::App(go(a), go(b)),
            Term::Pair(a, b) => Term::Pair(go(a), go(b)),
            Term::Proj1(a) => Term::Proj1(go(a)),
            Term::Proj2(a) => Term::Proj2(go(a)),
            Term::Quo(bs, b) => Term::Quo(
                bs.iter().map(|(x, t)| (x.clone(), t.as_ref().map(f))).collect(),
                go(b),
            ),
            Term::Unq(b, args) => {
                Term::Unq(go(b), args.iter().map(|a| a.map_annotations(f)).collect())
            }
            Term::GBox(xs, args, b) => Term::GBox(
                xs.clone(),
                args.iter().map(|a| a.map_annotations(f)).collect(),
                go(b),
            ),
            Term::DBox(b) => Term::DBox(go(b)),
            Term::DLet(u, m, n) => Term::DLet(u.clone(), go(m), go(n)),
        }
    }
}

/// One compartment of a context stack: an ordered list of hypotheses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context(pub Vec<(String, Type)>);

impl Context {
    pub fn empty() -> Context {
        Context(Vec::new())
    }

    pub fn from_pairs(pairs: &[(&str, Type)]) -> Context {
        Context(pairs.iter().map(|(x, t)| (x.to_string(), t.clone())).collect())
    }

    /// Rightmost hypothesis named `x`.
    pub fn lookup(&self, x: &str) -> Option<&Type> {
        self.0.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn position(&self, x: &str) -> Option<usize> {
        self.0.iter().rposition(|(y, _)| y == x)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.0.iter().any(|(y, _)| y == x)
    }

    pub fn push(&mut self, x: &str, ty: Type) {
        self.0.push((x.to_string(), ty));
    }

    pub fn extended(&self, x: &str, ty: Type) -> Context {
        let mut c = self.clone();
        c.push(x, ty);
        c
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(x, _)| x.as_str())
    }

    pub fn types(&self) -> impl Iterator<Item = &Type> {
        self.0.iter().map(|(_, t)| t)
    }

    pub fn has_duplicates(&self) -> bool {
        let mut seen = BTreeSet::new();
        !self.0.iter().all(|(x, _)| seen.insert(x.as_str()))
    }

    pub fn erase(&self) -> Context {
        Context(self.0.iter().map(|(x, t)| (x.clone(), t.erase())).collect())
    }
}

/// A nonempty stack of contexts; `frames()[0]` is the leftmost, highest-level frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Stack(Vec<Context>);

impl Stack {
    pub fn single(ctx: Context) -> Stack {
        Stack(vec![ctx])
    }

    pub fn empty() -> Stack {
        Stack(vec![Context::empty()])
    }

    /// Returns `None` for an empty frame list.
    pub fn new(frames: Vec<Context>) -> Option<Stack> {
        (!frames.is_empty()).then_some(Stack(frames))
    }

    pub fn frames(&self) -> &[Context] {
        &self.0
    }

    pub fn height(&self) -> usize {
        self.0.len()
    }

    /// The rightmost frame.
    pub fn top(&self) -> &Context {
        self.0.last().expect("stack is nonempty")
    }

    pub fn top_mut(&mut self) -> &mut Context {
        self.0.last_mut().expect("stack is nonempty")
    }

    /// Frame at distance `j` from the right.
    pub fn frame(&self, j: usize) -> Option<&Context> {
        self.0.len().checked_sub(j + 1).map(|i| &self.0[i])
    }

    pub fn frame_mut(&mut self, j: usize) -> Option<&mut Context> {
        let n = self.0.len();
        n.checked_sub(j + 1).map(move |i| &mut self.0[i])
    }

    pub fn pushed(&self, ctx: Context) -> Stack {
        let mut s = self.clone();
        s.0.push(ctx);
        s
    }

    /// Drops the rightmost frame; `None` at height 1.
    pub fn popped(&self) -> Option<Stack> {
        (self.0.len() > 1).then(|| Stack(self.0[..self.0.len() - 1].to_vec()))
    }

    pub fn with_top_extended(&self, x: &str, ty: Type) -> Stack {
        let mut s = self.clone();
        s.top_mut().push(x, ty);
        s
    }

    pub fn erase(&self) -> Stack {
        Stack(self.0.iter().map(Context::erase).collect())
    }

    pub fn into_frames(self) -> Vec<Context> {
        self.0
    }
}

/// `stack |-^level term : ty`. Unleveled judgments have `level == None`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Judgment {
    pub stack: Stack,
    pub level: Option<Level>,
    pub term: Term,
    pub ty: Type,
}

impl Judgment {
    pub fn new(stack: Stack, level: u32, term: Term, ty: Type) -> Judgment {
        Judgment { stack, level: Some(Level(level)), term, ty }
    }

    pub fn unleveled(stack: Stack, term: Term, ty: Type) -> Judgment {
        Judgment { stack, level: None, term, ty }
    }

    /// Highest level mentioned by the stack.
    pub fn top_level(&self) -> Option<Level> {
        self.level.map(|l| l.offset(self.stack.height() as u32 - 1))
    }
}

/// Whether every type and frame obeys the level discipline of `j.level`.
pub fn well_formed(j: &Judgment) -> bool {
    let Some(l) = j.level else { return false };
    if j.ty.check_level() != Ok(l) {
        return false;
    }
    (0..j.stack.height()).all(|d| {
        let frame = j.stack.frame(d).expect("index within height");
        !frame.has_duplicates() && frame.types().all(|t| t.check_level() == Ok(l.offset(d as u32)))
    })
}

/// Removes the maximal run of leading empty frames, keeping at least one frame.
pub fn strip_pad(j: &Judgment) -> Judgment {
    let frames = j.stack.frames();
    let keep_from = frames
        .iter()
        .position(|c| !c.is_empty())
        .unwrap_or(frames.len() - 1)
        .min(frames.len() - 1);
    Judgment {
        stack: Stack(frames[keep_from..].to_vec()),
        level: j.level,
        term: j.term.clone(),
        ty: j.ty.clone(),
    }
}

/// Equality up to renaming of bound variables. Binder annotations must agree exactly.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    let mut scope = PairScope { frames: vec![Vec::new()] };
    scope.eq(a, b)
}

/// Frames of paired binder names, rightmost last. Popping past the bottom
/// materialises empty outer frames so free variables at any depth compare by name.
struct PairScope {
    frames: Vec<Vec<(String, String)>>,
}

impl PairScope {
    fn ensure_depth(&mut self, depth: usize) {
        while self.frames.len() <= depth {
            self.frames.insert(0, Vec::new());
        }
    }

    fn lookup(&self, x: &str, y: &str) -> bool {
        let top = self.frames.last().expect("nonempty");
        let ix = top.iter().rposition(|(a, _)| a == x);
        let iy = top.iter().rposition(|(_, b)| b == y);
        match (ix, iy) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        }
    }

    fn eq(&mut self, a: &Term, b: &Term) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => self.lookup(x, y),
            (Term::Star, Term::Star) => true,
            (Term::Lam(x, tx, ba), Term::Lam(y, ty, bb)) => {
                if tx != ty {
                    return false;
                }
                self.frames.last_mut().expect("nonempty").push((x.clone(), y.clone()));
                let r = self.eq(ba, bb);
                self.frames.last_mut().expect("nonempty").pop();
                r
            }
            (Term::App(a1, a2), Term::App(b1, b2)) | (Term::Pair(a1, a2), Term::Pair(b1, b2)) => {
                self.eq(a1, b1) && self.eq(a2, b2)
            }
            (Term::Proj1(a1), Term::Proj1(b1)) | (Term::Proj2(a1), Term::Proj2(b1)) => self.eq(a1, b1),
            (Term::Quo(xs, ba), Term::Quo(ys, bb)) => {
                if xs.len() != ys.len() || xs.iter().zip(ys).any(|((_, s), (_, t))| s != t) {
                    return false;
                }
                self.frames
                    .push(xs.iter().zip(ys).map(|((x, _), (y, _))| (x.clone(), y.clone())).collect());
                let r = self.eq(ba, bb);
                self.frames.pop();
                r
            }
            (Term::Unq(ba, aa), Term::Unq(bb, ab)) => {
                aa.len() == ab.len()
                    && aa.iter().zip(ab).all(|(s, t)| self.eq(s, t))
                    && self.under_pop(|sc| sc.eq(ba, bb))
            }
            (Term::DBox(ba), Term::DBox(bb)) => self.under_pop(|sc| sc.eq(ba, bb)),
            (Term::GBox(xs, aa, ba), Term::GBox(ys, ab, bb)) => {
                if xs.len() != ys.len() || aa.len() != ab.len() {
                    return false;
                }
                if !aa.iter().zip(ab).all(|(s, t)| self.eq(s, t)) {
                    return false;
                }
                self.frames.push(xs.iter().cloned().zip(ys.iter().cloned()).collect());
                let r = self.eq(ba, bb);
                self.frames.pop();
                r
            }
            (Term::DLet(u, ma, na), Term::DLet(v, mb, nb)) => {
                if !self.eq(ma, mb) {
                    return false;
                }
                self.ensure_depth(1);
                let i = self.frames.len() - 2;
                self.frames[i].push((u.clone(), v.clone()));
                let r = self.eq(na, nb);
                let i = self.frames.len() - 2;
                self.frames[i].pop();
                r
            }
            _ => false,
        }
    }

    fn under_pop(&mut self, f: impl FnOnce(&mut Self) -> bool) -> bool {
        self.ensure_depth(1);
        let top = self.frames.pop().expect("depth ensured");
        let r = f(self);
        self.frames.push(top);
        r
    }
}
