//! Denotations of judgments in finite co-Kleisli towers.
//!
//! Level `l` of a model of depth `D` over a monoid `M` is the co-Kleisli
//! category of `(-)^(M^(D-l))` on finite sets; level `D` is finite sets
//! themselves. A morphism `X -> Y` at level `l` is a table from histories
//! `M^(D-l) -> X` to `Y`. The box functor from level `l` to `l + 1` is the
//! identity on objects and precomposes with the inclusion of histories that
//! ignore their last coordinate.
//!
//! A judgment `G0; G1; ..; Gn |- M : A` whose leftmost frame sits at level
//! `L` denotes a level-`L` morphism `[[G0]] -> D([[A]])`, where
//! `D(X) = [G1, [G2, .. [Gn, X]]]` nests the exponentials of the levels below.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::checker::{Derivation, Rule};
use crate::fincat::{
    exp_apply, exp_encode, pair, power_comonad, unpair, Ccc, CoKleisli, FinError, FinMap, FinMonoid, FinSet, Functor, Mor, Shape,
};
use crate::kernel::{Context, Judgment, Stack, Term, Type};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("level {level} exceeds the model depth {depth}")]
    LevelExceedsDepth { level: u32, depth: u32 },
    #[error("base type `{0}` has no size in the model")]
    UnvaluedBase(String),
    #[error("`{0}` is not interpreted")]
    Unsupported(String),
    #[error("the derivation is not leveled")]
    Unleveled,
    #[error("judgments differ: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Fin(#[from] FinError),
}

type Result<T> = std::result::Result<T, SemanticsError>;

/// Sizes of base types, by name and optionally by level.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    sizes: BTreeMap<(String, Option<u32>), u64>,
}

impl Valuation {
    pub fn new() -> Valuation {
        Valuation::default()
    }

    /// `name` has `size` elements at every level.
    pub fn with(mut self, name: &str, size: u64) -> Valuation {
        self.sizes.insert((name.to_string(), None), size);
        self
    }

    pub fn with_at(mut self, name: &str, level: u32, size: u64) -> Valuation {
        self.sizes.insert((name.to_string(), Some(level)), size);
        self
    }

    pub fn size(&self, name: &str, level: u32) -> Option<u64> {
        self.sizes
            .get(&(name.to_string(), Some(level)))
            .or_else(|| self.sizes.get(&(name.to_string(), None)))
            .copied()
    }
}

impl From<&BTreeMap<String, u64>> for Valuation {
    fn from(sizes: &BTreeMap<String, u64>) -> Valuation {
        sizes.iter().fold(Valuation::new(), |v, (k, &n)| v.with(k, n))
    }
}

pub const DEFAULT_TABLE_LIMIT: u64 = 1 << 20;

pub const DEFAULT_WORK_LIMIT: u64 = 1 << 24;

const MEMO_LIMIT: usize = 1 << 19;

#[derive(Clone)]
pub struct Model {
    monoid: FinMonoid,
    depth: u32,
    valuation: Valuation,
    /// `levels[l]` is the category at level `l`.
    levels: Vec<Rc<dyn Ccc>>,
    /// `boxes[l]` goes from level `l` to level `l + 1`.
    boxes: Vec<Functor>,
    /// `histories[l]` indexes the histories at level `l`.
    histories: Vec<FinMonoid>,
    /// Most entries a denotation's nested tables may have together.
    pub table_limit: u64,
    /// Most term evaluations one denotation may take.
    pub work_limit: u64,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Model(|M| = {}, depth {}, {:?})", self.monoid.size(), self.depth, self.valuation)
    }
}

fn history_power(m: &FinMonoid, depth: u32, level: u32) -> u32 {
    if m.size() == 1 {
        0
    } else {
        depth - level
    }
}

fn level_category(m: &FinMonoid, power: u32) -> Result<Rc<dyn Ccc>> {
    if power == 0 {
        Ok(Rc::new(FinSet))
    } else {
        Ok(Rc::new(CoKleisli::new(power_comonad(&m.power(power)?)?)))
    }
}

/// Precomposition with the histories that ignore their last coordinate.
fn box_functor(m: &FinMonoid, power: u32, src: Rc<dyn Ccc>, tgt: Rc<dyn Ccc>) -> Functor {
    let name = format!("box from M^{power}");
    if power == 0 {
        return Functor::new(&name, src, tgt, Shape::clone, Mor::clone);
    }
    let k = m.size();
    let big = k.pow(power);
    let small = Shape::atom("M", big / k);
    let target = tgt.clone();
    Functor::new(&name, src, tgt, Shape::clone, move |f: &Mor| {
        let dom = target.hom_domain(&f.src);
        let (x, small, fm) = (f.src.clone(), small.clone(), f.map.clone());
        let map = FinMap::lazy(&dom, &f.tgt, move |u| {
            let history = exp_encode(
                &x,
                (0..big).map(|m| if power == 1 { u } else { exp_apply(&small, &x, u, m / k) }),
            );
            fm.apply(history)
        });
        Mor::new(&f.src, &f.tgt, map)
    })
}

pub fn build_model(monoid: &FinMonoid, depth: u32, valuation: Valuation) -> Result<Model> {
    monoid.check_laws()?;
    let levels = (0..=depth)
        .map(|l| level_category(monoid, history_power(monoid, depth, l)))
        .collect::<Result<Vec<_>>>()?;
    let boxes = (0..depth)
        .map(|l| {
            let power = history_power(monoid, depth, l);
            box_functor(monoid, power, levels[l as usize].clone(), levels[l as usize + 1].clone())
        })
        .collect();
    let histories = (0..=depth)
        .map(|l| monoid.power(history_power(monoid, depth, l)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Model { monoid: monoid.clone(), depth, valuation, levels, boxes, histories, table_limit: DEFAULT_TABLE_LIMIT, work_limit: DEFAULT_WORK_LIMIT })
}

impl Model {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn monoid(&self) -> &FinMonoid {
        &self.monoid
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn category(&self, level: u32) -> Result<Rc<dyn Ccc>> {
        self.levels
            .get(level as usize)
            .cloned()
            .ok_or(SemanticsError::LevelExceedsDepth { level, depth: self.depth })
    }

    /// The box functor from `level` to `level + 1`.
    pub fn box_functor(&self, level: u32) -> Result<&Functor> {
        self.boxes.get(level as usize).ok_or(SemanticsError::LevelExceedsDepth { level: level + 1, depth: self.depth })
    }

    fn cat(&self, level: u32) -> &dyn Ccc {
        self.levels[level as usize].as_ref()
    }

    fn boxed(&self, level: u32, f: &Mor) -> Mor {
        self.boxes[level as usize].fmap(f)
    }
}

pub fn interp_type(m: &Model, ty: &Type) -> Result<Shape> {
    let level = ty.level().ok_or(SemanticsError::Unleveled)?.0;
    if level > m.depth {
        return Err(SemanticsError::LevelExceedsDepth { level, depth: m.depth });
    }
    Ok(match ty {
        Type::Base { name, .. } => {
            Shape::atom(name, m.valuation.size(name, level).ok_or_else(|| SemanticsError::UnvaluedBase(name.clone()))?)
        }
        Type::Unit(_) => Shape::unit(),
        Type::Prod(a, b) => Shape::prod(&interp_type(m, a)?, &interp_type(m, b)?),
        Type::Arrow(a, b) => m.cat(level).exponential(&interp_type(m, a)?, &interp_type(m, b)?),
        Type::CBox(hyps, body) => {
            let below = level.checked_sub(1).ok_or(SemanticsError::Unleveled)?;
            m.cat(below).exponential(&interp_hyps(m, hyps)?, &interp_type(m, body)?)
        }
        Type::Dual(_) => return Err(SemanticsError::Unsupported(ty.to_string())),
    })
}

fn interp_hyps(m: &Model, hyps: &[Type]) -> Result<Shape> {
    Ok(Shape::tuple(&hyps.iter().map(|t| interp_type(m, t)).collect::<Result<Vec<_>>>()?))
}

pub fn interp_context(m: &Model, ctx: &Context) -> Result<Shape> {
    Ok(Shape::tuple(&ctx.types().map(|t| interp_type(m, t)).collect::<Result<Vec<_>>>()?))
}

/// The denotation of a judgment as an explicit table over the histories of
/// its leftmost context.
#[derive(Clone, Debug)]
pub struct Den {
    pub judgment: Judgment,
    /// Level of the leftmost frame, where the morphism lives.
    pub level: u32,
    pub source: Shape,
    pub target: Shape,
    pub morphism: FinMap,
}

impl Den {
    pub fn table(&self) -> Vec<u64> {
        self.morphism.to_table().expect("materialized")
    }

    /// One row per input history: the input and output in tuple notation.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| SemanticsError::Unsupported(format!("csv output: {e}"));
        w.write_record(["input", "output"]).map_err(io)?;
        let dom = self.morphism.dom().clone();
        for (x, y) in self.table().into_iter().enumerate() {
            w.write_record([dom.render(x as u64), self.target.render(y)]).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| SemanticsError::Unsupported(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("rendered elements are ASCII"))
    }
}

/// Interprets a derivation of the modal calculus without contextual forms.
pub fn interp_term(m: &Model, d: &Derivation) -> Result<Den> {
    Eval::new(m, false).den(d)
}

/// Interprets a derivation that may use contextual quotation and unquotation.
/// `[hyps] B` is the exponential of the level below, so `G; G' |- M : B` and
/// `G |- quo [G'] M : [G'] B` have the same table.
pub fn interp_contextual(m: &Model, d: &Derivation) -> Result<Den> {
    Eval::new(m, true).den(d)
}

/// The same denotation assembled from the structure of the level categories:
/// compositions, pairings, curryings and box functors. It encodes histories
/// of function spaces, so it reaches `TooLarge` long before the pointwise
/// evaluation does.
pub fn interp_by_combinators(m: &Model, d: &Derivation) -> Result<Den> {
    Interp { m, contextual: true }.den(d)
}

/// Outcome of comparing two denotations of the same judgment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Soundness {
    pub equal: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub point: u64,
    pub input: String,
    pub left: String,
    pub right: String,
}

pub fn check_soundness(m: &Model, d1: &Derivation, d2: &Derivation) -> Result<Soundness> {
    let (j1, j2) = (&d1.conclusion, &d2.conclusion);
    if j1.stack != j2.stack || j1.level != j2.level || j1.ty != j2.ty {
        return Err(SemanticsError::ShapeMismatch(format!("`{j1}` and `{j2}`")));
    }
    let (a, b) = (interp_contextual(m, d1)?, interp_contextual(m, d2)?);
    let (ta, tb) = (a.table(), b.table());
    let witness = ta.iter().zip(&tb).position(|(x, y)| x != y).map(|i| Witness {
        point: i as u64,
        input: a.morphism.dom().render(i as u64),
        left: a.target.render(ta[i]),
        right: b.target.render(tb[i]),
    });
    Ok(Soundness { equal: witness.is_none(), witness })
}

/// Least depth that interprets `j`: the level of its leftmost frame.
pub fn default_depth(j: &Judgment) -> Option<u32> {
    j.top_level().map(|l| l.0)
}

/// Pointwise evaluation. An environment holds one history per frame, the
/// leftmost first; the value of a term at an environment is the entry of its
/// denotation reached by applying the nested tables in turn.
struct Eval<'a> {
    m: &'a Model,
    contextual: bool,
    memo: RefCell<HashMap<(*const Derivation, Vec<u64>), u64>>,
    nodes: RefCell<HashMap<*const Derivation, Rc<Node>>>,
    work: Cell<u64>,
}

struct Node {
    reads: Vec<u64>,
    frames: Vec<Frame>,
}

/// Shapes of one frame: its components and their tuple.
struct Frame {
    parts: Vec<Shape>,
    tuple: Shape,
}

impl<'a> Eval<'a> {
    fn new(m: &'a Model, contextual: bool) -> Eval<'a> {
        Eval { m, contextual, memo: RefCell::new(HashMap::new()), nodes: RefCell::new(HashMap::new()), work: Cell::new(0) }
    }

    fn histories(&self, level: u32) -> &FinMonoid {
        &self.m.histories[level as usize]
    }

    /// Histories of `x` at `level`, checked to have an index.
    fn hist(&self, level: u32, x: &Shape) -> Result<Shape> {
        let t = self.m.cat(level).hom_domain(x);
        t.try_size()?;
        Ok(t)
    }

    fn at_unit(&self, level: u32, x: &Shape, u: u64) -> u64 {
        let p = self.histories(level);
        exp_apply(&p.carrier(), x, u, p.unit())
    }

    /// The history `b |-> u(a b)`.
    fn shift(&self, level: u32, x: &Shape, u: u64, a: u64) -> u64 {
        let p = self.histories(level);
        let c = p.carrier();
        exp_encode(x, (0..p.size()).map(|b| exp_apply(&c, x, u, p.mul(a, b))))
    }

    fn frame(&self, ctx: &Context) -> Result<Frame> {
        let parts: Vec<Shape> = ctx.types().map(|t| interp_type(self.m, t)).collect::<Result<_>>()?;
        let tuple = Shape::tuple(&parts);
        tuple.try_size()?;
        Ok(Frame { parts, tuple })
    }

    fn den(&self, d: &Derivation) -> Result<Den> {
        let j = &d.conclusion;
        let level = j.level.ok_or(SemanticsError::Unleveled)?.0;
        let h = j.stack.height();
        let top = level + h as u32 - 1;
        if top > self.m.depth {
            return Err(SemanticsError::LevelExceedsDepth { level: top, depth: self.m.depth });
        }
        let frames = j.stack.frames().iter().map(|c| self.frame(c)).collect::<Result<Vec<_>>>()?;
        // nested[i] is the object of the tables over frames i.. in turn
        let mut nested = vec![interp_type(self.m, &j.ty)?];
        for (i, f) in frames.iter().enumerate().skip(1).rev() {
            let inner = self.m.cat(top - i as u32).exponential(&f.tuple, &nested[0]);
            inner.try_size()?;
            nested.insert(0, inner);
        }
        let dom = self.hist(top, &frames[0].tuple)?;
        let n = dom.try_size()?;
        let mut entries = 1u64;
        for (i, f) in frames.iter().enumerate() {
            entries = entries.saturating_mul(self.hist(top - i as u32, &f.tuple)?.try_size()?);
        }
        if entries > self.m.table_limit {
            return Err(FinError::TooLarge(format!("a table of {entries} entries over {dom}")).into());
        }
        let mut env = Vec::with_capacity(h);
        let table = (0..n)
            .map(|u| {
                env.push(u);
                let v = self.tabulate(d, top, &frames, &nested, &mut env);
                env.pop();
                v
            })
            .collect::<Result<Vec<_>>>()?;
        let target = nested[0].clone();
        let morphism = FinMap::table(&dom, &target, table)?;
        Ok(Den { judgment: j.clone(), level: top, source: frames[0].tuple.clone(), target, morphism })
    }

    fn tabulate(&self, d: &Derivation, top: u32, frames: &[Frame], nested: &[Shape], env: &mut Vec<u64>) -> Result<u64> {
        let i = env.len();
        if i == frames.len() {
            return self.value(d, env);
        }
        let t = self.hist(top - i as u32, &frames[i].tuple)?;
        let mut digits = Vec::new();
        for u in 0..t.try_size()? {
            env.push(u);
            digits.push(self.tabulate(d, top, frames, nested, env)?);
            env.pop();
        }
        Ok(exp_encode(&nested[i], digits))
    }

    /// The variables `d` reads, as one bit mask per frame, with the shapes
    /// of its frames.
    fn node(&self, d: &Derivation) -> Result<Rc<Node>> {
        let ptr = d as *const Derivation;
        if let Some(n) = self.nodes.borrow().get(&ptr) {
            return Ok(n.clone());
        }
        let stack = &d.conclusion.stack;
        if stack.frames().iter().any(|f| f.len() >= 64) {
            return Err(SemanticsError::Unsupported("a context of 64 or more variables".into()));
        }
        let h = stack.height();
        let mut reads = vec![0u64; h];
        if d.rule == Rule::Var {
            let Term::Var(x) = &d.conclusion.term else { unreachable!("Var rule on a non-variable") };
            reads[h - 1] = 1 << stack.top().position(x).expect("checked variable");
        }
        for p in &d.premises {
            let inner = self.node(p)?;
            for (i, r) in reads.iter_mut().enumerate() {
                // a binder is the last variable of the premise's frame
                let own = stack.frames()[i].len();
                *r |= inner.reads.get(i).map_or(0, |m| m & ((1 << own) - 1));
            }
        }
        let frames = stack.frames().iter().map(|c| self.frame(c)).collect::<Result<Vec<_>>>()?;
        let level = d.conclusion.level.ok_or(SemanticsError::Unleveled)?.0;
        for (i, f) in frames.iter().enumerate() {
            self.hist(level + (h - 1 - i) as u32, &f.tuple)?;
        }
        interp_type(self.m, &d.conclusion.ty)?.try_size()?;
        let n = Rc::new(Node { reads, frames });
        self.nodes.borrow_mut().insert(ptr, n.clone());
        Ok(n)
    }

    /// What `d` can observe of `env`: for each frame and each history point,
    /// the components it reads.
    fn observed(&self, d: &Derivation, env: &[u64]) -> Result<Vec<u64>> {
        let node = self.node(d)?;
        let top = d.conclusion.level.ok_or(SemanticsError::Unleveled)?.0 + env.len() as u32 - 1;
        let mut key = Vec::new();
        for (i, (&u, f)) in env.iter().zip(&node.frames).enumerate() {
            let mask = node.reads[i];
            if mask == 0 {
                continue;
            }
            if mask.count_ones() as usize == f.parts.len() {
                key.push(u);
                continue;
            }
            let p = self.histories(top - i as u32);
            let c = p.carrier();
            for m in 0..p.size() {
                let vals = components(&f.parts, exp_apply(&c, &f.tuple, u, m));
                key.extend(vals.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, &v)| v));
            }
        }
        Ok(key)
    }

    fn value(&self, d: &Derivation, env: &[u64]) -> Result<u64> {
        let key = (d as *const Derivation, self.observed(d, env)?);
        if let Some(&v) = self.memo.borrow().get(&key) {
            return Ok(v);
        }
        self.work.set(self.work.get() + 1);
        if self.work.get() > self.m.work_limit {
            return Err(FinError::TooLarge(format!("evaluating `{}`", d.conclusion.term)).into());
        }
        let v = self.compute(d, env)?;
        let mut memo = self.memo.borrow_mut();
        if memo.len() >= MEMO_LIMIT {
            memo.clear();
        }
        memo.insert(key, v);
        Ok(v)
    }

    fn compute(&self, d: &Derivation, env: &[u64]) -> Result<u64> {
        let j = &d.conclusion;
        let level = j.level.ok_or(SemanticsError::Unleveled)?.0;
        let h = env.len();
        let last = env[h - 1];
        let with_last = |u: u64| {
            let mut e = env.to_vec();
            e[h - 1] = u;
            e
        };
        Ok(match d.rule {
            Rule::Var => {
                let Term::Var(x) = &j.term else { unreachable!("Var rule on a non-variable") };
                let inner = self.frame(j.stack.top())?;
                let idx = j.stack.top().position(x).expect("checked variable");
                component(&inner.parts, self.at_unit(level, &inner.tuple, last), idx)
            }
            Rule::Abs => {
                let Type::Arrow(dom, cod) = &j.ty else { unreachable!("Abs at a non-arrow type") };
                let (a, b) = (interp_type(self.m, dom)?, interp_type(self.m, cod)?);
                interp_type(self.m, &j.ty)?.try_size()?;
                let inner = self.frame(j.stack.top())?;
                let mut digits = Vec::new();
                for v in 0..self.hist(level, &a)?.try_size()? {
                    let u = self.snoc(level, &inner, &a, last, v)?;
                    digits.push(self.value(&d.premises[0], &with_last(u))?);
                }
                exp_encode(&b, digits)
            }
            Rule::App => {
                let a = interp_type(self.m, d.premises[1].ty())?;
                let inner = self.frame(j.stack.top())?;
                let arg = self.history_of(level, &a, |m| {
                    self.value(&d.premises[1], &with_last(self.shift(level, &inner.tuple, last, m)))
                })?;
                let head = &d.premises[0];
                if head.rule == Rule::Abs {
                    // the one entry of the abstraction's table that is needed
                    self.value(&head.premises[0], &with_last(self.snoc(level, &inner, &a, last, arg)?))?
                } else {
                    let b = interp_type(self.m, &j.ty)?;
                    exp_apply(&self.hist(level, &a)?, &b, self.value(head, env)?, arg)
                }
            }
            Rule::Pair => {
                let b = interp_type(self.m, d.premises[1].ty())?;
                pair(&b, self.value(&d.premises[0], env)?, self.value(&d.premises[1], env)?)
            }
            Rule::Proj1 | Rule::Proj2 => {
                let Type::Prod(_, b) = d.premises[0].ty() else { unreachable!("projection of a non-product") };
                let (x, y) = unpair(&interp_type(self.m, b)?, self.value(&d.premises[0], env)?);
                if d.rule == Rule::Proj1 {
                    x
                } else {
                    y
                }
            }
            Rule::Star => 0,
            Rule::Quo | Rule::CQuo if d.rule == Rule::Quo || self.contextual => {
                let premise = &d.premises[0];
                let below = self.frame(premise.conclusion.stack.top())?;
                let a = interp_type(self.m, premise.ty())?;
                let mut e = env.to_vec();
                e.push(0);
                let mut digits = Vec::new();
                for w in 0..self.hist(level - 1, &below.tuple)?.try_size()? {
                    e[h] = w;
                    digits.push(self.value(premise, &e)?);
                }
                exp_encode(&a, digits)
            }
            // a table over the single history of the empty context
            Rule::Unq => match &d.premises[0] {
                q if q.rule == Rule::Quo => self.value(&q.premises[0], &[&env[..h - 1], &[0]].concat())?,
                body => self.value(body, &env[..h - 1])?,
            },
            Rule::CUnq if self.contextual => {
                let head = &d.premises[0];
                let Type::CBox(hyps, _) = d.premises[0].ty() else { unreachable!("unquotation of a non-box") };
                let hyps: Vec<Shape> = hyps.iter().map(|t| interp_type(self.m, t)).collect::<Result<_>>()?;
                let ht = Shape::tuple(&hyps);
                let a = interp_type(self.m, &j.ty)?;
                let inner = self.frame(j.stack.top())?;
                let arg = self.history_of(level, &ht, |m| {
                    let e = with_last(self.shift(level, &inner.tuple, last, m));
                    let vals = d.premises[1..].iter().map(|n| self.value(n, &e)).collect::<Result<Vec<_>>>()?;
                    Ok(tuple_encode(&hyps, &vals))
                })?;
                if head.rule == Rule::CQuo {
                    self.value(&head.premises[0], &[&env[..h - 1], &[arg]].concat())?
                } else {
                    exp_apply(&self.hist(level, &ht)?, &a, self.value(head, &env[..h - 1])?, arg)
                }
            }
            other => return Err(SemanticsError::Unsupported(format!("the {other} rule"))),
        })
    }

    /// The history `m |-> at(m)` of an element of `x`.
    fn history_of(&self, level: u32, x: &Shape, at: impl Fn(u64) -> Result<u64>) -> Result<u64> {
        self.hist(level, x)?;
        let digits = (0..self.histories(level).size()).map(at).collect::<Result<Vec<_>>>()?;
        Ok(exp_encode(x, digits))
    }

    /// Extends each entry of the history `u` of a frame with the matching
    /// entry of the history `v` of `a`.
    fn snoc(&self, level: u32, frame: &Frame, a: &Shape, u: u64, v: u64) -> Result<u64> {
        let mut parts = frame.parts.clone();
        parts.push(a.clone());
        let extended = Shape::tuple(&parts);
        let c = self.histories(level).carrier();
        self.history_of(level, &extended, |m| {
            let mut vals = components(&frame.parts, exp_apply(&c, &frame.tuple, u, m));
            vals.push(exp_apply(&c, a, v, m));
            Ok(tuple_encode(&parts, &vals))
        })
    }
}

fn components(parts: &[Shape], mut code: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(parts.len());
    for i in 0..parts.len() {
        let (x, rest) = unpair(&Shape::tuple(&parts[i + 1..]), code);
        out.push(x);
        code = rest;
    }
    out
}

fn component(parts: &[Shape], code: u64, idx: usize) -> u64 {
    components(parts, code)[idx]
}

fn tuple_encode(parts: &[Shape], vals: &[u64]) -> u64 {
    (0..parts.len()).rev().fold(0, |acc, i| pair(&Shape::tuple(&parts[i + 1..]), vals[i], acc))
}

struct Interp<'a> {
    m: &'a Model,
    contextual: bool,
}

/// Categorical operations at one level. Each one first checks that the
/// histories it will encode have a `u64` index.
struct Level<'a> {
    cat: &'a dyn Ccc,
}

impl Level<'_> {
    fn fits(&self, x: &Shape) -> Result<()> {
        self.cat.hom_domain(x).try_size()?;
        Ok(())
    }

    fn compose(&self, g: &Mor, f: &Mor) -> Result<Mor> {
        self.cat.hom_domain(&self.cat.hom_domain(&f.src)).try_size()?;
        self.fits(&g.src)?;
        Ok(self.cat.compose(g, f))
    }

    fn curry(&self, f: &Mor) -> Result<Mor> {
        self.fits(&f.src)?;
        let (_, x) = f.src.factors().expect("curry of a map out of a product");
        self.cat.exponential(x, &f.tgt).try_size()?;
        Ok(self.cat.curry(f))
    }

    fn eval(&self, x: &Shape, y: &Shape) -> Result<Mor> {
        let e = self.cat.exponential(x, y);
        e.try_size()?;
        self.fits(&Shape::prod(&e, x))?;
        Ok(self.cat.eval(x, y))
    }

    fn exponential(&self, x: &Shape, y: &Shape) -> Result<Shape> {
        let e = self.cat.exponential(x, y);
        e.try_size()?;
        Ok(e)
    }

    fn pairing(&self, f: &Mor, g: &Mor) -> Mor {
        self.cat.pairing(f, g)
    }

    fn proj1(&self, x: &Shape, y: &Shape) -> Mor {
        self.cat.proj1(x, y)
    }

    fn proj2(&self, x: &Shape, y: &Shape) -> Mor {
        self.cat.proj2(x, y)
    }

    fn identity(&self, x: &Shape) -> Mor {
        self.cat.identity(x)
    }

    fn bang(&self, x: &Shape) -> Mor {
        self.cat.bang(x)
    }
}

impl Interp<'_> {
    fn at(&self, level: u32) -> Level<'_> {
        Level { cat: self.m.cat(level) }
    }

    /// The box functor from `level`, applied to `f`.
    fn boxed(&self, level: u32, f: &Mor) -> Result<Mor> {
        self.at(level).fits(&f.src)?;
        self.at(level + 1).fits(&f.src)?;
        Ok(self.m.boxed(level, f))
    }

    fn den(&self, d: &Derivation) -> Result<Den> {
        let j = &d.conclusion;
        let level = j.level.ok_or(SemanticsError::Unleveled)?.0;
        let top = level + j.stack.height() as u32 - 1;
        if top > self.m.depth {
            return Err(SemanticsError::LevelExceedsDepth { level: top, depth: self.m.depth });
        }
        let mor = self.mor(d)?;
        Ok(Den {
            judgment: j.clone(),
            level: top,
            source: mor.src.clone(),
            target: mor.tgt.clone(),
            morphism: mor.map,
        })
    }

    fn frames(&self, stack: &Stack) -> Result<Vec<Shape>> {
        stack.frames().iter().map(|c| interp_context(self.m, c)).collect()
    }

    /// `D(x)` for the frames below the leftmost one, `x` at the bottom level.
    fn delta_obj(&self, top: u32, below: &[Shape], x: &Shape) -> Result<Shape> {
        let mut acc = x.clone();
        for (i, g) in below.iter().enumerate().rev() {
            acc = self.at(top - 1 - i as u32).exponential(g, &acc)?;
        }
        Ok(acc)
    }

    /// `D(g)`, for `g` at level `top - below.len()`.
    fn under(&self, top: u32, below: &[Shape], g: Mor) -> Result<Mor> {
        let mut h = g;
        for (i, frame) in below.iter().enumerate().rev() {
            let k = top - 1 - i as u32;
            let c = self.at(k);
            let post = c.curry(&c.compose(&h, &c.eval(frame, &h.src)?)?)?;
            h = self.boxed(k, &post)?;
        }
        Ok(h)
    }

    /// `D(x) x D(y) -> D(x x y)`.
    fn phi(&self, top: u32, below: &[Shape], x: &Shape, y: &Shape) -> Result<Mor> {
        let base = top - below.len() as u32;
        let (mut dx, mut dy) = (x.clone(), y.clone());
        let mut acc = self.at(base).identity(&Shape::prod(x, y));
        for (i, frame) in below.iter().enumerate().rev() {
            let k = top - 1 - i as u32;
            let c = self.at(k);
            let pairs = self.hom_pair(k, frame, &dx, &dy)?;
            let post = c.curry(&c.compose(&acc, &c.eval(frame, &Shape::prod(&dx, &dy))?)?)?;
            acc = self.boxed(k, &c.compose(&post, &pairs)?)?;
            dx = c.exponential(frame, &dx)?;
            dy = c.exponential(frame, &dy)?;
        }
        Ok(acc)
    }

    /// `[g, x] x [g, y] -> [g, x x y]` at level `k`.
    fn hom_pair(&self, k: u32, g: &Shape, x: &Shape, y: &Shape) -> Result<Mor> {
        let c = self.at(k);
        let (ex, ey) = (c.exponential(g, x)?, c.exponential(g, y)?);
        let both = Shape::prod(&ex, &ey);
        let p1 = c.proj1(&both, g);
        let arg = c.proj2(&both, g);
        let left = c.compose(&c.eval(g, x)?, &c.pairing(&c.compose(&c.proj1(&ex, &ey), &p1)?, &arg))?;
        let right = c.compose(&c.eval(g, y)?, &c.pairing(&c.compose(&c.proj2(&ex, &ey), &p1)?, &arg))?;
        c.curry(&c.pairing(&left, &right))
    }

    /// `tuple(gs) x a -> tuple(gs ++ [a])` at level `k`.
    fn snoc(&self, k: u32, gs: &[Shape], a: &Shape) -> Result<Mor> {
        let c = self.at(k);
        let t = Shape::tuple(gs);
        Ok(match gs.split_first() {
            None => c.pairing(&c.proj2(&t, a), &c.bang(&Shape::prod(&t, a))),
            Some((g, rest)) => {
                let rt = Shape::tuple(rest);
                let p1 = c.proj1(&t, a);
                let head = c.compose(&c.proj1(g, &rt), &p1)?;
                let tail = c.pairing(&c.compose(&c.proj2(g, &rt), &p1)?, &c.proj2(&t, a));
                c.pairing(&head, &c.compose(&self.snoc(k, rest, a)?, &tail)?)
            }
        })
    }

    /// The unique map into a one-element object.
    fn terminal(&self, level: u32, src: &Shape, tgt: &Shape) -> Result<Mor> {
        debug_assert_eq!(tgt.size(), Some(1));
        let dom = self.m.cat(level).hom_domain(src);
        dom.try_size()?;
        Ok(Mor::new(src, tgt, FinMap::lazy(&dom, tgt, |_| 0)))
    }

    fn ty(&self, t: &Type) -> Result<Shape> {
        interp_type(self.m, t)
    }

    fn types(&self, ctx: &Context) -> Result<Vec<Shape>> {
        ctx.types().map(|t| self.ty(t)).collect()
    }

    fn premise(&self, d: &Derivation, i: usize) -> Result<Mor> {
        self.mor(&d.premises[i])
    }

    fn mor(&self, d: &Derivation) -> Result<Mor> {
        let j = &d.conclusion;
        let level = j.level.ok_or(SemanticsError::Unleveled)?.0;
        let h = j.stack.height();
        let top = level + h as u32 - 1;
        let gs = self.frames(&j.stack)?;
        self.at(top).fits(&gs[0])?;
        let below = &gs[1..];
        let middle = if h >= 2 { &gs[1..h - 1] } else { &gs[1..] };
        let c = self.at(top);
        let raw = match d.rule {
            Rule::Var if h == 1 => {
                let Term::Var(x) = &j.term else { unreachable!("Var rule on a non-variable") };
                let types = self.types(j.stack.top())?;
                let idx = j.stack.top().position(x).expect("checked variable");
                let mut acc = c.identity(&gs[0]);
                for i in 0..idx {
                    acc = c.compose(&c.proj2(&types[i], &Shape::tuple(&types[i + 1..])), &acc)?;
                }
                c.compose(&c.proj1(&types[idx], &Shape::tuple(&types[idx + 1..])), &acc)?
            }
            Rule::Var => {
                let lower = Judgment { stack: Stack::new(j.stack.frames()[1..].to_vec()).expect("nonempty"), ..j.clone() };
                let low = self.mor(&Derivation { rule: Rule::Var, conclusion: lower, premises: vec![] })?;
                let c1 = self.at(top - 1);
                let name = c1.curry(&c1.compose(&low, &c1.proj2(&Shape::unit(), &gs[1]))?)?;
                c.compose(&self.boxed(top - 1, &name)?, &c.bang(&gs[0]))?
            }
            Rule::Abs => {
                let Type::Arrow(dom, cod) = &j.ty else { unreachable!("Abs at a non-arrow type") };
                let (a, b) = (self.ty(dom)?, self.ty(cod)?);
                let body = self.premise(d, 0)?;
                let inner = self.types(&j.stack.frames()[h - 1])?;
                if h == 1 {
                    c.curry(&c.compose(&body, &self.snoc(top, &inner, &a)?)?)?
                } else {
                    let cl = self.at(level);
                    let g = Shape::tuple(&inner);
                    let mut extended = inner.clone();
                    extended.push(a.clone());
                    let extended = Shape::tuple(&extended);
                    let e = cl.exponential(&extended, &b)?;
                    let eg = Shape::prod(&e, &g);
                    let p1 = cl.proj1(&eg, &a);
                    let fun = cl.compose(&cl.proj1(&e, &g), &p1)?;
                    let args = cl.pairing(&cl.compose(&cl.proj2(&e, &g), &p1)?, &cl.proj2(&eg, &a));
                    let arg = cl.compose(&self.snoc(level, &inner, &a)?, &args)?;
                    let applied = cl.compose(&cl.eval(&extended, &b)?, &cl.pairing(&fun, &arg))?;
                    let iso = cl.curry(&cl.curry(&applied)?)?;
                    c.compose(&self.under(top, middle, self.boxed(level, &iso)?)?, &body)?
                }
            }
            Rule::App => {
                let (f, x) = (self.premise(d, 0)?, self.premise(d, 1)?);
                let a = self.ty(d.premises[1].ty())?;
                let b = self.ty(&j.ty)?;
                let cl = self.at(level);
                let ab = cl.exponential(&a, &b)?;
                let paired = c.compose(&self.phi(top, below, &ab, &a)?, &c.pairing(&f, &x))?;
                c.compose(&self.under(top, below, cl.eval(&a, &b)?)?, &paired)?
            }
            Rule::Pair => {
                let (x, y) = (self.premise(d, 0)?, self.premise(d, 1)?);
                let (a, b) = (self.ty(d.premises[0].ty())?, self.ty(d.premises[1].ty())?);
                c.compose(&self.phi(top, below, &a, &b)?, &c.pairing(&x, &y))?
            }
            Rule::Proj1 | Rule::Proj2 => {
                let p = self.premise(d, 0)?;
                let Type::Prod(a, b) = d.premises[0].ty() else { unreachable!("projection of a non-product") };
                let (a, b) = (self.ty(a)?, self.ty(b)?);
                let cl = self.at(level);
                let pi = if d.rule == Rule::Proj1 { cl.proj1(&a, &b) } else { cl.proj2(&a, &b) };
                c.compose(&self.under(top, below, pi)?, &p)?
            }
            Rule::Star => self.terminal(top, &gs[0], &self.delta_obj(top, below, &Shape::unit())?)?,
            Rule::Quo => self.premise(d, 0)?,
            Rule::CQuo if self.contextual => self.premise(d, 0)?,
            Rule::Unq => {
                let body = self.premise(d, 0)?;
                let a = self.ty(&j.ty)?;
                let cl = self.at(level);
                let one = Shape::unit();
                let g = &gs[h - 1];
                let e = cl.exponential(&one, &a)?;
                let weaken = cl.pairing(&cl.proj1(&e, g), &cl.compose(&cl.bang(g), &cl.proj2(&e, g))?);
                let restrict = cl.curry(&cl.compose(&cl.eval(&one, &a)?, &weaken)?)?;
                c.compose(&self.under(top, middle, self.boxed(level, &restrict)?)?, &body)?
            }
            Rule::CUnq if self.contextual => self.contextual_unquote(d, top, level, &gs)?,
            other => return Err(SemanticsError::Unsupported(format!("the {other} rule"))),
        };
        debug_assert_eq!(raw.src, gs[0]);
        debug_assert_eq!(Ok(raw.tgt.clone()), self.delta_obj(top, below, &self.ty(&j.ty)?));
        self.materialize(raw)
    }

    fn contextual_unquote(&self, d: &Derivation, top: u32, level: u32, gs: &[Shape]) -> Result<Mor> {
        let h = gs.len();
        let middle = &gs[1..h - 1];
        let (c, cl) = (self.at(top), self.at(level));
        let body = self.premise(d, 0)?;
        let Type::CBox(hyps, _) = d.premises[0].ty() else { unreachable!("contextual unquotation of a non-box") };
        let hyps: Vec<Shape> = hyps.iter().map(|t| self.ty(t)).collect::<Result<_>>()?;
        let a = self.ty(&d.conclusion.ty)?;
        let g = &gs[h - 1];

        // the arguments, as one element of [g, tuple(hyps)]
        let unit_hom = cl.exponential(g, &Shape::unit())?;
        let mut args = self.terminal(top, &gs[0], &self.delta_obj(top, middle, &unit_hom)?)?;
        for i in (0..hyps.len()).rev() {
            let n = self.premise(d, i + 1)?;
            let rest = Shape::tuple(&hyps[i + 1..]);
            let (ea, er) = (cl.exponential(g, &hyps[i])?, cl.exponential(g, &rest)?);
            let paired = c.compose(&self.phi(top, middle, &ea, &er)?, &c.pairing(&n, &args))?;
            let hp = self.boxed(level, &self.hom_pair(level, g, &hyps[i], &rest)?)?;
            args = self.materialize(c.compose(&self.under(top, middle, hp)?, &paired)?)?;
        }

        let ht = Shape::tuple(&hyps);
        let (ef, eg) = (cl.exponential(&ht, &a)?, cl.exponential(g, &ht)?);
        let both = Shape::prod(&ef, &eg);
        let p1 = cl.proj1(&both, g);
        let inner = cl.compose(
            &cl.eval(g, &ht)?,
            &cl.pairing(&cl.compose(&cl.proj2(&ef, &eg), &p1)?, &cl.proj2(&both, g)),
        )?;
        let outer = cl.compose(&cl.eval(&ht, &a)?, &cl.pairing(&cl.compose(&cl.proj1(&ef, &eg), &p1)?, &inner))?;
        let compose = self.boxed(level, &cl.curry(&outer)?)?;
        let paired = c.compose(&self.phi(top, middle, &ef, &eg)?, &c.pairing(&body, &args))?;
        c.compose(&self.under(top, middle, compose)?, &paired)
    }

    fn materialize(&self, f: Mor) -> Result<Mor> {
        let n = f.map.dom().try_size()?;
        f.tgt.try_size()?;
        if n > self.m.table_limit {
            return Err(FinError::TooLarge(format!("a table over {}", f.map.dom())).into());
        }
        Ok(Mor::new(&f.src, &f.tgt, f.map.materialized()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{attach_levels, check, Mode};
    use crate::fincat::{check_functor_laws, comparison_is_normal, Budget};
    use crate::syntax::parse_judgment;

    fn derive(src: &str) -> Derivation {
        let raw = parse_judgment(src).unwrap();
        let j = attach_levels(&raw.unleveled(), raw.level.unwrap()).unwrap();
        check(Mode::Fitch, &j).unwrap()
    }

    fn model(m: FinMonoid, depth: u32, a: u64) -> Model {
        build_model(&m, depth, Valuation::new().with("A", a).with("B", a)).unwrap()
    }

    #[test]
    fn levels_and_box_functors() {
        let triv = model(FinMonoid::trivial(), 2, 2);
        let x = Shape::atom("X", 3);
        for l in 0..=2 {
            assert_eq!(triv.category(l).unwrap().hom_domain(&x), x);
        }
        let z = model(FinMonoid::z2(), 1, 2);
        assert_eq!(z.category(0).unwrap().hom_domain(&x).size(), Some(9));
        assert_eq!(z.category(1).unwrap().hom_domain(&x), x);
        let z = model(FinMonoid::z2(), 2, 2);
        let objs: Vec<Shape> = (1..=2).map(|k| Shape::atom("X", k)).collect();
        for l in 0..2 {
            let f = z.box_functor(l).unwrap();
            assert!(comparison_is_normal(f, &objs).unwrap().normal);
            let r = check_functor_laws(f, &objs, &Budget::default());
            assert!(r.all_pass(), "{r}");
        }
    }

    #[test]
    fn type_cardinalities() {
        let m = model(FinMonoid::z2(), 1, 2);
        let arrow = |l| Type::arrow(Type::base("A", l), Type::base("A", l));
        assert_eq!(interp_type(&m, &arrow(0)).unwrap().size(), Some(16));
        assert_eq!(interp_type(&m, &arrow(1)).unwrap().size(), Some(4));
        assert_eq!(interp_type(&m, &Type::Unit(Some(crate::kernel::Level(0)))).unwrap().size(), Some(1));
        let boxed = interp_type(&m, &Type::boxed(Type::base("A", 0))).unwrap();
        assert_eq!(boxed, m.category(0).unwrap().exponential(&Shape::unit(), &Shape::atom("A", 2)));
        assert_eq!(boxed.size(), Some(2));
        assert_eq!(
            interp_type(&m, &Type::base("A", 2)),
            Err(SemanticsError::LevelExceedsDepth { level: 2, depth: 1 })
        );
        assert_eq!(interp_type(&m, &Type::base("C", 0)), Err(SemanticsError::UnvaluedBase("C".into())));
    }

    /// `x:A |- \y. y x` against its meaning: the history of `x` fed to the
    /// current value of `y`.
    #[test]
    fn curried_evaluation_by_brute_force() {
        let d = derive("x : A |- \\y. y x : (A -> B) -> B @ 0");
        let (a, b) = (2u64, 2u64);

        let plain = interp_term(&model(FinMonoid::trivial(), 0, 2), &d).unwrap();
        let mut oracle = Vec::new();
        for x in 0..a {
            // the argument y ranges over B^A, most significant digit first
            let digits: Vec<u64> = (0..b.pow(a as u32)).map(|y| (y / b.pow((a - 1 - x) as u32)) % b).collect();
            oracle.push(digits.iter().fold(0, |acc, &v| acc * b + v));
        }
        assert_eq!(plain.table(), oracle);

    }

    /// `x:A, f:A->B |- f x` over Z2: the current value of `f` applied to the
    /// whole history of `x`.
    #[test]
    fn application_by_brute_force() {
        let d = derive("x : A, f : A -> B |- f x : B @ 0");
        let den = interp_term(&model(FinMonoid::z2(), 1, 2), &d).unwrap();
        // a context value is x * 16 + f, a history is (now, shifted) in base 32
        let mut oracle = Vec::new();
        for u in 0..32u64 * 32 {
            let (now, shifted) = (u / 32, u % 32);
            let (x0, f0) = (now / 16, now % 16);
            let x1 = shifted / 16;
            let arg = x0 * 2 + x1;
            oracle.push((f0 >> (3 - arg)) & 1);
        }
        assert_eq!(den.table(), oracle);
    }

    #[test]
    fn quoted_identity_selects_the_identity() {
        let m = model(FinMonoid::z2(), 1, 2);
        let d = derive(". |- quo (\\x. x) : [](A -> A) @ 1");
        let den = interp_term(&m, &d).unwrap();
        assert_eq!(den.morphism.dom().size(), Some(1));
        let c0 = m.category(0).unwrap();
        let id = c0.identity(&Shape::atom("A", 2)).map.code().unwrap();
        assert_eq!(den.table(), vec![id]);
    }

    #[test]
    fn necessitation_is_the_identity_on_tables() {
        for depth in 1..=2 {
            let m = model(FinMonoid::z2(), depth, 2);
            assert_eq!(interp_type(&m, &Type::arrow(Type::base("A", 0), Type::base("A", 0))).unwrap().size(), Some(1u64 << (1u64 << (1u64 << depth))));
            let low = derive(". |- \\x. (\\y. y) x : A -> A @ 0");
            let high = derive(". |- quo (\\x. (\\y. y) x) : [](A -> A) @ 1");
            let low = interp_term(&m, &low).unwrap();
            let high = interp_term(&m, &high).unwrap();
            assert_eq!(low.table(), high.table());
        }
    }

    #[test]
    fn contextual_quotation_is_transparent() {
        let m = model(FinMonoid::z2(), 1, 2);
        let open = derive(". ; x : A |- x : A @ 0");
        let quoted = derive(". |- quo [x : A] x : [A]A @ 1");
        let a = interp_contextual(&m, &open).unwrap();
        let b = interp_contextual(&m, &quoted).unwrap();
        assert_eq!(a.table(), b.table());
        assert!(matches!(interp_term(&m, &quoted), Err(SemanticsError::Unsupported(_))));
    }

    #[test]
    fn sound_and_unsound_pairs() {
        let z = model(FinMonoid::z2(), 1, 2);
        let pairs = [
            ("p : [](A -> B) ; . |- unq (quo (\\x. (unq p) x)) : A -> B @ 0", "p : [](A -> B) ; . |- unq p : A -> B @ 0"),
            ("p : []A |- quo (unq p) : []A @ 1", "p : []A |- p : []A @ 1"),
            ("f : A -> B |- \\x. f x : A -> B @ 0", "f : A -> B |- f : A -> B @ 0"),
            (
                "f : [](A -> B), a : []A |- quo ((\\y. (unq f) y) (unq a)) : []B @ 1",
                "f : [](A -> B), a : []A |- quo ((unq f) (unq a)) : []B @ 1",
            ),
            ("a : A, b : B |- (\\p. fst p) (a, b) : A @ 0", "a : A, b : B |- a : A @ 0"),
            ("u : Unit |- u : Unit @ 0", "u : Unit |- () : Unit @ 0"),
        ];
        for (l, r) in pairs {
            let (dl, dr) = (derive(l), derive(r));
            for m in [&z, &model(FinMonoid::trivial(), 2, 2)] {
                let s = check_soundness(m, &dl, &dr).unwrap();
                assert!(s.equal, "{l} vs {r}: {:?}", s.witness);
            }
        }
        let id = derive("y : A |- \\x. x : A -> A @ 0");
        let k = derive("y : A |- \\x. y : A -> A @ 0");
        let s = check_soundness(&z, &id, &k).unwrap();
        assert!(!s.equal && s.witness.is_some());
        let first = derive(". |- \\x. \\y. x : A -> A -> A @ 0");
        let second = derive(". |- \\x. \\y. y : A -> A -> A @ 0");
        assert!(!check_soundness(&model(FinMonoid::trivial(), 0, 2), &first, &second).unwrap().equal);
        assert!(matches!(check_soundness(&z, &id, &first), Err(SemanticsError::ShapeMismatch(_))));
    }

    #[test]
    fn pointwise_evaluation_matches_the_combinators() {
        let cases = [
            "x : A |- \\y. y x : (A -> B) -> B @ 0",
            "x : A, f : A -> B |- f x : B @ 0",
            "a : A, b : B |- (\\p. snd p) (a, b) : B @ 0",
            "p : [](A -> B) ; a : A |- (unq p) a : B @ 0",
            "f : [](A -> B), a : []A |- quo ((unq f) (unq a)) : []B @ 1",
            ". |- quo [x : A] x : [A]A @ 1",
            "p : [A]B ; y : A |- unq p with [y] : B @ 0",
            "p : [A, B](A * B) ; y : B, x : A |- unq p with [x, y] : A * B @ 0",
            "u : Unit ; . ; x : A |- x : A @ 0",
        ];
        let models = [
            model(FinMonoid::trivial(), 2, 2),
            model(FinMonoid::z2(), 1, 2),
            model(FinMonoid::z2(), 2, 1),
            model(FinMonoid::z2(), 2, 2),
        ];
        let mut compared = 0;
        for src in cases {
            let d = derive(src);
            for m in &models {
                let direct = interp_contextual(m, &d);
                match interp_by_combinators(m, &d) {
                    Ok(c) => {
                        assert_eq!(direct.unwrap().table(), c.table(), "{src} in {m:?}");
                        compared += 1;
                    }
                    Err(SemanticsError::Fin(FinError::TooLarge(_))) => {}
                    Err(SemanticsError::LevelExceedsDepth { .. }) => assert!(direct.is_err()),
                    Err(e) => panic!("{src}: {e}"),
                }
            }
        }
        assert!(compared >= 20, "{compared}");
    }

    #[test]
    fn csv_rows() {
        let d = derive("x : A |- x : A @ 0");
        let den = interp_term(&model(FinMonoid::trivial(), 0, 2), &d).unwrap();
        assert_eq!(den.to_csv().unwrap(), "input,output\n\"(0,())\",0\n\"(1,())\",1\n");
    }
}
