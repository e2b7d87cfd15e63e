//! Finite sets and maps as explicit tables, and the categorical structure
//! built over them: the monoid-power comonad, co-Kleisli categories and their
//! liftings, normal functors and change of base.
//!
//! Elements of a finite set are indices `0..size`. Products are ordered
//! lexicographically, and a function `f : X -> Y` is the mixed-radix number
//! whose most significant digit is `f(0)`.

mod comonad;
mod functor;
mod monoid;
mod set;

use std::fmt;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use comonad::{
    check_cokleisli_ccc, check_comonad_axioms, compare_lift_with_composite, composite, lift_comonad, power_comonad,
    CoKleisli, Comonad,
};
pub use functor::{
    change_of_base, check_enriched_laws, check_ff_equivalence, check_functor_laws, comparison_at, comparison_is_normal, identity_functor,
    normal_underlying_functor, power_endofunctor, self_enriched, underlying_iso, Comparison, EnrichedCat,
    FfReport, Functor,
};
pub use monoid::FinMonoid;
pub use set::FinSet;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FinError {
    #[error("monoid law violated: {0}")]
    MonoidLawViolation(String),
    #[error("monoidal functor law violated: {0}")]
    MonoidalLawViolation(String),
    #[error("law failure: {0}")]
    LawFailure(String),
    #[error("the set {0} has too many elements to index")]
    TooLarge(String),
    #[error("malformed table: {0}")]
    BadTable(String),
    /// Morphisms of the category are not tables over their source.
    #[error("{0} does not tabulate morphisms over their source")]
    Untabulated(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Shape(Rc<Node>);

#[derive(PartialEq, Eq, Hash)]
struct Node {
    kind: Kind,
    size: Option<u64>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Kind {
    Atom(String, u64),
    Unit,
    Prod(Shape, Shape),
    /// `Exp(dom, cod)`: all functions from `dom` to `cod`.
    Exp(Shape, Shape),
}

impl Shape {
    fn make(kind: Kind) -> Shape {
        let size = match &kind {
            Kind::Atom(_, n) => Some(*n),
            Kind::Unit => Some(1),
            Kind::Prod(a, b) => a.size().and_then(|x| b.size().and_then(|y| x.checked_mul(y))),
            Kind::Exp(a, b) => a
                .size()
                .and_then(|x| b.size().and_then(|y| u32::try_from(x).ok().and_then(|x| y.checked_pow(x)))),
        };
        Shape(Rc::new(Node { kind, size }))
    }

    pub fn atom(label: &str, size: u64) -> Shape {
        Shape::make(Kind::Atom(label.to_string(), size))
    }

    pub fn unit() -> Shape {
        Shape::make(Kind::Unit)
    }

    pub fn prod(a: &Shape, b: &Shape) -> Shape {
        Shape::make(Kind::Prod(a.clone(), b.clone()))
    }

    pub fn exp(dom: &Shape, cod: &Shape) -> Shape {
        Shape::make(Kind::Exp(dom.clone(), cod.clone()))
    }

    /// Right-nested product ending in `Unit`.
    pub fn tuple(parts: &[Shape]) -> Shape {
        parts.iter().rev().fold(Shape::unit(), |acc, p| Shape::prod(p, &acc))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// `None` when the cardinality does not fit in a `u64`.
    pub fn size(&self) -> Option<u64> {
        self.0.size
    }

    pub fn try_size(&self) -> Result<u64, FinError> {
        self.size().ok_or_else(|| FinError::TooLarge(self.to_string()))
    }

    /// Size of a shape known to be indexable.
    fn n(&self) -> u64 {
        self.size().unwrap_or_else(|| panic!("{self} is too large to index"))
    }

    pub fn factors(&self) -> Option<(&Shape, &Shape)> {
        match self.kind() {
            Kind::Prod(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn exponent(&self) -> Option<(&Shape, &Shape)> {
        match self.kind() {
            Kind::Exp(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Renders an element in nested tuple and table notation.
    pub fn render(&self, e: u64) -> String {
        match self.kind() {
            Kind::Atom(..) => e.to_string(),
            Kind::Unit => "()".into(),
            Kind::Prod(a, b) => {
                let (x, y) = unpair(b, e);
                format!("({},{})", a.render(x), b.render(y))
            }
            Kind::Exp(a, b) => {
                let digits: Vec<String> = (0..a.n()).map(|i| b.render(exp_apply(a, b, e, i))).collect();
                format!("[{}]", digits.join(" "))
            }
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Kind::Atom(l, n) => write!(f, "{l}{n}"),
            Kind::Unit => f.write_str("1"),
            Kind::Prod(a, b) => write!(f, "({a} x {b})"),
            Kind::Exp(a, b) => write!(f, "({a} => {b})"),
        }
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn pair(right: &Shape, x: u64, y: u64) -> u64 {
    x * right.n() + y
}

pub fn unpair(right: &Shape, e: u64) -> (u64, u64) {
    let n = right.n();
    (e / n, e % n)
}

/// The value at `point` of the function `code : dom -> cod`.
pub fn exp_apply(dom: &Shape, cod: &Shape, code: u64, point: u64) -> u64 {
    let c = cod.n();
    let shift = dom.n() - 1 - point;
    (code / c.pow(shift as u32)) % c
}

/// Encodes the function whose values on `0..len` are `digits`.
pub fn exp_encode(cod: &Shape, digits: impl IntoIterator<Item = u64>) -> u64 {
    let c = cod.n();
    digits.into_iter().fold(0, |acc, d| acc * c + d)
}

#[derive(Clone)]
enum Body {
    Table(Rc<[u64]>),
    Lazy(Rc<dyn Fn(u64) -> u64>),
}

/// A total function between finite sets, stored as a table or computed on demand.
#[derive(Clone)]
pub struct FinMap {
    dom: Shape,
    cod: Shape,
    body: Body,
}

impl FinMap {
    pub fn table(dom: &Shape, cod: &Shape, table: Vec<u64>) -> Result<FinMap, FinError> {
        let n = dom.try_size()?;
        let m = cod.try_size()?;
        if table.len() as u64 != n {
            return Err(FinError::BadTable(format!("{} entries for a domain of {n}", table.len())));
        }
        if let Some(bad) = table.iter().find(|&&v| v >= m) {
            return Err(FinError::BadTable(format!("value {bad} outside a codomain of {m}")));
        }
        Ok(FinMap { dom: dom.clone(), cod: cod.clone(), body: Body::Table(table.into()) })
    }

    pub fn lazy(dom: &Shape, cod: &Shape, f: impl Fn(u64) -> u64 + 'static) -> FinMap {
        FinMap { dom: dom.clone(), cod: cod.clone(), body: Body::Lazy(Rc::new(f)) }
    }

    /// The function encoded as an element of `dom => cod`.
    pub fn from_code(dom: &Shape, cod: &Shape, code: u64) -> FinMap {
        let (d, c) = (dom.clone(), cod.clone());
        FinMap::lazy(dom, cod, move |x| exp_apply(&d, &c, code, x))
    }

    pub fn dom(&self) -> &Shape {
        &self.dom
    }

    pub fn cod(&self) -> &Shape {
        &self.cod
    }

    pub fn apply(&self, x: u64) -> u64 {
        match &self.body {
            Body::Table(t) => t[x as usize],
            Body::Lazy(f) => f(x),
        }
    }

    /// `self` after `first`.
    pub fn after(&self, first: &FinMap) -> FinMap {
        debug_assert_eq!(first.cod, self.dom);
        let (g, f) = (self.clone(), first.clone());
        FinMap::lazy(&first.dom, &self.cod, move |x| g.apply(f.apply(x)))
    }

    pub fn to_table(&self) -> Result<Vec<u64>, FinError> {
        let n = self.dom.try_size()?;
        if n > MATERIALIZE_LIMIT {
            return Err(FinError::TooLarge(self.dom.to_string()));
        }
        Ok((0..n).map(|x| self.apply(x)).collect())
    }

    pub fn materialized(&self) -> Result<FinMap, FinError> {
        match self.body {
            Body::Table(_) => Ok(self.clone()),
            Body::Lazy(_) => FinMap::table(&self.dom, &self.cod, self.to_table()?),
        }
    }

    /// The element of `dom => cod` encoding this map.
    pub fn code(&self) -> Result<u64, FinError> {
        Shape::exp(&self.dom, &self.cod).try_size()?;
        Ok(exp_encode(&self.cod, (0..self.dom.n()).map(|x| self.apply(x))))
    }

    /// Changes one output, for mutation tests.
    pub fn mutated(&self, at: u64) -> FinMap {
        let f = self.clone();
        let m = self.cod.n();
        FinMap::lazy(&self.dom, &self.cod, move |x| if x == at { (f.apply(x) + 1) % m } else { f.apply(x) })
    }
}

impl fmt::Debug for FinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinMap({} -> {})", self.dom, self.cod)
    }
}

const MATERIALIZE_LIMIT: u64 = 1 << 24;

/// A morphism `src -> tgt` of some category, with its underlying table whose
/// domain is the category's `hom_domain(src)`.
#[derive(Clone, Debug)]
pub struct Mor {
    pub src: Shape,
    pub tgt: Shape,
    pub map: FinMap,
}

impl Mor {
    pub fn new(src: &Shape, tgt: &Shape, map: FinMap) -> Mor {
        Mor { src: src.clone(), tgt: tgt.clone(), map }
    }

    pub fn relabel(&self, src: &Shape) -> Mor {
        Mor { src: src.clone(), tgt: self.tgt.clone(), map: self.map.clone() }
    }
}

/// How much of a finite quantifier to enumerate before sampling.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    /// Domains up to this size are compared point by point.
    pub exhaustive_points: u64,
    /// Random points compared on larger domains.
    pub sample_points: usize,
    /// Hom-sets up to this size are enumerated in full.
    pub exhaustive_morphisms: u64,
    /// Random morphisms drawn from larger hom-sets.
    pub sample_morphisms: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            exhaustive_points: 1 << 16,
            sample_points: 2048,
            exhaustive_morphisms: 512,
            sample_morphisms: 24,
            seed: 0x1b0c,
        }
    }
}

/// Outcome of comparing two maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Agreement {
    Equal { exhaustive: bool, points: u64 },
    Differ { point: u64, left: u64, right: u64 },
}

impl Agreement {
    pub fn holds(&self) -> bool {
        matches!(self, Agreement::Equal { .. })
    }
}

/// Points of `dom` to test: all of them, or a seeded sample.
pub fn points(dom: &Shape, budget: &Budget, salt: u64) -> (bool, Vec<u64>) {
    match dom.size() {
        Some(n) if n <= budget.exhaustive_points => (true, (0..n).collect()),
        Some(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ salt);
            let mut pts: Vec<u64> = (0..budget.sample_points).map(|_| rng.gen_range(0..n)).collect();
            pts.push(0);
            pts.push(n - 1);
            (false, pts)
        }
        None => panic!("{dom} is too large to index"),
    }
}

pub fn agree(a: &FinMap, b: &FinMap, budget: &Budget) -> Agreement {
    if a.dom != b.dom || a.cod != b.cod {
        return Agreement::Differ { point: 0, left: 0, right: 0 };
    }
    let (exhaustive, pts) = points(&a.dom, budget, 0);
    for &p in &pts {
        let (x, y) = (a.apply(p), b.apply(p));
        if x != y {
            return Agreement::Differ { point: p, left: x, right: y };
        }
    }
    Agreement::Equal { exhaustive, points: pts.len() as u64 }
}

/// Every map `dom -> cod` if there are few enough, otherwise a seeded sample.
pub fn maps(dom: &Shape, cod: &Shape, budget: &Budget, salt: u64) -> (bool, Vec<FinMap>) {
    let hom = Shape::exp(dom, cod);
    match hom.size() {
        Some(count) if count <= budget.exhaustive_morphisms => {
            (true, (0..count).map(|c| FinMap::from_code(dom, cod, c)).collect())
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ salt.rotate_left(17));
            let n = dom.n();
            let m = cod.n();
            let out = (0..budget.sample_morphisms)
                .map(|_| {
                    let t: Vec<u64> = (0..n).map(|_| rng.gen_range(0..m)).collect();
                    FinMap::table(dom, cod, t).expect("in range")
                })
                .collect();
            (false, out)
        }
    }
}

/// A category whose morphisms are finite tables.
pub trait Category {
    fn name(&self) -> String;
    /// The set a morphism out of `x` is tabulated over.
    fn hom_domain(&self, x: &Shape) -> Shape;
    fn identity(&self, x: &Shape) -> Mor;
    /// `g` after `f`.
    fn compose(&self, g: &Mor, f: &Mor) -> Mor;
}

/// Cartesian closed structure. Products are `Shape::prod` and the terminal
/// object is `Shape::unit` in every instance.
pub trait Ccc: Category {
    fn proj1(&self, x: &Shape, y: &Shape) -> Mor;
    fn proj2(&self, x: &Shape, y: &Shape) -> Mor;
    fn pairing(&self, f: &Mor, g: &Mor) -> Mor;
    fn bang(&self, x: &Shape) -> Mor;
    fn exponential(&self, x: &Shape, y: &Shape) -> Shape;
    /// `[x, y] x x -> y`.
    fn eval(&self, x: &Shape, y: &Shape) -> Mor;
    /// Curries `f : z x x -> y` into `z -> [x, y]`.
    fn curry(&self, f: &Mor) -> Mor;

    /// All morphisms `x -> y`, or a sample.
    fn homs(&self, x: &Shape, y: &Shape, budget: &Budget, salt: u64) -> (bool, Vec<Mor>) {
        let (all, ms) = maps(&self.hom_domain(x), y, budget, salt);
        (all, ms.into_iter().map(|m| Mor::new(x, y, m)).collect())
    }

    fn times(&self, f: &Mor, g: &Mor) -> Mor {
        let p1 = self.proj1(&f.src, &g.src);
        let p2 = self.proj2(&f.src, &g.src);
        self.pairing(&self.compose(f, &p1), &self.compose(g, &p2))
    }
}

pub fn mor_agree(a: &Mor, b: &Mor, budget: &Budget) -> Agreement {
    if a.src != b.src || a.tgt != b.tgt {
        return Agreement::Differ { point: 0, left: 0, right: 0 };
    }
    agree(&a.map, &b.map, budget)
}

/// One checked equation.
#[derive(Clone, Debug)]
pub struct LawCheck {
    pub law: String,
    pub at: String,
    pub outcome: Agreement,
}

#[derive(Clone, Debug, Default)]
pub struct LawReport {
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn record(&mut self, law: &str, at: impl fmt::Display, outcome: Agreement) {
        self.checks.push(LawCheck { law: law.to_string(), at: at.to_string(), outcome });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.outcome.holds())
    }

    pub fn failures(&self) -> Vec<&LawCheck> {
        self.checks.iter().filter(|c| !c.outcome.holds()).collect()
    }

    pub fn extend(&mut self, other: LawReport) {
        self.checks.extend(other.checks);
    }

    /// Whether every check was exhaustive.
    pub fn exhaustive(&self) -> bool {
        self.checks.iter().all(|c| matches!(c.outcome, Agreement::Equal { exhaustive: true, .. }))
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = match &c.outcome {
                Agreement::Equal { exhaustive: true, points } => format!("pass ({points} points)"),
                Agreement::Equal { exhaustive: false, points } => format!("pass ({points} sampled points)"),
                Agreement::Differ { point, left, right } => format!("FAIL at point {point}: {left} vs {right}"),
            };
            writeln!(f, "{:<40} {:<28} {status}", c.law, c.at)?;
        }
        Ok(())
    }
}

pub(crate) fn truth(b: bool) -> Agreement {
    if b {
        Agreement::Equal { exhaustive: true, points: 1 }
    } else {
        Agreement::Differ { point: 0, left: 1, right: 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encodings_are_lexicographic() {
        let two = Shape::atom("A", 2);
        let three = Shape::atom("B", 3);
        assert_eq!(Shape::prod(&two, &three).size(), Some(6));
        assert_eq!(Shape::exp(&two, &three).size(), Some(9));
        assert_eq!(unpair(&three, pair(&three, 1, 2)), (1, 2));
        let code = exp_encode(&three, [2, 0]);
        assert_eq!(code, 6);
        assert_eq!(exp_apply(&two, &three, code, 0), 2);
        assert_eq!(exp_apply(&two, &three, code, 1), 0);
        assert_eq!(Shape::exp(&two, &three).render(code), "[2 0]");
        assert_eq!(FinMap::from_code(&two, &three, code).code().unwrap(), code);
        assert_eq!(Shape::exp(&Shape::atom("A", 64), &three).size(), None);
    }

    #[test]
    fn tables_are_validated() {
        let two = Shape::atom("A", 2);
        assert!(FinMap::table(&two, &two, vec![0]).is_err());
        assert!(FinMap::table(&two, &two, vec![0, 2]).is_err());
        let m = FinMap::table(&two, &two, vec![1, 0]).unwrap();
        assert_eq!(agree(&m, &m.after(&m).after(&m), &Budget::default()), Agreement::Equal { exhaustive: true, points: 2 });
        assert!(!agree(&m, &m.mutated(1), &Budget::default()).holds());
    }
}
