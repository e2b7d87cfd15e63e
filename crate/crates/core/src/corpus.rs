//! Seeded random generation of well-typed leveled judgments.
//!
//! Terms are built type-directed, with a bias towards redexes of every kind
//! so that reduction, normalization and the semantics all get exercised.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checker::{check, Derivation, Mode};
use crate::kernel::{Context, Judgment, Stack, Term, Type};
use crate::rewrite::{eta_long, normalize, redexes, step, DEFAULT_BUDGET};

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub max_nodes: usize,
    pub max_level: u32,
    /// Whether to generate contextual quotation and unquotation.
    pub contextual: bool,
    pub bases: Vec<String>,
    /// Nesting depth of generated types.
    pub type_depth: u32,
}

impl Default for CorpusConfig {
    fn default() -> CorpusConfig {
        CorpusConfig {
            max_nodes: 30,
            max_level: 2,
            contextual: true,
            bases: vec!["A".into(), "B".into()],
            type_depth: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub judgment: Judgment,
    pub derivation: Derivation,
}

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub samples: Vec<Sample>,
    /// Generated judgments the checker refused.
    pub rejected: Vec<(Judgment, String)>,
}

/// Generates `count` checked samples from `seed`.
pub fn generate(seed: u64, count: usize, config: &CorpusConfig) -> Corpus {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), config, next: 0 };
    let mut corpus = Corpus::default();
    while corpus.samples.len() < count {
        let Some(j) = g.judgment() else { continue };
        match check(Mode::Fitch, &j) {
            Ok(derivation) => corpus.samples.push(Sample { judgment: j, derivation }),
            Err(e) => corpus.rejected.push((j, e.to_string())),
        }
    }
    corpus
}

/// Two terms that are βη-equal at a judgment.
#[derive(Clone, Debug)]
pub struct EqPair {
    pub judgment: Judgment,
    pub lhs: Term,
    pub rhs: Term,
}

impl EqPair {
    pub fn sides(&self) -> (Judgment, Judgment) {
        (
            Judgment { term: self.lhs.clone(), ..self.judgment.clone() },
            Judgment { term: self.rhs.clone(), ..self.judgment.clone() },
        )
    }
}

/// For each sample: the term against a one-step reduct, and the term against
/// its η-long normal form.
pub fn beta_eta_pairs(samples: &[Sample], seed: u64) -> Vec<EqPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for s in samples {
        let j = &s.judgment;
        if let Some(site) = redexes(&j.term).choose(&mut rng) {
            if let Ok(r) = step(&j.term, site) {
                out.push(EqPair { judgment: j.clone(), lhs: j.term.clone(), rhs: r });
            }
        }
        if let Ok(n) = normalize(&j.term, DEFAULT_BUDGET) {
            let long = eta_long(&n, &j.ty, &j.stack);
            out.push(EqPair { judgment: j.clone(), lhs: j.term.clone(), rhs: long });
        }
    }
    out
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    config: &'a CorpusConfig,
    next: usize,
}

impl Gen<'_> {
    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }

    fn base(&mut self, level: u32) -> Type {
        let name = self.config.bases.choose(&mut self.rng).expect("at least one base").clone();
        Type::base(&name, level)
    }

    fn ty(&mut self, level: u32, depth: u32) -> Type {
        if depth == 0 {
            return if self.rng.gen_ratio(1, 8) { Type::Unit(Some(crate::kernel::Level(level))) } else { self.base(level) };
        }
        match self.rng.gen_range(0..10) {
            0..=3 => self.base(level),
            4 => Type::Unit(Some(crate::kernel::Level(level))),
            5 | 6 => Type::arrow(self.ty(level, depth - 1), self.ty(level, depth - 1)),
            7 => Type::prod(self.ty(level, depth - 1), self.ty(level, depth - 1)),
            _ if level == 0 => Type::arrow(self.base(level), self.ty(level, depth - 1)),
            _ => {
                let hyps = if self.config.contextual && self.rng.gen_bool(0.4) {
                    (0..self.rng.gen_range(1..=2)).map(|_| self.ty(level - 1, 0)).collect()
                } else {
                    Vec::new()
                };
                Type::cbox(hyps, self.ty(level - 1, depth - 1))
            }
        }
    }

    fn judgment(&mut self) -> Option<Judgment> {
        let max = self.config.max_level;
        let level = self.rng.gen_range(0..=max);
        let height = self.rng.gen_range(1..=(max - level + 1).min(3)) as usize;
        let mut frames = Vec::with_capacity(height);
        for i in 0..height {
            let l = level + (height - 1 - i) as u32;
            let mut ctx = Context::empty();
            for b in self.config.bases.clone() {
                if self.rng.gen_bool(0.7) {
                    let x = self.fresh("x");
                    ctx.push(&x, Type::base(&b, l));
                }
            }
            if l >= 1 && self.rng.gen_bool(0.5) {
                let p = self.fresh("p");
                let body = self.base(l - 1);
                ctx.push(&p, Type::boxed(body));
            }
            for _ in 0..self.rng.gen_range(0..=2) {
                let f = self.fresh("f");
                let t = self.ty(l, self.config.type_depth);
                ctx.push(&f, t);
            }
            frames.push(ctx);
        }
        let stack = Stack::new(frames)?;
        let ty = self.ty(level, self.config.type_depth);
        let fuel = self.rng.gen_range(4..=self.config.max_nodes);
        let term = self.term(&stack, level, &ty, fuel)?;
        (term.size() <= self.config.max_nodes).then(|| Judgment::new(stack, level, term, ty))
    }

    fn term(&mut self, stack: &Stack, level: u32, ty: &Type, fuel: usize) -> Option<Term> {
        if fuel > 2 {
            for _ in 0..4 {
                if let Some(t) = self.elim(stack, level, ty, fuel) {
                    return Some(t);
                }
            }
        }
        let vars: Vec<String> =
            stack.top().0.iter().filter(|(_, t)| t == ty).map(|(x, _)| x.clone()).collect();
        if let Some(x) = vars.choose(&mut self.rng) {
            if fuel <= 2 || self.rng.gen_bool(0.5) {
                return Some(Term::var(x));
            }
        }
        self.intro(stack, level, ty, fuel.saturating_sub(1))
    }

    fn intro(&mut self, stack: &Stack, level: u32, ty: &Type, fuel: usize) -> Option<Term> {
        match ty {
            Type::Arrow(a, b) => {
                let x = self.fresh("v");
                let body = self.term(&stack.with_top_extended(&x, (**a).clone()), level, b, fuel)?;
                Some(Term::lam_ann(&x, (**a).clone(), body))
            }
            Type::Prod(a, b) => {
                let left = self.term(stack, level, a, fuel / 2)?;
                let right = self.term(stack, level, b, fuel / 2)?;
                Some(Term::pair(left, right))
            }
            Type::Unit(_) => Some(Term::Star),
            Type::CBox(hyps, b) => {
                let names: Vec<String> = hyps.iter().map(|_| self.fresh("y")).collect();
                let frame = Context(names.iter().cloned().zip(hyps.iter().cloned()).collect());
                let body = self.term(&stack.pushed(frame), level - 1, b, fuel)?;
                Some(if hyps.is_empty() {
                    Term::quo(body)
                } else {
                    Term::cquo(names.into_iter().zip(hyps.iter().cloned().map(Some)).collect(), body)
                })
            }
            Type::Base { .. } => {
                let outer = stack.popped()?;
                let want = Type::boxed(ty.clone());
                let boxes: Vec<String> =
                    outer.top().0.iter().filter(|(_, t)| *t == want).map(|(x, _)| x.clone()).collect();
                boxes.choose(&mut self.rng).map(|p| Term::unq(Term::var(p)))
            }
            Type::Dual(_) => None,
        }
    }

    fn elim(&mut self, stack: &Stack, level: u32, ty: &Type, fuel: usize) -> Option<Term> {
        let rest = fuel - 1;
        match self.rng.gen_range(0..8) {
            0 | 1 => {
                let a = self.ty(level, 1);
                let x = self.fresh("v");
                let body = self.term(&stack.with_top_extended(&x, a.clone()), level, ty, rest * 2 / 3)?;
                let arg = self.term(stack, level, &a, rest / 3)?;
                Some(Term::app(Term::lam_ann(&x, a, body), arg))
            }
            2 => {
                let other = self.ty(level, 0);
                let first = self.rng.gen_bool(0.5);
                let here = self.term(stack, level, ty, rest * 2 / 3)?;
                let there = self.term(stack, level, &other, rest / 3)?;
                Some(if first {
                    Term::proj1(Term::pair(here, there))
                } else {
                    Term::proj2(Term::pair(there, here))
                })
            }
            3 | 4 => {
                let outer = stack.popped()?;
                let body = self.term(&outer, level + 1, &Type::boxed(ty.clone()), rest)?;
                Some(Term::unq(body))
            }
            5 if self.config.contextual => {
                let outer = stack.popped()?;
                let hyps: Vec<Type> = (0..self.rng.gen_range(1..=2)).map(|_| self.ty(level, 0)).collect();
                let body = self.term(&outer, level + 1, &Type::cbox(hyps.clone(), ty.clone()), rest / 2)?;
                let args = hyps
                    .iter()
                    .map(|h| self.term(stack, level, h, rest / (2 * hyps.len())))
                    .collect::<Option<Vec<_>>>()?;
                Some(Term::cunq(body, args))
            }
            6 => {
                let fs: Vec<(String, Type)> = stack
                    .top()
                    .0
                    .iter()
                    .filter(|(_, t)| matches!(t, Type::Arrow(_, b) if b.as_ref() == ty))
                    .cloned()
                    .collect();
                let (f, fty) = fs.choose(&mut self.rng)?.clone();
                let Type::Arrow(a, _) = fty else { unreachable!("filtered") };
                Some(Term::app(Term::var(&f), self.term(stack, level, &a, rest)?))
            }
            _ => {
                let ps: Vec<(String, bool)> = stack
                    .top()
                    .0
                    .iter()
                    .filter_map(|(x, t)| match t {
                        Type::Prod(a, _) if a.as_ref() == ty => Some((x.clone(), true)),
                        Type::Prod(_, b) if b.as_ref() == ty => Some((x.clone(), false)),
                        _ => None,
                    })
                    .collect();
                let (p, first) = ps.choose(&mut self.rng)?.clone();
                Some(if first { Term::proj1(Term::var(&p)) } else { Term::proj2(Term::var(&p)) })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::Rule;
    use crate::rewrite::equal_theory;

    #[test]
    fn samples_check_and_stay_small() {
        let c = generate(7, 300, &CorpusConfig::default());
        assert!(c.rejected.is_empty(), "{:?}", c.rejected.first());
        assert!(c.samples.iter().all(|s| s.judgment.term.size() <= 30));
        assert!(c.samples.iter().any(|s| s.judgment.level.unwrap().0 == 2));
        let rules: std::collections::HashSet<Rule> =
            c.samples.iter().flat_map(|s| s.derivation.nodes()).map(|d| d.rule).collect();
        for r in [Rule::Abs, Rule::App, Rule::Quo, Rule::Unq, Rule::CQuo, Rule::CUnq, Rule::Proj1, Rule::Star] {
            assert!(rules.contains(&r), "{r}");
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let a = generate(3, 20, &CorpusConfig::default());
        let b = generate(3, 20, &CorpusConfig::default());
        let terms = |c: &Corpus| c.samples.iter().map(|s| s.judgment.term.clone()).collect::<Vec<_>>();
        assert_eq!(terms(&a), terms(&b));
    }

    #[test]
    fn pairs_are_equal_in_the_theory() {
        let c = generate(11, 60, &CorpusConfig::default());
        let pairs = beta_eta_pairs(&c.samples, 1);
        assert!(pairs.len() > 60);
        for p in &pairs {
            assert_eq!(equal_theory(&p.lhs, &p.rhs, &p.judgment), Ok(true), "{} = {}", p.lhs, p.rhs);
        }
    }
}
