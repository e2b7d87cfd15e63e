use criterion::{black_box, criterion_group, criterion_main, Criterion};

use lbox::checker::{check, erase_levels, infer_levels, Mode};
use lbox::fincat::{check_comonad_axioms, power_comonad, Budget, FinMonoid, Shape};
use lbox::rewrite::{normalize, DEFAULT_BUDGET};
use lbox::semantics::{build_model, interp_contextual, Valuation};
use lbox::syntax::Signature;
use lbox_bench::{corpus, derivation, leveled, AXIOM_K};

fn checking(c: &mut Criterion) {
    let k = leveled(AXIOM_K);
    c.bench_function("check axiom K", |b| b.iter(|| check(Mode::Fitch, black_box(&k)).unwrap()));
    let samples = corpus(100);
    c.bench_function("check 100 corpus terms", |b| {
        b.iter(|| samples.iter().all(|s| check(Mode::Fitch, &s.judgment).is_ok()))
    });
    let sig = Signature::new().with("A", &[0, 1, 2]).with("B", &[0, 1, 2]);
    let erased: Vec<_> = samples.iter().map(|s| erase_levels(&s.judgment)).collect();
    c.bench_function("infer levels of 100 corpus terms", |b| {
        b.iter(|| erased.iter().filter(|j| infer_levels(j, &sig, Mode::Fitch, None).is_ok()).count())
    });
}

fn rewriting(c: &mut Criterion) {
    let samples = corpus(100);
    c.bench_function("normalize 100 corpus terms", |b| {
        b.iter(|| {
            for s in &samples {
                normalize(black_box(&s.judgment.term), DEFAULT_BUDGET).unwrap();
            }
        })
    });
}

fn semantics(c: &mut Criterion) {
    let d = derivation(AXIOM_K);
    let model = build_model(&FinMonoid::z2(), 1, Valuation::new().with("A", 2).with("B", 1)).unwrap();
    c.bench_function("interpret axiom K over Z2", |b| b.iter(|| interp_contextual(&model, black_box(&d)).unwrap()));
    let app = derivation(r"x : A, f : A -> B |- f x : B @ 0");
    c.bench_function("interpret application over Z2", |b| b.iter(|| interp_contextual(&model, black_box(&app)).unwrap()));
}

fn laws(c: &mut Criterion) {
    let t = power_comonad(&FinMonoid::z2()).unwrap();
    let objects: Vec<Shape> = (1..=2).map(|k| Shape::atom("X", k)).collect();
    let budget = Budget::default();
    c.bench_function("Z2 comonad laws, sizes 1..2", |b| b.iter(|| check_comonad_axioms(&t, &objects, &budget)));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = checking, rewriting, semantics, laws
}
criterion_main!(benches);
