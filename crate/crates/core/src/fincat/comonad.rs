use std::rc::Rc;

use super::{
    exp_apply, exp_encode, mor_agree, pair, truth, unpair, Agreement, Budget, Category, Ccc, FinError, FinMap, FinMonoid,
    FinSet, LawReport, Mor, Shape,
};

type ObjFn = Rc<dyn Fn(&Shape) -> Shape>;
type MorFn = Rc<dyn Fn(&Mor) -> Mor>;
type FamilyFn = Rc<dyn Fn(&Shape) -> Mor>;
type PairFamilyFn = Rc<dyn Fn(&Shape, &Shape) -> Mor>;

/// A product-preserving comonad with coalgebras and a self-distributive law,
/// given by functions producing each component on demand.
#[derive(Clone)]
pub struct Comonad {
    pub name: String,
    pub cat: Rc<dyn Ccc>,
    obj: ObjFn,
    fmap: MorFn,
    delta: FamilyFn,
    epsilon: FamilyFn,
    alpha: FamilyFn,
    law: FamilyFn,
    /// `TX x TY -> T(X x Y)`, inverse to `<Tπ1, Tπ2>`.
    merge: PairFamilyFn,
}

impl Comonad {
    pub fn obj(&self, x: &Shape) -> Shape {
        (self.obj)(x)
    }

    pub fn fmap(&self, f: &Mor) -> Mor {
        (self.fmap)(f)
    }

    pub fn delta(&self, x: &Shape) -> Mor {
        (self.delta)(x)
    }

    pub fn epsilon(&self, x: &Shape) -> Mor {
        (self.epsilon)(x)
    }

    pub fn alpha(&self, x: &Shape) -> Mor {
        (self.alpha)(x)
    }

    pub fn law(&self, x: &Shape) -> Mor {
        (self.law)(x)
    }

    pub fn merge(&self, x: &Shape, y: &Shape) -> Mor {
        (self.merge)(x, y)
    }

    /// The same comonad with one entry of `δ` at `at` changed.
    pub fn with_mutated_delta(&self, at: &Shape, point: u64) -> Comonad {
        let inner = self.delta.clone();
        let target = at.clone();
        Comonad {
            name: format!("{} (mutated)", self.name),
            delta: Rc::new(move |x| {
                let d = inner(x);
                if *x == target {
                    Mor::new(&d.src, &d.tgt, d.map.mutated(point))
                } else {
                    d
                }
            }),
            ..self.clone()
        }
    }
}

/// `(-)^M` on finite sets: `ε(f) = f(e)`, `δ(f)(a)(b) = f(a·b)`, constant
/// coalgebras and the argument swap as self-distributive law.
pub fn power_comonad(m: &FinMonoid) -> Result<Comonad, FinError> {
    m.check_laws()?;
    let m = Rc::new(m.clone());
    let c = m.carrier();
    let k = m.size();
    let t = {
        let c = c.clone();
        move |x: &Shape| Shape::exp(&c, x)
    };
    let obj: ObjFn = Rc::new(t.clone());
    let fmap: MorFn = {
        let (c, t) = (c.clone(), t.clone());
        Rc::new(move |f: &Mor| {
            let (src, tgt) = (t(&f.src), t(&f.tgt));
            let (fm, x, y, c) = (f.map.clone(), f.src.clone(), f.tgt.clone(), c.clone());
            Mor::new(
                &src,
                &tgt,
                FinMap::lazy(&src, &tgt, move |u| exp_encode(&y, (0..k).map(|a| fm.apply(exp_apply(&c, &x, u, a))))),
            )
        })
    };
    let delta: FamilyFn = {
        let (c, t, m) = (c.clone(), t.clone(), m.clone());
        Rc::new(move |x: &Shape| {
            let (tx, ttx) = (t(x), t(&t(x)));
            let (c, m, x2, tx2) = (c.clone(), m.clone(), x.clone(), tx.clone());
            let map = FinMap::lazy(&tx, &ttx, move |u| {
                exp_encode(&tx2, (0..k).map(|a| exp_encode(&x2, (0..k).map(|b| exp_apply(&c, &x2, u, m.mul(a, b))))))
            });
            Mor::new(&tx, &ttx, map)
        })
    };
    let epsilon: FamilyFn = {
        let (c, t, e) = (c.clone(), t.clone(), m.unit());
        Rc::new(move |x: &Shape| {
            let tx = t(x);
            let (c, x2) = (c.clone(), x.clone());
            Mor::new(&tx, x, FinMap::lazy(&tx, x, move |u| exp_apply(&c, &x2, u, e)))
        })
    };
    let alpha: FamilyFn = {
        let t = t.clone();
        Rc::new(move |x: &Shape| {
            let tx = t(x);
            let x2 = x.clone();
            Mor::new(x, &tx, FinMap::lazy(x, &tx, move |v| exp_encode(&x2, (0..k).map(|_| v))))
        })
    };
    let law: FamilyFn = {
        let (c, t) = (c.clone(), t.clone());
        Rc::new(move |x: &Shape| {
            let tx = t(x);
            let ttx = t(&tx);
            let (c, x2, tx2) = (c.clone(), x.clone(), tx.clone());
            let map = FinMap::lazy(&ttx, &ttx, move |f| {
                exp_encode(
                    &tx2,
                    (0..k).map(|a| exp_encode(&x2, (0..k).map(|b| exp_apply(&c, &x2, exp_apply(&c, &tx2, f, b), a)))),
                )
            });
            Mor::new(&ttx, &ttx, map)
        })
    };
    let merge: PairFamilyFn = {
        let (c, t) = (c.clone(), t.clone());
        Rc::new(move |x: &Shape, y: &Shape| {
            let src = Shape::prod(&t(x), &t(y));
            let xy = Shape::prod(x, y);
            let tgt = t(&xy);
            let (c, x2, y2, ty) = (c.clone(), x.clone(), y.clone(), t(y));
            let map = FinMap::lazy(&src, &tgt, move |p| {
                let (u, v) = unpair(&ty, p);
                exp_encode(&xy, (0..k).map(|a| pair(&y2, exp_apply(&c, &x2, u, a), exp_apply(&c, &y2, v, a))))
            });
            Mor::new(&src, &tgt, map)
        })
    };
    Ok(Comonad {
        name: format!("(-)^M, |M| = {k}"),
        cat: Rc::new(FinSet),
        obj,
        fmap,
        delta,
        epsilon,
        alpha,
        law,
        merge,
    })
}

/// The co-Kleisli category of a comonad: morphisms `X -> Y` are morphisms
/// `TX -> Y` of the underlying category.
#[derive(Clone)]
pub struct CoKleisli {
    pub comonad: Comonad,
}

impl CoKleisli {
    pub fn new(comonad: Comonad) -> CoKleisli {
        CoKleisli { comonad }
    }

    fn base(&self) -> &dyn Ccc {
        self.comonad.cat.as_ref()
    }

    /// `f : X -> Y` here, seen as `TX -> Y` below.
    fn lower(&self, f: &Mor) -> Mor {
        f.relabel(&self.comonad.obj(&f.src))
    }
}

impl Category for CoKleisli {
    fn name(&self) -> String {
        format!("{}_T", self.base().name())
    }

    fn hom_domain(&self, x: &Shape) -> Shape {
        self.base().hom_domain(&self.comonad.obj(x))
    }

    fn identity(&self, x: &Shape) -> Mor {
        self.comonad.epsilon(x).relabel(x)
    }

    fn compose(&self, g: &Mor, f: &Mor) -> Mor {
        let b = self.base();
        let lifted = self.comonad.fmap(&self.lower(f));
        b.compose(&self.lower(g), &b.compose(&lifted, &self.comonad.delta(&f.src))).relabel(&f.src)
    }
}

impl Ccc for CoKleisli {
    fn proj1(&self, x: &Shape, y: &Shape) -> Mor {
        let b = self.base();
        let p = Shape::prod(x, y);
        b.compose(&b.proj1(x, y), &self.comonad.epsilon(&p)).relabel(&p)
    }

    fn proj2(&self, x: &Shape, y: &Shape) -> Mor {
        let b = self.base();
        let p = Shape::prod(x, y);
        b.compose(&b.proj2(x, y), &self.comonad.epsilon(&p)).relabel(&p)
    }

    fn pairing(&self, f: &Mor, g: &Mor) -> Mor {
        self.base().pairing(&self.lower(f), &self.lower(g)).relabel(&f.src)
    }

    fn bang(&self, x: &Shape) -> Mor {
        self.base().bang(&self.comonad.obj(x)).relabel(x)
    }

    fn exponential(&self, x: &Shape, y: &Shape) -> Shape {
        self.base().exponential(&self.comonad.obj(x), y)
    }

    fn eval(&self, x: &Shape, y: &Shape) -> Mor {
        let b = self.base();
        let t = &self.comonad;
        let e = self.exponential(x, y);
        let tx = t.obj(x);
        let fun = b.compose(&t.epsilon(&e), &t.fmap(&b.proj1(&e, x)));
        let arg = t.fmap(&b.proj2(&e, x));
        b.compose(&b.eval(&tx, y), &b.pairing(&fun, &arg)).relabel(&Shape::prod(&e, x))
    }

    fn curry(&self, f: &Mor) -> Mor {
        let (z, x) = f.src.factors().expect("curry needs a product domain");
        let b = self.base();
        let uncurried = b.compose(&self.lower(f), &self.comonad.merge(z, x));
        b.curry(&uncurried).relabel(z)
    }
}

/// The comonad `T_T` on the co-Kleisli category of `T`, with
/// `δ_T = δ∘ε`, `ε_T = ε∘Tε`, `l_T = l∘ε` and `α_T = α∘ε`.
pub fn lift_comonad(t: &Comonad) -> Comonad {
    let below = t.cat.clone();
    let k = Rc::new(CoKleisli::new(t.clone()));
    let obj: ObjFn = {
        let t = t.clone();
        Rc::new(move |x| t.obj(x))
    };
    let fmap: MorFn = {
        let (t, b) = (t.clone(), below.clone());
        Rc::new(move |f: &Mor| {
            let f_low = f.relabel(&t.obj(&f.src));
            b.compose(&t.fmap(&f_low), &t.law(&f.src)).relabel(&t.obj(&f.src))
        })
    };
    let delta: FamilyFn = {
        let (t, b) = (t.clone(), below.clone());
        Rc::new(move |x| b.compose(&t.delta(x), &t.epsilon(&t.obj(x))).relabel(&t.obj(x)))
    };
    let epsilon: FamilyFn = {
        let (t, b) = (t.clone(), below.clone());
        Rc::new(move |x| b.compose(&t.epsilon(x), &t.fmap(&t.epsilon(x))).relabel(&t.obj(x)))
    };
    let law: FamilyFn = {
        let (t, b) = (t.clone(), below.clone());
        Rc::new(move |x| {
            let ttx = t.obj(&t.obj(x));
            b.compose(&t.law(x), &t.epsilon(&ttx)).relabel(&ttx)
        })
    };
    let alpha: FamilyFn = {
        let (t, b) = (t.clone(), below.clone());
        Rc::new(move |x| b.compose(&t.alpha(x), &t.epsilon(x)).relabel(x))
    };
    let merge: PairFamilyFn = {
        let (t, b) = (t.clone(), below);
        Rc::new(move |x, y| {
            let src = Shape::prod(&t.obj(x), &t.obj(y));
            b.compose(&t.merge(x, y), &t.epsilon(&src)).relabel(&src)
        })
    };
    Comonad { name: format!("lift of {}", t.name), cat: k, obj, fmap, delta, epsilon, alpha, law, merge }
}

/// `T∘T` on the same category, composed through the law `l`.
pub fn composite(t: &Comonad) -> Comonad {
    let c = t.cat.clone();
    let obj: ObjFn = {
        let t = t.clone();
        Rc::new(move |x| t.obj(&t.obj(x)))
    };
    let fmap: MorFn = {
        let t = t.clone();
        Rc::new(move |f| t.fmap(&t.fmap(f)))
    };
    // T l T ∘ δ_{TTX} ∘ T δ_X
    let delta: FamilyFn = {
        let (t, c) = (t.clone(), c.clone());
        Rc::new(move |x| {
            let tx = t.obj(x);
            let spread = c.compose(&t.delta(&t.obj(&tx)), &t.fmap(&t.delta(x)));
            c.compose(&t.fmap(&t.law(&tx)), &spread)
        })
    };
    let epsilon: FamilyFn = {
        let (t, c) = (t.clone(), c.clone());
        Rc::new(move |x| c.compose(&t.epsilon(x), &t.epsilon(&t.obj(x))))
    };
    let alpha: FamilyFn = {
        let (t, c) = (t.clone(), c.clone());
        Rc::new(move |x| c.compose(&t.alpha(&t.obj(x)), &t.alpha(x)))
    };
    // swaps the outer pair of factors with the inner pair by four adjacent swaps
    let law: FamilyFn = {
        let (t, c) = (t.clone(), c.clone());
        Rc::new(move |x| {
            let tx = t.obj(x);
            let mid = t.fmap(&t.law(&tx));
            let outer = t.law(&t.obj(&tx));
            let inner = t.fmap(&t.fmap(&t.law(x)));
            c.compose(&mid, &c.compose(&inner, &c.compose(&outer, &mid)))
        })
    };
    let merge: PairFamilyFn = {
        let (t, c) = (t.clone(), c.clone());
        Rc::new(move |x, y| {
            let (tx, ty) = (t.obj(x), t.obj(y));
            c.compose(&t.fmap(&t.merge(x, y)), &t.merge(&tx, &ty))
        })
    };
    Comonad { name: format!("{} composed with itself", t.name), cat: c, obj, fmap, delta, epsilon, alpha, law, merge }
}

/// Folds the outcomes of one law over many instances.
struct Sweep {
    exhaustive: bool,
    points: u64,
    failure: Option<Agreement>,
}

impl Sweep {
    fn new(exhaustive: bool) -> Sweep {
        Sweep { exhaustive, points: 0, failure: None }
    }

    fn add(&mut self, a: Agreement) {
        match a {
            Agreement::Equal { exhaustive, points } => {
                self.exhaustive &= exhaustive;
                self.points += points;
            }
            differ => {
                if self.failure.is_none() {
                    self.failure = Some(differ);
                }
            }
        }
    }

    fn outcome(self) -> Agreement {
        self.failure.unwrap_or(Agreement::Equal { exhaustive: self.exhaustive, points: self.points })
    }
}

/// Comonad, distributive-law, Yang–Baxter, coalgebra, self-distributivity,
/// naturality and product-preservation equations on the given objects.
pub fn check_comonad_axioms(t: &Comonad, objects: &[Shape], budget: &Budget) -> LawReport {
    let c = t.cat.as_ref();
    let comp = |g: &Mor, f: &Mor| c.compose(g, f);
    let mut r = LawReport::default();
    for x in objects {
        let tx = t.obj(x);
        let (d, e, a, l) = (t.delta(x), t.epsilon(x), t.alpha(x), t.law(x));
        let eq = |p: &Mor, q: &Mor| mor_agree(p, q, budget);
        r.record("counit (eT . d = id)", x, eq(&comp(&t.epsilon(&tx), &d), &c.identity(&tx)));
        r.record("counit (Te . d = id)", x, eq(&comp(&t.fmap(&e), &d), &c.identity(&tx)));
        r.record("coassociativity", x, eq(&comp(&t.delta(&tx), &d), &comp(&t.fmap(&d), &d)));
        r.record("functor identity", x, eq(&t.fmap(&c.identity(x)), &c.identity(&tx)));
        let l_t = t.law(&tx);
        let tl = t.fmap(&l);
        r.record("distributive law (delta, outer)", x, eq(&comp(&l_t, &comp(&tl, &t.delta(&tx))), &comp(&t.fmap(&d), &l)));
        r.record("distributive law (eps, outer)", x, eq(&comp(&t.fmap(&e), &l), &t.epsilon(&tx)));
        r.record("distributive law (delta, inner)", x, eq(&comp(&tl, &comp(&l_t, &t.fmap(&d))), &comp(&t.delta(&tx), &l)));
        r.record("distributive law (eps, inner)", x, eq(&comp(&t.epsilon(&tx), &l), &t.fmap(&e)));
        r.record("Yang-Baxter", x, eq(&comp(&tl, &comp(&l_t, &tl)), &comp(&l_t, &comp(&tl, &l_t))));
        r.record("coalgebra counit", x, eq(&comp(&e, &a), &c.identity(x)));
        r.record("coalgebra coassociativity", x, eq(&comp(&t.fmap(&a), &a), &comp(&d, &a)));
        r.record("self-distributive coalgebra", x, eq(&comp(&l, &t.fmap(&a)), &t.alpha(&tx)));
    }
    let one = t.obj(&Shape::unit());
    r.record("T1 is terminal", &one, truth(c.hom_domain(&one).size() == Some(1) && one.size() == Some(1)));
    let mut salt = 0u64;
    for x in objects {
        for y in objects {
            salt += 1;
            let (all, fs) = c.homs(x, y, budget, salt);
            let (_, back) = c.homs(y, x, budget, salt ^ 0xff);
            let mut sweeps: Vec<(&str, Sweep)> = [
                "naturality of delta",
                "naturality of epsilon",
                "naturality of alpha",
                "naturality of the law",
                "functor composition",
            ]
            .into_iter()
            .map(|n| (n, Sweep::new(all)))
            .collect();
            for (i, f) in fs.iter().enumerate() {
                let tf = t.fmap(f);
                let ttf = t.fmap(&tf);
                sweeps[0].1.add(mor_agree(&comp(&t.delta(y), &tf), &comp(&ttf, &t.delta(x)), budget));
                sweeps[1].1.add(mor_agree(&comp(&t.epsilon(y), &tf), &comp(f, &t.epsilon(x)), budget));
                sweeps[2].1.add(mor_agree(&comp(&t.alpha(y), f), &comp(&tf, &t.alpha(x)), budget));
                sweeps[3].1.add(mor_agree(&comp(&t.law(y), &ttf), &comp(&ttf, &t.law(x)), budget));
                let g = &back[i % back.len()];
                sweeps[4].1.add(mor_agree(&t.fmap(&comp(g, f)), &comp(&t.fmap(g), &tf), budget));
            }
            for (name, s) in sweeps {
                r.record(name, format!("{x} -> {y}"), s.outcome());
            }
            let p = Shape::prod(x, y);
            let split = c.pairing(&t.fmap(&c.proj1(x, y)), &t.fmap(&c.proj2(x, y)));
            let merge = t.merge(x, y);
            r.record("product preservation (merge . split)", &p, mor_agree(&comp(&merge, &split), &c.identity(&t.obj(&p)), budget));
            r.record(
                "product preservation (split . merge)",
                &p,
                mor_agree(&comp(&split, &merge), &c.identity(&Shape::prod(&t.obj(x), &t.obj(y))), budget),
            );
        }
    }
    r
}

/// Category, product, terminal and exponential laws of the co-Kleisli category.
pub fn check_cokleisli_ccc(t: &Comonad, objects: &[Shape], budget: &Budget) -> LawReport {
    let k = CoKleisli::new(t.clone());
    let mut r = LawReport::default();
    let mut salt = 0x5eed_u64;
    let n = objects.len();
    for (i, x) in objects.iter().enumerate() {
        let y = &objects[(i + 1) % n];
        let z = &objects[(i + 2) % n];
        salt += 1;
        let (all, fs) = k.homs(x, y, budget, salt);
        let (_, gs) = k.homs(y, z, budget, salt + 100);
        let (_, hs) = k.homs(z, x, budget, salt + 200);
        let mut unit = Sweep::new(all);
        let mut assoc = Sweep::new(all);
        for (j, f) in fs.iter().enumerate() {
            unit.add(mor_agree(&k.compose(&k.identity(y), f), f, budget));
            unit.add(mor_agree(&k.compose(f, &k.identity(x)), f, budget));
            let (g, h) = (&gs[j % gs.len()], &hs[j % hs.len()]);
            assoc.add(mor_agree(&k.compose(h, &k.compose(g, f)), &k.compose(&k.compose(h, g), f), budget));
        }
        r.record("identity", format!("{x} -> {y}"), unit.outcome());
        r.record("associativity", format!("{x} -> {y} -> {z} -> {x}"), assoc.outcome());

        let (_, fs) = k.homs(z, x, budget, salt + 300);
        let (_, gs) = k.homs(z, y, budget, salt + 400);
        let (all_h, hs) = k.homs(z, &Shape::prod(x, y), budget, salt + 500);
        let mut beta = Sweep::new(all_h);
        for (f, g) in fs.iter().zip(gs.iter()) {
            let fg = k.pairing(f, g);
            beta.add(mor_agree(&k.compose(&k.proj1(x, y), &fg), f, budget));
            beta.add(mor_agree(&k.compose(&k.proj2(x, y), &fg), g, budget));
        }
        let mut eta = Sweep::new(all_h);
        for h in &hs {
            let split = k.pairing(&k.compose(&k.proj1(x, y), h), &k.compose(&k.proj2(x, y), h));
            eta.add(mor_agree(&split, h, budget));
        }
        r.record("product projections", format!("{z} -> {x} x {y}"), beta.outcome());
        r.record("product uniqueness", format!("{z} -> {x} x {y}"), eta.outcome());
        let (_, bangs) = k.homs(x, &Shape::unit(), budget, salt + 600);
        r.record("terminal", x, truth(bangs.len() == 1 && mor_agree(&bangs[0], &k.bang(x), budget).holds()));

        let zx = Shape::prod(z, x);
        let (all_f, fs) = k.homs(&zx, y, budget, salt + 700);
        let mut ev = Sweep::new(all_f);
        for f in &fs {
            let lhs = k.compose(&k.eval(x, y), &k.times(&k.curry(f), &k.identity(x)));
            ev.add(mor_agree(&lhs, f, budget));
        }
        r.record("exponential beta", format!("{z} x {x} -> {y}"), ev.outcome());
        let e = k.exponential(x, y);
        let (all_g, gs) = k.homs(z, &e, budget, salt + 800);
        let mut uniq = Sweep::new(all_g);
        for g in &gs {
            let back = k.curry(&k.compose(&k.eval(x, y), &k.times(g, &k.identity(x))));
            uniq.add(mor_agree(&back, g, budget));
        }
        r.record("exponential eta", format!("{z} -> [{x}, {y}]"), uniq.outcome());
    }
    r
}

/// Compares the co-Kleisli category of the lifted comonad with that of the
/// composite `T∘T`: hom sets, identities, composition and both adjunctions.
pub fn compare_lift_with_composite(t: &Comonad, objects: &[Shape], budget: &Budget) -> LawReport {
    let lifted = lift_comonad(t);
    let tt = composite(t);
    let mid = CoKleisli::new(t.clone());
    let upper = CoKleisli::new(lifted.clone());
    let direct = CoKleisli::new(tt.clone());
    let base = t.cat.as_ref();
    let mut r = LawReport::default();
    let mut salt = 0xc0de_u64;
    for x in objects {
        r.record("same hom domains", x, truth(upper.hom_domain(x) == direct.hom_domain(x)));
        r.record("same identities", x, mor_agree(&upper.identity(x), &direct.identity(x), budget));
        for y in objects {
            salt += 1;
            let (all, fs) = upper.homs(x, y, budget, salt);
            let (_, gs) = upper.homs(y, x, budget, salt + 1);
            let mut same = Sweep::new(all);
            let mut right = Sweep::new(all);
            for (f, g) in fs.iter().zip(gs.iter().cycle()) {
                same.add(mor_agree(&upper.compose(g, f), &direct.compose(g, f), budget));
                // upper -> mid -> base against direct -> base
                let step = mid.compose(&lifted.fmap(&f.relabel(&t.obj(x))), &lifted.delta(x));
                let via = base.compose(&t.fmap(&step.relabel(&t.obj(&step.src))), &t.delta(&t.obj(x)));
                let straight = base.compose(&tt.fmap(&f.relabel(&tt.obj(x))), &tt.delta(x));
                right.add(mor_agree(&via, &straight, budget));
            }
            r.record("same composition", format!("{x} -> {y} -> {x}"), same.outcome());
            r.record("cofree functors commute", format!("{x} -> {y}"), right.outcome());

            let (all_b, bs) = base.homs(x, y, budget, salt + 2);
            let mut left = Sweep::new(all_b);
            for f in &bs {
                let into_mid = base.compose(f, &t.epsilon(x)).relabel(x);
                let via = mid.compose(&into_mid, &lifted.epsilon(x)).relabel(x);
                let straight = base.compose(f, &tt.epsilon(x)).relabel(x);
                left.add(mor_agree(&via, &straight, budget));
            }
            r.record("inclusions commute", format!("{x} -> {y}"), left.outcome());
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: u64) -> Vec<Shape> {
        (1..=n).map(|k| Shape::atom("X", k)).collect()
    }

    #[test]
    fn power_comonad_tables() {
        let t = power_comonad(&FinMonoid::z2()).unwrap();
        let two = Shape::atom("X", 2);
        assert_eq!(t.obj(&two).size(), Some(4));
        assert_eq!(t.obj(&Shape::unit()).size(), Some(1));
        // f = [f(0) f(1)]; ε picks f(0), δ(f)(1)(1) = f(0)
        let f = 1; // [0 1]
        assert_eq!(t.epsilon(&two).map.apply(f), 0);
        let d = t.delta(&two).map.apply(f);
        let tx = t.obj(&two);
        let row1 = exp_apply(&FinMonoid::z2().carrier(), &tx, d, 1);
        assert_eq!(tx.render(row1), "[1 0]");
    }

    #[test]
    fn trivial_and_z2_satisfy_all_axioms() {
        for m in [FinMonoid::trivial(), FinMonoid::z2()] {
            let t = power_comonad(&m).unwrap();
            let r = check_comonad_axioms(&t, &small(3), &Budget::default());
            assert!(r.all_pass(), "{r}");
        }
    }

    #[test]
    fn mutated_delta_is_caught() {
        let t = power_comonad(&FinMonoid::z2()).unwrap();
        let two = Shape::atom("X", 2);
        let bad = t.with_mutated_delta(&two, 1);
        let r = check_comonad_axioms(&bad, &[two], &Budget::default());
        let failed: Vec<&str> = r.failures().iter().map(|c| c.law.as_str()).collect();
        assert!(failed.iter().any(|l| l.starts_with("counit") || *l == "coassociativity"), "{r}");
    }

    #[test]
    fn cokleisli_identity_is_counit() {
        let t = power_comonad(&FinMonoid::z2()).unwrap();
        let two = Shape::atom("X", 2);
        let k = CoKleisli::new(t.clone());
        assert_eq!(k.identity(&two).map.to_table().unwrap(), t.epsilon(&two).map.to_table().unwrap());
    }

    #[test]
    fn trivial_cokleisli_is_the_base() {
        let t = power_comonad(&FinMonoid::trivial()).unwrap();
        let k = CoKleisli::new(t);
        let (x, y) = (Shape::atom("X", 2), Shape::atom("Y", 3));
        let budget = Budget::default();
        let (_, fs) = k.homs(&x, &y, &budget, 1);
        let (_, gs) = k.homs(&y, &x, &budget, 2);
        for (f, g) in fs.iter().zip(&gs) {
            let kk = k.compose(g, f).map.to_table().unwrap();
            let fs_ = Mor::new(&x, &y, FinMap::table(&x, &y, f.map.to_table().unwrap()).unwrap());
            let gs_ = Mor::new(&y, &x, FinMap::table(&y, &x, g.map.to_table().unwrap()).unwrap());
            assert_eq!(kk, FinSet.compose(&gs_, &fs_).map.to_table().unwrap());
        }
    }

    #[test]
    fn cokleisli_is_cartesian_closed() {
        let t = power_comonad(&FinMonoid::z2()).unwrap();
        let r = check_cokleisli_ccc(&t, &small(2), &Budget::default());
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn lifted_comonad_and_composite() {
        let t = power_comonad(&FinMonoid::z2()).unwrap();
        let budget = Budget::default();
        let lifted = lift_comonad(&t);
        let r = check_comonad_axioms(&lifted, &small(2), &budget);
        assert!(r.all_pass(), "{r}");
        // T'T'T' X2 = T^6 X2 has no u64 index
        let r = check_comonad_axioms(&composite(&t), &small(1), &budget);
        assert!(r.all_pass(), "{r}");
        let trivial = power_comonad(&FinMonoid::trivial()).unwrap();
        let r = check_comonad_axioms(&composite(&trivial), &small(2), &budget);
        assert!(r.all_pass(), "{r}");
        let r = compare_lift_with_composite(&t, &small(2), &budget);
        assert!(r.all_pass(), "{r}");
    }
}
